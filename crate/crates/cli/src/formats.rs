//! Line-oriented text formats for every input and output of the CLI.
//!
//! * database: `alphabet:` header, optional `sensitive:` header with
//!   0-based column indices, then whitespace-separated token rows.
//!   `#` starts a comment. `*` is accepted only in released tables.
//! * graph: `p edge N M`, then `e u v` per edge (1-based). A tripartite
//!   graph adds `v u part` for every vertex, `part` in `0..3`.
//! * cnf: `p cnf V C`, then clauses of exactly three literals, each ended by `0`.
//! * 3dm: `p 3dm W X Y M`, then `t w x y` per triple (1-based).
//! * hierarchy: one `symbol cost` per line, children indented deeper than
//!   their parent. Costs are integers or fractions such as `3/2`.
//! * partition: one block of three edges per line, `u-v u-v u-v` (1-based).
//!
//! Graph, cnf and 3dm files take `c` comment lines.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use kanon::hierarchy::{violations, HierarchyNode, Violation};
use kanon::oracles::EdgeBlock;
use kanon::reductions::{CnfFormula, Literal, ThreeDmInstance};
use kanon::{Alphabet, Cell, Database, DiversityInstance, Graph, Rational, RationalHierarchy, TripartiteGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line, when the problem has one.
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError { line: Some(line), message: message.into() }
    }

    fn whole(message: impl Into<String>) -> Self {
        ParseError { line: None, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

pub type ParseResult<T> = Result<T, ParseError>;

// Non-blank lines with comments removed, paired with 1-based line numbers.
fn content_lines<'a>(
    text: &'a str,
    comment: impl Fn(&str) -> bool + 'a,
) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let line = raw.trim();
        (!line.is_empty() && !comment(line)).then_some((i + 1, line))
    })
}

fn dimacs_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    content_lines(text, |l| l == "c" || l.starts_with("c ") || l.starts_with('%'))
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> ParseResult<T> {
    token.parse().map_err(|_| ParseError::at(line, format!("expected {what}, found `{token}`")))
}

// 1-based index in `1..=n`, returned 0-based.
fn one_based(line: usize, token: &str, n: usize, what: &str) -> ParseResult<usize> {
    let v: usize = number(line, token, what)?;
    if v == 0 || v > n {
        return Err(ParseError::at(line, format!("{what} {v} out of range 1..={n}")));
    }
    Ok(v - 1)
}

fn header<'a>(line: usize, text: &'a str, kind: &str, fields: usize) -> ParseResult<Vec<&'a str>> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != fields + 2 || toks[0] != "p" || toks[1] != kind {
        return Err(ParseError::at(line, format!("expected `p {kind}` header with {fields} numbers")));
    }
    Ok(toks[2..].to_vec())
}

/// A database file: the table and its optional sensitive columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatabaseFile {
    pub db: Database,
    pub sensitive: Option<Vec<usize>>,
}

pub fn parse_database_file(text: &str, released: bool) -> ParseResult<DatabaseFile> {
    let mut lines =
        content_lines(text, |l| l.starts_with('#')).map(|(n, l)| (n, l.split('#').next().unwrap_or("").trim()));
    let (n, first) = lines.next().ok_or_else(|| ParseError::whole("empty database file"))?;
    let symbols = first.strip_prefix("alphabet:").ok_or_else(|| ParseError::at(n, "expected `alphabet:` header"))?;
    let alphabet = Arc::new(Alphabet::new(symbols.split_whitespace()).map_err(|e| ParseError::at(n, e.to_string()))?);
    let mut sensitive = None;
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut width = None;
    for (n, line) in lines {
        if let Some(cols) = line.strip_prefix("sensitive:") {
            if sensitive.is_some() || !rows.is_empty() {
                return Err(ParseError::at(n, "`sensitive:` must come once, before the rows"));
            }
            let cols =
                cols.split_whitespace().map(|t| number(n, t, "column index")).collect::<ParseResult<Vec<usize>>>()?;
            sensitive = Some(cols);
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let cell = if released { alphabet.released_cell(tok) } else { alphabet.cell(tok) };
            row.push(cell.ok_or_else(|| {
                if tok == "*" {
                    ParseError::at(n, "`*` is not allowed in an input database")
                } else {
                    ParseError::at(n, format!("unknown symbol `{tok}`"))
                }
            })?);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(ParseError::at(n, format!("row has {} cells, expected {w}", row.len())));
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError::whole("database has no rows"));
    }
    let db = if released { Database::released(alphabet, rows) } else { Database::new(alphabet, rows) }
        .map_err(|e| ParseError::whole(e.to_string()))?;
    if let Some(cols) = &sensitive {
        if let Some(&c) = cols.iter().find(|&&c| c >= db.n_cols()) {
            return Err(ParseError::whole(format!("sensitive column {c} out of range for {} columns", db.n_cols())));
        }
    }
    Ok(DatabaseFile { db, sensitive })
}

/// Input database; stars are rejected.
pub fn parse_database(text: &str) -> ParseResult<Database> {
    parse_database_file(text, false).map(|f| f.db)
}

pub fn parse_released_database(text: &str) -> ParseResult<Database> {
    parse_database_file(text, true).map(|f| f.db)
}

/// Input database with its `sensitive:` header; the other columns are `Q`.
pub fn parse_diversity(text: &str) -> ParseResult<DiversityInstance> {
    let file = parse_database_file(text, false)?;
    let s = file.sensitive.ok_or_else(|| ParseError::whole("missing `sensitive:` header"))?;
    let q = (0..file.db.n_cols()).filter(|c| !s.contains(c)).collect();
    DiversityInstance::new(file.db, q, s).map_err(|e| ParseError::whole(e.to_string()))
}

pub fn serialize_database(db: &Database) -> String {
    serialize_table(db, None)
}

pub fn serialize_diversity(inst: &DiversityInstance) -> String {
    serialize_table(inst.db(), Some(inst.s_columns()))
}

fn serialize_table(db: &Database, sensitive: Option<&[usize]>) -> String {
    let a = db.alphabet();
    let mut out = format!("alphabet: {}\n", a.symbols().join(" "));
    if let Some(s) = sensitive {
        let cols: Vec<String> = s.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "sensitive: {}", cols.join(" "));
    }
    for row in db.rows() {
        let toks: Vec<&str> = row.iter().map(|&c| a.name(c)).collect();
        let _ = writeln!(out, "{}", toks.join(" "));
    }
    out
}

struct GraphFile {
    graph: Graph,
    parts: Vec<Option<usize>>,
}

fn parse_graph_file(text: &str) -> ParseResult<GraphFile> {
    let mut lines = dimacs_lines(text);
    let (n, first) = lines.next().ok_or_else(|| ParseError::whole("empty graph file"))?;
    let h = header(n, first, "edge", 2)?;
    let vertices: usize = number(n, h[0], "vertex count")?;
    let m: usize = number(n, h[1], "edge count")?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = HashMap::new();
    let mut parts = vec![None; vertices];
    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["e", u, v] => {
                let (u, v) = (one_based(n, u, vertices, "vertex")?, one_based(n, v, vertices, "vertex")?);
                if u == v {
                    return Err(ParseError::at(n, format!("loop at vertex {}", u + 1)));
                }
                if let Some(prev) = seen.insert((u.min(v), u.max(v)), n) {
                    return Err(ParseError::at(n, format!("edge {}-{} repeats line {prev}", u + 1, v + 1)));
                }
                edges.push((u, v));
            }
            ["v", u, p] => {
                let u = one_based(n, u, vertices, "vertex")?;
                let p: usize = number(n, p, "part")?;
                if p > 2 {
                    return Err(ParseError::at(n, format!("part {p} is not 0, 1 or 2")));
                }
                if parts[u].replace(p).is_some() {
                    return Err(ParseError::at(n, format!("vertex {} assigned twice", u + 1)));
                }
            }
            _ => return Err(ParseError::at(n, "expected `e u v` or `v u part`")),
        }
    }
    if edges.len() != m {
        return Err(ParseError::whole(format!("header promises {m} edges, found {}", edges.len())));
    }
    let graph = Graph::new(vertices, edges).map_err(|e| ParseError::whole(e.to_string()))?;
    Ok(GraphFile { graph, parts })
}

pub fn parse_graph(text: &str) -> ParseResult<Graph> {
    parse_graph_file(text).map(|f| f.graph)
}

/// Graph whose every vertex has a `v` line; edges must join distinct parts.
pub fn parse_tripartite(text: &str) -> ParseResult<TripartiteGraph> {
    let f = parse_graph_file(text)?;
    let parts = f
        .parts
        .iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| ParseError::whole(format!("vertex {} has no part", v + 1))))
        .collect::<ParseResult<Vec<usize>>>()?;
    for &(a, b) in f.graph.edges() {
        if parts[a] == parts[b] {
            return Err(ParseError::whole(format!("edge {}-{} lies inside part {}", a + 1, b + 1, parts[a])));
        }
    }
    TripartiteGraph::new(f.graph, parts).map_err(|e| ParseError::whole(e.to_string()))
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for &(a, b) in g.edges() {
        let _ = writeln!(out, "e {} {}", a + 1, b + 1);
    }
    out
}

pub fn serialize_tripartite(t: &TripartiteGraph) -> String {
    let mut out = serialize_graph(t.graph());
    for (v, p) in t.parts().iter().enumerate() {
        let _ = writeln!(out, "v {} {p}", v + 1);
    }
    out
}

pub fn parse_cnf(text: &str) -> ParseResult<CnfFormula> {
    let mut lines = dimacs_lines(text);
    let (n, first) = lines.next().ok_or_else(|| ParseError::whole("empty cnf file"))?;
    let h = header(n, first, "cnf", 2)?;
    let vars: usize = number(n, h[0], "variable count")?;
    let count: usize = number(n, h[1], "clause count")?;
    let mut clauses = Vec::with_capacity(count);
    let mut current: Vec<Literal> = Vec::new();
    let mut start = 0;
    for (n, line) in lines {
        for tok in line.split_whitespace() {
            if current.is_empty() {
                start = n;
            }
            let lit: i64 = number(n, tok, "literal")?;
            if lit == 0 {
                let clause: [Literal; 3] = current
                    .as_slice()
                    .try_into()
                    .map_err(|_| ParseError::at(start, format!("clause has {} literals, expected 3", current.len())))?;
                clauses.push(clause);
                current.clear();
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > vars {
                return Err(ParseError::at(n, format!("variable {var} exceeds the declared {vars}")));
            }
            current.push(Literal { var: var - 1, positive: lit > 0 });
        }
    }
    if !current.is_empty() {
        return Err(ParseError::at(start, "clause not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(ParseError::whole(format!("header promises {count} clauses, found {}", clauses.len())));
    }
    CnfFormula::new(vars, clauses).map_err(|e| ParseError::whole(e.to_string()))
}

pub fn serialize_cnf(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.variables(), phi.clauses().len());
    for c in phi.clauses() {
        let _ = writeln!(out, "{} {} {} 0", c[0], c[1], c[2]);
    }
    out
}

pub fn parse_3dm(text: &str) -> ParseResult<ThreeDmInstance> {
    let mut lines = dimacs_lines(text);
    let (n, first) = lines.next().ok_or_else(|| ParseError::whole("empty 3dm file"))?;
    let h = header(n, first, "3dm", 4)?;
    let sizes: Vec<usize> = h.iter().map(|t| number(n, t, "size")).collect::<ParseResult<_>>()?;
    let names = ["W", "X", "Y"];
    let mut occ: [Vec<usize>; 3] = [vec![0; sizes[0]], vec![0; sizes[1]], vec![0; sizes[2]]];
    let mut seen = HashMap::new();
    let mut triples = Vec::with_capacity(sizes[3]);
    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let ["t", rest @ ..] = toks.as_slice() else {
            return Err(ParseError::at(n, "expected `t w x y`"));
        };
        if rest.len() != 3 {
            return Err(ParseError::at(n, "expected `t w x y`"));
        }
        let mut t = [0; 3];
        for s in 0..3 {
            t[s] = one_based(n, rest[s], sizes[s], &format!("{} element", names[s]))?;
            occ[s][t[s]] += 1;
            if occ[s][t[s]] > 3 {
                return Err(ParseError::at(
                    n,
                    format!("{} element {} occurs in more than 3 triples", names[s], t[s] + 1),
                ));
            }
        }
        if let Some(prev) = seen.insert(t, n) {
            return Err(ParseError::at(n, format!("triple repeats line {prev}")));
        }
        triples.push(t);
    }
    if triples.len() != sizes[3] {
        return Err(ParseError::whole(format!("header promises {} triples, found {}", sizes[3], triples.len())));
    }
    ThreeDmInstance::new(sizes[0], sizes[1], sizes[2], triples).map_err(|e| ParseError::whole(e.to_string()))
}

pub fn serialize_3dm(inst: &ThreeDmInstance) -> String {
    let [w, x, y] = inst.sizes();
    let mut out = format!("p 3dm {w} {x} {y} {}\n", inst.triples().len());
    for t in inst.triples() {
        let _ = writeln!(out, "t {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

/// Hierarchy over `alphabet`; leaves must be exactly its symbols.
pub fn parse_hierarchy(text: &str, alphabet: Arc<Alphabet>) -> ParseResult<RationalHierarchy> {
    let mut nodes: Vec<HierarchyNode<Rational>> = Vec::new();
    let mut line_of = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new(); // (indent, node)
    for (n, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start_matches(' ').len();
        if body[indent..].starts_with('\t') {
            return Err(ParseError::at(n, "indent with spaces, not tabs"));
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let [symbol, cost] = toks.as_slice() else {
            return Err(ParseError::at(n, "expected `symbol cost`"));
        };
        let cost: Rational = number(n, cost, "cost")?;
        while stack.last().is_some_and(|&(i, _)| i >= indent) {
            stack.pop();
        }
        let parent = stack.last().map(|&(_, p)| p);
        if parent.is_none() && !nodes.is_empty() {
            return Err(ParseError::at(n, "second root; indent it under the first"));
        }
        stack.push((indent, nodes.len()));
        nodes.push(HierarchyNode { symbol: symbol.to_string(), cost, parent });
        line_of.push(n);
    }
    if nodes.is_empty() {
        return Err(ParseError::whole("empty hierarchy file"));
    }
    if let Some(v) = violations(&alphabet, &nodes).into_iter().next() {
        let line = match &v {
            Violation::ParentOutOfRange { node }
            | Violation::Unreachable { node }
            | Violation::NegativeCost { node } => Some(line_of[*node]),
            Violation::CostNotMonotone { child, .. } => Some(line_of[*child]),
            Violation::DuplicateSymbol(s)
            | Violation::LeafNotInAlphabet(s)
            | Violation::InternalSymbolInAlphabet(s) => nodes.iter().rposition(|n| &n.symbol == s).map(|i| line_of[i]),
            _ => None,
        };
        return Err(ParseError { line, message: v.to_string() });
    }
    RationalHierarchy::new(alphabet, nodes).map_err(|e| ParseError::whole(e.to_string()))
}

pub fn serialize_hierarchy(h: &RationalHierarchy) -> String {
    fn walk(h: &RationalHierarchy, v: usize, depth: usize, out: &mut String) {
        let node = h.node(v);
        let _ = writeln!(out, "{}{} {}", "  ".repeat(depth), node.symbol, node.cost);
        for c in h.children(v) {
            walk(h, c, depth + 1, out);
        }
    }
    let mut out = String::new();
    walk(h, h.root(), 0, &mut out);
    out
}

pub fn parse_partition(text: &str) -> ParseResult<Vec<EdgeBlock>> {
    let mut blocks = Vec::new();
    for (n, line) in content_lines(text, |l| l.starts_with('#')) {
        let edges: Vec<(usize, usize)> = line
            .split_whitespace()
            .map(|tok| {
                let (a, b) =
                    tok.split_once('-').ok_or_else(|| ParseError::at(n, format!("expected `u-v`, found `{tok}`")))?;
                let (a, b): (usize, usize) = (number(n, a, "vertex")?, number(n, b, "vertex")?);
                if a == 0 || b == 0 {
                    return Err(ParseError::at(n, "vertices are numbered from 1"));
                }
                Ok((a - 1, b - 1))
            })
            .collect::<ParseResult<_>>()?;
        let block: EdgeBlock = edges
            .as_slice()
            .try_into()
            .map_err(|_| ParseError::at(n, format!("block has {} edges, expected 3", edges.len())))?;
        blocks.push(block);
    }
    Ok(blocks)
}

pub fn serialize_partition(blocks: &[EdgeBlock]) -> String {
    let mut out = String::new();
    for b in blocks {
        let toks: Vec<String> = b.iter().map(|&(u, v)| format!("{}-{}", u + 1, v + 1)).collect();
        let _ = writeln!(out, "{}", toks.join(" "));
    }
    out
}

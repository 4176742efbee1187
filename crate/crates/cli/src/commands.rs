//! Subcommands. Each returns an [`Outcome`]: the text block for standard
//! output and whether the instance was feasible.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kanon::acceptance;
use kanon::cost::CostModel;
use kanon::diversity::{solve_l_diversity_bruteforce_with, DiversityInstance, DiversityRule};
use kanon::oracles::{
    assignment_from_partition, block_kind, classify_gadget_partition, edge_partition_search, enumerate_1in3_sat,
    max_3dm_bruteforce, verify_edge_partition, BlockKind,
};
use kanon::reductions::{
    check_gadget_graph, formula_to_graph, graph_to_incidence_db, tdm3_to_db27, tripartite_to_2div, tripartite_to_3div,
    CnfFormula, GadgetRegistry,
};
use kanon::solvers::{brute_force_with, dnc_with, solve_2_anonymity_with, solve_k_anonymity_kernelized};
use kanon::{AnonymizationSolution, Database, Error, Rational, Suppression};

use crate::formats::{self, ParseError};

#[derive(Debug, Parser)]
#[command(name = "kanon", version, about = "Exact k-anonymity and l-diversity solvers, reductions and checkers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal k-anonymization of a database by suppression or generalization.
    Anonymize(AnonymizeArgs),
    /// Optimal l-diversification by brute force (up to 12 rows).
    Diversify(DiversifyArgs),
    /// Build a hardness-reduction instance from a source instance.
    Reduce(ReduceArgs),
    /// Exhaustive oracles for the source problems.
    Oracle(OracleArgs),
    /// Check an edge partition, and read an assignment off it given a registry.
    Verify(VerifyArgs),
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Simplex,
    Dnc,
    Kernel,
    Brute,
}

#[derive(Debug, Args)]
pub struct AnonymizeArgs {
    /// Database file.
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "dnc")]
    pub method: Method,
    /// Generalization hierarchy file; suppression when absent.
    #[arg(long)]
    pub hierarchy: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    /// At least l distinct values per sensitive column in every class.
    Distinct,
    /// l-1 companions, pairwise distinct on every sensitive column.
    Pairwise,
}

#[derive(Debug, Args)]
pub struct DiversifyArgs {
    /// Database file.
    pub input: PathBuf,
    #[arg(long)]
    pub l: usize,
    /// Quasi-identifier columns (0-based, comma separated). Default: all non-sensitive columns.
    #[arg(long, value_delimiter = ',')]
    pub q_cols: Option<Vec<usize>>,
    /// Sensitive columns (0-based, comma separated). Default: the file's `sensitive:` header.
    #[arg(long, value_delimiter = ',')]
    pub s_cols: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "distinct")]
    pub rule: Rule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// cnf file to the gadget graph.
    #[value(name = "1in3sat")]
    OneInThreeSat,
    /// 3dm file to the 27-column database.
    #[value(name = "3dm3")]
    Tdm3,
    /// graph file to its incidence database.
    Graph,
    /// Tripartite graph file to the 2-diversity database.
    #[value(name = "tripartite-2div")]
    Tripartite2Div,
    /// Tripartite graph file to the 3-diversity database.
    #[value(name = "tripartite-3div")]
    Tripartite3Div,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    pub from: Source,
    /// Source instance file.
    pub input: PathBuf,
    /// Where to write the built instance; embedded in the result when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the gadget registry (JSON); `1in3sat` only.
    #[arg(long)]
    pub registry_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    #[value(name = "1in3sat")]
    OneInThreeSat,
    #[value(name = "3dm")]
    Tdm,
    EdgePartition,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// cnf, 3dm or graph file.
    pub input: PathBuf,
    /// Edge partition: allow triangles as well as 4-stars.
    #[arg(long)]
    pub allow_triangles: bool,
    /// Edge partition: write the partition found here.
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub partition: PathBuf,
    /// Gadget registry written by `reduce --from 1in3sat`.
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub feasible: bool,
}

impl Outcome {
    fn json(value: Value, feasible: bool) -> Self {
        Outcome { output: serde_json::to_string_pretty(&value).expect("json values serialize"), feasible }
    }
}

/// Errors the user can fix by changing the command line or an input file.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> anyhow::Result<T> {
    r.map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn rational_json(c: Rational) -> Value {
    if *c.denom() == 1 {
        json!(c.numer())
    } else {
        json!(c.to_string())
    }
}

pub fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Anonymize(a) => anonymize(&a),
        Command::Diversify(a) => diversify(&a),
        Command::Reduce(a) => reduce(&a),
        Command::Oracle(a) => oracle(&a),
        Command::Verify(a) => verify(&a),
        Command::Selftest => Ok(selftest()),
    }
}

fn infeasible(problem: &str, reason: String) -> Outcome {
    Outcome::json(json!({ "problem": problem, "feasible": false, "reason": reason }), false)
}

fn anonymize(a: &AnonymizeArgs) -> anyhow::Result<Outcome> {
    if a.method == Method::Simplex && a.k != 2 {
        bail!(usage(format!("--method simplex solves k = 2 only, got k = {}", a.k)));
    }
    if a.k == 0 {
        bail!(usage("--k must be at least 1"));
    }
    let db = parsed(&a.input, formats::parse_database(&read(&a.input)?))?;
    if db.n_rows() < a.k {
        return Ok(infeasible("k-anonymity", format!("{} rows cannot form groups of {}", db.n_rows(), a.k)));
    }
    let result = match &a.hierarchy {
        None => {
            let solved = if a.method == Method::Kernel {
                solve_k_anonymity_kernelized(&db, a.k)
            } else {
                solve(&Suppression, &db, a.k, a.method)
            };
            solved.map(|s| {
                let released = s.per_row_release(db.n_rows());
                let rows: Vec<String> =
                    released.iter().map(|r| tokens(r.iter().map(|&c| db.alphabet().name(c)))).collect();
                (json!(s.cost), s.group_indices(), rows)
            })
        }
        Some(path) => {
            if a.method == Method::Kernel {
                bail!(usage("--method kernel prices suppression only; drop --hierarchy or pick another method"));
            }
            let h = parsed(path, formats::parse_hierarchy(&read(path)?, db.alphabet().clone()))?;
            solve(&h, &db, a.k, a.method).map(|s| {
                let released = s.per_row_release(db.n_rows());
                let rows: Vec<String> =
                    released.iter().map(|r| tokens(r.iter().map(|&v| h.node(v).symbol.as_str()))).collect();
                (rational_json(s.cost), s.group_indices(), rows)
            })
        }
    };
    match result {
        Ok((cost, groups, released)) => Ok(Outcome::json(
            json!({
                "problem": "k-anonymity",
                "k": a.k,
                "method": format!("{:?}", a.method).to_lowercase(),
                "feasible": true,
                "cost": cost,
                "groups": groups,
                "released": released,
            }),
            true,
        )),
        Err(Error::Infeasible(why)) => Ok(infeasible("k-anonymity", why)),
        Err(e) => Err(usage(e.to_string())),
    }
}

fn tokens<'a>(it: impl Iterator<Item = &'a str>) -> String {
    it.collect::<Vec<_>>().join(" ")
}

fn solve<M: CostModel>(
    model: &M,
    db: &Database,
    k: usize,
    method: Method,
) -> kanon::Result<AnonymizationSolution<M::Cost, M::Released>> {
    match method {
        Method::Simplex => solve_2_anonymity_with(model, db),
        Method::Dnc => dnc_with(model, db, k),
        Method::Brute => brute_force_with(model, db, k),
        Method::Kernel => unreachable!("the kernel pipeline is suppression only"),
    }
}

fn diversify(a: &DiversifyArgs) -> anyhow::Result<Outcome> {
    let file = parsed(&a.input, formats::parse_database_file(&read(&a.input)?, false))?;
    let s = a
        .s_cols
        .clone()
        .or(file.sensitive)
        .ok_or_else(|| usage("no sensitive columns: pass --s-cols or add a `sensitive:` header"))?;
    let q = a.q_cols.clone().unwrap_or_else(|| (0..file.db.n_cols()).filter(|c| !s.contains(c)).collect());
    let inst = DiversityInstance::new(file.db, q, s).map_err(|e| usage(e.to_string()))?;
    let rule = match a.rule {
        Rule::Distinct => DiversityRule::DistinctPerAttribute,
        Rule::Pairwise => DiversityRule::PairwiseWitnesses,
    };
    match solve_l_diversity_bruteforce_with(&inst, a.l, rule) {
        Ok(sol) => {
            let groups: Vec<Vec<usize>> = sol.groups.iter().map(|g| g.members().to_vec()).collect();
            let released = inst.release(&groups).map_err(|e| usage(e.to_string()))?;
            let rows: Vec<String> =
                released.rows().iter().map(|r| tokens(r.iter().map(|&c| released.alphabet().name(c)))).collect();
            Ok(Outcome::json(
                json!({
                    "problem": "l-diversity",
                    "l": a.l,
                    "q_columns": inst.q_columns(),
                    "s_columns": inst.s_columns(),
                    "feasible": true,
                    "cost": sol.cost,
                    "groups": groups,
                    "released": rows,
                }),
                true,
            ))
        }
        Err(Error::Infeasible(why)) => Ok(infeasible("l-diversity", why)),
        Err(e) => Err(usage(e.to_string())),
    }
}

fn reduce(a: &ReduceArgs) -> anyhow::Result<Outcome> {
    let text = read(&a.input)?;
    if a.registry_out.is_some() && a.from != Source::OneInThreeSat {
        bail!(usage("--registry-out applies to --from 1in3sat only"));
    }
    let (instance, mut summary) = match a.from {
        Source::OneInThreeSat => {
            let phi = parsed(&a.input, formats::parse_cnf(&text))?;
            let (g, reg) = formula_to_graph(&phi).map_err(|e| usage(e.to_string()))?;
            if let Some(path) = &a.registry_out {
                write(path, &serde_json::to_string_pretty(&reg)?)?;
            }
            let summary = json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "gadget_depths": reg.variables.iter().map(|v| json!({"variable": v.variable + 1, "depth": v.depth})).collect::<Vec<_>>(),
                "hubs": reg.hubs.len(),
                "triangle_free": g.is_triangle_free(),
                "bipartite": g.is_bipartite(),
                "structure_violations": check_gadget_graph(&g, &reg),
            });
            (formats::serialize_graph(&g), summary)
        }
        Source::Tdm3 => {
            let inst = parsed(&a.input, formats::parse_3dm(&text))?;
            let db = tdm3_to_db27(&inst).map_err(|e| usage(e.to_string()))?;
            (formats::serialize_database(&db), json!({ "rows": db.n_rows(), "columns": db.n_cols(), "k": 3 }))
        }
        Source::Graph => {
            let g = parsed(&a.input, formats::parse_graph(&text))?;
            let db = graph_to_incidence_db(&g);
            (formats::serialize_database(&db), json!({ "rows": db.n_rows(), "columns": db.n_cols(), "k": 3 }))
        }
        Source::Tripartite2Div | Source::Tripartite3Div => {
            let t = parsed(&a.input, formats::parse_tripartite(&text))?;
            let (inst, l) = if a.from == Source::Tripartite2Div {
                (tripartite_to_2div(&t), 2)
            } else {
                (tripartite_to_3div(&t), 3)
            };
            let inst = inst.map_err(|e| usage(e.to_string()))?;
            let summary = json!({ "rows": inst.db().n_rows(), "s_columns": inst.s_columns(), "l": l });
            (formats::serialize_diversity(&inst), summary)
        }
    };
    match &a.out {
        Some(path) => {
            write(path, &instance)?;
            summary["out"] = json!(path.display().to_string());
        }
        None => summary["instance"] = json!(instance),
    }
    summary["from"] = json!(a.from.to_possible_value().map(|v| v.get_name().to_string()));
    Ok(Outcome::json(summary, true))
}

fn signed(assignment: &[bool]) -> Vec<i64> {
    assignment.iter().enumerate().map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) }).collect()
}

fn oracle(a: &OracleArgs) -> anyhow::Result<Outcome> {
    let text = read(&a.input)?;
    match a.problem {
        Problem::OneInThreeSat => {
            let phi = parsed(&a.input, formats::parse_cnf(&text))?;
            let all = enumerate_1in3_sat(&phi).map_err(|e| usage(e.to_string()))?;
            let found = !all.is_empty();
            let assignments: Vec<Vec<i64>> = all.iter().map(|x| signed(x)).collect();
            Ok(Outcome::json(
                json!({ "problem": "1in3sat", "satisfiable": found, "count": all.len(), "assignments": assignments }),
                found,
            ))
        }
        Problem::Tdm => {
            let inst = parsed(&a.input, formats::parse_3dm(&text))?;
            let best = max_3dm_bruteforce(&inst).map_err(|e| usage(e.to_string()))?;
            let triples: Vec<[usize; 3]> = best.iter().map(|&t| inst.triples()[t].map(|e| e + 1)).collect();
            Ok(Outcome::json(json!({ "problem": "3dm", "size": best.len(), "matching": triples }), true))
        }
        Problem::EdgePartition => {
            let g = parsed(&a.input, formats::parse_graph(&text))?;
            let found = edge_partition_search(&g, a.allow_triangles);
            let partition = match &found {
                None => json!("none"),
                Some(p) => json!(formats::serialize_partition(p).lines().collect::<Vec<_>>()),
            };
            if let (Some(path), Some(p)) = (&a.partition_out, &found) {
                write(path, &formats::serialize_partition(p))?;
            }
            Ok(Outcome::json(
                json!({
                    "problem": "edge-partition",
                    "allow_triangles": a.allow_triangles,
                    "partition": partition,
                }),
                found.is_some(),
            ))
        }
    }
}

fn verify(a: &VerifyArgs) -> anyhow::Result<Outcome> {
    let g = parsed(&a.graph, formats::parse_graph(&read(&a.graph)?))?;
    let p = parsed(&a.partition, formats::parse_partition(&read(&a.partition)?))?;
    let valid = verify_edge_partition(&g, &p);
    let kinds: Vec<String> = p
        .iter()
        .map(|b| match block_kind(b) {
            Some(BlockKind::Star(c)) => format!("star at {}", c + 1),
            Some(BlockKind::Triangle) => "triangle".to_string(),
            None => "invalid".to_string(),
        })
        .collect();
    let mut out = json!({ "valid": valid, "blocks": kinds });
    if let Some(path) = &a.registry {
        let reg: GadgetRegistry =
            serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let vars = reg.variables.iter().map(|v| v.variable + 1).max().unwrap_or(0);
        let phi = CnfFormula::new(vars, reg.clauses.iter().map(|c| c.literals).collect())
            .map_err(|e| usage(e.to_string()))?;
        let mut classes = Vec::new();
        for v in &reg.variables {
            let class = classify_gadget_partition(&reg, &p, v.variable).map_err(|e| usage(e.to_string()))?;
            classes.push(json!({ "variable": v.variable + 1, "class": format!("{class:?}") }));
        }
        let assignment = assignment_from_partition(&phi, &reg, &p).map_err(|e| usage(e.to_string()))?;
        out["gadgets"] = json!(classes);
        out["assignment"] = match &assignment {
            Some(x) => json!(signed(x)),
            None => json!("none"),
        };
        out["satisfies"] = json!(assignment.is_some_and(|x| phi.one_in_three(&x)));
    }
    Ok(Outcome::json(out, valid))
}

fn selftest() -> Outcome {
    let reports = acceptance::run_all();
    let passed = reports.iter().filter(|r| r.passed()).count();
    let mut output: Vec<String> = reports.iter().map(ToString::to_string).collect();
    output.push(format!("{passed}/{} criteria passed", reports.len()));
    Outcome { output: output.join("\n"), feasible: passed == reports.len() }
}

//! Generalization hierarchies: a cost-monotone rooted tree whose leaves are
//! the database alphabet. A group is released by writing, in each column
//! where members disagree, the lowest common ancestor of their symbols.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::cost::CostModel;
use crate::database::{Alphabet, Cell, Database};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyNode<C> {
    pub symbol: String,
    pub cost: C,
    pub parent: Option<NodeId>,
}

/// Something wrong with a hierarchy, as reported by
/// [`GeneralizationHierarchy::violations`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoRoot,
    MultipleRoots(Vec<NodeId>),
    ParentOutOfRange { node: NodeId },
    Unreachable { node: NodeId },
    DuplicateSymbol(String),
    LeafNotInAlphabet(String),
    InternalSymbolInAlphabet(String),
    MissingLeaf(String),
    NegativeCost { node: NodeId },
    CostNotMonotone { parent: NodeId, child: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoRoot => write!(f, "no root node"),
            Violation::MultipleRoots(r) => write!(f, "multiple roots: {r:?}"),
            Violation::ParentOutOfRange { node } => write!(f, "node {node} has an unknown parent"),
            Violation::Unreachable { node } => write!(f, "node {node} is not reachable from the root"),
            Violation::DuplicateSymbol(s) => write!(f, "symbol `{s}` used by more than one node"),
            Violation::LeafNotInAlphabet(s) => write!(f, "leaf `{s}` is not an alphabet symbol"),
            Violation::InternalSymbolInAlphabet(s) => {
                write!(f, "internal node `{s}` reuses an alphabet symbol")
            }
            Violation::MissingLeaf(s) => write!(f, "alphabet symbol `{s}` has no leaf"),
            Violation::NegativeCost { node } => write!(f, "node {node} has a negative cost"),
            Violation::CostNotMonotone { parent, child } => {
                write!(f, "child {child} costs more than its parent {parent}")
            }
        }
    }
}

/// Rooted tree over `Γ ⊇ Σ` with leaves in bijection with `Σ` and costs
/// non-decreasing toward the root.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizationHierarchy<C> {
    alphabet: Arc<Alphabet>,
    nodes: Vec<HierarchyNode<C>>,
    // derived, filled only for valid hierarchies
    root: NodeId,
    depth: Vec<usize>,
    leaf_of: Vec<NodeId>,
}

impl<C: Scalar> GeneralizationHierarchy<C> {
    /// Builds and validates. All violations are joined into the error.
    pub fn new(alphabet: Arc<Alphabet>, nodes: Vec<HierarchyNode<C>>) -> Result<Self> {
        let violations = violations(&alphabet, &nodes);
        if !violations.is_empty() {
            let msg = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
            return Err(Error::InvalidHierarchy(msg));
        }
        let root = nodes.iter().position(|n| n.parent.is_none()).expect("validated");
        let mut depth = vec![usize::MAX; nodes.len()];
        fn depth_of<C>(nodes: &[HierarchyNode<C>], depth: &mut [usize], v: NodeId) -> usize {
            if depth[v] == usize::MAX {
                depth[v] = match nodes[v].parent {
                    None => 0,
                    Some(p) => depth_of(nodes, depth, p) + 1,
                };
            }
            depth[v]
        }
        for v in 0..nodes.len() {
            depth_of(&nodes, &mut depth, v);
        }
        let is_parent = parent_flags(&nodes);
        let mut leaf_of = vec![usize::MAX; alphabet.len()];
        for (v, n) in nodes.iter().enumerate() {
            if !is_parent[v] {
                let s = alphabet.cell(&n.symbol).and_then(Cell::symbol_index).expect("validated");
                leaf_of[s] = v;
            }
        }
        Ok(GeneralizationHierarchy { alphabet, nodes, root, depth, leaf_of })
    }

    /// The suppression model as a hierarchy: a root `*` of cost `star_cost`
    /// with every symbol as a zero-cost leaf child.
    pub fn star(alphabet: Arc<Alphabet>, star_cost: C) -> Result<Self> {
        let mut nodes = vec![HierarchyNode { symbol: "*".into(), cost: star_cost, parent: None }];
        if alphabet.len() == 1 {
            nodes[0] = HierarchyNode { symbol: alphabet.symbols()[0].clone(), cost: C::zero(), parent: None };
        } else {
            nodes.extend(alphabet.symbols().iter().map(|s| HierarchyNode {
                symbol: s.clone(),
                cost: C::zero(),
                parent: Some(0),
            }));
        }
        Self::new(alphabet, nodes)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn nodes(&self) -> &[HierarchyNode<C>] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &HierarchyNode<C> {
        &self.nodes[id]
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().enumerate().filter(move |(_, n)| n.parent == Some(id)).map(|(i, _)| i)
    }

    pub fn leaf(&self, cell: Cell) -> Result<NodeId> {
        cell.symbol_index()
            .and_then(|i| self.leaf_of.get(i).copied())
            .ok_or_else(|| Error::UnknownSymbol(self.alphabet.name(cell).to_string()))
    }

    fn lca_pair(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.depth[a] > self.depth[b] {
            a = self.nodes[a].parent.expect("non-root has parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.nodes[b].parent.expect("non-root has parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("non-root has parent");
            b = self.nodes[b].parent.expect("non-root has parent");
        }
        a
    }

    /// Deepest node that is an ancestor-or-self of every token's leaf.
    pub fn lowest_common_ancestor(&self, tokens: &[Cell]) -> Result<NodeId> {
        let (&first, rest) = tokens.split_first().ok_or_else(|| Error::InvalidParameter("empty token set".into()))?;
        let mut acc = self.leaf(first)?;
        for &t in rest {
            acc = self.lca_pair(acc, self.leaf(t)?);
        }
        Ok(acc)
    }

    fn column_lca(&self, db: &Database, group: &[usize], col: usize) -> Result<Option<NodeId>> {
        let first = db.row(group[0])[col];
        if group[1..].iter().all(|&r| db.row(r)[col] == first) {
            return Ok(None);
        }
        let tokens: Vec<Cell> = group.iter().map(|&r| db.row(r)[col]).collect();
        self.lowest_common_ancestor(&tokens).map(Some)
    }

    /// Σ over disagreeing columns of `|group| × cost(LCA of the column)`.
    /// Agreeing columns are left untouched and cost nothing.
    pub fn generalized_group_cost(&self, db: &Database, group: &[usize]) -> Result<C> {
        db.check_group(group)?;
        let mut total = C::zero();
        for col in 0..db.n_cols() {
            if let Some(node) = self.column_lca(db, group, col)? {
                total = total + self.nodes[node].cost.times(group.len());
            }
        }
        Ok(total)
    }

    /// Released record of a group: leaves where members agree, LCAs elsewhere.
    pub fn generalize_group(&self, db: &Database, group: &[usize]) -> Result<Vec<NodeId>> {
        db.check_group(group)?;
        (0..db.n_cols())
            .map(|col| match self.column_lca(db, group, col)? {
                Some(node) => Ok(node),
                None => self.leaf(db.row(group[0])[col]),
            })
            .collect()
    }
}

impl<C: Scalar> CostModel for GeneralizationHierarchy<C> {
    type Cost = C;
    type Released = NodeId;

    fn group_cost(&self, db: &Database, group: &[usize]) -> Result<C> {
        self.generalized_group_cost(db, group)
    }

    fn release_group(&self, db: &Database, group: &[usize]) -> Result<Vec<NodeId>> {
        self.generalize_group(db, group)
    }

    fn check_database(&self, db: &Database) -> Result<()> {
        if db.alphabet().symbols() != self.alphabet.symbols() {
            return Err(Error::InvalidHierarchy("hierarchy leaves do not match the database alphabet".into()));
        }
        if db.contains_star() {
            return Err(Error::InvalidDatabase("input database contains a star".into()));
        }
        Ok(())
    }
}

fn parent_flags<C>(nodes: &[HierarchyNode<C>]) -> Vec<bool> {
    let mut is_parent = vec![false; nodes.len()];
    for n in nodes {
        if let Some(p) = n.parent {
            if p < nodes.len() {
                is_parent[p] = true;
            }
        }
    }
    is_parent
}

/// Every structural and cost problem of a candidate hierarchy; empty when valid.
pub fn violations<C: Scalar>(alphabet: &Alphabet, nodes: &[HierarchyNode<C>]) -> Vec<Violation> {
    let mut out = Vec::new();
    let roots: Vec<NodeId> = (0..nodes.len()).filter(|&v| nodes[v].parent.is_none()).collect();
    match roots.len() {
        0 => out.push(Violation::NoRoot),
        1 => {}
        _ => out.push(Violation::MultipleRoots(roots.clone())),
    }
    for (v, n) in nodes.iter().enumerate() {
        if n.parent.is_some_and(|p| p >= nodes.len()) {
            out.push(Violation::ParentOutOfRange { node: v });
        }
    }
    // reachability from the (first) root; catches cycles too
    if let Some(&root) = roots.first() {
        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); nodes.len()];
        for (v, n) in nodes.iter().enumerate() {
            if let Some(p) = n.parent.filter(|&p| p < nodes.len()) {
                children[p].push(v);
            }
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend(&children[v]);
            }
        }
        out.extend((0..nodes.len()).filter(|&v| !seen[v]).map(|node| Violation::Unreachable { node }));
    }
    let mut by_symbol: HashMap<&str, usize> = HashMap::new();
    for n in nodes {
        *by_symbol.entry(n.symbol.as_str()).or_default() += 1;
    }
    let mut dups: Vec<&str> = by_symbol.iter().filter(|(_, &c)| c > 1).map(|(s, _)| *s).collect();
    dups.sort_unstable();
    out.extend(dups.into_iter().map(|s| Violation::DuplicateSymbol(s.to_string())));

    let is_parent = parent_flags(nodes);
    for (v, n) in nodes.iter().enumerate() {
        let in_alphabet = alphabet.cell(&n.symbol).is_some();
        if !is_parent[v] && !in_alphabet {
            out.push(Violation::LeafNotInAlphabet(n.symbol.clone()));
        }
        if is_parent[v] && in_alphabet {
            out.push(Violation::InternalSymbolInAlphabet(n.symbol.clone()));
        }
        if n.cost.is_negative_value() {
            out.push(Violation::NegativeCost { node: v });
        }
        if let Some(p) = n.parent.filter(|&p| p < nodes.len()) {
            if nodes[p].cost < n.cost {
                out.push(Violation::CostNotMonotone { parent: p, child: v });
            }
        }
    }
    for s in alphabet.symbols() {
        let is_leaf = nodes.iter().enumerate().any(|(v, n)| !is_parent[v] && &n.symbol == s);
        if !is_leaf {
            out.push(Violation::MissingLeaf(s.clone()));
        }
    }
    out
}

//! 1-in-3 SAT formulas and the graph `G_φ` whose edges split into 4-stars
//! exactly when the formula is 1-in-3 satisfiable.
//!
//! Every variable becomes a copy of the gadget `G_d`: two 3-binary trees
//! whose leaf edges are "shared". Every clause becomes three copies of
//! `S_5`, a star with one private edge and one shared edge per literal. A
//! clause shared edge is merged with a tree shared edge by deleting the tree
//! leaf and joining the `S_5` centre straight to the leaf's parent. Unused
//! tree shared edges are closed off three at a time by a fresh hub vertex.
//! Tree leaves therefore never appear in the output graph.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { "" } else { "-" };
        write!(f, "{sign}{}", self.var + 1)
    }
}

/// A formula with exactly three literals per clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    variables: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(variables: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for (i, c) in clauses.iter().enumerate() {
            if let Some(l) = c.iter().find(|l| l.var >= variables) {
                return Err(Error::InvalidFormula(format!(
                    "clause {} uses variable {} but only {variables} are declared",
                    i + 1,
                    l.var + 1
                )));
            }
        }
        Ok(CnfFormula { variables, clauses })
    }

    /// Builds from clauses of any length, rejecting those without exactly three literals.
    pub fn from_clauses(variables: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let clauses = clauses
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                <[Literal; 3]>::try_from(c.as_slice()).map_err(|_| {
                    Error::InvalidFormula(format!("clause {} has {} literals, expected 3", i + 1, c.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(variables, clauses)
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// Exactly one literal of every clause is true.
    pub fn one_in_three(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.variables
            && self.clauses.iter().all(|c| c.iter().filter(|l| l.eval(assignment)).count() == 1)
    }

    /// Per variable: (positive occurrences, negative occurrences), counted per literal slot.
    pub fn occurrences(&self) -> Vec<(usize, usize)> {
        let mut occ = vec![(0, 0); self.variables];
        for l in self.clauses.iter().flatten() {
            if l.positive {
                occ[l.var].0 += 1;
            } else {
                occ[l.var].1 += 1;
            }
        }
        occ
    }
}

/// A complete tree whose root has three children and every other internal
/// node two. Vertices are numbered breadth first, so vertex 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeBinaryTree {
    pub graph: Graph,
    pub depth: Vec<usize>,
    pub parent: Vec<Option<usize>>,
}

impl ThreeBinaryTree {
    /// Vertices at `level`, in breadth-first order.
    pub fn level(&self, level: usize) -> Vec<usize> {
        (0..self.depth.len()).filter(|&v| self.depth[v] == level).collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&c| self.parent[c] == Some(v)).collect()
    }
}

pub fn build_3binary_tree(d: usize) -> Result<ThreeBinaryTree> {
    if d < 1 {
        return Err(Error::InvalidParameter("tree depth must be at least 1".into()));
    }
    let mut depth = vec![0];
    let mut parent = vec![None];
    let mut frontier = vec![0];
    for level in 1..=d {
        let fan = if level == 1 { 3 } else { 2 };
        let mut next = Vec::with_capacity(frontier.len() * fan);
        for &p in &frontier {
            for _ in 0..fan {
                next.push(depth.len());
                depth.push(level);
                parent.push(Some(p));
            }
        }
        frontier = next;
    }
    let edges: Vec<(usize, usize)> = parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v))).collect();
    let graph = Graph::new(depth.len(), edges)?;
    Ok(ThreeBinaryTree { graph, depth, parent })
}

/// The variable gadget: top and bottom trees of depth `d`, each missing one
/// leaf under its first three depth-`d−1` vertices, plus three cross edges
/// joining those leaf-deprived vertices pairwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetGd {
    pub graph: Graph,
    pub depth: usize,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    /// `(parent, leaf)` for every remaining top leaf.
    pub top_shared: Vec<(usize, usize)>,
    pub bottom_shared: Vec<(usize, usize)>,
    /// `(top vertex, bottom vertex)`.
    pub cross: Vec<(usize, usize)>,
}

impl GadgetGd {
    /// Shared edges are those incident to a leaf; all others are private.
    pub fn is_shared(&self, edge: (usize, usize)) -> bool {
        let e = (edge.0.min(edge.1), edge.0.max(edge.1));
        self.top_shared.iter().chain(&self.bottom_shared).any(|&(p, l)| (p.min(l), p.max(l)) == e)
    }

    /// Vertices other than leaves.
    pub fn internal_vertices(&self) -> Vec<usize> {
        let leaves: Vec<usize> = self.top_shared.iter().chain(&self.bottom_shared).map(|&(_, l)| l).collect();
        (0..self.graph.vertex_count()).filter(|v| !leaves.contains(v)).collect()
    }
}

pub fn build_gadget_gd(d: usize) -> Result<GadgetGd> {
    if d < 2 {
        return Err(Error::InvalidParameter("G_d needs depth at least 2".into()));
    }
    let tree = build_3binary_tree(d)?;
    let deprived: Vec<usize> = tree.level(d - 1).into_iter().take(3).collect();
    let deleted: Vec<usize> = deprived.iter().map(|&p| tree.children(p)[0]).collect();
    // compact numbering of the surviving tree vertices
    let mut new_id = vec![usize::MAX; tree.depth.len()];
    let mut size = 0;
    for (v, id) in new_id.iter_mut().enumerate() {
        if !deleted.contains(&v) {
            *id = size;
            size += 1;
        }
    }
    let mut edges = Vec::new();
    let mut top_shared = Vec::new();
    let mut bottom_shared = Vec::new();
    for (offset, shared) in [(0, &mut top_shared), (size, &mut bottom_shared)] {
        for &(p, c) in tree.graph.edges() {
            if deleted.contains(&c) {
                continue;
            }
            let e = (offset + new_id[p], offset + new_id[c]);
            edges.push(e);
            if tree.depth[c] == d {
                shared.push(e);
            }
        }
    }
    let cross: Vec<(usize, usize)> = deprived.iter().map(|&p| (new_id[p], size + new_id[p])).collect();
    edges.extend(&cross);
    Ok(GadgetGd {
        graph: Graph::new(2 * size, edges)?,
        depth: d,
        top: (0..size).collect(),
        bottom: (size..2 * size).collect(),
        top_shared,
        bottom_shared,
        cross,
    })
}

/// Smallest `d >= 2` with `k + 1 <= 2^(d-1)`, so a tree has at least
/// `3(k + 1)` leaves.
pub fn gadget_depth(k: usize) -> usize {
    let mut d = 2;
    while (1usize << (d - 1)) < k + 1 {
        d += 1;
    }
    d
}

/// Vertex bookkeeping for `G_φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetRegistry {
    pub variables: Vec<VariableGadget>,
    pub clauses: Vec<ClauseGadgets>,
    pub hubs: Vec<Hub>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableGadget {
    pub variable: usize,
    pub depth: usize,
    /// Tree vertices of this copy (leaves excluded; they were merged away).
    pub vertices: Vec<usize>,
    /// `[tree vertex, outside vertex]` for every top-tree shared edge.
    pub top_shared: Vec<[usize; 2]>,
    pub bottom_shared: Vec<[usize; 2]>,
    /// `[top vertex, bottom vertex]`.
    pub cross: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseGadgets {
    pub clause: usize,
    pub literals: [Literal; 3],
    pub stars: Vec<S5Gadget>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct S5Gadget {
    pub centre: usize,
    pub private_leaf: usize,
    /// One entry per literal slot: the tree vertex the centre is joined to.
    pub shared: Vec<SharedAttachment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedAttachment {
    pub literal: Literal,
    pub tree_vertex: usize,
}

/// A fresh vertex closing three leftover shared edges of one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hub {
    pub hub: usize,
    pub variable: usize,
    pub top: bool,
    pub tree_vertices: Vec<usize>,
}

impl GadgetRegistry {
    pub fn variable(&self, var: usize) -> Option<&VariableGadget> {
        self.variables.iter().find(|g| g.variable == var)
    }
}

// Unused shared-edge slots of one tree: (tree vertex, free slots), plus the
// cross partner of every leaf-deprived vertex.
struct TreeSlots {
    free: Vec<(usize, usize)>,
}

/// Builds `G_φ` and its registry. Choices are deterministic: shared slots
/// are taken from tree vertices that keep another free slot first, lowest
/// index first, and never twice by one `S_5` or on both ends of a cross edge.
/// Each clause takes the first assignment in that order that fits.
pub fn formula_to_graph(phi: &CnfFormula) -> Result<(Graph, GadgetRegistry)> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut next = 0usize;
    let mut variables = Vec::new();
    // slots[var] = Some([top, bottom])
    let mut slots: Vec<Option<[TreeSlots; 2]>> = Vec::new();
    let mut partner = HashMap::new();

    for (var, &(pos, neg)) in phi.occurrences().iter().enumerate() {
        if pos + neg == 0 {
            slots.push(None);
            continue;
        }
        let d = gadget_depth(pos.max(neg));
        let g = build_gadget_gd(d)?;
        let internal = g.internal_vertices();
        let mut id = vec![usize::MAX; g.graph.vertex_count()];
        for &v in &internal {
            id[v] = next;
            next += 1;
        }
        for &(a, b) in g.graph.edges() {
            if !g.is_shared((a, b)) {
                edges.push((id[a], id[b]));
            }
        }
        let tree_slots = |shared: &[(usize, usize)]| {
            let mut free: Vec<(usize, usize)> = Vec::new();
            for &(p, _) in shared {
                match free.iter_mut().find(|(v, _)| *v == id[p]) {
                    Some((_, n)) => *n += 1,
                    None => free.push((id[p], 1)),
                }
            }
            TreeSlots { free }
        };
        for &(t, b) in &g.cross {
            partner.insert(id[t], id[b]);
            partner.insert(id[b], id[t]);
        }
        slots.push(Some([tree_slots(&g.top_shared), tree_slots(&g.bottom_shared)]));
        variables.push(VariableGadget {
            variable: var,
            depth: d,
            vertices: internal.iter().map(|&v| id[v]).collect(),
            top_shared: Vec::new(),
            bottom_shared: Vec::new(),
            cross: g.cross.iter().map(|&(t, b)| [id[t], id[b]]).collect(),
        });
    }
    let gadget_of = |var: usize, variables: &[VariableGadget]| {
        variables.iter().position(|g| g.variable == var).expect("every used variable has a gadget")
    };

    let mut clauses = Vec::new();
    for (ci, clause) in phi.clauses().iter().enumerate() {
        let mut picks = Vec::with_capacity(9);
        if !assign_clause_slots(clause, &mut slots, &partner, &mut picks) {
            return Err(Error::InvalidFormula(format!("no admissible shared edges left for clause {}", ci + 1)));
        }
        let mut stars = Vec::new();
        for star in picks.chunks(3) {
            let (centre, leaf) = (next, next + 1);
            next += 2;
            edges.push((centre, leaf));
            let mut shared = Vec::new();
            for (&lit, &v) in clause.iter().zip(star) {
                edges.push((centre, v));
                let g = gadget_of(lit.var, &variables);
                if lit.positive {
                    variables[g].top_shared.push([v, centre]);
                } else {
                    variables[g].bottom_shared.push([v, centre]);
                }
                shared.push(SharedAttachment { literal: lit, tree_vertex: v });
            }
            stars.push(S5Gadget { centre, private_leaf: leaf, shared });
        }
        clauses.push(ClauseGadgets { clause: ci, literals: *clause, stars });
    }

    let mut hubs = Vec::new();
    for (var, s) in slots.iter_mut().enumerate() {
        let Some(trees) = s else { continue };
        for (side, tree) in trees.iter_mut().enumerate() {
            loop {
                let mut order: Vec<usize> = (0..tree.free.len()).filter(|&i| tree.free[i].1 > 0).collect();
                if order.is_empty() {
                    break;
                }
                // most free slots first, ties by lowest vertex
                order.sort_by_key(|&i| (std::cmp::Reverse(tree.free[i].1), tree.free[i].0));
                if order.len() < 3 {
                    return Err(Error::InvalidFormula(format!(
                        "leftover shared edges of variable {} cannot be grouped by distinct tree vertices",
                        var + 1
                    )));
                }
                let hub = next;
                next += 1;
                let mut tree_vertices: Vec<usize> = order[..3].iter().map(|&i| tree.free[i].0).collect();
                tree_vertices.sort_unstable();
                for &i in &order[..3] {
                    tree.free[i].1 -= 1;
                }
                let g = gadget_of(var, &variables);
                for &v in &tree_vertices {
                    edges.push((hub, v));
                    if side == 0 {
                        variables[g].top_shared.push([v, hub]);
                    } else {
                        variables[g].bottom_shared.push([v, hub]);
                    }
                }
                hubs.push(Hub { hub, variable: var, top: side == 0, tree_vertices });
            }
        }
    }

    let graph = Graph::new(next, edges)?;
    Ok((graph, GadgetRegistry { variables, clauses, hubs }))
}

// Picks the tree vertex for each of the nine (star, literal) slots of one
// clause. Within a star no vertex repeats and no two picks are cross
// partners, either of which would break simplicity or triangle-freeness.
// Candidates are tried in preference order; backtracking is needed when a
// clause holds both polarities of a variable.
fn assign_clause_slots(
    clause: &[Literal; 3],
    slots: &mut [Option<[TreeSlots; 2]>],
    partner: &HashMap<usize, usize>,
    picks: &mut Vec<usize>,
) -> bool {
    if picks.len() == 9 {
        return true;
    }
    let lit = clause[picks.len() % 3];
    let side = usize::from(!lit.positive);
    let star = &picks[picks.len() - picks.len() % 3..];
    let allowed = |v: usize| !star.contains(&v) && partner.get(&v).is_none_or(|p| !star.contains(p));
    let free = &slots[lit.var].as_ref().expect("gadget exists")[side].free;
    let mut order: Vec<usize> = (0..free.len()).filter(|&i| free[i].1 >= 2 && allowed(free[i].0)).collect();
    order.extend((0..free.len()).filter(|&i| free[i].1 == 1 && allowed(free[i].0)));
    for i in order {
        let tree = &mut slots[lit.var].as_mut().expect("gadget exists")[side];
        tree.free[i].1 -= 1;
        picks.push(tree.free[i].0);
        if assign_clause_slots(clause, slots, partner, picks) {
            return true;
        }
        picks.pop();
        slots[lit.var].as_mut().expect("gadget exists")[side].free[i].1 += 1;
    }
    false
}

/// Every structural fact the construction promises, as human-readable failures.
pub fn check_gadget_graph(graph: &Graph, registry: &GadgetRegistry) -> Vec<String> {
    let mut out = Vec::new();
    let deg = graph.degrees();
    for g in &registry.variables {
        for &v in &g.vertices {
            if deg[v] != 3 {
                out.push(format!("gadget vertex {v} of variable {} has degree {}", g.variable + 1, deg[v]));
            }
        }
    }
    for c in &registry.clauses {
        for s in &c.stars {
            if deg[s.centre] != 4 {
                out.push(format!("S5 centre {} has degree {}", s.centre, deg[s.centre]));
            }
            if deg[s.private_leaf] != 1 {
                out.push(format!("private leaf {} has degree {}", s.private_leaf, deg[s.private_leaf]));
            }
        }
    }
    for h in &registry.hubs {
        if deg[h.hub] != 3 {
            out.push(format!("hub {} has degree {}", h.hub, deg[h.hub]));
        }
    }
    if !graph.is_triangle_free() {
        out.push("graph has a triangle".into());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn mixed_formula() -> CnfFormula {
        CnfFormula::new(
            3,
            vec![
                [Literal::neg(0), Literal::pos(1), Literal::pos(2)],
                [Literal::pos(0), Literal::neg(1), Literal::pos(2)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn formula_validation() {
        assert!(CnfFormula::new(2, vec![[Literal::pos(0), Literal::pos(1), Literal::pos(2)]]).is_err());
        assert!(CnfFormula::from_clauses(3, vec![vec![Literal::pos(0)]]).is_err());
        let phi = mixed_formula();
        assert!(phi.one_in_three(&[true, true, false]));
        assert!(!phi.one_in_three(&[true, false, false]));
        assert_eq!(phi.occurrences(), vec![(1, 1), (1, 1), (2, 0)]);
    }

    #[test]
    fn tree_sizes() {
        let counts = |d| {
            let t = build_3binary_tree(d).unwrap();
            (t.graph.vertex_count(), t.graph.edge_count(), t.level(d).len())
        };
        assert_eq!(counts(1), (4, 3, 3));
        assert_eq!(counts(2), (10, 9, 6));
        assert_eq!(counts(3), (22, 21, 12));
        assert!(build_3binary_tree(0).is_err());
    }

    #[test]
    fn gadget_sizes_and_degrees() {
        assert!(build_gadget_gd(1).is_err());
        for (d, vertices, edges) in [(2, 14, 15), (3, 38, 39)] {
            let g = build_gadget_gd(d).unwrap();
            assert_eq!(g.graph.vertex_count(), vertices);
            assert_eq!(g.graph.edge_count(), edges);
            let shared = 3 * (1 << (d - 1)) - 3;
            assert_eq!(g.top_shared.len(), shared);
            assert_eq!(g.bottom_shared.len(), shared);
            let deg = g.graph.degrees();
            for v in g.internal_vertices() {
                assert_eq!(deg[v], 3, "vertex {v} at d={d}");
            }
            assert!(g.graph.is_bipartite());
        }
    }

    #[test]
    fn depth_rule() {
        assert_eq!(gadget_depth(0), 2);
        assert_eq!(gadget_depth(1), 2);
        assert_eq!(gadget_depth(2), 3);
        assert_eq!(gadget_depth(3), 3);
        assert_eq!(gadget_depth(4), 4);
        for k in 0..40 {
            let d = gadget_depth(k);
            assert!(3 * (k + 1) <= 3 << (d - 1));
            assert!(d == 2 || 3 << (d - 2) < 3 * (k + 1));
        }
    }

    #[test]
    fn mixed_formula_graph_structure() {
        let (g, reg) = formula_to_graph(&mixed_formula()).unwrap();
        assert!(check_gadget_graph(&g, &reg).is_empty(), "{:?}", check_gadget_graph(&g, &reg));
        assert_eq!(reg.variables.len(), 3);
        assert_eq!(reg.clauses.len(), 2);
        // every shared slot of every tree is used exactly once
        for v in &reg.variables {
            let per_tree = 3 * (1 << (v.depth - 1)) - 3;
            assert_eq!(v.top_shared.len(), per_tree);
            assert_eq!(v.bottom_shared.len(), per_tree);
        }
        assert_eq!(g.edge_count() % 3, 0);
        // mixed polarities force an odd cycle through the cross edges
        assert!(!g.is_bipartite());
    }

    #[test]
    fn unused_variables_get_no_gadget() {
        let phi = CnfFormula::new(4, vec![[Literal::pos(0), Literal::pos(1), Literal::pos(3)]]).unwrap();
        let (_, reg) = formula_to_graph(&phi).unwrap();
        assert!(reg.variable(2).is_none());
        assert!(reg.variable(3).is_some());
    }

    #[test]
    fn both_polarities_in_one_clause() {
        // at depth 2 every shared parent has a cross partner, so the three
        // stars need a derangement of top and bottom slots
        let phi = CnfFormula::new(2, vec![[Literal::neg(0), Literal::pos(0), Literal::pos(1)]]).unwrap();
        let (g, reg) = formula_to_graph(&phi).unwrap();
        assert!(check_gadget_graph(&g, &reg).is_empty());
    }
}

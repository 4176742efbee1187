//! Brute-force oracles and structural verifiers, kept independent of the
//! solvers they check.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::reductions::{CnfFormula, GadgetRegistry, ThreeDmInstance};

/// Largest variable count [`enumerate_1in3_sat`] accepts.
pub const MAX_SAT_VARIABLES: usize = 24;
/// Largest triple count [`max_3dm_bruteforce`] accepts.
pub const MAX_3DM_TRIPLES: usize = 40;

/// Every assignment making exactly one literal per clause true, in
/// increasing binary order with variable 1 as the most significant bit.
pub fn enumerate_1in3_sat(phi: &CnfFormula) -> Result<Vec<Vec<bool>>> {
    let v = phi.variables();
    if v > MAX_SAT_VARIABLES {
        return Err(Error::TooLarge(format!("more than {MAX_SAT_VARIABLES} variables")));
    }
    Ok((0..1u64 << v)
        .map(|bits| (0..v).map(|i| bits >> (v - 1 - i) & 1 == 1).collect::<Vec<bool>>())
        .filter(|a| phi.one_in_three(a))
        .collect())
}

/// A maximum matching (triple indices, ascending); the lexicographically
/// first among the maximum ones.
pub fn max_3dm_bruteforce(inst: &ThreeDmInstance) -> Result<Vec<usize>> {
    if inst.triples().len() > MAX_3DM_TRIPLES {
        return Err(Error::TooLarge(format!("more than {MAX_3DM_TRIPLES} triples")));
    }
    fn rec(inst: &ThreeDmInstance, t: usize, used: &mut [bool], cur: &mut Vec<usize>, best: &mut Vec<usize>) {
        if cur.len() + (inst.triples().len() - t) <= best.len() {
            return;
        }
        if t == inst.triples().len() {
            *best = cur.clone();
            return;
        }
        let rows = inst.triple_rows(t);
        if rows.iter().all(|&r| !used[r]) {
            rows.iter().for_each(|&r| used[r] = true);
            cur.push(t);
            rec(inst, t + 1, used, cur, best);
            cur.pop();
            rows.iter().for_each(|&r| used[r] = false);
        }
        rec(inst, t + 1, used, cur, best);
    }
    let mut best = Vec::new();
    rec(inst, 0, &mut vec![false; inst.element_count()], &mut Vec::new(), &mut best);
    Ok(best)
}

/// Every matching of the instance, the empty one included.
pub fn all_3dm_matchings(inst: &ThreeDmInstance) -> Result<Vec<Vec<usize>>> {
    if inst.triples().len() > MAX_3DM_TRIPLES {
        return Err(Error::TooLarge(format!("more than {MAX_3DM_TRIPLES} triples")));
    }
    fn rec(inst: &ThreeDmInstance, t: usize, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if t == inst.triples().len() {
            out.push(cur.clone());
            return;
        }
        rec(inst, t + 1, used, cur, out);
        let rows = inst.triple_rows(t);
        if rows.iter().all(|&r| !used[r]) {
            rows.iter().for_each(|&r| used[r] = true);
            cur.push(t);
            rec(inst, t + 1, used, cur, out);
            cur.pop();
            rows.iter().for_each(|&r| used[r] = false);
        }
    }
    let mut out = Vec::new();
    rec(inst, 0, &mut vec![false; inst.element_count()], &mut Vec::new(), &mut out);
    Ok(out)
}

/// Three edges given by their endpoints.
pub type EdgeBlock = [(usize, usize); 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    /// Three edges sharing this centre.
    Star(usize),
    Triangle,
}

/// Shape of a block, or `None` when it is neither a 4-star nor a triangle.
pub fn block_kind(block: &EdgeBlock) -> Option<BlockKind> {
    let e: Vec<(usize, usize)> = block.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    if e[0] == e[1] || e[0] == e[2] || e[1] == e[2] || e.iter().any(|&(a, b)| a == b) {
        return None;
    }
    let (a, b) = e[0];
    for c in [a, b] {
        if e.iter().all(|&(x, y)| x == c || y == c) {
            return Some(BlockKind::Star(c));
        }
    }
    let mut vertices: Vec<usize> = e.iter().flat_map(|&(x, y)| [x, y]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    (vertices.len() == 3).then_some(BlockKind::Triangle)
}

/// Blocks are 4-stars or triangles of edges of `g`, disjoint, covering every edge.
pub fn verify_edge_partition(g: &Graph, partition: &[EdgeBlock]) -> bool {
    let index = g.edge_index();
    let mut covered = vec![false; g.edge_count()];
    for block in partition {
        if block_kind(block).is_none() {
            return false;
        }
        for &(a, b) in block {
            match index.get(&(a.min(b), a.max(b))) {
                Some(&i) if !covered[i] => covered[i] = true,
                _ => return false,
            }
        }
    }
    covered.iter().all(|&c| c)
}

/// Which block shapes a search may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKinds {
    Stars,
    StarsAndTriangles,
    Triangles,
}

/// Partition of the edges into 4-stars, and triangles when allowed.
pub fn edge_partition_search(g: &Graph, allow_triangles: bool) -> Option<Vec<EdgeBlock>> {
    let kinds = if allow_triangles { BlockKinds::StarsAndTriangles } else { BlockKinds::Stars };
    search_edge_partition(g, kinds)
}

/// Partition of the edges into triangles only.
pub fn triangle_partition_search(g: &Graph) -> Option<Vec<EdgeBlock>> {
    search_edge_partition(g, BlockKinds::Triangles)
}

/// Backtracking over uncovered edges. Each step branches on the uncovered
/// edge with the fewest blocks that could still cover it (lowest index on
/// ties), so an edge with a single option, such as the edge of a degree-1
/// vertex, is forced at once and an edge with none ends the branch. Blocks
/// are tried as stars centred at the lower endpoint, then at the higher one,
/// then triangles.
pub fn search_edge_partition(g: &Graph, kinds: BlockKinds) -> Option<Vec<EdgeBlock>> {
    if !g.edge_count().is_multiple_of(3) {
        return None;
    }
    let mut s = Search {
        edges: g.edges(),
        adj: g.adjacency(),
        index: g.edge_index(),
        covered: vec![false; g.edge_count()],
        remaining: g.degrees(),
        uncovered: g.edge_count(),
        blocks: Vec::new(),
        stars: kinds != BlockKinds::Triangles,
        triangles: kinds != BlockKinds::Stars,
    };
    s.solve().then(|| s.blocks.iter().map(|b| b.map(|e| g.edges()[e])).collect())
}

struct Search<'a> {
    edges: &'a [(usize, usize)],
    adj: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
    covered: Vec<bool>,
    remaining: Vec<usize>,
    uncovered: usize,
    blocks: Vec<[usize; 3]>,
    stars: bool,
    triangles: bool,
}

fn pairs_among(n: usize) -> usize {
    n.saturating_sub(1) * n.saturating_sub(2) / 2
}

impl Search<'_> {
    fn free_edges(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[v].iter().copied().filter(|&(_, e)| !self.covered[e])
    }

    fn triangle_thirds(&self, e: usize) -> Vec<(usize, usize, usize)> {
        let (a, b) = self.edges[e];
        self.free_edges(a)
            .filter(|&(w, _)| w != b)
            .filter_map(|(w, ea)| {
                let eb = *self.index.get(&(b.min(w), b.max(w)))?;
                (!self.covered[eb]).then_some((w, ea, eb))
            })
            .collect()
    }

    fn option_count(&self, e: usize) -> usize {
        let (a, b) = self.edges[e];
        let mut n = 0;
        if self.stars {
            n += pairs_among(self.remaining[a]) + pairs_among(self.remaining[b]);
        }
        if self.triangles {
            n += self.triangle_thirds(e).len();
        }
        n
    }

    fn options(&self, e: usize) -> Vec<[usize; 3]> {
        let (a, b) = self.edges[e];
        let mut out = Vec::new();
        if self.stars {
            for c in [a, b] {
                let others: Vec<usize> = self.free_edges(c).map(|(_, f)| f).filter(|&f| f != e).collect();
                for i in 0..others.len() {
                    for j in i + 1..others.len() {
                        out.push([e, others[i], others[j]]);
                    }
                }
            }
        }
        if self.triangles {
            out.extend(self.triangle_thirds(e).into_iter().map(|(_, ea, eb)| [e, ea, eb]));
        }
        out
    }

    fn set(&mut self, block: [usize; 3], covered: bool) {
        for e in block {
            self.covered[e] = covered;
            let (a, b) = self.edges[e];
            if covered {
                self.remaining[a] -= 1;
                self.remaining[b] -= 1;
            } else {
                self.remaining[a] += 1;
                self.remaining[b] += 1;
            }
        }
        if covered {
            self.uncovered -= 3;
            self.blocks.push(block);
        } else {
            self.uncovered += 3;
            self.blocks.pop();
        }
    }

    fn solve(&mut self) -> bool {
        if self.uncovered == 0 {
            return true;
        }
        let mut best: Option<(usize, usize)> = None;
        for e in (0..self.edges.len()).filter(|&e| !self.covered[e]) {
            let n = self.option_count(e);
            if best.is_none_or(|(bn, _)| n < bn) {
                best = Some((n, e));
                if n <= 1 {
                    break;
                }
            }
        }
        let (n, e) = best.expect("an uncovered edge exists");
        if n == 0 {
            return false;
        }
        for block in self.options(e) {
            self.set(block, true);
            if self.solve() {
                return true;
            }
            self.set(block, false);
        }
        false
    }
}

/// Orientation of one variable gadget under a 4-star partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GadgetClass {
    /// Top shared edges in stars centred inside the gadget, bottom ones outside.
    TruePartitioned,
    /// The mirror case.
    FalsePartitioned,
    Invalid,
}

/// Classifies the gadget of `variable`. Errors when the variable has no gadget.
pub fn classify_gadget_partition(
    registry: &GadgetRegistry,
    partition: &[EdgeBlock],
    variable: usize,
) -> Result<GadgetClass> {
    let gadget = registry
        .variable(variable)
        .ok_or_else(|| Error::InvalidParameter(format!("variable {} has no gadget", variable + 1)))?;
    let mut centre_of: HashMap<(usize, usize), Option<usize>> = HashMap::new();
    for block in partition {
        let centre = match block_kind(block) {
            Some(BlockKind::Star(c)) => Some(c),
            _ => None,
        };
        for &(a, b) in block {
            centre_of.insert((a.min(b), a.max(b)), centre);
        }
    }
    // Some(true): centred at the tree vertex; Some(false): centred outside
    let inside = |edges: &[[usize; 2]]| -> Vec<Option<bool>> {
        edges
            .iter()
            .map(|&[v, w]| match centre_of.get(&(v.min(w), v.max(w))) {
                Some(Some(c)) if *c == v => Some(true),
                Some(Some(c)) if *c == w => Some(false),
                _ => None,
            })
            .collect()
    };
    let top = inside(&gadget.top_shared);
    let bottom = inside(&gadget.bottom_shared);
    let all = |v: &[Option<bool>], want: bool| v.iter().all(|&x| x == Some(want));
    Ok(if all(&top, true) && all(&bottom, false) {
        GadgetClass::TruePartitioned
    } else if all(&top, false) && all(&bottom, true) {
        GadgetClass::FalsePartitioned
    } else {
        GadgetClass::Invalid
    })
}

/// Assignment read off a partition: a variable is true iff its gadget is
/// true partitioned; variables without a gadget are false. `None` when
/// some gadget is invalid.
pub fn assignment_from_partition(
    phi: &CnfFormula,
    registry: &GadgetRegistry,
    partition: &[EdgeBlock],
) -> Result<Option<Vec<bool>>> {
    let mut out = vec![false; phi.variables()];
    for g in &registry.variables {
        match classify_gadget_partition(registry, partition, g.variable)? {
            GadgetClass::TruePartitioned => out[g.variable] = true,
            GadgetClass::FalsePartitioned => {}
            GadgetClass::Invalid => return Ok(None),
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::{formula_to_graph, Literal};

    // (¬x1 ∨ x2 ∨ x3)(x1 ∨ ¬x2 ∨ x3): satisfiable
    fn mixed() -> CnfFormula {
        CnfFormula::new(
            3,
            vec![
                [Literal::neg(0), Literal::pos(1), Literal::pos(2)],
                [Literal::pos(0), Literal::neg(1), Literal::pos(2)],
            ],
        )
        .unwrap()
    }

    // (x1 ∨ x2 ∨ x3)(¬x1 ∨ ¬x2 ∨ ¬x3): exactly one true and exactly one false is impossible
    fn opposed() -> CnfFormula {
        CnfFormula::new(
            3,
            vec![
                [Literal::pos(0), Literal::pos(1), Literal::pos(2)],
                [Literal::neg(0), Literal::neg(1), Literal::neg(2)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn one_in_three_enumeration() {
        let single = CnfFormula::new(3, vec![[Literal::pos(0), Literal::pos(1), Literal::pos(2)]]).unwrap();
        assert_eq!(enumerate_1in3_sat(&single).unwrap().len(), 3);
        assert_eq!(enumerate_1in3_sat(&mixed()).unwrap(), vec![vec![false, false, false], vec![true, true, false]]);
        assert!(enumerate_1in3_sat(&opposed()).unwrap().is_empty());
    }

    #[test]
    fn matching_oracle() {
        let empty = ThreeDmInstance::new(1, 1, 1, vec![]).unwrap();
        assert!(max_3dm_bruteforce(&empty).unwrap().is_empty());
        let disjoint = ThreeDmInstance::new(2, 2, 2, vec![[0, 0, 0], [1, 1, 1]]).unwrap();
        assert_eq!(max_3dm_bruteforce(&disjoint).unwrap(), vec![0, 1]);
        let clash = ThreeDmInstance::new(1, 2, 2, vec![[0, 0, 0], [0, 1, 1]]).unwrap();
        assert_eq!(max_3dm_bruteforce(&clash).unwrap(), vec![0]);
        assert_eq!(all_3dm_matchings(&clash).unwrap().len(), 3);
    }

    #[test]
    fn block_shapes() {
        assert_eq!(block_kind(&[(0, 1), (0, 2), (3, 0)]), Some(BlockKind::Star(0)));
        assert_eq!(block_kind(&[(0, 1), (1, 2), (0, 2)]), Some(BlockKind::Triangle));
        assert_eq!(block_kind(&[(0, 1), (1, 2), (2, 3)]), None);
        assert_eq!(block_kind(&[(0, 1), (1, 0), (0, 2)]), None);
    }

    #[test]
    fn small_partitions() {
        let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let p = edge_partition_search(&star, false).unwrap();
        assert_eq!(p.len(), 1);
        assert!(verify_edge_partition(&star, &p));
        let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(edge_partition_search(&k3, false).is_none());
        assert!(verify_edge_partition(&k3, &edge_partition_search(&k3, true).unwrap()));
        assert!(triangle_partition_search(&star).is_none());
        let path = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(!verify_edge_partition(&path, &[[(0, 1), (1, 2), (2, 3)]]));
        assert!(!verify_edge_partition(&star, &[]));
        assert!(edge_partition_search(&path, true).is_none());
    }

    #[test]
    fn small_formulas_end_to_end() {
        let (g1, reg1) = formula_to_graph(&mixed()).unwrap();
        let p = edge_partition_search(&g1, false).expect("satisfiable formula");
        assert!(verify_edge_partition(&g1, &p));
        let a = assignment_from_partition(&mixed(), &reg1, &p).unwrap().unwrap();
        assert!(mixed().one_in_three(&a));
        let (g2, _) = formula_to_graph(&opposed()).unwrap();
        assert!(edge_partition_search(&g2, false).is_none());
    }

    #[test]
    fn mixed_gadget_is_invalid() {
        let (g, reg) = formula_to_graph(&mixed()).unwrap();
        let p = edge_partition_search(&g, false).unwrap();
        assert!(classify_gadget_partition(&reg, &p, 7).is_err());
        // drop the blocks covering one top shared edge: no longer a clean case
        let gadget = reg.variable(0).unwrap();
        let [v, w] = gadget.top_shared[0];
        let e = (v.min(w), v.max(w));
        let broken: Vec<EdgeBlock> = p.iter().copied().filter(|b| !b.contains(&e)).collect();
        assert_eq!(classify_gadget_partition(&reg, &broken, 0).unwrap(), GadgetClass::Invalid);
    }
}

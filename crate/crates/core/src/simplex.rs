//! Weighted hypergraphs with 2- and 3-edges, the simplex conditions, and an
//! exact minimum-cost perfect cover ("simplex matching").
//!
//! The solver is a subset dynamic program: the state is the set of still
//! uncovered vertices and the transition covers the lowest uncovered vertex
//! by one of its edges. It is exact and runs in `O(2^n · n^2)`, which is
//! plenty for the desk-scale instances produced from small databases.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::cost::CostModel;
use crate::database::Database;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest vertex count the exact solver accepts.
pub const MAX_MATCHING_VERTICES: usize = 22;

/// A 2- or 3-edge; vertices are kept sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Hyperedge {
    Pair([usize; 2]),
    Triple([usize; 3]),
}

impl Hyperedge {
    pub fn pair(a: usize, b: usize) -> Self {
        Hyperedge::Pair(if a < b { [a, b] } else { [b, a] })
    }

    pub fn triple(a: usize, b: usize, c: usize) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        Hyperedge::Triple(v)
    }

    pub fn vertices(&self) -> &[usize] {
        match self {
            Hyperedge::Pair(v) => v,
            Hyperedge::Triple(v) => v,
        }
    }

    fn mask(&self) -> u64 {
        self.vertices().iter().fold(0, |m, &v| m | 1 << v)
    }
}

impl Ord for Hyperedge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices().cmp(other.vertices())
    }
}

impl PartialOrd for Hyperedge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Hyperedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vertices().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostHypergraph<C> {
    vertex_count: usize,
    pairs: BTreeMap<[usize; 2], C>,
    triples: BTreeMap<[usize; 3], C>,
}

impl<C: Scalar> CostHypergraph<C> {
    pub fn new(vertex_count: usize) -> Self {
        CostHypergraph { vertex_count, pairs: BTreeMap::new(), triples: BTreeMap::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    fn check_vertices(&self, vs: &[usize]) -> Result<()> {
        if let Some(&v) = vs.iter().find(|&&v| v >= self.vertex_count) {
            return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
        }
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("hyperedge repeats a vertex".into()));
        }
        Ok(())
    }

    /// Inserts or overwrites an edge.
    pub fn set_cost(&mut self, edge: Hyperedge, cost: C) -> Result<()> {
        self.check_vertices(edge.vertices())?;
        match edge {
            Hyperedge::Pair(v) => self.pairs.insert(v, cost),
            Hyperedge::Triple(v) => self.triples.insert(v, cost),
        };
        Ok(())
    }

    pub fn cost(&self, edge: &Hyperedge) -> Option<C> {
        match edge {
            Hyperedge::Pair(v) => self.pairs.get(v).copied(),
            Hyperedge::Triple(v) => self.triples.get(v).copied(),
        }
    }

    pub fn pair_edges(&self) -> impl Iterator<Item = ([usize; 2], C)> + '_ {
        self.pairs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn triple_edges(&self) -> impl Iterator<Item = ([usize; 3], C)> + '_ {
        self.triples.iter().map(|(&k, &c)| (k, c))
    }

    /// All edges in lexicographic vertex order.
    pub fn edges(&self) -> Vec<(Hyperedge, C)> {
        let mut all: Vec<(Hyperedge, C)> = self
            .pair_edges()
            .map(|(v, c)| (Hyperedge::Pair(v), c))
            .chain(self.triple_edges().map(|(v, c)| (Hyperedge::Triple(v), c)))
            .collect();
        all.sort_by_key(|a| a.0);
        all
    }
}

/// A failed simplex condition.
#[derive(Debug, Clone, PartialEq)]
pub enum SimplexViolation<C> {
    /// A triple edge whose sub-pair is not an edge.
    MissingPair { triple: [usize; 3], pair: [usize; 2] },
    /// `c(u,v) + c(v,w) + c(u,w) > 2·c(u,v,w)`.
    Inequality { triple: [usize; 3], pair_sum: C, triple_cost: C },
}

/// Checks closure and the inequality for every triple edge.
pub fn check_simplex_conditions<C: Scalar>(hg: &CostHypergraph<C>) -> Vec<SimplexViolation<C>> {
    let mut out = Vec::new();
    for (t, tc) in hg.triple_edges() {
        let subs = [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]];
        let mut sum = C::zero();
        let mut closed = true;
        for pair in subs {
            match hg.pairs.get(&pair) {
                Some(&c) => sum = sum + c,
                None => {
                    closed = false;
                    out.push(SimplexViolation::MissingPair { triple: t, pair });
                }
            }
        }
        if closed && sum > tc + tc {
            out.push(SimplexViolation::Inequality { triple: t, pair_sum: sum, triple_cost: tc });
        }
    }
    out
}

/// One vertex per row; every pair and triple of rows becomes an edge priced
/// by the cost model.
pub fn build_anonymity_hypergraph<M: CostModel>(model: &M, db: &Database) -> Result<CostHypergraph<M::Cost>> {
    let n = db.n_rows();
    if n < 2 {
        return Err(Error::Infeasible("no 2-anonymous solution exists".into()));
    }
    model.check_database(db)?;
    let mut hg = CostHypergraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            hg.pairs.insert([i, j], model.group_cost(db, &[i, j])?);
            for k in j + 1..n {
                hg.triples.insert([i, j, k], model.group_cost(db, &[i, j, k])?);
            }
        }
    }
    Ok(hg)
}

/// Chosen edges covering every vertex exactly once.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimplexMatching<C> {
    pub edges: Vec<Hyperedge>,
    pub cost: C,
}

impl<C: Scalar> SimplexMatching<C> {
    /// Sum of the chosen edges' costs in `hg`; `None` if an edge is missing.
    pub fn recompute_cost(&self, hg: &CostHypergraph<C>) -> Option<C> {
        self.edges.iter().map(|e| hg.cost(e)).sum()
    }

    /// Every vertex of `hg` in exactly one chosen edge.
    pub fn is_perfect(&self, vertex_count: usize) -> bool {
        let mut seen = vec![false; vertex_count];
        for e in &self.edges {
            for &v in e.vertices() {
                if v >= vertex_count || std::mem::replace(&mut seen[v], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Minimum-cost perfect cover by 2- and 3-edges. Among optimal covers the
/// lexicographically smallest sorted edge list is returned.
pub fn solve_simplex_matching<C: Scalar>(hg: &CostHypergraph<C>) -> Result<SimplexMatching<C>> {
    let n = hg.vertex_count;
    if n > MAX_MATCHING_VERTICES {
        return Err(Error::TooLarge(format!("{n} vertices exceeds the exact solver limit of {MAX_MATCHING_VERTICES}")));
    }
    // edges grouped by their lowest vertex, in lexicographic order
    let mut by_lowest: Vec<Vec<(u64, Hyperedge, C)>> = vec![Vec::new(); n];
    for (e, c) in hg.edges() {
        by_lowest[e.vertices()[0]].push((e.mask(), e, c));
    }
    let full: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let mut memo: Vec<Option<Option<C>>> = vec![None; 1 << n];
    let best = cover_cost(full, &by_lowest, &mut memo);
    let cost = best.ok_or_else(|| Error::Infeasible("no perfect cover by the given edges".into()))?;

    let mut edges = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        let remaining = cover_cost(mask, &by_lowest, &mut memo).expect("reachable state is feasible");
        let (m, e, _) = by_lowest[v]
            .iter()
            .find(|(m, _, c)| {
                m & mask == *m
                    && cover_cost(mask & !m, &by_lowest, &mut memo).is_some_and(|rest| *c + rest == remaining)
            })
            .copied()
            .expect("an optimal transition exists");
        edges.push(e);
        mask &= !m;
    }
    Ok(SimplexMatching { edges, cost })
}

fn cover_cost<C: Scalar>(
    mask: u64,
    by_lowest: &[Vec<(u64, Hyperedge, C)>],
    memo: &mut [Option<Option<C>>],
) -> Option<C> {
    if mask == 0 {
        return Some(C::zero());
    }
    if let Some(known) = memo[mask as usize] {
        return known;
    }
    let v = mask.trailing_zeros() as usize;
    let mut best: Option<C> = None;
    for &(m, _, c) in &by_lowest[v] {
        if m & mask != m {
            continue;
        }
        if let Some(rest) = cover_cost(mask & !m, by_lowest, memo) {
            let total = c + rest;
            if best.is_none_or(|b| total < b) {
                best = Some(total);
            }
        }
    }
    memo[mask as usize] = Some(best);
    best
}

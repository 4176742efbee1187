//! Seeded random instances for property checks and the acceptance suite.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::database::{Alphabet, Database};
use crate::error::Result;
use crate::graph::{Graph, TripartiteGraph};
use crate::hierarchy::{GeneralizationHierarchy, HierarchyNode};
use crate::reductions::{CnfFormula, Literal, ThreeDmInstance};
use crate::scalar::Scalar;

/// `n × m` database over the numeric alphabet of size `c`.
pub fn random_database<R: Rng>(rng: &mut R, n: usize, m: usize, c: usize) -> Database {
    let rows: Vec<Vec<usize>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..c)).collect()).collect();
    Database::from_indices(c, &rows).expect("indices below the alphabet size")
}

/// Random hierarchy over `alphabet`: symbols are merged bottom-up into
/// internal nodes of 2 or 3 children until one root is left. Leaves cost 0,
/// each internal node at least as much as its most expensive child.
pub fn random_hierarchy<C: Scalar, R: Rng>(rng: &mut R, alphabet: Arc<Alphabet>) -> Result<GeneralizationHierarchy<C>> {
    let mut nodes: Vec<HierarchyNode<C>> = Vec::new();
    let mut costs: Vec<u32> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for s in alphabet.symbols() {
        open.push(nodes.len());
        nodes.push(HierarchyNode { symbol: s.clone(), cost: C::zero(), parent: None });
        costs.push(0);
    }
    let mut next_name = 1;
    while open.len() > 1 {
        open.shuffle(rng);
        let take = rng.gen_range(2..=3).min(open.len());
        let children: Vec<usize> = open.drain(..take).collect();
        let cost = children.iter().map(|&c| costs[c]).max().unwrap_or(0) + rng.gen_range(0..=3);
        let id = nodes.len();
        nodes.push(HierarchyNode {
            symbol: format!("g{next_name}"),
            cost: C::from_u32(cost).expect("small cost"),
            parent: None,
        });
        costs.push(cost);
        next_name += 1;
        for c in children {
            nodes[c].parent = Some(id);
        }
        open.push(id);
    }
    GeneralizationHierarchy::new(alphabet, nodes)
}

/// `|W| = |X| = |Y| = q` with up to `max_triples` random triples, each
/// element in at most three of them.
pub fn random_3dm<R: Rng>(rng: &mut R, q: usize, max_triples: usize) -> ThreeDmInstance {
    let mut triples: Vec<[usize; 3]> = Vec::new();
    let mut occ = [vec![0; q], vec![0; q], vec![0; q]];
    let target = rng.gen_range(0..=max_triples);
    for _ in 0..target * 4 {
        if triples.len() == target {
            break;
        }
        let t = [rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q)];
        if triples.contains(&t) || (0..3).any(|s| occ[s][t[s]] == 3) {
            continue;
        }
        (0..3).for_each(|s| occ[s][t[s]] += 1);
        triples.push(t);
    }
    ThreeDmInstance::new(q, q, q, triples).expect("bound respected by construction")
}

/// Tripartite graph with `m` edges on `vertices` vertices. When `planted`,
/// the edges are a union of `m / 3` edge-disjoint triangles.
pub fn random_tripartite<R: Rng>(rng: &mut R, vertices: usize, m: usize, planted: bool) -> Option<TripartiteGraph> {
    let mut parts: Vec<usize> = (0..vertices).map(|v| v % 3).collect();
    parts.shuffle(rng);
    let cross: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|a| (a + 1..vertices).map(move |b| (a, b)))
        .filter(|&(a, b)| parts[a] != parts[b])
        .collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    if planted {
        let by_part: Vec<Vec<usize>> = (0..3).map(|p| (0..vertices).filter(|&v| parts[v] == p).collect()).collect();
        for _ in 0..m * 10 {
            if edges.len() == m {
                break;
            }
            let t: Vec<usize> = by_part.iter().map(|vs| *vs.choose(rng).expect("every part non-empty")).collect();
            let tri =
                [(t[0].min(t[1]), t[0].max(t[1])), (t[0].min(t[2]), t[0].max(t[2])), (t[1].min(t[2]), t[1].max(t[2]))];
            if tri.iter().all(|e| !edges.contains(e)) {
                edges.extend(tri);
            }
        }
    } else {
        edges = cross.choose_multiple(rng, m).copied().collect();
    }
    if edges.len() != m {
        return None;
    }
    let graph = Graph::new(vertices, edges).ok()?;
    TripartiteGraph::new(graph, parts).ok()
}

/// Database dominated by a few row patterns: `n` rows over `ℓ` columns and
/// alphabet size `c`, one pattern taking roughly `heavy` of the rows.
pub fn heavy_duplicate_database<R: Rng>(rng: &mut R, n: usize, l: usize, c: usize, heavy: f64) -> Database {
    let patterns: Vec<Vec<usize>> =
        (0..rng.gen_range(1..=4)).map(|_| (0..l).map(|_| rng.gen_range(0..c)).collect()).collect();
    let rows: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            if rng.gen_bool(heavy) {
                patterns[0].clone()
            } else if rng.gen_bool(0.8) {
                patterns.choose(rng).expect("non-empty").clone()
            } else {
                (0..l).map(|_| rng.gen_range(0..c)).collect()
            }
        })
        .collect();
    Database::from_indices(c, &rows).expect("indices below the alphabet size")
}

/// Every formula with `clauses` clauses over at most `max_vars` variables,
/// one per renaming class: variables appear in first-use order across the
/// literal slots, and every polarity pattern is included.
pub fn canonical_formulas(clauses: usize, max_vars: usize) -> Vec<CnfFormula> {
    let slots = 3 * clauses;
    let mut patterns = Vec::new();
    fn growth(slots: usize, max_vars: usize, cur: &mut Vec<usize>, used: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == slots {
            out.push(cur.clone());
            return;
        }
        for v in 0..=used.min(max_vars - 1) {
            cur.push(v);
            growth(slots, max_vars, cur, used.max(v + 1), out);
            cur.pop();
        }
    }
    growth(slots, max_vars, &mut Vec::new(), 0, &mut patterns);
    let mut out = Vec::new();
    for vars in &patterns {
        let n_vars = vars.iter().max().map_or(0, |m| m + 1);
        for signs in 0..1u32 << slots {
            let lits: Vec<Literal> =
                (0..slots).map(|i| Literal { var: vars[i], positive: signs >> i & 1 == 0 }).collect();
            let cls = lits.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
            out.push(CnfFormula::new(n_vars, cls).expect("variables in range"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn formula_counts() {
        assert_eq!(canonical_formulas(1, 4).len(), 5 * 8);
        assert_eq!(canonical_formulas(2, 4).len(), 187 * 64);
    }

    #[test]
    fn generators_produce_valid_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let db = random_database(&mut rng, 5, 3, 3);
            let h = random_hierarchy::<u64, _>(&mut rng, db.alphabet().clone()).unwrap();
            assert_eq!(h.alphabet().len(), 3);
            let inst = random_3dm(&mut rng, 3, 9);
            assert!(inst.triples().len() <= 9);
            if let Some(t) = random_tripartite(&mut rng, 7, 6, true) {
                assert_eq!(t.graph().edge_count(), 6);
            }
            let heavy = heavy_duplicate_database(&mut rng, 40, 2, 2, 0.7);
            assert_eq!((heavy.n_rows(), heavy.n_cols()), (40, 2));
        }
        let single = random_hierarchy::<u64, _>(&mut rng, Arc::new(Alphabet::numeric(1))).unwrap();
        assert_eq!(single.nodes().len(), 1);
    }
}

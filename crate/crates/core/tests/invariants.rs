//! Property tests for the structural invariants of the data model,
//! solvers and reductions.

use std::collections::HashSet;

use kanon::database::{anonymize_partition, group_cost, is_k_anonymous, validate_partition};
use kanon::diversity::{group_is_l_diverse, solve_l_diversity_bruteforce, DiversityRule};
use kanon::generate::{random_3dm, random_database, random_hierarchy, random_tripartite};
use kanon::oracles::{edge_partition_search, max_3dm_bruteforce, verify_edge_partition};
use kanon::reductions::{
    check_gadget_graph, formula_to_graph, graph_to_incidence_db, tripartite_to_2div, CnfFormula, Literal,
};
use kanon::simplex::{build_anonymity_hypergraph, check_simplex_conditions, solve_simplex_matching};
use kanon::solvers::{brute_force_k_anonymity, kernelize, solve_k_anonymity_dnc, Kernel};
use kanon::{Graph, Hierarchy, Rational, RationalHierarchy, Suppression};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Random partition of 0..n into groups of size >= k (n >= k).
fn random_partition(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut rest = &idx[..];
    while rest.len() >= 2 * k {
        let size = rng.gen_range(k..=rest.len() - k);
        groups.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    groups.push(rest.to_vec());
    groups
}

#[test]
fn triple_cost_per_row_dominates_pair_cost_per_row() {
    // every 3-row database with 2 columns over 3 symbols
    for code in 0..3usize.pow(6) {
        let rows: Vec<Vec<usize>> =
            (0..3).map(|i| (0..2).map(|j| code / 3usize.pow(2 * i + j) % 3).collect()).collect();
        let db = kanon::Database::from_indices(3, &rows).unwrap();
        let triple = group_cost(&db, &[0, 1, 2]).unwrap();
        for pair in [[0, 1], [0, 2], [1, 2]] {
            // C_ijk / 3 >= C_ij / 2
            assert!(2 * triple >= 3 * group_cost(&db, &pair).unwrap(), "{rows:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn anonymized_partition_is_k_anonymous(seed in any::<u64>(), n in 2usize..=10, k in 1usize..=3) {
        prop_assume!(n >= k);
        let mut r = rng(seed);
        let m = r.gen_range(1..=4);
        let db = random_database(&mut r, n, m, 3);
        let groups = random_partition(&mut r, n, k);
        let sol = anonymize_partition(&db, &groups).unwrap();
        let min = groups.iter().map(Vec::len).min().unwrap();
        prop_assert!(is_k_anonymous(&sol.released_database(&db), min).unwrap());
        let expected: u64 = groups.iter().map(|g| group_cost(&db, g).unwrap()).sum();
        prop_assert_eq!(sol.cost, expected);
    }

    #[test]
    fn optimum_never_exceeds_a_random_partition(seed in any::<u64>(), n in 3usize..=9, k in 2usize..=3) {
        let mut r = rng(seed);
        let m = r.gen_range(1..=4);
        let db = random_database(&mut r, n, m, 3);
        let best = solve_k_anonymity_dnc(&db, k).unwrap();
        validate_partition(n, &best.group_indices()).unwrap();
        prop_assert!(best.min_group_size() >= k);
        for _ in 0..8 {
            let groups = random_partition(&mut r, n, k);
            prop_assert!(best.cost <= anonymize_partition(&db, &groups).unwrap().cost);
        }
    }

    #[test]
    fn hierarchy_costs_grow_toward_the_root(seed in any::<u64>(), c in 1usize..=6) {
        let mut r = rng(seed);
        let alphabet = std::sync::Arc::new(kanon::Alphabet::numeric(c));
        let h: Hierarchy = random_hierarchy(&mut r, alphabet).unwrap();
        let leaves = (0..h.nodes().len()).filter(|&id| h.children(id).next().is_none()).count();
        prop_assert_eq!(leaves, c);
        for node in h.nodes() {
            if let Some(p) = node.parent {
                prop_assert!(h.node(p).cost >= node.cost);
            }
        }
    }

    #[test]
    fn third_row_never_lowers_generalized_cost(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, c) = (r.gen_range(1..=4), r.gen_range(2..=5));
        let db = random_database(&mut r, 3, m, c);
        let h: Hierarchy = random_hierarchy(&mut r, db.alphabet().clone()).unwrap();
        for j in 0..db.n_cols() {
            let col = |rows: &[usize]| {
                let cells: Vec<_> = rows.iter().map(|&i| db.row(i)[j]).collect();
                h.node(h.lowest_common_ancestor(&cells).unwrap()).cost
            };
            let three = col(&[0, 1, 2]);
            for pair in [[0, 1], [0, 2], [1, 2]] {
                prop_assert!(three >= col(&pair));
            }
        }
    }

    #[test]
    fn anonymity_hypergraphs_are_simplex(seed in any::<u64>(), n in 2usize..=8) {
        let mut r = rng(seed);
        let (m, c) = (r.gen_range(1..=5), r.gen_range(1..=4));
        let db = random_database(&mut r, n, m, c);
        prop_assert!(check_simplex_conditions(&build_anonymity_hypergraph(&Suppression, &db).unwrap()).is_empty());
        let h: RationalHierarchy = random_hierarchy(&mut r, db.alphabet().clone()).unwrap();
        let hg = build_anonymity_hypergraph(&h, &db).unwrap();
        prop_assert!(check_simplex_conditions(&hg).is_empty());
        let m = solve_simplex_matching(&hg).unwrap();
        prop_assert!(m.is_perfect(n));
        prop_assert_eq!(m.recompute_cost(&hg), Some(m.cost));
        prop_assert!(m.cost >= Rational::from_integer(0));
    }

    #[test]
    fn kernel_respects_its_size_bound(seed in any::<u64>(), n in 1usize..=80, l in 1usize..=2, c in 1usize..=2, k in 1usize..=3) {
        let mut r = rng(seed);
        let db = random_database(&mut r, n, l, c);
        let kern = kernelize(&db, k).unwrap();
        prop_assert!(kern.kernel.n_rows() as u128 <= Kernel::size_bound(k, c, l).max(n as u128));
        prop_assert!(kern.cell_reads <= 3 * n * l);
        let extracted: usize = kern.extracted.iter().map(|g| g.len()).sum();
        prop_assert_eq!(extracted + kern.kernel.n_rows(), n);
    }

    #[test]
    fn incidence_table_cost_is_at_least_3m(seed in any::<u64>(), vertices in 3usize..=7, m in 3usize..=7) {
        let mut r = rng(seed);
        let all: Vec<(usize, usize)> = (0..vertices).flat_map(|a| (a + 1..vertices).map(move |b| (a, b))).collect();
        prop_assume!(all.len() >= m);
        let edges: Vec<(usize, usize)> = all.choose_multiple(&mut r, m).copied().collect();
        let g = Graph::new(vertices, edges).unwrap();
        let cost = brute_force_k_anonymity(&graph_to_incidence_db(&g), 3).unwrap().cost;
        prop_assert!(cost >= 3 * m as u64);
        let partition = edge_partition_search(&g, true);
        prop_assert_eq!(cost == 3 * m as u64, partition.is_some());
        if let Some(p) = partition {
            prop_assert!(verify_edge_partition(&g, &p));
        }
    }

    #[test]
    fn two_row_groups_never_two_diverse(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let vertices = r.gen_range(3..=7);
        let planted = r.gen_bool(0.5);
        let Some(t) = random_tripartite(&mut r, vertices, 3 * m, planted) else { return Ok(()) };
        let inst = tripartite_to_2div(&t).unwrap();
        for i in 0..3 * m {
            for j in i + 1..3 * m {
                prop_assert!(!group_is_l_diverse(&inst, &[i, j], 2, DiversityRule::default()).unwrap());
            }
        }
        if let Ok(sol) = solve_l_diversity_bruteforce(&inst, 2) {
            prop_assert!(sol.groups.iter().all(|g| g.len() >= 3));
        }
    }

    #[test]
    fn maximum_matchings_are_matchings(seed in any::<u64>(), q in 1usize..=4) {
        let mut r = rng(seed);
        let inst = random_3dm(&mut r, q, 3 * q);
        let best = max_3dm_bruteforce(&inst).unwrap();
        prop_assert!(inst.is_matching(&best));
        prop_assert!(best.len() <= q);
    }

    #[test]
    fn formula_graphs_keep_their_structure(
        clauses in prop::collection::vec(prop::array::uniform3((0usize..5, any::<bool>())), 1..=4)
    ) {
        let cls: Vec<[Literal; 3]> = clauses
            .iter()
            .map(|c| c.map(|(var, positive)| Literal { var, positive }))
            .collect();
        let phi = CnfFormula::new(5, cls).unwrap();
        let (g, reg) = formula_to_graph(&phi).unwrap();
        prop_assert!(check_gadget_graph(&g, &reg).is_empty());
        // every shared tree edge is closed by exactly one S_5 centre or hub
        let outside: HashSet<usize> = reg
            .clauses
            .iter()
            .flat_map(|c| c.stars.iter().map(|s| s.centre))
            .chain(reg.hubs.iter().map(|h| h.hub))
            .collect();
        for gadget in &reg.variables {
            let mut seen = HashSet::new();
            for &[tree, out] in gadget.top_shared.iter().chain(&gadget.bottom_shared) {
                prop_assert!(outside.contains(&out));
                prop_assert!(seen.insert((tree, out)));
            }
            let per_tree = 3 * (1usize << (gadget.depth - 1)) - 3;
            prop_assert_eq!(gadget.top_shared.len(), per_tree);
            prop_assert_eq!(gadget.bottom_shared.len(), per_tree);
        }
    }
}

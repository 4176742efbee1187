//! The acceptance criteria as runnable checks. Each returns a
//! [`CriterionReport`]; the integration test target `acceptance` and the CLI
//! `selftest` command both print one line per report.
//!
//! Instances come from fixed seeds, so every run checks the same inputs.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{CostModel, Suppression};
use crate::database::{group_cost, Alphabet, Database};
use crate::diversity::{group_is_l_diverse, solve_l_diversity_bruteforce, DiversityInstance, DiversityRule};
use crate::error::Error;
use crate::generate::{
    canonical_formulas, heavy_duplicate_database, random_3dm, random_database, random_hierarchy, random_tripartite,
};
use crate::graph::Graph;
use crate::hierarchy::GeneralizationHierarchy;
use crate::oracles::{
    all_3dm_matchings, assignment_from_partition, classify_gadget_partition, edge_partition_search, enumerate_1in3_sat,
    max_3dm_bruteforce, triangle_partition_search, verify_edge_partition, EdgeBlock, GadgetClass,
};
use crate::reductions::{
    check_gadget_graph, formula_to_graph, graph_to_incidence_db, map_3dm_solution, tdm3_to_db27, tripartite_to_2div,
    tripartite_to_3div, CnfFormula, GadgetRegistry, Literal,
};
use crate::scalar::{Rational, Scalar};
use crate::simplex::{build_anonymity_hypergraph, check_simplex_conditions};
use crate::solvers::{
    brute_force_k_anonymity, kernelize, recompute_cost, solve_2_anonymity, solve_2_anonymity_with,
    solve_k_anonymity_dnc, solve_k_anonymity_kernelized, Kernel, Solution,
};

/// Failures kept per report; the count is always exact.
const KEPT_FAILURES: usize = 8;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    /// Instances examined.
    pub instances: usize,
    /// One line per sub-check: `(label, failures, checks)`.
    pub checks: Vec<(String, usize, usize)>,
    /// First few failure descriptions.
    pub failures: Vec<String>,
    pub elapsed: Duration,
    /// Runtime limit for the criterion, when it has one.
    pub budget: Option<Duration>,
}

impl CriterionReport {
    fn new(id: u8, title: &'static str, budget: Option<Duration>) -> Self {
        CriterionReport {
            id,
            title,
            instances: 0,
            checks: Vec::new(),
            failures: Vec::new(),
            elapsed: Duration::ZERO,
            budget,
        }
    }

    fn check(&mut self, label: &str, ok: bool, detail: impl FnOnce() -> String) {
        let pos = match self.checks.iter().position(|(l, _, _)| l == label) {
            Some(p) => p,
            None => {
                self.checks.push((label.to_string(), 0, 0));
                self.checks.len() - 1
            }
        };
        self.checks[pos].2 += 1;
        if !ok {
            self.checks[pos].1 += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(format!("{label}: {}", detail()));
            }
        }
    }

    fn require_at_least(&mut self, label: &str, got: usize, need: usize) {
        self.check(label, got >= need, || format!("{got} < {need}"));
    }

    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed <= b)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|&(_, failed, _)| failed == 0) && self.within_budget()
    }

    fn timed(mut self, start: Instant) -> Self {
        self.elapsed = start.elapsed();
        self
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let budget = self.budget.map_or(String::new(), |b| format!(" (limit {}s)", b.as_secs()));
        write!(
            f,
            "[{verdict}] criterion {}: {} | {} instances, {:.1}s{budget}",
            self.id,
            self.title,
            self.instances,
            self.elapsed.as_secs_f64()
        )?;
        for (label, failed, total) in &self.checks {
            let mark = if *failed == 0 { "ok" } else { "FAILED" };
            write!(f, "\n    {mark:>6}  {label}: {}/{total} hold", total - failed)?;
        }
        for line in &self.failures {
            write!(f, "\n    - {line}")?;
        }
        Ok(())
    }
}

fn valid_solution<M: CostModel, R: Clone>(
    model: &M,
    db: &Database,
    k: usize,
    s: &crate::database::AnonymizationSolution<M::Cost, R>,
) -> bool {
    crate::database::validate_partition(db.n_rows(), &s.group_indices()).is_ok()
        && s.min_group_size() >= k
        && recompute_cost(model, db, s).is_ok_and(|c| c == s.cost)
}

/// Solver cross-agreement on small random databases.
pub fn criterion_1() -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(1, "solver cross-agreement", Some(Duration::from_secs(120)));
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    for _ in 0..600 {
        let n = rng.gen_range(3..=9);
        let m = rng.gen_range(1..=5);
        let c = rng.gen_range(2..=4);
        let db = random_database(&mut rng, n, m, c);
        r.instances += 1;
        for k in [2usize, 3] {
            let brute = brute_force_k_anonymity(&db, k).expect("n >= k");
            let dnc = solve_k_anonymity_dnc(&db, k).expect("n >= k");
            let kern = solve_k_anonymity_kernelized(&db, k).expect("n >= k");
            let mut costs = vec![brute.cost, dnc.cost, kern.cost];
            let mut all: Vec<&Solution> = vec![&brute, &dnc, &kern];
            let simplex;
            if k == 2 {
                simplex = solve_2_anonymity(&db).expect("n >= 2");
                costs.push(simplex.cost);
                all.push(&simplex);
            }
            r.check("all solvers report the same optimum", costs.iter().all(|&c| c == costs[0]), || {
                format!("n={n} m={m} c={c} k={k}: brute/dnc/kernel/simplex = {costs:?}")
            });
            r.check(
                "every solution is a valid k-anonymization",
                all.iter().all(|s| valid_solution(&Suppression, &db, k, *s)),
                || format!("n={n} m={m} c={c} k={k}"),
            );
        }
    }
    r.require_at_least("instance count >= 500", r.instances, 500);
    r.timed(start)
}

/// Simplex conditions on hypergraphs from random databases.
pub fn criterion_2() -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(2, "simplex conditions hold", Some(Duration::from_secs(30)));
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    for i in 0..1200 {
        let n = rng.gen_range(2..=8);
        let (m, c) = (rng.gen_range(1..=5), rng.gen_range(1..=4));
        let db = random_database(&mut rng, n, m, c);
        r.instances += 1;
        let (label, violations) = match i % 3 {
            0 => {
                let hg = build_anonymity_hypergraph(&Suppression, &db).expect("n >= 2");
                ("suppression hypergraphs", check_simplex_conditions(&hg).len())
            }
            1 => {
                let h = random_hierarchy::<u64, _>(&mut rng, db.alphabet().clone()).expect("valid");
                let hg = build_anonymity_hypergraph(&h, &db).expect("n >= 2");
                ("integer-cost hierarchy hypergraphs", check_simplex_conditions(&hg).len())
            }
            _ => {
                let h = random_hierarchy::<Rational, _>(&mut rng, db.alphabet().clone()).expect("valid");
                let h = halve_costs(h);
                let hg = build_anonymity_hypergraph(&h, &db).expect("n >= 2");
                ("rational-cost hierarchy hypergraphs", check_simplex_conditions(&hg).len())
            }
        };
        r.check(label, violations == 0, || format!("n={n}: {violations} violations"));
    }
    r.require_at_least("instance count >= 1000", r.instances, 1000);
    r.timed(start)
}

// Non-integral costs exercise the exact rational path.
fn halve_costs(h: GeneralizationHierarchy<Rational>) -> GeneralizationHierarchy<Rational> {
    let mut nodes = h.nodes().to_vec();
    for n in &mut nodes {
        n.cost /= Rational::from_integer(2);
    }
    GeneralizationHierarchy::new(h.alphabet().clone(), nodes).expect("scaling keeps monotonicity")
}

/// Minimum cost over every partition into groups of size `>= 2`, priced by
/// the hierarchy. Independent of the solvers: no size cap, no memo.
fn hierarchy_partition_optimum<C: Scalar>(h: &GeneralizationHierarchy<C>, db: &Database) -> C {
    fn rec<C: Scalar>(
        h: &GeneralizationHierarchy<C>,
        db: &Database,
        i: usize,
        blocks: &mut Vec<Vec<usize>>,
        best: &mut Option<C>,
    ) {
        if i == db.n_rows() {
            if blocks.iter().all(|b| b.len() >= 2) {
                let cost = blocks.iter().map(|b| h.generalized_group_cost(db, b).expect("valid group")).sum::<C>();
                if best.is_none_or(|b| cost < b) {
                    *best = Some(cost);
                }
            }
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(h, db, i + 1, blocks, best);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(h, db, i + 1, blocks, best);
        blocks.pop();
    }
    let mut best = None;
    rec(h, db, 0, &mut Vec::new(), &mut best);
    best.expect("n >= 2 has a partition")
}

/// Star hierarchy equals suppression; hierarchy-aware 2-anonymity is optimal.
pub fn criterion_3() -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(3, "hierarchy consistency", None);
    // every 3-row database with 2 columns over 3 symbols, every row subset
    let alphabet = Arc::new(Alphabet::numeric(3));
    let star = GeneralizationHierarchy::<u64>::star(alphabet.clone(), 1).expect("valid");
    for code in 0..3usize.pow(6) {
        let rows: Vec<Vec<usize>> =
            (0..3).map(|i| (0..2).map(|j| code / 3usize.pow(2 * i + j) % 3).collect()).collect();
        let db = Database::from_indices(3, &rows).expect("valid");
        r.instances += 1;
        for mask in 1u32..8 {
            let group: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
            let (a, b) = (star.generalized_group_cost(&db, &group).unwrap(), group_cost(&db, &group).unwrap());
            r.check("star hierarchy cost equals suppression cost", a == b, || {
                format!("{rows:?} {group:?}: {a} vs {b}")
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    for i in 0..240 {
        let n = rng.gen_range(2..=7);
        let (m, c) = (rng.gen_range(1..=4), rng.gen_range(2..=4));
        let db = random_database(&mut rng, n, m, c);
        r.instances += 1;
        if i % 2 == 0 {
            let h = random_hierarchy::<u64, _>(&mut rng, db.alphabet().clone()).expect("valid");
            let s = solve_2_anonymity_with(&h, &db).expect("n >= 2");
            let oracle = hierarchy_partition_optimum(&h, &db);
            r.check(
                "2-anonymity with hierarchy equals partition search (n <= 7)",
                s.cost == oracle && valid_solution(&h, &db, 2, &s),
                || format!("n={n}: {} vs {oracle}", s.cost),
            );
        } else {
            let h = halve_costs(random_hierarchy::<Rational, _>(&mut rng, db.alphabet().clone()).expect("valid"));
            let s = solve_2_anonymity_with(&h, &db).expect("n >= 2");
            let oracle = hierarchy_partition_optimum(&h, &db);
            r.check(
                "2-anonymity with hierarchy equals partition search (n <= 7)",
                s.cost == oracle && valid_solution(&h, &db, 2, &s),
                || format!("n={n}: {} vs {oracle}", s.cost),
            );
        }
    }
    r.timed(start)
}

/// 3DM reduction costs and the L-reduction identity.
pub fn criterion_4() -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(4, "L-reduction identities", Some(Duration::from_secs(120)));
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let mut undefined = 0;
    for _ in 0..60 {
        let q = rng.gen_range(1..=3);
        let inst = random_3dm(&mut rng, q, 3 * q);
        let db = tdm3_to_db27(&inst).expect("valid instance");
        let n = inst.element_count();
        r.instances += 1;

        let triples: Vec<Vec<usize>> = (0..inst.triples().len())
            .map(|t| {
                let mut v = inst.triple_rows(t).to_vec();
                v.sort_unstable();
                v
            })
            .collect();
        for mask in 1u32..1 << n {
            let group: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let cost = group_cost(&db, &group).unwrap();
            let (label, expected) = match group.len() {
                1 | 2 => continue,
                3 if triples.contains(&group) => ("3 rows of a triple cost 78", 78),
                3 => ("3 rows not a triple cost 81", 81),
                x => ("x >= 4 rows cost 27x", 27 * x as u64),
            };
            r.check(label, cost == expected, || format!("rows {group:?}: {cost} != {expected}"));
        }

        let best = max_3dm_bruteforce(&inst).expect("small");
        let opt = brute_force_k_anonymity(&db, 3).expect("n >= 3").cost;
        let expected = 27 * n as u64 - 3 * best.len() as u64;
        r.check("optimal 3-anonymity cost = 27n - 3|max matching|", opt == expected, || {
            format!("q={q} |M|={}: {opt} vs {expected}", inst.triples().len())
        });

        for matching in all_3dm_matchings(&inst).expect("small") {
            match map_3dm_solution(&inst, &matching) {
                Ok(map) => {
                    let ok = map.c_3dm == Rational::from_integer(27) * map.c_3anon
                        && map.solution.cost == 27 * n as u64 - 3 * matching.len() as u64
                        && valid_solution(&Suppression, &db, 3, &map.solution);
                    r.check("C_3DM(M') = 27 C_3ANON(g(M'))", ok, || {
                        format!("M'={matching:?}: {} vs 27 * {}", map.c_3dm, map.c_3anon)
                    });
                }
                Err(_) => {
                    // g is undefined only when the unmatched rows are one
                    // triple of M (or fewer than three rows)
                    undefined += 1;
                    let left = n - 3 * matching.len();
                    let is_documented = left < 3
                        || (left == 3 && {
                            let mut covered = vec![false; n];
                            matching.iter().flat_map(|&t| inst.triple_rows(t)).for_each(|r| covered[r] = true);
                            let rest: Vec<usize> = (0..n).filter(|&r| !covered[r]).collect();
                            triples.contains(&rest)
                        });
                    r.check("g(M') undefined only when unmatched rows form a triple of M", is_documented, || {
                        format!("M'={matching:?}")
                    });
                }
            }
        }
    }
    r.require_at_least("instance count >= 50", r.instances, 50);
    r.checks.push((format!("matchings without a fully suppressed packing (skipped): {undefined}"), 0, undefined));
    r.timed(start)
}

/// Outcome of one formula in criterion 5, reused by criterion 6.
#[derive(Debug, Clone)]
pub struct FormulaRun {
    pub formula: CnfFormula,
    pub registry: GadgetRegistry,
    pub satisfiable: bool,
    pub partition: Option<Vec<EdgeBlock>>,
}

/// Runs every formula with up to two clauses over up to four variables.
/// Returns the criterion 5 report and the per-formula runs.
pub fn criterion_5() -> (CriterionReport, Vec<FormulaRun>) {
    let start = Instant::now();
    let mut r = CriterionReport::new(5, "edge-partition reduction end to end", Some(Duration::from_secs(600)));
    let mut formulas = canonical_formulas(1, 4);
    formulas.extend(canonical_formulas(2, 4));
    let mut runs = Vec::with_capacity(formulas.len());
    for phi in formulas {
        r.instances += 1;
        let (g, reg) = match formula_to_graph(&phi) {
            Ok(x) => x,
            Err(e) => {
                r.check("G_phi constructed", false, || format!("{}: {e}", show(&phi)));
                continue;
            }
        };
        let structure = check_gadget_graph(&g, &reg);
        r.check("G_phi simple, triangle-free, gadget degrees as built", structure.is_empty(), || {
            format!("{}: {}", show(&phi), structure.join("; "))
        });
        r.check("G_phi bipartite", g.is_bipartite(), || show(&phi));
        let satisfiable = !enumerate_1in3_sat(&phi).expect("few variables").is_empty();
        let partition = edge_partition_search(&g, false);
        r.check("1-in-3 satisfiable <=> 4-star partition exists", satisfiable == partition.is_some(), || {
            format!("{}: satisfiable={satisfiable}", show(&phi))
        });
        if let Some(p) = &partition {
            r.check("found partitions verify", verify_edge_partition(&g, p), || show(&phi));
        }
        runs.push(FormulaRun { formula: phi, registry: reg, satisfiable, partition });
    }
    for (name, clauses, want) in [
        (
            "(-1 2 3)(1 -2 3) partitions",
            vec![
                [Literal::neg(0), Literal::pos(1), Literal::pos(2)],
                [Literal::pos(0), Literal::neg(1), Literal::pos(2)],
            ],
            true,
        ),
        (
            "(1 2 3)(-1 -2 -3) does not partition",
            vec![
                [Literal::pos(0), Literal::pos(1), Literal::pos(2)],
                [Literal::neg(0), Literal::neg(1), Literal::neg(2)],
            ],
            false,
        ),
    ] {
        let phi = CnfFormula::new(3, clauses).expect("valid");
        let got = formula_to_graph(&phi).ok().map(|(g, _)| edge_partition_search(&g, false).is_some());
        r.check(name, got == Some(want), || format!("got {got:?}"));
    }
    (r.timed(start), runs)
}

fn show(phi: &CnfFormula) -> String {
    phi.clauses().iter().map(|c| format!("({} {} {})", c[0], c[1], c[2])).collect::<Vec<_>>().join("")
}

/// Every gadget in every found partition is true or false partitioned, and
/// the read-off assignment satisfies the formula.
pub fn criterion_6(runs: &[FormulaRun]) -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(6, "gadget true/false dichotomy", None);
    for run in runs {
        let Some(p) = &run.partition else { continue };
        r.instances += 1;
        for g in &run.registry.variables {
            let class = classify_gadget_partition(&run.registry, p, g.variable).expect("gadget exists");
            r.check("every gadget is true or false partitioned", class != GadgetClass::Invalid, || {
                format!("{} variable {}", show(&run.formula), g.variable + 1)
            });
        }
        let assignment = assignment_from_partition(&run.formula, &run.registry, p).expect("gadgets exist");
        r.check(
            "read-off assignment is 1-in-3 satisfying",
            assignment.is_some_and(|a| run.formula.one_in_three(&a)),
            || show(&run.formula),
        );
    }
    r.require_at_least("partitions examined > 0", r.instances, 1);
    r.timed(start)
}

/// Incidence-table 3-anonymity versus triangle/4-star partitions.
pub fn criterion_7() -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(7, "incidence table cost 3m <=> triangle/4-star partition", None);
    let k6: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
    let (mut yes, mut no) = (0, 0);
    for mask in 0u32..1 << k6.len() {
        let m = mask.count_ones() as usize;
        if m != 3 && m != 6 {
            continue;
        }
        let edges: Vec<(usize, usize)> = (0..k6.len()).filter(|&i| mask >> i & 1 == 1).map(|i| k6[i]).collect();
        let g = compact(&edges);
        if !g.edges_connected() {
            continue;
        }
        r.instances += 1;
        let cost = brute_force_k_anonymity(&graph_to_incidence_db(&g), 3).expect("m >= 3").cost;
        let partition = edge_partition_search(&g, true);
        if partition.is_some() {
            yes += 1;
        } else {
            no += 1;
        }
        r.check(
            "cost = 3m <=> edges split into triangles and 4-stars",
            (cost == 3 * m as u64) == partition.is_some(),
            || format!("{edges:?}: cost {cost}"),
        );
    }
    r.checks.push((format!("partitionable {yes}, not partitionable {no}"), 0, yes + no));
    r.timed(start)
}

// Drops isolated vertices.
fn compact(edges: &[(usize, usize)]) -> Graph {
    let mut used: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    used.sort_unstable();
    used.dedup();
    let id = |v: usize| used.binary_search(&v).expect("present");
    Graph::new(used.len(), edges.iter().map(|&(a, b)| (id(a), id(b)))).expect("simple")
}

/// Diversity reductions from tripartite graphs.
pub fn criterion_8() -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(8, "diversity reductions", Some(Duration::from_secs(300)));
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let (mut yes, mut no) = (0, 0);
    while r.instances < 40 {
        let m = 3 * rng.gen_range(1..=3);
        let vertices = rng.gen_range(3..=7);
        let planted = rng.gen_bool(0.5);
        let Some(t) = random_tripartite(&mut rng, vertices, m, planted) else { continue };
        r.instances += 1;
        let triangles = triangle_partition_search(t.graph()).is_some();
        if triangles {
            yes += 1;
        } else {
            no += 1;
        }
        let two = tripartite_to_2div(&t).expect("valid tripartition");
        for i in 0..m {
            for j in i + 1..m {
                let ok = !group_is_l_diverse(&two, &[i, j], 2, DiversityRule::default()).expect("valid group");
                r.check("every 2-row group of the 2-diversity table fails", ok, || {
                    format!("{:?} rows {i},{j}", t.graph().edges())
                });
            }
        }
        let three = tripartite_to_3div(&t).expect("valid tripartition");
        for (label, inst, l) in [
            ("2-diversity cost = 3m <=> triangle partition", &two, 2),
            ("3-diversity cost = 3m <=> triangle partition", &three, 3),
        ] {
            let hits = optimum_is_3m(inst, l, m);
            r.check(label, hits == triangles, || format!("{:?}: triangles={triangles}", t.graph().edges()));
        }
    }
    r.require_at_least("instance count >= 30", r.instances, 30);
    r.checks.push((format!("triangle-partitionable {yes}, not {no}"), 0, yes + no));
    r.timed(start)
}

fn optimum_is_3m(inst: &DiversityInstance, l: usize, m: usize) -> bool {
    match solve_l_diversity_bruteforce(inst, l) {
        Ok(s) => s.cost == 3 * m as u64,
        Err(Error::Infeasible(_)) => false,
        Err(e) => panic!("diversity solver failed: {e}"),
    }
}

/// Kernel size, pipeline agreement and cell-read budget on duplicated data.
pub fn criterion_9() -> CriterionReport {
    let start = Instant::now();
    let mut r = CriterionReport::new(9, "kernelization contract", None);
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    let mut shrunk = 0;
    for _ in 0..120 {
        let n = rng.gen_range(20..=60);
        let l = rng.gen_range(1..=2);
        let c = rng.gen_range(1..=2);
        let k = if rng.gen_bool(0.7) { 2 } else { 3 };
        let heavy = rng.gen_range(0.5..0.95);
        let db = heavy_duplicate_database(&mut rng, n, l, c, heavy);
        r.instances += 1;
        let kernel = kernelize(&db, k).expect("k >= 1");
        if !kernel.extracted.is_empty() {
            shrunk += 1;
        }
        let bound = Kernel::size_bound(k, c, l);
        r.check("kernel rows <= 2k^2(2c)^l", kernel.kernel.n_rows() as u128 <= bound, || {
            format!("n={n} l={l} c={c} k={k}: {} > {bound}", kernel.kernel.n_rows())
        });
        r.check("cell reads <= 3nl", kernel.cell_reads <= 3 * n * l, || {
            format!("n={n} l={l}: {} reads", kernel.cell_reads)
        });
        let pipeline = solve_k_anonymity_kernelized(&db, k).expect("n >= k");
        let direct = solve_k_anonymity_dnc(&db, k).expect("n >= k");
        r.check(
            "pipeline cost = direct divide-and-conquer cost",
            pipeline.cost == direct.cost && valid_solution(&Suppression, &db, k, &pipeline),
            || format!("n={n} l={l} c={c} k={k}: {} vs {}", pipeline.cost, direct.cost),
        );
        let head = db.select_rows(&(0..12).collect::<Vec<_>>()).expect("n >= 12");
        let small = solve_k_anonymity_kernelized(&head, k).expect("12 >= k").cost;
        let brute = brute_force_k_anonymity(&head, k).expect("12 >= k").cost;
        r.check("pipeline = brute force on 12-row prefixes", small == brute, || format!("{small} vs {brute}"));
    }
    r.require_at_least("instance count >= 100", r.instances, 100);
    r.require_at_least("instances where kernelization extracted groups >= 30", shrunk, 30);
    r.timed(start)
}

/// Every criterion in order.
pub fn run_all() -> Vec<CriterionReport> {
    let (five, runs) = criterion_5();
    let six = criterion_6(&runs);
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        five,
        six,
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}

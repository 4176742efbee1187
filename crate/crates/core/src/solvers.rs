//! Exact k-anonymity solvers.
//!
//! * [`solve_2_anonymity`]: pairs and triples of rows become a cost
//!   hypergraph and an optimal simplex matching is read back as groups.
//! * [`brute_force_k_anonymity`]: subset DP over row bitmasks, groups of
//!   size `k..=2k-1`. Used as the reference oracle.
//! * [`solve_k_anonymity_dnc`]: the divide-and-conquer recursion that splits
//!   a multiset of rows into two halves of size roughly `n/2`.
//! * [`kernelize`] / [`solve_k_anonymity_kernelized`]: peel pure groups off
//!   heavily repeated rows, then solve the small remainder exactly.
//!
//! Every solver is generic over a [`CostModel`]; the plain functions use
//! [`Suppression`].

use std::collections::HashMap;

use num_traits::Zero;

use crate::cost::{solution_for, CostModel, Suppression};
use crate::database::{AnonymizationSolution, Cell, Database, RowGroup};
use crate::error::{Error, Result};
use crate::simplex::{build_anonymity_hypergraph, solve_simplex_matching};

/// Suppression solution: star count and starred rows.
pub type Solution = AnonymizationSolution<u64, Cell>;

/// Row limit of the bitmask brute force.
pub const MAX_BRUTE_FORCE_ROWS: usize = 20;
/// Limit on the number of distinct sub-multisets the divide-and-conquer may memoize.
pub const MAX_DNC_STATES: usize = 1 << 21;

fn check_k(db: &Database, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if db.n_rows() < k {
        return Err(Error::Infeasible(format!("{} rows cannot form groups of size {k}", db.n_rows())));
    }
    Ok(())
}

pub fn solve_2_anonymity(db: &Database) -> Result<Solution> {
    solve_2_anonymity_with(&Suppression, db)
}

/// Optimal 2-anonymization under any cost model via simplex matching.
pub fn solve_2_anonymity_with<M: CostModel>(
    model: &M,
    db: &Database,
) -> Result<AnonymizationSolution<M::Cost, M::Released>> {
    let hg = build_anonymity_hypergraph(model, db)?;
    let matching = solve_simplex_matching(&hg)?;
    let groups = matching.edges.iter().map(|e| e.vertices().to_vec()).collect();
    let solution = solution_for(model, db, groups)?;
    debug_assert!(solution.cost == matching.cost);
    Ok(solution)
}

pub fn brute_force_k_anonymity(db: &Database, k: usize) -> Result<Solution> {
    brute_force_with(&Suppression, db, k)
}

/// Exact minimum over partitions into groups of size `k..=2k-1`.
pub fn brute_force_with<M: CostModel>(
    model: &M,
    db: &Database,
    k: usize,
) -> Result<AnonymizationSolution<M::Cost, M::Released>> {
    check_k(db, k)?;
    model.check_database(db)?;
    let n = db.n_rows();
    if n > MAX_BRUTE_FORCE_ROWS {
        return Err(Error::TooLarge(format!("brute force is limited to {MAX_BRUTE_FORCE_ROWS} rows")));
    }
    let mut search = BruteForce { model, db, k, memo: HashMap::new() };
    let full = (1u32 << n) - 1;
    search.best(full)?.ok_or_else(|| Error::Infeasible("no partition into groups of the required size".into()))?;

    let mut groups = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let (_, group) = search.memo[&mask].expect("reachable state is feasible");
        groups.push(members(group));
        mask &= !group;
    }
    solution_for(model, db, groups)
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

struct BruteForce<'a, M: CostModel> {
    model: &'a M,
    db: &'a Database,
    k: usize,
    // best cost of covering the mask, and the group holding its lowest row
    memo: HashMap<u32, Option<(M::Cost, u32)>>,
}

impl<M: CostModel> BruteForce<'_, M> {
    fn best(&mut self, mask: u32) -> Result<Option<M::Cost>> {
        if mask == 0 {
            return Ok(Some(M::Cost::zero()));
        }
        if let Some(hit) = self.memo.get(&mask) {
            return Ok(hit.map(|(c, _)| c));
        }
        let lowest = mask.trailing_zeros();
        let others = members(mask & !(1 << lowest));
        let mut best: Option<(M::Cost, u32)> = None;
        self.extend(mask, 1 << lowest, &others, 0, &mut best)?;
        self.memo.insert(mask, best);
        Ok(best.map(|(c, _)| c))
    }

    // Groups containing the lowest row, built from `others[from..]`.
    fn extend(
        &mut self,
        mask: u32,
        group: u32,
        others: &[usize],
        from: usize,
        best: &mut Option<(M::Cost, u32)>,
    ) -> Result<()> {
        let size = group.count_ones() as usize;
        if size >= self.k {
            if let Some(rest) = self.best(mask & !group)? {
                let rows = members(group);
                let total = self.model.group_cost(self.db, &rows)? + rest;
                if best.is_none_or(|(b, _)| total < b) {
                    *best = Some((total, group));
                }
            }
        }
        if size == 2 * self.k - 1 {
            return Ok(());
        }
        for i in from..others.len() {
            self.extend(mask, group | 1 << others[i], others, i + 1, best)?;
        }
        Ok(())
    }
}

pub fn solve_k_anonymity_dnc(db: &Database, k: usize) -> Result<Solution> {
    dnc_with(&Suppression, db, k)
}

/// Divide and conquer over sub-multisets of rows.
///
/// `cost(S)` is one group when `k <= |S| <= 2k-1`; otherwise the minimum of
/// `cost(T) + cost(S - T)` over sub-multisets `T` with
/// `|T| in [ceil(|S|/2), min(ceil(|S|/2) + 2k, |S| - k)]`. States are keyed by
/// the count of each distinct row, so repeated rows share memo entries.
pub fn dnc_with<M: CostModel>(
    model: &M,
    db: &Database,
    k: usize,
) -> Result<AnonymizationSolution<M::Cost, M::Released>> {
    check_k(db, k)?;
    model.check_database(db)?;
    let classes = row_classes(db);
    let counts: Vec<usize> = classes.iter().map(Vec::len).collect();
    let mut strides = Vec::with_capacity(counts.len());
    let mut states = 1usize;
    for &c in &counts {
        strides.push(states);
        states = states
            .checked_mul(c + 1)
            .filter(|&s| s <= MAX_DNC_STATES)
            .ok_or_else(|| Error::TooLarge(format!("more than {MAX_DNC_STATES} sub-multisets")))?;
    }
    let mut dnc = Dnc { model, db, k, classes: &classes, counts: &counts, strides: &strides, memo: vec![None; states] };
    dnc.cost(&counts)?.ok_or_else(|| Error::Infeasible("no partition into groups of the required size".into()))?;

    // unfold the recorded splits into groups of concrete row indices
    let mut pools: Vec<std::slice::Iter<usize>> = classes.iter().map(|c| c.iter()).collect();
    let mut groups = Vec::new();
    let mut stack = vec![counts.clone()];
    while let Some(x) = stack.pop() {
        match dnc.memo[dnc.id(&x)].expect("visited").split {
            Split::Leaf => groups.push(
                x.iter()
                    .enumerate()
                    .flat_map(|(t, &c)| pools[t].by_ref().take(c).copied().collect::<Vec<_>>())
                    .collect(),
            ),
            Split::Halves(y) => {
                let y = dnc.decode(y);
                let rest: Vec<usize> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                stack.push(rest);
                stack.push(y);
            }
            Split::Infeasible => unreachable!("optimal plan only visits feasible states"),
        }
    }
    solution_for(model, db, groups)
}

/// Row indices grouped by identical content, classes in order of first appearance.
fn row_classes(db: &Database) -> Vec<Vec<usize>> {
    let mut index: HashMap<&[Cell], usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..db.n_rows() {
        let t = *index.entry(db.row(i)).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[t].push(i);
    }
    classes
}

#[derive(Debug, Clone, Copy)]
enum Split {
    Infeasible,
    Leaf,
    Halves(usize),
}

#[derive(Debug, Clone, Copy)]
struct Entry<C> {
    cost: Option<C>,
    split: Split,
}

struct Dnc<'a, M: CostModel> {
    model: &'a M,
    db: &'a Database,
    k: usize,
    classes: &'a [Vec<usize>],
    counts: &'a [usize],
    strides: &'a [usize],
    memo: Vec<Option<Entry<M::Cost>>>,
}

impl<M: CostModel> Dnc<'_, M> {
    fn id(&self, x: &[usize]) -> usize {
        x.iter().zip(self.strides).map(|(a, s)| a * s).sum()
    }

    fn decode(&self, mut id: usize) -> Vec<usize> {
        self.counts
            .iter()
            .map(|&c| {
                let v = id % (c + 1);
                id /= c + 1;
                v
            })
            .collect()
    }

    fn representative(&self, x: &[usize]) -> Vec<usize> {
        x.iter().enumerate().flat_map(|(t, &c)| self.classes[t][..c].iter().copied()).collect()
    }

    fn cost(&mut self, x: &[usize]) -> Result<Option<M::Cost>> {
        let id = self.id(x);
        if let Some(e) = self.memo[id] {
            return Ok(e.cost);
        }
        let size: usize = x.iter().sum();
        let entry = if size < self.k {
            Entry { cost: None, split: Split::Infeasible }
        } else if size < 2 * self.k {
            let rows = self.representative(x);
            Entry { cost: Some(self.model.group_cost(self.db, &rows)?), split: Split::Leaf }
        } else {
            let half = size.div_ceil(2);
            let lo = half.max(self.k);
            let hi = (half + 2 * self.k).min(size - self.k);
            let mut best: Option<(M::Cost, usize)> = None;
            let mut y = vec![0; x.len()];
            self.splits(x, &mut y, 0, 0, lo, hi, &mut best)?;
            match best {
                Some((c, y)) => Entry { cost: Some(c), split: Split::Halves(y) },
                None => Entry { cost: None, split: Split::Infeasible },
            }
        };
        self.memo[id] = Some(entry);
        Ok(entry.cost)
    }

    #[allow(clippy::too_many_arguments)]
    fn splits(
        &mut self,
        x: &[usize],
        y: &mut Vec<usize>,
        t: usize,
        taken: usize,
        lo: usize,
        hi: usize,
        best: &mut Option<(M::Cost, usize)>,
    ) -> Result<()> {
        if t == x.len() {
            if taken < lo {
                return Ok(());
            }
            let rest: Vec<usize> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
            let (Some(a), Some(b)) = (self.cost(y)?, self.cost(&rest)?) else {
                return Ok(());
            };
            let total = a + b;
            if best.is_none_or(|(c, _)| total < c) {
                *best = Some((total, self.id(y)));
            }
            return Ok(());
        }
        let remaining: usize = x[t + 1..].iter().sum();
        for take in 0..=x[t].min(hi - taken) {
            if taken + take + remaining < lo {
                continue;
            }
            y[t] = take;
            self.splits(x, y, t + 1, taken + take, lo, hi, best)?;
        }
        y[t] = 0;
        Ok(())
    }
}

/// Output of [`kernelize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    /// Remaining rows, in original order.
    pub kernel: Database,
    /// Original index of every kernel row.
    pub kernel_rows: Vec<usize>,
    /// Pure groups of `k` identical rows peeled off heavy rows.
    pub extracted: Vec<RowGroup>,
    /// `k · 2k · 2^ℓ`: a row keeps being peeled while more copies remain.
    pub threshold: usize,
    /// Number of cell reads performed.
    pub cell_reads: usize,
}

impl Kernel {
    /// `2k²(2c)^ℓ` for alphabet size `c` and `ℓ` columns.
    pub fn size_bound(k: usize, alphabet_size: usize, columns: usize) -> u128 {
        2 * (k as u128).pow(2) * (2 * alphabet_size as u128).pow(columns as u32)
    }
}

/// Peels pure groups `<r, k>` off any row occurring more than
/// `T = k · 2k · 2^ℓ` times. Runs in `O(nℓ)`: each row is indexed once
/// and each kernel row is copied once.
pub fn kernelize(db: &Database, k: usize) -> Result<Kernel> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = db.n_rows();
    let width = db.n_cols();
    let threshold = u32::try_from(width)
        .ok()
        .and_then(|w| 2usize.checked_pow(w))
        .and_then(|p| p.checked_mul(2 * k * k))
        .unwrap_or(usize::MAX);
    let mut cell_reads = 0;

    // Index(r): the row read as a base-c number, or a content key when that overflows.
    let radix = db.alphabet().len().max(1) as u128;
    let mut by_content: HashMap<&[Cell], usize> = HashMap::new();
    let mut index_of = Vec::with_capacity(n);
    for i in 0..n {
        let row = db.row(i);
        cell_reads += width;
        let numeric =
            row.iter().try_fold(0u128, |acc, c| acc.checked_mul(radix)?.checked_add(c.symbol_index()? as u128));
        let index = match numeric {
            Some(v) if v < u64::MAX as u128 => v as usize,
            _ => {
                let next = by_content.len();
                usize::MAX - *by_content.entry(row).or_insert(next)
            }
        };
        index_of.push(index);
    }
    let mut row_count: HashMap<usize, usize> = HashMap::new();
    for &ix in &index_of {
        *row_count.entry(ix).or_default() += 1;
    }
    let mut pending: HashMap<usize, std::collections::VecDeque<usize>> = HashMap::new();
    for (i, &ix) in index_of.iter().enumerate() {
        pending.entry(ix).or_default().push_back(i);
    }

    let mut claimed = vec![false; n];
    let mut extracted = Vec::new();
    for i in 0..n {
        if claimed[i] {
            continue;
        }
        let ix = index_of[i];
        let count = row_count.get_mut(&ix).expect("counted");
        if *count > threshold {
            let queue = pending.get_mut(&ix).expect("queued");
            let group: Vec<usize> = std::iter::from_fn(|| queue.pop_front()).filter(|&j| !claimed[j]).take(k).collect();
            for &j in &group {
                claimed[j] = true;
            }
            *count -= k;
            extracted.push(RowGroup::new(group)?);
        }
    }

    let kernel_rows: Vec<usize> = (0..n).filter(|&i| !claimed[i]).collect();
    cell_reads += kernel_rows.len() * width;
    let kernel = db.select_rows(&kernel_rows)?;
    Ok(Kernel { kernel, kernel_rows, extracted, threshold, cell_reads })
}

/// Kernelize, solve the kernel with divide and conquer, and add back the
/// zero-cost pure groups.
pub fn solve_k_anonymity_kernelized(db: &Database, k: usize) -> Result<Solution> {
    check_k(db, k)?;
    let kernel = kernelize(db, k)?;
    let mut groups: Vec<Vec<usize>> = kernel.extracted.iter().map(|g| g.members().to_vec()).collect();
    if kernel.kernel.n_rows() > 0 {
        let inner = solve_k_anonymity_dnc(&kernel.kernel, k)?;
        groups.extend(inner.groups.iter().map(|g| g.members().iter().map(|&i| kernel.kernel_rows[i]).collect()));
    }
    solution_for(&Suppression, db, groups)
}

/// Total cost of a solution recomputed group by group.
pub fn recompute_cost<M: CostModel, R>(
    model: &M,
    db: &Database,
    solution: &AnonymizationSolution<M::Cost, R>,
) -> Result<M::Cost> {
    solution.groups.iter().map(|g| model.group_cost(db, g.members())).try_fold(M::Cost::zero(), |acc, c| Ok(acc + c?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::{anonymize_partition, is_k_anonymous, validate_partition};

    fn db(c: usize, rows: &[Vec<usize>]) -> Database {
        Database::from_indices(c, rows).unwrap()
    }

    /// Independent oracle: every set partition with all blocks >= k.
    fn naive_optimum(db: &Database, k: usize) -> Option<u64> {
        fn rec(db: &Database, k: usize, i: usize, blocks: &mut Vec<Vec<usize>>, best: &mut Option<u64>) {
            if i == db.n_rows() {
                if blocks.iter().all(|b| b.len() >= k) {
                    let cost = anonymize_partition(db, blocks).unwrap().cost;
                    if best.is_none_or(|b| cost < b) {
                        *best = Some(cost);
                    }
                }
                return;
            }
            for b in 0..blocks.len() {
                blocks[b].push(i);
                rec(db, k, i + 1, blocks, best);
                blocks[b].pop();
            }
            blocks.push(vec![i]);
            rec(db, k, i + 1, blocks, best);
            blocks.pop();
        }
        let mut best = None;
        rec(db, k, 0, &mut Vec::new(), &mut best);
        best
    }

    fn check_solution(d: &Database, k: usize, s: &Solution) {
        let groups = s.group_indices();
        validate_partition(d.n_rows(), &groups).unwrap();
        assert!(s.min_group_size() >= k);
        assert_eq!(recompute_cost(&Suppression, d, s).unwrap(), s.cost);
        assert!(is_k_anonymous(&s.released_database(d), k).unwrap());
    }

    #[test]
    fn two_anonymity_examples() {
        let same = db(2, &[vec![1, 1], vec![1, 1], vec![1, 1], vec![1, 1]]);
        assert_eq!(solve_2_anonymity(&same).unwrap().cost, 0);
        let three = db(2, &[vec![0, 0], vec![0, 1], vec![1, 1]]);
        let s = solve_2_anonymity(&three).unwrap();
        assert_eq!(s.cost, 6);
        assert_eq!(naive_optimum(&three, 2), Some(6));
        check_solution(&three, 2, &s);
        assert!(matches!(solve_2_anonymity(&db(2, &[vec![0]])), Err(Error::Infeasible(_))));
    }

    #[test]
    fn brute_force_examples() {
        let same = db(2, &vec![vec![0, 1]; 3]);
        assert_eq!(brute_force_k_anonymity(&same, 3).unwrap().cost, 0);
        let mixed = db(3, &[vec![0, 1], vec![2, 1], vec![1, 0]]);
        assert_eq!(brute_force_k_anonymity(&mixed, 1).unwrap().cost, 0);
        assert!(matches!(brute_force_k_anonymity(&mixed, 4), Err(Error::Infeasible(_))));
        assert!(brute_force_k_anonymity(&mixed, 0).is_err());
    }

    #[test]
    fn dnc_examples() {
        let same = db(2, &vec![vec![1, 0]; 6]);
        assert_eq!(solve_k_anonymity_dnc(&same, 3).unwrap().cost, 0);
        assert!(matches!(solve_k_anonymity_dnc(&same, 7), Err(Error::Infeasible(_))));
        let d = db(3, &[vec![0, 1], vec![2, 1], vec![1, 0], vec![0, 0], vec![2, 2]]);
        let s = solve_k_anonymity_dnc(&d, 2).unwrap();
        check_solution(&d, 2, &s);
        assert_eq!(Some(s.cost), naive_optimum(&d, 2));
    }

    #[test]
    fn dnc_handles_many_duplicates() {
        let mut rows = vec![vec![0, 0]; 25];
        rows.extend(vec![vec![1, 0]; 13]);
        rows.extend(vec![vec![0, 1]; 1]);
        rows.extend(vec![vec![1, 1]; 2]);
        let d = db(2, &rows);
        let s = solve_k_anonymity_dnc(&d, 3).unwrap();
        check_solution(&d, 3, &s);
        // 01, 11, 11 disagree in one column only
        assert_eq!(s.cost, 3);
    }

    #[test]
    fn kernel_hand_trace() {
        let d = db(2, &vec![vec![1]; 100]);
        let kernel = kernelize(&d, 2).unwrap();
        assert_eq!(kernel.threshold, 16);
        assert_eq!(kernel.extracted.len(), 42);
        assert!(kernel.extracted.iter().all(|g| g.len() == 2));
        assert_eq!(kernel.kernel.n_rows(), 16);
        assert!(kernel.cell_reads <= 3 * 100);
        let s = solve_k_anonymity_kernelized(&d, 2).unwrap();
        assert_eq!(s.cost, 0);
        check_solution(&d, 2, &s);
    }

    #[test]
    fn kernel_without_heavy_rows_is_identity() {
        let d = db(2, &[vec![0, 1], vec![1, 1], vec![0, 1], vec![0, 0]]);
        let kernel = kernelize(&d, 2).unwrap();
        assert!(kernel.extracted.is_empty());
        assert_eq!(kernel.kernel, d);
        assert_eq!(solve_k_anonymity_kernelized(&d, 2).unwrap(), solve_k_anonymity_dnc(&d, 2).unwrap());
    }

    #[test]
    fn kernel_bound_formula() {
        assert_eq!(Kernel::size_bound(2, 2, 1), 32);
        assert_eq!(Kernel::size_bound(3, 2, 2), 288);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_db() -> impl Strategy<Value = Database> {
            (2usize..=3, 1usize..=3, 2usize..=7).prop_flat_map(|(c, m, n)| {
                prop::collection::vec(prop::collection::vec(0..c, m), n)
                    .prop_map(move |rows| Database::from_indices(c, &rows).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn solvers_agree_with_naive_partition_search(d in small_db(), k in 2usize..=3) {
                prop_assume!(d.n_rows() >= k);
                let naive = naive_optimum(&d, k).unwrap();
                let brute = brute_force_k_anonymity(&d, k).unwrap();
                let dnc = solve_k_anonymity_dnc(&d, k).unwrap();
                let kern = solve_k_anonymity_kernelized(&d, k).unwrap();
                for s in [&brute, &dnc, &kern] {
                    check_solution(&d, k, s);
                    prop_assert_eq!(s.cost, naive);
                }
                if k == 2 {
                    let simplex = solve_2_anonymity(&d).unwrap();
                    check_solution(&d, 2, &simplex);
                    prop_assert_eq!(simplex.cost, naive);
                }
            }

            #[test]
            fn splitting_large_groups_never_costs_more(d in small_db(), cut in 1usize..6) {
                let n = d.n_rows();
                prop_assume!(n >= 4);
                let cut = 2 + cut % (n - 3);
                let whole = anonymize_partition(&d, &[(0..n).collect()]).unwrap().cost;
                let split = anonymize_partition(&d, &[(0..cut).collect(), (cut..n).collect()]).unwrap().cost;
                prop_assert!(split <= whole);
            }
        }
    }
}

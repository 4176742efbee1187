//! ℓ-diversity: quasi-identifier columns are suppressed, sensitive columns
//! are released untouched, and every row must hide among rows whose
//! sensitive values vary.

use std::collections::HashMap;

use serde::Serialize;

use crate::database::{Cell, Database, RowGroup};
use crate::error::{Error, Result};

/// Largest instance the brute-force solver accepts.
pub const MAX_DIVERSITY_ROWS: usize = 12;

/// A database whose columns split into quasi-identifiers `Q` and sensitive
/// attributes `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiversityInstance {
    db: Database,
    q_columns: Vec<usize>,
    s_columns: Vec<usize>,
}

impl DiversityInstance {
    /// Rejects column sets that do not partition the columns, and an empty `S`.
    pub fn new(db: Database, mut q_columns: Vec<usize>, mut s_columns: Vec<usize>) -> Result<Self> {
        q_columns.sort_unstable();
        s_columns.sort_unstable();
        if s_columns.is_empty() {
            return Err(Error::InvalidParameter("no sensitive columns".into()));
        }
        let mut seen = vec![false; db.n_cols()];
        for &c in q_columns.iter().chain(&s_columns) {
            match seen.get_mut(c) {
                None => {
                    return Err(Error::InvalidParameter(format!("column {c} out of range for {} columns", db.n_cols())))
                }
                Some(s) if *s => return Err(Error::InvalidParameter(format!("column {c} listed twice"))),
                Some(s) => *s = true,
            }
        }
        if let Some(c) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidParameter(format!("column {c} is neither Q nor S")));
        }
        Ok(DiversityInstance { db, q_columns, s_columns })
    }

    pub fn db(&self) -> &Database {
        &self.db
    }

    pub fn q_columns(&self) -> &[usize] {
        &self.q_columns
    }

    pub fn s_columns(&self) -> &[usize] {
        &self.s_columns
    }

    /// Released database: each group's disagreeing Q cells become stars.
    pub fn release(&self, groups: &[Vec<usize>]) -> Result<Database> {
        crate::database::validate_partition(self.db.n_rows(), groups)?;
        let mut rows = self.db.rows().to_vec();
        for g in groups {
            for &q in &self.q_columns {
                let first = self.db.row(g[0])[q];
                if g.iter().any(|&r| self.db.row(r)[q] != first) {
                    for &r in g {
                        rows[r][q] = Cell::STAR;
                    }
                }
            }
        }
        Database::released(self.db.alphabet().clone(), rows)
    }
}

/// How the ℓ rows sharing a quasi-identifier must differ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum DiversityRule {
    /// Each row's Q-class shows at least ℓ distinct values in every S column.
    #[default]
    DistinctPerAttribute,
    /// Each row has ℓ−1 Q-identical companions, the ℓ rows pairwise distinct
    /// in every S column.
    PairwiseWitnesses,
}

pub fn is_l_diverse(inst: &DiversityInstance, anonymized: &Database, l: usize) -> Result<bool> {
    is_l_diverse_with(inst, anonymized, l, DiversityRule::default())
}

/// Checks the released database `anonymized` (stars equal stars).
pub fn is_l_diverse_with(
    inst: &DiversityInstance,
    anonymized: &Database,
    l: usize,
    rule: DiversityRule,
) -> Result<bool> {
    if l < 1 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    if anonymized.n_rows() != inst.db.n_rows() || anonymized.n_cols() != inst.db.n_cols() {
        return Err(Error::InvalidDatabase("released database has a different shape".into()));
    }
    for row in anonymized.rows() {
        if inst.s_columns.iter().any(|&s| row[s].is_star()) {
            return Err(Error::InvalidDatabase("star in a sensitive column".into()));
        }
    }
    let mut classes: HashMap<Vec<Cell>, Vec<usize>> = HashMap::new();
    for (i, row) in anonymized.rows().iter().enumerate() {
        let key = inst.q_columns.iter().map(|&q| row[q]).collect();
        classes.entry(key).or_default().push(i);
    }
    let s_of = |i: usize| -> Vec<Cell> { inst.s_columns.iter().map(|&s| anonymized.row(i)[s]).collect() };
    Ok(classes.values().all(|class| match rule {
        DiversityRule::DistinctPerAttribute => (0..inst.s_columns.len()).all(|j| {
            let mut values: Vec<Cell> = class.iter().map(|&i| s_of(i)[j]).collect();
            values.sort_unstable();
            values.dedup();
            values.len() >= l
        }),
        DiversityRule::PairwiseWitnesses => {
            let s: Vec<Vec<Cell>> = class.iter().map(|&i| s_of(i)).collect();
            (0..class.len()).all(|u| {
                let mut chosen = vec![u];
                has_witnesses(&s, l, 0, &mut chosen)
            })
        }
    }))
}

// Extends `chosen` (starting with the row under test) to ℓ rows pairwise
// distinct in every sensitive column.
fn has_witnesses(s: &[Vec<Cell>], l: usize, from: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == l {
        return true;
    }
    for v in from..s.len() {
        if chosen.contains(&v) {
            continue;
        }
        let compatible = chosen.iter().all(|&c| s[c].iter().zip(&s[v]).all(|(a, b)| a != b));
        if compatible {
            chosen.push(v);
            if has_witnesses(s, l, v + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Whether `group`, suppressed and released on its own, is ℓ-diverse.
pub fn group_is_l_diverse(inst: &DiversityInstance, group: &[usize], l: usize, rule: DiversityRule) -> Result<bool> {
    inst.db.check_group(group)?;
    let sub = DiversityInstance::new(inst.db.select_rows(group)?, inst.q_columns.clone(), inst.s_columns.clone())?;
    let released = sub.release(&[(0..group.len()).collect()])?;
    is_l_diverse_with(&sub, &released, l, rule)
}

/// Stars placed in Q columns: `Σ |group| × |disagreeing Q columns|`.
pub fn diversity_cost(inst: &DiversityInstance, groups: &[Vec<usize>]) -> Result<u64> {
    crate::database::validate_partition(inst.db.n_rows(), groups)?;
    Ok(groups.iter().map(|g| group_q_cost(inst, g)).sum())
}

fn group_q_cost(inst: &DiversityInstance, group: &[usize]) -> u64 {
    let first = inst.db.row(group[0]);
    let disagreeing = inst.q_columns.iter().filter(|&&q| group.iter().any(|&r| inst.db.row(r)[q] != first[q])).count();
    (group.len() * disagreeing) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiversitySolution {
    pub groups: Vec<RowGroup>,
    pub cost: u64,
}

pub fn solve_l_diversity_bruteforce(inst: &DiversityInstance, l: usize) -> Result<DiversitySolution> {
    solve_l_diversity_bruteforce_with(inst, l, DiversityRule::default())
}

/// Minimum Q-star cost over every partition into groups of size `>= l`
/// whose released database passes the diversity check. Fails with
/// [`Error::Infeasible`] when no partition passes.
pub fn solve_l_diversity_bruteforce_with(
    inst: &DiversityInstance,
    l: usize,
    rule: DiversityRule,
) -> Result<DiversitySolution> {
    if l < 1 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    let n = inst.db.n_rows();
    if n > MAX_DIVERSITY_ROWS {
        return Err(Error::TooLarge(format!("diversity brute force is limited to {MAX_DIVERSITY_ROWS} rows")));
    }
    let mut search = PartitionSearch { inst, l, rule, best: None };
    search.run(0, &mut Vec::new(), 0)?;
    let (cost, groups) = search.best.ok_or_else(|| Error::Infeasible(format!("no {l}-diverse partition exists")))?;
    let mut groups = groups.into_iter().map(RowGroup::new).collect::<Result<Vec<_>>>()?;
    groups.sort();
    Ok(DiversitySolution { groups, cost })
}

struct PartitionSearch<'a> {
    inst: &'a DiversityInstance,
    l: usize,
    rule: DiversityRule,
    best: Option<(u64, Vec<Vec<usize>>)>,
}

impl PartitionSearch<'_> {
    // Rows are placed in order. Group cost only grows as rows join, so the
    // current total is a lower bound for every completion.
    fn run(&mut self, next: usize, blocks: &mut Vec<Vec<usize>>, lower: u64) -> Result<()> {
        if self.best.as_ref().is_some_and(|(b, _)| lower >= *b) {
            return Ok(());
        }
        let n = self.inst.db.n_rows();
        let open: usize = blocks.iter().map(|b| self.l.saturating_sub(b.len())).sum();
        if open > n - next {
            return Ok(());
        }
        if next == n {
            let cost = diversity_cost(self.inst, blocks)?;
            if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
                return Ok(());
            }
            let released = self.inst.release(blocks)?;
            if is_l_diverse_with(self.inst, &released, self.l, self.rule)? {
                self.best = Some((cost, blocks.clone()));
            }
            return Ok(());
        }
        for b in 0..blocks.len() {
            blocks[b].push(next);
            let lower = blocks.iter().map(|g| group_q_cost(self.inst, g)).sum();
            self.run(next + 1, blocks, lower)?;
            blocks[b].pop();
        }
        blocks.push(vec![next]);
        let lower = blocks.iter().map(|g| group_q_cost(self.inst, g)).sum();
        self.run(next + 1, blocks, lower)?;
        blocks.pop();
        Ok(())
    }
}

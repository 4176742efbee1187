//! Databases over an interned alphabet, row groups, suppression cost and
//! the k-anonymity predicate.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Printed form of the suppression symbol.
pub const STAR_TOKEN: &str = "*";

/// One cell of a database: an alphabet symbol or the suppression star.
///
/// Cells are interned indices into an [`Alphabet`]; the star is a reserved
/// index that no alphabet symbol can take. Star equals star and nothing else.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(u32);

impl Cell {
    pub const STAR: Cell = Cell(u32::MAX);

    pub fn symbol(index: usize) -> Cell {
        assert!(index < u32::MAX as usize, "symbol index overflow");
        Cell(index as u32)
    }

    pub fn is_star(self) -> bool {
        self == Cell::STAR
    }

    /// Position of the symbol in its alphabet, `None` for the star.
    pub fn symbol_index(self) -> Option<usize> {
        (!self.is_star()).then_some(self.0 as usize)
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.symbol_index() {
            Some(i) => write!(f, "#{i}"),
            None => f.write_str(STAR_TOKEN),
        }
    }
}

/// Finite ordered set of opaque symbols. The star is never a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s == STAR_TOKEN {
                return Err(Error::InvalidAlphabet("the star cannot be a symbol".into()));
            }
            if s.is_empty() {
                return Err(Error::InvalidAlphabet("empty symbol".into()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Symbols `"0"`, `"1"`, ..., `"c-1"`.
    pub fn numeric(size: usize) -> Self {
        Alphabet::new((0..size).map(|i| i.to_string())).expect("numeric symbols are distinct")
    }

    pub fn binary() -> Self {
        Alphabet::numeric(2)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn cell(&self, token: &str) -> Option<Cell> {
        self.index.get(token).map(|&i| Cell::symbol(i))
    }

    /// Like [`Alphabet::cell`] but also accepts the star token.
    pub fn released_cell(&self, token: &str) -> Option<Cell> {
        if token == STAR_TOKEN {
            Some(Cell::STAR)
        } else {
            self.cell(token)
        }
    }

    /// Display name of a cell; `?` for indices outside the alphabet.
    pub fn name(&self, cell: Cell) -> &str {
        match cell.symbol_index() {
            Some(i) => self.symbols.get(i).map_or("?", String::as_str),
            None => STAR_TOKEN,
        }
    }

    fn contains(&self, cell: Cell) -> bool {
        cell.symbol_index().is_some_and(|i| i < self.symbols.len())
    }
}

/// An `n × m` matrix of cells. Row order and duplicate rows are preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    alphabet: Arc<Alphabet>,
    width: usize,
    rows: Vec<Vec<Cell>>,
}

impl Database {
    /// Input database: rectangular, every cell an alphabet symbol.
    pub fn new(alphabet: Arc<Alphabet>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        Self::build(alphabet, rows, false)
    }

    /// Released (anonymized) database: stars are allowed.
    pub fn released(alphabet: Arc<Alphabet>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        Self::build(alphabet, rows, true)
    }

    fn build(alphabet: Arc<Alphabet>, rows: Vec<Vec<Cell>>, allow_star: bool) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidDatabase(format!("row {i} has {} cells, expected {width}", row.len())));
            }
            for &cell in row {
                if cell.is_star() {
                    if !allow_star {
                        return Err(Error::InvalidDatabase(format!("row {i} contains a star in an input database")));
                    }
                } else if !alphabet.contains(cell) {
                    return Err(Error::InvalidDatabase(format!("row {i} has a cell outside the alphabet")));
                }
            }
        }
        Ok(Database { alphabet, width, rows })
    }

    /// Input database from symbol names.
    pub fn from_tokens<R, T>(alphabet: Arc<Alphabet>, rows: R) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let rows = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|t| {
                        let t = t.as_ref();
                        alphabet.cell(t).ok_or_else(|| Error::UnknownSymbol(t.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Database::new(alphabet, rows)
    }

    /// Database over the numeric alphabet `0..alphabet_size`.
    pub fn from_indices(alphabet_size: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&s| Cell::symbol(s)).collect()).collect();
        Database::new(Arc::new(Alphabet::numeric(alphabet_size)), rows)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[Cell] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn contains_star(&self) -> bool {
        self.rows.iter().flatten().any(|c| c.is_star())
    }

    /// Sub-database made of the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Database> {
        let rows = indices
            .iter()
            .map(|&i| self.rows.get(i).cloned().ok_or(Error::RowOutOfRange { index: i, rows: self.n_rows() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Database { alphabet: self.alphabet.clone(), width: self.width, rows })
    }

    pub(crate) fn check_group(&self, group: &[usize]) -> Result<()> {
        if group.is_empty() {
            return Err(Error::EmptyGroup);
        }
        for &i in group {
            if i >= self.n_rows() {
                return Err(Error::RowOutOfRange { index: i, rows: self.n_rows() });
            }
        }
        Ok(())
    }
}

/// Indices of rows released together as one group of identical rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct RowGroup(Vec<usize>);

impl RowGroup {
    /// Sorts the indices; rejects an empty group and repeated indices.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyGroup);
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotAPartition("repeated row index in a group".into()));
        }
        Ok(RowGroup(indices))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Checks that `groups` are non-empty, disjoint and cover `0..n`.
pub fn validate_partition(n: usize, groups: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; n];
    for g in groups {
        if g.is_empty() {
            return Err(Error::NotAPartition("empty group".into()));
        }
        for &i in g {
            if i >= n {
                return Err(Error::NotAPartition(format!("row {i} out of range for {n} rows")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::NotAPartition(format!("row {i} appears twice")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::NotAPartition(format!("row {missing} is not covered")));
    }
    Ok(())
}

/// Columns on which the members of `group` do not all carry the same cell.
pub fn disagreement_columns(db: &Database, group: &[usize]) -> Result<Vec<usize>> {
    db.check_group(group)?;
    Ok(disagreements(db, group).collect())
}

fn disagreements<'a>(db: &'a Database, group: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
    let first = db.row(group[0]);
    (0..db.n_cols()).filter(move |&c| group[1..].iter().any(|&r| db.row(r)[c] != first[c]))
}

/// Stars needed to make every member of `group` identical:
/// `|group| × |disagreement columns|`.
pub fn group_cost(db: &Database, group: &[usize]) -> Result<u64> {
    db.check_group(group)?;
    Ok((group.len() * disagreements(db, group).count()) as u64)
}

/// Released row of a group under suppression: the common cell where members
/// agree, a star elsewhere.
pub fn suppress_group(db: &Database, group: &[usize]) -> Result<Vec<Cell>> {
    db.check_group(group)?;
    let first = db.row(group[0]);
    Ok((0..db.n_cols())
        .map(|c| if group[1..].iter().all(|&r| db.row(r)[c] == first[c]) { first[c] } else { Cell::STAR })
        .collect())
}

/// A partition of the rows with one released record per group.
///
/// `C` is the cost scalar (star count for suppression), `R` the released
/// cell type (a [`Cell`] for suppression, a hierarchy node for generalization).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AnonymizationSolution<C, R> {
    pub groups: Vec<RowGroup>,
    pub released_rows: Vec<Vec<R>>,
    pub cost: C,
}

impl<C, R: Clone> AnonymizationSolution<C, R> {
    /// Released record for every original row, in original row order.
    pub fn per_row_release(&self, n_rows: usize) -> Vec<Vec<R>> {
        let mut out: Vec<Option<Vec<R>>> = vec![None; n_rows];
        for (g, rel) in self.groups.iter().zip(&self.released_rows) {
            for &i in g.members() {
                out[i] = Some(rel.clone());
            }
        }
        out.into_iter().map(|r| r.expect("groups cover every row")).collect()
    }

    pub fn min_group_size(&self) -> usize {
        self.groups.iter().map(RowGroup::len).min().unwrap_or(0)
    }

    pub fn group_indices(&self) -> Vec<Vec<usize>> {
        self.groups.iter().map(|g| g.members().to_vec()).collect()
    }
}

impl<C> AnonymizationSolution<C, Cell> {
    /// The released database (one row per original row).
    pub fn released_database(&self, db: &Database) -> Database {
        Database::released(db.alphabet().clone(), self.per_row_release(db.n_rows()))
            .expect("released rows keep the input shape")
    }
}

/// Suppresses each group of a partition and totals the stars.
pub fn anonymize_partition(db: &Database, groups: &[Vec<usize>]) -> Result<AnonymizationSolution<u64, Cell>> {
    validate_partition(db.n_rows(), groups)?;
    let mut out_groups = Vec::with_capacity(groups.len());
    let mut released_rows = Vec::with_capacity(groups.len());
    let mut cost = 0;
    for g in groups {
        cost += group_cost(db, g)?;
        released_rows.push(suppress_group(db, g)?);
        out_groups.push(RowGroup::new(g.clone())?);
    }
    Ok(AnonymizationSolution { groups: out_groups, released_rows, cost })
}

/// Every row has at least `k - 1` cell-wise identical companions.
pub fn is_k_anonymous(db: &Database, k: usize) -> Result<bool> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut counts: HashMap<&[Cell], usize> = HashMap::new();
    for row in db.rows() {
        *counts.entry(row.as_slice()).or_default() += 1;
    }
    Ok(db.rows().iter().all(|r| counts[r.as_slice()] >= k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(rows: &[Vec<usize>]) -> Database {
        Database::from_indices(4, rows).unwrap()
    }

    #[test]
    fn alphabet_rejects_star_and_duplicates() {
        assert!(Alphabet::new(["a", "*"]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        let a = Alphabet::new(["x", "y"]).unwrap();
        assert_eq!(a.cell("y"), Some(Cell::symbol(1)));
        assert_eq!(a.released_cell("*"), Some(Cell::STAR));
        assert_eq!(a.name(Cell::STAR), "*");
    }

    #[test]
    fn input_database_rejects_stars_and_ragged_rows() {
        let a = Arc::new(Alphabet::binary());
        assert!(Database::new(a.clone(), vec![vec![Cell::STAR]]).is_err());
        assert!(Database::released(a.clone(), vec![vec![Cell::STAR]]).is_ok());
        assert!(Database::new(a.clone(), vec![vec![Cell::symbol(0)], vec![]]).is_err());
        assert!(Database::new(a, vec![vec![Cell::symbol(2)]]).is_err());
    }

    #[test]
    fn disagreement_examples() {
        let d = db(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 2]]);
        assert_eq!(disagreement_columns(&d, &[0]).unwrap(), Vec::<usize>::new());
        assert_eq!(disagreement_columns(&d, &[0, 2]).unwrap(), Vec::<usize>::new());
        assert_eq!(disagreement_columns(&d, &[0, 1]).unwrap(), vec![2]);
        assert_eq!(disagreement_columns(&d, &[]), Err(Error::EmptyGroup));
        assert!(matches!(disagreement_columns(&d, &[5]), Err(Error::RowOutOfRange { .. })));
    }

    #[test]
    fn group_cost_examples() {
        let d = db(&[vec![0, 1, 2], vec![0, 1, 3]]);
        assert_eq!(group_cost(&d, &[0, 1]).unwrap(), 2);
        assert_eq!(group_cost(&d, &[]), Err(Error::EmptyGroup));
    }

    #[test]
    fn anonymize_partition_examples() {
        let same = db(&[vec![1, 2], vec![1, 2], vec![1, 2]]);
        assert_eq!(anonymize_partition(&same, &[vec![0, 1, 2]]).unwrap().cost, 0);

        let pairs = db(&[vec![0, 0], vec![1, 1], vec![0, 0], vec![1, 1]]);
        assert_eq!(anonymize_partition(&pairs, &[vec![0, 2], vec![1, 3]]).unwrap().cost, 0);

        let three = db(&[vec![0, 0], vec![0, 1], vec![1, 0]]);
        let sol = anonymize_partition(&three, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(sol.cost, 6);
        assert_eq!(sol.released_rows, vec![vec![Cell::STAR, Cell::STAR]]);

        assert!(matches!(anonymize_partition(&three, &[vec![0, 1]]), Err(Error::NotAPartition(_))));
        assert!(matches!(anonymize_partition(&three, &[vec![0, 1], vec![1, 2]]), Err(Error::NotAPartition(_))));
    }

    #[test]
    fn k_anonymity_examples() {
        let d = db(&[vec![0, 1], vec![1, 1]]);
        assert!(is_k_anonymous(&d, 1).unwrap());
        assert!(!is_k_anonymous(&d, 2).unwrap());
        assert!(is_k_anonymous(&d, 0).is_err());
        let same = db(&[vec![3], vec![3], vec![3]]);
        assert!(is_k_anonymous(&same, 3).unwrap());
    }

    #[test]
    fn star_equals_star_only() {
        let a = Arc::new(Alphabet::binary());
        let rel = Database::released(
            a,
            vec![
                vec![Cell::STAR, Cell::symbol(0)],
                vec![Cell::STAR, Cell::symbol(0)],
                vec![Cell::symbol(1), Cell::symbol(0)],
            ],
        )
        .unwrap();
        assert!(!is_k_anonymous(&rel, 2).unwrap());
        let first_two = rel.select_rows(&[0, 1]).unwrap();
        assert!(is_k_anonymous(&first_two, 2).unwrap());
    }
}

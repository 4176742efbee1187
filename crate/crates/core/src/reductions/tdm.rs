//! 3-dimensional matching with occurrence bound 3, and its reduction to
//! 3-anonymity over 27 columns.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cost::{solution_for, Suppression};
use crate::database::{Alphabet, Cell, Database};
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::solvers::Solution;

/// Element sets `W = 0..w`, `X = 0..x`, `Y = 0..y` and triples `M ⊆ W × X × Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeDmInstance {
    w: usize,
    x: usize,
    y: usize,
    triples: Vec<[usize; 3]>,
}

/// Which coordinate set an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    W,
    X,
    Y,
}

impl ThreeDmInstance {
    /// Rejects out-of-range coordinates, repeated triples and any element
    /// occurring in more than three triples.
    pub fn new(w: usize, x: usize, y: usize, triples: Vec<[usize; 3]>) -> Result<Self> {
        let sizes = [w, x, y];
        let mut occurrences = [vec![0usize; w], vec![0usize; x], vec![0usize; y]];
        for (i, t) in triples.iter().enumerate() {
            for (side, &e) in t.iter().enumerate() {
                if e >= sizes[side] {
                    return Err(Error::InvalidMatchingInstance(format!(
                        "triple {i} has coordinate {e} outside a set of size {}",
                        sizes[side]
                    )));
                }
                occurrences[side][e] += 1;
                if occurrences[side][e] > 3 {
                    return Err(Error::InvalidMatchingInstance(format!(
                        "element {} occurs in more than 3 triples",
                        element_name(side, e)
                    )));
                }
            }
            if triples[..i].contains(t) {
                return Err(Error::InvalidMatchingInstance(format!("triple {i} is repeated")));
            }
        }
        Ok(ThreeDmInstance { w, x, y, triples })
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.w, self.x, self.y]
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    /// `n = |W| + |X| + |Y|`, also the row count of the reduction.
    pub fn element_count(&self) -> usize {
        self.w + self.x + self.y
    }

    /// Row of the reduced database holding the element `e` of `side`.
    pub fn row_of(&self, side: Side, e: usize) -> usize {
        match side {
            Side::W => e,
            Side::X => self.w + e,
            Side::Y => self.w + self.x + e,
        }
    }

    /// The three rows of triple `t`.
    pub fn triple_rows(&self, t: usize) -> [usize; 3] {
        let [a, b, c] = self.triples[t];
        [self.row_of(Side::W, a), self.row_of(Side::X, b), self.row_of(Side::Y, c)]
    }

    /// Distinct triple indices, no two sharing a coordinate.
    pub fn is_matching(&self, chosen: &[usize]) -> bool {
        let mut used = vec![false; self.element_count()];
        for (i, &t) in chosen.iter().enumerate() {
            if t >= self.triples.len() || chosen[..i].contains(&t) {
                return false;
            }
            for r in self.triple_rows(t) {
                if std::mem::replace(&mut used[r], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Indices of the triples containing each row's element, in triple order.
    fn containing_triples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.element_count()];
        for t in 0..self.triples.len() {
            for r in self.triple_rows(t) {
                out[r].push(t);
            }
        }
        out
    }
}

fn element_name(side: usize, e: usize) -> String {
    format!("{}{}", ["w", "x", "y"][side], e + 1)
}

/// One 27-column row per element. Column `9a + 3b + c` holds the element's
/// `a`-th triple for W rows, its `b`-th for X rows and its `c`-th for Y rows.
/// Missing triples are filled by fresh padding symbols used nowhere else.
///
/// The alphabet is `m1.. ∪ w1.. ∪ x1.. ∪ y1.. ∪ pad1..`.
pub fn tdm3_to_db27(inst: &ThreeDmInstance) -> Result<Database> {
    let containing = inst.containing_triples();
    let padding: usize = containing.iter().map(|c| 3 - c.len()).sum();
    let mut symbols: Vec<String> = (1..=inst.triples.len()).map(|i| format!("m{i}")).collect();
    for (side, &size) in inst.sizes().iter().enumerate() {
        symbols.extend((0..size).map(|e| element_name(side, e)));
    }
    let first_pad = symbols.len();
    symbols.extend((1..=padding).map(|i| format!("pad{i}")));
    let alphabet = Arc::new(Alphabet::new(symbols)?);

    let mut next_pad = first_pad;
    let mut rows = Vec::with_capacity(inst.element_count());
    for (r, triples) in containing.iter().enumerate() {
        let mut slots: Vec<Cell> = triples.iter().map(|&t| Cell::symbol(t)).collect();
        while slots.len() < 3 {
            slots.push(Cell::symbol(next_pad));
            next_pad += 1;
        }
        let digit = |col: usize| -> usize {
            if r < inst.w {
                col / 9
            } else if r < inst.w + inst.x {
                col / 3 % 3
            } else {
                col % 3
            }
        };
        rows.push((0..27).map(|col| slots[digit(col)]).collect());
    }
    Database::new(alphabet, rows)
}

/// The 3-anonymization `g(M')` and the two normalized scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeDmMapping {
    pub solution: Solution,
    /// `3|M'| / n`.
    pub c_3dm: Rational,
    /// `1 − cost / 27n`.
    pub c_3anon: Rational,
}

/// Maps a matching to a 3-anonymization: every chosen triple is a group, the
/// other rows are packed into fully suppressed groups of 3 to 5 rows.
///
/// The leftover rows can be packed at full suppression unless there are one
/// or two of them, or exactly three forming a triple of `M`; those matchings
/// are rejected.
pub fn map_3dm_solution(inst: &ThreeDmInstance, matching: &[usize]) -> Result<ThreeDmMapping> {
    if !inst.is_matching(matching) {
        return Err(Error::InvalidParameter("not a matching of the instance".into()));
    }
    let n = inst.element_count();
    let db = tdm3_to_db27(inst)?;
    let mut groups: Vec<Vec<usize>> = matching.iter().map(|&t| inst.triple_rows(t).to_vec()).collect();
    let mut covered = vec![false; n];
    groups.iter().flatten().for_each(|&r| covered[r] = true);
    let leftover: Vec<usize> = (0..n).filter(|&r| !covered[r]).collect();
    let packed = pack_leftover(inst, &leftover).ok_or_else(|| {
        Error::Infeasible(format!(
            "the {} unmatched rows cannot be packed into fully suppressed groups of 3 to 5",
            leftover.len()
        ))
    })?;
    groups.extend(packed);
    let solution = solution_for(&Suppression, &db, groups)?;
    let n_i = n as i64;
    let c_3dm = Rational::new(3 * matching.len() as i64, n_i);
    let c_3anon = Rational::from_integer(1) - Rational::new(solution.cost as i64, 27 * n_i);
    Ok(ThreeDmMapping { solution, c_3dm, c_3anon })
}

// Groups of 3 to 5 rows, none of the 3-row groups a triple of M.
fn pack_leftover(inst: &ThreeDmInstance, rows: &[usize]) -> Option<Vec<Vec<usize>>> {
    let triple_sets: Vec<[usize; 3]> = (0..inst.triples.len()).map(|t| inst.triple_rows(t)).collect();
    fn rec(rows: &[usize], triples: &[[usize; 3]], out: &mut Vec<Vec<usize>>) -> bool {
        let Some((&first, rest)) = rows.split_first() else {
            return true;
        };
        if rows.len() < 3 {
            return false;
        }
        for size in 3..=5.min(rows.len()) {
            if rows.len() - size == 1 || rows.len() - size == 2 {
                continue;
            }
            let mut chosen = vec![first];
            if pick(rest, size - 1, 0, &mut chosen, rows, triples, out) {
                return true;
            }
        }
        false
    }
    fn pick(
        rest: &[usize],
        need: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        rows: &[usize],
        triples: &[[usize; 3]],
        out: &mut Vec<Vec<usize>>,
    ) -> bool {
        if need == 0 {
            if chosen.len() == 3 {
                let mut s = [chosen[0], chosen[1], chosen[2]];
                s.sort_unstable();
                if triples.contains(&s) {
                    return false;
                }
            }
            let remaining: Vec<usize> = rows.iter().copied().filter(|r| !chosen.contains(r)).collect();
            out.push(chosen.clone());
            if rec(&remaining, triples, out) {
                return true;
            }
            out.pop();
            return false;
        }
        for i in from..rest.len() {
            chosen.push(rest[i]);
            if pick(rest, need - 1, i + 1, chosen, rows, triples, out) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut out = Vec::new();
    rec(rows, &triple_sets, &mut out).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::group_cost;

    fn two_triples() -> ThreeDmInstance {
        ThreeDmInstance::new(2, 2, 2, vec![[0, 0, 0], [1, 1, 1], [0, 1, 0]]).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(ThreeDmInstance::new(1, 1, 1, vec![[0, 0, 1]]).is_err());
        assert!(ThreeDmInstance::new(1, 1, 1, vec![[0, 0, 0], [0, 0, 0]]).is_err());
        let four = vec![[0, 0, 0], [0, 1, 1], [0, 2, 2], [0, 3, 3]];
        assert!(ThreeDmInstance::new(1, 4, 4, four).is_err());
        assert!(two_triples().is_matching(&[0, 1]));
        assert!(!two_triples().is_matching(&[0, 2]));
        assert!(!two_triples().is_matching(&[1, 1]));
    }

    #[test]
    fn row_layout() {
        let inst = two_triples();
        let db = tdm3_to_db27(&inst).unwrap();
        assert_eq!((db.n_rows(), db.n_cols()), (6, 27));
        // w1 is in triples 0 and 2: nine copies of each, then nine of a pad
        let w1 = db.row(0);
        assert!(w1[..9].iter().all(|&c| c == Cell::symbol(0)));
        assert!(w1[9..18].iter().all(|&c| c == Cell::symbol(2)));
        assert!(w1[18..].iter().all(|&c| c == w1[18]));
        let y1 = db.row(4);
        assert_eq!(&y1[..3], &[Cell::symbol(0), Cell::symbol(2), y1[2]]);
        assert_eq!(y1[..3], y1[24..]);
        // every padding symbol is used by exactly one row
        let mut owner = std::collections::HashMap::new();
        for (r, row) in db.rows().iter().enumerate() {
            for &c in row.iter().filter(|c| db.alphabet().name(**c).starts_with("pad")) {
                assert_eq!(*owner.entry(c).or_insert(r), r);
            }
        }
        assert_eq!(owner.len(), 9);
    }

    #[test]
    fn group_costs() {
        let inst = two_triples();
        let db = tdm3_to_db27(&inst).unwrap();
        for t in 0..3 {
            assert_eq!(group_cost(&db, &inst.triple_rows(t)).unwrap(), 78);
        }
        assert_eq!(group_cost(&db, &[0, 3, 5]).unwrap(), 81);
        assert_eq!(group_cost(&db, &[0, 2, 4, 5]).unwrap(), 108);
    }

    #[test]
    fn mapping_scores() {
        let inst = two_triples();
        let empty = map_3dm_solution(&inst, &[]).unwrap();
        assert_eq!(empty.solution.cost, 27 * 6);
        assert_eq!(empty.c_3anon, Rational::from_integer(0));
        let perfect = map_3dm_solution(&inst, &[0, 1]).unwrap();
        assert_eq!(perfect.solution.cost, 27 * 6 - 6);
        assert_eq!(perfect.c_3dm, Rational::from_integer(1));
        assert_eq!(perfect.c_3dm, perfect.c_3anon * Rational::from_integer(27));
        // leftover rows {w2, x2, y2} form triple 1
        assert!(map_3dm_solution(&inst, &[0]).is_err());
        // leftover {w2, x1, y2} is not a triple of M
        let single = map_3dm_solution(&inst, &[2]).unwrap();
        assert_eq!(single.solution.cost, 27 * 6 - 3);
        assert!(map_3dm_solution(&inst, &[0, 2]).is_err());
    }
}

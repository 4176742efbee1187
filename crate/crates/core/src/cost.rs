//! Group cost models: what it costs to release a group of rows as one
//! identical record. Every solver is generic over the model.

use std::fmt::Debug;

use crate::database::{self, validate_partition, AnonymizationSolution, Cell, Database, RowGroup};
use crate::error::Result;
use crate::scalar::Scalar;
use num_traits::Zero;

pub trait CostModel: Sync {
    type Cost: Scalar;
    type Released: Clone + Debug + PartialEq + Send + Sync;

    /// Cost of making every member of `group` identical. The cost depends
    /// only on the contents of the member rows.
    fn group_cost(&self, db: &Database, group: &[usize]) -> Result<Self::Cost>;

    /// The single record every member of `group` is released as.
    fn release_group(&self, db: &Database, group: &[usize]) -> Result<Vec<Self::Released>>;

    /// Rejects databases the model cannot price.
    fn check_database(&self, _db: &Database) -> Result<()> {
        Ok(())
    }
}

/// Replace disagreeing cells by a star; one unit per star.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Suppression;

impl CostModel for Suppression {
    type Cost = u64;
    type Released = Cell;

    fn group_cost(&self, db: &Database, group: &[usize]) -> Result<u64> {
        database::group_cost(db, group)
    }

    fn release_group(&self, db: &Database, group: &[usize]) -> Result<Vec<Cell>> {
        database::suppress_group(db, group)
    }
}

/// Builds the solution record for a partition under `model`.
pub fn solution_for<M: CostModel>(
    model: &M,
    db: &Database,
    groups: Vec<Vec<usize>>,
) -> Result<AnonymizationSolution<M::Cost, M::Released>> {
    validate_partition(db.n_rows(), &groups)?;
    let mut cost = M::Cost::zero();
    let mut released_rows = Vec::with_capacity(groups.len());
    let mut row_groups = Vec::with_capacity(groups.len());
    for g in groups {
        cost = cost + model.group_cost(db, &g)?;
        released_rows.push(model.release_group(db, &g)?);
        row_groups.push(RowGroup::new(g)?);
    }
    row_groups_sorted(&mut row_groups, &mut released_rows);
    Ok(AnonymizationSolution { groups: row_groups, released_rows, cost })
}

fn row_groups_sorted<R>(groups: &mut Vec<RowGroup>, released: &mut Vec<R>) {
    let mut paired: Vec<_> = groups.drain(..).zip(released.drain(..)).collect();
    paired.sort_by(|a, b| a.0.cmp(&b.0));
    for (g, r) in paired {
        groups.push(g);
        released.push(r);
    }
}

//! Edge-vertex incidence tables and the two tripartite diversity instances
//! built on them.

use std::sync::Arc;

use crate::database::{Alphabet, Cell, Database};
use crate::diversity::DiversityInstance;
use crate::error::Result;
use crate::graph::{Graph, TripartiteGraph};

/// `R^G`: one binary row per edge, one column per vertex, `1` at the two endpoints.
pub fn graph_to_incidence_db(g: &Graph) -> Database {
    Database::new(Arc::new(Alphabet::binary()), incidence_rows(g)).expect("binary rows over the binary alphabet")
}

fn incidence_rows(g: &Graph) -> Vec<Vec<Cell>> {
    g.edges()
        .iter()
        .map(|&(a, b)| (0..g.vertex_count()).map(|v| Cell::symbol(usize::from(v == a || v == b))).collect())
        .collect()
}

/// `Q` = incidence columns; `S` = three binary columns, column `j` set when
/// the edge touches part `j`.
pub fn tripartite_to_2div(g: &TripartiteGraph) -> Result<DiversityInstance> {
    let n = g.graph().vertex_count();
    let mut rows = incidence_rows(g.graph());
    for (e, row) in rows.iter_mut().enumerate() {
        let (p, q) = g.edge_parts(e);
        row.extend((0..3).map(|j| Cell::symbol(usize::from(j == p || j == q))));
    }
    let db = Database::new(Arc::new(Alphabet::binary()), rows)?;
    DiversityInstance::new(db, (0..n).collect(), vec![n, n + 1, n + 2])
}

/// `Q` = incidence columns; `S` = one ternary column naming the pair of
/// parts the edge joins: `{0,1} → 1`, `{0,2} → 2`, `{1,2} → 3`.
pub fn tripartite_to_3div(g: &TripartiteGraph) -> Result<DiversityInstance> {
    let n = g.graph().vertex_count();
    let alphabet = Arc::new(Alphabet::new(["0", "1", "2", "3"])?);
    let mut rows = incidence_rows(g.graph());
    for (e, row) in rows.iter_mut().enumerate() {
        let label = match g.edge_parts(e) {
            (0, 1) => 1,
            (0, 2) => 2,
            _ => 3,
        };
        row.push(Cell::symbol(label));
    }
    let db = Database::new(alphabet, rows)?;
    DiversityInstance::new(db, (0..n).collect(), vec![n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diversity::{is_l_diverse, solve_l_diversity_bruteforce};
    use crate::error::Error;
    use crate::solvers::brute_force_k_anonymity;

    fn triangle() -> TripartiteGraph {
        TripartiteGraph::new(Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap(), vec![0, 1, 2]).unwrap()
    }

    #[test]
    fn incidence_of_k3() {
        let db = graph_to_incidence_db(triangle().graph());
        assert_eq!((db.n_rows(), db.n_cols()), (3, 3));
        for row in db.rows() {
            assert_eq!(row.iter().filter(|c| **c == Cell::symbol(1)).count(), 2);
        }
        assert_eq!(brute_force_k_anonymity(&db, 3).unwrap().cost, 9);
    }

    #[test]
    fn two_diversity_labels() {
        let inst = tripartite_to_2div(&triangle()).unwrap();
        for row in inst.db().rows() {
            let ones = inst.s_columns().iter().filter(|&&s| row[s] == Cell::symbol(1)).count();
            assert_eq!(ones, 2);
        }
        assert_eq!(solve_l_diversity_bruteforce(&inst, 2).unwrap().cost, 9);
        for pair in [[0, 1], [0, 2], [1, 2]] {
            let rest: Vec<usize> = (0..3).filter(|r| !pair.contains(r)).collect();
            let released = inst.release(&[pair.to_vec(), rest]).unwrap();
            assert!(!is_l_diverse(&inst, &released, 2).unwrap());
        }
    }

    #[test]
    fn three_diversity_labels() {
        let inst = tripartite_to_3div(&triangle()).unwrap();
        let mut labels: Vec<&str> = inst.db().rows().iter().map(|r| inst.db().alphabet().name(r[3])).collect();
        labels.sort_unstable();
        assert_eq!(labels, ["1", "2", "3"]);
        assert_eq!(solve_l_diversity_bruteforce(&inst, 3).unwrap().cost, 9);
    }

    #[test]
    fn star_blocks_three_diversity() {
        // centre 0 in part 0, leaves in parts 1, 1, 2
        let g = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let star = TripartiteGraph::new(g, vec![0, 1, 1, 2]).unwrap();
        let inst = tripartite_to_3div(&star).unwrap();
        assert!(matches!(solve_l_diversity_bruteforce(&inst, 3), Err(Error::Infeasible(_))));
        let inst = tripartite_to_2div(&star).unwrap();
        assert!(matches!(solve_l_diversity_bruteforce(&inst, 2), Err(Error::Infeasible(_))));
    }
}

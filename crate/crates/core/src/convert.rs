//! The correspondence between 3-uniform hypergraphs and NAE-3-SAT
//! instances: each edge becomes one all-positive clause over the same
//! index space, and truth values correspond to the two colors.

use crate::error::ModelError;
use crate::hypergraph::{Color, Hypergraph, PartialColoring};
use crate::nae::{Clause, Literal, NaeInstance, PartialAssignment};

/// Builds the instance whose variables are the vertices of `h` and whose
/// clauses are its edges in non-negated form. The result is
/// nae-satisfiable exactly when `h` has a 2-coloring with no
/// monochromatic edge.
///
/// With `require_3_uniform` set, an edge of size other than 3 is an
/// error; otherwise such edges are skipped and only the 3-uniform part is
/// converted.
pub fn instance_from_hypergraph(
    h: &Hypergraph,
    require_3_uniform: bool,
) -> Result<NaeInstance, ModelError> {
    let mut clauses = Vec::with_capacity(h.edge_count());
    for (e, edge) in h.edges().iter().enumerate() {
        if edge.len() != 3 {
            if require_3_uniform {
                return Err(ModelError::NonUniformEdge {
                    edge: e,
                    size: edge.len(),
                });
            }
            continue;
        }
        clauses.push(Clause::new([
            Literal::pos(edge[0]),
            Literal::pos(edge[1]),
            Literal::pos(edge[2]),
        ])?);
    }
    NaeInstance::new(h.vertex_count(), clauses)
}

/// True maps to color 1, false to color 2, unassigned to uncolored.
pub fn coloring_from_assignment(a: &PartialAssignment) -> PartialColoring {
    PartialColoring::from_colors(
        a.values()
            .iter()
            .map(|v| v.map(|value| if value { Color::One } else { Color::Two }))
            .collect(),
    )
}

/// Inverse of [`coloring_from_assignment`].
pub fn assignment_from_coloring(c: &PartialColoring) -> PartialAssignment {
    PartialAssignment::from_values(
        c.colors()
            .iter()
            .map(|col| col.map(|col| col == Color::One))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn fano_converts_to_seven_positive_clauses() {
        let i = instance_from_hypergraph(&gen::fano(), true).unwrap();
        assert_eq!(i.var_count(), 7);
        assert_eq!(i.clause_count(), 7);
        assert!(i
            .clauses()
            .iter()
            .all(|c| c.literals().iter().all(|l| !l.negated)));
    }

    #[test]
    fn edgeless_hypergraph_converts_to_clauseless_instance() {
        let h = Hypergraph::new(3, vec![]).unwrap();
        let i = instance_from_hypergraph(&h, true).unwrap();
        assert_eq!(i.var_count(), 3);
        assert_eq!(i.clause_count(), 0);
    }

    #[test]
    fn single_edge_admits_six_of_eight_assignments() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let i = instance_from_hypergraph(&h, true).unwrap();
        // Exhaustive check: only the two all-equal assignments fail.
        let mut good = 0;
        for mask in 0..8u32 {
            let a =
                PartialAssignment::from_values((0..3).map(|v| Some(mask >> v & 1 == 1)).collect());
            if i.clauses().iter().all(|c| c.nae_satisfied_by(&a)) {
                good += 1;
            }
        }
        assert_eq!(good, 6);
    }

    #[test]
    fn non_uniform_edge_is_rejected_under_flag() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let err = instance_from_hypergraph(&h, true).unwrap_err();
        assert!(matches!(
            err,
            ModelError::NonUniformEdge { edge: 0, size: 4 }
        ));
    }

    #[test]
    fn assignment_coloring_round_trip() {
        let a = PartialAssignment::from_values(vec![Some(true), Some(false), None]);
        let c = coloring_from_assignment(&a);
        assert_eq!(c.get(0), Some(Color::One));
        assert_eq!(c.get(1), Some(Color::Two));
        assert_eq!(c.get(2), None);
        assert_eq!(assignment_from_coloring(&c), a);

        let all_true = PartialAssignment::from_values(vec![Some(true); 4]);
        let c = coloring_from_assignment(&all_true);
        assert!(c.colors().iter().all(|&x| x == Some(Color::One)));
    }
}

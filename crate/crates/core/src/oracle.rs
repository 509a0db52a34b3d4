//! Exhaustive ground-truth computations on small instances, plus the
//! linear-time certificate verifiers. Everything here is deliberately
//! plain enumeration so it stays independent of the solver and colorer
//! implementations it is used to check.

use std::collections::BTreeSet;

use crate::error::OracleError;
use crate::hypergraph::{
    edge_bichromatic, Color, ColoringCertificate, EdgeId, Hypergraph, PartialColoring, VertexId,
};
use crate::nae::{NaeCertificate, NaeInstance, PartialAssignment, VarId};

/// Default cap on exhaustive enumeration: 2^24 assignments.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 24;

fn check_limit(count: usize, limit: usize) -> Result<(), OracleError> {
    if count > limit {
        Err(OracleError::TooLarge { count, limit })
    } else {
        Ok(())
    }
}

fn assignment_from_mask(n: usize, mask: u64) -> PartialAssignment {
    PartialAssignment::from_values((0..n).map(|v| Some(mask >> v & 1 == 1)).collect())
}

/// True when some total assignment gives every clause both a true and a
/// false literal. Enumerates all `2^n` assignments in mask order.
pub fn is_nae_satisfiable(i: &NaeInstance, limit: usize) -> Result<bool, OracleError> {
    check_limit(i.var_count(), limit)?;
    let n = i.var_count();
    for mask in 0..1u64 << n {
        let a = assignment_from_mask(n, mask);
        if i.clauses().iter().all(|c| c.nae_satisfied_by(&a)) {
            return Ok(true);
        }
    }
    Ok(i.clause_count() == 0)
}

/// Exact free-variable enumeration for an instance.
#[derive(Clone, Debug)]
pub struct FreeVariableReport {
    pub satisfiable: bool,
    pub free_variables: Vec<VarId>,
    /// One verifying certificate per entry of `free_variables`.
    pub witnesses: Vec<NaeCertificate>,
}

/// A variable is free when some assignment of all the others makes every
/// clause nae-satisfied without it. Checked by enumerating the `2^(n-1)`
/// assignments of the other variables.
pub fn free_variables(i: &NaeInstance, limit: usize) -> Result<FreeVariableReport, OracleError> {
    check_limit(i.var_count(), limit)?;
    let n = i.var_count();
    let mut free_variables = Vec::new();
    let mut witnesses = Vec::new();
    for v in 0..n {
        let others: Vec<VarId> = (0..n).filter(|&w| w != v).collect();
        'masks: for mask in 0..1u64 << others.len() {
            let mut a = PartialAssignment::unassigned(n);
            for (bit, &w) in others.iter().enumerate() {
                a.set(w, Some(mask >> bit & 1 == 1));
            }
            for clause in i.clauses() {
                if !clause.nae_satisfied_without(&a, v) {
                    continue 'masks;
                }
            }
            free_variables.push(v);
            witnesses.push(NaeCertificate {
                assignment: a,
                free_var: Some(v),
            });
            break;
        }
    }
    Ok(FreeVariableReport {
        satisfiable: is_nae_satisfiable(i, limit)?,
        free_variables,
        witnesses,
    })
}

/// Exact free-vertex enumeration for a hypergraph; the size-1 special
/// case of [`free_sets`] with witnesses.
#[derive(Clone, Debug)]
pub struct FreeVertexReport {
    pub colorable: bool,
    pub free_vertices: Vec<VertexId>,
    pub witnesses: Vec<ColoringCertificate>,
}

fn coloring_from_mask(vertices: &[VertexId], n: usize, mask: u64) -> PartialColoring {
    let mut c = PartialColoring::uncolored(n);
    for (bit, &v) in vertices.iter().enumerate() {
        c.set(
            v,
            Some(if mask >> bit & 1 == 0 {
                Color::One
            } else {
                Color::Two
            }),
        );
    }
    c
}

/// Searches all colorings of `V \ skip` for one where every edge sees
/// both colors among colored vertices.
fn find_coloring_without(h: &Hypergraph, skip: &BTreeSet<VertexId>) -> Option<PartialColoring> {
    let vertices: Vec<VertexId> = (0..h.vertex_count())
        .filter(|v| !skip.contains(v))
        .collect();
    // An edge entirely inside the skipped set can never see a color.
    if h.edges().iter().any(|e| e.iter().all(|v| skip.contains(v))) {
        return None;
    }
    for mask in 0..1u64 << vertices.len() {
        let c = coloring_from_mask(&vertices, h.vertex_count(), mask);
        if h.all_edges_bichromatic(&c) {
            return Some(c);
        }
    }
    None
}

pub fn free_vertices(h: &Hypergraph, limit: usize) -> Result<FreeVertexReport, OracleError> {
    check_limit(h.vertex_count(), limit)?;
    let mut free_vertices = Vec::new();
    let mut witnesses = Vec::new();
    for v in 0..h.vertex_count() {
        if let Some(c) = find_coloring_without(h, &BTreeSet::from([v])) {
            free_vertices.push(v);
            witnesses.push(ColoringCertificate {
                coloring: c,
                free_vertex: Some(v),
            });
        }
    }
    let colorable = find_coloring_without(h, &BTreeSet::new()).is_some();
    Ok(FreeVertexReport {
        colorable,
        free_vertices,
        witnesses,
    })
}

/// All vertex sets of the given size whose removal from the coloring
/// domain still lets every edge see both colors.
pub fn free_sets(
    h: &Hypergraph,
    size: usize,
    limit: usize,
) -> Result<Vec<Vec<VertexId>>, OracleError> {
    check_limit(h.vertex_count(), limit)?;
    let n = h.vertex_count();
    let mut out = Vec::new();
    let mut subset: Vec<VertexId> = (0..size).collect();
    if size > n {
        return Ok(out);
    }
    loop {
        let skip: BTreeSet<VertexId> = subset.iter().copied().collect();
        if find_coloring_without(h, &skip).is_some() {
            out.push(subset.clone());
        }
        // Next lexicographic k-subset of 0..n.
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if subset[i] != i + n - size {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..size {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Why a certificate failed verification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VerifyReason {
    LengthMismatch { expected: usize, actual: usize },
    FreeOutOfRange { index: usize },
    FreeElementAssigned { index: usize },
    UnassignedNonFree { index: usize },
    ClauseNotNae { clause: usize },
    EdgeNotBichromatic { edge: usize },
}

impl std::fmt::Display for VerifyReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyReason::LengthMismatch { expected, actual } => {
                write!(
                    f,
                    "certificate covers {actual} elements, instance has {expected}"
                )
            }
            VerifyReason::FreeOutOfRange { index } => {
                write!(f, "free element {index} out of range")
            }
            VerifyReason::FreeElementAssigned { index } => {
                write!(f, "free element {index} carries a value")
            }
            VerifyReason::UnassignedNonFree { index } => {
                write!(f, "non-free element {index} is unassigned")
            }
            VerifyReason::ClauseNotNae { clause } => {
                write!(f, "clause {clause} lacks a true or a false literal")
            }
            VerifyReason::EdgeNotBichromatic { edge } => {
                write!(f, "edge {edge} does not see both colors")
            }
        }
    }
}

/// Verification verdict. The boolean is the contract; the reasons are
/// advisory diagnostics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verification {
    pub ok: bool,
    pub reasons: Vec<VerifyReason>,
}

impl Verification {
    fn from_reasons(reasons: Vec<VerifyReason>) -> Self {
        Verification {
            ok: reasons.is_empty(),
            reasons,
        }
    }
}

/// Checks a nae certificate against an instance by a linear scan: shape,
/// the free-variable invariants, and that every clause has both a true
/// and a false assigned literal.
pub fn verify_nae_certificate(i: &NaeInstance, cert: &NaeCertificate) -> Verification {
    let mut reasons = Vec::new();
    if cert.assignment.len() != i.var_count() {
        reasons.push(VerifyReason::LengthMismatch {
            expected: i.var_count(),
            actual: cert.assignment.len(),
        });
        return Verification::from_reasons(reasons);
    }
    match cert.free_var {
        Some(v) if v >= i.var_count() => {
            reasons.push(VerifyReason::FreeOutOfRange { index: v });
            return Verification::from_reasons(reasons);
        }
        Some(v) => {
            if cert.assignment.get(v).is_some() {
                reasons.push(VerifyReason::FreeElementAssigned { index: v });
            }
            for w in 0..i.var_count() {
                if w != v && cert.assignment.get(w).is_none() {
                    reasons.push(VerifyReason::UnassignedNonFree { index: w });
                }
            }
        }
        None => {
            for w in 0..i.var_count() {
                if cert.assignment.get(w).is_none() {
                    reasons.push(VerifyReason::UnassignedNonFree { index: w });
                }
            }
        }
    }
    for (c, clause) in i.clauses().iter().enumerate() {
        if !clause.nae_satisfied_by(&cert.assignment) {
            reasons.push(VerifyReason::ClauseNotNae { clause: c });
        }
    }
    Verification::from_reasons(reasons)
}

/// Checks a coloring certificate: shape, the free-vertex invariants, and
/// that every edge sees both colors among its colored vertices.
pub fn verify_coloring_certificate(h: &Hypergraph, cert: &ColoringCertificate) -> Verification {
    let mut reasons = Vec::new();
    if cert.coloring.len() != h.vertex_count() {
        reasons.push(VerifyReason::LengthMismatch {
            expected: h.vertex_count(),
            actual: cert.coloring.len(),
        });
        return Verification::from_reasons(reasons);
    }
    match cert.free_vertex {
        Some(v) if v >= h.vertex_count() => {
            reasons.push(VerifyReason::FreeOutOfRange { index: v });
            return Verification::from_reasons(reasons);
        }
        Some(v) => {
            if cert.coloring.get(v).is_some() {
                reasons.push(VerifyReason::FreeElementAssigned { index: v });
            }
            for w in 0..h.vertex_count() {
                if w != v && cert.coloring.get(w).is_none() {
                    reasons.push(VerifyReason::UnassignedNonFree { index: w });
                }
            }
        }
        None => {
            for w in 0..h.vertex_count() {
                if cert.coloring.get(w).is_none() {
                    reasons.push(VerifyReason::UnassignedNonFree { index: w });
                }
            }
        }
    }
    for (e, edge) in h.edges().iter().enumerate() {
        if !edge_bichromatic(edge, &cert.coloring) {
            reasons.push(VerifyReason::EdgeNotBichromatic { edge: e });
        }
    }
    Verification::from_reasons(reasons)
}

/// Vertices that are the unique vertex of their color in some scanned
/// edge. Edges listed in `excluded` are skipped; every scanned edge must
/// see both colors among its colored vertices.
pub fn fixed_vertices(
    h: &Hypergraph,
    c: &PartialColoring,
    excluded: &[EdgeId],
) -> Result<BTreeSet<VertexId>, OracleError> {
    let excluded: BTreeSet<EdgeId> = excluded.iter().copied().collect();
    let mut fixed = BTreeSet::new();
    for (e, edge) in h.edges().iter().enumerate() {
        if excluded.contains(&e) {
            continue;
        }
        let mut ones = Vec::new();
        let mut twos = Vec::new();
        for &v in edge {
            match c.get(v) {
                Some(Color::One) => ones.push(v),
                Some(Color::Two) => twos.push(v),
                None => {}
            }
        }
        if ones.is_empty() || twos.is_empty() {
            return Err(OracleError::InvalidColoring { edge: e });
        }
        if ones.len() == 1 {
            fixed.insert(ones[0]);
        }
        if twos.len() == 1 {
            fixed.insert(twos[0]);
        }
    }
    Ok(fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::instance_from_hypergraph;
    use crate::gen;
    use crate::nae::{Clause, Literal};

    const LIMIT: usize = DEFAULT_EXHAUSTIVE_LIMIT;

    fn clause(a: i64, b: i64, c: i64) -> Clause {
        let lit = |v: i64| {
            if v < 0 {
                Literal::neg((-v - 1) as usize)
            } else {
                Literal::pos((v - 1) as usize)
            }
        };
        Clause::new([lit(a), lit(b), lit(c)]).unwrap()
    }

    #[test]
    fn fano_instance_is_not_nae_satisfiable() {
        let i = instance_from_hypergraph(&gen::fano(), true).unwrap();
        assert!(!is_nae_satisfiable(&i, LIMIT).unwrap());
    }

    #[test]
    fn empty_and_single_clause_instances_are_satisfiable() {
        let empty = NaeInstance::new(2, vec![]).unwrap();
        assert!(is_nae_satisfiable(&empty, LIMIT).unwrap());
        let single = NaeInstance::new(3, vec![clause(1, 2, 3)]).unwrap();
        assert!(is_nae_satisfiable(&single, LIMIT).unwrap());
    }

    #[test]
    fn limit_is_enforced() {
        let i = NaeInstance::new(30, vec![]).unwrap();
        assert!(matches!(
            is_nae_satisfiable(&i, LIMIT),
            Err(OracleError::TooLarge {
                count: 30,
                limit: 24
            })
        ));
    }

    #[test]
    fn single_clause_has_three_free_variables() {
        let i = NaeInstance::new(3, vec![clause(1, 2, 3)]).unwrap();
        let report = free_variables(&i, LIMIT).unwrap();
        assert_eq!(report.free_variables, vec![0, 1, 2]);
        for w in &report.witnesses {
            assert!(verify_nae_certificate(&i, w).ok);
        }
    }

    #[test]
    fn fano_instance_has_no_free_variable() {
        let i = instance_from_hypergraph(&gen::fano(), true).unwrap();
        let report = free_variables(&i, LIMIT).unwrap();
        assert!(!report.satisfiable);
        assert!(report.free_variables.is_empty());
    }

    #[test]
    fn prop_family_one_has_exactly_one_free_variable() {
        let i = gen::proposition_family(1).unwrap();
        let report = free_variables(&i, LIMIT).unwrap();
        assert_eq!(report.free_variables, vec![0]);
    }

    #[test]
    fn verify_accepts_the_two_variable_witness() {
        // Both clauses of the smallest extremal instance hold once the
        // second and third variables take opposite values.
        let i = gen::proposition_family(1).unwrap();
        let cert = NaeCertificate {
            assignment: PartialAssignment::from_values(vec![None, Some(true), Some(false)]),
            free_var: Some(0),
        };
        assert!(verify_nae_certificate(&i, &cert).ok);
    }

    #[test]
    fn verify_rejects_assigned_free_element() {
        let i = gen::proposition_family(1).unwrap();
        let cert = NaeCertificate {
            assignment: PartialAssignment::from_values(vec![Some(true), Some(true), Some(false)]),
            free_var: Some(0),
        };
        let v = verify_nae_certificate(&i, &cert);
        assert!(!v.ok);
        assert!(v
            .reasons
            .contains(&VerifyReason::FreeElementAssigned { index: 0 }));
    }

    #[test]
    fn verify_rejects_monochromatic_edge() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let cert = ColoringCertificate {
            coloring: PartialColoring::from_colors(vec![
                Some(Color::One),
                Some(Color::One),
                Some(Color::One),
            ]),
            free_vertex: None,
        };
        let v = verify_coloring_certificate(&h, &cert);
        assert!(!v.ok);
        assert_eq!(
            v.reasons,
            vec![VerifyReason::EdgeNotBichromatic { edge: 0 }]
        );
    }

    #[test]
    fn complement_of_fano_free_sets() {
        let h = gen::complement(&gen::fano());
        let singles = free_sets(&h, 1, LIMIT).unwrap();
        assert_eq!(singles, (0..7).map(|v| vec![v]).collect::<Vec<_>>());
        let pairs = free_sets(&h, 2, LIMIT).unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn complete_five_four_has_no_free_pair() {
        let h = gen::complete_uniform(5, 4).unwrap();
        let pairs = free_sets(&h, 2, LIMIT).unwrap();
        assert!(pairs.is_empty());
        let singles = free_sets(&h, 1, LIMIT).unwrap();
        assert_eq!(singles.len(), 5);
    }

    #[test]
    fn fixed_vertices_on_single_edges() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let c = PartialColoring::from_colors(vec![
            Some(Color::One),
            Some(Color::One),
            Some(Color::Two),
        ]);
        assert_eq!(fixed_vertices(&h, &c, &[]).unwrap(), BTreeSet::from([2]));
        let c = PartialColoring::from_colors(vec![
            Some(Color::One),
            Some(Color::Two),
            Some(Color::Two),
        ]);
        assert_eq!(fixed_vertices(&h, &c, &[]).unwrap(), BTreeSet::from([0]));
    }

    #[test]
    fn fixed_vertices_rejects_monochromatic_edge() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let c = PartialColoring::from_colors(vec![
            Some(Color::Two),
            Some(Color::Two),
            Some(Color::Two),
        ]);
        assert!(matches!(
            fixed_vertices(&h, &c, &[]),
            Err(OracleError::InvalidColoring { edge: 0 })
        ));
        assert!(fixed_vertices(&h, &c, &[0]).unwrap().is_empty());
    }
}

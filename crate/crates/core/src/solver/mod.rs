//! Constructive solver for bounded-degree NAE-3-SAT: given a connected
//! non-trivial instance with fewer clauses than variables and maximum
//! degree 3, produces a nae-satisfying assignment with a designated free
//! variable, in time polynomial in the instance size.
//!
//! The solver recurses on strictly smaller clause counts. Each level
//! removes a low-degree variable together with its clauses, sometimes
//! adding a bridging clause or substituting a literal so the recursion
//! hypotheses are preserved, then extends the sub-solution to the deleted
//! variable. Structural facts the reduction relies on are asserted at
//! runtime; a violation reports [`SolverError::Internal`] and indicates a
//! bug, never bad input.

mod trace;

pub use trace::{CaseLabel, ReductionStep, ReductionTrace};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::error::ModelError;
use crate::nae::{
    Clause, ClauseId, Literal, NaeCertificate, NaeInstance, PartialAssignment, VarId,
};
use crate::oracle;

/// One of the four requirements on solver inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    NonTrivial,
    Connected,
    FewerClausesThanVars,
    MaxDegreeThree,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hypothesis::NonTrivial => "instance must contain at least one variable",
            Hypothesis::Connected => "instance must be connected",
            Hypothesis::FewerClausesThanVars => "clause count must be less than variable count",
            Hypothesis::MaxDegreeThree => "every variable must have degree at most 3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("precondition violated: {0}")]
    Precondition(Hypothesis),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<ModelError> for SolverError {
    fn from(e: ModelError) -> Self {
        SolverError::Internal(format!("surgery failed: {e}"))
    }
}

/// Checks the four input requirements, reporting the first that fails.
pub fn check_hypotheses(i: &NaeInstance) -> Result<(), Hypothesis> {
    if i.var_count() == 0 {
        return Err(Hypothesis::NonTrivial);
    }
    if !i.is_connected() {
        return Err(Hypothesis::Connected);
    }
    if i.clause_count() >= i.var_count() {
        return Err(Hypothesis::FewerClausesThanVars);
    }
    if i.max_degree() > 3 {
        return Err(Hypothesis::MaxDegreeThree);
    }
    Ok(())
}

/// The value for a degree-2 variable `v` with clauses `{v, l1, l2}` and
/// `{v, l3, _}` that makes both clauses nae, given the truth values of
/// the three literals. `None` for the two combinations that a bridging
/// clause `{l1, l2, !l3}` rules out.
pub fn table1_value(l1: bool, l2: bool, l3: bool) -> Option<bool> {
    match (l1, l2, l3) {
        (true, true, true) => Some(false),
        (true, true, false) => None,
        (true, false, true) => Some(false),
        (true, false, false) => Some(true),
        (false, true, true) => Some(false),
        (false, true, false) => Some(true),
        (false, false, true) => None,
        (false, false, false) => Some(true),
    }
}

/// Negates the assigned values of the listed variables; unassigned slots
/// stay unassigned. The nae-status of any clause whose variables all lie
/// in `vars` is preserved.
pub fn flip_component(a: &PartialAssignment, vars: &[VarId]) -> PartialAssignment {
    let mut out = a.clone();
    flip_vars(&mut out, vars);
    out
}

fn flip_vars(a: &mut PartialAssignment, vars: &[VarId]) {
    for &v in vars {
        if let Some(value) = a.get(v) {
            a.set(v, Some(!value));
        }
    }
}

/// A verified certificate together with the reduction trace that
/// produced it.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub certificate: NaeCertificate,
    pub trace: ReductionTrace,
}

/// Produces a nae-satisfying assignment with exactly one free variable.
/// Deterministic: identical inputs yield identical certificates and
/// traces. The result is re-verified before returning.
pub fn solve_free(i: &NaeInstance) -> Result<SolveOutcome, SolverError> {
    let (result, trace) = solve_free_with_trace(i);
    result.map(|certificate| SolveOutcome { certificate, trace })
}

/// Like [`solve_free`], but also hands back the reduction steps taken so
/// far when the solve fails, for diagnostics.
pub fn solve_free_with_trace(
    i: &NaeInstance,
) -> (Result<NaeCertificate, SolverError>, ReductionTrace) {
    let mut trace = ReductionTrace::default();
    if let Err(h) = check_hypotheses(i) {
        return (Err(SolverError::Precondition(h)), trace);
    }
    match recurse(i, 0, &mut trace) {
        Ok((assignment, free)) => {
            let certificate = NaeCertificate {
                assignment,
                free_var: Some(free),
            };
            let verdict = oracle::verify_nae_certificate(i, &certificate);
            if !verdict.ok {
                let reasons = verdict
                    .reasons
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join("; ");
                return (
                    Err(SolverError::Internal(format!(
                        "produced certificate failed verification: {reasons}"
                    ))),
                    trace,
                );
            }
            (Ok(certificate), trace)
        }
        Err(e) => (Err(e), trace),
    }
}

fn internal<T>(msg: impl Into<String>) -> Result<T, SolverError> {
    Err(SolverError::Internal(msg.into()))
}

fn require(cond: bool, msg: &str) -> Result<(), SolverError> {
    if cond {
        Ok(())
    } else {
        internal(msg)
    }
}

/// Recursion entry for derived instances: the construction must preserve
/// the hypotheses, so a violation here is an internal error.
fn recurse_checked(
    i: &NaeInstance,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    if let Err(h) = check_hypotheses(i) {
        return internal(format!("derived instance violates hypothesis: {h}"));
    }
    recurse(i, depth, trace)
}

/// Returns an assignment over the variables of `i` with exactly one
/// unassigned variable, the returned free one, such that every clause
/// has both a true and a false literal among the assigned ones.
fn recurse(
    i: &NaeInstance,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let (a, free) = dispatch(i, depth, trace)?;
    #[cfg(debug_assertions)]
    {
        let cert = NaeCertificate {
            assignment: a.clone(),
            free_var: Some(free),
        };
        let verdict = oracle::verify_nae_certificate(i, &cert);
        if !verdict.ok {
            return internal(format!(
                "level {depth} produced an invalid partial certificate: {}",
                verdict
                    .reasons
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            ));
        }
    }
    Ok((a, free))
}

fn dispatch(
    i: &NaeInstance,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    if i.clause_count() == 0 {
        require(
            n == 1,
            "connected instance without clauses must be a single variable",
        )?;
        trace.push(ReductionStep::new(depth, CaseLabel::Base));
        return Ok((PartialAssignment::unassigned(1), 0));
    }

    let degrees = i.degrees();
    if let Some(v) = (0..n).find(|&v| degrees[v] <= 1) {
        require(
            degrees[v] == 1,
            "connected instance with clauses has no isolated variable",
        )?;
        return reduce_degree_one(i, v, depth, trace);
    }

    let v = match (0..n).find(|&v| degrees[v] == 2) {
        Some(v) => v,
        None => {
            // All degrees 3 would force 3|C| = 3|V|, contradicting |C| < |V|.
            return internal("no variable of degree 2 despite |C| < |V|");
        }
    };
    reduce_degree_two(i, v, depth, trace)
}

/// Removes a degree-1 variable `v` and its clause. If the rest stays
/// connected, recurse and give `v` the value opposite to an assigned
/// companion literal. If it splits, solve both halves totally and flip
/// one so the companion literals disagree, leaving `v` itself free.
fn reduce_degree_one(
    i: &NaeInstance,
    v: VarId,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    let containing = i.clauses_with(v);
    require(
        containing.len() == 1,
        "degree-1 variable must have exactly one clause",
    )?;
    let c = containing[0];
    let clause = *i.clause(c);

    if clause.vars().iter().all(|&x| i.degree(x) == 1) {
        // A single clause on three degree-1 variables is the whole
        // connected instance: satisfy it with the other two literals and
        // leave v free.
        require(
            i.clause_count() == 1 && n == 3,
            "three degree-1 variables imply |C|=1, |V|=3",
        )?;
        trace.push(ReductionStep::new(depth, CaseLabel::Base));
        let mut a = PartialAssignment::unassigned(n);
        let others: Vec<Literal> = clause
            .literals()
            .iter()
            .copied()
            .filter(|l| l.var != v)
            .collect();
        a.set(others[0].var, Some(others[0].value_for(true)));
        a.set(others[1].var, Some(others[1].value_for(false)));
        return Ok((a, v));
    }

    let mut step = ReductionStep::new(depth, CaseLabel::AConnected);
    step.deleted_clauses = vec![c];
    step.deleted_vars = vec![v];
    let (reduced, translation) = step.apply(i)?;
    let comps = reduced.components();

    let companions: Vec<Literal> = clause
        .literals()
        .iter()
        .copied()
        .filter(|l| l.var != v)
        .collect();
    let (x1, x2) = (companions[0], companions[1]);

    if comps.len() == 1 {
        trace.push(step);
        let (sub, sub_free) = recurse_checked(&reduced, depth + 1, trace)?;
        let mut a = translation.lift_assignment(&sub, n);
        let free = translation.parent_var(sub_free);
        // At most one companion is the sub-solve's free variable; oppose
        // the first assigned one in clause order.
        let anchor = [x1, x2]
            .into_iter()
            .find(|l| a.get(l.var).is_some())
            .ok_or_else(|| SolverError::Internal("both companions unassigned".into()))?;
        let anchor_value = a.eval(anchor).expect("anchor is assigned");
        let lit_v = clause.literal_of(v).expect("v is in its clause");
        a.set(v, Some(lit_v.value_for(!anchor_value)));
        return Ok((a, free));
    }

    require(
        comps.len() == 2,
        "deleting a degree-1 variable splits into at most two components",
    )?;
    step.case = CaseLabel::ASplit;
    trace.push(step);

    let mut a = PartialAssignment::unassigned(n);
    let mut component_vars: Vec<Vec<VarId>> = Vec::new();
    for comp in &comps {
        let (sub, sub_t) = reduced.induced(comp);
        let full = translation.compose(&sub_t);
        let (sa, sf) = recurse_checked(&sub, depth + 1, trace)?;
        for (child, &parent) in full.vars().iter().enumerate() {
            a.set(parent, sa.get(child));
        }
        // The sub-solve's free variable is not needed here; assign it.
        a.set(full.parent_var(sf), Some(true));
        component_vars.push(full.vars().to_vec());
    }

    let find_comp = |x: VarId| {
        component_vars
            .iter()
            .position(|vs| vs.binary_search(&x).is_ok())
    };
    let c1 = find_comp(x1.var);
    let c2 = find_comp(x2.var);
    require(
        c1.is_some() && c2.is_some() && c1 != c2,
        "split components must separate the two companion variables",
    )?;
    if a.eval(x1) == a.eval(x2) {
        flip_vars(&mut a, &component_vars[c2.unwrap()]);
    }
    require(
        a.eval(x1) != a.eval(x2),
        "companion literals must disagree after the flip",
    )?;
    Ok((a, v))
}

/// Removes a degree-2 variable, dispatching on how many variables its
/// two clauses span.
fn reduce_degree_two(
    i: &NaeInstance,
    v: VarId,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let containing = i.clauses_with(v);
    require(
        containing.len() == 2,
        "degree-2 variable must have exactly two clauses",
    )?;
    let (c1, c2) = (containing[0], containing[1]);
    let mut span: BTreeSet<VarId> = i.clause(c1).vars().into_iter().collect();
    span.extend(i.clause(c2).vars());
    match span.len() {
        5 => reduce_span_five(i, v, c1, c2, depth, trace),
        4 => reduce_span_four(i, v, c1, c2, depth, trace),
        3 => solve_q3(i, v, c1, c2, depth, trace),
        _ => internal("two clauses through one variable span 3 to 5 variables"),
    }
}

/// The literal of `var` in `clause`, with polarity flipped when the
/// whole clause was normalized.
fn normalized_literal(clause: &Clause, var: VarId, flip: bool) -> Literal {
    let lit = clause.literal_of(var).expect("variable is in the clause");
    Literal {
        var: lit.var,
        negated: lit.negated != flip,
    }
}

fn other_vars(clause: &Clause, v: VarId) -> Vec<VarId> {
    clause.vars().into_iter().filter(|&x| x != v).collect()
}

/// `|Q| = 5`: the clauses share only `v`. Either the removal leaves four
/// components, one per companion, which are solved independently and
/// flipped to satisfy both clauses with `v` free; or a bridging clause
/// ties three companions together and the recursion's answer is extended
/// through the truth table.
fn reduce_span_five(
    i: &NaeInstance,
    v: VarId,
    c1: ClauseId,
    c2: ClauseId,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    let (reduced, translation) = i.without(&[c1, c2], &[v])?;
    let comps = reduced.components();
    require(
        comps.len() <= 4,
        "companions bound the component count by four",
    )?;

    if comps.len() == 4 {
        let mut step = ReductionStep::new(depth, CaseLabel::C4Comp);
        step.deleted_clauses = vec![c1.min(c2), c1.max(c2)];
        step.deleted_vars = vec![v];
        trace.push(step);

        let mut a = PartialAssignment::unassigned(n);
        let mut component_vars: Vec<Vec<VarId>> = Vec::new();
        for comp in &comps {
            let (sub, sub_t) = reduced.induced(comp);
            let full = translation.compose(&sub_t);
            let (sa, sf) = recurse_checked(&sub, depth + 1, trace)?;
            for (child, &parent) in full.vars().iter().enumerate() {
                a.set(parent, sa.get(child));
            }
            a.set(full.parent_var(sf), Some(true));
            component_vars.push(full.vars().to_vec());
        }
        let find_comp = |x: VarId| {
            component_vars
                .iter()
                .position(|vs| vs.binary_search(&x).is_ok())
        };

        // Each clause is nae without v once its two companion literals
        // disagree; the companions sit in distinct components, so one
        // side can be flipped wholesale.
        for &c in &[c1, c2] {
            let clause = i.clause(c);
            let others = other_vars(clause, v);
            let l_first = clause.literal_of(others[0]).expect("companion in clause");
            let l_second = clause.literal_of(others[1]).expect("companion in clause");
            let comp_first = find_comp(l_first.var);
            let comp_second = find_comp(l_second.var);
            require(
                comp_first.is_some() && comp_second.is_some() && comp_first != comp_second,
                "the four companions must sit in four distinct components",
            )?;
            if a.eval(l_first) == a.eval(l_second) {
                flip_vars(&mut a, &component_vars[comp_second.unwrap()]);
            }
            require(
                a.eval(l_first) != a.eval(l_second),
                "companion literals must disagree after the flip",
            )?;
        }
        return Ok((a, v));
    }

    // Choose clause roles and companion names so the fourth companion
    // shares a component with one of the other three; with at most three
    // components such a labeling always exists.
    let comp_index = {
        let mut by_var = vec![usize::MAX; n];
        for (idx, comp) in comps.iter().enumerate() {
            for &cv in &comp.vars {
                by_var[translation.parent_var(cv)] = idx;
            }
        }
        by_var
    };
    let mut labeling: Option<(ClauseId, ClauseId, VarId, VarId, VarId, VarId)> = None;
    'search: for (ca, cb) in [(c1, c2), (c2, c1)] {
        let a_vars = other_vars(i.clause(ca), v);
        let b_vars = other_vars(i.clause(cb), v);
        for (q3, q4) in [(b_vars[0], b_vars[1]), (b_vars[1], b_vars[0])] {
            let target = comp_index[q4];
            if target == comp_index[q3]
                || target == comp_index[a_vars[0]]
                || target == comp_index[a_vars[1]]
            {
                labeling = Some((ca, cb, a_vars[0], a_vars[1], q3, q4));
                break 'search;
            }
        }
    }
    let Some((ca, cb, q1, q2, q3, q4)) = labeling else {
        return internal("no companion labeling links the fourth companion");
    };

    let flip_a = i.clause(ca).literal_of(v).expect("v in clause").negated;
    let flip_b = i.clause(cb).literal_of(v).expect("v in clause").negated;
    let l1 = normalized_literal(i.clause(ca), q1, flip_a);
    let l2 = normalized_literal(i.clause(ca), q2, flip_a);
    let l3 = normalized_literal(i.clause(cb), q3, flip_b);
    let l4 = normalized_literal(i.clause(cb), q4, flip_b);

    let mut step = ReductionStep::new(depth, CaseLabel::CMain);
    step.deleted_clauses = vec![ca.min(cb), ca.max(cb)];
    step.deleted_vars = vec![v];
    step.added_clause = Some(Clause::new([l1, l2, l3.negate()])?);
    if flip_a {
        step.flipped_clauses.push(ca);
    }
    if flip_b {
        step.flipped_clauses.push(cb);
    }
    let (child, child_t) = step.apply(i)?;
    trace.push(step);
    require(
        child.clause_count() == i.clause_count() - 1 && child.var_count() == n - 1,
        "bridged instance must lose exactly one clause and one variable",
    )?;
    let (sa, sf) = recurse_checked(&child, depth + 1, trace)?;
    let mut a = child_t.lift_assignment(&sa, n);
    let free = child_t.parent_var(sf);

    let value = |a: &PartialAssignment, l: Literal| -> Result<bool, SolverError> {
        a.eval(l)
            .ok_or_else(|| SolverError::Internal("required literal unassigned".into()))
    };
    if free == q1 {
        let v2 = value(&a, l2)?;
        require(
            v2 == value(&a, l3)?,
            "freeing the first companion forces l2 = l3",
        )?;
        a.set(v, Some(!v2));
    } else if free == q2 {
        let v1 = value(&a, l1)?;
        require(
            v1 == value(&a, l3)?,
            "freeing the second companion forces l1 = l3",
        )?;
        a.set(v, Some(!v1));
    } else if free == q3 {
        require(
            value(&a, l1)? != value(&a, l2)?,
            "freeing the third companion forces l1 != l2",
        )?;
        a.set(v, Some(!value(&a, l4)?));
    } else {
        let t = table1_value(value(&a, l1)?, value(&a, l2)?, value(&a, l3)?);
        let Some(t) = t else {
            return internal("bridging clause excludes the impossible table rows");
        };
        a.set(v, Some(t));
    }
    Ok((a, free))
}

/// `|Q| = 4`: the clauses share `v` and one companion. A bridging clause
/// on the three companions replaces them; the recursion's free variable
/// decides how `v` is set.
fn reduce_span_four(
    i: &NaeInstance,
    v: VarId,
    c1: ClauseId,
    c2: ClauseId,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    let o1 = other_vars(i.clause(c1), v);
    let o2 = other_vars(i.clause(c2), v);
    let shared: Vec<VarId> = o1.iter().copied().filter(|x| o2.contains(x)).collect();
    require(
        shared.len() == 1,
        "four spanned variables mean exactly one shared companion",
    )?;
    let q1 = shared[0];
    let q2 = o1
        .into_iter()
        .find(|&x| x != q1)
        .expect("clause has another companion");
    let q3 = o2
        .into_iter()
        .find(|&x| x != q1)
        .expect("clause has another companion");

    let flip_a = i.clause(c1).literal_of(v).expect("v in clause").negated;
    let flip_b = i.clause(c2).literal_of(v).expect("v in clause").negated;
    let l1 = normalized_literal(i.clause(c1), q1, flip_a);
    let l2 = normalized_literal(i.clause(c1), q2, flip_a);
    let l3 = normalized_literal(i.clause(c2), q3, flip_b);
    let m1 = normalized_literal(i.clause(c2), q1, flip_b);

    let mut step = ReductionStep::new(depth, CaseLabel::D);
    step.deleted_clauses = vec![c1.min(c2), c1.max(c2)];
    step.deleted_vars = vec![v];
    step.added_clause = Some(Clause::new([l1, l2, l3.negate()])?);
    if flip_a {
        step.flipped_clauses.push(c1);
    }
    if flip_b {
        step.flipped_clauses.push(c2);
    }
    let (child, child_t) = step.apply(i)?;
    trace.push(step);
    require(
        child.clause_count() == i.clause_count() - 1 && child.var_count() == n - 1,
        "bridged instance must lose exactly one clause and one variable",
    )?;
    let (sa, sf) = recurse_checked(&child, depth + 1, trace)?;
    let mut a = child_t.lift_assignment(&sa, n);
    let free = child_t.parent_var(sf);

    let value = |a: &PartialAssignment, l: Literal| -> Result<bool, SolverError> {
        a.eval(l)
            .ok_or_else(|| SolverError::Internal("required literal unassigned".into()))
    };
    if free == q1 {
        let v2 = value(&a, l2)?;
        require(
            v2 == value(&a, l3)?,
            "freeing the shared companion forces l2 = l3",
        )?;
        a.set(v, Some(!v2));
    } else if free == q2 {
        let v1 = value(&a, l1)?;
        require(
            v1 == value(&a, l3)?,
            "freeing the first companion forces l1 = l3",
        )?;
        a.set(v, Some(!v1));
    } else if free == q3 {
        require(
            value(&a, l1)? != value(&a, l2)?,
            "freeing the second companion forces l1 != l2",
        )?;
        a.set(v, Some(!value(&a, m1)?));
    } else {
        let t = table1_value(value(&a, l1)?, value(&a, l2)?, value(&a, l3)?);
        let Some(t) = t else {
            return internal("bridging clause excludes the impossible table rows");
        };
        a.set(v, Some(t));
    }
    Ok((a, free))
}

/// Per-variable polarity agreement between two clauses on the same three
/// variables, after normalizing the first clause so that at least two
/// slots agree.
struct SlotMatches {
    flip_first: bool,
    agrees: [bool; 3],
}

fn slot_matches(first: &Clause, second: &Clause, vars: [VarId; 3]) -> SlotMatches {
    let raw: Vec<bool> = vars
        .iter()
        .map(|&x| {
            first.literal_of(x).expect("var in clause").negated
                == second.literal_of(x).expect("var in clause").negated
        })
        .collect();
    let flip_first = raw.iter().filter(|&&m| m).count() <= 1;
    SlotMatches {
        flip_first,
        agrees: [
            raw[0] != flip_first,
            raw[1] != flip_first,
            raw[2] != flip_first,
        ],
    }
}

/// Solves the two-clause core on `{v, q1, q2}` in isolation: the variable
/// whose slot polarity differs between the clauses (or `v` when all three
/// agree) is free, and the other two take values making both clauses
/// nae. Returns the free variable and the two assignments.
fn solve_two_clause_core(
    first: &Clause,
    second: &Clause,
    v: VarId,
    q1: VarId,
    q2: VarId,
) -> Result<(VarId, [(VarId, bool); 2]), SolverError> {
    let m = slot_matches(first, second, [v, q1, q2]);
    let agree_count = m.agrees.iter().filter(|&&x| x).count();
    require(
        agree_count >= 2,
        "normalization leaves at least two agreeing slots",
    )?;
    let vars = [v, q1, q2];
    let free = if agree_count == 3 {
        v
    } else {
        vars[m
            .agrees
            .iter()
            .position(|&x| !x)
            .expect("one slot disagrees")]
    };
    let assigned: Vec<VarId> = vars.into_iter().filter(|&x| x != free).collect();
    let lit = |x: VarId| second.literal_of(x).expect("var in clause");
    Ok((
        free,
        [
            (assigned[0], lit(assigned[0]).value_for(true)),
            (assigned[1], lit(assigned[1]).value_for(false)),
        ],
    ))
}

/// `|Q| = 3`: both clauses of `v` sit on `{v, q1, q2}`. Either that is
/// the whole instance and the two-clause core solves it, or a third
/// clause through a companion drives one of the substitution reductions.
fn solve_q3(
    i: &NaeInstance,
    v: VarId,
    c1: ClauseId,
    c2: ClauseId,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    let others = other_vars(i.clause(c1), v);
    let (mut q1, mut q2) = (others[0], others[1]);
    require(
        i.clause(c2).contains_var(q1) && i.clause(c2).contains_var(q2),
        "both clauses span the same three variables",
    )?;

    if n == 3 && i.clause_count() == 2 {
        let mut step = ReductionStep::new(depth, CaseLabel::EOnly);
        let matches = slot_matches(i.clause(c1), i.clause(c2), [v, q1, q2]);
        if matches.flip_first {
            step.flipped_clauses.push(c1);
        }
        trace.push(step);
        let (free, values) = solve_two_clause_core(i.clause(c1), i.clause(c2), v, q1, q2)?;
        let mut a = PartialAssignment::unassigned(n);
        for (x, value) in values {
            a.set(x, Some(value));
        }
        return Ok((a, free));
    }

    // A connected instance larger than the core has a third clause
    // through q1 or q2; name q2 so that clause contains it.
    let c3 = (0..i.clause_count()).find(|&c| {
        c != c1 && c != c2 && (i.clause(c).contains_var(q1) || i.clause(c).contains_var(q2))
    });
    let Some(c3) = c3 else {
        return internal("no third clause through a companion of the core");
    };
    if !i.clause(c3).contains_var(q2) {
        std::mem::swap(&mut q1, &mut q2);
    }

    if i.clause(c3).contains_var(q1) {
        return solve_q3_shared_third(i, v, q1, q2, c1, c2, c3, depth, trace);
    }

    let matches = slot_matches(i.clause(c1), i.clause(c2), [v, q1, q2]);
    let [agree_v, agree_q1, agree_q2] = matches.agrees;
    if agree_q1 && agree_q2 {
        solve_q3_both_agree(i, v, q1, q2, c1, c2, c3, matches.flip_first, depth, trace)
    } else {
        require(
            agree_v && (agree_q1 != agree_q2),
            "two agreeing slots with a companion mismatch pin the shape",
        )?;
        solve_q3_one_agrees(i, v, q1, q2, c1, c2, c3, &matches, depth, trace)
    }
}

/// The third clause contains both companions. Delete the core and the
/// third clause outright, solve the rest totally, satisfy the core with
/// the two-clause solution, and flip the remainder wholesale if the third
/// clause needs it.
#[allow(clippy::too_many_arguments)]
fn solve_q3_shared_third(
    i: &NaeInstance,
    v: VarId,
    q1: VarId,
    q2: VarId,
    c1: ClauseId,
    c2: ClauseId,
    c3: ClauseId,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    let q3 = i
        .clause(c3)
        .vars()
        .into_iter()
        .find(|&x| x != q1 && x != q2)
        .expect("third clause has a third variable");
    require(
        q3 != v,
        "the degree-2 variable sits in the two core clauses only",
    )?;

    let mut step = ReductionStep::new(depth, CaseLabel::F);
    let mut dc = vec![c1, c2, c3];
    dc.sort_unstable();
    step.deleted_clauses = dc;
    let mut dv = vec![v, q1, q2];
    dv.sort_unstable();
    step.deleted_vars = dv;
    let (child, child_t) = step.apply(i)?;
    trace.push(step);

    let (sa, sf) = recurse_checked(&child, depth + 1, trace)?;
    let mut a = child_t.lift_assignment(&sa, n);
    a.set(child_t.parent_var(sf), Some(true));

    let (free, values) = solve_two_clause_core(i.clause(c1), i.clause(c2), v, q1, q2)?;
    for (x, value) in values {
        a.set(x, Some(value));
    }
    let anchor = if free != q1 { q1 } else { q2 };
    let lit_anchor = i
        .clause(c3)
        .literal_of(anchor)
        .expect("anchor in third clause");
    let lit_q3 = i.clause(c3).literal_of(q3).expect("q3 in third clause");
    let anchor_value = a
        .eval(lit_anchor)
        .ok_or_else(|| SolverError::Internal("anchor unassigned".into()))?;
    if a.eval(lit_q3) == Some(anchor_value) {
        let child_vars: Vec<VarId> = child_t.vars().to_vec();
        flip_vars(&mut a, &child_vars);
    }
    require(
        a.eval(lit_q3) == Some(!anchor_value),
        "third clause literals must disagree after the flip",
    )?;
    Ok((a, free))
}

/// Both companion slots agree between the core clauses, so `v` can stay
/// free: substitute the first companion for the second in the third
/// clause, solve, and copy the second companion's value from the first
/// with matching parity.
#[allow(clippy::too_many_arguments)]
fn solve_q3_both_agree(
    i: &NaeInstance,
    v: VarId,
    q1: VarId,
    q2: VarId,
    c1: ClauseId,
    c2: ClauseId,
    c3: ClauseId,
    flip_first: bool,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    let one_negated = i.clause(c2).literal_of(q1).expect("q1 in clause").negated
        != i.clause(c2).literal_of(q2).expect("q2 in clause").negated;
    let slot = i.clause(c3).slot_of(q2).expect("q2 in third clause");
    let polarity = i
        .clause(c3)
        .literal_of(q2)
        .expect("q2 in third clause")
        .negated;
    let replacement = Literal {
        var: q1,
        negated: if one_negated { polarity } else { !polarity },
    };

    let mut step = ReductionStep::new(depth, CaseLabel::G);
    step.substitution = Some((c3, slot, replacement));
    step.deleted_clauses = vec![c1.min(c2), c1.max(c2)];
    let mut dv = vec![v, q2];
    dv.sort_unstable();
    step.deleted_vars = dv;
    if flip_first {
        step.flipped_clauses.push(c1);
    }
    let (child, child_t) = step.apply(i)?;
    trace.push(step);
    require(
        child.clause_count() == i.clause_count() - 2 && child.var_count() == n - 2,
        "substitution instance must lose two clauses and two variables",
    )?;

    let (sa, sf) = recurse_checked(&child, depth + 1, trace)?;
    let mut a = child_t.lift_assignment(&sa, n);
    a.set(child_t.parent_var(sf), Some(true));
    let q1_value = a
        .get(q1)
        .ok_or_else(|| SolverError::Internal("first companion unassigned".into()))?;
    a.set(q2, Some(if one_negated { q1_value } else { !q1_value }));
    Ok((a, v))
}

/// Exactly one companion slot agrees between the core clauses (plus the
/// `v` slot). Substitute with matching parity and finish according to
/// whether the recursion freed the surviving companion.
#[allow(clippy::too_many_arguments)]
fn solve_q3_one_agrees(
    i: &NaeInstance,
    v: VarId,
    q1: VarId,
    q2: VarId,
    c1: ClauseId,
    c2: ClauseId,
    c3: ClauseId,
    matches: &SlotMatches,
    depth: usize,
    trace: &mut ReductionTrace,
) -> Result<(PartialAssignment, VarId), SolverError> {
    let n = i.var_count();
    let [_, agree_q1, agree_q2] = matches.agrees;
    let slot = i.clause(c3).slot_of(q2).expect("q2 in third clause");
    let polarity = i
        .clause(c3)
        .literal_of(q2)
        .expect("q2 in third clause")
        .negated;
    let replacement = Literal {
        var: q1,
        negated: polarity,
    };

    let mut step = ReductionStep::new(depth, CaseLabel::GFinal);
    step.substitution = Some((c3, slot, replacement));
    step.deleted_clauses = vec![c1.min(c2), c1.max(c2)];
    let mut dv = vec![v, q2];
    dv.sort_unstable();
    step.deleted_vars = dv;
    if matches.flip_first {
        step.flipped_clauses.push(c1);
    }
    let (child, child_t) = step.apply(i)?;
    trace.push(step);
    require(
        child.clause_count() == i.clause_count() - 2 && child.var_count() == n - 2,
        "substitution instance must lose two clauses and two variables",
    )?;

    let (sa, sf) = recurse_checked(&child, depth + 1, trace)?;
    let mut a = child_t.lift_assignment(&sa, n);
    let free_up = child_t.parent_var(sf);
    let second = i.clause(c2);
    let lit = |x: VarId| second.literal_of(x).expect("var in second core clause");

    if free_up == q1 {
        // The surviving companion stays free exactly when the other
        // companion's slot agrees; otherwise the deleted companion is
        // freed instead and the survivor takes a value.
        if agree_q2 {
            a.set(v, Some(lit(v).value_for(true)));
            a.set(q2, Some(lit(q2).value_for(false)));
            Ok((a, q1))
        } else {
            a.set(v, Some(lit(v).value_for(true)));
            a.set(q1, Some(lit(q1).value_for(false)));
            Ok((a, q2))
        }
    } else {
        let q1_value = a
            .get(q1)
            .ok_or_else(|| SolverError::Internal("first companion unassigned".into()))?;
        a.set(q2, Some(q1_value));
        let matched = if agree_q1 { q1 } else { q2 };
        let matched_value = a.eval(lit(matched)).expect("matched companion is assigned");
        a.set(v, Some(lit(v).value_for(!matched_value)));
        Ok((a, free_up))
    }
}

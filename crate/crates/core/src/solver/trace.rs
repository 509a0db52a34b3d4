//! Reduction traces: one step per recursion level, recording the case
//! taken and the surgery performed, in the index space of the instance
//! the step was applied to. Replaying a step's edits reproduces the
//! instance the solver recursed on (split cases additionally take
//! components of the edited instance).

use std::fmt;

use crate::error::ModelError;
use crate::nae::{Clause, ClauseId, InstanceTranslation, Literal, NaeInstance, VarId};

/// Which reduction the solver applied at one recursion level.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CaseLabel {
    /// No clauses, or a single clause on three degree-1 variables.
    Base,
    /// Degree-1 variable whose removal keeps the instance connected.
    AConnected,
    /// Degree-1 variable whose removal splits the instance in two.
    ASplit,
    /// Degree-2 variable, clauses sharing only it, removal leaving four
    /// components.
    C4Comp,
    /// Degree-2 variable, clauses sharing only it, bridged recursion.
    CMain,
    /// Degree-2 variable, clauses sharing one further variable.
    D,
    /// Degree-2 variable whose two clauses form the whole instance.
    EOnly,
    /// Two-clause variable set extended by a clause on both companions.
    F,
    /// Companion slots agree in both clauses; variable substitution.
    G,
    /// Exactly one companion slot agrees; variable substitution.
    GFinal,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::Base => "Base",
            CaseLabel::AConnected => "A-connected",
            CaseLabel::ASplit => "A-split",
            CaseLabel::C4Comp => "C-4comp",
            CaseLabel::CMain => "C-main",
            CaseLabel::D => "D",
            CaseLabel::EOnly => "E-only",
            CaseLabel::F => "F",
            CaseLabel::G => "G",
            CaseLabel::GFinal => "G-final",
        };
        f.write_str(s)
    }
}

/// The surgery performed at one recursion level. All indices refer to the
/// instance the step applies to; `added_clause` names surviving
/// variables of that same space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionStep {
    pub depth: usize,
    pub case: CaseLabel,
    /// Clauses whose literals were all negated for the analysis. The
    /// instance itself is never mutated; not-all-equal status is
    /// invariant under the flip, so replay ignores these.
    pub flipped_clauses: Vec<ClauseId>,
    /// A single literal replacement applied before the deletions.
    pub substitution: Option<(ClauseId, usize, Literal)>,
    pub deleted_clauses: Vec<ClauseId>,
    pub deleted_vars: Vec<VarId>,
    pub added_clause: Option<Clause>,
}

impl ReductionStep {
    pub fn new(depth: usize, case: CaseLabel) -> Self {
        ReductionStep {
            depth,
            case,
            flipped_clauses: Vec::new(),
            substitution: None,
            deleted_clauses: Vec::new(),
            deleted_vars: Vec::new(),
            added_clause: None,
        }
    }

    /// Applies the step's edits, producing the derived instance and the
    /// translation back to `i`.
    pub fn apply(&self, i: &NaeInstance) -> Result<(NaeInstance, InstanceTranslation), ModelError> {
        let mut instance = i.clone();
        let mut translation = InstanceTranslation::identity(i.var_count(), i.clause_count());
        if let Some((c, slot, lit)) = self.substitution {
            let (next, t) = instance.substitute_literal(c, slot, lit)?;
            instance = next;
            translation = translation.compose(&t);
        }
        let (next, t) = instance.without(&self.deleted_clauses, &self.deleted_vars)?;
        instance = next;
        translation = translation.compose(&t);
        if let Some(clause) = self.added_clause {
            let lits = clause.literals().map(|l| Literal {
                var: translation
                    .child_var(l.var)
                    .expect("added clause names surviving variables"),
                negated: l.negated,
            });
            let (next, t) = instance.add_clause(Clause::new(lits)?)?;
            instance = next;
            translation = translation.compose(&t);
        }
        Ok((instance, translation))
    }

    fn fmt_ids(ids: &[usize]) -> String {
        if ids.is_empty() {
            "-".to_string()
        } else {
            ids.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    pub fn dump_line(&self, n: usize) -> String {
        let added = match &self.added_clause {
            Some(c) => c.to_string(),
            None => "-".to_string(),
        };
        format!(
            "STEP {n} CASE {} DEL-C {} DEL-V {} ADD-C {added}",
            self.case,
            Self::fmt_ids(&self.deleted_clauses),
            Self::fmt_ids(&self.deleted_vars),
        )
    }
}

/// Depth-first ordered list of the reductions taken during one solve.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub max_depth: usize,
}

impl ReductionTrace {
    pub fn push(&mut self, step: ReductionStep) {
        self.max_depth = self.max_depth.max(step.depth);
        self.steps.push(step);
    }

    pub fn case_histogram(&self) -> std::collections::BTreeMap<CaseLabel, usize> {
        let mut out = std::collections::BTreeMap::new();
        for step in &self.steps {
            *out.entry(step.case).or_insert(0) += 1;
        }
        out
    }

    pub fn dump(&self) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(n, s)| s.dump_line(n))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

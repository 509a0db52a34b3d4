//! NAE-3-SAT instances: literals, clauses, partial assignments, structural
//! queries (degrees, associated graph, components) and the surgery
//! primitives used by the solver's reductions.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::ModelError;
use crate::union_find::UnionFind;

/// Dense variable identifier, `0..var_count`.
pub type VarId = usize;
/// Position of a clause within an instance's clause list.
pub type ClauseId = usize;

/// A variable or its negation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: VarId) -> Self {
        Literal { var, negated: true }
    }

    /// The same variable with the opposite polarity.
    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Truth value of the literal when its variable has value `value`.
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }

    /// The variable value that makes this literal evaluate to `target`.
    pub fn value_for(self, target: bool) -> bool {
        target != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.var + 1)
        } else {
            write!(f, "{}", self.var + 1)
        }
    }
}

/// Exactly three literals over pairwise distinct variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    literals: [Literal; 3],
}

impl Clause {
    pub fn new(literals: [Literal; 3]) -> Result<Self, ModelError> {
        for i in 0..3 {
            for j in i + 1..3 {
                if literals[i].var == literals[j].var {
                    return Err(ModelError::RepeatedVariable {
                        var: literals[i].var,
                    });
                }
            }
        }
        Ok(Clause { literals })
    }

    pub fn literals(&self) -> &[Literal; 3] {
        &self.literals
    }

    pub fn vars(&self) -> [VarId; 3] {
        [
            self.literals[0].var,
            self.literals[1].var,
            self.literals[2].var,
        ]
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.literals.iter().any(|l| l.var == v)
    }

    pub fn slot_of(&self, v: VarId) -> Option<usize> {
        self.literals.iter().position(|l| l.var == v)
    }

    pub fn literal_of(&self, v: VarId) -> Option<Literal> {
        self.literals.iter().copied().find(|l| l.var == v)
    }

    /// The clause with every literal negated. Not-all-equal status is
    /// invariant under this transformation.
    pub fn negated_all(&self) -> Clause {
        Clause {
            literals: [
                self.literals[0].negate(),
                self.literals[1].negate(),
                self.literals[2].negate(),
            ],
        }
    }

    /// True when the assigned literals include both a true and a false one.
    pub fn nae_satisfied_by(&self, a: &PartialAssignment) -> bool {
        let mut seen_true = false;
        let mut seen_false = false;
        for lit in &self.literals {
            if let Some(value) = a.get(lit.var) {
                if lit.eval(value) {
                    seen_true = true;
                } else {
                    seen_false = true;
                }
            }
        }
        seen_true && seen_false
    }

    /// Like [`Clause::nae_satisfied_by`], but ignores literals of `skip`.
    pub fn nae_satisfied_without(&self, a: &PartialAssignment, skip: VarId) -> bool {
        let mut seen_true = false;
        let mut seen_false = false;
        for lit in &self.literals {
            if lit.var == skip {
                continue;
            }
            if let Some(value) = a.get(lit.var) {
                if lit.eval(value) {
                    seen_true = true;
                } else {
                    seen_false = true;
                }
            }
        }
        seen_true && seen_false
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.literals[0], self.literals[1], self.literals[2]
        )
    }
}

/// Truth values with an explicit unassigned state, one slot per variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    pub fn unassigned(var_count: usize) -> Self {
        PartialAssignment {
            values: vec![None; var_count],
        }
    }

    pub fn from_values(values: Vec<Option<bool>>) -> Self {
        PartialAssignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.values[v]
    }

    pub fn set(&mut self, v: VarId, value: Option<bool>) {
        self.values[v] = value;
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|v| v.is_some())
    }

    pub fn unassigned_vars(&self) -> Vec<VarId> {
        (0..self.values.len())
            .filter(|&v| self.values[v].is_none())
            .collect()
    }

    pub fn eval(&self, lit: Literal) -> Option<bool> {
        self.get(lit.var).map(|value| lit.eval(value))
    }
}

/// A nae-satisfying partial assignment together with its designated free
/// variable. With `free_var` present, that variable is the only unassigned
/// one and every clause holds without it; with `free_var` absent the
/// assignment is total.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NaeCertificate {
    pub assignment: PartialAssignment,
    pub free_var: Option<VarId>,
}

/// A component of an instance: the variables of one connectivity class of
/// the associated graph, plus the clauses whose variables lie in it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InstanceComponent {
    pub vars: Vec<VarId>,
    pub clauses: Vec<ClauseId>,
}

/// Maps variable and clause indices of a derived instance back to the
/// instance it was produced from. Variable maps are strictly increasing,
/// so parent-to-child lookups can binary search. Clauses introduced by the
/// derivation (rather than inherited) map to `None`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InstanceTranslation {
    var_to_parent: Vec<VarId>,
    clause_to_parent: Vec<Option<ClauseId>>,
}

impl InstanceTranslation {
    pub fn new(var_to_parent: Vec<VarId>, clause_to_parent: Vec<Option<ClauseId>>) -> Self {
        debug_assert!(var_to_parent.windows(2).all(|w| w[0] < w[1]));
        InstanceTranslation {
            var_to_parent,
            clause_to_parent,
        }
    }

    pub fn identity(var_count: usize, clause_count: usize) -> Self {
        InstanceTranslation {
            var_to_parent: (0..var_count).collect(),
            clause_to_parent: (0..clause_count).map(Some).collect(),
        }
    }

    pub fn parent_var(&self, v: VarId) -> VarId {
        self.var_to_parent[v]
    }

    pub fn parent_clause(&self, c: ClauseId) -> Option<ClauseId> {
        self.clause_to_parent[c]
    }

    pub fn vars(&self) -> &[VarId] {
        &self.var_to_parent
    }

    pub fn child_var(&self, parent: VarId) -> Option<VarId> {
        self.var_to_parent.binary_search(&parent).ok()
    }

    pub fn child_clause(&self, parent: ClauseId) -> Option<ClauseId> {
        self.clause_to_parent
            .iter()
            .position(|&c| c == Some(parent))
    }

    /// Translation from a grandchild directly to this translation's parent.
    /// `self` maps child to parent, `inner` maps grandchild to child.
    pub fn compose(&self, inner: &InstanceTranslation) -> InstanceTranslation {
        InstanceTranslation {
            var_to_parent: inner
                .var_to_parent
                .iter()
                .map(|&v| self.var_to_parent[v])
                .collect(),
            clause_to_parent: inner
                .clause_to_parent
                .iter()
                .map(|&c| c.and_then(|c| self.clause_to_parent[c]))
                .collect(),
        }
    }

    /// Copies a child-space assignment into parent index space. Parent
    /// variables without a child counterpart stay unassigned.
    pub fn lift_assignment(
        &self,
        child: &PartialAssignment,
        parent_var_count: usize,
    ) -> PartialAssignment {
        let mut out = PartialAssignment::unassigned(parent_var_count);
        for (v, &parent) in self.var_to_parent.iter().enumerate() {
            out.set(parent, child.get(v));
        }
        out
    }
}

/// An instance of NAE-3-SAT: a variable count and a multiset of clauses.
/// Duplicate clauses are permitted and count separately everywhere.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NaeInstance {
    var_count: usize,
    clauses: Vec<Clause>,
}

impl NaeInstance {
    pub fn new(var_count: usize, clauses: Vec<Clause>) -> Result<Self, ModelError> {
        for clause in &clauses {
            for lit in clause.literals() {
                if lit.var >= var_count {
                    return Err(ModelError::VarOutOfRange {
                        var: lit.var,
                        count: var_count,
                    });
                }
            }
        }
        Ok(NaeInstance { var_count, clauses })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, c: ClauseId) -> &Clause {
        &self.clauses[c]
    }

    /// Number of clauses containing the variable, negated or not.
    /// Duplicate clauses each count.
    pub fn degree(&self, v: VarId) -> usize {
        self.clauses.iter().filter(|c| c.contains_var(v)).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.var_count];
        for clause in &self.clauses {
            for var in clause.vars() {
                out[var] += 1;
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn clauses_with(&self, v: VarId) -> Vec<ClauseId> {
        (0..self.clauses.len())
            .filter(|&c| self.clauses[c].contains_var(v))
            .collect()
    }

    /// Adjacency sets of the associated graph: two variables are adjacent
    /// when some clause contains both, in either polarity.
    pub fn associated_graph(&self) -> Vec<BTreeSet<VarId>> {
        let mut adj = vec![BTreeSet::new(); self.var_count];
        for clause in &self.clauses {
            let vars = clause.vars();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        adj[vars[i]].insert(vars[j]);
                    }
                }
            }
        }
        adj
    }

    /// Connectivity classes of the associated graph, ordered by smallest
    /// contained variable. Isolated variables form clause-free singletons.
    pub fn components(&self) -> Vec<InstanceComponent> {
        let mut uf = UnionFind::new(self.var_count);
        for clause in &self.clauses {
            let vars = clause.vars();
            uf.union(vars[0], vars[1]);
            uf.union(vars[0], vars[2]);
        }
        let mut comp_vars: Vec<Vec<VarId>> = Vec::new();
        let mut root_to_comp = vec![usize::MAX; self.var_count];
        for v in 0..self.var_count {
            let root = uf.find(v);
            if root_to_comp[root] == usize::MAX {
                root_to_comp[root] = comp_vars.len();
                comp_vars.push(Vec::new());
            }
            comp_vars[root_to_comp[root]].push(v);
        }
        let mut components: Vec<InstanceComponent> = comp_vars
            .into_iter()
            .map(|vars| InstanceComponent {
                vars,
                clauses: Vec::new(),
            })
            .collect();
        // Iterating variables in order above makes components already
        // ordered by smallest contained index.
        let mut var_to_comp = vec![usize::MAX; self.var_count];
        for (idx, comp) in components.iter().enumerate() {
            for &v in &comp.vars {
                var_to_comp[v] = idx;
            }
        }
        for (c, clause) in self.clauses.iter().enumerate() {
            components[var_to_comp[clause.vars()[0]]].clauses.push(c);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn delete_clause(&self, c: ClauseId) -> (NaeInstance, InstanceTranslation) {
        let mut clauses = self.clauses.clone();
        clauses.remove(c);
        let clause_to_parent = (0..self.clauses.len())
            .filter(|&i| i != c)
            .map(Some)
            .collect();
        (
            NaeInstance {
                var_count: self.var_count,
                clauses,
            },
            InstanceTranslation::new((0..self.var_count).collect(), clause_to_parent),
        )
    }

    /// Removes a variable that occurs in no clause, shifting later indices
    /// down by one.
    pub fn delete_variable(
        &self,
        v: VarId,
    ) -> Result<(NaeInstance, InstanceTranslation), ModelError> {
        if let Some(c) = (0..self.clauses.len()).find(|&c| self.clauses[c].contains_var(v)) {
            return Err(ModelError::DanglingVariable { var: v, clause: c });
        }
        let remap = |w: VarId| if w > v { w - 1 } else { w };
        let clauses = self
            .clauses
            .iter()
            .map(|clause| {
                let l = clause.literals();
                Clause {
                    literals: [
                        Literal {
                            var: remap(l[0].var),
                            negated: l[0].negated,
                        },
                        Literal {
                            var: remap(l[1].var),
                            negated: l[1].negated,
                        },
                        Literal {
                            var: remap(l[2].var),
                            negated: l[2].negated,
                        },
                    ],
                }
            })
            .collect();
        let var_to_parent = (0..self.var_count).filter(|&w| w != v).collect();
        let clause_to_parent = (0..self.clauses.len()).map(Some).collect();
        Ok((
            NaeInstance {
                var_count: self.var_count - 1,
                clauses,
            },
            InstanceTranslation::new(var_to_parent, clause_to_parent),
        ))
    }

    /// Replaces the literal at `slot` of clause `c`. The resulting clause
    /// must still have three distinct variables.
    pub fn substitute_literal(
        &self,
        c: ClauseId,
        slot: usize,
        lit: Literal,
    ) -> Result<(NaeInstance, InstanceTranslation), ModelError> {
        if lit.var >= self.var_count {
            return Err(ModelError::VarOutOfRange {
                var: lit.var,
                count: self.var_count,
            });
        }
        let mut literals = *self.clauses[c].literals();
        literals[slot] = lit;
        let clause = Clause::new(literals)?;
        let mut clauses = self.clauses.clone();
        clauses[c] = clause;
        Ok((
            NaeInstance {
                var_count: self.var_count,
                clauses,
            },
            InstanceTranslation::identity(self.var_count, self.clauses.len()),
        ))
    }

    /// Appends a clause; the new clause has no parent in the translation.
    pub fn add_clause(
        &self,
        clause: Clause,
    ) -> Result<(NaeInstance, InstanceTranslation), ModelError> {
        for lit in clause.literals() {
            if lit.var >= self.var_count {
                return Err(ModelError::VarOutOfRange {
                    var: lit.var,
                    count: self.var_count,
                });
            }
        }
        let mut clauses = self.clauses.clone();
        clauses.push(clause);
        let mut clause_to_parent: Vec<Option<ClauseId>> =
            (0..self.clauses.len()).map(Some).collect();
        clause_to_parent.push(None);
        Ok((
            NaeInstance {
                var_count: self.var_count,
                clauses,
            },
            InstanceTranslation::new((0..self.var_count).collect(), clause_to_parent),
        ))
    }

    /// The sub-instance induced by one component, with dense re-indexing.
    pub fn induced(&self, comp: &InstanceComponent) -> (NaeInstance, InstanceTranslation) {
        let mut child_of = vec![usize::MAX; self.var_count];
        for (i, &v) in comp.vars.iter().enumerate() {
            child_of[v] = i;
        }
        let clauses = comp
            .clauses
            .iter()
            .map(|&c| {
                let l = self.clauses[c].literals();
                Clause {
                    literals: [
                        Literal {
                            var: child_of[l[0].var],
                            negated: l[0].negated,
                        },
                        Literal {
                            var: child_of[l[1].var],
                            negated: l[1].negated,
                        },
                        Literal {
                            var: child_of[l[2].var],
                            negated: l[2].negated,
                        },
                    ],
                }
            })
            .collect();
        (
            NaeInstance {
                var_count: comp.vars.len(),
                clauses,
            },
            InstanceTranslation::new(
                comp.vars.clone(),
                comp.clauses.iter().map(|&c| Some(c)).collect(),
            ),
        )
    }

    /// Deletes a set of clauses and then a set of variables, composing the
    /// two primitive operations. Variables must be dangling after the
    /// clause deletions.
    pub fn without(
        &self,
        clauses: &[ClauseId],
        vars: &[VarId],
    ) -> Result<(NaeInstance, InstanceTranslation), ModelError> {
        let mut instance = self.clone();
        let mut translation = InstanceTranslation::identity(self.var_count, self.clauses.len());
        let mut cs: Vec<ClauseId> = clauses.to_vec();
        cs.sort_unstable();
        cs.dedup();
        for &c in cs.iter().rev() {
            let (next, t) = instance.delete_clause(c);
            instance = next;
            translation = translation.compose(&t);
        }
        let mut vs: Vec<VarId> = vars.to_vec();
        vs.sort_unstable();
        vs.dedup();
        for &v in vs.iter().rev() {
            let child = translation
                .child_var(v)
                .expect("variable deleted twice in without()");
            let (next, t) = instance.delete_variable(child)?;
            instance = next;
            translation = translation.compose(&t);
        }
        Ok((instance, translation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i64) -> Literal {
        if v < 0 {
            Literal::neg((-v - 1) as usize)
        } else {
            Literal::pos((v - 1) as usize)
        }
    }

    fn clause(a: i64, b: i64, c: i64) -> Clause {
        Clause::new([lit(a), lit(b), lit(c)]).unwrap()
    }

    #[test]
    fn clause_rejects_repeated_variable() {
        let err = Clause::new([lit(1), lit(-1), lit(2)]).unwrap_err();
        assert!(matches!(err, ModelError::RepeatedVariable { var: 0 }));
    }

    #[test]
    fn degree_counts_duplicate_clauses() {
        let i = NaeInstance::new(3, vec![clause(1, 2, 3), clause(1, 2, 3)]).unwrap();
        assert_eq!(i.degree(0), 2);
        assert_eq!(i.degree(2), 2);
    }

    #[test]
    fn isolated_variable_has_degree_zero() {
        let i = NaeInstance::new(4, vec![clause(1, 2, 3)]).unwrap();
        assert_eq!(i.degree(3), 0);
    }

    #[test]
    fn associated_graph_of_single_clause_is_triangle() {
        let i = NaeInstance::new(3, vec![clause(1, -2, 3)]).unwrap();
        let adj = i.associated_graph();
        assert_eq!(adj[0], BTreeSet::from([1, 2]));
        assert_eq!(adj[1], BTreeSet::from([0, 2]));
        assert_eq!(adj[2], BTreeSet::from([0, 1]));
    }

    #[test]
    fn associated_graph_without_clauses_is_edgeless() {
        let i = NaeInstance::new(3, vec![]).unwrap();
        assert!(i.associated_graph().iter().all(|s| s.is_empty()));
    }

    #[test]
    fn components_of_disjoint_clauses() {
        let i = NaeInstance::new(6, vec![clause(1, 2, 3), clause(4, 5, 6)]).unwrap();
        let comps = i.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].vars, vec![0, 1, 2]);
        assert_eq!(comps[0].clauses, vec![0]);
        assert_eq!(comps[1].vars, vec![3, 4, 5]);
        assert_eq!(comps[1].clauses, vec![1]);
    }

    #[test]
    fn deleting_the_only_clause_leaves_singletons() {
        let i = NaeInstance::new(3, vec![clause(1, 2, 3)]).unwrap();
        let (i2, _) = i.delete_clause(0);
        let comps = i2.components();
        assert_eq!(comps.len(), 3);
        assert!(comps
            .iter()
            .all(|c| c.clauses.is_empty() && c.vars.len() == 1));
    }

    #[test]
    fn delete_variable_requires_dangling() {
        let i = NaeInstance::new(3, vec![clause(1, 2, 3)]).unwrap();
        let err = i.delete_variable(0).unwrap_err();
        assert!(matches!(
            err,
            ModelError::DanglingVariable { var: 0, clause: 0 }
        ));
    }

    #[test]
    fn delete_variable_reindexes() {
        let i = NaeInstance::new(4, vec![clause(1, 3, 4)]).unwrap();
        let (i2, t) = i.delete_variable(1).unwrap();
        assert_eq!(i2.var_count(), 3);
        assert_eq!(i2.clause(0).vars(), [0, 1, 2]);
        assert_eq!(t.parent_var(1), 2);
        assert_eq!(t.child_var(3), Some(2));
        assert_eq!(t.child_var(1), None);
    }

    #[test]
    fn substitute_literal_swaps_one_slot() {
        let i = NaeInstance::new(4, vec![clause(1, 2, 3)]).unwrap();
        let (i2, _) = i.substitute_literal(0, 1, lit(-4)).unwrap();
        assert_eq!(*i2.clause(0).literals(), [lit(1), lit(-4), lit(3)]);
        let err = i.substitute_literal(0, 1, lit(3)).unwrap_err();
        assert!(matches!(err, ModelError::RepeatedVariable { .. }));
    }

    #[test]
    fn translations_compose() {
        let i =
            NaeInstance::new(5, vec![clause(1, 2, 3), clause(3, 4, 5), clause(1, 4, 5)]).unwrap();
        let (i2, t1) = i.delete_clause(0);
        let (i3, t2) = i2.delete_clause(0);
        let composed = t1.compose(&t2);
        assert_eq!(composed.parent_clause(0), Some(2));
        let mut a = PartialAssignment::unassigned(i3.var_count());
        a.set(0, Some(true));
        let lifted = composed.lift_assignment(&a, i.var_count());
        assert_eq!(lifted.get(0), Some(true));

        // Lifting through both steps one at a time matches the composition.
        let step = t2.lift_assignment(&a, i2.var_count());
        let twice = t1.lift_assignment(&step, i.var_count());
        assert_eq!(lifted, twice);
    }

    #[test]
    fn without_composes_primitives() {
        let i =
            NaeInstance::new(5, vec![clause(1, 2, 3), clause(3, 4, 5), clause(2, 3, 4)]).unwrap();
        let (i2, t) = i.without(&[0, 1], &[0, 4]).unwrap();
        assert_eq!(i2.var_count(), 3);
        assert_eq!(i2.clause_count(), 1);
        assert_eq!(i2.clause(0).vars(), [0, 1, 2]);
        assert_eq!(t.vars(), &[1, 2, 3]);
        assert_eq!(t.parent_clause(0), Some(2));
    }
}

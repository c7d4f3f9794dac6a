use std::collections::BTreeSet;
use std::time::Instant;

use super::theory::check_theory;
use crate::error::{Result, WmiError};
use crate::model::assignment::Assignment;
use crate::model::atom::{Atom, Literal};
use crate::model::formula::Formula;

/// Enumeration of the satisfying assignments of a formula modulo the
/// arithmetic/uninterpreted theory, projected onto a subset of its atoms.
///
/// Strategy: depth-first search (positive branch first) over the projection
/// atoms followed by the remaining atoms of `decide_order`, pruning branches
/// that are propositionally or theory-inconsistent. In total mode each
/// consistent projection prefix is emitted as soon as one completion over
/// the remaining atoms exists. In partial mode each found model is shrunk
/// greedily — dropping literals in reverse decision order while the
/// restriction of formula-plus-blocking stays true — then projected and
/// emitted, a blocking clause (the negated emission) is added, and the
/// search restarts.
pub struct Enumerator<'a> {
    formula: &'a Formula,
    decide_order: Vec<Atom>,
    projection: BTreeSet<Atom>,
    blocking: Vec<Formula>,
    pub deadline: Option<Instant>,
}

impl<'a> Enumerator<'a> {
    pub fn new(formula: &'a Formula, decide_order: Vec<Atom>, projection: BTreeSet<Atom>) -> Self {
        debug_assert!(projection.iter().all(|a| decide_order.contains(a)));
        // Keep the projection atoms as a decision prefix, in their given
        // relative order.
        let mut order: Vec<Atom> = decide_order
            .iter()
            .filter(|a| projection.contains(a))
            .cloned()
            .collect();
        order.extend(
            decide_order
                .iter()
                .filter(|a| !projection.contains(a))
                .cloned(),
        );
        Enumerator {
            formula,
            decide_order: order,
            projection,
            blocking: Vec::new(),
            deadline: None,
        }
    }

    fn constraints(&self) -> Formula {
        let mut parts = vec![self.formula.clone()];
        parts.extend(self.blocking.iter().cloned());
        Formula::and(parts)
    }

    fn check_deadline(&self) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Err(WmiError::Timeout);
            }
        }
        Ok(())
    }

    /// One DFS pass for a total consistent assignment of all decide atoms.
    fn find_model(&self, constraints: &Formula) -> Result<Option<Assignment>> {
        let universe: BTreeSet<Atom> = self.decide_order.iter().cloned().collect();
        let mut mu = Assignment::new(universe);
        if self.dfs(constraints, &mut mu, 0)? {
            Ok(Some(mu))
        } else {
            Ok(None)
        }
    }

    fn dfs(&self, constraints: &Formula, mu: &mut Assignment, depth: usize) -> Result<bool> {
        self.check_deadline()?;
        if depth == self.decide_order.len() {
            return Ok(!mu.restrict(constraints).is_false());
        }
        let atom = self.decide_order[depth].clone();
        for value in [true, false] {
            mu.set(atom.clone(), value);
            if self.consistent(constraints, mu, &atom)? && self.dfs(constraints, mu, depth + 1)? {
                return Ok(true);
            }
            mu.unset(&atom);
        }
        Ok(false)
    }

    fn consistent(&self, constraints: &Formula, mu: &Assignment, decided: &Atom) -> Result<bool> {
        if mu.restrict(constraints).is_false() {
            return Ok(false);
        }
        // Deciding a propositional atom cannot change the theory state.
        if decided.is_bool() {
            return Ok(true);
        }
        self.theory_consistent(mu)
    }

    /// Emit every consistent assignment over the projection prefix that has
    /// at least one theory-consistent completion of the remaining atoms.
    /// Emissions are pairwise disjoint by construction, so no blocking
    /// clauses are needed.
    fn total_dfs(
        &self,
        mu: &mut Assignment,
        depth: usize,
        out: &mut Vec<Assignment>,
    ) -> Result<()> {
        self.check_deadline()?;
        if depth == self.projection.len() {
            if self.dfs(self.formula, mu, depth)? {
                out.push(self.project(mu));
                // Undo the completion the satisfiability probe left behind.
                for atom in &self.decide_order[depth..] {
                    mu.unset(atom);
                }
            }
            return Ok(());
        }
        let atom = self.decide_order[depth].clone();
        for value in [true, false] {
            mu.set(atom.clone(), value);
            if self.consistent(self.formula, mu, &atom)? {
                self.total_dfs(mu, depth + 1, out)?;
            }
            mu.unset(&atom);
        }
        Ok(())
    }

    fn theory_consistent(&self, mu: &Assignment) -> Result<bool> {
        let lits: Vec<Literal> = mu
            .iter()
            .filter(|(a, _)| !a.is_bool())
            .map(|(a, v)| (a.clone(), v))
            .collect();
        if lits.is_empty() {
            return Ok(true);
        }
        check_theory(&lits)
    }

    /// Drop literals in reverse decision order while the propositional
    /// restriction of the constraints stays true.
    fn minimize(&self, constraints: &Formula, mu: &Assignment) -> Assignment {
        let mut out = mu.clone();
        for atom in self.decide_order.iter().rev() {
            let Some(v) = out.get(atom) else { continue };
            out.unset(atom);
            if !out.restrict(constraints).is_true() {
                out.set(atom.clone(), v);
            }
        }
        out
    }

    fn project(&self, mu: &Assignment) -> Assignment {
        Assignment::from_literals(
            self.projection.clone(),
            mu.iter()
                .filter(|(a, _)| self.projection.contains(*a))
                .map(|(a, v)| (a.clone(), v)),
        )
    }

    /// Enumerate. `total = true` yields assignments total over the
    /// projection; otherwise minimized partial assignments. Emitted
    /// assignments are pairwise disjoint and jointly cover the projected
    /// models of the formula.
    pub fn run(&mut self, total: bool) -> Result<Vec<Assignment>> {
        let mut out = Vec::new();
        if total {
            let universe: BTreeSet<Atom> = self.decide_order.iter().cloned().collect();
            let mut mu = Assignment::new(universe);
            self.total_dfs(&mut mu, 0, &mut out)?;
            return Ok(out);
        }
        loop {
            let constraints = self.constraints();
            let Some(mu) = self.find_model(&constraints)? else {
                return Ok(out);
            };
            let emitted = if total {
                self.project(&mu)
            } else {
                self.project(&self.minimize(&constraints, &mu))
            };
            // Negation of the emitted assignment blocks exactly its region.
            let clause = Formula::or(
                emitted
                    .iter()
                    .map(|(a, v)| Formula::literal(a.clone(), !v))
                    .collect(),
            );
            self.blocking.push(clause);
            let empty = emitted.is_empty();
            out.push(emitted);
            if empty {
                // The formula is valid over the projection; one emission
                // covers everything.
                return Ok(out);
            }
        }
    }
}

/// Total satisfying assignments over `universe` atoms (theory-consistent).
pub fn all_smt_total(
    formula: &Formula,
    decide_order: Vec<Atom>,
    projection: BTreeSet<Atom>,
) -> Result<Vec<Assignment>> {
    Enumerator::new(formula, decide_order, projection).run(true)
}

/// Minimized partial satisfying assignments over the projection.
pub fn all_smt_partial(
    formula: &Formula,
    decide_order: Vec<Atom>,
    projection: BTreeSet<Atom>,
) -> Result<Vec<Assignment>> {
    Enumerator::new(formula, decide_order, projection).run(false)
}

/// Plain satisfiability of a formula modulo the theory.
pub fn smt_sat(formula: &Formula) -> Result<bool> {
    match formula {
        Formula::True => return Ok(true),
        Formula::False => return Ok(false),
        _ => {}
    }
    let atoms: Vec<Atom> = formula.atoms().into_iter().collect();
    let en = Enumerator::new(formula, atoms, BTreeSet::new());
    Ok(en.find_model(formula)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::atom::{CanonAtom, InputRel};
    use crate::model::linear::LinearTerm;
    use crate::model::vars::{BoolVar, RealVar};
    use crate::rint;

    fn b(name: &str) -> Atom {
        Atom::Bool(BoolVar::new(name))
    }

    fn bf(name: &str) -> Formula {
        Formula::Atom(b(name))
    }

    fn x_minus(k: i64) -> Atom {
        // atom of (x < k), canonical
        let t = &LinearTerm::var(RealVar::new("x")) - &LinearTerm::constant(rint(k));
        match Atom::lra(t, InputRel::Lt) {
            CanonAtom::Lit(a, true) => a,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn total_enumeration_counts_models() {
        // a or b has three total models over {a, b}.
        let f = Formula::or(vec![bf("a"), bf("b")]);
        let atoms = vec![b("a"), b("b")];
        let proj: BTreeSet<Atom> = atoms.iter().cloned().collect();
        let models = all_smt_total(&f, atoms, proj).unwrap();
        assert_eq!(models.len(), 3);
        assert!(models.iter().all(|m| m.is_total()));
        // First model follows positive-first decision order: {a, b}.
        assert_eq!(models[0].get(&b("a")), Some(true));
        assert_eq!(models[0].get(&b("b")), Some(true));
    }

    #[test]
    fn partial_enumeration_is_shorter_and_disjoint() {
        let f = Formula::or(vec![bf("a"), bf("b")]);
        let atoms = vec![b("a"), b("b")];
        let proj: BTreeSet<Atom> = atoms.iter().cloned().collect();
        let models = all_smt_partial(&f, atoms, proj).unwrap();
        // {a} then {~a, b}.
        assert_eq!(models.len(), 2);
        assert_eq!(models[0].to_literals(), vec![(b("a"), true)]);
        assert_eq!(
            models[1].to_literals(),
            vec![(b("a"), false), (b("b"), true)]
        );
    }

    #[test]
    fn theory_inconsistent_totals_are_pruned() {
        // (x < 1) and (x < 2) as atoms: the total {x<1, not x<2} is
        // arithmetically impossible, leaving 3 of 4 combinations.
        let a1 = x_minus(1);
        let a2 = x_minus(2);
        let f = Formula::or(vec![
            Formula::Atom(a1.clone()),
            Formula::not(Formula::Atom(a1.clone())),
        ]);
        let atoms = vec![a1.clone(), a2.clone()];
        let proj: BTreeSet<Atom> = atoms.iter().cloned().collect();
        let models = all_smt_total(&f, atoms, proj).unwrap();
        assert_eq!(models.len(), 3);
        assert!(!models
            .iter()
            .any(|m| m.get(&a1) == Some(true) && m.get(&a2) == Some(false)));
    }

    #[test]
    fn projection_groups_assignments() {
        // (a or b) projected onto {a} yields the two a-polarities once each.
        let f = Formula::or(vec![bf("a"), bf("b")]);
        let atoms = vec![b("a"), b("b")];
        let proj: BTreeSet<Atom> = [b("a")].into_iter().collect();
        let models = all_smt_total(&f, atoms, proj).unwrap();
        assert_eq!(models.len(), 2);
        assert_eq!(models[0].to_literals(), vec![(b("a"), true)]);
        assert_eq!(models[1].to_literals(), vec![(b("a"), false)]);
    }

    #[test]
    fn true_formula_emits_empty_partial() {
        let atoms = vec![b("a")];
        let proj: BTreeSet<Atom> = atoms.iter().cloned().collect();
        let models = all_smt_partial(&Formula::True, atoms, proj).unwrap();
        assert_eq!(models.len(), 1);
        assert!(models[0].is_empty());
    }

    #[test]
    fn tautology_is_not_detected_propositionally() {
        // Minimization is propositional: (or a ~a) still splits on a.
        let f = Formula::or(vec![bf("a"), Formula::not(bf("a"))]);
        let atoms = vec![b("a")];
        let proj: BTreeSet<Atom> = atoms.iter().cloned().collect();
        let models = all_smt_partial(&f, atoms, proj).unwrap();
        assert_eq!(models.len(), 2);
    }

    #[test]
    fn unsat_formula_emits_nothing() {
        let f = Formula::and(vec![bf("a"), Formula::not(bf("a"))]);
        assert!(!smt_sat(&f).unwrap());
        let atoms = vec![b("a")];
        let proj: BTreeSet<Atom> = atoms.iter().cloned().collect();
        assert!(all_smt_total(&f, atoms, proj).unwrap().is_empty());
    }
}

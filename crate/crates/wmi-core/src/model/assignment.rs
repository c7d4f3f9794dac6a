use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::atom::{Atom, Literal};
use super::formula::{restrict_formula, Formula};

/// A (possibly partial) truth assignment to a fixed universe of atoms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Assignment {
    pub literals: BTreeMap<Atom, bool>,
    pub universe: BTreeSet<Atom>,
}

impl Assignment {
    pub fn new(universe: BTreeSet<Atom>) -> Self {
        Assignment {
            literals: BTreeMap::new(),
            universe,
        }
    }

    pub fn from_literals<I: IntoIterator<Item = Literal>>(
        universe: BTreeSet<Atom>,
        lits: I,
    ) -> Self {
        let mut a = Assignment::new(universe);
        for (atom, value) in lits {
            a.set(atom, value);
        }
        a
    }

    pub fn set(&mut self, atom: Atom, value: bool) {
        debug_assert!(self.universe.contains(&atom));
        self.literals.insert(atom, value);
    }

    pub fn unset(&mut self, atom: &Atom) {
        self.literals.remove(atom);
    }

    pub fn get(&self, atom: &Atom) -> Option<bool> {
        self.literals.get(atom).copied()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_total(&self) -> bool {
        self.literals.len() == self.universe.len()
    }

    /// Universe atoms not assigned yet, in order.
    pub fn free_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.universe
            .iter()
            .filter(|a| !self.literals.contains_key(*a))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, bool)> {
        self.literals.iter().map(|(a, v)| (a, *v))
    }

    /// The assignment as a conjunction of its literals.
    pub fn to_formula(&self) -> Formula {
        Formula::and(
            self.literals
                .iter()
                .map(|(a, v)| Formula::literal(a.clone(), *v))
                .collect(),
        )
    }

    /// Restrict a formula by this assignment's literals.
    pub fn restrict(&self, f: &Formula) -> Formula {
        restrict_formula(f, &self.literals)
    }

    /// The literals of this assignment, in atom order.
    pub fn to_literals(&self) -> Vec<Literal> {
        self.literals.iter().map(|(a, v)| (a.clone(), *v)).collect()
    }

    /// True when `other` assigns every literal of `self` identically.
    pub fn subsumed_by(&self, other: &Assignment) -> bool {
        self.literals
            .iter()
            .all(|(a, v)| other.get(a) == Some(*v))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, v)) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if !*v {
                write!(f, "not ")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

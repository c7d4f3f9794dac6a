use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::atom::{Atom, CanonAtom, Literal};

/// Quantifier-free formula over Boolean atoms, arithmetic atoms, and (after
/// skeleton encoding) EUF equalities. Smart constructors keep n-ary
/// conjunctions/disjunctions flattened and never build double negations.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn from_canon(c: CanonAtom) -> Formula {
        match c {
            CanonAtom::Const(true) => Formula::True,
            CanonAtom::Const(false) => Formula::False,
            CanonAtom::Lit(a, true) => Formula::Atom(a),
            CanonAtom::Lit(a, false) => Formula::not(Formula::Atom(a)),
        }
    }

    pub fn literal(a: Atom, positive: bool) -> Formula {
        if positive {
            Formula::Atom(a)
        } else {
            Formula::not(Formula::Atom(a))
        }
    }

    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(children: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for c in children {
            match c {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(children: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for c in children {
            match c {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        match (&a, &b) {
            (Formula::True, _) => b,
            (Formula::False, _) => Formula::True,
            (_, Formula::True) => Formula::True,
            (_, Formula::False) => Formula::not(a),
            _ => Formula::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        match (&a, &b) {
            (Formula::True, _) => b,
            (_, Formula::True) => a,
            (Formula::False, _) => Formula::not(b),
            (_, Formula::False) => Formula::not(a),
            _ => Formula::Iff(Box::new(a), Box::new(b)),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// The literal view of this formula, if it is one.
    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom(a) => Some((a.clone(), true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some((a.clone(), false)),
                _ => None,
            },
            _ => None,
        }
    }

    /// True for `True`, a literal, or a conjunction of literals.
    pub fn is_literal_conjunction(&self) -> bool {
        match self {
            Formula::True => true,
            Formula::And(children) => children.iter().all(|c| c.as_literal().is_some()),
            other => other.as_literal().is_some(),
        }
    }

    /// The literals of a literal conjunction (None otherwise).
    pub fn conjunction_literals(&self) -> Option<Vec<Literal>> {
        match self {
            Formula::True => Some(vec![]),
            Formula::And(children) => children.iter().map(|c| c.as_literal()).collect(),
            other => other.as_literal().map(|l| vec![l]),
        }
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_atoms(out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn contains_bool_atom(&self) -> bool {
        self.atoms().iter().any(|a| a.is_bool())
    }
}

/// Substitute assigned atoms by their truth constants and propagate the
/// constants through the connectives. Unassigned atoms pass through.
pub fn restrict_formula(f: &Formula, mu: &BTreeMap<Atom, bool>) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(a) => match mu.get(a) {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => Formula::Atom(a.clone()),
        },
        Formula::Not(inner) => Formula::not(restrict_formula(inner, mu)),
        Formula::And(fs) => Formula::and(fs.iter().map(|g| restrict_formula(g, mu)).collect()),
        Formula::Or(fs) => Formula::or(fs.iter().map(|g| restrict_formula(g, mu)).collect()),
        Formula::Implies(a, b) => {
            Formula::implies(restrict_formula(a, mu), restrict_formula(b, mu))
        }
        Formula::Iff(a, b) => Formula::iff(restrict_formula(a, mu), restrict_formula(b, mu)),
    }
}

/// Replace atoms by arbitrary formulas, rebuilding through the smart
/// constructors.
pub fn substitute_atoms(f: &Formula, map: &BTreeMap<Atom, Formula>) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(a) => map.get(a).cloned().unwrap_or_else(|| Formula::Atom(a.clone())),
        Formula::Not(inner) => Formula::not(substitute_atoms(inner, map)),
        Formula::And(fs) => Formula::and(fs.iter().map(|g| substitute_atoms(g, map)).collect()),
        Formula::Or(fs) => Formula::or(fs.iter().map(|g| substitute_atoms(g, map)).collect()),
        Formula::Implies(a, b) => {
            Formula::implies(substitute_atoms(a, map), substitute_atoms(b, map))
        }
        Formula::Iff(a, b) => Formula::iff(substitute_atoms(a, map), substitute_atoms(b, map)),
    }
}

/// Equivalence-preserving cleanup: constant propagation, flattening,
/// duplicate-literal removal, and unit absorption inside And/Or. No
/// theory-level reasoning and no tautology elimination.
pub fn simplify(f: &Formula) -> Formula {
    let mut cur = simplify_once(f);
    loop {
        let next = simplify_once(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn simplify_once(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(inner) => Formula::not(simplify_once(inner)),
        Formula::Implies(a, b) => Formula::implies(simplify_once(a), simplify_once(b)),
        Formula::Iff(a, b) => Formula::iff(simplify_once(a), simplify_once(b)),
        Formula::And(fs) => {
            let children: Vec<Formula> = fs.iter().map(simplify_once).collect();
            let flat = Formula::and(children);
            match flat {
                Formula::And(children) => absorb_and(dedup(children)),
                other => other,
            }
        }
        Formula::Or(fs) => {
            let children: Vec<Formula> = fs.iter().map(simplify_once).collect();
            let flat = Formula::or(children);
            match flat {
                Formula::Or(children) => absorb_or(dedup(children)),
                other => other,
            }
        }
    }
}

fn dedup(children: Vec<Formula>) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    children
        .into_iter()
        .filter(|c| seen.insert(c.clone()))
        .collect()
}

/// Inside a conjunction, a unit literal l makes sibling disjunctions
/// containing l redundant and removes ~l from the ones containing it.
fn absorb_and(children: Vec<Formula>) -> Formula {
    let units: BTreeSet<Literal> = children.iter().filter_map(|c| c.as_literal()).collect();
    if units.is_empty() {
        return Formula::and(children);
    }
    let mut out = Vec::new();
    for c in children {
        if c.as_literal().is_some() {
            out.push(c);
            continue;
        }
        if let Formula::Or(disjuncts) = &c {
            let mut kept = Vec::new();
            let mut subsumed = false;
            for d in disjuncts {
                match d.as_literal() {
                    Some(l) if units.contains(&l) => {
                        subsumed = true;
                        break;
                    }
                    Some((a, pol)) if units.contains(&(a.clone(), !pol)) => {}
                    _ => kept.push(d.clone()),
                }
            }
            if !subsumed {
                out.push(Formula::or(kept));
            }
            continue;
        }
        out.push(c);
    }
    Formula::and(out)
}

/// Dual absorption for disjunctions: a sibling conjunction containing the
/// unit literal l is absorbed by l itself, and ~l is removed from
/// conjunctions containing it.
fn absorb_or(children: Vec<Formula>) -> Formula {
    let units: BTreeSet<Literal> = children.iter().filter_map(|c| c.as_literal()).collect();
    if units.is_empty() {
        return Formula::or(children);
    }
    let mut out = Vec::new();
    for c in children {
        if c.as_literal().is_some() {
            out.push(c);
            continue;
        }
        if let Formula::And(conjuncts) = &c {
            let mut kept = Vec::new();
            let mut dropped = false;
            for d in conjuncts {
                match d.as_literal() {
                    Some(l) if units.contains(&l) => {
                        // l or (l and g) == l
                        dropped = true;
                        break;
                    }
                    Some((a, pol)) if units.contains(&(a.clone(), !pol)) => {}
                    _ => kept.push(d.clone()),
                }
            }
            if !dropped {
                out.push(Formula::and(kept));
            }
            continue;
        }
        out.push(c);
    }
    Formula::or(out)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{}", a),
            Formula::Not(inner) => write!(f, "(not {})", inner),
            Formula::And(fs) => {
                write!(f, "(and")?;
                for g in fs {
                    write!(f, " {}", g)?;
                }
                write!(f, ")")
            }
            Formula::Or(fs) => {
                write!(f, "(or")?;
                for g in fs {
                    write!(f, " {}", g)?;
                }
                write!(f, ")")
            }
            Formula::Implies(a, b) => write!(f, "(-> {} {})", a, b),
            Formula::Iff(a, b) => write!(f, "(<-> {} {})", a, b),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

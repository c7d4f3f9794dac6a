use std::fmt;
use std::sync::Arc;

use num::{Signed, Zero};

use super::linear::LinearTerm;
use super::vars::{BoolVar, RealVar, YVar};
use crate::Rat;

/// Canonical relations. `>=`, `>` and `!=` from the input are rewritten to
/// negated literals over `<`, `<=` and `=` atoms, so that the literal
/// algebra stays uniform.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Relation {
    Le,
    Lt,
    Eq,
}

/// An uninterpreted-function symbol introduced by the skeleton encoding.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EufSymbol(pub Arc<str>);

impl EufSymbol {
    pub fn new(name: &str) -> Self {
        EufSymbol(name.into())
    }
}

impl fmt::Display for EufSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for EufSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A term of the EUF fragment: fresh y variables, problem reals, rational
/// constants, and applications of uninterpreted symbols.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ETerm {
    Y(YVar),
    Real(RealVar),
    Num(Rat),
    App(EufSymbol, Vec<ETerm>),
}

impl ETerm {
    /// True when the term contains no uninterpreted application, i.e. it can
    /// also be read as a linear-arithmetic term.
    pub fn is_arith(&self) -> bool {
        !matches!(self, ETerm::App(_, _))
    }
}

impl fmt::Display for ETerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ETerm::Y(y) => write!(f, "{}", y),
            ETerm::Real(x) => write!(f, "{}", x),
            ETerm::Num(c) => write!(f, "{}", c),
            ETerm::App(s, args) => {
                write!(f, "{}(", s)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for ETerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An atomic proposition.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// A Boolean problem variable.
    Bool(BoolVar),
    /// `term rel 0`, with the constant folded into the term. Canonical:
    /// leading coefficient positive and of magnitude one.
    Lra { term: LinearTerm, rel: Relation },
    /// Equality between EUF-fragment terms, sides in canonical order.
    EufEq { lhs: ETerm, rhs: ETerm },
}

/// A literal: an atom with a polarity.
pub type Literal = (Atom, bool);

/// Result of canonicalizing a candidate atom: either a ground truth value or
/// a literal over a canonical atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonAtom {
    Const(bool),
    Lit(Atom, bool),
}

/// Relations as they appear in the input syntax.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InputRel {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl Atom {
    pub fn bool_var(v: BoolVar) -> Atom {
        Atom::Bool(v)
    }

    /// Canonicalize `term (input relation) 0`. Ground terms evaluate to a
    /// constant; `>=`, `>`, `!=` become negated literals over the mirrored
    /// atom; the leading coefficient is normalized to +1.
    pub fn lra(term: LinearTerm, rel: InputRel) -> CanonAtom {
        // Rewrite >=, >, != through negation first.
        let (rel, mut neg) = match rel {
            InputRel::Le => (Relation::Le, false),
            InputRel::Lt => (Relation::Lt, false),
            InputRel::Ge => (Relation::Lt, true),
            InputRel::Gt => (Relation::Le, true),
            InputRel::Eq => (Relation::Eq, false),
            InputRel::Ne => (Relation::Eq, true),
        };
        if term.is_constant() {
            let holds = match rel {
                Relation::Le => !term.constant.is_positive(),
                Relation::Lt => term.constant.is_negative(),
                Relation::Eq => term.constant.is_zero(),
            };
            return CanonAtom::Const(holds != neg);
        }
        let mut term = term.normalized();
        let mut rel = rel;
        if term.leading_coeff().map(|c| c.is_negative()).unwrap_or(false) {
            // Flip the sign of the whole term. For = this is an equivalence;
            // for <= and < it mirrors the relation, absorbed by negation.
            term = -&term;
            match rel {
                Relation::Eq => {}
                Relation::Le => {
                    rel = Relation::Lt;
                    neg = !neg;
                }
                Relation::Lt => {
                    rel = Relation::Le;
                    neg = !neg;
                }
            }
        }
        CanonAtom::Lit(Atom::Lra { term, rel }, !neg)
    }

    /// Canonicalize an EUF equality: sides ordered, arithmetic-only
    /// equalities between identical sides fold to true.
    pub fn euf_eq(a: ETerm, b: ETerm) -> CanonAtom {
        if a == b {
            return CanonAtom::Const(true);
        }
        if let (ETerm::Num(x), ETerm::Num(y)) = (&a, &b) {
            return CanonAtom::Const(x == y);
        }
        let (lhs, rhs) = if a <= b { (a, b) } else { (b, a) };
        CanonAtom::Lit(Atom::EufEq { lhs, rhs }, true)
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Atom::Bool(_))
    }

    pub fn is_lra(&self) -> bool {
        matches!(self, Atom::Lra { .. })
    }

    pub fn is_euf(&self) -> bool {
        matches!(self, Atom::EufEq { .. })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Bool(v) => write!(f, "{}", v),
            Atom::Lra { term, rel } => {
                let op = match rel {
                    Relation::Le => "<=",
                    Relation::Lt => "<",
                    Relation::Eq => "=",
                };
                write!(f, "({} {} 0)", term, op)
            }
            Atom::EufEq { lhs, rhs } => write!(f, "({} = {})", lhs, rhs),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rint};

    fn x() -> RealVar {
        RealVar::new("x")
    }

    fn term(c: i64, k: i64) -> LinearTerm {
        // c*x + k
        let mut t = LinearTerm::constant(rint(k));
        t.add_term(&x(), &rint(c));
        t
    }

    #[test]
    fn ge_becomes_negated_lt_over_same_atom() {
        // x >= 1  ~>  not (x - 1 < 0)
        let a = Atom::lra(term(1, -1), InputRel::Ge);
        let b = Atom::lra(term(1, -1), InputRel::Lt);
        match (a, b) {
            (CanonAtom::Lit(a1, false), CanonAtom::Lit(a2, true)) => assert_eq!(a1, a2),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn canonicalization_is_idempotent() {
        // 2x - 2 <= 0 and x - 1 <= 0 are the same atom.
        let a = Atom::lra(term(2, -2), InputRel::Le);
        let b = Atom::lra(term(1, -1), InputRel::Le);
        assert_eq!(a, b);
        if let CanonAtom::Lit(Atom::Lra { term: t, .. }, _) = a {
            assert_eq!(t.leading_coeff().unwrap(), &rint(1));
            assert_eq!(t.constant, rat(-1, 1));
        } else {
            panic!();
        }
    }

    #[test]
    fn negative_leading_coefficient_is_flipped() {
        // -x + 1 <= 0  (i.e. x >= 1)  ~>  not (x - 1 < 0)
        let a = Atom::lra(term(-1, 1), InputRel::Le);
        let b = Atom::lra(term(1, -1), InputRel::Ge);
        assert_eq!(a, b);
    }

    #[test]
    fn ground_atoms_fold() {
        assert_eq!(
            Atom::lra(LinearTerm::constant(rint(-1)), InputRel::Le),
            CanonAtom::Const(true)
        );
        assert_eq!(
            Atom::lra(LinearTerm::constant(rint(0)), InputRel::Lt),
            CanonAtom::Const(false)
        );
    }
}

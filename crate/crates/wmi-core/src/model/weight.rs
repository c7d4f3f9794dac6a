use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::atom::Atom;
use super::formula::{restrict_formula, Formula};
use super::vars::RealVar;
use crate::Rat;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// A weight expression: rational constants, real variables, the four
/// arithmetic operations, unconditioned function applications, and
/// if-then-else on formulas over the problem atoms. A term with no Ite node
/// is directly integrable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightTerm {
    Const(Rat),
    Var(RealVar),
    BinOp(BinOp, Box<WeightTerm>, Box<WeightTerm>),
    Func(Arc<str>, Vec<WeightTerm>),
    Ite(Formula, Box<WeightTerm>, Box<WeightTerm>),
}

impl WeightTerm {
    pub fn constant(c: Rat) -> Self {
        WeightTerm::Const(c)
    }

    pub fn var(v: RealVar) -> Self {
        WeightTerm::Var(v)
    }

    pub fn binop(op: BinOp, l: WeightTerm, r: WeightTerm) -> Self {
        WeightTerm::BinOp(op, Box::new(l), Box::new(r))
    }

    /// Ite with constant conditions resolved and syntactically identical
    /// branches collapsed.
    pub fn ite(cond: Formula, then: WeightTerm, els: WeightTerm) -> Self {
        match cond {
            Formula::True => then,
            Formula::False => els,
            cond => {
                if then == els {
                    then
                } else {
                    WeightTerm::Ite(cond, Box::new(then), Box::new(els))
                }
            }
        }
    }

    /// No Ite node anywhere: the term is a single integrand.
    pub fn is_fi(&self) -> bool {
        match self {
            WeightTerm::Const(_) | WeightTerm::Var(_) => true,
            WeightTerm::BinOp(_, l, r) => l.is_fi() && r.is_fi(),
            WeightTerm::Func(_, args) => args.iter().all(|a| a.is_fi()),
            WeightTerm::Ite(_, _, _) => false,
        }
    }

    pub fn count_ite(&self) -> usize {
        match self {
            WeightTerm::Const(_) | WeightTerm::Var(_) => 0,
            WeightTerm::BinOp(_, l, r) => l.count_ite() + r.count_ite(),
            WeightTerm::Func(_, args) => args.iter().map(|a| a.count_ite()).sum(),
            WeightTerm::Ite(_, t, e) => 1 + t.count_ite() + e.count_ite(),
        }
    }

    /// All atoms appearing in Ite conditions, at any depth.
    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            WeightTerm::Const(_) | WeightTerm::Var(_) => {}
            WeightTerm::BinOp(_, l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            WeightTerm::Func(_, args) => {
                for a in args {
                    a.collect_atoms(out);
                }
            }
            WeightTerm::Ite(c, t, e) => {
                c.collect_atoms(out);
                t.collect_atoms(out);
                e.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn collect_real_vars(&self, out: &mut BTreeSet<RealVar>) {
        match self {
            WeightTerm::Const(_) => {}
            WeightTerm::Var(v) => {
                out.insert(v.clone());
            }
            WeightTerm::BinOp(_, l, r) => {
                l.collect_real_vars(out);
                r.collect_real_vars(out);
            }
            WeightTerm::Func(_, args) => {
                for a in args {
                    a.collect_real_vars(out);
                }
            }
            WeightTerm::Ite(_, t, e) => {
                t.collect_real_vars(out);
                e.collect_real_vars(out);
            }
        }
    }
}

/// Resolve Ite conditions under a (possibly partial) truth assignment to the
/// atoms. A condition that restricts to a constant selects its branch; the
/// result contains no atom assigned by `mu`.
pub fn restrict_weight(w: &WeightTerm, mu: &BTreeMap<Atom, bool>) -> WeightTerm {
    match w {
        WeightTerm::Const(_) | WeightTerm::Var(_) => w.clone(),
        WeightTerm::BinOp(op, l, r) => {
            WeightTerm::binop(*op, restrict_weight(l, mu), restrict_weight(r, mu))
        }
        WeightTerm::Func(name, args) => WeightTerm::Func(
            name.clone(),
            args.iter().map(|a| restrict_weight(a, mu)).collect(),
        ),
        WeightTerm::Ite(c, t, e) => WeightTerm::ite(
            restrict_formula(c, mu),
            restrict_weight(t, mu),
            restrict_weight(e, mu),
        ),
    }
}

impl fmt::Display for WeightTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightTerm::Const(c) => write!(f, "{}", c),
            WeightTerm::Var(v) => write!(f, "{}", v),
            WeightTerm::BinOp(op, l, r) => write!(f, "({} {} {})", op.symbol(), l, r),
            WeightTerm::Func(name, args) => {
                write!(f, "(func {}", name)?;
                for a in args {
                    write!(f, " {}", a)?;
                }
                write!(f, ")")
            }
            WeightTerm::Ite(c, t, e) => write!(f, "(ite {} {} {})", c, t, e),
        }
    }
}

impl fmt::Debug for WeightTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

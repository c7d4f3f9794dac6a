use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Result, WmiError};
use crate::model::vars::RealVar;
use crate::model::weight::{BinOp, WeightTerm};
use crate::Rat;

/// Exponent vector of one monomial: variable to power, zeros omitted.
pub type Monomial = BTreeMap<RealVar, u32>;

/// A multivariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    pub terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Polynomial::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    pub fn var(v: RealVar) -> Self {
        let mut m = Monomial::new();
        m.insert(v, 1);
        let mut p = Polynomial::zero();
        p.terms.insert(m, Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<&Rat> {
        match self.terms.len() {
            0 => None, // zero handled by the caller via is_zero
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then_some(c)
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (v, e) in mb {
                    *m.entry(v.clone()).or_insert(0) += e;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, k: &Rat) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * k))
                .collect(),
        }
    }

    pub fn eval(&self, values: &BTreeMap<RealVar, Rat>) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let base = &values[v];
                for _ in 0..*e {
                    t *= base;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.values().sum())
            .max()
            .unwrap_or(0)
    }

    /// Expand a weight term into a polynomial. Conditionals must already be
    /// resolved away; division is accepted only by a nonzero constant.
    pub fn from_weight(w: &WeightTerm) -> Result<Polynomial> {
        match w {
            WeightTerm::Const(c) => Ok(Polynomial::constant(c.clone())),
            WeightTerm::Var(v) => Ok(Polynomial::var(v.clone())),
            WeightTerm::BinOp(op, l, r) => {
                let a = Polynomial::from_weight(l)?;
                let b = Polynomial::from_weight(r)?;
                match op {
                    BinOp::Add => Ok(a.add(&b)),
                    BinOp::Sub => Ok(a.sub(&b)),
                    BinOp::Mul => Ok(a.mul(&b)),
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(WmiError::DivisionByZero);
                        }
                        match b.as_constant() {
                            Some(c) => Ok(a.scale(&c.clone().recip())),
                            None => Err(WmiError::NonPolynomialWeight(format!(
                                "division by non-constant {r}"
                            ))),
                        }
                    }
                }
            }
            WeightTerm::Func(name, _) => Err(WmiError::NonPolynomialWeight(format!(
                "uninterpreted function {name}"
            ))),
            WeightTerm::Ite(c, _, _) => Err(WmiError::NonPolynomialWeight(format!(
                "unresolved conditional on {c}"
            ))),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            let unit_coeff = a.is_one() && !m.is_empty();
            if !unit_coeff {
                write!(f, "{}", a)?;
            }
            for (j, (v, e)) in m.iter().enumerate() {
                if j > 0 || !unit_coeff {
                    write!(f, "*")?;
                }
                write!(f, "{}", v)?;
                if *e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
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

    #[test]
    fn expansion_of_weight_terms() {
        // (x + 1) * (x - 1) = x^2 - 1
        let w = WeightTerm::binop(
            BinOp::Mul,
            WeightTerm::binop(BinOp::Add, WeightTerm::var(x()), WeightTerm::constant(rint(1))),
            WeightTerm::binop(BinOp::Sub, WeightTerm::var(x()), WeightTerm::constant(rint(1))),
        );
        let p = Polynomial::from_weight(&w).unwrap();
        assert_eq!(p.total_degree(), 2);
        let vals: BTreeMap<RealVar, Rat> = [(x(), rint(3))].into_iter().collect();
        assert_eq!(p.eval(&vals), rint(8));
    }

    #[test]
    fn division_by_constant_only() {
        let w = WeightTerm::binop(BinOp::Div, WeightTerm::var(x()), WeightTerm::constant(rint(4)));
        let p = Polynomial::from_weight(&w).unwrap();
        let vals: BTreeMap<RealVar, Rat> = [(x(), rint(1))].into_iter().collect();
        assert_eq!(p.eval(&vals), rat(1, 4));

        let bad = WeightTerm::binop(BinOp::Div, WeightTerm::constant(rint(1)), WeightTerm::var(x()));
        assert!(matches!(
            Polynomial::from_weight(&bad),
            Err(WmiError::NonPolynomialWeight(_))
        ));
        let zero = WeightTerm::binop(
            BinOp::Div,
            WeightTerm::var(x()),
            WeightTerm::constant(rint(0)),
        );
        assert!(matches!(
            Polynomial::from_weight(&zero),
            Err(WmiError::DivisionByZero)
        ));
    }

    #[test]
    fn unresolved_conditional_is_rejected() {
        let w = WeightTerm::Ite(
            crate::model::Formula::Atom(crate::model::Atom::Bool(
                crate::model::BoolVar::new("a"),
            )),
            Box::new(WeightTerm::constant(rint(1))),
            Box::new(WeightTerm::constant(rint(2))),
        );
        assert!(matches!(
            Polynomial::from_weight(&w),
            Err(WmiError::NonPolynomialWeight(_))
        ));
    }
}

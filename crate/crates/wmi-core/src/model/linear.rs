use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{Signed, Zero};

use super::vars::RealVar;
use crate::Rat;

/// A linear expression `sum_i c_i * x_i + c` with exact rational
/// coefficients. Canonical: zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinearTerm {
    pub coeffs: BTreeMap<RealVar, Rat>,
    pub constant: Rat,
}

impl LinearTerm {
    pub fn constant(c: Rat) -> Self {
        LinearTerm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: RealVar) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, Rat::from_integer(1.into()));
        LinearTerm {
            coeffs,
            constant: Rat::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of the smallest variable in the term order, if any.
    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.coeffs.values().next()
    }

    pub fn add_term(&mut self, v: &RealVar, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(v.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(v);
        }
    }

    pub fn scale(&self, k: &Rat) -> LinearTerm {
        if k.is_zero() {
            return LinearTerm::constant(Rat::zero());
        }
        LinearTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &RealVar> {
        self.coeffs.keys()
    }

    /// Evaluate under a total map of variable values.
    pub fn eval(&self, values: &BTreeMap<RealVar, Rat>) -> Rat {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * &values[v];
        }
        acc
    }

    /// Divide by the absolute value of the leading coefficient, so that the
    /// leading coefficient becomes +1 or -1. No-op for constants.
    pub fn normalized(&self) -> LinearTerm {
        match self.leading_coeff() {
            None => self.clone(),
            Some(c) => {
                let k = c.abs().recip();
                self.scale(&k)
            }
        }
    }
}

impl Add for &LinearTerm {
    type Output = LinearTerm;
    fn add(self, rhs: &LinearTerm) -> LinearTerm {
        let mut out = self.clone();
        out.constant += &rhs.constant;
        for (v, c) in &rhs.coeffs {
            out.add_term(v, c);
        }
        out
    }
}

impl Sub for &LinearTerm {
    type Output = LinearTerm;
    fn sub(self, rhs: &LinearTerm) -> LinearTerm {
        self + &(-rhs)
    }
}

impl Neg for &LinearTerm {
    type Output = LinearTerm;
    fn neg(self) -> LinearTerm {
        self.scale(&-Rat::from_integer(1.into()))
    }
}

impl Mul<&Rat> for &LinearTerm {
    type Output = LinearTerm;
    fn mul(self, k: &Rat) -> LinearTerm {
        self.scale(k)
    }
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if a != Rat::from_integer(1.into()) {
                write!(f, "{}*", a)?;
            }
            write!(f, "{}", v)?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if !self.constant.is_zero() {
            if self.constant.is_negative() {
                write!(f, " - {}", self.constant.abs())?;
            } else {
                write!(f, " + {}", self.constant)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{Signed, Zero};

use crate::Rat;

/// A value `r + k*δ` where δ is a positive infinitesimal. Strict bounds
/// become non-strict bounds on these values: `t < c` is `t ≤ c - δ`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DeltaRat {
    pub real: Rat,
    pub delta: Rat,
}

impl DeltaRat {
    pub fn from_rat(r: Rat) -> Self {
        DeltaRat {
            real: r,
            delta: Rat::zero(),
        }
    }

    pub fn with_delta(real: Rat, delta: Rat) -> Self {
        DeltaRat { real, delta }
    }

    pub fn zero() -> Self {
        DeltaRat::default()
    }

    pub fn scale(&self, k: &Rat) -> DeltaRat {
        DeltaRat {
            real: &self.real * k,
            delta: &self.delta * k,
        }
    }

    /// Substitute a concrete positive rational for δ.
    pub fn eval(&self, delta: &Rat) -> Rat {
        &self.real + &self.delta * delta
    }
}

impl PartialOrd for DeltaRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DeltaRat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.real
            .cmp(&other.real)
            .then_with(|| self.delta.cmp(&other.delta))
    }
}

impl Add for &DeltaRat {
    type Output = DeltaRat;
    fn add(self, rhs: &DeltaRat) -> DeltaRat {
        DeltaRat {
            real: &self.real + &rhs.real,
            delta: &self.delta + &rhs.delta,
        }
    }
}

impl Sub for &DeltaRat {
    type Output = DeltaRat;
    fn sub(self, rhs: &DeltaRat) -> DeltaRat {
        DeltaRat {
            real: &self.real - &rhs.real,
            delta: &self.delta - &rhs.delta,
        }
    }
}

impl Neg for &DeltaRat {
    type Output = DeltaRat;
    fn neg(self) -> DeltaRat {
        DeltaRat {
            real: -self.real.clone(),
            delta: -self.delta.clone(),
        }
    }
}

/// Largest δ₀ such that every value in `pairs` keeps its ordering when δ is
/// any rational in (0, δ₀]. Each pair (lo, hi) must satisfy lo ≤ hi in the
/// δ-order; the result makes every `lo.eval(d) <= hi.eval(d)` concrete.
pub fn concretize_delta(pairs: &[(DeltaRat, DeltaRat)]) -> Rat {
    let mut bound = Rat::from_integer(1.into());
    for (lo, hi) in pairs {
        let dr = &hi.real - &lo.real;
        let dd = &hi.delta - &lo.delta;
        // lo <= hi in δ-order means dr > 0, or dr = 0 and dd >= 0. The
        // concrete constraint dr + dd*d >= 0 only bites when dd < 0.
        if dd.is_negative() {
            let cap = -dr / dd;
            if cap < bound {
                bound = cap;
            }
        }
    }
    bound
}

impl fmt::Display for DeltaRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.delta.is_zero() {
            write!(f, "{}", self.real)
        } else if self.delta.is_positive() {
            write!(f, "{}+{}d", self.real, self.delta)
        } else {
            write!(f, "{}{}d", self.real, self.delta)
        }
    }
}

impl fmt::Debug for DeltaRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rint};

    #[test]
    fn order_is_lexicographic() {
        let a = DeltaRat::with_delta(rint(1), rint(-1)); // 1 - δ
        let b = DeltaRat::from_rat(rint(1));
        let c = DeltaRat::with_delta(rint(1), rint(1)); // 1 + δ
        assert!(a < b && b < c);
    }

    #[test]
    fn concretize_respects_strict_gaps() {
        // 1 - δ <= x <= 2 with x also >= 1 + δ: need δ <= 1/2 so that the
        // two endpoints stay ordered against 2 and each other.
        let pairs = vec![
            (DeltaRat::with_delta(rint(1), rint(1)), DeltaRat::from_rat(rint(2))),
            (
                DeltaRat::with_delta(rint(1), rint(-1)),
                DeltaRat::with_delta(rint(1), rint(1)),
            ),
        ];
        let d = concretize_delta(&pairs);
        assert!(d > rint(0) && d <= rat(1, 1));
        for (lo, hi) in &pairs {
            assert!(lo.eval(&d) <= hi.eval(&d));
        }
    }
}

//! Exact integration of polynomial weights over convex polyhedral regions
//! given as conjunctions of linear literals.

pub mod polynomial;
pub mod polytope;

use num::Zero;

pub use polynomial::Polynomial;
pub use polytope::{integrate_simplex, triangulate, HPolytope, Point};

use crate::error::{Result, WmiError};
use crate::model::atom::{Atom, Literal, Relation};
use crate::model::vars::RealVar;
use crate::model::weight::WeightTerm;
use crate::smt::fourier_motzkin::fm_feasible;
use crate::Rat;

/// Most dimensions the vertex enumerator will attempt.
pub const DIMENSION_CAP: usize = 8;

/// ∫ w dx over the region of `lits` in the space spanned by `dims`. The
/// weight must expand to a polynomial (conditionals already resolved).
/// Lower-dimensional regions — in particular anything containing a positive
/// equality — integrate to zero; unbounded regions are an error.
pub fn wmi_nb(lits: &[Literal], w: &WeightTerm, dims: &[RealVar]) -> Result<Rat> {
    let poly = Polynomial::from_weight(w)?;
    if dims.len() > DIMENSION_CAP {
        return Err(WmiError::DimensionCap(dims.len(), DIMENSION_CAP));
    }
    if dims.is_empty() {
        // Zero-dimensional space: the measure is the counting measure on a
        // point and the weight must be constant.
        return Ok(poly
            .as_constant()
            .cloned()
            .unwrap_or_else(Rat::zero));
    }
    if lits
        .iter()
        .any(|(a, pos)| *pos && matches!(a, Atom::Lra { rel: Relation::Eq, .. }))
    {
        return Ok(Rat::zero());
    }
    let fm_lits: Vec<_> = lits
        .iter()
        .map(|(a, pos)| match a {
            Atom::Lra { term, rel } => Ok((term.clone(), *rel, *pos)),
            other => Err(WmiError::NonArithmeticLiteral(other.to_string())),
        })
        .collect::<Result<_>>()?;
    if !fm_feasible(&fm_lits) {
        return Ok(Rat::zero());
    }
    if poly.is_zero() {
        return Ok(Rat::zero());
    }
    let hp = HPolytope::from_literals(lits, dims)?;
    if let Some(ray) = hp.recession_ray() {
        let desc: Vec<String> = ray.iter().map(|c| c.to_string()).collect();
        return Err(WmiError::UnboundedRegion(format!("({})", desc.join(", "))));
    }
    let vs = hp.vertices();
    let mut acc = Rat::zero();
    for s in triangulate(&vs, dims.len()) {
        let pts: Vec<Point> = s.iter().map(|&i| vs[i].clone()).collect();
        acc += integrate_simplex(&poly, &pts, dims);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::atom::{CanonAtom, InputRel};
    use crate::model::linear::LinearTerm;
    use crate::{rat, rint};

    fn xv(n: &str) -> RealVar {
        RealVar::new(n)
    }

    fn lit(term: LinearTerm, rel: InputRel) -> Literal {
        match Atom::lra(term, rel) {
            CanonAtom::Lit(a, p) => (a, p),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn interval(v: &str, lo: i64, hi: i64) -> Vec<Literal> {
        let x = LinearTerm::var(xv(v));
        vec![
            lit(&LinearTerm::constant(rint(lo)) - &x, InputRel::Le),
            lit(&x - &LinearTerm::constant(rint(hi)), InputRel::Le),
        ]
    }

    #[test]
    fn interval_weight_x() {
        // ∫_0^2 x dx = 2
        let lits = interval("x", 0, 2);
        let w = WeightTerm::var(xv("x"));
        assert_eq!(wmi_nb(&lits, &w, &[xv("x")]).unwrap(), rint(2));
    }

    #[test]
    fn triangle_region() {
        // x,y >= 0, x + y <= 1, weight 1 -> area 1/2
        let mut lits = vec![
            lit(&LinearTerm::constant(rint(0)) - &LinearTerm::var(xv("x")), InputRel::Le),
            lit(&LinearTerm::constant(rint(0)) - &LinearTerm::var(xv("y")), InputRel::Le),
        ];
        let s = &(&LinearTerm::var(xv("x")) + &LinearTerm::var(xv("y")))
            - &LinearTerm::constant(rint(1));
        lits.push(lit(s, InputRel::Le));
        let w = WeightTerm::constant(rint(1));
        assert_eq!(wmi_nb(&lits, &w, &[xv("x"), xv("y")]).unwrap(), rat(1, 2));
    }

    #[test]
    fn strictness_does_not_change_the_value() {
        let open = vec![
            lit(&LinearTerm::constant(rint(0)) - &LinearTerm::var(xv("x")), InputRel::Lt),
            lit(&LinearTerm::var(xv("x")) - &LinearTerm::constant(rint(1)), InputRel::Lt),
        ];
        let closed = interval("x", 0, 1);
        let w = WeightTerm::var(xv("x"));
        assert_eq!(
            wmi_nb(&open, &w, &[xv("x")]).unwrap(),
            wmi_nb(&closed, &w, &[xv("x")]).unwrap()
        );
    }

    #[test]
    fn equality_region_is_null() {
        let mut lits = interval("x", 0, 1);
        lits.push(lit(
            &LinearTerm::var(xv("x")) - &LinearTerm::constant(rat(1, 2)),
            InputRel::Eq,
        ));
        let w = WeightTerm::constant(rint(1));
        assert_eq!(wmi_nb(&lits, &w, &[xv("x")]).unwrap(), rint(0));
    }

    #[test]
    fn negated_equality_is_ignored_for_measure() {
        let mut lits = interval("x", 0, 1);
        lits.push(lit(
            &LinearTerm::var(xv("x")) - &LinearTerm::constant(rat(1, 2)),
            InputRel::Ne,
        ));
        let w = WeightTerm::constant(rint(1));
        assert_eq!(wmi_nb(&lits, &w, &[xv("x")]).unwrap(), rint(1));
    }

    #[test]
    fn infeasible_region_is_zero() {
        let x = LinearTerm::var(xv("x"));
        let lits = vec![
            lit(&x - &LinearTerm::constant(rint(0)), InputRel::Le),
            lit(&LinearTerm::constant(rint(1)) - &x, InputRel::Le),
        ];
        let w = WeightTerm::constant(rint(1));
        assert_eq!(wmi_nb(&lits, &w, &[xv("x")]).unwrap(), rint(0));
    }

    #[test]
    fn unbounded_region_errors() {
        let lits = vec![lit(
            &LinearTerm::constant(rint(0)) - &LinearTerm::var(xv("x")),
            InputRel::Le,
        )];
        let w = WeightTerm::constant(rint(1));
        assert!(matches!(
            wmi_nb(&lits, &w, &[xv("x")]),
            Err(WmiError::UnboundedRegion(_))
        ));
    }

    #[test]
    fn two_dim_product_weight() {
        // ∫ over [0,2]x[0,3] of x*y = (2^2/2)(3^2/2) = 9
        let mut lits = interval("x", 0, 2);
        lits.extend(interval("y", 0, 3));
        let w = WeightTerm::binop(
            crate::model::BinOp::Mul,
            WeightTerm::var(xv("x")),
            WeightTerm::var(xv("y")),
        );
        assert_eq!(wmi_nb(&lits, &w, &[xv("x"), xv("y")]).unwrap(), rint(9));
    }
}

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, One, Signed, Zero};

use super::polynomial::Polynomial;
use crate::error::{Result, WmiError};
use crate::model::atom::{Atom, Literal, Relation};
use crate::model::vars::RealVar;
use crate::Rat;

pub type Point = Vec<Rat>;

/// Intersection of closed/open half-spaces `a·x ≤ b` over a fixed variable
/// order. Strictness is recorded for completeness but never changes an
/// integral: open and closed versions differ by a measure-zero set.
#[derive(Clone, Debug)]
pub struct HPolytope {
    pub dims: Vec<RealVar>,
    pub rows: Vec<(Vec<Rat>, Rat, bool)>,
}

impl HPolytope {
    /// Build from a conjunction of linear literals. Negated equalities are
    /// dropped (measure-equivalent to no constraint); positive equalities
    /// are rejected by the caller beforehand, which short-circuits to zero.
    pub fn from_literals(lits: &[Literal], dims: &[RealVar]) -> Result<HPolytope> {
        let index: BTreeMap<&RealVar, usize> =
            dims.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut rows = Vec::new();
        for (atom, positive) in lits {
            let (term, rel) = match atom {
                Atom::Lra { term, rel } => (term, rel),
                other => {
                    return Err(WmiError::NonArithmeticLiteral(other.to_string()));
                }
            };
            let mut a = vec![Rat::zero(); dims.len()];
            for (v, c) in &term.coeffs {
                let Some(&i) = index.get(v) else {
                    return Err(WmiError::UnknownIdentifier(v.name().to_string()));
                };
                a[i] = c.clone();
            }
            let b = -term.constant.clone();
            match (rel, positive) {
                (Relation::Le, true) => rows.push((a, b, false)),
                (Relation::Lt, true) => rows.push((a, b, true)),
                // not (t <= 0) == -t < 0
                (Relation::Le, false) => {
                    rows.push((a.iter().map(|c| -c.clone()).collect(), -b, true))
                }
                (Relation::Lt, false) => {
                    rows.push((a.iter().map(|c| -c.clone()).collect(), -b, false))
                }
                (Relation::Eq, true) => {
                    rows.push((a.iter().map(|c| -c.clone()).collect(), -b.clone(), false));
                    rows.push((a, b, false));
                }
                (Relation::Eq, false) => {}
            }
        }
        Ok(HPolytope {
            dims: dims.to_vec(),
            rows,
        })
    }

    fn contains_closed(&self, p: &Point) -> bool {
        self.rows.iter().all(|(a, b, _)| dot(a, p) <= *b)
    }

    /// Vertices of the closure: solutions of d-subsets of the bounding
    /// hyperplanes that satisfy every row. Sorted and deduplicated.
    pub fn vertices(&self) -> Vec<Point> {
        let d = self.dims.len();
        let mut out: BTreeSet<Point> = BTreeSet::new();
        let mut combo = Vec::new();
        self.vertex_scan(0, d, &mut combo, &mut out);
        out.into_iter().collect()
    }

    fn vertex_scan(
        &self,
        start: usize,
        need: usize,
        combo: &mut Vec<usize>,
        out: &mut BTreeSet<Point>,
    ) {
        if need == 0 {
            let a: Vec<Vec<Rat>> = combo.iter().map(|&i| self.rows[i].0.clone()).collect();
            let b: Vec<Rat> = combo.iter().map(|&i| self.rows[i].1.clone()).collect();
            if let Some(p) = solve_unique(a, b) {
                if self.contains_closed(&p) {
                    out.insert(p);
                }
            }
            return;
        }
        for i in start..self.rows.len() {
            combo.push(i);
            self.vertex_scan(i + 1, need - 1, combo, out);
            combo.pop();
        }
    }

    /// A nonzero recession direction, if one exists: a certificate that the
    /// region is unbounded. Found as a nonzero vertex of the recession cone
    /// clipped to the unit box.
    pub fn recession_ray(&self) -> Option<Point> {
        let d = self.dims.len();
        let mut cone_rows: Vec<(Vec<Rat>, Rat, bool)> = self
            .rows
            .iter()
            .map(|(a, _, _)| (a.clone(), Rat::zero(), false))
            .collect();
        for i in 0..d {
            let mut e = vec![Rat::zero(); d];
            e[i] = Rat::one();
            cone_rows.push((e.clone(), Rat::one(), false));
            let neg: Vec<Rat> = e.iter().map(|c| -c.clone()).collect();
            cone_rows.push((neg, Rat::one(), false));
        }
        let cone = HPolytope {
            dims: self.dims.clone(),
            rows: cone_rows,
        };
        cone.vertices()
            .into_iter()
            .find(|p| p.iter().any(|c| !c.is_zero()))
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve a square system by Gaussian elimination; None when singular.
pub fn solve_unique(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Point> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let v = &a[r][c] - &(&factor * &a[col][c]);
                a[r][c] = v;
            }
            let v = &b[r] - &(&factor * &b[col]);
            b[r] = v;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Determinant by fraction-free-ish elimination (exact rationals anyway).
pub fn determinant(mut a: Vec<Vec<Rat>>) -> Rat {
    let n = a.len();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rat::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let v = &a[r][c] - &(&factor * &a[col][c]);
                a[r][c] = v;
            }
        }
    }
    det
}

/// A nonzero vector orthogonal to all given rows; None when the rows span
/// the full space.
fn kernel_vector(rows: Vec<Vec<Rat>>, d: usize) -> Option<Point> {
    // Row-reduce, then read a free column.
    let mut a = rows;
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut row = 0;
    for col in 0..d {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pv = a[row][col].clone();
        for r in 0..a.len() {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in 0..d {
                let v = &a[r][c] - &(&factor * &a[row][c]);
                a[r][c] = v;
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == a.len() {
            break;
        }
    }
    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free = (0..d).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![Rat::zero(); d];
    v[free] = Rat::one();
    for &(r, c) in &pivots {
        // a[r] · v = 0  =>  v[c] = -a[r][free] / a[r][c]
        v[c] = -&a[r][free] / &a[r][c];
    }
    Some(v)
}

/// Triangulate the convex hull of `points` (placing/incremental): seed with
/// an affinely independent simplex, then cone each further point to the
/// boundary facets it can see. Returns index sets; empty when the hull is
/// lower-dimensional.
pub fn triangulate(points: &[Point], d: usize) -> Vec<Vec<usize>> {
    if points.len() < d + 1 {
        return Vec::new();
    }
    // Greedy affinely independent seed.
    let mut seed = vec![0usize];
    for i in 1..points.len() {
        if seed.len() == d + 1 {
            break;
        }
        let mut cand = seed.clone();
        cand.push(i);
        if affinely_independent(points, &cand) {
            seed = cand;
        }
    }
    if seed.len() < d + 1 {
        return Vec::new();
    }
    let mut simplices: Vec<Vec<usize>> = vec![seed.clone()];
    let in_seed: BTreeSet<usize> = seed.into_iter().collect();

    for p in 0..points.len() {
        if in_seed.contains(&p) {
            continue;
        }
        // Boundary facets: (d-1)-faces used by exactly one simplex.
        let mut facet_owner: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        let mut facet_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (si, s) in simplices.iter().enumerate() {
            for skip in 0..s.len() {
                let mut f: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                f.sort_unstable();
                *facet_count.entry(f.clone()).or_insert(0) += 1;
                facet_owner.insert(f, (si, s[skip]));
            }
        }
        let mut added = Vec::new();
        for (facet, count) in &facet_count {
            if *count != 1 {
                continue;
            }
            let (_, apex) = facet_owner[facet];
            // Supporting hyperplane of the facet, oriented away from the
            // owning simplex's apex.
            let base = &points[facet[0]];
            let rows: Vec<Vec<Rat>> = facet[1..]
                .iter()
                .map(|&i| sub(&points[i], base))
                .collect();
            let Some(mut n) = kernel_vector(rows, d) else { continue };
            let mut offset = dot(&n, base);
            let apex_side = dot(&n, &points[apex]);
            if apex_side > offset {
                n = n.iter().map(|c| -c.clone()).collect();
                offset = -offset;
            } else if apex_side == offset {
                continue;
            }
            if dot(&n, &points[p]) > offset {
                let mut s = facet.clone();
                s.push(p);
                added.push(s);
            }
        }
        simplices.extend(added);
    }
    simplices
}

fn sub(a: &Point, b: &Point) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn affinely_independent(points: &[Point], idx: &[usize]) -> bool {
    if idx.len() < 2 {
        return true;
    }
    let base = &points[idx[0]];
    let rows: Vec<Point> = idx[1..].iter().map(|&i| sub(&points[i], base)).collect();
    rank(rows) == idx.len() - 1
}

fn rank(mut a: Vec<Vec<Rat>>) -> usize {
    if a.is_empty() {
        return 0;
    }
    let d = a[0].len();
    let mut rk = 0;
    for col in 0..d {
        let Some(p) = (rk..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rk, p);
        let pv = a[rk][col].clone();
        for r in (rk + 1)..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in 0..d {
                let v = &a[r][c] - &(&factor * &a[rk][c]);
                a[r][c] = v;
            }
        }
        rk += 1;
        if rk == a.len() {
            break;
        }
    }
    rk
}

fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Exact integral of a polynomial over one simplex, by the affine pullback
/// to the standard simplex and the closed-form monomial integral
/// ∫_{Δ_d} Π u_i^{a_i} du = (Π a_i!) / (d + Σ a_i)!.
pub fn integrate_simplex(poly: &Polynomial, verts: &[Point], dims: &[RealVar]) -> Rat {
    let d = dims.len();
    debug_assert_eq!(verts.len(), d + 1);
    let v0 = &verts[0];
    let jac: Vec<Vec<Rat>> = (0..d)
        .map(|row| (0..d).map(|col| &verts[col + 1][row] - &v0[row]).collect())
        .collect();
    let vol_factor = determinant(jac).abs();
    if vol_factor.is_zero() {
        return Rat::zero();
    }

    // x_j as a degree-1 polynomial in u_1..u_d.
    type UPoly = BTreeMap<Vec<u32>, Rat>;
    let umul = |a: &UPoly, b: &UPoly| -> UPoly {
        let mut out: UPoly = BTreeMap::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                let e = out.entry(m.clone()).or_insert_with(Rat::zero);
                *e += ca * cb;
                if e.is_zero() {
                    out.remove(&m);
                }
            }
        }
        out
    };
    let coords: Vec<UPoly> = (0..d)
        .map(|j| {
            let mut p: UPoly = BTreeMap::new();
            if !v0[j].is_zero() {
                p.insert(vec![0; d], v0[j].clone());
            }
            for i in 0..d {
                let c = &verts[i + 1][j] - &v0[j];
                if !c.is_zero() {
                    let mut m = vec![0; d];
                    m[i] = 1;
                    p.insert(m, c);
                }
            }
            p
        })
        .collect();
    let dim_index: BTreeMap<&RealVar, usize> =
        dims.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut pulled: UPoly = BTreeMap::new();
    for (mono, coeff) in &poly.terms {
        let mut term: UPoly = BTreeMap::from([(vec![0; d], coeff.clone())]);
        for (v, e) in mono {
            let base = &coords[dim_index[v]];
            for _ in 0..*e {
                term = umul(&term, base);
            }
        }
        for (m, c) in term {
            let e = pulled.entry(m.clone()).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                pulled.remove(&m);
            }
        }
    }

    let mut acc = Rat::zero();
    for (m, c) in &pulled {
        let total: u32 = m.iter().sum();
        let mut num = BigInt::one();
        for &a in m {
            num *= factorial(a);
        }
        let den = factorial(d as u32 + total);
        acc += c * &Rat::new(num, den);
    }
    acc * vol_factor
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
    fn unit_square_vertices_and_volume() {
        let mut lits = interval("x", 0, 1);
        lits.extend(interval("y", 0, 1));
        let dims = vec![xv("x"), xv("y")];
        let poly = HPolytope::from_literals(&lits, &dims).unwrap();
        let vs = poly.vertices();
        assert_eq!(vs.len(), 4);
        assert!(poly.recession_ray().is_none());
        let tri = triangulate(&vs, 2);
        assert_eq!(tri.len(), 2);
        let one = Polynomial::constant(rint(1));
        let vol: Rat = tri
            .iter()
            .map(|s| {
                let pts: Vec<Point> = s.iter().map(|&i| vs[i].clone()).collect();
                integrate_simplex(&one, &pts, &dims)
            })
            .sum();
        assert_eq!(vol, rint(1));
    }

    #[test]
    fn xy_over_unit_square_is_one_quarter() {
        let mut lits = interval("x", 0, 1);
        lits.extend(interval("y", 0, 1));
        let dims = vec![xv("x"), xv("y")];
        let hp = HPolytope::from_literals(&lits, &dims).unwrap();
        let vs = hp.vertices();
        let p = Polynomial::var(xv("x")).mul(&Polynomial::var(xv("y")));
        let val: Rat = triangulate(&vs, 2)
            .iter()
            .map(|s| {
                let pts: Vec<Point> = s.iter().map(|&i| vs[i].clone()).collect();
                integrate_simplex(&p, &pts, &dims)
            })
            .sum();
        assert_eq!(val, rat(1, 4));
    }

    #[test]
    fn halfspace_is_unbounded_with_certificate() {
        let lits = vec![lit(
            &LinearTerm::constant(rint(0)) - &LinearTerm::var(xv("x")),
            InputRel::Le,
        )];
        let dims = vec![xv("x")];
        let hp = HPolytope::from_literals(&lits, &dims).unwrap();
        let ray = hp.recession_ray().unwrap();
        assert_eq!(ray, vec![rint(1)]);
    }

    #[test]
    fn simplex_volume_three_dims() {
        // x,y,z >= 0, x+y+z <= 1 has volume 1/6.
        let dims = vec![xv("x"), xv("y"), xv("z")];
        let mut lits: Vec<Literal> = dims
            .iter()
            .map(|v| {
                lit(
                    &LinearTerm::constant(rint(0)) - &LinearTerm::var(v.clone()),
                    InputRel::Le,
                )
            })
            .collect();
        let sum = dims
            .iter()
            .fold(LinearTerm::constant(rint(-1)), |acc, v| {
                &acc + &LinearTerm::var(v.clone())
            });
        lits.push(lit(sum, InputRel::Le));
        let hp = HPolytope::from_literals(&lits, &dims).unwrap();
        let vs = hp.vertices();
        assert_eq!(vs.len(), 4);
        let one = Polynomial::constant(rint(1));
        let vol: Rat = triangulate(&vs, 3)
            .iter()
            .map(|s| {
                let pts: Vec<Point> = s.iter().map(|&i| vs[i].clone()).collect();
                integrate_simplex(&one, &pts, &dims)
            })
            .sum();
        assert_eq!(vol, rat(1, 6));
    }

    #[test]
    fn dirichlet_closed_form_in_one_dim() {
        // ∫_0^1 x^2 dx = 1/3 via the simplex [0,1].
        let dims = vec![xv("x")];
        let p = Polynomial::var(xv("x")).mul(&Polynomial::var(xv("x")));
        let verts = vec![vec![rint(0)], vec![rint(1)]];
        assert_eq!(integrate_simplex(&p, &verts, &dims), rat(1, 3));
    }
}

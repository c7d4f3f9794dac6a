use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};

use super::delta::{concretize_delta, DeltaRat};
use crate::model::atom::Relation;
use crate::model::vars::{RealVar, YVar};
use crate::Rat;

/// A variable visible to the arithmetic solver: either a problem real or a
/// fresh skeleton variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LpVar {
    Real(RealVar),
    Y(YVar),
}

impl fmt::Display for LpVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpVar::Real(v) => write!(f, "{}", v),
            LpVar::Y(y) => write!(f, "{}", y),
        }
    }
}

impl fmt::Debug for LpVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

type Core = Vec<usize>;

#[derive(Clone, Default)]
struct VarInfo {
    lower: Option<(DeltaRat, usize)>,
    upper: Option<(DeltaRat, usize)>,
}

/// Incremental feasibility checker for conjunctions of linear bounds, in the
/// general-simplex style: slack variables carry the constraint rows, bounds
/// move during search, strict bounds are offset by a symbolic δ. All
/// arithmetic is exact.
#[derive(Clone, Default)]
pub struct Simplex {
    infos: Vec<VarInfo>,
    beta: Vec<DeltaRat>,
    var_ids: BTreeMap<LpVar, usize>,
    // Defining expression of each slack over structural variables, used to
    // reuse slacks across syntactically equal rows.
    slack_ids: BTreeMap<Vec<(usize, Rat)>, usize>,
    // basic var -> linear expression over current nonbasic vars
    rows: BTreeMap<usize, BTreeMap<usize, Rat>>,
}

impl Simplex {
    pub fn new() -> Self {
        Simplex::default()
    }

    fn fresh_var(&mut self) -> usize {
        self.infos.push(VarInfo::default());
        self.beta.push(DeltaRat::zero());
        self.infos.len() - 1
    }

    pub fn var(&mut self, v: &LpVar) -> usize {
        if let Some(&i) = self.var_ids.get(v) {
            return i;
        }
        let i = self.fresh_var();
        self.var_ids.insert(v.clone(), i);
        i
    }

    fn is_basic(&self, x: usize) -> bool {
        self.rows.contains_key(&x)
    }

    /// Current value of an expression over arbitrary (possibly basic) vars.
    fn value_of(&self, expr: &BTreeMap<usize, Rat>) -> DeltaRat {
        let mut acc = DeltaRat::zero();
        for (&x, c) in expr {
            acc = &acc + &self.beta[x].scale(c);
        }
        acc
    }

    /// Rewrite an expression over structural vars into one over nonbasic
    /// vars by substituting the rows of basic vars.
    fn normalize(&self, expr: &BTreeMap<usize, Rat>) -> BTreeMap<usize, Rat> {
        let mut out: BTreeMap<usize, Rat> = BTreeMap::new();
        for (&x, c) in expr {
            if let Some(row) = self.rows.get(&x) {
                for (&z, a) in row {
                    let e = out.entry(z).or_insert_with(Rat::zero);
                    *e += c * a;
                    if e.is_zero() {
                        out.remove(&z);
                    }
                }
            } else {
                let e = out.entry(x).or_insert_with(Rat::zero);
                *e += c;
                if e.is_zero() {
                    out.remove(&x);
                }
            }
        }
        out
    }

    /// Slack variable defined as `expr` (over structural vars), reused when
    /// the same expression was asserted before.
    fn slack_for(&mut self, expr: &BTreeMap<usize, Rat>) -> usize {
        let key: Vec<(usize, Rat)> = expr.iter().map(|(&x, c)| (x, c.clone())).collect();
        if let Some(&s) = self.slack_ids.get(&key) {
            return s;
        }
        let s = self.fresh_var();
        self.slack_ids.insert(key, s);
        let row = self.normalize(expr);
        self.beta[s] = self.value_of(&row);
        self.rows.insert(s, row);
        s
    }

    /// Assert a bound constraint `Σ coeffs·v + constant (rel) 0`, where a
    /// negative literal polarity mirrors the relation. Disequalities must be
    /// case-split by the caller. Returns an immediately detected conflict
    /// core of constraint tags, if any.
    pub fn assert_literal(
        &mut self,
        coeffs: &BTreeMap<LpVar, Rat>,
        constant: &Rat,
        rel: Relation,
        positive: bool,
        tag: usize,
    ) -> Result<(), Core> {
        // t + c rel 0 becomes bounds on t against -c.
        let bound = -constant.clone();
        let expr: BTreeMap<usize, Rat> = coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (self.var(v), c.clone()))
            .collect();
        if expr.is_empty() {
            let zero = Rat::zero();
            let holds = match (rel, positive) {
                (Relation::Le, true) => zero <= bound,
                (Relation::Le, false) => zero > bound,
                (Relation::Lt, true) => zero < bound,
                (Relation::Lt, false) => zero >= bound,
                (Relation::Eq, true) => zero == bound,
                (Relation::Eq, false) => zero != bound,
            };
            return if holds { Ok(()) } else { Err(vec![tag]) };
        }
        let unit = expr.len() == 1 && *expr.values().next().unwrap() == Rat::from_integer(1.into());
        let x = if unit {
            *expr.keys().next().unwrap()
        } else {
            self.slack_for(&expr)
        };
        match (rel, positive) {
            (Relation::Le, true) => self.assert_upper(x, DeltaRat::from_rat(bound), tag),
            (Relation::Lt, true) => self.assert_upper(
                x,
                DeltaRat::with_delta(bound, -Rat::from_integer(1.into())),
                tag,
            ),
            (Relation::Le, false) => self.assert_lower(
                x,
                DeltaRat::with_delta(bound, Rat::from_integer(1.into())),
                tag,
            ),
            (Relation::Lt, false) => self.assert_lower(x, DeltaRat::from_rat(bound), tag),
            (Relation::Eq, true) => {
                self.assert_upper(x, DeltaRat::from_rat(bound.clone()), tag)?;
                self.assert_lower(x, DeltaRat::from_rat(bound), tag)
            }
            (Relation::Eq, false) => unreachable!("disequalities are case-split by the caller"),
        }
    }

    fn assert_upper(&mut self, x: usize, bound: DeltaRat, tag: usize) -> Result<(), Core> {
        if let Some((u, _)) = &self.infos[x].upper {
            if *u <= bound {
                return Ok(());
            }
        }
        if let Some((l, ltag)) = &self.infos[x].lower {
            if bound < *l {
                return Err(vec![*ltag, tag]);
            }
        }
        self.infos[x].upper = Some((bound.clone(), tag));
        if !self.is_basic(x) && self.beta[x] > bound {
            self.update(x, bound);
        }
        Ok(())
    }

    fn assert_lower(&mut self, x: usize, bound: DeltaRat, tag: usize) -> Result<(), Core> {
        if let Some((l, _)) = &self.infos[x].lower {
            if *l >= bound {
                return Ok(());
            }
        }
        if let Some((u, utag)) = &self.infos[x].upper {
            if bound > *u {
                return Err(vec![*utag, tag]);
            }
        }
        self.infos[x].lower = Some((bound.clone(), tag));
        if !self.is_basic(x) && self.beta[x] < bound {
            self.update(x, bound);
        }
        Ok(())
    }

    /// Move a nonbasic variable to `v`, adjusting dependent basic values.
    fn update(&mut self, x: usize, v: DeltaRat) {
        let diff = &v - &self.beta[x];
        for (&b, row) in &self.rows {
            if let Some(a) = row.get(&x) {
                let nb = &self.beta[b] + &diff.scale(a);
                self.beta[b] = nb;
            }
        }
        self.beta[x] = v;
    }

    fn pivot_and_update(&mut self, i: usize, j: usize, v: DeltaRat) {
        let a_ij = self.rows[&i][&j].clone();
        let theta = (&v - &self.beta[i]).scale(&a_ij.recip());
        self.beta[i] = v;
        let new_j = &self.beta[j] + &theta;
        for (&b, row) in &self.rows {
            if b == i {
                continue;
            }
            if let Some(a) = row.get(&j) {
                let nb = &self.beta[b] + &theta.scale(a);
                self.beta[b] = nb;
            }
        }
        self.beta[j] = new_j;
        self.pivot(i, j);
    }

    /// Swap basic `i` with nonbasic `j` occurring in row i.
    fn pivot(&mut self, i: usize, j: usize) {
        let mut row_i = self.rows.remove(&i).unwrap();
        let a_ij = row_i.remove(&j).unwrap();
        // x_i = a_ij x_j + rest  =>  x_j = (1/a_ij) x_i - rest/a_ij
        let inv = a_ij.recip();
        let mut row_j: BTreeMap<usize, Rat> = row_i
            .iter()
            .map(|(&x, c)| (x, -(c * &inv)))
            .collect();
        row_j.insert(i, inv);
        // Substitute x_j in all remaining rows.
        for row in self.rows.values_mut() {
            if let Some(c) = row.remove(&j) {
                for (&x, a) in &row_j {
                    let e = row.entry(x).or_insert_with(Rat::zero);
                    *e += &c * a;
                    if e.is_zero() {
                        row.remove(&x);
                    }
                }
            }
        }
        self.rows.insert(j, row_j);
    }

    /// Main feasibility loop (Bland's rule on variable indices).
    pub fn check(&mut self) -> Result<(), Core> {
        loop {
            let violated = self
                .rows
                .keys()
                .copied()
                .find(|&b| {
                    let info = &self.infos[b];
                    info.lower.as_ref().map(|(l, _)| self.beta[b] < *l).unwrap_or(false)
                        || info.upper.as_ref().map(|(u, _)| self.beta[b] > *u).unwrap_or(false)
                });
            let Some(i) = violated else { return Ok(()) };
            let info = self.infos[i].clone();
            let below = info
                .lower
                .as_ref()
                .map(|(l, _)| self.beta[i] < *l)
                .unwrap_or(false);
            let (target, btag) = if below {
                info.lower.clone().unwrap()
            } else {
                info.upper.clone().unwrap()
            };
            // Find a nonbasic variable with slack in the needed direction.
            let row = self.rows[&i].clone();
            let mut pivot_j = None;
            for (&j, a) in &row {
                let vj = &self.beta[j];
                let can_move = if below == a.is_positive() {
                    // Need x_j to increase.
                    self.infos[j]
                        .upper
                        .as_ref()
                        .map(|(u, _)| vj < u)
                        .unwrap_or(true)
                } else {
                    self.infos[j]
                        .lower
                        .as_ref()
                        .map(|(l, _)| vj > l)
                        .unwrap_or(true)
                };
                if can_move {
                    pivot_j = Some(j);
                    break;
                }
            }
            match pivot_j {
                Some(j) => self.pivot_and_update(i, j, target),
                None => {
                    // Every nonbasic in the row is pinned at the blocking
                    // bound: those bounds plus the violated one are a core.
                    let mut core = vec![btag];
                    for (&j, a) in &row {
                        let blocking = if below == a.is_positive() {
                            self.infos[j].upper.as_ref().map(|(_, t)| *t)
                        } else {
                            self.infos[j].lower.as_ref().map(|(_, t)| *t)
                        };
                        if let Some(t) = blocking {
                            core.push(t);
                        }
                    }
                    core.sort_unstable();
                    core.dedup();
                    return Err(core);
                }
            }
        }
    }

    /// A concrete rational model after a successful `check`, with δ chosen
    /// small enough that all strict bounds hold.
    pub fn model(&self) -> BTreeMap<LpVar, Rat> {
        let mut pairs = Vec::new();
        for (x, info) in self.infos.iter().enumerate() {
            if let Some((l, _)) = &info.lower {
                pairs.push((l.clone(), self.beta[x].clone()));
            }
            if let Some((u, _)) = &info.upper {
                pairs.push((self.beta[x].clone(), u.clone()));
            }
        }
        let d = concretize_delta(&pairs);
        self.var_ids
            .iter()
            .map(|(v, &i)| (v.clone(), self.beta[i].eval(&d)))
            .collect()
    }

    /// Value of an expression in the current (symbolic) assignment.
    pub fn symbolic_value(&mut self, coeffs: &BTreeMap<LpVar, Rat>, constant: &Rat) -> DeltaRat {
        let expr: BTreeMap<usize, Rat> = coeffs
            .iter()
            .map(|(v, c)| (self.var(v), c.clone()))
            .collect();
        let norm = self.normalize(&expr);
        &self.value_of(&norm) + &DeltaRat::from_rat(constant.clone())
    }
}

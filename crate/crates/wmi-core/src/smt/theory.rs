use std::collections::{BTreeMap, BTreeSet};

use num::Zero;

use super::euf::Euf;
use super::simplex::{LpVar, Simplex};
use crate::error::{Result, WmiError};
use crate::model::atom::{Atom, ETerm, EufSymbol, Literal, Relation};
use crate::Rat;

/// A linear expression over solver variables: coefficient map plus constant.
type LinExpr = (BTreeMap<LpVar, Rat>, Rat);

fn eterm_linear(t: &ETerm) -> Option<LinExpr> {
    match t {
        ETerm::Y(y) => Some((
            BTreeMap::from([(LpVar::Y(*y), Rat::from_integer(1.into()))]),
            Rat::zero(),
        )),
        ETerm::Real(v) => Some((
            BTreeMap::from([(LpVar::Real(v.clone()), Rat::from_integer(1.into()))]),
            Rat::zero(),
        )),
        ETerm::Num(c) => Some((BTreeMap::new(), c.clone())),
        ETerm::App(_, _) => None,
    }
}

fn diff(a: &LinExpr, b: &LinExpr) -> LinExpr {
    let mut coeffs = a.0.clone();
    for (v, c) in &b.0 {
        let e = coeffs.entry(v.clone()).or_insert_with(Rat::zero);
        *e -= c;
        if e.is_zero() {
            coeffs.remove(v);
        }
    }
    (coeffs, &a.1 - &b.1)
}

fn collect_arith_leaves(t: &ETerm, out: &mut BTreeSet<ETerm>) {
    match t {
        ETerm::App(_, args) => {
            for a in args {
                collect_arith_leaves(a, out);
            }
        }
        leaf => {
            out.insert(leaf.clone());
        }
    }
}

struct Split {
    // (coeffs, constant, rel, positive)
    arith: Vec<(LinExpr, Relation, bool)>,
    // expressions constrained to be nonzero, split during search
    diseqs: Vec<LinExpr>,
    euf: Vec<(ETerm, ETerm, bool)>,
    shared: Vec<ETerm>,
}

fn split_literals(lits: &[Literal]) -> Result<Split> {
    let mut s = Split {
        arith: Vec::new(),
        diseqs: Vec::new(),
        euf: Vec::new(),
        shared: Vec::new(),
    };
    let mut shared = BTreeSet::new();
    for (atom, positive) in lits {
        match atom {
            Atom::Bool(v) => {
                return Err(WmiError::NonArithmeticLiteral(v.to_string()));
            }
            Atom::Lra { term, rel } => {
                let expr: LinExpr = (
                    term.coeffs
                        .iter()
                        .map(|(v, c)| (LpVar::Real(v.clone()), c.clone()))
                        .collect(),
                    term.constant.clone(),
                );
                if *rel == Relation::Eq && !positive {
                    s.diseqs.push(expr);
                } else {
                    s.arith.push((expr, *rel, *positive));
                }
            }
            Atom::EufEq { lhs, rhs } => {
                s.euf.push((lhs.clone(), rhs.clone(), *positive));
                collect_arith_leaves(lhs, &mut shared);
                collect_arith_leaves(rhs, &mut shared);
                if let (Some(a), Some(b)) = (eterm_linear(lhs), eterm_linear(rhs)) {
                    let d = diff(&a, &b);
                    if *positive {
                        s.arith.push((d, Relation::Eq, true));
                    } else {
                        s.diseqs.push(d);
                    }
                }
            }
        }
    }
    s.shared = shared.into_iter().collect();
    Ok(s)
}

fn base_simplex(split: &Split) -> Option<Simplex> {
    let mut sx = Simplex::new();
    for (i, ((coeffs, c), rel, pos)) in split.arith.iter().enumerate() {
        if sx.assert_literal(coeffs, c, *rel, *pos, i).is_err() {
            return None;
        }
    }
    if sx.check().is_err() {
        return None;
    }
    Some(sx)
}

fn base_euf(split: &Split) -> Euf {
    let mut euf = Euf::new();
    for (a, b, pos) in &split.euf {
        if *pos {
            euf.assert_eq(a, b);
        } else {
            euf.assert_neq(a, b);
        }
    }
    euf
}

/// Does the current simplex state entail `expr = 0`? Probed by refutation of
/// both strict sides on clones.
fn entails_zero(sx: &Simplex, expr: &LinExpr) -> bool {
    let lt_unsat = {
        let mut c = sx.clone();
        c.assert_literal(&expr.0, &expr.1, Relation::Lt, true, usize::MAX)
            .is_err()
            || c.check().is_err()
    };
    if !lt_unsat {
        return false;
    }
    let mut c = sx.clone();
    let neg: LinExpr = (
        expr.0.iter().map(|(v, k)| (v.clone(), -k.clone())).collect(),
        -expr.1.clone(),
    );
    c.assert_literal(&neg.0, &neg.1, Relation::Lt, true, usize::MAX)
        .is_err()
        || c.check().is_err()
}

/// Equality exchange to fixpoint between the arithmetic and the congruence
/// solver; both sides are convex, so propagating single entailed equalities
/// is complete for the combination.
fn combine(mut sx: Simplex, mut euf: Euf, shared: &[ETerm]) -> Option<(Simplex, Euf)> {
    let mut known_eq: BTreeSet<(ETerm, ETerm)> = BTreeSet::new();
    loop {
        if !euf.check() {
            return None;
        }
        let mut changed = false;
        for (a, b) in euf.entailed_leaf_equalities() {
            let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            if !known_eq.insert(key) {
                continue;
            }
            changed = true;
            let d = diff(&eterm_linear(&a).unwrap(), &eterm_linear(&b).unwrap());
            if sx.assert_literal(&d.0, &d.1, Relation::Eq, true, usize::MAX).is_err()
                || sx.check().is_err()
            {
                return None;
            }
        }
        for i in 0..shared.len() {
            for j in (i + 1)..shared.len() {
                let (a, b) = (&shared[i], &shared[j]);
                if matches!((a, b), (ETerm::Num(_), ETerm::Num(_))) {
                    continue;
                }
                let key = (a.clone(), b.clone());
                if known_eq.contains(&key) {
                    continue;
                }
                let d = diff(&eterm_linear(a).unwrap(), &eterm_linear(b).unwrap());
                if entails_zero(&sx, &d) {
                    known_eq.insert(key);
                    euf.assert_eq(a, b);
                    changed = true;
                }
            }
        }
        if !changed {
            return Some((sx, euf));
        }
    }
}

/// Search over disequality sign splits; returns a combined solver state for
/// one satisfiable branch, if any.
fn search(split: &Split, sx: Simplex, depth: usize) -> Option<(Simplex, Euf)> {
    if depth == split.diseqs.len() {
        return combine(sx, base_euf(split), &split.shared);
    }
    let (coeffs, c) = &split.diseqs[depth];
    for flip in [false, true] {
        let (coeffs, c) = if flip {
            (
                coeffs.iter().map(|(v, k)| (v.clone(), -k.clone())).collect(),
                -c.clone(),
            )
        } else {
            (coeffs.clone(), c.clone())
        };
        let mut branch = sx.clone();
        if branch
            .assert_literal(&coeffs, &c, Relation::Lt, true, usize::MAX)
            .is_ok()
            && branch.check().is_ok()
        {
            if let Some(found) = search(split, branch, depth + 1) {
                return Some(found);
            }
        }
    }
    None
}

/// Satisfiability of a conjunction of arithmetic and uninterpreted-equality
/// literals. Boolean atoms are rejected; the caller strips them first.
pub fn check_theory(lits: &[Literal]) -> Result<bool> {
    let split = split_literals(lits)?;
    let Some(sx) = base_simplex(&split) else {
        return Ok(false);
    };
    Ok(search(&split, sx, 0).is_some())
}

/// Greedy deletion-minimized unsatisfiable subset. Precondition: the input
/// conjunction is unsatisfiable.
pub fn theory_core(lits: &[Literal]) -> Result<Vec<Literal>> {
    let mut core: Vec<Literal> = lits.to_vec();
    let mut i = 0;
    while i < core.len() {
        let mut without = core.clone();
        without.remove(i);
        if !check_theory(&without)? {
            core = without;
        } else {
            i += 1;
        }
    }
    Ok(core)
}

/// A concrete witness: rational values for the arithmetic variables and
/// finite tables for the uninterpreted symbols.
#[derive(Clone, Debug)]
pub struct TheoryModel {
    pub values: BTreeMap<LpVar, Rat>,
    pub tables: BTreeMap<EufSymbol, BTreeMap<Vec<Rat>, Rat>>,
}

impl TheoryModel {
    pub fn eval(&self, t: &ETerm) -> Option<Rat> {
        match t {
            ETerm::Num(c) => Some(c.clone()),
            ETerm::Real(v) => self.values.get(&LpVar::Real(v.clone())).cloned(),
            ETerm::Y(y) => self.values.get(&LpVar::Y(*y)).cloned(),
            ETerm::App(f, args) => {
                let argv: Option<Vec<Rat>> = args.iter().map(|a| self.eval(a)).collect();
                self.tables.get(f)?.get(&argv?).cloned()
            }
        }
    }
}

/// Construct a witness for a satisfiable conjunction: pick the arrangement
/// where shared terms not entailed equal are made distinct (complete for
/// convex theories), read off the simplex model, then fill function tables
/// congruently with fresh distinct values for purely uninterpreted classes.
pub fn theory_model(lits: &[Literal]) -> Result<Option<TheoryModel>> {
    let split = split_literals(lits)?;
    let Some(sx) = base_simplex(&split) else {
        return Ok(None);
    };
    let Some((sx, mut euf)) = search(&split, sx, 0) else {
        return Ok(None);
    };

    // Force apart every shared pair that is not entailed equal, so distinct
    // classes end up with distinct values.
    let mut forced = split;
    for i in 0..forced.shared.len() {
        for j in (i + 1)..forced.shared.len() {
            let (a, b) = (forced.shared[i].clone(), forced.shared[j].clone());
            if matches!((&a, &b), (ETerm::Num(_), ETerm::Num(_))) {
                continue;
            }
            if euf.entailed_eq(&a, &b) {
                continue;
            }
            let d = diff(&eterm_linear(&a).unwrap(), &eterm_linear(&b).unwrap());
            if entails_zero(&sx, &d) {
                continue;
            }
            forced.diseqs.push(d);
            forced.euf.push((a, b, false));
        }
    }
    let Some(base) = base_simplex(&forced) else {
        return Err(WmiError::Internal("arrangement refinement failed".into()));
    };
    let Some((sx, mut euf)) = search(&forced, base, 0) else {
        return Err(WmiError::Internal("arrangement refinement failed".into()));
    };

    let mut values = sx.model();
    // Make sure every shared leaf has a value even if it never reached the
    // simplex tableau.
    for t in &forced.shared {
        match t {
            ETerm::Real(v) => {
                values.entry(LpVar::Real(v.clone())).or_insert_with(Rat::zero);
            }
            ETerm::Y(y) => {
                values.entry(LpVar::Y(*y)).or_insert_with(Rat::zero);
            }
            _ => {}
        }
    }
    let leaf_value = |t: &ETerm, values: &BTreeMap<LpVar, Rat>| -> Option<Rat> {
        match t {
            ETerm::Num(c) => Some(c.clone()),
            ETerm::Real(v) => values.get(&LpVar::Real(v.clone())).cloned(),
            ETerm::Y(y) => values.get(&LpVar::Y(*y)).cloned(),
            ETerm::App(_, _) => None,
        }
    };

    // One value per congruence class: a leaf value when the class has one,
    // otherwise a fresh value larger than everything seen.
    let classes = euf.classes();
    let mut used: BTreeSet<Rat> = values.values().cloned().collect();
    let mut fresh = used
        .iter()
        .next_back()
        .cloned()
        .unwrap_or_else(Rat::zero);
    let mut class_value: Vec<Rat> = Vec::new();
    for class in &classes {
        let v = match class.iter().find_map(|t| leaf_value(t, &values)) {
            Some(v) => v,
            None => loop {
                fresh += Rat::from_integer(1.into());
                if !used.contains(&fresh) {
                    break fresh.clone();
                }
            },
        };
        used.insert(v.clone());
        class_value.push(v);
    }

    // Fill tables by evaluating arguments through their class values.
    let mut term_value: BTreeMap<ETerm, Rat> = BTreeMap::new();
    for (ci, class) in classes.iter().enumerate() {
        for t in class {
            term_value.insert(t.clone(), class_value[ci].clone());
        }
    }
    let mut tables: BTreeMap<EufSymbol, BTreeMap<Vec<Rat>, Rat>> = BTreeMap::new();
    for class in &classes {
        for t in class {
            if let ETerm::App(f, args) = t {
                let argv: Vec<Rat> = args
                    .iter()
                    .map(|a| term_value[a].clone())
                    .collect();
                let out = term_value[t].clone();
                let prev = tables.entry(f.clone()).or_default().insert(argv, out.clone());
                if let Some(p) = prev {
                    if p != out {
                        return Err(WmiError::Internal(
                            "inconsistent function table".into(),
                        ));
                    }
                }
            }
        }
    }
    Ok(Some(TheoryModel { values, tables }))
}

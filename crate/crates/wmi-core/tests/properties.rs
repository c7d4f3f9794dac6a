//! Randomized property checks for the core data model: atom
//! canonicalization preserves semantics, formula simplification preserves
//! models, and linear-term algebra evaluates linearly.

use std::collections::BTreeMap;

use proptest::prelude::*;

use wmi_core::model::atom::{Atom, CanonAtom, InputRel, Relation};
use wmi_core::model::formula::{restrict_formula, simplify, Formula};
use wmi_core::model::linear::LinearTerm;
use wmi_core::model::vars::{BoolVar, RealVar};
use wmi_core::{rat, Rat};

fn rational() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=8).prop_map(|(n, d)| rat(n, d))
}

fn real_vars() -> Vec<RealVar> {
    (1..=3).map(|i| RealVar::new(&format!("x{i}"))).collect()
}

fn linear_term() -> impl Strategy<Value = LinearTerm> {
    (rational(), proptest::collection::vec(rational(), 3)).prop_map(|(c, coeffs)| {
        let mut t = LinearTerm::constant(c);
        for (v, k) in real_vars().iter().zip(coeffs) {
            t.add_term(v, &k);
        }
        t
    })
}

fn point() -> impl Strategy<Value = BTreeMap<RealVar, Rat>> {
    proptest::collection::vec(rational(), 3)
        .prop_map(|vals| real_vars().into_iter().zip(vals).collect())
}

fn input_rel() -> impl Strategy<Value = InputRel> {
    prop_oneof![
        Just(InputRel::Le),
        Just(InputRel::Lt),
        Just(InputRel::Ge),
        Just(InputRel::Gt),
        Just(InputRel::Eq),
        Just(InputRel::Ne),
    ]
}

/// Truth of `term rel 0` evaluated directly at a point.
fn holds_at(term: &LinearTerm, rel: InputRel, p: &BTreeMap<RealVar, Rat>) -> bool {
    let v = term.eval(p);
    let zero = Rat::from_integer(0.into());
    match rel {
        InputRel::Le => v <= zero,
        InputRel::Lt => v < zero,
        InputRel::Ge => v >= zero,
        InputRel::Gt => v > zero,
        InputRel::Eq => v == zero,
        InputRel::Ne => v != zero,
    }
}

/// Truth of a canonical atom at a point.
fn atom_holds_at(a: &Atom, p: &BTreeMap<RealVar, Rat>) -> bool {
    match a {
        Atom::Lra { term, rel } => {
            let v = term.eval(p);
            let zero = Rat::from_integer(0.into());
            match rel {
                Relation::Le => v <= zero,
                Relation::Lt => v < zero,
                Relation::Eq => v == zero,
            }
        }
        other => panic!("not an arithmetic atom: {other}"),
    }
}

fn bool_formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (1..=4usize).prop_map(|i| Formula::Atom(Atom::Bool(BoolVar::new(&format!("b{i}"))))),
    ];
    leaf.prop_recursive(depth, 32, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::and),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

fn bool_assignment() -> impl Strategy<Value = BTreeMap<Atom, bool>> {
    proptest::collection::vec(any::<bool>(), 4).prop_map(|vals| {
        (1..=4usize)
            .map(|i| Atom::Bool(BoolVar::new(&format!("b{i}"))))
            .zip(vals)
            .collect()
    })
}

proptest! {
    #[test]
    fn canonicalization_preserves_semantics(
        t in linear_term(),
        rel in input_rel(),
        p in point(),
    ) {
        let direct = holds_at(&t, rel, &p);
        let canon = match Atom::lra(t, rel) {
            CanonAtom::Const(b) => b,
            CanonAtom::Lit(a, pol) => atom_holds_at(&a, &p) == pol,
        };
        prop_assert_eq!(direct, canon);
    }

    #[test]
    fn canonical_atoms_have_unit_positive_leading_coefficient(
        t in linear_term(),
        rel in input_rel(),
    ) {
        if let CanonAtom::Lit(Atom::Lra { term, .. }, _) = Atom::lra(t, rel) {
            let lead = term.leading_coeff().unwrap().clone();
            prop_assert_eq!(lead, Rat::from_integer(1.into()));
        }
    }

    #[test]
    fn simplify_preserves_models(f in bool_formula(3), mu in bool_assignment()) {
        let direct = restrict_formula(&f, &mu);
        let simplified = restrict_formula(&simplify(&f), &mu);
        prop_assert!(direct.is_true() || direct.is_false());
        prop_assert_eq!(direct.is_true(), simplified.is_true());
    }

    #[test]
    fn restriction_is_idempotent(f in bool_formula(3), mu in bool_assignment()) {
        let once = restrict_formula(&f, &mu);
        let twice = restrict_formula(&once, &mu);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn linear_terms_evaluate_linearly(
        a in linear_term(),
        b in linear_term(),
        k in rational(),
        p in point(),
    ) {
        prop_assert_eq!((&a + &b).eval(&p), a.eval(&p) + b.eval(&p));
        prop_assert_eq!((&a - &b).eval(&p), a.eval(&p) - b.eval(&p));
        prop_assert_eq!(a.scale(&k).eval(&p), a.eval(&p) * &k);
        prop_assert_eq!((-&a).eval(&p), -a.eval(&p));
    }
}

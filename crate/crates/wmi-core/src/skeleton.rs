//! Skeleton encoding of conditional weight functions: every if-then-else is
//! labeled by a fresh y variable whose value is pinned to the selected
//! branch through definition clauses over uninterpreted function symbols.
//! Also hosts the condition-labeling transformation used by the plain
//! predicate-abstraction algorithm.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::atom::{Atom, ETerm, EufSymbol};
use crate::model::formula::{substitute_atoms, Formula};
use crate::model::printer::formula_sexp;
use crate::model::problem::Problem;
use crate::model::vars::{BoolVar, YVar};
use crate::model::weight::{BinOp, WeightTerm};

/// The clause set defining y = w over fresh variables and symbols.
#[derive(Clone, Debug)]
pub struct SkeletonEncoding {
    /// The variable equated to the whole weight.
    pub top: YVar,
    /// Definition clauses; exactly 3 per if-then-else plus the top equation.
    pub defs: Vec<Formula>,
    pub ys: BTreeSet<YVar>,
    /// The condition atoms of the weight.
    pub conditions: BTreeSet<Atom>,
}

impl SkeletonEncoding {
    /// The conjunction of all definition clauses.
    pub fn formula(&self) -> Formula {
        Formula::and(self.defs.clone())
    }

    /// Clause list in the textual dialect, for diagnostics.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("(skeleton (top {})\n", self.top));
        let ys: Vec<String> = self.ys.iter().map(|y| y.to_string()).collect();
        out.push_str(&format!("  (ys {})\n", ys.join(" ")));
        let cs: Vec<String> = self.conditions.iter().map(|a| a.to_string()).collect();
        out.push_str(&format!("  (conditions {})\n", cs.join(" ")));
        out.push_str("  (defs\n");
        for c in &self.defs {
            out.push_str(&format!("    {}\n", formula_sexp(c)));
        }
        out.push_str("))\n");
        out
    }
}

struct Encoder {
    next_y: usize,
    leaf_symbols: BTreeMap<WeightTerm, EufSymbol>,
}

impl Encoder {
    fn new() -> Self {
        Encoder {
            next_y: 1,
            leaf_symbols: BTreeMap::new(),
        }
    }

    fn fresh_y(&mut self) -> YVar {
        let y = YVar(self.next_y);
        self.next_y += 1;
        y
    }

    /// One symbol per distinct conditional-free branch term, applied to the
    /// real variables the term mentions.
    fn leaf(&mut self, term: &WeightTerm) -> ETerm {
        let n = self.leaf_symbols.len() + 1;
        let sym = self
            .leaf_symbols
            .entry(term.clone())
            .or_insert_with(|| EufSymbol::new(&format!("f^leaf{}", n)))
            .clone();
        let mut vars = BTreeSet::new();
        term.collect_real_vars(&mut vars);
        ETerm::App(sym, vars.into_iter().map(ETerm::Real).collect())
    }

    /// Negations of the conditional context, the guard prefix of every
    /// definition clause, in context insertion order.
    fn guards(conds: &[(Formula, bool)]) -> Vec<Formula> {
        conds
            .iter()
            .map(|(psi, pol)| {
                if *pol {
                    Formula::not(psi.clone())
                } else {
                    psi.clone()
                }
            })
            .collect()
    }

    fn convert(
        &mut self,
        term: &WeightTerm,
        conds: &mut Vec<(Formula, bool)>,
        defs: &mut Vec<Formula>,
        ys: &mut BTreeSet<YVar>,
    ) -> ETerm {
        match term {
            WeightTerm::Const(c) => ETerm::Num(c.clone()),
            WeightTerm::Var(v) => ETerm::Real(v.clone()),
            WeightTerm::BinOp(op, l, r) => {
                let name = match op {
                    BinOp::Add => "f^+",
                    BinOp::Sub => "f^-",
                    BinOp::Mul => "f^*",
                    BinOp::Div => "f^/",
                };
                let a = self.convert(l, conds, defs, ys);
                let b = self.convert(r, conds, defs, ys);
                ETerm::App(EufSymbol::new(name), vec![a, b])
            }
            WeightTerm::Func(g, args) => {
                let converted = args
                    .iter()
                    .map(|a| self.convert(a, conds, defs, ys))
                    .collect();
                ETerm::App(EufSymbol::new(&format!("f^{}", g)), converted)
            }
            WeightTerm::Ite(psi, t1, t2) => {
                conds.push((psi.clone(), true));
                let t1p = self.convert_branch(t1, conds, defs, ys);
                conds.pop();
                conds.push((psi.clone(), false));
                let t2p = self.convert_branch(t2, conds, defs, ys);
                conds.pop();
                let y = self.fresh_y();
                ys.insert(y);
                let guards = Self::guards(conds);
                let eq1 = Formula::from_canon(Atom::euf_eq(ETerm::Y(y), t1p));
                let eq2 = Formula::from_canon(Atom::euf_eq(ETerm::Y(y), t2p));
                let mut c1 = guards.clone();
                c1.push(Formula::not(psi.clone()));
                c1.push(eq1.clone());
                let mut c2 = guards.clone();
                c2.push(psi.clone());
                c2.push(eq2.clone());
                let mut c3 = guards;
                c3.push(Formula::not(eq1));
                c3.push(Formula::not(eq2));
                defs.push(Formula::or(c1));
                defs.push(Formula::or(c2));
                defs.push(Formula::or(c3));
                ETerm::Y(y)
            }
        }
    }

    /// A branch of an if-then-else: conditional-free branches collapse to a
    /// single leaf symbol, anything else converts structurally.
    fn convert_branch(
        &mut self,
        term: &WeightTerm,
        conds: &mut Vec<(Formula, bool)>,
        defs: &mut Vec<Formula>,
        ys: &mut BTreeSet<YVar>,
    ) -> ETerm {
        match term {
            WeightTerm::Const(_) | WeightTerm::Var(_) => self.convert(term, conds, defs, ys),
            _ if term.is_fi() => self.leaf(term),
            _ => self.convert(term, conds, defs, ys),
        }
    }
}

/// Encode a weight as (y = w') plus the definition clauses of each
/// conditional. y variables are numbered post-order: the deepest then-side
/// conditional first, the top one last, followed by the reserved top y.
pub fn encode_skeleton(w: &WeightTerm) -> SkeletonEncoding {
    let mut enc = Encoder::new();
    let mut defs = Vec::new();
    let mut ys = BTreeSet::new();
    let mut conds = Vec::new();
    let wp = enc.convert(w, &mut conds, &mut defs, &mut ys);
    let top = YVar(0);
    ys.insert(top);
    defs.push(Formula::from_canon(Atom::euf_eq(ETerm::Y(top), wp)));
    SkeletonEncoding {
        top,
        defs,
        ys,
        conditions: w.atoms(),
    }
}

/// A problem whose weight conditions are purely propositional, obtained by
/// naming each arithmetic condition atom with a fresh Boolean.
#[derive(Clone, Debug)]
pub struct LabeledProblem {
    pub phi_star: Formula,
    pub weight_star: WeightTerm,
    pub b_vars: Vec<BoolVar>,
    pub condition_map: BTreeMap<BoolVar, Atom>,
}

/// Replace every arithmetic atom occurring in the weight's conditions by a
/// fresh Boolean B_k, and conjoin the defining equivalences B_k <-> psi_k
/// onto phi and chi. Distinct occurrences of one canonical atom share a B.
pub fn label_conditions(p: &Problem) -> LabeledProblem {
    let mut subst: BTreeMap<Atom, Formula> = BTreeMap::new();
    let mut b_vars = Vec::new();
    let mut condition_map = BTreeMap::new();
    let mut k = 0usize;
    for atom in p.weight.atoms() {
        if atom.is_bool() {
            continue;
        }
        let b = loop {
            k += 1;
            let cand = BoolVar::new(&format!("B{}", k));
            if !p.bools.contains(&cand) {
                break cand;
            }
        };
        subst.insert(atom.clone(), Formula::Atom(Atom::Bool(b.clone())));
        condition_map.insert(b.clone(), atom);
        b_vars.push(b);
    }
    let weight_star = substitute_weight_conditions(&p.weight, &subst);
    let mut parts = vec![p.phi.clone(), p.chi.clone()];
    for b in &b_vars {
        parts.push(Formula::iff(
            Formula::Atom(Atom::Bool(b.clone())),
            Formula::Atom(condition_map[b].clone()),
        ));
    }
    LabeledProblem {
        phi_star: Formula::and(parts),
        weight_star,
        b_vars,
        condition_map,
    }
}

fn substitute_weight_conditions(
    w: &WeightTerm,
    subst: &BTreeMap<Atom, Formula>,
) -> WeightTerm {
    match w {
        WeightTerm::Const(_) | WeightTerm::Var(_) => w.clone(),
        WeightTerm::BinOp(op, l, r) => WeightTerm::binop(
            *op,
            substitute_weight_conditions(l, subst),
            substitute_weight_conditions(r, subst),
        ),
        WeightTerm::Func(name, args) => WeightTerm::Func(
            name.clone(),
            args.iter()
                .map(|a| substitute_weight_conditions(a, subst))
                .collect(),
        ),
        WeightTerm::Ite(c, t, e) => WeightTerm::Ite(
            substitute_atoms(c, subst),
            Box::new(substitute_weight_conditions(t, subst)),
            Box::new(substitute_weight_conditions(e, subst)),
        ),
    }
}

/// The projection universe for structure-aware enumeration: the atoms of
/// phi and chi plus the weight's condition atoms.
pub fn select_conditions(enc: &SkeletonEncoding, p: &Problem) -> BTreeSet<Atom> {
    let mut atoms = p.phi.atoms();
    atoms.extend(p.chi.atoms());
    atoms.extend(enc.conditions.iter().cloned());
    atoms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parser::parse_problem;

    /// The running two-real/two-Boolean fixture: a five-conditional weight
    /// tree over A1, A2, (x1>=1), (x2>=1), (x2>=2).
    pub fn fixture_problem() -> Problem {
        parse_problem(
            "(declare-real x1) (declare-real x2) (declare-bool a1) (declare-bool a2)\
             (phi true)\
             (chi (and (<= 0 x1) (<= x1 2) (<= 0 x2) (<= x2 3)))\
             (weight\
               (ite a1\
                    (ite (>= x1 1)\
                         (ite (>= x2 1) (* x1 x2) (+ x1 1))\
                         (ite (>= x2 2) (* x2 x2) (+ x1 x2)))\
                    (ite a2 (+ (* x1 x1) 1) (* 2 x2))))",
        )
        .unwrap()
    }

    #[test]
    fn clause_count_is_linear_in_conditionals() {
        let p = fixture_problem();
        let enc = encode_skeleton(&p.weight);
        assert_eq!(p.weight.count_ite(), 5);
        assert_eq!(enc.defs.len(), 3 * 5 + 1);
        assert_eq!(enc.ys.len(), 6);
        assert_eq!(enc.conditions.len(), 5);
    }

    #[test]
    fn y_numbering_follows_post_order() {
        let p = fixture_problem();
        let enc = encode_skeleton(&p.weight);
        // Innermost then-side conditional labeled first; top equation last.
        let ys: Vec<YVar> = enc.ys.iter().copied().collect();
        assert_eq!(ys, vec![YVar(0), YVar(1), YVar(2), YVar(3), YVar(4), YVar(5)]);
        let last = enc.defs.last().unwrap();
        assert_eq!(
            *last,
            Formula::from_canon(Atom::euf_eq(ETerm::Y(YVar(0)), ETerm::Y(YVar(5))))
        );
    }

    #[test]
    fn first_conditional_clauses_have_full_guard() {
        let p = fixture_problem();
        let enc = encode_skeleton(&p.weight);
        // Clause 1 guards: not a1, not (x1>=1), not (x2>=1), then y1 = leaf.
        match &enc.defs[0] {
            Formula::Or(parts) => {
                assert_eq!(parts.len(), 4);
                assert!(matches!(
                    parts[3].as_literal(),
                    Some((Atom::EufEq { .. }, true))
                ));
            }
            other => panic!("unexpected {other}"),
        }
        // Mutual-exclusion clause: guards plus two negated equalities.
        match &enc.defs[2] {
            Formula::Or(parts) => {
                assert_eq!(parts.len(), 4);
                assert!(matches!(
                    parts[2].as_literal(),
                    Some((Atom::EufEq { .. }, false))
                ));
                assert!(matches!(
                    parts[3].as_literal(),
                    Some((Atom::EufEq { .. }, false))
                ));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn shared_leaves_share_symbols() {
        let p = parse_problem(
            "(declare-real x) (declare-bool a) (declare-bool b)\
             (chi (and (<= 0 x) (<= x 1)))\
             (weight (* (ite a (* x x) 1) (ite b (* x x) 1)))",
        )
        .unwrap();
        let enc = encode_skeleton(&p.weight);
        let text = enc.dump();
        assert!(text.contains("f^leaf1"));
        assert!(!text.contains("f^leaf3"));
    }

    #[test]
    fn fi_weight_encodes_to_single_equation() {
        let p = parse_problem("(declare-real x) (chi (<= 0 x)) (weight 5)").unwrap();
        let enc = encode_skeleton(&p.weight);
        assert_eq!(enc.defs.len(), 1);
        assert_eq!(enc.ys.len(), 1);
        assert!(enc.conditions.is_empty());
    }

    #[test]
    fn spine_operators_become_function_applications() {
        // A product of two conditionals keeps the multiplication as an
        // uninterpreted application over the two ys.
        let p = parse_problem(
            "(declare-real x) (declare-bool a) (declare-bool b)\
             (chi (and (<= 0 x) (<= x 1)))\
             (weight (* (ite a x 1) (ite b x 2)))",
        )
        .unwrap();
        let enc = encode_skeleton(&p.weight);
        assert_eq!(enc.defs.len(), 7);
        let top = enc.defs.last().unwrap();
        let text = formula_sexp(top);
        assert!(text.contains("f^*"), "got {text}");
    }

    #[test]
    fn labeling_round_trips() {
        let p = fixture_problem();
        let lab = label_conditions(&p);
        assert_eq!(lab.b_vars.len(), 3);
        assert!(lab.weight_star.atoms().iter().all(|a| a.is_bool()));
        // Substituting the conditions back restores the original weight.
        let back: BTreeMap<Atom, Formula> = lab
            .condition_map
            .iter()
            .map(|(b, a)| (Atom::Bool(b.clone()), Formula::Atom(a.clone())))
            .collect();
        let restored = substitute_weight_conditions(&lab.weight_star, &back);
        assert_eq!(restored, p.weight);
    }

    #[test]
    fn projection_universe_unions_atoms() {
        let p = fixture_problem();
        let enc = encode_skeleton(&p.weight);
        let atoms = select_conditions(&enc, &p);
        // Four bounds from chi, two Booleans, three arithmetic conditions.
        assert_eq!(atoms.len(), 9);
    }
}

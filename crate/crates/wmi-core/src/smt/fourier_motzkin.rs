use std::collections::BTreeMap;

use num::Signed;

use crate::model::atom::Relation;
use crate::model::linear::LinearTerm;
use crate::model::vars::RealVar;
use crate::Rat;

/// One inequality `term (≤|<) 0` during elimination.
#[derive(Clone, Debug)]
struct Ineq {
    term: LinearTerm,
    strict: bool,
}

/// Feasibility of a conjunction of linear literals by variable elimination.
/// Independent of the simplex implementation on purpose: it serves as its
/// cross-checking oracle. Disequalities are handled by case splitting.
pub fn fm_feasible(lits: &[(LinearTerm, Relation, bool)]) -> bool {
    let mut ineqs = Vec::new();
    let mut diseqs = Vec::new();
    for (term, rel, positive) in lits {
        match (rel, positive) {
            (Relation::Le, true) => ineqs.push(Ineq {
                term: term.clone(),
                strict: false,
            }),
            (Relation::Lt, true) => ineqs.push(Ineq {
                term: term.clone(),
                strict: true,
            }),
            // not (t <= 0)  ==  -t < 0
            (Relation::Le, false) => ineqs.push(Ineq {
                term: -term,
                strict: true,
            }),
            // not (t < 0)  ==  -t <= 0
            (Relation::Lt, false) => ineqs.push(Ineq {
                term: -term,
                strict: false,
            }),
            (Relation::Eq, true) => {
                ineqs.push(Ineq {
                    term: term.clone(),
                    strict: false,
                });
                ineqs.push(Ineq {
                    term: -term,
                    strict: false,
                });
            }
            (Relation::Eq, false) => diseqs.push(term.clone()),
        }
    }
    feasible_with_diseqs(ineqs, &diseqs)
}

fn feasible_with_diseqs(ineqs: Vec<Ineq>, diseqs: &[LinearTerm]) -> bool {
    match diseqs.split_first() {
        None => eliminate_all(ineqs),
        Some((t, rest)) => {
            // t != 0 splits into t < 0 or t > 0.
            let mut below = ineqs.clone();
            below.push(Ineq {
                term: t.clone(),
                strict: true,
            });
            if feasible_with_diseqs(below, rest) {
                return true;
            }
            let mut above = ineqs;
            above.push(Ineq {
                term: -t,
                strict: true,
            });
            feasible_with_diseqs(above, rest)
        }
    }
}

fn eliminate_all(mut ineqs: Vec<Ineq>) -> bool {
    loop {
        // Resolve ground inequalities immediately and merge duplicates
        // (normalization makes positive multiples of one halfspace
        // identical), keeping the stricter of two merged forms. Without
        // this compaction the constraint count can grow quadratically per
        // round on dense inputs.
        let mut merged: BTreeMap<LinearTerm, bool> = BTreeMap::new();
        for i in ineqs {
            if i.term.is_constant() {
                if !ground_holds(&i.term.constant, i.strict) {
                    return false;
                }
                continue;
            }
            let strict = merged.entry(i.term.normalized()).or_insert(i.strict);
            *strict = *strict || i.strict;
        }
        if merged.is_empty() {
            return true;
        }
        // Eliminate the variable producing the fewest resolvents
        // (upper-bound count times lower-bound count).
        let mut counts: BTreeMap<RealVar, (usize, usize)> = BTreeMap::new();
        for t in merged.keys() {
            for (v, c) in &t.coeffs {
                let e = counts.entry(v.clone()).or_insert((0, 0));
                if c.is_positive() {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        let v = counts
            .iter()
            .min_by_key(|(_, (u, l))| u * l)
            .map(|(v, _)| v.clone())
            .expect("non-ground inequality has a variable");
        let compacted = merged
            .into_iter()
            .map(|(term, strict)| Ineq { term, strict })
            .collect();
        ineqs = eliminate(compacted, &v);
    }
}

fn ground_holds(k: &Rat, strict: bool) -> bool {
    if strict {
        k.is_negative()
    } else {
        !k.is_positive()
    }
}

fn eliminate(ineqs: Vec<Ineq>, v: &RealVar) -> Vec<Ineq> {
    let mut uppers: Vec<(LinearTerm, bool)> = Vec::new(); // v <= rest (or <)
    let mut lowers: Vec<(LinearTerm, bool)> = Vec::new(); // v >= rest (or >)
    let mut out = Vec::new();
    for i in ineqs {
        let coeff = match i.term.coeffs.get(v) {
            None => {
                out.push(i);
                continue;
            }
            Some(c) => c.clone(),
        };
        // a*v + rest (≤|<) 0  =>  v (≤|≥) -rest/a
        let mut rest = i.term.clone();
        rest.coeffs.remove(v);
        let bound = rest.scale(&(-coeff.clone().recip()));
        if coeff.is_positive() {
            uppers.push((bound, i.strict));
        } else {
            lowers.push((bound, i.strict));
        }
    }
    for (lo, lo_strict) in &lowers {
        for (up, up_strict) in &uppers {
            // lo (<|<=) v (<|<=) up  =>  lo - up (<|<=) 0
            out.push(Ineq {
                term: lo - up,
                strict: *lo_strict || *up_strict,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::atom::{Atom, CanonAtom, InputRel};
    use crate::rint;

    fn x(name: &str) -> LinearTerm {
        LinearTerm::var(RealVar::new(name))
    }

    fn k(n: i64) -> LinearTerm {
        LinearTerm::constant(rint(n))
    }

    #[test]
    fn box_is_feasible() {
        // 0 <= x <= 1
        let lits = vec![
            (&k(0) - &x("x"), Relation::Le, true),
            (&x("x") - &k(1), Relation::Le, true),
        ];
        assert!(fm_feasible(&lits));
    }

    #[test]
    fn empty_strict_interval_is_infeasible() {
        // x < 0 and x > 0
        let lits = vec![
            (x("x"), Relation::Lt, true),
            (-&x("x"), Relation::Lt, true),
        ];
        assert!(!fm_feasible(&lits));
        // x <= 0 and x >= 0 is the single point 0.
        let lits = vec![
            (x("x"), Relation::Le, true),
            (-&x("x"), Relation::Le, true),
        ];
        assert!(fm_feasible(&lits));
    }

    #[test]
    fn disequality_splits() {
        // x = 0 and x != 0
        let lits = vec![
            (x("x"), Relation::Eq, true),
            (x("x"), Relation::Eq, false),
        ];
        assert!(!fm_feasible(&lits));
        // 0 <= x <= 1 and x != 1/2 is fine.
        let lits = vec![
            (&k(0) - &x("x"), Relation::Le, true),
            (&x("x") - &k(1), Relation::Le, true),
            (&x("x") - &LinearTerm::constant(crate::rat(1, 2)), Relation::Eq, false),
        ];
        assert!(fm_feasible(&lits));
    }

    #[test]
    fn chained_variables() {
        // x < y, y < z, z < x is infeasible
        let lits = vec![
            (&x("x") - &x("y"), Relation::Lt, true),
            (&x("y") - &x("z"), Relation::Lt, true),
            (&x("z") - &x("x"), Relation::Lt, true),
        ];
        assert!(!fm_feasible(&lits));
    }

    #[test]
    fn agrees_with_atom_canonicalization() {
        // x >= 1 parsed as a negated atom still means x >= 1 here.
        let canon = Atom::lra(&x("x") - &k(1), InputRel::Ge);
        let (term, rel, pos) = match canon {
            CanonAtom::Lit(Atom::Lra { term, rel }, pos) => (term, rel, pos),
            other => panic!("unexpected {other:?}"),
        };
        let lits = vec![
            (term, rel, pos),
            (&x("x") - &k(0), Relation::Lt, true), // x < 0
        ];
        assert!(!fm_feasible(&lits));
    }
}

use std::collections::BTreeMap;

use crate::model::atom::{ETerm, EufSymbol};
use crate::Rat;

/// Congruence closure over uninterpreted-function terms, with rational
/// numerals as interpreted distinct constants. Naive fixpoint propagation:
/// term counts here are tiny (one application per weight leaf or operator).
#[derive(Clone, Default)]
pub struct Euf {
    terms: Vec<ETerm>,
    apps: Vec<Option<(EufSymbol, Vec<usize>)>>,
    ids: BTreeMap<ETerm, usize>,
    parent: Vec<usize>,
    diseqs: Vec<(usize, usize)>,
}

impl Euf {
    pub fn new() -> Self {
        Euf::default()
    }

    pub fn intern(&mut self, t: &ETerm) -> usize {
        if let Some(&i) = self.ids.get(t) {
            return i;
        }
        let app = match t {
            ETerm::App(f, args) => {
                let arg_ids = args.iter().map(|a| self.intern(a)).collect();
                Some((f.clone(), arg_ids))
            }
            _ => None,
        };
        let i = self.terms.len();
        self.terms.push(t.clone());
        self.apps.push(app);
        self.parent.push(i);
        self.ids.insert(t.clone(), i);
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            let p = self.parent[i];
            self.parent[i] = self.parent[p];
            i = p;
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        // Keep the smaller index as representative, for determinism.
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep;
        true
    }

    pub fn assert_eq(&mut self, a: &ETerm, b: &ETerm) {
        let ia = self.intern(a);
        let ib = self.intern(b);
        self.union(ia, ib);
    }

    pub fn assert_neq(&mut self, a: &ETerm, b: &ETerm) {
        let ia = self.intern(a);
        let ib = self.intern(b);
        self.diseqs.push((ia, ib));
    }

    fn propagate(&mut self) {
        loop {
            let mut merged = false;
            let n = self.terms.len();
            for i in 0..n {
                let Some((fi, argsi)) = self.apps[i].clone() else { continue };
                for j in (i + 1)..n {
                    let Some((fj, argsj)) = self.apps[j].clone() else { continue };
                    if fi != fj || argsi.len() != argsj.len() {
                        continue;
                    }
                    if self.find(i) == self.find(j) {
                        continue;
                    }
                    let congruent = argsi
                        .iter()
                        .zip(&argsj)
                        .all(|(&a, &b)| self.find(a) == self.find(b));
                    if congruent {
                        self.union(i, j);
                        merged = true;
                    }
                }
            }
            if !merged {
                return;
            }
        }
    }

    /// Run closure; true when no disequality or numeral distinctness is
    /// violated.
    pub fn check(&mut self) -> bool {
        self.propagate();
        for k in 0..self.diseqs.len() {
            let (a, b) = self.diseqs[k];
            if self.find(a) == self.find(b) {
                return false;
            }
        }
        // Two distinct numerals in one class contradict their fixed
        // interpretation.
        let mut numeral_of: BTreeMap<usize, Rat> = BTreeMap::new();
        for i in 0..self.terms.len() {
            if let ETerm::Num(c) = &self.terms[i].clone() {
                let r = self.find(i);
                match numeral_of.get(&r) {
                    Some(prev) if prev != c => return false,
                    _ => {
                        numeral_of.insert(r, c.clone());
                    }
                }
            }
        }
        true
    }

    /// After `check`: are the two terms forced equal?
    pub fn entailed_eq(&mut self, a: &ETerm, b: &ETerm) -> bool {
        if self.ids.get(a).is_none() || self.ids.get(b).is_none() {
            return a == b;
        }
        let ia = self.ids[a];
        let ib = self.ids[b];
        self.find(ia) == self.find(ib)
    }

    /// All interned terms grouped by congruence class, classes and members
    /// in term-id order.
    pub fn classes(&mut self) -> Vec<Vec<ETerm>> {
        let n = self.terms.len();
        let mut by_root: BTreeMap<usize, Vec<ETerm>> = BTreeMap::new();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(self.terms[i].clone());
        }
        by_root.into_values().collect()
    }

    /// Pairs of distinct interned non-application terms that ended up equal,
    /// for equality exchange with the arithmetic solver.
    pub fn entailed_leaf_equalities(&mut self) -> Vec<(ETerm, ETerm)> {
        let mut out = Vec::new();
        for class in self.classes() {
            let leaves: Vec<&ETerm> = class.iter().filter(|t| t.is_arith()).collect();
            for w in leaves.windows(2) {
                out.push((w[0].clone(), w[1].clone()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vars::RealVar;
    use crate::rint;

    fn v(name: &str) -> ETerm {
        ETerm::Real(RealVar::new(name))
    }

    fn f(name: &str, args: Vec<ETerm>) -> ETerm {
        ETerm::App(EufSymbol::new(name), args)
    }

    #[test]
    fn congruence_propagates() {
        // x = y entails f(x) = f(y)
        let mut e = Euf::new();
        e.intern(&f("f", vec![v("x")]));
        e.intern(&f("f", vec![v("y")]));
        e.assert_eq(&v("x"), &v("y"));
        assert!(e.check());
        assert!(e.entailed_eq(&f("f", vec![v("x")]), &f("f", vec![v("y")])));
    }

    #[test]
    fn functional_consistency_violation() {
        // x = y, f(x) != f(y) is unsat
        let mut e = Euf::new();
        e.assert_eq(&v("x"), &v("y"));
        e.assert_neq(&f("f", vec![v("x")]), &f("f", vec![v("y")]));
        assert!(!e.check());
    }

    #[test]
    fn distinct_numerals_conflict() {
        // x = 1, x = 2 is unsat through the interpreted constants.
        let mut e = Euf::new();
        e.assert_eq(&v("x"), &ETerm::Num(rint(1)));
        e.assert_eq(&v("x"), &ETerm::Num(rint(2)));
        assert!(!e.check());
        // x = 1, y = 1 puts x and y together, which is fine.
        let mut e2 = Euf::new();
        e2.assert_eq(&v("x"), &ETerm::Num(rint(1)));
        e2.assert_eq(&v("y"), &ETerm::Num(rint(1)));
        assert!(e2.check());
        assert!(e2.entailed_eq(&v("x"), &v("y")));
    }

    #[test]
    fn transitive_chains_over_applications() {
        // g(f(x)) = a, f(x) = b, g(b) != a is unsat.
        let mut e = Euf::new();
        e.assert_eq(&f("g", vec![f("f", vec![v("x")])]), &v("a"));
        e.assert_eq(&f("f", vec![v("x")]), &v("b"));
        e.assert_neq(&f("g", vec![v("b")]), &v("a"));
        assert!(!e.check());
    }

    #[test]
    fn leaf_equality_exchange() {
        let mut e = Euf::new();
        e.assert_eq(&v("x"), &v("y"));
        assert!(e.check());
        let eqs = e.entailed_leaf_equalities();
        assert_eq!(eqs.len(), 1);
    }
}

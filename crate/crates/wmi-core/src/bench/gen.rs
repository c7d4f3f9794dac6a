//! Seeded random generation of WMI problems: random Boolean/arithmetic
//! formula trees of a given depth and branching, and random weight trees
//! mixing conditionals, sums, products and polynomial leaves.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::atom::{Atom, InputRel};
use crate::model::formula::Formula;
use crate::model::linear::LinearTerm;
use crate::model::problem::Problem;
use crate::model::vars::{BoolVar, RealVar};
use crate::model::weight::{BinOp, WeightTerm};
use crate::{rint, Rat};

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Recursion depth of the formula and weight trees.
    pub depth: usize,
    pub n_bool: usize,
    pub n_real: usize,
    /// Children per internal formula node.
    pub branching: usize,
    /// Maximum total degree of polynomial leaves.
    pub poly_degree: u32,
    /// The box every real variable is confined to.
    pub lower: Rat,
    pub upper: Rat,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(depth: usize, n_bool: usize, n_real: usize, seed: u64) -> Self {
        GenConfig {
            depth,
            n_bool,
            n_real,
            branching: 2,
            poly_degree: 2,
            lower: rint(-1),
            upper: rint(1),
            seed,
        }
    }
}

struct Gen<'c> {
    cfg: &'c GenConfig,
    rng: ChaCha8Rng,
    reals: Vec<RealVar>,
    bools: Vec<BoolVar>,
}

impl<'c> Gen<'c> {
    fn new(cfg: &'c GenConfig) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            reals: (1..=cfg.n_real)
                .map(|i| RealVar::new(&format!("x{}", i)))
                .collect(),
            bools: (1..=cfg.n_bool)
                .map(|i| BoolVar::new(&format!("a{}", i)))
                .collect(),
            cfg,
        }
    }

    fn coeff(&mut self) -> Rat {
        // Small nonzero integers keep the rationals compact.
        loop {
            let c = self.rng.gen_range(-8..=8i64);
            if c != 0 {
                return rint(c);
            }
        }
    }

    fn linear_atom(&mut self) -> Formula {
        let mut term = LinearTerm::constant(rint(self.rng.gen_range(-8..=8i64)));
        let mut any = false;
        for v in self.reals.clone() {
            if self.rng.gen_bool(0.5) {
                let c = self.coeff();
                term.add_term(&v, &c);
                any = true;
            }
        }
        if !any {
            let v = self.reals[self.rng.gen_range(0..self.reals.len())].clone();
            let c = self.coeff();
            term.add_term(&v, &c);
        }
        Formula::from_canon(Atom::lra(term, InputRel::Le))
    }

    fn leaf_atom(&mut self) -> Formula {
        let n = self.bools.len() + self.reals.len();
        let f = if self.rng.gen_range(0..n) < self.bools.len() {
            let b = self.bools[self.rng.gen_range(0..self.bools.len())].clone();
            Formula::Atom(Atom::Bool(b))
        } else {
            self.linear_atom()
        };
        if self.rng.gen_bool(0.5) {
            Formula::not(f)
        } else {
            f
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 {
            return self.leaf_atom();
        }
        let children: Vec<Formula> = (0..self.cfg.branching)
            .map(|_| self.formula(depth - 1))
            .collect();
        match self.rng.gen_range(0..4) {
            0 => Formula::or(children),
            1 => Formula::and(children),
            2 => Formula::not(Formula::or(children)),
            _ => Formula::not(Formula::and(children)),
        }
    }

    fn monomial(&mut self) -> WeightTerm {
        let mut t = WeightTerm::constant(self.coeff());
        let degree = self.rng.gen_range(0..=self.cfg.poly_degree);
        for _ in 0..degree {
            let v = self.reals[self.rng.gen_range(0..self.reals.len())].clone();
            t = WeightTerm::binop(BinOp::Mul, t, WeightTerm::var(v));
        }
        t
    }

    fn polynomial(&mut self) -> WeightTerm {
        let mut p = self.monomial();
        for _ in 1..self.rng.gen_range(1..=3) {
            let m = self.monomial();
            p = WeightTerm::binop(BinOp::Add, p, m);
        }
        p
    }

    fn weight(&mut self, depth: usize) -> WeightTerm {
        if depth == 0 || self.reals.is_empty() {
            return self.polynomial();
        }
        if self.rng.gen_bool(0.5) {
            let cond = self.formula(depth);
            let t = self.weight(depth - 1);
            let e = self.weight(depth - 1);
            WeightTerm::ite(cond, t, e)
        } else {
            let op = if self.rng.gen_bool(0.5) {
                BinOp::Add
            } else {
                BinOp::Mul
            };
            let l = self.weight(depth - 1);
            let r = self.weight(depth - 1);
            WeightTerm::binop(op, l, r)
        }
    }

    fn bounds(&self) -> Formula {
        let mut parts = Vec::new();
        for v in &self.reals {
            let x = LinearTerm::var(v.clone());
            let lo = &LinearTerm::constant(self.cfg.lower.clone()) - &x;
            let hi = &x - &LinearTerm::constant(self.cfg.upper.clone());
            parts.push(Formula::from_canon(Atom::lra(lo, InputRel::Le)));
            parts.push(Formula::from_canon(Atom::lra(hi, InputRel::Le)));
        }
        Formula::and(parts)
    }
}

/// A full random instance: the query, a support conjoining a random
/// formula with the bounding box, and a random weight.
pub fn gen_problem(cfg: &GenConfig) -> Problem {
    assert!(cfg.lower < cfg.upper);
    assert!(cfg.n_real > 0, "at least one real variable is required");
    let mut g = Gen::new(cfg);
    let phi = g.formula(cfg.depth);
    let chi = Formula::and(vec![g.formula(cfg.depth), g.bounds()]);
    let weight = g.weight(cfg.depth);
    let p = Problem {
        phi,
        chi,
        weight,
        reals: g.reals.iter().cloned().collect::<BTreeSet<_>>(),
        bools: g.bools.iter().cloned().collect::<BTreeSet<_>>(),
    };
    debug_assert!(p.validate().is_ok());
    p
}

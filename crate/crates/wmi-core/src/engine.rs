//! The three end-to-end algorithms: a brute-force baseline over total
//! Boolean assignments, predicate-abstraction enumeration with labeled
//! weight conditions, and the structure-aware variant driven by the
//! skeleton encoding of the weight.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num::{BigInt, Zero};

use crate::error::{Result, WmiError};
use crate::integrate::wmi_nb;
use crate::model::assignment::Assignment;
use crate::model::atom::{Atom, Literal};
use crate::model::formula::{restrict_formula, simplify, Formula};
use crate::model::problem::Problem;
use crate::model::vars::RealVar;
use crate::model::weight::{restrict_weight, WeightTerm};
use crate::skeleton::{encode_skeleton, label_conditions, select_conditions};
use crate::smt::enumerate::Enumerator;
use crate::Rat;

/// Most Boolean variables the brute-force baseline will expand.
pub const DEFAULT_BOOL_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct EngineOpts {
    /// Cap on 2^|A| expansion in the brute-force baseline.
    pub bool_cap: usize,
    /// Cooperative wall-clock limit, checked inside enumeration loops.
    pub deadline: Option<Instant>,
    /// Record one entry per computed integral.
    pub log: bool,
    /// Reuse integrals of identical (region, weight) pairs. Off by default
    /// so that `n_integrals` reflects the raw amount of integration work.
    pub cache: bool,
}

impl Default for EngineOpts {
    fn default() -> Self {
        EngineOpts {
            bool_cap: DEFAULT_BOOL_CAP,
            deadline: None,
            log: false,
            cache: false,
        }
    }
}

/// One integrated contribution: the textual assignment that produced the
/// region and weight, the Boolean multiplicity it stands for, and the
/// exact integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogEntry {
    pub assignment: String,
    pub multiplier: u64,
    pub integral: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WmiResult {
    pub value: Rat,
    /// Number of integrator invocations (cache hits excluded).
    pub n_integrals: usize,
    /// Number of enumerated (possibly partial) assignments processed.
    pub n_assignments: usize,
    pub per_assignment_log: Option<Vec<LogEntry>>,
}

fn lit_text(a: &Atom, v: bool) -> String {
    if v {
        a.to_string()
    } else {
        format!("(not {})", a)
    }
}

fn assignment_text<'a, I: IntoIterator<Item = (&'a Atom, bool)>>(lits: I) -> String {
    let parts: Vec<String> = lits.into_iter().map(|(a, v)| lit_text(a, v)).collect();
    format!("{{{}}}", parts.join(" "))
}

fn to_map(mu: &Assignment) -> BTreeMap<Atom, bool> {
    mu.iter().map(|(a, v)| (a.clone(), v)).collect()
}

/// Shared bookkeeping of one algorithm run.
struct Ctx<'o> {
    opts: &'o EngineOpts,
    dims: Vec<RealVar>,
    value: Rat,
    n_integrals: usize,
    n_assignments: usize,
    log: Vec<LogEntry>,
    cache: BTreeMap<(Vec<Literal>, WeightTerm), Rat>,
}

impl<'o> Ctx<'o> {
    fn new(opts: &'o EngineOpts, p: &Problem) -> Self {
        Ctx {
            opts,
            dims: p.reals.iter().cloned().collect(),
            value: Rat::zero(),
            n_integrals: 0,
            n_assignments: 0,
            log: Vec::new(),
            cache: BTreeMap::new(),
        }
    }

    fn check_deadline(&self) -> Result<()> {
        if let Some(d) = self.opts.deadline {
            if Instant::now() >= d {
                return Err(WmiError::Timeout);
            }
        }
        Ok(())
    }

    /// Add `multiplier · ∫ w` over the region of the arithmetic literals.
    fn add(
        &mut self,
        lits: Vec<Literal>,
        w: &WeightTerm,
        multiplier: u64,
        desc: String,
    ) -> Result<()> {
        self.check_deadline()?;
        let mut region: Vec<Literal> = lits.into_iter().filter(|(a, _)| a.is_lra()).collect();
        region.sort();
        region.dedup();
        let key = (region, w.clone());
        let integral = match self.cache.get(&key) {
            Some(v) if self.opts.cache => v.clone(),
            _ => {
                self.n_integrals += 1;
                let v = wmi_nb(&key.0, w, &self.dims)?;
                if self.opts.cache {
                    self.cache.insert(key, v.clone());
                }
                v
            }
        };
        self.value += Rat::from_integer(BigInt::from(multiplier)) * &integral;
        if self.opts.log {
            self.log.push(LogEntry {
                assignment: desc,
                multiplier,
                integral,
            });
        }
        Ok(())
    }

    fn finish(self) -> WmiResult {
        WmiResult {
            value: self.value,
            n_integrals: self.n_integrals,
            n_assignments: self.n_assignments,
            per_assignment_log: if self.opts.log { Some(self.log) } else { None },
        }
    }
}

/// An enumerator over `formula` whose decision order starts with `first`
/// and continues with the remaining atoms of the formula.
fn enumerator<'f>(
    formula: &'f Formula,
    first: &[Atom],
    projection: BTreeSet<Atom>,
    opts: &EngineOpts,
) -> Enumerator<'f> {
    let mut decide: Vec<Atom> = first.to_vec();
    let seen: BTreeSet<Atom> = first.iter().cloned().collect();
    decide.extend(formula.atoms().into_iter().filter(|a| !seen.contains(a)));
    for a in &projection {
        debug_assert!(decide.contains(a));
    }
    let mut en = Enumerator::new(formula, decide, projection);
    en.deadline = opts.deadline;
    en
}

/// Exhaustive baseline: expand every total assignment over the Boolean
/// variables, then partition the arithmetic residual into total cells over
/// its atoms plus the weight's remaining conditions, integrating each.
pub fn wmi_bruteforce(p: &Problem, opts: &EngineOpts) -> Result<WmiResult> {
    if p.bools.len() > opts.bool_cap {
        return Err(WmiError::BooleanCap(p.bools.len(), opts.bool_cap));
    }
    let mut ctx = Ctx::new(opts, p);
    let bools: Vec<Atom> = p.bools.iter().map(|b| Atom::Bool(b.clone())).collect();
    let phi_chi = p.phi_and_chi();
    for mask in 0..(1u64 << bools.len()) {
        ctx.check_deadline()?;
        let map: BTreeMap<Atom, bool> = bools
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), mask >> i & 1 == 1))
            .collect();
        let residual = simplify(&restrict_formula(&phi_chi, &map));
        if residual.is_false() {
            continue;
        }
        ctx.n_assignments += 1;
        let w_mu = restrict_weight(&p.weight, &map);
        let mut universe = residual.atoms();
        universe.extend(w_mu.atoms());
        let order: Vec<Atom> = universe.iter().cloned().collect();
        let cells = enumerator(&residual, &order, universe, opts).run(true)?;
        for cell in cells {
            let cmap = to_map(&cell);
            let w_cell = restrict_weight(&w_mu, &cmap);
            let desc = assignment_text(map.iter().map(|(a, v)| (a, *v)).chain(cell.iter()));
            ctx.add(cell.to_literals(), &w_cell, 1, desc)?;
        }
    }
    Ok(ctx.finish())
}

/// Predicate-abstraction enumeration: label each arithmetic weight
/// condition with a fresh Boolean, enumerate total assignments over all
/// Booleans, and integrate the per-assignment arithmetic residual — in one
/// shot when it is a plain conjunction, otherwise cell by cell.
pub fn wmi_pa(p: &Problem, opts: &EngineOpts) -> Result<WmiResult> {
    let mut ctx = Ctx::new(opts, p);
    let lab = label_conditions(p);
    let mut a_atoms: Vec<Atom> = p.bools.iter().map(|b| Atom::Bool(b.clone())).collect();
    a_atoms.extend(lab.b_vars.iter().map(|b| Atom::Bool(b.clone())));
    let projection: BTreeSet<Atom> = a_atoms.iter().cloned().collect();
    let totals = enumerator(&lab.phi_star, &a_atoms, projection, opts).run(true)?;
    for mu in totals {
        ctx.n_assignments += 1;
        let map = to_map(&mu);
        let residual = simplify(&restrict_formula(&lab.phi_star, &map));
        if residual.is_false() {
            continue;
        }
        let w_mu = restrict_weight(&lab.weight_star, &map);
        let prefix = assignment_text(mu.iter());
        if let Some(lits) = residual.conjunction_literals() {
            ctx.add(lits, &w_mu, 1, prefix)?;
            continue;
        }
        let atoms: Vec<Atom> = residual.atoms().into_iter().collect();
        let universe: BTreeSet<Atom> = atoms.iter().cloned().collect();
        let cells = enumerator(&residual, &atoms, universe, opts).run(false)?;
        for cell in cells {
            let desc = format!("{} {}", prefix, assignment_text(cell.iter()));
            ctx.add(cell.to_literals(), &w_mu, 1, desc)?;
        }
    }
    Ok(ctx.finish())
}

/// The total Boolean extensions a partial Boolean assignment needs: the
/// restricted formula may still mention some Booleans, and those are
/// expanded totally; Booleans it no longer mentions stay unassigned.
pub fn boolean_completions(
    phi: &Formula,
    base: &BTreeMap<Atom, bool>,
) -> Result<Vec<BTreeMap<Atom, bool>>> {
    let g = simplify(&restrict_formula(phi, base));
    let bools: Vec<Atom> = g.atoms().into_iter().filter(|a| a.is_bool()).collect();
    if bools.is_empty() {
        return Ok(vec![base.clone()]);
    }
    let projection: BTreeSet<Atom> = bools.iter().cloned().collect();
    let totals =
        enumerator(&g, &bools, projection, &EngineOpts::default()).run(true)?;
    Ok(totals
        .into_iter()
        .map(|nu| {
            let mut m = base.clone();
            m.extend(to_map(&nu));
            m
        })
        .collect())
}

/// Structure-aware enumeration: conjoin the weight's skeleton encoding,
/// enumerate partial assignments projected onto the Boolean variables,
/// complete the ones whose residual still mentions Booleans, and integrate
/// each arithmetic cell with multiplicity 2^k for the k Booleans left
/// unassigned.
pub fn sa_wmi_pa(p: &Problem, opts: &EngineOpts) -> Result<WmiResult> {
    let mut ctx = Ctx::new(opts, p);
    let enc = encode_skeleton(&p.weight);
    let phi_ss = Formula::and(vec![p.phi.clone(), p.chi.clone(), enc.formula()]);
    let a_atoms: Vec<Atom> = p.bools.iter().map(|b| Atom::Bool(b.clone())).collect();
    let a_set: BTreeSet<Atom> = a_atoms.iter().cloned().collect();
    // Decide Booleans first, then the condition atoms, then the rest.
    let mut order = a_atoms.clone();
    order.extend(
        select_conditions(&enc, p)
            .into_iter()
            .filter(|a| !a.is_bool()),
    );
    let partials = enumerator(&phi_ss, &order, a_set.clone(), opts).run(false)?;
    let mut m_a_star: Vec<BTreeMap<Atom, bool>> = Vec::new();
    for mu_a in &partials {
        ctx.check_deadline()?;
        m_a_star.extend(boolean_completions(&phi_ss, &to_map(mu_a))?);
    }
    for mu in m_a_star {
        ctx.check_deadline()?;
        ctx.n_assignments += 1;
        let k = a_atoms.iter().filter(|a| !mu.contains_key(a)).count();
        let multiplier = 1u64 << k;
        let g = simplify(&restrict_formula(&phi_ss, &mu));
        if g.is_false() {
            continue;
        }
        let w_mu = restrict_weight(&p.weight, &mu);
        let prefix = assignment_text(mu.iter().map(|(a, v)| (a, *v)));
        if let Some(lits) = g.conjunction_literals() {
            let cmap: BTreeMap<Atom, bool> = lits.iter().cloned().collect();
            let w_cell = restrict_weight(&w_mu, &cmap);
            if w_cell.is_fi() {
                ctx.add(lits, &w_cell, multiplier, prefix)?;
                continue;
            }
        }
        let projection: BTreeSet<Atom> =
            g.atoms().into_iter().filter(|a| !a.is_euf()).collect();
        let order: Vec<Atom> = projection.iter().cloned().collect();
        let cells = enumerator(&g, &order, projection, opts).run(false)?;
        for cell in cells {
            let cmap = to_map(&cell);
            let w_cell = restrict_weight(&w_mu, &cmap);
            let desc = format!("{} {}", prefix, assignment_text(cell.iter()));
            if w_cell.is_fi() {
                ctx.add(cell.to_literals(), &w_cell, multiplier, desc)?;
                continue;
            }
            // A condition the skeleton did not force (it can happen with
            // non-atomic conditions): refine the cell totally over the
            // leftover condition atoms.
            let free: Vec<Atom> = w_cell.atoms().into_iter().collect();
            let refined = Formula::and(vec![g.clone(), cell.to_formula()]);
            let proj: BTreeSet<Atom> = free.iter().cloned().collect();
            for nu in enumerator(&refined, &free, proj, opts).run(true)? {
                let mut nmap = cmap.clone();
                nmap.extend(to_map(&nu));
                let w_fine = restrict_weight(&w_cell, &nmap);
                let mut lits = cell.to_literals();
                lits.extend(nu.to_literals());
                let fdesc = format!("{} {}", desc, assignment_text(nu.iter()));
                ctx.add(lits, &w_fine, multiplier, fdesc)?;
            }
        }
    }
    Ok(ctx.finish())
}

/// Conjoin an extra support formula onto the query. When the formula is a
/// genuine support of the weight the integral is unchanged.
pub fn support_conjoin(p: &Problem, extra_support: Formula) -> Problem {
    p.with_extra_support(extra_support)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parser::parse_problem;
    use crate::model::vars::BoolVar;
    use crate::{rat, rint};

    /// Two reals, two Booleans, five conditionals over three arithmetic
    /// conditions; the leaves are distinct small polynomials.
    fn nested_problem() -> Problem {
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
    fn nested_problem_counts_and_value() {
        let p = nested_problem();
        let opts = EngineOpts {
            log: true,
            ..EngineOpts::default()
        };
        let bf = wmi_bruteforce(&p, &opts).unwrap();
        let pa = wmi_pa(&p, &opts).unwrap();
        let sa = sa_wmi_pa(&p, &opts).unwrap();
        assert_eq!(bf.value, rat(203, 3));
        assert_eq!(pa.value, bf.value);
        assert_eq!(sa.value, bf.value);
        assert_eq!(pa.n_integrals, 24);
        assert_eq!(sa.n_integrals, 6);
        let mut mults: Vec<u64> = sa
            .per_assignment_log
            .unwrap()
            .iter()
            .map(|e| e.multiplier)
            .collect();
        mults.sort();
        assert_eq!(mults, vec![1, 1, 2, 2, 2, 2]);
    }

    #[test]
    fn log_sums_to_value() {
        let p = nested_problem();
        let opts = EngineOpts {
            log: true,
            ..EngineOpts::default()
        };
        for r in [wmi_bruteforce(&p, &opts), wmi_pa(&p, &opts), sa_wmi_pa(&p, &opts)] {
            let r = r.unwrap();
            let total: Rat = r
                .per_assignment_log
                .as_ref()
                .unwrap()
                .iter()
                .map(|e| Rat::from_integer(BigInt::from(e.multiplier)) * &e.integral)
                .sum();
            assert_eq!(total, r.value);
        }
    }

    #[test]
    fn completion_skips_irrelevant_booleans() {
        // Under {a2} the first two clauses are satisfied, so only a3 is
        // still mentioned and a1 never gets branched on.
        let p = parse_problem(
            "(declare-real x) (declare-bool a1) (declare-bool a2) (declare-bool a3)\
             (phi (and (or a1 a2 a3) (or (not a1) a2 (>= x 1))\
                       (or (not a2) (>= x 2)) (or (not a3) (<= x 3))))\
             (chi (and (<= 0 x) (<= x 4)))\
             (weight 1)",
        )
        .unwrap();
        let enc = encode_skeleton(&p.weight);
        let phi_ss = Formula::and(vec![p.phi.clone(), p.chi.clone(), enc.formula()]);
        let a2 = Atom::Bool(BoolVar::new("a2"));
        let a3 = Atom::Bool(BoolVar::new("a3"));
        let base: BTreeMap<Atom, bool> = [(a2.clone(), true)].into_iter().collect();
        let mut comps = boolean_completions(&phi_ss, &base).unwrap();
        comps.sort();
        let want = vec![
            [(a2.clone(), true), (a3.clone(), false)]
                .into_iter()
                .collect::<BTreeMap<_, _>>(),
            [(a2, true), (a3, true)].into_iter().collect(),
        ];
        assert_eq!(comps, want);
    }

    #[test]
    fn unconditioned_weight_is_one_integral() {
        let p = parse_problem(
            "(declare-real x) (chi (and (<= 0 x) (<= x 3))) (weight (* x x))",
        )
        .unwrap();
        let opts = EngineOpts::default();
        let pa = wmi_pa(&p, &opts).unwrap();
        let sa = sa_wmi_pa(&p, &opts).unwrap();
        assert_eq!(pa.n_integrals, 1);
        assert_eq!(sa.n_integrals, 1);
        assert_eq!(pa.value, rint(9));
        assert_eq!(sa.value, rint(9));
    }

    #[test]
    fn unsatisfiable_query_is_zero() {
        let p = parse_problem(
            "(declare-real x) (phi false) (chi (and (<= 0 x) (<= x 1))) (weight 1)",
        )
        .unwrap();
        let opts = EngineOpts::default();
        assert_eq!(wmi_bruteforce(&p, &opts).unwrap().value, rint(0));
        assert_eq!(wmi_pa(&p, &opts).unwrap().value, rint(0));
        assert_eq!(sa_wmi_pa(&p, &opts).unwrap().value, rint(0));
    }

    #[test]
    fn redundant_support_changes_nothing() {
        let p = nested_problem();
        let q = support_conjoin(&p, p.chi.clone());
        let opts = EngineOpts::default();
        assert_eq!(
            wmi_pa(&p, &opts).unwrap().value,
            wmi_pa(&q, &opts).unwrap().value
        );
        assert_eq!(
            sa_wmi_pa(&p, &opts).unwrap().value,
            sa_wmi_pa(&q, &opts).unwrap().value
        );
    }

    #[test]
    fn boolean_cap_is_enforced() {
        let decls: String = (0..5).map(|i| format!("(declare-bool a{}) ", i)).collect();
        let p = parse_problem(&format!(
            "{}(declare-real x) (chi (and (<= 0 x) (<= x 1))) (weight 1)",
            decls
        ))
        .unwrap();
        let opts = EngineOpts {
            bool_cap: 4,
            ..EngineOpts::default()
        };
        assert!(matches!(
            wmi_bruteforce(&p, &opts),
            Err(WmiError::BooleanCap(5, 4))
        ));
        // Unconstrained Booleans multiply the volume.
        let opts = EngineOpts::default();
        let bf = wmi_bruteforce(&p, &opts).unwrap();
        assert_eq!(bf.value, rint(32));
        assert_eq!(sa_wmi_pa(&p, &opts).unwrap().value, rint(32));
    }

    #[test]
    fn boolean_conditions_agree_across_algorithms() {
        let p = parse_problem(
            "(declare-real x) (declare-bool a) (declare-bool b)\
             (phi (or a (>= x 1)))\
             (chi (and (<= 0 x) (<= x 2)))\
             (weight (ite a (ite b x (+ x 1)) 3))",
        )
        .unwrap();
        let opts = EngineOpts::default();
        let bf = wmi_bruteforce(&p, &opts).unwrap();
        let pa = wmi_pa(&p, &opts).unwrap();
        let sa = sa_wmi_pa(&p, &opts).unwrap();
        assert_eq!(pa.value, bf.value);
        assert_eq!(sa.value, bf.value);
        assert!(sa.n_integrals <= pa.n_integrals);
    }
}

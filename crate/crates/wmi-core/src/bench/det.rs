//! Density estimation trees: piecewise-constant densities given as a JSON
//! split tree over box-bounded reals and optional Booleans, queried for
//! the probability of an arbitrary constraint.

use std::collections::BTreeSet;

use num::Zero;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{sa_wmi_pa, EngineOpts};
use crate::error::{Result, WmiError};
use crate::model::atom::{Atom, InputRel};
use crate::model::formula::Formula;
use crate::model::linear::LinearTerm;
use crate::model::parser::{parse_rational, Pos};
use crate::model::problem::Problem;
use crate::model::vars::{BoolVar, RealVar};
use crate::model::weight::WeightTerm;
use crate::{rat, rint, Rat};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DetReal {
    pub name: String,
    pub lower: String,
    pub upper: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum DetSplit {
    Real { var: String, threshold: String },
    Bool {
        #[serde(rename = "bool")]
        var: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum DetNode {
    Leaf {
        density: String,
    },
    Split {
        split: DetSplit,
        left: Box<DetNode>,
        right: Box<DetNode>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DetModel {
    pub reals: Vec<DetReal>,
    #[serde(default)]
    pub bools: Vec<String>,
    pub root: DetNode,
}

fn rational(s: &str) -> Result<Rat> {
    parse_rational(s, Pos { line: 0, col: 0 })
}

impl DetModel {
    pub fn from_json(text: &str) -> Result<DetModel> {
        serde_json::from_str(text)
            .map_err(|e| WmiError::InvalidModel(format!("bad DET JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable model")
    }

    /// The bounding box of the model as a conjunction of bounds.
    pub fn support(&self) -> Result<Formula> {
        let mut parts = Vec::new();
        for r in &self.reals {
            let lo = rational(&r.lower)?;
            let hi = rational(&r.upper)?;
            if lo >= hi {
                return Err(WmiError::InvalidModel(format!(
                    "empty bounds for {}",
                    r.name
                )));
            }
            let x = LinearTerm::var(RealVar::new(&r.name));
            parts.push(Formula::from_canon(Atom::lra(
                &LinearTerm::constant(lo) - &x,
                InputRel::Le,
            )));
            parts.push(Formula::from_canon(Atom::lra(
                &x - &LinearTerm::constant(hi),
                InputRel::Le,
            )));
        }
        Ok(Formula::and(parts))
    }

    /// The piecewise-constant density as nested conditionals; a real split
    /// sends `x <= threshold` to the left child, a Boolean split sends the
    /// positive polarity there.
    pub fn weight(&self) -> Result<WeightTerm> {
        self.node_weight(&self.root)
    }

    fn node_weight(&self, n: &DetNode) -> Result<WeightTerm> {
        match n {
            DetNode::Leaf { density } => {
                let d = rational(density)?;
                if d < Rat::zero() {
                    return Err(WmiError::InvalidModel(format!(
                        "negative density {density}"
                    )));
                }
                Ok(WeightTerm::constant(d))
            }
            DetNode::Split { split, left, right } => {
                let cond = match split {
                    DetSplit::Real { var, threshold } => {
                        let t = rational(threshold)?;
                        let x = LinearTerm::var(RealVar::new(var));
                        Formula::from_canon(Atom::lra(
                            &x - &LinearTerm::constant(t),
                            InputRel::Le,
                        ))
                    }
                    DetSplit::Bool { var } => Formula::Atom(Atom::Bool(BoolVar::new(var))),
                };
                Ok(WeightTerm::ite(
                    cond,
                    self.node_weight(left)?,
                    self.node_weight(right)?,
                ))
            }
        }
    }

    pub fn to_problem(&self, query: Formula) -> Result<Problem> {
        let p = Problem {
            phi: query,
            chi: self.support()?,
            weight: self.weight()?,
            reals: self.reals.iter().map(|r| RealVar::new(&r.name)).collect(),
            bools: self
                .bools
                .iter()
                .map(|b| BoolVar::new(b))
                .collect::<BTreeSet<_>>(),
        };
        p.validate()?;
        Ok(p)
    }
}

/// Probability of the query region under the normalized density.
pub fn det_query(m: &DetModel, query: &Formula, opts: &EngineOpts) -> Result<Rat> {
    let den = sa_wmi_pa(&m.to_problem(Formula::True)?, opts)?.value;
    if den.is_zero() {
        return Err(WmiError::DegenerateModel);
    }
    let num = sa_wmi_pa(&m.to_problem(query.clone())?, opts)?.value;
    Ok(num / den)
}

/// A random linear inequality over `k = max(1, ⌊h·|x|⌋)` of the model's
/// continuous variables.
pub fn gen_query(m: &DetModel, h: f64, seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.reals.len();
    let k = ((h * n as f64).floor() as usize).clamp(1, n.max(1));
    let picked = index::sample(&mut rng, n, k.min(n));
    let mut term = LinearTerm::constant(rint(rng.gen_range(-8..=8i64)));
    for i in picked.iter() {
        let c = loop {
            let c = rng.gen_range(-8..=8i64);
            if c != 0 {
                break rint(c);
            }
        };
        term.add_term(&RealVar::new(&m.reals[i].name), &c);
    }
    Formula::from_canon(Atom::lra(term, InputRel::Le))
}

/// A random DET over `n_real` box-bounded reals with `depth` levels of
/// axis-aligned splits and positive leaf densities.
pub fn gen_det(n_real: usize, depth: usize, seed: u64) -> DetModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reals = Vec::new();
    let mut boxes = Vec::new();
    for i in 1..=n_real {
        let lo = rng.gen_range(-2..=0i64);
        let hi = rng.gen_range(lo + 1..=2);
        reals.push(DetReal {
            name: format!("x{}", i),
            lower: rint(lo).to_string(),
            upper: rint(hi).to_string(),
        });
        boxes.push((rint(lo), rint(hi)));
    }
    let root = gen_node(&reals, &mut boxes, depth, &mut rng);
    DetModel {
        reals,
        bools: Vec::new(),
        root,
    }
}

fn gen_node(
    reals: &[DetReal],
    boxes: &mut [(Rat, Rat)],
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> DetNode {
    if depth == 0 {
        return DetNode::Leaf {
            density: rat(rng.gen_range(1..=8), rng.gen_range(1..=4)).to_string(),
        };
    }
    let i = rng.gen_range(0..reals.len());
    let (lo, hi) = boxes[i].clone();
    let frac = rat(rng.gen_range(1..=3), 4);
    let t = &lo + (&hi - &lo) * frac;
    let saved = boxes[i].clone();
    boxes[i] = (lo, t.clone());
    let left = gen_node(reals, boxes, depth - 1, rng);
    boxes[i] = (t.clone(), saved.1.clone());
    let right = gen_node(reals, boxes, depth - 1, rng);
    boxes[i] = saved;
    DetNode::Split {
        split: DetSplit::Real {
            var: reals[i].name.clone(),
            threshold: t.to_string(),
        },
        left: Box::new(left),
        right: Box::new(right),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    fn uniform_interval() -> DetModel {
        DetModel::from_json(
            r#"{"reals":[{"name":"x","lower":"0","upper":"1"}],
                "root":{"density":"1"}}"#,
        )
        .unwrap()
    }

    fn query(m: &DetModel, text: &str) -> Formula {
        use crate::model::parser::{parse_formula, parse_sexps, VarContext};
        let ctx = VarContext {
            reals: m.reals.iter().map(|r| RealVar::new(&r.name)).collect(),
            bools: m.bools.iter().map(|b| BoolVar::new(b)).collect(),
        };
        let sx = parse_sexps(text).unwrap();
        parse_formula(&sx[0], &ctx).unwrap()
    }

    #[test]
    fn uniform_interval_half() {
        let m = uniform_interval();
        let opts = EngineOpts::default();
        let p = det_query(&m, &query(&m, "(<= x 1/2)"), &opts).unwrap();
        assert_eq!(p, rat(1, 2));
        assert!(det_query(&m, &Formula::True, &opts).unwrap().is_one());
    }

    #[test]
    fn uniform_square_symmetry() {
        let m = DetModel::from_json(
            r#"{"reals":[{"name":"x","lower":"0","upper":"1"},
                         {"name":"y","lower":"0","upper":"1"}],
                "root":{"density":"1"}}"#,
        )
        .unwrap();
        let p = det_query(&m, &query(&m, "(<= x y)"), &EngineOpts::default()).unwrap();
        assert_eq!(p, rat(1, 2));
    }

    #[test]
    fn two_leaf_tree() {
        let m = DetModel::from_json(
            r#"{"reals":[{"name":"x","lower":"0","upper":"2"}],
                "root":{"split":{"var":"x","threshold":"1"},
                        "left":{"density":"1/4"},
                        "right":{"density":"3/4"}}}"#,
        )
        .unwrap();
        let p = det_query(&m, &query(&m, "(>= x 1)"), &EngineOpts::default()).unwrap();
        assert_eq!(p, rat(3, 4));
    }

    #[test]
    fn zero_density_model_is_degenerate() {
        let m = DetModel::from_json(
            r#"{"reals":[{"name":"x","lower":"0","upper":"1"}],
                "root":{"density":"0"}}"#,
        )
        .unwrap();
        assert!(matches!(
            det_query(&m, &Formula::True, &EngineOpts::default()),
            Err(WmiError::DegenerateModel)
        ));
    }

    #[test]
    fn random_models_normalize() {
        let opts = EngineOpts::default();
        for seed in 0..10 {
            let m = gen_det(2, 2, seed);
            let total = det_query(&m, &Formula::True, &opts).unwrap();
            assert!(total.is_one(), "seed {seed}");
            let q = gen_query(&m, 1.0, seed);
            let p = det_query(&m, &q, &opts).unwrap();
            assert!(p >= rint(0) && p <= rint(1), "seed {seed}: {p}");
        }
    }

    #[test]
    fn query_variable_count_follows_ratio() {
        let m = gen_det(4, 1, 9);
        for (h, want) in [(0.0, 1usize), (0.5, 2), (1.0, 4)] {
            let q = gen_query(&m, h, 3);
            let vars: BTreeSet<_> = q
                .atoms()
                .iter()
                .flat_map(|a| match a {
                    Atom::Lra { term, .. } => term.coeffs.keys().cloned().collect::<Vec<_>>(),
                    _ => vec![],
                })
                .collect();
            assert_eq!(vars.len(), want, "h={h}");
        }
    }

    #[test]
    fn model_round_trips_through_json() {
        let m = gen_det(3, 2, 4);
        let again = DetModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, again);
    }
}

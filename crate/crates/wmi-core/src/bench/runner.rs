//! Batch execution of algorithms over problem sets with cooperative
//! timeouts and CSV output suitable for cactus-plot analysis.

use std::fmt;
use std::time::{Duration, Instant};

use crate::engine::{sa_wmi_pa, wmi_bruteforce, wmi_pa, EngineOpts, WmiResult};
use crate::error::{Result, WmiError};
use crate::model::problem::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Bf,
    Pa,
    Sa,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Bf, Algo::Pa, Algo::Sa];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Bf => "bf",
            Algo::Pa => "pa",
            Algo::Sa => "sa",
        }
    }

    pub fn parse(s: &str) -> Option<Algo> {
        match s {
            "bf" => Some(Algo::Bf),
            "pa" => Some(Algo::Pa),
            "sa" => Some(Algo::Sa),
            _ => None,
        }
    }

    pub fn run(self, p: &Problem, opts: &EngineOpts) -> Result<WmiResult> {
        match self {
            Algo::Bf => wmi_bruteforce(p, opts),
            Algo::Pa => wmi_pa(p, opts),
            Algo::Sa => sa_wmi_pa(p, opts),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct BenchCase {
    pub name: String,
    pub problem: Problem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub problem: String,
    pub algorithm: String,
    pub status: String,
    pub seconds: String,
    pub value: String,
    pub n_integrals: String,
}

pub const CSV_HEADER: &str = "problem,algorithm,status,seconds,value,n_integrals";

/// Run every algorithm on every case, one row each, in input order.
/// `deterministic` zeroes the wall-clock column so output is reproducible
/// byte for byte.
pub fn run_bench(
    cases: &[BenchCase],
    algos: &[Algo],
    timeout: Option<Duration>,
    deterministic: bool,
) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for case in cases {
        for &algo in algos {
            let opts = EngineOpts {
                deadline: timeout.map(|t| Instant::now() + t),
                ..EngineOpts::default()
            };
            let start = Instant::now();
            let outcome = algo.run(&case.problem, &opts);
            let secs = if deterministic {
                "0.000".to_string()
            } else {
                format!("{:.3}", start.elapsed().as_secs_f64())
            };
            let (status, value, n_integrals) = match outcome {
                Ok(r) => ("ok".to_string(), r.value.to_string(), r.n_integrals.to_string()),
                Err(WmiError::Timeout) => ("timeout".to_string(), String::new(), String::new()),
                Err(_) => ("error".to_string(), String::new(), String::new()),
            };
            rows.push(BenchRow {
                problem: case.name.clone(),
                algorithm: algo.name().to_string(),
                status,
                seconds: secs,
                value,
                n_integrals,
            });
        }
    }
    rows
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.problem, r.algorithm, r.status, r.seconds, r.value, r.n_integrals
        ));
    }
    out
}

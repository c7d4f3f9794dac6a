//! Command-line front end: solve single problems, generate seeded random
//! instances, answer density-estimation-tree queries, and run CSV
//! benchmarks.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use wmi_core::bench::det::{det_query, gen_query, DetModel};
use wmi_core::bench::gen::{gen_problem, GenConfig};
use wmi_core::bench::runner::{run_bench, to_csv, Algo, BenchCase};
use wmi_core::engine::EngineOpts;
use wmi_core::model::parser::{parse_formula, parse_problem, parse_sexps, VarContext};
use wmi_core::model::printer::{formula_sexp, serialize_problem};
use wmi_core::skeleton::encode_skeleton;

#[derive(Parser)]
#[command(name = "wmi", about = "Exact weighted model integration over linear rational arithmetic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one problem file and print the exact result.
    Solve {
        file: PathBuf,
        /// Algorithm: bf (brute force), pa, or sa.
        #[arg(long, default_value = "sa")]
        algo: String,
        /// Print the skeleton encoding of the weight before solving.
        #[arg(long)]
        dump_skeleton: bool,
        /// Write a JSON log with one entry per computed integral.
        #[arg(long)]
        log_json: Option<PathBuf>,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Generate seeded random problems into a directory.
    Gen {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        bools: usize,
        #[arg(long, default_value_t = 3)]
        reals: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Answer a probability query against a density estimation tree.
    Det {
        model: PathBuf,
        /// Query formula in the problem dialect, e.g. "(<= x 1/2)".
        #[arg(long)]
        query: Option<String>,
        /// Generate a random query over max(1, ⌊H·|x|⌋) variables instead.
        #[arg(long = "H")]
        h: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run algorithms over every .wmi file in a directory, emitting CSV.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated subset of bf,pa,sa.
        #[arg(long, default_value = "pa,sa")]
        algos: String,
        /// Per-cell wall-clock limit in seconds.
        #[arg(long)]
        timeout: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Zero the seconds column for byte-reproducible output.
        #[arg(long)]
        deterministic: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Solve {
            file,
            algo,
            dump_skeleton,
            log_json,
            timeout,
        } => {
            let text = fs::read_to_string(&file)?;
            let problem = parse_problem(&text)?;
            let algo = Algo::parse(&algo).ok_or("unknown algorithm (use bf, pa, or sa)")?;
            if dump_skeleton {
                print!("{}", encode_skeleton(&problem.weight).dump());
            }
            let opts = EngineOpts {
                deadline: timeout.map(|t| std::time::Instant::now() + Duration::from_secs(t)),
                log: log_json.is_some(),
                ..EngineOpts::default()
            };
            let r = algo.run(&problem, &opts)?;
            if let Some(path) = log_json {
                let entries: Vec<serde_json::Value> = r
                    .per_assignment_log
                    .unwrap_or_default()
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "assignment": e.assignment,
                            "multiplier": e.multiplier,
                            "integral": e.integral.to_string(),
                        })
                    })
                    .collect();
                let doc = serde_json::json!({
                    "algorithm": algo.name(),
                    "value": r.value.to_string(),
                    "n_integrals": r.n_integrals,
                    "n_assignments": r.n_assignments,
                    "log": entries,
                });
                fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
            }
            println!("value = {}", r.value);
            println!("n_integrals = {}", r.n_integrals);
            println!("n_assignments = {}", r.n_assignments);
        }
        Cmd::Gen {
            depth,
            bools,
            reals,
            seed,
            count,
            out_dir,
        } => {
            fs::create_dir_all(&out_dir)?;
            for i in 0..count {
                let cfg = GenConfig::new(depth, bools, reals, seed + i as u64);
                let p = gen_problem(&cfg);
                let name = format!("gen_d{}_b{}_r{}_s{}.wmi", depth, bools, reals, seed + i as u64);
                let path = out_dir.join(&name);
                fs::write(&path, serialize_problem(&p))?;
                println!("{}", path.display());
            }
        }
        Cmd::Det {
            model,
            query,
            h,
            seed,
        } => {
            let m = DetModel::from_json(&fs::read_to_string(&model)?)?;
            let formula = match (query, h) {
                (Some(text), None) => {
                    let ctx = VarContext {
                        reals: m
                            .reals
                            .iter()
                            .map(|r| wmi_core::model::vars::RealVar::new(&r.name))
                            .collect(),
                        bools: m
                            .bools
                            .iter()
                            .map(|b| wmi_core::model::vars::BoolVar::new(b))
                            .collect(),
                    };
                    let sx = parse_sexps(&text)?;
                    let first = sx.first().ok_or("empty query")?;
                    parse_formula(first, &ctx)?
                }
                (None, Some(h)) => {
                    if !(0.0..=1.0).contains(&h) {
                        return Err("H must lie in [0, 1]".into());
                    }
                    let q = gen_query(&m, h, seed);
                    println!("query = {}", formula_sexp(&q));
                    q
                }
                _ => return Err("pass exactly one of --query or --H".into()),
            };
            let p = det_query(&m, &formula, &EngineOpts::default())?;
            println!("probability = {}", p);
        }
        Cmd::Bench {
            dir,
            algos,
            timeout,
            csv,
            deterministic,
        } => {
            let algos: Vec<Algo> = algos
                .split(',')
                .map(|s| Algo::parse(s.trim()).ok_or(format!("unknown algorithm {s:?}")))
                .collect::<Result<_, _>>()?;
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "wmi"))
                .collect();
            files.sort();
            let mut cases = Vec::new();
            for f in files {
                let name = f
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                cases.push(BenchCase {
                    name,
                    problem: parse_problem(&fs::read_to_string(&f)?)?,
                });
            }
            let rows = run_bench(
                &cases,
                &algos,
                timeout.map(Duration::from_secs),
                deterministic,
            );
            let out = to_csv(&rows);
            match csv {
                Some(path) => fs::write(&path, out)?,
                None => print!("{}", out),
            }
        }
    }
    Ok(())
}

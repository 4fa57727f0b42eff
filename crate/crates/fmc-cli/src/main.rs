//! Command-line harness: solve one instance with a chosen algorithm, write
//! run reports, generate instance files, query the exact oracle, and drive
//! the desk evaluation suite.
//!
//! Exit codes: 0 success, 1 error, 2 infeasible.

mod report;

use clap::{Parser, Subcommand, ValueEnum};
use fmc_core::generate::{BalancedParams, Family, RandomParams, SegregatedParams};
use fmc_core::instance::{load_input, from_graph, LoadedInput};
use fmc_core::iterated::{alg_iter_fmc, alg_iter_node, IterGuards, IterMode};
use fmc_core::randomized::{alg_large, alg_medium, alg_small, Algorithm, RandomizedConfig};
use fmc_core::special::{alg_balanced, alg_greed_plus};
use fmc_core::{desk, geometry, oracle, Error};
use report::{write_atomic, RunReport, SCHEMA_VERSION};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "fmc", about = "Fair maximum coverage solver suite", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgChoice {
    Large,
    Medium,
    Small,
    IterNode,
    IterFmc,
    GreedyPlus,
    Balanced,
    Geom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeChoice {
    ConstChi,
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance, graph, or geometry file with one algorithm.
    Solve {
        #[arg(long, value_enum)]
        alg: AlgChoice,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rounding trials per guess; repetition count for geom.
        #[arg(long)]
        trials: Option<usize>,
        /// Pin the covered-count guess instead of enumerating.
        #[arg(long)]
        opt_hash: Option<usize>,
        /// Iterated-rounding flavor.
        #[arg(long, value_enum, default_value_t = ModeChoice::ConstChi)]
        mode: ModeChoice,
        /// Balance window for the balanced solver.
        #[arg(long, default_value_t = 0)]
        delta: usize,
        /// Override the instance epsilon (geometry only).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Run the exact oracle and embed the comparison.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Budget override for graph inputs that carry no k field.
        #[arg(long)]
        k: Option<usize>,
        /// Emit an SVG plot (geometry only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Generate an instance file from a named family.
    Gen {
        #[arg(long)]
        family: String,
        /// Family parameters, comma-separated key=value pairs.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the exact oracle on an instance or graph file.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        /// Also decide feasibility over at most k sets.
        #[arg(long)]
        at_most_k: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run the desk evaluation suite and write a summary table.
    Bench {
        #[arg(long, default_value = "desk")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    if let Ok(threads) = std::env::var("FMC_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { .. } => cmd_solve(cli.command),
        Command::Gen { .. } => cmd_gen(cli.command),
        Command::Oracle { .. } => cmd_oracle(cli.command),
        Command::Bench { .. } => cmd_bench(cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => 2,
                _ => 1,
            }
        }
    }
}

fn oracle_budget() -> u128 {
    std::env::var("FMC_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(oracle::DEFAULT_BUDGET)
}

/// Instance plus the node mapping when the file held a graph.
fn load_solver_input(path: &Path, k_flag: Option<usize>) -> fmc_core::Result<(fmc_core::FmcInstance, Option<Vec<usize>>)> {
    match load_input(path)? {
        LoadedInput::Instance(inst) => Ok((inst, None)),
        LoadedInput::Graph { graph, k } => {
            let k = k_flag.or(k).ok_or_else(|| {
                Error::Param("graph inputs need k: add a \"k\" field or pass --k".into())
            })?;
            let tr = from_graph(&graph, k)?;
            Ok((tr.instance, Some(tr.set_to_node)))
        }
    }
}

fn cmd_solve(cmd: Command) -> fmc_core::Result<i32> {
    let Command::Solve {
        alg,
        input,
        seed,
        trials,
        opt_hash,
        mode,
        delta,
        epsilon,
        oracle: with_oracle,
        out,
        k,
        svg,
    } = cmd
    else {
        unreachable!()
    };
    let raw = std::fs::read(&input)?;
    let digest = report::digest(&raw);
    let started = Instant::now();
    let mut config = BTreeMap::new();
    config.insert("seed".to_string(), serde_json::json!(seed));

    // Geometry inputs route to the shifted-grid solver only.
    if alg == AlgChoice::Geom {
        let mut geo = geometry::load_geom(&input)?;
        if let Some(eps) = epsilon {
            geo = geometry::GeomInstance::new(geo.domain, eps, geo.lipschitz, geo.k, geo.points)?;
        }
        let reps = trials.unwrap_or_else(|| (geo.points.len() as f64).log2().ceil().max(1.0) as usize);
        config.insert("repetitions".to_string(), serde_json::json!(reps));
        config.insert("epsilon".to_string(), serde_json::json!(geo.epsilon));
        let outcome = geometry::alg_geom(&geo, seed, reps)?;
        let mut geom_report = report::GeomReport::new(&outcome, &outcome.balls);
        if with_oracle {
            let orc = geometry::geom_oracle(&geo, oracle_budget())?;
            let max_w = geo.points.iter().map(|p| p.weight).fold(0.0f64, f64::max);
            let floor = (1.0 - 3.0 * geo.epsilon)
                * (orc.fair_value.unwrap_or(0.0) - geo.epsilon * geo.chi as f64 * max_w);
            let mut bounds = BTreeMap::new();
            bounds.insert("ratio_within_window".into(), outcome.fair);
            bounds.insert("coverage_above_floor".into(), outcome.coverage >= floor - 1e-9);
            geom_report.oracle = Some(report::GeomOracleComparison {
                fair_value: orc.fair_value,
                unconstrained_value: orc.unconstrained_value,
                fairness_feasible: orc.fairness_feasible,
                bounds,
            });
        }
        if let Some(svg_path) = svg {
            std::fs::write(&svg_path, geometry::render_svg(&geo, Some(&outcome.balls), Some(outcome.shift)))?;
        }
        let run = RunReport {
            schema_version: SCHEMA_VERSION,
            instance_digest: digest,
            algorithm: "geom".into(),
            config,
            solution: None,
            oracle: None,
            randomized: None,
            iterated: None,
            geometry: Some(geom_report),
        };
        emit(&run, out.as_deref(), started)?;
        return Ok(0);
    }

    // Keep the raw graph around: the node flavor of iterated rounding wants
    // it rather than the translated set system.
    let (inst, node_map, graph) = match load_input(&input)? {
        LoadedInput::Instance(inst) => (inst, None, None),
        LoadedInput::Graph { graph, k: file_k } => {
            let k = k.or(file_k).ok_or_else(|| {
                Error::Param("graph inputs need k: add a \"k\" field or pass --k".into())
            })?;
            let tr = from_graph(&graph, k)?;
            (tr.instance, Some(tr.set_to_node), Some((graph, k)))
        }
    };
    let alg_name = match alg {
        AlgChoice::Large => "large",
        AlgChoice::Medium => "medium",
        AlgChoice::Small => "small",
        AlgChoice::IterNode => "iter-node",
        AlgChoice::IterFmc => "iter-fmc",
        AlgChoice::GreedyPlus => "greedy-plus",
        AlgChoice::Balanced => "balanced",
        AlgChoice::Geom => unreachable!(),
    };
    let solution;
    let fairness_sigma;
    let mut randomized = None;
    let mut iterated = None;
    match alg {
        AlgChoice::Large | AlgChoice::Medium | AlgChoice::Small => {
            let algorithm = match alg {
                AlgChoice::Large => Algorithm::Large,
                AlgChoice::Medium => Algorithm::Medium,
                _ => Algorithm::Small,
            };
            let mut cfg = RandomizedConfig::new(algorithm, seed);
            cfg.trials = trials;
            cfg.opt_hash_override = opt_hash;
            if let Some(t) = trials {
                config.insert("trials".to_string(), serde_json::json!(t));
            }
            if let Some(h) = opt_hash {
                config.insert("opt_hash".to_string(), serde_json::json!(h));
            }
            let outcome = match algorithm {
                Algorithm::Large => alg_large(&inst, &cfg)?,
                Algorithm::Medium => alg_medium(&inst, &cfg)?,
                Algorithm::Small => alg_small(&inst, &cfg)?,
            };
            fairness_sigma = outcome.best_report.sigma;
            solution = (outcome.best.clone(), outcome.best_report.clone());
            randomized = Some(report::RandomizedReport::new(&outcome));
        }
        AlgChoice::IterNode | AlgChoice::IterFmc => {
            let iter_mode = match mode {
                ModeChoice::ConstChi => IterMode::ConstChi,
                ModeChoice::General => IterMode::General,
            };
            config.insert("mode".to_string(), serde_json::json!(iter_mode));
            let outcome = if alg == AlgChoice::IterNode {
                let Some((graph, gk)) = &graph else {
                    return Err(Error::Param("iter-node needs a graph input".into()));
                };
                alg_iter_node(graph, *gk, iter_mode, &IterGuards::default())?.1
            } else {
                alg_iter_fmc(&inst, iter_mode, &IterGuards::default())?
            };
            if outcome.k_below_recommended {
                eprintln!("note: k <= 10 * chi is below the range the guarantees are tuned for");
            }
            fairness_sigma = outcome.report.sigma;
            solution = (outcome.solution.clone(), outcome.report.clone());
            iterated = Some(report::IterReport::new(&outcome));
        }
        AlgChoice::GreedyPlus => {
            let (sol, rep) = alg_greed_plus(&inst)?;
            fairness_sigma = rep.sigma;
            solution = (sol, rep);
        }
        AlgChoice::Balanced => {
            config.insert("delta".to_string(), serde_json::json!(delta));
            let (sol, rep) = alg_balanced(&inst, delta)?;
            fairness_sigma = rep.sigma;
            solution = (sol, rep);
        }
        AlgChoice::Geom => unreachable!(),
    }
    let (sol, rep): (fmc_core::Solution, fmc_core::FairnessReport) = solution;
    let nodes = node_map
        .as_ref()
        .map(|map| sol.selected.iter().map(|&s| map[s]).collect::<Vec<_>>());
    let oracle_cmp = if with_oracle {
        let orc = oracle::exact_solve(&inst, oracle_budget())?;
        Some(report::compare_with_oracle(
            alg_name,
            &sol,
            fairness_sigma,
            &orc,
            &inst,
            mode == ModeChoice::ConstChi,
            delta,
        ))
    } else {
        None
    };
    let run = RunReport {
        schema_version: SCHEMA_VERSION,
        instance_digest: digest,
        algorithm: alg_name.into(),
        config,
        solution: Some(report::SolutionReport::new(&sol, &rep, nodes)),
        oracle: oracle_cmp,
        randomized,
        iterated,
        geometry: None,
    };
    emit(&run, out.as_deref(), started)?;
    Ok(0)
}

fn emit(run: &RunReport, out: Option<&Path>, started: Instant) -> fmc_core::Result<()> {
    match out {
        Some(path) => write_atomic(path, run)?,
        None => println!("{}", serde_json::to_string_pretty(run).expect("report serialization")),
    }
    eprintln!("solved in {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

fn parse_params(text: &str) -> BTreeMap<String, String> {
    text.split(',')
        .filter(|kv| !kv.is_empty())
        .filter_map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn need<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> fmc_core::Result<T> {
    map.get(key)
        .ok_or_else(|| Error::Param(format!("missing parameter {key}")))?
        .parse()
        .map_err(|_| Error::Param(format!("parameter {key} did not parse")))
}

fn get_or<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> fmc_core::Result<T> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Param(format!("parameter {key} did not parse"))),
    }
}

fn cmd_gen(cmd: Command) -> fmc_core::Result<i32> {
    let Command::Gen {
        family,
        params,
        seed,
        out,
    } = cmd
    else {
        unreachable!()
    };
    let map = parse_params(&params);
    let family = match family.as_str() {
        "gap" => Family::Gap {
            alpha: need(&map, "alpha")?,
        },
        "random" => Family::Random(RandomParams {
            n: need(&map, "n")?,
            m: need(&map, "m")?,
            k: need(&map, "k")?,
            chi: need(&map, "chi")?,
            density: get_or(&map, "density", 0.3)?,
            weighted: get_or(&map, "weighted", 0u8)? == 1,
        }),
        "segregated" => {
            let chi: usize = need(&map, "chi")?;
            Family::Segregated(SegregatedParams {
                k: need(&map, "k")?,
                elements_per_color: vec![need(&map, "elems")?; chi],
                sets_per_color: vec![need(&map, "sets")?; chi],
                max_set_size: need(&map, "max")?,
            })
        }
        "balanced" => Family::Balanced(BalancedParams {
            delta: need(&map, "delta")?,
            chi: need(&map, "chi")?,
            k: need(&map, "k")?,
            m: need(&map, "m")?,
            elements_per_color: need(&map, "elems")?,
            max_per_color_in_set: get_or(&map, "maxper", 2)?,
        }),
        other => return Err(Error::Param(format!("unknown family {other}"))),
    };
    let inst = fmc_core::generate::generate(&family, seed)?;
    inst.save(&out)?;
    eprintln!(
        "wrote {} (n={}, m={}, k={}, chi={})",
        out.display(),
        inst.n,
        inst.m,
        inst.k,
        inst.chi
    );
    Ok(0)
}

fn cmd_oracle(cmd: Command) -> fmc_core::Result<i32> {
    let Command::Oracle {
        input,
        at_most_k,
        out,
        k,
    } = cmd
    else {
        unreachable!()
    };
    let (inst, _) = load_solver_input(&input, k)?;
    let budget = oracle_budget();
    let result = oracle::exact_solve(&inst, budget)?;
    #[derive(serde::Serialize)]
    struct OracleReport {
        feasible: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        opt_weight: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        opt_count: Option<usize>,
        opt_unfair_weight: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness_sets: Option<Vec<usize>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        feasible_at_most_k: Option<bool>,
    }
    let rep = OracleReport {
        feasible: result.feasible,
        opt_weight: result.opt_weight,
        opt_count: result.opt_count,
        opt_unfair_weight: result.opt_unfair_weight,
        witness_sets: result
            .witness
            .as_ref()
            .map(|w| w.selected.iter().map(|s| s + 1).collect()),
        feasible_at_most_k: if at_most_k {
            Some(oracle::feasible_at_most(&inst, budget)?)
        } else {
            None
        },
    };
    match out {
        Some(path) => write_atomic(&path, &rep)?,
        None => println!("{}", serde_json::to_string_pretty(&rep).expect("report serialization")),
    }
    if result.feasible {
        Ok(0)
    } else {
        Ok(2)
    }
}

fn cmd_bench(cmd: Command) -> fmc_core::Result<i32> {
    let Command::Bench { suite, out } = cmd else {
        unreachable!()
    };
    if suite != "desk" {
        return Err(Error::Param(format!("unknown suite {suite}")));
    }
    let outcomes = desk::run_all();
    let summary = desk::algorithm_summary();
    println!("{:<4} {:<62} {:>6}", "id", "criterion", "status");
    for o in &outcomes {
        println!(
            "{:<4} {:<62} {:>6}",
            o.id,
            o.label,
            if o.pass { "PASS" } else { "FAIL" }
        );
    }
    println!();
    println!(
        "{:<12} {:>9} {:>18} {:>10} {:>16}",
        "algorithm", "instances", "mean weight/OPT", "max sigma", "bound pass rate"
    );
    for row in &summary {
        println!(
            "{:<12} {:>9} {:>18.3} {:>10.3} {:>16.2}",
            row.algorithm, row.instances, row.mean_weight_ratio, row.max_sigma, row.bound_pass_rate
        );
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        #[derive(serde::Serialize)]
        struct BenchReport<'a> {
            schema_version: u32,
            criteria: &'a [desk::CriterionOutcome],
            algorithms: &'a [desk::AlgorithmSummary],
        }
        write_atomic(
            &dir.join("summary.json"),
            &BenchReport {
                schema_version: SCHEMA_VERSION,
                criteria: &outcomes,
                algorithms: &summary,
            },
        )?;
        eprintln!("wrote {}", dir.join("summary.json").display());
    }
    Ok(if outcomes.iter().all(|o| o.pass) { 0 } else { 1 })
}

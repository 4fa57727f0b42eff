//! Run-report schema. Reports are JSON with indices shifted to the 1-based
//! file convention, written atomically, and fully determined by (instance,
//! algorithm, seed, config); wall-clock timings go to stderr, never into
//! the file.

use fmc_core::geometry::{BallSet, GeomOutcome};
use fmc_core::instance::{FairnessReport, Solution};
use fmc_core::iterated::{BranchDescriptor, IterOutcome, TraceEvent};
use fmc_core::randomized::{GuessRecord, SolverOutcome, TrialRecord};
use fmc_core::OracleResult;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct SolutionReport {
    /// 1-based set indices.
    pub selected_sets: Vec<usize>,
    /// 1-based original node ids, for graph inputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_nodes: Option<Vec<usize>>,
    /// 1-based covered element indices.
    pub covered_elements: Vec<usize>,
    pub per_color_counts: Vec<usize>,
    pub weight: f64,
    pub cardinality_mode: fmc_core::instance::CardinalityMode,
    pub sigma: f64,
}

impl SolutionReport {
    pub fn new(sol: &Solution, rep: &FairnessReport, nodes: Option<Vec<usize>>) -> Self {
        SolutionReport {
            selected_sets: sol.selected.iter().map(|s| s + 1).collect(),
            selected_nodes: nodes.map(|ns| ns.iter().map(|v| v + 1).collect()),
            covered_elements: sol.covered.iter_ones().map(|e| e + 1).collect(),
            per_color_counts: sol.p.clone(),
            weight: sol.weight,
            cardinality_mode: sol.cardinality_mode,
            sigma: rep.sigma,
        }
    }
}

#[derive(Serialize)]
pub struct OracleComparison {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_count: Option<usize>,
    pub opt_unfair_weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_over_opt: Option<f64>,
    /// Per-bound verdicts for the algorithm that produced the solution.
    pub bounds: BTreeMap<String, bool>,
}

#[derive(Serialize)]
pub struct RandomizedReport {
    pub opt_hash: usize,
    pub opt_frac: f64,
    pub guesses: Vec<GuessRecord>,
    pub trials: Vec<TrialRecord>,
    pub anchors_sampled: bool,
}

impl RandomizedReport {
    pub fn new(out: &SolverOutcome) -> Self {
        RandomizedReport {
            opt_hash: out.opt_hash,
            opt_frac: out.opt_frac,
            guesses: out.guesses.clone(),
            trials: out.trials.clone(),
            anchors_sampled: out.anchors_sampled,
        }
    }
}

#[derive(Serialize)]
pub struct IterReport {
    pub branch: BranchDescriptor,
    pub bounds_ok: bool,
    pub branches_tried: usize,
    pub lp_solves: usize,
    pub partial: bool,
    pub k_below_recommended: bool,
    pub trace: Vec<TraceEvent>,
}

impl IterReport {
    pub fn new(out: &IterOutcome) -> Self {
        IterReport {
            branch: out.branch.clone(),
            bounds_ok: out.bounds_ok,
            branches_tried: out.branches_tried,
            lp_solves: out.lp_solves,
            partial: out.partial,
            k_below_recommended: out.k_below_recommended,
            trace: out.trace.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct GeomReport {
    pub centers: Vec<(f64, f64)>,
    pub per_color_weight: Vec<f64>,
    pub coverage: f64,
    pub sigma: f64,
    pub fair: bool,
    pub repetition: usize,
    pub shift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<GeomOracleComparison>,
}

#[derive(Serialize)]
pub struct GeomOracleComparison {
    pub fair_value: Option<f64>,
    pub unconstrained_value: f64,
    pub fairness_feasible: bool,
    pub bounds: BTreeMap<String, bool>,
}

impl GeomReport {
    pub fn new(out: &GeomOutcome, balls: &BallSet) -> Self {
        GeomReport {
            centers: balls.centers.clone(),
            per_color_weight: out.per_color_weight.clone(),
            coverage: out.coverage,
            sigma: out.sigma,
            fair: out.fair,
            repetition: out.repetition,
            shift: out.shift,
            oracle: None,
        }
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance_digest: String,
    pub algorithm: String,
    pub config: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub randomized: Option<RandomizedReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterated: Option<IterReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeomReport>,
}

/// FNV-1a over the raw input bytes; hex-encoded.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Write pretty JSON atomically (temp file in the same directory + rename).
pub fn write_atomic(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serialization");
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("report")
    ));
    std::fs::write(&tmp, text + "\n")?;
    std::fs::rename(&tmp, path)
}

/// Oracle comparison with the bound verdicts for one algorithm family.
pub fn compare_with_oracle(
    alg: &str,
    sol: &Solution,
    sigma: f64,
    oracle: &OracleResult,
    inst: &fmc_core::FmcInstance,
    mode_const_chi: bool,
    delta: usize,
) -> OracleComparison {
    let stats = inst.stats();
    let f = stats.f as f64;
    let chi = inst.chi;
    let k = inst.k;
    let rho_f = fmc_core::special::rho(f).unwrap();
    let rho_bar = rho_f.max(fmc_core::special::rho(k as f64).unwrap());
    let mut bounds = BTreeMap::new();
    let ratio = oracle.opt_weight.map(|opt| sol.weight / opt);
    if let Some(opt) = oracle.opt_weight {
        match alg {
            "large" | "medium" | "small" => {
                bounds.insert("selects_exactly_k".into(), sol.selected.len() == k);
                bounds.insert("weight_at_least_rho_f_opt".into(), sol.weight >= rho_f * opt - 1e-9);
                bounds.insert("sigma_finite".into(), sigma.is_finite());
            }
            "iter-node" => {
                let (count_cap, sigma_cap) = if mode_const_chi {
                    (k + (chi - 1) / 2, 4.0 + 4.0 * chi as f64)
                } else {
                    (k + chi - 1, 4.0 + 2.0 * chi as f64 + 4.0 * (chi * chi) as f64)
                };
                bounds.insert("count_within_cap".into(), sol.selected.len() <= count_cap);
                bounds.insert("weight_at_least_half_opt".into(), sol.weight >= opt / 2.0 - 1e-9);
                bounds.insert("sigma_under_cap".into(), sigma < sigma_cap);
            }
            "iter-fmc" => {
                let count_cap = if mode_const_chi { k + (chi - 1) / 2 } else { k + chi - 1 };
                bounds.insert("count_within_cap".into(), sol.selected.len() <= count_cap);
                bounds.insert(
                    "weight_at_least_opt_over_f".into(),
                    sol.weight >= opt / f - 1e-9,
                );
            }
            "greedy-plus" => {
                bounds.insert("at_most_k".into(), sol.selected.len() <= k);
                bounds.insert("weight_at_least_rho_opt".into(), sol.weight >= rho_bar * opt - 1e-9);
                bounds.insert(
                    "two_fair".into(),
                    (0..chi).all(|i| (0..chi).all(|j| sol.p[i] <= 2 * sol.p[j])),
                );
            }
            "balanced" => {
                let cap = (2.0 + 2.0 * delta as f64) * f;
                bounds.insert("exactly_k".into(), sol.selected.len() == k);
                bounds.insert("weight_at_least_rho_opt".into(), sol.weight >= rho_bar * opt - 1e-9);
                bounds.insert(
                    "ratio_within_window".into(),
                    (0..chi).all(|i| {
                        (0..chi).all(|j| sol.p[i] as f64 <= cap * sol.p[j] as f64 + 1e-9)
                    }),
                );
            }
            _ => {}
        }
    }
    OracleComparison {
        feasible: oracle.feasible,
        opt_weight: oracle.opt_weight,
        opt_count: oracle.opt_count,
        opt_unfair_weight: oracle.opt_unfair_weight,
        weight_over_opt: ratio,
        bounds,
    }
}

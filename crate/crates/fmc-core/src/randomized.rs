//! Randomized LP-rounding solvers. Each one guesses the covered-element
//! count over a descending grid, solves the matching relaxation to a vertex,
//! rounds the set variables with the sum-preserving scheme (so exactly k
//! sets come out on every trial), and keeps the trial with the smallest
//! fairness score across all guesses.

use crate::instance::{FairnessReport, FmcInstance, Solution};
use crate::lp::{
    build_large_lp, build_medium_lp, build_small_lp, opt_hash_grid, solve_vertex, LpModel,
    LpStatus,
};
use crate::rng::sub_seed;
use crate::rounding::{dependent_round_trial, Marginals};
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Large,
    Medium,
    Small,
}

#[derive(Clone, Debug)]
pub struct RandomizedConfig {
    pub algorithm: Algorithm,
    /// Rounding trials per guess; default is ceil(5 ln n).
    pub trials: Option<usize>,
    pub seed: u64,
    /// Pin the coverage-count guess instead of enumerating the grid.
    pub opt_hash_override: Option<usize>,
    /// Largest color count the anchored solver will enumerate.
    pub small_chi_guard: usize,
    /// Anchor combinations per color subset before sampling kicks in.
    pub small_anchor_cap: usize,
}

impl RandomizedConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        RandomizedConfig {
            algorithm,
            trials: None,
            seed,
            opt_hash_override: None,
            small_chi_guard: 3,
            small_anchor_cap: 100_000,
        }
    }

    fn trial_count(&self, n: usize) -> usize {
        self.trials
            .unwrap_or_else(|| (5.0 * (n.max(2) as f64).ln()).ceil() as usize)
            .max(1)
    }
}

/// One rounding outcome, scored.
#[derive(Clone, Debug, Serialize)]
pub struct Trial {
    pub selected: Vec<usize>,
    pub weight: f64,
    pub p: Vec<usize>,
    pub sigma: f64,
}

/// Per-trial trace entry in run reports.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub guess: usize,
    pub trial: u64,
    pub weight: f64,
    pub p: Vec<usize>,
    pub sigma: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GuessRecord {
    pub guess: usize,
    pub feasible: bool,
    pub opt_frac: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SolverOutcome {
    pub algorithm: Algorithm,
    pub best: Solution,
    pub best_report: FairnessReport,
    /// The guess that produced the best trial.
    pub opt_hash: usize,
    /// Relaxation optimum at that guess.
    pub opt_frac: f64,
    pub guesses: Vec<GuessRecord>,
    pub trials: Vec<TrialRecord>,
    /// Anchored mode gave up exhaustive anchor enumeration and sampled.
    pub anchors_sampled: bool,
}

/// Trial-ensemble fairness verdicts at a threshold `eps >= 1`: the
/// expectation form compares mean per-color counts pairwise, the joint form
/// reports how often a single trial satisfied every pairwise cap at once.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleVerdicts {
    pub eps: f64,
    pub in_expectation: bool,
    pub joint_probability: f64,
}

impl SolverOutcome {
    pub fn ensemble_verdicts(&self, eps: f64) -> EnsembleVerdicts {
        let chi = self.best.p.len();
        let n = self.trials.len().max(1) as f64;
        let mut mean_p = vec![0.0f64; chi];
        for t in &self.trials {
            for (m, &p) in mean_p.iter_mut().zip(&t.p) {
                *m += p as f64;
            }
        }
        mean_p.iter_mut().for_each(|m| *m /= n);
        let in_expectation = (0..chi)
            .all(|i| (0..chi).all(|j| mean_p[i] <= eps * mean_p[j] + 1e-12));
        let joint = self
            .trials
            .iter()
            .filter(|t| {
                (0..chi).all(|i| (0..chi).all(|j| t.p[i] as f64 <= eps * t.p[j] as f64 + 1e-12))
            })
            .count() as f64
            / n;
        EnsembleVerdicts {
            eps,
            in_expectation,
            joint_probability: joint,
        }
    }
}

/// Smaller sigma wins; ties go to larger weight, then to the
/// lexicographically smaller selection. With every sigma infinite this
/// degrades to picking the heaviest trial.
fn better(a: &Trial, b: &Trial) -> bool {
    if a.sigma != b.sigma {
        return a.sigma < b.sigma;
    }
    if a.weight != b.weight {
        return a.weight > b.weight;
    }
    a.selected < b.selected
}

/// Run `body` once per trial on the substream `seed ^ t` and keep the
/// min-sigma outcome. Prefix property: growing `trials` replays the same
/// leading substreams, so the reported sigma never worsens.
pub fn boost<F>(body: F, trials: usize, seed: u64) -> Option<Trial>
where
    F: Fn(u64) -> Trial + Sync,
{
    let outcomes: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| body(seed ^ t))
        .collect();
    let mut best: Option<Trial> = None;
    for tr in outcomes {
        if best.as_ref().is_none_or(|b| better(&tr, b)) {
            best = Some(tr);
        }
    }
    best
}

fn score_selection(inst: &FmcInstance, selected: Vec<usize>) -> Trial {
    let (sol, rep) = inst
        .evaluate(&selected)
        .expect("rounded selections are distinct and in range");
    Trial {
        selected: sol.selected,
        weight: sol.weight,
        p: sol.p,
        sigma: rep.sigma,
    }
}

struct GuessRun {
    record: GuessRecord,
    best: Option<(Trial, f64)>,
    trials: Vec<TrialRecord>,
}

fn run_one_guess(
    inst: &FmcInstance,
    model: &LpModel,
    guess: usize,
    forced: &[usize],
    trials: usize,
    seed: u64,
) -> Result<GuessRun> {
    let sol = solve_vertex(model)?;
    if sol.status != LpStatus::Optimal {
        return Ok(GuessRun {
            record: GuessRecord {
                guess,
                feasible: false,
                opt_frac: None,
            },
            best: None,
            trials: Vec::new(),
        });
    }
    let y = model.set_values(&sol.values);
    let free: Vec<(usize, f64)> = y
        .iter()
        .copied()
        .filter(|(s, _)| !forced.contains(s))
        .collect();
    let marginals = Marginals::new(free.iter().map(|&(_, v)| v).collect())?;
    let mut best: Option<Trial> = None;
    let mut records = Vec::with_capacity(trials);
    let outcomes: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let rounded = dependent_round_trial(&marginals, seed, t);
            let mut selected: Vec<usize> = forced.to_vec();
            selected.extend(
                rounded
                    .bits
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| b)
                    .map(|(i, _)| free[i].0),
            );
            score_selection(inst, selected)
        })
        .collect();
    for (t, tr) in outcomes.into_iter().enumerate() {
        assert_eq!(tr.selected.len(), inst.k, "every trial must select exactly k sets");
        records.push(TrialRecord {
            guess,
            trial: t as u64,
            weight: tr.weight,
            p: tr.p.clone(),
            sigma: tr.sigma,
        });
        if best.as_ref().is_none_or(|b| better(&tr, b)) {
            best = Some(tr);
        }
    }
    Ok(GuessRun {
        record: GuessRecord {
            guess,
            feasible: true,
            opt_frac: Some(sol.objective),
        },
        best: best.map(|b| (b, sol.objective)),
        trials: records,
    })
}

fn finish(
    inst: &FmcInstance,
    algorithm: Algorithm,
    runs: Vec<(usize, GuessRun)>,
    anchors_sampled: bool,
) -> Result<SolverOutcome> {
    let mut guesses = Vec::new();
    let mut trials = Vec::new();
    let mut best: Option<(Trial, usize, f64)> = None;
    for (guess, run) in runs {
        guesses.push(run.record);
        trials.extend(run.trials);
        if let Some((tr, opt_frac)) = run.best {
            if best.as_ref().is_none_or(|(b, _, _)| better(&tr, b)) {
                best = Some((tr, guess, opt_frac));
            }
        }
    }
    let Some((tr, opt_hash, opt_frac)) = best else {
        return Err(Error::Infeasible(
            "every coverage-count guess gave an infeasible relaxation".into(),
        ));
    };
    let (solution, report) = inst.evaluate(&tr.selected)?;
    Ok(SolverOutcome {
        algorithm,
        best: solution,
        best_report: report,
        opt_hash,
        opt_frac,
        guesses,
        trials,
        anchors_sampled,
    })
}

fn guesses_for(inst: &FmcInstance, cfg: &RandomizedConfig) -> Vec<usize> {
    match cfg.opt_hash_override {
        Some(g) => vec![g],
        None => opt_hash_grid(inst),
    }
}

/// Strengthened relaxation + rounding.
pub fn alg_large(inst: &FmcInstance, cfg: &RandomizedConfig) -> Result<SolverOutcome> {
    let trials = cfg.trial_count(inst.n);
    let mut runs = Vec::new();
    for guess in guesses_for(inst, cfg) {
        let model = build_large_lp(inst, guess)?;
        let run = run_one_guess(inst, &model, guess, &[], trials, cfg.seed)?;
        runs.push((guess, run));
    }
    finish(inst, Algorithm::Large, runs, false)
}

/// Relaxation with per-color load variables + rounding.
pub fn alg_medium(inst: &FmcInstance, cfg: &RandomizedConfig) -> Result<SolverOutcome> {
    let trials = cfg.trial_count(inst.n);
    let mut runs = Vec::new();
    for guess in guesses_for(inst, cfg) {
        let model = build_medium_lp(inst, guess)?;
        let run = run_one_guess(inst, &model, guess, &[], trials, cfg.seed)?;
        runs.push((guess, run));
    }
    finish(inst, Algorithm::Medium, runs, false)
}

/// Anchored relaxation: enumerate color subsets and one anchor set per
/// anchored color, force the anchors into every trial, and round the
/// residual mass to exactly `k` sets overall.
pub fn alg_small(inst: &FmcInstance, cfg: &RandomizedConfig) -> Result<SolverOutcome> {
    if inst.chi > cfg.small_chi_guard {
        return Err(Error::Param(format!(
            "chi={} exceeds small-mode guard {}",
            inst.chi, cfg.small_chi_guard
        )));
    }
    let trials = cfg.trial_count(inst.n);
    // Sets holding at least one element of each color.
    let holders: Vec<Vec<usize>> = (0..inst.chi)
        .map(|c| {
            (0..inst.m)
                .filter(|&s| inst.sets[s].iter().any(|&e| inst.colors[e] == c))
                .collect()
        })
        .collect();
    let mut runs = Vec::new();
    let mut anchors_sampled = false;
    for guess in guesses_for(inst, cfg) {
        for mask in 0..(1u32 << inst.chi) {
            let psi: Vec<usize> = (0..inst.chi).filter(|&c| mask & (1 << c) != 0).collect();
            let combos = anchor_combos(
                &psi,
                &holders,
                cfg.small_anchor_cap,
                sub_seed(cfg.seed, "anchor-sample", (guess as u64) ^ ((mask as u64) << 32)),
                &mut anchors_sampled,
            );
            for combo in combos {
                let anchors: Vec<(usize, usize)> =
                    psi.iter().copied().zip(combo.iter().copied()).collect();
                let model = build_small_lp(inst, guess, &psi, &anchors)?;
                let mut forced: Vec<usize> = combo.clone();
                forced.sort_unstable();
                forced.dedup();
                if forced.len() > inst.k {
                    continue;
                }
                let run = run_one_guess(inst, &model, guess, &forced, trials, cfg.seed)?;
                runs.push((guess, run));
            }
        }
    }
    finish(inst, Algorithm::Small, runs, anchors_sampled)
}

/// All ways of picking one holder set per anchored color, capped; beyond the
/// cap, combinations are sampled uniformly under the run seed.
fn anchor_combos(
    psi: &[usize],
    holders: &[Vec<usize>],
    cap: usize,
    sample_seed: u64,
    sampled_flag: &mut bool,
) -> Vec<Vec<usize>> {
    if psi.is_empty() {
        return vec![Vec::new()];
    }
    let total: u128 = psi
        .iter()
        .map(|&c| holders[c].len() as u128)
        .product();
    if total == 0 {
        return Vec::new();
    }
    if total <= cap as u128 {
        let mut out = vec![Vec::new()];
        for &c in psi {
            let mut next = Vec::with_capacity(out.len() * holders[c].len());
            for prefix in &out {
                for &s in &holders[c] {
                    let mut combo = prefix.clone();
                    combo.push(s);
                    next.push(combo);
                }
            }
            out = next;
        }
        out
    } else {
        *sampled_flag = true;
        let mut rng = crate::rng::seeded(sample_seed);
        (0..cap)
            .map(|_| {
                psi.iter()
                    .map(|&c| holders[c][rng.gen_range(0..holders[c].len())])
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gap;
    use crate::oracle::{exact_solve, DEFAULT_BUDGET};

    fn cfg(alg: Algorithm, seed: u64, trials: usize) -> RandomizedConfig {
        RandomizedConfig {
            trials: Some(trials),
            ..RandomizedConfig::new(alg, seed)
        }
    }

    #[test]
    fn integral_lp_rounds_to_itself() {
        // disjoint equal-size one-per-color-pair sets: the relaxation optimum
        // is integral, every trial returns it, sigma = 1
        let inst = FmcInstance::new(
            8,
            4,
            2,
            2,
            vec![1.0; 8],
            vec![0, 1, 0, 1, 0, 1, 0, 1],
            vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]],
            None,
        )
        .unwrap();
        let out = alg_large(&inst, &cfg(Algorithm::Large, 3, 20)).unwrap();
        assert_eq!(out.best_report.sigma, 1.0);
        assert_eq!(out.best.p, vec![2, 2]);
        assert_eq!(out.best.weight, 4.0);
        for t in &out.trials {
            assert_eq!(t.p.iter().sum::<usize>(), 4);
        }
    }

    #[test]
    fn gap_always_selects_exactly_k() {
        let inst = gap(2).unwrap();
        let out = alg_large(&inst, &cfg(Algorithm::Large, 7, 200)).unwrap();
        assert_eq!(out.best.selected.len(), inst.k);
        assert_eq!(out.trials.iter().filter(|t| t.guess == out.opt_hash).count(), 200);
    }

    #[test]
    fn medium_shares_rounding_and_cardinality() {
        let inst = gap(2).unwrap();
        let large = alg_large(&inst, &cfg(Algorithm::Large, 5, 50)).unwrap();
        let medium = alg_medium(&inst, &cfg(Algorithm::Medium, 5, 50)).unwrap();
        assert_eq!(large.best.selected.len(), inst.k);
        assert_eq!(medium.best.selected.len(), inst.k);
    }

    #[test]
    fn small_guard_and_anchoring() {
        let inst = gap(2).unwrap();
        let mut c = cfg(Algorithm::Small, 11, 10);
        c.opt_hash_override = Some(6);
        let out = alg_small(&inst, &c).unwrap();
        assert_eq!(out.best.selected.len(), inst.k);
        // anchoring forces one element of each anchored color: the best
        // solution of a feasible anchored branch covers every color
        assert!(out.best.p.iter().all(|&p| p >= 1));
        assert!(!out.anchors_sampled);

        let five_colors = FmcInstance::new(
            5,
            5,
            2,
            5,
            vec![1.0; 5],
            vec![0, 1, 2, 3, 4],
            (0..5).map(|e| vec![e]).collect(),
            None,
        )
        .unwrap();
        let err = alg_small(&five_colors, &cfg(Algorithm::Small, 1, 5)).unwrap_err();
        assert!(err.to_string().contains("guard"));
    }

    #[test]
    fn expectation_tracks_relaxation_bound() {
        // mean covered weight over many trials stays above rho(f) * OPT
        let inst = gap(2).unwrap();
        let oracle = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        let mut c = cfg(Algorithm::Large, 17, 500);
        c.opt_hash_override = oracle.opt_count;
        let out = alg_large(&inst, &c).unwrap();
        let mean: f64 =
            out.trials.iter().map(|t| t.weight).sum::<f64>() / out.trials.len() as f64;
        let rho_f = crate::special::rho(inst.stats().f as f64).unwrap();
        let bound = rho_f * oracle.opt_weight.unwrap();
        let sd: f64 = {
            let var = out
                .trials
                .iter()
                .map(|t| (t.weight - mean).powi(2))
                .sum::<f64>()
                / (out.trials.len() as f64 - 1.0);
            (var / out.trials.len() as f64).sqrt()
        };
        assert!(
            mean >= bound - 3.0 * sd,
            "mean {mean} under bound {bound} (se {sd})"
        );
    }

    #[test]
    fn boost_monotone_in_trials() {
        let inst = gap(2).unwrap();
        let a = alg_large(&inst, &cfg(Algorithm::Large, 23, 25)).unwrap();
        let b = alg_large(&inst, &cfg(Algorithm::Large, 23, 50)).unwrap();
        assert!(b.best_report.sigma <= a.best_report.sigma);
        // single-trial boost equals a single run
        let single = alg_large(&inst, &cfg(Algorithm::Large, 23, 1)).unwrap();
        assert_eq!(single.trials.iter().filter(|t| t.guess == single.opt_hash).count(), 1);
    }

    #[test]
    fn boost_picks_min_sigma() {
        // with seed 0 the substream id is the trial index itself
        let traces = [(3.0, 1.0), (1.0, 5.0), (2.0, 9.0)];
        let best = boost(
            |sub| {
                let i = sub as usize;
                Trial {
                    selected: vec![i],
                    weight: traces[i].1,
                    p: vec![1],
                    sigma: traces[i].0,
                }
            },
            3,
            0,
        )
        .unwrap();
        assert_eq!(best.sigma, 1.0);
        assert_eq!(best.selected, vec![1]);
    }

    #[test]
    fn reproducible_outcomes() {
        let inst = gap(2).unwrap();
        let a = alg_large(&inst, &cfg(Algorithm::Large, 99, 40)).unwrap();
        let b = alg_large(&inst, &cfg(Algorithm::Large, 99, 40)).unwrap();
        assert_eq!(a.best.selected, b.best.selected);
        assert_eq!(a.opt_hash, b.opt_hash);
        assert_eq!(a.best.weight, b.best.weight);
    }
}

//! Deterministic iterated rounding. An outer search guesses the covered
//! count, an anchor tuple of high-cardinality sets, and per-color residual
//! targets; the inner loop repeatedly solves the incidence relaxation to a
//! vertex, permanently fixes 0/1-valued set variables, and shrinks the
//! program. When no variable is integral the rank argument caps how many
//! set variables can remain, and the loop closes by taking all of them.

use crate::instance::{ColoredGraph, FairnessReport, FmcInstance, GraphTranslation, Solution};
use crate::lp::{
    build_iter_lp, solve_vertex, ColorTargets, IterLpState, LpModel, LpSolution, LpStatus, RowTag,
    VarKind,
};
use crate::{Error, Result};
use serde::Serialize;

/// Variables this close to 0 or 1 are treated as integral.
pub const TOL_INT: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterMode {
    /// Enumerate chi+1 anchors and exact per-color targets.
    ConstChi,
    /// One anchor and two-sided target windows.
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SystemKind {
    Node,
    SetSystem,
}

#[derive(Clone, Debug)]
pub struct IterGuards {
    /// Largest chi for which the constant-chi enumeration is attempted.
    pub chi_guard: usize,
    /// Cap on inner LP solves across the whole search.
    pub solve_budget: usize,
}

impl Default for IterGuards {
    fn default() -> Self {
        IterGuards {
            chi_guard: 3,
            solve_budget: 250_000,
        }
    }
}

/// Per-iteration log of the winning branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum TraceEvent {
    DropZero { unit: usize },
    FixOne { unit: usize, k_hat_left: usize, targets: Vec<i64> },
    TakeRemaining { units: Vec<usize> },
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchDescriptor {
    pub guess: usize,
    pub anchors: Vec<usize>,
    /// Exact targets in constant-chi mode; window lower bounds otherwise.
    pub targets: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct IterOutcome {
    pub solution: Solution,
    pub report: FairnessReport,
    pub branch: BranchDescriptor,
    /// Output obeys the mode's set-count and fairness-ratio caps.
    pub bounds_ok: bool,
    pub branches_tried: usize,
    pub lp_solves: usize,
    /// Search stopped at the solve budget before finishing enumeration.
    pub partial: bool,
    /// The analysis assumes a budget comfortably above 10 * chi; smaller k
    /// still runs but is worth flagging.
    pub k_below_recommended: bool,
    pub trace: Vec<TraceEvent>,
}

/// Vertex check used before the closing step: the point must be an extreme
/// point (tight rows of full rank) and the count of remaining set variables
/// must fit under the rank-lemma cap for the model's target shape.
pub fn rank_certificate(sol: &LpSolution, model: &LpModel) -> bool {
    let n_units = model
        .vars
        .iter()
        .filter(|v| matches!(v.kind, VarKind::Set(_)))
        .count();
    let mut chi = 0usize;
    let mut windowed = false;
    for row in &model.rows {
        match row.tag {
            RowTag::ColorCount(c) => chi = chi.max(c + 1),
            RowTag::ColorWindowLo(c) | RowTag::ColorWindowHi(c) => {
                chi = chi.max(c + 1);
                windowed = true;
            }
            _ => {}
        }
    }
    let limit = if windowed { 2 * chi + 1 } else { chi + 1 };
    if n_units > limit {
        return false;
    }
    let (_, rank) = model.tight_rank(&sol.values);
    rank == model.num_vars()
}

struct BranchInput {
    anchors: Vec<usize>,
    pool: Vec<usize>,
    /// (element, unit, color, weight); elements covered by anchors excluded.
    incidences: Vec<(usize, usize, usize, f64)>,
    k_hat: usize,
    chi: usize,
    targets: ColorTargets,
}

enum BranchEnd {
    Infeasible,
    Done {
        selected: Vec<usize>,
        trace: Vec<TraceEvent>,
    },
}

fn targets_done(targets: &ColorTargets) -> bool {
    match targets {
        ColorTargets::Exact(q) => q.iter().all(|&v| v == 0),
        ColorTargets::Window(w) => w.iter().all(|&(lo, hi)| lo <= 1e-9 && hi >= -1e-9),
    }
}

fn run_branch(input: &BranchInput, lp_solves: &mut usize, want_trace: bool) -> Result<BranchEnd> {
    let mut pool = input.pool.clone();
    let mut incid = input.incidences.clone();
    let mut k_hat = input.k_hat;
    let mut targets = input.targets.clone();
    let mut selected: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    let mut prev_obj: Option<f64> = None;
    let cap = pool.len() + 1;
    for _t in 0..=cap {
        if pool.is_empty() {
            if k_hat == 0 && targets_done(&targets) {
                return Ok(BranchEnd::Done { selected, trace });
            }
            return Ok(BranchEnd::Infeasible);
        }
        if k_hat > pool.len() {
            return Ok(BranchEnd::Infeasible);
        }
        let state = IterLpState {
            units: pool.clone(),
            incidences: incid.clone(),
            k_hat,
            chi: input.chi,
            targets: targets.clone(),
        };
        let model = build_iter_lp(&state)?;
        *lp_solves += 1;
        let sol = solve_vertex(&model)?;
        if sol.status != LpStatus::Optimal {
            return Ok(BranchEnd::Infeasible);
        }
        // The optimum must shrink by exactly the weight fixed in the previous
        // step; anything else means the bookkeeping drifted.
        if let Some(expect) = prev_obj {
            if (sol.objective - expect).abs() > 1e-6 * expect.abs().max(1.0) {
                return Err(Error::Lp(format!(
                    "objective bookkeeping drifted: expected {expect}, relaxation returned {}",
                    sol.objective
                )));
            }
        }
        let y = model.set_values(&sol.values);
        let zeros: Vec<usize> = y
            .iter()
            .filter(|&&(_, v)| v <= TOL_INT)
            .map(|&(u, _)| u)
            .collect();
        if !zeros.is_empty() {
            pool.retain(|u| !zeros.contains(u));
            incid.retain(|&(_, u, _, _)| !zeros.contains(&u));
            if want_trace {
                trace.extend(zeros.iter().map(|&u| TraceEvent::DropZero { unit: u }));
            }
            prev_obj = Some(sol.objective);
            continue;
        }
        if let Some(&(unit, _)) = y.iter().find(|&&(_, v)| v >= 1.0 - TOL_INT) {
            if k_hat == 0 {
                return Ok(BranchEnd::Infeasible);
            }
            selected.push(unit);
            k_hat -= 1;
            let mut fixed_weight = 0.0;
            let mut fixed_counts = vec![0i64; input.chi];
            incid.retain(|&(_, u, color, w)| {
                if u == unit {
                    fixed_weight += w;
                    fixed_counts[color] += 1;
                    false
                } else {
                    true
                }
            });
            pool.retain(|&u| u != unit);
            match &mut targets {
                ColorTargets::Exact(q) => {
                    for (qc, fc) in q.iter_mut().zip(&fixed_counts) {
                        *qc -= fc;
                        if *qc < 0 {
                            return Ok(BranchEnd::Infeasible);
                        }
                    }
                }
                ColorTargets::Window(w) => {
                    for ((lo, hi), fc) in w.iter_mut().zip(&fixed_counts) {
                        *lo -= *fc as f64;
                        *hi -= *fc as f64;
                        if *hi < -1e-9 {
                            return Ok(BranchEnd::Infeasible);
                        }
                    }
                }
            }
            if want_trace {
                trace.push(TraceEvent::FixOne {
                    unit,
                    k_hat_left: k_hat,
                    targets: match &targets {
                        ColorTargets::Exact(q) => q.clone(),
                        ColorTargets::Window(w) => w.iter().map(|&(lo, _)| lo.ceil() as i64).collect(),
                    },
                });
            }
            prev_obj = Some(sol.objective - fixed_weight);
            continue;
        }
        // No integral set variable: the rank argument must cap the residue.
        if !rank_certificate(&sol, &model) {
            return Err(Error::Lp(format!(
                "rank certificate failed with {} set variables remaining",
                pool.len()
            )));
        }
        let take: Vec<usize> = y
            .iter()
            .filter(|&&(_, v)| v > TOL_INT)
            .map(|&(u, _)| u)
            .collect();
        selected.extend(take.iter().copied());
        if want_trace {
            trace.push(TraceEvent::TakeRemaining { units: take });
        }
        return Ok(BranchEnd::Done { selected, trace });
    }
    Err(Error::Lp("iteration cap exceeded in the rounding loop".into()))
}

// ---------------------------------------------------------------------------
// Outer search
// ---------------------------------------------------------------------------

fn sigma_cap(kind: SystemKind, mode: IterMode, chi: usize, f: usize) -> f64 {
    let chi = chi as f64;
    let f = f as f64;
    match (kind, mode) {
        (SystemKind::Node, IterMode::ConstChi) => 4.0 + 4.0 * chi,
        (SystemKind::Node, IterMode::General) => 4.0 + 2.0 * chi + 4.0 * chi * chi,
        (SystemKind::SetSystem, IterMode::ConstChi) => {
            (chi * chi * f + f * f).min(2.0 * chi * f * f)
        }
        (SystemKind::SetSystem, IterMode::General) => f * f + 3.0 * chi * chi * f,
    }
}

fn count_cap(mode: IterMode, k: usize, chi: usize) -> usize {
    match mode {
        // k + (chi - 1)/2, kept exact by flooring the half-integer
        IterMode::ConstChi => k + (chi - 1) / 2,
        IterMode::General => k + chi - 1,
    }
}

struct Candidate {
    selected: Vec<usize>,
    weight: f64,
    sigma: f64,
    bounds_ok: bool,
    descriptor: BranchDescriptor,
    input: BranchInput,
}

fn candidate_better(a: &Candidate, b: &Candidate) -> bool {
    if a.bounds_ok != b.bounds_ok {
        return a.bounds_ok;
    }
    if a.weight != b.weight {
        return a.weight > b.weight;
    }
    if a.sigma != b.sigma {
        return a.sigma < b.sigma;
    }
    a.selected < b.selected
}

fn branch_input(
    inst: &FmcInstance,
    anchors: &[usize],
    chi: usize,
    guess: usize,
    targets_for: impl Fn(&[i64]) -> Option<ColorTargets>,
) -> Option<(BranchInput, Vec<i64>)> {
    let min_anchor_size = anchors.iter().map(|&s| inst.sets[s].len()).min()?;
    if anchors.len() > inst.k {
        return None;
    }
    let k_hat = inst.k - anchors.len();
    let mut anchor_covered = vec![false; inst.n];
    for &s in anchors {
        for &e in &inst.sets[s] {
            anchor_covered[e] = true;
        }
    }
    let mut mu = vec![0i64; chi];
    for (e, &cov) in anchor_covered.iter().enumerate() {
        if cov {
            mu[inst.colors[e]] += 1;
        }
    }
    let per_color = (guess / chi) as i64;
    let base: Vec<i64> = mu.iter().map(|&m| per_color - m).collect();
    if base.iter().any(|&b| b < 0) {
        return None;
    }
    let mut pool = Vec::new();
    let mut incidences = Vec::new();
    for (s, set) in inst.sets.iter().enumerate() {
        if anchors.contains(&s) || set.len() > min_anchor_size {
            continue;
        }
        let residual: Vec<usize> = set.iter().copied().filter(|&e| !anchor_covered[e]).collect();
        if residual.is_empty() {
            // a fully anchor-covered set adds nothing; dropped before counting
            continue;
        }
        pool.push(s);
        for e in residual {
            incidences.push((e, s, inst.colors[e], inst.weights[e]));
        }
    }
    let targets = targets_for(&base)?;
    Some((
        BranchInput {
            anchors: anchors.to_vec(),
            pool,
            incidences,
            k_hat,
            chi,
            targets,
        },
        base,
    ))
}

fn run_engine(
    inst: &FmcInstance,
    kind: SystemKind,
    mode: IterMode,
    guards: &IterGuards,
) -> Result<IterOutcome> {
    if inst.proportions.is_some() {
        return Err(Error::Validation(
            "iterated rounding supports equal color proportions only".into(),
        ));
    }
    let stats = inst.stats();
    let chi = inst.chi;
    let f = stats.f;
    if matches!(mode, IterMode::ConstChi) && chi > guards.chi_guard {
        return Err(Error::Param(format!(
            "chi={} exceeds the constant-chi guard {}",
            chi, guards.chi_guard
        )));
    }
    let anchor_count = match mode {
        IterMode::ConstChi => (chi + 1).min(inst.k),
        IterMode::General => 1,
    };
    // Sets ordered by descending cardinality (index breaks ties) drive the
    // anchor-tuple enumeration.
    let mut order: Vec<usize> = (0..inst.m).collect();
    order.sort_by(|&a, &b| {
        inst.sets[b]
            .len()
            .cmp(&inst.sets[a].len())
            .then(a.cmp(&b))
    });

    let sigma_bound = sigma_cap(kind, mode, chi, f);
    let count_bound = count_cap(mode, inst.k, chi);
    let total_weight = inst.total_weight();

    let mut best: Option<Candidate> = None;
    let mut branches_tried = 0usize;
    let mut lp_solves = 0usize;
    let mut partial = false;

    let mut guesses: Vec<usize> = (1..=inst.n / chi).map(|i| i * chi).collect();
    guesses.reverse();

    'outer: for guess in guesses {
        let mut combo_idx = vec![0usize; anchor_count];
        for (i, slot) in combo_idx.iter_mut().enumerate() {
            *slot = i;
        }
        if anchor_count > inst.m {
            break;
        }
        loop {
            if lp_solves >= guards.solve_budget {
                partial = true;
                break 'outer;
            }
            let anchors: Vec<usize> = combo_idx.iter().map(|&i| order[i]).collect();
            let prepared = branch_input(inst, &anchors, chi, guess, |base| {
                Some(match mode {
                    IterMode::ConstChi => ColorTargets::Exact(base.to_vec()),
                    IterMode::General => ColorTargets::Window(
                        base.iter()
                            .map(|&b| (b as f64, (f as i64 * b) as f64))
                            .collect(),
                    ),
                })
            });
            if let Some((input, base)) = prepared {
                let mut failure: Option<Error> = None;
                match mode {
                    IterMode::ConstChi => {
                        // residual per-color incidence counts cap the targets
                        let mut cap = vec![0i64; chi];
                        for &(_, _, c, _) in &input.incidences {
                            cap[c] += 1;
                        }
                        let ranges: Vec<Vec<i64>> = base
                            .iter()
                            .enumerate()
                            .map(|(c, &b)| (b..=(f as i64 * b).min(cap[c])).collect())
                            .collect();
                        if ranges.iter().all(|r| !r.is_empty()) {
                            let mut q = vec![0i64; chi];
                            enumerate_targets(&ranges, 0, &mut q, &mut |q| {
                                if lp_solves >= guards.solve_budget {
                                    partial = true;
                                    return false;
                                }
                                branches_tried += 1;
                                let branch = input_with_targets(&input, ColorTargets::Exact(q.to_vec()));
                                match try_branch(
                                    inst,
                                    &branch,
                                    guess,
                                    &mut lp_solves,
                                    sigma_bound,
                                    count_bound,
                                    &mut best,
                                ) {
                                    Err(e) => {
                                        failure = Some(e);
                                        false
                                    }
                                    Ok(_) => !best.as_ref().is_some_and(|b| {
                                        b.bounds_ok
                                            && b.sigma == 1.0
                                            && b.weight >= total_weight - 1e-9
                                    }),
                                }
                            });
                        }
                    }
                    IterMode::General => {
                        branches_tried += 1;
                        try_branch(
                            inst,
                            &input,
                            guess,
                            &mut lp_solves,
                            sigma_bound,
                            count_bound,
                            &mut best,
                        )?;
                    }
                }
                if let Some(e) = failure {
                    return Err(e);
                }
                if best.as_ref().is_some_and(|b| {
                    b.bounds_ok && b.sigma == 1.0 && b.weight >= total_weight - 1e-9
                }) {
                    break 'outer;
                }
            }
            if partial {
                break 'outer;
            }
            // next combination over the ordered set list
            if !advance_combination(&mut combo_idx, inst.m) {
                break;
            }
        }
    }

    let Some(win) = best else {
        return Err(Error::Infeasible(
            "every (guess, anchors, targets) branch was infeasible".into(),
        ));
    };
    // Re-run the winner to collect its trace.
    let mut replay_solves = 0usize;
    let BranchEnd::Done { trace, .. } =
        run_branch(&win.input, &mut replay_solves, true)?
    else {
        return Err(Error::Lp("winning branch did not replay".into()));
    };
    let (solution, report) = inst.evaluate(&win.selected)?;
    Ok(IterOutcome {
        solution,
        report,
        branch: win.descriptor,
        bounds_ok: win.bounds_ok,
        branches_tried,
        lp_solves,
        partial,
        k_below_recommended: inst.k <= 10 * chi,
        trace,
    })
}

fn input_with_targets(input: &BranchInput, targets: ColorTargets) -> BranchInput {
    BranchInput {
        anchors: input.anchors.clone(),
        pool: input.pool.clone(),
        incidences: input.incidences.clone(),
        k_hat: input.k_hat,
        chi: input.chi,
        targets,
    }
}

/// Depth-first product walk over per-color target ranges; the visitor
/// returns false to stop the whole enumeration.
fn enumerate_targets(
    ranges: &[Vec<i64>],
    depth: usize,
    current: &mut Vec<i64>,
    visit: &mut impl FnMut(&[i64]) -> bool,
) -> bool {
    if depth == ranges.len() {
        return visit(current);
    }
    for &v in &ranges[depth] {
        current[depth] = v;
        if !enumerate_targets(ranges, depth + 1, current, visit) {
            return false;
        }
    }
    true
}

fn advance_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + m - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn try_branch(
    inst: &FmcInstance,
    input: &BranchInput,
    guess: usize,
    lp_solves: &mut usize,
    sigma_bound: f64,
    count_bound: usize,
    best: &mut Option<Candidate>,
) -> Result<bool> {
    let end = run_branch(input, lp_solves, false)?;
    let BranchEnd::Done { selected, .. } = end else {
        return Ok(false);
    };
    let mut all: Vec<usize> = input.anchors.iter().copied().chain(selected).collect();
    all.sort_unstable();
    all.dedup();
    let (solution, report) = inst.evaluate(&all)?;
    let bounds_ok = all.len() <= count_bound && report.sigma < sigma_bound;
    let cand = Candidate {
        selected: all,
        weight: solution.weight,
        sigma: report.sigma,
        bounds_ok,
        descriptor: BranchDescriptor {
            guess,
            anchors: input.anchors.clone(),
            targets: match &input.targets {
                ColorTargets::Exact(q) => q.clone(),
                ColorTargets::Window(w) => w.iter().map(|&(lo, _)| lo as i64).collect(),
            },
        },
        input: input_with_targets(input, input.targets.clone()),
    };
    if best.as_ref().is_none_or(|b| candidate_better(&cand, b)) {
        *best = Some(cand);
    }
    Ok(true)
}

/// Iterated rounding on a colored graph. Returns the graph translation along
/// with the outcome so callers can map set indices back to node ids.
pub fn alg_iter_node(
    g: &ColoredGraph,
    k: usize,
    mode: IterMode,
    guards: &IterGuards,
) -> Result<(GraphTranslation, IterOutcome)> {
    let tr = crate::instance::from_graph(g, k)?;
    let outcome = run_engine(&tr.instance, SystemKind::Node, mode, guards)?;
    Ok((tr, outcome))
}

/// Iterated rounding on a general set system.
pub fn alg_iter_fmc(inst: &FmcInstance, mode: IterMode, guards: &IterGuards) -> Result<IterOutcome> {
    run_engine(inst, SystemKind::SetSystem, mode, guards)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gap;
    use crate::lp::{ColorTargets, IterLpState};
    use crate::oracle::{exact_solve, DEFAULT_BUDGET};

    fn disjoint_color_edges(chi: usize) -> ColoredGraph {
        ColoredGraph {
            nodes: 2 * chi,
            edges: (0..chi).map(|c| (2 * c, 2 * c + 1, c, 1.0)).collect(),
        }
    }

    #[test]
    fn forced_structure_is_perfectly_fair() {
        let g = disjoint_color_edges(2);
        let (_, out) = alg_iter_node(&g, 2, IterMode::ConstChi, &IterGuards::default()).unwrap();
        assert_eq!(out.report.sigma, 1.0);
        assert_eq!(out.solution.p, vec![1, 1]);
        assert!(out.bounds_ok);
    }

    #[test]
    fn node_bounds_hold_against_oracle() {
        // two triangles sharing colors, k = 2
        let g = ColoredGraph {
            nodes: 6,
            edges: vec![
                (0, 1, 0, 1.0),
                (1, 2, 1, 1.0),
                (2, 0, 0, 1.0),
                (3, 4, 1, 1.0),
                (4, 5, 0, 1.0),
                (5, 3, 1, 1.0),
            ],
        };
        let tr = crate::instance::from_graph(&g, 2).unwrap();
        let oracle = exact_solve(&tr.instance, DEFAULT_BUDGET).unwrap();
        assert!(oracle.feasible);
        let opt = oracle.opt_weight.unwrap();
        for mode in [IterMode::ConstChi, IterMode::General] {
            let (_, out) = alg_iter_node(&g, 2, mode, &IterGuards::default()).unwrap();
            let chi = tr.instance.chi;
            let cap = match mode {
                IterMode::ConstChi => 2 + (chi - 1) / 2,
                IterMode::General => 2 + chi - 1,
            };
            assert!(out.solution.selected.len() <= cap);
            assert!(out.solution.weight >= opt / 2.0 - 1e-9, "{mode:?}: {}", out.solution.weight);
            assert!(out.bounds_ok);
        }
    }

    #[test]
    fn fmc_general_mode_on_gap() {
        let inst = gap(2).unwrap();
        let out = alg_iter_fmc(&inst, IterMode::General, &IterGuards::default()).unwrap();
        assert!(out.solution.selected.len() < inst.k + inst.chi);
        let oracle = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        let f = inst.stats().f as f64;
        assert!(out.solution.weight >= oracle.opt_weight.unwrap() / f - 1e-9);
    }

    #[test]
    fn partition_instance_matches_oracle() {
        // f = 1 partitions round integrally
        let inst = FmcInstance::new(
            6,
            3,
            2,
            2,
            vec![1.0; 6],
            vec![0, 1, 0, 1, 0, 1],
            vec![vec![0, 1], vec![2, 3], vec![4, 5]],
            None,
        )
        .unwrap();
        let oracle = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        let out = alg_iter_fmc(&inst, IterMode::ConstChi, &IterGuards::default()).unwrap();
        assert_eq!(out.solution.weight, oracle.opt_weight.unwrap());
        assert_eq!(out.report.sigma, 1.0);
    }

    #[test]
    fn chi_guard_enforced() {
        let g = disjoint_color_edges(4);
        let err = alg_iter_node(&g, 4, IterMode::ConstChi, &IterGuards::default()).unwrap_err();
        assert!(err.to_string().contains("guard"));
        // general mode has no chi guard
        assert!(alg_iter_node(&g, 4, IterMode::General, &IterGuards::default()).is_ok());
    }

    #[test]
    fn certificate_rejects_interior_points() {
        let state = IterLpState {
            units: vec![0, 1],
            incidences: vec![],
            k_hat: 1,
            chi: 1,
            targets: ColorTargets::Exact(vec![0]),
        };
        let model = build_iter_lp(&state).unwrap();
        let vertex = solve_vertex(&model).unwrap();
        assert!(rank_certificate(&vertex, &model));
        // midpoint of the two optimal vertices: feasible but not extreme
        let midpoint = LpSolution {
            values: vec![0.5, 0.5],
            ..vertex
        };
        assert!(model.is_feasible(&midpoint.values));
        assert!(!rank_certificate(&midpoint, &model));
    }

    #[test]
    fn golden_trace_on_two_triangles() {
        let g = ColoredGraph {
            nodes: 6,
            edges: vec![
                (0, 1, 0, 1.0),
                (1, 2, 1, 1.0),
                (2, 0, 0, 1.0),
                (3, 4, 1, 1.0),
                (4, 5, 0, 1.0),
                (5, 3, 1, 1.0),
            ],
        };
        let (_, out) = alg_iter_node(&g, 2, IterMode::General, &IterGuards::default()).unwrap();
        assert_eq!(out.branch.guess, 4);
        assert_eq!(out.branch.anchors, vec![0]);
        assert_eq!(out.solution.selected, vec![0, 3]);
        assert_eq!(
            out.trace,
            vec![
                TraceEvent::DropZero { unit: 1 },
                TraceEvent::DropZero { unit: 2 },
                TraceEvent::DropZero { unit: 4 },
                TraceEvent::DropZero { unit: 5 },
                TraceEvent::FixOne {
                    unit: 3,
                    k_hat_left: 0,
                    targets: vec![0, 0],
                },
            ]
        );
    }

    #[test]
    fn tiny_budget_reports_partial_search() {
        let g = ColoredGraph {
            nodes: 6,
            edges: vec![
                (0, 1, 0, 1.0),
                (1, 2, 1, 1.0),
                (2, 0, 0, 1.0),
                (3, 4, 1, 1.0),
                (4, 5, 0, 1.0),
                (5, 3, 1, 1.0),
            ],
        };
        let guards = IterGuards {
            solve_budget: 2,
            ..IterGuards::default()
        };
        match alg_iter_node(&g, 2, IterMode::ConstChi, &guards) {
            Ok((_, out)) => assert!(out.partial, "budget of two solves cannot finish"),
            Err(Error::Infeasible(_)) => {} // no branch completed inside the budget
            Err(e) => panic!("unexpected failure: {e}"),
        }
    }

    #[test]
    fn trace_records_case_sequence() {
        let g = disjoint_color_edges(2);
        let (_, out) = alg_iter_node(&g, 2, IterMode::ConstChi, &IterGuards::default()).unwrap();
        assert!(!out.trace.is_empty() || out.solution.selected.len() == out.branch.anchors.len());
        // every trace entry names a unit outside the anchors
        for ev in &out.trace {
            match ev {
                TraceEvent::DropZero { unit } | TraceEvent::FixOne { unit, .. } => {
                    assert!(!out.branch.anchors.contains(unit));
                }
                TraceEvent::TakeRemaining { units } => {
                    assert!(units.iter().all(|u| !out.branch.anchors.contains(u)));
                }
            }
        }
    }
}

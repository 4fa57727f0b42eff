//! Deterministic solvers for the easy special cases: the greedy and pipage
//! k-cover baselines, the per-color solver for segregated instances, and the
//! color-blind solver for balanced instances.

use crate::bitset::BitSet;
use crate::instance::{FairnessReport, FmcInstance, Solution};
use crate::lp::{build_kcover_lp, solve_vertex, LpStatus};
use crate::{Error, Result};

/// The coverage ratio `1 - (1 - 1/x)^x`, strictly decreasing for x >= 1 and
/// always above `1 - 1/e`.
pub fn rho(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Param(format!("rho needs a positive argument, got {x}")));
    }
    Ok(1.0 - (1.0 - 1.0 / x).powf(x))
}

/// `rho` together with its argument, for reports.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoValue {
    pub x: f64,
    pub value: f64,
}

impl RhoValue {
    pub fn new(x: f64) -> Result<Self> {
        Ok(RhoValue { x, value: rho(x)? })
    }
}

/// Greedy maximum k-cover: k rounds, each adding the set with the largest
/// marginal covered weight, ties broken toward the lowest index. Always
/// returns exactly k indices.
pub fn greedy_kcover(inst: &FmcInstance, k: usize) -> Result<Vec<usize>> {
    if k > inst.m {
        return Err(Error::Param(format!("k={} exceeds m={}", k, inst.m)));
    }
    let mut covered = BitSet::new(inst.n);
    let mut taken = vec![false; inst.m];
    let mut picked = Vec::with_capacity(k);
    // Element lists sorted ascending so marginal sums accumulate in a fixed
    // order regardless of how the input listed them.
    let sorted_sets: Vec<Vec<usize>> = inst
        .sets
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        })
        .collect();
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for (s, set) in sorted_sets.iter().enumerate() {
            if taken[s] {
                continue;
            }
            let marginal: f64 = set
                .iter()
                .filter(|&&e| !covered.contains(e))
                .map(|&e| inst.weights[e])
                .sum();
            if best.is_none_or(|(_, bw)| marginal > bw) {
                best = Some((s, marginal));
            }
        }
        let (s, _) = best.expect("k <= m leaves a set to pick");
        taken[s] = true;
        for &e in &sorted_sets[s] {
            covered.insert(e);
        }
        picked.push(s);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Expected covered weight of the independent-rounding distribution at `y`;
/// convex along any pipage direction, so one endpoint never loses.
fn coverage_potential(inst: &FmcInstance, containing: &[Vec<usize>], y: &[f64]) -> f64 {
    (0..inst.n)
        .map(|e| {
            let miss: f64 = containing[e].iter().map(|&s| 1.0 - y[s]).product();
            inst.weights[e] * (1.0 - miss)
        })
        .sum()
}

/// Pipage-rounded maximum k-cover: solve the k-cover relaxation to a vertex,
/// then walk pairs of fractional set variables to the endpoint that does not
/// decrease the coverage potential until the point is integral. Exactly k
/// sets come back.
pub fn pipage_kcover(inst: &FmcInstance, k: usize) -> Result<Vec<usize>> {
    if k > inst.m {
        return Err(Error::Param(format!("k={} exceeds m={}", k, inst.m)));
    }
    let mut work = inst.clone();
    work.k = k;
    let model = build_kcover_lp(&work);
    let sol = solve_vertex(&model)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("k-cover relaxation came back {:?}", sol.status)));
    }
    let mut y: Vec<f64> = sol.values[..inst.m].to_vec();
    let mut containing = vec![Vec::new(); inst.n];
    for (s, set) in inst.sets.iter().enumerate() {
        for &e in set {
            containing[e].push(s);
        }
    }
    let frac = |v: f64| v > 1e-9 && v < 1.0 - 1e-9;
    loop {
        let mut iter = (0..inst.m).filter(|&s| frac(y[s]));
        let (Some(i), Some(j)) = (iter.next(), iter.next()) else {
            break;
        };
        let raise_i = (1.0 - y[i]).min(y[j]);
        let raise_j = (1.0 - y[j]).min(y[i]);
        let mut up = y.clone();
        up[i] += raise_i;
        up[j] -= raise_i;
        let mut down = y.clone();
        down[i] -= raise_j;
        down[j] += raise_j;
        // Ties go toward increasing the lower-indexed variable.
        y = if coverage_potential(inst, &containing, &up)
            >= coverage_potential(inst, &containing, &down)
        {
            up
        } else {
            down
        };
    }
    let picked: Vec<usize> = (0..inst.m).filter(|&s| y[s] > 0.5).collect();
    assert_eq!(picked.len(), k, "pipage preserves the cardinality row");
    Ok(picked)
}

/// Better of the two k-cover baselines by covered weight, greedy on ties.
pub fn best_kcover(inst: &FmcInstance, k: usize) -> Result<Vec<usize>> {
    let greedy = greedy_kcover(inst, k)?;
    let pip = pipage_kcover(inst, k)?;
    let (gw, _) = inst.evaluate(&greedy).map(|(s, _)| (s.weight, ()))?;
    let (pw, _) = inst.evaluate(&pip).map(|(s, _)| (s.weight, ()))?;
    Ok(if pw > gw { pip } else { greedy })
}

// ---------------------------------------------------------------------------
// Segregated instances
// ---------------------------------------------------------------------------

/// Per-color subproblem: original set ids of one color and the elements they
/// can touch, renumbered densely.
struct ColorSystem {
    original_sets: Vec<usize>,
    instance_sets: Vec<Vec<usize>>,
    n: usize,
}

fn color_system(inst: &FmcInstance, color: usize, max_size: usize) -> ColorSystem {
    let mut elem_map = vec![usize::MAX; inst.n];
    let mut next = 0usize;
    let mut original_sets = Vec::new();
    let mut instance_sets = Vec::new();
    for (s, set) in inst.sets.iter().enumerate() {
        if inst.colors[set[0]] != color || set.len() > max_size {
            continue;
        }
        original_sets.push(s);
        let mut mapped = Vec::with_capacity(set.len());
        for &e in set {
            if elem_map[e] == usize::MAX {
                elem_map[e] = next;
                next += 1;
            }
            mapped.push(elem_map[e]);
        }
        mapped.sort_unstable();
        instance_sets.push(mapped);
    }
    ColorSystem {
        original_sets,
        instance_sets,
        n: next,
    }
}

impl ColorSystem {
    fn as_instance(&self, k: usize) -> Result<FmcInstance> {
        FmcInstance::new(
            self.n,
            self.instance_sets.len(),
            k,
            1,
            vec![1.0; self.n],
            vec![0; self.n],
            self.instance_sets.clone(),
            None,
        )
    }
}

/// Reorder a selection so every prefix is greedy-maximal: each position holds
/// the set adding the most new elements over the union of its predecessors.
fn greedy_order(sets: &[Vec<usize>], chosen: &[usize], n: usize) -> Vec<usize> {
    let mut remaining: Vec<usize> = chosen.to_vec();
    let mut covered = BitSet::new(n);
    let mut ordered = Vec::with_capacity(chosen.len());
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &s)| {
                let fresh = sets[s].iter().filter(|&&e| !covered.contains(e)).count();
                (pos, fresh)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        let s = remaining.remove(pos);
        for &e in &sets[s] {
            covered.insert(e);
        }
        ordered.push(s);
    }
    ordered
}

fn union_count(sets: &[Vec<usize>], picked: &[usize], n: usize) -> usize {
    let mut covered = BitSet::new(n);
    for &s in picked {
        for &e in &sets[s] {
            covered.insert(e);
        }
    }
    covered.count()
}

/// Solve one per-color subproblem for guess `l`: incremental budget search
/// until the better baseline covers the target, then trim the greedy-ordered
/// prefix into the `[rho_bar * l/chi, 2 * rho_bar * l/chi]` window.
/// Returns original set ids, or None when the guess fails for this color.
fn greed_plus_color(
    inst: &FmcInstance,
    color: usize,
    l: usize,
    f: usize,
    rho_bar: f64,
) -> Result<Option<Vec<usize>>> {
    let per_color = l / inst.chi;
    let sys = color_system(inst, color, per_color);
    if sys.original_sets.is_empty() {
        return Ok(None);
    }
    let target_base = per_color as f64;
    let mut found: Option<Vec<usize>> = None;
    for k_hat in 1..=sys.original_sets.len().min(inst.k) {
        let sub = sys.as_instance(k_hat)?;
        let picked = best_kcover(&sub, k_hat)?;
        let coverage = union_count(&sys.instance_sets, &picked, sys.n);
        let target = rho(k_hat as f64)?.max(rho(f as f64)?) * target_base;
        if coverage as f64 >= target - 1e-9 {
            found = Some(picked);
            break;
        }
    }
    let Some(picked) = found else {
        return Ok(None);
    };
    let ordered = greedy_order(&sys.instance_sets, &picked, sys.n);
    let threshold = rho_bar * target_base;
    let mut covered = BitSet::new(sys.n);
    for (idx, &s) in ordered.iter().enumerate() {
        for &e in &sys.instance_sets[s] {
            covered.insert(e);
        }
        if covered.count() as f64 >= threshold - 1e-9 {
            // A set that alone reaches the threshold stays inside the window
            // by itself (its size is capped at l/chi); otherwise the whole
            // prefix does.
            let local = if sys.instance_sets[s].len() as f64 >= threshold - 1e-9 {
                vec![s]
            } else {
                ordered[..=idx].to_vec()
            };
            return Ok(Some(local.iter().map(|&s| sys.original_sets[s]).collect()));
        }
    }
    Ok(None)
}

/// Outcome of the segregated solver at one pinned coverage guess; exposed so
/// the guess loop is testable in isolation.
pub fn greed_plus_with_guess(inst: &FmcInstance, l: usize) -> Result<Option<Vec<usize>>> {
    let stats = inst.stats();
    let rho_bar = rho(stats.f as f64)?.max(rho(inst.k as f64)?);
    let mut combined = Vec::new();
    for color in 0..inst.chi {
        match greed_plus_color(inst, color, l, stats.f, rho_bar)? {
            Some(sets) => combined.extend(sets),
            None => return Ok(None),
        }
    }
    if combined.len() > inst.k {
        return Ok(None);
    }
    combined.sort_unstable();
    Ok(Some(combined))
}

/// Solver for unweighted segregated instances: guess the covered count over
/// descending multiples of chi, solve each color independently, trim, and
/// combine. At most k sets come back; every color's covered count lands
/// within a factor-2 band of every other's.
pub fn alg_greed_plus(inst: &FmcInstance) -> Result<(Solution, FairnessReport)> {
    if !inst.is_segregated() {
        return Err(Error::Validation("instance not segregated".into()));
    }
    if !inst.stats().unweighted {
        return Err(Error::Validation(
            "segregated solver requires an unweighted instance; use the randomized solver for weights"
                .into(),
        ));
    }
    let mut l = (inst.n / inst.chi) * inst.chi;
    while l >= inst.chi {
        if let Some(selected) = greed_plus_with_guess(inst, l)? {
            return inst.evaluate(&selected);
        }
        l -= inst.chi;
    }
    Err(Error::Infeasible(
        "no coverage guess admits a per-color solution".into(),
    ))
}

// ---------------------------------------------------------------------------
// Balanced instances
// ---------------------------------------------------------------------------

/// Solver for delta-balanced instances: run the better k-cover baseline
/// ignoring colors. Exactly k sets; the per-set balance window bounds the
/// color skew of the result.
pub fn alg_balanced(inst: &FmcInstance, delta: usize) -> Result<(Solution, FairnessReport)> {
    if !inst.is_balanced(delta) {
        return Err(Error::Validation(format!(
            "instance is not {delta}-balanced"
        )));
    }
    let selected = best_kcover(inst, inst.k)?;
    inst.evaluate(&selected)
}

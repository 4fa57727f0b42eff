//! Brute-force ground truth. Enumerates every k-subset of sets, so it is
//! only meant for desk-scale instances; every acceptance check is anchored
//! here. Built to be obviously correct, not fast.

use crate::bitset::BitSet;
use crate::instance::{FmcInstance, Solution};
use crate::{Error, Result};
use serde::Serialize;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Exact answers for one instance.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub feasible: bool,
    /// Maximum fair covered weight (absent when infeasible).
    pub opt_weight: Option<f64>,
    /// Covered-element count among maximum-weight fair solutions, ties broken
    /// toward more elements.
    pub opt_count: Option<usize>,
    /// One optimal selection (0-based set indices), smallest lexicographic
    /// among the tied optima.
    #[serde(skip)]
    pub witness: Option<Solution>,
    /// Best k-cover weight ignoring colors.
    pub opt_unfair_weight: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

struct Scorer {
    masks: Vec<BitSet>,
    color_masks: Vec<BitSet>,
    weights: Vec<f64>,
}

impl Scorer {
    fn new(inst: &FmcInstance) -> Self {
        Scorer {
            masks: inst.set_masks(),
            color_masks: inst.color_masks(),
            weights: inst.weights.clone(),
        }
    }

    fn score(&self, inst: &FmcInstance, combo: &[usize]) -> (f64, usize, Vec<usize>, bool) {
        let mut covered = BitSet::new(inst.n);
        for &s in combo {
            covered.union_with(&self.masks[s]);
        }
        let p: Vec<usize> = self
            .color_masks
            .iter()
            .map(|cm| cm.intersection_count(&covered))
            .collect();
        let weight: f64 = covered.iter_ones().map(|e| self.weights[e]).sum();
        let count = covered.count();
        let fair = inst.is_exactly_fair(&p);
        (weight, count, p, fair)
    }
}

/// Lexicographic k-combination walk over `0..m`.
fn for_each_combination(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut combo: Vec<usize> = (0..k).collect();
    if k == 0 || k > m {
        return;
    }
    loop {
        f(&combo);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if combo[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Enumerate all exactly-k selections. Among the fair ones, maximize weight,
/// tie-break by larger covered count and then by the lexicographically
/// smallest index list. The unconstrained k-cover optimum is recorded on the
/// side.
pub fn exact_solve(inst: &FmcInstance, budget: u128) -> Result<OracleResult> {
    let total = binomial(inst.m, inst.k);
    if total > budget {
        return Err(Error::Budget(format!(
            "C({},{}) = {} exceeds oracle budget {}",
            inst.m, inst.k, total, budget
        )));
    }
    let scorer = Scorer::new(inst);
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut opt_unfair = 0.0f64;
    for_each_combination(inst.m, inst.k, |combo| {
        let (weight, count, _p, fair) = scorer.score(inst, combo);
        if weight > opt_unfair {
            opt_unfair = weight;
        }
        if fair {
            let better = match &best {
                None => true,
                Some((bw, bc, bsel)) => {
                    weight > *bw
                        || (weight == *bw && count > *bc)
                        || (weight == *bw && count == *bc && combo < &bsel[..])
                }
            };
            if better {
                best = Some((weight, count, combo.to_vec()));
            }
        }
    });
    match best {
        Some((weight, count, sel)) => {
            let (solution, _) = inst.evaluate(&sel)?;
            Ok(OracleResult {
                feasible: true,
                opt_weight: Some(weight),
                opt_count: Some(count),
                witness: Some(solution),
                opt_unfair_weight: opt_unfair,
            })
        }
        None => Ok(OracleResult {
            feasible: false,
            opt_weight: None,
            opt_count: None,
            witness: None,
            opt_unfair_weight: opt_unfair,
        }),
    }
}

/// True iff some selection of at most `k` (and at least one) sets is fair.
pub fn feasible_at_most(inst: &FmcInstance, budget: u128) -> Result<bool> {
    let total: u128 = (1..=inst.k).map(|kk| binomial(inst.m, kk)).sum();
    if total > budget {
        return Err(Error::Budget(format!(
            "sum of C({},k') for k'<=k is {} which exceeds budget {}",
            inst.m, total, budget
        )));
    }
    let scorer = Scorer::new(inst);
    for kk in 1..=inst.k {
        let mut found = false;
        for_each_combination(inst.m, kk, |combo| {
            if !found {
                let (_, _, _, fair) = scorer.score(inst, combo);
                if fair {
                    found = true;
                }
            }
        });
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gap, gap_pair_sets};

    #[test]
    fn gap_two_oracle() {
        let inst = gap(2).unwrap();
        let res = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        assert!(res.feasible);
        assert_eq!(res.opt_weight, Some(6.0));
        assert_eq!(res.opt_count, Some(6));
        let w = res.witness.unwrap();
        assert_eq!(w.p, vec![3, 3]);
        // the pair selection is one of the tied fair optima
        let (pair_sol, pair_rep) = inst.evaluate(&gap_pair_sets(2)).unwrap();
        assert_eq!(pair_sol.weight, 6.0);
        assert_eq!(pair_rep.sigma, 1.0);
        // unfair optimum cannot be below the fair one
        assert!(res.opt_unfair_weight >= 6.0);
    }

    #[test]
    fn gap_three_separates_fair_from_unfair() {
        let inst = gap(3).unwrap();
        let res = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!(res.opt_weight, Some(8.0));
        assert!(res.opt_unfair_weight > 8.0, "spread block picks cover more");
    }

    #[test]
    fn monochromatic_sets_infeasible() {
        let inst = FmcInstance::new(
            4,
            2,
            1,
            2,
            vec![1.0; 4],
            vec![0, 0, 0, 1],
            vec![vec![0, 1], vec![1, 2]],
            None,
        )
        .unwrap();
        let res = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        assert!(!res.feasible);
        assert!(res.opt_weight.is_none());
        assert!(res.opt_unfair_weight > 0.0);
        assert!(!feasible_at_most(&inst, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn forced_full_selection() {
        // k = m: feasible iff the overall color counts balance
        let balanced = FmcInstance::new(
            4,
            2,
            2,
            2,
            vec![1.0; 4],
            vec![0, 1, 0, 1],
            vec![vec![0, 1], vec![2, 3]],
            None,
        )
        .unwrap();
        let res = exact_solve(&balanced, DEFAULT_BUDGET).unwrap();
        assert!(res.feasible);
        assert_eq!(res.opt_weight, Some(4.0));

        let skewed = FmcInstance::new(
            3,
            2,
            2,
            2,
            vec![1.0; 3],
            vec![0, 0, 1],
            vec![vec![0, 1], vec![2]],
            None,
        )
        .unwrap();
        assert!(!exact_solve(&skewed, DEFAULT_BUDGET).unwrap().feasible);
    }

    #[test]
    fn at_most_k_can_beat_exact_k() {
        // fair at k'=1, infeasible at k=2
        let inst = FmcInstance::new(
            3,
            2,
            2,
            2,
            vec![1.0; 3],
            vec![0, 1, 0],
            vec![vec![0, 1], vec![2]],
            None,
        )
        .unwrap();
        assert!(!exact_solve(&inst, DEFAULT_BUDGET).unwrap().feasible);
        assert!(feasible_at_most(&inst, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let inst = gap(3).unwrap();
        assert!(matches!(exact_solve(&inst, 10), Err(Error::Budget(_))));
    }

    #[test]
    fn witness_rechecks_fair() {
        let inst = gap(2).unwrap();
        let res = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        let w = res.witness.unwrap();
        let (sol, rep) = inst.evaluate(&w.selected).unwrap();
        assert_eq!(sol.weight, res.opt_weight.unwrap());
        assert_eq!(rep.sigma, 1.0);
    }

    #[test]
    fn unweighted_opt_equals_opt_count() {
        let inst = gap(2).unwrap();
        let res = exact_solve(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!(res.opt_weight.unwrap() as usize, res.opt_count.unwrap());
    }
}

//! Sum-preserving dependent rounding. Fractional coordinates are paired in a
//! balanced tournament; each pairing moves mass between the two until one of
//! them becomes integral, choosing the direction with the probability that
//! keeps both marginals. The output always sums to the declared integer, the
//! per-coordinate one-probabilities equal the inputs, and the coordinates are
//! negatively correlated.

use crate::rng::trial_rng;
use crate::{Error, Result};
use rand::Rng;

/// Feasibility tolerance on the declared sum.
pub const TOL_SUM: f64 = 1e-9;
/// Coordinates this close to 0 or 1 are snapped before rounding.
pub const TOL_SNAP: f64 = 1e-12;

/// Probabilities in `[0,1]` whose sum is (within tolerance) an integer.
#[derive(Clone, Debug)]
pub struct Marginals {
    values: Vec<f64>,
    sum: usize,
}

impl Marginals {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &p) in values.iter().enumerate() {
            if !(p.is_finite() && (-TOL_SUM..=1.0 + TOL_SUM).contains(&p)) {
                return Err(Error::Param(format!("marginal {i} = {p} outside [0, 1]")));
            }
        }
        let total: f64 = values.iter().sum();
        let rounded = total.round();
        if (total - rounded).abs() > TOL_SUM * values.len().max(1) as f64 || rounded < 0.0 {
            return Err(Error::Param(format!("marginals sum to non-integer {total}")));
        }
        Ok(Marginals {
            values,
            sum: rounded as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn declared_sum(&self) -> usize {
        self.sum
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// One rounded outcome; the number of ones always equals the declared sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rounded {
    pub bits: Vec<bool>,
    pub sum: usize,
}

impl Rounded {
    pub fn ones(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

/// Round the marginals with the given generator.
pub fn dependent_round<R: Rng>(p: &Marginals, rng: &mut R) -> Rounded {
    let n = p.len();
    let mut bits = vec![false; n];
    // (index, value) pairs still fractional after snapping.
    let mut active: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in p.values().iter().enumerate() {
        if v >= 1.0 - TOL_SNAP {
            bits[i] = true;
        } else if v > TOL_SNAP {
            active.push((i, v));
        }
    }
    // Balanced tournament: survivors of each round are paired again in order.
    while active.len() >= 2 {
        let mut next = Vec::with_capacity(active.len() / 2 + 1);
        let mut iter = active.chunks_exact(2);
        for pair in &mut iter {
            let (i, pi) = pair[0];
            let (j, pj) = pair[1];
            // Raise one coordinate and lower the other by the largest step
            // that keeps both inside [0,1]; pick the direction preserving the
            // marginals: the move raising i fires with probability
            // up_j / (up_i + up_j) and vice versa.
            let up_i = (1.0 - pi).min(pj);
            let up_j = (1.0 - pj).min(pi);
            let (ni, nj) = if rng.gen_range(0.0..up_i + up_j) < up_i {
                (pi - up_j, pj + up_j)
            } else {
                (pi + up_i, pj - up_i)
            };
            for (idx, val) in [(i, ni), (j, nj)] {
                if val >= 1.0 - TOL_SNAP {
                    bits[idx] = true;
                } else if val > TOL_SNAP {
                    next.push((idx, val));
                }
            }
        }
        if let [last] = iter.remainder() {
            next.push(*last);
        }
        active = next;
    }
    // Any residual drift lands on the last survivor: its value is forced by
    // the cardinality identity.
    let ones_so_far = bits.iter().filter(|&&b| b).count();
    if let [(idx, val)] = active[..] {
        let forced = p.declared_sum() as i64 - ones_so_far as i64;
        debug_assert!(
            (0..=1).contains(&forced) && ((forced as f64) - val).abs() < 0.5,
            "survivor {val} cannot absorb drift {forced}"
        );
        bits[idx] = forced == 1;
    }
    let sum = bits.iter().filter(|&&b| b).count();
    assert_eq!(sum, p.declared_sum(), "cardinality must hold on every trial");
    Rounded { bits, sum }
}

/// Round under the trial-indexed substream `seed ^ trial`.
pub fn dependent_round_trial(p: &Marginals, seed: u64, trial: u64) -> Rounded {
    dependent_round(p, &mut trial_rng(seed, trial))
}

/// Element-induction step shared by the randomized solvers: an element is
/// covered iff some selected set contains it.
pub fn induce_elements(inst: &crate::FmcInstance, y_rounded: &Rounded) -> Vec<bool> {
    assert_eq!(y_rounded.bits.len(), inst.m);
    let mut x = vec![false; inst.n];
    for (s, &picked) in y_rounded.bits.iter().enumerate() {
        if picked {
            for &e in &inst.sets[s] {
                x[e] = true;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gap, gap_pair_sets};

    #[test]
    fn integral_input_is_returned_as_is() {
        let p = Marginals::new(vec![1.0, 0.0, 1.0]).unwrap();
        for trial in 0..10 {
            let r = dependent_round_trial(&p, 1, trial);
            assert_eq!(r.bits, vec![true, false, true]);
        }
    }

    #[test]
    fn rejects_bad_marginals() {
        assert!(Marginals::new(vec![1.2, 0.5]).is_err());
        assert!(Marginals::new(vec![0.5, 0.6]).is_err());
        assert!(Marginals::new(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn half_half_is_a_fair_coin() {
        let p = Marginals::new(vec![0.5, 0.5]).unwrap();
        let trials = 10_000;
        let mut first = 0usize;
        for t in 0..trials {
            let r = dependent_round_trial(&p, 42, t);
            assert_eq!(r.sum, 1);
            if r.bits[0] {
                first += 1;
            }
        }
        let freq = first as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq = {freq}");
    }

    #[test]
    fn quarter_marginals_hold() {
        let p = Marginals::new(vec![0.25; 4]).unwrap();
        let trials = 10_000u64;
        let mut counts = [0usize; 4];
        for t in 0..trials {
            let r = dependent_round_trial(&p, 7, t);
            assert_eq!(r.sum, 1);
            for (c, &b) in counts.iter_mut().zip(&r.bits) {
                *c += b as usize;
            }
        }
        for &c in &counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.25).abs() < 0.02, "freq = {freq}");
        }
    }

    #[test]
    fn asymmetric_marginals_hold() {
        let p = Marginals::new(vec![0.25, 0.75]).unwrap();
        let trials = 10_000u64;
        let mut first = 0usize;
        for t in 0..trials {
            let r = dependent_round_trial(&p, 13, t);
            assert_eq!(r.sum, 1);
            first += r.bits[0] as usize;
        }
        let freq = first as f64 / trials as f64;
        assert!((freq - 0.25).abs() < 0.02, "freq = {freq}");
    }

    #[test]
    fn negative_correlation_spot_check() {
        let p = Marginals::new(vec![0.4, 0.6, 0.5, 0.5]).unwrap();
        let trials = 20_000u64;
        let mut joint = 0usize;
        let mut single = [0usize; 2];
        for t in 0..trials {
            let r = dependent_round_trial(&p, 9, t);
            assert_eq!(r.sum, 2);
            if r.bits[0] && r.bits[2] {
                joint += 1;
            }
            single[0] += r.bits[0] as usize;
            single[1] += r.bits[2] as usize;
        }
        let joint = joint as f64 / trials as f64;
        let prod = (single[0] as f64 / trials as f64) * (single[1] as f64 / trials as f64);
        assert!(joint <= prod + 0.02, "joint {joint} vs product {prod}");
    }

    #[test]
    fn same_seed_same_output() {
        let p = Marginals::new(vec![0.3, 0.3, 0.4, 0.6, 0.4]).unwrap();
        assert_eq!(dependent_round_trial(&p, 5, 3), dependent_round_trial(&p, 5, 3));
    }

    #[test]
    fn induced_elements_match_union() {
        let inst = gap(2).unwrap();
        let mut bits = vec![false; inst.m];
        for s in gap_pair_sets(2) {
            bits[s] = true;
        }
        let x = induce_elements(&inst, &Rounded { bits, sum: 3 });
        let covered: Vec<usize> = (0..inst.n).filter(|&e| x[e]).collect();
        assert_eq!(covered, (6..12).collect::<Vec<_>>());

        let none = induce_elements(&inst, &Rounded { bits: vec![false; inst.m], sum: 0 });
        assert!(none.iter().all(|&b| !b));
        let all = induce_elements(&inst, &Rounded { bits: vec![true; inst.m], sum: inst.m });
        assert!(all.iter().all(|&b| b));
    }
}

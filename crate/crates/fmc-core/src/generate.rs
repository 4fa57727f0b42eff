//! Instance generators. Every family is a deterministic function of
//! (params, seed).

use crate::instance::FmcInstance;
use crate::rng::sub_seed;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub chi: usize,
    /// Probability that an element joins a set.
    pub density: f64,
    pub weighted: bool,
}

#[derive(Clone, Debug)]
pub struct SegregatedParams {
    pub k: usize,
    /// Elements per color.
    pub elements_per_color: Vec<usize>,
    /// Sets per color.
    pub sets_per_color: Vec<usize>,
    pub max_set_size: usize,
}

#[derive(Clone, Debug)]
pub struct BalancedParams {
    pub delta: usize,
    pub chi: usize,
    pub k: usize,
    pub m: usize,
    pub elements_per_color: usize,
    pub max_per_color_in_set: usize,
}

#[derive(Clone, Debug)]
pub enum Family {
    Random(RandomParams),
    Gap { alpha: usize },
    Segregated(SegregatedParams),
    Balanced(BalancedParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Random(_) => "random",
            Family::Gap { .. } => "gap",
            Family::Segregated(_) => "segregated",
            Family::Balanced(_) => "balanced",
        }
    }
}

pub fn generate(family: &Family, seed: u64) -> Result<FmcInstance> {
    match family {
        Family::Random(p) => random(p, seed),
        Family::Gap { alpha } => gap(*alpha),
        Family::Segregated(p) => segregated(p, seed),
        Family::Balanced(p) => balanced(p, seed),
    }
}

/// The two-color family with an integrality gap of factor `f = alpha`:
/// `alpha` blocks of `alpha + 1` elements (one of color 1, `alpha` of
/// color 2) with the `alpha + 1` leave-one-out sets each, plus `alpha + 1`
/// disjoint two-element sets holding one fresh element of each color,
/// with `k = alpha + 1`.
pub fn gap(alpha: usize) -> Result<FmcInstance> {
    if alpha < 2 {
        return Err(Error::Param(format!("gap family needs alpha >= 2, got {alpha}")));
    }
    let block = alpha + 1;
    let n = alpha * block + 2 * block;
    let mut colors = Vec::with_capacity(n);
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(alpha * block + block);
    for j in 0..alpha {
        let base = j * block;
        colors.push(0);
        colors.extend(std::iter::repeat_n(1, alpha));
        for skip in 0..block {
            sets.push((0..block).filter(|&i| i != skip).map(|i| base + i).collect());
        }
    }
    let pair_base = alpha * block;
    for l in 0..block {
        colors.push(0);
        colors.push(1);
        sets.push(vec![pair_base + 2 * l, pair_base + 2 * l + 1]);
    }
    FmcInstance::new(n, sets.len(), block, 2, vec![1.0; n], colors, sets, None)
}

/// Indices of the pair sets of `gap(alpha)` (the fair integral optimum).
pub fn gap_pair_sets(alpha: usize) -> Vec<usize> {
    let first = alpha * (alpha + 1);
    (first..first + alpha + 1).collect()
}

/// Indices of one block's leave-one-out sets in `gap(alpha)`.
pub fn gap_block_sets(alpha: usize, block: usize) -> Vec<usize> {
    let first = block * (alpha + 1);
    (first..first + alpha + 1).collect()
}

fn random(p: &RandomParams, seed: u64) -> Result<FmcInstance> {
    if p.n == 0 || p.m == 0 || p.chi == 0 || p.chi > p.n || !(0.0..=1.0).contains(&p.density) {
        return Err(Error::Param("bad random-family parameters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, "gen-random", 0));
    // Round-robin colors then shuffle, so every color is used.
    let mut colors: Vec<usize> = (0..p.n).map(|i| i % p.chi).collect();
    colors.shuffle(&mut rng);
    let weights = if p.weighted {
        (0..p.n).map(|_| (rng.gen_range(1..=8) as f64) / 2.0).collect()
    } else {
        vec![1.0; p.n]
    };
    let mut sets = Vec::with_capacity(p.m);
    for _ in 0..p.m {
        let mut set: Vec<usize> = (0..p.n).filter(|_| rng.gen_bool(p.density)).collect();
        if set.is_empty() {
            set.push(rng.gen_range(0..p.n));
        }
        sets.push(set);
    }
    FmcInstance::new(p.n, p.m, p.k, p.chi, weights, colors, sets, None)
}

fn segregated(p: &SegregatedParams, seed: u64) -> Result<FmcInstance> {
    let chi = p.elements_per_color.len();
    if chi == 0 || p.sets_per_color.len() != chi || p.max_set_size == 0 {
        return Err(Error::Param("bad segregated-family parameters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, "gen-segregated", 0));
    let n: usize = p.elements_per_color.iter().sum();
    let mut colors = Vec::with_capacity(n);
    let mut first_of_color = vec![0usize; chi];
    for (c, &cnt) in p.elements_per_color.iter().enumerate() {
        first_of_color[c] = colors.len();
        colors.extend(std::iter::repeat_n(c, cnt));
    }
    let mut sets = Vec::new();
    for (c, &cnt) in p.sets_per_color.iter().enumerate() {
        let pool: Vec<usize> =
            (first_of_color[c]..first_of_color[c] + p.elements_per_color[c]).collect();
        for _ in 0..cnt {
            let size = rng.gen_range(1..=p.max_set_size.min(pool.len()));
            let mut chosen = pool.clone();
            chosen.shuffle(&mut rng);
            chosen.truncate(size);
            chosen.sort_unstable();
            sets.push(chosen);
        }
    }
    let m = sets.len();
    FmcInstance::new(n, m, p.k, chi, vec![1.0; n], colors, sets, None)
}

fn balanced(p: &BalancedParams, seed: u64) -> Result<FmcInstance> {
    if p.chi == 0 || p.m == 0 || p.elements_per_color == 0 || p.max_per_color_in_set == 0 {
        return Err(Error::Param("bad balanced-family parameters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, "gen-balanced", 0));
    let n = p.chi * p.elements_per_color;
    let colors: Vec<usize> = (0..n).map(|i| i / p.elements_per_color).collect();
    let mut sets = Vec::with_capacity(p.m);
    for _ in 0..p.m {
        // Per-color count within the delta window around a common base.
        let base = rng.gen_range(1..=p.max_per_color_in_set);
        let mut set = Vec::new();
        for c in 0..p.chi {
            let jitter = rng.gen_range(0..=p.delta.min(base.saturating_sub(1) + p.delta));
            let take = if rng.gen_bool(0.5) {
                base + jitter.min(p.delta)
            } else {
                base.saturating_sub(jitter.min(p.delta)).max(1)
            };
            let take = take.min(p.elements_per_color);
            let mut pool: Vec<usize> =
                (c * p.elements_per_color..(c + 1) * p.elements_per_color).collect();
            pool.shuffle(&mut rng);
            set.extend_from_slice(&pool[..take]);
        }
        set.sort_unstable();
        sets.push(set);
    }
    let inst = FmcInstance::new(n, p.m, p.k, p.chi, vec![1.0; n], colors, sets, None)?;
    debug_assert!(inst.is_balanced(p.delta));
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_shape_matches_construction() {
        let inst = gap(2).unwrap();
        assert_eq!((inst.n, inst.m, inst.k, inst.chi), (12, 9, 3, 2));
        let st = inst.stats();
        assert_eq!((st.a, st.f), (2, 2));
        assert!(gap(1).is_err());

        // each block element is in exactly alpha sets
        let inst3 = gap(3).unwrap();
        assert_eq!((inst3.n, inst3.m, inst3.k), (20, 16, 4));
        assert_eq!(inst3.stats().f, 3);
    }

    #[test]
    fn gap_pair_selection_is_fair() {
        let alpha = 2;
        let inst = gap(alpha).unwrap();
        let (sol, rep) = inst.evaluate(&gap_pair_sets(alpha)).unwrap();
        assert_eq!(sol.weight, 6.0);
        assert_eq!(sol.p, vec![3, 3]);
        assert_eq!(rep.sigma, 1.0);
        // covering one full block gives p = (1, alpha), ratio alpha = f
        let (sol, rep) = inst.evaluate(&gap_block_sets(alpha, 0)).unwrap();
        assert_eq!(sol.p, vec![1, alpha]);
        assert_eq!(rep.sigma, alpha as f64);
    }

    #[test]
    fn segregated_sets_are_monochromatic() {
        let p = SegregatedParams {
            k: 2,
            elements_per_color: vec![6, 6],
            sets_per_color: vec![4, 4],
            max_set_size: 3,
        };
        let inst = segregated(&p, 11).unwrap();
        assert!(inst.is_segregated());
        assert_eq!(inst.to_json(), segregated(&p, 11).unwrap().to_json());
    }

    #[test]
    fn balanced_respects_window() {
        let p = BalancedParams {
            delta: 1,
            chi: 2,
            k: 2,
            m: 5,
            elements_per_color: 8,
            max_per_color_in_set: 3,
        };
        let inst = balanced(&p, 5).unwrap();
        assert!(inst.is_balanced(1));
        let zero = BalancedParams { delta: 0, ..p };
        let inst0 = balanced(&zero, 5).unwrap();
        assert!(inst0.is_balanced(0));
    }

    #[test]
    fn random_is_deterministic() {
        let p = RandomParams {
            n: 10,
            m: 6,
            k: 2,
            chi: 3,
            density: 0.3,
            weighted: true,
        };
        let a = generate(&Family::Random(p.clone()), 3).unwrap();
        let b = generate(&Family::Random(p), 3).unwrap();
        assert_eq!(a, b);
    }
}

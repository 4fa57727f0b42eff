//! The fair-coverage data model: instances, graph translation, statistics,
//! solution scoring, and the JSON file formats.
//!
//! Element and set indices are 1-based in files and 0-based in memory; the
//! loader and writer do the shift. Colors follow the same convention.

use crate::bitset::BitSet;
use crate::{Error, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One fair maximum coverage instance. Immutable after construction and safe
/// to share across concurrent solver runs.
#[derive(Clone, Debug, PartialEq)]
pub struct FmcInstance {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub chi: usize,
    /// Per-element non-negative weight.
    pub weights: Vec<f64>,
    /// Per-element color in `0..chi`.
    pub colors: Vec<usize>,
    /// Element-index lists, one per set.
    pub sets: Vec<Vec<usize>>,
    /// Color-proportionality constants, summing to 1. `None` means all equal.
    pub proportions: Option<Vec<Ratio<i64>>>,
}

/// Natural parameters of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceStats {
    /// Maximum set cardinality.
    pub a: usize,
    /// Maximum element frequency (number of sets an element belongs to).
    pub f: usize,
    /// |C_j| per color.
    pub per_color_counts: Vec<usize>,
    /// All weights equal to one.
    pub unweighted: bool,
    /// `a == 1`, below the usual parameter range; permitted but flagged.
    pub singleton_sets_only: bool,
}

/// Edge-colored graph input for the node-coverage special case.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredGraph {
    pub nodes: usize,
    /// (u, v, color, weight), endpoints 0-based, color 0-based.
    pub edges: Vec<(usize, usize, usize, f64)>,
}

/// Result of translating a graph: the set system plus the node each set came
/// from (isolated nodes are dropped, so set index and node id can differ).
#[derive(Clone, Debug)]
pub struct GraphTranslation {
    pub instance: FmcInstance,
    /// `set_to_node[i]` is the original 0-based node id of set `i`.
    pub set_to_node: Vec<usize>,
}

/// Whether a solver was asked for exactly `k` sets or at most `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CardinalityMode {
    ExactK,
    AtMostK,
}

/// A scored selection of sets.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Selected set indices, ascending, 0-based.
    pub selected: Vec<usize>,
    /// Union of the selected sets.
    pub covered: BitSet,
    /// Covered-element count per color.
    pub p: Vec<usize>,
    /// Total covered weight.
    pub weight: f64,
    pub cardinality_mode: CardinalityMode,
}

/// Fairness metrics of one solution. `sigma` is the worst pairwise ratio of
/// per-color covered counts (proportion-normalized when the instance carries
/// unequal proportions); infinite when some color is missed entirely, and 1
/// exactly when the counts balance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FairnessReport {
    pub sigma: f64,
    /// Threshold the verdicts below were judged against, when one was supplied.
    pub eps: Option<f64>,
    /// Deterministic check: every pairwise ratio at most eps.
    pub eq1: Option<bool>,
}

impl FairnessReport {
    /// Attach the deterministic eps-approximation verdict.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self.eq1 = Some(self.sigma <= eps);
        self
    }
}

// ---------------------------------------------------------------------------
// Construction and validation
// ---------------------------------------------------------------------------

impl FmcInstance {
    /// Validate and build an instance from 0-based parts.
    pub fn new(
        n: usize,
        m: usize,
        k: usize,
        chi: usize,
        weights: Vec<f64>,
        colors: Vec<usize>,
        sets: Vec<Vec<usize>>,
        proportions: Option<Vec<Ratio<i64>>>,
    ) -> Result<Self> {
        let inst = FmcInstance {
            n,
            m,
            k,
            chi,
            weights,
            colors,
            sets,
            proportions,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if self.n == 0 {
            return bad("instance has no elements".into());
        }
        if self.chi == 0 {
            return bad("chi must be at least 1".into());
        }
        if self.sets.len() != self.m {
            return bad(format!("declared m={} but {} sets given", self.m, self.sets.len()));
        }
        if self.weights.len() != self.n {
            return bad(format!(
                "declared n={} but {} weights given",
                self.n,
                self.weights.len()
            ));
        }
        if self.colors.len() != self.n {
            return bad(format!(
                "declared n={} but {} colors given",
                self.n,
                self.colors.len()
            ));
        }
        if self.k < 1 || self.k > self.m {
            return bad(format!("k={} outside 1..={}", self.k, self.m));
        }
        for (i, &w) in self.weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return bad(format!("negative or non-finite weight for element {}", i + 1));
            }
        }
        let mut seen_color = vec![false; self.chi];
        for (i, &c) in self.colors.iter().enumerate() {
            if c >= self.chi {
                return bad(format!("color out of range for element {}", i + 1));
            }
            seen_color[c] = true;
        }
        for (c, seen) in seen_color.iter().enumerate() {
            if !seen {
                return bad(format!("color {} is assigned to no element", c + 1));
            }
        }
        for (si, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return bad(format!("empty set {}", si + 1));
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return bad(format!("duplicate element in set {}", si + 1));
                }
            }
            if let Some(&max) = sorted.last() {
                if max >= self.n {
                    return bad(format!("element index out of range in set {}", si + 1));
                }
            }
        }
        if let Some(q) = &self.proportions {
            if q.len() != self.chi {
                return bad(format!("expected {} proportions, got {}", self.chi, q.len()));
            }
            let mut sum = Ratio::new(0, 1);
            for (j, r) in q.iter().enumerate() {
                if *r <= Ratio::new(0, 1) {
                    return bad(format!("proportion for color {} is not positive", j + 1));
                }
                sum += r;
            }
            if sum != Ratio::new(1, 1) {
                return bad(format!("proportions sum to {} instead of 1", sum));
            }
        }
        Ok(())
    }

    /// Effective proportionality constants (all equal when none were given).
    pub fn proportions_or_equal(&self) -> Vec<Ratio<i64>> {
        match &self.proportions {
            Some(q) => q.clone(),
            None => vec![Ratio::new(1, self.chi as i64); self.chi],
        }
    }

    pub fn stats(&self) -> InstanceStats {
        let a = self.sets.iter().map(Vec::len).max().unwrap_or(0);
        let mut freq = vec![0usize; self.n];
        for set in &self.sets {
            for &e in set {
                freq[e] += 1;
            }
        }
        let f = freq.iter().copied().max().unwrap_or(0).max(1);
        let mut per_color_counts = vec![0usize; self.chi];
        for &c in &self.colors {
            per_color_counts[c] += 1;
        }
        InstanceStats {
            a,
            f,
            per_color_counts,
            unweighted: self.weights.iter().all(|&w| w == 1.0),
            singleton_sets_only: a == 1,
        }
    }

    /// Coverage mask of one set.
    pub fn set_mask(&self, s: usize) -> BitSet {
        BitSet::from_indices(self.n, &self.sets[s])
    }

    /// Coverage masks for all sets.
    pub fn set_masks(&self) -> Vec<BitSet> {
        (0..self.m).map(|s| self.set_mask(s)).collect()
    }

    /// Per-color element masks.
    pub fn color_masks(&self) -> Vec<BitSet> {
        let mut masks = vec![BitSet::new(self.n); self.chi];
        for (e, &c) in self.colors.iter().enumerate() {
            masks[c].insert(e);
        }
        masks
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Score a selection of distinct set indices: recompute the covered set,
    /// per-color counts, weight, and the fairness report. Pure function.
    pub fn evaluate(&self, selected: &[usize]) -> Result<(Solution, FairnessReport)> {
        let mut seen = vec![false; self.m];
        for &s in selected {
            if s >= self.m {
                return Err(Error::Validation(format!("set index {} out of range", s + 1)));
            }
            if seen[s] {
                return Err(Error::Validation(format!("duplicate set index {}", s + 1)));
            }
            seen[s] = true;
        }
        let mut covered = BitSet::new(self.n);
        for &s in selected {
            for &e in &self.sets[s] {
                covered.insert(e);
            }
        }
        let mut p = vec![0usize; self.chi];
        let mut weight = 0.0;
        for e in covered.iter_ones() {
            p[self.colors[e]] += 1;
            weight += self.weights[e];
        }
        let mut sel_sorted = selected.to_vec();
        sel_sorted.sort_unstable();
        let solution = Solution {
            selected: sel_sorted,
            covered,
            p: p.clone(),
            weight,
            cardinality_mode: if selected.len() == self.k {
                CardinalityMode::ExactK
            } else {
                CardinalityMode::AtMostK
            },
        };
        let report = FairnessReport {
            sigma: self.sigma_of(&p),
            eps: None,
            eq1: None,
        };
        Ok((solution, report))
    }

    /// Worst pairwise ratio of proportion-normalized covered counts.
    pub fn sigma_of(&self, p: &[usize]) -> f64 {
        let q = self.proportions_or_equal();
        let norm: Vec<f64> = p
            .iter()
            .zip(&q)
            .map(|(&pi, qi)| pi as f64 / (*qi.numer() as f64 / *qi.denom() as f64))
            .collect();
        let max = norm.iter().cloned().fold(0.0f64, f64::max);
        if max == 0.0 {
            return f64::INFINITY;
        }
        let min_pos = norm.iter().cloned().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
        if norm.contains(&0.0) {
            f64::INFINITY
        } else {
            max / min_pos
        }
    }

    /// Exact fairness: p_i q_j == p_j q_i for all pairs (integer cross
    /// multiplication, no floating point).
    pub fn is_exactly_fair(&self, p: &[usize]) -> bool {
        let q = self.proportions_or_equal();
        for i in 0..self.chi {
            for j in (i + 1)..self.chi {
                let lhs = p[i] as i128 * *q[j].numer() as i128 * *q[i].denom() as i128;
                let rhs = p[j] as i128 * *q[i].numer() as i128 * *q[j].denom() as i128;
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// True when every set is monochromatic.
    pub fn is_segregated(&self) -> bool {
        self.sets
            .iter()
            .all(|set| set.iter().map(|&e| self.colors[e]).all(|c| c == self.colors[set[0]]))
    }

    /// True when every set's per-color counts sit inside the additive window
    /// `[max(1, floor(|S|/chi) - delta), ceil(|S|/chi) + delta]`.
    pub fn is_balanced(&self, delta: usize) -> bool {
        for set in &self.sets {
            let s = set.len();
            let lo = (s / self.chi).saturating_sub(delta).max(1);
            let hi = s.div_ceil(self.chi) + delta;
            let mut counts = vec![0usize; self.chi];
            for &e in set {
                counts[self.colors[e]] += 1;
            }
            if counts.iter().any(|&c| c < lo || c > hi) {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Graph translation
// ---------------------------------------------------------------------------

impl ColoredGraph {
    pub fn validate(&self, chi: usize) -> Result<()> {
        for (i, &(u, v, c, w)) in self.edges.iter().enumerate() {
            if u == v {
                return Err(Error::Validation(format!("self-loop at edge {}", i + 1)));
            }
            if u >= self.nodes || v >= self.nodes {
                return Err(Error::Validation(format!("endpoint out of range at edge {}", i + 1)));
            }
            if c >= chi {
                return Err(Error::Validation(format!("color out of range at edge {}", i + 1)));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Validation(format!("bad weight at edge {}", i + 1)));
            }
        }
        Ok(())
    }

    pub fn chi(&self) -> usize {
        self.edges.iter().map(|&(_, _, c, _)| c + 1).max().unwrap_or(1)
    }
}

/// Standard node-cover-to-set-cover translation: elements are the edges, one
/// set per non-isolated node holding its incident edges. Isolated nodes are
/// dropped and the node mapping recorded.
pub fn from_graph(g: &ColoredGraph, k: usize) -> Result<GraphTranslation> {
    let chi = g.chi();
    g.validate(chi)?;
    if g.edges.is_empty() {
        return Err(Error::Validation("graph has no edges".into()));
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.nodes];
    for (e, &(u, v, _, _)) in g.edges.iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    let set_to_node: Vec<usize> = (0..g.nodes).filter(|&v| !incident[v].is_empty()).collect();
    if k > set_to_node.len() {
        return Err(Error::Validation(format!(
            "k={} exceeds the {} non-isolated nodes",
            k,
            set_to_node.len()
        )));
    }
    let sets: Vec<Vec<usize>> = set_to_node.iter().map(|&v| incident[v].clone()).collect();
    let instance = FmcInstance::new(
        g.edges.len(),
        sets.len(),
        k,
        chi,
        g.edges.iter().map(|&(_, _, _, w)| w).collect(),
        g.edges.iter().map(|&(_, _, c, _)| c).collect(),
        sets,
        None,
    )?;
    Ok(GraphTranslation {
        instance,
        set_to_node,
    })
}

// ---------------------------------------------------------------------------
// File formats (1-based on disk)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    k: usize,
    chi: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    colors: Vec<usize>,
    sets: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    proportions: Option<Vec<[i64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: usize,
    edges: Vec<(usize, usize, usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
}

impl FmcInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let colors = file
            .colors
            .iter()
            .map(|&c| {
                c.checked_sub(1)
                    .ok_or_else(|| Error::Parse("colors are 1-based, found 0".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let sets = file
            .sets
            .iter()
            .enumerate()
            .map(|(si, set)| {
                set.iter()
                    .map(|&e| {
                        e.checked_sub(1).ok_or_else(|| {
                            Error::Parse(format!("element indices are 1-based, found 0 in set {}", si + 1))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let proportions = file
            .proportions
            .map(|pairs| {
                pairs
                    .iter()
                    .map(|&[num, den]| {
                        if den == 0 {
                            Err(Error::Parse("proportion with zero denominator".into()))
                        } else {
                            Ok(Ratio::new(num, den))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        FmcInstance::new(
            file.n,
            file.m,
            file.k,
            file.chi,
            file.weights.unwrap_or_else(|| vec![1.0; file.n]),
            colors,
            sets,
            proportions,
        )
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            n: self.n,
            m: self.m,
            k: self.k,
            chi: self.chi,
            weights: if self.weights.iter().all(|&w| w == 1.0) {
                None
            } else {
                Some(self.weights.clone())
            },
            colors: self.colors.iter().map(|&c| c + 1).collect(),
            sets: self
                .sets
                .iter()
                .map(|set| set.iter().map(|&e| e + 1).collect())
                .collect(),
            proportions: self
                .proportions
                .as_ref()
                .map(|q| q.iter().map(|r| [*r.numer(), *r.denom()]).collect()),
        };
        serde_json::to_string_pretty(&file).expect("instance serialization")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// What a solver input file turned out to contain.
pub enum LoadedInput {
    Instance(FmcInstance),
    Graph { graph: ColoredGraph, k: Option<usize> },
}

/// Load an instance or graph file, telling them apart by their keys.
pub fn load_input(path: &Path) -> Result<LoadedInput> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("nodes").is_some() {
        let file: GraphFile =
            serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let edges = file
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, c, w))| {
                let shift = |x: usize, what: &str| {
                    x.checked_sub(1).ok_or_else(|| {
                        Error::Parse(format!("{} is 1-based, found 0 at edge {}", what, i + 1))
                    })
                };
                Ok((shift(u, "endpoint")?, shift(v, "endpoint")?, shift(c, "color")?, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LoadedInput::Graph {
            graph: ColoredGraph {
                nodes: file.nodes,
                edges,
            },
            k: file.k,
        })
    } else {
        Ok(LoadedInput::Instance(FmcInstance::from_json(&text)?))
    }
}

/// Load a set-system instance file directly.
pub fn load_instance(path: &Path) -> Result<FmcInstance> {
    let text = std::fs::read_to_string(path)?;
    FmcInstance::from_json(&text)
}

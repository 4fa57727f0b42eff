//! Builders for the LP relaxations behind the randomized and iterated
//! solvers, plus the plain k-cover relaxation used by the pipage baseline.

use super::{LpModel, Row, RowTag, Sense, VarKind, Variable};
use crate::instance::FmcInstance;
use crate::{Error, Result};

fn unit(kind: VarKind) -> Variable {
    Variable {
        kind,
        lo: 0.0,
        hi: 1.0,
    }
}

/// Descending grid of admissible coverage-count guesses: multiples of the
/// least common denominator of the proportions (just `chi` when proportions
/// are all equal), capped by `n`.
pub fn opt_hash_grid(inst: &FmcInstance) -> Vec<usize> {
    let q = inst.proportions_or_equal();
    let step = q
        .iter()
        .map(|r| *r.denom() as usize)
        .fold(1usize, |acc, d| acc / gcd(acc, d) * d);
    let mut grid: Vec<usize> = (1..=inst.n / step).map(|i| i * step).collect();
    grid.reverse();
    grid
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn validate_guess(inst: &FmcInstance, guess: usize) -> Result<()> {
    if !opt_hash_grid(inst).contains(&guess) {
        return Err(Error::Param(format!(
            "coverage-count guess {guess} is not an admissible multiple for this instance"
        )));
    }
    Ok(())
}

/// The well-known k-set-coverage relaxation: coverage rows, one cardinality
/// row, box bounds.
pub fn build_kcover_lp(inst: &FmcInstance) -> LpModel {
    let mut vars: Vec<Variable> = (0..inst.m).map(|s| unit(VarKind::Set(s))).collect();
    vars.extend((0..inst.n).map(|e| unit(VarKind::Elem(e))));
    let x = |e: usize| inst.m + e;
    let mut rows = Vec::with_capacity(inst.n + 1);
    let containing = sets_containing(inst);
    for e in 0..inst.n {
        let mut coeffs = vec![(x(e), 1.0)];
        coeffs.extend(containing[e].iter().map(|&s| (s, -1.0)));
        rows.push(Row {
            coeffs,
            sense: Sense::Le,
            rhs: 0.0,
            tag: RowTag::Coverage(e),
        });
    }
    rows.push(Row {
        coeffs: (0..inst.m).map(|s| (s, 1.0)).collect(),
        sense: Sense::Eq,
        rhs: inst.k as f64,
        tag: RowTag::Cardinality,
    });
    let mut objective = vec![0.0; vars.len()];
    for e in 0..inst.n {
        objective[x(e)] = inst.weights[e];
    }
    LpModel {
        vars,
        rows,
        objective,
    }
}

fn sets_containing(inst: &FmcInstance) -> Vec<Vec<usize>> {
    let mut containing = vec![Vec::new(); inst.n];
    for (s, set) in inst.sets.iter().enumerate() {
        for &e in set {
            containing[e].push(s);
        }
    }
    containing
}

/// The strengthened relaxation: k-cover rows plus per-incidence covering
/// inequalities, the total-coverage equality at the guessed count, and
/// pairwise color-balance rows.
pub fn build_large_lp(inst: &FmcInstance, opt_hash_guess: usize) -> Result<LpModel> {
    validate_guess(inst, opt_hash_guess)?;
    let mut model = build_kcover_lp(inst);
    extend_to_large(inst, &mut model, opt_hash_guess);
    Ok(model)
}

fn extend_to_large(inst: &FmcInstance, model: &mut LpModel, opt_hash_guess: usize) {
    let x = |e: usize| inst.m + e;
    for (s, set) in inst.sets.iter().enumerate() {
        for &e in set {
            model.rows.push(Row {
                coeffs: vec![(x(e), 1.0), (s, -1.0)],
                sense: Sense::Ge,
                rhs: 0.0,
                tag: RowTag::Covering { elem: e, set: s },
            });
        }
    }
    model.rows.push(Row {
        coeffs: (0..inst.n).map(|e| (x(e), 1.0)).collect(),
        sense: Sense::Eq,
        rhs: opt_hash_guess as f64,
        tag: RowTag::TotalCount,
    });
    let q = inst.proportions_or_equal();
    for i in 0..inst.chi {
        for j in (i + 1)..inst.chi {
            // q_j * sum_{C_i} x = q_i * sum_{C_j} x, cross-multiplied exactly
            let ci = (*q[j].numer() * *q[i].denom()) as f64;
            let cj = (*q[i].numer() * *q[j].denom()) as f64;
            let mut coeffs = Vec::new();
            for (e, &c) in inst.colors.iter().enumerate() {
                if c == i {
                    coeffs.push((x(e), ci));
                } else if c == j {
                    coeffs.push((x(e), -cj));
                }
            }
            model.rows.push(Row {
                coeffs,
                sense: Sense::Eq,
                rhs: 0.0,
                tag: RowTag::ColorBalance(i, j),
            });
        }
    }
}

/// Count of color-`j` elements per set.
pub fn color_counts_per_set(inst: &FmcInstance) -> Vec<Vec<usize>> {
    let mut nu = vec![vec![0usize; inst.chi]; inst.m];
    for (s, set) in inst.sets.iter().enumerate() {
        for &e in set {
            nu[s][inst.colors[e]] += 1;
        }
    }
    nu
}

/// The strengthened relaxation plus per-color load variables tying the
/// color mass of selected sets to the guessed coverage count.
pub fn build_medium_lp(inst: &FmcInstance, opt_hash_guess: usize) -> Result<LpModel> {
    let mut model = build_large_lp(inst, opt_hash_guess)?;
    let stats = inst.stats();
    let nu = color_counts_per_set(inst);
    let first_h = model.vars.len();
    for j in 0..inst.chi {
        model.vars.push(Variable {
            kind: VarKind::ColorLoad(j),
            lo: 1.0 / inst.chi as f64,
            hi: stats.f as f64 / inst.chi as f64,
        });
        model.objective.push(0.0);
        let mut coeffs: Vec<(usize, f64)> = (0..inst.m)
            .filter(|&s| nu[s][j] > 0)
            .map(|s| (s, nu[s][j] as f64))
            .collect();
        coeffs.push((first_h + j, -(opt_hash_guess as f64)));
        model.rows.push(Row {
            coeffs,
            sense: Sense::Eq,
            rhs: 0.0,
            tag: RowTag::ColorLoad(j),
        });
    }
    Ok(model)
}

/// Margin added to realize the strict "more than" threshold on the selection
/// mass rows of the anchored relaxation.
pub const STRICTNESS_MARGIN: f64 = 1e-6;

/// The anchored relaxation: the strengthened system with the anchor sets and
/// their elements fixed to one, rows that became unconditionally satisfied
/// pruned, and a minimum selection-mass row for every un-anchored color.
///
/// `anchors` pairs each color of `psi_prime` with one set containing it.
pub fn build_small_lp(
    inst: &FmcInstance,
    opt_hash_guess: usize,
    psi_prime: &[usize],
    anchors: &[(usize, usize)],
) -> Result<LpModel> {
    validate_guess(inst, opt_hash_guess)?;
    if anchors.len() != psi_prime.len() {
        return Err(Error::Param("one anchor set per anchored color is required".into()));
    }
    for &(color, set) in anchors {
        if !psi_prime.contains(&color) {
            return Err(Error::Param(format!("anchor given for un-anchored color {}", color + 1)));
        }
        if set >= inst.m || !inst.sets[set].iter().any(|&e| inst.colors[e] == color) {
            return Err(Error::Param(format!(
                "anchor set {} holds no element of color {}",
                set + 1,
                color + 1
            )));
        }
    }
    let mut model = build_kcover_lp(inst);
    extend_to_large(inst, &mut model, opt_hash_guess);

    let x = |e: usize| inst.m + e;
    let mut fixed_sets = vec![false; inst.m];
    let mut fixed_elems = vec![false; inst.n];
    for &(_, set) in anchors {
        fixed_sets[set] = true;
        for &e in &inst.sets[set] {
            fixed_elems[e] = true;
        }
    }
    for (s, fixed) in fixed_sets.iter().enumerate() {
        if *fixed {
            model.vars[s].lo = 1.0;
        }
    }
    for (e, fixed) in fixed_elems.iter().enumerate() {
        if *fixed {
            model.vars[x(e)].lo = 1.0;
        }
    }
    // Prune rows the fixes satisfy outright: coverage rows for elements in an
    // anchor set (the fixed y already dominates x) and covering rows whose
    // element is fixed to one.
    model.rows.retain(|row| match row.tag {
        RowTag::Coverage(e) => !fixed_elems[e],
        RowTag::Covering { elem, .. } => !fixed_elems[elem],
        _ => true,
    });
    let chi = inst.chi as f64;
    for color in 0..inst.chi {
        if !psi_prime.contains(&color) {
            let holders: Vec<usize> = (0..inst.m)
                .filter(|&s| inst.sets[s].iter().any(|&e| inst.colors[e] == color))
                .collect();
            model.rows.push(Row {
                coeffs: holders.iter().map(|&s| (s, 1.0)).collect(),
                sense: Sense::Ge,
                rhs: 5.0 * chi.ln() + STRICTNESS_MARGIN,
                tag: RowTag::MinColorMass(color),
            });
        }
    }
    Ok(model)
}

/// Reduced incidence system handed to the iterated-rounding LP. `units` are
/// the still-selectable sets (or nodes); every incidence names a unit in
/// that list.
#[derive(Clone, Debug)]
pub struct IterLpState {
    pub units: Vec<usize>,
    /// (element id, unit id, color, weight).
    pub incidences: Vec<(usize, usize, usize, f64)>,
    pub k_hat: usize,
    pub chi: usize,
    pub targets: ColorTargets,
}

/// Exact per-color incidence counts (constant-color mode) or two-sided
/// windows (general mode).
#[derive(Clone, Debug)]
pub enum ColorTargets {
    Exact(Vec<i64>),
    Window(Vec<(f64, f64)>),
}

/// LP over one incidence variable per (element, unit) pair linked to its
/// unit's indicator, a cardinality row, and the per-color count rows.
pub fn build_iter_lp(state: &IterLpState) -> Result<LpModel> {
    if state.units.is_empty() && state.k_hat > 0 {
        return Err(Error::Param("no selectable units left but budget remains".into()));
    }
    if let ColorTargets::Exact(q) = &state.targets {
        if q.iter().any(|&v| v < 0) {
            return Err(Error::Param("negative per-color target".into()));
        }
    }
    let nu = state.units.len();
    let unit_col: std::collections::HashMap<usize, usize> = state
        .units
        .iter()
        .enumerate()
        .map(|(c, &u)| (u, c))
        .collect();
    let mut vars: Vec<Variable> = state.units.iter().map(|&u| unit(VarKind::Set(u))).collect();
    let mut objective = vec![0.0; nu];
    let mut rows = Vec::new();
    for (i, &(elem, u, _color, weight)) in state.incidences.iter().enumerate() {
        let col = nu + i;
        vars.push(unit(VarKind::Incidence { elem, set: u }));
        objective.push(weight);
        let ucol = *unit_col
            .get(&u)
            .ok_or_else(|| Error::Param("incidence names a unit outside the state".into()))?;
        rows.push(Row {
            coeffs: vec![(col, 1.0), (ucol, -1.0)],
            sense: Sense::Eq,
            rhs: 0.0,
            tag: RowTag::IncidenceLink { elem, set: u },
        });
    }
    rows.push(Row {
        coeffs: (0..nu).map(|c| (c, 1.0)).collect(),
        sense: Sense::Eq,
        rhs: state.k_hat as f64,
        tag: RowTag::Cardinality,
    });
    for color in 0..state.chi {
        let coeffs: Vec<(usize, f64)> = state
            .incidences
            .iter()
            .enumerate()
            .filter(|(_, &(_, _, c, _))| c == color)
            .map(|(i, _)| (nu + i, 1.0))
            .collect();
        match &state.targets {
            ColorTargets::Exact(q) => {
                rows.push(Row {
                    coeffs,
                    sense: Sense::Eq,
                    rhs: q[color] as f64,
                    tag: RowTag::ColorCount(color),
                });
            }
            ColorTargets::Window(w) => {
                let (lo, hi) = w[color];
                if lo > 0.0 {
                    rows.push(Row {
                        coeffs: coeffs.clone(),
                        sense: Sense::Ge,
                        rhs: lo,
                        tag: RowTag::ColorWindowLo(color),
                    });
                }
                rows.push(Row {
                    coeffs,
                    sense: Sense::Le,
                    rhs: hi,
                    tag: RowTag::ColorWindowHi(color),
                });
            }
        }
    }
    Ok(LpModel {
        vars,
        rows,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gap, gap_pair_sets};
    use crate::lp::{solve_vertex, LpStatus};

    #[test]
    fn guess_grid_descends_in_color_multiples() {
        let inst = gap(2).unwrap(); // n = 12, chi = 2
        assert_eq!(opt_hash_grid(&inst), vec![12, 10, 8, 6, 4, 2]);
    }

    #[test]
    fn large_lp_row_count() {
        // n=3, m=2, every element in at most 2 sets
        let inst = FmcInstance::new(
            3,
            2,
            1,
            2,
            vec![1.0; 3],
            vec![0, 1, 0],
            vec![vec![0, 1, 2], vec![0]],
            None,
        )
        .unwrap();
        let model = build_large_lp(&inst, 2).unwrap();
        let incidences: usize = inst.sets.iter().map(Vec::len).sum();
        // coverage + cardinality + covering + total-count + color pairs
        assert_eq!(model.rows.len(), inst.n + 1 + incidences + 1 + 1);
        assert!(build_large_lp(&inst, 3).is_err(), "guess must be a chi multiple");
    }

    #[test]
    fn gap_block_point_is_feasible_at_its_count() {
        let alpha = 2;
        let inst = gap(alpha).unwrap();
        let model = build_large_lp(&inst, 2 * alpha).unwrap();
        // y = 1/alpha on every block set; x = 1 on color-1 block elements,
        // 1/alpha on the rest of the block; pair sets untouched.
        let mut point = vec![0.0; model.num_vars()];
        for j in 0..alpha {
            for s in crate::generate::gap_block_sets(alpha, j) {
                point[s] = 1.0 / alpha as f64;
            }
            let base = j * (alpha + 1);
            point[inst.m + base] = 1.0;
            for e in base + 1..base + alpha + 1 {
                point[inst.m + e] = 1.0 / alpha as f64;
            }
        }
        assert!(model.is_feasible(&point), "block fractional point");
    }

    #[test]
    fn integral_witness_feasible_and_lp_dominates() {
        let inst = gap(2).unwrap();
        let model = build_large_lp(&inst, 6).unwrap();
        let mut point = vec![0.0; model.num_vars()];
        for s in gap_pair_sets(2) {
            point[s] = 1.0;
        }
        let first_pair_elem = 2 * 3;
        for e in first_pair_elem..12 {
            point[inst.m + e] = 1.0;
        }
        assert!(model.is_feasible(&point));
        let sol = solve_vertex(&model).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective >= 6.0 - 1e-8, "relaxation dominates the integral optimum");
        let (_, rank) = model.tight_rank(&sol.values);
        assert_eq!(rank, model.num_vars(), "extreme point");
    }

    #[test]
    fn medium_lp_shape() {
        let inst = gap(2).unwrap();
        let model = build_medium_lp(&inst, 6).unwrap();
        assert_eq!(model.num_vars(), 12 + 9 + 2);
        // nu rows partition each set's size
        let nu = color_counts_per_set(&inst);
        for (s, set) in inst.sets.iter().enumerate() {
            assert_eq!(nu[s].iter().sum::<usize>(), set.len());
        }
        let sol = solve_vertex(&model).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective >= 6.0 - 1e-8);
    }

    #[test]
    fn small_lp_anchoring() {
        let inst = gap(2).unwrap();
        let pair = gap_pair_sets(2);
        // anchor both colors at the first pair set
        let model =
            build_small_lp(&inst, 6, &[0, 1], &[(0, pair[0]), (1, pair[0])]).unwrap();
        assert_eq!(model.vars[pair[0]].lo, 1.0);
        let sol = solve_vertex(&model).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.values[pair[0]] >= 1.0 - 1e-9);

        // no anchored colors: one min-mass row per color at 5 ln(chi)
        let model = build_small_lp(&inst, 6, &[], &[]).unwrap();
        let mass_rows: Vec<_> = model
            .rows
            .iter()
            .filter(|r| matches!(r.tag, RowTag::MinColorMass(_)))
            .collect();
        assert_eq!(mass_rows.len(), 2);
        let expect = 5.0 * 2.0f64.ln() + STRICTNESS_MARGIN;
        assert!(mass_rows.iter().all(|r| (r.rhs - expect).abs() < 1e-12));

        // anchor set lacking the color is rejected
        let only_color2 = 1; // second leave-one-out set of block 0 drops a color-2 element, keeps color 1
        assert!(build_small_lp(&inst, 6, &[1], &[(1, only_color2)]).is_ok());
        let block_set_without_color1 = 0; // drops u^0_1, the only color-1 element of the block
        assert!(build_small_lp(&inst, 6, &[0], &[(0, block_set_without_color1)]).is_err());
    }

    #[test]
    fn dump_renders_every_row_and_bound() {
        let inst = gap(2).unwrap();
        let model = build_large_lp(&inst, 6).unwrap();
        let text = model.dump();
        assert!(text.starts_with("maximize"));
        assert_eq!(
            text.matches(" = ").count() + text.matches(" <= ").count() + text.matches(" >= ").count(),
            model.rows.len() + model.num_vars() * 2, // bounds render as lo <= v <= hi
        );
        assert!(text.contains("y1") && text.contains("x12"));
    }

    #[test]
    fn iter_lp_smoke() {
        // path graph P3 as an incidence system: nodes 0,1,2 / edges (0-1),(1-2)
        let state = IterLpState {
            units: vec![0, 1, 2],
            incidences: vec![
                (0, 0, 0, 1.0),
                (0, 1, 0, 1.0),
                (1, 1, 1, 1.0),
                (1, 2, 1, 1.0),
            ],
            k_hat: 1,
            chi: 2,
            targets: ColorTargets::Exact(vec![1, 1]),
        };
        let model = build_iter_lp(&state).unwrap();
        assert_eq!(model.num_vars(), 3 + 4);
        let sol = solve_vertex(&model).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // selecting the middle node covers one edge of each color
        assert!((sol.values[1] - 1.0).abs() < 1e-9);

        let degenerate = IterLpState {
            units: vec![],
            incidences: vec![],
            k_hat: 2,
            chi: 1,
            targets: ColorTargets::Exact(vec![0]),
        };
        assert!(build_iter_lp(&degenerate).is_err());
    }
}

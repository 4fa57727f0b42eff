//! Two-phase primal simplex on a dense tableau. Bounded variables are
//! shifted to zero lower bounds with explicit upper-bound rows, so every
//! optimum reported is a basic feasible point of the full row system,
//! exactly the extreme-point property the rounding loops rely on.

use super::{LpModel, LpSolution, LpStatus, Sense, TOL_FEAS};
use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;

struct Standard {
    /// a[r] holds one equality row over all columns.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    /// Phase-2 objective per column (maximize).
    cost: Vec<f64>,
    basis: Vec<usize>,
    n_structural: usize,
    first_artificial: usize,
    /// Map structural column -> model variable index.
    col_to_var: Vec<usize>,
    /// Fixed variables carry no column.
    fixed: Vec<Option<f64>>,
    lo_shift: Vec<f64>,
}

fn build_standard(model: &LpModel) -> Result<Standard> {
    let nv = model.num_vars();
    let mut fixed: Vec<Option<f64>> = vec![None; nv];
    let mut lo_shift = vec![0.0; nv];
    let mut col_to_var = Vec::new();
    for (j, v) in model.vars.iter().enumerate() {
        if v.hi < v.lo - TOL_FEAS {
            return Err(Error::Lp(format!("variable {j} has empty bound interval")));
        }
        if v.hi - v.lo <= 1e-12 {
            fixed[j] = Some(v.lo);
        } else {
            lo_shift[j] = v.lo;
            col_to_var.push(j);
        }
    }
    let n_structural = col_to_var.len();
    let var_to_col: Vec<Option<usize>> = {
        let mut m = vec![None; nv];
        for (c, &j) in col_to_var.iter().enumerate() {
            m[j] = Some(c);
        }
        m
    };

    // Shifted rows: model rows first, then one upper-bound row per column.
    struct RawRow {
        dense: Vec<f64>,
        sense: Sense,
        rhs: f64,
    }
    let mut raw: Vec<RawRow> = Vec::with_capacity(model.rows.len() + n_structural);
    for row in &model.rows {
        let mut dense = vec![0.0; n_structural];
        let mut rhs = row.rhs;
        for &(j, aij) in &row.coeffs {
            match fixed[j] {
                Some(val) => rhs -= aij * val,
                None => {
                    rhs -= aij * lo_shift[j];
                    dense[var_to_col[j].unwrap()] += aij;
                }
            }
        }
        raw.push(RawRow {
            dense,
            sense: row.sense,
            rhs,
        });
    }
    for (c, &j) in col_to_var.iter().enumerate() {
        let ub = model.vars[j].hi - model.vars[j].lo;
        let mut dense = vec![0.0; n_structural];
        dense[c] = 1.0;
        raw.push(RawRow {
            dense,
            sense: Sense::Le,
            rhs: ub,
        });
    }

    // Orient rows to non-negative rhs, then add slacks and artificials.
    for r in &mut raw {
        let flip = match r.sense {
            Sense::Eq => r.rhs < 0.0,
            Sense::Le => r.rhs < 0.0,
            Sense::Ge => r.rhs <= 0.0, // prefer the slack form when rhs is 0
        };
        if flip {
            r.dense.iter_mut().for_each(|x| *x = -*x);
            r.rhs = -r.rhs;
            r.sense = match r.sense {
                Sense::Eq => Sense::Eq,
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
            };
        }
    }
    let nrows = raw.len();
    let n_slack = raw.iter().filter(|r| r.sense != Sense::Eq).count();
    let n_art = raw.iter().filter(|r| r.sense != Sense::Le).count();
    let ncols = n_structural + n_slack + n_art;
    let first_artificial = n_structural + n_slack;

    let mut a = vec![vec![0.0; ncols]; nrows];
    let mut b = vec![0.0; nrows];
    let mut basis = vec![usize::MAX; nrows];
    let mut next_slack = n_structural;
    let mut next_art = first_artificial;
    for (r, row) in raw.iter().enumerate() {
        a[r][..n_structural].copy_from_slice(&row.dense);
        b[r] = row.rhs;
        match row.sense {
            Sense::Le => {
                a[r][next_slack] = 1.0;
                basis[r] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                a[r][next_slack] = -1.0;
                next_slack += 1;
                a[r][next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                a[r][next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    for (c, &j) in col_to_var.iter().enumerate() {
        cost[c] = model.objective[j];
    }
    Ok(Standard {
        a,
        b,
        cost,
        basis,
        n_structural,
        first_artificial,
        col_to_var,
        fixed,
        lo_shift,
    })
}

struct SimplexRun<'a> {
    st: &'a mut Standard,
    degenerate_pivots: usize,
    bland: bool,
    bland_after: usize,
    iterations: usize,
    iteration_cap: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl<'a> SimplexRun<'a> {
    fn new(st: &'a mut Standard) -> Self {
        let nrows = st.a.len();
        let ncols = st.a[0].len();
        SimplexRun {
            degenerate_pivots: 0,
            bland: false,
            bland_after: 50 * ncols,
            iterations: 0,
            iteration_cap: 2_000 + 80 * (nrows + ncols),
            st,
        }
    }

    /// Reduced cost row for the given column costs.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let ncols = self.st.a[0].len();
        let mut z = cost.to_vec();
        for (r, &bvar) in self.st.basis.iter().enumerate() {
            let cb = cost[bvar];
            if cb != 0.0 {
                for j in 0..ncols {
                    z[j] -= cb * self.st.a[r][j];
                }
            }
        }
        z
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let lead = self.st.a[row][col];
        let ncols = self.st.a[0].len();
        for j in 0..ncols {
            self.st.a[row][j] /= lead;
        }
        self.st.b[row] /= lead;
        for r in 0..self.st.a.len() {
            if r != row {
                let factor = self.st.a[r][col];
                if factor != 0.0 {
                    for j in 0..ncols {
                        self.st.a[r][j] -= factor * self.st.a[row][j];
                    }
                    self.st.b[r] -= factor * self.st.b[row];
                    if self.st.b[r].abs() < 1e-12 {
                        self.st.b[r] = 0.0;
                    }
                }
            }
        }
        self.st.basis[row] = col;
    }

    fn run_phase(&mut self, cost: &[f64], allow: impl Fn(usize) -> bool) -> Result<PhaseOutcome> {
        loop {
            self.iterations += 1;
            if self.iterations > self.iteration_cap {
                return Err(Error::Lp("simplex iteration cap exceeded".into()));
            }
            let z = self.reduced_costs(cost);
            let entering = if self.bland {
                (0..z.len()).find(|&j| allow(j) && z[j] > COST_TOL)
            } else {
                (0..z.len())
                    .filter(|&j| allow(j) && z[j] > COST_TOL)
                    .max_by(|&x, &y| z[x].partial_cmp(&z[y]).unwrap())
            };
            let Some(col) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            // Ratio test; ties go to the smallest basis variable index, which
            // together with first-positive entering is Bland's rule.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.st.a.len() {
                let arc = self.st.a[r][col];
                if arc > PIVOT_TOL {
                    let ratio = self.st.b[r] / arc;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12
                                || ((ratio - lratio).abs() <= 1e-12
                                    && self.st.basis[r] < self.st.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if ratio <= 1e-12 {
                self.degenerate_pivots += 1;
                if self.degenerate_pivots > self.bland_after {
                    self.bland = true;
                }
            }
            self.pivot(row, col);
        }
    }
}

/// Solve to an extreme-point optimum. Infeasible and unbounded models are
/// reported through the status field; numerical trouble is an error.
pub fn solve_vertex(model: &LpModel) -> Result<LpSolution> {
    let mut st = build_standard(model)?;
    let ncols = st.a[0].len();
    let first_art = st.first_artificial;
    let has_artificials = first_art < ncols;

    if has_artificials {
        let mut phase1_cost = vec![0.0; ncols];
        for c in first_art..ncols {
            phase1_cost[c] = -1.0;
        }
        let outcome = {
            let mut run = SimplexRun::new(&mut st);
            run.run_phase(&phase1_cost, |_| true)?
        };
        if matches!(outcome, PhaseOutcome::Unbounded) {
            return Err(Error::Lp("phase 1 reported unbounded".into()));
        }
        let infeas: f64 = st
            .basis
            .iter()
            .enumerate()
            .filter(|&(_, &bv)| bv >= first_art)
            .map(|(r, _)| st.b[r])
            .sum();
        if infeas > 1e-7 {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: vec![0.0; model.num_vars()],
                objective: 0.0,
                is_vertex: false,
                tight_rows: 0,
            });
        }
        // Drive remaining zero-valued artificials out of the basis where a
        // non-artificial pivot exists; rows that offer none are redundant and
        // keep their artificial pinned at zero.
        for r in 0..st.a.len() {
            if st.basis[r] >= first_art {
                if let Some(col) = (0..first_art).find(|&j| st.a[r][j].abs() > 1e-7) {
                    let mut run = SimplexRun::new(&mut st);
                    run.pivot(r, col);
                }
            }
        }
    }

    let phase2_cost = st.cost.clone();
    let outcome = {
        let mut run = SimplexRun::new(&mut st);
        run.run_phase(&phase2_cost, |j| j < first_art)?
    };
    if matches!(outcome, PhaseOutcome::Unbounded) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: vec![0.0; model.num_vars()],
            objective: f64::INFINITY,
            is_vertex: false,
            tight_rows: 0,
        });
    }

    // Read the point back in model coordinates.
    let mut shifted = vec![0.0; st.n_structural];
    for (r, &bv) in st.basis.iter().enumerate() {
        if bv < st.n_structural {
            shifted[bv] = st.b[r];
        }
    }
    let mut values = vec![0.0; model.num_vars()];
    for (j, fix) in st.fixed.iter().enumerate() {
        if let Some(v) = fix {
            values[j] = *v;
        }
    }
    for (c, &j) in st.col_to_var.iter().enumerate() {
        values[j] = st.lo_shift[j] + shifted[c];
    }
    // Clean tiny negatives and overshoots from pivoting noise.
    for (j, v) in model.vars.iter().enumerate() {
        values[j] = values[j].clamp(v.lo, v.hi);
    }
    if !model.is_feasible(&values) {
        return Err(Error::Lp("simplex returned an infeasible point".into()));
    }
    let objective: f64 = model
        .objective
        .iter()
        .zip(&values)
        .map(|(c, x)| c * x)
        .sum();
    let tight_rows = model
        .rows
        .iter()
        .filter(|row| {
            let norm = row.coeffs.iter().map(|&(_, a)| a.abs()).fold(1.0, f64::max);
            (model.row_activity(row, &values) - row.rhs).abs()
                <= TOL_FEAS * norm * (row.coeffs.len() as f64).max(1.0) * 10.0
        })
        .count();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
        is_vertex: true,
        tight_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Row, RowTag, Sense, VarKind, Variable};

    fn var(lo: f64, hi: f64) -> Variable {
        Variable {
            kind: VarKind::Elem(0),
            lo,
            hi,
        }
    }

    #[test]
    fn single_variable_max() {
        let model = LpModel {
            vars: vec![var(0.0, 1.0)],
            rows: vec![],
            objective: vec![1.0],
        };
        let sol = solve_vertex(&model).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 1.0).abs() < 1e-9);
        assert!(sol.is_vertex);
    }

    #[test]
    fn infeasible_box() {
        // x >= 2 while x <= 1
        let model = LpModel {
            vars: vec![var(0.0, 1.0)],
            rows: vec![Row {
                coeffs: vec![(0, 1.0)],
                sense: Sense::Ge,
                rhs: 2.0,
                tag: RowTag::Cardinality,
            }],
            objective: vec![1.0],
        };
        let sol = solve_vertex(&model).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn two_variable_lp() {
        // max 3x + 2y st x + y <= 4, x <= 2.5, y <= 3 -> x=2.5, y=1.5
        let model = LpModel {
            vars: vec![var(0.0, 2.5), var(0.0, 3.0)],
            rows: vec![Row {
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: Sense::Le,
                rhs: 4.0,
                tag: RowTag::Cardinality,
            }],
            objective: vec![3.0, 2.0],
        };
        let sol = solve_vertex(&model).unwrap();
        assert!((sol.objective - 10.5).abs() < 1e-8);
        assert!((sol.values[0] - 2.5).abs() < 1e-8);
        assert!((sol.values[1] - 1.5).abs() < 1e-8);
        let (_, rank) = model.tight_rank(&sol.values);
        assert_eq!(rank, 2, "vertex certificate");
    }

    #[test]
    fn equality_rows_and_fixed_vars() {
        // y fixed to 1; maximize x subject to x + y = 1.5
        let model = LpModel {
            vars: vec![var(0.0, 1.0), var(1.0, 1.0)],
            rows: vec![Row {
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: Sense::Eq,
                rhs: 1.5,
                tag: RowTag::Cardinality,
            }],
            objective: vec![1.0, 0.0],
        };
        let sol = solve_vertex(&model).unwrap();
        assert!((sol.values[0] - 0.5).abs() < 1e-9);
        assert!((sol.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // classic degenerate corner
        let model = LpModel {
            vars: vec![var(0.0, 10.0), var(0.0, 10.0), var(0.0, 10.0)],
            rows: vec![
                Row {
                    coeffs: vec![(0, 0.5), (1, -5.5), (2, -2.5)],
                    sense: Sense::Le,
                    rhs: 0.0,
                    tag: RowTag::Cardinality,
                },
                Row {
                    coeffs: vec![(0, 0.5), (1, -1.5), (2, -0.5)],
                    sense: Sense::Le,
                    rhs: 0.0,
                    tag: RowTag::Cardinality,
                },
                Row {
                    coeffs: vec![(0, 1.0)],
                    sense: Sense::Le,
                    rhs: 1.0,
                    tag: RowTag::Cardinality,
                },
            ],
            objective: vec![10.0, -57.0, -9.0],
        };
        let sol = solve_vertex(&model).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-6, "objective {}", sol.objective);
    }
}

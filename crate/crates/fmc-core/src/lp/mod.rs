//! Sparse LP models, a simplex solver that returns extreme-point optima, and
//! the relaxation builders used by the randomized and iterated solvers.

mod builders;
mod simplex;

pub use builders::{
    build_iter_lp, build_kcover_lp, build_large_lp, build_medium_lp, build_small_lp,
    color_counts_per_set, opt_hash_grid, ColorTargets, IterLpState,
};
pub use simplex::solve_vertex;

use std::fmt::Write as _;

/// Feasibility tolerance, scaled by row norm when checking rows.
pub const TOL_FEAS: f64 = 1e-9;
/// Objective tolerance.
pub const TOL_OBJ: f64 = 1e-8;

/// What a variable stands for in the instance the model was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// Set (or node) selection indicator.
    Set(usize),
    /// Element coverage indicator.
    Elem(usize),
    /// Per-(element, set) incidence indicator.
    Incidence { elem: usize, set: usize },
    /// Auxiliary per-color load variable.
    ColorLoad(usize),
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub kind: VarKind,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

/// Which constraint group a row realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowTag {
    /// x_e at most the sum of y over sets containing e.
    Coverage(usize),
    /// Sum of set indicators equals k.
    Cardinality,
    /// Covering inequality x_e >= y_s for one incidence.
    Covering { elem: usize, set: usize },
    /// Sum of element indicators equals the coverage-count guess.
    TotalCount,
    /// Per-color covered counts balance (pair i < j).
    ColorBalance(usize, usize),
    /// Per-color incidence load ties sets to the aux variable.
    ColorLoad(usize),
    /// Minimum selection mass over sets holding a color.
    MinColorMass(usize),
    /// Incidence variable equals its set variable.
    IncidenceLink { elem: usize, set: usize },
    /// Per-color incidence count (exact or window side).
    ColorCount(usize),
    ColorWindowLo(usize),
    ColorWindowHi(usize),
}

#[derive(Clone, Debug)]
pub struct Row {
    /// Sparse (variable index, coefficient) pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: RowTag,
}

/// A maximization LP with boxed variables.
#[derive(Clone, Debug)]
pub struct LpModel {
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    /// Objective coefficients, one per variable; the sense is maximize.
    pub objective: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Simplex output is always a basic feasible point.
    pub is_vertex: bool,
    /// Rows (not counting variable bounds) satisfied with equality.
    pub tight_rows: usize,
}

impl LpModel {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, kind: VarKind) -> Option<usize> {
        self.vars.iter().position(|v| v.kind == kind)
    }

    /// Values of all set variables, ordered by set index.
    pub fn set_values(&self, values: &[f64]) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self
            .vars
            .iter()
            .zip(values)
            .filter_map(|(v, &x)| match v.kind {
                VarKind::Set(s) => Some((s, x)),
                _ => None,
            })
            .collect();
        out.sort_unstable_by_key(|&(s, _)| s);
        out
    }

    pub fn row_activity(&self, row: &Row, values: &[f64]) -> f64 {
        row.coeffs.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Check all rows and bounds against `values` within the scaled tolerance.
    pub fn is_feasible(&self, values: &[f64]) -> bool {
        for (v, &x) in self.vars.iter().zip(values) {
            if x < v.lo - TOL_FEAS || x > v.hi + TOL_FEAS {
                return false;
            }
        }
        for row in &self.rows {
            let norm = row.coeffs.iter().map(|&(_, a)| a.abs()).fold(1.0, f64::max);
            let tol = TOL_FEAS * norm * (row.coeffs.len() as f64).max(1.0);
            let act = self.row_activity(row, values);
            let ok = match row.sense {
                Sense::Eq => (act - row.rhs).abs() <= tol,
                Sense::Le => act <= row.rhs + tol,
                Sense::Ge => act >= row.rhs - tol,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Count of rows plus variable bounds that hold with equality at `values`,
    /// and the rank of that tight system. A vertex certificate holds when the
    /// rank equals the number of variables.
    pub fn tight_rank(&self, values: &[f64]) -> (usize, usize) {
        let nv = self.num_vars();
        let mut tight: Vec<Vec<f64>> = Vec::new();
        for row in &self.rows {
            let norm = row.coeffs.iter().map(|&(_, a)| a.abs()).fold(1.0, f64::max);
            if (self.row_activity(row, values) - row.rhs).abs()
                <= TOL_FEAS * norm * (row.coeffs.len() as f64).max(1.0) * 10.0
            {
                let mut dense = vec![0.0; nv];
                for &(j, a) in &row.coeffs {
                    dense[j] += a;
                }
                tight.push(dense);
            }
        }
        for (j, (v, &x)) in self.vars.iter().zip(values).enumerate() {
            if (x - v.lo).abs() <= 1e-7 || (x - v.hi).abs() <= 1e-7 {
                let mut dense = vec![0.0; nv];
                dense[j] = 1.0;
                tight.push(dense);
            }
        }
        let count = tight.len();
        // Gaussian elimination for rank.
        let mut rank = 0;
        let mut col = 0;
        while col < nv && rank < tight.len() {
            let pivot = (rank..tight.len()).max_by(|&a, &b| {
                tight[a][col].abs().partial_cmp(&tight[b][col].abs()).unwrap()
            });
            match pivot {
                Some(p) if tight[p][col].abs() > 1e-9 => {
                    tight.swap(rank, p);
                    let lead = tight[rank][col];
                    for r in rank + 1..tight.len() {
                        let factor = tight[r][col] / lead;
                        if factor != 0.0 {
                            for c in col..nv {
                                tight[r][c] -= factor * tight[rank][c];
                            }
                        }
                    }
                    rank += 1;
                }
                _ => {}
            }
            col += 1;
        }
        (count, rank)
    }

    /// Plain-text dump (objective, rows, bounds) for cross-checking against
    /// an external solver.
    pub fn dump(&self) -> String {
        let name = |k: VarKind| match k {
            VarKind::Set(s) => format!("y{}", s + 1),
            VarKind::Elem(e) => format!("x{}", e + 1),
            VarKind::Incidence { elem, set } => format!("x{}_{}", elem + 1, set + 1),
            VarKind::ColorLoad(c) => format!("h{}", c + 1),
        };
        let mut out = String::new();
        out.push_str("maximize ");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                if !first {
                    out.push_str(" + ");
                }
                let _ = write!(out, "{} {}", c, name(self.vars[j].kind));
                first = false;
            }
        }
        out.push_str("\nsubject to\n");
        for row in &self.rows {
            let mut terms = String::new();
            for (i, &(j, a)) in row.coeffs.iter().enumerate() {
                if i > 0 {
                    terms.push_str(" + ");
                }
                let _ = write!(terms, "{} {}", a, name(self.vars[j].kind));
            }
            let op = match row.sense {
                Sense::Eq => "=",
                Sense::Le => "<=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(out, "  {} {} {}", terms, op, row.rhs);
        }
        out.push_str("bounds\n");
        for v in &self.vars {
            let _ = writeln!(out, "  {} <= {} <= {}", v.lo, name(v.kind), v.hi);
        }
        out
    }
}

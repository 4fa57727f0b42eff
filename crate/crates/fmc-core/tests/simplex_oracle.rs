//! Independent check of the simplex: on random small boxed LPs, enumerate
//! every basic point directly (all ways of making n constraints tight,
//! solved by Gaussian elimination), keep the feasible ones, and compare the
//! best objective against what the solver returns.

use fmc_core::lp::{solve_vertex, LpModel, LpStatus, Row, RowTag, Sense, VarKind, Variable};
use proptest::prelude::*;

const NV: usize = 3;

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= factor * a[col][c];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// All constraint rows of the model in `lhs . x (cmp) rhs` form, with the
/// variable bounds included.
fn full_rows(model: &LpModel) -> Vec<(Vec<f64>, Sense, f64)> {
    let mut rows = Vec::new();
    for row in &model.rows {
        let mut dense = vec![0.0; NV];
        for &(j, c) in &row.coeffs {
            dense[j] += c;
        }
        rows.push((dense, row.sense, row.rhs));
    }
    for (j, v) in model.vars.iter().enumerate() {
        let mut lo = vec![0.0; NV];
        lo[j] = 1.0;
        rows.push((lo.clone(), Sense::Ge, v.lo));
        rows.push((lo, Sense::Le, v.hi));
    }
    rows
}

fn feasible(rows: &[(Vec<f64>, Sense, f64)], x: &[f64]) -> bool {
    rows.iter().all(|(lhs, sense, rhs)| {
        let act: f64 = lhs.iter().zip(x).map(|(a, v)| a * v).sum();
        match sense {
            Sense::Eq => (act - rhs).abs() <= 1e-7,
            Sense::Le => act <= rhs + 1e-7,
            Sense::Ge => act >= rhs - 1e-7,
        }
    })
}

/// Best objective over all basic feasible points, found the slow way.
fn brute_force_optimum(model: &LpModel) -> Option<f64> {
    let rows = full_rows(model);
    let mut best: Option<f64> = None;
    let n = rows.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let a = vec![rows[i].0.clone(), rows[j].0.clone(), rows[k].0.clone()];
                let b = vec![rows[i].2, rows[j].2, rows[k].2];
                if let Some(x) = gauss_solve(a, b) {
                    if x.iter().all(|v| v.is_finite()) && feasible(&rows, &x) {
                        let obj: f64 =
                            model.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                        best = Some(best.map_or(obj, |b: f64| b.max(obj)));
                    }
                }
            }
        }
    }
    best
}

fn arb_model() -> impl Strategy<Value = LpModel> {
    (
        proptest::collection::vec(-3i32..=3, NV),
        proptest::collection::vec(
            (proptest::collection::vec(-2i32..=2, NV), 0usize..3, -2i32..=4),
            1..4,
        ),
    )
        .prop_map(|(obj, raw_rows)| {
            let vars = (0..NV)
                .map(|j| Variable {
                    kind: VarKind::Elem(j),
                    lo: 0.0,
                    hi: 2.0,
                })
                .collect();
            let rows = raw_rows
                .into_iter()
                .filter(|(coeffs, _, _)| coeffs.iter().any(|&c| c != 0))
                .map(|(coeffs, sense, rhs)| Row {
                    coeffs: coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(j, &c)| (j, c as f64))
                        .collect(),
                    sense: match sense {
                        0 => Sense::Le,
                        1 => Sense::Ge,
                        _ => Sense::Eq,
                    },
                    rhs: rhs as f64,
                    tag: RowTag::Cardinality,
                })
                .collect();
            LpModel {
                vars,
                rows,
                objective: obj.iter().map(|&c| c as f64).collect(),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]
    #[test]
    fn simplex_matches_vertex_enumeration(model in arb_model()) {
        let brute = brute_force_optimum(&model);
        let sol = solve_vertex(&model).unwrap();
        match (brute, sol.status) {
            (Some(best), LpStatus::Optimal) => {
                prop_assert!(
                    (sol.objective - best).abs() <= 1e-6 * (1.0 + best.abs()),
                    "simplex {} vs enumerated {}",
                    sol.objective,
                    best
                );
                prop_assert!(sol.is_vertex);
                let (_, rank) = model.tight_rank(&sol.values);
                prop_assert_eq!(rank, NV);
            }
            (None, LpStatus::Infeasible) => {}
            (brute, status) => {
                return Err(TestCaseError::fail(format!(
                    "solver said {status:?} while enumeration found {brute:?}"
                )));
            }
        }
    }
}

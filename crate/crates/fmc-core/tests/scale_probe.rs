//! Desk-scale ceiling check: the strengthened relaxation at n = 60, m = 24
//! must solve to a vertex quickly and round cleanly.

use fmc_core::generate::{generate, Family, RandomParams};
use fmc_core::lp::{build_large_lp, opt_hash_grid, solve_vertex, LpStatus};
use fmc_core::randomized::{alg_large, Algorithm, RandomizedConfig};
use std::time::Instant;

#[test]
fn desk_ceiling_solves_fast() {
    let params = RandomParams {
        n: 60,
        m: 24,
        k: 8,
        chi: 4,
        density: 0.18,
        weighted: true,
    };
    let inst = generate(&Family::Random(params), 99).unwrap();
    let started = Instant::now();
    let mut solved = 0;
    for guess in opt_hash_grid(&inst).into_iter().take(6) {
        let model = build_large_lp(&inst, guess).unwrap();
        let sol = solve_vertex(&model).unwrap();
        if sol.status == LpStatus::Optimal {
            solved += 1;
            let (_, rank) = model.tight_rank(&sol.values);
            assert_eq!(rank, model.num_vars());
        }
    }
    let lp_elapsed = started.elapsed();
    let started = Instant::now();
    let mut cfg = RandomizedConfig::new(Algorithm::Large, 3);
    cfg.trials = Some(50);
    let out = alg_large(&inst, &cfg);
    let full_elapsed = started.elapsed();
    println!(
        "six relaxations in {:.0} ms ({solved} feasible); full run in {:.0} ms -> {:?}",
        lp_elapsed.as_secs_f64() * 1e3,
        full_elapsed.as_secs_f64() * 1e3,
        out.as_ref().map(|o| (o.opt_hash, o.best.weight)).map_err(|e| e.to_string())
    );
    assert!(lp_elapsed.as_secs() < 30);
    assert!(full_elapsed.as_secs() < 120);
}

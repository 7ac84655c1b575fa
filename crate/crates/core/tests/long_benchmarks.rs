//! Large runs that do not fit a desktop test budget. Run them with
//! `cargo test --release --test long_benchmarks -- --ignored --nocapture`.

use std::time::Instant;

use tteig::problems::{heisenberg, henon_heiles, Boundary, Spin, HENON_HEILES_TOL};
use tteig::solver::{random_block, subspace_iterate};
use tteig::{FilterPolicy, RoundingStrategy, SolverConfig};

/// Ground-state energy of the periodic spin-1 chain with 100 sites from a
/// DMRG reference calculation.
const DMRG_ENERGY: f64 = -140.14840390392;

#[test]
#[ignore = "hours of runtime"]
fn spin_one_chain_matches_dmrg() {
    // H = Σ S·S needs J = −1 with the −J sign convention used here
    let a = heisenberg(100, Spin::One, -1.0, 0.0, Boundary::Periodic, 1e-12).unwrap();
    let mut cfg = SolverConfig::new(1, RoundingStrategy::randomized(64, 0)).with_filter(FilterPolicy::new(8));
    cfg.guard = 3;
    cfg.tol = 1e-8;
    cfg.max_iterations = 2000;
    let start = Instant::now();
    let out = subspace_iterate(&a, random_block(&a.col_sizes(), &cfg).unwrap(), &cfg).unwrap();
    let e = out.state.ritz_values[0].re;
    println!("E = {e:.11} (reference {DMRG_ENERGY}), {} iterations, {:.0}s", out.state.iteration, start.elapsed().as_secs_f64());
    assert!((e - DMRG_ENERGY).abs() < 1e-6);
}

#[test]
#[ignore = "tens of minutes of runtime"]
fn randomized_rounding_speeds_up_henon_heiles() {
    // expected: randomized rounding more than 2.5 times faster than SVD rounding
    let a = henon_heiles(5, 28, 0.111803, HENON_HEILES_TOL).unwrap();
    let mut seconds = Vec::new();
    for strategy in [RoundingStrategy::svd(Some(20), 0.0), RoundingStrategy::randomized(20, 0)] {
        let mut cfg = SolverConfig::new(8, strategy).with_filter(FilterPolicy::new(8));
        cfg.guard = 4;
        cfg.tol = 1e-6;
        cfg.max_iterations = 500;
        let start = Instant::now();
        let out = subspace_iterate(&a, random_block(&a.col_sizes(), &cfg).unwrap(), &cfg).unwrap();
        let t = start.elapsed().as_secs_f64();
        println!("{:?}: {} iterations, {t:.0}s, converged {}", cfg.strategy.kind, out.state.iteration, out.converged);
        seconds.push(t);
    }
    println!("speed-up {:.2}", seconds[0] / seconds[1]);
    assert!(seconds[0] / seconds[1] > 2.5);
}

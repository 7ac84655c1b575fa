mod common;

use std::time::Instant;

#[test]
fn core_operations_match_dense_oracle() {
    let start = Instant::now();
    let r = common::oracle_suite(50, 2024);
    assert!(r.worst_relative < 1e-12, "{} off by {:e}", r.worst_op, r.worst_relative);
    assert!(r.worst_round_gap < 1e-10, "rounding error report off by {:e}", r.worst_round_gap);
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn other_seeds_agree_too() {
    for seed in 1..4 {
        let r = common::oracle_suite(50, seed);
        assert!(r.worst_relative < 1e-12, "seed {seed}: {} off by {:e}", r.worst_op, r.worst_relative);
        assert!(r.worst_round_gap < 1e-10);
    }
}

//! Shared fixtures for the benchmark targets.

use robin_core::simulation::gen_scenario1;
use robin_core::{Dataset, Scenario1Config};

/// A standard-size training set (n = 400, d = 2) from the contaminated
/// logistic design.
pub fn training_data(seed: u64) -> Dataset {
    let config = Scenario1Config::new(400, 1.0, 0.05, 1).expect("valid config");
    gen_scenario1(&config, seed).train
}

/// An evenly spaced grid over [lo, hi].
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + i as f64 * step).collect()
}

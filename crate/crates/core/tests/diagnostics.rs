//! Robustness-diagnostic contracts: contamination-effect values, the
//! boundedness classifications behind the four figures, tail-limit probes,
//! and Fisher-consistency checks.

mod common;

use common::assert_close;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robin_core::diagnostics::{
    boundedness_scan, contamination_effect, expected_conditional_score, fisher_consistency_check,
    tail_limit_probe,
};
use robin_core::losses::psi;
use robin_core::{
    FeatureSampler, Link, LossSpec, ParameterVector, TailClassification, TailLimit, TailSide,
    TruthConditional, TruthModel,
};

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + i as f64 * step).collect()
}

fn probe_grid() -> Vec<f64> {
    grid(5.0, 200.0, 79)
}

#[test]
fn contamination_effect_reference_values() {
    // zero displacement
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let link = Link::ALL[rng.random_range(0..4)];
        let z = rng.random_range(-10.0..10.0);
        let b = contamination_effect(LossSpec::Ml, link, 1, z, z).unwrap();
        assert_eq!(b, 0.0);
    }

    // ml/probit diverges: psi(1, -5)*(0-(-5)) = -g(5)/Phi(-5)*5
    let b = contamination_effect(LossSpec::Ml, Link::Probit, 1, -5.0, 0.0).unwrap();
    assert_close(b, -25.932519835629211, 1e-3, 0.0, "ml probit contamination");

    // gamma(-2) stays tame at the same point: 2(G-1)g*5
    let b = contamination_effect(LossSpec::Gamma(-2.0), Link::Probit, 1, -5.0, 0.0).unwrap();
    assert_close(b, -1.4867190885638119e-5, 1e-3, 0.0, "brier probit contamination");
}

#[test]
fn contamination_effect_is_linear_in_z_prime() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let link = Link::ALL[rng.random_range(0..4)];
        let spec = [LossSpec::Ml, LossSpec::Beta(0.5), LossSpec::Gamma(-2.0)]
            [rng.random_range(0..3)];
        let y = rng.random_range(0..2u8);
        let z = rng.random_range(-5.0..5.0);
        let z1 = rng.random_range(-5.0..5.0);
        let z2 = rng.random_range(-5.0..5.0);
        let b1 = contamination_effect(spec, link, y, z, z1).unwrap();
        let b2 = contamination_effect(spec, link, y, z, z2).unwrap();
        let direct = psi(spec, link, y, z).unwrap() * (z1 - z2);
        assert_close(b1 - b2, direct, 1e-12, 1e-12, "linearity in z'");
    }
}

#[test]
fn brier_and_beta_one_effects_are_equal() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..300 {
        let link = Link::ALL[rng.random_range(0..4)];
        let y = rng.random_range(0..2u8);
        let z = rng.random_range(-20.0..20.0);
        let zp = rng.random_range(-3.0..3.0);
        let a = contamination_effect(LossSpec::Gamma(-2.0), link, y, z, zp).unwrap();
        let b = contamination_effect(LossSpec::Beta(1.0), link, y, z, zp).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn figure_style_scans_classify_correctly() {
    let wide = grid(-30.0, 30.0, 1201);
    // ml/probit diverges (figure 1 behavior)
    let report = boundedness_scan(LossSpec::Ml, Link::Probit, 1, 0.0, &wide).unwrap();
    assert_eq!(report.tail_classification, TailClassification::Diverging);

    // ml/cauchit is bounded thanks to the heavy tail (figure 2 behavior)
    let cauchy_grid = grid(-100.0, 100.0, 1201);
    let report = boundedness_scan(LossSpec::Ml, Link::Cauchit, 1, 0.0, &cauchy_grid).unwrap();
    assert_eq!(report.tail_classification, TailClassification::Bounded);

    // beta(1)/probit is bounded (figure 3 behavior)
    let report = boundedness_scan(LossSpec::Beta(1.0), Link::Probit, 1, 0.0, &wide).unwrap();
    assert_eq!(report.tail_classification, TailClassification::Bounded);
}

/// Probit scans with z' = 0 across the tuning grid: bounded exactly for
/// beta > 0 and for gamma outside [-1, 0].
#[test]
fn boundedness_suite_over_the_tuning_grid() {
    let wide = grid(-30.0, 30.0, 1201);
    for y in [0u8, 1] {
        for b in [0.25, 0.5, 1.0] {
            let report = boundedness_scan(LossSpec::Beta(b), Link::Probit, y, 0.0, &wide).unwrap();
            assert_eq!(
                report.tail_classification,
                TailClassification::Bounded,
                "beta({b}) y={y}"
            );
        }
        for g in [0.25, 0.5, 1.0, -1.5, -2.0, -3.0] {
            let report = boundedness_scan(LossSpec::Gamma(g), Link::Probit, y, 0.0, &wide).unwrap();
            assert_eq!(
                report.tail_classification,
                TailClassification::Bounded,
                "gamma({g}) y={y}"
            );
        }
        for spec in [LossSpec::Ml, LossSpec::Gamma(-1.0), LossSpec::Gamma(-0.5)] {
            let report = boundedness_scan(spec, Link::Probit, y, 0.0, &wide).unwrap();
            assert_eq!(
                report.tail_classification,
                TailClassification::Diverging,
                "{spec:?} y={y}"
            );
        }
    }
}

#[test]
fn scan_report_carries_grid_and_extrema() {
    let g = grid(-30.0, 30.0, 601);
    let report = boundedness_scan(LossSpec::Ml, Link::Probit, 1, 0.0, &g).unwrap();
    assert_eq!(report.grid.len(), 601);
    assert_eq!(report.values.len(), 601);
    // the worst contamination effect for y=1 sits at the left edge
    assert_eq!(report.argmax_z, -30.0);
    assert!(report.max_abs > 800.0);
}

#[test]
fn tail_probe_classifications() {
    let g = probe_grid();
    for link in [Link::Logit, Link::Probit, Link::Cloglog] {
        for side in [TailSide::Upper, TailSide::Lower] {
            for c in [0.25, 0.5, 0.75, 0.9] {
                assert_eq!(
                    tail_limit_probe(link, c, side, &g).unwrap(),
                    TailLimit::ToZero,
                    "{link} {side:?} c={c}"
                );
            }
            assert_eq!(
                tail_limit_probe(link, 1.0, side, &g).unwrap(),
                TailLimit::ToInfinity,
                "{link} {side:?} c=1"
            );
        }
    }
}

#[test]
fn fisher_consistency_under_correct_specification() {
    // logistic truth on a uniform cube
    let theta = ParameterVector::new(vec![0.0, 1.0, -1.0]).unwrap();
    let truth = TruthModel {
        conditional: TruthConditional::Model {
            link: Link::Logit,
            theta: theta.clone(),
        },
        feature_sampler: FeatureSampler::UniformCube { low: -3.0, high: 3.0, dim: 2 },
    };
    let norm = fisher_consistency_check(LossSpec::Ml, Link::Logit, &theta, &truth, 1000, 5).unwrap();
    assert!(norm < 1e-10, "ml norm {norm}");

    // probit truth with standard normal features
    let theta = ParameterVector::new(vec![0.5, -0.2]).unwrap();
    let truth = TruthModel {
        conditional: TruthConditional::Model {
            link: Link::Probit,
            theta: theta.clone(),
        },
        feature_sampler: FeatureSampler::StandardNormal { dim: 1 },
    };
    let norm =
        fisher_consistency_check(LossSpec::Beta(1.0), Link::Probit, &theta, &truth, 1000, 6)
            .unwrap();
    assert!(norm < 1e-10, "beta(1) norm {norm}");
}

#[test]
fn misspecified_truth_breaks_the_estimating_equation() {
    let theta = ParameterVector::new(vec![0.0, 0.0]).unwrap();
    let truth = TruthModel {
        conditional: TruthConditional::Constant(0.7),
        feature_sampler: FeatureSampler::StandardNormal { dim: 1 },
    };
    let norm = fisher_consistency_check(LossSpec::Ml, Link::Logit, &theta, &truth, 1000, 7).unwrap();
    assert!(norm > 0.01, "misspecified norm {norm}");
}

#[test]
fn expected_score_matches_independent_two_term_sum() {
    // gamma(1) under a constant-0.7 truth at the origin, x = (1)
    let theta = ParameterVector::new(vec![0.0, 0.0]).unwrap();
    let truth = TruthModel {
        conditional: TruthConditional::Constant(0.7),
        feature_sampler: FeatureSampler::StandardNormal { dim: 1 },
    };
    let x = [1.0];
    let b = expected_conditional_score(LossSpec::Gamma(1.0), Link::Logit, &theta, &truth, &x)
        .unwrap();
    // independent route: finite differences of the loss in z give psi
    let h = 1e-6;
    let psi_fd = |y: u8| {
        let up = robin_core::losses::loss(LossSpec::Gamma(1.0), Link::Logit, y, h).unwrap();
        let down = robin_core::losses::loss(LossSpec::Gamma(1.0), Link::Logit, y, -h).unwrap();
        (up - down) / (2.0 * h)
    };
    let expected0 = 0.7 * psi_fd(1) + 0.3 * psi_fd(0);
    assert_close(b[0], expected0, 1e-5, 1e-9, "two-term sum, intercept");
    assert_close(b[1], expected0, 1e-5, 1e-9, "two-term sum, slope (x=1)");
}

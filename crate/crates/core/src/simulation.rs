//! Seeded data generators for the three experiment designs and the Monte
//! Carlo runner.
//!
//! - Scenario 1: uniform features on [−3, 3]², logistic labels at
//!   θ* = (0, a, −a), and a binomial share of rows whose labels are redrawn
//!   from the sign-flipped model. Test data are always clean.
//! - Case A: a two-Gaussian mixture; class 1 ~ N(μ₁, I₂) with rate r,
//!   class 0 ~ N(μ₀, s·I₂), μ₀ = (0, 0) and μ₁ = (D, D).
//! - Case B: the same class mechanism with independent Student-t
//!   coordinates of ν₁ / ν₀ degrees of freedom.
//!
//! Replicates derive their seed as `base_seed ⊕ k`, so runs are reproducible
//! and replicates are independent of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal, StudentT, Uniform};

use crate::error::{Error, Result};
use crate::estimation::{self, FitOptions};
use crate::links::Link;
use crate::losses::LossSpec;
use crate::model::{Dataset, ParameterVector};

/// Scenario 1: correctly specified logistic model with label contamination.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario1Config {
    n: usize,
    a: f64,
    p_out: f64,
    test_n: usize,
}

impl Scenario1Config {
    pub fn new(n: usize, a: f64, p_out: f64, test_n: usize) -> Result<Self> {
        if n == 0 || test_n == 0 {
            return Err(Error::InvalidParameter("sample sizes must be >= 1".into()));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!("signal strength a must be > 0, got {a}")));
        }
        if !(0.0..1.0).contains(&p_out) {
            return Err(Error::InvalidParameter(format!(
                "outlier rate p_out must lie in [0, 1), got {p_out}"
            )));
        }
        Ok(Scenario1Config { n, a, p_out, test_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p_out(&self) -> f64 {
        self.p_out
    }

    pub fn test_n(&self) -> usize {
        self.test_n
    }

    /// True parameter θ* = (0, a, −a).
    pub fn theta_star(&self) -> ParameterVector {
        ParameterVector::new(vec![0.0, self.a, -self.a]).expect("finite")
    }
}

/// Case A: binormal feature mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseAConfig {
    n: usize,
    r: f64,
    mean_distance: f64,
    class0_scale: f64,
    test_n: usize,
}

impl CaseAConfig {
    pub fn new(n: usize, r: f64, mean_distance: f64, class0_scale: f64, test_n: usize) -> Result<Self> {
        if n == 0 || test_n == 0 {
            return Err(Error::InvalidParameter("sample sizes must be >= 1".into()));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "class-1 rate r must lie in (0, 1), got {r}"
            )));
        }
        if !(mean_distance.is_finite() && mean_distance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean distance D must be > 0, got {mean_distance}"
            )));
        }
        if !(class0_scale.is_finite() && class0_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "covariance scale s must be > 0, got {class0_scale}"
            )));
        }
        Ok(CaseAConfig { n, r, mean_distance, class0_scale, test_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn mean_distance(&self) -> f64 {
        self.mean_distance
    }

    pub fn class0_scale(&self) -> f64 {
        self.class0_scale
    }

    pub fn test_n(&self) -> usize {
        self.test_n
    }

    /// Class means: μ₀ at the origin, μ₁ offset by D in each coordinate.
    pub fn means(&self) -> ([f64; 2], [f64; 2]) {
        ([0.0, 0.0], [self.mean_distance, self.mean_distance])
    }
}

/// Case B: Student-t feature mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseBConfig {
    n: usize,
    r: f64,
    mean_distance: f64,
    df1: f64,
    df0: f64,
    test_n: usize,
}

impl CaseBConfig {
    pub fn new(
        n: usize,
        r: f64,
        mean_distance: f64,
        df1: f64,
        df0: f64,
        test_n: usize,
    ) -> Result<Self> {
        if n == 0 || test_n == 0 {
            return Err(Error::InvalidParameter("sample sizes must be >= 1".into()));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "class-1 rate r must lie in (0, 1), got {r}"
            )));
        }
        if !(mean_distance.is_finite() && mean_distance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean distance D must be > 0, got {mean_distance}"
            )));
        }
        if !(df1.is_finite() && df1 > 0.0) || !(df0.is_finite() && df0 > 0.0) {
            return Err(Error::InvalidParameter(
                "degrees of freedom must be > 0".into(),
            ));
        }
        Ok(CaseBConfig { n, r, mean_distance, df1, df0, test_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn mean_distance(&self) -> f64 {
        self.mean_distance
    }

    pub fn df1(&self) -> f64 {
        self.df1
    }

    pub fn df0(&self) -> f64 {
        self.df0
    }

    pub fn test_n(&self) -> usize {
        self.test_n
    }

    pub fn means(&self) -> ([f64; 2], [f64; 2]) {
        ([0.0, 0.0], [self.mean_distance, self.mean_distance])
    }
}

/// Output of the Scenario 1 generator, including how many training labels
/// were redrawn from the flipped model.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario1Data {
    pub train: Dataset,
    pub test: Dataset,
    pub n_replaced: usize,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Draws a Scenario 1 training set (with contamination) and a clean test set.
pub fn gen_scenario1(config: &Scenario1Config, seed: u64) -> Scenario1Data {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = Uniform::new(-3.0, 3.0).expect("valid bounds");
    let a = config.a;

    let draw = |rng: &mut ChaCha8Rng, n: usize, contaminate: bool| -> (Dataset, usize) {
        let mut features = Vec::with_capacity(2 * n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let x1 = uniform.sample(rng);
            let x2 = uniform.sample(rng);
            let p = sigmoid(a * (x1 - x2));
            labels.push(u8::from(rng.random::<f64>() < p));
            features.push(x1);
            features.push(x2);
        }
        let mut n_replaced = 0;
        if contaminate && config.p_out > 0.0 {
            let bin = Binomial::new(n as u64, config.p_out).expect("valid binomial");
            n_replaced = bin.sample(rng) as usize;
            let mut rows = rand::seq::index::sample(rng, n, n_replaced).into_vec();
            rows.sort_unstable();
            for i in rows {
                let z = a * (features[2 * i] - features[2 * i + 1]);
                let p_flip = sigmoid(-z);
                labels[i] = u8::from(rng.random::<f64>() < p_flip);
            }
        }
        (Dataset::from_parts(2, features, labels).expect("generated data is valid"), n_replaced)
    };

    let (train, n_replaced) = draw(&mut rng, config.n, true);
    let (test, _) = draw(&mut rng, config.test_n, false);
    Scenario1Data { train, test, n_replaced }
}

fn gen_two_class<R: Rng, F1: FnMut(&mut R) -> f64, F0: FnMut(&mut R) -> f64>(
    rng: &mut R,
    n: usize,
    r: f64,
    mu1: [f64; 2],
    mu0: [f64; 2],
    mut noise1: F1,
    mut noise0: F0,
) -> Dataset {
    let bin = Binomial::new(n as u64, r).expect("valid binomial");
    let n1 = bin.sample(rng) as usize;
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n1 {
        features.push(mu1[0] + noise1(rng));
        features.push(mu1[1] + noise1(rng));
        labels.push(1);
    }
    for _ in 0..(n - n1) {
        features.push(mu0[0] + noise0(rng));
        features.push(mu0[1] + noise0(rng));
        labels.push(0);
    }
    Dataset::from_parts(2, features, labels).expect("generated data is valid")
}

/// Draws Case A training and test sets.
pub fn gen_case_a(config: &CaseAConfig, seed: u64) -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let sd0 = config.class0_scale.sqrt();
    let (mu0, mu1) = config.means();
    let make = |rng: &mut ChaCha8Rng, n: usize| {
        gen_two_class(
            rng,
            n,
            config.r,
            mu1,
            mu0,
            |r| normal.sample(r),
            |r| sd0 * normal.sample(r),
        )
    };
    let train = make(&mut rng, config.n);
    let test = make(&mut rng, config.test_n);
    (train, test)
}

/// Draws Case B training and test sets (independent t coordinates).
pub fn gen_case_b(config: &CaseBConfig, seed: u64) -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t1 = StudentT::new(config.df1).expect("valid dof");
    let t0 = StudentT::new(config.df0).expect("valid dof");
    let (mu0, mu1) = config.means();
    let make = |rng: &mut ChaCha8Rng, n: usize| {
        gen_two_class(
            rng,
            n,
            config.r,
            mu1,
            mu0,
            |r| t1.sample(r),
            |r| t0.sample(r),
        )
    };
    let train = make(&mut rng, config.n);
    let test = make(&mut rng, config.test_n);
    (train, test)
}

/// Correct-classification rate of the fitted model on a test set, in percent.
pub fn accuracy(link: Link, theta: &ParameterVector, test: &Dataset) -> Result<f64> {
    let mut correct = 0usize;
    for (x, y) in test.rows() {
        if estimation::classify(link, theta, x, 0.5)? == y {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / test.n() as f64)
}

/// One experiment design with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioConfig {
    Scenario1(Scenario1Config),
    CaseA(CaseAConfig),
    CaseB(CaseBConfig),
}

impl ScenarioConfig {
    /// Draws (train, test) for one replicate.
    pub fn generate(&self, seed: u64) -> (Dataset, Dataset) {
        match self {
            ScenarioConfig::Scenario1(c) => {
                let data = gen_scenario1(c, seed);
                (data.train, data.test)
            }
            ScenarioConfig::CaseA(c) => gen_case_a(c, seed),
            ScenarioConfig::CaseB(c) => gen_case_b(c, seed),
        }
    }

    /// Human-readable setting description used in report rows.
    pub fn describe(&self) -> String {
        match self {
            ScenarioConfig::Scenario1(c) => {
                format!("scenario1 n={} a={} pout={}", c.n, c.a, c.p_out)
            }
            ScenarioConfig::CaseA(c) => format!(
                "caseA n={} r={} D={} s={}",
                c.n, c.r, c.mean_distance, c.class0_scale
            ),
            ScenarioConfig::CaseB(c) => format!(
                "caseB n={} r={} D={} nu1={} nu0={}",
                c.n, c.r, c.mean_distance, c.df1, c.df0
            ),
        }
    }
}

/// One (setting, method) summary line.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub setting: String,
    pub method: String,
    /// Mean test accuracy over non-failed replicates; `None` is the dash
    /// marker emitted when failures reach the threshold.
    pub mean_accuracy: Option<f64>,
    pub n_failures: usize,
    pub n_replicates: usize,
}

/// Monte Carlo summary across methods.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub rows: Vec<ReportRow>,
}

/// The default failure threshold: a tenth of the replicates, rounded up.
pub fn default_failure_threshold(replicates: usize) -> usize {
    replicates.div_ceil(10)
}

/// Runs the Monte Carlo experiment: for each replicate the training and
/// test sets are drawn once and every method is fitted on the same data.
///
/// A replicate counts as a failure for a method iff the fit status is
/// `max_iterations`, `stalled_at_initial`, or `numerical_failure`. Mean
/// accuracy is taken over the non-failed replicates and replaced by the
/// dash marker when failures reach `failure_threshold`.
pub fn run_monte_carlo(
    config: &ScenarioConfig,
    link: Link,
    methods: &[LossSpec],
    replicates: usize,
    failure_threshold: usize,
    base_seed: u64,
) -> Result<MonteCarloReport> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidParameter("methods list must be nonempty".into()));
    }
    if failure_threshold == 0 {
        return Err(Error::InvalidParameter("failure threshold must be >= 1".into()));
    }
    for spec in methods {
        spec.validate()?;
    }

    let options = FitOptions::default();
    let mut sums = vec![0.0f64; methods.len()];
    let mut failures = vec![0usize; methods.len()];

    for k in 0..replicates {
        let seed = base_seed ^ k as u64;
        let (train, test) = config.generate(seed);

        // The maximum-likelihood fit doubles as the extra initializer for
        // every divergence method; computing it once per replicate gives
        // results identical to the per-method default multi-start.
        let needs_ml = methods.iter().any(|m| *m != LossSpec::Ml);
        let ml_result = if needs_ml || methods.contains(&LossSpec::Ml) {
            Some(estimation::fit(LossSpec::Ml, link, &train, &options)?)
        } else {
            None
        };

        for (m, spec) in methods.iter().enumerate() {
            let result = if *spec == LossSpec::Ml {
                ml_result.clone().expect("ml fit computed")
            } else {
                let ml_theta = ml_result.as_ref().expect("ml fit computed").theta_hat.clone();
                let opts = FitOptions {
                    initializers: Some(vec![
                        ParameterVector::zeros(train.feature_dim()),
                        ml_theta,
                    ]),
                    ..options.clone()
                };
                estimation::fit(*spec, link, &train, &opts)?
            };
            if result.status.is_failure() {
                failures[m] += 1;
            } else {
                sums[m] += accuracy(link, &result.theta_hat, &test)?;
            }
        }
    }

    let setting = config.describe();
    let rows = methods
        .iter()
        .enumerate()
        .map(|(m, spec)| {
            let successes = replicates - failures[m];
            let mean = if failures[m] >= failure_threshold {
                None
            } else if successes == 0 {
                Some(f64::NAN)
            } else {
                Some(sums[m] / successes as f64)
            };
            ReportRow {
                setting: setting.clone(),
                method: spec.to_string(),
                mean_accuracy: mean,
                n_failures: failures[m],
                n_replicates: replicates,
            }
        })
        .collect();

    Ok(MonteCarloReport { rows })
}

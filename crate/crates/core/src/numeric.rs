//! Small numerical kernels shared across modules.

/// ln(1 + e^x), accurate over the whole real line.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// ln(1 − e^a) for a ≤ 0.
pub(crate) fn log1mexp(a: f64) -> f64 {
    debug_assert!(a <= 0.0);
    if a > -std::f64::consts::LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}

/// ln(e^a + e^b) without overflow.
pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Upper-tail Mills ratio of the standard normal, Φ(−x)/φ(x), for x ≥ 8.
///
/// Continued fraction 1/(x + 1/(x + 2/(x + 3/(...)))) evaluated backwards;
/// 40 levels give full double precision in this range.
pub(crate) fn normal_mills_ratio(x: f64) -> f64 {
    debug_assert!(x >= 8.0);
    let mut t = 0.0;
    for k in (1..=40u32).rev() {
        t = f64::from(k) / (x + t);
    }
    1.0 / (x + t)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

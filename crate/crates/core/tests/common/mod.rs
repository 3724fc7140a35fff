//! Shared oracles for the integration suites: quadrature, finite
//! differences, and tolerance helpers. Everything here is independent of
//! the library code paths it is used to check.

#![allow(dead_code)]

/// Composite Simpson quadrature with `panels` (even) subdivisions.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 2 && panels % 2 == 0);
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Central finite difference of a scalar function.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central-difference gradient in each coordinate.
pub fn central_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut buf = x.to_vec();
    for j in 0..x.len() {
        buf[j] = x[j] + h;
        let up = f(&buf);
        buf[j] = x[j] - h;
        let down = f(&buf);
        buf[j] = x[j];
        grad.push((up - down) / (2.0 * h));
    }
    grad
}

/// Asserts |actual − expected| ≤ rel·|expected| + abs.
#[track_caller]
pub fn assert_close(actual: f64, expected: f64, rel: f64, abs: f64, what: &str) {
    let tol = rel * expected.abs() + abs;
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tol {tol})"
    );
}

/// Relative gap with an absolute floor, suitable for derivative checks.
pub fn rel_gap(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

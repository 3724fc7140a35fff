//! Link-function contracts: reference values, tail accuracy, and the
//! analytic invariants every link must satisfy.

mod common;

use common::{assert_close, central_diff, simpson};
use robin_core::Link;

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Quadrature oracle for Φ(z) at z ≤ −5: integrates the normal density
/// from far in the tail, independently of the erfc/Mills implementation.
fn normal_cdf_oracle(z: f64) -> f64 {
    simpson(normal_pdf, z - 40.0, z, 80_000)
}

#[test]
fn cdf_reference_values() {
    assert_eq!(Link::Logit.cdf(0.0).unwrap(), 0.5);
    assert_eq!(Link::Probit.cdf(0.0).unwrap(), 0.5);
    assert_eq!(Link::Cauchit.cdf(0.0).unwrap(), 0.5);

    // high-precision value 2.8665157187919391e-7, cross-checked by quadrature
    let oracle = normal_cdf_oracle(-5.0);
    assert_close(oracle, 2.8665157187919391e-7, 1e-9, 0.0, "quadrature oracle sanity");
    assert_close(Link::Probit.cdf(-5.0).unwrap(), oracle, 1e-6, 0.0, "probit cdf(-5)");
}

#[test]
fn sf_reference_values() {
    assert_eq!(Link::Logit.sf(0.0).unwrap(), 0.5);
    assert_eq!(Link::Cauchit.sf(0.0).unwrap(), 0.5);
    // sf(5) = cdf(-5) by symmetry
    assert_close(
        Link::Probit.sf(5.0).unwrap(),
        2.8665157187919391e-7,
        1e-6,
        0.0,
        "probit sf(5)",
    );
}

#[test]
fn log_cdf_and_log_sf_reference_values() {
    assert_close(
        Link::Logit.log_cdf(0.0).unwrap(),
        -std::f64::consts::LN_2,
        0.0,
        1e-15,
        "logit log_cdf(0)",
    );
    // ln(1/(1+e^35)) = -35 - e^-35 + ...; indistinguishable from -35 at 1e-10
    assert_close(Link::Logit.log_sf(35.0).unwrap(), -35.0, 0.0, 1e-10, "logit log_sf(35)");

    let oracle = normal_cdf_oracle(-10.0).ln();
    assert_close(oracle, -53.231285150512471, 0.0, 1e-6, "log Phi(-10) oracle sanity");
    assert_close(Link::Probit.log_cdf(-10.0).unwrap(), oracle, 0.0, 0.01, "probit log_cdf(-10)");
}

#[test]
fn log_domain_accuracy_across_moderate_range() {
    // |log G - ln(cdf)| <= 1e-10 wherever the direct route is representable
    for link in Link::ALL {
        let mut z = -30.0;
        while z <= 30.0 {
            let direct = Link::cdf(link, z).unwrap().ln();
            let log_cdf = link.log_cdf(z).unwrap();
            if direct.is_finite() {
                assert_close(log_cdf, direct, 1e-12, 1e-10, &format!("{link} log_cdf({z})"));
            }
            let direct_sf = Link::sf(link, z).unwrap().ln();
            let log_sf = link.log_sf(z).unwrap();
            if direct_sf.is_finite() {
                assert_close(log_sf, direct_sf, 1e-12, 1e-10, &format!("{link} log_sf({z})"));
            }
            z += 0.5;
        }
    }
}

#[test]
fn deep_tail_log_values_stay_finite_and_accurate() {
    // logit: log G(z) = z - ln(1+e^z); at z = -700 this is z to 1e-10
    let v = Link::Logit.log_cdf(-700.0).unwrap();
    assert_close(v, -700.0, 0.0, 1e-10, "logit log_cdf(-700)");
    // probit at z = -37: naive 0.5*erfc still representable; compare shapes
    let lp = Link::Probit.log_cdf(-37.0).unwrap();
    // ln Phi(-37) = -37^2/2 - ln(37 sqrt(2 pi)) + ln(1 - 1/37^2 + ...)
    let asy = -0.5 * 37.0f64 * 37.0 - (37.0 * (2.0 * std::f64::consts::PI).sqrt()).ln()
        + (1.0 - 1.0 / (37.0f64 * 37.0) + 3.0 / 37.0f64.powi(4)).ln();
    assert_close(lp, asy, 0.0, 1e-6, "probit log_cdf(-37)");
}

#[test]
fn pdf_reference_values() {
    assert_eq!(Link::Logit.pdf(0.0).unwrap(), 0.25);
    assert_close(
        Link::Probit.pdf(0.0).unwrap(),
        0.3989422804014327,
        1e-15,
        0.0,
        "probit pdf(0)",
    );
    assert_close(
        Link::Cauchit.pdf(0.0).unwrap(),
        0.3183098861837907,
        1e-15,
        0.0,
        "cauchit pdf(0)",
    );
    // cloglog's density is the asymmetric Gumbel-type law e^{z - e^z}
    assert_close(Link::Cloglog.pdf(0.0).unwrap(), (-1.0f64).exp(), 1e-15, 0.0, "cloglog pdf(0)");
}

#[test]
fn hazard_reference_values() {
    assert_eq!(Link::Logit.hazard_lower(0.0).unwrap(), 0.5);

    // g(-5)/Phi(-5) against the quadrature oracle
    let oracle = normal_pdf(-5.0) / normal_cdf_oracle(-5.0);
    assert_close(oracle, 5.1865039671258421, 1e-8, 0.0, "mills oracle sanity");
    assert_close(
        Link::Probit.hazard_lower(-5.0).unwrap(),
        oracle,
        1e-4,
        0.0,
        "probit hazard_lower(-5)",
    );

    // arctan tail: g/Gbar at z = 1e3 is 1/((1+z^2) arctan(1/z)) = 9.99999333e-4,
    // i.e. ~1/z; the bounded z*g/Gbar behavior of the heavy-tailed link.
    assert_close(
        Link::Cauchit.hazard_upper(1e3).unwrap(),
        9.9999933333391111e-4,
        1e-2,
        0.0,
        "cauchit hazard_upper(1e3)",
    );
    // tighter: the implementation should hit the oracle value nearly exactly
    assert_close(
        Link::Cauchit.hazard_upper(1e3).unwrap(),
        9.9999933333391111e-4,
        1e-12,
        0.0,
        "cauchit hazard_upper(1e3), tight",
    );
}

#[test]
fn pdf_integrates_to_one() {
    for link in [Link::Logit, Link::Probit, Link::Cloglog] {
        let integral = simpson(|z| link.pdf(z).unwrap(), -50.0, 50.0, 20_000);
        assert_close(integral, 1.0, 0.0, 1e-6, &format!("{link} pdf mass"));
    }
    let integral = simpson(|z| Link::Cauchit.pdf(z).unwrap(), -1e4, 1e4, 2_000_000);
    assert_close(integral, 1.0, 0.0, 1e-2, "cauchit pdf mass");
}

#[test]
fn cdf_plus_sf_is_one() {
    for link in Link::ALL {
        let mut z = -30.0;
        while z <= 30.0 {
            let s = link.cdf(z).unwrap() + link.sf(z).unwrap();
            assert_close(s, 1.0, 0.0, 1e-12, &format!("{link} cdf+sf at {z}"));
            z += 0.25;
        }
    }
}

#[test]
fn symmetric_links_mirror() {
    for link in [Link::Logit, Link::Probit, Link::Cauchit] {
        let mut z = -30.0;
        while z <= 30.0 {
            let a = link.cdf(-z).unwrap();
            let b = link.sf(z).unwrap();
            assert_close(a, b, 1e-12, 1e-300, &format!("{link} symmetry at {z}"));
            z += 0.25;
        }
    }
}

#[test]
fn cdf_is_monotone() {
    for link in Link::ALL {
        let mut prev = link.cdf(-60.0).unwrap();
        let mut z = -59.5;
        while z <= 60.0 {
            let c = link.cdf(z).unwrap();
            assert!(c >= prev, "{link} cdf not monotone at {z}");
            prev = c;
            z += 0.5;
        }
    }
}

#[test]
fn pdf_matches_cdf_derivative() {
    for link in Link::ALL {
        let (lo, hi) = if link == Link::Cauchit { (-30.0, 30.0) } else { (-10.0, 10.0) };
        let mut z = lo;
        while z <= hi {
            // step scaled to the local log-density slope so the truncation
            // error stays below the tolerance even for cloglog's
            // double-exponential upper tail
            let slope = ((link.log_pdf(z + 0.01).unwrap() - link.log_pdf(z - 0.01).unwrap())
                / 0.02)
                .abs();
            let h = 1e-5 / (1.0 + slope);
            // differentiate whichever representation of G keeps relative
            // accuracy: G itself below the median, 1 - Gbar above it
            let fd = if z <= 0.0 {
                central_diff(|t| link.cdf(t).unwrap(), z, h)
            } else {
                -central_diff(|t| link.sf(t).unwrap(), z, h)
            };
            let pdf = link.pdf(z).unwrap();
            if pdf < 1e-300 {
                assert!(fd.abs() < 1e-300, "{link} derivative at {z}");
            } else {
                assert_close(fd, pdf, 1e-6, 0.0, &format!("{link} pdf vs d/dz cdf at {z}"));
            }
            z += 0.5;
        }
    }
}

#[test]
fn hazard_times_cdf_recovers_pdf() {
    for link in Link::ALL {
        let mut z = -30.0;
        while z <= 30.0 {
            let lhs = link.hazard_lower(z).unwrap() * link.cdf(z).unwrap();
            let rhs = link.pdf(z).unwrap();
            if rhs == 0.0 {
                assert_eq!(lhs, 0.0, "{link} hazard*cdf at {z}");
            } else {
                assert_close(lhs, rhs, 1e-8, 0.0, &format!("{link} hazard*cdf at {z}"));
            }
            let lhs_u = link.hazard_upper(z).unwrap() * link.sf(z).unwrap();
            if rhs == 0.0 {
                assert_eq!(lhs_u, 0.0, "{link} hazard_upper*sf at {z}");
            } else {
                assert_close(lhs_u, rhs, 1e-8, 0.0, &format!("{link} hazard_upper*sf at {z}"));
            }
            z += 0.25;
        }
    }
}

#[test]
fn light_tail_links_decay_faster_than_an_exponential() {
    // there is t > 0 with e^{tz} g(±z) -> 0: the log form t·z + ln g(±z)
    // must decrease strictly over z in [20, 40]
    let cases = [
        (Link::Logit, 0.5),
        (Link::Probit, 1.0),
        (Link::Cloglog, 0.5),
    ];
    for (link, t) in cases {
        for sign in [1.0, -1.0] {
            let mut prev = f64::INFINITY;
            let mut z = 20.0;
            while z <= 40.0 {
                let v = t * z + link.log_pdf(sign * z).unwrap();
                assert!(v < prev, "{link} e^({t}z) g({sign}z) not decreasing at {z}");
                prev = v;
                z += 1.0;
            }
        }
    }
}

#[test]
fn cauchit_tail_defeats_every_exponential() {
    for t in [0.1, 0.5, 1.0] {
        let mut prev = f64::NEG_INFINITY;
        let mut z = 20.0;
        while z <= 100.0 {
            let v = t * z + Link::Cauchit.log_pdf(z).unwrap();
            assert!(v > prev, "cauchit e^({t}z) g(z) not increasing at {z}");
            prev = v;
            z += 2.0;
        }
    }
}

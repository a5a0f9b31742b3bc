mod common;

use wrtlab::fresnel::fresnel_g_k;
use wrtlab::quadrature::{g_tilde_k, ray_transform, QuadratureSpec, UnitWeight};
use wrtlab::sampling::{random_ray, rng};
use wrtlab::PhantomConfig;

#[test]
fn phantom_matches_definition() {
    let cfg = PhantomConfig::new(6).unwrap();
    for j in 0..=20_000 {
        let t = 1.1 * j as f64 / 20_000.0;
        let want = common::f(6, t);
        assert!((cfg.f_radial(t) - want).abs() <= 1e-15, "t = {t}");
        assert!((cfg.f_series(t) - want).abs() <= 1e-15, "t = {t}");
    }
}

#[test]
fn annuli_hold_the_support() {
    let cfg = PhantomConfig::new(8).unwrap();
    for k in 1..=8 {
        let (lo, hi) = cfg.annulus(k);
        assert_eq!(cfg.f_k(k, lo), 0.0);
        assert_eq!(cfg.f_k(k, hi), 0.0);
        let mid = 0.5 * (lo + hi);
        assert_eq!(cfg.annulus_of(mid), Some(k));
        assert!((cfg.f_k(k, mid) - common::f_k(k, mid)).abs() <= 1e-15);
    }
    assert_eq!(cfg.horizon(), 0.9921875);
}

#[test]
fn g_k_matches_trapezoid() {
    let cfg = PhantomConfig::new(6).unwrap();
    let spec = QuadratureSpec::default();
    for k in 1..=6 {
        let (lo, hi) = cfg.annulus(k);
        for r in [
            0.0,
            0.3 * lo,
            0.9 * lo,
            lo + 0.25 * (hi - lo),
            lo + 0.75 * (hi - lo),
        ] {
            let got = g_tilde_k(&cfg, k, r, &spec).unwrap();
            let want = common::g_k(k, r);
            assert!(
                (got - want).abs() <= 1e-10,
                "k = {k}, r = {r}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn fresnel_matches_trapezoid() {
    let cfg = PhantomConfig::new(6).unwrap();
    let spec = QuadratureSpec::default();
    for k in 2..=6 {
        let (lo, hi) = cfg.annulus(k);
        let lo = lo.max(0.5);
        for j in 1..=5 {
            let r = lo + (hi - lo) * (j as f64 - 0.5) / 5.0;
            let got = fresnel_g_k(&cfg, k, r, &spec).unwrap();
            let want = common::g_k(k, r);
            assert!(
                (got - want).abs() <= 1e-8,
                "k = {k}, r = {r}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn unit_weight_transform_matches_trapezoid() {
    let cfg = PhantomConfig::new(5).unwrap();
    let spec = QuadratureSpec::default();
    let mut g = rng(3);
    for j in 0..12 {
        let r = 0.98 * j as f64 / 12.0;
        let ray = random_ray(2, r, &mut g).unwrap();
        let tv = ray_transform(&UnitWeight, &cfg, &ray, &spec).unwrap();
        let (v, m) = common::line_integral(5, r, |_| 1.0, f64::INFINITY);
        assert!(
            (tv.value - v).abs() <= 1e-10 * m,
            "r = {r}: {} vs {v}",
            tv.value
        );
        // |f| has kinks at the sign changes, so only low-order agreement.
        assert!(
            (tv.normalizer - m).abs() <= 1e-3 * m,
            "r = {r}: {} vs {m}",
            tv.normalizer
        );
    }
}

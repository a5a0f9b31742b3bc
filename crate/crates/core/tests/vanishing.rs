mod common;

use wrtlab::assembly::{stratified_rays, Stratum};
use wrtlab::quadrature::QuadratureSpec;
use wrtlab::sampling::{random_ray, rng};
use wrtlab::w0::{W0Evaluator, W0Kind};
use wrtlab::PhantomConfig;

#[test]
fn assembled_weight_vanishes_under_trapezoid() {
    let w = common::small_weight();
    let rays = stratified_rays(w, 2, 40, 11).unwrap();
    let mut worst = [0.0f64; 3];
    for (stratum, ray) in &rays {
        let rel = common::relative_residual(w, ray.distance());
        let i = Stratum::ALL.iter().position(|s| s == stratum).unwrap();
        worst[i] = worst[i].max(rel);
    }
    for (s, m) in Stratum::ALL.iter().zip(worst) {
        assert!(m <= 1e-9, "{s:?}: {m}");
    }
}

#[test]
fn library_and_oracle_residuals_agree() {
    let w = common::small_weight();
    let mut g = rng(5);
    let rays: Vec<_> = (0..8)
        .map(|j| random_ray(2, 0.1 + 0.1 * j as f64, &mut g).unwrap())
        .collect();
    let lib = w.verify(&rays).unwrap();
    for (ray, res) in rays.iter().zip(&lib) {
        let line = w.line(ray.distance()).unwrap();
        let r = ray.distance();
        let (_, m) = common::line_integral(
            4,
            r,
            |s| w.eval_line(&line, s, r.hypot(s)),
            common::weight_scale(w),
        );
        // |W f| has kinks at the sign changes, so only low-order agreement.
        assert!((res.normalizer - m).abs() <= 1e-3 * m, "r = {r}");
        assert!(res.value.abs() <= 1e-9 * m, "r = {r}");
    }
}

#[test]
fn weight_is_the_xi_combination_on_the_unit_ball() {
    let w = common::small_weight();
    let cfg = *w.cfg();
    let spec = *w.spec();
    for j in 0..60 {
        let r = 0.99 * j as f64 / 60.0;
        let line = w.line(r).unwrap();
        let xi = w.partition().values(r);
        for i in 0..=40 {
            let s = (1.0 - r * r).sqrt() * i as f64 / 40.0;
            let t = r.hypot(s);
            let mut want = 0.0;
            if xi[0] > 0.0 {
                let d = w.w0().ray_data(r).unwrap();
                want += xi[0] * w.w0().u0_with(&d, s, r);
            }
            for (idx, lw) in w.cover().iter().enumerate() {
                if xi[idx + 1] > 0.0 {
                    let d = lw.ray_data(&cfg, r, &spec).unwrap();
                    want += xi[idx + 1] * lw.eval_with(&d, s);
                }
            }
            let got = w.eval_line(&line, s, t);
            assert!(
                (got - want).abs() <= 1e-13,
                "r = {r}, s = {s}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn each_piece_vanishes_where_it_is_used() {
    let w = common::small_weight();
    let scale = common::weight_scale(w);
    // Lines in [horizon, 1) meet annuli beyond k_max and are not cancelled.
    for j in 0..30 {
        let r = w.horizon() * (j as f64 + 0.5) / 30.0;
        let line = w.line(r).unwrap();
        if let Some(d) = &line.w0 {
            let (v, m) = common::line_integral(4, r, |s| w.w0().u0_with(d, s, r), scale);
            assert!(v.abs() <= 1e-9 * m, "W0 at r = {r}");
        }
        for (i, d) in &line.locals {
            let lw = &w.cover()[i - 1];
            let (v, m) = common::line_integral(4, r, |s| lw.eval_with(d, s), scale);
            assert!(v.abs() <= 1e-9 * m, "local {i} at r = {r}");
        }
    }
}

#[test]
fn both_w0_kinds_vanish_beyond_one_half() {
    let cfg = PhantomConfig::new(5).unwrap();
    for kind in [W0Kind::Dyadic, W0Kind::default()] {
        let ev = W0Evaluator::new(cfg, QuadratureSpec::default(), kind).unwrap();
        let scale = 2f64.powi(-6);
        for j in 0..16 {
            let r = 0.5 + (ev.horizon() - 0.5) * (j as f64 + 0.5) / 16.0;
            let d = ev.ray_data(r).unwrap();
            let (v, m) = common::line_integral(5, r, |s| ev.u0_with(&d, s, r), scale);
            assert!(v.abs() <= 1e-9 * m, "{kind:?} at r = {r}: {}", v.abs() / m);
        }
    }
}

#[test]
fn point_evaluation_matches_line_evaluation() {
    let w = common::small_weight();
    let mut g = rng(9);
    for j in 0..20 {
        let r = 2.2 * j as f64 / 20.0;
        let ray = random_ray(2, r, &mut g).unwrap();
        let line = w.line(ray.distance()).unwrap();
        for s in [-0.9, -0.3, 0.0, 0.2, 0.7, 1.5] {
            let x = ray.point(s);
            let t = ray.distance().hypot(s);
            let a = w.eval(&x, &ray.dir).unwrap();
            let b = w.eval_line(&line, s, t);
            assert!((a - b).abs() <= 1e-12, "r = {r}, s = {s}: {a} vs {b}");
        }
    }
}

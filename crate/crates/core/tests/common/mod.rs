//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the library's profile, phantom or quadrature code:
//! the bump, the phantom and the line integrals are written out again from
//! their definitions and integrated with a plain trapezoid rule.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

use wrtlab::assembly::{build_weight, AssembledWeight, BuildOptions};

/// Points per local wavelength of the trapezoid oracle.
pub const PPW: f64 = 64.0;

fn sigma(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

pub fn step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        sigma(u) / (sigma(u) + sigma(1.0 - u))
    }
}

/// Standard profile: 0 outside (0.8, 1.2), 1 on [0.9, 1.1].
pub fn bump(x: f64) -> f64 {
    step((x - 0.8) / 0.1) * step((1.2 - x) / 0.1)
}

pub fn fact(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// f_k(t) = Phi(2^k (1 - t)) cos(8^k t^2).
pub fn f_k(k: u32, t: f64) -> f64 {
    let a = bump(2f64.powi(k as i32) * (1.0 - t));
    if a == 0.0 {
        0.0
    } else {
        a * (8f64.powi(k as i32) * t * t).cos()
    }
}

/// Truncated series sum_{k <= k_max} f_k(t) / k!.
pub fn f(k_max: u32, t: f64) -> f64 {
    (1..=k_max).map(|k| f_k(k, t) / fact(k)).sum()
}

/// [lo, hi] in s on one side of the line at distance r where annulus k lives.
pub fn s_range(k: u32, r: f64) -> Option<(f64, f64)> {
    let lo = 1.0 - 1.2 * 2f64.powi(-(k as i32));
    let hi = 1.0 - 0.8 * 2f64.powi(-(k as i32));
    if r >= hi {
        return None;
    }
    let a = (lo * lo - r * r).max(0.0).sqrt();
    let b = (hi * hi - r * r).sqrt();
    Some((a, b))
}

/// Trapezoid rule on [a, b] with at least n intervals. Endpoint values count
/// with weight 1/2.
pub fn trapezoid<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, n: usize) -> (f64, f64) {
    let n = n.max(2);
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    let mut mag = 0.0;
    for j in 0..=n {
        let s = a + j as f64 * h;
        let v = g(s);
        let c = if j == 0 || j == n { 0.5 } else { 1.0 };
        sum += c * v;
        mag += c * v.abs();
    }
    (sum * h, mag * h)
}

/// Intervals for annulus k: the wavelength of cos(8^k (r^2 + s^2)) at the far
/// end, the envelope scale and `min_scale` all get at least PPW points.
pub fn intervals(k: u32, a: f64, b: f64, min_scale: f64) -> usize {
    let eight = 8f64.powi(k as i32);
    let wavelength = PI / (eight * b);
    let envelope = 0.1 * 2f64.powi(-(k as i32));
    let h = wavelength.min(envelope).min(min_scale) / PPW;
    ((b - a) / h).ceil().max(4096.0) as usize
}

/// (integral of w(s) f along the line at distance r, integral of |w f|), with
/// both halves s < 0 and s > 0 integrated separately.
pub fn line_integral<W: Fn(f64) -> f64>(k_max: u32, r: f64, w: W, min_scale: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut mag = 0.0;
    for k in 1..=k_max {
        let Some((a, b)) = s_range(k, r) else {
            continue;
        };
        let n = intervals(k, a, b, min_scale);
        let g = |s: f64| w(s) * f_k(k, r.hypot(s)) / fact(k);
        let (v1, m1) = trapezoid(g, a, b, n);
        let (v2, m2) = trapezoid(|s| g(-s), a, b, n);
        value += v1 + v2;
        mag += m1 + m2;
    }
    (value, mag)
}

/// G_k(r) by the trapezoid oracle.
pub fn g_k(k: u32, r: f64) -> f64 {
    let Some((a, b)) = s_range(k, r) else {
        return 0.0;
    };
    let n = intervals(k, a, b, f64::INFINITY);
    2.0 * trapezoid(|s| f_k(k, r.hypot(s)), a, b, n).0
}

/// Smallest s-scale on which the assembled weight varies: local bump widths
/// and the dyadic window scale.
pub fn weight_scale(w: &AssembledWeight) -> f64 {
    let local = w
        .cover()
        .iter()
        .map(|lw| lw.bump.half_width)
        .fold(f64::INFINITY, f64::min);
    local.min(2f64.powi(-(w.cfg().k_max as i32) - 1))
}

/// P_W f / integral |W f| on the line at distance r, by the trapezoid oracle.
pub fn relative_residual(w: &AssembledWeight, r: f64) -> f64 {
    let line = w.line(r).expect("line data");
    let (v, m) = line_integral(
        w.cfg().k_max,
        r,
        |s| w.eval_line(&line, s, r.hypot(s)),
        weight_scale(w),
    );
    if m > 0.0 {
        v.abs() / m
    } else {
        v.abs()
    }
}

/// The k_max = 4 weight, built once per test binary.
pub fn small_weight() -> &'static AssembledWeight {
    static W: OnceLock<AssembledWeight> = OnceLock::new();
    W.get_or_init(|| {
        let mut opts = BuildOptions::new(4);
        opts.fit_constants = false;
        build_weight(&opts).expect("k_max = 4 build").weight
    })
}

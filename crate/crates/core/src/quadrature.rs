//! Ray integrals of the phantom in the axial parametrisation
//! y = x_perp + s theta, t = sqrt(r^2 + s^2).
//!
//! Every integrand used here is even in s, so only s >= 0 is integrated and
//! the result doubled. Panels are fixed-order Gauss-Legendre rules whose count
//! follows from the phase bound 2 * 8^k * s of cos(8^k t^2); the panel count is
//! then doubled until two successive estimates agree.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::factorial;
use crate::PhantomConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub points_per_wavelength: u32,
    pub panel_order: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
    /// Extra room added to sqrt(1 - r^2) when bounding integrand support.
    pub s_margin: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points_per_wavelength: 10,
            panel_order: 8,
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_refinements: 8,
            s_margin: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_wavelength < 4 {
            return Err(Error::Config("points_per_wavelength must be >= 4".into()));
        }
        if !(1..=64).contains(&self.panel_order) {
            return Err(Error::Config("panel_order must lie in 1..=64".into()));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_refinements < 1 {
            return Err(Error::Config("max_refinements must be >= 1".into()));
        }
        if !(self.s_margin >= 0.0) {
            return Err(Error::Config("s_margin must be nonnegative".into()));
        }
        Ok(())
    }

    /// Support bound sqrt(1 - r^2) + margin on the axial coordinate.
    pub fn s_max(&self, r: f64) -> f64 {
        (1.0 - r * r).max(0.0).sqrt() + self.s_margin
    }

    pub fn with_points_per_wavelength(mut self, ppw: u32) -> Self {
        self.points_per_wavelength = ppw;
        self
    }
}

/// s-interval (s >= 0) on which the ray at distance r meets annulus k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorySegment {
    pub k: u32,
    pub a: f64,
    pub b: f64,
    /// Upper bound 2 * 8^k * b on d/ds of the phase 8^k (r^2 + s^2).
    pub freq_bound: f64,
}

impl OscillatorySegment {
    pub fn oscillations(&self) -> f64 {
        self.freq_bound * (self.b - self.a) / TAU
    }

    /// Relative accuracy floor set by rounding of the phase 8^k t^2 (t <= 1):
    /// a few ulps of 8^k. Refinement cannot resolve differences below it.
    pub fn phase_floor(&self) -> f64 {
        4.0 * 8f64.powi(self.k as i32) * f64::EPSILON
    }
}

fn sqrt_diff(hi: f64, r: f64) -> f64 {
    ((hi - r) * (hi + r)).max(0.0).sqrt()
}

/// Segments of the ray at distance r, ordered by k (and by s).
pub fn segment_ray(cfg: &PhantomConfig, r: f64) -> Vec<OscillatorySegment> {
    let r = r.abs();
    let mut out = Vec::new();
    for k in 1..=cfg.k_max {
        if let Some(seg) = segment_for(cfg, k, r) {
            out.push(seg);
        }
    }
    out
}

pub fn segment_for(cfg: &PhantomConfig, k: u32, r: f64) -> Option<OscillatorySegment> {
    let (lo, hi) = cfg.annulus(k);
    if r >= hi {
        return None;
    }
    let a = if r >= lo { 0.0 } else { sqrt_diff(lo, r) };
    let b = sqrt_diff(hi, r);
    Some(OscillatorySegment {
        k,
        a,
        b,
        freq_bound: 2.0 * 8f64.powi(k as i32) * b,
    })
}

impl OscillatorySegment {
    /// The part of the segment inside [lo, hi], with its frequency bound.
    pub fn clip(&self, lo: f64, hi: f64) -> Option<Self> {
        let a = self.a.max(lo);
        let b = self.b.min(hi);
        if !(b > a) {
            return None;
        }
        let scale = if self.b > 0.0 { b / self.b } else { 1.0 };
        Some(Self {
            a,
            b,
            freq_bound: self.freq_bound * scale,
            ..*self
        })
    }
}

pub(crate) fn gauss_rule(order: u32) -> &'static [(f64, f64)] {
    static RULES: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        (0..=64usize)
            .map(|n| match NonZeroUsize::new(n) {
                Some(n) => GaussLegendre::new(n).as_node_weight_pairs().to_vec(),
                None => Vec::new(),
            })
            .collect()
    });
    &rules[order as usize]
}

/// Composite rule over [a, b] with n panels; returns (sum, sum of |values|).
fn composite<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    n: usize,
    rule: &[(f64, f64)],
) -> (f64, f64) {
    let h = (b - a) / n as f64;
    let half = 0.5 * h;
    let mut sum = 0.0;
    let mut mag = 0.0;
    for p in 0..n {
        let mid = a + (p as f64 + 0.5) * h;
        let mut ps = 0.0;
        let mut pm = 0.0;
        for &(x, w) in rule {
            let v = g(mid + half * x) * w;
            ps += v;
            pm += v.abs();
        }
        sum += ps * half;
        mag += pm * half;
    }
    (sum, mag)
}

/// Outcome of one segment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentIntegral {
    pub value: f64,
    pub magnitude: f64,
    pub panels: usize,
    pub depth: u32,
}

/// Relative level below which stagnating refinements are accepted as
/// rounding noise rather than reported as non-convergence.
pub const ROUNDOFF_ACCEPT: f64 = 1e-9;

/// Integral of g over one segment (not doubled), refined until converged.
///
/// Refinement stops when two successive estimates agree to the tolerance, or
/// when the differences stop shrinking at a level below `ROUNDOFF_ACCEPT`
/// times the integral of |g| (argument rounding in steep envelopes).
pub fn integrate_segment<G: Fn(f64) -> f64>(
    g: &G,
    seg: &OscillatorySegment,
    spec: &QuadratureSpec,
) -> Result<SegmentIntegral> {
    let rule = gauss_rule(spec.panel_order);
    let osc = seg.oscillations();
    let base = (osc * spec.points_per_wavelength as f64 / spec.panel_order as f64).ceil() as usize;
    let mut n = base.max(4);
    let (mut prev, _) = composite(g, seg.a, seg.b, n, rule);
    let mut prev_diff = f64::INFINITY;
    for depth in 1..=spec.max_refinements {
        n *= 2;
        let (cur, mag) = composite(g, seg.a, seg.b, n, rule);
        let diff = (cur - prev).abs();
        let tol = spec.abs_tol.max(spec.rel_tol.max(seg.phase_floor()) * mag);
        let stalled = depth >= 3 && diff > 0.5 * prev_diff && diff <= ROUNDOFF_ACCEPT * mag;
        if diff <= tol || stalled {
            return Ok(SegmentIntegral {
                value: cur,
                magnitude: mag,
                panels: n,
                depth,
            });
        }
        if depth == spec.max_refinements {
            return Err(Error::Quadrature {
                k: seg.k,
                a: seg.a,
                b: seg.b,
                depth,
                prev,
                last: cur,
            });
        }
        prev = cur;
        prev_diff = diff;
    }
    unreachable!("max_refinements >= 1 is enforced by the loop")
}

/// 2 * sum over segments of the integral of g on [a, b] (g even in s).
pub fn integrate_along_ray<G: Fn(f64) -> f64>(
    g: G,
    segments: &[OscillatorySegment],
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(integrate_with_magnitude(&g, segments, spec)?.0)
}

/// As [`integrate_along_ray`], also returning 2 * integral of |g|.
pub fn integrate_with_magnitude<G: Fn(f64) -> f64>(
    g: &G,
    segments: &[OscillatorySegment],
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut mag = 0.0;
    for seg in segments {
        let s = integrate_segment(g, seg, spec)?;
        total += s.value;
        mag += s.magnitude;
    }
    Ok((2.0 * total, 2.0 * mag))
}

/// G_k(r): integral of f_k along the ray at distance r.
pub fn g_tilde_k(cfg: &PhantomConfig, k: u32, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_k(cfg, k)?;
    let r = r.abs();
    let Some(seg) = segment_for(cfg, k, r) else {
        return Ok(0.0);
    };
    let r2 = r * r;
    let s = integrate_segment(&|s: f64| cfg.f_k(k, (r2 + s * s).sqrt()), &seg, spec)?;
    Ok(2.0 * s.value)
}

/// H_k(r): integral of f_k^2 along the ray at distance r.
pub fn h_tilde_k(cfg: &PhantomConfig, k: u32, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_k(cfg, k)?;
    let r = r.abs();
    let Some(seg) = segment_for(cfg, k, r) else {
        return Ok(0.0);
    };
    let r2 = r * r;
    // f_k^2 oscillates at twice the phase rate.
    let seg2 = OscillatorySegment {
        freq_bound: 2.0 * seg.freq_bound,
        ..seg
    };
    let s = integrate_segment(
        &|s: f64| {
            let v = cfg.f_k(k, (r2 + s * s).sqrt());
            v * v
        },
        &seg2,
        spec,
    )?;
    Ok(2.0 * s.value)
}

/// d/dr H_k(r) = 2 int 2 f_k f_k'(t) r / t ds. The integrand vanishes at the
/// moving segment ends, so no boundary terms appear.
pub fn h_tilde_k_prime(cfg: &PhantomConfig, k: u32, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_k(cfg, k)?;
    let r = r.abs();
    let Some(seg) = segment_for(cfg, k, r) else {
        return Ok(0.0);
    };
    let r2 = r * r;
    let seg2 = OscillatorySegment {
        freq_bound: 2.0 * seg.freq_bound,
        ..seg
    };
    let s = integrate_segment(
        &|s: f64| {
            let t = (r2 + s * s).sqrt();
            2.0 * cfg.f_k(k, t) * cfg.f_k_deriv(k, t) * r / t
        },
        &seg2,
        spec,
    )?;
    Ok(2.0 * s.value)
}

/// d/dr G(r) = sum_k (1/k!) 2 int f_k'(t) r / t ds.
pub fn g_tilde_prime(cfg: &PhantomConfig, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    let r = r.abs();
    let r2 = r * r;
    let mut total = 0.0;
    for seg in segment_ray(cfg, r) {
        let k = seg.k;
        let s = integrate_segment(
            &|s: f64| {
                let t = (r2 + s * s).sqrt();
                cfg.f_k_deriv(k, t) * r / t
            },
            &seg,
            spec,
        )?;
        total += 2.0 * s.value / factorial(k);
    }
    Ok(total)
}

/// G(r) = sum_k G_k(r)/k!.
pub fn g_tilde(cfg: &PhantomConfig, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(g_tilde_terms(cfg, r, spec)?
        .iter()
        .enumerate()
        .map(|(i, g)| g / factorial(i as u32 + 1))
        .sum())
}

/// [G_1(r), ..., G_kmax(r)].
pub fn g_tilde_terms(cfg: &PhantomConfig, r: f64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    (1..=cfg.k_max)
        .map(|k| g_tilde_k(cfg, k, r, spec))
        .collect()
}

fn check_k(cfg: &PhantomConfig, k: u32) -> Result<()> {
    if k < 1 || k > cfg.k_max {
        return Err(Error::Domain(format!(
            "annulus index {k} outside 1..={}",
            cfg.k_max
        )));
    }
    Ok(())
}

/// P_W f on one ray together with the normaliser integral of |W f|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformValue {
    pub value: f64,
    pub normalizer: f64,
}

impl TransformValue {
    /// |P_W f| / integral |W f|, 0 when the ray misses supp f.
    pub fn relative(&self) -> f64 {
        if self.normalizer > 0.0 {
            self.value.abs() / self.normalizer
        } else {
            self.value.abs()
        }
    }
}

/// Residual of P_W f on one line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayResidual {
    pub r: f64,
    pub value: f64,
    pub normalizer: f64,
    pub relative: f64,
}

impl RayResidual {
    pub fn new(r: f64, tv: TransformValue) -> Self {
        Self {
            r,
            value: tv.value,
            normalizer: tv.normalizer,
            relative: tv.relative(),
        }
    }
}

/// Largest relative residual (0 for an empty slice).
pub fn max_relative(res: &[RayResidual]) -> f64 {
    res.iter().fold(0.0, |m, x| m.max(x.relative))
}

/// Integral of w(s) f(t(s)) along the ray at distance r, where w is the
/// weight read as a function of the axial coordinate (even in s).
pub fn weighted_integral<W: Fn(f64) -> f64>(
    cfg: &PhantomConfig,
    r: f64,
    w: W,
    spec: &QuadratureSpec,
) -> Result<TransformValue> {
    let r = r.abs();
    let segs = segment_ray(cfg, r);
    let r2 = r * r;
    let mut total = 0.0;
    let mut mag = 0.0;
    for seg in &segs {
        let k = seg.k;
        let kf = factorial(k);
        let g = |s: f64| {
            let t = (r2 + s * s).sqrt();
            w(s) * cfg.f_k(k, t) / kf
        };
        let res = integrate_segment(&g, seg, spec)?;
        total += res.value;
        mag += res.magnitude;
    }
    Ok(TransformValue {
        value: 2.0 * total,
        normalizer: 2.0 * mag,
    })
}

/// Weights that depend on a line only through its distance r and the axial
/// coordinate s (rotation-invariant weights read along one line).
pub trait AxialWeight: Sync {
    /// W on the line at distance r as a function of s. `r` is never negative.
    fn along(&self, r: f64) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync + '_>>;
}

/// P_W f on a line given as a projected ray.
pub fn ray_transform(
    w: &dyn AxialWeight,
    cfg: &PhantomConfig,
    ray: &crate::Ray,
    spec: &QuadratureSpec,
) -> Result<TransformValue> {
    let r = ray.distance();
    let along = w.along(r)?;
    weighted_integral(cfg, r, |s| along(s), spec)
}

/// The constant weight 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitWeight;

impl AxialWeight for UnitWeight {
    fn along(&self, _r: f64) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync + '_>> {
        Ok(Box::new(|_| 1.0))
    }
}

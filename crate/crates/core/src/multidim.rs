//! The assembled weight read in dimension d >= 3, multi-kernel weights on
//! disjoint balls and slice weights on planes x_d = sqrt(1 - delta^2).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{AssembledWeight, LineData};
use crate::error::{Error, Result};
use crate::geometry::{dot, norm};
use crate::quadrature::{
    integrate_segment, segment_ray, weighted_integral, AxialWeight, TransformValue,
};
use crate::sampling::{random_ray, rng, stratified};
use crate::w0::checked_invariants;
use crate::Ray;

/// P_W f on the line at distance r by pointwise evaluation: `inv(s)` gives
/// (|x|, |x . theta|) at axial coordinate s, computed from the caller's own
/// parametrisation of the line.
fn direct_integral<P: Fn(f64) -> (f64, f64)>(
    w: &AssembledWeight,
    line: &LineData,
    r: f64,
    inv: P,
) -> Result<TransformValue> {
    let cfg = w.cfg();
    let point = |s: f64| {
        let (n, a) = inv(s);
        w.eval_line(line, a, n) * cfg.f_radial(n)
    };
    let g = |s: f64| 0.5 * (point(s) + point(-s));
    let mut value = 0.0;
    let mut mag = 0.0;
    for seg in segment_ray(cfg, r) {
        let res = integrate_segment(&g, &seg, w.spec())?;
        value += res.value;
        mag += res.magnitude;
    }
    Ok(TransformValue {
        value: 2.0 * value,
        normalizer: 2.0 * mag,
    })
}

/// Direct and reduced values of P_W f on one line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineCheck {
    pub r: f64,
    /// Pointwise evaluation along the line in its own coordinates.
    pub direct: TransformValue,
    /// The reference value: the same integral through the axial reduction at
    /// distance r, or for multi-kernel lines P_W f on the translated line.
    pub reduced: TransformValue,
    pub relative: f64,
    /// |direct - reduced| / normalizer.
    pub agreement: f64,
}

impl LineCheck {
    fn new(r: f64, direct: TransformValue, reduced: TransformValue) -> Self {
        let scale = reduced.normalizer.max(direct.normalizer);
        let gap = (direct.value - reduced.value).abs();
        Self {
            r,
            direct,
            reduced,
            relative: direct.relative().max(reduced.relative()),
            agreement: if scale > 0.0 { gap / scale } else { gap },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineReport {
    pub rays: usize,
    pub seed: u64,
    pub max_relative: f64,
    pub max_agreement: f64,
    pub lines: Vec<LineCheck>,
}

impl LineReport {
    fn new(seed: u64, lines: Vec<LineCheck>) -> Self {
        Self {
            rays: lines.len(),
            seed,
            max_relative: lines.iter().fold(0.0, |m, l| m.max(l.relative)),
            max_agreement: lines.iter().fold(0.0, |m, l| m.max(l.agreement)),
            lines,
        }
    }
}

/// The two-dimensional construction read through (|x|, |x . theta|) in R^d.
#[derive(Debug, Clone, Copy)]
pub struct LiftedWeight<'a> {
    pub base: &'a AssembledWeight,
    pub dim: usize,
}

impl<'a> LiftedWeight<'a> {
    pub fn new(base: &'a AssembledWeight, dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Config(format!(
                "lifted weights need d >= 3, got {dim}"
            )));
        }
        Ok(Self { base, dim })
    }

    pub fn eval(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.base.eval(x, theta)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Domain(format!(
                "expected a point in R^{}, got length {}",
                self.dim,
                x.len()
            )));
        }
        Ok(())
    }

    /// P_W f on a line of R^d, directly and through the reduction.
    pub fn check_line(&self, ray: &Ray) -> Result<LineCheck> {
        self.check_dim(&ray.base)?;
        let r = ray.distance();
        let line = self.base.line(r)?;
        let direct = direct_integral(self.base, &line, r, |s| {
            let p = ray.point(s);
            (norm(&p), dot(&p, &ray.dir).abs())
        })?;
        let reduced = weighted_integral(
            self.base.cfg(),
            r,
            |s| self.base.eval_line(&line, s, r.hypot(s)),
            self.base.spec(),
        )?;
        Ok(LineCheck::new(r, direct, reduced))
    }
}

/// Lines of R^d with distances stratified over [0, horizon) and [1, R).
pub fn lift_rays(base: &AssembledWeight, dim: usize, n: usize, seed: u64) -> Result<Vec<Ray>> {
    let mut g = rng(seed);
    let n_out = n / 5;
    let mut rs = stratified(0.0, base.horizon(), n - n_out, &mut g);
    rs.extend(stratified(1.0, base.outer_radius(), n_out, &mut g));
    rs.into_iter().map(|r| random_ray(dim, r, &mut g)).collect()
}

pub fn verify_lift(lw: &LiftedWeight, rays: &[Ray], seed: u64) -> Result<LineReport> {
    let lines = rays
        .par_iter()
        .map(|ray| lw.check_line(ray))
        .collect::<Result<Vec<_>>>()?;
    Ok(LineReport::new(seed, lines))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiKernelConfig {
    pub n: usize,
    /// Distance between consecutive centres on the e_1 axis.
    pub spacing: f64,
}

impl MultiKernelConfig {
    /// Spacing 2R + 1.
    pub fn new(n: usize, outer_radius: f64) -> Self {
        Self {
            n,
            spacing: 2.0 * outer_radius + 1.0,
        }
    }
}

/// W_n: the base weight recentred on each ball |x - y_i| < R, 1 elsewhere.
#[derive(Debug, Clone)]
pub struct MultiKernelWeight<'a> {
    pub base: &'a AssembledWeight,
    pub dim: usize,
    pub config: MultiKernelConfig,
    centers: Vec<Vec<f64>>,
}

impl<'a> MultiKernelWeight<'a> {
    pub fn new(base: &'a AssembledWeight, dim: usize, config: MultiKernelConfig) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Config(format!("dimension must be >= 2, got {dim}")));
        }
        if config.n == 0 {
            return Err(Error::Config("multi-kernel weight needs n >= 1".into()));
        }
        let r = base.outer_radius();
        if !(config.spacing > 2.0 * r) {
            return Err(Error::Config(format!(
                "centre spacing {} must exceed 2R = {}",
                config.spacing,
                2.0 * r
            )));
        }
        let centers = (0..config.n)
            .map(|i| center(dim, config.spacing, i))
            .collect();
        Ok(Self {
            base,
            dim,
            config,
            centers,
        })
    }

    /// y_1 = 0, y_{i+1} = y_i + spacing e_1 (0-based here).
    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i]
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    /// Index of the ball |x - y_i| < R containing x.
    pub fn ball_of(&self, x: &[f64]) -> Option<usize> {
        let r = self.base.outer_radius();
        let i = (x[0] / self.config.spacing).round();
        if i < 0.0 || i >= self.config.n as f64 {
            return None;
        }
        let i = i as usize;
        (norm(&sub(x, &self.centers[i])) < r).then_some(i)
    }

    /// Smallest distance between distinct closed balls (positive when disjoint).
    pub fn min_gap(&self) -> f64 {
        let r = self.base.outer_radius();
        let mut gap = f64::INFINITY;
        for i in 0..self.centers.len() {
            for j in i + 1..self.centers.len() {
                gap = gap.min(norm(&sub(&self.centers[i], &self.centers[j])) - 2.0 * r);
            }
        }
        gap
    }

    pub fn eval(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Domain(format!("expected a point in R^{}", self.dim)));
        }
        checked_invariants(x, theta)?;
        match self.ball_of(x) {
            Some(i) => self.base.eval(&sub(x, &self.centers[i]), theta),
            None => Ok(1.0),
        }
    }

    /// f_i(x) = f(x - y_i).
    pub fn phantom(&self, i: usize, x: &[f64]) -> f64 {
        self.base.cfg().f_radial(norm(&sub(x, &self.centers[i])))
    }

    /// P_{W_n} f_i on the line x + s theta of world coordinates (direct), and
    /// P_W f on the translated line (x - y_i, theta) by the same quadrature.
    pub fn check_line(&self, i: usize, ray: &Ray) -> Result<LineCheck> {
        let y = &self.centers[i];
        let local = ray.translated(&neg(y))?;
        let r = local.distance();
        let line = self.base.line(r)?;
        // Axial origin of the world line at the foot point seen from y_i.
        let c = dot(&sub(y, &ray.base), &ray.dir);
        let cfg = self.base.cfg();
        let point = |s: f64| {
            let p = ray.point(c + s);
            let f = cfg.f_radial(norm(&sub(&p, y)));
            if f == 0.0 {
                return 0.0;
            }
            // supp f_i lies in ball i, so the line data at distance r applies.
            let wn = match self.ball_of(&p) {
                Some(j) => {
                    let q = sub(&p, &self.centers[j]);
                    self.base
                        .eval_line(&line, dot(&q, &ray.dir).abs(), norm(&q))
                }
                None => 1.0,
            };
            wn * f
        };
        let g = |s: f64| 0.5 * (point(s) + point(-s));
        let mut value = 0.0;
        let mut mag = 0.0;
        for seg in segment_ray(cfg, r) {
            let res = integrate_segment(&g, &seg, self.base.spec())?;
            value += res.value;
            mag += res.magnitude;
        }
        let shifted = TransformValue {
            value: 2.0 * value,
            normalizer: 2.0 * mag,
        };
        let unshifted = direct_integral(self.base, &line, r, |s| {
            let p = local.point(s);
            (norm(&p), dot(&p, &local.dir).abs())
        })?;
        Ok(LineCheck::new(r, shifted, unshifted))
    }
}

fn center(dim: usize, spacing: f64, i: usize) -> Vec<f64> {
    let mut y = vec![0.0; dim];
    y[0] = spacing * i as f64;
    y
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiKernelReport {
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    pub min_gap: f64,
    /// Per phantom f_i: the residual report of P_{W_n} f_i.
    pub kernels: Vec<LineReport>,
    pub max_relative: f64,
    /// max |P_{W_n} f_i(x, theta) - P_W f(x - y_i, theta)|.
    pub translation: f64,
    /// The same gap divided by the line's normalizer.
    pub translation_relative: f64,
}

/// Lines near ball i: random lines at stratified distances from y_i, plus
/// one line along e_1 through every centre.
pub fn verify_multikernel(
    mk: &MultiKernelWeight,
    rays_per_kernel: usize,
    seed: u64,
) -> Result<MultiKernelReport> {
    let mut kernels = Vec::with_capacity(mk.config.n);
    for i in 0..mk.config.n {
        let mut rays = lift_rays(
            mk.base,
            mk.dim,
            rays_per_kernel,
            seed.wrapping_add(i as u64),
        )?
        .into_iter()
        .map(|ray| ray.translated(mk.center(i)))
        .collect::<Result<Vec<_>>>()?;
        let mut axis = vec![0.0; mk.dim];
        axis[0] = 1.0;
        let mut base = vec![0.0; mk.dim];
        base[1] = 0.25;
        rays.push(Ray { base, dir: axis });
        let lines = rays
            .par_iter()
            .map(|ray| mk.check_line(i, ray))
            .collect::<Result<Vec<_>>>()?;
        kernels.push(LineReport::new(seed.wrapping_add(i as u64), lines));
    }
    Ok(MultiKernelReport {
        n: mk.config.n,
        dim: mk.dim,
        seed,
        min_gap: mk.min_gap(),
        max_relative: kernels.iter().fold(0.0, |m, k| m.max(k.max_relative)),
        translation: kernels
            .iter()
            .flat_map(|k| &k.lines)
            .fold(0.0, |m, l| m.max((l.direct.value - l.reduced.value).abs())),
        translation_relative: kernels.iter().fold(0.0, |m, k| m.max(k.max_agreement)),
        kernels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceConfig {
    pub delta: f64,
}

/// W_delta(x', theta') = W((x', h), (theta', 0)) and f_delta(x') = f((x', h))
/// on the plane x_d = h = sqrt(1 - delta^2) of R^d.
#[derive(Debug, Clone, Copy)]
pub struct SliceWeight<'a> {
    pub lift: LiftedWeight<'a>,
    pub delta: f64,
    pub height: f64,
}

impl<'a> SliceWeight<'a> {
    pub fn new(lift: LiftedWeight<'a>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!(
                "slice delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self {
            lift,
            delta,
            height: ((1.0 - delta) * (1.0 + delta)).sqrt(),
        })
    }

    fn embed(&self, x: &[f64], last: f64) -> Vec<f64> {
        let mut v = x.to_vec();
        v.push(last);
        v
    }

    pub fn eval(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.lift
            .eval(&self.embed(x, self.height), &self.embed(theta, 0.0))
    }

    pub fn phantom(&self, x: &[f64]) -> f64 {
        let p = self.embed(x, self.height);
        self.lift.base.cfg().f_radial(norm(&p))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() + 1 != self.lift.dim {
            return Err(Error::Domain(format!(
                "expected a point in R^{}, got length {}",
                self.lift.dim - 1,
                x.len()
            )));
        }
        Ok(())
    }

    /// Radius of supp f_delta in the plane: sqrt(edge^2 - h^2), edge the outer
    /// edge of supp f.
    pub fn support_radius(&self) -> f64 {
        let e = self.lift.base.cfg().support_edge();
        ((e - self.height) * (e + self.height)).max(0.0).sqrt()
    }

    /// In-plane line distances r' whose 3D distance sqrt(r'^2 + h^2) stays
    /// below the horizon.
    pub fn max_line_distance(&self) -> f64 {
        let hz = self.lift.base.horizon();
        ((hz - self.height) * (hz + self.height)).max(0.0).sqrt()
    }

    /// P_{W_delta} f_delta on an in-plane line: pointwise in the plane, and
    /// through the reduction at the 3D distance.
    pub fn check_line(&self, ray: &Ray) -> Result<LineCheck> {
        self.check_dim(&ray.base)?;
        let r3 = ray.distance().hypot(self.height);
        let base = self.lift.base;
        let line = base.line(r3)?;
        let direct = direct_integral(base, &line, r3, |s| {
            let p = self.embed(&ray.point(s), self.height);
            let th = self.embed(&ray.dir, 0.0);
            (norm(&p), dot(&p, &th).abs())
        })?;
        let along = base.along(r3)?;
        let reduced = weighted_integral(base.cfg(), r3, |s| along(s), base.spec())?;
        Ok(LineCheck::new(r3, direct, reduced))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub delta: f64,
    pub height: f64,
    /// Radius of supp f_delta from the geometry.
    pub support_radius: f64,
    /// Largest |x'| with f_delta(x') != 0 on the sampling grid.
    pub sampled_support: f64,
    pub min_weight: f64,
    pub lines: LineReport,
}

/// Residuals on `rays` in-plane lines, the sampled support of f_delta along
/// a radius, and min W_delta over `grid` lines of `4 grid + 1` points each.
pub fn verify_slice(sw: &SliceWeight, rays: usize, grid: usize, seed: u64) -> Result<SliceReport> {
    if !(sw.max_line_distance() > 0.0) {
        return Err(Error::Config(format!(
            "slice plane at height {} lies above the truncation horizon {}",
            sw.height,
            sw.lift.base.horizon()
        )));
    }
    let dim = sw.lift.dim - 1;
    let mut g = rng(seed);
    let rays: Vec<Ray> = stratified(0.0, sw.max_line_distance(), rays, &mut g)
        .into_iter()
        .map(|r| random_ray(dim, r, &mut g))
        .collect::<Result<_>>()?;
    let lines = rays
        .par_iter()
        .map(|ray| sw.check_line(ray))
        .collect::<Result<Vec<_>>>()?;

    let mut sampled: f64 = 0.0;
    for i in 0..=grid * 8 {
        let rho = i as f64 / (grid * 8) as f64;
        let mut x = vec![0.0; dim];
        x[0] = rho;
        if sw.phantom(&x) != 0.0 {
            sampled = sampled.max(rho);
        }
    }

    // W_delta along in-plane lines with |x'| up to 2 delta.
    let rs: Vec<f64> = (0..grid)
        .map(|i| 2.0 * sw.delta * (i as f64 + 0.5) / grid as f64)
        .collect();
    let mins = rs
        .par_iter()
        .map(|&rp| {
            let r3 = rp.hypot(sw.height);
            let line = sw.lift.base.line(r3)?;
            let mut m = f64::INFINITY;
            for j in 0..=4 * grid {
                let s = 2.0 * sw.delta * (2.0 * j as f64 / (4 * grid) as f64 - 1.0);
                m = m.min(sw.lift.base.eval_line(&line, s.abs(), r3.hypot(s)));
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let min_weight = mins.into_iter().fold(f64::INFINITY, f64::min);
    Ok(SliceReport {
        delta: sw.delta,
        height: sw.height,
        support_radius: sw.support_radius(),
        sampled_support: sampled,
        min_weight,
        lines: LineReport::new(seed, lines),
    })
}

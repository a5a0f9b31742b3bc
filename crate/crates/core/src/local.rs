//! Local weights W = 1 - psi(x . theta) G(r) / J(r) on a band of lines
//! |r - r0| < eps0, where J(r) is the ray integral of f psi.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::factorial;
use crate::profiles::BumpProfile;
use crate::quadrature::{
    g_tilde, integrate_segment, segment_ray, weighted_integral, QuadratureSpec, RayResidual,
};
use crate::w0::{checked_invariants, distance_from_invariants};
use crate::PhantomConfig;

/// Smallest admissible certified radius.
pub const EPS_MIN: f64 = 1e-4;
/// |J| must exceed GUARD_FACTOR * (bump mass).
pub const GUARD_FACTOR: f64 = 1e-12;
/// Rows of the certification grid per eps (spacing eps / ROWS_PER_EPS).
pub const ROWS_PER_EPS: usize = 32;
/// Axial samples across the bump support when certifying.
pub const S_SAMPLES: usize = 64;
/// Bisection steps after the dyadic descent in [`find_epsilon0`].
pub const BISECTION_STEPS: usize = 4;

/// Even bump psi: the pair of bumps at +-center, or one bump centered at 0
/// when center < half_width. Each bump has the profile of
/// [`BumpProfile::centered`]: plateau on the middle half of its support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalBump {
    pub center: f64,
    pub half_width: f64,
}

impl LocalBump {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(center >= 0.0 && half_width > 0.0 && center.is_finite() && half_width.is_finite()) {
            return Err(Error::Config(format!(
                "local bump needs center >= 0 and half_width > 0, got ({center}, {half_width})"
            )));
        }
        Ok(Self { center, half_width })
    }

    fn single(&self) -> bool {
        self.center < self.half_width
    }

    fn profile(&self) -> BumpProfile<f64> {
        let p = if self.single() {
            BumpProfile::centered(0.0, self.center + self.half_width)
        } else {
            BumpProfile::centered(self.center, self.half_width)
        };
        p.expect("validated in new")
    }

    pub fn eval(&self, u: f64) -> f64 {
        let p = self.profile();
        if self.single() {
            p.eval(u)
        } else {
            p.eval(u) + p.eval(-u)
        }
    }

    /// psi vanishes for |u| >= support_max.
    pub fn support_max(&self) -> f64 {
        self.center + self.half_width
    }

    /// Integral of psi over the real line (a ramp of S integrates to half its width).
    pub fn mass(&self) -> f64 {
        if self.single() {
            1.5 * (self.center + self.half_width)
        } else {
            3.0 * self.half_width
        }
    }
}

/// G(r) and J(r) = integral of f psi along the line at distance r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalRayData {
    pub g: f64,
    pub j: f64,
}

/// J(r) = integral of f psi along the line at distance r.
pub fn bump_integral(
    cfg: &PhantomConfig,
    bump: &LocalBump,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let r = r.abs();
    let r2 = r * r;
    // Segments meeting only the far tail of psi carry values far below the
    // guard floor; resolving them to rel_tol would be wasted work.
    let spec = &QuadratureSpec {
        abs_tol: spec.abs_tol.max(1e-3 * GUARD_FACTOR * bump.mass()),
        ..*spec
    };
    let mut total = 0.0;
    for seg in segment_ray(cfg, r) {
        let Some(seg) = seg.clip(0.0, bump.support_max()) else {
            continue;
        };
        let k = seg.k;
        let kf = factorial(k);
        let res = integrate_segment(
            &|s: f64| bump.eval(s) * cfg.f_k(k, (r2 + s * s).sqrt()) / kf,
            &seg,
            spec,
        )?;
        total += res.value;
    }
    Ok(2.0 * total)
}

#[derive(Debug, Clone, Copy)]
struct SignRun {
    lo: f64,
    hi: f64,
    symmetric: bool,
    sign: f64,
    best_u: f64,
    best_abs: f64,
}

fn sign_runs(cfg: &PhantomConfig, r0: f64) -> Vec<SignRun> {
    let r2 = r0 * r0;
    let mut runs = Vec::new();
    for seg in segment_ray(cfg, r0) {
        let k = seg.k;
        let kf = factorial(k);
        let n = (16.0 * seg.oscillations()).ceil() as usize + 16;
        let at = |i: usize| seg.a + (seg.b - seg.a) * i as f64 / n as f64;
        let mut cur: Option<SignRun> = None;
        let mut prev_s = seg.a;
        for i in 0..=n {
            let s = at(i);
            let v = cfg.f_k(k, (r2 + s * s).sqrt()) / kf;
            let sg = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            };
            let edge = 0.5 * (prev_s + s);
            match cur.as_mut() {
                Some(run) if run.sign == sg => {
                    run.hi = s;
                    if v.abs() > run.best_abs {
                        run.best_abs = v.abs();
                        run.best_u = s;
                    }
                }
                _ => {
                    if let Some(mut run) = cur.take() {
                        run.hi = edge;
                        runs.push(run);
                    }
                    if sg != 0.0 {
                        let symmetric = i == 0 && seg.a == 0.0;
                        cur = Some(SignRun {
                            lo: if i == 0 { s } else { edge },
                            hi: s,
                            symmetric,
                            sign: sg,
                            best_u: s,
                            best_abs: v.abs(),
                        });
                    }
                }
            }
            prev_s = s;
        }
        if let Some(run) = cur.take() {
            runs.push(run);
        }
    }
    runs
}

/// Bump at the extremum of f on the line at distance r0 whose sign is
/// opposite to that of I = G(r0) (any sign when |I| is below the floor).
pub fn choose_local_bump(cfg: &PhantomConfig, r0: f64, spec: &QuadratureSpec) -> Result<LocalBump> {
    if !(r0 >= 0.0 && r0 < 1.0) {
        return Err(Error::Domain(format!(
            "local bump needs 0 <= r0 < 1, got {r0}"
        )));
    }
    let tv = weighted_integral(cfg, r0, |_| 1.0, spec)?;
    let i = tv.value;
    let i_floor = GUARD_FACTOR * tv.normalizer;
    let target = if i.abs() > i_floor { -i.signum() } else { 0.0 };
    let mut best: Option<SignRun> = None;
    for run in sign_runs(cfg, r0) {
        if target != 0.0 && run.sign != target {
            continue;
        }
        if best.map_or(true, |b| run.best_abs > b.best_abs) {
            best = Some(run);
        }
    }
    let Some(run) = best else {
        return Err(Error::Resolution(format!(
            "no sign-constant interval of the required sign on the line r0 = {r0} at k_max = {}",
            cfg.k_max
        )));
    };
    let u = run.best_u;
    let w = if run.symmetric {
        run.hi - u
    } else {
        (0.5 * (run.hi - run.lo)).min(u - run.lo).min(run.hi - u)
    };
    if !(w > 0.0) {
        return Err(Error::Resolution(format!(
            "sign-constant interval around u = {u} is not resolved on the line r0 = {r0}"
        )));
    }
    let bump = LocalBump::new(u, w)?;
    let j = bump_integral(cfg, &bump, r0, spec)?;
    let floor = GUARD_FACTOR * bump.mass();
    if !(j.abs() >= floor) {
        return Err(Error::Guard {
            what: "integral of f psi",
            value: j.abs(),
            floor,
        });
    }
    if target != 0.0 && j.signum() != target {
        return Err(Error::Resolution(format!(
            "bump at u = {u} gives the wrong sign of the integral of f psi at r0 = {r0}"
        )));
    }
    Ok(bump)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalWeight {
    pub r0: f64,
    pub eps0: f64,
    pub bump: LocalBump,
    /// G(r0) and J(r0).
    pub i0: f64,
    pub j0: f64,
}

impl LocalWeight {
    /// The band J = (r0 - eps0, r0 + eps0) intersected with [0, inf).
    pub fn interval(&self) -> (f64, f64) {
        ((self.r0 - self.eps0).max(0.0), self.r0 + self.eps0)
    }

    pub fn contains(&self, r: f64) -> bool {
        let (lo, hi) = self.interval();
        r >= lo && r <= hi
    }

    pub fn floor(&self) -> f64 {
        GUARD_FACTOR * self.bump.mass()
    }

    pub fn ray_data(
        &self,
        cfg: &PhantomConfig,
        r: f64,
        spec: &QuadratureSpec,
    ) -> Result<LocalRayData> {
        if !self.contains(r) {
            let (lo, hi) = self.interval();
            return Err(Error::Domain(format!(
                "r = {r} outside the band [{lo}, {hi}] of the local weight at r0 = {}",
                self.r0
            )));
        }
        line_data(cfg, &self.bump, r, spec, self.floor())
    }

    /// W(s) on a line with precomputed data.
    pub fn eval_with(&self, data: &LocalRayData, s: f64) -> f64 {
        let p = self.bump.eval(s);
        if p == 0.0 {
            return 1.0;
        }
        1.0 - p * data.g / data.j
    }

    pub fn eval(
        &self,
        cfg: &PhantomConfig,
        x: &[f64],
        theta: &[f64],
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        let (n, a) = checked_invariants(x, theta)?;
        let r = distance_from_invariants(n, a);
        let data = self.ray_data(cfg, r, spec)?;
        Ok(self.eval_with(&data, a))
    }
}

fn line_data(
    cfg: &PhantomConfig,
    bump: &LocalBump,
    r: f64,
    spec: &QuadratureSpec,
    floor: f64,
) -> Result<LocalRayData> {
    let j = bump_integral(cfg, bump, r, spec)?;
    if !(j.abs() >= floor) {
        return Err(Error::Guard {
            what: "integral of f psi",
            value: j.abs(),
            floor,
        });
    }
    Ok(LocalRayData {
        g: g_tilde(cfg, r, spec)?,
        j,
    })
}

pub fn local_weight_eval(
    lw: &LocalWeight,
    cfg: &PhantomConfig,
    x: &[f64],
    theta: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    lw.eval(cfg, x, theta, spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Epsilon0Result {
    pub eps0: f64,
    /// Row spacing of the certifying grid, eps0 / 32.
    pub spacing: f64,
    /// (eps, passed) for every candidate tried, in order.
    pub trials: Vec<(f64, bool)>,
}

/// Memoised line data for one bump, keyed by the exact bits of r.
struct Memo<'a> {
    cfg: &'a PhantomConfig,
    bump: &'a LocalBump,
    spec: &'a QuadratureSpec,
    rows: HashMap<u64, Option<LocalRayData>>,
}

impl Memo<'_> {
    fn fill(&mut self, rs: &[f64]) -> Result<()> {
        let missing: Vec<f64> = rs
            .iter()
            .copied()
            .filter(|r| !self.rows.contains_key(&r.to_bits()))
            .collect();
        let floor = GUARD_FACTOR * self.bump.mass();
        let got: Vec<Option<LocalRayData>> = missing
            .par_iter()
            .map(
                |&r| match line_data(self.cfg, self.bump, r, self.spec, floor) {
                    Ok(d) => Ok(Some(d)),
                    Err(Error::Guard { .. }) => Ok(None),
                    Err(e) => Err(e),
                },
            )
            .collect::<Result<_>>()?;
        for (r, d) in missing.into_iter().zip(got) {
            self.rows.insert(r.to_bits(), d);
        }
        Ok(())
    }

    /// Grid rows r0 + j eps/32, j = -32..=32, kept where r >= 0 (plus r = 0
    /// when the band reaches below 0).
    fn rows_for(r0: f64, eps: f64) -> Vec<f64> {
        let n = ROWS_PER_EPS as i64;
        let mut rows: Vec<f64> = (-n..=n)
            .map(|j| r0 + eps * j as f64 / n as f64)
            .filter(|&r| r >= 0.0)
            .collect();
        if r0 - eps < 0.0 && rows.first() != Some(&0.0) {
            rows.insert(0, 0.0);
        }
        rows
    }

    fn passes(&mut self, r0: f64, eps: f64) -> Result<bool> {
        let rows = Self::rows_for(r0, eps);
        self.fill(&rows)?;
        let smax = self.bump.support_max();
        for r in rows {
            let Some(d) = self.rows[&r.to_bits()] else {
                return Ok(false);
            };
            for i in 0..=S_SAMPLES {
                let s = smax * i as f64 / S_SAMPLES as f64;
                let w = 1.0 - self.bump.eval(s) * d.g / d.j;
                if !(w >= 0.5) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Largest certified eps found by dyadic descent from `eps_start` followed by
/// bisection; the band's right end stays below `cap`.
pub fn find_epsilon0(
    cfg: &PhantomConfig,
    r0: f64,
    bump: &LocalBump,
    spec: &QuadratureSpec,
    cap: f64,
    eps_start: f64,
) -> Result<Epsilon0Result> {
    if !(r0 >= 0.0 && r0 < cap) {
        return Err(Error::Domain(format!("r0 = {r0} must lie in [0, {cap})")));
    }
    let mut memo = Memo {
        cfg,
        bump,
        spec,
        rows: HashMap::new(),
    };
    let top = eps_start.min((cap - r0) * (1.0 - 1e-9));
    let mut trials = Vec::new();
    let mut eps = top;
    loop {
        if eps < EPS_MIN {
            return Err(Error::Construction(format!(
                "no certified eps >= {EPS_MIN} for the local weight at r0 = {r0}"
            )));
        }
        let ok = memo.passes(r0, eps)?;
        trials.push((eps, ok));
        if ok {
            break;
        }
        eps *= 0.5;
    }
    if eps < top {
        let (mut lo, mut hi) = (eps, (2.0 * eps).min(top));
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let ok = memo.passes(r0, mid)?;
            trials.push((mid, ok));
            if ok {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        eps = lo;
    }
    Ok(Epsilon0Result {
        eps0: eps,
        spacing: eps / ROWS_PER_EPS as f64,
        trials,
    })
}

/// Bump selection and eps certification at r0.
pub fn build_local_weight(
    cfg: &PhantomConfig,
    r0: f64,
    spec: &QuadratureSpec,
    cap: f64,
    eps_start: f64,
) -> Result<(LocalWeight, Epsilon0Result)> {
    let bump = choose_local_bump(cfg, r0, spec)?;
    let search = find_epsilon0(cfg, r0, &bump, spec, cap, eps_start)?;
    let data = line_data(cfg, &bump, r0, spec, GUARD_FACTOR * bump.mass())?;
    Ok((
        LocalWeight {
            r0,
            eps0: search.eps0,
            bump,
            i0: data.g,
            j0: data.j,
        },
        search,
    ))
}

/// Relative residuals of P_W f for the local weight on lines inside its band.
pub fn verify_local_vanishing(
    lw: &LocalWeight,
    cfg: &PhantomConfig,
    rays: &[crate::Ray],
    spec: &QuadratureSpec,
) -> Result<Vec<RayResidual>> {
    rays.par_iter()
        .map(|ray| {
            let r = ray.distance();
            let d = lw.ray_data(cfg, r, spec)?;
            let tv = weighted_integral(cfg, r, |s| lw.eval_with(&d, s), spec)?;
            Ok(RayResidual::new(r, tv))
        })
        .collect()
}

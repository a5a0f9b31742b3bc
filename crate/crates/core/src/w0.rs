//! The boundary weight W0(x, theta) = U0(x . theta, r) on lines at distance
//! r > 1/2, the delta0 search and the empirical bound sweeps.
//!
//! Two forms of U0 are provided. `Dyadic` is the three-term formula
//! 1 - G(r) sum_k k! f_k(t) psi_{k-2}(r) / H_k(r). `Tilted` replaces the
//! dyadic redistribution by 1 - G(r) E(t) exp(-sgn G(r) c F(t)) / D(r), with
//! E the annulus envelope, F = sum_k f_k and D the ray integral of f E exp(..).
//! Both integrate f to zero on every line with r > 1/2 inside the horizon;
//! the tilted form is >= 1 wherever D has the sign opposite to G.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::factorial;
use crate::profiles::DyadicPartition;
use crate::quadrature::{
    g_tilde, g_tilde_prime, h_tilde_k, h_tilde_k_prime, integrate_segment, segment_for,
    segment_ray, weighted_integral, AxialWeight, OscillatorySegment, QuadratureSpec, RayResidual,
};
use crate::PhantomConfig;

/// H_k(r) must stay above H_FLOOR * 2^-k wherever psi_{k-2}(r) > 0.
pub const H_FLOOR: f64 = 1e-3;
/// Default tilt strength c of the tilted form.
pub const DEFAULT_TILT: f64 = 2.0;
/// Upper end (exclusive) of the admissible Hoelder exponents.
pub const HOLDER_ALPHA_MAX: f64 = 1.0 / 16.0;
/// Shell samples per oscillation used by the sweeps.
pub const SAMPLES_PER_OSCILLATION: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum W0Kind {
    Dyadic,
    Tilted { strength: f64 },
}

impl Default for W0Kind {
    fn default() -> Self {
        W0Kind::Tilted {
            strength: DEFAULT_TILT,
        }
    }
}

/// Everything U0 needs from the line at distance r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RayData {
    /// U0 = 1 on the whole line.
    Unit,
    /// G(r) and (k, k! psi_{k-2}(r) / H_k(r)) for the nonzero window terms.
    Dyadic { g: f64, terms: Vec<(u32, f64)> },
    /// G(r), its sign, and the tilted denominator D(r).
    Tilted { g: f64, sign: f64, denom: f64 },
}

#[derive(Debug, Clone)]
pub struct W0Evaluator {
    cfg: PhantomConfig,
    partition: DyadicPartition,
    spec: QuadratureSpec,
    kind: W0Kind,
    table: BTreeMap<u64, RayData>,
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.5) {
        return Err(Error::Domain(format!(
            "W0 is defined only for r > 1/2, got {r}"
        )));
    }
    Ok(())
}

impl W0Evaluator {
    pub fn new(cfg: PhantomConfig, spec: QuadratureSpec, kind: W0Kind) -> Result<Self> {
        cfg.validate()?;
        spec.validate()?;
        if let W0Kind::Tilted { strength } = kind {
            if !(strength > 0.0 && strength.is_finite()) {
                return Err(Error::Config(format!(
                    "tilt strength must be positive, got {strength}"
                )));
            }
        }
        let partition = DyadicPartition::with_closed_top(cfg.k_max - 2)?;
        Ok(Self {
            cfg,
            partition,
            spec,
            kind,
            table: BTreeMap::new(),
        })
    }

    /// Precomputes the line data on `grid`; lookups are exact-node only.
    pub fn with_table(mut self, grid: &[f64]) -> Result<Self> {
        for &r in grid {
            check_r(r)?;
        }
        let rows: Vec<RayData> = grid
            .par_iter()
            .map(|&r| self.compute_ray_data(r))
            .collect::<Result<_>>()?;
        for (&r, d) in grid.iter().zip(rows) {
            self.table.insert(r.to_bits(), d);
        }
        Ok(self)
    }

    pub fn cfg(&self) -> &PhantomConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn kind(&self) -> W0Kind {
        self.kind
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    /// Table nodes in increasing order.
    pub fn table_nodes(&self) -> Vec<f64> {
        self.table.keys().map(|&b| f64::from_bits(b)).collect()
    }

    /// Truncation horizon 1 - 2^(-k_max + 1); U0 = 1 beyond it.
    pub fn horizon(&self) -> f64 {
        self.cfg.horizon()
    }

    pub fn ray_data(&self, r: f64) -> Result<RayData> {
        check_r(r)?;
        match self.table.get(&r.to_bits()) {
            Some(d) => Ok(d.clone()),
            None => self.compute_ray_data(r),
        }
    }

    /// Line data computed from scratch, bypassing the table.
    pub fn compute_ray_data(&self, r: f64) -> Result<RayData> {
        check_r(r)?;
        if r >= 1.0 || r > self.horizon() {
            return Ok(RayData::Unit);
        }
        let g = g_tilde(&self.cfg, r, &self.spec)?;
        if g == 0.0 {
            return Ok(RayData::Unit);
        }
        match self.kind {
            W0Kind::Dyadic => {
                let mut terms = Vec::with_capacity(3);
                for j in self.partition.active(r) {
                    let psi: f64 = self.partition.psi_unchecked(j, r);
                    if psi == 0.0 {
                        continue;
                    }
                    let k = j + 2;
                    let h = h_tilde_k(&self.cfg, k, r, &self.spec)?;
                    let floor = H_FLOOR * 2f64.powi(-(k as i32));
                    if !(h >= floor) {
                        return Err(Error::Guard {
                            what: "H_k",
                            value: h,
                            floor,
                        });
                    }
                    terms.push((k, factorial(k) * psi / h));
                }
                if terms.len() > 3 {
                    return Err(Error::Construction(format!(
                        "{} window terms at r = {r}; at most 3 expected",
                        terms.len()
                    )));
                }
                Ok(RayData::Dyadic { g, terms })
            }
            W0Kind::Tilted { strength } => {
                let sign = g.signum();
                let (denom, mag) = self.tilt_denominator(r, sign, strength)?;
                let floor = 1e-12 * mag;
                if !(denom.abs() > floor) {
                    return Err(Error::Guard {
                        what: "tilt denominator",
                        value: denom.abs(),
                        floor,
                    });
                }
                if denom * sign >= 0.0 {
                    return Err(Error::Construction(format!(
                        "tilt denominator {denom:e} has the sign of G = {g:e} at r = {r}"
                    )));
                }
                Ok(RayData::Tilted { g, sign, denom })
            }
        }
    }

    fn tilt_denominator(&self, r: f64, sign: f64, c: f64) -> Result<(f64, f64)> {
        let r2 = r * r;
        let mut total = 0.0;
        let mut mag = 0.0;
        for seg in segment_ray(&self.cfg, r) {
            let k = seg.k;
            let kf = factorial(k);
            let res = integrate_segment(
                &|s: f64| {
                    let t = (r2 + s * s).sqrt();
                    let e = self.cfg.envelope(k, t);
                    if e == 0.0 {
                        return 0.0;
                    }
                    let f = e * self.cfg.phase(k, t).cos();
                    f * e * (-sign * c * f).exp() / kf
                },
                &seg,
                &self.spec,
            )?;
            total += res.value;
            mag += res.magnitude;
        }
        Ok((2.0 * total, 2.0 * mag))
    }

    /// U0(s, r) from precomputed line data.
    pub fn u0_with(&self, data: &RayData, s: f64, r: f64) -> f64 {
        let t = r.hypot(s);
        if t >= 1.0 {
            return 1.0;
        }
        match *data {
            RayData::Unit => 1.0,
            RayData::Dyadic { g, ref terms } => {
                let sum: f64 = terms.iter().map(|&(k, c)| c * self.cfg.f_k(k, t)).sum();
                1.0 - g * sum
            }
            RayData::Tilted { g, sign, denom } => {
                let c = match self.kind {
                    W0Kind::Tilted { strength } => strength,
                    W0Kind::Dyadic => 0.0,
                };
                match self.cfg.annulus_of(t) {
                    None => 1.0,
                    Some(k) => {
                        let f = self.cfg.f_k(k, t);
                        1.0 - g * self.cfg.envelope(k, t) * (-sign * c * f).exp() / denom
                    }
                }
            }
        }
    }

    pub fn u0(&self, s: f64, r: f64) -> Result<f64> {
        check_r(r)?;
        if r >= 1.0 || r.hypot(s) >= 1.0 {
            return Ok(1.0);
        }
        let data = self.ray_data(r)?;
        Ok(self.u0_with(&data, s, r))
    }

    /// W0(x, theta), read through (|x|, |x . theta|).
    pub fn w0(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        let (n, a) = checked_invariants(x, theta)?;
        let r = distance_from_invariants(n, a);
        self.u0(a, r)
    }

    /// Segments (s >= 0) on which U0 can differ from 1.
    pub fn active_segments(&self, data: &RayData, r: f64) -> Vec<OscillatorySegment> {
        match data {
            RayData::Unit => Vec::new(),
            RayData::Dyadic { terms, .. } => terms
                .iter()
                .filter_map(|&(k, _)| segment_for(&self.cfg, k, r))
                .collect(),
            RayData::Tilted { .. } => segment_ray(&self.cfg, r),
        }
    }

    /// (min, max) of U0 over the sampled shell of the line at distance r,
    /// `per_osc` equispaced samples per oscillation on every active segment.
    pub fn extremes(&self, data: &RayData, r: f64, per_osc: f64) -> (f64, f64) {
        let mut lo = 1.0f64;
        let mut hi = 1.0f64;
        for seg in self.active_segments(data, r) {
            let n = (seg.oscillations() * per_osc).ceil() as usize + 2;
            for i in 0..=n {
                let s = seg.a + (seg.b - seg.a) * i as f64 / n as f64;
                let u = self.u0_with(data, s, r);
                lo = lo.min(u);
                hi = hi.max(u);
            }
        }
        (lo, hi)
    }
}

impl AxialWeight for W0Evaluator {
    fn along(&self, r: f64) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync + '_>> {
        let data = self.ray_data(r)?;
        Ok(Box::new(move |s| self.u0_with(&data, s, r)))
    }
}

/// (|x|, |x . theta|) with theta checked to be a unit vector.
pub fn checked_invariants(x: &[f64], theta: &[f64]) -> Result<(f64, f64)> {
    crate::geometry::ray_coords(x, theta)?;
    Ok(crate::geometry::invariants(x, theta))
}

/// Line distance r = sqrt(|x|^2 - (x . theta)^2) from the invariants.
pub fn distance_from_invariants(n: f64, a: f64) -> f64 {
    ((n - a) * (n + a)).max(0.0).sqrt()
}

pub fn u0_eval(ev: &W0Evaluator, s: f64, r: f64) -> Result<f64> {
    ev.u0(s, r)
}

pub fn w0_eval(ev: &W0Evaluator, x: &[f64], theta: &[f64]) -> Result<f64> {
    ev.w0(x, theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta0Result {
    pub delta0: f64,
    pub spacing: f64,
    /// Sampled minimum of W0 over grid rows with r > delta0.
    pub min_above: f64,
    /// Grid rows computed (rows beyond the horizon are 1 without computation).
    pub rows: usize,
    pub failing_rows: usize,
}

/// Smallest grid point delta0 such that every sampled row r > delta0 of the
/// grid 1/2 + j h has min_s W0 >= 1/2.
pub fn find_delta0(ev: &W0Evaluator, h: f64) -> Result<Delta0Result> {
    let k_max = ev.cfg.k_max;
    if !(h > 0.0 && h <= 2f64.powi(-(k_max as i32) - 2)) {
        return Err(Error::Config(format!(
            "delta0 grid spacing must lie in (0, 2^-{}], got {h}",
            k_max + 2
        )));
    }
    let horizon = ev.horizon();
    let grid: Vec<f64> = (1..)
        .map(|j| 0.5 + j as f64 * h)
        .take_while(|&r| r < 1.0)
        .collect();
    let mins: Vec<f64> = grid
        .par_iter()
        .map(|&r| {
            if r > horizon {
                return Ok(1.0);
            }
            let data = ev.ray_data(r)?;
            Ok(ev.extremes(&data, r, SAMPLES_PER_OSCILLATION).0)
        })
        .collect::<Result<_>>()?;
    let last_fail = mins.iter().rposition(|&m| m < 0.5);
    let idx = last_fail.unwrap_or(0);
    let delta0 = grid[idx];
    if !(delta0 < 1.0) || idx + 1 >= grid.len() {
        return Err(Error::Construction(format!(
            "no delta0 < 1 found on grid of spacing {h}"
        )));
    }
    let min_above = mins[idx + 1..].iter().fold(f64::INFINITY, |m, &v| m.min(v));
    Ok(Delta0Result {
        delta0,
        spacing: h,
        min_above,
        rows: grid.iter().filter(|&&r| r <= horizon).count(),
        failing_rows: mins.iter().filter(|&&m| m < 0.5).count(),
    })
}

/// Relative residual of P_{W0} f on each line (all with r > 1/2).
pub fn check_vanishing_w0(
    ev: &W0Evaluator,
    rays: &[crate::Ray],
    spec: &QuadratureSpec,
) -> Result<Vec<RayResidual>> {
    for ray in rays {
        check_r(ray.distance())?;
    }
    rays.par_iter()
        .map(|ray| {
            let r = ray.distance();
            let along = ev.along(r)?;
            let tv = weighted_integral(&ev.cfg, r, |s| along(s), spec)?;
            Ok(RayResidual::new(r, tv))
        })
        .collect()
}

/// (r, s, U0) rows for the product grid, r-major.
pub fn u0_table(ev: &W0Evaluator, rs: &[f64], ss: &[f64]) -> Result<Vec<[f64; 3]>> {
    let blocks: Vec<Vec<[f64; 3]>> = rs
        .par_iter()
        .map(|&r| {
            let data = ev.ray_data(r)?;
            Ok(ss
                .iter()
                .map(|&s| [r, s, ev.u0_with(&data, s, r)])
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(blocks.concat())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Row {
    pub r: f64,
    pub m: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Report {
    pub rows: Vec<Lemma4Row>,
    /// max rho.
    pub c0: f64,
    pub median_rho: f64,
    pub max_over_median: f64,
    /// Spearman rank correlation of M against r (rows with r < 1).
    pub spearman: f64,
}

/// n points equispaced strictly inside (1/2, horizon).
pub fn lemma4_grid(cfg: &PhantomConfig, n: usize) -> Vec<f64> {
    let h = cfg.horizon();
    (0..n)
        .map(|i| 0.5 + (h - 0.5) * (i as f64 + 0.5) / n as f64)
        .collect()
}

/// Envelope (1 - r)^(1/2) log2^4(1/(1 - r)).
pub fn lemma4_envelope(r: f64) -> f64 {
    let d = 1.0 - r;
    d.sqrt() * (1.0 / d).log2().powi(4)
}

pub fn bound_sweep_lemma4(ev: &W0Evaluator, grid: &[f64]) -> Result<Lemma4Report> {
    let rows: Vec<Lemma4Row> = grid
        .par_iter()
        .map(|&r| {
            check_r(r)?;
            if r >= 1.0 {
                return Ok(Lemma4Row {
                    r,
                    m: 0.0,
                    rho: 0.0,
                });
            }
            let data = ev.ray_data(r)?;
            let (lo, hi) = ev.extremes(&data, r, SAMPLES_PER_OSCILLATION);
            let m = (1.0 - lo).abs().max((hi - 1.0).abs());
            Ok(Lemma4Row {
                r,
                m,
                rho: m / lemma4_envelope(r),
            })
        })
        .collect::<Result<_>>()?;
    let c0 = rows.iter().fold(0.0f64, |a, w| a.max(w.rho));
    let median_rho = median(rows.iter().filter(|w| w.r < 1.0).map(|w| w.rho).collect());
    let inner: Vec<&Lemma4Row> = rows.iter().filter(|w| w.r < 1.0).collect();
    let spearman = spearman(
        &inner.iter().map(|w| w.r).collect::<Vec<_>>(),
        &inner.iter().map(|w| w.m).collect::<Vec<_>>(),
    );
    Ok(Lemma4Report {
        rows,
        c0,
        median_rho,
        max_over_median: if median_rho > 0.0 {
            c0 / median_rho
        } else {
            f64::INFINITY
        },
        spearman,
    })
}

/// Committed deviation C0 (1 - h)^(1/2) log2^4(1/(1 - h)) at the horizon h.
pub fn truncation_budget(cfg: &PhantomConfig, c0: f64) -> f64 {
    c0 * lemma4_envelope(cfg.horizon())
}

pub fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for &p in &idx[i..=j] {
            out[p] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma5Item {
    pub name: String,
    /// (k, max ratio over the sampled r or t grid).
    pub ratios: Vec<(u32, f64)>,
    /// Fitted constant: max ratio over k.
    pub fitted: f64,
    /// max/min of the ratios over k.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma5Report {
    pub items: Vec<Lemma5Item>,
    /// min over k and grid of H_k(r) 2^k on supp psi_{k-2}.
    pub min_h_scaled: f64,
    pub h_floor_ok: bool,
}

fn item(name: &str, ratios: Vec<(u32, f64)>) -> Lemma5Item {
    let fitted = ratios.iter().fold(0.0f64, |a, &(_, v)| a.max(v));
    let least = ratios.iter().fold(f64::INFINITY, |a, &(_, v)| a.min(v));
    Lemma5Item {
        name: name.to_string(),
        ratios,
        fitted,
        spread: if least > 0.0 {
            fitted / least
        } else {
            f64::INFINITY
        },
    }
}

/// Per-k maxima of the Lemma 5 quantities divided by their growth envelopes,
/// for k = 3..=k_max, with `points` r-samples per k.
pub fn bound_sweep_lemma5(ev: &W0Evaluator, points: usize) -> Result<Lemma5Report> {
    let cfg = &ev.cfg;
    let spec = &ev.spec;
    let ks: Vec<u32> = (3..=cfg.k_max).collect();
    struct Row {
        fp: f64,
        ph: f64,
        phd: f64,
        g: f64,
        gd: f64,
        hmin: f64,
    }
    let rows: Vec<Row> = ks
        .par_iter()
        .map(|&k| {
            let kk = k as i32;
            let eight_k = 8f64.powi(kk);
            let two_k = 2f64.powi(kk);
            let kf = factorial(k);
            // |f_k'| over annulus k.
            let (lo, hi) = cfg.annulus(k);
            let osc = eight_k * (hi * hi - lo * lo) / std::f64::consts::TAU;
            let n = (16.0 * osc).ceil() as usize + 64;
            let fp = (0..=n)
                .map(|i| cfg.f_k_deriv(k, lo + (hi - lo) * i as f64 / n as f64).abs())
                .fold(0.0f64, f64::max)
                / eight_k;
            // psi_{k-2}/H_k and its r-derivative on (1 - 2^{-k+3}, 1 - 2^{-k+1}).
            let (a, b) = (1.0 - 2f64.powi(3 - kk), 1.0 - 2f64.powi(1 - kk));
            let j = k - 2;
            let mut ph = 0.0f64;
            let mut phd = 0.0f64;
            let mut hmin = f64::INFINITY;
            for i in 0..points {
                let r = a + (b - a) * (i as f64 + 0.5) / points as f64;
                let psi: f64 = ev.partition.psi_unchecked(j, r);
                let dpsi = ev.partition.psi_deriv(j, r);
                let h = h_tilde_k(cfg, k, r, spec)?;
                let dh = h_tilde_k_prime(cfg, k, r, spec)?;
                hmin = hmin.min(h * two_k);
                ph = ph.max((psi / h).abs());
                phd = phd.max((dpsi / h - psi * dh / (h * h)).abs());
            }
            // G and G' on [1 - 2^-k, 1).
            let a = 1.0 - 2f64.powi(-kk);
            let mut g = 0.0f64;
            let mut gd = 0.0f64;
            for i in 0..points {
                let r = a + (1.0 - a) * i as f64 / points as f64;
                g = g.max(g_tilde(cfg, r, spec)?.abs());
                gd = gd.max(g_tilde_prime(cfg, r, spec)?.abs());
            }
            Ok(Row {
                fp,
                ph: ph / two_k,
                phd: phd / 2f64.powi(5 * kk),
                g: g * kf * (2.0 * std::f64::consts::SQRT_2).powi(kk),
                gd: gd * kf / eight_k,
                hmin,
            })
        })
        .collect::<Result<_>>()?;
    let col = |f: &dyn Fn(&Row) -> f64| ks.iter().zip(&rows).map(|(&k, w)| (k, f(w))).collect();
    let min_h_scaled = rows.iter().fold(f64::INFINITY, |m, w| m.min(w.hmin));
    Ok(Lemma5Report {
        items: vec![
            item("f_prime_over_8k", col(&|w| w.fp)),
            item("psi_over_h_over_2k", col(&|w| w.ph)),
            item("psi_over_h_deriv_over_32k", col(&|w| w.phd)),
            item("g_times_kfact_2sqrt2k", col(&|w| w.g)),
            item("g_prime_times_kfact_over_8k", col(&|w| w.gd)),
        ],
        min_h_scaled,
        h_floor_ok: min_h_scaled >= H_FLOOR,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub alpha: f64,
    pub pairs: usize,
    pub seed: u64,
    pub max_quotient: f64,
    pub p99: f64,
    /// (s, r, s', r') attaining the max.
    pub argmax: [f64; 4],
}

/// Nodes for the Hoelder sweep table: n points equispaced in (1/2, horizon].
pub fn holder_nodes(cfg: &PhantomConfig, n: usize) -> Vec<f64> {
    let h = cfg.horizon();
    (1..=n)
        .map(|i| 0.5 + (h - 0.5) * i as f64 / n as f64)
        .collect()
}

/// max |U0 - U0'| / (|s - s'|^alpha + |r - r'|^alpha) over random pairs.
///
/// r is drawn from the evaluator's table nodes (or from [1, 3/2], where
/// U0 = 1), s from the active shell of that line; the partner point moves s by
/// a log-uniform step in (1e-7, 1) and r to a neighbouring node.
pub fn holder_sweep(ev: &W0Evaluator, alpha: f64, pairs: usize, seed: u64) -> Result<HolderReport> {
    if !(alpha > 0.0 && alpha < HOLDER_ALPHA_MAX) {
        return Err(Error::Config(format!(
            "Hoelder exponent must lie in (0, 1/16), got {alpha}"
        )));
    }
    let nodes = ev.table_nodes();
    if nodes.is_empty() {
        return Err(Error::Config("Hoelder sweep needs a node table".into()));
    }
    let data: Vec<RayData> = nodes
        .iter()
        .map(|&r| ev.ray_data(r))
        .collect::<Result<_>>()?;
    let segs: Vec<Vec<OscillatorySegment>> = nodes
        .iter()
        .zip(&data)
        .map(|(&r, d)| ev.active_segments(d, r))
        .collect();
    let n = nodes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng, i: usize| -> (f64, RayData, f64) {
        if i >= n {
            return (
                1.0 + 0.5 * rng.random::<f64>(),
                RayData::Unit,
                rng.random_range(-1.0..1.0),
            );
        }
        let r = nodes[i];
        let s = if segs[i].is_empty() {
            rng.random_range(-1.0..1.0)
        } else {
            let seg = segs[i][rng.random_range(0..segs[i].len())];
            let s = seg.a + (seg.b - seg.a) * rng.random::<f64>();
            if rng.random::<bool>() {
                -s
            } else {
                s
            }
        };
        (r, data[i].clone(), s)
    };
    let mut qs = Vec::with_capacity(pairs);
    let mut best = (0.0f64, [0.0; 4]);
    for _ in 0..pairs {
        let i = rng.random_range(0..=n);
        let (r, d, s) = point(&mut rng, i);
        let j = if rng.random::<bool>() {
            i
        } else {
            (i as i64 + rng.random_range(-2i64..=2)).clamp(0, n as i64) as usize
        };
        let (r2, d2) = if j == i {
            (r, d.clone())
        } else if j >= n {
            (1.0 + 0.5 * rng.random::<f64>(), RayData::Unit)
        } else {
            (nodes[j], data[j].clone())
        };
        let step = 10f64.powf(-7.0 * rng.random::<f64>()) * rng.random::<f64>();
        let s2 = if rng.random::<bool>() {
            s + step
        } else {
            s - step
        };
        let u = ev.u0_with(&d, s, r);
        let u2 = ev.u0_with(&d2, s2, r2);
        let den = (s - s2).abs().powf(alpha) + (r - r2).abs().powf(alpha);
        let q = if den > 0.0 { (u - u2).abs() / den } else { 0.0 };
        if q > best.0 {
            best = (q, [s, r, s2, r2]);
        }
        qs.push(q);
    }
    qs.sort_by(f64::total_cmp);
    let p99 = if qs.is_empty() {
        0.0
    } else {
        qs[((qs.len() - 1) as f64 * 0.99).floor() as usize]
    };
    Ok(HolderReport {
        alpha,
        pairs,
        seed,
        max_quotient: best.0,
        p99,
        argmax: best.1,
    })
}

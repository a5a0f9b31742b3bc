//! Greedy cover of [0, delta0] by local weights, the assembled weight
//! W = phi1 (xi_0 W0 + sum xi_i W_i) + phi2, full verification over
//! stratified lines, and the weight document.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::{build_local_weight, Epsilon0Result, LocalRayData, LocalWeight};
use crate::multidim::{MultiKernelConfig, SliceConfig};
use crate::quadrature::{weighted_integral, AxialWeight, QuadratureSpec, RayResidual};
use crate::sampling::{random_ray, rng, stratified};
use crate::w0::{
    bound_sweep_lemma4, bound_sweep_lemma5, checked_invariants, distance_from_invariants,
    find_delta0, lemma4_grid, truncation_budget, Delta0Result, RayData, W0Evaluator, W0Kind,
};
use crate::{BumpProfile, PhantomConfig, RadialPair, SubordinatePartition};

pub const SCHEMA: &str = "wrtlab-weight/1";
pub const DEFAULT_OUTER_RADIUS: f64 = 2.0;
/// Largest eps tried for a local weight.
pub const DEFAULT_EPS_START: f64 = 0.25;
/// Hard limit on the number of local weights.
pub const MAX_COVER: usize = 10_000;
/// r-grid size for the fitted Lemma 4 constant.
pub const LEMMA4_POINTS: usize = 50;
/// Lines per annulus for the fitted envelope constants.
pub const LEMMA5_POINTS: usize = 24;

/// Row spacing 2^-(k_max + 3) of the delta0 search.
pub fn delta0_spacing(k_max: u32) -> f64 {
    2f64.powi(-(k_max as i32) - 3)
}

/// One greedy step of the cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverStep {
    pub weight: LocalWeight,
    pub search: Epsilon0Result,
}

/// Greedy half-overlap march r_1 = 0, r_{i+1} = r_i + eps_i / 2, stopping
/// after the first step with r_i + eps_i / 2 > delta0. Bands stay below
/// (1 + delta0) / 2.
pub fn build_cover(
    cfg: &PhantomConfig,
    delta0: f64,
    spec: &QuadratureSpec,
    eps_start: f64,
) -> Result<Vec<CoverStep>> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::Config(format!(
            "delta0 must lie in (0, 1), got {delta0}"
        )));
    }
    if !(eps_start > 0.0) {
        return Err(Error::Config(format!(
            "eps_start must be positive, got {eps_start}"
        )));
    }
    let cap = 0.5 * (1.0 + delta0);
    let mut steps = Vec::new();
    let mut r = 0.0;
    let mut start = eps_start;
    loop {
        if steps.len() >= MAX_COVER {
            return Err(Error::Construction(format!(
                "cover exceeds {MAX_COVER} local weights at r = {r}"
            )));
        }
        let (weight, search) = build_local_weight(cfg, r, spec, cap, start)?;
        let eps = weight.eps0;
        steps.push(CoverStep { weight, search });
        let next = r + 0.5 * eps;
        if next > delta0 {
            return Ok(steps);
        }
        r = next;
        start = (2.0 * eps).min(eps_start);
    }
}

/// Constants measured at build time with the dyadic W0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedConstants {
    /// max rho over the Lemma 4 grid.
    pub lemma4_c0: f64,
    pub lemma4_median: f64,
    /// (item, fitted constant) for the Lemma 5 envelopes.
    pub lemma5: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudgets {
    /// Bound on |1 - U0| on lines past the horizon, C0 times the envelope
    /// there; absent when no constants were fitted.
    pub truncation: Option<f64>,
    /// sum over k > k_max of 1/k!.
    pub tail: f64,
    /// Rounding error of cos(8^k t^2) at k = k_max.
    pub cos_argument: f64,
    pub quadrature_rel_tol: f64,
}

/// Every input needed to evaluate W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parts {
    pub cfg: PhantomConfig,
    pub spec: QuadratureSpec,
    pub w0: W0Kind,
    pub delta0: Delta0Result,
    pub cover: Vec<LocalWeight>,
    pub outer_radius: f64,
}

#[derive(Debug, Clone)]
pub struct AssembledWeight {
    parts: Parts,
    w0: W0Evaluator,
    partition: SubordinatePartition,
    radial: RadialPair,
}

/// What W needs on one line: the nonzero xi_i and the data of those weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LineData {
    pub r: f64,
    pub xi: Vec<(usize, f64)>,
    pub w0: Option<RayData>,
    /// (partition index, line data) for the active local weights.
    pub locals: Vec<(usize, LocalRayData)>,
}

pub fn assemble(parts: Parts) -> Result<AssembledWeight> {
    let d0 = parts.delta0.delta0;
    if !(d0 > 0.5 && d0 < 1.0) {
        return Err(Error::Assembly(format!(
            "delta0 must lie in (1/2, 1), got {d0}"
        )));
    }
    if parts.cover.is_empty() {
        return Err(Error::Assembly("empty cover".into()));
    }
    let radial = RadialPair::new(parts.outer_radius)?;
    let w0 = W0Evaluator::new(parts.cfg, parts.spec, parts.w0)?;
    let bands: Vec<(f64, f64)> = parts.cover.iter().map(|lw| (lw.r0, lw.eps0)).collect();
    let partition = SubordinatePartition::build(&bands, d0)?;
    for (i, (lw, &(c, e))) in parts.cover.iter().zip(partition.intervals()).enumerate() {
        let (lo, hi) = (lw.r0 - lw.eps0, lw.r0 + lw.eps0);
        let slack = 1e-12 * lw.eps0;
        if c - e < lo - slack || c + e > hi + slack {
            return Err(Error::Assembly(format!(
                "support ({}, {}) of xi_{} escapes the band ({lo}, {hi})",
                c - e,
                c + e,
                i + 1
            )));
        }
    }
    Ok(AssembledWeight {
        parts,
        w0,
        partition,
        radial,
    })
}

impl AssembledWeight {
    pub fn parts(&self) -> &Parts {
        &self.parts
    }

    pub fn cfg(&self) -> &PhantomConfig {
        &self.parts.cfg
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.parts.spec
    }

    pub fn delta0(&self) -> f64 {
        self.parts.delta0.delta0
    }

    pub fn outer_radius(&self) -> f64 {
        self.parts.outer_radius
    }

    pub fn horizon(&self) -> f64 {
        self.parts.cfg.horizon()
    }

    pub fn w0(&self) -> &W0Evaluator {
        &self.w0
    }

    pub fn cover(&self) -> &[LocalWeight] {
        &self.parts.cover
    }

    pub fn partition(&self) -> &SubordinatePartition {
        &self.partition
    }

    pub fn radial(&self) -> &RadialPair {
        &self.radial
    }

    pub fn line(&self, r: f64) -> Result<LineData> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!(
                "line distance must be finite and >= 0, got {r}"
            )));
        }
        let xi = self.partition.nonzero(r);
        let mut w0 = None;
        let mut locals = Vec::new();
        for &(i, _) in &xi {
            if i == 0 {
                w0 = Some(self.w0.ray_data(r)?);
            } else {
                let lw = &self.parts.cover[i - 1];
                locals.push((i, lw.ray_data(&self.parts.cfg, r, &self.parts.spec)?));
            }
        }
        Ok(LineData { r, xi, w0, locals })
    }

    /// W at axial coordinate s and radius t = |x| on a line with data `line`.
    pub fn eval_line(&self, line: &LineData, s: f64, t: f64) -> f64 {
        if t >= self.parts.outer_radius {
            return 1.0;
        }
        let mut inner = 0.0;
        let mut li = 0;
        for &(i, x) in &line.xi {
            let w = if i == 0 {
                match &line.w0 {
                    Some(d) => self.w0.u0_with(d, s, line.r),
                    None => 1.0,
                }
            } else {
                let (j, ref d) = line.locals[li];
                li += 1;
                debug_assert_eq!(i, j);
                self.parts.cover[i - 1].eval_with(d, s)
            };
            inner += x * w;
        }
        self.radial.phi1(t) * inner + self.radial.phi2(t)
    }

    /// W(x, theta), read through (|x|, |x . theta|).
    pub fn eval(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        let (n, a) = checked_invariants(x, theta)?;
        if n >= self.parts.outer_radius {
            return Ok(1.0);
        }
        let r = distance_from_invariants(n, a);
        let line = self.line(r)?;
        Ok(self.eval_line(&line, a, n))
    }

    /// Relative residual of P_W f on each line.
    pub fn verify(&self, rays: &[crate::Ray]) -> Result<Vec<RayResidual>> {
        rays.par_iter()
            .map(|ray| {
                let r = ray.distance();
                let along = self.along(r)?;
                let tv = weighted_integral(&self.parts.cfg, r, |s| along(s), &self.parts.spec)?;
                Ok(RayResidual::new(r, tv))
            })
            .collect()
    }

    pub fn to_document(
        &self,
        fitted: Option<FittedConstants>,
        manifest: serde_json::Value,
    ) -> WeightDocument {
        let cfg = &self.parts.cfg;
        let budgets = ErrorBudgets {
            truncation: fitted.as_ref().map(|f| truncation_budget(cfg, f.lemma4_c0)),
            tail: cfg.tail_bound(),
            cos_argument: cfg.cos_argument_budget(),
            quadrature_rel_tol: self.parts.spec.rel_tol,
        };
        WeightDocument {
            schema: SCHEMA.into(),
            tool: Tool::current(),
            dim: 2,
            k_max: cfg.k_max,
            bump: cfg.bump,
            quadrature: self.parts.spec,
            w0: self.parts.w0,
            delta0: self.parts.delta0.clone(),
            outer_radius: self.parts.outer_radius,
            cover: self.parts.cover.clone(),
            fitted,
            budgets,
            multikernel: None,
            slice: None,
            manifest,
        }
    }

    pub fn from_document(doc: &WeightDocument) -> Result<Self> {
        doc.check_schema()?;
        let cfg = PhantomConfig::with_bump(doc.k_max, doc.bump)?;
        assemble(Parts {
            cfg,
            spec: doc.quadrature,
            w0: doc.w0,
            delta0: doc.delta0.clone(),
            cover: doc.cover.clone(),
            outer_radius: doc.outer_radius,
        })
    }
}

impl AxialWeight for AssembledWeight {
    fn along(&self, r: f64) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync + '_>> {
        let line = self.line(r)?;
        Ok(Box::new(move |s| self.eval_line(&line, s, r.hypot(s))))
    }
}

/// Line families of the full verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// r in [0, delta0]: the local cover.
    Cover,
    /// r in (delta0, horizon): W0.
    Boundary,
    /// r in [1, R): lines missing supp f, through the phi2 shell.
    Exterior,
}

impl Stratum {
    pub const ALL: [Stratum; 3] = [Stratum::Cover, Stratum::Boundary, Stratum::Exterior];

    pub fn range(self, w: &AssembledWeight) -> (f64, f64) {
        match self {
            Stratum::Cover => (0.0, w.delta0()),
            Stratum::Boundary => (w.delta0(), w.horizon()),
            Stratum::Exterior => (1.0, w.outer_radius()),
        }
    }
}

/// n lines in dimension `dim`, 2/5 in each of the cover and boundary strata
/// and the rest exterior; distances are stratified within each stratum.
pub fn stratified_rays(
    w: &AssembledWeight,
    dim: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<(Stratum, crate::Ray)>> {
    let n_cover = 2 * n / 5;
    let n_boundary = 2 * n / 5;
    let counts = [n_cover, n_boundary, n - n_cover - n_boundary];
    let mut g = rng(seed);
    let mut out = Vec::with_capacity(n);
    for (stratum, count) in Stratum::ALL.into_iter().zip(counts) {
        let (lo, hi) = stratum.range(w);
        for r in stratified(lo, hi, count, &mut g) {
            // Keep boundary draws strictly above delta0.
            let r = if stratum == Stratum::Boundary {
                r.max(lo.next_up())
            } else {
                r
            };
            out.push((stratum, random_ray(dim, r, &mut g)?));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumSummary {
    pub stratum: Stratum,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub max_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rays: usize,
    pub seed: u64,
    pub max_relative: f64,
    pub strata: Vec<StratumSummary>,
    pub residuals: Vec<(Stratum, RayResidual)>,
}

/// Residuals over `n` stratified lines in dimension `dim`.
pub fn verify_full(w: &AssembledWeight, dim: usize, n: usize, seed: u64) -> Result<VerifyReport> {
    let sample = stratified_rays(w, dim, n, seed)?;
    let rays: Vec<crate::Ray> = sample.iter().map(|(_, ray)| ray.clone()).collect();
    let res = w.verify(&rays)?;
    let residuals: Vec<(Stratum, RayResidual)> = sample.iter().map(|(s, _)| *s).zip(res).collect();
    let strata = Stratum::ALL
        .into_iter()
        .map(|st| {
            let (lo, hi) = st.range(w);
            let rows: Vec<&RayResidual> = residuals
                .iter()
                .filter(|(s, _)| *s == st)
                .map(|(_, r)| r)
                .collect();
            StratumSummary {
                stratum: st,
                lo,
                hi,
                count: rows.len(),
                max_relative: rows.iter().fold(0.0, |m, r| m.max(r.relative)),
            }
        })
        .collect();
    Ok(VerifyReport {
        rays: n,
        seed,
        max_relative: residuals.iter().fold(0.0, |m, (_, r)| m.max(r.relative)),
        strata,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub samples: usize,
    pub lines: usize,
    pub seed: u64,
    pub min_weight: f64,
    /// (r, |x . theta|, |x|) at the minimum.
    pub argmin: (f64, f64, f64),
    /// Samples with |x| >= R, and how many of them have W != 1.
    pub outer_samples: usize,
    pub outer_violations: usize,
    /// Samples with r >= 1 and |x| <= 1, and how many have W != 1.
    pub unit_samples: usize,
    pub unit_violations: usize,
    /// max |W - 1| over samples on lines with r >= 1.
    pub exterior_max_deviation: f64,
}

/// W at `per_line` points on each of `lines` random lines in R^dim. Line
/// distances are stratified over [0, R + 1/2) and one extra line has r = 1;
/// points are stratified in x . theta over (-(R + 1/2), R + 1/2), and the
/// r = 1 line also gets its foot point |x| = 1.
pub fn sample_positivity(
    w: &AssembledWeight,
    dim: usize,
    lines: usize,
    per_line: usize,
    seed: u64,
) -> Result<PositivityReport> {
    let mut g = rng(seed);
    let reach = w.outer_radius() + 0.5;
    let mut rays: Vec<(crate::Ray, Vec<f64>)> = stratified(0.0, reach, lines, &mut g)
        .into_iter()
        .map(|r| {
            Ok((
                random_ray(dim, r, &mut g)?,
                stratified(-reach, reach, per_line, &mut g),
            ))
        })
        .collect::<Result<_>>()?;
    // The r = 1 line along e_1 through e_2, where |x| = 1 exactly at s = 0.
    let mut base = vec![0.0; dim];
    let mut dir = vec![0.0; dim];
    base[1] = 1.0;
    dir[0] = 1.0;
    let mut ss = stratified(-reach, reach, per_line, &mut g);
    ss.push(0.0);
    rays.push((crate::Ray { base, dir }, ss));
    let rows = rays
        .par_iter()
        .map(|(ray, ss)| {
            let r = ray.distance();
            let line = w.line(r)?;
            let mut out = Vec::with_capacity(ss.len());
            for &s in ss {
                let x = ray.point(s);
                let (n, a) = checked_invariants(&x, &ray.dir)?;
                out.push((r, a, n, w.eval_line(&line, a, n)));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = PositivityReport {
        samples: 0,
        lines: rays.len(),
        seed,
        min_weight: f64::INFINITY,
        argmin: (0.0, 0.0, 0.0),
        outer_samples: 0,
        outer_violations: 0,
        unit_samples: 0,
        unit_violations: 0,
        exterior_max_deviation: 0.0,
    };
    for (r, a, n, v) in rows.into_iter().flatten() {
        rep.samples += 1;
        if v < rep.min_weight {
            rep.min_weight = v;
            rep.argmin = (r, a, n);
        }
        if n >= w.outer_radius() {
            rep.outer_samples += 1;
            rep.outer_violations += usize::from(v != 1.0);
        }
        if r >= 1.0 {
            rep.exterior_max_deviation = rep.exterior_max_deviation.max((v - 1.0).abs());
            if n <= 1.0 {
                rep.unit_samples += 1;
                rep.unit_violations += usize::from(v != 1.0);
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Tool {
    pub fn current() -> Self {
        Self {
            name: "wrtlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDocument {
    pub schema: String,
    pub tool: Tool,
    /// Dimension the weight is meant for; the data are the same for every d.
    pub dim: u32,
    pub k_max: u32,
    pub bump: BumpProfile,
    pub quadrature: QuadratureSpec,
    pub w0: W0Kind,
    pub delta0: Delta0Result,
    pub outer_radius: f64,
    pub cover: Vec<LocalWeight>,
    pub fitted: Option<FittedConstants>,
    pub budgets: ErrorBudgets,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multikernel: Option<MultiKernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceConfig>,
    /// Free-form record of how the document was produced.
    pub manifest: serde_json::Value,
}

impl WeightDocument {
    fn check_schema(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Document(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        if self.dim < 2 {
            return Err(Error::Document(format!(
                "dimension must be >= 2, got {}",
                self.dim
            )));
        }
        if let Some(s) = &self.slice {
            if !(s.delta > 0.0 && s.delta < 1.0) || self.dim < 3 {
                return Err(Error::Document(
                    "slice needs delta in (0, 1) and dim >= 3".into(),
                ));
            }
        }
        if let Some(m) = &self.multikernel {
            if m.n == 0 || !(m.spacing > 2.0 * self.outer_radius) {
                return Err(Error::Document(
                    "multikernel needs n >= 1 and spacing > 2R".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    /// Parses and validates: the schema must match and the weight must assemble.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: WeightDocument = serde_json::from_str(s)
            .map_err(|e| Error::Document(format!("malformed weight document: {e}")))?;
        doc.check_schema()?;
        AssembledWeight::from_document(&doc)?;
        Ok(doc)
    }
}

pub fn serialize(
    w: &AssembledWeight,
    fitted: Option<FittedConstants>,
    manifest: serde_json::Value,
) -> Result<String> {
    w.to_document(fitted, manifest).to_json()
}

pub fn deserialize(s: &str) -> Result<(AssembledWeight, WeightDocument)> {
    let doc = WeightDocument::from_json(s)?;
    Ok((AssembledWeight::from_document(&doc)?, doc))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub k_max: u32,
    pub spec: QuadratureSpec,
    pub w0: W0Kind,
    pub outer_radius: f64,
    pub delta0_spacing: f64,
    pub eps_start: f64,
    /// Run the Lemma 4 / Lemma 5 sweeps and record the fitted constants.
    pub fit_constants: bool,
}

impl BuildOptions {
    pub fn new(k_max: u32) -> Self {
        Self {
            k_max,
            spec: QuadratureSpec::default(),
            w0: W0Kind::default(),
            outer_radius: DEFAULT_OUTER_RADIUS,
            delta0_spacing: delta0_spacing(k_max),
            eps_start: DEFAULT_EPS_START,
            fit_constants: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Build {
    pub weight: AssembledWeight,
    pub cover: Vec<CoverStep>,
    pub fitted: Option<FittedConstants>,
}

/// delta0 search, greedy cover, assembly and (optionally) fitted constants.
pub fn build_weight(opts: &BuildOptions) -> Result<Build> {
    let cfg = PhantomConfig::new(opts.k_max)?;
    let ev = W0Evaluator::new(cfg, opts.spec, opts.w0)?;
    let delta0 = find_delta0(&ev, opts.delta0_spacing)?;
    let cover = build_cover(&cfg, delta0.delta0, &opts.spec, opts.eps_start)?;
    let weight = assemble(Parts {
        cfg,
        spec: opts.spec,
        w0: opts.w0,
        delta0,
        cover: cover.iter().map(|c| c.weight.clone()).collect(),
        outer_radius: opts.outer_radius,
    })?;
    let fitted = if opts.fit_constants {
        Some(fit_constants(&cfg, &opts.spec)?)
    } else {
        None
    };
    Ok(Build {
        weight,
        cover,
        fitted,
    })
}

/// Lemma 4 and Lemma 5 constants of the dyadic W0.
pub fn fit_constants(cfg: &PhantomConfig, spec: &QuadratureSpec) -> Result<FittedConstants> {
    let ev = W0Evaluator::new(*cfg, *spec, W0Kind::Dyadic)?;
    let l4 = bound_sweep_lemma4(&ev, &lemma4_grid(cfg, LEMMA4_POINTS))?;
    let l5 = bound_sweep_lemma5(&ev, LEMMA5_POINTS)?;
    Ok(FittedConstants {
        lemma4_c0: l4.c0,
        lemma4_median: l4.median_rho,
        lemma5: l5
            .items
            .iter()
            .map(|i| (i.name.clone(), i.fitted))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Build {
        let mut opts = BuildOptions::new(4);
        opts.fit_constants = false;
        build_weight(&opts).unwrap()
    }

    #[test]
    fn cover_overlaps_and_reaches_delta0() {
        let b = small();
        let d0 = b.weight.delta0();
        let c = b.weight.cover();
        assert_eq!(c[0].r0, 0.0);
        for p in c.windows(2) {
            assert!(p[1].r0 - p[1].eps0 < p[0].r0 + p[0].eps0);
        }
        let last = c.last().unwrap();
        assert!(last.r0 + 0.5 * last.eps0 > d0);
        assert!(c.iter().all(|lw| lw.r0 + lw.eps0 < 0.5 * (1.0 + d0)));
    }

    #[test]
    fn unit_regions() {
        let b = small();
        let w = &b.weight;
        let th = [0.6, 0.8];
        assert_eq!(w.eval(&[2.0, 0.5], &th).unwrap(), 1.0);
        assert_eq!(w.eval(&[-1.6, 1.2], &th).unwrap(), 1.0);
        // |x| = 1 with x perpendicular to theta: r = 1.
        assert_eq!(w.eval(&[0.8, -0.6], &th).unwrap(), 1.0);
    }

    #[test]
    fn document_round_trip() {
        let b = small();
        let s = serialize(&b.weight, None, serde_json::json!({"command": "test"})).unwrap();
        let (w2, doc) = deserialize(&s).unwrap();
        assert_eq!(doc.to_json().unwrap(), s);
        assert_eq!(w2.parts(), b.weight.parts());
    }

    #[test]
    fn tampered_documents_rejected() {
        let b = small();
        let doc = b.weight.to_document(None, serde_json::Value::Null);
        let mut bad = doc.clone();
        bad.delta0.delta0 = 0.4;
        assert!(WeightDocument::from_json(&bad.to_json().unwrap()).is_err());
        let mut bad = doc.clone();
        bad.cover.clear();
        assert!(WeightDocument::from_json(&bad.to_json().unwrap()).is_err());
        let mut bad = doc;
        bad.schema = "wrtlab-weight/0".into();
        assert!(WeightDocument::from_json(&bad.to_json().unwrap()).is_err());
        assert!(WeightDocument::from_json("{").is_err());
    }
}

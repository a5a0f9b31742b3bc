use std::fs;
use std::path::Path;

use serde::Serialize;
use wrtlab::assembly::{
    build_weight, deserialize, sample_positivity, stratified_rays, verify_full, AssembledWeight,
    BuildOptions, PositivityReport, VerifyReport, WeightDocument,
};
use wrtlab::multidim::{
    verify_lift, verify_multikernel, verify_slice, LiftedWeight, LineReport, MultiKernelConfig,
    MultiKernelReport, MultiKernelWeight, SliceConfig, SliceReport, SliceWeight,
};
use wrtlab::w0::{
    bound_sweep_lemma4, bound_sweep_lemma5, holder_nodes, holder_sweep, lemma4_envelope,
    lemma4_grid, u0_table, HolderReport, Lemma4Report, Lemma5Report, W0Evaluator, W0Kind, H_FLOOR,
};
use wrtlab::PhantomConfig;

use crate::args::{
    BoundsArgs, BuildArgs, HolderArgs, MultikernelArgs, SliceArgs, U0Args, VerifyArgs,
};
use crate::error::CliError;
use crate::output::{write_json, Check, CsvOut, Manifest, Report};

/// Samples per line in the positivity check.
const SAMPLES_PER_LINE: usize = 250;

fn load(path: &Path) -> Result<(AssembledWeight, WeightDocument), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(deserialize(&text)?)
}

fn finish<T: Serialize>(report: Report<T>, path: Option<&Path>) -> Result<bool, CliError> {
    for c in &report.checks {
        println!(
            "{} {}: {:e} {} {:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.relation,
            c.threshold
        );
    }
    if let Some(p) = path {
        write_json(p, &report)?;
    }
    Ok(report.passed)
}

/// `<csv>.json` next to a CSV when no report path is given.
fn report_path(csv: &Path, report: &Option<std::path::PathBuf>) -> std::path::PathBuf {
    report.clone().unwrap_or_else(|| csv.with_extension("json"))
}

pub fn build(a: &BuildArgs) -> Result<bool, CliError> {
    if a.slice.is_some() && a.dim < 3 {
        return Err(CliError::Usage("--slice needs --dim 3".into()));
    }
    let manifest = Manifest::new("build", a)?;
    let mut opts = BuildOptions::new(a.kmax);
    opts.spec = a.quad.spec();
    opts.w0 = a.w0.kind(a.tilt);
    opts.outer_radius = a.outer_radius;
    opts.eps_start = a.eps_start;
    opts.fit_constants = !a.no_fit;
    let b = build_weight(&opts)?;
    let mut doc = b
        .weight
        .to_document(b.fitted.clone(), serde_json::to_value(&manifest)?);
    doc.dim = a.dim;
    doc.multikernel = a
        .multikernel
        .map(|n| MultiKernelConfig::new(n, a.outer_radius));
    doc.slice = a.slice.map(|delta| SliceConfig { delta });
    let text = doc.to_json()?;
    WeightDocument::from_json(&text)?;
    fs::write(&a.out, text).map_err(|e| CliError::io(&a.out, e))?;
    println!(
        "wrote {}: k_max = {}, delta0 = {}, {} local weights",
        a.out.display(),
        a.kmax,
        b.weight.delta0(),
        b.weight.cover().len()
    );
    Ok(true)
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    dim: u32,
    k_max: u32,
    delta0: f64,
    verify: VerifyReport,
    lift: Option<LineReport>,
    positivity: Option<PositivityReport>,
}

pub fn verify(a: &VerifyArgs) -> Result<bool, CliError> {
    let manifest = Manifest::new("verify", a)?;
    let (w, doc) = load(&a.weight)?;
    let dim = doc.dim as usize;
    let rep = verify_full(&w, dim, a.rays, a.seed)?;
    let mut checks = vec![Check::at_most(
        "max_relative_residual",
        rep.max_relative,
        a.threshold,
    )];
    let lift = if dim >= 3 {
        let lw = LiftedWeight::new(&w, dim)?;
        let rays: Vec<_> = stratified_rays(&w, dim, a.rays, a.seed)?
            .into_iter()
            .map(|(_, r)| r)
            .collect();
        let l = verify_lift(&lw, &rays, a.seed)?;
        checks.push(Check::at_most(
            "direct_vs_reduction",
            l.max_agreement,
            a.agreement,
        ));
        checks.push(Check::at_most(
            "max_relative_residual_direct",
            l.max_relative,
            a.threshold,
        ));
        Some(l)
    } else {
        None
    };
    let positivity = if a.samples > 0 {
        let lines = a.samples.div_ceil(SAMPLES_PER_LINE);
        let p = sample_positivity(&w, dim, lines, SAMPLES_PER_LINE, a.seed)?;
        checks.push(Check::at_least("min_weight", p.min_weight, 0.5));
        checks.push(Check::at_most(
            "outer_not_one",
            p.outer_violations as f64,
            0.0,
        ));
        checks.push(Check::at_most(
            "unit_line_not_one",
            p.unit_violations as f64,
            0.0,
        ));
        Some(p)
    } else {
        None
    };
    let out = VerifyOutput {
        dim: doc.dim,
        k_max: doc.k_max,
        delta0: w.delta0(),
        verify: rep,
        lift,
        positivity,
    };
    finish(Report::new(manifest, checks, out), Some(&a.report))
}

fn evaluator(
    kmax: u32,
    quad: &crate::args::QuadArgs,
    kind: W0Kind,
) -> Result<W0Evaluator, CliError> {
    let cfg = PhantomConfig::new(kmax)?;
    Ok(W0Evaluator::new(cfg, quad.spec(), kind)?)
}

#[derive(Debug, Serialize)]
struct U0Output {
    rows: usize,
    min_u0: f64,
    max_u0: f64,
}

pub fn sweep_u0(a: &U0Args) -> Result<bool, CliError> {
    let manifest = Manifest::new("sweeps u0", a)?;
    if a.r_points == 0 || a.s_points < 2 {
        return Err(CliError::Usage(
            "need --r-points >= 1 and --s-points >= 2".into(),
        ));
    }
    let ev = evaluator(a.kmax, &a.quad, a.w0.kind(a.tilt))?;
    let rs = lemma4_grid(ev.cfg(), a.r_points);
    let ss: Vec<f64> = (0..a.s_points)
        .map(|j| j as f64 / (a.s_points - 1) as f64)
        .collect();
    let rows = u0_table(&ev, &rs, &ss)?;
    let mut csv = CsvOut::new(&["r", "s", "u0"]);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for [r, s, u] in &rows {
        lo = lo.min(*u);
        hi = hi.max(*u);
        csv.row(vec![(*r).into(), (*s).into(), (*u).into()]);
    }
    csv.write(&a.csv, &manifest)?;
    let out = U0Output {
        rows: rows.len(),
        min_u0: lo,
        max_u0: hi,
    };
    finish(
        Report::new(manifest, vec![], out),
        Some(&report_path(&a.csv, &a.report)),
    )
}

#[derive(Debug, Serialize)]
struct BoundsOutput {
    lemma4: Lemma4Report,
    lemma5: Lemma5Report,
    /// (item, fitted constant c).
    fitted: Vec<(String, f64)>,
}

pub fn sweep_bounds(a: &BoundsArgs) -> Result<bool, CliError> {
    let manifest = Manifest::new("sweeps bounds", a)?;
    let ev = evaluator(a.kmax, &a.quad, W0Kind::Dyadic)?;
    let l4 = bound_sweep_lemma4(&ev, &lemma4_grid(ev.cfg(), a.points))?;
    let l5 = bound_sweep_lemma5(&ev, a.lemma5_points)?;
    let mut csv = CsvOut::new(&["r", "m", "rho", "envelope"]);
    for row in &l4.rows {
        csv.row(vec![
            row.r.into(),
            row.m.into(),
            row.rho.into(),
            lemma4_envelope(row.r).into(),
        ]);
    }
    csv.write(&a.csv, &manifest)?;
    let mut csv5 = CsvOut::new(&["item", "k", "ratio"]);
    for item in &l5.items {
        for &(k, v) in &item.ratios {
            csv5.row(vec![item.name.as_str().into(), k.into(), v.into()]);
        }
    }
    csv5.write(&a.lemma5_csv, &manifest)?;
    let mut checks = vec![Check::at_most(
        "lemma4_max_over_median",
        l4.max_over_median,
        a.max_over_median,
    )];
    for item in &l5.items {
        checks.push(Check::at_most(
            &format!("lemma5_spread_{}", item.name),
            item.spread,
            a.max_spread,
        ));
    }
    checks.push(Check::at_least(
        "lemma5_min_h_scaled",
        l5.min_h_scaled,
        H_FLOOR,
    ));
    let fitted = l5
        .items
        .iter()
        .map(|i| (i.name.clone(), i.fitted))
        .collect();
    let out = BoundsOutput {
        lemma4: l4,
        lemma5: l5,
        fitted,
    };
    finish(
        Report::new(manifest, checks, out),
        Some(&report_path(&a.csv, &a.report)),
    )
}

#[derive(Debug, Serialize)]
struct HolderOutput {
    base: HolderReport,
    refined: HolderReport,
    ratio: f64,
}

pub fn sweep_holder(a: &HolderArgs) -> Result<bool, CliError> {
    let manifest = Manifest::new("sweeps holder", a)?;
    if a.pairs == 0 || a.refine == 0 || a.nodes == 0 {
        return Err(CliError::Usage(
            "--pairs, --refine and --nodes must be positive".into(),
        ));
    }
    let ev = evaluator(a.kmax, &a.quad, a.w0.kind(a.tilt))?;
    let nodes = holder_nodes(ev.cfg(), a.nodes);
    let ev = ev.with_table(&nodes)?;
    let base = holder_sweep(&ev, a.alpha, a.pairs, a.seed)?;
    let refined = holder_sweep(&ev, a.alpha, a.pairs * a.refine, a.seed)?;
    let ratio = if base.max_quotient > 0.0 {
        refined.max_quotient / base.max_quotient
    } else if refined.max_quotient > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let mut csv = CsvOut::new(&["pairs", "max_quotient", "p99"]);
    for r in [&base, &refined] {
        csv.row(vec![r.pairs.into(), r.max_quotient.into(), r.p99.into()]);
    }
    csv.write(&a.csv, &manifest)?;
    let checks = vec![Check::at_most("refined_over_base_max", ratio, a.max_ratio)];
    let out = HolderOutput {
        base,
        refined,
        ratio,
    };
    finish(
        Report::new(manifest, checks, out),
        Some(&report_path(&a.csv, &a.report)),
    )
}

pub fn sweep_multikernel(a: &MultikernelArgs) -> Result<bool, CliError> {
    let manifest = Manifest::new("sweeps multikernel", a)?;
    let (w, doc) = load(&a.weight)?;
    let mut config = doc
        .multikernel
        .unwrap_or_else(|| MultiKernelConfig::new(3, w.outer_radius()));
    if let Some(n) = a.n {
        config.n = n;
    }
    let mk = MultiKernelWeight::new(&w, a.dim, config)?;
    let rep: MultiKernelReport = verify_multikernel(&mk, a.rays, a.seed)?;
    let mut csv = CsvOut::new(&[
        "kernel",
        "r",
        "value",
        "unshifted",
        "normalizer",
        "relative",
        "agreement",
    ]);
    for (i, k) in rep.kernels.iter().enumerate() {
        for l in &k.lines {
            csv.row(vec![
                (i + 1).into(),
                l.r.into(),
                l.direct.value.into(),
                l.reduced.value.into(),
                l.reduced.normalizer.into(),
                l.relative.into(),
                l.agreement.into(),
            ]);
        }
    }
    csv.write(&a.csv, &manifest)?;
    let checks = vec![
        Check::at_most("max_relative_residual", rep.max_relative, a.threshold),
        Check::at_most("translation_identity", rep.translation, a.translation),
        Check::at_least("min_ball_gap", rep.min_gap, f64::MIN_POSITIVE),
    ];
    finish(
        Report::new(manifest, checks, rep),
        Some(&report_path(&a.csv, &a.report)),
    )
}

pub fn sweep_slice(a: &SliceArgs) -> Result<bool, CliError> {
    let manifest = Manifest::new("sweeps slice", a)?;
    let (w, doc) = load(&a.weight)?;
    let delta = a.delta.or(doc.slice.map(|s| s.delta)).unwrap_or(0.25);
    let lw = LiftedWeight::new(&w, 3)?;
    let sw = SliceWeight::new(lw, delta)?;
    let rep: SliceReport = verify_slice(&sw, a.rays, a.grid, a.seed)?;
    let mut csv = CsvOut::new(&[
        "r3",
        "value",
        "reduced",
        "normalizer",
        "relative",
        "agreement",
    ]);
    for l in &rep.lines.lines {
        csv.row(vec![
            l.r.into(),
            l.direct.value.into(),
            l.reduced.value.into(),
            l.reduced.normalizer.into(),
            l.relative.into(),
            l.agreement.into(),
        ]);
    }
    csv.write(&a.csv, &manifest)?;
    let checks = vec![
        Check::at_most("max_relative_residual", rep.lines.max_relative, a.threshold),
        Check::at_most("sampled_support_radius", rep.sampled_support, delta),
        Check::at_most("support_radius", rep.support_radius, delta),
        Check::at_least("min_weight", rep.min_weight, 0.5),
    ];
    finish(
        Report::new(manifest, checks, rep),
        Some(&report_path(&a.csv, &a.report)),
    )
}

//! Acceptance suite at k_max = 8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use wrtlab::assembly::{
    build_weight, sample_positivity, verify_full, AssembledWeight, BuildOptions, LEMMA4_POINTS,
    LEMMA5_POINTS,
};
use wrtlab::fresnel::fresnel_g_k;
use wrtlab::multidim::{
    lift_rays, verify_lift, verify_multikernel, verify_slice, LiftedWeight, MultiKernelConfig,
    MultiKernelWeight, SliceWeight,
};
use wrtlab::profiles::DyadicPartition;
use wrtlab::quadrature::QuadratureSpec;
use wrtlab::sampling::{haar_orthogonal, random_ray, rng, signed_permutation, stratified};
use wrtlab::w0::{
    bound_sweep_lemma4, bound_sweep_lemma5, holder_nodes, holder_sweep, lemma4_grid, W0Evaluator,
    W0Kind,
};
use wrtlab::{PhantomConfig, Result};

const KMAX: u32 = 8;
const SEED: u64 = 2024;
const RESIDUAL: f64 = 1e-7;
/// Lemma 4 constant C0 recorded by the first k_max = 8 run.
const LEMMA4_C0_BASELINE: f64 = 63.2;
/// Haar rotations round |x| and x . theta; W then moves by its slope times an
/// ulp. Signed permutations are checked bitwise.
const HAAR_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn vanishing_2d(w: &AssembledWeight, build_secs: f64) -> Result<Outcome> {
    let t = Instant::now();
    let rep = verify_full(w, 2, 200, SEED)?;
    let total = build_secs + t.elapsed().as_secs_f64();
    let strata: Vec<String> = rep
        .strata
        .iter()
        .map(|s| format!("{:?} {:.2e}", s.stratum, s.max_relative))
        .collect();
    outcome(
        rep.max_relative <= RESIDUAL && total <= 300.0,
        format!(
            "max relative {:.3e} over {} rays ({}); build + verify {:.0} s",
            rep.max_relative,
            rep.rays,
            strata.join(", "),
            total
        ),
    )
}

fn vanishing_3d(w: &AssembledWeight) -> Result<Outcome> {
    let lw = LiftedWeight::new(w, 3)?;
    let rays = lift_rays(w, 3, 50, SEED)?;
    let rep = verify_lift(&lw, &rays, SEED)?;
    outcome(
        rep.max_relative <= RESIDUAL && rep.max_agreement <= 1e-9,
        format!(
            "max relative {:.3e}, 3D vs reduction {:.3e} over {} rays",
            rep.max_relative, rep.max_agreement, rep.rays
        ),
    )
}

fn positivity(w: &AssembledWeight) -> Result<Outcome> {
    let rep = sample_positivity(w, 2, 400, 250, SEED)?;
    outcome(
        rep.samples >= 100_000
            && rep.min_weight >= 0.5
            && rep.outer_violations == 0
            && rep.unit_violations == 0
            && rep.outer_samples > 0
            && rep.unit_samples > 0,
        format!(
            "min W {} over {} samples; W != 1 at {}/{} points with |x| >= R, {}/{} with r >= 1, |x| <= 1",
            rep.min_weight,
            rep.samples,
            rep.outer_violations,
            rep.outer_samples,
            rep.unit_violations,
            rep.unit_samples
        ),
    )
}

fn rotation(w: &AssembledWeight) -> Result<Outcome> {
    let lw = LiftedWeight::new(w, 3)?;
    let mut g = rng(SEED);
    let reach = w.outer_radius() + 0.3;
    let mut haar = [0.0f64; 2];
    let mut mismatches = 0;
    let mut points = 0;
    for (slot, dim) in [2usize, 3].into_iter().enumerate() {
        let eval = |x: &[f64], th: &[f64]| {
            if dim == 2 {
                w.eval(x, th)
            } else {
                lw.eval(x, th)
            }
        };
        for _ in 0..10 {
            let a = haar_orthogonal(dim, &mut g);
            let p = signed_permutation(dim, &mut g);
            for _ in 0..10 {
                let r = reach * g.random::<f64>();
                let ray = random_ray(dim, r, &mut g)?;
                let x = ray.point(g.random_range(-reach..reach));
                let v = eval(&x, &ray.dir)?;
                let va = eval(&a.apply(&x), &a.apply(&ray.dir))?;
                let vp = eval(&p.apply(&x), &p.apply(&ray.dir))?;
                haar[slot] = haar[slot].max((v - va).abs());
                mismatches += usize::from(v.to_bits() != vp.to_bits());
                points += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && haar[0] <= HAAR_TOL && haar[1] <= HAAR_TOL,
        format!(
            "signed permutations: {mismatches}/{points} bitwise mismatches; Haar max |dW| {:.2e} (d = 2), {:.2e} (d = 3)",
            haar[0], haar[1]
        ),
    )
}

fn partitions(w: &AssembledWeight) -> Result<Outcome> {
    let open = DyadicPartition::new(KMAX)?;
    let closed = DyadicPartition::with_closed_top(KMAX)?;
    let sum =
        |p: &DyadicPartition, r: f64| -> Result<f64> { (1..=KMAX).map(|k| p.psi(k, r)).sum() };
    let top = 1.0 - 2f64.powi(-(KMAX as i32));
    let n = 200_000;
    let mut psi_dev = 0.0f64;
    for j in 0..=n {
        let r = 0.5 + (top - 0.5) * j as f64 / n as f64;
        psi_dev = psi_dev.max((sum(&open, r)? - 1.0).abs());
        psi_dev = psi_dev.max((sum(&closed, r)? - 1.0).abs());
        let r = top + (1.0 - top) * j as f64 / (n + 1) as f64;
        psi_dev = psi_dev.max((sum(&closed, r)? - 1.0).abs());
    }
    let part = w.partition();
    let mut xi_dev = 0.0f64;
    for j in 0..=n {
        let s = -2.0 + 4.0 * j as f64 / n as f64;
        xi_dev = xi_dev.max((part.values(s).iter().sum::<f64>() - 1.0).abs());
    }
    let mut bad = 0;
    for k in 1..=KMAX {
        let lo = 1.0 - 2f64.powi(-(k as i32) + 1);
        let hi = 1.0 - 2f64.powi(-(k as i32) - 1);
        bad += usize::from(open.psi(k, lo)? != 0.0) + usize::from(open.psi(k, hi)? != 0.0);
    }
    let d0 = part.delta0();
    let cap = 0.5 * (1.0 + d0);
    for s in [0.0, 0.5 * d0, d0] {
        bad += usize::from(part.xi(0, s) != 0.0) + usize::from(part.xi(0, -s) != 0.0);
    }
    for s in [cap, 1.0, 2.0] {
        bad += usize::from(part.xi(0, s) != 1.0) + usize::from(part.xi(0, -s) != 1.0);
    }
    for (i, &(c, e)) in part.intervals().iter().enumerate() {
        let mut ends = vec![c + e];
        if c - e >= 0.0 {
            ends.push(c - e);
        }
        for s in ends {
            bad += usize::from(part.xi(i + 1, s) != 0.0) + usize::from(part.xi(i + 1, -s) != 0.0);
        }
    }
    outcome(
        psi_dev <= 1e-12 && xi_dev <= 1e-12 && bad == 0,
        format!("max |sum psi - 1| {psi_dev:.2e}, max |sum xi - 1| {xi_dev:.2e}, {bad} support endpoint violations"),
    )
}

fn dyadic_evaluator() -> Result<W0Evaluator> {
    W0Evaluator::new(
        PhantomConfig::new(KMAX)?,
        QuadratureSpec::default(),
        W0Kind::Dyadic,
    )
}

fn lemma5(ev: &W0Evaluator) -> Result<Outcome> {
    let rep = bound_sweep_lemma5(ev, LEMMA5_POINTS)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for item in &rep.items {
        pass &= item.spread <= 50.0;
        let ratios: Vec<String> = item
            .ratios
            .iter()
            .map(|(k, v)| format!("{k}:{v:.3e}"))
            .collect();
        parts.push(format!(
            "{} spread {:.3e} [{}]",
            item.name,
            item.spread,
            ratios.join(" ")
        ));
    }
    outcome(pass, parts.join("; "))
}

fn lemma4(ev: &W0Evaluator) -> Result<Outcome> {
    let rep = bound_sweep_lemma4(ev, &lemma4_grid(ev.cfg(), LEMMA4_POINTS))?;
    outcome(
        rep.max_over_median <= 10.0,
        format!(
            "max/median rho {:.2} over {} points; C0 {:.4} (baseline {LEMMA4_C0_BASELINE}), median {:.4}, Spearman(M, r) {:.2}",
            rep.max_over_median,
            rep.rows.len(),
            rep.c0,
            rep.median_rho,
            rep.spearman
        ),
    )
}

fn holder(ev: W0Evaluator) -> Result<Outcome> {
    let nodes = holder_nodes(ev.cfg(), 64);
    let ev = ev.with_table(&nodes)?;
    let alpha = 1.0 / 32.0;
    let base = holder_sweep(&ev, alpha, 10_000, SEED)?;
    let refined = holder_sweep(&ev, alpha, 40_000, SEED)?;
    let ratio = refined.max_quotient / base.max_quotient;
    outcome(
        ratio <= 2.0,
        format!(
            "alpha 1/32: max quotient {:.4e} (10^4 pairs), {:.4e} (4 x 10^4), ratio {ratio:.3}",
            base.max_quotient, refined.max_quotient
        ),
    )
}

fn multikernel(w: &AssembledWeight) -> Result<Outcome> {
    let mk = MultiKernelWeight::new(w, 3, MultiKernelConfig::new(3, w.outer_radius()))?;
    let rep = verify_multikernel(&mk, 20, SEED)?;
    let per: Vec<String> = rep
        .kernels
        .iter()
        .map(|k| format!("{:.2e}", k.max_relative))
        .collect();
    outcome(
        rep.kernels.len() == 3 && rep.max_relative <= RESIDUAL && rep.translation <= 1e-12,
        format!(
            "n = 3, d = 3: residuals [{}], translation gap {:.2e} ({:.2e} of the normalizer), ball gap {:.3}",
            per.join(", "),
            rep.translation,
            rep.translation_relative,
            rep.min_gap
        ),
    )
}

fn slice(w: &AssembledWeight) -> Result<Outcome> {
    let delta = 0.25;
    let sw = SliceWeight::new(LiftedWeight::new(w, 3)?, delta)?;
    let rep = verify_slice(&sw, 20, 64, SEED)?;
    outcome(
        rep.sampled_support <= delta
            && rep.support_radius <= delta
            && rep.lines.max_relative <= RESIDUAL
            && rep.min_weight >= 0.5,
        format!(
            "delta 0.25: sampled support {:.4}, geometric {:.4}, max relative {:.3e}, min W {}",
            rep.sampled_support, rep.support_radius, rep.lines.max_relative, rep.min_weight
        ),
    )
}

fn fresnel_oracle() -> Result<Outcome> {
    let cfg = PhantomConfig::new(6)?;
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    for k in 1..=6 {
        let (lo, hi) = cfg.annulus(k);
        // The fast path needs r > 1/2.
        let lo = lo.max(0.5);
        for j in 1..=5 {
            let r = lo + (hi - lo) * (j as f64 - 0.5) / 5.0;
            let got = fresnel_g_k(&cfg, k, r, &spec)?;
            worst = worst.max((got - common::g_k(k, r)).abs());
            count += 1;
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max |fast - brute| {worst:.2e} over {count} (k, r) pairs, k = 1..6"),
    )
}

fn certificates() -> Result<Outcome> {
    let cfg = PhantomConfig::new(KMAX)?;
    let mut g = rng(SEED);
    let top = 1.0 - 2f64.powi(-7);
    let mut ok = 0;
    let rs = stratified(0.0, top, 50, &mut g);
    for &r in &rs {
        if cfg.sign_change_certificate(r).is_ok_and(|c| c.check(&cfg)) {
            ok += 1;
        }
    }
    outcome(
        ok == rs.len(),
        format!(
            "{ok}/{} certificates verified, r in [0, 1 - 2^-7)",
            rs.len()
        ),
    )
}

fn main() -> ExitCode {
    let t = Instant::now();
    let mut opts = BuildOptions::new(KMAX);
    opts.fit_constants = false;
    let w = match build_weight(&opts) {
        Ok(b) => b.weight,
        Err(e) => {
            println!("FAIL build: {e}");
            return ExitCode::FAILURE;
        }
    };
    let build_secs = t.elapsed().as_secs_f64();
    println!(
        "k_max = {KMAX}: built in {build_secs:.0} s, delta0 {}, {} local weights",
        w.delta0(),
        w.cover().len()
    );

    type Check<'a> = Box<dyn FnOnce() -> Result<Outcome> + 'a>;
    let checks: Vec<(&str, Check)> = vec![
        (
            "1 vanishing d = 2",
            Box::new(|| vanishing_2d(&w, build_secs)),
        ),
        ("2 vanishing d = 3", Box::new(|| vanishing_3d(&w))),
        (
            "3 positivity and normalization",
            Box::new(|| positivity(&w)),
        ),
        ("4 rotation invariance", Box::new(|| rotation(&w))),
        ("5 partition suites", Box::new(|| partitions(&w))),
        (
            "6 Lemma 5 envelopes",
            Box::new(|| lemma5(&dyadic_evaluator()?)),
        ),
        ("7 Lemma 4 decay", Box::new(|| lemma4(&dyadic_evaluator()?))),
        ("8 Hoelder sweep", Box::new(|| holder(dyadic_evaluator()?))),
        ("9 multi-kernel", Box::new(|| multikernel(&w))),
        ("10 slice", Box::new(|| slice(&w))),
        ("11 Fresnel vs brute quadrature", Box::new(fresnel_oracle)),
        ("12 sign-change certificates", Box::new(certificates)),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} {name} ({:.1} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

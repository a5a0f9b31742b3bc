//! Fresnel-type primitives G1(s) = int_0^s sin t / sqrt t dt,
//! G2(s) = int_0^s cos t / sqrt t dt, and the fast evaluation of G_k(r)
//! through the substitution tau = 8^k s^2:
//!
//! G_k(r) = 8^(-k/2) Re[ e^(i 8^k r^2) int Phi_k(tau, r) e^(i tau) tau^(-1/2) dtau ],
//! Phi_k(tau, r) = Phi(2^k (1 - sqrt(r^2 + 8^-k tau))).
//!
//! The oscillatory integral is split at tau = 8 pi. Below, integration by parts
//! against E = G2 + i G1 removes the tau^(-1/2) singularity. Above, Levin
//! collocation on Chebyshev-Lobatto panels integrates exactly against e^(i tau),
//! so the panel count follows the envelope Phi_k and not the frequency 8^k.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_rule, segment_for, QuadratureSpec};
use crate::PhantomConfig;

const SERIES_LIMIT: f64 = 1.5;
const MAX_TERMS: usize = 300;

/// Power series for (C(x), S(x)) = int_0^x (cos, sin)(pi u^2 / 2) du, x >= 0.
pub(crate) fn fresnel_series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let fact = FRAC_PI_2 * x * x;
    let mut term = x;
    let mut sum_c = x;
    let mut sum_s = 0.0;
    let mut sign = 1.0;
    let mut odd = true;
    let mut n = 3.0;
    let mut sum = 0.0;
    for k in 1..MAX_TERMS {
        term *= fact / k as f64;
        sum += sign * term / n;
        let test = sum.abs() * f64::EPSILON;
        if odd {
            sign = -sign;
            sum_s = sum;
            sum = sum_c;
        } else {
            sum_c = sum;
            sum = sum_s;
        }
        if term < test {
            break;
        }
        odd = !odd;
        n += 2.0;
    }
    (sum_c, sum_s)
}

/// Continued fraction (modified Lentz) for (C(x), S(x)); the convergent form
/// of the large-argument asymptotic expansion.
pub(crate) fn fresnel_continued_fraction(x: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..MAX_TERMS {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = (a * d + b).inv();
        cc = b + a / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < f64::EPSILON {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let cs = Complex64::new(0.5, 0.5)
        * (Complex64::new(1.0, 0.0) - Complex64::new((0.5 * pix2).cos(), (0.5 * pix2).sin()) * h);
    (cs.re, cs.im)
}

fn fresnel_cs(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        fresnel_series(x)
    } else {
        fresnel_continued_fraction(x)
    }
}

/// (G1(s), G2(s)); both tend to sqrt(pi/2) as s grows.
pub fn fresnel_primitive(s: f64) -> Result<(f64, f64)> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!(
            "Fresnel primitive needs s >= 0, got {s}"
        )));
    }
    Ok(primitive_unchecked(s))
}

fn primitive_unchecked(s: f64) -> (f64, f64) {
    let x = (2.0 * s / PI).sqrt();
    let (c, sn) = fresnel_cs(x);
    let scale = (2.0 * PI).sqrt();
    (scale * sn, scale * c)
}

/// E(tau) = G2(tau) + i G1(tau) = int_0^tau e^(i u) u^(-1/2) du.
fn e_primitive(tau: f64) -> Complex64 {
    let (g1, g2) = primitive_unchecked(tau);
    Complex64::new(g2, g1)
}

const IBP_SPLIT: f64 = 8.0 * PI;
const LEVIN_NODES: usize = 16;
const PANEL_DX: f64 = 0.05;
/// Rounding floor of a Levin panel relative to max |F|.
const LEVIN_ROUNDOFF: f64 = 1024.0 * f64::EPSILON;

struct Envelope<'a> {
    cfg: &'a PhantomConfig,
    two_k: f64,
    inv_eight_k: f64,
    r2: f64,
}

impl Envelope<'_> {
    fn t(&self, tau: f64) -> f64 {
        (self.r2 + tau * self.inv_eight_k).sqrt()
    }
    fn x(&self, tau: f64) -> f64 {
        self.two_k * (1.0 - self.t(tau))
    }
    fn tau_of_x(&self, x: f64) -> f64 {
        let t = 1.0 - x / self.two_k;
        ((t * t - self.r2) / self.inv_eight_k).max(0.0)
    }
    fn value(&self, tau: f64) -> f64 {
        self.cfg.bump.eval(self.x(tau))
    }
    fn deriv(&self, tau: f64) -> f64 {
        let t = self.t(tau);
        self.cfg.bump.deriv(self.x(tau)) * (-self.two_k * self.inv_eight_k / (2.0 * t))
    }
}

/// Chebyshev-Lobatto nodes on [-1, 1] (descending) and differentiation matrix.
fn chebyshev(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let c: Vec<f64> = (0..=n)
        .map(|j| {
            let base = if j == 0 || j == n { 2.0 } else { 1.0 };
            if j % 2 == 0 {
                base
            } else {
                -base
            }
        })
        .collect();
    let mut d = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..=n {
        let mut row = 0.0;
        for j in 0..=n {
            if i != j {
                let v = c[i] / c[j] / (x[i] - x[j]);
                d[(i, j)] = v;
                row += v;
            }
        }
        d[(i, i)] = -row;
    }
    (x, d)
}

struct Levin {
    x: Vec<f64>,
    d: DMatrix<f64>,
}

impl Levin {
    fn new(n: usize) -> Self {
        let (x, d) = chebyshev(n);
        Self { x, d }
    }

    /// int_lo^hi F(tau) e^(i tau) dtau via p' + i p = F on the panel, and
    /// max |F| over the nodes.
    fn panel<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> (Complex64, f64) {
        let m = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let n = self.x.len();
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        let mut rhs = DVector::<Complex64>::zeros(n);
        let mut fmax = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = Complex64::new(self.d[(i, j)] / h, 0.0);
            }
            a[(i, i)] += Complex64::new(0.0, 1.0);
            let v = f(m + h * self.x[i]);
            fmax = fmax.max(v.abs());
            rhs[i] = Complex64::new(v, 0.0);
        }
        let Some(p) = a.lu().solve(&rhs) else {
            return (Complex64::new(f64::NAN, f64::NAN), fmax);
        };
        (
            p[0] * Complex64::from_polar(1.0, hi) - p[n - 1] * Complex64::from_polar(1.0, lo),
            fmax,
        )
    }

    fn adaptive<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        lo: f64,
        hi: f64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64> {
        let (whole, fmax) = self.panel(f, lo, hi);
        let mid = 0.5 * (lo + hi);
        let (left, _) = self.panel(f, lo, mid);
        let (right, _) = self.panel(f, mid, hi);
        let split = left + right;
        // The panel value is a difference of two p values of size |F|, so
        // its rounding error does not shrink with the panel width.
        if (whole - split).norm() <= tol.max(LEVIN_ROUNDOFF * fmax) {
            return Ok(split);
        }
        if depth >= 40 {
            return Err(Error::Quadrature {
                k: 0,
                a: lo,
                b: hi,
                depth,
                prev: whole.re,
                last: split.re,
            });
        }
        Ok(self.adaptive(f, lo, mid, 0.5 * tol, depth + 1)?
            + self.adaptive(f, mid, hi, 0.5 * tol, depth + 1)?)
    }
}

/// Adaptive Gauss-Legendre for a complex integrand on [lo, hi].
fn gauss_adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    let rule = gauss_rule(16);
    let est = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        rule.iter().fold(Complex64::new(0.0, 0.0), |acc, &(x, w)| {
            acc + f(m + h * x) * (w * h)
        })
    };
    let whole = est(lo, hi);
    let mid = 0.5 * (lo + hi);
    let split = est(lo, mid) + est(mid, hi);
    if (whole - split).norm() <= tol {
        return Ok(split);
    }
    if depth >= 40 {
        return Err(Error::Quadrature {
            k: 0,
            a: lo,
            b: hi,
            depth,
            prev: whole.re,
            last: split.re,
        });
    }
    Ok(gauss_adaptive(f, lo, mid, 0.5 * tol, depth + 1)?
        + gauss_adaptive(f, mid, hi, 0.5 * tol, depth + 1)?)
}

/// G_k(r) through the Fresnel reduction; requires r > 1/2.
pub fn fresnel_g_k(cfg: &PhantomConfig, k: u32, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(r > 0.5) {
        return Err(Error::Domain(format!(
            "Fresnel reduction needs r > 1/2, got {r}"
        )));
    }
    if k < 1 || k > cfg.k_max {
        return Err(Error::Domain(format!(
            "annulus index {k} outside 1..={}",
            cfg.k_max
        )));
    }
    let Some(seg) = segment_for(cfg, k, r) else {
        return Ok(0.0);
    };
    let eight_k = 8f64.powi(k as i32);
    let env = Envelope {
        cfg,
        two_k: 2f64.powi(k as i32),
        inv_eight_k: 1.0 / eight_k,
        r2: r * r,
    };
    let tau_a = eight_k * seg.a * seg.a;
    let tau_b = eight_k * seg.b * seg.b;
    let tol = spec.rel_tol.max(1e-14);
    let mut total = Complex64::new(0.0, 0.0);

    let tau_c = if tau_a < IBP_SPLIT {
        tau_b.min(IBP_SPLIT)
    } else {
        tau_a
    };
    if tau_c > tau_a {
        // int Phi_k dE = [Phi_k E] - int E Phi_k' dtau, with tau = v^2.
        let boundary =
            e_primitive(tau_c) * env.value(tau_c) - e_primitive(tau_a) * env.value(tau_a);
        let g = |v: f64| {
            let tau = v * v;
            e_primitive(tau) * (env.deriv(tau) * 2.0 * v)
        };
        let inner = gauss_adaptive(&g, tau_a.sqrt(), tau_c.sqrt(), tol, 0)?;
        total += boundary - inner;
    }
    if tau_b > tau_c {
        let levin = Levin::new(LEVIN_NODES);
        let f = |tau: f64| env.value(tau) / tau.sqrt();
        let x_hi = env.x(tau_c);
        let x_lo = env.x(tau_b);
        let panels = ((x_hi - x_lo) / PANEL_DX).ceil().max(1.0) as usize;
        let mut prev = tau_c;
        for p in 1..=panels {
            let next = if p == panels {
                tau_b
            } else {
                env.tau_of_x(x_hi - (x_hi - x_lo) * p as f64 / panels as f64)
            };
            if next > prev {
                total += levin.adaptive(&f, prev, next, tol / panels as f64, 0)?;
            }
            prev = next;
        }
    }
    let alpha = eight_k * r * r;
    let phase = Complex64::from_polar(1.0, alpha);
    Ok((phase * total).re / eight_k.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::g_tilde_k;

    #[test]
    fn primitive_at_zero_and_infinity() {
        assert_eq!(fresnel_primitive(0.0).unwrap(), (0.0, 0.0));
        let lim = FRAC_PI_2.sqrt();
        // The tails are -cos(s)/sqrt(s) and sin(s)/sqrt(s) to leading order.
        let s = 1e6f64;
        let (g1, g2) = fresnel_primitive(s).unwrap();
        assert!((g1 - lim + s.cos() / s.sqrt()).abs() < 1e-8);
        assert!((g2 - lim - s.sin() / s.sqrt()).abs() < 1e-8);
        let (g1, g2) = fresnel_primitive(1e12).unwrap();
        assert!((g1 - lim).abs() < 1e-5 && (g2 - lim).abs() < 1e-5);
        assert!(fresnel_primitive(-1.0).is_err());
    }

    #[test]
    fn branches_agree_at_switch() {
        let (c1, s1) = fresnel_series(SERIES_LIMIT);
        let (c2, s2) = fresnel_continued_fraction(SERIES_LIMIT);
        assert!((c1 - c2).abs() < 1e-12 && (s1 - s2).abs() < 1e-12);
    }

    #[test]
    fn primitive_at_one_matches_quadrature() {
        // int_0^1 sin t / sqrt t dt = 2 int_0^1 sin v^2 dv.
        let rule = gauss_rule(32);
        let (mut a, mut b) = (0.0, 0.0);
        let n = 64;
        for p in 0..n {
            let m = (p as f64 + 0.5) / n as f64;
            let h = 0.5 / n as f64;
            for &(x, w) in rule {
                let v = m + h * x;
                a += 2.0 * (v * v).sin() * w * h;
                b += 2.0 * (v * v).cos() * w * h;
            }
        }
        let (g1, g2) = fresnel_primitive(1.0).unwrap();
        assert!((g1 - a).abs() < 1e-10 && (g2 - b).abs() < 1e-10);
    }

    #[test]
    fn fast_path_matches_direct() {
        let cfg = PhantomConfig::new(8).unwrap();
        let spec = QuadratureSpec::default();
        let direct = g_tilde_k(&cfg, 4, 0.8, &spec).unwrap();
        let fast = fresnel_g_k(&cfg, 4, 0.8, &spec).unwrap();
        assert!(
            (direct - fast).abs() < 1e-8 * (1.0 + direct.abs()),
            "{direct} {fast}"
        );
        assert!(fresnel_g_k(&cfg, 4, 0.5, &spec).is_err());
        assert_eq!(fresnel_g_k(&cfg, 3, 1.0 - 1.0 / 16.0, &spec).unwrap(), 0.0);
    }
}

//! The radial phantom f = sum_k f_k / k! with f_k(t) = Phi(2^k (1 - t)) cos(8^k t^2).
//!
//! Annulus k is the support [1 - 1.2 * 2^-k, 1 - 0.8 * 2^-k]; annuli are
//! pairwise disjoint, so f at a point involves exactly one term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::BumpProfile;
use crate::Real;

/// Smallest accepted truncation order.
pub const MIN_K_MAX: u32 = 4;
/// Largest accepted truncation order; beyond it 8^k t^2 outruns double precision.
pub const MAX_K_MAX: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhantomConfig<T> {
    pub k_max: u32,
    pub bump: BumpProfile<T>,
}

impl<T: Real> PhantomConfig<T> {
    pub fn new(k_max: u32) -> Result<Self> {
        Self::with_bump(k_max, BumpProfile::standard())
    }

    pub fn with_bump(k_max: u32, bump: BumpProfile<T>) -> Result<Self> {
        let cfg = Self { k_max, bump };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_K_MAX..=MAX_K_MAX).contains(&self.k_max) {
            return Err(Error::Config(format!(
                "k_max must lie in {MIN_K_MAX}..={MAX_K_MAX}, got {}",
                self.k_max
            )));
        }
        self.bump.validate()?;
        let one = T::one();
        let two = one + one;
        // Disjointness of the annuli needs fall_end <= 2 rise_start.
        if self.bump.rise_start <= T::zero() || self.bump.fall_end > two * self.bump.rise_start {
            return Err(Error::Config(
                "bump support must satisfy 0 < rise_start and fall_end <= 2 rise_start".into(),
            ));
        }
        Ok(())
    }

    /// sum_{k > k_max} 1/k!.
    pub fn tail_bound(&self) -> f64 {
        let mut term = 1.0 / factorial(self.k_max);
        let mut total = 0.0;
        for k in self.k_max + 1..self.k_max + 40 {
            term /= k as f64;
            total += term;
        }
        total
    }

    /// Absolute error of a cos(8^k t^2) evaluation from argument rounding,
    /// 8^k_max * 2^-52.
    pub fn cos_argument_budget(&self) -> f64 {
        8f64.powi(self.k_max as i32) * f64::EPSILON
    }

    /// Closed support [lo, hi] of f_k.
    pub fn annulus(&self, k: u32) -> (T, T) {
        let scale = T::from(2f64.powi(-(k as i32))).unwrap();
        (
            T::one() - scale * self.bump.fall_end,
            T::one() - scale * self.bump.rise_start,
        )
    }

    /// Ray distance above which no annulus is crossed: the outer edge of annulus k_max.
    pub fn support_edge(&self) -> T {
        self.annulus(self.k_max).1
    }

    /// Truncation horizon 1 - 2^(-k_max + 1).
    pub fn horizon(&self) -> T {
        T::one() - T::from(2f64.powi(-(self.k_max as i32) + 1)).unwrap()
    }

    pub fn f_k_radial(&self, k: u32, t: T) -> Result<T> {
        if k < 1 || k > self.k_max {
            return Err(Error::Domain(format!(
                "annulus index {k} outside 1..={}",
                self.k_max
            )));
        }
        if t < T::zero() {
            return Err(Error::Domain("radius must be nonnegative".into()));
        }
        Ok(self.f_k(k, t))
    }

    /// f_k(t) without range checks.
    #[inline]
    pub fn f_k(&self, k: u32, t: T) -> T {
        let two_k = T::from(2f64.powi(k as i32)).unwrap();
        let amp = self.bump.eval(two_k * (T::one() - t));
        if amp == T::zero() {
            return T::zero();
        }
        amp * self.phase(k, t).cos()
    }

    /// d/dt f_k(t) = -2^k Phi'(x) cos(8^k t^2) - 2 * 8^k t Phi(x) sin(8^k t^2), x = 2^k (1 - t).
    pub fn f_k_deriv(&self, k: u32, t: T) -> T {
        let two_k = T::from(2f64.powi(k as i32)).unwrap();
        let x = two_k * (T::one() - t);
        let amp = self.bump.eval(x);
        let damp = self.bump.deriv(x);
        if amp == T::zero() && damp == T::zero() {
            return T::zero();
        }
        let eight_k = T::from(8f64.powi(k as i32)).unwrap();
        let ph = self.phase(k, t);
        -two_k * damp * ph.cos() - (eight_k + eight_k) * t * amp * ph.sin()
    }

    #[inline]
    pub fn phase(&self, k: u32, t: T) -> T {
        T::from(8f64.powi(k as i32)).unwrap() * t * t
    }

    /// Envelope Phi(2^k (1 - t)).
    #[inline]
    pub fn envelope(&self, k: u32, t: T) -> T {
        let two_k = T::from(2f64.powi(k as i32)).unwrap();
        self.bump.eval(two_k * (T::one() - t))
    }

    /// Unique k with t in annulus k (k <= k_max), if any.
    pub fn annulus_of(&self, t: T) -> Option<u32> {
        if !(t < T::one()) || t < T::zero() {
            return None;
        }
        let d = (T::one() - t).to_f64()?;
        // 2^k (1 - t) lies in the bump support; the log2 of the midpoint picks k.
        let mid = (self.bump.rise_start + self.bump.fall_end).to_f64()? * 0.5;
        let k = (mid / d).log2().round();
        if !(k >= 1.0 && k <= self.k_max as f64) {
            return None;
        }
        let k = k as u32;
        let (lo, hi) = self.annulus(k);
        (t >= lo && t <= hi).then_some(k)
    }

    /// f(t) = f_k(t)/k! on annulus k, 0 elsewhere.
    pub fn f_radial(&self, t: T) -> T {
        match self.annulus_of(t) {
            Some(k) => self.f_k(k, t) / T::from(factorial(k)).unwrap(),
            None => T::zero(),
        }
    }

    /// sum_k f_k(t) without the 1/k! factors; bounded by 1.
    pub fn f_unscaled(&self, t: T) -> T {
        match self.annulus_of(t) {
            Some(k) => self.f_k(k, t),
            None => T::zero(),
        }
    }

    /// The truncated series summed term by term.
    pub fn f_series(&self, t: T) -> T {
        (1..=self.k_max).fold(T::zero(), |acc, k| {
            acc + self.f_k(k, t) / T::from(factorial(k)).unwrap()
        })
    }

    /// Positive and negative samples of f on the ray at distance r, taken in
    /// the outermost annulus the ray crosses.
    pub fn sign_change_certificate(&self, r: T) -> Result<SignChangeCertificate<T>> {
        let k = self.k_max;
        let (lo, hi) = self.annulus(k);
        if !(r >= T::zero() && r < lo) {
            return Err(Error::Domain(format!(
                "certificate needs 0 <= r < {:?}, got {:?}",
                lo.to_f64(),
                r.to_f64()
            )));
        }
        let a = (lo * lo - r * r).sqrt();
        let b = (hi * hi - r * r).sqrt();
        let phase_span = (self.phase(k, hi) - self.phase(k, lo))
            .to_f64()
            .unwrap_or(0.0);
        let oscillations = phase_span / std::f64::consts::TAU;
        let n = (16.0 * oscillations).ceil() as usize + 16;
        let mut best_pos: Option<(T, T)> = None;
        let mut best_neg: Option<(T, T)> = None;
        for j in 1..n {
            let s = a + (b - a) * T::from(j).unwrap() / T::from(n).unwrap();
            let v = self.f_radial((r * r + s * s).sqrt());
            if v > T::zero() && best_pos.map_or(true, |(_, w)| v > w) {
                best_pos = Some((s, v));
            }
            if v < T::zero() && best_neg.map_or(true, |(_, w)| v < w) {
                best_neg = Some((s, v));
            }
        }
        match (best_pos, best_neg) {
            (Some((up, fp)), Some((um, fm))) => Ok(SignChangeCertificate {
                r,
                u_plus: up,
                u_minus: um,
                f_plus: fp,
                f_minus: fm,
            }),
            _ => Err(Error::Certificate {
                r: r.to_f64().unwrap_or(f64::NAN),
                reason: format!("no sign change among {n} samples of annulus {k}"),
            }),
        }
    }
}

/// Evidence that f restricted to a ray changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignChangeCertificate<T> {
    pub r: T,
    pub u_plus: T,
    pub u_minus: T,
    pub f_plus: T,
    pub f_minus: T,
}

impl<T: Real> SignChangeCertificate<T> {
    /// Re-evaluates both samples on the ray and checks the signs.
    pub fn check(&self, cfg: &PhantomConfig<T>) -> bool {
        let at = |u: T| cfg.f_radial((self.r * self.r + u * u).sqrt());
        at(self.u_plus) > T::zero() && at(self.u_minus) < T::zero() && self.u_plus != self.u_minus
    }
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PhantomConfig<f64> {
        PhantomConfig::new(8).unwrap()
    }

    #[test]
    fn f_k_examples() {
        let c = cfg();
        assert_eq!(c.f_k_radial(3, 0.5).unwrap(), 0.0);
        let t = 1.0 - 0.125;
        assert_eq!(c.f_k_radial(3, t).unwrap(), (512.0 * t * t).cos());
        assert!(((512.0f64 * (7.0 / 8.0) * (7.0 / 8.0)) - 392.0).abs() < 1e-12);
        for k in 1..=8 {
            assert_eq!(c.f_k_radial(k, 1.5).unwrap(), 0.0);
        }
        assert!(c.f_k_radial(0, 0.5).is_err());
        assert!(c.f_k_radial(9, 0.5).is_err());
    }

    #[test]
    fn f_radial_examples() {
        let c = cfg();
        assert_eq!(c.f_radial(0.0), 0.0);
        assert_eq!(c.f_radial(2.0), 0.0);
        let t = 1.0 - 1.0 / 16.0;
        assert_eq!(c.f_radial(t), (4096.0 * t * t).cos() / 24.0);
    }

    #[test]
    fn annulus_examples() {
        let c = cfg();
        assert_eq!(c.annulus_of(1.0 - 2f64.powi(-5)), Some(5));
        assert_eq!(c.annulus_of(1.0 - 2f64.powi(-5) * 1.2 - 1e-9), None);
        assert_eq!(c.annulus_of(0.2), None);
        for k in 1..=8 {
            let (lo, hi) = c.annulus(k);
            assert_eq!(c.annulus_of(lo), Some(k));
            assert_eq!(c.annulus_of(hi), Some(k));
            assert_eq!(c.annulus_of(0.5 * (lo + hi)), Some(k));
        }
    }

    #[test]
    fn config_range() {
        assert!(PhantomConfig::<f64>::new(3).is_err());
        assert!(PhantomConfig::<f64>::new(11).is_err());
        let c = cfg();
        let exact: f64 = std::f64::consts::E - (0..=8).map(factorial).map(|f| 1.0 / f).sum::<f64>();
        assert!((c.tail_bound() - exact).abs() < 1e-15);
    }

    #[test]
    fn certificates() {
        let c = cfg();
        let cert = c.sign_change_certificate(0.0).unwrap();
        assert!(cert.check(&c));
        assert_ne!(cert.u_plus, cert.u_minus);
        assert_eq!(c.annulus_of(cert.u_plus), Some(8));
        assert!(c.sign_change_certificate(0.5).unwrap().check(&c));
        assert!(c.sign_change_certificate(1.5).is_err());
    }

    #[test]
    fn derivative_matches_difference() {
        let c = cfg();
        for (k, t) in [(3u32, 0.87), (5, 0.971), (8, 0.996)] {
            let h = 3e-7 * 8f64.powi(-(k as i32) / 2);
            let fd = (c.f_k(k, t + h) - c.f_k(k, t - h)) / (2.0 * h);
            let d = c.f_k_deriv(k, t);
            // The difference quotient is limited by phase rounding, about 8^k eps / h.
            assert!(
                (fd - d).abs() < 1e-4 * 8f64.powi(k as i32),
                "k={k}: {fd} vs {d}"
            );
        }
    }

    #[test]
    fn generic_f32() {
        let c = PhantomConfig::<f32>::new(4).unwrap();
        assert_eq!(c.f_radial(0.1f32), 0.0);
        assert_eq!(c.annulus_of(1.0f32 - 0.125), Some(3));
    }
}

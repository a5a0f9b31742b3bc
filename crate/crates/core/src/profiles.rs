//! Smooth building blocks: the exp(-1/u) step, bump profiles, the dyadic
//! partition in the variable u = -log2(1 - r), the even subordinate partition
//! on the ray-distance axis and the radial pair phi1/phi2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

#[inline]
fn lit<T: Real>(x: f64) -> T {
    T::from(x).expect("literal representable")
}

#[inline]
fn sigma<T: Real>(u: T) -> T {
    if u > T::zero() {
        (-u.recip()).exp()
    } else {
        T::zero()
    }
}

/// S(u) = sigma(u) / (sigma(u) + sigma(1 - u)), sigma(u) = exp(-1/u) for u > 0.
///
/// Flat at 0 and 1, S(1/2) = 1/2, 0 below 0 and 1 above 1.
pub fn smooth_step<T: Real>(u: T) -> T {
    if u <= T::zero() {
        return T::zero();
    }
    if u >= T::one() {
        return T::one();
    }
    let a = sigma(u);
    let b = sigma(T::one() - u);
    a / (a + b)
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_deriv<T: Real>(u: T) -> T {
    if u <= T::zero() || u >= T::one() {
        return T::zero();
    }
    let v = T::one() - u;
    let a = sigma(u);
    let b = sigma(v);
    let da = a / (u * u);
    let db = b / (v * v);
    (da * b + a * db) / ((a + b) * (a + b))
}

/// Plateau bump: rises on [rise_start, rise_end], equals 1 up to fall_start,
/// falls to 0 at fall_end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile<T> {
    pub rise_start: T,
    pub rise_end: T,
    pub fall_start: T,
    pub fall_end: T,
}

impl<T: Real> BumpProfile<T> {
    pub fn new(rise_start: T, rise_end: T, fall_start: T, fall_end: T) -> Result<Self> {
        let b = Self {
            rise_start,
            rise_end,
            fall_start,
            fall_end,
        };
        b.validate()?;
        Ok(b)
    }

    /// The phantom profile: support [4/5, 6/5], plateau [9/10, 11/10].
    pub fn standard() -> Self {
        Self {
            rise_start: lit(0.8),
            rise_end: lit(0.9),
            fall_start: lit(1.1),
            fall_end: lit(1.2),
        }
    }

    /// Bump with support [a, b] and plateau on the middle half.
    pub fn centered(center: T, half_width: T) -> Result<Self> {
        let h = half_width * lit(0.5);
        Self::new(
            center - half_width,
            center - h,
            center + h,
            center + half_width,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rise_start.is_finite()
            && self.fall_end.is_finite()
            && self.rise_start < self.rise_end
            && self.rise_end <= self.fall_start
            && self.fall_start < self.fall_end;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "bump profile requires rise_start < rise_end <= fall_start < fall_end, got ({:?}, {:?}, {:?}, {:?})",
                self.rise_start.to_f64(),
                self.rise_end.to_f64(),
                self.fall_start.to_f64(),
                self.fall_end.to_f64()
            )))
        }
    }

    pub fn eval(&self, t: T) -> T {
        if t <= self.rise_start || t >= self.fall_end {
            return T::zero();
        }
        let up = smooth_step((t - self.rise_start) / (self.rise_end - self.rise_start));
        let down = smooth_step((self.fall_end - t) / (self.fall_end - self.fall_start));
        up * down
    }

    pub fn deriv(&self, t: T) -> T {
        if t <= self.rise_start || t >= self.fall_end {
            return T::zero();
        }
        let wr = self.rise_end - self.rise_start;
        let wf = self.fall_end - self.fall_start;
        let ur = (t - self.rise_start) / wr;
        let uf = (self.fall_end - t) / wf;
        smooth_step_deriv(ur) / wr * smooth_step(uf) - smooth_step(ur) * smooth_step_deriv(uf) / wf
    }

    pub fn support(&self) -> (T, T) {
        (self.rise_start, self.fall_end)
    }
}

/// Phi of the phantom: [`BumpProfile::eval`] with the profile checked first.
pub fn phi_profile<T: Real>(b: &BumpProfile<T>, t: T) -> Result<T> {
    b.validate()?;
    Ok(b.eval(t))
}

/// eta(v) = S(v + 1) - S(v), supported on (-1, 1), eta(0) = 1.
pub fn eta<T: Real>(v: T) -> T {
    smooth_step(v + T::one()) - smooth_step(v)
}

/// u = -log2(1 - r).
pub fn dyadic_coordinate<T: Real>(r: T) -> T {
    -(T::one() - r).log2()
}

/// psi_k(r) = eta(u - k) for k = 1..k_max.
///
/// With `closed_top` the last element is replaced by S(u - k_max + 1), so the
/// family sums to 1 on all of [1/2, 1) instead of stopping near 1 - 2^-k_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub k_max: u32,
    pub closed_top: bool,
}

impl DyadicPartition {
    pub fn new(k_max: u32) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Config("dyadic partition needs k_max >= 1".into()));
        }
        Ok(Self {
            k_max,
            closed_top: false,
        })
    }

    pub fn with_closed_top(k_max: u32) -> Result<Self> {
        let mut p = Self::new(k_max)?;
        p.closed_top = true;
        Ok(p)
    }

    pub fn psi<T: Real>(&self, k: u32, r: T) -> Result<T> {
        if k < 1 || k > self.k_max {
            return Err(Error::Domain(format!(
                "psi index {k} outside 1..={}",
                self.k_max
            )));
        }
        if !(r < T::one()) {
            return Err(Error::Domain(format!(
                "psi_k needs r < 1, got {:?}",
                r.to_f64()
            )));
        }
        Ok(self.psi_unchecked(k, r))
    }

    pub(crate) fn psi_unchecked<T: Real>(&self, k: u32, r: T) -> T {
        let kk = T::from(k).unwrap();
        // (1 - 2^{-k+1}, 1 - 2^{-k-1}) in r is (k - 1, k + 1) in u.
        let u = dyadic_coordinate(r);
        if self.closed_top && k == self.k_max {
            return smooth_step(u - kk + T::one());
        }
        if u <= kk - T::one() || u >= kk + T::one() {
            return T::zero();
        }
        eta(u - kk)
    }

    /// d/dr psi_k(r).
    pub fn psi_deriv<T: Real>(&self, k: u32, r: T) -> T {
        if k < 1 || k > self.k_max || !(r < T::one()) {
            return T::zero();
        }
        let kk = T::from(k).unwrap();
        let u = dyadic_coordinate(r);
        let du = T::one() / ((T::one() - r) * T::LN_2());
        if self.closed_top && k == self.k_max {
            return smooth_step_deriv(u - kk + T::one()) * du;
        }
        if u <= kk - T::one() || u >= kk + T::one() {
            return T::zero();
        }
        let v = u - kk;
        (smooth_step_deriv(v + T::one()) - smooth_step_deriv(v)) * du
    }

    /// Candidate indices with a possibly nonzero value at r.
    pub fn active<T: Real>(&self, r: T) -> impl Iterator<Item = u32> + '_ {
        let u = dyadic_coordinate(r).to_f64().unwrap_or(f64::NAN);
        // psi_k is nonzero only for k in (u - 1, u + 1).
        let (mut lo, mut hi) = if u.is_finite() {
            (
                ((u - 1.0).floor() + 1.0).max(1.0) as u32,
                ((u + 1.0).ceil() - 1.0).clamp(0.0, self.k_max as f64) as u32,
            )
        } else {
            (1, 0)
        };
        if self.closed_top && u.is_finite() && u > (self.k_max as f64) - 1.0 {
            lo = lo.min(self.k_max);
            hi = self.k_max;
        }
        (lo..=hi).filter(move |&k| k >= 1 && k <= self.k_max)
    }

    pub fn sum<T: Real>(&self, r: T) -> T {
        (1..=self.k_max).fold(T::zero(), |acc, k| acc + self.psi_unchecked(k, r))
    }
}

/// Even partition of unity on the ray-distance axis subordinate to
/// J_0 = (delta0, inf) and the cover intervals J_i = (c_i - e_i, c_i + e_i).
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatePartition<T> {
    delta0: T,
    intervals: Vec<(T, T)>,
    bumps: Vec<BumpProfile<T>>,
}

impl<T: Real> SubordinatePartition<T> {
    /// Build from cover intervals (center, half-width) and delta0.
    ///
    /// Right endpoints are clamped to (1 + delta0)/2. Validity of the cover is
    /// checked on a grid of spacing min(e_i)/8 over [0, delta0].
    pub fn build(cover: &[(T, T)], delta0: T) -> Result<Self> {
        let half = lit::<T>(0.5);
        if !(delta0 > T::zero() && delta0 < T::one()) {
            return Err(Error::Assembly(format!(
                "delta0 must lie in (0, 1), got {:?}",
                delta0.to_f64()
            )));
        }
        if cover.is_empty() {
            return Err(Error::Assembly("empty cover".into()));
        }
        let cap = (T::one() + delta0) * half;
        let mut intervals = Vec::with_capacity(cover.len());
        let mut bumps = Vec::with_capacity(cover.len());
        for &(c, e) in cover {
            if !(e > T::zero()) || !(c >= T::zero()) || !c.is_finite() || !e.is_finite() {
                return Err(Error::Assembly(format!(
                    "cover interval ({:?}, {:?}) is degenerate",
                    c.to_f64(),
                    e.to_f64()
                )));
            }
            // Right endpoints are clamped to the cap so that xi_0 = 1 for |s| >= 1.
            let lo = c - e;
            let hi = (c + e).min(cap);
            if !(hi > lo) {
                return Err(Error::Assembly(format!(
                    "cover interval ({:?}, {:?}) lies above (1 + delta0)/2",
                    c.to_f64(),
                    e.to_f64()
                )));
            }
            let (c, e) = ((lo + hi) * half, (hi - lo) * half);
            intervals.push((c, e));
            bumps.push(BumpProfile::centered(c, e)?);
        }
        let p = Self {
            delta0,
            intervals,
            bumps,
        };
        let min_e = p
            .intervals
            .iter()
            .fold(T::infinity(), |m, &(_, e)| m.min(e));
        let h = min_e / lit(8.0);
        let n = (delta0 / h).ceil().to_usize().unwrap_or(usize::MAX);
        if n > 50_000_000 {
            return Err(Error::Assembly("cover check grid too large".into()));
        }
        for j in 0..=n {
            let s = (T::from(j).unwrap() * h).min(delta0);
            if !(p.raw_sum(s) > T::zero()) {
                return Err(Error::Assembly(format!(
                    "gap in cover at s = {:?}",
                    s.to_f64()
                )));
            }
        }
        Ok(p)
    }

    pub fn delta0(&self) -> T {
        self.delta0
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    /// Number of elements including xi_0.
    pub fn len(&self) -> usize {
        self.bumps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn raw0(&self, s: T) -> T {
        smooth_step((s.abs() - self.delta0) / (T::one() - self.delta0))
    }

    fn raw(&self, i: usize, s: T) -> T {
        let b = &self.bumps[i];
        b.eval(s) + b.eval(-s)
    }

    fn raw_sum(&self, s: T) -> T {
        (0..self.bumps.len()).fold(self.raw0(s), |acc, i| acc + self.raw(i, s))
    }

    /// xi_i(s); index 0 is the outer element.
    pub fn xi(&self, i: usize, s: T) -> T {
        let total = self.raw_sum(s);
        let num = if i == 0 {
            self.raw0(s)
        } else {
            self.raw(i - 1, s)
        };
        num / total
    }

    /// All values at s, index 0 first.
    pub fn values(&self, s: T) -> Vec<T> {
        let mut v = Vec::with_capacity(self.len());
        v.push(self.raw0(s));
        for i in 0..self.bumps.len() {
            v.push(self.raw(i, s));
        }
        let total = v.iter().fold(T::zero(), |a, &x| a + x);
        v.iter_mut().for_each(|x| *x = *x / total);
        v
    }

    /// (index, value) for the nonzero elements at s.
    pub fn nonzero(&self, s: T) -> Vec<(usize, T)> {
        self.values(s)
            .into_iter()
            .enumerate()
            .filter(|&(_, x)| x > T::zero())
            .collect()
    }
}

/// Build the even partition from a cover and delta0.
pub fn build_symmetric_partition<T: Real>(
    cover: &[(T, T)],
    delta0: T,
) -> Result<SubordinatePartition<T>> {
    SubordinatePartition::build(cover, delta0)
}

/// phi1(t) = 1 - S((t - 1)/(R - 1)), phi2 = 1 - phi1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPair<T> {
    pub outer: T,
}

/// Selects phi1 or phi2 in [`radial_pair_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Inner,
    Outer,
}

impl<T: Real> RadialPair<T> {
    pub fn new(outer: T) -> Result<Self> {
        if !(outer > T::one()) || !outer.is_finite() {
            return Err(Error::Config(format!(
                "outer radius must exceed 1, got {:?}",
                outer.to_f64()
            )));
        }
        Ok(Self { outer })
    }

    pub fn phi1(&self, t: T) -> T {
        T::one() - smooth_step((t - T::one()) / (self.outer - T::one()))
    }

    pub fn phi2(&self, t: T) -> T {
        smooth_step((t - T::one()) / (self.outer - T::one()))
    }

    pub fn eval(&self, which: Which, t: T) -> T {
        match which {
            Which::Inner => self.phi1(t),
            Which::Outer => self.phi2(t),
        }
    }
}

impl<T: Real> Default for RadialPair<T> {
    fn default() -> Self {
        Self { outer: lit(2.0) }
    }
}

pub fn radial_pair_eval<T: Real>(p: &RadialPair<T>, which: Which, t: T) -> Result<T> {
    if !(p.outer > T::one()) {
        return Err(Error::Config("outer radius must exceed 1".into()));
    }
    if t < T::zero() {
        return Err(Error::Domain("radial argument must be nonnegative".into()));
    }
    Ok(p.eval(which, t))
}

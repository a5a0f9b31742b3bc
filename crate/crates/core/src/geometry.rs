//! Oriented lines in R^d: projection of the base point, distance to the
//! origin and the axial coordinate.

use crate::error::{Error, Result};
use crate::Real;

/// Line {base + t dir}, with |dir| = 1 and base orthogonal to dir.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray<T> {
    pub base: Vec<T>,
    pub dir: Vec<T>,
}

/// Distance r of the line to the origin and signed axial position s = x . theta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCoords<T> {
    pub r: T,
    pub s: T,
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn unit_tolerance<T: Real>() -> T {
    T::epsilon() * T::from(64.0).unwrap()
}

fn check_direction<T: Real>(x: &[T], theta: &[T]) -> Result<()> {
    if x.len() != theta.len() || x.len() < 2 {
        return Err(Error::Domain(format!(
            "point and direction must share a dimension >= 2 (got {} and {})",
            x.len(),
            theta.len()
        )));
    }
    let n = norm(theta);
    if !((n - T::one()).abs() <= unit_tolerance()) {
        return Err(Error::Domain(format!(
            "direction is not a unit vector (|theta| = {:?})",
            n.to_f64()
        )));
    }
    Ok(())
}

/// (r, s) for the line through x with direction theta.
pub fn ray_coords<T: Real>(x: &[T], theta: &[T]) -> Result<RayCoords<T>> {
    check_direction(x, theta)?;
    Ok(coords_unchecked(x, theta))
}

pub(crate) fn coords_unchecked<T: Real>(x: &[T], theta: &[T]) -> RayCoords<T> {
    let s = dot(x, theta);
    let r = x
        .iter()
        .zip(theta)
        .fold(T::zero(), |acc, (&xi, &ti)| {
            let p = xi - s * ti;
            acc + p * p
        })
        .sqrt();
    RayCoords { r, s }
}

/// pi_theta x = x - (x . theta) theta together with r = |pi_theta x|.
pub fn project_ray<T: Real>(x: &[T], theta: &[T]) -> Result<(Ray<T>, T)> {
    check_direction(x, theta)?;
    let s = dot(x, theta);
    let base: Vec<T> = x.iter().zip(theta).map(|(&xi, &ti)| xi - s * ti).collect();
    let r = norm(&base);
    Ok((
        Ray {
            base,
            dir: theta.to_vec(),
        },
        r,
    ))
}

impl<T: Real> Ray<T> {
    pub fn new(x: &[T], theta: &[T]) -> Result<Self> {
        Ok(project_ray(x, theta)?.0)
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn distance(&self) -> T {
        norm(&self.base)
    }

    pub fn point(&self, s: T) -> Vec<T> {
        self.base
            .iter()
            .zip(&self.dir)
            .map(|(&b, &d)| b + s * d)
            .collect()
    }

    pub fn reversed(&self) -> Self {
        Self {
            base: self.base.clone(),
            dir: self.dir.iter().map(|&d| -d).collect(),
        }
    }

    /// The same line translated by y.
    pub fn translated(&self, y: &[T]) -> Result<Self> {
        let x: Vec<T> = self.base.iter().zip(y).map(|(&b, &v)| b + v).collect();
        Self::new(&x, &self.dir)
    }
}

/// Sum in order of increasing magnitude, so that permuting the terms or
/// negating all of them cannot change the rounding (up to ties |a| = |b|).
fn sorted_sum<T: Real>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| {
        a.abs()
            .partial_cmp(&b.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    v.into_iter().fold(T::zero(), |acc, x| acc + x)
}

/// Rotation-invariant description of a point on a line: (|x|, |x . theta|).
///
/// Bitwise invariant under signed permutations applied to both x and theta
/// and under theta -> -theta.
pub fn invariants<T: Real>(x: &[T], theta: &[T]) -> (T, T) {
    let n = sorted_sum(x.iter().map(|&v| v * v).collect()).sqrt();
    let a = sorted_sum(x.iter().zip(theta).map(|(&v, &t)| v * t).collect()).abs();
    (n, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned() {
        let (ray, r) = project_ray(&[3.0, 4.0], &[1.0, 0.0]).unwrap();
        assert_eq!(ray.base, vec![0.0, 4.0]);
        assert_eq!(r, 4.0);
        let (again, r2) = project_ray(&ray.base, &ray.dir).unwrap();
        assert_eq!(again, ray);
        assert_eq!(r2, r);
    }

    #[test]
    fn rejects_non_unit() {
        assert!(project_ray(&[1.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(project_ray(&[1.0, 0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn pythagoras_3d() {
        let x = [0.3, -1.2, 0.7];
        let n = (1.0f64 + 4.0 + 9.0).sqrt();
        let th = [1.0 / n, 2.0 / n, -3.0 / n];
        let c = ray_coords(&x, &th).unwrap();
        let x2: f64 = x.iter().map(|v| v * v).sum();
        assert!((c.r * c.r + c.s * c.s - x2).abs() < 1e-12);
    }

    #[test]
    fn f32_projection() {
        let (_, r) = project_ray(&[3.0f32, 4.0], &[0.0, 1.0]).unwrap();
        assert_eq!(r, 3.0);
    }
}

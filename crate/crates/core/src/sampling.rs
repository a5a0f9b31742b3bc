//! Seeded random lines, directions and orthogonal matrices.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm};
use crate::Ray;

pub use rand::SeedableRng;

/// The generator used throughout; `Rng::seed_from_u64` fixes every sample.
pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on the unit sphere in R^dim.
pub fn random_unit(dim: usize, rng: &mut SampleRng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-8 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Line at distance r with uniformly random direction and base direction.
pub fn random_ray(dim: usize, r: f64, rng: &mut SampleRng) -> Result<Ray> {
    if dim < 2 {
        return Err(Error::Domain(format!(
            "lines need dimension >= 2, got {dim}"
        )));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "line distance must be finite and >= 0, got {r}"
        )));
    }
    let theta = random_unit(dim, rng);
    loop {
        let v = random_unit(dim, rng);
        let c = dot(&v, &theta);
        let p: Vec<f64> = v.iter().zip(&theta).map(|(a, t)| a - c * t).collect();
        let n = norm(&p);
        if n > 1e-6 {
            let base: Vec<f64> = p.iter().map(|x| r * x / n).collect();
            return Ok(Ray { base, dir: theta });
        }
    }
}

/// n distances spread over [lo, hi): one uniform draw in each of n equal cells.
pub fn stratified(lo: f64, hi: f64, n: usize, rng: &mut SampleRng) -> Vec<f64> {
    (0..n)
        .map(|j| lo + (hi - lo) * (j as f64 + rng.random::<f64>()) / n as f64)
        .collect()
}

/// Row-major dim x dim matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| dot(&self.data[i * self.dim..(i + 1) * self.dim], x))
            .collect()
    }

    /// max |A^T A - I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let s: f64 = (0..d)
                    .map(|k| self.data[k * d + i] * self.data[k * d + j])
                    .sum();
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - e).abs());
            }
        }
        worst
    }
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt on Gaussian columns,
/// which is QR with a positive diagonal in R.
pub fn haar_orthogonal(dim: usize, rng: &mut SampleRng) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p = dot(&v, c);
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let mut data = vec![0.0; dim * dim];
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            data[i * dim + j] = x;
        }
    }
    Matrix { dim, data }
}

/// Random signed permutation matrix; applying it is exact in floating point.
pub fn signed_permutation(dim: usize, rng: &mut SampleRng) -> Matrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut data = vec![0.0; dim * dim];
    for (i, &p) in perm.iter().enumerate() {
        data[i * dim + p] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    Matrix { dim, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rays_have_requested_distance() {
        let mut g = rng(7);
        for d in [2, 3, 5] {
            let ray = random_ray(d, 0.37, &mut g).unwrap();
            assert!((ray.distance() - 0.37).abs() < 1e-14);
            assert!(dot(&ray.base, &ray.dir).abs() < 1e-14);
            assert!((norm(&ray.dir) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_matrices() {
        let mut g = rng(3);
        for d in [2, 3] {
            assert!(haar_orthogonal(d, &mut g).orthogonality_defect() < 1e-14);
            assert_eq!(signed_permutation(d, &mut g).orthogonality_defect(), 0.0);
        }
    }

    #[test]
    fn seeded_reproducible() {
        let a = random_ray(3, 0.5, &mut rng(11)).unwrap();
        let b = random_ray(3, 0.5, &mut rng(11)).unwrap();
        assert_eq!(a, b);
    }
}

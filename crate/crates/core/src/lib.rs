//! Construction and numerical verification of strictly positive,
//! rotation-invariant weights W with a smooth radial phantom f in the kernel
//! of the weighted ray transform P_W, in dimension 2 and higher.
//!
//! The smooth profiles, the phantom and the ray geometry are generic over the
//! floating-point type; quadrature and everything built on it work in `f64`.

pub mod assembly;
pub mod error;
pub mod fresnel;
pub mod geometry;
pub mod json;
pub mod local;
pub mod multidim;
pub mod phantom;
pub mod profiles;
pub mod quadrature;
pub mod sampling;
pub mod w0;

pub use error::{Error, Result};

/// Scalar types usable by the generic layers.
pub trait Real:
    num_traits::Float + num_traits::FloatConst + std::fmt::Debug + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: num_traits::Float + num_traits::FloatConst + std::fmt::Debug + Send + Sync + 'static
{
}

pub type BumpProfile = profiles::BumpProfile<f64>;
pub type SubordinatePartition = profiles::SubordinatePartition<f64>;
pub type RadialPair = profiles::RadialPair<f64>;
pub type PhantomConfig = phantom::PhantomConfig<f64>;
pub type SignChangeCertificate = phantom::SignChangeCertificate<f64>;
pub type Ray = geometry::Ray<f64>;

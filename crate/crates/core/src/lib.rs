//! Spectral square root of the Laplacian on discretized one- and
//! two-dimensional domains.
//!
//! The crate assembles a symmetric finite-difference Laplacian `A ~ -div grad`
//! in a weighted inner product, computes its ascending eigendecomposition and
//! builds everything else from the spectrum: the radical operator `sqrt(A)`
//! and general functions of it, heat and wave kernels, Weyl counting,
//! variational bounds and nodal-domain statistics.
//!
//! All numerical types are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod discretize;
pub mod eigensolve;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod nodal;
mod scalar;
pub mod sparse;
pub mod variational;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Domain64 = geometry::Domain<f64>;
pub type Field64 = geometry::Field<f64>;
pub type VecField64 = geometry::VecField<f64>;
pub type Operator64 = discretize::DiscreteOperator<f64>;
pub type Decomposition64 = eigensolve::SpectralDecomposition<f64>;
pub type RadicalSpectrum64 = calculus::RadicalSpectrum<f64>;
pub type Partition64 = variational::Partition<f64>;

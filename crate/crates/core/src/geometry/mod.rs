//! Domains, grid functions and coordinate differential geometry.

mod diffgeo;
mod domain;
mod field;
mod spec;

pub use diffgeo::{
    christoffel, christoffel_with, covariant_derivative, directional, divergence,
    divergence_via_christoffel, gradient, lie_bracket, metric_pairing, partial, Christoffel,
    MetricDerivative,
};
pub use domain::{
    Axis, BoundaryCondition, Domain, DomainKind, MetricSource, MetricTag, MetricWeight, Neighbor,
};
pub use field::{Field, VecField};
pub use spec::{build_domain, BcSpec, DomainSpec, MetricSpec};

use crate::scalar::Scalar;

/// Integral of sqrt(g) over `domain`.
pub fn volume<T: Scalar>(domain: &Domain<T>) -> T {
    domain.volume()
}

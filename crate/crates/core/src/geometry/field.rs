use std::sync::Arc;

use super::domain::Domain;
use crate::error::{Error, Result};
use crate::scalar::{max_abs, Scalar};

/// Scalar grid function: one value per active node.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    domain: Arc<Domain<T>>,
    values: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn new(domain: Arc<Domain<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "field value at node {i} is not finite"
            )));
        }
        Ok(Self { domain, values })
    }

    /// Unchecked constructor for values produced by the crate itself.
    pub(crate) fn raw(domain: Arc<Domain<T>>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        Self { domain, values }
    }

    pub fn zeros(domain: Arc<Domain<T>>) -> Self {
        let n = domain.len();
        Self::raw(domain, vec![T::zero(); n])
    }

    pub fn constant(domain: Arc<Domain<T>>, c: T) -> Self {
        let n = domain.len();
        Self::raw(domain, vec![c; n])
    }

    /// Samples `f([x, y])` at every active node (y = 0 in 1D).
    pub fn from_fn(domain: Arc<Domain<T>>, f: impl Fn([T; 2]) -> T) -> Result<Self> {
        let values = (0..domain.len()).map(|i| f(domain.point(i))).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        &self.domain
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn into_values(self) -> Vec<T> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_same_domain(&self, other: &Self) -> Result<()> {
        if self.domain.same_as(&other.domain) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::raw(
            self.domain.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_domain(other)?;
        Ok(Self::raw(
            self.domain.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, a: T) -> Self {
        self.map(|v| a * v)
    }

    /// `a * self + b * other`
    pub fn axpby(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.values)
    }

    /// Max-norm distance to `other`.
    pub fn max_diff(&self, other: &Self) -> Result<T> {
        self.check_same_domain(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }
}

/// Vector field with components eta^j in the coordinate basis.
#[derive(Clone, Debug, PartialEq)]
pub struct VecField<T> {
    domain: Arc<Domain<T>>,
    components: Vec<Vec<T>>,
}

impl<T: Scalar> VecField<T> {
    pub fn new(domain: Arc<Domain<T>>, components: Vec<Vec<T>>) -> Result<Self> {
        if components.len() != domain.dim() {
            return Err(Error::LengthMismatch {
                expected: domain.dim(),
                got: components.len(),
            });
        }
        for c in &components {
            if c.len() != domain.len() {
                return Err(Error::LengthMismatch {
                    expected: domain.len(),
                    got: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(
                    "vector field component not finite".into(),
                ));
            }
        }
        Ok(Self { domain, components })
    }

    pub(crate) fn raw(domain: Arc<Domain<T>>, components: Vec<Vec<T>>) -> Self {
        Self { domain, components }
    }

    /// Samples `f([x, y])` which returns the components (only the first
    /// `dim` entries are used).
    pub fn from_fn(domain: Arc<Domain<T>>, f: impl Fn([T; 2]) -> [T; 2]) -> Result<Self> {
        let d = domain.dim();
        let mut comps = vec![Vec::with_capacity(domain.len()); d];
        for i in 0..domain.len() {
            let v = f(domain.point(i));
            for (a, c) in comps.iter_mut().enumerate() {
                c.push(v[a]);
            }
        }
        Self::new(domain, comps)
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        &self.domain
    }
    pub fn components(&self) -> &[Vec<T>] {
        &self.components
    }
    pub fn component(&self, j: usize) -> &[T] {
        &self.components[j]
    }

    pub fn check_same_domain(&self, other: &Self) -> Result<()> {
        if self.domain.same_as(&other.domain) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    /// Multiplies every component by the scalar field `f`.
    pub fn scaled_by(&self, f: &Field<T>) -> Result<Self> {
        if !self.domain.same_as(f.domain()) {
            return Err(Error::DomainMismatch);
        }
        let comps = self
            .components
            .iter()
            .map(|c| c.iter().zip(f.values()).map(|(&a, &b)| a * b).collect())
            .collect();
        Ok(Self::raw(self.domain.clone(), comps))
    }

    pub fn max_abs(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |m, c| m.max(max_abs(c)))
    }

    /// Max over `nodes` of the componentwise difference to `other`.
    pub fn max_diff_on(&self, other: &Self, nodes: &[usize]) -> Result<T> {
        self.check_same_domain(other)?;
        let mut m = T::zero();
        for (a, b) in self.components.iter().zip(&other.components) {
            for &i in nodes {
                m = m.max((a[i] - b[i]).abs());
            }
        }
        Ok(m)
    }
}

//! Ascending eigendecomposition of a [`DiscreteOperator`] in its weighted
//! inner product.
//!
//! `A` is self-adjoint for `(u, v) = sum w_i u_i v_i`, so the similarity
//! `S = W^{1/2} A W^{-1/2}` is symmetric. `S` is reduced to tridiagonal form
//! (skipped when it already is), diagonalized by implicit-shift QL, and the
//! eigenvectors are mapped back with `phi = W^{-1/2} Q z`, which makes them
//! orthonormal in the weighted inner product. When only a few modes of a
//! large problem are requested, eigenvalues come from QL without vector
//! accumulation and eigenvectors from inverse iteration. Rectangles are
//! Kronecker sums of two 1D operators and are solved factor by factor.

mod tridiagonal;

use std::sync::Arc;

pub use tridiagonal::Tridiagonal;

use crate::discretize::{weighted_dot, DiscreteOperator};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Field};
use crate::scalar::{cmp, Scalar};

/// Largest matrix dimension accepted by the dense solver.
pub const MAX_DIMENSION: usize = 4096;

/// Below this size all eigenvectors are accumulated during QL.
const FULL_QL_LIMIT: usize = 400;

/// Ascending eigenpairs `A phi_k = lambda_k phi_k` with `(phi_i, phi_j) = delta_ij`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    operator: Arc<DiscreteOperator<T>>,
    raw_lambdas: Vec<T>,
    lambdas: Vec<T>,
    radicals: Vec<T>,
    vectors: Vec<Vec<T>>,
    residuals: Vec<T>,
    groups: Vec<Vec<usize>>,
    norm: T,
}

/// Cluster tolerance `1e-6 max(lambda, 1)` used to group multiplicities.
pub fn cluster_tolerance<T: Scalar>(lambda: T) -> T {
    T::lit(1e-6) * lambda.abs().max(T::one())
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn operator(&self) -> &DiscreteOperator<T> {
        &self.operator
    }
    pub fn domain(&self) -> &Arc<Domain<T>> {
        self.operator.domain()
    }
    /// Number of computed modes.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }
    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
    /// True when every mode of the operator was computed.
    pub fn is_complete(&self) -> bool {
        self.len() == self.operator.dim()
    }
    /// Eigenvalues with everything within `1e-10 ||A||` of zero set to zero.
    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }
    /// Eigenvalues as computed, before clamping.
    pub fn raw_lambdas(&self) -> &[T] {
        &self.raw_lambdas
    }
    /// `r_k = sqrt(lambda_k)`, the spectrum of the radical operator.
    pub fn radicals(&self) -> &[T] {
        &self.radicals
    }
    /// `||A phi_k - lambda_k phi_k||_W / ||A||`
    pub fn residuals(&self) -> &[T] {
        &self.residuals
    }
    /// Index groups of numerically equal eigenvalues.
    pub fn multiplicity_groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
    pub fn operator_norm(&self) -> T {
        self.norm
    }
    pub fn vector(&self, k: usize) -> &[T] {
        &self.vectors[k]
    }
    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }
    /// Mode `k` (0-based) as a field.
    pub fn mode(&self, k: usize) -> Field<T> {
        Field::raw(self.domain().clone(), self.vectors[k].clone())
    }

    /// `sum_k fn(r_k) (u, phi_k) phi_k` without any checks.
    pub(crate) fn apply_spectral(&self, f: impl Fn(T) -> T, u: &[T]) -> Vec<T> {
        let w = self.operator.weights();
        let mut out = vec![T::zero(); u.len()];
        for (r, phi) in self.radicals.iter().zip(&self.vectors) {
            let c = f(*r) * weighted_dot(w, u, phi);
            if c == T::zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(phi) {
                *o = *o + c * p;
            }
        }
        out
    }

    pub(crate) fn check_field(&self, f: &Field<T>) -> Result<()> {
        if self.domain().same_as(f.domain()) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    fn assemble(
        operator: Arc<DiscreteOperator<T>>,
        raw: Vec<T>,
        vectors: Vec<Vec<T>>,
    ) -> Result<Self> {
        let norm = operator.norm();
        let floor = -T::lit(1e-10) * norm;
        if let Some(k) = raw.iter().position(|&l| l < floor) {
            return Err(Error::Contract(format!(
                "operator is not positive semidefinite: lambda_{} = {:e}",
                k + 1,
                raw[k]
            )));
        }
        // Anything within round-off of zero is a null mode.
        let lambdas: Vec<T> = raw
            .iter()
            .map(|&l| if l <= -floor { T::zero() } else { l })
            .collect();
        let radicals = lambdas.iter().map(|l| l.sqrt()).collect();
        let w = operator.weights();
        let safe = norm.max(T::min_positive_value());
        let residuals = lambdas
            .iter()
            .zip(&vectors)
            .map(|(&l, phi)| {
                let r: Vec<T> = operator
                    .apply(phi)
                    .iter()
                    .zip(phi)
                    .map(|(&a, &p)| a - l * p)
                    .collect();
                weighted_dot(w, &r, &r).sqrt() / safe
            })
            .collect();
        let groups = group_multiplicities(&lambdas);
        Ok(Self {
            operator,
            raw_lambdas: raw,
            lambdas,
            radicals,
            vectors,
            residuals,
            groups,
            norm,
        })
    }
}

fn group_multiplicities<T: Scalar>(lambdas: &[T]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &l) in lambdas.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (l - lambdas[*g.last().unwrap()]).abs() <= cluster_tolerance(l) => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// First `count` eigenpairs of `op`, ascending.
pub fn eigendecompose<T: Scalar>(
    op: &DiscreteOperator<T>,
    count: usize,
) -> Result<SpectralDecomposition<T>> {
    let n = op.dim();
    if count > n {
        return Err(Error::InvalidArgument(format!(
            "requested {count} modes of a {n}-dimensional operator"
        )));
    }
    if n > MAX_DIMENSION {
        return Err(Error::Contract(format!(
            "dimension {n} exceeds the dense cap of {MAX_DIMENSION}"
        )));
    }
    let asym = op.weighted_asymmetry();
    if !(asym <= T::lit(1e-12)) {
        return Err(Error::Contract(format!(
            "W A is not symmetric (relative defect {asym:e})"
        )));
    }
    let operator = Arc::new(op.clone());
    if let Some([fx, fy]) = op.factors() {
        return separable(operator.clone(), fx, fy, count);
    }
    let (raw, vectors) = symmetric_eigen(op, count)?;
    SpectralDecomposition::assemble(operator, raw, vectors)
}

/// Smallest eigenvalue of a positive definite operator.
///
/// Large operators that are not already tridiagonal go through inverse
/// iteration with conjugate-gradient solves in the weighted inner product,
/// which avoids the cubic dense reduction. Falls back to the dense path when
/// the operator turns out not to be definite.
pub fn lowest_eigenvalue<T: Scalar>(op: &DiscreteOperator<T>) -> Result<T> {
    let n = op.dim();
    if n <= FULL_QL_LIMIT || op.matrix().bandwidth() <= 1 || op.factors().is_some() {
        return Ok(eigendecompose(op, 1)?.lambdas()[0]);
    }
    match inverse_iteration_cg(op) {
        Some(l) => Ok(l),
        None => Ok(eigendecompose(op, 1)?.lambdas()[0]),
    }
}

const INVERSE_STEPS: usize = 500;

fn inverse_iteration_cg<T: Scalar>(op: &DiscreteOperator<T>) -> Option<T> {
    let w = op.weights();
    let n = op.dim();
    let norm = |v: &[T]| weighted_dot(w, v, v).sqrt();
    let mut x = vec![T::one(); n];
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v = *v / s);
    let mut rq = weighted_dot(w, &x, &op.apply(&x));
    for _ in 0..INVERSE_STEPS {
        let mut y = conjugate_gradient(op, &x)?;
        let s = norm(&y);
        if !(s > T::zero()) {
            return None;
        }
        y.iter_mut().for_each(|v| *v = *v / s);
        let next = weighted_dot(w, &y, &op.apply(&y));
        x = y;
        let done = (next - rq).abs() <= T::lit(1e-14) * next.abs();
        rq = next;
        if done {
            return Some(rq);
        }
    }
    None
}

/// Solves `A x = b` by CG in the weighted inner product; `None` on breakdown.
fn conjugate_gradient<T: Scalar>(op: &DiscreteOperator<T>, b: &[T]) -> Option<Vec<T>> {
    let w = op.weights();
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = weighted_dot(w, &r, &r);
    let stop = T::lit(1e-28) * rr;
    for _ in 0..10 * n {
        if rr <= stop {
            return Some(x);
        }
        let ap = op.apply(&p);
        let pap = weighted_dot(w, &p, &ap);
        if !(pap > T::zero()) {
            return None;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ap[i];
        }
        let next = weighted_dot(w, &r, &r);
        let beta = next / rr;
        rr = next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    None
}

/// Symmetrized matrix `S = W^{1/2} A W^{-1/2}` as bands or dense rows.
fn symmetrize<T: Scalar>(op: &DiscreteOperator<T>) -> Tridiagonal<T> {
    let n = op.dim();
    let m = op.matrix();
    let sw: Vec<T> = op.weights().iter().map(|w| w.sqrt()).collect();
    // Average both triangles so S is symmetric to the last bit.
    let s = |i: usize, j: usize| {
        let a = m.get(i, j) * sw[i] / sw[j];
        let b = m.get(j, i) * sw[j] / sw[i];
        (a + b) / T::lit(2.0)
    };
    if m.bandwidth() <= 1 {
        let diag = (0..n).map(|i| m.get(i, i)).collect();
        let off = (0..n.saturating_sub(1)).map(|i| s(i + 1, i)).collect();
        return Tridiagonal::from_bands(diag, off);
    }
    Tridiagonal::householder(dense_symmetric(op), n)
}

/// Row-major `S = W^{1/2} A W^{-1/2}` with both triangles averaged.
pub(crate) fn dense_symmetric<T: Scalar>(op: &DiscreteOperator<T>) -> Vec<T> {
    let n = op.dim();
    let m = op.matrix();
    let sw: Vec<T> = op.weights().iter().map(|w| w.sqrt()).collect();
    let mut dense = vec![T::zero(); n * n];
    for (i, j, _) in m.triplets() {
        dense[i * n + j] = if i == j {
            m.get(i, i)
        } else {
            (m.get(i, j) * sw[i] / sw[j] + m.get(j, i) * sw[j] / sw[i]) / T::lit(2.0)
        };
    }
    dense
}

fn symmetric_eigen<T: Scalar>(
    op: &DiscreteOperator<T>,
    count: usize,
) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = op.dim();
    let tri = symmetrize(op);
    let (vals, mut zs) = if n <= FULL_QL_LIMIT || 4 * count > n {
        let (vals, mut vecs) = tri.eigenpairs()?;
        vecs.truncate(count);
        (vals[..count].to_vec(), vecs)
    } else {
        let vals = tri.eigenvalues()?;
        let vals = vals[..count].to_vec();
        let vecs = tri.inverse_iteration(&vals);
        (vals, vecs)
    };
    let inv_sw: Vec<T> = op.weights().iter().map(|w| w.sqrt().recip()).collect();
    for z in zs.iter_mut() {
        tri.back_transform(z);
        for (v, s) in z.iter_mut().zip(&inv_sw) {
            *v = *v * *s;
        }
        normalize_sign(z);
    }
    Ok((vals, zs))
}

/// Makes the largest-magnitude entry positive (first one on ties) so that
/// output is reproducible.
fn normalize_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (T::one() + T::lit(1e-9)) {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < T::zero()) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn separable<T: Scalar>(
    operator: Arc<DiscreteOperator<T>>,
    fx: &DiscreteOperator<T>,
    fy: &DiscreteOperator<T>,
    count: usize,
) -> Result<SpectralDecomposition<T>> {
    let ex = eigendecompose(fx, count.min(fx.dim()))?;
    let ey = eigendecompose(fy, count.min(fy.dim()))?;
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(ex.len() * ey.len());
    for (p, &lx) in ex.raw_lambdas().iter().enumerate() {
        for (q, &ly) in ey.raw_lambdas().iter().enumerate() {
            pairs.push((lx + ly, p, q));
        }
    }
    pairs.sort_by(|a, b| cmp(&a.0, &b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    pairs.truncate(count);
    let dom = operator.domain().clone();
    let raw = pairs.iter().map(|t| t.0).collect();
    let vectors = pairs
        .iter()
        .map(|&(_, p, q)| {
            let (vx, vy) = (ex.vector(p), ey.vector(q));
            (0..dom.len())
                .map(|i| {
                    let [ix, iy] = dom.grid_coords(i);
                    vx[ix] * vy[iy]
                })
                .collect()
        })
        .collect();
    SpectralDecomposition::assemble(operator, raw, vectors)
}

/// `alpha_j = (f, phi_j)` for every computed mode.
pub fn expand<T: Scalar>(f: &Field<T>, d: &SpectralDecomposition<T>) -> Result<Vec<T>> {
    d.check_field(f)?;
    let w = d.operator.weights();
    Ok(d.vectors
        .iter()
        .map(|phi| weighted_dot(w, f.values(), phi))
        .collect())
}

/// `sum_j alpha_j phi_j`
pub fn synthesize<T: Scalar>(coeffs: &[T], d: &SpectralDecomposition<T>) -> Result<Field<T>> {
    if coeffs.len() > d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: coeffs.len(),
        });
    }
    let mut out = vec![T::zero(); d.domain().len()];
    for (&c, phi) in coeffs.iter().zip(&d.vectors) {
        for (o, &p) in out.iter_mut().zip(phi) {
            *o = *o + c * p;
        }
    }
    Ok(Field::raw(d.domain().clone(), out))
}

//! Heat and wave evolution driven by the radical operator, computed exactly
//! mode by mode.
//!
//! Heat: `u(t) = exp(-t sqrt(A)) f`. Wave (released from rest):
//! `v(t) = sum_k alpha_k cos(omega_k t) phi_k` with
//! `omega_k = sqrt(r_k tau / rho)`.

use std::sync::Arc;

use crate::discretize::weighted_dot;
use crate::eigensolve::{expand, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Field};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Heat,
    Wave,
}

/// Membrane density and tension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveParams<T> {
    rho: T,
    tau: T,
}

impl<T: Scalar> WaveParams<T> {
    pub fn new(rho: T, tau: T) -> Result<Self> {
        for (name, v) in [("rho", rho), ("tau", tau)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { rho, tau })
    }
    pub fn rho(&self) -> T {
        self.rho
    }
    pub fn tau(&self) -> T {
        self.tau
    }
    /// `omega = sqrt(r tau / rho)`
    pub fn frequency(&self, radical: T) -> T {
        (radical * self.tau / self.rho).sqrt()
    }
}

impl<T: Scalar> Default for WaveParams<T> {
    fn default() -> Self {
        Self {
            rho: T::one(),
            tau: T::one(),
        }
    }
}

/// Dense kernel matrix `K_ij = sum_k g(r_k) phi_k(x_i) phi_k(x_j) w_j`, so
/// `(K u)_i` is the quadrature of `p(x_i, y) u(y)`.
#[derive(Clone, Debug)]
pub struct KernelOperator<T> {
    domain: Arc<Domain<T>>,
    matrix: Vec<T>,
    time: T,
    kind: KernelKind,
    params: Option<WaveParams<T>>,
}

impl<T: Scalar> KernelOperator<T> {
    fn build(
        d: &SpectralDecomposition<T>,
        time: T,
        kind: KernelKind,
        params: Option<WaveParams<T>>,
        gain: impl Fn(T) -> T,
    ) -> Self {
        let dom = d.domain().clone();
        let n = dom.len();
        let w = dom.weights();
        let mut matrix = vec![T::zero(); n * n];
        for (&r, phi) in d.radicals().iter().zip(d.vectors()) {
            let g = gain(r);
            for i in 0..n {
                let gi = g * phi[i];
                let row = &mut matrix[i * n..(i + 1) * n];
                for j in 0..n {
                    row[j] = row[j] + gi * phi[j] * w[j];
                }
            }
        }
        Self {
            domain: dom,
            matrix,
            time,
            kind,
            params,
        }
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        &self.domain
    }
    pub fn dim(&self) -> usize {
        self.domain.len()
    }
    pub fn time(&self) -> T {
        self.time
    }
    pub fn kind(&self) -> KernelKind {
        self.kind
    }
    pub fn params(&self) -> Option<WaveParams<T>> {
        self.params
    }
    /// Row-major entries.
    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }
    pub fn get(&self, i: usize, j: usize) -> T {
        self.matrix[i * self.dim() + j]
    }

    pub fn apply(&self, u: &Field<T>) -> Result<Field<T>> {
        if !self.domain.same_as(u.domain()) {
            return Err(Error::DomainMismatch);
        }
        let n = self.dim();
        let out = (0..n)
            .map(|i| {
                self.matrix[i * n..(i + 1) * n]
                    .iter()
                    .zip(u.values())
                    .map(|(&k, &v)| k * v)
                    .sum()
            })
            .collect();
        Ok(Field::raw(self.domain.clone(), out))
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Vec<T>> {
        if !self.domain.same_as(&other.domain) {
            return Err(Error::DomainMismatch);
        }
        let n = self.dim();
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.matrix[i * n + k];
                if a == T::zero() {
                    continue;
                }
                let dst = &mut out[i * n..(i + 1) * n];
                for (o, &b) in dst.iter_mut().zip(&other.matrix[k * n..(k + 1) * n]) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    /// `max_ij |w_i K_ij - w_j K_ji|`
    pub fn weighted_asymmetry(&self) -> T {
        let n = self.dim();
        let w = self.domain.weights();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..i {
                let d = (w[i] * self.get(i, j) - w[j] * self.get(j, i)).abs();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Heat kernel `sum_k exp(-r_k t) phi_k phi_k^T W`.
pub fn heat_kernel<T: Scalar>(d: &SpectralDecomposition<T>, t: T) -> Result<KernelOperator<T>> {
    check_time(t)?;
    Ok(KernelOperator::build(d, t, KernelKind::Heat, None, |r| {
        (-r * t).exp()
    }))
}

/// Wave propagator from rest, `sum_k cos(omega_k t) phi_k phi_k^T W`.
pub fn wave_kernel<T: Scalar>(
    d: &SpectralDecomposition<T>,
    t: T,
    p: WaveParams<T>,
) -> Result<KernelOperator<T>> {
    check_time(t)?;
    Ok(KernelOperator::build(
        d,
        t,
        KernelKind::Wave,
        Some(p),
        |r| (p.frequency(r) * t).cos(),
    ))
}

fn check_time<T: Scalar>(t: T) -> Result<()> {
    if t >= T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time must be nonnegative and finite, got {t}"
        )))
    }
}

fn modal_sum<T: Scalar>(
    d: &SpectralDecomposition<T>,
    f: &Field<T>,
    gain: impl Fn(T) -> T,
) -> Field<T> {
    let w = d.domain().weights();
    let mut out = vec![T::zero(); f.len()];
    for (&r, phi) in d.radicals().iter().zip(d.vectors()) {
        let c = gain(r) * weighted_dot(w, f.values(), phi);
        for (o, &p) in out.iter_mut().zip(phi) {
            *o = *o + c * p;
        }
    }
    Field::raw(d.domain().clone(), out)
}

/// `sum_k exp(-r_k t) alpha_k phi_k`
pub fn heat_solve<T: Scalar>(d: &SpectralDecomposition<T>, f: &Field<T>, t: T) -> Result<Field<T>> {
    check_time(t)?;
    d.check_field(f)?;
    Ok(modal_sum(d, f, |r| (-r * t).exp()))
}

/// `sum_k cos(omega_k t) alpha_k phi_k`, zero initial velocity.
pub fn wave_solve<T: Scalar>(
    d: &SpectralDecomposition<T>,
    f: &Field<T>,
    t: T,
    p: WaveParams<T>,
) -> Result<Field<T>> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument("time must be finite".into()));
    }
    d.check_field(f)?;
    Ok(modal_sum(d, f, |r| (p.frequency(r) * t).cos()))
}

/// `omega_k` for every computed mode.
pub fn wave_frequencies<T: Scalar>(d: &SpectralDecomposition<T>, p: WaveParams<T>) -> Vec<T> {
    d.radicals().iter().map(|&r| p.frequency(r)).collect()
}

/// Modal amplitudes `A_k` and phases `beta_k` of
/// `sum_k A_k cos(omega_k (t - beta_k)) phi_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalState<T> {
    amplitudes: Vec<T>,
    phases: Vec<T>,
}

impl<T: Scalar> ModalState<T> {
    pub fn new(amplitudes: Vec<T>, phases: Vec<T>) -> Result<Self> {
        if amplitudes.len() != phases.len() {
            return Err(Error::LengthMismatch {
                expected: amplitudes.len(),
                got: phases.len(),
            });
        }
        if amplitudes.iter().chain(&phases).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("modal state must be finite".into()));
        }
        Ok(Self { amplitudes, phases })
    }

    /// Released from rest in the shape of `f`.
    pub fn from_field(d: &SpectralDecomposition<T>, f: &Field<T>) -> Result<Self> {
        let amplitudes = expand(f, d)?;
        let phases = vec![T::zero(); amplitudes.len()];
        Ok(Self { amplitudes, phases })
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }
    pub fn phases(&self) -> &[T] {
        &self.phases
    }
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// `E(t) = 1/2 sum_k (alpha_k'(t)^2 + omega_k^2 alpha_k(t)^2)`
pub fn wave_energy<T: Scalar>(
    d: &SpectralDecomposition<T>,
    state: &ModalState<T>,
    t: T,
    p: WaveParams<T>,
) -> Result<T> {
    if state.len() > d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: state.len(),
        });
    }
    let half = T::lit(0.5);
    Ok(state
        .amplitudes
        .iter()
        .zip(&state.phases)
        .zip(d.radicals())
        .map(|((&a, &beta), &r)| {
            let w = p.frequency(r);
            let (s, c) = (w * (t - beta)).sin_cos();
            let pos = a * c;
            let vel = -a * w * s;
            half * (vel * vel + w * w * pos * pos)
        })
        .sum())
}

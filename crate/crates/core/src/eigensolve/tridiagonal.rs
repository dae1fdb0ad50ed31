//! Dense symmetric eigenvalue kernels: Householder reduction to tridiagonal
//! form, implicit-shift QL iteration and inverse iteration.

use crate::error::{Error, Result};
use crate::scalar::{cmp, dot, Scalar};

const MAX_QL_SWEEPS: usize = 60;

/// Orthogonal reduction `Q^T S Q = T` of a dense symmetric matrix.
#[derive(Clone, Debug)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    /// `off[i] = T[i + 1][i]`, length `n - 1`.
    pub off: Vec<T>,
    reflectors: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// Wraps an already tridiagonal matrix (Q = I).
    pub fn from_bands(diag: Vec<T>, off: Vec<T>) -> Self {
        debug_assert_eq!(off.len() + 1, diag.len().max(1));
        Self {
            diag,
            off,
            reflectors: Vec::new(),
        }
    }

    /// Householder reduction of the row-major symmetric `a` (consumed).
    pub fn householder(mut a: Vec<T>, n: usize) -> Self {
        assert_eq!(a.len(), n * n);
        let mut diag = vec![T::zero(); n];
        let mut off = vec![T::zero(); n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let two = T::lit(2.0);
        let mut p = vec![T::zero(); n];
        for k in 0..n.saturating_sub(2) {
            let m = n - k - 1;
            let mut v: Vec<T> = (0..m).map(|r| a[(k + 1 + r) * n + k]).collect();
            let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            diag[k] = a[k * n + k];
            if norm == T::zero() {
                off[k] = T::zero();
                reflectors.push((v, T::zero()));
                continue;
            }
            let alpha = if v[0] > T::zero() { -norm } else { norm };
            v[0] = v[0] - alpha;
            let vv: T = v.iter().map(|&x| x * x).sum();
            if vv == T::zero() {
                off[k] = v[0] + alpha;
                reflectors.push((v, T::zero()));
                continue;
            }
            let beta = two / vv;
            off[k] = alpha;
            // p = beta * A22 v
            let base = k + 1;
            for r in 0..m {
                let row = &a[(base + r) * n + base..(base + r) * n + n];
                p[r] = beta * dot(row, &v);
            }
            let kk = beta / two * dot(&p[..m], &v);
            for r in 0..m {
                p[r] = p[r] - kk * v[r];
            }
            for r in 0..m {
                let (vr, pr) = (v[r], p[r]);
                let row = &mut a[(base + r) * n + base..(base + r) * n + n];
                for c in 0..m {
                    row[c] = row[c] - vr * p[c] - pr * v[c];
                }
            }
            reflectors.push((v, beta));
        }
        if n >= 2 {
            diag[n - 2] = a[(n - 2) * n + n - 2];
            off[n - 2] = a[(n - 1) * n + n - 2];
        }
        if n >= 1 {
            diag[n - 1] = a[(n - 1) * n + n - 1];
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Maps an eigenvector of T to one of the original matrix: `z <- Q z`.
    pub fn back_transform(&self, z: &mut [T]) {
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            if *beta == T::zero() {
                continue;
            }
            let tail = &mut z[k + 1..];
            let s = *beta * dot(v, tail);
            for (t, &vi) in tail.iter_mut().zip(v) {
                *t = *t - s * vi;
            }
        }
    }

    pub fn norm_inf(&self) -> T {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s = s + self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s = s + self.off[i].abs();
                }
                s
            })
            .fold(T::zero(), T::max)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(T::zero());
        ql_implicit(&mut d, &mut e, None)?;
        d.sort_by(cmp);
        Ok(d)
    }

    /// All eigenpairs of T (not back-transformed), ascending. Vectors are
    /// returned as contiguous rows.
    pub fn eigenpairs(&self) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(T::zero());
        let mut z: Vec<Vec<T>> = (0..n)
            .map(|i| {
                let mut r = vec![T::zero(); n];
                r[i] = T::one();
                r
            })
            .collect();
        ql_implicit(&mut d, &mut e, Some(&mut z))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| cmp(&d[a], &d[b]).then(a.cmp(&b)));
        let vals = order.iter().map(|&i| d[i]).collect();
        let vecs = order.iter().map(|&i| std::mem::take(&mut z[i])).collect();
        Ok((vals, vecs))
    }

    /// Eigenvectors of T for the given (ascending) eigenvalues by inverse
    /// iteration, re-orthogonalized against earlier vectors whose eigenvalues
    /// lie within `1e-3 ||T||`.
    pub fn inverse_iteration(&self, lambdas: &[T]) -> Vec<Vec<T>> {
        let n = self.dim();
        let norm = self.norm_inf().max(T::min_positive_value());
        let window = T::lit(1e-3) * norm;
        let mut out: Vec<Vec<T>> = Vec::with_capacity(lambdas.len());
        for (k, &lam) in lambdas.iter().enumerate() {
            let lu = TriLu::factor(&self.diag, &self.off, lam, norm);
            let mut x = start_vector::<T>(n, k);
            let close: Vec<usize> = (0..k)
                .filter(|&j| (lambdas[j] - lam).abs() <= window)
                .collect();
            for _ in 0..3 {
                lu.solve(&mut x);
                for &j in &close {
                    let c = dot(&out[j], &x);
                    for (xi, &oj) in x.iter_mut().zip(&out[j]) {
                        *xi = *xi - c * oj;
                    }
                }
                normalize(&mut x);
            }
            for &j in &close {
                let c = dot(&out[j], &x);
                for (xi, &oj) in x.iter_mut().zip(&out[j]) {
                    *xi = *xi - c * oj;
                }
            }
            normalize(&mut x);
            out.push(x);
        }
        out
    }
}

fn normalize<T: Scalar>(x: &mut [T]) {
    let nrm = dot(x, x).sqrt();
    if nrm > T::zero() {
        for v in x.iter_mut() {
            *v = *v / nrm;
        }
    }
}

/// Deterministic pseudo-random start vector in (-1, 1).
fn start_vector<T: Scalar>(n: usize, seed: usize) -> Vec<T> {
    let mut s: u64 = 0x9E37_79B9_7F4A_7C15 ^ (seed as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let u = (s >> 11) as f64 / (1u64 << 53) as f64;
            T::lit(2.0 * u - 1.0)
        })
        .collect()
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (`e[i]` couples rows
/// `i` and `i + 1`, `e[n - 1] = 0`). Rotations are accumulated into the rows
/// of `z` when given; on return row `i` of `z` is the eigenvector of `d[i]`.
fn ql_implicit<T: Scalar>(d: &mut [T], e: &mut [T], mut z: Option<&mut [Vec<T>]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = T::epsilon();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence(MAX_QL_SWEEPS));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                    for (a, bq) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let fq = *bq;
                        *bq = s * *a + c * fq;
                        *a = c * *a - s * fq;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// LU factorization with partial pivoting of `T - shift I`.
struct TriLu<T> {
    lower: Vec<T>,
    diag: Vec<T>,
    up1: Vec<T>,
    up2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TriLu<T> {
    fn factor(diag: &[T], off: &[T], shift: T, norm: T) -> Self {
        let n = diag.len();
        let tiny = T::epsilon() * norm;
        let mut d: Vec<T> = diag.iter().map(|&x| x - shift).collect();
        let mut dl: Vec<T> = off.to_vec();
        let mut du: Vec<T> = off.to_vec();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == T::zero() {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] = d[i + 1] - f * du[i];
            } else {
                swapped[i] = true;
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
            }
        }
        if n > 0 && d[n - 1] == T::zero() {
            d[n - 1] = tiny;
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < T::zero() { -tiny } else { tiny };
            }
        }
        Self {
            lower: dl,
            diag: d,
            up1: du,
            up2: du2,
            swapped,
        }
    }

    fn solve(&self, x: &mut [T]) {
        let n = self.diag.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] = x[i + 1] - self.lower[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s = s - self.up1[i] * x[i + 1];
            }
            if i + 2 < n {
                s = s - self.up2[i] * x[i + 2];
            }
            x[i] = s / self.diag[i];
        }
        let big = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if !big.is_finite() || big == T::zero() {
            return;
        }
        for v in x.iter_mut() {
            *v = *v / big;
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn dense_from_bands(d: &[f64], e: &[f64]) -> Vec<f64> {
        let n = d.len();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = d[i];
            if i + 1 < n {
                a[i * n + i + 1] = e[i];
                a[(i + 1) * n + i] = e[i];
            }
        }
        a
    }

    fn matvec(a: &[f64], x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
            .collect()
    }

    #[test]
    fn ql_on_small_tridiagonal() {
        let t = Tridiagonal::from_bands(vec![2.0, 2.0, 2.0], vec![-1.0, -1.0]);
        let vals = t.eigenvalues().unwrap();
        let s2 = 2f64.sqrt();
        for (v, want) in vals.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert_relative_eq!(*v, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn householder_preserves_spectrum_and_vectors() {
        let n = 7;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 10.0 } else { 0.0 };
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let t = Tridiagonal::householder(a.clone(), n);
        let (vals, vecs) = t.eigenpairs().unwrap();
        for (lam, z) in vals.iter().zip(vecs) {
            let mut x = z.clone();
            t.back_transform(&mut x);
            let ax = matvec(&a, &x);
            for (p, q) in ax.iter().zip(&x) {
                assert!((p - lam * q).abs() < 1e-12, "residual");
            }
        }
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        assert_relative_eq!(vals.iter().sum::<f64>(), trace, epsilon = 1e-11);
    }

    #[test]
    fn inverse_iteration_matches_full_ql() {
        let n = 40;
        let d: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * i as f64).collect();
        let e = vec![-1.0; n - 1];
        let t = Tridiagonal::from_bands(d.clone(), e.clone());
        let vals = t.eigenvalues().unwrap();
        let vecs = t.inverse_iteration(&vals[..6]);
        let a = dense_from_bands(&d, &e);
        for (k, x) in vecs.iter().enumerate() {
            let ax = matvec(&a, x);
            let r = ax
                .iter()
                .zip(x)
                .map(|(p, q)| (p - vals[k] * q).abs())
                .fold(0.0f64, f64::max);
            assert!(r < 1e-12, "mode {k} residual {r}");
            for y in &vecs[..k] {
                assert!(dot::<f64>(x, y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_iteration_splits_exact_degeneracy() {
        // Two decoupled identical blocks: every eigenvalue is double.
        let d = vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0];
        let e = vec![-1.0, -1.0, 0.0, -1.0, -1.0];
        let t = Tridiagonal::from_bands(d.clone(), e.clone());
        let vals = t.eigenvalues().unwrap();
        assert_relative_eq!(vals[0], vals[1], epsilon = 1e-14);
        let vecs = t.inverse_iteration(&vals[..2]);
        assert!(dot::<f64>(&vecs[0], &vecs[1]).abs() < 1e-12);
        let a = dense_from_bands(&d, &e);
        for x in &vecs {
            let ax = matvec(&a, x);
            for (p, q) in ax.iter().zip(x) {
                assert!((p - vals[0] * q).abs() < 1e-12);
            }
        }
    }
}

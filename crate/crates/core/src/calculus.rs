//! Functions of the radical operator `sqrt(A)` as finite spectral sums,
//! the node-wise radical `sqrt|A f|`, and Weyl counting.

use std::ops::Range;

use crate::discretize::{weighted_dot, DiscreteOperator};
use crate::eigensolve::{cluster_tolerance, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, Domain, DomainKind, Field};
use crate::scalar::{cmp, Scalar};

/// Problems whose continuum spectrum is known in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// `(pi k / L)^2`
    IntervalDirichlet,
    /// `(pi (k - 1) / L)^2`
    IntervalNeumann,
    /// `(pi (k - 1/2) / L)^2`, one Dirichlet and one Neumann end.
    IntervalMixed,
    /// `0`, then `(2 pi k / L)^2` twice each.
    Circle,
    /// `(pi m / Lx)^2 + (pi n / Ly)^2` for `m, n >= 1`.
    RectangleDirichlet,
}

impl ClosedForm {
    /// Tag matching a flat domain, if there is one.
    pub fn detect<T: Scalar>(domain: &Domain<T>) -> Option<Self> {
        use BoundaryCondition::*;
        if domain.metric().is_some() {
            return None;
        }
        match domain.kind() {
            DomainKind::Circle => Some(Self::Circle),
            DomainKind::Interval => {
                let ax = domain.axis(0);
                match (ax.lower(), ax.upper()) {
                    (Dirichlet, Dirichlet) => Some(Self::IntervalDirichlet),
                    (Neumann, Neumann) => Some(Self::IntervalNeumann),
                    _ => Some(Self::IntervalMixed),
                }
            }
            DomainKind::Rectangle => domain
                .axes()
                .iter()
                .all(|a| a.lower() == Dirichlet && a.upper() == Dirichlet)
                .then_some(Self::RectangleDirichlet),
            DomainKind::MaskedGrid => None,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Self::RectangleDirichlet => 2,
            _ => 1,
        }
    }
}

/// Whether counts and fits are taken over `lambda_k` or over `r_k = sqrt(lambda_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountScale {
    Lambda,
    Radical,
}

/// Ascending spectrum of the radical operator, either computed or analytic.
#[derive(Clone, Debug)]
pub struct RadicalSpectrum<T> {
    lambdas: Vec<T>,
    radicals: Vec<T>,
    closed_form: Option<ClosedForm>,
    dim: usize,
    volume: T,
}

impl<T: Scalar> RadicalSpectrum<T> {
    pub fn from_decomposition(d: &SpectralDecomposition<T>) -> Self {
        let dom = d.domain();
        Self {
            lambdas: d.lambdas().to_vec(),
            radicals: d.radicals().to_vec(),
            closed_form: None,
            dim: dom.dim(),
            volume: dom.volume(),
        }
    }

    /// First `count` analytic eigenvalues. `lengths` holds one entry per axis.
    pub fn closed_form(tag: ClosedForm, lengths: &[T], count: usize) -> Result<Self> {
        check_lengths(tag, lengths)?;
        let lambdas = if tag == ClosedForm::RectangleDirichlet {
            let mut level = lattice_value(lengths, 1, 1);
            loop {
                let mut all = rectangle_up_to(lengths, level);
                if all.len() >= count {
                    all.truncate(count);
                    break all;
                }
                level = level * T::lit(2.0);
            }
        } else {
            (0..count)
                .map(|k| interval_value(tag, lengths[0], k))
                .collect()
        };
        Ok(Self::analytic(tag, lengths, lambdas))
    }

    /// Every analytic eigenvalue `<= level`.
    pub fn closed_form_up_to(tag: ClosedForm, lengths: &[T], level: T) -> Result<Self> {
        check_lengths(tag, lengths)?;
        let lambdas = if tag == ClosedForm::RectangleDirichlet {
            rectangle_up_to(lengths, level)
        } else {
            (0..)
                .map(|k| interval_value(tag, lengths[0], k))
                .take_while(|&l| l <= level)
                .collect()
        };
        Ok(Self::analytic(tag, lengths, lambdas))
    }

    fn analytic(tag: ClosedForm, lengths: &[T], lambdas: Vec<T>) -> Self {
        Self {
            radicals: lambdas.iter().map(|l| l.sqrt()).collect(),
            lambdas,
            closed_form: Some(tag),
            dim: tag.dim(),
            volume: lengths.iter().fold(T::one(), |a, &b| a * b),
        }
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }
    pub fn radicals(&self) -> &[T] {
        &self.radicals
    }
    pub fn closed_form_tag(&self) -> Option<ClosedForm> {
        self.closed_form
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn volume(&self) -> T {
        self.volume
    }
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }
    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    fn values(&self, scale: CountScale) -> &[T] {
        match scale {
            CountScale::Lambda => &self.lambdas,
            CountScale::Radical => &self.radicals,
        }
    }

    /// Number of eigenvalues (with multiplicity) at or below `level`. Values
    /// within the cluster tolerance of `level` count as equal to it.
    pub fn weyl_count(&self, level: T, scale: CountScale) -> usize {
        let cut = level + cluster_tolerance(level);
        self.values(scale).partition_point(|&v| v <= cut)
    }

    /// Indices of eigenvalues with `lo <= lambda_k <= hi`.
    pub fn index_window(&self, lo: T, hi: T) -> Range<usize> {
        let a = self.lambdas.partition_point(|&l| l < lo);
        let b = self.lambdas.partition_point(|&l| l <= hi);
        a..b.max(a)
    }

    /// Least-squares fit of `log N(lambda_k)` against `log lambda_k` for `k`
    /// in `window` (0-based indices).
    pub fn weyl_fit(&self, window: Range<usize>) -> Result<WeylFit<T>> {
        if window.end > self.len() {
            return Err(Error::FitWindow(format!(
                "window {window:?} exceeds the {} available eigenvalues",
                self.len()
            )));
        }
        if window.len() < 10 {
            return Err(Error::FitWindow(format!(
                "{} points, need at least 10",
                window.len()
            )));
        }
        let pts: Vec<(T, T)> = window
            .map(|k| {
                let l = self.lambdas[k];
                let n = self.weyl_count(l, CountScale::Lambda);
                (l, T::from_usize_lossy(n))
            })
            .collect();
        if pts.iter().any(|&(l, _)| l <= T::zero()) {
            return Err(Error::FitWindow("window contains a zero eigenvalue".into()));
        }
        let m = T::from_usize_lossy(pts.len());
        let xs: Vec<T> = pts.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<T> = pts.iter().map(|p| p.1.ln()).collect();
        let mx = xs.iter().copied().sum::<T>() / m;
        let my = ys.iter().copied().sum::<T>() / m;
        let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
        let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
        if !(sxx > T::lit(1e-24) * m) {
            return Err(Error::FitWindow(
                "eigenvalues in the window are identical".into(),
            ));
        }
        let exponent = sxy / sxx;
        let half_n = T::from_usize_lossy(self.dim) / T::lit(2.0);
        Ok(WeylFit {
            exponent,
            constant: (my - half_n * mx).exp(),
            free_constant: (my - exponent * mx).exp(),
            predicted_constant: weyl_constant(self.dim, self.volume)?,
            points: pts.len(),
        })
    }
}

/// Result of [`RadicalSpectrum::weyl_fit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylFit<T> {
    /// Fitted slope of `log N` against `log lambda`.
    pub exponent: T,
    /// `C` in `N ~ C lambda^{n/2}`, least squares with the exponent held at `n/2`.
    pub constant: T,
    /// Intercept of the two-parameter fit, `exp(b)` in `log N = a log lambda + b`.
    pub free_constant: T,
    /// `omega_n vol / (2 pi)^n`
    pub predicted_constant: T,
    pub points: usize,
}

impl<T: Scalar> WeylFit<T> {
    /// `(constant - predicted) / predicted`
    pub fn relative_error(&self) -> T {
        (self.constant - self.predicted_constant) / self.predicted_constant
    }
}

/// Weyl constant `omega_n vol / (2 pi)^n`.
pub fn weyl_constant<T: Scalar>(n: usize, volume: T) -> Result<T> {
    let two_pi = T::lit(2.0) * T::PI();
    Ok(unit_ball_volume::<T>(n)? * volume / two_pi.powi(n as i32))
}

/// Volume of the unit ball in `R^n`: `omega_n = (2 pi / n) omega_{n-2}`.
pub fn unit_ball_volume<T: Scalar>(n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let mut w = if n.is_multiple_of(2) {
        T::one()
    } else {
        T::lit(2.0)
    };
    let mut k = n % 2;
    while k < n {
        k += 2;
        w = w * T::lit(2.0) * T::PI() / T::from_usize_lossy(k);
    }
    Ok(w)
}

fn check_lengths<T: Scalar>(tag: ClosedForm, lengths: &[T]) -> Result<()> {
    if lengths.len() != tag.dim() {
        return Err(Error::LengthMismatch {
            expected: tag.dim(),
            got: lengths.len(),
        });
    }
    if lengths.iter().any(|&l| !(l > T::zero()) || !l.is_finite()) {
        return Err(Error::Validation {
            field: "lengths",
            reason: "lengths must be positive and finite".into(),
        });
    }
    Ok(())
}

/// Eigenvalue `k` (0-based) of a one-dimensional closed form.
fn interval_value<T: Scalar>(tag: ClosedForm, len: T, k: usize) -> T {
    let pi = T::PI();
    let kk = T::from_usize_lossy(k);
    let s = match tag {
        ClosedForm::IntervalDirichlet => pi * (kk + T::one()) / len,
        ClosedForm::IntervalNeumann => pi * kk / len,
        ClosedForm::IntervalMixed => pi * (kk + T::lit(0.5)) / len,
        ClosedForm::Circle => T::lit(2.0) * pi * T::from_usize_lossy(k.div_ceil(2)) / len,
        ClosedForm::RectangleDirichlet => unreachable!("two-dimensional tag"),
    };
    s * s
}

fn lattice_value<T: Scalar>(lengths: &[T], m: usize, n: usize) -> T {
    let a = T::PI() * T::from_usize_lossy(m) / lengths[0];
    let b = T::PI() * T::from_usize_lossy(n) / lengths[1];
    a * a + b * b
}

fn rectangle_up_to<T: Scalar>(lengths: &[T], level: T) -> Vec<T> {
    let mut out = Vec::new();
    let mut m = 1;
    while lattice_value(lengths, m, 1) <= level {
        let mut n = 1;
        loop {
            let v = lattice_value(lengths, m, n);
            if v > level {
                break;
            }
            out.push(v);
            n += 1;
        }
        m += 1;
    }
    out.sort_by(cmp);
    out
}

/// `sum_k fn(r_k) (u, phi_k) phi_k` over every computed mode.
pub fn apply_function<T: Scalar>(
    d: &SpectralDecomposition<T>,
    func: impl Fn(T) -> T,
    u: &Field<T>,
) -> Result<Field<T>> {
    d.check_field(u)?;
    let vals: Vec<T> = d.radicals().iter().map(|&r| func(r)).collect();
    if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEvaluation {
            k: k + 1,
            radical: d.radicals()[k].as_f64(),
        });
    }
    let w = d.domain().weights();
    let mut out = vec![T::zero(); u.len()];
    for (&c, phi) in vals.iter().zip(d.vectors()) {
        let c = c * weighted_dot(w, u.values(), phi);
        for (o, &p) in out.iter_mut().zip(phi) {
            *o = *o + c * p;
        }
    }
    Ok(Field::raw(d.domain().clone(), out))
}

/// `sqrt(A) u`
pub fn radical_apply<T: Scalar>(d: &SpectralDecomposition<T>, u: &Field<T>) -> Result<Field<T>> {
    apply_function(d, |t| t, u)
}

/// Node-wise `sqrt|(A f)_i|`. Not linear; a diagnostic only.
pub fn pointwise_radical<T: Scalar>(f: &Field<T>, op: &DiscreteOperator<T>) -> Result<Field<T>> {
    let af = op.apply_field(f)?;
    Ok(af.map(|v| v.abs().sqrt()))
}

/// Node-wise radical together with its distance from the spectral one.
#[derive(Clone, Debug)]
pub struct PointwiseComparison<T> {
    pub pointwise: Field<T>,
    pub spectral: Field<T>,
    /// `max_i |pointwise_i - spectral_i|`
    pub max_diff: T,
}

pub fn compare_pointwise<T: Scalar>(
    f: &Field<T>,
    d: &SpectralDecomposition<T>,
) -> Result<PointwiseComparison<T>> {
    let pointwise = pointwise_radical(f, d.operator())?;
    let spectral = radical_apply(d, f)?;
    let max_diff = pointwise.max_diff(&spectral)?;
    Ok(PointwiseComparison {
        pointwise,
        spectral,
        max_diff,
    })
}

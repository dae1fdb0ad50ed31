//! Coordinate differential geometry on grid functions: gradient, the two
//! divergence formulas, Christoffel symbols, Lie bracket and the Levi-Civita
//! covariant derivative.
//!
//! Derivatives are second-order central differences; at an included
//! (Neumann) boundary node a second-order one-sided stencil is used, and an
//! eliminated Dirichlet neighbor contributes the value zero. On flat domains
//! the metric is the identity and every Christoffel symbol vanishes; on a
//! metric interval the 1x1 tensor g gives g^{11} = 1/g and
//! Gamma^1_{11} = g' / (2 g).

use super::domain::{Domain, Neighbor};
use super::field::{Field, VecField};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn neighbor_value<T: Scalar>(values: &[T], n: Neighbor) -> Option<T> {
    match n {
        Neighbor::Node(j) => Some(values[j]),
        Neighbor::Ghost => Some(T::zero()),
        Neighbor::Outside => None,
    }
}

/// Partial derivative of nodal `values` along `axis`.
pub fn partial<T: Scalar>(domain: &Domain<T>, values: &[T], axis: usize) -> Vec<T> {
    let h = domain.axis(axis).spacing();
    let two_h = h + h;
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    (0..domain.len())
        .map(|i| {
            let fwd = domain.neighbor(i, axis, true);
            let bwd = domain.neighbor(i, axis, false);
            let u0 = values[i];
            match (neighbor_value(values, bwd), neighbor_value(values, fwd)) {
                (Some(um), Some(up)) => (up - um) / two_h,
                (None, Some(u1)) => {
                    let u2 = match fwd {
                        Neighbor::Node(j) => neighbor_value(values, domain.neighbor(j, axis, true)),
                        _ => None,
                    };
                    match u2 {
                        Some(u2) => (-three * u0 + four * u1 - u2) / two_h,
                        None => (u1 - u0) / h,
                    }
                }
                (Some(u1), None) => {
                    let u2 = match bwd {
                        Neighbor::Node(j) => {
                            neighbor_value(values, domain.neighbor(j, axis, false))
                        }
                        _ => None,
                    };
                    match u2 {
                        Some(u2) => (three * u0 - four * u1 + u2) / two_h,
                        None => (u0 - u1) / h,
                    }
                }
                (None, None) => T::zero(),
            }
        })
        .collect()
}

/// grad f = sum g^{kl} (d_l f) d_k
pub fn gradient<T: Scalar>(f: &Field<T>) -> VecField<T> {
    let dom = f.domain();
    let comps = (0..dom.dim())
        .map(|a| {
            let mut d = partial(dom, f.values(), a);
            if dom.metric().is_some() {
                for (i, v) in d.iter_mut().enumerate() {
                    *v = *v / dom.g(i);
                }
            }
            d
        })
        .collect();
    VecField::raw(dom.clone(), comps)
}

/// div P = (1/sqrt g) sum_j d_j(eta^j sqrt g), conservative form.
pub fn divergence<T: Scalar>(p: &VecField<T>) -> Field<T> {
    let dom = p.domain();
    let mut out = vec![T::zero(); dom.len()];
    for (a, comp) in p.components().iter().enumerate() {
        let weighted: Vec<T> = comp
            .iter()
            .enumerate()
            .map(|(i, &v)| v * dom.sqrt_g(i))
            .collect();
        for (o, d) in out.iter_mut().zip(partial(dom, &weighted, a)) {
            *o = *o + d;
        }
    }
    for (i, o) in out.iter_mut().enumerate() {
        *o = *o / dom.sqrt_g(i);
    }
    Field::raw(dom.clone(), out)
}

/// Where g' comes from when forming Christoffel symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricDerivative {
    /// Analytic g' when the metric carries it, finite differences otherwise.
    Auto,
    FiniteDifference,
}

/// Gamma^k_{ij} at one node, stored densely as `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Christoffel<T> {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim * dim],
        }
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.data[(k * self.dim + i) * self.dim + j]
    }
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

fn metric_slope<T: Scalar>(dom: &Domain<T>, ext: usize, source: MetricDerivative) -> T {
    let m = dom.metric().expect("metric present");
    if source == MetricDerivative::Auto {
        if let Some(dg) = m.dg() {
            return dg[ext];
        }
    }
    let g = m.g();
    let h = dom.axis(0).spacing();
    let n = g.len();
    let two_h = h + h;
    if ext == 0 {
        (-T::lit(3.0) * g[0] + T::lit(4.0) * g[1] - g[2]) / two_h
    } else if ext + 1 == n {
        (T::lit(3.0) * g[n - 1] - T::lit(4.0) * g[n - 2] + g[n - 3]) / two_h
    } else {
        (g[ext + 1] - g[ext - 1]) / two_h
    }
}

/// Gamma^k_{ij} = 1/2 sum_l g^{kl} (d_i g_{lj} + d_j g_{il} - d_l g_{ij}) at
/// active node `node`.
pub fn christoffel<T: Scalar>(domain: &Domain<T>, node: usize) -> Christoffel<T> {
    christoffel_with(domain, node, MetricDerivative::Auto)
}

pub fn christoffel_with<T: Scalar>(
    domain: &Domain<T>,
    node: usize,
    source: MetricDerivative,
) -> Christoffel<T> {
    let mut out = Christoffel::zeros(domain.dim());
    if domain.metric().is_some() {
        let ext = node + domain.axis(0).offset();
        let slope = metric_slope(domain, ext, source);
        out.data[0] = slope / (T::lit(2.0) * domain.g(node));
    }
    out
}

fn all_christoffel<T: Scalar>(domain: &Domain<T>) -> Vec<Christoffel<T>> {
    (0..domain.len()).map(|i| christoffel(domain, i)).collect()
}

/// div P = sum_j { d_j eta^j + sum_l eta^l Gamma^j_{lj} }
pub fn divergence_via_christoffel<T: Scalar>(p: &VecField<T>) -> Field<T> {
    let dom = p.domain();
    let d = dom.dim();
    let gammas = all_christoffel(dom);
    let mut out = vec![T::zero(); dom.len()];
    for j in 0..d {
        for (o, v) in out.iter_mut().zip(partial(dom, p.component(j), j)) {
            *o = *o + v;
        }
    }
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..d {
            for l in 0..d {
                *o = *o + p.component(l)[i] * gammas[i].get(j, l, j);
            }
        }
    }
    Field::raw(dom.clone(), out)
}

/// [P, Q]^k = sum_j { eta^j d_j zeta^k - zeta^j d_j eta^k }
pub fn lie_bracket<T: Scalar>(p: &VecField<T>, q: &VecField<T>) -> Result<VecField<T>> {
    p.check_same_domain(q)?;
    let dom = p.domain();
    let d = dom.dim();
    let dp: Vec<Vec<Vec<T>>> = (0..d)
        .map(|k| (0..d).map(|j| partial(dom, p.component(k), j)).collect())
        .collect();
    let dq: Vec<Vec<Vec<T>>> = (0..d)
        .map(|k| (0..d).map(|j| partial(dom, q.component(k), j)).collect())
        .collect();
    let comps = (0..d)
        .map(|k| {
            (0..dom.len())
                .map(|i| {
                    (0..d)
                        .map(|j| p.component(j)[i] * dq[k][j][i] - q.component(j)[i] * dp[k][j][i])
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(VecField::raw(dom.clone(), comps))
}

/// (nabla_xi P)^k = sum_j xi^j { d_j eta^k + sum_l eta^l Gamma^k_{lj} }
pub fn covariant_derivative<T: Scalar>(xi: &VecField<T>, p: &VecField<T>) -> Result<VecField<T>> {
    xi.check_same_domain(p)?;
    let dom = p.domain();
    let d = dom.dim();
    let gammas = all_christoffel(dom);
    let dp: Vec<Vec<Vec<T>>> = (0..d)
        .map(|k| (0..d).map(|j| partial(dom, p.component(k), j)).collect())
        .collect();
    let comps = (0..d)
        .map(|k| {
            (0..dom.len())
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let conn: T = (0..d)
                                .map(|l| p.component(l)[i] * gammas[i].get(k, l, j))
                                .sum();
                            xi.component(j)[i] * (dp[k][j][i] + conn)
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(VecField::raw(dom.clone(), comps))
}

/// Pointwise metric pairing <P, Q> = sum g_{ij} P^i Q^j.
pub fn metric_pairing<T: Scalar>(p: &VecField<T>, q: &VecField<T>) -> Result<Field<T>> {
    p.check_same_domain(q)?;
    let dom = p.domain();
    let vals = (0..dom.len())
        .map(|i| {
            let dot: T = (0..dom.dim())
                .map(|a| p.component(a)[i] * q.component(a)[i])
                .sum();
            dot * dom.g(i)
        })
        .collect();
    Ok(Field::raw(dom.clone(), vals))
}

/// Directional derivative xi(f) = sum_j xi^j d_j f.
pub fn directional<T: Scalar>(xi: &VecField<T>, f: &Field<T>) -> Result<Field<T>> {
    if !xi.domain().same_as(f.domain()) {
        return Err(Error::DomainMismatch);
    }
    let dom = f.domain();
    let mut out = vec![T::zero(); dom.len()];
    for a in 0..dom.dim() {
        for ((o, d), x) in out
            .iter_mut()
            .zip(partial(dom, f.values(), a))
            .zip(xi.component(a))
        {
            *o = *o + *x * d;
        }
    }
    Ok(Field::raw(dom.clone(), out))
}

//! Assembly of the symmetric discrete Laplacian `A ~ -div grad`, the
//! weighted inner product, the Dirichlet form, and the discrete Green
//! identities.
//!
//! The operator is assembled from an edge list: every grid edge carries a
//! conductance `c_e`, every edge to an eliminated Dirichlet node is a
//! grounded edge, and `W A = sum_e c_e (e_i - e_j)(e_i - e_j)^T` with
//! `W = diag(w)` the quadrature weights. Symmetry of `W A` and positive
//! semidefiniteness hold by construction. A Neumann end node carries half a
//! trapezoid weight and no outer edge, which reproduces the mirror-ghost
//! stencil `2 (u_0 - u_1) / h^2`.

use std::sync::Arc;

use crate::eigensolve::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::geometry::{divergence, gradient, Domain, DomainKind, Field, Neighbor};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Edge of the conductance graph; `j = None` grounds `i` to a Dirichlet ghost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<T> {
    pub i: usize,
    pub j: Option<usize>,
    pub conductance: T,
}

/// Symmetric (in the weighted inner product) matrix representing `-div grad`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteOperator<T> {
    domain: Arc<Domain<T>>,
    matrix: CsrMatrix<T>,
    weights: Vec<T>,
    edges: Vec<Edge<T>>,
    factors: Option<Box<[DiscreteOperator<T>; 2]>>,
}

impl<T: Scalar> DiscreteOperator<T> {
    /// Wraps an arbitrary matrix; used to feed externally built operators to
    /// the eigensolver, which validates weighted symmetry itself.
    pub fn from_matrix(domain: Arc<Domain<T>>, matrix: CsrMatrix<T>) -> Result<Self> {
        if matrix.dim() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: matrix.dim(),
            });
        }
        let weights = domain.weights().to_vec();
        Ok(Self {
            domain,
            matrix,
            weights,
            edges: Vec::new(),
            factors: None,
        })
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        &self.domain
    }
    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
    /// One-dimensional factors `(A_x, A_y)` when `A = I (x) A_x + A_y (x) I`.
    pub fn factors(&self) -> Option<&[DiscreteOperator<T>; 2]> {
        self.factors.as_deref()
    }

    /// `||A||_inf`, the scale used by every relative tolerance.
    pub fn norm(&self) -> T {
        self.matrix.norm_inf()
    }

    pub fn apply(&self, u: &[T]) -> Vec<T> {
        self.matrix.matvec(u)
    }

    pub fn apply_field(&self, f: &Field<T>) -> Result<Field<T>> {
        self.check_domain(f)?;
        Ok(Field::raw(self.domain.clone(), self.apply(f.values())))
    }

    pub(crate) fn check_domain(&self, f: &Field<T>) -> Result<()> {
        if self.domain.same_as(f.domain()) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    /// Largest `|w_i A_ij - w_j A_ji|` relative to `max |w_i A_ij|`.
    pub fn weighted_asymmetry(&self) -> T {
        let w = &self.weights;
        let mut scale = T::zero();
        let mut worst = T::zero();
        for (i, j, v) in self.matrix.triplets() {
            let a = w[i] * v;
            let b = w[j] * self.matrix.get(j, i);
            scale = scale.max(a.abs());
            worst = worst.max((a - b).abs());
        }
        if scale > T::zero() {
            worst / scale
        } else {
            T::zero()
        }
    }
}

fn cross_weight<T: Scalar>(domain: &Domain<T>, i: usize, axis: usize) -> T {
    if domain.dim() == 1 {
        return T::one();
    }
    let other = 1 - axis;
    let ax = domain.axis(other);
    if domain.kind() == DomainKind::MaskedGrid {
        ax.spacing()
    } else {
        ax.weight(domain.grid_coords(i)[other])
    }
}

/// Conductance of the edge from node `i` one step along `axis`.
fn conductance<T: Scalar>(domain: &Domain<T>, i: usize, axis: usize, forward: bool) -> T {
    let ax = domain.axis(axis);
    let base = cross_weight(domain, i, axis) / ax.spacing();
    match domain.metric() {
        None => base,
        Some(m) => {
            let ext = domain.grid_coords(i)[0] + ax.offset();
            let left = if forward { ext } else { ext - 1 };
            base * m.flux_coefficient(ax, left)
        }
    }
}

fn assemble_edges<T: Scalar>(domain: &Domain<T>) -> Vec<Edge<T>> {
    let mut edges = Vec::new();
    for i in 0..domain.len() {
        for a in 0..domain.dim() {
            match domain.neighbor(i, a, true) {
                Neighbor::Node(j) => edges.push(Edge {
                    i,
                    j: Some(j),
                    conductance: conductance(domain, i, a, true),
                }),
                Neighbor::Ghost => edges.push(Edge {
                    i,
                    j: None,
                    conductance: conductance(domain, i, a, true),
                }),
                Neighbor::Outside => {}
            }
            if domain.neighbor(i, a, false) == Neighbor::Ghost {
                edges.push(Edge {
                    i,
                    j: None,
                    conductance: conductance(domain, i, a, false),
                });
            }
        }
    }
    edges
}

/// Assembles the second-order conservative Laplacian of `domain`.
pub fn assemble_laplacian<T: Scalar>(domain: &Arc<Domain<T>>) -> Result<DiscreteOperator<T>> {
    if domain.kind() == DomainKind::MaskedGrid {
        let ok = domain.axes().iter().all(|a| {
            a.lower() == crate::geometry::BoundaryCondition::Dirichlet && a.upper() == a.lower()
        });
        if !ok {
            return Err(Error::InvalidBoundary {
                kind: "masked-grid",
                reason: "only Dirichlet data is supported outside the mask".into(),
            });
        }
    }
    if domain.metric().is_some() && domain.kind() != DomainKind::Interval {
        return Err(Error::InvalidBoundary {
            kind: "metric",
            reason: "metric weights are only supported on intervals".into(),
        });
    }
    let edges = assemble_edges(domain);
    let weights = domain.weights().to_vec();
    let n = domain.len();
    let mut trip = Vec::with_capacity(4 * edges.len());
    for e in &edges {
        let c = e.conductance;
        trip.push((e.i, e.i, c / weights[e.i]));
        if let Some(j) = e.j {
            trip.push((j, j, c / weights[j]));
            trip.push((e.i, j, -c / weights[e.i]));
            trip.push((j, e.i, -c / weights[j]));
        }
    }
    let matrix = CsrMatrix::from_triplets(n, trip);
    let factors = if domain.kind() == DomainKind::Rectangle {
        let fx = Domain::single_axis(domain.axis(0).clone())?;
        let fy = Domain::single_axis(domain.axis(1).clone())?;
        Some(Box::new([
            assemble_laplacian(&fx)?,
            assemble_laplacian(&fy)?,
        ]))
    } else {
        None
    };
    Ok(DiscreteOperator {
        domain: domain.clone(),
        matrix,
        weights,
        edges,
        factors,
    })
}

fn check_pair<T: Scalar>(f: &Field<T>, h: &Field<T>) -> Result<()> {
    f.check_same_domain(h)
}

/// `(f, h) = sum_i w_i f_i h_i`
pub fn inner_product<T: Scalar>(f: &Field<T>, h: &Field<T>) -> Result<T> {
    check_pair(f, h)?;
    Ok(weighted_dot(f.domain().weights(), f.values(), h.values()))
}

pub(crate) fn weighted_dot<T: Scalar>(w: &[T], a: &[T], b: &[T]) -> T {
    w.iter().zip(a).zip(b).map(|((&w, &x), &y)| w * x * y).sum()
}

/// Discrete Dirichlet form `D[f, h] = (grad f, grad h)`, summed edge by edge.
/// By summation by parts it equals `f^T (W A) h`.
pub fn dirichlet_energy<T: Scalar>(
    op: &DiscreteOperator<T>,
    f: &Field<T>,
    h: &Field<T>,
) -> Result<T> {
    check_pair(f, h)?;
    op.check_domain(f)?;
    if op.edges.is_empty() {
        let ah = op.apply(h.values());
        return Ok(weighted_dot(&op.weights, f.values(), &ah));
    }
    let (fv, hv) = (f.values(), h.values());
    Ok(op
        .edges
        .iter()
        .map(|e| {
            let (fj, hj) = e.j.map_or((T::zero(), T::zero()), |j| (fv[j], hv[j]));
            e.conductance * (fv[e.i] - fj) * (hv[e.i] - hj)
        })
        .sum())
}

/// Zeroes every node within two grid steps of a boundary segment.
pub fn compact_support<T: Scalar>(f: &Field<T>) -> Field<T> {
    let dom = f.domain();
    let keep = |i: usize| {
        (0..dom.dim()).all(|a| {
            [true, false].iter().all(|&fwd| {
                let mut cur = i;
                let mut steps = 0usize;
                loop {
                    if steps > 2 {
                        return true;
                    }
                    match dom.neighbor(cur, a, fwd) {
                        Neighbor::Node(j) => {
                            steps += 1;
                            if j == i {
                                return true;
                            }
                            cur = j;
                        }
                        Neighbor::Ghost => return steps + 1 > 2,
                        Neighbor::Outside => return steps > 2,
                    }
                }
            })
        })
    };
    let vals = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if keep(i) { v } else { T::zero() })
        .collect();
    Field::raw(dom.clone(), vals)
}

/// Residuals of the discrete divergence theorem and Green formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenReport<T> {
    /// |(h, A f) - D[h, f]|
    pub r1: T,
    /// |(h, sqrt(A) f) - (sqrt(A) h, f)|
    pub r2: T,
    /// |sum_i w_i div(h grad f)_i| for compactly supported f, h
    pub r3: T,
    /// |(h, A f) - (f, A h)|
    pub r4: T,
    /// Scale each residual is measured against, same order.
    pub scales: [T; 4],
}

impl<T: Scalar> GreenReport<T> {
    pub fn residuals(&self) -> [T; 4] {
        [self.r1, self.r2, self.r3, self.r4]
    }

    /// True when every residual is at most `tol` times its scale.
    pub fn passes(&self, tol: T) -> bool {
        self.residuals()
            .iter()
            .zip(&self.scales)
            .all(|(&r, &s)| r <= tol * s)
    }
}

pub fn check_green_identities<T: Scalar>(
    f: &Field<T>,
    h: &Field<T>,
    decomp: &SpectralDecomposition<T>,
) -> Result<GreenReport<T>> {
    check_pair(f, h)?;
    let op = decomp.operator();
    op.check_domain(f)?;
    let w = op.weights();
    let af = op.apply(f.values());
    let ah = op.apply(h.values());
    let h_af = weighted_dot(w, h.values(), &af);
    let f_ah = weighted_dot(w, f.values(), &ah);
    let energy = dirichlet_energy(op, h, f)?;

    let sf = decomp.apply_spectral(|r| r, f.values());
    let sh = decomp.apply_spectral(|r| r, h.values());
    let h_sf = weighted_dot(w, h.values(), &sf);
    let sh_f = weighted_dot(w, &sh, f.values());

    let fc = compact_support(f);
    let hc = compact_support(h);
    let p = gradient(&fc).scaled_by(&hc)?;
    let div = divergence(&p);
    let total: T = w.iter().zip(div.values()).map(|(&w, &d)| w * d).sum();
    let abs_total: T = w.iter().zip(div.values()).map(|(&w, &d)| w * d.abs()).sum();

    let nf = weighted_dot(w, f.values(), f.values()).sqrt();
    let nh = weighted_dot(w, h.values(), h.values()).sqrt();
    let norm = op.norm();
    let tiny = T::min_positive_value();
    let s_a = (norm * nf * nh).max(tiny);
    let s_sqrt = (norm.sqrt() * nf * nh).max(tiny);
    Ok(GreenReport {
        r1: (h_af - energy).abs(),
        r2: (h_sf - sh_f).abs(),
        r3: total.abs(),
        r4: (h_af - f_ah).abs(),
        scales: [s_a, s_sqrt, abs_total.max(tiny), s_a],
    })
}

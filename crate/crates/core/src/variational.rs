//! Rayleigh quotients, constrained min-max, Dirichlet/Neumann bracketing and
//! fundamental tones.

use std::sync::Arc;

use crate::discretize::{assemble_laplacian, dirichlet_energy, inner_product, DiscreteOperator};
use crate::eigensolve::{
    dense_symmetric, eigendecompose, lowest_eigenvalue, SpectralDecomposition, Tridiagonal,
    MAX_DIMENSION,
};
use crate::error::{Error, Result};
use crate::geometry::{Axis, BoundaryCondition, Domain, DomainKind, Field};
use crate::scalar::{cmp, Scalar};

/// Boundary data imposed on the cut lines of a [`Partition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interface {
    /// The cut node is removed and becomes a homogeneous Dirichlet end of
    /// both neighbouring pieces.
    Dirichlet,
    /// The cut node belongs to both neighbouring pieces as a Neumann end.
    Neumann,
}

impl Interface {
    fn bc(self) -> BoundaryCondition {
        match self {
            Self::Dirichlet => BoundaryCondition::Dirichlet,
            Self::Neumann => BoundaryCondition::Neumann,
        }
    }
}

/// Axis-aligned straight cut through grid nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut<T> {
    pub axis: usize,
    pub position: T,
}

/// A domain split by node-aligned cuts into disjoint pieces that reuse the
/// parent grid. Outer boundaries keep the parent's data.
#[derive(Clone, Debug)]
pub struct Partition<T> {
    domain: Arc<Domain<T>>,
    interface: Interface,
    cuts: Vec<Vec<usize>>,
    pieces: Vec<Arc<Domain<T>>>,
}

impl<T: Scalar> Partition<T> {
    pub fn new(domain: &Arc<Domain<T>>, cuts: &[Cut<T>], interface: Interface) -> Result<Self> {
        let mut per_axis = vec![Vec::new(); domain.dim()];
        for c in cuts {
            let ax = domain.axes().get(c.axis).ok_or_else(|| {
                Error::InvalidArgument(format!("cut axis {} on a {}D domain", c.axis, domain.dim()))
            })?;
            if ax.is_periodic() {
                return Err(Error::InvalidArgument(
                    "cuts on periodic axes are not supported".into(),
                ));
            }
            let node = ax.node_at(c.position).ok_or_else(|| {
                Error::InvalidArgument(format!("cut at {} does not sit on a grid node", c.position))
            })?;
            if node == 0 || node + 1 == ax.nodes() {
                return Err(Error::InvalidArgument(format!(
                    "cut at {} is not interior",
                    c.position
                )));
            }
            per_axis[c.axis].push(node);
        }
        for v in per_axis.iter_mut() {
            v.sort_unstable();
            v.dedup();
        }
        let pieces = if per_axis.iter().all(Vec::is_empty) {
            vec![domain.clone()]
        } else {
            match domain.kind() {
                DomainKind::Interval => segments(domain.axis(0), &per_axis[0], interface)
                    .into_iter()
                    .map(|(a, b, lo, hi)| domain.sub_interval(a, b, lo, hi))
                    .collect::<Result<_>>()?,
                DomainKind::Rectangle => {
                    let xs = segments(domain.axis(0), &per_axis[0], interface);
                    let ys = segments(domain.axis(1), &per_axis[1], interface);
                    let mut out = Vec::with_capacity(xs.len() * ys.len());
                    for &(y0, y1, bottom, top) in &ys {
                        for &(x0, x1, left, right) in &xs {
                            out.push(domain.sub_rectangle(
                                (x0, x1),
                                (y0, y1),
                                [left, right, bottom, top],
                            )?);
                        }
                    }
                    out
                }
                kind => {
                    return Err(Error::InvalidArgument(format!(
                        "cannot partition a {} domain",
                        kind.name()
                    )))
                }
            }
        };
        Ok(Self {
            domain: domain.clone(),
            interface,
            cuts: per_axis,
            pieces,
        })
    }

    /// The partition with no cuts.
    pub fn trivial(domain: &Arc<Domain<T>>, interface: Interface) -> Self {
        Self {
            domain: domain.clone(),
            interface,
            cuts: vec![Vec::new(); domain.dim()],
            pieces: vec![domain.clone()],
        }
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        &self.domain
    }
    pub fn interface(&self) -> Interface {
        self.interface
    }
    /// Node indices of the cuts along each axis.
    pub fn cut_nodes(&self) -> &[Vec<usize>] {
        &self.cuts
    }
    pub fn pieces(&self) -> &[Arc<Domain<T>>] {
        &self.pieces
    }
}

type Segment = (usize, usize, BoundaryCondition, BoundaryCondition);

fn segments<T: Scalar>(axis: &Axis<T>, cuts: &[usize], interface: Interface) -> Vec<Segment> {
    let skip = usize::from(interface == Interface::Dirichlet);
    let bc = interface.bc();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let (mut start, mut lower) = (0, axis.lower());
    for &c in cuts {
        out.push((start, c - skip, lower, bc));
        start = c + skip;
        lower = bc;
    }
    out.push((start, axis.nodes() - 1, lower, axis.upper()));
    out
}

/// `D[f, f] / (f, f)`
pub fn rayleigh_quotient<T: Scalar>(f: &Field<T>, op: &DiscreteOperator<T>) -> Result<T> {
    let norm2 = inner_product(f, f)?;
    if norm2 == T::zero() {
        return Err(Error::ZeroField);
    }
    Ok(dirichlet_energy(op, f, f)? / norm2)
}

/// Smallest Rayleigh quotient over fields orthogonal to every constraint,
/// computed exactly from the operator compressed onto the orthogonal
/// complement.
pub fn minmax_estimate<T: Scalar>(
    d: &SpectralDecomposition<T>,
    constraints: &[Field<T>],
) -> Result<T> {
    for c in constraints {
        d.check_field(c)?;
    }
    let op = d.operator();
    let n = op.dim();
    if n > MAX_DIMENSION {
        return Err(Error::Contract(format!(
            "dimension {n} exceeds the dense cap of {MAX_DIMENSION}"
        )));
    }
    // In y = W^{1/2} f coordinates the form is Euclidean and A becomes S.
    let sw: Vec<T> = op.weights().iter().map(|w| w.sqrt()).collect();
    let mut cols: Vec<Vec<T>> = constraints
        .iter()
        .map(|c| c.values().iter().zip(&sw).map(|(&v, &s)| v * s).collect())
        .collect();
    let mut s = dense_symmetric(op);
    let mut rank = 0;
    for j in 0..cols.len() {
        let scale = cols[j].iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let Some((u, beta)) = reflector(&cols[j][rank..], scale) else {
            continue;
        };
        for col in cols.iter_mut().skip(j + 1) {
            reflect(&mut col[rank..], &u, beta);
        }
        reflect_both_sides(&mut s, n, rank, &u, beta);
        rank += 1;
    }
    let m = n - rank;
    if m == 0 {
        return Err(Error::InvalidArgument(
            "constraints span the whole space".into(),
        ));
    }
    let mut block = vec![T::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            let a = s[(rank + i) * n + rank + j];
            let b = s[(rank + j) * n + rank + i];
            block[i * m + j] = (a + b) / T::lit(2.0);
        }
    }
    Ok(Tridiagonal::householder(block, m).eigenvalues()?[0])
}

/// Householder vector `u` with `(I - beta u u^T) x = -+|x| e_1`, or `None`
/// when `x` is negligible against `scale`.
fn reflector<T: Scalar>(x: &[T], scale: T) -> Option<(Vec<T>, T)> {
    let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
    if !(norm > T::lit(1e-12) * scale) {
        return None;
    }
    let alpha = if x[0] > T::zero() { -norm } else { norm };
    let mut u = x.to_vec();
    u[0] = u[0] - alpha;
    let uu: T = u.iter().map(|&v| v * v).sum();
    Some((u, T::lit(2.0) / uu))
}

fn reflect<T: Scalar>(x: &mut [T], u: &[T], beta: T) {
    let s = beta * u.iter().zip(x.iter()).map(|(&a, &b)| a * b).sum::<T>();
    for (v, &ui) in x.iter_mut().zip(u) {
        *v = *v - s * ui;
    }
}

/// `S <- H S H` for `H` acting on indices `off..n`.
fn reflect_both_sides<T: Scalar>(s: &mut [T], n: usize, off: usize, u: &[T], beta: T) {
    for i in 0..n {
        reflect(&mut s[i * n + off..(i + 1) * n], u, beta);
    }
    let mut col = vec![T::zero(); n - off];
    for j in 0..n {
        for (r, c) in col.iter_mut().enumerate() {
            *c = s[(off + r) * n + j];
        }
        reflect(&mut col, u, beta);
        for (r, c) in col.iter().enumerate() {
            s[(off + r) * n + j] = *c;
        }
    }
}

/// Eigenvalue comparison table of a parent domain against its pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable<T> {
    /// Merged ascending spectra of the pieces.
    pub pieces: Vec<T>,
    /// Spectrum of the parent.
    pub lambda: Vec<T>,
    /// Per-index verdict of the bracketing inequality.
    pub holds: Vec<bool>,
}

impl<T: Scalar> BracketTable<T> {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

/// Eigenvalue round-off grows with the operator norm, not with the value.
fn slack<T: Scalar>(v: T, norm: T) -> T {
    (T::lit(1e-10) * v.abs().max(T::one())).max(T::lit(1e-12) * norm)
}

fn bracket_spectra<T: Scalar>(part: &Partition<T>, kmax: usize) -> Result<(Vec<T>, Vec<T>, T)> {
    if kmax > part.domain.len() {
        return Err(Error::TooSmall(format!(
            "parent has {} nodes, {kmax} modes requested",
            part.domain.len()
        )));
    }
    let parent = eigendecompose(&assemble_laplacian(&part.domain)?, kmax)?;
    let mut merged = Vec::new();
    for piece in &part.pieces {
        let count = kmax.min(piece.len());
        let d = eigendecompose(&assemble_laplacian(piece)?, count)?;
        merged.extend_from_slice(d.lambdas());
    }
    if merged.len() < kmax {
        return Err(Error::TooSmall(format!(
            "pieces yield {} modes, {kmax} requested",
            merged.len()
        )));
    }
    merged.sort_by(cmp);
    merged.truncate(kmax);
    Ok((merged, parent.lambdas().to_vec(), parent.operator_norm()))
}

/// `lambda_k <= nu_k` with `nu` the Dirichlet-cut piece spectra. Holds is
/// decided with slack `max(1e-10 max(1, |nu_k|), 1e-12 ||A||)`.
pub fn dirichlet_bracket<T: Scalar>(part: &Partition<T>, kmax: usize) -> Result<BracketTable<T>> {
    if part.interface != Interface::Dirichlet {
        return Err(Error::InvalidArgument(
            "partition has Neumann interfaces".into(),
        ));
    }
    let (nu, lambda, norm) = bracket_spectra(part, kmax)?;
    let holds = lambda
        .iter()
        .zip(&nu)
        .map(|(&l, &v)| l <= v + slack(v, norm))
        .collect();
    Ok(BracketTable {
        pieces: nu,
        lambda,
        holds,
    })
}

/// `mu_k <= lambda_k` with `mu` the Neumann-cut piece spectra, same slack.
pub fn neumann_bracket<T: Scalar>(part: &Partition<T>, kmax: usize) -> Result<BracketTable<T>> {
    if part.interface != Interface::Neumann {
        return Err(Error::InvalidArgument(
            "partition has Dirichlet interfaces".into(),
        ));
    }
    let (mu, lambda, norm) = bracket_spectra(part, kmax)?;
    let holds = mu
        .iter()
        .zip(&lambda)
        .map(|(&m, &l)| m <= l + slack(l, norm))
        .collect();
    Ok(BracketTable {
        pieces: mu,
        lambda,
        holds,
    })
}

/// First eigenvalue of the all-Dirichlet operator on `sub`.
pub fn fundamental_tone<T: Scalar>(sub: &Arc<Domain<T>>) -> Result<T> {
    match sub.kind() {
        DomainKind::Circle => {
            return Err(Error::InvalidBoundary {
                kind: "fundamental tone",
                reason: "a circle has no boundary".into(),
            })
        }
        DomainKind::MaskedGrid => {
            for a in 0..2 {
                let mut seen: Vec<usize> = (0..sub.len()).map(|i| sub.grid_coords(i)[a]).collect();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() < 3 {
                    return Err(Error::TooSmall(format!(
                        "region spans {} nodes along axis {a}, need 3",
                        seen.len()
                    )));
                }
            }
        }
        _ => {
            if sub.axes().iter().any(|a| {
                a.lower() != BoundaryCondition::Dirichlet
                    || a.upper() != BoundaryCondition::Dirichlet
            }) {
                return Err(Error::InvalidBoundary {
                    kind: "fundamental tone",
                    reason: "every boundary segment must be Dirichlet".into(),
                });
            }
        }
    }
    lowest_eigenvalue(&assemble_laplacian(sub)?)
}

/// Tone of a disjoint union: the smallest tone among its pieces.
pub fn fundamental_tone_of_union<T: Scalar>(pieces: &[Arc<Domain<T>>]) -> Result<T> {
    let mut best: Option<T> = None;
    for p in pieces {
        let t = fundamental_tone(p)?;
        best = Some(best.map_or(t, |b| b.min(t)));
    }
    best.ok_or(Error::EmptyDomain)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::geometry::BoundaryCondition::*;

    fn random_field(dom: &Arc<Domain<f64>>, rng: &mut ChaCha8Rng) -> Field<f64> {
        Field::new(
            dom.clone(),
            (0..dom.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rayleigh_examples() {
        let dom = Domain::interval(1.0, 500, Dirichlet, Dirichlet).unwrap();
        let op = assemble_laplacian(&dom).unwrap();
        let d = eigendecompose(&op, 1).unwrap();
        let l1: f64 = d.lambdas()[0];
        let r1: f64 = rayleigh_quotient(&d.mode(0), &op).unwrap();
        assert!((r1 - l1).abs() <= 1e-12 * op.norm());
        let f = Field::from_fn(dom.clone(), |p: [f64; 2]| p[0] * (1.0 - p[0])).unwrap();
        let q = rayleigh_quotient(&f, &op).unwrap();
        assert!(q >= l1);
        assert_relative_eq!(q, 10.0, max_relative = 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(rayleigh_quotient(&random_field(&dom, &mut rng), &op).unwrap() >= l1);
        }
        assert_eq!(
            rayleigh_quotient(&Field::zeros(dom.clone()), &op),
            Err(Error::ZeroField)
        );
    }

    #[test]
    fn minmax_reproduces_spectrum() {
        let dom = Domain::interval(1.0, 60, Dirichlet, Neumann).unwrap();
        let d = eigendecompose(&assemble_laplacian(&dom).unwrap(), 60).unwrap();
        assert_relative_eq!(
            minmax_estimate(&d, &[]).unwrap(),
            d.lambdas()[0],
            max_relative = 1e-10
        );
        for k in [2, 5, 9] {
            let cons: Vec<_> = (0..k - 1).map(|j| d.mode(j)).collect();
            assert_relative_eq!(
                minmax_estimate(&d, &cons).unwrap(),
                d.lambdas()[k - 1],
                max_relative = 1e-10
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 2..8 {
            let cons: Vec<_> = (0..k - 1).map(|_| random_field(&dom, &mut rng)).collect();
            assert!(minmax_estimate(&d, &cons).unwrap() <= d.lambdas()[k - 1] + 1e-10);
        }
    }

    #[test]
    fn minmax_on_rectangle_and_dependent_constraints() {
        let dom = Domain::rectangle([1.0, 1.0], [7, 6], [Dirichlet; 4]).unwrap();
        let d = eigendecompose(&assemble_laplacian(&dom).unwrap(), dom.len()).unwrap();
        let cons = vec![d.mode(0), d.mode(0).scale(2.0), d.mode(1)];
        assert_relative_eq!(
            minmax_estimate(&d, &cons).unwrap(),
            d.lambdas()[2],
            max_relative = 1e-10
        );
    }

    #[test]
    fn dirichlet_bracket_on_two_halves() {
        let dom = Domain::interval(2.0, 399, Dirichlet, Dirichlet).unwrap();
        let part = Partition::new(
            &dom,
            &[Cut {
                axis: 0,
                position: 1.0,
            }],
            Interface::Dirichlet,
        )
        .unwrap();
        assert_eq!(part.pieces().len(), 2);
        assert_eq!(
            part.pieces()[0].len() + part.pieces()[1].len() + 1,
            dom.len()
        );
        let t = dirichlet_bracket(&part, 20).unwrap();
        assert!(t.all_hold());
        assert_relative_eq!(t.pieces[0], PI * PI, max_relative = 2e-3);
        assert_relative_eq!(t.pieces[1], t.pieces[0], max_relative = 1e-12);
        assert_relative_eq!(t.lambda[1], t.pieces[1], max_relative = 1e-9);
        assert!(t.lambda[0] < t.pieces[0]);
    }

    #[test]
    fn neumann_bracket_on_two_halves() {
        let dom = Domain::interval(2.0, 399, Dirichlet, Dirichlet).unwrap();
        let part = Partition::new(
            &dom,
            &[Cut {
                axis: 0,
                position: 1.0,
            }],
            Interface::Neumann,
        )
        .unwrap();
        assert_eq!(
            part.pieces()[0].len() + part.pieces()[1].len() - 1,
            dom.len()
        );
        let t = neumann_bracket(&part, 20).unwrap();
        assert!(t.all_hold());
        let q = (PI / 2.0).powi(2);
        assert_relative_eq!(t.pieces[0], q, max_relative = 2e-3);
        assert_relative_eq!(t.pieces[1], q, max_relative = 2e-3);
        assert_relative_eq!(t.pieces[2], 9.0 * q, max_relative = 2e-3);
        assert_relative_eq!(t.pieces[0], t.lambda[0], max_relative = 1e-9);
    }

    #[test]
    fn trivial_partition_is_identity() {
        let dom = Domain::interval(1.0, 50, Dirichlet, Neumann).unwrap();
        for iface in [Interface::Dirichlet, Interface::Neumann] {
            let part = Partition::new(&dom, &[], iface).unwrap();
            let t = match iface {
                Interface::Dirichlet => dirichlet_bracket(&part, 10),
                Interface::Neumann => neumann_bracket(&part, 10),
            }
            .unwrap();
            assert_eq!(t.pieces, t.lambda);
        }
    }

    #[test]
    fn square_halves() {
        let n = 41;
        let dom = Domain::rectangle([PI, PI], [n, n], [Dirichlet; 4]).unwrap();
        let cut = [Cut {
            axis: 1,
            position: PI / 2.0,
        }];
        let dir = dirichlet_bracket(
            &Partition::new(&dom, &cut, Interface::Dirichlet).unwrap(),
            10,
        )
        .unwrap();
        assert!(dir.all_hold());
        assert_relative_eq!(dir.lambda[0], 2.0, max_relative = 2e-3);
        assert_relative_eq!(dir.pieces[0], 5.0, max_relative = 5e-3);
        let neu =
            neumann_bracket(&Partition::new(&dom, &cut, Interface::Neumann).unwrap(), 10).unwrap();
        assert!(neu.all_hold());
        // The outer edge stays Dirichlet, so each half has modes m^2 + (2k - 1)^2.
        assert_relative_eq!(neu.pieces[0], 2.0, max_relative = 2e-3);
        assert_relative_eq!(neu.pieces[0], neu.lambda[0], max_relative = 1e-9);
    }

    #[test]
    fn partition_rejects_bad_cuts() {
        let dom = Domain::interval(1.0, 9, Dirichlet, Dirichlet).unwrap();
        assert!(Partition::new(
            &dom,
            &[Cut {
                axis: 0,
                position: 0.55
            }],
            Interface::Dirichlet
        )
        .is_err());
        assert!(Partition::new(
            &dom,
            &[Cut {
                axis: 1,
                position: 0.5
            }],
            Interface::Dirichlet
        )
        .is_err());
        let c = Domain::<f64>::circle(1.0, 8).unwrap();
        assert!(Partition::new(
            &c,
            &[Cut {
                axis: 0,
                position: 0.5
            }],
            Interface::Dirichlet
        )
        .is_err());
    }

    #[test]
    fn tones() {
        let full = Domain::interval(1.0, 2000, Dirichlet, Dirichlet).unwrap();
        assert_relative_eq!(
            fundamental_tone(&full).unwrap(),
            PI * PI,
            max_relative = 2e-3
        );
        // x = (i + 1) / 2001: node 999 sits at 1000/2001, node 1000 is past 1/2.
        let half = full.sub_interval(0, 998, Dirichlet, Dirichlet).unwrap();
        assert_relative_eq!(
            fundamental_tone(&half).unwrap(),
            4.0 * PI * PI,
            max_relative = 5e-3
        );

        let dom = Domain::interval(1.0, 599, Dirichlet, Dirichlet).unwrap();
        // h = 1/600: nodes 199 and 399 sit at 1/3 and 2/3.
        let left = dom.sub_interval(0, 198, Dirichlet, Dirichlet).unwrap();
        let right = dom.sub_interval(400, 598, Dirichlet, Dirichlet).unwrap();
        let tone = fundamental_tone_of_union(&[left.clone(), right]).unwrap();
        assert_relative_eq!(tone, 9.0 * PI * PI, max_relative = 5e-3);
        assert!(tone >= fundamental_tone(&dom).unwrap() - 1e-10);

        let neu = Domain::interval(1.0, 20, Dirichlet, Neumann).unwrap();
        assert!(matches!(
            fundamental_tone(&neu),
            Err(Error::InvalidBoundary { .. })
        ));
        let c = Domain::<f64>::circle(1.0, 8).unwrap();
        assert!(fundamental_tone(&c).is_err());
    }
}

//! Nodal domains of grid functions and the Courant, tone and Pleijel checks
//! built on them.

use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::discretize::assemble_laplacian;
use crate::eigensolve::{lowest_eigenvalue, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, Domain, DomainKind, Field, Neighbor};
use crate::scalar::Scalar;

/// Default zero threshold relative to `max |f|`.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// Maximal connected sign-uniform components of a field. Nodes with
/// `|f_i| <= zero_tol max|f|` are zero-tagged and belong to none.
#[derive(Clone, Debug)]
pub struct NodalPartition<T> {
    field: Field<T>,
    labels: Vec<Option<usize>>,
    signs: Vec<Sign>,
    sizes: Vec<usize>,
}

impl<T: Scalar> NodalPartition<T> {
    pub fn field(&self) -> &Field<T> {
        &self.field
    }
    /// Component id of every node, `None` for zero-tagged nodes. Ids are
    /// numbered in order of their lowest node.
    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }
    pub fn count(&self) -> usize {
        self.signs.len()
    }
    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }
    /// Node count of each component.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
    pub fn zero_nodes(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i].is_none())
            .collect()
    }
    pub fn nodes_of(&self, component: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == Some(component))
            .collect()
    }
    /// Largest component, the lowest id among equals.
    pub fn largest(&self) -> usize {
        let mut best = 0;
        for (c, &s) in self.sizes.iter().enumerate() {
            if s > self.sizes[best] {
                best = c;
            }
        }
        best
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Sign-uniform connected components under grid (4-) adjacency, periodic
/// wrap included.
pub fn nodal_domains<T: Scalar>(f: &Field<T>, zero_tol: T) -> Result<NodalPartition<T>> {
    if !(zero_tol >= T::zero()) {
        return Err(Error::InvalidArgument(
            "zero_tol must be nonnegative".into(),
        ));
    }
    let peak = f.max_abs();
    if peak == T::zero() {
        return Err(Error::ZeroField);
    }
    let thr = zero_tol * peak;
    let sign: Vec<Option<Sign>> = f
        .values()
        .iter()
        .map(|&v| {
            if v.abs() <= thr {
                None
            } else if v > T::zero() {
                Some(Sign::Positive)
            } else {
                Some(Sign::Negative)
            }
        })
        .collect();
    let dom = f.domain();
    let n = dom.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        let Some(s) = sign[i] else { continue };
        for a in 0..dom.dim() {
            if let Neighbor::Node(j) = dom.neighbor(i, a, true) {
                if sign[j] == Some(s) {
                    uf.union(i, j);
                }
            }
        }
    }
    let mut id_of_root = vec![usize::MAX; n];
    let mut labels = vec![None; n];
    let mut signs = Vec::new();
    let mut sizes = Vec::new();
    for i in 0..n {
        let Some(s) = sign[i] else { continue };
        let r = uf.find(i);
        if id_of_root[r] == usize::MAX {
            id_of_root[r] = signs.len();
            signs.push(s);
            sizes.push(0);
        }
        let id = id_of_root[r];
        labels[i] = Some(id);
        sizes[id] += 1;
    }
    Ok(NodalPartition {
        field: f.clone(),
        labels,
        signs,
        sizes,
    })
}

/// One row of [`courant_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CourantRow {
    /// 1-based mode index.
    pub k: usize,
    pub count: usize,
    pub ok: bool,
}

/// Nodal count `n_k` of each of the first `kmax` modes against the bound `n_k <= k`.
pub fn courant_check<T: Scalar>(
    d: &SpectralDecomposition<T>,
    kmax: usize,
) -> Result<Vec<CourantRow>> {
    if kmax > d.len() {
        return Err(Error::InvalidArgument(format!(
            "kmax {kmax} exceeds the {} computed modes",
            d.len()
        )));
    }
    (1..=kmax)
        .map(|k| {
            let count = nodal_domains(&d.mode(k - 1), T::lit(DEFAULT_ZERO_TOL))?.count();
            Ok(CourantRow {
                k,
                count,
                ok: count <= k,
            })
        })
        .collect()
}

/// Which nodal domain [`nodal_tone_check_with`] examines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ToneSelector<T> {
    Largest,
    /// The component holding the node nearest to this point.
    Containing([T; 2]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToneCheck<T> {
    /// 1-based mode index.
    pub k: usize,
    pub tone: T,
    pub lambda: T,
    pub rel_err: T,
    /// Node count of the examined nodal domain.
    pub nodes: usize,
}

/// Tone of the largest nodal domain of mode `k` (1-based) against `lambda_k`.
pub fn nodal_tone_check<T: Scalar>(d: &SpectralDecomposition<T>, k: usize) -> Result<ToneCheck<T>> {
    nodal_tone_check_with(d, k, ToneSelector::Largest)
}

/// The nodal domain is cut out of the parent grid with homogeneous Dirichlet
/// data at its neighbouring nodes; stretches of outer boundary keep the
/// parent's data.
pub fn nodal_tone_check_with<T: Scalar>(
    d: &SpectralDecomposition<T>,
    k: usize,
    selector: ToneSelector<T>,
) -> Result<ToneCheck<T>> {
    if k == 0 || k > d.len() {
        return Err(Error::InvalidArgument(format!(
            "mode {k} outside 1..={}",
            d.len()
        )));
    }
    let part = nodal_domains(&d.mode(k - 1), T::lit(DEFAULT_ZERO_TOL))?;
    let dom = d.domain();
    let comp = match selector {
        ToneSelector::Largest => part.largest(),
        ToneSelector::Containing(p) => {
            let node = nearest_node(dom, p);
            part.labels()[node].ok_or_else(|| {
                Error::InvalidArgument("selected point lies on the nodal set".into())
            })?
        }
    };
    let nodes = part.nodes_of(comp);
    let sub = component_domain(dom, &nodes)?;
    let tone = lowest_eigenvalue(&assemble_laplacian(&sub)?)?;
    let lambda = d.lambdas()[k - 1];
    let rel_err = if lambda > T::zero() {
        (tone - lambda).abs() / lambda
    } else {
        (tone - lambda).abs()
    };
    Ok(ToneCheck {
        k,
        tone,
        lambda,
        rel_err,
        nodes: nodes.len(),
    })
}

fn nearest_node<T: Scalar>(dom: &Domain<T>, p: [T; 2]) -> usize {
    let dist = |i: usize| {
        let q = dom.point(i);
        (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)
    };
    (0..dom.len())
        .min_by(|&a, &b| {
            dist(a)
                .partial_cmp(&dist(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0)
}

fn component_domain<T: Scalar>(dom: &Arc<Domain<T>>, nodes: &[usize]) -> Result<Arc<Domain<T>>> {
    if nodes.len() == dom.len() {
        return Ok(dom.clone());
    }
    use BoundaryCondition::Dirichlet;
    match dom.kind() {
        DomainKind::Interval | DomainKind::Circle => {
            let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
            if b - a + 1 != nodes.len() {
                return Err(Error::InvalidArgument(
                    "nodal domain wraps around the circle".into(),
                ));
            }
            let ax = dom.axis(0);
            let lower = if a == 0 && !ax.is_periodic() {
                ax.lower()
            } else {
                Dirichlet
            };
            let upper = if b + 1 == ax.nodes() && !ax.is_periodic() {
                ax.upper()
            } else {
                Dirichlet
            };
            dom.sub_interval(a, b, lower, upper)
        }
        DomainKind::Rectangle | DomainKind::MaskedGrid => {
            if dom
                .axes()
                .iter()
                .any(|a| a.lower() != Dirichlet || a.upper() != Dirichlet)
            {
                return Err(Error::InvalidBoundary {
                    kind: "nodal domain",
                    reason: "2D tone checks need Dirichlet data on the outer boundary".into(),
                });
            }
            let nx = dom.axis(0).nodes();
            let mut mask = vec![false; nx * dom.axis(1).nodes()];
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for &i in nodes {
                let [ix, iy] = dom.grid_coords(i);
                mask[iy * nx + ix] = true;
                xs.push(ix);
                ys.push(iy);
            }
            for (name, v) in [("x", &mut xs), ("y", &mut ys)] {
                v.sort_unstable();
                v.dedup();
                if v.len() < 3 {
                    return Err(Error::TooSmall(format!(
                        "nodal domain spans {} nodes along {name}",
                        v.len()
                    )));
                }
            }
            Domain::masked_from_axes(dom.axis(0).clone(), dom.axis(1).clone(), mask)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PleijelReport<T> {
    /// `(k, n_k, n_k / k)` for each `k` in the window.
    pub rows: Vec<(usize, usize, T)>,
    pub max_ratio: T,
    /// False in one dimension, where the isoperimetric hypothesis holds
    /// only with equality; ratios are still reported.
    pub hypothesis_holds: bool,
}

/// Nodal-count ratios `n_k / k` over a 1-based window of modes.
pub fn pleijel_ratio<T: Scalar>(
    d: &SpectralDecomposition<T>,
    krange: RangeInclusive<usize>,
) -> Result<PleijelReport<T>> {
    if *krange.start() == 0 || *krange.end() > d.len() || krange.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "window {krange:?} outside 1..={}",
            d.len()
        )));
    }
    let mut rows = Vec::new();
    let mut max_ratio = T::zero();
    for k in krange {
        let n = nodal_domains(&d.mode(k - 1), T::lit(DEFAULT_ZERO_TOL))?.count();
        let r = T::from_usize_lossy(n) / T::from_usize_lossy(k);
        max_ratio = max_ratio.max(r);
        rows.push((k, n, r));
    }
    Ok(PleijelReport {
        rows,
        max_ratio,
        hypothesis_holds: d.domain().dim() >= 2,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;

    use super::*;
    use crate::eigensolve::eigendecompose;
    use crate::geometry::BoundaryCondition::*;

    fn decomp(dom: &Arc<Domain<f64>>, count: usize) -> SpectralDecomposition<f64> {
        eigendecompose(&assemble_laplacian(dom).unwrap(), count).unwrap()
    }

    #[test]
    fn sine_sign_patterns() {
        let dom = Domain::interval(1.0, 300, Dirichlet, Dirichlet).unwrap();
        for k in 1..=6 {
            let f =
                Field::from_fn(dom.clone(), |p: [f64; 2]| (k as f64 * PI * p[0]).sin()).unwrap();
            let part = nodal_domains(&f, DEFAULT_ZERO_TOL).unwrap();
            assert_eq!(part.count(), k);
            let alternating = part.signs().windows(2).all(|w| w[0] != w[1]);
            assert!(alternating);
        }
        assert_eq!(
            nodal_domains(&Field::zeros(dom.clone()), 1e-8).unwrap_err(),
            Error::ZeroField
        );
    }

    #[test]
    fn zero_tagged_nodes_split_components() {
        let dom = Domain::interval(1.0, 5, Neumann, Neumann).unwrap();
        let f = Field::new(dom.clone(), vec![1.0, 2.0, 0.0, 3.0, 1.0]).unwrap();
        let part = nodal_domains(&f, 1e-8).unwrap();
        assert_eq!(part.count(), 2);
        assert_eq!(part.zero_nodes(), vec![2]);
        assert_eq!(part.labels(), &[Some(0), Some(0), None, Some(1), Some(1)]);
        assert_eq!(part.signs(), &[Sign::Positive, Sign::Positive]);
    }

    #[test]
    fn periodic_wrap_joins_ends() {
        let dom = Domain::circle(1.0, 8).unwrap();
        let f = Field::new(
            dom.clone(),
            vec![1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(nodal_domains(&f, 1e-8).unwrap().count(), 2);
    }

    #[test]
    fn checkerboard_is_not_merged() {
        let dom = Domain::rectangle([1.0, 1.0], [4, 4], [Dirichlet; 4]).unwrap();
        let f = Field::from_fn(dom.clone(), |[x, y]: [f64; 2]| {
            if ((x * 5.0).round() as i64 + (y * 5.0).round() as i64) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .unwrap();
        assert_eq!(nodal_domains(&f, 1e-8).unwrap().count(), 16);
    }

    #[test]
    fn courant_on_interval_is_tight() {
        let dom = Domain::interval(1.0, 400, Dirichlet, Dirichlet).unwrap();
        let d = decomp(&dom, 30);
        for row in courant_check(&d, 30).unwrap() {
            assert_eq!(row.count, row.k);
            assert!(row.ok);
        }
        assert!(courant_check(&d, 31).is_err());
    }

    #[test]
    fn courant_on_square() {
        let dom = Domain::rectangle([PI, PI], [30, 30], [Dirichlet; 4]).unwrap();
        let d = decomp(&dom, 40);
        let rows = courant_check(&d, 40).unwrap();
        assert!(rows.iter().all(|r| r.ok));
        assert_eq!(rows[0].count, 1);
        assert_eq!(rows[1].count, 2);
        assert_eq!(d.multiplicity_groups()[0].len(), 1);
    }

    #[test]
    fn first_mode_has_constant_sign() {
        for dom in [
            Domain::interval(1.0, 250, Dirichlet, Neumann).unwrap(),
            Domain::rectangle(
                [1.0, 2.0],
                [20, 12],
                [Dirichlet, Dirichlet, Neumann, Dirichlet],
            )
            .unwrap(),
        ] {
            let d = decomp(&dom, 1);
            let part = nodal_domains(&d.mode(0), DEFAULT_ZERO_TOL).unwrap();
            assert_eq!(part.count(), 1);
            assert!(part.zero_nodes().iter().all(|&i| !dom.is_interior(i)));
        }
    }

    #[test]
    fn tone_identity_on_interval() {
        let dom = Domain::interval(1.0, 599, Dirichlet, Dirichlet).unwrap();
        let d = decomp(&dom, 3);
        let one = nodal_tone_check(&d, 1).unwrap();
        assert_eq!(one.nodes, dom.len());
        assert_eq!(one.rel_err, 0.0);
        let two = nodal_tone_check(&d, 2).unwrap();
        assert!(two.rel_err < 1e-9, "{two:?}");
        assert_relative_eq!(two.tone, 4.0 * PI * PI, max_relative = 5e-3);
        let mid = nodal_tone_check_with(&d, 3, ToneSelector::Containing([0.5, 0.0])).unwrap();
        assert!(mid.rel_err < 1e-9, "{mid:?}");
        assert_relative_eq!(mid.tone, 9.0 * PI * PI, max_relative = 5e-3);
    }

    #[test]
    fn tone_error_shrinks_quadratically_when_nodes_align() {
        // With h = 1 / (n + 1) the nodal point of mode 2 is a grid node and the
        // tone reproduces lambda_2 up to round-off; against the continuum the
        // error halves twice per refinement.
        let err = |n: usize| {
            let dom = Domain::interval(1.0, n, Dirichlet, Dirichlet).unwrap();
            let d = decomp(&dom, 2);
            let t = nodal_tone_check(&d, 2).unwrap();
            assert!(t.rel_err < 1e-9);
            (t.tone - 4.0 * PI * PI).abs()
        };
        let ratio = err(99) / err(199);
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn tone_on_square_mode() {
        let dom = Domain::rectangle([PI, PI], [41, 41], [Dirichlet; 4]).unwrap();
        let d = decomp(&dom, 4);
        let t = nodal_tone_check(&d, 4).unwrap();
        assert!(t.rel_err < 1e-9, "{t:?}");
        let neu = Domain::rectangle([1.0, 1.0], [9, 9], [Neumann; 4]).unwrap();
        let dn = decomp(&neu, 3);
        assert!(matches!(
            nodal_tone_check(&dn, 2),
            Err(Error::InvalidBoundary { .. })
        ));
    }

    #[test]
    fn pleijel_reports() {
        let dom = Domain::interval(1.0, 200, Dirichlet, Dirichlet).unwrap();
        let d = decomp(&dom, 20);
        let r = pleijel_ratio(&d, 1..=20).unwrap();
        assert!(!r.hypothesis_holds);
        assert!(r.rows.iter().all(|row| row.2 == 1.0));
        assert!(pleijel_ratio(&d, 0..=3).is_err());
    }
}

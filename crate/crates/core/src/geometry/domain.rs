use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Periodic,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
            Self::Periodic => "periodic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Interval,
    Circle,
    Rectangle,
    MaskedGrid,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Interval => "interval",
            Self::Circle => "circle",
            Self::Rectangle => "rectangle",
            Self::MaskedGrid => "masked-grid",
        }
    }
}

/// One grid axis in vertex-centered layout.
///
/// Dirichlet ends are excluded from the node set, Neumann and periodic ends
/// are included, so the spacing is `L / (N - 1 + #dirichlet ends)` for a
/// bounded axis and `L / N` for a periodic one.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis<T> {
    origin: T,
    length: T,
    spacing: T,
    nodes: usize,
    lower: BoundaryCondition,
    upper: BoundaryCondition,
}

impl<T: Scalar> Axis<T> {
    pub fn new(
        origin: T,
        length: T,
        nodes: usize,
        lower: BoundaryCondition,
        upper: BoundaryCondition,
    ) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::Validation {
                field: "lengths",
                reason: format!("length must be positive and finite, got {length}"),
            });
        }
        if !origin.is_finite() {
            return Err(Error::Validation {
                field: "origin",
                reason: "origin must be finite".into(),
            });
        }
        if nodes < 3 {
            return Err(Error::Validation {
                field: "grid",
                reason: format!("need at least 3 nodes per axis, got {nodes}"),
            });
        }
        let periodic = [lower, upper]
            .iter()
            .filter(|&&b| b == BoundaryCondition::Periodic)
            .count();
        if periodic == 1 {
            return Err(Error::Validation {
                field: "bc",
                reason: "periodic must be set on both ends of an axis".into(),
            });
        }
        let cells = if periodic == 2 {
            nodes
        } else {
            nodes - 1 + Self::dirichlet_ends(lower, upper)
        };
        let spacing = length / T::from_usize_lossy(cells);
        Ok(Self {
            origin,
            length,
            spacing,
            nodes,
            lower,
            upper,
        })
    }

    fn dirichlet_ends(lower: BoundaryCondition, upper: BoundaryCondition) -> usize {
        usize::from(lower == BoundaryCondition::Dirichlet)
            + usize::from(upper == BoundaryCondition::Dirichlet)
    }

    /// Restrict to nodes `first..=last` keeping the spacing bit-identical.
    pub fn restrict(
        &self,
        first: usize,
        last: usize,
        lower: BoundaryCondition,
        upper: BoundaryCondition,
    ) -> Result<Self> {
        if last >= self.nodes || first > last {
            return Err(Error::InvalidArgument(format!(
                "node range {first}..={last} outside axis of {} nodes",
                self.nodes
            )));
        }
        let nodes = last - first + 1;
        if nodes < 3 {
            return Err(Error::TooSmall(format!(
                "sub-axis has {nodes} nodes, need at least 3"
            )));
        }
        if lower == BoundaryCondition::Periodic || upper == BoundaryCondition::Periodic {
            return Err(Error::InvalidBoundary {
                kind: "sub-axis",
                reason: "restricted axes cannot be periodic".into(),
            });
        }
        let offset = usize::from(lower == BoundaryCondition::Dirichlet);
        let h = self.spacing;
        let origin = self.position(first) - T::from_usize_lossy(offset) * h;
        let cells = nodes - 1 + Self::dirichlet_ends(lower, upper);
        Ok(Self {
            origin,
            length: h * T::from_usize_lossy(cells),
            spacing: h,
            nodes,
            lower,
            upper,
        })
    }

    pub fn origin(&self) -> T {
        self.origin
    }
    pub fn length(&self) -> T {
        self.length
    }
    pub fn spacing(&self) -> T {
        self.spacing
    }
    pub fn nodes(&self) -> usize {
        self.nodes
    }
    pub fn lower(&self) -> BoundaryCondition {
        self.lower
    }
    pub fn upper(&self) -> BoundaryCondition {
        self.upper
    }
    pub fn is_periodic(&self) -> bool {
        self.lower == BoundaryCondition::Periodic
    }

    /// Index of the first node in the extended layout (which also holds the
    /// excluded Dirichlet end positions).
    pub fn offset(&self) -> usize {
        usize::from(self.lower == BoundaryCondition::Dirichlet)
    }

    /// Number of positions including excluded Dirichlet ends.
    pub fn extended_len(&self) -> usize {
        if self.is_periodic() {
            self.nodes
        } else {
            self.nodes + Self::dirichlet_ends(self.lower, self.upper)
        }
    }

    pub fn extended_position(&self, j: usize) -> T {
        self.origin + T::from_usize_lossy(j) * self.spacing
    }

    pub fn position(&self, i: usize) -> T {
        self.extended_position(i + self.offset())
    }

    /// Trapezoid weight of node `i` (unit metric).
    pub fn weight(&self, i: usize) -> T {
        let h = self.spacing;
        let half = h / T::lit(2.0);
        let neumann_end = (i == 0 && self.lower == BoundaryCondition::Neumann)
            || (i + 1 == self.nodes && self.upper == BoundaryCondition::Neumann);
        if neumann_end {
            half
        } else {
            h
        }
    }

    /// Trapezoid weight of extended position `j`, covering the full segment.
    pub fn extended_weight(&self, j: usize) -> T {
        let h = self.spacing;
        if self.is_periodic() {
            return h;
        }
        if j == 0 || j + 1 == self.extended_len() {
            h / T::lit(2.0)
        } else {
            h
        }
    }

    /// Index of the node sitting at coordinate `x`, if any (tolerance 1e-9 h).
    pub fn node_at(&self, x: T) -> Option<usize> {
        let s = (x - self.origin) / self.spacing - T::from_usize_lossy(self.offset());
        let r = s.round();
        if (s - r).abs() > T::lit(1e-9) || r < T::zero() {
            return None;
        }
        let i = r.to_usize()?;
        (i < self.nodes).then_some(i)
    }
}

/// Closed-form metric tags accepted in domain-spec files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricTag {
    /// g = 1
    Flat,
    /// g = e^{2x}
    Exp2x,
    /// g = 1 + x^2
    OnePlusX2,
}

impl MetricTag {
    pub fn g<T: Scalar>(self, x: T) -> T {
        match self {
            Self::Flat => T::one(),
            Self::Exp2x => (x + x).exp(),
            Self::OnePlusX2 => T::one() + x * x,
        }
    }

    pub fn dg<T: Scalar>(self, x: T) -> T {
        match self {
            Self::Flat => T::zero(),
            Self::Exp2x => T::lit(2.0) * (x + x).exp(),
            Self::OnePlusX2 => x + x,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricSource<T> {
    Tag(MetricTag),
    /// Samples of g on the extended layout, optionally with analytic g'.
    Sampled {
        g: Vec<T>,
        dg: Option<Vec<T>>,
    },
}

/// The 1x1 metric tensor g_11 of a one-dimensional domain.
///
/// Samples live on the extended layout so that quadrature over the whole
/// segment and midpoint coefficients next to excluded Dirichlet ends are
/// available.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricWeight<T> {
    source: MetricSource<T>,
    g: Vec<T>,
    dg: Option<Vec<T>>,
    sqrt_g: Vec<T>,
}

impl<T: Scalar> MetricWeight<T> {
    pub fn new(source: MetricSource<T>, axis: &Axis<T>) -> Result<Self> {
        let n = axis.extended_len();
        let (g, dg) = match &source {
            MetricSource::Tag(tag) => {
                let xs: Vec<T> = (0..n).map(|j| axis.extended_position(j)).collect();
                (
                    xs.iter().map(|&x| tag.g(x)).collect::<Vec<_>>(),
                    Some(xs.iter().map(|&x| tag.dg(x)).collect::<Vec<_>>()),
                )
            }
            MetricSource::Sampled { g, dg } => {
                if g.len() != n {
                    return Err(Error::Validation {
                        field: "metric",
                        reason: format!("expected {n} samples (extended layout), got {}", g.len()),
                    });
                }
                if let Some(d) = dg {
                    if d.len() != n {
                        return Err(Error::Validation {
                            field: "metric",
                            reason: format!("expected {n} derivative samples, got {}", d.len()),
                        });
                    }
                }
                (g.clone(), dg.clone())
            }
        };
        if let Some(bad) = g.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(Error::Validation {
                field: "metric",
                reason: format!("g must be positive and finite, sample {bad} is {}", g[bad]),
            });
        }
        let sqrt_g = g.iter().map(|v| v.sqrt()).collect();
        Ok(Self {
            source,
            g,
            dg,
            sqrt_g,
        })
    }

    pub fn source(&self) -> &MetricSource<T> {
        &self.source
    }
    pub fn tag(&self) -> Option<MetricTag> {
        match self.source {
            MetricSource::Tag(t) => Some(t),
            MetricSource::Sampled { .. } => None,
        }
    }
    /// g on the extended layout.
    pub fn g(&self) -> &[T] {
        &self.g
    }
    pub fn dg(&self) -> Option<&[T]> {
        self.dg.as_deref()
    }
    pub fn sqrt_g(&self) -> &[T] {
        &self.sqrt_g
    }

    /// Coefficient g^{-1} sqrt(g) = g^{-1/2} at the midpoint between extended
    /// positions `j` and `j + 1`.
    pub(crate) fn flux_coefficient(&self, axis: &Axis<T>, j: usize) -> T {
        match self.source {
            MetricSource::Tag(tag) => {
                let x = axis.extended_position(j) + axis.spacing() / T::lit(2.0);
                tag.g(x).sqrt().recip()
            }
            MetricSource::Sampled { .. } => {
                let n = self.g.len();
                let a = self.sqrt_g[j % n].recip();
                let b = self.sqrt_g[(j + 1) % n].recip();
                (a + b) / T::lit(2.0)
            }
        }
    }

    fn restrict(&self, parent: &Axis<T>, child: &Axis<T>, ext_start: usize) -> Result<Self> {
        match &self.source {
            MetricSource::Tag(tag) => Self::new(MetricSource::Tag(*tag), child),
            MetricSource::Sampled { .. } => {
                let n = child.extended_len();
                if ext_start + n > parent.extended_len() {
                    return Err(Error::InvalidArgument(
                        "sub-domain extends beyond sampled metric".into(),
                    ));
                }
                let g = self.g[ext_start..ext_start + n].to_vec();
                let dg = self
                    .dg
                    .as_ref()
                    .map(|d| d[ext_start..ext_start + n].to_vec());
                Self::new(MetricSource::Sampled { g, dg }, child)
            }
        }
    }
}

/// Neighbor of an active node along one axis direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighbor {
    /// Another active node.
    Node(usize),
    /// An eliminated node carrying a homogeneous Dirichlet value.
    Ghost,
    /// Beyond an included (Neumann) boundary; no node exists.
    Outside,
}

/// Geometry, grid and boundary data of a discretized domain. Owns the
/// discrete measure (quadrature weights including sqrt(g)).
#[derive(Clone, Debug, PartialEq)]
pub struct Domain<T> {
    kind: DomainKind,
    axes: Vec<Axis<T>>,
    metric: Option<MetricWeight<T>>,
    mask: Option<Vec<bool>>,
    active: Vec<usize>,
    lookup: Vec<Option<usize>>,
    weights: Vec<T>,
}

impl<T: Scalar> Domain<T> {
    fn from_parts(
        kind: DomainKind,
        axes: Vec<Axis<T>>,
        metric: Option<MetricWeight<T>>,
        mask: Option<Vec<bool>>,
    ) -> Result<Arc<Self>> {
        let total: usize = axes.iter().map(Axis::nodes).product();
        let mut lookup = vec![None; total];
        let mut active = Vec::with_capacity(total);
        for (g, slot) in lookup.iter_mut().enumerate() {
            if mask.as_ref().is_none_or(|m| m[g]) {
                *slot = Some(active.len());
                active.push(g);
            }
        }
        if active.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut dom = Self {
            kind,
            axes,
            metric,
            mask,
            active,
            lookup,
            weights: Vec::new(),
        };
        if dom.mask.is_some() && !dom.is_connected() {
            return Err(Error::Validation {
                field: "mask",
                reason: "active region must be 4-connected".into(),
            });
        }
        dom.weights = (0..dom.len()).map(|i| dom.node_weight(i)).collect();
        Ok(Arc::new(dom))
    }

    pub fn interval(
        length: T,
        nodes: usize,
        lower: BoundaryCondition,
        upper: BoundaryCondition,
    ) -> Result<Arc<Self>> {
        Self::interval_with_metric(T::zero(), length, nodes, lower, upper, None)
    }

    pub fn interval_with_metric(
        origin: T,
        length: T,
        nodes: usize,
        lower: BoundaryCondition,
        upper: BoundaryCondition,
        metric: Option<MetricSource<T>>,
    ) -> Result<Arc<Self>> {
        if lower == BoundaryCondition::Periodic || upper == BoundaryCondition::Periodic {
            return Err(Error::InvalidBoundary {
                kind: "interval",
                reason: "use a circle for periodic data".into(),
            });
        }
        let axis = Axis::new(origin, length, nodes, lower, upper)?;
        let metric = metric.map(|m| MetricWeight::new(m, &axis)).transpose()?;
        Self::from_parts(DomainKind::Interval, vec![axis], metric, None)
    }

    pub fn circle(length: T, nodes: usize) -> Result<Arc<Self>> {
        let p = BoundaryCondition::Periodic;
        let axis = Axis::new(T::zero(), length, nodes, p, p)?;
        Self::from_parts(DomainKind::Circle, vec![axis], None, None)
    }

    /// Rectangle with boundary data `[left, right, bottom, top]`.
    pub fn rectangle(
        lengths: [T; 2],
        nodes: [usize; 2],
        bc: [BoundaryCondition; 4],
    ) -> Result<Arc<Self>> {
        Self::rectangle_at([T::zero(), T::zero()], lengths, nodes, bc)
    }

    pub fn rectangle_at(
        origin: [T; 2],
        lengths: [T; 2],
        nodes: [usize; 2],
        bc: [BoundaryCondition; 4],
    ) -> Result<Arc<Self>> {
        let ax = Axis::new(origin[0], lengths[0], nodes[0], bc[0], bc[1])?;
        let ay = Axis::new(origin[1], lengths[1], nodes[1], bc[2], bc[3])?;
        Self::from_parts(DomainKind::Rectangle, vec![ax, ay], None, None)
    }

    /// Flat 2D grid whose active nodes are given by `mask[iy][ix]`; every
    /// inactive or out-of-grid neighbor is a homogeneous Dirichlet node.
    pub fn masked_grid(origin: [T; 2], lengths: [T; 2], mask: &[Vec<bool>]) -> Result<Arc<Self>> {
        let ny = mask.len();
        let nx = mask.first().map_or(0, Vec::len);
        if mask.iter().any(|row| row.len() != nx) {
            return Err(Error::Validation {
                field: "mask",
                reason: "rows must have equal length".into(),
            });
        }
        let d = BoundaryCondition::Dirichlet;
        let ax = Axis::new(origin[0], lengths[0], nx, d, d)?;
        let ay = Axis::new(origin[1], lengths[1], ny, d, d)?;
        let flat: Vec<bool> = mask.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_parts(DomainKind::MaskedGrid, vec![ax, ay], None, Some(flat))
    }

    /// Flat one-dimensional domain over a single axis.
    pub(crate) fn single_axis(axis: Axis<T>) -> Result<Arc<Self>> {
        let kind = if axis.is_periodic() {
            DomainKind::Circle
        } else {
            DomainKind::Interval
        };
        Self::from_parts(kind, vec![axis], None, None)
    }

    pub(crate) fn masked_from_axes(ax: Axis<T>, ay: Axis<T>, mask: Vec<bool>) -> Result<Arc<Self>> {
        Self::from_parts(DomainKind::MaskedGrid, vec![ax, ay], None, Some(mask))
    }

    /// Sub-interval over nodes `first..=last` on the same grid.
    pub fn sub_interval(
        &self,
        first: usize,
        last: usize,
        lower: BoundaryCondition,
        upper: BoundaryCondition,
    ) -> Result<Arc<Self>> {
        if self.dim() != 1 {
            return Err(Error::InvalidArgument(
                "sub_interval needs a 1D domain".into(),
            ));
        }
        let parent = &self.axes[0];
        let axis = parent.restrict(first, last, lower, upper)?;
        let ext_start = (first + parent.offset()) - axis.offset();
        let metric = self
            .metric
            .as_ref()
            .map(|m| m.restrict(parent, &axis, ext_start))
            .transpose()?;
        Self::from_parts(DomainKind::Interval, vec![axis], metric, None)
    }

    /// Sub-rectangle over node ranges on the same grid, bc `[left, right, bottom, top]`.
    pub fn sub_rectangle(
        &self,
        x: (usize, usize),
        y: (usize, usize),
        bc: [BoundaryCondition; 4],
    ) -> Result<Arc<Self>> {
        if self.kind != DomainKind::Rectangle {
            return Err(Error::InvalidArgument(
                "sub_rectangle needs a rectangle".into(),
            ));
        }
        let ax = self.axes[0].restrict(x.0, x.1, bc[0], bc[1])?;
        let ay = self.axes[1].restrict(y.0, y.1, bc[2], bc[3])?;
        Self::from_parts(DomainKind::Rectangle, vec![ax, ay], None, None)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }
    pub fn dim(&self) -> usize {
        self.axes.len()
    }
    pub fn axes(&self) -> &[Axis<T>] {
        &self.axes
    }
    pub fn axis(&self, a: usize) -> &Axis<T> {
        &self.axes[a]
    }
    pub fn metric(&self) -> Option<&MetricWeight<T>> {
        self.metric.as_ref()
    }
    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }
    /// Number of active nodes (the discrete dimension).
    pub fn len(&self) -> usize {
        self.active.len()
    }
    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }
    /// Quadrature weights w_i of the discrete measure, sqrt(g) included.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Grid multi-index `[ix, iy]` of active node `i` (iy = 0 in 1D).
    pub fn grid_coords(&self, i: usize) -> [usize; 2] {
        let g = self.active[i];
        let nx = self.axes[0].nodes();
        [g % nx, g / nx]
    }

    pub fn active_at(&self, ix: usize, iy: usize) -> Option<usize> {
        let nx = self.axes[0].nodes();
        if ix >= nx
            || (self.dim() == 1 && iy > 0)
            || (self.dim() == 2 && iy >= self.axes[1].nodes())
        {
            return None;
        }
        self.lookup[iy * nx + ix]
    }

    pub fn coord(&self, i: usize, axis: usize) -> T {
        let c = self.grid_coords(i);
        self.axes[axis].position(c[axis])
    }

    /// Node coordinates `[x, y]`; y is zero in 1D.
    pub fn point(&self, i: usize) -> [T; 2] {
        let x = self.coord(i, 0);
        let y = if self.dim() == 2 {
            self.coord(i, 1)
        } else {
            T::zero()
        };
        [x, y]
    }

    /// g at active node `i` (1 on flat domains).
    pub fn g(&self, i: usize) -> T {
        match &self.metric {
            Some(m) => m.g()[i + self.axes[0].offset()],
            None => T::one(),
        }
    }

    pub fn sqrt_g(&self, i: usize) -> T {
        match &self.metric {
            Some(m) => m.sqrt_g()[i + self.axes[0].offset()],
            None => T::one(),
        }
    }

    pub fn neighbor(&self, i: usize, axis: usize, forward: bool) -> Neighbor {
        let mut c = self.grid_coords(i);
        let ax = &self.axes[axis];
        let n = ax.nodes();
        let k = c[axis];
        let next = if forward {
            if k + 1 < n {
                Some(k + 1)
            } else {
                None
            }
        } else {
            k.checked_sub(1)
        };
        let k2 = match next {
            Some(k2) => k2,
            None => {
                let bc = if forward { ax.upper() } else { ax.lower() };
                match bc {
                    BoundaryCondition::Dirichlet => return Neighbor::Ghost,
                    BoundaryCondition::Neumann => return Neighbor::Outside,
                    BoundaryCondition::Periodic => {
                        if forward {
                            0
                        } else {
                            n - 1
                        }
                    }
                }
            }
        };
        c[axis] = k2;
        match self.active_at(c[0], c[1]) {
            Some(j) => Neighbor::Node(j),
            None => Neighbor::Ghost,
        }
    }

    /// True when both neighbors along every axis are active nodes.
    pub fn is_interior(&self, i: usize) -> bool {
        (0..self.dim()).all(|a| {
            matches!(self.neighbor(i, a, true), Neighbor::Node(_))
                && matches!(self.neighbor(i, a, false), Neighbor::Node(_))
        })
    }

    /// Nodes at least `depth` grid steps away from every boundary position,
    /// included or excluded.
    pub fn deep_interior(&self, depth: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                (0..self.dim()).all(|a| {
                    let mut cur = i;
                    for _ in 0..depth {
                        match self.neighbor(cur, a, true) {
                            Neighbor::Node(j) => cur = j,
                            _ => return false,
                        }
                    }
                    cur = i;
                    for _ in 0..depth {
                        match self.neighbor(cur, a, false) {
                            Neighbor::Node(j) => cur = j,
                            _ => return false,
                        }
                    }
                    true
                })
            })
            .collect()
    }

    fn node_weight(&self, i: usize) -> T {
        let c = self.grid_coords(i);
        let w: T = self
            .axes
            .iter()
            .enumerate()
            .map(|(a, ax)| {
                if self.mask.is_some() {
                    ax.spacing()
                } else {
                    ax.weight(c[a])
                }
            })
            .fold(T::one(), |acc, w| acc * w);
        w * self.sqrt_g(i)
    }

    /// Integral of sqrt(g) over the domain: trapezoid over the full segment
    /// in 1D, product trapezoid on rectangles, cell sum on masked grids.
    pub fn volume(&self) -> T {
        match self.kind {
            DomainKind::MaskedGrid => {
                let cell = self.axes[0].spacing() * self.axes[1].spacing();
                cell * T::from_usize_lossy(self.len())
            }
            DomainKind::Rectangle => self
                .axes
                .iter()
                .map(Axis::length)
                .fold(T::one(), |a, b| a * b),
            DomainKind::Circle => self.axes[0].length(),
            DomainKind::Interval => {
                let ax = &self.axes[0];
                match &self.metric {
                    None => ax.length(),
                    Some(m) => (0..ax.extended_len())
                        .map(|j| ax.extended_weight(j) * m.sqrt_g()[j])
                        .sum(),
                }
            }
        }
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for a in 0..self.dim() {
                for fwd in [false, true] {
                    if let Neighbor::Node(j) = self.neighbor(i, a, fwd) {
                        if !seen[j] {
                            seen[j] = true;
                            count += 1;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        count == self.len()
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

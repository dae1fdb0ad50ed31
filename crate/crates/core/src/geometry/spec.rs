//! Structured domain descriptions, as read from domain-spec files.
//!
//! ```json
//! { "kind": "interval", "lengths": [1.0], "grid": [2000],
//!   "bc": ["dirichlet", "neumann"], "metric": "exp2x" }
//! ```
//!
//! `bc` is either one condition for every boundary segment or a list:
//! `[lower, upper]` for an interval, `[left, right, bottom, top]` for a
//! rectangle. `metric` is a tag (`flat`, `exp2x`, `one_plus_x2`) or an array
//! of g samples on the extended layout. `mask` is a 0/1 matrix indexed
//! `mask[iy][ix]`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::{BoundaryCondition, Domain, DomainKind, MetricSource, MetricTag};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BcSpec {
    Uniform(BoundaryCondition),
    PerSegment(Vec<BoundaryCondition>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Tag(MetricTag),
    Samples(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub lengths: Vec<f64>,
    pub grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<f64>>,
}

fn expect_len<V: Clone>(field: &'static str, v: &[V], n: usize) -> Result<Vec<V>> {
    match v.len() {
        1 if n > 1 => Ok(vec![v[0].clone(); n]),
        m if m == n => Ok(v.to_vec()),
        m => Err(Error::Validation {
            field,
            reason: format!("expected {n} entries, got {m}"),
        }),
    }
}

impl DomainSpec {
    fn segments(&self, n: usize) -> Result<Vec<BoundaryCondition>> {
        match &self.bc {
            None => Err(Error::Validation {
                field: "bc",
                reason: "missing boundary conditions".into(),
            }),
            Some(BcSpec::Uniform(b)) => Ok(vec![*b; n]),
            Some(BcSpec::PerSegment(v)) => expect_len("bc", v, n),
        }
    }

    fn origin_or_zero(&self, n: usize) -> Result<Vec<f64>> {
        match &self.origin {
            None => Ok(vec![0.0; n]),
            Some(o) => expect_len("origin", o, n),
        }
    }
}

/// Validates `spec` and builds the corresponding domain.
pub fn build_domain<T: Scalar>(spec: &DomainSpec) -> Result<Arc<Domain<T>>> {
    if spec.metric.is_some() && spec.kind != DomainKind::Interval {
        return Err(Error::Validation {
            field: "metric",
            reason: format!(
                "metric is only allowed on an interval, not a {}",
                spec.kind.name()
            ),
        });
    }
    if spec.mask.is_some() && spec.kind != DomainKind::MaskedGrid {
        return Err(Error::Validation {
            field: "mask",
            reason: "mask is only allowed on a masked-grid".into(),
        });
    }
    if spec.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::Validation {
            field: "lengths",
            reason: "lengths must be positive".into(),
        });
    }
    match spec.kind {
        DomainKind::Interval => {
            let l = expect_len("lengths", &spec.lengths, 1)?[0];
            let n = expect_len("grid", &spec.grid, 1)?[0];
            let bc = spec.segments(2)?;
            let origin = spec.origin_or_zero(1)?[0];
            let metric = spec.metric.as_ref().map(|m| match m {
                MetricSpec::Tag(t) => MetricSource::Tag(*t),
                MetricSpec::Samples(s) => MetricSource::Sampled {
                    g: s.iter().map(|&v| T::lit(v)).collect(),
                    dg: None,
                },
            });
            Domain::interval_with_metric(T::lit(origin), T::lit(l), n, bc[0], bc[1], metric)
        }
        DomainKind::Circle => {
            let l = expect_len("lengths", &spec.lengths, 1)?[0];
            let n = expect_len("grid", &spec.grid, 1)?[0];
            match &spec.bc {
                None | Some(BcSpec::Uniform(BoundaryCondition::Periodic)) => {}
                Some(BcSpec::PerSegment(v))
                    if v.iter().all(|b| *b == BoundaryCondition::Periodic) => {}
                Some(_) => {
                    return Err(Error::Validation {
                        field: "bc",
                        reason: "a circle is always periodic".into(),
                    })
                }
            }
            Domain::circle(T::lit(l), n)
        }
        DomainKind::Rectangle => {
            let l = expect_len("lengths", &spec.lengths, 2)?;
            let n = expect_len("grid", &spec.grid, 2)?;
            let bc = spec.segments(4)?;
            let o = spec.origin_or_zero(2)?;
            Domain::rectangle_at(
                [T::lit(o[0]), T::lit(o[1])],
                [T::lit(l[0]), T::lit(l[1])],
                [n[0], n[1]],
                [bc[0], bc[1], bc[2], bc[3]],
            )
        }
        DomainKind::MaskedGrid => {
            let l = expect_len("lengths", &spec.lengths, 2)?;
            if let Some(bc) = &spec.bc {
                let ok = match bc {
                    BcSpec::Uniform(b) => *b == BoundaryCondition::Dirichlet,
                    BcSpec::PerSegment(v) => v.iter().all(|b| *b == BoundaryCondition::Dirichlet),
                };
                if !ok {
                    return Err(Error::InvalidBoundary {
                        kind: "masked-grid",
                        reason: "masked grids carry Dirichlet data outside the mask".into(),
                    });
                }
            }
            let mask = spec.mask.as_ref().ok_or(Error::Validation {
                field: "mask",
                reason: "masked-grid needs a mask".into(),
            })?;
            let rows: Vec<Vec<bool>> = mask
                .iter()
                .map(|r| r.iter().map(|&v| v != 0).collect())
                .collect();
            if !spec.grid.is_empty() {
                let n = expect_len("grid", &spec.grid, 2)?;
                let (ny, nx) = (rows.len(), rows.first().map_or(0, Vec::len));
                if n != [nx, ny] {
                    return Err(Error::Validation {
                        field: "grid",
                        reason: format!("grid {n:?} does not match mask shape [{nx}, {ny}]"),
                    });
                }
            }
            if !rows.iter().flatten().any(|&b| b) {
                return Err(Error::EmptyDomain);
            }
            let o = spec.origin_or_zero(2)?;
            Domain::masked_grid(
                [T::lit(o[0]), T::lit(o[1])],
                [T::lit(l[0]), T::lit(l[1])],
                &rows,
            )
        }
    }
}

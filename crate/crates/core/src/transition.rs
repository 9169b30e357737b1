//! Zone transition probabilities estimated from historical routes.
//!
//! Each historical route contributes its zone ordering (first-visit rule) as a
//! 0/1 adjacency matrix, weighted by the route's quality label. Row
//! normalisation of the weighted sum gives a row-stochastic matrix, which is
//! then mixed with a small uniform floor so that `-ln p` stays finite for
//! transitions never observed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{first_visit_order, Quality, RoutingInstance, ZoneIndex};
use crate::tsp::CostMatrix;
use crate::{Error, Matrix, Result};

/// Default probability floor.
pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Per-label multipliers applied to a route's transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityWeights {
    pub high: f64,
    pub medium: f64,
    pub low: f64,
}

impl QualityWeights {
    pub const UNIFORM: QualityWeights = QualityWeights {
        high: 1.0,
        medium: 1.0,
        low: 1.0,
    };

    pub fn new(high: f64, medium: f64, low: f64) -> Result<Self> {
        let w = QualityWeights { high, medium, low };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.high, self.medium, self.low];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("quality weights must be finite and nonnegative"));
        }
        if all.iter().all(|v| *v == 0.0) {
            return Err(Error::invalid("at least one quality weight must be positive"));
        }
        Ok(())
    }

    pub fn weight(&self, q: Quality) -> f64 {
        match q {
            Quality::High => self.high,
            Quality::Medium => self.medium,
            Quality::Low => self.low,
        }
    }

    fn is_uniform(&self) -> bool {
        self.high == self.medium && self.medium == self.low
    }

    pub fn scaled(&self, by: f64) -> Self {
        QualityWeights {
            high: self.high * by,
            medium: self.medium * by,
            low: self.low * by,
        }
    }
}

impl Default for QualityWeights {
    fn default() -> Self {
        Self::UNIFORM
    }
}

/// Row-stochastic zone-to-zone matrix with every entry at least `floor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransitionRecord", into = "TransitionRecord")]
pub struct TransitionMatrix {
    zone_index: ZoneIndex,
    p: Matrix,
    floor: f64,
}

#[derive(Serialize, Deserialize)]
struct TransitionRecord {
    zones: Vec<String>,
    p: Matrix,
    #[serde(default = "default_floor")]
    floor: f64,
}

fn default_floor() -> f64 {
    DEFAULT_FLOOR
}

impl TryFrom<TransitionRecord> for TransitionMatrix {
    type Error = Error;

    fn try_from(r: TransitionRecord) -> Result<Self> {
        let zone_index = ZoneIndex::new(r.zones)?;
        TransitionMatrix::from_parts(zone_index, r.p, r.floor)
    }
}

impl From<TransitionMatrix> for TransitionRecord {
    fn from(t: TransitionMatrix) -> Self {
        TransitionRecord {
            zones: t.zone_index.zones().to_vec(),
            p: t.p,
            floor: t.floor,
        }
    }
}

impl TransitionMatrix {
    /// Validate an externally supplied matrix.
    pub fn from_parts(zone_index: ZoneIndex, p: Matrix, floor: f64) -> Result<Self> {
        if p.n() != zone_index.len() {
            return Err(Error::DimensionMismatch {
                expected: zone_index.len(),
                got: p.n(),
            });
        }
        if !(floor > 0.0) {
            return Err(Error::invalid("probability floor must be positive"));
        }
        for (i, row) in p.rows().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(v >= floor) || v > 1.0 {
                    return Err(Error::BelowFloor { row: i, col: j, value: v, floor });
                }
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("row {i} sums to {s}")));
            }
        }
        Ok(TransitionMatrix { zone_index, p, floor })
    }

    pub fn zone_index(&self) -> &ZoneIndex {
        &self.zone_index
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Probability of moving from zone `from` to zone `to`. Zones the matrix
    /// has never seen get the uniform probability `1 / (m - 1)`.
    pub fn prob_between(&self, from: &str, to: &str) -> f64 {
        match (self.zone_index.index(from), self.zone_index.index(to)) {
            (Some(i), Some(j)) => self.p.get(i, j),
            _ => self.unseen_prob(),
        }
    }

    fn unseen_prob(&self) -> f64 {
        let m = self.zone_index.len();
        (1.0 / (m.max(2) - 1) as f64).max(self.floor)
    }

    /// Probabilities among the zones of `local`, in `local`'s index order.
    /// Rows are not renormalised.
    pub fn slice(&self, local: &ZoneIndex) -> Matrix {
        let idx: Vec<Option<usize>> = local.zones().iter().map(|z| self.zone_index.index(z)).collect();
        let fallback = self.unseen_prob();
        Matrix::from_fn(local.len(), |i, j| match (idx[i], idx[j]) {
            (Some(a), Some(b)) => self.p.get(a, b),
            _ => fallback,
        })
    }
}

/// Zone-level sequence of a historical route as dense indices of `zi`.
fn zone_walk(inst: &RoutingInstance, zi: &ZoneIndex) -> Result<Vec<usize>> {
    let seq = inst.require_actual()?;
    let stops = inst.stops();
    let labels = seq
        .iter()
        .map(|&i| zi.require(&stops[i].zone_id))
        .collect::<Result<Vec<_>>>()?;
    Ok(first_visit_order(labels))
}

/// Weighted transition counts; the closing arc back to the station counts.
pub fn count_transitions(histories: &[RoutingInstance], w: &QualityWeights, zi: &ZoneIndex) -> Result<Matrix> {
    count_transitions_with(histories, w, zi, true)
}

/// Weighted transition counts, with the return-to-station arc optional.
pub fn count_transitions_with(
    histories: &[RoutingInstance],
    w: &QualityWeights,
    zi: &ZoneIndex,
    include_closing_arc: bool,
) -> Result<Matrix> {
    w.validate()?;
    let mut freq = Matrix::zeros(zi.len());
    for inst in histories {
        let v = match inst.quality() {
            Some(q) => w.weight(q),
            None if w.is_uniform() => w.high,
            None => return Err(inst.require_quality().unwrap_err()),
        };
        let walk = zone_walk(inst, zi)?;
        if walk.len() < 2 {
            continue;
        }
        let arcs = walk.len() - if include_closing_arc { 0 } else { 1 };
        for k in 0..arcs {
            let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
            freq[(a, b)] += v;
        }
    }
    for i in 0..zi.len() {
        freq.set(i, i, 0.0);
    }
    Ok(freq)
}

/// Row-normalise counts into probabilities.
///
/// Rows without any observation become uniform over the other `m - 1` zones.
/// Every row `q` is then mixed as `floor + (1 - m * floor) * q`, which keeps
/// rows stochastic and puts every entry at or above `floor`.
pub fn normalize_rows(zi: &ZoneIndex, freq: &Matrix, floor: f64) -> Result<TransitionMatrix> {
    let m = freq.n();
    if m != zi.len() {
        return Err(Error::DimensionMismatch { expected: zi.len(), got: m });
    }
    if m < 2 {
        return Err(Error::invalid("need at least two zones to normalise transitions"));
    }
    if !(floor > 0.0) || floor * m as f64 >= 1.0 {
        return Err(Error::invalid(format!("floor {floor} is not in (0, 1/{m})")));
    }
    let keep = 1.0 - m as f64 * floor;
    let mut p = Matrix::zeros(m);
    for i in 0..m {
        let row = freq.row(i);
        if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!("frequency {v} in row {i} is not a nonnegative count")));
        }
        let sum: f64 = row.iter().sum();
        let out = p.row_mut(i);
        for j in 0..m {
            let q = if sum > 0.0 {
                row[j] / sum
            } else if i == j {
                0.0
            } else {
                1.0 / (m - 1) as f64
            };
            out[j] = floor + keep * q;
        }
    }
    Ok(TransitionMatrix {
        zone_index: zi.clone(),
        p,
        floor,
    })
}

/// Count and normalise in one go.
pub fn estimate(
    histories: &[RoutingInstance],
    w: &QualityWeights,
    zi: &ZoneIndex,
    include_closing_arc: bool,
    floor: f64,
) -> Result<TransitionMatrix> {
    let freq = count_transitions_with(histories, w, zi, include_closing_arc)?;
    normalize_rows(zi, &freq, floor)
}

/// `c[i][j] = -ln p[i][j]`.
pub fn neg_log(p: &TransitionMatrix) -> Result<CostMatrix> {
    neg_log_matrix(&p.p, p.floor)
}

pub(crate) fn neg_log_matrix(p: &Matrix, floor: f64) -> Result<CostMatrix> {
    let m = p.n();
    let mut c = Matrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            let v = p.get(i, j);
            if !(v >= floor) {
                return Err(Error::BelowFloor { row: i, col: j, value: v, floor });
            }
            c.set(i, j, -libm::log(v));
        }
    }
    CostMatrix::new(c)
}

//! Route similarity: `score = SD * ERP_norm / ERP_edits`, lower is better.
//!
//! Sequences are node indices into a distance matrix and start at the depot
//! (node 0). SD walks the predicted sequence through the actual sequence's
//! ranks; ERP aligns the non-depot parts with the depot as the gap element.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{Quality, Tour};
use crate::zone_stage::{build_geometry, ZoneOrdering};
use crate::{Error, Matrix, Result, RoutingInstance, ZoneIndex};

/// Score components for one pair of sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceScore {
    pub sd: f64,
    pub erp_norm: f64,
    pub erp_edits: usize,
    pub score: f64,
}

fn check_pair(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("sequences differ in length: {} vs {}", a.len(), b.len())));
    }
    if a.first() != Some(&0) || b.first() != Some(&0) {
        return Err(Error::invalid("sequences must start at the depot"));
    }
    let n = a.iter().chain(b).copied().max().unwrap_or(0) + 1;
    let mut seen_a = vec![false; n];
    let mut seen_b = vec![false; n];
    for (&x, &y) in a.iter().zip(b) {
        if seen_a[x] || seen_b[y] {
            return Err(Error::invalid("sequence repeats a node"));
        }
        seen_a[x] = true;
        seen_b[y] = true;
    }
    if seen_a != seen_b {
        return Err(Error::invalid("sequences are not permutations of each other"));
    }
    Ok(())
}

/// Sequence deviation of `b` with respect to `a`.
///
/// Non-depot stops are ranked `1..=c` by their position in `a` and the depot
/// has rank 0. Walking `b` from the depot, every step that is not to an
/// adjacent rank adds `|Δrank| - 1`; the sum is scaled by `2 / (c (c - 1))`.
/// Fewer than two stops give 0.
pub fn sequence_deviation(a: &[usize], b: &[usize]) -> Result<f64> {
    check_pair(a, b)?;
    let c = a.len().saturating_sub(1);
    if c < 2 {
        return Ok(0.0);
    }
    let n = a.iter().copied().max().unwrap_or(0) + 1;
    let mut rank = vec![0usize; n];
    for (r, &x) in a.iter().enumerate() {
        rank[x] = r;
    }
    let total: usize = b
        .windows(2)
        .map(|p| rank[p[0]].abs_diff(rank[p[1]]) - 1)
        .sum();
    Ok(2.0 * total as f64 / (c * (c - 1)) as f64)
}

/// Edit distance with real penalty between the non-depot parts of `a` and
/// `b`. `dist` should already be normalised. Substituting `x` by `y` costs
/// `dist[x][y]`, deleting `x` costs `dist[x][0]`, inserting `y` costs
/// `dist[0][y]`. Returns the optimal cost and the number of operations on the
/// optimal path that are not matches of equal nodes; ties in cost go to fewer
/// edits.
pub fn erp(a: &[usize], b: &[usize], dist: &Matrix) -> Result<(f64, usize)> {
    check_pair(a, b)?;
    if let Some(&x) = a.iter().find(|&&x| x >= dist.n()) {
        return Err(Error::invalid(format!("node {x} is outside the distance matrix")));
    }
    let (a, b) = (&a[1..], &b[1..]);
    let (la, lb) = (a.len(), b.len());
    let w = lb + 1;
    let mut dp = vec![(0.0f64, 0usize); (la + 1) * w];
    for i in 1..=la {
        let (c, e) = dp[(i - 1) * w];
        dp[i * w] = (c + dist.get(a[i - 1], 0), e + 1);
    }
    for j in 1..=lb {
        let (c, e) = dp[j - 1];
        dp[j] = (c + dist.get(0, b[j - 1]), e + 1);
    }
    let better = |x: (f64, usize), y: (f64, usize)| x.0 < y.0 || (x.0 == y.0 && x.1 < y.1);
    for i in 1..=la {
        for j in 1..=lb {
            let (x, y) = (a[i - 1], b[j - 1]);
            let (c, e) = dp[(i - 1) * w + j - 1];
            let mut best = (c + dist.get(x, y), e + usize::from(x != y));
            let (c, e) = dp[(i - 1) * w + j];
            let del = (c + dist.get(x, 0), e + 1);
            if better(del, best) {
                best = del;
            }
            let (c, e) = dp[i * w + j - 1];
            let ins = (c + dist.get(0, y), e + 1);
            if better(ins, best) {
                best = ins;
            }
            dp[i * w + j] = best;
        }
    }
    Ok(dp[la * w + lb])
}

/// `dist` divided by its largest entry; an all-zero matrix is returned as is.
pub fn normalize_by_max(dist: &Matrix) -> Matrix {
    let max = dist.max_entry();
    if max > 0.0 && max.is_finite() {
        dist.map(|v| v / max)
    } else {
        dist.clone()
    }
}

/// SD and ERP of `predicted` against `actual` under the max-normalised `dist`.
pub fn score_sequences(actual: &[usize], predicted: &[usize], dist: &Matrix) -> Result<SequenceScore> {
    let sd = sequence_deviation(actual, predicted)?;
    let (erp_norm, erp_edits) = erp(actual, predicted, &normalize_by_max(dist))?;
    let score = if erp_edits == 0 { 0.0 } else { sd * erp_norm / erp_edits as f64 };
    Ok(SequenceScore {
        sd,
        erp_norm,
        erp_edits,
        score,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub route_id: String,
    pub quality: Option<Quality>,
    pub sd: f64,
    pub erp_norm: f64,
    pub erp_edits: usize,
    pub score: f64,
}

impl ScoreRow {
    fn new(inst: &RoutingInstance, s: SequenceScore) -> Self {
        ScoreRow {
            route_id: inst.route_id().into(),
            quality: inst.quality(),
            sd: s.sd,
            erp_norm: s.erp_norm,
            erp_edits: s.erp_edits,
            score: s.score,
        }
    }
}

/// Stop-level score of a predicted tour against the historical route.
pub fn score(inst: &RoutingInstance, predicted: &Tour) -> Result<ScoreRow> {
    let actual = inst.require_actual()?;
    let s = score_sequences(actual, predicted.order(), inst.travel_times())?;
    Ok(ScoreRow::new(inst, s))
}

/// Zone-level score: the predicted zone ordering against the first-visit zone
/// order of the historical route, with centroid distances as element costs.
pub fn zone_score(inst: &RoutingInstance, predicted: &ZoneOrdering) -> Result<ScoreRow> {
    let zi = ZoneIndex::of_instance(inst);
    let geometry = build_geometry(inst, &zi)?;
    let actual = ZoneOrdering::of_actual_route(inst)?;
    let to_local = |o: &ZoneOrdering| -> Result<Vec<usize>> {
        let ids = o.zone_ids();
        if ids.len() != zi.len() {
            return Err(Error::DimensionMismatch { expected: zi.len(), got: ids.len() });
        }
        ids.iter().map(|z| zi.require(z)).collect()
    };
    let s = score_sequences(&to_local(&actual)?, &to_local(predicted)?, &geometry.d)?;
    Ok(ScoreRow::new(inst, s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortMean {
    /// `None` is the whole report.
    pub quality: Option<Quality>,
    pub routes: usize,
    pub mean_score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub rows: Vec<ScoreRow>,
}

impl ScoreReport {
    pub fn new(rows: Vec<ScoreRow>) -> Self {
        ScoreReport { rows }
    }

    pub fn mean_score(&self) -> Option<f64> {
        mean(self.rows.iter().map(|r| r.score))
    }

    /// Overall mean followed by one entry per label present.
    pub fn cohorts(&self) -> Vec<CohortMean> {
        let mut out = Vec::new();
        if let Some(m) = self.mean_score() {
            out.push(CohortMean {
                quality: None,
                routes: self.rows.len(),
                mean_score: m,
            });
        }
        for q in Quality::ALL {
            let scores = self.rows.iter().filter(|r| r.quality == Some(q)).map(|r| r.score);
            let routes = scores.clone().count();
            if let Some(m) = mean(scores) {
                out.push(CohortMean {
                    quality: Some(q),
                    routes,
                    mean_score: m,
                });
            }
        }
        out
    }

    /// Counts of scores in `bins` equal-width bins over `[0, upper]`; larger
    /// scores land in the last bin.
    pub fn histogram(&self, bins: usize, upper: f64) -> Result<Vec<usize>> {
        if bins == 0 || !(upper > 0.0 && upper.is_finite()) {
            return Err(Error::invalid("histogram needs at least one bin and a positive upper bound"));
        }
        let mut counts = vec![0; bins];
        for r in &self.rows {
            let k = ((r.score / upper) * bins as f64) as usize;
            counts[k.min(bins - 1)] += 1;
        }
        Ok(counts)
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

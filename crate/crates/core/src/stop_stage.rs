//! Stage two: order the stops, given a zone ordering.
//!
//! Every stop inherits the rank `O_i` of its zone. An arc `i -> j` falls in
//! exactly one [`PenaltyCategory`] depending on `O_j - O_i`, and the stop TSP
//! pays `w_0 * t[i][j]` plus the weight of that category.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Quality, Tour, WeightVector};
use crate::sop::StructuredExample;
use crate::tsp::{CostMatrix, TourSolver};
use crate::zone_stage::ZoneOrdering;
use crate::{Error, Matrix, Result, RoutingInstance};

/// Length of the stop-stage weight and feature vectors.
pub const STOP_DIM: usize = 7;

/// Zone rank of every stop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderIndex(Vec<usize>);

impl OrderIndex {
    pub fn new(inst: &RoutingInstance, ordering: &ZoneOrdering) -> Result<Self> {
        let o = inst
            .stops()
            .iter()
            .map(|s| ordering.rank_of(&s.zone_id).ok_or_else(|| Error::UnknownZone(s.zone_id.clone())))
            .collect::<Result<Vec<_>>>()?;
        if o[0] != 0 {
            return Err(Error::invalid(format!(
                "route `{}`: zone ordering does not start at the station",
                inst.route_id()
            )));
        }
        Ok(OrderIndex(o))
    }

    pub fn from_ranks(o: Vec<usize>) -> Result<Self> {
        if o.first() != Some(&0) {
            return Err(Error::invalid("order index must start with rank 0"));
        }
        Ok(OrderIndex(o))
    }

    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Kind of zone-order step an arc takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PenaltyCategory {
    Same,
    Next,
    Next2,
    Prev,
    Prev2,
    /// Three or more zones ahead or behind.
    Far,
}

impl PenaltyCategory {
    pub const ALL: [PenaltyCategory; 6] = [
        PenaltyCategory::Same,
        PenaltyCategory::Next,
        PenaltyCategory::Next2,
        PenaltyCategory::Prev,
        PenaltyCategory::Prev2,
        PenaltyCategory::Far,
    ];

    /// Position of this category's weight in the stop weight vector (1..=6).
    pub fn slot(self) -> usize {
        match self {
            PenaltyCategory::Same => 1,
            PenaltyCategory::Next => 2,
            PenaltyCategory::Next2 => 3,
            PenaltyCategory::Prev => 4,
            PenaltyCategory::Prev2 => 5,
            PenaltyCategory::Far => 6,
        }
    }
}

pub fn classify(oi: usize, oj: usize) -> PenaltyCategory {
    match oj as i64 - oi as i64 {
        0 => PenaltyCategory::Same,
        1 => PenaltyCategory::Next,
        2 => PenaltyCategory::Next2,
        -1 => PenaltyCategory::Prev,
        -2 => PenaltyCategory::Prev2,
        _ => PenaltyCategory::Far,
    }
}

/// Columns of the violation report; `Far` is split by direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReportCategory {
    Same,
    Next,
    Next2,
    Next3Plus,
    Prev,
    Prev2,
    Prev3Plus,
}

impl ReportCategory {
    pub const ALL: [ReportCategory; 7] = [
        ReportCategory::Same,
        ReportCategory::Next,
        ReportCategory::Next2,
        ReportCategory::Next3Plus,
        ReportCategory::Prev,
        ReportCategory::Prev2,
        ReportCategory::Prev3Plus,
    ];

    pub fn classify(oi: usize, oj: usize) -> Self {
        match oj as i64 - oi as i64 {
            0 => ReportCategory::Same,
            1 => ReportCategory::Next,
            2 => ReportCategory::Next2,
            d if d >= 3 => ReportCategory::Next3Plus,
            -1 => ReportCategory::Prev,
            -2 => ReportCategory::Prev2,
            _ => ReportCategory::Prev3Plus,
        }
    }

    pub fn column(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ReportCategory::Same => "same",
            ReportCategory::Next => "next",
            ReportCategory::Next2 => "next2",
            ReportCategory::Next3Plus => "next3plus",
            ReportCategory::Prev => "prev",
            ReportCategory::Prev2 => "prev2",
            ReportCategory::Prev3Plus => "prev3plus",
        }
    }
}

/// Inputs of the stop-level TSP: travel times and zone ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct StopProblem {
    pub travel_times: Matrix,
    pub order: OrderIndex,
}

impl StopProblem {
    pub fn new(inst: &RoutingInstance, order: OrderIndex) -> Result<Self> {
        if order.len() != inst.n() {
            return Err(Error::DimensionMismatch { expected: inst.n(), got: order.len() });
        }
        Ok(StopProblem {
            travel_times: inst.travel_times().clone(),
            order,
        })
    }

    pub fn n(&self) -> usize {
        self.travel_times.n()
    }

    pub fn category(&self, i: usize, j: usize) -> PenaltyCategory {
        let o = self.order.ranks();
        classify(o[i], o[j])
    }

    pub fn cost(&self, w: &WeightVector) -> Result<CostMatrix> {
        w.expect_len(STOP_DIM)?;
        let w = w.values();
        let n = self.n();
        CostMatrix::new(Matrix::from_fn(n, |i, j| {
            if i == j {
                0.0
            } else {
                w[0] * self.travel_times.get(i, j) + w[self.category(i, j).slot()]
            }
        }))
    }

    /// `[travel time, same, next, next2, prev, prev2, far]` summed over arcs.
    pub fn features(&self, t: &Tour) -> Result<Vec<f64>> {
        if t.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: t.len() });
        }
        let mut phi = vec![0.0; STOP_DIM];
        if t.len() < 2 {
            return Ok(phi);
        }
        for (i, j) in t.arcs() {
            phi[0] += self.travel_times.get(i, j);
            phi[self.category(i, j).slot()] += 1.0;
        }
        Ok(phi)
    }
}

/// Travel time plus zone-order penalties.
pub fn penalty_cost(inst: &RoutingInstance, o: &OrderIndex, w: &WeightVector) -> Result<CostMatrix> {
    StopProblem::new(inst, o.clone())?.cost(w)
}

pub fn stop_feature_vector(inst: &RoutingInstance, o: &OrderIndex, t: &Tour) -> Result<Vec<f64>> {
    StopProblem::new(inst, o.clone())?.features(t)
}

/// Stop tour minimising [`penalty_cost`].
pub fn order_stops(
    inst: &RoutingInstance,
    o: &OrderIndex,
    w: &WeightVector,
    oracle: &dyn TourSolver,
) -> Result<Tour> {
    if inst.n() == 1 {
        return Tour::new(vec![0], 0.0);
    }
    oracle.solve(&penalty_cost(inst, o, w)?)
}

/// Training pair for the stop-stage perceptron. Ranks come from the zone
/// ordering of the historical route itself.
#[derive(Debug, Clone)]
pub struct StopExample {
    pub id: String,
    pub problem: StopProblem,
    pub target: Tour,
}

impl StopExample {
    pub fn from_instance(inst: &RoutingInstance) -> Result<Self> {
        let ordering = ZoneOrdering::of_actual_route(inst)?;
        let order = OrderIndex::new(inst, &ordering)?;
        Ok(StopExample {
            id: inst.route_id().into(),
            problem: StopProblem::new(inst, order)?,
            target: inst.actual_tour()?,
        })
    }
}

impl StructuredExample for StopExample {
    fn id(&self) -> &str {
        &self.id
    }

    fn features(&self, t: &Tour) -> Result<Vec<f64>> {
        self.problem.features(t)
    }

    fn cost_matrix(&self, w: &WeightVector) -> Result<CostMatrix> {
        self.problem.cost(w)
    }

    fn target(&self) -> &Tour {
        &self.target
    }
}

/// Mean share (in percent) of each report category among a label's routes.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationRow {
    pub quality: Quality,
    pub routes: usize,
    pub percent: [f64; 7],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub rows: Vec<ViolationRow>,
}

/// Per-route category counts of the historical route, ranked against its own
/// zone ordering. Index by [`ReportCategory::column`]; the total is the
/// number of arcs.
pub fn route_violation_counts(inst: &RoutingInstance) -> Result<([usize; 7], usize)> {
    let ordering = ZoneOrdering::of_actual_route(inst)?;
    let o = OrderIndex::new(inst, &ordering)?;
    let t = inst.actual_tour()?;
    let mut counts = [0usize; 7];
    let mut arcs = 0;
    for (i, j) in t.arcs() {
        counts[ReportCategory::classify(o.ranks()[i], o.ranks()[j]).column()] += 1;
        arcs += 1;
    }
    Ok((counts, arcs))
}

/// Share of zone-order transitions of each kind, averaged per quality label.
/// Labels without routes are left out.
pub fn violation_report(histories: &[RoutingInstance]) -> Result<ViolationReport> {
    if histories.is_empty() {
        return Err(Error::invalid("no routes"));
    }
    let mut sums = [[0.0f64; 7]; 3];
    let mut routes = [0usize; 3];
    for inst in histories {
        let q = inst.require_quality()?;
        let (counts, arcs) = route_violation_counts(inst)?;
        let slot = q as usize;
        routes[slot] += 1;
        for c in 0..7 {
            sums[slot][c] += counts[c] as f64 / arcs as f64 * 100.0;
        }
    }
    let rows = Quality::ALL
        .iter()
        .filter(|q| routes[**q as usize] > 0)
        .map(|&q| {
            let k = q as usize;
            let mut percent = [0.0; 7];
            for c in 0..7 {
                percent[c] = sums[k][c] / routes[k] as f64;
            }
            ViolationRow {
                quality: q,
                routes: routes[k],
                percent,
            }
        })
        .collect();
    Ok(ViolationReport { rows })
}

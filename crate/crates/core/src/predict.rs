//! Two-stage route prediction: order the zones, then the stops.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{Tour, WeightVector};
use crate::stop_stage::{order_stops, OrderIndex};
use crate::transition::TransitionMatrix;
use crate::tsp::{CostMatrix, TourSolver};
use crate::zone_stage::{build_geometry, order_zones, order_zones_by_distance, ZoneOrdering};
use crate::{Error, Result, RoutingInstance, ZoneIndex};

/// How the zone stage builds its cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneMethod {
    /// Raw centroid distances; needs no history.
    Distance,
    /// `w_d * -ln d' + w_p * -ln p` with an estimated transition matrix.
    Mixed(WeightVector),
}

impl ZoneMethod {
    pub fn markov() -> Self {
        ZoneMethod::Mixed(WeightVector::new(alloc::vec![0.0, 1.0]).expect("finite"))
    }

    pub fn markov_distance() -> Self {
        ZoneMethod::Mixed(WeightVector::zone_default())
    }
}

pub fn predict_zones(
    inst: &RoutingInstance,
    method: &ZoneMethod,
    transitions: Option<&TransitionMatrix>,
    oracle: &dyn TourSolver,
) -> Result<ZoneOrdering> {
    let g = build_geometry(inst, &ZoneIndex::of_instance(inst))?;
    match method {
        ZoneMethod::Distance => order_zones_by_distance(&g, oracle),
        ZoneMethod::Mixed(w) => {
            let p = transitions.ok_or_else(|| Error::invalid("zone method needs a transition matrix"))?;
            order_zones(&g, p, w, oracle)
        }
    }
}

/// Stop order consistent with `zones` under the stop weights.
pub fn predict_stops(
    inst: &RoutingInstance,
    zones: &ZoneOrdering,
    stop_weights: &WeightVector,
    oracle: &dyn TourSolver,
) -> Result<Tour> {
    let o = OrderIndex::new(inst, zones)?;
    order_stops(inst, &o, stop_weights, oracle)
}

/// Plain travel-time TSP, ignoring zones.
pub fn predict_travel_time_only(inst: &RoutingInstance, oracle: &dyn TourSolver) -> Result<Tour> {
    if inst.n() == 1 {
        return Tour::new(alloc::vec![0], 0.0);
    }
    oracle.solve(&CostMatrix::new(inst.travel_times().clone())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub route_id: String,
    pub zones: ZoneOrdering,
    pub tour: Tour,
}

impl Prediction {
    /// Stop ids in visiting order.
    pub fn stop_ids<'a>(&self, inst: &'a RoutingInstance) -> Vec<&'a str> {
        self.tour.order().iter().map(|&i| inst.stops()[i].id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStagePredictor {
    pub zone_method: ZoneMethod,
    pub transitions: Option<TransitionMatrix>,
    pub stop_weights: WeightVector,
}

impl TwoStagePredictor {
    pub fn new(zone_method: ZoneMethod, transitions: Option<TransitionMatrix>, stop_weights: WeightVector) -> Result<Self> {
        stop_weights.expect_len(crate::stop_stage::STOP_DIM)?;
        match &zone_method {
            ZoneMethod::Mixed(w) => {
                w.expect_len(2)?;
                if transitions.is_none() {
                    return Err(Error::invalid("zone method needs a transition matrix"));
                }
            }
            ZoneMethod::Distance => {}
        }
        Ok(TwoStagePredictor {
            zone_method,
            transitions,
            stop_weights,
        })
    }

    pub fn predict(&self, inst: &RoutingInstance, oracle: &dyn TourSolver) -> Result<Prediction> {
        let zones = predict_zones(inst, &self.zone_method, self.transitions.as_ref(), oracle)?;
        let tour = predict_stops(inst, &zones, &self.stop_weights, oracle)?;
        Ok(Prediction {
            route_id: inst.route_id().into(),
            zones,
            tour,
        })
    }
}

//! Stage one: order the zones of an instance.
//!
//! Zone centroids are plain means of member-stop coordinates (the area of a
//! route is small enough to treat the earth as flat). Inverting the centroid
//! distances and normalising each row gives a distance-based probability
//! `d'`. The zone TSP cost mixes it with the estimated transition
//! probabilities:
//!
//! ```text
//! c[i][j] = -w_d ln d'[i][j] - w_p ln p[i][j]
//! ```
//!
//! Features are kept in the same nonnegative `-ln` form, so a tour's cost is
//! exactly `w . phi(tour)` and inference is an argmin.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Tour, WeightVector, ZoneIndex};
use crate::sop::StructuredExample;
use crate::transition::TransitionMatrix;
use crate::tsp::{CostMatrix, TourSolver};
use crate::{Error, Matrix, Result, RoutingInstance};

/// Centroids closer than this (in degrees) are treated as this far apart.
pub const MIN_ZONE_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneGeometry {
    pub zone_index: ZoneIndex,
    /// `(lng, lat)` per zone, degrees.
    pub centroids: Vec<(f64, f64)>,
    /// Euclidean centroid distances in degrees.
    pub d: Matrix,
    /// Row-normalised inverse distances; zero diagonal.
    pub d_prime: Matrix,
}

/// Centroids, distances and inverted-distance probabilities for the zones of
/// `zi`. `zi` must start with the instance's station pseudo-zone and every
/// zone in it must hold at least one stop of `inst`.
pub fn build_geometry(inst: &RoutingInstance, zi: &ZoneIndex) -> Result<ZoneGeometry> {
    if zi.is_empty() || zi.zone(0) != inst.station_zone() {
        return Err(Error::invalid(format!(
            "route `{}`: zone index must start with `{}`",
            inst.route_id(),
            inst.station_zone()
        )));
    }
    let m = zi.len();
    let mut sums = vec![(0.0, 0.0, 0usize); m];
    for s in inst.stops() {
        let z = zi.require(&s.zone_id)?;
        sums[z].0 += s.lng;
        sums[z].1 += s.lat;
        sums[z].2 += 1;
    }
    let mut centroids = Vec::with_capacity(m);
    for (z, &(lng, lat, count)) in sums.iter().enumerate() {
        if count == 0 {
            return Err(Error::invalid(format!(
                "route `{}`: zone `{}` has no stops",
                inst.route_id(),
                zi.zone(z)
            )));
        }
        centroids.push((lng / count as f64, lat / count as f64));
    }

    let d = Matrix::from_fn(m, |i, j| {
        if i == j {
            0.0
        } else {
            let (a, b) = (centroids[i], centroids[j]);
            libm::hypot(a.0 - b.0, a.1 - b.1).max(MIN_ZONE_DISTANCE)
        }
    });
    let mut d_prime = Matrix::zeros(m);
    for i in 0..m {
        let total: f64 = (0..m).filter(|&k| k != i).map(|k| 1.0 / d.get(i, k)).sum();
        for j in 0..m {
            if j != i {
                d_prime.set(i, j, (1.0 / d.get(i, j)) / total);
            }
        }
    }
    Ok(ZoneGeometry {
        zone_index: zi.clone(),
        centroids,
        d,
        d_prime,
    })
}

/// The two `-ln` cost components of the zone TSP, diagonals zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneProblem {
    pub dist_cost: Matrix,
    pub pref_cost: Matrix,
}

impl ZoneProblem {
    /// `p_local` must be indexed like `g.zone_index`.
    pub fn new(g: &ZoneGeometry, p_local: &Matrix) -> Result<Self> {
        let m = g.zone_index.len();
        if p_local.n() != m {
            return Err(Error::DimensionMismatch { expected: m, got: p_local.n() });
        }
        let neg_ln = |src: &Matrix| -> Result<Matrix> {
            let mut out = Matrix::zeros(m);
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let v = src.get(i, j);
                    if !(v > 0.0) {
                        return Err(Error::invalid(format!("probability {v} at ({i}, {j}) has no finite log")));
                    }
                    out.set(i, j, -libm::log(v));
                }
            }
            Ok(out)
        };
        Ok(ZoneProblem {
            dist_cost: neg_ln(&g.d_prime)?,
            pref_cost: neg_ln(p_local)?,
        })
    }

    pub fn from_transitions(g: &ZoneGeometry, p: &TransitionMatrix) -> Result<Self> {
        ZoneProblem::new(g, &p.slice(&g.zone_index))
    }

    pub fn m(&self) -> usize {
        self.dist_cost.n()
    }

    /// `w_d * dist_cost + w_p * pref_cost`.
    pub fn cost(&self, w: &WeightVector) -> Result<CostMatrix> {
        w.expect_len(2)?;
        let (wd, wp) = (w.values()[0], w.values()[1]);
        let m = self.m();
        CostMatrix::new(Matrix::from_fn(m, |i, j| {
            wd * self.dist_cost.get(i, j) + wp * self.pref_cost.get(i, j)
        }))
    }

    /// `[sum of -ln d', sum of -ln p]` over the arcs of `t`.
    pub fn features(&self, t: &Tour) -> Result<Vec<f64>> {
        if t.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: t.len() });
        }
        let mut phi = vec![0.0; 2];
        for (i, j) in t.arcs() {
            phi[0] += self.dist_cost.get(i, j);
            phi[1] += self.pref_cost.get(i, j);
        }
        Ok(phi)
    }
}

/// Mixed zone cost for the zones of `g`.
pub fn mixed_zone_cost(g: &ZoneGeometry, p: &TransitionMatrix, w: &WeightVector) -> Result<CostMatrix> {
    ZoneProblem::from_transitions(g, p)?.cost(w)
}

/// Feature vector of a zone tour.
pub fn zone_feature_vector(u: &ZoneProblem, t: &Tour) -> Result<Vec<f64>> {
    u.features(t)
}

/// A strict order over the zones of one instance, station first.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneOrdering {
    zones: ZoneIndex,
    sequence: Vec<usize>,
    rank: Vec<usize>,
}

impl ZoneOrdering {
    /// `sequence` holds indices of `zones`; it must be a permutation starting at 0.
    pub fn new(zones: ZoneIndex, sequence: Vec<usize>) -> Result<Self> {
        let tour = Tour::from_order(sequence)?;
        if tour.len() != zones.len() {
            return Err(Error::DimensionMismatch { expected: zones.len(), got: tour.len() });
        }
        Ok(Self::from_tour(zones, &tour))
    }

    fn from_tour(zones: ZoneIndex, t: &Tour) -> Self {
        let sequence = t.order().to_vec();
        let mut rank = vec![0; sequence.len()];
        for (k, &z) in sequence.iter().enumerate() {
            rank[z] = k;
        }
        ZoneOrdering { zones, sequence, rank }
    }

    /// Ordering given as zone ids, e.g. the zones of a historical route.
    pub fn from_ids<S: AsRef<str>>(zones: ZoneIndex, ids: &[S]) -> Result<Self> {
        let seq = ids.iter().map(|z| zones.require(z.as_ref())).collect::<Result<Vec<_>>>()?;
        ZoneOrdering::new(zones, seq)
    }

    /// Ordering the historical route of `inst` follows (first-visit rule).
    pub fn of_actual_route(inst: &RoutingInstance) -> Result<Self> {
        let ids = crate::model::zone_sequence_of(inst)?;
        ZoneOrdering::from_ids(ZoneIndex::of_instance(inst), &ids)
    }

    pub fn zones(&self) -> &ZoneIndex {
        &self.zones
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    /// `rank()[z]` is the position of zone `z` in the sequence.
    pub fn rank(&self) -> &[usize] {
        &self.rank
    }

    pub fn rank_of(&self, zone: &str) -> Option<usize> {
        self.zones.index(zone).map(|z| self.rank[z])
    }

    pub fn zone_ids(&self) -> Vec<String> {
        self.sequence.iter().map(|&z| self.zones.zone(z).into()).collect()
    }

    pub fn as_tour(&self) -> Tour {
        Tour::new_unchecked(self.sequence.clone(), 0.0)
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

fn order_with(zones: &ZoneIndex, c: &CostMatrix, oracle: &dyn TourSolver) -> Result<ZoneOrdering> {
    if zones.len() == 1 {
        return ZoneOrdering::new(zones.clone(), vec![0]);
    }
    let t = oracle.solve(c)?;
    Ok(ZoneOrdering::from_tour(zones.clone(), &t))
}

/// Zone ordering minimising the mixed cost.
pub fn order_zones(
    g: &ZoneGeometry,
    p: &TransitionMatrix,
    w: &WeightVector,
    oracle: &dyn TourSolver,
) -> Result<ZoneOrdering> {
    order_zones_for(g, &ZoneProblem::from_transitions(g, p)?, w, oracle)
}

/// [`order_zones`] with the cost components already built.
pub fn order_zones_for(
    g: &ZoneGeometry,
    u: &ZoneProblem,
    w: &WeightVector,
    oracle: &dyn TourSolver,
) -> Result<ZoneOrdering> {
    order_with(&g.zone_index, &u.cost(w)?, oracle)
}

/// Zone ordering minimising total centroid distance; uses no history.
pub fn order_zones_by_distance(g: &ZoneGeometry, oracle: &dyn TourSolver) -> Result<ZoneOrdering> {
    order_with(&g.zone_index, &CostMatrix::new(g.d.clone())?, oracle)
}

/// Training pair for the zone-stage perceptron.
#[derive(Debug, Clone)]
pub struct ZoneExample {
    pub id: String,
    pub problem: ZoneProblem,
    pub target: Tour,
}

impl ZoneExample {
    /// Inputs from the instance geometry and `p`, target from the
    /// historical route.
    pub fn from_instance(inst: &RoutingInstance, p: &TransitionMatrix) -> Result<Self> {
        let truth = ZoneOrdering::of_actual_route(inst)?;
        let g = build_geometry(inst, truth.zones())?;
        Ok(ZoneExample {
            id: inst.route_id().into(),
            problem: ZoneProblem::from_transitions(&g, p)?,
            target: truth.as_tour(),
        })
    }
}

impl StructuredExample for ZoneExample {
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

//! Domain types shared by every stage: stops, routing instances, zone
//! indices, tours and weight vectors.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result};

/// Prefix of the pseudo-zone that holds a station.
pub const STATION_ZONE_PREFIX: &str = "station:";

/// Zone id of the pseudo-zone a station belongs to.
pub fn station_zone_id(station_id: &str) -> String {
    format!("{STATION_ZONE_PREFIX}{station_id}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub id: String,
    pub lat: f64,
    pub lng: f64,
    pub zone_id: String,
}

/// Planner-assigned route rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quality {
    High,
    Medium,
    Low,
}

impl Quality {
    pub const ALL: [Quality; 3] = [Quality::High, Quality::Medium, Quality::Low];

    pub fn as_str(self) -> &'static str {
        match self {
            Quality::High => "high",
            Quality::Medium => "medium",
            Quality::Low => "low",
        }
    }
}

impl core::str::FromStr for Quality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high" => Ok(Quality::High),
            "medium" => Ok(Quality::Medium),
            "low" => Ok(Quality::Low),
            other => Err(Error::invalid(format!("unknown quality label `{other}`"))),
        }
    }
}

/// One delivery day: a station (stop 0), the stops to visit, the travel-time
/// matrix and, for historical routes, the sequence that was actually driven.
///
/// Stop 0 always belongs to the station pseudo-zone `station:<station_id>`,
/// whatever zone the caller passed for it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingInstance {
    route_id: String,
    station_id: String,
    stops: Vec<Stop>,
    travel_times: Matrix,
    actual_sequence: Option<Vec<usize>>,
    quality: Option<Quality>,
}

impl RoutingInstance {
    pub fn new(
        route_id: impl Into<String>,
        station_id: impl Into<String>,
        mut stops: Vec<Stop>,
        travel_times: Matrix,
        actual_sequence: Option<Vec<usize>>,
        quality: Option<Quality>,
    ) -> Result<Self> {
        let route_id = route_id.into();
        let station_id = station_id.into();
        let ctx = |msg: String| Error::invalid(format!("route `{route_id}`: {msg}"));

        if route_id.is_empty() {
            return Err(Error::invalid("route_id is empty"));
        }
        if stops.is_empty() {
            return Err(ctx("no stops (stop 0 must be the station)".into()));
        }
        let n = stops.len();
        stops[0].zone_id = station_zone_id(&station_id);

        let mut seen = BTreeSet::new();
        for (i, s) in stops.iter().enumerate() {
            if s.id.is_empty() {
                return Err(ctx(format!("stop {i} has an empty id")));
            }
            if !seen.insert(s.id.as_str()) {
                return Err(ctx(format!("duplicate stop id `{}`", s.id)));
            }
            if s.zone_id.is_empty() {
                return Err(ctx(format!("stop `{}` has an empty zone_id", s.id)));
            }
            if !s.lat.is_finite() || !s.lng.is_finite() {
                return Err(ctx(format!("stop `{}` has non-finite coordinates", s.id)));
            }
        }

        if travel_times.n() != n {
            return Err(ctx(format!(
                "travel_times is {0}x{0} but there are {n} stops",
                travel_times.n()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let t = travel_times.get(i, j);
                if !t.is_finite() || t < 0.0 {
                    return Err(ctx(format!("travel_times[{i}][{j}] = {t} is not a finite nonnegative time")));
                }
                if i == j && t != 0.0 {
                    return Err(ctx(format!("travel_times[{i}][{i}] = {t}, diagonal must be 0")));
                }
            }
        }

        if let Some(seq) = &actual_sequence {
            check_permutation(seq, n).map_err(|e| ctx(format!("actual_sequence: {e}")))?;
        }

        Ok(RoutingInstance {
            route_id,
            station_id,
            stops,
            travel_times,
            actual_sequence,
            quality,
        })
    }

    pub fn route_id(&self) -> &str {
        &self.route_id
    }

    pub fn station_id(&self) -> &str {
        &self.station_id
    }

    pub fn station_zone(&self) -> &str {
        &self.stops[0].zone_id
    }

    pub fn n(&self) -> usize {
        self.stops.len()
    }

    pub fn stops(&self) -> &[Stop] {
        &self.stops
    }

    pub fn travel_times(&self) -> &Matrix {
        &self.travel_times
    }

    pub fn actual_sequence(&self) -> Option<&[usize]> {
        self.actual_sequence.as_deref()
    }

    pub fn quality(&self) -> Option<Quality> {
        self.quality
    }

    /// Replace the historical route and label.
    pub fn with_actual(mut self, sequence: Vec<usize>, quality: Option<Quality>) -> Result<Self> {
        check_permutation(&sequence, self.n())?;
        self.actual_sequence = Some(sequence);
        self.quality = quality;
        Ok(self)
    }

    pub fn actual_tour(&self) -> Result<Tour> {
        let seq = self.require_actual()?;
        Tour::from_order(seq.to_vec())
    }

    pub(crate) fn require_actual(&self) -> Result<&[usize]> {
        self.actual_sequence()
            .ok_or_else(|| Error::MissingLabel(format!("route `{}` has no actual_sequence", self.route_id)))
    }

    pub(crate) fn require_quality(&self) -> Result<Quality> {
        self.quality
            .ok_or_else(|| Error::MissingLabel(format!("route `{}` has no quality label", self.route_id)))
    }
}

fn check_permutation(seq: &[usize], n: usize) -> Result<()> {
    if seq.len() != n {
        return Err(Error::invalid(format!("length {} does not match {n} nodes", seq.len())));
    }
    if seq.first() != Some(&0) {
        return Err(Error::invalid("must start at node 0"));
    }
    let mut seen = vec![false; n];
    for &v in seq {
        if v >= n || seen[v] {
            return Err(Error::invalid(format!("is not a permutation of 0..{n} (at {v})")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Bijection between zone ids and dense indices `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZoneIndex {
    zones: Vec<String>,
    index_of: BTreeMap<String, usize>,
}

impl ZoneIndex {
    pub fn new(zones: Vec<String>) -> Result<Self> {
        let mut index_of = BTreeMap::new();
        for (i, z) in zones.iter().enumerate() {
            if index_of.insert(z.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate zone id `{z}`")));
            }
        }
        Ok(ZoneIndex { zones, index_of })
    }

    /// Zones of a whole corpus: station pseudo-zones first, then every other
    /// zone, each group sorted by id. With a single station its pseudo-zone
    /// is index 0.
    pub fn for_instances<'a>(instances: impl IntoIterator<Item = &'a RoutingInstance>) -> Self {
        let mut stations = BTreeSet::new();
        let mut zones = BTreeSet::new();
        for inst in instances {
            stations.insert(inst.station_zone().into());
            for s in &inst.stops()[1..] {
                zones.insert(s.zone_id.clone());
            }
        }
        let ordered = stations
            .into_iter()
            .chain(zones.into_iter().filter(|z: &String| !z.starts_with(STATION_ZONE_PREFIX)))
            .collect();
        ZoneIndex::new(ordered).expect("sets are duplicate free")
    }

    /// Zones of a single instance: its station pseudo-zone at index 0, then the
    /// remaining zones sorted by id.
    pub fn of_instance(inst: &RoutingInstance) -> Self {
        let station = inst.station_zone();
        let rest: BTreeSet<&str> = inst.stops()[1..]
            .iter()
            .map(|s| s.zone_id.as_str())
            .filter(|z| *z != station)
            .collect();
        let mut zones = vec![String::from(station)];
        zones.extend(rest.into_iter().map(String::from));
        ZoneIndex::new(zones).expect("sets are duplicate free")
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn zones(&self) -> &[String] {
        &self.zones
    }

    pub fn zone(&self, idx: usize) -> &str {
        &self.zones[idx]
    }

    pub fn index(&self, zone: &str) -> Option<usize> {
        self.index_of.get(zone).copied()
    }

    pub fn require(&self, zone: &str) -> Result<usize> {
        self.index(zone).ok_or_else(|| Error::UnknownZone(zone.into()))
    }

    /// Dense zone index of every stop of `inst`.
    pub fn stop_zones(&self, inst: &RoutingInstance) -> Result<Vec<usize>> {
        inst.stops().iter().map(|s| self.require(&s.zone_id)).collect()
    }
}

/// A depot-rooted circuit: `order` is a permutation of `0..n` with `order[0] == 0`.
/// The closing arc runs from the last node back to the depot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    order: Vec<usize>,
    cost: f64,
}

impl Tour {
    pub fn new(order: Vec<usize>, cost: f64) -> Result<Self> {
        let n = order.len();
        check_permutation(&order, n)?;
        Ok(Tour { order, cost })
    }

    /// A tour whose cost is not known yet; `cost` is left at zero.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        Tour::new(order, 0.0)
    }

    pub(crate) fn new_unchecked(order: Vec<usize>, cost: f64) -> Self {
        debug_assert!(check_permutation(&order, order.len()).is_ok());
        Tour { order, cost }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Directed arcs in visiting order, closing arc last. A one-node tour
    /// yields the self-loop `(0, 0)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }

    /// `succ[i]` is the node visited right after `i`.
    pub fn successors(&self) -> Vec<usize> {
        let mut succ = vec![0; self.order.len()];
        for (i, j) in self.arcs() {
            succ[i] = j;
        }
        succ
    }

    /// Same directed arc set.
    pub fn same_circuit(&self, other: &Tour) -> bool {
        self.len() == other.len() && self.successors() == other.successors()
    }
}

/// Adjacency form of a tour: `a[i][j] = 1` iff `j` directly follows `i`.
pub fn tour_to_adjacency(t: &Tour, n: usize) -> Result<Matrix> {
    if t.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: t.len() });
    }
    let mut a = Matrix::zeros(n);
    for (i, j) in t.arcs() {
        a.set(i, j, 1.0);
    }
    Ok(a)
}

/// Collapse a sequence of labels to first-visit order: every label appears
/// once, at the position where it was first seen.
pub fn first_visit_order<T: Ord + Clone>(labels: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for l in labels {
        if seen.insert(l.clone()) {
            out.push(l);
        }
    }
    out
}

/// Zone ordering followed by the historical route of `inst`.
pub fn zone_sequence_of(inst: &RoutingInstance) -> Result<Vec<String>> {
    let seq = inst.require_actual()?;
    let stops = inst.stops();
    Ok(first_visit_order(seq.iter().map(|&i| stops[i].zone_id.clone())))
}

/// Linear coefficients of a stage's cost function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// `[w_d, w_p]` start point of the zone stage.
    pub const ZONE_DEFAULT: [f64; 2] = [1.0, 1.0];
    /// `[w_0, .., w_6]` start point of the stop stage.
    pub const STOP_DEFAULT: [f64; 7] = [2.0, 1.0, 2.0, 4.0, 2.0, 4.0, 6.0];

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("weight {v} is not finite")));
        }
        Ok(WeightVector(values))
    }

    pub fn zone_default() -> Self {
        WeightVector(Self::ZONE_DEFAULT.to_vec())
    }

    pub fn stop_default() -> Self {
        WeightVector(Self::STOP_DEFAULT.to_vec())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn expect_len(&self, len: usize) -> Result<()> {
        if self.0.len() == len {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: len, got: self.0.len() })
        }
    }

    pub fn dot(&self, features: &[f64]) -> f64 {
        self.0.iter().zip(features).map(|(w, f)| w * f).sum()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        WeightVector::new(values)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn stop(id: &str, lat: f64, lng: f64, zone: &str) -> Stop {
        Stop {
            id: id.into(),
            lat,
            lng,
            zone_id: zone.into(),
        }
    }

    /// Instance whose stop `k` sits in `zones[k]` (zones[0] is ignored) and
    /// whose actual route is `0, 1, .., n-1`.
    pub(crate) fn line_instance(zones: &[&str]) -> RoutingInstance {
        let stops = zones
            .iter()
            .enumerate()
            .map(|(k, z)| stop(&format!("s{k}"), 0.0, k as f64, z))
            .collect::<Vec<_>>();
        let n = stops.len();
        let tt = Matrix::from_fn(n, |i, j| (i as f64 - j as f64).abs());
        RoutingInstance::new("r", "D", stops, tt, Some((0..n).collect()), Some(Quality::High)).unwrap()
    }

    fn ones(a: &Matrix) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for i in 0..a.n() {
            for j in 0..a.n() {
                if a.get(i, j) == 1.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn adjacency_three_nodes() {
        let t = Tour::from_order(vec![0, 1, 2]).unwrap();
        assert_eq!(ones(&tour_to_adjacency(&t, 3).unwrap()), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn adjacency_single_node_is_self_loop() {
        let t = Tour::from_order(vec![0]).unwrap();
        assert_eq!(ones(&tour_to_adjacency(&t, 1).unwrap()), vec![(0, 0)]);
    }

    #[test]
    fn adjacency_four_nodes() {
        let t = Tour::from_order(vec![0, 2, 1, 3]).unwrap();
        let mut got = ones(&tour_to_adjacency(&t, 4).unwrap());
        got.sort();
        let mut want = vec![(0, 2), (2, 1), (1, 3), (3, 0)];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn adjacency_rejects_wrong_length() {
        let t = Tour::from_order(vec![0, 1, 2]).unwrap();
        assert!(matches!(
            tour_to_adjacency(&t, 4),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn tour_must_start_at_depot() {
        assert!(Tour::from_order(vec![1, 0, 2]).is_err());
        assert!(Tour::from_order(vec![0, 1, 1]).is_err());
    }

    #[test]
    fn zone_sequence_collapses_duplicates() {
        let inst = line_instance(&["", "A", "A", "B", "C"]);
        assert_eq!(zone_sequence_of(&inst).unwrap(), vec!["station:D", "A", "B", "C"]);
    }

    #[test]
    fn zone_sequence_first_visit_wins() {
        let inst = line_instance(&["", "A", "B", "A", "C"]);
        assert_eq!(zone_sequence_of(&inst).unwrap(), vec!["station:D", "A", "B", "C"]);
    }

    #[test]
    fn zone_sequence_identity() {
        let inst = line_instance(&["", "A"]);
        assert_eq!(zone_sequence_of(&inst).unwrap(), vec!["station:D", "A"]);
    }

    #[test]
    fn zone_sequence_needs_actual_route() {
        let inst = line_instance(&["", "A"]);
        let bare = RoutingInstance::new("r", "D", inst.stops().to_vec(), inst.travel_times().clone(), None, None)
            .unwrap();
        assert!(matches!(zone_sequence_of(&bare), Err(Error::MissingLabel(_))));
    }

    #[test]
    fn instance_validation() {
        let stops = vec![stop("d", 0.0, 0.0, "x"), stop("a", 0.0, 1.0, "A")];
        let tt = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let inst = RoutingInstance::new("r", "S", stops.clone(), tt.clone(), None, None).unwrap();
        assert_eq!(inst.station_zone(), "station:S");

        let bad_diag = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(RoutingInstance::new("r", "S", stops.clone(), bad_diag, None, None).is_err());
        let small = Matrix::zeros(1);
        assert!(RoutingInstance::new("r", "S", stops.clone(), small, None, None).is_err());
        assert!(RoutingInstance::new("r", "S", stops.clone(), tt.clone(), Some(vec![1, 0]), None).is_err());
        let dup = vec![stop("d", 0.0, 0.0, "x"), stop("d", 0.0, 1.0, "A")];
        assert!(RoutingInstance::new("r", "S", dup, tt, None, None).is_err());
    }

    #[test]
    fn corpus_zone_index_puts_station_first() {
        let inst = line_instance(&["", "B", "A"]);
        let zi = ZoneIndex::for_instances([&inst]);
        assert_eq!(zi.zones(), &["station:D", "A", "B"]);
        assert_eq!(zi.index("A"), Some(1));
        assert!(matches!(zi.require("Q"), Err(Error::UnknownZone(_))));
    }

    fn arb_tour(max_n: usize) -> impl Strategy<Value = Tour> {
        (1..=max_n)
            .prop_flat_map(|n| Just((1..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|rest| {
                let mut order = vec![0];
                order.extend(rest);
                Tour::from_order(order).unwrap()
            })
    }

    proptest! {
        #[test]
        fn adjacency_is_a_permutation_matrix(t in arb_tour(50)) {
            let n = t.len();
            let a = tour_to_adjacency(&t, n).unwrap();
            for i in 0..n {
                let row: f64 = a.row(i).iter().sum();
                let col: f64 = (0..n).map(|r| a.get(r, i)).sum();
                prop_assert_eq!(row, 1.0);
                prop_assert_eq!(col, 1.0);
            }
        }

        #[test]
        fn first_visit_matches_brute_force(labels in proptest::collection::vec(0u8..6, 0..40)) {
            let got = first_visit_order(labels.iter().copied());
            // brute force: a label is kept at position k iff it does not occur before k
            let want: Vec<u8> = labels
                .iter()
                .enumerate()
                .filter(|(k, l)| !labels[..*k].contains(l))
                .map(|(_, l)| *l)
                .collect();
            prop_assert_eq!(got, want);
        }
    }
}

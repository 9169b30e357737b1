//! Route corpora: validation, stratified splitting and a synthetic generator
//! with hidden zone preferences.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{station_zone_id, Quality, Stop, WeightVector};
use crate::stop_stage::{order_stops, OrderIndex};
use crate::tsp::TourSolver;
use crate::zone_stage::{build_geometry, order_zones_for, ZoneOrdering, ZoneProblem};
use crate::{Error, Matrix, Result, RoutingInstance, ZoneIndex};

/// A set of route histories with unique route ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    instances: Vec<RoutingInstance>,
    zone_index: ZoneIndex,
    provenance: String,
}

impl Corpus {
    pub fn new(instances: Vec<RoutingInstance>, provenance: impl Into<String>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for inst in &instances {
            if !ids.insert(inst.route_id()) {
                return Err(Error::invalid(format!("duplicate route id `{}`", inst.route_id())));
            }
        }
        let zone_index = ZoneIndex::for_instances(&instances);
        Ok(Corpus {
            instances,
            zone_index,
            provenance: provenance.into(),
        })
    }

    pub fn instances(&self) -> &[RoutingInstance] {
        &self.instances
    }

    pub fn into_instances(self) -> Vec<RoutingInstance> {
        self.instances
    }

    pub fn zone_index(&self) -> &ZoneIndex {
        &self.zone_index
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, route_id: &str) -> Option<&RoutingInstance> {
        self.instances.iter().find(|i| i.route_id() == route_id)
    }

    /// Instances per label, in `Quality::ALL` order.
    pub fn label_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for q in self.instances.iter().filter_map(|i| i.quality()) {
            counts[q as usize] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }

    /// Test instances taken from a label with `count` instances.
    pub fn test_count(&self, count: usize) -> usize {
        libm::round(count as f64 * self.test_fraction) as usize
    }
}

/// Split every label separately: shuffle its instances with the seeded RNG
/// and send the first `round(count * fraction)` to the test side. Both sides
/// keep corpus order.
pub fn stratified_split(c: &Corpus, s: &SplitSpec) -> Result<(Corpus, Corpus)> {
    s.validate()?;
    let unlabeled: Vec<&str> = c
        .instances
        .iter()
        .filter(|i| i.quality().is_none())
        .map(|i| i.route_id())
        .collect();
    if !unlabeled.is_empty() {
        return Err(Error::MissingLabel(format!("routes without quality: {}", unlabeled.join(", "))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut is_test = vec![false; c.len()];
    for q in Quality::ALL {
        let mut members: Vec<usize> = (0..c.len()).filter(|&k| c.instances[k].quality() == Some(q)).collect();
        members.shuffle(&mut rng);
        for &k in &members[..s.test_count(members.len())] {
            is_test[k] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (inst, t) in c.instances.iter().zip(is_test) {
        if t { test.push(inst.clone()) } else { train.push(inst.clone()) }
    }
    let tag = |side: &str| format!("{} ({side}, fraction {}, seed {})", c.provenance, s.test_fraction, s.seed);
    Ok((Corpus::new(train, tag("train"))?, Corpus::new(test, tag("test"))?))
}

/// Parameters of the synthetic route generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_instances: usize,
    /// Zones form a `grid x grid` block of square cells.
    pub grid: usize,
    pub cell_degrees: f64,
    pub seconds_per_degree: f64,
    /// Inclusive range of zones visited by one route.
    pub zones_per_route: (usize, usize),
    /// Inclusive range of stops per visited zone.
    pub stops_per_zone: (usize, usize),
    /// Sharpness of the hidden zone preference: `P(i -> j)` is proportional
    /// to `exp(-scale * |r_j - r_i - 1|)` for hidden ranks `r`.
    pub preference_scale: f64,
    /// Planner weights of the zone stage, `[w_d, w_p]`.
    pub zone_weights: WeightVector,
    /// Planner weights of the stop stage.
    pub stop_weights: WeightVector,
    /// Probabilities of the medium and low labels; the rest are high.
    pub label_rates: (f64, f64),
    /// Random position swaps applied to medium and low routes.
    pub swaps: (usize, usize),
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_instances: 250,
            grid: 4,
            cell_degrees: 0.01,
            seconds_per_degree: 13_875.0,
            zones_per_route: (6, 10),
            stops_per_zone: (3, 6),
            preference_scale: 2.0,
            zone_weights: WeightVector::new(vec![1.0, 4.0]).expect("finite"),
            stop_weights: WeightVector::new(vec![1.0, 0.0, 50.0, 200.0, 300.0, 500.0, 800.0]).expect("finite"),
            label_rates: (0.45, 0.05),
            swaps: (2, 6),
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(format!("synthetic config: {m}")));
        if self.n_instances == 0 {
            return bad("n_instances must be positive");
        }
        if self.grid < 2 {
            return bad("grid must be at least 2x2");
        }
        let (zlo, zhi) = self.zones_per_route;
        if zlo == 0 || zlo > zhi || zhi > self.grid * self.grid {
            return bad("zones_per_route must be a nonempty range within the grid");
        }
        let (slo, shi) = self.stops_per_zone;
        if slo == 0 || slo > shi {
            return bad("stops_per_zone must be a nonempty positive range");
        }
        if !(self.cell_degrees > 0.0 && self.seconds_per_degree > 0.0) {
            return bad("cell size and speed must be positive");
        }
        if !(self.preference_scale >= 0.0 && self.preference_scale.is_finite()) {
            return bad("preference_scale must be finite and nonnegative");
        }
        self.zone_weights.expect_len(2)?;
        self.stop_weights.expect_len(crate::stop_stage::STOP_DIM)?;
        let (pm, pl) = self.label_rates;
        if !(pm >= 0.0 && pl >= 0.0 && pm + pl <= 1.0) {
            return bad("label rates must be probabilities summing to at most 1");
        }
        Ok(())
    }

    pub fn zone_id(&self, row: usize, col: usize) -> String {
        format!("Z{row}-{col}")
    }
}

pub const SYNTH_STATION: &str = "S0";

/// Hidden preference between two zones given their ranks; the station has
/// rank -1.
fn hidden_affinity(scale: f64, from: i64, to: i64) -> f64 {
    libm::exp(-scale * (to - from - 1).abs() as f64)
}

/// Generate a labelled corpus. Each route visits a random subset of grid
/// zones; its zone order solves the zone TSP under the hidden preference and
/// `zone_weights`, its stop order solves the penalised stop TSP under
/// `stop_weights`. Medium and low routes then get random position swaps.
pub fn generate_synthetic(cfg: &SynthConfig, oracle: &dyn TourSolver) -> Result<Corpus> {
    Ok(generate_synthetic_with_plans(cfg, oracle)?.0)
}

/// [`generate_synthetic`] that also returns the planner's zone ordering of
/// every route, before any label perturbation.
pub fn generate_synthetic_with_plans(
    cfg: &SynthConfig,
    oracle: &dyn TourSolver,
) -> Result<(Corpus, Vec<ZoneOrdering>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.grid;
    let cs = cfg.cell_degrees;

    let mut hidden_rank: Vec<i64> = (0..(k * k) as i64).collect();
    hidden_rank.shuffle(&mut rng);

    let width = (cfg.n_instances - 1).to_string().len();
    let mut instances = Vec::with_capacity(cfg.n_instances);
    let mut plans = Vec::with_capacity(cfg.n_instances);
    for t in 0..cfg.n_instances {
        let route_id = format!("synth-{t:0width$}");
        let n_zones = rng.gen_range(cfg.zones_per_route.0..=cfg.zones_per_route.1);
        let mut cells: Vec<usize> = (0..k * k).collect();
        cells.shuffle(&mut rng);
        cells.truncate(n_zones);
        cells.sort_unstable();

        let mut stops = vec![Stop {
            id: format!("{route_id}-depot"),
            lat: -0.5 * cs,
            lng: -0.5 * cs,
            zone_id: station_zone_id(SYNTH_STATION),
        }];
        for &cell in &cells {
            let (row, col) = (cell / k, cell % k);
            for _ in 0..rng.gen_range(cfg.stops_per_zone.0..=cfg.stops_per_zone.1) {
                let s = stops.len();
                stops.push(Stop {
                    id: format!("{route_id}-s{s}"),
                    lat: (row as f64 + rng.gen_range(0.0..1.0)) * cs,
                    lng: (col as f64 + rng.gen_range(0.0..1.0)) * cs,
                    zone_id: cfg.zone_id(row, col),
                });
            }
        }
        let n = stops.len();
        let tt = Matrix::from_fn(n, |i, j| {
            if i == j {
                0.0
            } else {
                libm::hypot(stops[i].lat - stops[j].lat, stops[i].lng - stops[j].lng) * cfg.seconds_per_degree
            }
        });
        let inst = RoutingInstance::new(route_id, SYNTH_STATION, stops, tt, None, None)?;

        let zi = ZoneIndex::of_instance(&inst);
        let rank_of = |z: &str| -> i64 {
            cells
                .iter()
                .find(|&&c| cfg.zone_id(c / k, c % k) == z)
                .map_or(-1, |&c| hidden_rank[c])
        };
        let ranks: Vec<i64> = zi.zones().iter().map(|z| rank_of(z)).collect();
        let m = zi.len();
        let mut p = Matrix::zeros(m);
        for i in 0..m {
            let row: Vec<f64> = (0..m)
                .map(|j| if i == j { 0.0 } else { hidden_affinity(cfg.preference_scale, ranks[i], ranks[j]) })
                .collect();
            let total: f64 = row.iter().sum();
            for (j, v) in row.into_iter().enumerate() {
                if total > 0.0 {
                    p.set(i, j, v / total);
                }
            }
        }
        let g = build_geometry(&inst, &zi)?;
        let zones = order_zones_for(&g, &ZoneProblem::new(&g, &p)?, &cfg.zone_weights, oracle)?;
        let o = OrderIndex::new(&inst, &zones)?;
        let tour = order_stops(&inst, &o, &cfg.stop_weights, oracle)?;

        let u: f64 = rng.gen_range(0.0..1.0);
        let (quality, swaps) = if u < cfg.label_rates.0 {
            (Quality::Medium, cfg.swaps.0)
        } else if u < cfg.label_rates.0 + cfg.label_rates.1 {
            (Quality::Low, cfg.swaps.1)
        } else {
            (Quality::High, 0)
        };
        let mut seq = tour.order().to_vec();
        if n > 2 {
            for _ in 0..swaps {
                let a = rng.gen_range(1..n);
                let b = rng.gen_range(1..n);
                seq.swap(a, b);
            }
        }
        instances.push(inst.with_actual(seq, Some(quality))?);
        plans.push(zones);
    }
    Ok((Corpus::new(instances, format!("synthetic seed {}", cfg.seed))?, plans))
}

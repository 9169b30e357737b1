//! Learning last-mile routing preferences from historical routes.
//!
//! The crate is organised around a two-stage predictor. Stage one orders the
//! zones of a delivery day by solving a TSP over a mix of distance-derived and
//! historically estimated transition probabilities. Stage two orders the stops
//! by solving a TSP over travel times plus penalties for stepping against that
//! zone ordering. The linear weights of both cost functions are learned with a
//! structured perceptron that calls the TSP solver in its inference step.
//!
//! Everything here is `no_std` + `alloc`; file formats, clocks and the command
//! line live in the `lastmile` crate.
//!
//! Module map:
//!
//! * [`model`]: stops, instances, zone indices, tours and weight vectors.
//! * [`tsp`]: exact (Held-Karp) and anytime (local search) solvers.
//! * [`transition`]: weighted transition counting and row normalisation.
//! * [`zone_stage`]: centroids, inverted-distance probabilities, mixed cost.
//! * [`stop_stage`]: order index, penalty categories, penalised cost.
//! * [`sop`]: the structured perceptron.
//! * [`scorer`]: sequence deviation, ERP and the combined score.
//! * [`data`]: corpora, stratified splitting and the synthetic generator.
//! * [`predict`]: the end-to-end two-stage predictor.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod data;
mod error;
pub mod matrix;
pub mod model;
pub mod predict;
pub mod scorer;
pub mod sop;
pub mod stop_stage;
pub mod transition;
pub mod tsp;
pub mod zone_stage;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::{Quality, RoutingInstance, Stop, Tour, WeightVector, ZoneIndex};
pub use tsp::{CostMatrix, SolveBudget, TspOracle};

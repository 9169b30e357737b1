//! JSON artifacts. Each one records the settings that produced it.

use lastmile_core::sop::{TrainConfig, TrainTrace};
use lastmile_core::transition::{QualityWeights, TransitionMatrix};
use lastmile_core::WeightVector;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Zone,
    Stop,
}

impl Stage {
    pub fn dim(self) -> usize {
        match self {
            Stage::Zone => 2,
            Stage::Stop => lastmile_core::stop_stage::STOP_DIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub seed: u64,
    pub iteration_cap: u64,
    /// Per-solve wall-clock limit; results are only reproducible without it.
    pub budget_secs: Option<f64>,
    pub exact_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionArtifact {
    pub corpus: String,
    pub quality_weights: QualityWeights,
    pub include_closing_arc: bool,
    pub matrix: TransitionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsArtifact {
    pub stage: Stage,
    pub corpus: String,
    pub matrix: Option<String>,
    pub train: TrainConfig,
    pub oracle: OracleConfig,
    pub weights: WeightVector,
    pub trace: TrainTrace,
    /// Mean validation score after each epoch, epoch 0 first.
    pub validation: Option<Vec<f64>>,
}

/// A weights file is either a training artifact or a bare JSON array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightsFile {
    Artifact(Box<WeightsArtifact>),
    Plain(WeightVector),
}

impl WeightsFile {
    pub fn into_weights(self, stage: Stage) -> CliResult<WeightVector> {
        let w = match self {
            WeightsFile::Artifact(a) => {
                if a.stage != stage {
                    return Err(CliError::Usage(format!(
                        "weights were trained for the {:?} stage, expected {:?}",
                        a.stage, stage
                    )));
                }
                a.weights
            }
            WeightsFile::Plain(w) => w,
        };
        w.expect_len(stage.dim())?;
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedRoute {
    pub route_id: String,
    pub zones: Vec<String>,
    pub stops: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictConfig {
    pub corpus: String,
    pub zone_method: String,
    pub zone_weights: Option<WeightVector>,
    pub matrix: Option<String>,
    pub stop_method: String,
    pub stop_weights: Option<WeightVector>,
    pub oracle: OracleConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionsArtifact {
    pub config: PredictConfig,
    pub routes: Vec<PredictedRoute>,
}

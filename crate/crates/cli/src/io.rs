//! Corpus files (JSON Lines) and JSON/CSV artifacts.
//!
//! One route per line:
//!
//! ```json
//! {"route_id": "r1", "station_id": "S0", "quality": "high",
//!  "stops": [{"id": "d", "lat": 0.0, "lng": 0.0, "zone_id": ""},
//!            {"id": "a", "lat": 0.01, "lng": 0.02, "zone_id": "A-1"}],
//!  "travel_times": [[0.0, 12.5], [13.0, 0.0]],
//!  "actual_sequence": [0, 1]}
//! ```
//!
//! `stops[0]` is the station; its zone is replaced by the station
//! pseudo-zone. `travel_times` is row-major in seconds. `actual_sequence`
//! lists stop indices and starts with 0. `quality` and `actual_sequence` may
//! be `null` or absent for routes that are only to be predicted.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lastmile_core::data::Corpus;
use lastmile_core::{Matrix, Quality, RoutingInstance, Stop};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteRecord {
    pub route_id: String,
    pub station_id: String,
    #[serde(default)]
    pub quality: Option<Quality>,
    pub stops: Vec<Stop>,
    pub travel_times: Vec<Vec<f64>>,
    #[serde(default)]
    pub actual_sequence: Option<Vec<usize>>,
}

impl RouteRecord {
    pub fn from_instance(inst: &RoutingInstance) -> Self {
        RouteRecord {
            route_id: inst.route_id().into(),
            station_id: inst.station_id().into(),
            quality: inst.quality(),
            stops: inst.stops().to_vec(),
            travel_times: inst.travel_times().to_rows(),
            actual_sequence: inst.actual_sequence().map(<[usize]>::to_vec),
        }
    }

    pub fn into_instance(self) -> lastmile_core::Result<RoutingInstance> {
        let tt = Matrix::from_rows(self.travel_times)?;
        RoutingInstance::new(self.route_id, self.station_id, self.stops, tt, self.actual_sequence, self.quality)
    }
}

/// Parse one corpus line; errors name the line and, when readable, the route.
pub fn parse_route(line: &str, lineno: usize) -> CliResult<RoutingInstance> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| CliError::Data(format!("line {lineno}: {e}")))?;
    let id = value
        .get("route_id")
        .and_then(|v| v.as_str())
        .map(|s| format!(" (route `{s}`)"))
        .unwrap_or_default();
    let record: RouteRecord =
        serde_json::from_value(value).map_err(|e| CliError::Data(format!("line {lineno}{id}: {e}")))?;
    record
        .into_instance()
        .map_err(|e| CliError::Data(format!("line {lineno}{id}: {e}")))
}

pub fn read_corpus(reader: impl BufRead, provenance: &str) -> CliResult<Corpus> {
    let mut instances = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::Data(format!("{provenance}: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        instances.push(parse_route(&line, k + 1)?);
    }
    Corpus::new(instances, provenance).map_err(|e| CliError::Data(format!("{provenance}: {e}")))
}

pub fn load_corpus(path: &Path) -> CliResult<Corpus> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_corpus(BufReader::new(f), &path.display().to_string())
}

/// Like [`load_corpus`] but an empty file is a usage error.
pub fn load_nonempty_corpus(path: &Path) -> CliResult<Corpus> {
    let c = load_corpus(path)?;
    if c.is_empty() {
        return Err(CliError::Usage(format!("{}: no routes", path.display())));
    }
    Ok(c)
}

pub fn write_corpus(corpus: &Corpus, mut w: impl Write) -> std::io::Result<()> {
    for inst in corpus.instances() {
        serde_json::to_writer(&mut w, &RouteRecord::from_instance(inst))?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn save_corpus(corpus: &Corpus, path: &Path) -> CliResult<()> {
    let f = create(path)?;
    write_corpus(corpus, BufWriter::new(f)).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> CliResult<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

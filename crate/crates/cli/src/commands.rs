//! Subcommand implementations. Each returns the text printed on stdout.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lastmile_core::data::{generate_synthetic, stratified_split, Corpus, SplitSpec, SynthConfig};
use lastmile_core::predict::{predict_stops, predict_travel_time_only, predict_zones, ZoneMethod};
use lastmile_core::scorer::{score, zone_score, ScoreReport, ScoreRow};
use lastmile_core::sop::{train, TrainConfig, TrainTrace};
use lastmile_core::stop_stage::{violation_report, ReportCategory, StopExample};
use lastmile_core::transition::{estimate, QualityWeights, TransitionMatrix, DEFAULT_FLOOR};
use lastmile_core::zone_stage::{ZoneExample, ZoneOrdering};
use lastmile_core::{RoutingInstance, SolveBudget, Tour, TspOracle, WeightVector, ZoneIndex};
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::*;
use crate::cli::*;
use crate::clock::SystemStopwatch;
use crate::error::{CliError, CliResult};
use crate::io;

pub fn run(cmd: &Command) -> CliResult<String> {
    match cmd {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Score(a) => cmd_score(a),
        Command::Report(a) => cmd_report(a),
        Command::Split(a) => cmd_split(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

impl OracleArgs {
    fn config(&self) -> CliResult<OracleConfig> {
        if self.iter_cap == 0 {
            return Err(CliError::Usage("--iter-cap must be at least 1".into()));
        }
        if self.exact_cap > 20 {
            return Err(CliError::Usage("--exact-cap above 20 needs too much memory".into()));
        }
        if let Some(s) = self.budget_secs {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::Usage("--budget-secs must be positive".into()));
            }
        }
        Ok(OracleConfig {
            seed: self.seed,
            iteration_cap: self.iter_cap,
            budget_secs: self.budget_secs,
            exact_cap: self.exact_cap,
        })
    }
}

pub fn build_oracle(c: &OracleConfig) -> TspOracle {
    let mut budget = SolveBudget::iterations(c.seed, c.iteration_cap);
    if let Some(s) = c.budget_secs {
        budget = budget.with_time_limit(s, Arc::new(SystemStopwatch::start()));
    }
    TspOracle::new(budget).with_exact_cap(c.exact_cap)
}

impl QualityArgs {
    fn weights(&self) -> CliResult<QualityWeights> {
        QualityWeights::new(self.v_high, self.v_medium, self.v_low).map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(pool.install(f))
}

fn load_matrix(path: &Path) -> CliResult<TransitionMatrix> {
    Ok(io::read_json::<TransitionArtifact>(path)?.matrix)
}

fn labelled(corpus: &Corpus) -> CliResult<()> {
    let missing: Vec<&str> = corpus
        .instances()
        .iter()
        .filter(|i| i.actual_sequence().is_none())
        .map(|i| i.route_id())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!("routes without an actual sequence: {}", missing.join(", "))))
    }
}

pub fn cmd_estimate(a: &EstimateArgs) -> CliResult<String> {
    let v = a.quality.weights()?;
    let corpus = io::load_nonempty_corpus(&a.corpus)?;
    let zi = corpus.zone_index().clone();
    let matrix = estimate(corpus.instances(), &v, &zi, !a.no_closing_arc, DEFAULT_FLOOR)?;
    let artifact = TransitionArtifact {
        corpus: path_str(&a.corpus),
        quality_weights: v,
        include_closing_arc: !a.no_closing_arc,
        matrix,
    };
    io::write_json(&a.out, &artifact)?;
    Ok(format!("{} zones from {} routes -> {}\n", zi.len(), corpus.len(), a.out.display()))
}

/// Mean validation score of `w` on `corpus`. The stop stage orders stops
/// inside each route's own first-visit zone order, so it is judged alone.
fn validation_score(
    stage: Stage,
    corpus: &Corpus,
    w: &WeightVector,
    matrix: Option<&TransitionMatrix>,
    oracle: &TspOracle,
) -> CliResult<f64> {
    let mut rows = Vec::with_capacity(corpus.len());
    for inst in corpus.instances() {
        let row = match stage {
            Stage::Zone => {
                let z = predict_zones(inst, &ZoneMethod::Mixed(w.clone()), matrix, oracle)?;
                zone_score(inst, &z)?
            }
            Stage::Stop => {
                let z = ZoneOrdering::of_actual_route(inst)?;
                score(inst, &predict_stops(inst, &z, w, oracle)?)?
            }
        };
        rows.push(row);
    }
    Ok(ScoreReport::new(rows).mean_score().unwrap_or(0.0))
}

pub fn epoch_table(trace: &TrainTrace, validation: Option<&[f64]>) -> String {
    let dim = trace.epochs.first().map_or(0, |e| e.weights.len());
    let mut s = String::from("epoch");
    for k in 0..dim {
        let _ = write!(s, "\t{:>10}", format!("w_{k}"));
    }
    s.push_str("\tupdates\t  gap");
    if validation.is_some() {
        s.push_str("\t   score");
    }
    s.push('\n');
    for (k, e) in trace.epochs.iter().enumerate() {
        let _ = write!(s, "{:>5}", e.epoch);
        for w in e.weights.values() {
            let _ = write!(s, "\t{w:>10.5}");
        }
        let _ = write!(s, "\t{:>7}\t{:>5.2}", e.updates, e.mean_gap_norm);
        if let Some(v) = validation {
            let _ = write!(s, "\t{:>8.5}", v[k]);
        }
        s.push('\n');
    }
    s
}

pub fn cmd_train(a: &TrainArgs) -> CliResult<String> {
    let oracle_cfg = a.oracle.config()?;
    let initial = match &a.init {
        Some(v) => WeightVector::new(v.clone()).map_err(|e| CliError::Usage(e.to_string()))?,
        None => match a.stage {
            Stage::Zone => WeightVector::zone_default(),
            Stage::Stop => WeightVector::stop_default(),
        },
    };
    if initial.len() != a.stage.dim() {
        return Err(CliError::Usage(format!(
            "--init has {} weights, the {:?} stage needs {}",
            initial.len(),
            a.stage,
            a.stage.dim()
        )));
    }
    let cfg = TrainConfig {
        learning_rate: a.lr,
        epochs: a.epochs,
        initial,
        shuffle_seed: a.shuffle.then_some(a.oracle.seed),
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if a.stage == Stage::Zone && a.matrix.is_none() {
        return Err(CliError::Usage("the zone stage needs --matrix".into()));
    }
    let corpus = io::load_nonempty_corpus(&a.corpus)?;
    labelled(&corpus)?;
    let validation = a.validation.as_deref().map(io::load_nonempty_corpus).transpose()?;
    let matrix = a.matrix.as_deref().map(load_matrix).transpose()?;
    let oracle = build_oracle(&oracle_cfg);

    let (weights, trace) = match a.stage {
        Stage::Zone => {
            let p = matrix.as_ref().expect("checked above");
            let data = corpus
                .instances()
                .iter()
                .map(|i| ZoneExample::from_instance(i, p))
                .collect::<lastmile_core::Result<Vec<_>>>()?;
            train(&data, &cfg, &oracle)?
        }
        Stage::Stop => {
            let data = corpus
                .instances()
                .iter()
                .map(StopExample::from_instance)
                .collect::<lastmile_core::Result<Vec<_>>>()?;
            train(&data, &cfg, &oracle)?
        }
    };
    let val_scores = match &validation {
        Some(v) => Some(
            trace
                .epochs
                .iter()
                .map(|e| validation_score(a.stage, v, &e.weights, matrix.as_ref(), &oracle))
                .collect::<CliResult<Vec<_>>>()?,
        ),
        None => None,
    };
    let table = epoch_table(&trace, val_scores.as_deref());
    let artifact = WeightsArtifact {
        stage: a.stage,
        corpus: path_str(&a.corpus),
        matrix: a.matrix.as_deref().map(path_str),
        train: cfg,
        oracle: oracle_cfg,
        weights,
        trace,
        validation: val_scores,
    };
    io::write_json(&a.out, &artifact)?;
    Ok(table)
}

fn read_weights(path: &Path, stage: Stage) -> CliResult<WeightVector> {
    io::read_json::<WeightsFile>(path)?.into_weights(stage)
}

pub fn cmd_predict(a: &PredictArgs) -> CliResult<String> {
    let oracle_cfg = a.oracle.config()?;
    let zone_weights = match a.zone_method {
        ZoneMethodArg::Distance => None,
        ZoneMethodArg::Markov => Some(WeightVector::new(vec![0.0, 1.0])?),
        ZoneMethodArg::Mixed => Some(match &a.zone_weights {
            Some(p) => read_weights(p, Stage::Zone)?,
            None => WeightVector::zone_default(),
        }),
    };
    if zone_weights.is_some() && a.matrix.is_none() {
        return Err(CliError::Usage("markov and mixed zone methods need --matrix".into()));
    }
    let stop_weights = match a.stop_method {
        StopMethodArg::TravelTime => None,
        StopMethodArg::Penalty => Some(match &a.stop_weights {
            Some(p) => read_weights(p, Stage::Stop)?,
            None => WeightVector::stop_default(),
        }),
    };
    let corpus = io::load_nonempty_corpus(&a.corpus)?;
    let matrix = a.matrix.as_deref().map(load_matrix).transpose()?;
    let method = match &zone_weights {
        Some(w) => ZoneMethod::Mixed(w.clone()),
        None => ZoneMethod::Distance,
    };
    let oracle = build_oracle(&oracle_cfg);

    let predict_one = |inst: &RoutingInstance| -> CliResult<PredictedRoute> {
        let zones = predict_zones(inst, &method, matrix.as_ref(), &oracle)?;
        let tour = match &stop_weights {
            Some(w) => predict_stops(inst, &zones, w, &oracle)?,
            None => predict_travel_time_only(inst, &oracle)?,
        };
        Ok(PredictedRoute {
            route_id: inst.route_id().into(),
            zones: zones.zone_ids(),
            stops: tour.order().iter().map(|&i| inst.stops()[i].id.clone()).collect(),
        })
    };
    let routes = with_jobs(a.jobs, || {
        corpus.instances().par_iter().map(predict_one).collect::<CliResult<Vec<_>>>()
    })??;

    let artifact = PredictionsArtifact {
        config: PredictConfig {
            corpus: path_str(&a.corpus),
            zone_method: format!("{:?}", a.zone_method).to_lowercase(),
            zone_weights,
            matrix: a.matrix.as_deref().map(path_str),
            stop_method: format!("{:?}", a.stop_method).to_lowercase(),
            stop_weights,
            oracle: oracle_cfg,
        },
        routes,
    };
    io::write_json(&a.out, &artifact)?;
    Ok(format!("{} routes -> {}\n", artifact.routes.len(), a.out.display()))
}

fn predicted_tour(inst: &RoutingInstance, p: &PredictedRoute) -> CliResult<Tour> {
    let index: HashMap<&str, usize> = inst.stops().iter().enumerate().map(|(k, s)| (s.id.as_str(), k)).collect();
    let order = p
        .stops
        .iter()
        .map(|id| {
            index
                .get(id.as_str())
                .copied()
                .ok_or_else(|| CliError::Data(format!("route `{}`: unknown stop `{id}`", p.route_id)))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Tour::from_order(order).map_err(|e| CliError::Data(format!("route `{}`: {e}", p.route_id)))
}

fn predicted_zones(inst: &RoutingInstance, p: &PredictedRoute) -> CliResult<ZoneOrdering> {
    ZoneOrdering::from_ids(ZoneIndex::of_instance(inst), &p.zones)
        .map_err(|e| CliError::Data(format!("route `{}`: {e}", p.route_id)))
}

#[derive(Serialize)]
struct CsvScoreRow<'a> {
    route_id: &'a str,
    quality: &'a str,
    sd: f64,
    erp_norm: f64,
    erp_edits: usize,
    score: f64,
}

#[derive(Serialize)]
struct CohortRow {
    quality: String,
    routes: usize,
    mean_score: f64,
}

#[derive(Serialize)]
struct BinRow {
    lower: f64,
    upper: f64,
    count: usize,
}

pub fn cmd_score(a: &ScoreArgs) -> CliResult<String> {
    let corpus = io::load_nonempty_corpus(&a.corpus)?;
    labelled(&corpus)?;
    let preds: PredictionsArtifact = io::read_json(&a.predictions)?;
    let by_id: HashMap<&str, &PredictedRoute> = preds.routes.iter().map(|r| (r.route_id.as_str(), r)).collect();
    let score_one = |inst: &RoutingInstance| -> CliResult<ScoreRow> {
        let p = by_id
            .get(inst.route_id())
            .ok_or_else(|| CliError::Data(format!("no prediction for route `{}`", inst.route_id())))?;
        Ok(match a.level {
            Level::Stop => score(inst, &predicted_tour(inst, p)?)?,
            Level::Zone => zone_score(inst, &predicted_zones(inst, p)?)?,
        })
    };
    let rows = with_jobs(a.jobs, || {
        corpus.instances().par_iter().map(score_one).collect::<CliResult<Vec<_>>>()
    })??;
    let report = ScoreReport::new(rows);

    io::write_csv(
        &a.out,
        report.rows.iter().map(|r| CsvScoreRow {
            route_id: &r.route_id,
            quality: r.quality.map_or("", |q| q.as_str()),
            sd: r.sd,
            erp_norm: r.erp_norm,
            erp_edits: r.erp_edits,
            score: r.score,
        }),
    )?;
    let cohorts: Vec<CohortRow> = report
        .cohorts()
        .into_iter()
        .map(|c| CohortRow {
            quality: c.quality.map_or("all", |q| q.as_str()).into(),
            routes: c.routes,
            mean_score: c.mean_score,
        })
        .collect();
    if let Some(p) = &a.summary {
        io::write_json(p, &cohorts)?;
    }
    if let Some(p) = &a.histogram {
        let counts = report.histogram(a.bins, a.hist_max).map_err(|e| CliError::Usage(e.to_string()))?;
        let width = a.hist_max / a.bins as f64;
        io::write_csv(
            p,
            counts.iter().enumerate().map(|(k, &count)| BinRow {
                lower: k as f64 * width,
                upper: (k + 1) as f64 * width,
                count,
            }),
        )?;
    }
    let mut out = String::from("cohort\troutes\tmean score\n");
    for c in &cohorts {
        let _ = writeln!(out, "{}\t{}\t{:.5}", c.quality, c.routes, c.mean_score);
    }
    Ok(out)
}

pub fn cmd_report(a: &ReportArgs) -> CliResult<String> {
    let corpus = io::load_nonempty_corpus(&a.corpus)?;
    labelled(&corpus)?;
    let rep = violation_report(corpus.instances())?;
    let mut header = vec!["quality".to_string(), "routes".to_string()];
    header.extend(ReportCategory::ALL.iter().map(|c| c.name().to_string()));
    let mut out = header.join("\t");
    out.push('\n');
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(|e| CliError::Internal(e.to_string()))?;
    for row in &rep.rows {
        let mut rec = vec![row.quality.as_str().to_string(), row.routes.to_string()];
        rec.extend(row.percent.iter().map(|p| p.to_string()));
        w.write_record(&rec).map_err(|e| CliError::Internal(e.to_string()))?;
        let _ = write!(out, "{}\t{}", row.quality.as_str(), row.routes);
        for p in row.percent {
            let _ = write!(out, "\t{p:.2}");
        }
        out.push('\n');
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(&a.out, bytes).map_err(|e| CliError::io(&a.out, e))?;
    Ok(out)
}

pub fn cmd_split(a: &SplitArgs) -> CliResult<String> {
    let spec = SplitSpec {
        test_fraction: a.test_fraction,
        seed: a.seed,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let corpus = io::load_nonempty_corpus(&a.corpus)?;
    let (train, test) = stratified_split(&corpus, &spec)?;
    let (tp, sp): (PathBuf, PathBuf) = (a.out.join("train.jsonl"), a.out.join("test.jsonl"));
    io::save_corpus(&train, &tp)?;
    io::save_corpus(&test, &sp)?;
    let line = |name: &str, c: &Corpus, p: &PathBuf| {
        let [h, m, l] = c.label_counts();
        format!("{name} {} routes (high {h}, medium {m}, low {l}) -> {}\n", c.len(), p.display())
    };
    Ok(line("train", &train, &tp) + &line("test", &test, &sp))
}

pub fn cmd_synth(a: &SynthArgs) -> CliResult<String> {
    let oracle_cfg = a.oracle.config()?;
    let mut cfg = SynthConfig {
        n_instances: a.instances,
        grid: a.grid,
        zones_per_route: (a.zones_min, a.zones_max),
        stops_per_zone: (a.stops_min, a.stops_max),
        label_rates: (a.medium_rate, a.low_rate),
        seed: a.oracle.seed,
        ..SynthConfig::default()
    };
    if let Some(w) = &a.stop_weights {
        cfg.stop_weights = WeightVector::new(w.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Some(w) = &a.zone_weights {
        cfg.zone_weights = WeightVector::new(w.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let corpus = generate_synthetic(&cfg, &build_oracle(&oracle_cfg))?;
    io::save_corpus(&corpus, &a.out)?;
    let [h, m, l] = corpus.label_counts();
    Ok(format!(
        "{} routes (high {h}, medium {m}, low {l}), {} zones -> {}\n",
        corpus.len(),
        corpus.zone_index().len(),
        a.out.display()
    ))
}

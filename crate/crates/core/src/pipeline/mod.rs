//! Dataset generation: sample candidates, simulate them on a worker pool,
//! keep the valid ones and stream their tables to disk with checkpoints.

mod layout;
mod metadata;
mod tables;

use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adg::AdgConfig;
use crate::hydraulics::{simulate_scenario, OutputKind, Rule, RuleSet, ScenarioResult};
use crate::inp::{serialize_inp, NetworkModel};
use crate::params::{Component, ParamId, ParamValues};
use crate::profiler::NetworkProfile;
use crate::strategies::{sample_scenario, scenario_rng, SamplingConfig, ScenarioContext, StrategyError};

pub use layout::{
    capacity_gb, duration_token, folder_name, parse_folder_name, Io, TableName, TableType,
    TABLE_EXTENSION,
};
pub use metadata::{write_metadata, Metadata, METADATA_KEYS};
pub use tables::{format_value, load_table, read_table, shard_paths, ShardState, ShardedWriter, Table};

pub const METADATA_FILE: &str = "metadata.md";
const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const DEFAULT_MAX_ROWS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "acceptance rate {rate:.4} over the last {window} candidates is below the floor; most rejections: {dominant}"
    )]
    QuotaUnreachable { rate: f64, window: usize, dominant: String },
    #[error("{file}: {reason}")]
    Layout { file: String, reason: String },
    #[error("metadata: {0}")]
    Metadata(String),
    #[error("{0} already exists")]
    AlreadyExists(PathBuf),
    #[error("checkpoint does not match this run: {0}")]
    CheckpointMismatch(String),
    #[error("stopped after {accepted} accepted scenarios")]
    Halted { accepted: usize },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Yaml(#[from] serde_yaml::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Run configuration. Keys follow the metadata vocabulary; demand
/// generator settings and the per-component `*_tune` maps sit at the top
/// level of the same document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub adg: AdgConfig,
    pub num_samples: usize,
    /// Simulations handed to the worker pool at once.
    pub batch_size: usize,
    /// Candidates drawn per generation round.
    pub gen_batch_size: usize,
    /// Worker threads; 0 uses every core.
    pub num_cpus: usize,
    pub fractional_cpu_usage: f64,
    /// Gigabytes, recorded only.
    pub mem_per_worker: f64,
    /// Checkpoint every this many generation rounds.
    pub backup_times: f64,
    /// Candidate indices of the accepted scenarios, in dataset order.
    pub index_tracers: Vec<u64>,
    pub inp_paths: Vec<String>,
    pub output_path: String,
    pub temp_path: String,
    pub ray_temp_path: String,
    pub verbose: bool,
    pub sim_outputs: Vec<OutputKind>,
    pub skip_names: Vec<String>,
    pub pressure_range: (f64, f64),
    pub time_consistency: bool,
    pub save_success_inp: bool,
    pub yield_worker_generator: bool,
    pub seed: u64,
    pub max_rows_per_shard: usize,
    pub acceptance_floor: f64,
    pub acceptance_window: usize,
    #[serde(flatten)]
    pub sampling: SamplingConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            adg: AdgConfig::default(),
            num_samples: 1000,
            batch_size: 64,
            gen_batch_size: 64,
            num_cpus: 0,
            fractional_cpu_usage: 1.0,
            mem_per_worker: 1.0,
            backup_times: 1.0,
            index_tracers: Vec::new(),
            inp_paths: Vec::new(),
            output_path: "datasets".into(),
            temp_path: std::env::temp_dir().display().to_string(),
            ray_temp_path: String::new(),
            verbose: false,
            sim_outputs: OutputKind::ALL.to_vec(),
            skip_names: Vec::new(),
            pressure_range: (0.0, 151.0),
            time_consistency: true,
            save_success_inp: false,
            yield_worker_generator: true,
            seed: 0,
            max_rows_per_shard: DEFAULT_MAX_ROWS,
            acceptance_floor: 0.01,
            acceptance_window: 1000,
            sampling: SamplingConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_yaml(text: &str) -> Result<Self, PipelineError> {
        let run: RunConfig = serde_yaml::from_str(text)?;
        Ok(run)
    }

    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("run configuration always serializes")
    }

    pub fn steps(&self) -> usize {
        self.adg.steps()
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::InvalidConfig(m.to_string()));
        if self.num_samples == 0 {
            return bad("num_samples must be at least 1");
        }
        if self.adg.time_step.is_nan() || self.adg.time_step <= 0.0 {
            return bad("time_step must be positive");
        }
        if duration_token(self.adg.duration).is_none() {
            return bad("duration must be 24 (24H) or 8760 (1Y) hours");
        }
        let ratio = self.adg.duration / self.adg.time_step;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return bad("duration must be a multiple of time_step");
        }
        if self.pressure_range.0 > self.pressure_range.1 {
            return bad("pressure_range lower bound exceeds upper bound");
        }
        if self.gen_batch_size == 0 || self.batch_size == 0 || self.acceptance_window == 0 {
            return bad("batch sizes and acceptance_window must be positive");
        }
        self.sampling.validate()?;
        Ok(())
    }

    pub fn rules(&self, model: &NetworkModel) -> RuleSet {
        let mut rules = RuleSet::standard(model, self.pressure_range, &self.skip_names);
        if !self.time_consistency {
            rules.rules.retain(|r| *r != Rule::TimeConsistency);
        }
        rules
    }

    fn backup_every(&self) -> usize {
        (self.backup_times.round() as usize).max(1)
    }
}

enum Source {
    Input(ParamId),
    Output(OutputKind, Vec<usize>),
}

struct TablePlan {
    name: TableName,
    header: Vec<String>,
    /// Positions within the component's values that survive `skip_names`.
    keep: Vec<usize>,
    source: Source,
    rows: usize,
}

/// Node or link array position of every component of a class.
fn state_indices(model: &NetworkModel, component: Component) -> Vec<usize> {
    let nj = model.junctions.len();
    let nr = model.reservoirs.len();
    let np = model.pipes.len();
    let npu = model.pumps.len();
    match component {
        Component::Junction => (0..nj).collect(),
        Component::Reservoir => (nj..nj + nr).collect(),
        Component::Tank => (nj + nr..nj + nr + model.tanks.len()).collect(),
        Component::Pipe => (0..np).collect(),
        Component::HeadPump | Component::PowerPump => {
            let names = component.names(model);
            model
                .pumps
                .iter()
                .enumerate()
                .filter(|(_, p)| names.contains(&p.name))
                .map(|(i, _)| np + i)
                .collect()
        }
        valve => {
            let names = valve.names(model);
            model
                .valves
                .iter()
                .enumerate()
                .filter(|(_, v)| names.contains(&v.name))
                .map(|(i, _)| np + npu + i)
                .collect()
        }
    }
}

fn is_node(component: Component) -> bool {
    matches!(component, Component::Junction | Component::Reservoir | Component::Tank)
}

fn header_for(table_type: TableType, names: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut header = vec!["scenario".to_string()];
    header.extend(table_type.index_column().map(str::to_string));
    header.extend(names);
    header
}

fn plan_tables(ctx: &ScenarioContext, run: &RunConfig) -> Vec<TablePlan> {
    let model = &ctx.model;
    let steps = ctx.steps();
    let mut plans = Vec::new();
    for &id in &ctx.present {
        let names = id.component.names(model);
        let keep: Vec<usize> = (0..names.len()).filter(|i| !run.skip_names.contains(&names[*i])).collect();
        if keep.is_empty() {
            continue;
        }
        let table_type = TableType::of(id.info().kind);
        let rows = match table_type {
            TableType::Static => 1,
            TableType::Dynamic => steps,
            TableType::Curve => match &ctx.baseline[&id] {
                ParamValues::Series(s) => s.iter().map(Vec::len).max().unwrap_or(0).max(1),
                ParamValues::Scalars(_) => 1,
            },
        };
        plans.push(TablePlan {
            name: TableName::new(&id.component.file_token(), id.parameter.key(), table_type, Io::Input),
            header: header_for(table_type, keep.iter().map(|i| names[*i].clone())),
            keep,
            source: Source::Input(id),
            rows,
        });
    }
    for &kind in &run.sim_outputs {
        for component in Component::ALL {
            if is_node(component) != kind.is_node() {
                continue;
            }
            let names = component.names(model);
            let indices = state_indices(model, component);
            let keep: Vec<usize> = (0..names.len()).filter(|i| !run.skip_names.contains(&names[*i])).collect();
            if keep.is_empty() {
                continue;
            }
            plans.push(TablePlan {
                name: TableName::new(&component.file_token(), kind.key(), TableType::Dynamic, Io::Output),
                header: header_for(TableType::Dynamic, keep.iter().map(|i| names[*i].clone())),
                source: Source::Output(kind, keep.iter().map(|i| indices[*i]).collect()),
                keep,
                rows: steps,
            });
        }
    }
    plans
}

fn write_scenario(
    plan: &TablePlan,
    writer: &mut ShardedWriter,
    ordinal: usize,
    result: &ScenarioResult,
) -> Result<(), PipelineError> {
    let k = ordinal.to_string();
    match &plan.source {
        Source::Input(id) => {
            let values = &result.inputs[id];
            for r in 0..plan.rows {
                let mut row = vec![k.clone()];
                if plan.name.table_type != TableType::Static {
                    row.push(r.to_string());
                }
                for &j in &plan.keep {
                    let v = match values {
                        ParamValues::Scalars(s) => s[j],
                        ParamValues::Series(s) => {
                            let series = &s[j];
                            match plan.name.table_type {
                                TableType::Dynamic if !series.is_empty() => series[r % series.len()],
                                TableType::Static => series.first().copied().unwrap_or(f64::NAN),
                                _ => series.get(r).copied().unwrap_or(f64::NAN),
                            }
                        }
                    };
                    row.push(format_value(v));
                }
                writer.write_row(&row)?;
            }
        }
        Source::Output(kind, indices) => {
            for (t, state) in result.snapshots.iter().enumerate() {
                let values = kind.values(state);
                let mut row = vec![k.clone(), t.to_string()];
                row.extend(indices.iter().map(|i| format_value(values[*i])));
                writer.write_row(&row)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    /// The run configuration this checkpoint belongs to, tracers cleared.
    fingerprint: String,
    accepted: usize,
    next_candidate: u64,
    index_tracers: Vec<u64>,
    writers: BTreeMap<String, ShardState>,
    /// Byte length of every data file at checkpoint time.
    files: BTreeMap<String, u64>,
    /// Most recent outcomes: `None` accepted, otherwise the rejection reason.
    window: Vec<Option<String>>,
    rejected_by: BTreeMap<String, usize>,
}

fn fingerprint(run: &RunConfig) -> String {
    let mut r = run.clone();
    r.index_tracers.clear();
    r.verbose = false;
    r.num_cpus = 0;
    r.to_yaml()
}

fn data_files(dir: &Path) -> Result<BTreeMap<String, u64>, PipelineError> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let rel = path.strip_prefix(dir).expect("under dir").to_string_lossy().replace('\\', "/");
            if rel == CHECKPOINT_FILE || rel == METADATA_FILE || rel.ends_with(".tmp") {
                continue;
            }
            out.insert(rel, fs::metadata(&path)?.len());
        }
    }
    Ok(out)
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), PipelineError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Cut every data file back to its checkpointed length and drop files
/// created after the checkpoint.
fn restore(dir: &Path, ckpt: &Checkpoint) -> Result<(), PipelineError> {
    for (rel, len) in data_files(dir)? {
        let path = dir.join(&rel);
        match ckpt.files.get(&rel) {
            Some(&keep) if keep <= len => {
                fs::OpenOptions::new().write(true).open(&path)?.set_len(keep)?;
            }
            Some(_) => {
                return Err(PipelineError::CheckpointMismatch(format!("{rel} is shorter than recorded")));
            }
            None => fs::remove_file(&path)?,
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct GenerateOptions {
    /// Fallback statistics for parameters the network lacks.
    pub global: Option<NetworkProfile>,
    /// Stop abruptly once this many scenarios are accepted, leaving the
    /// staging folder as a killed run would.
    pub halt_after: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub dir: PathBuf,
    pub accepted: usize,
    pub candidates: u64,
    pub rejected_by: BTreeMap<String, usize>,
    pub resumed: bool,
}

struct Candidate {
    index: u64,
    result: Result<ScenarioResult, String>,
    model: Option<NetworkModel>,
}

pub fn staging_dir(run: &RunConfig, network: &str) -> Result<PathBuf, PipelineError> {
    let token = duration_token(run.adg.duration)
        .ok_or_else(|| PipelineError::InvalidConfig("duration must be 24 or 8760 hours".into()))?;
    Ok(Path::new(&run.output_path).join(format!("{network}_staging_{token}")))
}

pub fn generate_dataset(run: &RunConfig, model: &NetworkModel) -> Result<DatasetSummary, PipelineError> {
    generate_dataset_with(run, model, &GenerateOptions::default())
}

/// Generate `num_samples` valid scenarios into
/// `<output_path>/<network>_<N>GB_<24H|1Y>`. Work happens in a staging
/// folder that is checkpointed every `backup_times` rounds; calling again
/// after an interruption resumes from the last checkpoint and yields the
/// same files as an uninterrupted run.
pub fn generate_dataset_with(
    run: &RunConfig,
    model: &NetworkModel,
    options: &GenerateOptions,
) -> Result<DatasetSummary, PipelineError> {
    run.validate()?;
    let network = if model.name.is_empty() { "network" } else { model.name.as_str() };
    let ctx = ScenarioContext::new(model, run.adg.clone(), options.global.clone(), run.seed);
    let rules = run.rules(&ctx.model);
    let staging = staging_dir(run, network)?;
    let plans = plan_tables(&ctx, run);
    let fp = fingerprint(run);

    let ckpt_path = staging.join(CHECKPOINT_FILE);
    let resumed = ckpt_path.exists();
    let mut ckpt = if resumed {
        let ckpt: Checkpoint = serde_json::from_slice(&fs::read(&ckpt_path)?)?;
        if ckpt.fingerprint != fp {
            return Err(PipelineError::CheckpointMismatch(
                "configuration differs from the interrupted run".into(),
            ));
        }
        restore(&staging, &ckpt)?;
        ckpt
    } else {
        if staging.exists() {
            return Err(PipelineError::AlreadyExists(staging));
        }
        fs::create_dir_all(&staging)?;
        let ckpt = Checkpoint {
            fingerprint: fp,
            accepted: 0,
            next_candidate: 0,
            index_tracers: Vec::new(),
            writers: BTreeMap::new(),
            files: BTreeMap::new(),
            window: Vec::new(),
            rejected_by: BTreeMap::new(),
        };
        write_atomic(&ckpt_path, &serde_json::to_vec(&ckpt)?)?;
        ckpt
    };

    let max_rows = if run.max_rows_per_shard == 0 { DEFAULT_MAX_ROWS } else { run.max_rows_per_shard };
    let mut writers: Vec<ShardedWriter> = plans
        .iter()
        .map(|p| {
            let w = ShardedWriter::new(&staging, p.name.clone(), p.header.clone(), max_rows);
            match ckpt.writers.get(&p.name.key()) {
                Some(state) => w.resume(*state),
                None => w,
            }
        })
        .collect();
    if run.save_success_inp {
        fs::create_dir_all(staging.join("inp"))?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.num_cpus)
        .build()
        .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
    let mut window: VecDeque<Option<String>> = ckpt.window.iter().cloned().collect();
    let mut rounds = 0usize;

    while ckpt.accepted < run.num_samples {
        let start = ckpt.next_candidate;
        let indices: Vec<u64> = (start..start + run.gen_batch_size as u64).collect();
        let candidates: Vec<Candidate> = pool.install(|| {
            indices
                .par_chunks(run.batch_size)
                .flat_map_iter(|chunk| {
                    chunk
                        .par_iter()
                        .map(|&i| {
                            let mut rng = scenario_rng(run.seed, i);
                            match sample_scenario(&ctx, &run.sampling, &mut rng) {
                                Ok(s) => {
                                    let result = simulate_scenario(&s.model, s.inputs, &rules);
                                    let model = (run.save_success_inp && result.valid).then_some(s.model);
                                    Candidate { index: i, result: Ok(result), model }
                                }
                                Err(e) => Candidate { index: i, result: Err(e.to_string()), model: None },
                            }
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        });

        for c in candidates {
            if ckpt.accepted >= run.num_samples {
                break;
            }
            ckpt.next_candidate = c.index + 1;
            let outcome = match &c.result {
                Ok(r) if r.valid => None,
                Ok(r) => Some(r.failure_reason.map_or("unknown".to_string(), |f| f.key().to_string())),
                Err(_) => Some("sampling_error".to_string()),
            };
            window.push_back(outcome.clone());
            if window.len() > run.acceptance_window {
                window.pop_front();
            }
            match outcome {
                Some(reason) => *ckpt.rejected_by.entry(reason).or_default() += 1,
                None => {
                    let result = c.result.as_ref().expect("accepted results are Ok");
                    for (plan, writer) in plans.iter().zip(writers.iter_mut()) {
                        write_scenario(plan, writer, ckpt.accepted, result)?;
                    }
                    if let Some(m) = &c.model {
                        fs::write(staging.join("inp").join(format!("{}.inp", ckpt.accepted)), serialize_inp(m))?;
                    }
                    ckpt.index_tracers.push(c.index);
                    ckpt.accepted += 1;
                    if run.verbose {
                        log::info!("accepted {}/{} (candidate {})", ckpt.accepted, run.num_samples, c.index);
                    }
                    if options.halt_after == Some(ckpt.accepted) {
                        for w in writers.iter_mut() {
                            w.flush()?;
                        }
                        return Err(PipelineError::Halted { accepted: ckpt.accepted });
                    }
                }
            }
        }

        if window.len() >= run.acceptance_window {
            let ok = window.iter().filter(|o| o.is_none()).count();
            let rate = ok as f64 / window.len() as f64;
            if rate < run.acceptance_floor {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for reason in window.iter().flatten() {
                    *counts.entry(reason).or_default() += 1;
                }
                let dominant = counts
                    .iter()
                    .max_by_key(|(_, n)| **n)
                    .map_or("none".to_string(), |(r, _)| r.to_string());
                return Err(PipelineError::QuotaUnreachable {
                    rate,
                    window: window.len(),
                    dominant,
                });
            }
        }

        rounds += 1;
        if rounds.is_multiple_of(run.backup_every()) && ckpt.accepted < run.num_samples {
            for w in writers.iter_mut() {
                w.flush()?;
            }
            ckpt.writers = writers.iter().map(|w| (w.key(), w.state())).collect();
            ckpt.files = data_files(&staging)?;
            ckpt.window = window.iter().cloned().collect();
            let mut snapshot = run.clone();
            snapshot.index_tracers = ckpt.index_tracers.clone();
            fs::write(staging.join(METADATA_FILE), write_metadata(&snapshot, &ctx.model).to_markdown())?;
            write_atomic(&ckpt_path, &serde_json::to_vec(&ckpt)?)?;
        }
    }

    for w in writers.iter_mut() {
        w.flush()?;
    }
    drop(writers);
    let mut finished = run.clone();
    finished.index_tracers = ckpt.index_tracers.clone();
    fs::write(staging.join(METADATA_FILE), write_metadata(&finished, &ctx.model).to_markdown())?;
    fs::remove_file(&ckpt_path)?;
    let bytes: u64 = data_files(&staging)?.values().sum::<u64>() + fs::metadata(staging.join(METADATA_FILE))?.len();
    let token = duration_token(run.adg.duration).expect("validated");
    let target = Path::new(&run.output_path).join(folder_name(network, capacity_gb(bytes), token));
    if target.exists() {
        return Err(PipelineError::AlreadyExists(target));
    }
    fs::rename(&staging, &target)?;
    Ok(DatasetSummary {
        dir: target,
        accepted: ckpt.accepted,
        candidates: ckpt.next_candidate,
        rejected_by: ckpt.rejected_by,
        resumed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tables: usize,
    pub files: usize,
    pub rows: usize,
}

/// Re-check a written dataset: file names, table shapes and junction
/// pressures against the recorded range.
pub fn validate_dataset(dir: &Path) -> Result<ValidationReport, PipelineError> {
    let meta_path = dir.join(METADATA_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| PipelineError::Layout {
        file: meta_path.display().to_string(),
        reason: e.to_string(),
    })?;
    let meta = Metadata::from_markdown(&text)?;
    let n = meta.run.num_samples;
    let steps = meta.run.steps();
    let mut groups: BTreeMap<String, Vec<(TableName, PathBuf)>> = BTreeMap::new();
    let mut files = 0;
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() || path.extension().is_none_or(|e| e != TABLE_EXTENSION) {
            continue;
        }
        let file = path.file_name().and_then(|f| f.to_str()).unwrap_or_default().to_string();
        let name = TableName::parse(&file).ok_or_else(|| PipelineError::Layout {
            file: path.display().to_string(),
            reason: "name does not follow <component>_<parameter>_<index>_<type>_<io>".into(),
        })?;
        files += 1;
        groups.entry(name.key()).or_default().push((name, path));
    }
    let mut rows_total = 0;
    for (key, mut shards) in groups.iter_mut().map(|(k, v)| (k.clone(), std::mem::take(v))) {
        shards.sort_by_key(|(name, _)| name.index);
        for (expected, (name, path)) in shards.iter().enumerate() {
            if name.index != expected {
                return Err(PipelineError::Layout {
                    file: path.display().to_string(),
                    reason: format!("shard {expected} is missing"),
                });
            }
        }
        let table_type = shards[0].0.table_type;
        let mut rows = Vec::new();
        let mut header: Option<Vec<String>> = None;
        for (_, path) in &shards {
            let t = read_table(path)?;
            let expect = header_for(table_type, std::iter::empty());
            if t.header.len() <= expect.len() || t.header[..expect.len()] != expect[..] {
                return Err(PipelineError::Layout {
                    file: path.display().to_string(),
                    reason: "unexpected index columns".into(),
                });
            }
            if t.rows.iter().any(|r| r.len() != t.header.len()) {
                return Err(PipelineError::Layout {
                    file: path.display().to_string(),
                    reason: "ragged rows".into(),
                });
            }
            if header.get_or_insert_with(|| t.header.clone()) != &t.header {
                return Err(PipelineError::Layout {
                    file: path.display().to_string(),
                    reason: "header differs between shards".into(),
                });
            }
            rows.extend(t.rows);
        }
        let per_scenario = match table_type {
            TableType::Static => 1,
            TableType::Dynamic => steps,
            TableType::Curve => rows.len() / n.max(1),
        };
        let first = &shards[0].1;
        if rows.len() != n * per_scenario || per_scenario == 0 {
            return Err(PipelineError::Layout {
                file: first.display().to_string(),
                reason: format!("{} rows, expected {} scenarios x {per_scenario}", rows.len(), n),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row[0] != (r / per_scenario) as f64 {
                return Err(PipelineError::Layout {
                    file: first.display().to_string(),
                    reason: format!("row {r} has scenario {} out of order", row[0]),
                });
            }
        }
        if key == "junction_pressure_dynamic_output" {
            let (lo, hi) = meta.run.pressure_range;
            let width = header.as_ref().map_or(0, Vec::len);
            for row in &rows {
                if let Some(v) = row[2..width].iter().find(|v| !(**v > lo && **v <= hi)) {
                    return Err(PipelineError::Layout {
                        file: first.display().to_string(),
                        reason: format!("pressure {v} outside ({lo}, {hi}]"),
                    });
                }
            }
        }
        rows_total += rows.len();
    }
    Ok(ValidationReport {
        tables: groups.len(),
        files,
        rows: rows_total,
    })
}

mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use wdngen::hspo::{hspo_run, Evaluator, SwarmConfig};
use wdngen::inp::{read_inp_file, InpError, NetworkModel};
use wdngen::pipeline::{generate_dataset, validate_dataset, PipelineError, RunConfig};
use wdngen::profiler::profile_network;
use wdngen::strategies::{SamplingConfig, ScenarioContext};

#[derive(Parser)]
#[command(name = "wdngen", version, about = "Generate hydraulic scenario datasets for water networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DurationArg {
    #[value(name = "24h")]
    Day,
    #[value(name = "1y")]
    Year,
}

impl DurationArg {
    fn hours(self) -> f64 {
        match self {
            DurationArg::Day => 24.0,
            DurationArg::Year => 8760.0,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PlotKind {
    DemandCorr,
    PressureDemand,
    DemandTs,
}

#[derive(Subcommand)]
enum Command {
    /// Print per-parameter statistics of a network.
    Profile { inp: PathBuf },
    /// Tune sampling bounds and write the tuned configuration.
    Optimize {
        inp: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination of the tuned YAML; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a dataset.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Network file; defaults to the first entry of `inp_paths`.
        #[arg(long)]
        inp: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        duration: Option<DurationArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Re-check the layout and pressure range of a dataset.
    Validate { dir: PathBuf },
    /// Render diagnostics of a dataset as a PNG.
    Plot {
        dir: PathBuf,
        #[arg(long, value_enum)]
        what: PlotKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Inp(#[from] InpError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Plot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Pipeline(e) => match e {
                PipelineError::InvalidConfig(_) => "invalid_config",
                PipelineError::QuotaUnreachable { .. } => "quota_unreachable",
                PipelineError::Layout { .. } => "layout",
                PipelineError::Metadata(_) => "metadata",
                PipelineError::AlreadyExists(_) => "already_exists",
                PipelineError::CheckpointMismatch(_) => "checkpoint_mismatch",
                PipelineError::Halted { .. } => "halted",
                PipelineError::Strategy(_) => "strategy",
                PipelineError::Io(_) => "io",
                PipelineError::Yaml(_) => "yaml",
                PipelineError::Json(_) => "json",
            },
            CliError::Inp(_) => "inp",
            CliError::Usage(_) => "usage",
            CliError::Plot(_) => "plot",
            CliError::Io(_) => "io",
        }
    }
}

fn load_run(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => Ok(RunConfig::from_yaml(&fs::read_to_string(p)?)?),
        None => Ok(RunConfig::default()),
    }
}

fn load_model(path: &Path) -> Result<NetworkModel, CliError> {
    let mut model = read_inp_file(path)?;
    if model.name.is_empty() {
        model.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "network".into());
    }
    Ok(model)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Profile { inp } => {
            let model = wdngen::convert_to_si(&load_model(&inp)?);
            print!("{}", profile_network(&model).to_table());
        }
        Command::Optimize { inp, config, epochs, cases, seed, out } => {
            let run = load_run(config.as_deref())?;
            let model = load_model(&inp)?;
            let ctx = ScenarioContext::new(&model, run.adg.clone(), None, seed);
            let rules = run.rules(&ctx.model);
            let start = if run.sampling.tunable().is_empty() {
                SamplingConfig::blueprint(&ctx.present, &ctx.baseline)
            } else {
                run.sampling.clone()
            };
            let swarm = SwarmConfig { max_epochs: epochs, n_cases: cases, ..SwarmConfig::default() };
            let ev = Evaluator::new(ctx, rules, swarm.n_cases, swarm.alpha, seed);
            let report = hspo_run(&ev, &start, &swarm, &mut ChaCha8Rng::seed_from_u64(seed));
            let fin = report.final_fitness();
            eprintln!(
                "epochs={} f_success={:.3}->{:.3} f_pso={:.4}->{:.4}",
                report.epochs.len(),
                report.initial.f_success,
                fin.f_success,
                report.initial.f_pso,
                fin.f_pso
            );
            let tuned = RunConfig { sampling: report.config, ..run };
            match out {
                Some(p) => fs::write(p, tuned.to_yaml())?,
                None => print!("{}", tuned.to_yaml()),
            }
        }
        Command::Generate { config, inp, n, duration, out, seed, workers } => {
            let mut run = load_run(config.as_deref())?;
            if let Some(n) = n {
                run.num_samples = n;
            }
            if let Some(d) = duration {
                run.adg.duration = d.hours();
            }
            if let Some(o) = out {
                run.output_path = o.display().to_string();
            }
            if let Some(s) = seed {
                run.seed = s;
            }
            if let Some(w) = workers {
                run.num_cpus = w;
            }
            let inp = match inp {
                Some(p) => p,
                None => run
                    .inp_paths
                    .first()
                    .map(PathBuf::from)
                    .ok_or_else(|| CliError::Usage("no network given: pass --inp or set inp_paths".into()))?,
            };
            if run.inp_paths.is_empty() {
                run.inp_paths.push(inp.display().to_string());
            }
            if run.verbose {
                env_logger::Builder::new().parse_filters("info").init();
            }
            let model = load_model(&inp)?;
            let summary = generate_dataset(&run, &model)?;
            println!(
                "dir={} accepted={} candidates={} resumed={}",
                summary.dir.display(),
                summary.accepted,
                summary.candidates,
                summary.resumed
            );
        }
        Command::Validate { dir } => {
            let report = validate_dataset(&dir)?;
            println!("ok tables={} files={} rows={}", report.tables, report.files, report.rows);
        }
        Command::Plot { dir, what, out } => {
            let out = out.unwrap_or_else(|| {
                let base = dir.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
                dir.with_file_name(format!("{base}_{}.png", plot::file_stem(what)))
            });
            let summary = plot::render(&dir, what, &out)?;
            println!("image={} {summary}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}

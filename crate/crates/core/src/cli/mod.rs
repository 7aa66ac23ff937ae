//! The `roundtrap` command line.
//!
//! Settings are resolved as flags over `--config` file over built-in
//! defaults. Each command writes its CSV and a `manifest.json` holding the
//! resolved settings, which `replay` feeds back in.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analysis::{
    conservation_drift, consistency_residual, effective_computation_time, median, optimal_step_size,
    predict_error_bound, spectral_analysis, stability_constant, truncation_residual_scale, BoundMode, ErrorBoundModel,
};
use crate::experiments::{
    longtime_run, sample_steps, stepsize_sweep, ExperimentError, LongRunConfig, Spacing, SweepConfig,
};
use crate::fpcore::{PrecisionConfig, SoftFloat};
use crate::oscillator::OscillatorParams;
use crate::schemes::{integrate_with_limit, step_count, update_matrix, SamplingPlan, Scheme, SchemeError};
use crate::BigRational;

use config::{parse_mode, Diagnostic, Series, Settings};
use output::{
    data_columns, fmt_f64, fmt_wide, read_series, read_sweep, timeseries_rows, write_csv, sweep_rows, RunManifest,
    Table, DIAGNOSTICS_CSV, DIAGNOSTICS_HEADER, SWEEP_CSV, SWEEP_HEADER, TIMESERIES_CSV, TIMESERIES_HEADER,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::TooManySteps { .. } => CliError::Guard(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Scheme(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "roundtrap", version, about = "Round-off versus truncation error experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Total, truncation and round-off error at the final time for a list of step sizes.
    Sweep(SweepArgs),
    /// Round-off and truncation error over time for one step size.
    Longrun(LongrunArgs),
    /// Stability, conservation, consistency and error-bound diagnostics.
    Diagnose(DiagnoseArgs),
    /// Re-run the experiment recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// euler, midpoint or rk3.
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Significand bits of the run.
    #[arg(long)]
    p_run: Option<u32>,
    /// Significand bits of the reference; must exceed --p-run.
    #[arg(long)]
    p_ref: Option<u32>,
    #[arg(long)]
    max_steps: Option<u64>,
    /// JSON settings file (a manifest works too).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "ROUNDTRAP_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

impl Common {
    fn flags(&self) -> Settings {
        Settings {
            scheme: self.scheme,
            a: self.a,
            b: self.b,
            t_end: self.t_end,
            p_run: self.p_run,
            p_ref: self.p_ref,
            max_steps: self.max_steps,
            ..Settings::default()
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',')]
    dt_list: Option<Vec<f64>>,
    /// Worker threads for sweep legs (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct LongrunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    dt: Option<f64>,
    /// Number of sample times (at least 2).
    #[arg(long)]
    samples: Option<usize>,
    /// log or linear placement of sample times.
    #[arg(long)]
    spacing: Option<Spacing>,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[arg(value_enum)]
    kind: Diagnostic,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    spacing: Option<Spacing>,
    /// Error level for the effective computation time.
    #[arg(long)]
    threshold: Option<f64>,
    /// Time-series column for `ect`: E_r or E_t.
    #[arg(long)]
    series: Option<Series>,
    /// Error accumulation model for `bound`: worst_case or random_walk.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<BoundMode>,
    /// CSV produced by an earlier run (`ect`, `os`).
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Where to write the replayed files (default: `replay/` next to the manifest).
    #[arg(long, env = "ROUNDTRAP_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Compare the replayed data columns with the recorded files.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    run(std::env::args())
}

/// Parses `args` (program name first), runs the command and reports errors
/// on stderr. Returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("roundtrap: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, argv: &[String]) -> Result<(), CliError> {
    match command {
        Command::Sweep(args) => {
            let settings = resolve(&args.common, Settings::sweep_defaults(), Settings { dt_list: args.dt_list, ..args.common.flags() })?;
            cmd_sweep(&settings, &args.common.out_dir, args.jobs, argv)
        }
        Command::Longrun(args) => {
            let flags = Settings { dt: args.dt, samples: args.samples, spacing: args.spacing, ..args.common.flags() };
            let settings = resolve(&args.common, Settings::longrun_defaults(), flags)?;
            cmd_longrun(&settings, &args.common.out_dir, argv)
        }
        Command::Diagnose(args) => {
            let flags = Settings {
                dt: args.dt,
                samples: args.samples,
                spacing: args.spacing,
                threshold: args.threshold,
                series: args.series,
                mode: args.mode,
                input: args.input.map(absolute),
                ..args.common.flags()
            };
            let settings = resolve(&args.common, Settings::diagnose_defaults(args.kind), flags)?;
            // The positional kind always wins over a config file.
            let settings = Settings { diagnostic: Some(args.kind), ..settings }.restrict_to(args.kind);
            cmd_diagnose(&settings, &args.common.out_dir, argv)
        }
        Command::Replay(args) => cmd_replay(&args, argv),
    }
}

fn absolute(p: PathBuf) -> PathBuf {
    std::path::absolute(&p).unwrap_or(p)
}

fn resolve(common: &Common, defaults: Settings, flags: Settings) -> Result<Settings, CliError> {
    let file = match &common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    Ok(defaults.overlay(&file).overlay(&flags))
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Usage(format!("missing setting {name}")))
}

fn params_of(s: &Settings) -> Result<OscillatorParams, CliError> {
    OscillatorParams::new(need(&s.a, "a")?, need(&s.b, "b")?).map_err(|e| CliError::Usage(e.to_string()))
}

fn precision(bits: u32) -> Result<PrecisionConfig, CliError> {
    PrecisionConfig::new(bits).map_err(|e| CliError::Usage(e.to_string()))
}

/// Run and reference precisions; the reference must be strictly wider.
fn precisions(s: &Settings) -> Result<(PrecisionConfig, PrecisionConfig), CliError> {
    let run = precision(need(&s.p_run, "p_run")?)?;
    let reference = precision(need(&s.p_ref, "p_ref")?)?;
    if reference <= run {
        return Err(CliError::Usage(format!("--p-ref ({}) must be wider than --p-run ({})", reference.bits(), run.bits())));
    }
    Ok((run, reference))
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn cmd_sweep(s: &Settings, out_dir: &Path, jobs: Option<usize>, argv: &[String]) -> Result<(), CliError> {
    let (run, reference) = precisions(s)?;
    let cfg = SweepConfig {
        scheme: need(&s.scheme, "scheme")?,
        params: params_of(s)?,
        t_end: need(&s.t_end, "t_end")?,
        dt_list: need(&s.dt_list, "dt_list")?,
        run_precision: run,
        ref_precision: reference,
        max_steps: need(&s.max_steps, "max_steps")?,
    };
    cfg.validate()?;
    prepare_dir(out_dir)?;
    let records = with_jobs(jobs, || stepsize_sweep(&cfg))??;
    write_csv(&out_dir.join(SWEEP_CSV), &SWEEP_HEADER, &sweep_rows(&records))?;
    RunManifest::new("sweep", argv, s.clone(), &[SWEEP_CSV]).write(out_dir)?;
    Ok(())
}

fn cmd_longrun(s: &Settings, out_dir: &Path, argv: &[String]) -> Result<(), CliError> {
    let (run, reference) = precisions(s)?;
    let cfg = LongRunConfig {
        scheme: need(&s.scheme, "scheme")?,
        params: params_of(s)?,
        dt: need(&s.dt, "dt")?,
        t_end: need(&s.t_end, "t_end")?,
        run_precision: run,
        ref_precision: reference,
        sample_count: need(&s.samples, "samples")?,
        spacing: need(&s.spacing, "spacing")?,
        max_steps: need(&s.max_steps, "max_steps")?,
    };
    // Cheap checks first so bad arguments fail before any output exists.
    let n = step_count(cfg.dt, cfg.t_end, cfg.max_steps)?;
    sample_steps(n, cfg.sample_count, cfg.spacing)?;
    prepare_dir(out_dir)?;
    let records = longtime_run(&cfg)?;
    write_csv(&out_dir.join(TIMESERIES_CSV), &TIMESERIES_HEADER, &timeseries_rows(&records))?;
    RunManifest::new("longrun", argv, s.clone(), &[TIMESERIES_CSV]).write(out_dir)?;
    Ok(())
}

fn row(kind: Diagnostic, key: impl Into<String>, value: impl Into<String>) -> Vec<String> {
    vec![kind.name().to_string(), key.into(), value.into()]
}

fn cmd_diagnose(s: &Settings, out_dir: &Path, argv: &[String]) -> Result<(), CliError> {
    let kind = need(&s.diagnostic, "diagnostic")?;
    let rows = diagnose_rows(kind, s)?;
    prepare_dir(out_dir)?;
    write_csv(&out_dir.join(DIAGNOSTICS_CSV), &DIAGNOSTICS_HEADER, &rows)?;
    RunManifest::new("diagnose", argv, s.clone(), &[DIAGNOSTICS_CSV]).write(out_dir)?;
    Ok(())
}

fn input_path(s: &Settings) -> Result<PathBuf, CliError> {
    let path = need(&s.input, "input")?;
    if !path.is_file() {
        return Err(CliError::Io(format!("input file {} not found", path.display())));
    }
    Ok(path)
}

fn analysis_err(e: crate::analysis::AnalysisError) -> CliError {
    CliError::Usage(e.to_string())
}

fn diagnose_rows(kind: Diagnostic, s: &Settings) -> Result<Table, CliError> {
    let mut rows = Table::new();
    match kind {
        Diagnostic::Ect => {
            let series = need(&s.series, "series")?;
            let threshold = need(&s.threshold, "threshold")?;
            let data = read_series(&input_path(s)?, series.column())?;
            let ect = effective_computation_time(&data, threshold).map_err(analysis_err)?;
            rows.push(row(kind, fmt_f64(threshold), ect.map_or("none".to_string(), fmt_f64)));
        }
        Diagnostic::Os => {
            let sweep = read_sweep(&input_path(s)?)?;
            let best = optimal_step_size(&sweep).map_err(analysis_err)?;
            let e = best.errors.as_ref().expect("optimal record is complete");
            rows.push(row(kind, fmt_f64(best.dt), fmt_wide(&e.e)));
        }
        Diagnostic::Spectral => {
            let m = update_matrix::<BigRational>(need(&s.scheme, "scheme")?, &params_of(s)?, need(&s.dt, "dt")?, ());
            let spectrum = spectral_analysis(&m);
            rows.push(row(kind, "det", fmt_wide(&spectrum.det)));
            rows.push(row(kind, "modulus_1", fmt_wide(&spectrum.moduli.0)));
            rows.push(row(kind, "modulus_2", fmt_wide(&spectrum.moduli.1)));
            rows.push(row(kind, "spectral_radius", fmt_wide(&spectrum.spectral_radius())));
            rows.push(row(kind, "complex_pair", spectrum.complex_pair.to_string()));
        }
        Diagnostic::Drift => {
            let params = params_of(s)?;
            let (dt, t_end, max) = (need(&s.dt, "dt")?, need(&s.t_end, "t_end")?, need(&s.max_steps, "max_steps")?);
            let n = step_count(dt, t_end, max)?;
            let steps = sample_steps(n, need(&s.samples, "samples")?, need(&s.spacing, "spacing")?)?;
            let cfg = precision(need(&s.p_run, "p_run")?)?;
            let traj = integrate_with_limit::<SoftFloat>(
                need(&s.scheme, "scheme")?,
                &params,
                dt,
                t_end,
                cfg,
                &SamplingPlan::AtSteps(steps),
                max,
            )?;
            for (t, d) in conservation_drift(&traj, &params) {
                rows.push(row(kind, fmt_f64(t), fmt_wide(&d)));
            }
        }
        Diagnostic::Residual => {
            let params = params_of(s)?;
            let (dt, t_end, max) = (need(&s.dt, "dt")?, need(&s.t_end, "t_end")?, need(&s.max_steps, "max_steps")?);
            let cfg = precision(need(&s.p_run, "p_run")?)?;
            let traj = integrate_with_limit::<SoftFloat>(
                need(&s.scheme, "scheme")?,
                &params,
                dt,
                t_end,
                cfg,
                &SamplingPlan::EveryStep,
                max,
            )?;
            let res = consistency_residual(&traj, &params).map_err(analysis_err)?;
            let values: Vec<_> = res.iter().map(|(_, r)| *r).collect();
            let med = median(&values).ok_or_else(|| CliError::Usage("no residuals".into()))?;
            let max_r = values.iter().max().copied().expect("nonempty");
            rows.push(row(kind, "count", values.len().to_string()));
            rows.push(row(kind, "median", fmt_wide(&med)));
            rows.push(row(kind, "max", fmt_wide(&max_r)));
        }
        Diagnostic::Bound => {
            let params = params_of(s)?;
            let scheme = need(&s.scheme, "scheme")?;
            let dt = need(&s.dt, "dt")?;
            let n = step_count(dt, need(&s.t_end, "t_end")?, need(&s.max_steps, "max_steps")?)?;
            let cfg = precision(need(&s.p_run, "p_run")?)?;
            let model = ErrorBoundModel::for_precision(&params, cfg, need(&s.mode, "mode")?);
            let k = stability_constant(&update_matrix::<f64>(scheme, &params, dt, ()), n);
            let bound = predict_error_bound(&params, scheme, dt, n, &model).map_err(analysis_err)?;
            let round_only = predict_error_bound(&params, scheme, dt, n, &model.round_off_only()).map_err(analysis_err)?;
            rows.push(row(kind, "n_steps", n.to_string()));
            rows.push(row(kind, "stability_constant", fmt_f64(k)));
            rows.push(row(kind, "per_step_eps", fmt_f64(model.per_step_eps)));
            rows.push(row(kind, "truncation_scale", fmt_f64(truncation_residual_scale(&params, scheme, dt))));
            rows.push(row(kind, "round_off_bound", fmt_f64(round_only)));
            rows.push(row(kind, "total_bound", fmt_f64(bound)));
        }
    }
    Ok(rows)
}

fn cmd_replay(args: &ReplayArgs, argv: &[String]) -> Result<(), CliError> {
    let manifest = RunManifest::read(&args.manifest)?;
    let source_dir = args.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let out_dir = args.out_dir.clone().unwrap_or_else(|| source_dir.join("replay"));
    let s = &manifest.config;
    match manifest.command.as_str() {
        "sweep" => cmd_sweep(s, &out_dir, args.jobs, argv)?,
        "longrun" => cmd_longrun(s, &out_dir, argv)?,
        "diagnose" => cmd_diagnose(s, &out_dir, argv)?,
        other => return Err(CliError::Usage(format!("manifest has unknown command {other:?}"))),
    }
    if args.check {
        let mut differing = Vec::new();
        for name in &manifest.outputs {
            if data_columns(&source_dir.join(name))? != data_columns(&out_dir.join(name))? {
                differing.push(name.clone());
            }
        }
        if !differing.is_empty() {
            return Err(CliError::Mismatch(format!("replayed data differs in {}", differing.join(", "))));
        }
        println!("replay matches: {}", manifest.outputs.join(", "));
    }
    Ok(())
}

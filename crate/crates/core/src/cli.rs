//! Command-line front end.
//!
//! Every detector flag can also be set through an environment variable with
//! the `TRENDBAND_` prefix, e.g. `TRENDBAND_ALPHA=0.3`. Flags win over the
//! environment.
//!
//! Exit codes: 0 on success (whether or not anomalies were found), 2 on bad
//! input or flags, 3 when the series is too short to analyse.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::detection::{detect_offline, detect_with_period};
use crate::error::Error;
use crate::evalgen::{confusion, f1, gen_breakout, gen_hetero_sine, BreakoutSpec, HeteroSineSpec, LabeledSeries};
use crate::io::{format_indices, format_series, parse_indices, parse_series};
use crate::report::{Mode, OutputReport};
use crate::series::{DetectorConfig, TimeSeries};
use crate::streaming::{replay_from, Replay, StreamState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TOO_SHORT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "trendband", version, about = "Anomaly detection for univariate time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect anomalies in a series, offline or by replaying it online.
    Detect(DetectArgs),
    /// Write a synthetic fixture and its truth file.
    Gen(GenArgs),
    /// Score predicted indices against a truth file.
    Eval(EvalArgs),
    /// Replay a series with and without run skipping and compare.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn is_on(self) -> bool {
        self == Switch::On
    }
}

/// `auto` detects the period, `none` forces aperiodic buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PeriodChoice {
    Auto,
    Fixed(Option<usize>),
}

fn parse_period(s: &str) -> Result<PeriodChoice, String> {
    match s {
        "auto" => Ok(PeriodChoice::Auto),
        "none" => Ok(PeriodChoice::Fixed(None)),
        _ => match s.parse::<usize>() {
            Ok(p) if p >= 2 => Ok(PeriodChoice::Fixed(Some(p))),
            _ => Err(format!("expected auto, none or an integer >= 2, got {s:?}")),
        },
    }
}

#[derive(Debug, Args)]
struct DetectorFlags {
    #[arg(long, env = "TRENDBAND_ALPHA", default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, env = "TRENDBAND_FAS_THRESHOLD", default_value_t = 1.0)]
    fas_threshold: f64,
    /// Residual bounds multiplier for candidate outliers and the online trigger.
    #[arg(long, env = "TRENDBAND_MULTIPLIER", default_value_t = 2.0)]
    multiplier: f64,
    /// `auto` to detect it, `none` for aperiodic buckets, or a fixed period.
    #[arg(long, env = "TRENDBAND_PERIOD", default_value = "auto", value_parser = parse_period)]
    period: PeriodChoice,
}

impl DetectorFlags {
    fn config(&self) -> Result<DetectorConfig, Error> {
        let cfg = DetectorConfig {
            alpha: self.alpha,
            fas_threshold: self.fas_threshold,
            bound_multiplier: self.multiplier,
            ..DetectorConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Series file; reads standard input when omitted or `-`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, env = "TRENDBAND_MODE", default_value = "offline")]
    mode: Mode,
    /// Offline: fraction-sized quadratic buckets for aperiodic data.
    /// Online: skip runs while samples stay inside the last signal band.
    /// Defaults to off offline and on online.
    #[arg(long, value_enum, env = "TRENDBAND_OPTIMIZE")]
    optimize: Option<Switch>,
    /// Report destination; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    detector: DetectorFlags,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Sine with growing amplitude plus noise; no anomalies.
    Sine(SineArgs),
    /// Noise with a level shift at the break index.
    Breakout(BreakoutArgs),
}

#[derive(Debug, Args)]
struct FixtureOut {
    #[arg(long, short)]
    output: PathBuf,
    /// Truth file path; defaults to `<output>.truth`.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SineArgs {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 28)]
    period: usize,
    #[arg(long, default_value_t = 1.0)]
    base_amplitude: f64,
    #[arg(long, default_value_t = 0.01)]
    amplitude_growth: f64,
    #[arg(long, default_value_t = 0.05)]
    noise_sd: f64,
    #[command(flatten)]
    out: FixtureOut,
}

#[derive(Debug, Args)]
struct BreakoutArgs {
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long = "break", default_value_t = 250)]
    break_index: usize,
    /// Defaults to eight times the noise level.
    #[arg(long)]
    level_shift: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    noise_sd: f64,
    #[command(flatten)]
    out: FixtureOut,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Predicted indices, one per line, or a report written by `detect`.
    predictions: PathBuf,
    /// Truth indices, one per line.
    truth: PathBuf,
    /// Series length; taken from the report when predictions are one.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    tolerance: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    input: Option<PathBuf>,
    #[command(flatten)]
    detector: DetectorFlags,
}

/// Failure of a subcommand, mapped to an exit code by [`run`].
#[derive(Debug)]
enum Failure {
    Input(String),
    TooShort(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SeriesTooShort { .. } => Failure::TooShort(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read_text(path: Option<&Path>, stdin: &mut dyn Read) -> Result<String, Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn read_series(path: Option<&Path>, stdin: &mut dyn Read) -> Result<TimeSeries, Failure> {
    let text = read_text(path, stdin)?;
    let name = path.map_or("stdin".to_string(), |p| p.display().to_string());
    parse_series(&text).map_err(|e| Failure::Input(format!("{name}: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn online_replay(
    series: &TimeSeries,
    cfg: &DetectorConfig,
    period: PeriodChoice,
    optimize: bool,
) -> Result<Replay, Failure> {
    let state = match period {
        PeriodChoice::Auto => StreamState::new(),
        PeriodChoice::Fixed(p) => StreamState::with_period(p),
    };
    let replay = replay_from(state, series, cfg, optimize)?;
    if replay.runs_executed() == 0 {
        return Err(Error::SeriesTooShort { len: series.len(), required: cfg.min_detect_length }.into());
    }
    Ok(replay)
}

fn cmd_detect(args: &DetectArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = args.detector.config()?;
    let series = read_series(args.input.as_deref(), stdin)?;
    let started = Instant::now();
    let mut report = match args.mode {
        Mode::Offline => {
            let optimized = args.optimize.is_some_and(Switch::is_on);
            let r = match args.detector.period {
                PeriodChoice::Auto => detect_offline(&series, &cfg, optimized)?,
                PeriodChoice::Fixed(p) => detect_with_period(&series, &cfg, optimized, p)?,
            };
            OutputReport::from_anomaly_report(&r, series.len(), series.origin_index(), Mode::Offline, optimized, &cfg)
        }
        Mode::Online => {
            let optimize = args.optimize.is_none_or(Switch::is_on);
            let cfg = DetectorConfig { skip_runs: optimize, ..cfg };
            let replay = online_replay(&series, &cfg, args.detector.period, optimize)?;
            let last = replay.state.last_report().expect("at least one run");
            let mut out = OutputReport::from_anomaly_report(
                last,
                series.len(),
                series.origin_index(),
                Mode::Online,
                optimize,
                &cfg,
            );
            out.anomalies = replay.anomalies();
            out.candidates = Vec::new();
            out.runs_executed = Some(replay.runs_executed());
            out.pushes = Some(replay.state.samples_seen());
            out
        }
    };
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let text = report.to_json();
    match &args.output {
        Some(p) => write_file(p, &text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn write_fixture(fixture: &LabeledSeries, out: &FixtureOut) -> Result<(), Failure> {
    let truth = out.truth.clone().unwrap_or_else(|| {
        let mut s: OsString = out.output.clone().into_os_string();
        s.push(".truth");
        PathBuf::from(s)
    });
    write_file(&out.output, &format_series(fixture.series.values()))?;
    write_file(&truth, &format_indices(&fixture.truth))
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    match &args.kind {
        GenKind::Sine(a) => {
            let spec = HeteroSineSpec {
                n: a.n,
                period: a.period,
                base_amplitude: a.base_amplitude,
                amplitude_growth: a.amplitude_growth,
                noise_sd: a.noise_sd,
                seed: a.out.seed,
            };
            write_fixture(&gen_hetero_sine(&spec)?, &a.out)
        }
        GenKind::Breakout(a) => {
            let spec = BreakoutSpec {
                n: a.n,
                break_index: a.break_index,
                level_shift: a.level_shift.unwrap_or(8.0 * a.noise_sd),
                noise_sd: a.noise_sd,
                seed: a.out.seed,
            };
            write_fixture(&gen_breakout(&spec)?, &a.out)
        }
    }
}

fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let pred_text = read_text(Some(&args.predictions), &mut std::io::empty())?;
    let pred_name = args.predictions.display();
    let (predicted, report_n) = if pred_text.trim_start().starts_with('{') {
        let r = OutputReport::from_json(&pred_text).map_err(|e| Failure::Input(format!("{pred_name}: {e}")))?;
        (r.anomalies, Some(r.series_length))
    } else {
        (parse_indices(&pred_text).map_err(|e| Failure::Input(format!("{pred_name}: {e}")))?, None)
    };
    let truth_text = read_text(Some(&args.truth), &mut std::io::empty())?;
    let truth = parse_indices(&truth_text).map_err(|e| Failure::Input(format!("{}: {e}", args.truth.display())))?;
    let n = args
        .n
        .or(report_n)
        .ok_or_else(|| Failure::Input("--n is required when predictions are a plain index list".into()))?;
    if let Some(&bad) = predicted.iter().chain(&truth).find(|&&i| i >= n) {
        return Err(Failure::Input(format!("index {bad} outside a series of length {n}")));
    }
    let c = confusion(&predicted, &truth, n, args.tolerance);
    writeln!(stdout, "tp={} tn={} fp={} fn={} f1={:.6}", c.tp, c.tn, c.fp, c.fn_, f1(&c))
        .map_err(|e| Failure::Input(format!("stdout: {e}")))
}

fn fmt_list(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(","))
}

fn cmd_bench(args: &BenchArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = args.detector.config()?;
    let series = read_series(args.input.as_deref(), stdin)?;

    let t0 = Instant::now();
    let before = online_replay(&series, &cfg, args.detector.period, false)?;
    let time_before = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let after = online_replay(&series, &cfg, args.detector.period, true)?;
    let time_after = t1.elapsed().as_secs_f64() * 1e3;

    let a_before = before.anomalies();
    let a_after = after.anomalies();
    let only_before: Vec<usize> = a_before.iter().copied().filter(|i| !a_after.contains(i)).collect();
    let only_after: Vec<usize> = a_after.iter().copied().filter(|i| !a_before.contains(i)).collect();
    let agree = series.len() - only_before.len() - only_after.len();
    let speedup = if time_after > 0.0 { time_before / time_after } else { f64::INFINITY };

    let lines = [
        format!("pushes={}", series.len()),
        format!("runs_before={}", before.runs_executed()),
        format!("runs_after={}", after.runs_executed()),
        format!("time_before_ms={time_before:.3}"),
        format!("time_after_ms={time_after:.3}"),
        format!("speedup={speedup:.2}"),
        format!("anomalies_before={}", fmt_list(&a_before)),
        format!("anomalies_after={}", fmt_list(&a_after)),
        format!("verdicts_agree={agree}/{}", series.len()),
        format!("only_before={}", fmt_list(&only_before)),
        format!("only_after={}", fmt_list(&only_after)),
    ];
    for line in lines {
        writeln!(stdout, "{line}").map_err(|e| Failure::Input(format!("stdout: {e}")))?;
    }
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Detect(a) => cmd_detect(a, stdin, stdout),
        Command::Gen(a) => cmd_gen(a),
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdin, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::TooShort(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_TOO_SHORT
        }
    }
}

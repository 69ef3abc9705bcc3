//! `bbm`: characterize approximate multipliers and run the filter testbed.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 an exhaustive
//! sweep would exceed `--budget`.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bbm_core::booth::{dot_count_with, DotLayout};
use bbm_core::fir::{quap, FilterCoefficients, SnrPoint, Testbed, TestbedConfig, QUAP_TABLE_SCALE};
use bbm_core::report::{self, fmt_sig, ErrorRecord};
use bbm_core::stats::{self, SweepMode, SweepOptions, DEFAULT_BUDGET};
use bbm_core::{MultiplierKind, MultiplierSpec};

use output::OutputDir;

#[derive(Debug, Parser)]
#[command(
    name = "bbm",
    version,
    about = "Approximate multiplier characterization"
)]
struct Cli {
    /// Directory for report files.
    #[arg(long, global = true, env = "BBM_OUT_DIR", default_value = "bbm-out")]
    out_dir: PathBuf,

    /// Worker threads; never changes any output value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest number of input vectors an exhaustive sweep may apply.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Error statistics of one multiplier configuration.
    Characterize(CharacterizeArgs),
    /// Error statistics over a range of the breaking parameter.
    Sweep(SweepArgs),
    /// Output SNR of the filter testbed for one multiplier (or double precision).
    Fir(FirArgs),
    /// Output SNR over word lengths or vertical breaking levels.
    FirSweep(FirSweepArgs),
    /// Dots of the partial product diagram cleared by a breaking level.
    Dotcount(DotcountArgs),
    /// Quality-area-power figure of merit.
    Quap(QuapArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct MultiplierArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: MultiplierKind,
    #[arg(long)]
    wl: u32,
    #[arg(long)]
    vbl: Option<u32>,
    #[arg(long)]
    hbl: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
}

impl MultiplierArgs {
    fn spec(&self) -> Result<MultiplierSpec> {
        build_spec(self.kind, self.wl, self.vbl, self.hbl, self.k)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: Mode,
    /// Input pairs drawn in sampled mode.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl ModeArgs {
    fn sweep_mode(&self) -> SweepMode {
        match self.mode {
            Mode::Exhaustive => SweepMode::Exhaustive,
            Mode::Sampled => SweepMode::Sampled {
                samples: self.samples,
                seed: self.seed,
            },
        }
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("params").required(true).args(["values", "range"])))]
struct ParamListArgs {
    /// Comma separated parameter values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<u32>>,
    /// Half-open range `start:end[:step]`.
    #[arg(long)]
    range: Option<String>,
}

impl ParamListArgs {
    fn resolve(&self) -> Result<Vec<u32>> {
        match (&self.values, &self.range) {
            (Some(values), _) => Ok(values.clone()),
            (None, Some(range)) => parse_range(range),
            (None, None) => Ok(Vec::new()),
        }
    }
}

#[derive(Debug, Args)]
struct CharacterizeArgs {
    #[command(flatten)]
    multiplier: MultiplierArgs,
    #[command(flatten)]
    mode: ModeArgs,
    /// Also write an error histogram with this many bins.
    #[arg(long)]
    histogram_bins: Option<usize>,
    /// Base name of the report files.
    #[arg(long, default_value = "characterize")]
    name: String,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: MultiplierKind,
    #[arg(long)]
    wl: u32,
    #[command(flatten)]
    params: ParamListArgs,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, default_value = "sweep")]
    name: String,
}

#[derive(Debug, Args)]
struct TestbedArgs {
    /// JSON testbed configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coefficient file; the shipped 31-tap low-pass when omitted.
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

impl TestbedArgs {
    fn load(&self) -> Result<Testbed> {
        let config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                TestbedConfig::from_json(&text)?
            }
            None => TestbedConfig::default(),
        };
        let coeffs = match &self.coeffs {
            Some(path) => FilterCoefficients::load(path)?,
            None => FilterCoefficients::builtin(),
        };
        Ok(Testbed::new(config, coeffs)?)
    }
}

#[derive(Debug, Args)]
struct FirArgs {
    #[command(flatten)]
    testbed: TestbedArgs,
    /// Multiplier in the filter; double precision when omitted.
    #[arg(long, value_parser = parse_kind, requires = "wl")]
    kind: Option<MultiplierKind>,
    #[arg(long)]
    wl: Option<u32>,
    #[arg(long)]
    vbl: Option<u32>,
    #[arg(long)]
    hbl: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value = "fir")]
    name: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepAxis {
    /// Accurate Booth multiplier at each word length.
    Wl,
    /// Type0 broken Booth at `--wl` for each vertical breaking level.
    Vbl,
}

#[derive(Debug, Args)]
struct FirSweepArgs {
    #[command(flatten)]
    testbed: TestbedArgs,
    #[arg(long, value_enum)]
    over: SweepAxis,
    /// Word length of the VBL sweep.
    #[arg(long, default_value_t = 16)]
    wl: u32,
    #[command(flatten)]
    params: ParamListArgs,
    #[arg(long, default_value = "fir-sweep")]
    name: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Layout {
    T0,
    T1,
}

#[derive(Debug, Args)]
struct DotcountArgs {
    #[arg(long)]
    wl: u32,
    #[arg(long)]
    vbl: u32,
    #[arg(long, value_enum, default_value = "t0")]
    layout: Layout,
}

#[derive(Debug, Args)]
struct QuapArgs {
    /// Output SNR in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: f64,
    /// Area saving in percent.
    #[arg(long, allow_hyphen_values = true)]
    area: f64,
    /// Power saving in percent.
    #[arg(long, allow_hyphen_values = true)]
    power: f64,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    manifest: PathBuf,
}

/// A problem with the command line rather than with the run.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn parse_kind(s: &str) -> Result<MultiplierKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = MultiplierKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_range(text: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = text.split(':').collect();
    let number = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| usage(format!("bad number `{s}` in range `{text}`")))
    };
    let (start, end, step) = match parts.as_slice() {
        [a, b] => (number(a)?, number(b)?, 1),
        [a, b, s] => (number(a)?, number(b)?, number(s)?),
        _ => return Err(usage(format!("range `{text}` is not start:end[:step]"))),
    };
    if step == 0 {
        return Err(usage("range step must be positive"));
    }
    Ok((start..end).step_by(step as usize).collect())
}

fn build_spec(
    kind: MultiplierKind,
    wl: u32,
    vbl: Option<u32>,
    hbl: Option<u32>,
    k: Option<u32>,
) -> Result<MultiplierSpec> {
    let accepts = |flag: &str| match kind {
        MultiplierKind::AccurateBooth => false,
        MultiplierKind::BrokenBoothT0 | MultiplierKind::BrokenBoothT1 => flag == "vbl",
        MultiplierKind::Bam => flag == "vbl" || flag == "hbl",
        MultiplierKind::Block => flag == "k",
    };
    for (flag, value) in [("vbl", vbl), ("hbl", hbl), ("k", k)] {
        if value.is_some() && !accepts(flag) {
            return Err(usage(format!("--{flag} does not apply to {kind}")));
        }
    }
    MultiplierSpec::new(kind, wl, vbl.unwrap_or(0), hbl.unwrap_or(0), k.unwrap_or(0))
        .map_err(|e| usage(e.to_string()))
}

struct RunContext<'a> {
    out_dir: &'a Path,
    options: SweepOptions,
    args: Vec<String>,
}

fn characterize(ctx: &RunContext, a: &CharacterizeArgs) -> Result<()> {
    let spec = a.multiplier.spec()?;
    let mode = a.mode.sweep_mode();
    let histogram = a
        .histogram_bins
        .map(|bins| stats::error_histogram(&spec, bins, mode, &ctx.options))
        .transpose()?;
    let record = ErrorRecord {
        spec,
        report: stats::sweep(&spec, mode, &ctx.options)?,
    };
    let csv = report::error_csv(&[record]);
    print!("{csv}");

    let mut out = OutputDir::create(ctx.out_dir)?;
    out.write(&format!("{}.csv", a.name), &csv)?;
    out.write(
        &format!("{}.json", a.name),
        &report::to_json(&json!({ "sweep": mode, "results": [record] })),
    )?;
    if let Some(histogram) = &histogram {
        out.write(
            &format!("{}.histogram.csv", a.name),
            &report::histogram_csv(histogram),
        )?;
    }
    let params = json!({
        "spec": spec,
        "sweep": mode,
        "histogram_bins": a.histogram_bins,
        "budget": ctx.options.budget.to_string(),
    });
    out.finish(&a.name, "characterize", &ctx.args, params, a.mode.seed)
}

fn sweep(ctx: &RunContext, a: &SweepArgs) -> Result<()> {
    let values = a.params.resolve()?;
    let mode = a.mode.sweep_mode();
    let records: Vec<ErrorRecord> =
        stats::mse_vs_parameter_sweep(a.kind, a.wl, &values, mode, &ctx.options)
            .map_err(|e| match e {
                bbm_core::Error::BudgetExceeded { .. } => anyhow::Error::from(e),
                other => usage(other.to_string()),
            })?
            .into_iter()
            .map(ErrorRecord::from)
            .collect();
    let csv = report::error_csv(&records);
    print!("{csv}");

    let mut out = OutputDir::create(ctx.out_dir)?;
    out.write(&format!("{}.csv", a.name), &csv)?;
    out.write(
        &format!("{}.json", a.name),
        &report::to_json(&json!({ "sweep": mode, "results": records })),
    )?;
    let params = json!({
        "kind": a.kind,
        "wl": a.wl,
        "values": values,
        "sweep": mode,
        "budget": ctx.options.budget.to_string(),
    });
    out.finish(&a.name, "sweep", &ctx.args, params, a.mode.seed)
}

fn write_snr(
    ctx: &RunContext,
    testbed: &Testbed,
    command: &str,
    name: &str,
    points: &[SnrPoint],
    extra: serde_json::Value,
) -> Result<()> {
    let csv = report::snr_csv(points);
    print!("{csv}");

    let mut out = OutputDir::create(ctx.out_dir)?;
    out.write(&format!("{name}.csv"), &csv)?;
    out.write(
        &format!("{name}.json"),
        &report::to_json(&json!({
            "config": testbed.config,
            "taps": testbed.coeffs.taps,
            "input_scale": testbed.input_scale,
            "results": points,
        })),
    )?;
    let params = json!({
        "config": testbed.config,
        "coefficients": testbed.coeffs.provenance,
        "run": extra,
    });
    out.finish(name, command, &ctx.args, params, testbed.config.seed)
}

fn double_point(testbed: &Testbed) -> SnrPoint {
    let real = testbed.run_real();
    SnrPoint {
        kind: None,
        wl: 0,
        vbl: 0,
        snr_in_db: real.snr_in_db,
        snr_out_db: real.snr_out_db,
    }
}

fn fir(ctx: &RunContext, a: &FirArgs) -> Result<()> {
    let spec = match (a.kind, a.wl) {
        (Some(kind), Some(wl)) => Some(build_spec(kind, wl, a.vbl, a.hbl, a.k)?),
        (None, None) if a.vbl.is_none() && a.hbl.is_none() && a.k.is_none() => None,
        _ => return Err(usage("multiplier flags need --kind")),
    };
    let testbed = a.testbed.load().map_err(|e| usage(format!("{e:#}")))?;
    let point = match &spec {
        None => double_point(&testbed),
        Some(spec) => {
            let r = testbed.run_fixed(spec)?;
            SnrPoint {
                kind: Some(spec.kind),
                wl: spec.wl,
                vbl: spec.vbl,
                snr_in_db: r.snr_in_db,
                snr_out_db: r.snr_out_db,
            }
        }
    };
    write_snr(
        ctx,
        &testbed,
        "fir",
        &a.name,
        &[point],
        json!({ "spec": spec }),
    )
}

fn fir_sweep(ctx: &RunContext, a: &FirSweepArgs) -> Result<()> {
    let mut values = a.params.resolve()?;
    values.sort_unstable();
    values.dedup();
    let testbed = a.testbed.load().map_err(|e| usage(format!("{e:#}")))?;
    let swept = match a.over {
        SweepAxis::Wl => testbed.snr_sweep_wl(&values),
        SweepAxis::Vbl => testbed.snr_sweep_vbl(a.wl, &values),
    }
    .map_err(|e| usage(e.to_string()))?;
    let mut points = vec![double_point(&testbed)];
    points.extend(swept);
    let extra = json!({
        "over": format!("{:?}", a.over).to_lowercase(),
        "wl": a.wl,
        "values": values,
    });
    write_snr(ctx, &testbed, "fir-sweep", &a.name, &points, extra)
}

fn dotcount(a: &DotcountArgs) -> Result<()> {
    let (layout, label) = match a.layout {
        Layout::T0 => (DotLayout::TYPE0, "t0"),
        Layout::T1 => (DotLayout::TYPE1, "t1"),
    };
    let count = dot_count_with(layout, a.wl, a.vbl).map_err(|e| usage(e.to_string()))?;
    println!("wl,vbl,layout,nullified,total,fraction");
    println!(
        "{},{},{label},{},{},{}",
        a.wl,
        a.vbl,
        count.nullified,
        count.total,
        fmt_sig(count.fraction())
    );
    Ok(())
}

fn quap_cmd(a: &QuapArgs) -> Result<()> {
    let value = quap(a.snr, a.area, a.power);
    println!("snr_out_db,area_saving_pct,power_saving_pct,quap,quap_e4");
    println!(
        "{},{},{},{},{}",
        fmt_sig(a.snr),
        fmt_sig(a.area),
        fmt_sig(a.power),
        fmt_sig(value),
        fmt_sig(value / QUAP_TABLE_SCALE)
    );
    Ok(())
}

fn run(cli: Cli, args: Vec<String>) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        // A second call (replay) finds the pool already built; that is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let ctx = RunContext {
        out_dir: &cli.out_dir,
        options: SweepOptions {
            threads: None,
            budget: cli.budget,
        },
        args,
    };
    match &cli.command {
        Command::Characterize(a) => characterize(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Fir(a) => fir(&ctx, a),
        Command::FirSweep(a) => fir_sweep(&ctx, a),
        Command::Dotcount(a) => dotcount(a),
        Command::Quap(a) => quap_cmd(a),
        Command::Replay(a) => {
            let manifest = output::read_manifest(&a.manifest)?;
            let argv = std::iter::once("bbm".to_string()).chain(manifest.args.iter().cloned());
            let mut recorded =
                Cli::try_parse_from(argv).map_err(|e| usage(format!("manifest arguments: {e}")))?;
            if matches!(recorded.command, Command::Replay(_)) {
                bail!("a manifest cannot record a replay");
            }
            recorded.out_dir = cli.out_dir.clone();
            recorded.threads = cli.threads;
            run(recorded, manifest.args)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<bbm_core::Error>() {
        Some(bbm_core::Error::BudgetExceeded { .. }) => 3,
        Some(
            bbm_core::Error::WordLength { .. }
            | bbm_core::Error::Parameter { .. }
            | bbm_core::Error::Config(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

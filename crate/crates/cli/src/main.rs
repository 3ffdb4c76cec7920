//! Command-line front end: test an observed drawdown against an assumed
//! Sharpe ratio, invert quantiles, update the Sharpe estimate, compute
//! conditional corridors, emit curve tables for plotting, and run the
//! Monte Carlo validation report.
//!
//! Exit codes: 0 clean, 2 statistical flag raised, 1 operational error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use drawdown_core::{
    conditional_corridor, depth_quantile, depth_tail_prob, empirical_tail, ks_distance,
    length_quantile, length_tail_prob, psi_depth, rho_length, run_test, simulate,
    update_sharpe_from_depth, update_sharpe_from_length, Dimension, DrawdownObservation,
    ObservationSource, PnlSeries, ProcessSpec, SharpeUpdate, SimConfig, TestReport,
};

#[derive(Parser)]
#[command(
    name = "drawdown",
    version,
    about = "Last-drawdown statistics for drifted Brownian PnL: \
             is your losing streak consistent with your Sharpe ratio?"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test an observed drawdown (manual values or a PnL CSV) against an
    /// assumed Sharpe ratio
    Test(TestArgs),
    /// Tail quantiles of drawdown length and depth
    Quantile(QuantileArgs),
    /// Revise the Sharpe ratio so an observed drawdown sits at the tail
    /// threshold
    Update(UpdateArgs),
    /// Conditional length corridor for a drawdown of given depth
    Corridor(CorridorArgs),
    /// Quantile or corridor curves over a Sharpe grid, as CSV
    Curves(CurvesArgs),
    /// Simulate paths and validate analytic tails against the ensemble
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum MarginalArg {
    Length,
    Depth,
}

impl From<MarginalArg> for Dimension {
    fn from(m: MarginalArg) -> Self {
        match m {
            MarginalArg::Length => Dimension::Length,
            MarginalArg::Depth => Dimension::Depth,
        }
    }
}

#[derive(Args)]
struct TestArgs {
    /// Assumed (best-estimate) annualized Sharpe ratio
    #[arg(long)]
    sharpe: f64,
    /// Observation window in years (manual mode only; with --file it
    /// comes from the data)
    #[arg(long)]
    horizon: Option<f64>,
    /// Observed drawdown length in years
    #[arg(long)]
    length: Option<f64>,
    /// Observed drawdown length in trading days (converted via --frequency)
    #[arg(long, conflicts_with = "length")]
    length_days: Option<f64>,
    /// Observed drawdown depth in annualized sigma units
    #[arg(long)]
    depth: Option<f64>,
    /// Daily PnL CSV with header `date,pnl` (ISO dates, one row per
    /// trading day)
    #[arg(long)]
    file: Option<PathBuf>,
    /// Flagging threshold for each tail p-value
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    /// Trading days per year
    #[arg(long, default_value_t = 257.0)]
    frequency: f64,
    /// Minimum rows required for volatility normalization
    #[arg(long, default_value_t = 30)]
    min_history: usize,
    /// Use only the most recent N daily differences for the volatility
    /// estimate (default: full history)
    #[arg(long)]
    vol_window: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

#[derive(Args)]
struct QuantileArgs {
    #[arg(long)]
    sharpe: f64,
    #[arg(long)]
    horizon: f64,
    /// Tail probability the quantile corresponds to
    #[arg(long, default_value_t = 0.05)]
    tail: f64,
    /// Restrict to one marginal (default: both)
    #[arg(long, value_enum)]
    mode: Option<MarginalArg>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

#[derive(Args)]
struct UpdateArgs {
    #[arg(long)]
    horizon: f64,
    /// Observed drawdown length in years
    #[arg(long)]
    length: Option<f64>,
    /// Observed drawdown length in trading days
    #[arg(long, conflicts_with = "length")]
    length_days: Option<f64>,
    /// Observed drawdown depth in annualized sigma units
    #[arg(long)]
    depth: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    tail: f64,
    #[arg(long, default_value_t = 257.0)]
    frequency: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

#[derive(Args)]
struct CorridorArgs {
    #[arg(long)]
    sharpe: f64,
    #[arg(long)]
    horizon: f64,
    /// Observed drawdown depth d* in annualized sigma units
    #[arg(long)]
    depth_star: f64,
    #[arg(long, default_value_t = 0.05)]
    lower_tail: f64,
    #[arg(long, default_value_t = 0.05)]
    upper_tail: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveMode {
    LengthQuantile,
    DepthQuantile,
    CorridorUpper,
    CorridorLower,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long, value_enum)]
    mode: CurveMode,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 0.05)]
    tail: f64,
    #[arg(long)]
    sr_min: f64,
    #[arg(long)]
    sr_max: f64,
    #[arg(long)]
    sr_step: f64,
    /// Depth grid (corridor modes only)
    #[arg(long)]
    depth_min: Option<f64>,
    #[arg(long)]
    depth_max: Option<f64>,
    #[arg(long)]
    depth_step: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    output: OutputFormat,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    sharpe: f64,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 257)]
    steps_per_year: u32,
    /// Antithetic pairing (pass `--antithetic false` to disable)
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    antithetic: bool,
    /// Write the per-path (length, depth) sample to this CSV
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Standard-error multiplier in the comparison tolerance
    #[arg(long, default_value_t = 4.0)]
    se_multiplier: f64,
    /// Absolute term of the comparison tolerance. Default: 0.005 plus the
    /// first-order discretization bias at each threshold (the sampled
    /// maximum under-reads by ~0.58·sqrt(dt))
    #[arg(long)]
    allowance: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Quantile(args) => cmd_quantile(args).map(|()| ExitCode::SUCCESS),
        Command::Update(args) => cmd_update(args).map(|()| ExitCode::SUCCESS),
        Command::Corridor(args) => cmd_corridor(args).map(|()| ExitCode::SUCCESS),
        Command::Curves(args) => cmd_curves(args).map(|()| ExitCode::SUCCESS),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

/// 10 significant digits for machine-readable output.
fn sig10(v: f64) -> String {
    format!("{v:.9e}")
}

fn flag_exit(flagged: bool) -> ExitCode {
    if flagged {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn update_label(u: &Option<SharpeUpdate>) -> String {
    match u {
        None => String::new(),
        Some(SharpeUpdate::Revised(v)) => sig10(*v),
        Some(SharpeUpdate::ZeroDriftFloor) => "zero_drift_floor".to_string(),
    }
}

// ---------------------------------------------------------------- test

fn cmd_test(args: TestArgs) -> Result<ExitCode> {
    let manual_length = match (args.length, args.length_days) {
        (Some(l), None) => Some(l),
        (None, Some(days)) => Some(days / args.frequency),
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };

    let (spec, observation) = match (&args.file, manual_length, args.depth) {
        (Some(path), None, None) => {
            let bytes = fs::read(path)
                .with_context(|| format!("cannot read PnL file `{}`", path.display()))?;
            if args.horizon.is_some() {
                bail!("--horizon conflicts with --file: the window is taken from the data");
            }
            let series = PnlSeries::parse_csv_with_frequency(&bytes, args.frequency)
                .with_context(|| format!("parsing `{}`", path.display()))?;
            let normalized = series
                .normalize_with(args.min_history, args.vol_window)
                .with_context(|| format!("normalizing `{}`", path.display()))?;
            let extracted = normalized.extract_drawdown()?;
            let spec = ProcessSpec::new(args.sharpe, extracted.horizon)?;
            (spec, extracted.observation)
        }
        (None, Some(length), Some(depth)) => {
            let horizon = args
                .horizon
                .context("--horizon is required for a manual observation")?;
            let spec = ProcessSpec::new(args.sharpe, horizon)?;
            let obs = DrawdownObservation::new(length, depth, ObservationSource::Manual)?;
            (spec, obs)
        }
        _ => bail!(
            "provide either --file, or a manual observation as --length (or --length-days) \
             together with --depth"
        ),
    };

    if spec.sharpe() <= 0.0 {
        eprintln!(
            "note: non-positive Sharpe ratio {} is an unusual hypothesis for this test",
            spec.sharpe()
        );
    }

    let report = run_test(&spec, &observation, args.significance)?;
    print_test_report(&report, args.output)?;
    Ok(flag_exit(report.any_flag()))
}

fn print_test_report(report: &TestReport, output: OutputFormat) -> Result<()> {
    match output {
        OutputFormat::Jsonl => println!("{}", serde_json::to_string(report)?),
        OutputFormat::Csv => {
            println!(
                "sharpe,horizon,significance,obs_length,obs_depth,length_p_value,\
                 depth_p_value,length_flagged,depth_flagged,sharpe_from_length,sharpe_from_depth"
            );
            println!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                sig10(report.spec.sharpe()),
                sig10(report.spec.horizon()),
                sig10(report.significance),
                sig10(report.observation.length()),
                sig10(report.observation.depth()),
                sig10(report.length_p_value),
                sig10(report.depth_p_value),
                report.length_flagged,
                report.depth_flagged,
                update_label(&report.sharpe_from_length),
                update_label(&report.sharpe_from_depth),
            );
        }
        OutputFormat::Text => {
            let source = match report.observation.source() {
                ObservationSource::Manual => "manual",
                ObservationSource::Extracted => "extracted from file",
            };
            println!("Drawdown test");
            println!(
                "  model: Sharpe {:.4}, horizon {:.4}y, significance {:.1}%",
                report.spec.sharpe(),
                report.spec.horizon(),
                100.0 * report.significance
            );
            println!(
                "  observation ({source}): length {:.4}y, depth {:.4} sigma",
                report.observation.length(),
                report.observation.depth()
            );
            println!(
                "  length p-value: {:.4}{}",
                report.length_p_value,
                if report.length_flagged {
                    "  ** flagged **"
                } else {
                    ""
                }
            );
            println!(
                "  depth  p-value: {:.4}{}",
                report.depth_p_value,
                if report.depth_flagged {
                    "  ** flagged **"
                } else {
                    ""
                }
            );
            for (name, update) in [
                ("length", &report.sharpe_from_length),
                ("depth", &report.sharpe_from_depth),
            ] {
                match update {
                    None => {}
                    Some(SharpeUpdate::Revised(v)) => {
                        println!("  revised Sharpe from {name}: {v:.4}")
                    }
                    Some(SharpeUpdate::ZeroDriftFloor) => println!(
                        "  revised Sharpe from {name}: floored at 0 \
                         (observation extreme even under zero drift)"
                    ),
                }
            }
            println!("  verdict: {}", report.verdict);
        }
    }
    Ok(())
}

// ------------------------------------------------------------ quantile

#[derive(Serialize)]
struct QuantileRow {
    mode: Dimension,
    sharpe: f64,
    horizon: f64,
    tail: f64,
    value: f64,
}

fn cmd_quantile(args: QuantileArgs) -> Result<()> {
    let spec = ProcessSpec::new(args.sharpe, args.horizon)?;
    let modes: Vec<Dimension> = match args.mode {
        Some(m) => vec![m.into()],
        None => vec![Dimension::Length, Dimension::Depth],
    };
    let mut rows = Vec::new();
    for mode in modes {
        let value = match mode {
            Dimension::Length => length_quantile(&spec, args.tail)?,
            Dimension::Depth => depth_quantile(&spec, args.tail)?,
        };
        rows.push(QuantileRow {
            mode,
            sharpe: args.sharpe,
            horizon: args.horizon,
            tail: args.tail,
            value,
        });
    }
    match args.output {
        OutputFormat::Jsonl => {
            for row in &rows {
                println!("{}", serde_json::to_string(row)?);
            }
        }
        OutputFormat::Csv => {
            println!("mode,sharpe,horizon,tail,value");
            for row in &rows {
                println!(
                    "{},{},{},{},{}",
                    mode_name(row.mode),
                    sig10(row.sharpe),
                    sig10(row.horizon),
                    sig10(row.tail),
                    sig10(row.value)
                );
            }
        }
        OutputFormat::Text => {
            for row in &rows {
                let unit = match row.mode {
                    Dimension::Length => "years",
                    Dimension::Depth => "sigma",
                };
                println!(
                    "{} quantile at {:.1}% tail (SR {:.4}, T {:.4}y): {:.4} {unit}",
                    mode_name(row.mode),
                    100.0 * row.tail,
                    row.sharpe,
                    row.horizon,
                    row.value
                );
            }
        }
    }
    Ok(())
}

fn mode_name(mode: Dimension) -> &'static str {
    match mode {
        Dimension::Length => "length",
        Dimension::Depth => "depth",
    }
}

// -------------------------------------------------------------- update

#[derive(Serialize)]
struct UpdateReport {
    horizon: f64,
    tail: f64,
    from_length: Option<SharpeUpdate>,
    from_depth: Option<SharpeUpdate>,
    conservative: Option<SharpeUpdate>,
}

fn cmd_update(args: UpdateArgs) -> Result<()> {
    let length = match (args.length, args.length_days) {
        (Some(l), None) => Some(l),
        (None, Some(days)) => Some(days / args.frequency),
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    if length.is_none() && args.depth.is_none() {
        bail!("provide --length (or --length-days) and/or --depth");
    }
    let from_length = length
        .map(|l| update_sharpe_from_length(l, args.horizon, args.tail))
        .transpose()?;
    let from_depth = args
        .depth
        .map(|d| update_sharpe_from_depth(d, args.horizon, args.tail))
        .transpose()?;
    // The smaller revision is the cautious one when both dimensions speak.
    let conservative = match (from_length, from_depth) {
        (Some(a), Some(b)) => Some(if a.value() <= b.value() { a } else { b }),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    let report = UpdateReport {
        horizon: args.horizon,
        tail: args.tail,
        from_length,
        from_depth,
        conservative,
    };
    match args.output {
        OutputFormat::Jsonl => println!("{}", serde_json::to_string(&report)?),
        OutputFormat::Csv => {
            println!("horizon,tail,sharpe_from_length,sharpe_from_depth,conservative");
            println!(
                "{},{},{},{},{}",
                sig10(report.horizon),
                sig10(report.tail),
                update_label(&report.from_length),
                update_label(&report.from_depth),
                update_label(&report.conservative),
            );
        }
        OutputFormat::Text => {
            println!(
                "Sharpe update to put the observation at the {:.1}% tail (T {:.4}y):",
                100.0 * report.tail,
                report.horizon
            );
            for (name, upd) in [
                ("from length", report.from_length),
                ("from depth ", report.from_depth),
            ] {
                match upd {
                    None => {}
                    Some(SharpeUpdate::Revised(v)) => println!("  {name}: {v:.4}"),
                    Some(SharpeUpdate::ZeroDriftFloor) => println!(
                        "  {name}: floored at 0 (observation extreme even under zero drift)"
                    ),
                }
            }
            if let (Some(_), Some(_)) = (report.from_length, report.from_depth) {
                let c = report.conservative.expect("both present");
                println!("  conservative (smaller of the two): {:.4}", c.value());
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------ corridor

fn cmd_corridor(args: CorridorArgs) -> Result<()> {
    let spec = ProcessSpec::new(args.sharpe, args.horizon)?;
    let corridor = conditional_corridor(&spec, args.depth_star, args.lower_tail, args.upper_tail)?;
    match args.output {
        OutputFormat::Jsonl => println!("{}", serde_json::to_string(&corridor)?),
        OutputFormat::Csv => {
            println!("sharpe,horizon,depth_star,lower,upper,coverage");
            println!(
                "{},{},{},{},{},{}",
                sig10(args.sharpe),
                sig10(args.horizon),
                sig10(corridor.depth_star),
                sig10(corridor.lower),
                sig10(corridor.upper),
                sig10(corridor.coverage),
            );
        }
        OutputFormat::Text => {
            println!(
                "Conditional length corridor for depth {:.4} sigma (SR {:.4}, T {:.4}y):",
                corridor.depth_star, args.sharpe, args.horizon
            );
            println!(
                "  a drawdown this deep lasts between {:.4}y and {:.4}y with {:.0}% probability",
                corridor.lower,
                corridor.upper,
                100.0 * corridor.coverage
            );
        }
    }
    Ok(())
}

// -------------------------------------------------------------- curves

fn linear_grid(min: f64, max: f64, step: f64, what: &str) -> Result<Vec<f64>> {
    let grid_ok = min > 0.0 && max >= min && step > 0.0;
    if !grid_ok {
        bail!("invalid {what} grid: need 0 < min <= max and step > 0");
    }
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let v = min + step * k as f64;
        if v > max + 1e-12 * step {
            break;
        }
        grid.push(v);
        k += 1;
    }
    Ok(grid)
}

fn cmd_curves(args: CurvesArgs) -> Result<()> {
    let grid = linear_grid(args.sr_min, args.sr_max, args.sr_step, "Sharpe")?;
    match args.mode {
        CurveMode::LengthQuantile | CurveMode::DepthQuantile => {
            if args.output != OutputFormat::Jsonl {
                println!("sharpe,value");
            }
            for &sr in &grid {
                let spec = ProcessSpec::new(sr, args.horizon)?;
                let value = match args.mode {
                    CurveMode::LengthQuantile => length_quantile(&spec, args.tail)?,
                    _ => depth_quantile(&spec, args.tail)?,
                };
                if args.output == OutputFormat::Jsonl {
                    println!("{}", serde_json::json!({"sharpe": sr, "value": value}));
                } else {
                    println!("{},{}", sig10(sr), sig10(value));
                }
            }
        }
        CurveMode::CorridorUpper | CurveMode::CorridorLower => {
            let (dmin, dmax, dstep) = match (args.depth_min, args.depth_max, args.depth_step) {
                (Some(a), Some(b), Some(s)) => (a, b, s),
                _ => bail!(
                    "corridor curves need a depth grid: --depth-min, --depth-max, --depth-step"
                ),
            };
            let depths = linear_grid(dmin, dmax, dstep, "depth")?;
            if args.output != OutputFormat::Jsonl {
                println!("sharpe,depth,value");
            }
            for &sr in &grid {
                let spec = ProcessSpec::new(sr, args.horizon)?;
                for &d in &depths {
                    let c = conditional_corridor(&spec, d, args.tail, args.tail)?;
                    let value = match args.mode {
                        CurveMode::CorridorUpper => c.upper,
                        _ => c.lower,
                    };
                    if args.output == OutputFormat::Jsonl {
                        println!(
                            "{}",
                            serde_json::json!({"sharpe": sr, "depth": d, "value": value})
                        );
                    } else {
                        println!("{},{},{}", sig10(sr), sig10(d), sig10(value));
                    }
                }
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------ simulate

#[derive(Serialize)]
struct TailCheckRow {
    dimension: Dimension,
    threshold: f64,
    analytic: f64,
    empirical: f64,
    std_error: f64,
    tolerance: f64,
    ok: bool,
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let spec = ProcessSpec::new(args.sharpe, args.horizon)?;
    if args.sharpe <= 0.0 {
        eprintln!("note: non-positive drift; validating against fixed thresholds");
    }
    let config = SimConfig::new(spec, args.paths, args.seed)
        .with_steps_per_year(args.steps_per_year)
        .with_antithetic(args.antithetic);
    let sample = simulate(&config)?;

    if let Some(path) = &args.dump {
        let file = fs::File::create(path)
            .with_context(|| format!("cannot create dump file `{}`", path.display()))?;
        sample
            .write_csv(std::io::BufWriter::new(file))
            .with_context(|| format!("writing `{}`", path.display()))?;
    }

    // Thresholds: analytic tail quantiles when the drift admits them,
    // otherwise fixed grid points with analytically computed tails.
    let mut checks: Vec<(Dimension, f64, f64)> = Vec::new();
    if args.sharpe > 0.0 {
        for &p in &[0.5, 0.25, 0.1, 0.05] {
            checks.push((Dimension::Length, length_quantile(&spec, p)?, p));
            checks.push((Dimension::Depth, depth_quantile(&spec, p)?, p));
        }
    } else {
        for &frac in &[0.25, 0.5, 0.75] {
            let x = frac * args.horizon;
            checks.push((Dimension::Length, x, length_tail_prob(&spec, x)?));
        }
        for &mult in &[0.5, 1.0, 2.0] {
            let d = mult * args.horizon.sqrt();
            checks.push((Dimension::Depth, d, depth_tail_prob(&spec, d)?));
        }
    }

    let max_shift = 0.5826 / f64::from(args.steps_per_year).sqrt();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for (dimension, threshold, analytic) in checks {
        let (empirical, std_error) = empirical_tail(&sample, dimension, threshold)?;
        let absolute = match args.allowance {
            Some(a) => a,
            None => {
                // First-order lattice effects: depth tails slide left by
                // max_shift·psi; length tails smear by about one grid cell.
                let bias = match dimension {
                    Dimension::Depth => max_shift * psi_depth(&spec, threshold)?,
                    Dimension::Length => {
                        rho_length(&spec, threshold)? / f64::from(args.steps_per_year)
                    }
                };
                0.005 + bias
            }
        };
        let tolerance = args.se_multiplier * std_error + absolute;
        let ok = (empirical - analytic).abs() <= tolerance;
        all_ok &= ok;
        rows.push(TailCheckRow {
            dimension,
            threshold,
            analytic,
            empirical,
            std_error,
            tolerance,
            ok,
        });
    }

    // Zero drift adds the arcsine-law distribution check.
    let ks_row = if args.sharpe == 0.0 {
        let lengths: Vec<f64> = sample.pairs().iter().map(|p| p.0).collect();
        let horizon = args.horizon;
        let d = ks_distance(&lengths, |x| {
            if x <= 0.0 {
                0.0
            } else if x >= horizon {
                1.0
            } else {
                2.0 / std::f64::consts::PI * (x / horizon).sqrt().asin()
            }
        });
        let bound = 1.63 / (sample.len() as f64).sqrt() + 2.0 / f64::from(args.steps_per_year);
        all_ok &= d < bound;
        Some((d, bound, d < bound))
    } else {
        None
    };

    match args.output {
        OutputFormat::Jsonl => {
            for row in &rows {
                println!("{}", serde_json::to_string(row)?);
            }
            if let Some((d, bound, ok)) = ks_row {
                println!(
                    "{}",
                    serde_json::json!({
                        "check": "arcsine_ks", "statistic": d, "bound": bound, "ok": ok
                    })
                );
            }
        }
        OutputFormat::Csv => {
            println!("dimension,threshold,analytic,empirical,std_error,tolerance,ok");
            for row in &rows {
                println!(
                    "{},{},{},{},{},{},{}",
                    mode_name(row.dimension),
                    sig10(row.threshold),
                    sig10(row.analytic),
                    sig10(row.empirical),
                    sig10(row.std_error),
                    sig10(row.tolerance),
                    row.ok
                );
            }
            if let Some((d, bound, ok)) = ks_row {
                println!("arcsine_ks,,,{},,{},{}", sig10(d), sig10(bound), ok);
            }
        }
        OutputFormat::Text => {
            println!(
                "Monte Carlo validation: SR {:.4}, T {:.4}y, {} paths x {} steps/y, seed {}, antithetic {}",
                args.sharpe,
                args.horizon,
                args.paths,
                args.steps_per_year,
                args.seed,
                if args.antithetic { "on" } else { "off" }
            );
            println!(
                "  {:<8} {:>10} {:>10} {:>10} {:>10} {:>10}  status",
                "marginal", "threshold", "analytic", "empirical", "std.err", "tolerance"
            );
            for row in &rows {
                println!(
                    "  {:<8} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5}  {}",
                    mode_name(row.dimension),
                    row.threshold,
                    row.analytic,
                    row.empirical,
                    row.std_error,
                    row.tolerance,
                    if row.ok { "ok" } else { "OUT OF TOLERANCE" }
                );
            }
            if let Some((d, bound, ok)) = ks_row {
                println!(
                    "  arcsine-law KS distance: {d:.5} (bound {bound:.5})  {}",
                    if ok { "ok" } else { "OUT OF TOLERANCE" }
                );
            }
            println!("  result: {}", if all_ok { "PASS" } else { "FAIL" });
        }
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

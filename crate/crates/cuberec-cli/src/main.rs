//! `cuberec` — command-line laboratory for worst-case uniform recovery on
//! the unit cube.
//!
//! Exit codes: 0 on success, 1 when `verify` reports a failing check, 2 on
//! validation, resource, or I/O errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cuberec::adversary::{certify_lower_bound, estimate_k, DirectionSample};
use cuberec::core::{ClassKind, GridSpec, Point, SampleTable, SmoothnessClass};
use cuberec::designs::{build_recovery_design, default_step, DesignDocument};
use cuberec::envelopes::build_envelope_table;
use cuberec::lab::battery::battery;
use cuberec::lab::verify::verify_suite;
use cuberec::lab::{run_sweep, SweepConfig};
use cuberec::recover::{fit_taylor_models, sup_error};

#[derive(Parser)]
#[command(
    name = "cuberec",
    about = "Sampling designs, Taylor recovery, error envelopes, and lower-bound certificates on [0,1]^d",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a grid-plus-stencil sampling design and emit it as JSON.
    Design(DesignArgs),
    /// Recover a battery function from design samples and report the
    /// measured uniform error.
    Recover(RecoverArgs),
    /// Build a fooling-function certificate against a design file.
    Adversary(AdversaryArgs),
    /// Tabulate theoretical error envelopes as CSV.
    Envelope(EnvelopeArgs),
    /// Run a full experiment sweep from a JSON config.
    Sweep(SweepArgs),
    /// Run the invariant verification suite and emit its JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Grid subdivisions per axis.
    #[arg(long)]
    m: u32,
    /// Dimension of the cube.
    #[arg(long)]
    d: usize,
    /// Smoothness order.
    #[arg(long)]
    r: u32,
    /// Stencil step; defaults to 1/(2m·max(r-1,1)).
    #[arg(long)]
    h: Option<f64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    h: Option<f64>,
    /// Battery function id: const, affine, sinsum, gauss, bump-offcenter,
    /// poly-deg-r.
    #[arg(long)]
    function: String,
    /// Probe grid density for the sup-error search (at least 2m).
    #[arg(long = "probe-m")]
    probe_m: u32,
    /// Append a CSV row (d,r,m,h,n_points,sup_estimate,witness) here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdversaryArgs {
    /// Design JSON file (as emitted by `cuberec design`).
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    r: u32,
    /// Class kind: standard or directional.
    #[arg(long, default_value = "directional")]
    kind: String,
    #[arg(long = "probe-m")]
    probe_m: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnvelopeArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: u32,
    #[arg(long = "m-max")]
    m_max: u32,
    #[arg(long, default_value = "standard")]
    kind: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; overrides the config's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Recover(args) => cmd_recover(args),
        Command::Adversary(args) => cmd_adversary(args),
        Command::Envelope(args) => cmd_envelope(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_design(args: DesignArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let grid = GridSpec::new(args.m, args.d)?;
    let h = args.h.unwrap_or_else(|| default_step(&grid, args.r));
    let design = build_recovery_design(&grid, args.r, h)?;
    let doc = DesignDocument::from(&design);
    let mut json = serde_json::to_string(&doc)?;
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_recover(args: RecoverArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let grid = GridSpec::new(args.m, args.d)?;
    let h = args.h.unwrap_or_else(|| default_step(&grid, args.r));
    let f = battery(&args.function, args.r, args.d)?;
    let design = build_recovery_design(&grid, args.r, h)?;
    let samples = SampleTable::sample(&args.function, design.all_points().iter(), |x| f.value(x))?;
    let model = fit_taylor_models(&design, &samples)?;
    let report = sup_error(&model, |x| f.value(x), args.probe_m)?;

    if let Some(path) = &args.csv {
        let header = "d,r,m,h,n_points,sup_estimate,witness\n";
        let witness = report
            .witness
            .coords()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let row = format!(
            "{},{},{},{},{},{},{}\n",
            args.d,
            args.r,
            args.m,
            h,
            design.n_points(),
            report.sup_estimate,
            witness
        );
        let mut content = match fs::read_to_string(path) {
            Ok(existing) if !existing.is_empty() => existing,
            _ => header.to_string(),
        };
        content.push_str(&row);
        fs::write(path, content)?;
    }

    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct AdversaryOutput {
    z: Point,
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "K_hat")]
    k_hat: f64,
    bound: f64,
    feasible: bool,
}

fn cmd_adversary(args: AdversaryArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let doc: DesignDocument = serde_json::from_str(&fs::read_to_string(&args.design)?)?;
    let points = doc.point_set()?;
    let kind: ClassKind = args.kind.parse()?;
    let cls = SmoothnessClass::new(args.r, doc.grid.d, kind)?;

    let d_probe = cuberec::adversary::default_k_probe_dim(args.r);
    let sample = DirectionSample::generate(d_probe, 192, args.seed)?;
    let k_hat = estimate_k(args.r, d_probe, &sample, 1e-3)?;

    let cert = certify_lower_bound(&points, &cls, k_hat, args.probe_m, args.seed)?;
    let output = AdversaryOutput {
        z: cert.z.clone(),
        radius: cert.radius,
        k_hat: cert.k_hat,
        bound: cert.bound,
        feasible: cert.feasible,
    };
    let mut json = serde_json::to_string_pretty(&output)?;
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_envelope(args: EnvelopeArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let kind: ClassKind = args.kind.parse()?;
    let table = build_envelope_table(args.d, args.r, args.m_max, kind)?;
    emit(&args.out, &table.to_csv())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let mut config: SweepConfig = serde_json::from_str(&fs::read_to_string(&args.config)?)?;
    if let Some(out) = &args.out {
        config.output_path = Some(out.display().to_string());
    }
    let outcome = run_sweep(&config)?;
    match &config.output_path {
        Some(path) => eprintln!("wrote {} rows to {path}", outcome.rows.len()),
        None => print!("{}", outcome.csv),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let report = verify_suite(args.seed);
    emit(&args.out, &report.to_json_string())?;
    if report.all_passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} of {} checks failed", report.failed, report.total);
        Ok(ExitCode::from(1))
    }
}

mod commands;
mod manifest;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Design and evaluate blue-targeted 4-point color-shift-keying links.
#[derive(Parser, Debug)]
#[command(name = "ucsk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize R and G for a blue target and write the constellation JSON.
    Design(DesignArgs),
    /// Report d_min, the minimizing pair, the centroid check and the disk margin.
    Validate(ValidateArgs),
    /// Monte Carlo symbol error rate sweep plus the union bound.
    Ser(SerArgs),
    /// Achievable-rate sweep for UCSK or an OOK baseline.
    Rate(RateArgs),
    /// Regenerate the SER (4a) or rate (4b) curve bundle.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Built-in target disk.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), conflicts_with_all = ["target_center", "target_radius"], required_unless_present_all = ["target_center", "target_radius"])]
    preset: Option<u8>,
    /// Disk center as x,y.
    #[arg(long, value_name = "X,Y", value_parser = parse_pair, requires = "target_radius", allow_hyphen_values = true)]
    target_center: Option<[f64; 2]>,
    #[arg(long, value_name = "R", requires = "target_center")]
    target_radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of multistart solves.
    #[arg(long)]
    starts: Option<usize>,
    /// Region R and G may occupy.
    #[arg(long, value_enum, default_value_t = GamutChoice::Triangle)]
    gamut: GamutChoice,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GamutChoice {
    /// The triangle of the default LED primaries.
    Triangle,
    /// The full spectral locus.
    Locus,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// JSON file or built-in name (table1-t1o1 … table1-t3o3, optimized-1 … optimized-3).
    #[arg(long)]
    constellation: String,
    /// Check against a built-in target instead of the file's.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    preset: Option<u8>,
}

#[derive(Args, Debug)]
struct ChannelArgs {
    /// `seawater` or a wavelength_nm,a_per_m,b_per_m CSV.
    #[arg(long, default_value = "seawater")]
    water: String,
    /// Link distance in meters.
    #[arg(long, default_value_t = 10.0)]
    distance: f64,
    /// SNR grid in dB.
    #[arg(long, value_name = "LO:STEP:HI", value_parser = parse_grid, allow_hyphen_values = true)]
    snr: Grid,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SerArgs {
    #[arg(long)]
    constellation: String,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Symbols per SNR point.
    #[arg(long, default_value_t = 100_000)]
    symbols: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Ucsk,
    Ook,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// OOK LED wavelength in nm.
    #[arg(long)]
    wavelength: Option<f64>,
    #[arg(long)]
    constellation: Option<String>,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Monte Carlo samples per SNR point.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Figure {
    #[value(name = "4a")]
    Ser,
    #[value(name = "4b")]
    Rate,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long, value_enum)]
    figure: Figure,
    #[arg(long)]
    out: PathBuf,
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected x,y")?;
    Ok([parse_number(a)?, parse_number(b)?])
}

#[derive(Clone, Debug, PartialEq)]
struct Grid(Vec<f64>);

/// `LO:STEP:HI`, inclusive of HI.
fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, step, hi] = parts[..] else {
        return Err("expected LO:STEP:HI".into());
    };
    let (lo, step, hi) = (parse_number(lo)?, parse_number(step)?, parse_number(hi)?);
    if !(step > 0.0) {
        return Err("STEP must be positive".into());
    }
    if hi < lo {
        return Err("HI must be >= LO".into());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err("grid has more than 10000 points".into());
    }
    // Round away accumulated binary error so 0:0.1:0.3 ends at 0.3.
    Ok(Grid(
        (0..count)
            .map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9)
            .collect(),
    ))
}

fn init_threads() -> Result<(), commands::CliError> {
    let Ok(v) = std::env::var("UCSK_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        commands::CliError::usage(format!(
            "UCSK_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::CliError::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|_| match cli.command {
        Command::Design(a) => commands::design(a),
        Command::Validate(a) => commands::validate(a),
        Command::Ser(a) => commands::ser(a),
        Command::Rate(a) => commands::rate(a),
        Command::Reproduce(a) => commands::reproduce(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

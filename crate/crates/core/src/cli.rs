//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::code::CodeSpec;
use crate::codec::{Depth, SaturationPolicy, StegoCodec};
use crate::error::Error;
use crate::media::{parse_pgm, parse_raw, MediaDocument};
use crate::rate::{self, CsvConfig};
use crate::simulate::{self, CoverModel, RNG_ALGORITHM};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_DOUBLE_SATURATION: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "z2z4steg",
    version,
    about = "±1 steganography with perfect Z2Z4-linear codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct CodeArgs {
    /// Code order; blocks hold 2^(m-1) symbols and carry m bits.
    #[arg(short = 'm', long = "m", default_value_t = 4)]
    pub m: u32,
    /// Number of quaternary parity rows, 0..=m/2.
    #[arg(short = 'd', long = "delta", default_value_t = 2)]
    pub delta: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MediaFormat {
    Pgm,
    Raw,
}

#[derive(Debug, Args)]
pub struct MediaArgs {
    /// Input media; format is detected from the "P5" magic unless given.
    #[arg(long)]
    pub cover: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<MediaFormat>,
    /// Sample depth for raw streams (PGM takes it from maxval).
    #[arg(long = "B")]
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Z2z4,
    Ternary,
    Qary,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Both,
    Plain,
    Saturating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimScheme {
    Z2z4,
    Ternary,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the parity-check matrix, one column per line.
    Matrix {
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Hide a message file in a cover.
    Embed {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        media: MediaArgs,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fail instead of searching when a saturation fallback is itself blocked.
        #[arg(long)]
        strict: bool,
    },
    /// Recover a message from a stego file.
    Extract {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        media: MediaArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the CI-rate table as CSV.
    Rates {
        #[arg(long = "B", default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SchemeName::Z2z4, SchemeName::Ternary, SchemeName::Qary, SchemeName::Bound])]
        schemes: Vec<SchemeName>,
        #[arg(long, value_enum, default_value_t = Variant::Both)]
        variant: Variant,
    },
    /// Estimate average distortion by Monte Carlo.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value_t = SimScheme::Z2z4)]
        scheme: SimScheme,
        /// Parity checks of the ternary baseline.
        #[arg(long, default_value_t = 2)]
        mu: u32,
        #[arg(long = "B", default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw covers from 1..=2^B-2 so saturation never happens.
        #[arg(long)]
        interior: bool,
    },
    /// Check perfectness and column pairing of a code.
    Verify {
        #[command(flatten)]
        code: CodeArgs,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameters(_) | Error::UnsupportedDepth(_) | Error::InvalidQ(_) => EXIT_USAGE,
        Error::CapacityExceeded { .. } => EXIT_CAPACITY,
        Error::DoubleSaturationUnresolvable { .. } => EXIT_DOUBLE_SATURATION,
        _ => EXIT_IO,
    }
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load_media(args: &MediaArgs) -> Result<MediaDocument, Error> {
    let bytes = fs::read(&args.cover)?;
    let format = args.format.unwrap_or(if bytes.starts_with(b"P5") {
        MediaFormat::Pgm
    } else {
        MediaFormat::Raw
    });
    match format {
        MediaFormat::Pgm => {
            let doc = parse_pgm(&bytes)?;
            if let Some(b) = args.depth.filter(|&b| b != doc.depth.bits()) {
                return Err(Error::InvalidParameters(format!(
                    "--B {b} disagrees with the PGM maxval"
                )));
            }
            Ok(doc)
        }
        MediaFormat::Raw => parse_raw(&bytes, Depth::new(args.depth.unwrap_or(8))?),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(Error::from)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Error> {
    match cli.command {
        Command::Matrix { code } => {
            let spec = CodeSpec::build(code.m, code.delta)?;
            write!(out, "{}", spec.matrix_dump())?;
            Ok(EXIT_OK)
        }
        Command::Verify { code } => {
            let spec = CodeSpec::build(code.m, code.delta)?;
            let perfect = spec.check_perfect();
            let pairing = spec.check_pairing();
            let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
            writeln!(out, "perfectness: {}", verdict(perfect))?;
            writeln!(out, "pairing: {}", verdict(pairing))?;
            writeln!(out, "{}", verdict(perfect && pairing))?;
            Ok(if perfect && pairing {
                EXIT_OK
            } else {
                EXIT_FAIL
            })
        }
        Command::Embed {
            code,
            media,
            message,
            out: out_path,
            strict,
        } => {
            let spec = CodeSpec::build(code.m, code.delta)?;
            let mut doc = load_media(&media)?;
            let message = fs::read(&message)?;
            let policy = if strict {
                SaturationPolicy::Strict
            } else {
                SaturationPolicy::Search
            };
            let codec = StegoCodec::new(spec, doc.depth).with_policy(policy);
            let plans = codec.embed_stream_in_place(&mut doc.symbols, &message)?;
            write_file(&out_path, &doc.to_bytes()?)?;
            let changed: usize = plans.iter().map(|p| p.changes().len()).sum();
            let fallbacks = plans.iter().filter(|p| p.changes().len() == 2).count();
            writeln!(
                out,
                "embedded {} bytes in {} blocks of {} symbols: {} symbols changed, {} saturation fallbacks",
                message.len(),
                plans.len(),
                codec.block_len(),
                changed,
                fallbacks
            )?;
            Ok(EXIT_OK)
        }
        Command::Extract {
            code,
            media,
            out: out_path,
        } => {
            let spec = CodeSpec::build(code.m, code.delta)?;
            let doc = load_media(&media)?;
            let message = StegoCodec::new(spec, doc.depth).extract_stream(&doc.symbols)?;
            write_file(&out_path, &message)?;
            writeln!(out, "extracted {} bytes", message.len())?;
            Ok(EXIT_OK)
        }
        Command::Rates {
            depth,
            out: out_path,
            schemes,
            variant,
        } => {
            Depth::new(depth)?;
            let cfg = CsvConfig {
                depth,
                include_z2z4: schemes.contains(&SchemeName::Z2z4),
                include_ternary: schemes.contains(&SchemeName::Ternary),
                include_qary: schemes.contains(&SchemeName::Qary),
                include_bound: schemes.contains(&SchemeName::Bound),
                saturating: variant != Variant::Plain,
                non_saturating: variant != Variant::Saturating,
                ..CsvConfig::default()
            };
            match out_path {
                Some(path) => {
                    let mut buf = Vec::new();
                    let rows = rate::emit_rates_csv(&cfg, &mut buf)?;
                    write_file(&path, &buf)?;
                    writeln!(out, "wrote {rows} rows to {}", path.display())?;
                }
                None => {
                    rate::emit_rates_csv(&cfg, out)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Simulate {
            code,
            scheme,
            mu,
            depth,
            trials,
            seed,
            interior,
        } => {
            if trials == 0 {
                return Err(Error::InvalidParameters(
                    "--trials must be at least 1".into(),
                ));
            }
            let depth = Depth::new(depth)?;
            let b = depth.bits();
            let model = if interior {
                CoverModel::Interior
            } else {
                CoverModel::Uniform
            };
            writeln!(out, "rng: {RNG_ALGORITHM}")?;
            writeln!(out, "seed: {seed}")?;
            let (est, plain, saturating) = match scheme {
                SimScheme::Z2z4 => {
                    let spec = CodeSpec::build(code.m, code.delta)?;
                    writeln!(out, "scheme: z2z4 m={} delta={} B={b}", code.m, code.delta)?;
                    let est = simulate::monte_carlo_distortion(&spec, depth, model, trials, seed)?;
                    (
                        est,
                        rate::z2z4_rate::<f64>(code.m).d,
                        rate::z2z4_rate_saturating::<f64>(code.m, b).d,
                    )
                }
                SimScheme::Ternary => {
                    if !(1..=12).contains(&mu) {
                        return Err(Error::InvalidParameters(format!(
                            "mu = {mu} outside 1..=12"
                        )));
                    }
                    writeln!(out, "scheme: ternary mu={mu} B={b}")?;
                    let est = simulate::ternary_baseline_distortion(mu, depth, model, trials, seed);
                    (
                        est,
                        rate::ternary_rate::<f64>(mu, None).d,
                        rate::ternary_rate::<f64>(mu, Some(b)).d,
                    )
                }
            };
            writeln!(
                out,
                "covers: {}",
                if interior { "interior" } else { "uniform" }
            )?;
            writeln!(out, "trials: {}", est.trials)?;
            writeln!(out, "D_hat: {}", rate::format_sig(est.mean))?;
            writeln!(out, "std_error: {}", rate::format_sig(est.std_error))?;
            writeln!(out, "closed_form: {}", rate::format_sig(plain))?;
            writeln!(
                out,
                "closed_form_saturating: {}",
                rate::format_sig(saturating)
            )?;
            writeln!(out, "unchanged_blocks: {}", est.unchanged)?;
            writeln!(out, "saturation_fallbacks: {}", est.fallbacks)?;
            writeln!(out, "double_saturations: {}", est.double_saturations)?;
            Ok(EXIT_OK)
        }
    }
}

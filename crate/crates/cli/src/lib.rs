//! Argument handling for the `fastmorph` binary.
//!
//! `run` never exits the process itself: it returns the exit status so the
//! commands can be driven in-process from tests.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use fastmorph::bench::{
    self, CSV_HEADER, DEFAULT_HEIGHT, DEFAULT_REPS, DEFAULT_SEED, DEFAULT_WIDTH,
};
use fastmorph::{
    calibrate, closing, dilate, erode, gradient, make_se, opening, read_pgm, write_pgm,
    BorderPolicy, DispatchConfig, PgmVariant,
};

#[derive(Debug, Parser)]
#[command(
    name = "fastmorph",
    version,
    about = "Fast grayscale erosion and dilation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a morphological operation to a PGM image.
    Apply(ApplyArgs),
    /// Time linear and van Herk passes over a range of window sizes.
    Bench(BenchArgs),
    /// Measure crossover windows and write a dispatch config file.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operation {
    Erode,
    Dilate,
    Open,
    Close,
    Gradient,
}

#[derive(Debug, clap::Args)]
pub struct ApplyArgs {
    #[arg(long, value_enum)]
    pub op: Operation,
    /// Structuring element as WxH (horizontal x vertical extent, both odd).
    #[arg(long)]
    pub se: SeSize,
    /// `replicate` or `constant:V`.
    #[arg(long, default_value = "replicate")]
    pub border: BorderArg,
    /// Dispatch config file; built-in thresholds (69, 59) when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: usize,
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: usize,
    /// Odd window range MIN..MAX[:STEP], inclusive.
    #[arg(long, default_value = "3..127")]
    pub windows: WindowRange,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    /// Also time tiled against scalar transpose.
    #[arg(long)]
    pub transpose: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: usize,
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: usize,
    #[arg(long, default_value = "3..127")]
    pub windows: WindowRange,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// `WxH` as typed on the command line; oddness is checked later so the
/// geometry error names the extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeSize {
    pub w_h: usize,
    pub w_v: usize,
}

impl FromStr for SeSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("structuring element {s:?} is not of the form WxH"))?;
        let parse = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| format!("structuring element {s:?} has a non-numeric extent {v:?}"))
        };
        Ok(Self {
            w_h: parse(w)?,
            w_v: parse(h)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BorderArg(pub BorderPolicy);

impl FromStr for BorderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "replicate" {
            return Ok(Self(BorderPolicy::Replicate));
        }
        let value = s
            .strip_prefix("constant:")
            .ok_or_else(|| format!("border {s:?} must be `replicate` or `constant:V`"))?;
        value
            .parse::<u8>()
            .map(|v| Self(BorderPolicy::Constant(v)))
            .map_err(|_| format!("border constant {value:?} is not a value in 0..=255"))
    }
}

/// Inclusive odd window range `MIN..MAX[:STEP]`, step defaulting to 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowRange {
    pub min: usize,
    pub max: usize,
    pub step: usize,
}

impl WindowRange {
    pub fn windows(&self) -> Vec<usize> {
        (self.min..=self.max).step_by(self.step).collect()
    }
}

impl fmt::Display for WindowRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}:{}", self.min, self.max, self.step)
    }
}

impl FromStr for WindowRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (range, step) = match s.split_once(':') {
            Some((r, st)) => (r, Some(st)),
            None => (s, None),
        };
        let (min, max) = range
            .split_once("..")
            .ok_or_else(|| format!("window range {s:?} is not of the form MIN..MAX[:STEP]"))?;
        let num = |v: &str, what: &str| {
            v.parse::<usize>()
                .map_err(|_| format!("window range {s:?}: {what} {v:?} is not a number"))
        };
        let min = num(min, "MIN")?;
        let max = num(max, "MAX")?;
        let step = step.map(|st| num(st, "STEP")).transpose()?.unwrap_or(2);
        if min % 2 == 0 || max % 2 == 0 {
            return Err(format!("window range {s:?}: endpoints must be odd"));
        }
        if min > max {
            return Err(format!("window range {s:?}: MIN exceeds MAX"));
        }
        if step == 0 || step % 2 != 0 {
            return Err(format!(
                "window range {s:?}: STEP must be a positive even number"
            ));
        }
        Ok(Self { min, max, step })
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return 0;
            }
            let text = err.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}

pub fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Apply(args) => cmd_apply(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Calibrate(args) => cmd_calibrate(&args),
    }
}

fn load_config(path: &Path) -> anyhow::Result<DispatchConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    text.parse()
        .with_context(|| format!("invalid config {}", path.display()))
}

pub fn cmd_apply(args: &ApplyArgs) -> anyhow::Result<()> {
    let se = make_se(args.se.w_h, args.se.w_v).with_context(|| {
        format!(
            "invalid structuring element {}x{}",
            args.se.w_h, args.se.w_v
        )
    })?;
    let cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => DispatchConfig::default(),
    };
    let bytes =
        fs::read(&args.input).with_context(|| format!("cannot read {}", args.input.display()))?;
    let src = read_pgm(&bytes).with_context(|| format!("invalid PGM {}", args.input.display()))?;
    let border = args.border.0;
    let out = match args.op {
        Operation::Erode => erode(&src, se, border, &cfg),
        Operation::Dilate => dilate(&src, se, border, &cfg),
        Operation::Open => opening(&src, se, border, &cfg),
        Operation::Close => closing(&src, se, border, &cfg),
        Operation::Gradient => gradient(&src, se, border, &cfg),
    };
    fs::write(&args.output, write_pgm(&out, PgmVariant::P5))
        .with_context(|| format!("cannot write {}", args.output.display()))
}

fn check_dims(width: usize, height: usize) -> anyhow::Result<()> {
    if width == 0 || height == 0 {
        bail!("image size {width}x{height} must be at least 1x1");
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    check_dims(args.width, args.height)?;
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let windows = args.windows.windows();
    let records = bench::sweep_passes(args.width, args.height, &windows, args.reps, args.seed)?;
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&args.out)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    wtr.write_record(CSV_HEADER)?;
    for r in &records {
        wtr.write_record(r.csv_fields())?;
    }
    if args.transpose {
        for r in bench::sweep_transpose(args.width, args.height, args.reps, args.seed)? {
            wtr.write_record(r.csv_fields())?;
        }
    }
    wtr.flush()
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    Ok(())
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> anyhow::Result<()> {
    check_dims(args.width, args.height)?;
    let windows = args.windows.windows();
    let cfg = calibrate(args.width, args.height, &windows, args.reps)
        .with_context(|| format!("calibration over windows {} failed", args.windows))?;
    fs::write(&args.out, cfg.to_string())
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!(
        "threshold_h={} threshold_v={}",
        cfg.threshold_h(),
        cfg.threshold_v()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_se() {
        assert_eq!("3x5".parse::<SeSize>(), Ok(SeSize { w_h: 3, w_v: 5 }));
        assert!("3*5".parse::<SeSize>().is_err());
        assert!("ax5".parse::<SeSize>().is_err());
    }

    #[test]
    fn parses_border() {
        assert_eq!(
            "replicate".parse::<BorderArg>(),
            Ok(BorderArg(BorderPolicy::Replicate))
        );
        assert_eq!(
            "constant:200".parse::<BorderArg>(),
            Ok(BorderArg(BorderPolicy::Constant(200)))
        );
        assert!("constant:300".parse::<BorderArg>().is_err());
        assert!("mirror".parse::<BorderArg>().is_err());
    }

    #[test]
    fn parses_window_ranges() {
        let r: WindowRange = "3..11".parse().unwrap();
        assert_eq!(r.windows(), [3, 5, 7, 9, 11]);
        let r: WindowRange = "3..11:4".parse().unwrap();
        assert_eq!(r.windows(), [3, 7, 11]);
        let r: WindowRange = "5..5".parse().unwrap();
        assert_eq!(r.windows(), [5]);
        assert!("4..11".parse::<WindowRange>().is_err());
        assert!("3..10".parse::<WindowRange>().is_err());
        assert!("11..3".parse::<WindowRange>().is_err());
        assert!("3..11:3".parse::<WindowRange>().is_err());
        assert!("3..11:0".parse::<WindowRange>().is_err());
        assert!("3-11".parse::<WindowRange>().is_err());
    }
}

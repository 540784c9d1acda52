//! `iemb` — batch tool over the interval embedding library: MIDI ingestion,
//! interval encoding/decoding, corpus screening and corpus analysis.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iemb_core::embedder::Mode;
use iemb_core::parallel::default_jobs;

use files::FileFormat;

#[derive(Parser)]
#[command(name = "iemb", version, about = "Symbolic music as interval sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render MIDI files to pianoroll grids, one file per track
    Ingest(IngestArgs),
    /// Encode MIDI or pianoroll files as interval sequences
    Encode(EncodeArgs),
    /// Decode interval sequences back to pianoroll grids
    Decode(DecodeArgs),
    /// Report keep/exclude verdicts for corpus files
    Screen(ScreenArgs),
    /// Screen, encode and tally a corpus into ratio and matrix reports
    Analyze(AnalyzeArgs),
}

/// Positional inputs plus an optional directory scan; the two may be mixed.
#[derive(Args, Clone)]
struct InputArgs {
    /// Input files
    #[arg(value_name = "FILE")]
    inputs: Vec<PathBuf>,
    /// Scan this directory recursively for .mid/.midi files
    #[arg(long, value_name = "DIR")]
    corpus_root: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    /// Timesteps per quarter note
    #[arg(
        long,
        env = "IEMB_RESOLUTION",
        default_value_t = 24,
        value_parser = clap::value_parser!(u32).range(1..)
    )]
    resolution: u32,
}

#[derive(Args, Clone, Copy)]
struct JobArgs {
    /// Worker threads for file-level parallelism; 0 or unset means one per
    /// logical core. Output bytes do not depend on this.
    #[arg(long, env = "IEMB_JOBS")]
    jobs: Option<usize>,
}

impl JobArgs {
    fn effective(self) -> usize {
        match self.jobs {
            None | Some(0) => default_jobs(),
            Some(n) => n,
        }
    }
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    jobs: JobArgs,
    /// Output directory (default: next to each input)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    jobs: JobArgs,
    /// Interval mode: melodic, harmonic or barline
    #[arg(long)]
    mode: Mode,
    /// Write run-length encoded sequences
    #[arg(long)]
    rle: bool,
    /// Track supplying the reference voice when encoding MIDI harmonically
    #[arg(long, value_name = "N", default_value_t = 0)]
    reference_track: u32,
    /// Pianoroll file supplying the reference voice for harmonic encoding
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Beats per bar for barline mode (default: the file's time signature
    /// numerator, or 4 when none is recorded)
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    bar_beats: Option<u32>,
    /// Output directory (default: next to each input)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
}

#[derive(Args)]
struct DecodeArgs {
    /// Sequence files written by `encode` (.csv or .json)
    #[arg(value_name = "FILE", required = true)]
    inputs: Vec<PathBuf>,
    /// Interval mode; required for CSV inputs, which carry no metadata
    #[arg(long)]
    mode: Option<Mode>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    jobs: JobArgs,
    /// Pitch of the first note (default: the origin recorded at encode time,
    /// then 60)
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=127))]
    origin: Option<u8>,
    /// Velocity painted for decoded notes
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u8).range(1..=127))]
    velocity: u8,
    /// Pianoroll file supplying the reference voice for harmonic decoding
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Per-bar anchor pitches for barline decoding, e.g. "60,-,64" with "-"
    /// for an empty bar (default: the anchors recorded at encode time)
    #[arg(long, value_name = "LIST")]
    anchors: Option<String>,
    /// Output directory (default: next to each input)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
}

#[derive(Args)]
struct ScreenArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    jobs: JobArgs,
    /// Report file (default: standard output)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Corpus directory; subdirectory names label composers
    #[arg(value_name = "DIR")]
    root: Option<PathBuf>,
    /// Alias for the positional corpus directory
    #[arg(long, value_name = "DIR")]
    corpus_root: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    jobs: JobArgs,
    /// Report directory
    #[arg(long, value_name = "DIR", default_value = "analysis")]
    out: PathBuf,
    /// Format of the exported pair matrices (reports are always CSV)
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest(args) => commands::ingest(args),
        Command::Encode(args) => commands::encode(args),
        Command::Decode(args) => commands::decode(args),
        Command::Screen(args) => commands::screen(args),
        Command::Analyze(args) => commands::analyze(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("iemb: {err:#}");
            ExitCode::FAILURE
        }
    }
}

//! File-format plumbing: atomic writes, corpus walks, and reading/writing
//! pianorolls and interval sequences by extension.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use iemb_core::embedder::{rle_decode, rle_encode, IntervalSequence, Mode, RleSequence};
use iemb_core::pianoroll::Pianoroll;
use tempfile::NamedTempFile;
use walkdir::WalkDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FileFormat::Csv => "csv",
            FileFormat::Json => "json",
        }
    }
}

pub fn is_midi_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("mid") || e.eq_ignore_ascii_case("midi"))
}

/// All .mid/.midi files under `root`, sorted by path so that every run and
/// every parallelism degree sees the same order.
pub fn collect_corpus(root: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.with_context(|| format!("scanning {}", root.display()))?;
        if entry.file_type().is_file() && is_midi_path(entry.path()) {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

/// Writes via a temp file in the target directory plus an atomic rename, so
/// an interrupted run never leaves a truncated file behind.
pub fn write_atomic<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp =
        NamedTempFile::new_in(&dir).with_context(|| format!("temp file in {}", dir.display()))?;
    let mut buffered = BufWriter::new(tmp);
    write(&mut buffered)?;
    let tmp = buffered
        .into_inner()
        .map_err(|e| anyhow::anyhow!("flushing {}: {}", path.display(), e.error()))?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_roll(path: &Path, resolution: u32) -> Result<Pianoroll> {
    let open = || File::open(path).with_context(|| format!("opening {}", path.display()));
    let extension = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let roll = if extension.eq_ignore_ascii_case("json") {
        Pianoroll::read_json(BufReader::new(open()?), resolution)?
    } else if extension.eq_ignore_ascii_case("csv") {
        Pianoroll::read_csv(BufReader::new(open()?), resolution)?
    } else {
        bail!("{}: expected a .csv or .json pianoroll", path.display());
    };
    Ok(roll)
}

pub fn write_roll(path: &Path, roll: &Pianoroll, format: FileFormat) -> Result<()> {
    write_atomic(path, |w| {
        match format {
            FileFormat::Csv => roll.write_csv(w)?,
            FileFormat::Json => {
                roll.write_json(&mut *w)?;
                writeln!(w)?;
            }
        }
        Ok(())
    })
}

/// Reads a sequence file produced by `encode`. JSON files carry their own
/// metadata (plain and RLE layouts are told apart by shape); CSV files carry
/// none, so the caller's mode and resolution fill the gap.
pub fn read_sequence(path: &Path, mode: Option<Mode>, resolution: u32) -> Result<IntervalSequence> {
    let extension = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let seq = if extension.eq_ignore_ascii_case("json") {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_reader(BufReader::new(file))
            .with_context(|| format!("parsing {}", path.display()))?;
        let seq = if value.get("runs").is_some() {
            rle_decode(&serde_json::from_value::<RleSequence>(value)?)
        } else {
            serde_json::from_value::<IntervalSequence>(value)?
        };
        if let Some(flag) = mode {
            if flag != seq.mode {
                bail!(
                    "{}: recorded mode is {}, not {}",
                    path.display(),
                    seq.mode,
                    flag
                );
            }
        }
        seq
    } else if extension.eq_ignore_ascii_case("csv") {
        let Some(mode) = mode else {
            bail!(
                "{}: CSV sequences carry no metadata; pass --mode (and --resolution)",
                path.display()
            );
        };
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let runs = iemb_core::embedder::read_runs_csv(BufReader::new(file))?;
        rle_decode(&RleSequence {
            mode,
            resolution,
            runs,
            origin: None,
            reference_track: None,
            bar_length: None,
            bar_anchors: None,
        })
    } else {
        bail!("{}: expected a .csv or .json sequence", path.display());
    };
    Ok(seq)
}

pub fn write_sequence(
    path: &Path,
    seq: &IntervalSequence,
    rle: bool,
    format: FileFormat,
) -> Result<()> {
    write_atomic(path, |w| {
        match (rle, format) {
            (false, FileFormat::Csv) => iemb_core::embedder::write_sequence_csv(w, seq)?,
            (true, FileFormat::Csv) => iemb_core::embedder::write_rle_csv(w, &rle_encode(seq))?,
            (false, FileFormat::Json) => {
                serde_json::to_writer_pretty(&mut *w, seq)?;
                writeln!(w)?;
            }
            (true, FileFormat::Json) => {
                serde_json::to_writer_pretty(&mut *w, &rle_encode(seq))?;
                writeln!(w)?;
            }
        }
        Ok(())
    })
}

/// Base name for decode output: strips the suffix chain `encode` appends
/// (`x.track0.melodic.rle` → `x.track0`).
pub fn decoded_stem(stem: &str) -> String {
    let mut stem = stem;
    loop {
        let Some((head, tail)) = stem.rsplit_once('.') else {
            break;
        };
        if matches!(tail, "rle" | "melodic" | "harmonic" | "barline") {
            stem = head;
        } else {
            break;
        }
    }
    stem.to_string()
}

/// Composer labels double as file names in the matrices directory; anything
/// outside a conservative character set is mapped to `_`.
pub fn sanitize_label(label: &str) -> String {
    let safe: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if safe.is_empty() {
        "_".to_string()
    } else {
        safe
    }
}

/// Parses the `--anchors` list: one entry per bar, `-` (or an empty entry)
/// meaning the bar has no anchor.
pub fn parse_anchors(list: &str) -> Result<Vec<Option<u8>>> {
    list.split(',')
        .map(|item| {
            let item = item.trim();
            if item.is_empty() || item == "-" {
                return Ok(None);
            }
            let pitch: u8 =
                item.parse().ok().filter(|p| *p <= 127).with_context(|| {
                    format!("bad anchor {item:?}: expected a pitch 0..=127 or -")
                })?;
            Ok(Some(pitch))
        })
        .collect()
}

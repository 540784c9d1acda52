//! One function per subcommand. Bulk runs share a pattern: gather inputs,
//! fan out over a bounded worker pool with ordered results, report per-file
//! failures to standard error without aborting the rest of the run.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use iemb_core::analysis::{
    aggregate_by_composer, analyze_rolls, screen_bytes, screen_piece, write_matrix_csv,
    write_ratios_csv, write_screening_csv, IntervalStats, ScreenReport, Verdict,
};
use iemb_core::embedder::{
    barline_from_pianoroll, harmonic_from_pianorolls, melodic_from_pianoroll,
    pianoroll_from_barline, pianoroll_from_harmonic, pianoroll_from_melodic, IntervalSequence,
    Mode,
};
use iemb_core::midi::{parse_midi, to_pianorolls};
use iemb_core::parallel::map_ordered;
use iemb_core::pianoroll::Pianoroll;

use crate::files::{
    collect_corpus, decoded_stem, is_midi_path, parse_anchors, read_roll, read_sequence,
    sanitize_label, write_atomic, write_roll, write_sequence, FileFormat,
};
use crate::{AnalyzeArgs, DecodeArgs, EncodeArgs, IngestArgs, InputArgs, ScreenArgs};

/// An input file plus, when it came from a `--corpus-root` walk, its path
/// relative to that root (used to mirror subdirectories under `--out`).
struct InputFile {
    path: PathBuf,
    rel: Option<PathBuf>,
}

fn gather(input: &InputArgs) -> Result<Vec<InputFile>> {
    let mut files: Vec<InputFile> = input
        .inputs
        .iter()
        .cloned()
        .map(|path| InputFile { path, rel: None })
        .collect();
    if let Some(root) = &input.corpus_root {
        for path in collect_corpus(root)? {
            let rel = path.strip_prefix(root).unwrap_or(&path).to_path_buf();
            files.push(InputFile {
                path,
                rel: Some(rel),
            });
        }
    }
    if files.is_empty() {
        bail!("no input files (pass FILE arguments or --corpus-root)");
    }
    Ok(files)
}

fn output_dir(file: &InputFile, out: &Option<PathBuf>) -> PathBuf {
    match (out, &file.rel) {
        (Some(dir), Some(rel)) => match rel.parent() {
            Some(parent) if !parent.as_os_str().is_empty() => dir.join(parent),
            _ => dir.clone(),
        },
        (Some(dir), None) => dir.clone(),
        (None, _) => file
            .path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string())
}

/// Refuses runs in which two inputs would race to the same output names;
/// with parallel workers the loser would be nondeterministic.
fn ensure_distinct_outputs<F>(files: &[InputFile], out: &Option<PathBuf>, stem: F) -> Result<()>
where
    F: Fn(&Path) -> String,
{
    let mut seen: HashMap<(PathBuf, String), &Path> = HashMap::new();
    for file in files {
        let key = (output_dir(file, out), stem(&file.path));
        if let Some(prior) = seen.insert(key, &file.path) {
            bail!(
                "{} and {} would write the same output files; give them distinct --out subdirectories",
                prior.display(),
                file.path.display()
            );
        }
    }
    Ok(())
}

/// Prints per-file failures in input order and turns them into the exit code.
fn finish(results: Vec<(PathBuf, Result<()>)>) -> ExitCode {
    let mut failures = 0usize;
    let total = results.len();
    for (path, result) in results {
        if let Err(err) = result {
            eprintln!("iemb: {}: {err:#}", path.display());
            failures += 1;
        }
    }
    if failures > 0 {
        eprintln!("iemb: {failures} of {total} files failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

pub fn ingest(args: IngestArgs) -> Result<ExitCode> {
    let files = gather(&args.input)?;
    ensure_distinct_outputs(&files, &args.out, stem_of)?;
    let resolution = args.grid.resolution;
    let results = map_ordered(files, args.jobs.effective(), |file| {
        let result = (|| -> Result<()> {
            let bytes = fs::read(&file.path)?;
            let piece = parse_midi(&bytes)?;
            let dir = output_dir(&file, &args.out);
            let stem = stem_of(&file.path);
            for (i, roll) in to_pianorolls(&piece, resolution).iter().enumerate() {
                let name = format!("{stem}.track{i}.{}", args.format.extension());
                write_roll(&dir.join(name), roll, args.format)?;
            }
            Ok(())
        })();
        (file.path, result)
    });
    Ok(finish(results))
}

pub fn encode(args: EncodeArgs) -> Result<ExitCode> {
    let files = gather(&args.input)?;
    ensure_distinct_outputs(&files, &args.out, stem_of)?;
    // An external reference voice is shared by every file; failing to load
    // it is a config error, not a per-file one.
    let reference = args
        .reference
        .as_ref()
        .map(|path| read_roll(path, args.grid.resolution))
        .transpose()?;
    let results = map_ordered(files, args.jobs.effective(), |file| {
        let result = encode_one(&file, &args, reference.as_ref());
        (file.path, result)
    });
    Ok(finish(results))
}

fn encode_one(file: &InputFile, args: &EncodeArgs, reference: Option<&Pianoroll>) -> Result<()> {
    let resolution = args.grid.resolution;
    let dir = output_dir(file, &args.out);
    let stem = stem_of(&file.path);
    let rle_part = if args.rle { ".rle" } else { "" };
    let extension = args.format.extension();

    if !is_midi_path(&file.path) {
        let roll = read_roll(&file.path, resolution)?;
        let seq = match args.mode {
            Mode::Melodic => melodic_from_pianoroll(&roll),
            Mode::Harmonic => {
                let reference = reference
                    .ok_or_else(|| anyhow!("harmonic encoding of a pianoroll needs --reference"))?;
                harmonic_from_pianorolls(&roll, reference)?
            }
            Mode::Barline => {
                let bar_length = resolution * args.bar_beats.unwrap_or(4);
                barline_from_pianoroll(&roll, bar_length)?
            }
        };
        let name = format!("{stem}.{}{rle_part}.{extension}", args.mode);
        return write_sequence(&dir.join(name), &seq, args.rle, args.format);
    }

    let piece = parse_midi(&fs::read(&file.path)?)?;
    let rolls = to_pianorolls(&piece, resolution);
    let emit = |i: usize, seq: &IntervalSequence| -> Result<()> {
        let name = format!("{stem}.track{i}.{}{rle_part}.{extension}", args.mode);
        write_sequence(&dir.join(name), seq, args.rle, args.format)
    };
    match args.mode {
        Mode::Melodic => {
            for (i, roll) in rolls.iter().enumerate() {
                emit(i, &melodic_from_pianoroll(roll))?;
            }
        }
        Mode::Harmonic => {
            if let Some(reference) = reference {
                for (i, roll) in rolls.iter().enumerate() {
                    emit(i, &harmonic_from_pianorolls(roll, reference)?)?;
                }
            } else {
                let picked = args.reference_track as usize;
                let reference = rolls.get(picked).ok_or_else(|| {
                    anyhow!(
                        "--reference-track {} is out of range (file has {} tracks)",
                        args.reference_track,
                        rolls.len()
                    )
                })?;
                for (i, roll) in rolls.iter().enumerate() {
                    if i == picked {
                        continue;
                    }
                    let mut seq = harmonic_from_pianorolls(roll, reference)?;
                    seq.reference_track = Some(args.reference_track);
                    emit(i, &seq)?;
                }
            }
        }
        Mode::Barline => {
            let beats = match args.bar_beats {
                Some(beats) => beats,
                None => match piece.time_signatures.first() {
                    Some(sig) if sig.numerator > 0 => u32::from(sig.numerator),
                    Some(sig) => bail!(
                        "time signature numerator is {}; pass --bar-beats",
                        sig.numerator
                    ),
                    None => 4,
                },
            };
            for (i, roll) in rolls.iter().enumerate() {
                emit(i, &barline_from_pianoroll(roll, resolution * beats)?)?;
            }
        }
    }
    Ok(())
}

pub fn decode(args: DecodeArgs) -> Result<ExitCode> {
    let files: Vec<InputFile> = args
        .inputs
        .iter()
        .cloned()
        .map(|path| InputFile { path, rel: None })
        .collect();
    // Two sequence files of one stem ("x.melodic.csv", "x.barline.csv")
    // would both decode to "x.decoded.csv".
    ensure_distinct_outputs(&files, &args.out, |p| decoded_stem(&stem_of(p)))?;
    let anchors = args.anchors.as_deref().map(parse_anchors).transpose()?;
    let results = map_ordered(files, args.jobs.effective(), |file| {
        let result = decode_one(&file, &args, anchors.as_deref());
        (file.path, result)
    });
    Ok(finish(results))
}

fn decode_one(file: &InputFile, args: &DecodeArgs, anchors: Option<&[Option<u8>]>) -> Result<()> {
    let seq = read_sequence(&file.path, args.mode, args.grid.resolution)?;
    let roll = match seq.mode {
        Mode::Melodic => {
            let origin = args.origin.or(seq.origin).unwrap_or(60);
            pianoroll_from_melodic(&seq, origin, args.velocity)?
        }
        Mode::Harmonic => {
            let path = args
                .reference
                .as_ref()
                .ok_or_else(|| anyhow!("harmonic decoding needs --reference"))?;
            let reference = read_roll(path, seq.resolution)?;
            pianoroll_from_harmonic(&seq, &reference, args.velocity)?
        }
        Mode::Barline => {
            let recorded = seq.bar_anchors.clone();
            let anchors = match (anchors, recorded) {
                (Some(given), _) => given.to_vec(),
                (None, Some(recorded)) => recorded,
                (None, None) => bail!("no bar anchors recorded; pass --anchors"),
            };
            pianoroll_from_barline(&seq, &anchors, args.velocity)?
        }
    };
    let name = format!(
        "{}.decoded.{}",
        decoded_stem(&stem_of(&file.path)),
        args.format.extension()
    );
    write_roll(&output_dir(file, &args.out).join(name), &roll, args.format)
}

pub fn screen(args: ScreenArgs) -> Result<ExitCode> {
    let files = gather(&args.input)?;
    let resolution = args.grid.resolution;
    let rows = map_ordered(files, args.jobs.effective(), |file| {
        let label = file
            .rel
            .as_deref()
            .unwrap_or(&file.path)
            .display()
            .to_string();
        let report = fs::read(&file.path).map(|bytes| screen_bytes(&bytes, resolution));
        (file.path, label, report)
    });

    let mut table: Vec<(String, ScreenReport)> = Vec::new();
    let mut failures = 0usize;
    for (path, label, report) in rows {
        match report {
            Ok(report) => table.push((label, report)),
            Err(err) => {
                eprintln!("iemb: {}: {err}", path.display());
                failures += 1;
            }
        }
    }
    match &args.out {
        Some(path) => write_atomic(path, |w| Ok(write_screening_csv(w, &table)?))?,
        None => {
            let stdout = std::io::stdout();
            write_screening_csv(stdout.lock(), &table)?;
        }
    }
    Ok(if failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

/// Everything `analyze` learns about one corpus file.
struct PieceRow {
    path: PathBuf,
    rel: String,
    composer: String,
    outcome: Result<(ScreenReport, Option<IntervalStats>)>,
}

pub fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let root = match (&args.root, &args.corpus_root) {
        (Some(a), Some(b)) if a != b => {
            bail!("got two different corpus directories (positional and --corpus-root)")
        }
        (a, b) => a
            .clone()
            .or_else(|| b.clone())
            .ok_or_else(|| anyhow!("pass a corpus directory (positional or --corpus-root)"))?,
    };
    let files = collect_corpus(&root)?;
    if files.is_empty() {
        bail!("no .mid/.midi files under {}", root.display());
    }
    let resolution = args.grid.resolution;

    let rows = map_ordered(files, args.jobs.effective(), |path| {
        let rel = path.strip_prefix(&root).unwrap_or(&path).to_path_buf();
        let composer = composer_label(&rel);
        let outcome = (|| {
            let bytes = fs::read(&path)?;
            match parse_midi(&bytes) {
                // Unparseable bytes still get screened (verdict: parse error).
                Err(_) => Ok((screen_bytes(&bytes, resolution), None)),
                Ok(piece) => {
                    let report = screen_piece(&piece, resolution);
                    let stats = if report.is_keep() {
                        Some(analyze_rolls(&to_pianorolls(&piece, resolution))?)
                    } else {
                        None
                    };
                    Ok((report, stats))
                }
            }
        })();
        PieceRow {
            path,
            rel: rel.display().to_string(),
            composer,
            outcome,
        }
    });

    let mut screening: Vec<(String, ScreenReport)> = Vec::new();
    let mut kept: Vec<(String, IntervalStats)> = Vec::new();
    let mut excluded = 0usize;
    let mut failures = 0usize;
    for row in rows {
        match row.outcome {
            Err(err) => {
                eprintln!("iemb: {}: {err:#}", row.path.display());
                failures += 1;
            }
            Ok((report, stats)) => {
                if report.verdict == Verdict::Exclude {
                    excluded += 1;
                }
                screening.push((row.rel, report));
                if let Some(stats) = stats {
                    kept.push((row.composer, stats));
                }
            }
        }
    }
    if screening.is_empty() {
        bail!("every file under {} failed to read", root.display());
    }

    let table = aggregate_by_composer(kept);
    write_atomic(&args.out.join("screening.csv"), |w| {
        Ok(write_screening_csv(w, &screening)?)
    })?;
    write_atomic(&args.out.join("ratios.csv"), |w| {
        Ok(write_ratios_csv(w, &table)?)
    })?;
    let matrices = args.out.join("matrices");
    for (composer, stats) in &table {
        let safe = sanitize_label(composer);
        let pairs = [
            ("melodic", &stats.pair_melodic),
            ("harmonic", &stats.pair_harmonic),
        ];
        for (mode, matrix) in pairs {
            match args.format {
                FileFormat::Csv => {
                    write_atomic(&matrices.join(format!("{safe}.{mode}.directed.csv")), |w| {
                        Ok(write_matrix_csv(w, matrix.directed())?)
                    })?;
                    write_atomic(
                        &matrices.join(format!("{safe}.{mode}.undirected.csv")),
                        |w| Ok(write_matrix_csv(w, &matrix.undirected())?),
                    )?;
                }
                FileFormat::Json => {
                    write_atomic(&matrices.join(format!("{safe}.{mode}.json")), |w| {
                        serde_json::to_writer_pretty(&mut *w, &matrix.export())?;
                        writeln!(w)?;
                        Ok(())
                    })?;
                }
            }
        }
    }

    if failures > 0 {
        eprintln!("iemb: {failures} files could not be read");
    }
    // Corpus-health warning: more than half of the screened files dropped out.
    Ok(if excluded * 2 > screening.len() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

/// First path component under the corpus root, or "(root)" for top-level
/// files.
fn composer_label(rel: &Path) -> String {
    let mut components = rel.components();
    match (components.next(), components.next()) {
        (Some(first), Some(_)) => first.as_os_str().to_string_lossy().into_owned(),
        _ => "(root)".to_string(),
    }
}

//! Pianoroll ↔ interval-sequence codecs.
//!
//! Every timestep of a pianoroll's melody line becomes one [`IntervalToken`]:
//! silence for rests, otherwise an interval measured against a mode-specific
//! anchor — the previous melody note (melodic), the reference track's
//! simultaneous note (harmonic), or the bar's first sounding note (barline).
//! A sustained note repeats its onset token, so run lengths encode duration
//! and run-length encoding strips it back out.
//!
//! Run-based decoding makes the melodic codec exact on melody lines whose
//! time-adjacent notes carry distinct tokens. Two equal-interval onsets in
//! immediate succession (an evenly ascending scale, say) produce one merged
//! run and decode as a single held note; a same-pitch re-attack after a
//! unison onset merges the same way. Both ambiguities live in the token
//! representation itself, not the decoder. Harmonic and barline tokens are
//! anchored per timestep, so those decoders are exact everywhere.

use crate::interval::{Interval, IntervalToken};
use crate::parallel;
use crate::pianoroll::{Pianoroll, PitchLine, PITCH_COUNT};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use thiserror::Error;

/// What each token is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Melodic,
    Harmonic,
    Barline,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Melodic => "melodic",
            Mode::Harmonic => "harmonic",
            Mode::Barline => "barline",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "melodic" => Ok(Mode::Melodic),
            "harmonic" => Ok(Mode::Harmonic),
            "barline" => Ok(Mode::Barline),
            other => Err(format!(
                "unknown mode {other:?}, expected melodic, harmonic or barline"
            )),
        }
    }
}

/// One token per timestep, plus whatever the decoder needs to come back.
///
/// The optional fields record encoding context: `origin` is the first
/// sounding pitch (melodic), `reference_track` the track index the intervals
/// are measured against (harmonic), `bar_length` and `bar_anchors` the bar
/// grid and each bar's first sounding pitch (barline). They are omitted from
/// JSON when absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSequence {
    pub mode: Mode,
    /// Timesteps per quarter note.
    pub resolution: u32,
    pub tokens: Vec<IntervalToken>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_track: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar_length: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar_anchors: Option<Vec<Option<u8>>>,
}

impl IntervalSequence {
    fn with_tokens(mode: Mode, resolution: u32, tokens: Vec<IntervalToken>) -> Self {
        IntervalSequence {
            mode,
            resolution,
            tokens,
            origin: None,
            reference_track: None,
            bar_length: None,
            bar_anchors: None,
        }
    }
}

/// A maximal run of one repeated token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleRun {
    pub token: IntervalToken,
    pub run: u64,
}

/// Run-length-encoded form of [`IntervalSequence`], same metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleSequence {
    pub mode: Mode,
    pub resolution: u32,
    pub runs: Vec<RleRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_track: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar_length: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar_anchors: Option<Vec<Option<u8>>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("timestep {timestep}: decoded pitch {pitch} leaves the MIDI range 0..=127")]
    PitchOutOfRange { timestep: usize, pitch: i32 },
    #[error("length mismatch: target has {target} timesteps, reference has {reference}")]
    LengthMismatch { target: usize, reference: usize },
    #[error("resolution mismatch: target {target}, reference {reference}")]
    ResolutionMismatch { target: u32, reference: u32 },
    #[error("expected a {expected} sequence, found {found}")]
    ModeMismatch { expected: Mode, found: Mode },
    #[error("bar length must be at least one timestep")]
    InvalidBarLength,
    #[error("got {anchors} bar anchors for {bars} bars")]
    AnchorCount { anchors: usize, bars: usize },
    #[error("bar {bar} has note tokens but no anchor pitch")]
    MissingAnchor { bar: usize },
}

fn expect_mode(seq: &IntervalSequence, expected: Mode) -> Result<(), EmbedError> {
    if seq.mode == expected {
        Ok(())
    } else {
        Err(EmbedError::ModeMismatch {
            expected,
            found: seq.mode,
        })
    }
}

/// Encodes a pianoroll's melody line against the previous sounding note.
pub fn melodic_from_pianoroll(roll: &Pianoroll) -> IntervalSequence {
    melodic_from_line(&roll.extract_melody(), roll.resolution())
}

/// Melodic encoding of a bare pitch line. The first sounding note becomes a
/// perfect unison ascending; later onsets are measured from the previous
/// sounding pitch, skipping rests; sustains repeat the onset token.
pub fn melodic_from_line(line: &PitchLine, resolution: u32) -> IntervalSequence {
    let mut tokens = Vec::with_capacity(line.len());
    let mut last_sounding: Option<u8> = None;
    let mut previous_step: Option<u8> = None;
    let mut previous_token = IntervalToken::Silence;
    for &current in line.as_slice() {
        let token = match current {
            None => IntervalToken::Silence,
            Some(pitch) if previous_step == Some(pitch) => previous_token,
            Some(pitch) => IntervalToken::Note(match last_sounding {
                None => Interval::from_semitones(0),
                Some(from) => Interval::between_pitches(from, pitch),
            }),
        };
        if current.is_some() {
            last_sounding = current;
        }
        previous_step = current;
        previous_token = token;
        tokens.push(token);
    }
    let mut seq = IntervalSequence::with_tokens(Mode::Melodic, resolution, tokens);
    seq.origin = line.first_pitch();
    seq
}

/// Inverts [`melodic_from_line`]: each maximal run of one Note token is a
/// held note, the first at `origin`, each next at the previous pitch plus
/// the token's interval. Silence runs are rests.
pub fn pianoroll_from_melodic(
    seq: &IntervalSequence,
    origin: u8,
    velocity: u8,
) -> Result<Pianoroll, EmbedError> {
    expect_mode(seq, Mode::Melodic)?;
    let mut grid = vec![vec![0u8; PITCH_COUNT]; seq.tokens.len()];
    let mut pitch: Option<i32> = None;
    let mut start = 0;
    for (token, run) in runs(&seq.tokens) {
        if let IntervalToken::Note(interval) = token {
            let next = match pitch {
                None => i32::from(origin),
                Some(previous) => previous + interval.semitones(),
            };
            if !(0..PITCH_COUNT as i32).contains(&next) {
                return Err(EmbedError::PitchOutOfRange {
                    timestep: start,
                    pitch: next,
                });
            }
            for row in &mut grid[start..start + run] {
                row[next as usize] = velocity;
            }
            pitch = Some(next);
        }
        start += run;
    }
    Ok(Pianoroll::from_grid(grid, seq.resolution))
}

/// Encodes `target`'s melody line against `reference`'s, timestep by
/// timestep. Rolls must agree in length and resolution.
pub fn harmonic_from_pianorolls(
    target: &Pianoroll,
    reference: &Pianoroll,
) -> Result<IntervalSequence, EmbedError> {
    if target.resolution() != reference.resolution() {
        return Err(EmbedError::ResolutionMismatch {
            target: target.resolution(),
            reference: reference.resolution(),
        });
    }
    harmonic_from_lines(
        &target.extract_melody(),
        &reference.extract_melody(),
        target.resolution(),
    )
}

/// Harmonic encoding of bare pitch lines: the token at `t` is the interval
/// from the reference pitch up or down to the target pitch, or Silence when
/// either line rests.
pub fn harmonic_from_lines(
    target: &PitchLine,
    reference: &PitchLine,
    resolution: u32,
) -> Result<IntervalSequence, EmbedError> {
    if target.len() != reference.len() {
        return Err(EmbedError::LengthMismatch {
            target: target.len(),
            reference: reference.len(),
        });
    }
    let tokens = target
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .map(|(&t, &r)| match (t, r) {
            (Some(target_pitch), Some(reference_pitch)) => {
                IntervalToken::Note(Interval::between_pitches(reference_pitch, target_pitch))
            }
            _ => IntervalToken::Silence,
        })
        .collect();
    Ok(IntervalSequence::with_tokens(
        Mode::Harmonic,
        resolution,
        tokens,
    ))
}

/// Inverts [`harmonic_from_lines`] against the same reference roll. Note
/// tokens where the reference rests decode as rests (the encoder cannot
/// produce them, but foreign sequences might).
pub fn pianoroll_from_harmonic(
    seq: &IntervalSequence,
    reference: &Pianoroll,
    velocity: u8,
) -> Result<Pianoroll, EmbedError> {
    expect_mode(seq, Mode::Harmonic)?;
    if seq.tokens.len() != reference.timesteps() {
        return Err(EmbedError::LengthMismatch {
            target: seq.tokens.len(),
            reference: reference.timesteps(),
        });
    }
    let reference_line = reference.extract_melody();
    let mut grid = vec![vec![0u8; PITCH_COUNT]; seq.tokens.len()];
    for (t, token) in seq.tokens.iter().enumerate() {
        let (Some(interval), Some(anchor)) = (token.interval(), reference_line.pitch_at(t)) else {
            continue;
        };
        let pitch = i32::from(anchor) + interval.semitones();
        if !(0..PITCH_COUNT as i32).contains(&pitch) {
            return Err(EmbedError::PitchOutOfRange { timestep: t, pitch });
        }
        grid[t][pitch as usize] = velocity;
    }
    Ok(Pianoroll::from_grid(grid, seq.resolution))
}

/// Encodes each timestep against the first sounding pitch of its bar.
/// `bar_length` is in timesteps (resolution × beats per bar); the trailing
/// bar may be short. Records the anchors so the sequence can decode itself.
pub fn barline_from_pianoroll(
    roll: &Pianoroll,
    bar_length: u32,
) -> Result<IntervalSequence, EmbedError> {
    if bar_length == 0 {
        return Err(EmbedError::InvalidBarLength);
    }
    let line = roll.extract_melody();
    let bar_length = bar_length as usize;
    let anchors: Vec<Option<u8>> = line
        .as_slice()
        .chunks(bar_length)
        .map(|bar| bar.iter().copied().flatten().next())
        .collect();
    let tokens = line
        .as_slice()
        .iter()
        .enumerate()
        .map(|(t, &pitch)| match pitch {
            None => IntervalToken::Silence,
            Some(pitch) => {
                // The bar has a sounding timestep, so it has an anchor.
                let anchor = anchors[t / bar_length].unwrap_or(pitch);
                IntervalToken::Note(Interval::between_pitches(anchor, pitch))
            }
        })
        .collect();
    let mut seq = IntervalSequence::with_tokens(Mode::Barline, roll.resolution(), tokens);
    seq.bar_length = Some(bar_length as u32);
    seq.bar_anchors = Some(anchors);
    Ok(seq)
}

/// Inverts [`barline_from_pianoroll`] given one anchor pitch per bar
/// (`None` allowed for bars that are all silence).
pub fn pianoroll_from_barline(
    seq: &IntervalSequence,
    anchors: &[Option<u8>],
    velocity: u8,
) -> Result<Pianoroll, EmbedError> {
    expect_mode(seq, Mode::Barline)?;
    let bar_length = match seq.bar_length {
        Some(len) if len > 0 => len as usize,
        _ => return Err(EmbedError::InvalidBarLength),
    };
    let bars = seq.tokens.len().div_ceil(bar_length);
    if anchors.len() != bars {
        return Err(EmbedError::AnchorCount {
            anchors: anchors.len(),
            bars,
        });
    }
    let mut grid = vec![vec![0u8; PITCH_COUNT]; seq.tokens.len()];
    for (t, token) in seq.tokens.iter().enumerate() {
        let Some(interval) = token.interval() else {
            continue;
        };
        let bar = t / bar_length;
        let anchor = anchors[bar].ok_or(EmbedError::MissingAnchor { bar })?;
        let pitch = i32::from(anchor) + interval.semitones();
        if !(0..PITCH_COUNT as i32).contains(&pitch) {
            return Err(EmbedError::PitchOutOfRange { timestep: t, pitch });
        }
        grid[t][pitch as usize] = velocity;
    }
    Ok(Pianoroll::from_grid(grid, seq.resolution))
}

/// Maximal runs of equal tokens, in order.
pub(crate) fn runs(tokens: &[IntervalToken]) -> Vec<(IntervalToken, usize)> {
    let mut out: Vec<(IntervalToken, usize)> = Vec::new();
    for &token in tokens {
        match out.last_mut() {
            Some((last, run)) if *last == token => *run += 1,
            _ => out.push((token, 1)),
        }
    }
    out
}

/// Compresses maximal equal-token runs. No two adjacent output runs share a
/// token, and run lengths sum to the input length.
pub fn rle_encode(seq: &IntervalSequence) -> RleSequence {
    RleSequence {
        mode: seq.mode,
        resolution: seq.resolution,
        runs: runs(&seq.tokens)
            .into_iter()
            .map(|(token, run)| RleRun {
                token,
                run: run as u64,
            })
            .collect(),
        origin: seq.origin,
        reference_track: seq.reference_track,
        bar_length: seq.bar_length,
        bar_anchors: seq.bar_anchors.clone(),
    }
}

/// Expands runs back to one token per timestep. Total: zero-length runs
/// contribute nothing, and adjacent equal runs (which [`rle_encode`] never
/// emits) simply concatenate.
pub fn rle_decode(rle: &RleSequence) -> IntervalSequence {
    let mut tokens = Vec::new();
    for run in &rle.runs {
        let n = usize::try_from(run.run).unwrap_or(usize::MAX);
        tokens.resize(tokens.len().saturating_add(n), run.token);
    }
    IntervalSequence {
        mode: rle.mode,
        resolution: rle.resolution,
        tokens,
        origin: rle.origin,
        reference_track: rle.reference_track,
        bar_length: rle.bar_length,
        bar_anchors: rle.bar_anchors.clone(),
    }
}

/// Applies a fallible operation to every item in parallel, keeping input
/// order and collecting each item's own success or failure.
pub fn bulk_map<I, O, E, F>(items: Vec<I>, op: F) -> Vec<Result<O, E>>
where
    I: Send,
    O: Send,
    E: Send,
    F: Fn(I) -> Result<O, E> + Sync,
{
    bulk_map_jobs(items, parallel::default_jobs(), op)
}

/// [`bulk_map`] with an explicit worker count.
pub fn bulk_map_jobs<I, O, E, F>(items: Vec<I>, jobs: usize, op: F) -> Vec<Result<O, E>>
where
    I: Send,
    O: Send,
    E: Send,
    F: Fn(I) -> Result<O, E> + Sync,
{
    parallel::map_ordered(items, jobs, op)
}

/// A sequence CSV file could not be read.
#[derive(Debug, Error)]
pub enum SequenceIoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: expected columns order,type,octave,desc,run")]
    BadShape { row: usize },
    #[error("row {row}: {value:?} is not a valid {field}")]
    BadField {
        row: usize,
        field: &'static str,
        value: String,
    },
    #[error("row {row}: {source}")]
    Illegal {
        row: usize,
        source: crate::interval::IllegalInterval,
    },
}

const SEQUENCE_CSV_HEADER: [&str; 5] = ["order", "type", "octave", "desc", "run"];

fn write_runs_csv<W: Write>(
    writer: W,
    runs: impl Iterator<Item = RleRun>,
) -> Result<(), SequenceIoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SEQUENCE_CSV_HEADER)?;
    for RleRun { token, run } in runs {
        match token.interval() {
            None => w.write_record(["", "", "", "", &run.to_string()])?,
            Some(iv) => w.write_record([
                iv.order().to_string(),
                iv.itype().to_string(),
                iv.octave().to_string(),
                iv.is_descending().to_string(),
                run.to_string(),
            ])?,
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes one row per timestep (`run` is always 1): columns
/// `order,type,octave,desc,run`, with the interval columns empty on silence.
pub fn write_sequence_csv<W: Write>(
    writer: W,
    seq: &IntervalSequence,
) -> Result<(), SequenceIoError> {
    write_runs_csv(
        writer,
        seq.tokens.iter().map(|&token| RleRun { token, run: 1 }),
    )
}

/// Writes one row per run, same columns as [`write_sequence_csv`].
pub fn write_rle_csv<W: Write>(writer: W, rle: &RleSequence) -> Result<(), SequenceIoError> {
    write_runs_csv(writer, rle.runs.iter().copied())
}

/// Reads rows written by either CSV writer back into runs. Expand with
/// [`rle_decode`] after wrapping in an [`RleSequence`]; mode and resolution
/// are not part of the CSV payload.
pub fn read_runs_csv<R: Read>(reader: R) -> Result<Vec<RleRun>, SequenceIoError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let mut runs = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != SEQUENCE_CSV_HEADER.len() {
            return Err(SequenceIoError::BadShape { row });
        }
        let field = |idx: usize| record.get(idx).unwrap_or("").trim();
        let parse_num = |idx: usize, name: &'static str| -> Result<i64, SequenceIoError> {
            field(idx).parse().map_err(|_| SequenceIoError::BadField {
                row,
                field: name,
                value: field(idx).to_string(),
            })
        };
        let run: u64 = field(4).parse().map_err(|_| SequenceIoError::BadField {
            row,
            field: "run",
            value: field(4).to_string(),
        })?;
        let interval_fields = [field(0), field(1), field(2), field(3)];
        let token = if interval_fields.iter().all(|f| f.is_empty()) {
            IntervalToken::Silence
        } else {
            let order = parse_num(0, "order")?;
            let itype = parse_num(1, "type")?;
            let octave = parse_num(2, "octave")?;
            let desc = match field(3) {
                "true" => true,
                "false" => false,
                other => {
                    return Err(SequenceIoError::BadField {
                        row,
                        field: "desc",
                        value: other.to_string(),
                    })
                }
            };
            let (order, itype, octave) = (
                u8::try_from(order).map_err(|_| SequenceIoError::BadField {
                    row,
                    field: "order",
                    value: field(0).to_string(),
                })?,
                i8::try_from(itype).map_err(|_| SequenceIoError::BadField {
                    row,
                    field: "type",
                    value: field(1).to_string(),
                })?,
                u16::try_from(octave).map_err(|_| SequenceIoError::BadField {
                    row,
                    field: "octave",
                    value: field(2).to_string(),
                })?,
            );
            let interval = Interval::new(order, itype, octave, desc)
                .map_err(|source| SequenceIoError::Illegal { row, source })?;
            IntervalToken::Note(interval)
        };
        runs.push(RleRun { token, run });
    }
    Ok(runs)
}

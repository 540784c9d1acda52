//! Corpus statistics: screening, interval histograms, the two ratio
//! formulas, and pairwise interval matrices.
//!
//! Counting is per note, not per timestep: tokens are run-length
//! deduplicated first, so a whole note and a sixteenth weigh the same.
//! Distance-zero unisons are tallied but excluded from both ratios (they are
//! neither minor nor Major, and have no direction); they still participate
//! in pair matrices as simple class 0.

use crate::embedder::{
    self, harmonic_from_lines, melodic_from_line, EmbedError, IntervalSequence, Mode,
};
use crate::interval::{IntervalToken, CLASS_COUNT, CLASS_NAMES};
use crate::midi::{self, MidiPiece};
use crate::pianoroll::{Pianoroll, PitchLine};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use thiserror::Error;

/// Label under which the whole-corpus aggregate is reported.
pub const ALL_LABEL: &str = "ALL";

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("expected a {expected} sequence, found {found}")]
    ModeMismatch { expected: Mode, found: Mode },
}

/// Per-note interval occurrence counts.
///
/// `counts` bins nonzero-distance notes by simple class and direction;
/// `unisons` holds the distance-zero notes; `f_min`/`f_maj` count notes by
/// type code (−1 minor, +1 Major) for the minor/Major ratio. For the harmonic
/// mode this is the simultaneous-pair histogram: its tokens are one interval
/// per sounding pair of simultaneous melody notes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IntervalHistogram {
    counts: Vec<[u64; 2]>,
    unisons: u64,
    f_min: u64,
    f_maj: u64,
}

/// The minor/Major and descending/ascending ratios over one histogram.
/// Ratios are `None` when their denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub f_min: u64,
    #[serde(rename = "f_Maj")]
    pub f_maj: u64,
    pub f_dsc: u64,
    pub f_asc: u64,
    pub r_min_maj: Option<f64>,
    pub r_dsc_asc: Option<f64>,
}

impl IntervalHistogram {
    pub fn new() -> Self {
        IntervalHistogram {
            counts: vec![[0; 2]; CLASS_COUNT],
            unisons: 0,
            f_min: 0,
            f_maj: 0,
        }
    }

    /// Bins the sequence's run-length-deduplicated note tokens.
    pub fn add_sequence(&mut self, seq: &IntervalSequence) {
        for (token, _) in embedder::runs(&seq.tokens) {
            let Some(interval) = token.interval() else {
                continue;
            };
            match interval.itype() {
                -1 => self.f_min += 1,
                1 => self.f_maj += 1,
                _ => {}
            }
            if interval.is_unison() {
                self.unisons += 1;
            } else {
                let direction = usize::from(interval.is_descending());
                self.counts[interval.simple_class()][direction] += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &IntervalHistogram) {
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            mine[0] += theirs[0];
            mine[1] += theirs[1];
        }
        self.unisons += other.unisons;
        self.f_min += other.f_min;
        self.f_maj += other.f_maj;
    }

    /// Nonzero-distance note count for `(simple class, descending?)`.
    pub fn count(&self, class: usize, descending: bool) -> u64 {
        self.counts
            .get(class)
            .map_or(0, |c| c[usize::from(descending)])
    }

    /// Distance-zero notes, kept out of both ratios.
    pub fn unisons(&self) -> u64 {
        self.unisons
    }

    pub fn f_min(&self) -> u64 {
        self.f_min
    }

    pub fn f_maj(&self) -> u64 {
        self.f_maj
    }

    pub fn f_dsc(&self) -> u64 {
        self.counts.iter().map(|c| c[1]).sum()
    }

    pub fn f_asc(&self) -> u64 {
        self.counts.iter().map(|c| c[0]).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.unisons == 0 && self.counts.iter().all(|c| c[0] == 0 && c[1] == 0)
    }

    /// `f_min / (f_min + f_Maj)`.
    pub fn minor_major_ratio(&self) -> Option<f64> {
        ratio(self.f_min, self.f_maj)
    }

    /// `f_dsc / (f_dsc + f_asc)` over nonzero-distance notes.
    pub fn desc_asc_ratio(&self) -> Option<f64> {
        ratio(self.f_dsc(), self.f_asc())
    }

    pub fn ratios(&self) -> RatioReport {
        RatioReport {
            f_min: self.f_min,
            f_maj: self.f_maj,
            f_dsc: self.f_dsc(),
            f_asc: self.f_asc(),
            r_min_maj: self.minor_major_ratio(),
            r_dsc_asc: self.desc_asc_ratio(),
        }
    }
}

fn ratio(numerator: u64, complement: u64) -> Option<f64> {
    let denominator = numerator + complement;
    (denominator > 0).then(|| numerator as f64 / denominator as f64)
}

/// Histogram over many sequences at once.
pub fn interval_histogram(seqs: &[IntervalSequence]) -> IntervalHistogram {
    let mut hist = IntervalHistogram::new();
    for seq in seqs {
        hist.add_sequence(seq);
    }
    hist
}

/// Directed counts of which simple interval class follows which, over
/// run-length-deduplicated tokens, with silence breaking adjacency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMatrix {
    mode: Mode,
    directed: Vec<Vec<u64>>,
}

impl PairMatrix {
    pub fn new(mode: Mode) -> Self {
        PairMatrix {
            mode,
            directed: vec![vec![0; CLASS_COUNT]; CLASS_COUNT],
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Counts consecutive note pairs of the sequence into the matrix.
    pub fn add_sequence(&mut self, seq: &IntervalSequence) -> Result<(), AnalysisError> {
        if seq.mode != self.mode {
            return Err(AnalysisError::ModeMismatch {
                expected: self.mode,
                found: seq.mode,
            });
        }
        let mut previous: Option<usize> = None;
        for (token, _) in embedder::runs(&seq.tokens) {
            match token {
                IntervalToken::Silence => previous = None,
                IntervalToken::Note(interval) => {
                    let class = interval.simple_class();
                    if let Some(from) = previous {
                        self.directed[from][class] += 1;
                    }
                    previous = Some(class);
                }
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &PairMatrix) -> Result<(), AnalysisError> {
        if other.mode != self.mode {
            return Err(AnalysisError::ModeMismatch {
                expected: self.mode,
                found: other.mode,
            });
        }
        for (mine, theirs) in self.directed.iter_mut().zip(&other.directed) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += t;
            }
        }
        Ok(())
    }

    pub fn directed(&self) -> &[Vec<u64>] {
        &self.directed
    }

    /// Symmetrized view: off-diagonal cells are `directed[i][j] +
    /// directed[j][i]`, the diagonal is preserved.
    pub fn undirected(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0; CLASS_COUNT]; CLASS_COUNT];
        for i in 0..CLASS_COUNT {
            for j in 0..CLASS_COUNT {
                out[i][j] = if i == j {
                    self.directed[i][j]
                } else {
                    self.directed[i][j] + self.directed[j][i]
                };
            }
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.directed.iter().flatten().sum()
    }
}

/// Builds one matrix over sequences that must all share `mode`.
pub fn pair_matrix(seqs: &[IntervalSequence], mode: Mode) -> Result<PairMatrix, AnalysisError> {
    let mut matrix = PairMatrix::new(mode);
    for seq in seqs {
        matrix.add_sequence(seq)?;
    }
    Ok(matrix)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Keep,
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcludeReason {
    ParseError,
    MultipleTimeSignatures,
    TooFewBars,
    NumeratorOne,
}

impl fmt::Display for ExcludeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExcludeReason::ParseError => "parse_error",
            ExcludeReason::MultipleTimeSignatures => "multiple_time_signatures",
            ExcludeReason::TooFewBars => "too_few_bars",
            ExcludeReason::NumeratorOne => "numerator_one",
        })
    }
}

/// The screening verdict for one file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenReport {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<ExcludeReason>,
    /// `active_length / resolution / numerator`.
    pub bars: f64,
}

impl ScreenReport {
    pub fn is_keep(&self) -> bool {
        self.verdict == Verdict::Keep
    }
}

/// Screens raw file bytes; parse failures become `parse_error` verdicts
/// rather than errors.
pub fn screen_bytes(bytes: &[u8], resolution: u32) -> ScreenReport {
    match midi::parse_midi(bytes) {
        Err(_) => ScreenReport {
            verdict: Verdict::Exclude,
            reason: Some(ExcludeReason::ParseError),
            bars: 0.0,
        },
        Ok(piece) => screen_piece(&piece, resolution),
    }
}

/// Applies the exclusion criteria, in order: more than one time-signature
/// event, fewer than 10 bars, first numerator of 1. A piece with no
/// time-signature event is read as common time (4/4).
pub fn screen_piece(piece: &MidiPiece, resolution: u32) -> ScreenReport {
    let numerator = piece.time_signatures.first().map_or(4, |ts| ts.numerator);
    let bars = midi::active_timesteps(piece, resolution) as f64
        / f64::from(resolution.max(1))
        / f64::from(numerator);
    let reason = if piece.time_signatures.len() > 1 {
        Some(ExcludeReason::MultipleTimeSignatures)
    } else if bars < 10.0 {
        Some(ExcludeReason::TooFewBars)
    } else if numerator == 1 {
        Some(ExcludeReason::NumeratorOne)
    } else {
        None
    };
    ScreenReport {
        verdict: if reason.is_none() {
            Verdict::Keep
        } else {
            Verdict::Exclude
        },
        reason,
        bars,
    }
}

/// Everything the ratio and matrix exports need, for one piece or summed
/// over a corpus slice: melodic statistics per track, harmonic statistics
/// per unordered track pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalStats {
    pub melodic: IntervalHistogram,
    pub harmonic: IntervalHistogram,
    pub pair_melodic: PairMatrix,
    pub pair_harmonic: PairMatrix,
}

impl Default for IntervalStats {
    fn default() -> Self {
        Self::new()
    }
}

impl IntervalStats {
    pub fn new() -> Self {
        IntervalStats {
            melodic: IntervalHistogram::new(),
            harmonic: IntervalHistogram::new(),
            pair_melodic: PairMatrix::new(Mode::Melodic),
            pair_harmonic: PairMatrix::new(Mode::Harmonic),
        }
    }

    pub fn merge(&mut self, other: &IntervalStats) {
        self.melodic.merge(&other.melodic);
        self.harmonic.merge(&other.harmonic);
        self.pair_melodic
            .merge(&other.pair_melodic)
            .expect("melodic matrices share a mode by construction");
        self.pair_harmonic
            .merge(&other.pair_harmonic)
            .expect("harmonic matrices share a mode by construction");
    }

    pub fn melodic_ratios(&self) -> RatioReport {
        self.melodic.ratios()
    }

    pub fn harmonic_ratios(&self) -> RatioReport {
        self.harmonic.ratios()
    }
}

/// Statistics for one piece given its per-track pianorolls (equal length
/// and resolution, as produced by [`midi::to_pianorolls`]).
///
/// Melodic sequences come from each track's melody line. Harmonic sequences
/// come from every unordered pair of tracks, encoded with the lower track
/// index as reference; interval types and simple classes are unaffected by
/// which side is the reference, so the pairing order cannot change ratios or
/// matrices.
pub fn analyze_rolls(rolls: &[Pianoroll]) -> Result<IntervalStats, EmbedError> {
    let mut stats = IntervalStats::new();
    let Some(first) = rolls.first() else {
        return Ok(stats);
    };
    for roll in rolls {
        if roll.resolution() != first.resolution() {
            return Err(EmbedError::ResolutionMismatch {
                target: roll.resolution(),
                reference: first.resolution(),
            });
        }
        if roll.timesteps() != first.timesteps() {
            return Err(EmbedError::LengthMismatch {
                target: roll.timesteps(),
                reference: first.timesteps(),
            });
        }
    }
    let resolution = first.resolution();
    let lines: Vec<PitchLine> = rolls.iter().map(Pianoroll::extract_melody).collect();
    for line in &lines {
        let seq = melodic_from_line(line, resolution);
        stats.melodic.add_sequence(&seq);
        stats
            .pair_melodic
            .add_sequence(&seq)
            .expect("melodic sequence into melodic matrix");
    }
    for (i, reference) in lines.iter().enumerate() {
        for target in &lines[i + 1..] {
            let seq = harmonic_from_lines(target, reference, resolution)?;
            stats.harmonic.add_sequence(&seq);
            stats
                .pair_harmonic
                .add_sequence(&seq)
                .expect("harmonic sequence into harmonic matrix");
        }
    }
    Ok(stats)
}

/// Sums per-file statistics by label and adds the corpus-wide [`ALL_LABEL`]
/// aggregate (present even for an empty input).
pub fn aggregate_by_composer<I>(items: I) -> BTreeMap<String, IntervalStats>
where
    I: IntoIterator<Item = (String, IntervalStats)>,
{
    let mut map = BTreeMap::new();
    map.insert(ALL_LABEL.to_string(), IntervalStats::new());
    for (label, stats) in items {
        map.entry(label)
            .or_insert_with(IntervalStats::new)
            .merge(&stats);
        if let Some(all) = map.get_mut(ALL_LABEL) {
            all.merge(&stats);
        }
    }
    map
}

fn float_cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Screening log: `path,verdict,reason,bars`, one row per file.
pub fn write_screening_csv<W: Write>(
    writer: W,
    rows: &[(String, ScreenReport)],
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["path", "verdict", "reason", "bars"])?;
    for (path, report) in rows {
        w.write_record([
            path.as_str(),
            match report.verdict {
                Verdict::Keep => "keep",
                Verdict::Exclude => "exclude",
            },
            &report.reason.map(|r| r.to_string()).unwrap_or_default(),
            &report.bars.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Ratio table with the [`ALL_LABEL`] row first, then composers in label
/// order. The count columns report the melodic histogram; the harmonic
/// minor/Major ratio gets its own column. Undefined ratios are empty cells.
pub fn write_ratios_csv<W: Write>(
    writer: W,
    table: &BTreeMap<String, IntervalStats>,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "composer",
        "f_min",
        "f_Maj",
        "r_min_maj_melodic",
        "r_min_maj_harmonic",
        "f_dsc",
        "f_asc",
        "r_dsc_asc",
    ])?;
    let all_first = table.get_key_value(ALL_LABEL).into_iter().chain(
        table
            .iter()
            .filter(|(label, _)| label.as_str() != ALL_LABEL),
    );
    for (label, stats) in all_first {
        let melodic = stats.melodic_ratios();
        let harmonic = stats.harmonic_ratios();
        w.write_record([
            label.as_str(),
            &melodic.f_min.to_string(),
            &melodic.f_maj.to_string(),
            &float_cell(melodic.r_min_maj),
            &float_cell(harmonic.r_min_maj),
            &melodic.f_dsc.to_string(),
            &melodic.f_asc.to_string(),
            &float_cell(melodic.r_dsc_asc),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// A 12×12 count matrix with Table-1 class labels on both axes.
pub fn write_matrix_csv<W: Write>(writer: W, matrix: &[Vec<u64>]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["class"];
    header.extend(CLASS_NAMES);
    w.write_record(&header)?;
    for (label, row) in CLASS_NAMES.iter().zip(matrix) {
        let mut record = vec![label.to_string()];
        record.extend(row.iter().map(|c| c.to_string()));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// JSON form of one matrix: class labels plus both views.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub mode: Mode,
    pub classes: Vec<String>,
    pub directed: Vec<Vec<u64>>,
    pub undirected: Vec<Vec<u64>>,
}

impl PairMatrix {
    pub fn export(&self) -> MatrixExport {
        MatrixExport {
            mode: self.mode,
            classes: CLASS_NAMES.iter().map(|s| s.to_string()).collect(),
            directed: self.directed.clone(),
            undirected: self.undirected(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use iemb_fixtures::{quarter_melody_smf, smf, TrackBytes};

    fn seq(mode: Mode, semitone_runs: &[Option<i32>]) -> IntervalSequence {
        let tokens = semitone_runs
            .iter()
            .map(|s| match s {
                None => IntervalToken::Silence,
                Some(s) => IntervalToken::Note(Interval::from_semitones(*s)),
            })
            .collect();
        IntervalSequence {
            mode,
            resolution: 24,
            tokens,
            origin: None,
            reference_track: None,
            bar_length: None,
            bar_anchors: None,
        }
    }

    #[test]
    fn histogram_counts_notes_not_timesteps() {
        let sustained = seq(Mode::Melodic, &[Some(4); 24]);
        let hist = interval_histogram(&[sustained]);
        assert_eq!(hist.f_maj(), 1);
        assert_eq!(hist.count(4, false), 1);
        assert_eq!(hist.f_min(), 0);
    }

    #[test]
    fn histogram_of_silence_is_empty() {
        let hist = interval_histogram(&[seq(Mode::Melodic, &[None; 8])]);
        assert!(hist.is_empty());
        assert_eq!(hist.ratios().r_min_maj, None);
        assert_eq!(hist.ratios().r_dsc_asc, None);
    }

    #[test]
    fn histogram_bins_by_class_and_direction() {
        let hist = interval_histogram(&[seq(Mode::Melodic, &[Some(1), Some(-2)])]);
        assert_eq!(hist.count(1, false), 1); // min 2nd ascending
        assert_eq!(hist.count(2, true), 1); // Maj 2nd descending
        assert_eq!(hist.f_min(), 1);
        assert_eq!(hist.f_maj(), 1);
        assert_eq!(hist.minor_major_ratio(), Some(0.5));
    }

    #[test]
    fn unisons_are_tracked_but_kept_out_of_both_ratios() {
        // Two distance-zero notes separated by silence, one octave leap up.
        let hist = interval_histogram(&[seq(Mode::Melodic, &[Some(0), None, Some(0), Some(12)])]);
        assert_eq!(hist.unisons(), 2);
        assert_eq!(hist.f_asc(), 1);
        assert_eq!(hist.f_dsc(), 0);
        assert_eq!(hist.minor_major_ratio(), None, "octaves are not min or Maj");
        assert_eq!(
            hist.desc_asc_ratio(),
            Some(0.0),
            "only the ascending octave counts"
        );

        let only_unisons = interval_histogram(&[seq(Mode::Melodic, &[Some(0)])]);
        assert_eq!(only_unisons.desc_asc_ratio(), None);
    }

    #[test]
    fn ratio_edge_values() {
        let all_major = interval_histogram(&[seq(Mode::Melodic, &[Some(4), None, Some(9)])]);
        assert_eq!(all_major.minor_major_ratio(), Some(0.0));
        let mixed = interval_histogram(&[seq(
            Mode::Melodic,
            &[Some(3), None, Some(-8), None, Some(4)],
        )]);
        assert_eq!(mixed.f_min(), 2);
        assert_eq!(mixed.f_maj(), 1);
        assert_eq!(mixed.minor_major_ratio(), Some(2.0 / 3.0));
        assert_eq!(mixed.desc_asc_ratio(), Some(1.0 / 3.0));
    }

    #[test]
    fn deduplication_splits_runs_at_silence() {
        // [A,A,Sil,A,A] is two notes of A, not one.
        let hist = interval_histogram(&[seq(
            Mode::Melodic,
            &[Some(4), Some(4), None, Some(4), Some(4)],
        )]);
        assert_eq!(hist.f_maj(), 2);
    }

    #[test]
    fn pair_matrix_counts_successions() {
        let matrix = pair_matrix(
            &[seq(Mode::Melodic, &[Some(2), Some(10), Some(2)])],
            Mode::Melodic,
        )
        .unwrap();
        assert_eq!(matrix.directed()[2][10], 1);
        assert_eq!(matrix.directed()[10][2], 1);
        assert_eq!(matrix.total(), 2);
        let undirected = matrix.undirected();
        assert_eq!(undirected[2][10], 2);
        assert_eq!(undirected[10][2], 2);
    }

    #[test]
    fn pair_matrix_ignores_octave_and_direction() {
        // Maj 2nd up, then Maj 2nd down an octave: both are class 2.
        let matrix =
            pair_matrix(&[seq(Mode::Melodic, &[Some(2), Some(-14)])], Mode::Melodic).unwrap();
        assert_eq!(matrix.directed()[2][2], 1);
        assert_eq!(matrix.total(), 1);
    }

    #[test]
    fn pair_matrix_trivial_cases() {
        let single = pair_matrix(&[seq(Mode::Melodic, &[Some(4)])], Mode::Melodic).unwrap();
        assert_eq!(single.total(), 0);

        // [a,a] collapses to one run: no pair.
        let repeated =
            pair_matrix(&[seq(Mode::Melodic, &[Some(4), Some(4)])], Mode::Melodic).unwrap();
        assert_eq!(repeated.total(), 0);

        // Silence between notes breaks adjacency.
        let split = pair_matrix(
            &[seq(Mode::Melodic, &[Some(4), None, Some(7)])],
            Mode::Melodic,
        )
        .unwrap();
        assert_eq!(split.total(), 0);

        // Unisons participate: class 0 to class 4.
        let with_unison =
            pair_matrix(&[seq(Mode::Melodic, &[Some(0), Some(4)])], Mode::Melodic).unwrap();
        assert_eq!(with_unison.directed()[0][4], 1);
    }

    #[test]
    fn pair_matrix_rejects_mixed_modes() {
        let err = pair_matrix(&[seq(Mode::Harmonic, &[Some(4)])], Mode::Melodic).unwrap_err();
        assert_eq!(
            err,
            AnalysisError::ModeMismatch {
                expected: Mode::Melodic,
                found: Mode::Harmonic
            }
        );
        let mut a = PairMatrix::new(Mode::Melodic);
        let b = PairMatrix::new(Mode::Harmonic);
        assert!(a.merge(&b).is_err());
    }

    #[test]
    fn undirected_view_is_symmetric_with_preserved_diagonal() {
        let mut matrix = PairMatrix::new(Mode::Melodic);
        matrix
            .add_sequence(&seq(
                Mode::Melodic,
                &[Some(2), Some(2 + 12), Some(5), Some(5), Some(7), Some(2)],
            ))
            .unwrap();
        let undirected = matrix.undirected();
        for i in 0..CLASS_COUNT {
            for j in 0..CLASS_COUNT {
                assert_eq!(undirected[i][j], undirected[j][i]);
            }
        }
        // [2],[2+12] are distinct tokens of the same class: diagonal pair.
        assert_eq!(matrix.directed()[2][2], 1);
        assert_eq!(undirected[2][2], 1);
    }

    fn piece_from(tracks: &[&[u8]]) -> MidiPiece {
        let built: Vec<TrackBytes> = tracks
            .iter()
            .map(|pitches| iemb_fixtures::quarter_note_track(96, 0, 100, pitches))
            .collect();
        midi::parse_midi(&smf(1, 96, &built)).unwrap()
    }

    #[test]
    fn screening_follows_the_exclusion_order() {
        // 4 bars of 4/4 at resolution 24: 384 active steps.
        let four_bars = quarter_melody_smf(96, &[60; 16]);
        let report = screen_bytes(&four_bars, 24);
        assert_eq!(report.verdict, Verdict::Exclude);
        assert_eq!(report.reason, Some(ExcludeReason::TooFewBars));
        assert_eq!(report.bars, 4.0);

        let clean = quarter_melody_smf(96, &[60; 48]); // 12 bars
        let report = screen_bytes(&clean, 24);
        assert_eq!(report.verdict, Verdict::Keep);
        assert_eq!(report.reason, None);
        assert_eq!(report.bars, 12.0);

        let report = screen_bytes(b"not midi at all", 24);
        assert_eq!(report.reason, Some(ExcludeReason::ParseError));
        assert_eq!(report.bars, 0.0);
    }

    #[test]
    fn multiple_time_signatures_trump_everything_after_parsing() {
        let mut t = TrackBytes::new();
        t.time_signature(0, 4, 2);
        t.time_signature(960, 3, 2);
        iemb_fixtures::legato_notes(&mut t, 96, 0, 100, &[(60, 8)]);
        t.end_of_track(0);
        let report = screen_bytes(&smf(0, 96, &[t]), 24);
        assert_eq!(report.reason, Some(ExcludeReason::MultipleTimeSignatures));
    }

    #[test]
    fn numerator_one_is_excluded_even_with_enough_bars() {
        let mut t = TrackBytes::new();
        t.time_signature(0, 1, 2); // 1/4 time
        iemb_fixtures::legato_notes(&mut t, 96, 0, 100, &[(60, 16)]);
        t.end_of_track(0);
        let report = screen_bytes(&smf(0, 96, &[t]), 24);
        assert_eq!(report.reason, Some(ExcludeReason::NumeratorOne));
        assert_eq!(report.bars, 16.0);

        // ...but too-few-bars is checked first.
        let mut t = TrackBytes::new();
        t.time_signature(0, 1, 2);
        iemb_fixtures::legato_notes(&mut t, 96, 0, 100, &[(60, 4)]);
        t.end_of_track(0);
        let report = screen_bytes(&smf(0, 96, &[t]), 24);
        assert_eq!(report.reason, Some(ExcludeReason::TooFewBars));
    }

    #[test]
    fn missing_time_signature_defaults_to_common_time() {
        let mut t = TrackBytes::new();
        iemb_fixtures::legato_notes(&mut t, 96, 0, 100, &[(60, 48)]);
        t.end_of_track(0);
        let report = screen_bytes(&smf(0, 96, &[t]), 24);
        assert_eq!(report.verdict, Verdict::Keep);
        assert_eq!(report.bars, 12.0);
    }

    #[test]
    fn analyze_rolls_pairs_tracks_with_the_lower_index_as_reference() {
        // Track 0 holds C4, track 1 holds E4 above it: one harmonic note,
        // a Major third, ascending because the target sits above the lower
        // reference track.
        let piece = piece_from(&[&[60, 60], &[64, 64]]);
        let rolls = midi::to_pianorolls(&piece, 24);
        let stats = analyze_rolls(&rolls).unwrap();
        assert_eq!(stats.harmonic.f_maj(), 1);
        assert_eq!(stats.harmonic.f_min(), 0);
        assert_eq!(stats.harmonic.count(4, false), 1);
        assert_eq!(stats.harmonic.count(4, true), 0);
        // Two tracks, each one long note then a same-pitch sustain: the
        // melodic histogram sees one unison onset per track.
        assert_eq!(stats.melodic.unisons(), 2);
    }

    #[test]
    fn analyze_rolls_rejects_mismatched_rolls() {
        let a = Pianoroll::silent(4, 24);
        let b = Pianoroll::silent(5, 24);
        assert_eq!(
            analyze_rolls(&[a.clone(), b]),
            Err(EmbedError::LengthMismatch {
                target: 5,
                reference: 4
            })
        );
        let c = Pianoroll::silent(4, 12);
        assert_eq!(
            analyze_rolls(&[a, c]),
            Err(EmbedError::ResolutionMismatch {
                target: 12,
                reference: 24
            })
        );
        assert_eq!(analyze_rolls(&[]).unwrap(), IntervalStats::new());
    }

    #[test]
    fn aggregation_sums_counts_before_taking_ratios() {
        let mut piece_a = IntervalStats::new();
        piece_a
            .melodic
            .add_sequence(&seq(Mode::Melodic, &[Some(3), None, Some(4)]));
        let mut piece_b = IntervalStats::new();
        piece_b.melodic.add_sequence(&seq(
            Mode::Melodic,
            &[Some(3), None, Some(8), None, Some(-3), None, Some(4)],
        ));
        let table = aggregate_by_composer([
            ("brahms".to_string(), piece_a.clone()),
            ("brahms".to_string(), piece_b),
            ("bizet".to_string(), piece_a.clone()),
        ]);
        // brahms: f_min 1+3, f_Maj 1+1 → 4/6, not the mean of 1/2 and 3/4.
        let brahms = table["brahms"].melodic_ratios();
        assert_eq!(brahms.f_min, 4);
        assert_eq!(brahms.f_maj, 2);
        assert_eq!(brahms.r_min_maj, Some(4.0 / 6.0));
        // The single-piece label equals the piece itself.
        assert_eq!(table["bizet"], piece_a);
        // ALL sums everything.
        assert_eq!(table[ALL_LABEL].melodic_ratios().f_min, 5);
        assert_eq!(table[ALL_LABEL].melodic_ratios().f_maj, 3);
    }

    #[test]
    fn empty_corpus_aggregates_to_all_with_undefined_ratios() {
        let table = aggregate_by_composer(std::iter::empty());
        assert_eq!(table.len(), 1);
        let all = &table[ALL_LABEL];
        assert_eq!(all.melodic_ratios().r_min_maj, None);
        assert_eq!(all.harmonic_ratios().r_min_maj, None);
    }

    #[test]
    fn screening_csv_layout() {
        let rows = vec![
            (
                "bach/fugue.mid".to_string(),
                ScreenReport {
                    verdict: Verdict::Keep,
                    reason: None,
                    bars: 32.0,
                },
            ),
            (
                "bad.mid".to_string(),
                ScreenReport {
                    verdict: Verdict::Exclude,
                    reason: Some(ExcludeReason::ParseError),
                    bars: 0.0,
                },
            ),
        ];
        let mut bytes = Vec::new();
        write_screening_csv(&mut bytes, &rows).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "path,verdict,reason,bars");
        assert_eq!(lines[1], "bach/fugue.mid,keep,,32");
        assert_eq!(lines[2], "bad.mid,exclude,parse_error,0");
    }

    #[test]
    fn ratios_csv_puts_all_first_and_leaves_undefined_cells_empty() {
        let mut with_notes = IntervalStats::new();
        with_notes
            .melodic
            .add_sequence(&seq(Mode::Melodic, &[Some(3), None, Some(4)]));
        let table = aggregate_by_composer([("zelter".to_string(), with_notes)]);
        let mut bytes = Vec::new();
        write_ratios_csv(&mut bytes, &table).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "composer,f_min,f_Maj,r_min_maj_melodic,r_min_maj_harmonic,f_dsc,f_asc,r_dsc_asc"
        );
        assert!(lines[1].starts_with("ALL,1,1,0.5,,"), "line: {}", lines[1]);
        assert!(
            lines[2].starts_with("zelter,1,1,0.5,,"),
            "line: {}",
            lines[2]
        );
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn matrix_csv_uses_class_labels_on_both_axes() {
        let matrix =
            pair_matrix(&[seq(Mode::Melodic, &[Some(2), Some(10)])], Mode::Melodic).unwrap();
        let mut bytes = Vec::new();
        write_matrix_csv(&mut bytes, matrix.directed()).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 13);
        assert!(lines[0].starts_with("class,perfect 1st,min 2nd,Maj 2nd"));
        let maj2_row = lines[3]; // class row order follows CLASS_NAMES
        assert!(maj2_row.starts_with("Maj 2nd,"));
        let min7_count: Vec<&str> = maj2_row.split(',').collect();
        assert_eq!(min7_count[1 + 10], "1"); // label column offsets counts by one
    }

    #[test]
    fn matrix_export_carries_labels_and_both_views() {
        let matrix =
            pair_matrix(&[seq(Mode::Harmonic, &[Some(4), Some(7)])], Mode::Harmonic).unwrap();
        let export = matrix.export();
        assert_eq!(export.mode, Mode::Harmonic);
        assert_eq!(export.classes.len(), 12);
        assert_eq!(export.classes[0], "perfect 1st");
        assert_eq!(export.directed[4][7], 1);
        assert_eq!(export.undirected[7][4], 1);
        let json = serde_json::to_value(&export).unwrap();
        assert_eq!(json["mode"], "harmonic");
    }
}

//! The pianoroll representation: a timestep × pitch matrix of velocities.
//!
//! Rows are timesteps, columns are the 128 MIDI pitches, cells are note
//! velocities with 0 meaning silence. `resolution` records how many timesteps
//! make up one quarter note, so durations stay interpretable after the grid
//! leaves tick space.

use serde::de::Error as _;
use std::io::{Read, Write};
use thiserror::Error;

/// Width of the pitch axis: MIDI note numbers 0..=127.
pub const PITCH_COUNT: usize = 128;

/// Maximum MIDI velocity.
pub const VELOCITY_MAX: u8 = 127;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pianoroll {
    grid: Vec<Vec<u8>>,
    resolution: u32,
}

/// A shape or range problem found by [`Pianoroll::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("timestep {timestep}: pitch axis has {width} columns, expected {PITCH_COUNT}")]
    PitchAxisWidth { timestep: usize, width: usize },
    #[error("timestep {timestep}, pitch {pitch}: velocity {velocity} exceeds {VELOCITY_MAX}")]
    VelocityOutOfRange {
        timestep: usize,
        pitch: usize,
        velocity: u8,
    },
}

/// A pianoroll file could not be read.
#[derive(Debug, Error)]
pub enum PianorollIoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("row {row}: expected {PITCH_COUNT} velocity columns, found {found}")]
    BadWidth { row: usize, found: usize },
    #[error("row {row}, column {col}: {value:?} is not a velocity")]
    BadVelocity {
        row: usize,
        col: usize,
        value: String,
    },
}

impl Pianoroll {
    /// An all-rest roll of the given length.
    pub fn silent(timesteps: usize, resolution: u32) -> Self {
        Pianoroll {
            grid: vec![vec![0; PITCH_COUNT]; timesteps],
            resolution,
        }
    }

    /// Wraps an existing grid without validating it; call [`validate`] to
    /// check shape and velocity range when the grid comes from outside.
    ///
    /// [`validate`]: Pianoroll::validate
    pub fn from_grid(grid: Vec<Vec<u8>>, resolution: u32) -> Self {
        Pianoroll { grid, resolution }
    }

    pub fn timesteps(&self) -> usize {
        self.grid.len()
    }

    /// Timesteps per quarter note.
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.grid
    }

    /// Velocity at a cell; 0 for anything out of bounds.
    pub fn velocity_at(&self, timestep: usize, pitch: u8) -> u8 {
        self.grid
            .get(timestep)
            .and_then(|row| row.get(usize::from(pitch)))
            .copied()
            .unwrap_or(0)
    }

    /// All shape and range violations, in row order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (timestep, row) in self.grid.iter().enumerate() {
            if row.len() != PITCH_COUNT {
                out.push(Violation::PitchAxisWidth {
                    timestep,
                    width: row.len(),
                });
            }
            for (pitch, &velocity) in row.iter().enumerate() {
                if velocity > VELOCITY_MAX {
                    out.push(Violation::VelocityOutOfRange {
                        timestep,
                        pitch,
                        velocity,
                    });
                }
            }
        }
        out
    }

    /// The melody line: at each timestep, the highest pitch with nonzero
    /// velocity, or `None` during rests.
    pub fn extract_melody(&self) -> PitchLine {
        PitchLine(
            self.grid
                .iter()
                .map(|row| row.iter().rposition(|&v| v > 0).map(|p| p as u8))
                .collect(),
        )
    }

    /// Length up to and including the last timestep with any sounding note.
    pub fn active_length(&self) -> usize {
        self.grid
            .iter()
            .rposition(|row| row.iter().any(|&v| v > 0))
            .map_or(0, |last| last + 1)
    }

    /// The same roll with every sounding pitch shifted by `semitones`, or
    /// `None` if any note would leave the MIDI pitch range.
    pub fn transposed(&self, semitones: i32) -> Option<Pianoroll> {
        let mut grid = vec![vec![0u8; PITCH_COUNT]; self.grid.len()];
        for (t, row) in self.grid.iter().enumerate() {
            for (pitch, &velocity) in row.iter().enumerate() {
                if velocity > 0 {
                    let moved = pitch as i32 + semitones;
                    if !(0..PITCH_COUNT as i32).contains(&moved) {
                        return None;
                    }
                    grid[t][moved as usize] = velocity;
                }
            }
        }
        Some(Pianoroll {
            grid,
            resolution: self.resolution,
        })
    }

    /// Writes the grid as CSV with header `p0,p1,…,p127`, one row per
    /// timestep.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), PianorollIoError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record((0..PITCH_COUNT).map(|p| format!("p{p}")))?;
        for row in &self.grid {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads a grid written by [`write_csv`]. `resolution` is not part of
    /// the CSV payload and must be supplied by the caller.
    ///
    /// [`write_csv`]: Pianoroll::write_csv
    pub fn read_csv<R: Read>(reader: R, resolution: u32) -> Result<Self, PianorollIoError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let mut grid = Vec::new();
        for (row_idx, record) in r.records().enumerate() {
            let record = record?;
            if record.len() != PITCH_COUNT {
                return Err(PianorollIoError::BadWidth {
                    row: row_idx,
                    found: record.len(),
                });
            }
            let mut row = Vec::with_capacity(PITCH_COUNT);
            for (col, field) in record.iter().enumerate() {
                let velocity: u8 =
                    field
                        .trim()
                        .parse()
                        .map_err(|_| PianorollIoError::BadVelocity {
                            row: row_idx,
                            col,
                            value: field.to_string(),
                        })?;
                row.push(velocity);
            }
            grid.push(row);
        }
        Ok(Pianoroll { grid, resolution })
    }

    /// Writes the grid as a JSON array of rows, mirroring the matrix.
    pub fn write_json<W: Write>(&self, writer: W) -> Result<(), PianorollIoError> {
        serde_json::to_writer(writer, &self.grid)?;
        Ok(())
    }

    /// Reads a grid written by [`write_json`], enforcing the 128-wide pitch
    /// axis.
    ///
    /// [`write_json`]: Pianoroll::write_json
    pub fn read_json<R: Read>(reader: R, resolution: u32) -> Result<Self, PianorollIoError> {
        let grid: Vec<Vec<u8>> = serde_json::from_reader(reader)?;
        if let Some(row) = grid.iter().position(|row| row.len() != PITCH_COUNT) {
            return Err(PianorollIoError::Json(serde_json::Error::custom(format!(
                "row {row}: expected {PITCH_COUNT} velocity columns, found {}",
                grid[row].len()
            ))));
        }
        Ok(Pianoroll { grid, resolution })
    }
}

/// A monophonic pitch-per-timestep line, `None` during rests.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PitchLine(Vec<Option<u8>>);

impl PitchLine {
    pub fn new(pitches: Vec<Option<u8>>) -> Self {
        PitchLine(pitches)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The pitch sounding at `timestep`; `None` for rests and out of range.
    pub fn pitch_at(&self, timestep: usize) -> Option<u8> {
        self.0.get(timestep).copied().flatten()
    }

    pub fn as_slice(&self) -> &[Option<u8>] {
        &self.0
    }

    /// The first sounding pitch, skipping leading rests.
    pub fn first_pitch(&self) -> Option<u8> {
        self.0.iter().copied().flatten().next()
    }
}

impl From<Vec<Option<u8>>> for PitchLine {
    fn from(pitches: Vec<Option<u8>>) -> Self {
        PitchLine(pitches)
    }
}

//! Interval embeddings for symbolic music.
//!
//! The crate turns Standard MIDI Files into pianorolls, losslessly encodes
//! pianorolls as sequences of music-theoretic intervals (melodic, harmonic,
//! or barline-relative), and computes corpus-level interval statistics.
//!
//! Modules, in pipeline order:
//!
//! * [`midi`] — byte-level SMF reading and tick → timestep quantization
//! * [`pianoroll`] — the timestep × pitch velocity matrix and melody lines
//! * [`interval`] — the semitone ↔ interval bijection and token type
//! * [`embedder`] — pianoroll ↔ interval-sequence codecs plus run-length
//!   compression
//! * [`analysis`] — histograms, minor/Major and descending/ascending ratios,
//!   pairwise interval matrices, and corpus screening
//! * [`parallel`] — a small order-preserving parallel map helper

pub mod analysis;
pub mod embedder;
pub mod interval;
pub mod midi;
pub mod parallel;
pub mod pianoroll;

//! Music-theoretic intervals over equal temperament.
//!
//! An [`Interval`] is the distance between two pitches, spelled as an order
//! (1st through 7th), a type (diminished through augmented, encoded −2..=2),
//! an octave displacement, and a direction. Every semitone distance has
//! exactly one canonical spelling, given by the 12-row class table below;
//! [`Interval::from_semitones`] and [`Interval::semitones`] are mutually
//! inverse over that canonical set.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Semitone width of the perfect/Major spelling of each order 1..=7.
const BASE_SEMITONES: [i32; 7] = [0, 2, 4, 5, 7, 9, 11];

/// Canonical `(order, type)` spelling for each semitone class 0..=11.
///
/// Minor/Major spellings are preferred for seconds, thirds, sixths and
/// sevenths; the tritone is spelled as a diminished fifth. Augmented
/// spellings never appear.
const CLASS_TABLE: [(u8, i8); 12] = [
    (1, 0),  // perfect 1st
    (2, -1), // min 2nd
    (2, 1),  // Maj 2nd
    (3, -1), // min 3rd
    (3, 1),  // Maj 3rd
    (4, 0),  // perfect 4th
    (5, -2), // dim 5th
    (5, 0),  // perfect 5th
    (6, -1), // min 6th
    (6, 1),  // Maj 6th
    (7, -1), // min 7th
    (7, 1),  // Maj 7th
];

/// Display names of the canonical simple classes, indexed by semitone class
/// 0..=11. Used for matrix headers and axis labels.
pub const CLASS_NAMES: [&str; 12] = [
    "perfect 1st",
    "min 2nd",
    "Maj 2nd",
    "min 3rd",
    "Maj 3rd",
    "perfect 4th",
    "dim 5th",
    "perfect 5th",
    "min 6th",
    "Maj 6th",
    "min 7th",
    "Maj 7th",
];

/// Number of simple interval classes (semitone distances modulo the octave).
pub const CLASS_COUNT: usize = 12;

/// The requested `(order, type)` pair names no interval: either the order is
/// outside 1..=7, or the type does not exist for that order's class (there is
/// no "minor fifth" and no "perfect third").
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no such interval: order {order} with type {itype}")]
pub struct IllegalInterval {
    pub order: u8,
    pub itype: i8,
}

/// A directed musical interval.
///
/// Fields are private so that only legal spellings exist; construct with
/// [`Interval::new`], [`Interval::from_semitones`], or
/// [`Interval::between_pitches`]. Serialized as
/// `{"order":…,"type":…,"octave":…,"desc":…}`, and deserialization applies
/// the same legality checks as `new`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct Interval {
    order: u8,
    itype: i8,
    octave: u16,
    descending: bool,
}

/// Wire format of [`Interval`]; conversion performs validation.
#[derive(Serialize, Deserialize)]
struct RawInterval {
    order: u8,
    #[serde(rename = "type")]
    itype: i8,
    octave: u16,
    desc: bool,
}

impl TryFrom<RawInterval> for Interval {
    type Error = IllegalInterval;

    fn try_from(raw: RawInterval) -> Result<Self, IllegalInterval> {
        Interval::new(raw.order, raw.itype, raw.octave, raw.desc)
    }
}

impl From<Interval> for RawInterval {
    fn from(iv: Interval) -> Self {
        RawInterval {
            order: iv.order,
            itype: iv.itype,
            octave: iv.octave,
            desc: iv.descending,
        }
    }
}

/// Interval type codes. Orders 1, 4 and 5 admit diminished, perfect and
/// augmented; orders 2, 3, 6 and 7 admit diminished, minor, Major and
/// augmented.
impl Interval {
    pub const DIMINISHED: i8 = -2;
    pub const MINOR: i8 = -1;
    pub const PERFECT: i8 = 0;
    pub const MAJOR: i8 = 1;
    pub const AUGMENTED: i8 = 2;
}

fn is_legal(order: u8, itype: i8) -> bool {
    match order {
        1 | 4 | 5 => matches!(itype, -2 | 0 | 2),
        2 | 3 | 6 | 7 => matches!(itype, -2 | -1 | 1 | 2),
        _ => false,
    }
}

/// Semitone adjustment of `itype` relative to the order's base width.
fn type_offset(order: u8, itype: i8) -> i32 {
    if matches!(order, 1 | 4 | 5) {
        // diminished −1, perfect 0, augmented +1
        (itype / 2) as i32
    } else {
        // Major 0, minor −1, diminished −2, augmented +1
        match itype {
            1 => 0,
            2 => 1,
            other => other as i32,
        }
    }
}

impl Interval {
    /// Builds an interval from its spelled parts, rejecting combinations the
    /// class table forbids. A descending perfect unison with no octave
    /// displacement is normalized to ascending (zero has no direction).
    pub fn new(
        order: u8,
        itype: i8,
        octave: u16,
        descending: bool,
    ) -> Result<Self, IllegalInterval> {
        if !is_legal(order, itype) {
            return Err(IllegalInterval { order, itype });
        }
        let descending = descending && !(order == 1 && itype == 0 && octave == 0);
        Ok(Interval {
            order,
            itype,
            octave,
            descending,
        })
    }

    /// The canonical spelling of a signed semitone distance. Total: any
    /// `i32` maps to an interval (octave displacement saturates at
    /// `u16::MAX`, far beyond the MIDI pitch range).
    pub fn from_semitones(semitones: i32) -> Self {
        let magnitude = semitones.unsigned_abs();
        let (order, itype) = CLASS_TABLE[(magnitude % 12) as usize];
        Interval {
            order,
            itype,
            octave: (magnitude / 12).min(u32::from(u16::MAX)) as u16,
            descending: semitones < 0,
        }
    }

    /// The canonical interval from pitch `from` up or down to pitch `to`.
    pub fn between_pitches(from: u8, to: u8) -> Self {
        Self::from_semitones(i32::from(to) - i32::from(from))
    }

    /// The signed semitone distance this interval spells.
    pub fn semitones(&self) -> i32 {
        let magnitude = BASE_SEMITONES[usize::from(self.order) - 1]
            + type_offset(self.order, self.itype)
            + 12 * i32::from(self.octave);
        if self.descending {
            -magnitude
        } else {
            magnitude
        }
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// Type code: −2 diminished, −1 minor, 0 perfect, 1 Major, 2 augmented.
    pub fn itype(&self) -> i8 {
        self.itype
    }

    pub fn octave(&self) -> u16 {
        self.octave
    }

    pub fn is_descending(&self) -> bool {
        self.descending
    }

    /// True for a distance of exactly zero semitones.
    pub fn is_unison(&self) -> bool {
        self.semitones() == 0
    }

    /// Semitone class 0..=11: the distance with octave and direction ignored.
    pub fn simple_class(&self) -> usize {
        (self.semitones().unsigned_abs() % 12) as usize
    }

    /// English name: `"perfect 5th"`, `"min 2nd desc"`,
    /// `"Maj 3rd +1 octave desc"`, `"Maj 6th +2 octaves"`.
    pub fn name(&self) -> String {
        let quality = match self.itype {
            -2 => "dim",
            -1 => "min",
            0 => "perfect",
            1 => "Maj",
            _ => "aug",
        };
        let mut out = format!("{quality} {}", ordinal(self.order));
        if self.octave > 0 {
            out.push_str(&format!(" +{} octave", self.octave));
            if self.octave > 1 {
                out.push('s');
            }
        }
        if self.descending {
            out.push_str(" desc");
        }
        out
    }
}

fn ordinal(order: u8) -> &'static str {
    match order {
        1 => "1st",
        2 => "2nd",
        3 => "3rd",
        4 => "4th",
        5 => "5th",
        6 => "6th",
        _ => "7th",
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// One timestep of an interval sequence: either silence or a sounding note
/// carrying the interval that produced it. Serializes as `null` or as the
/// interval object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Option<Interval>", into = "Option<Interval>")]
pub enum IntervalToken {
    Silence,
    Note(Interval),
}

impl IntervalToken {
    pub fn is_silence(&self) -> bool {
        matches!(self, IntervalToken::Silence)
    }

    pub fn interval(&self) -> Option<Interval> {
        match self {
            IntervalToken::Silence => None,
            IntervalToken::Note(iv) => Some(*iv),
        }
    }
}

impl From<Option<Interval>> for IntervalToken {
    fn from(opt: Option<Interval>) -> Self {
        match opt {
            None => IntervalToken::Silence,
            Some(iv) => IntervalToken::Note(iv),
        }
    }
}

impl From<IntervalToken> for Option<Interval> {
    fn from(token: IntervalToken) -> Self {
        token.interval()
    }
}

impl fmt::Display for IntervalToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalToken::Silence => f.write_str("silence"),
            IntervalToken::Note(iv) => iv.fmt(f),
        }
    }
}

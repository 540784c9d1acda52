//! Standard MIDI File reading and tick → timestep quantization.
//!
//! The reader accepts format 0 and format 1 files with tick-based division,
//! walks every MTrk chunk, and keeps exactly what the pipeline needs: note
//! events (paired note-on/note-off) and time-signature meta events. Tempo,
//! program changes, controllers and text are parsed far enough to skip.
//!
//! Parsing never panics: every length, status and data byte is checked, and
//! malformed input comes back as a [`MidiError`].

use crate::pianoroll::{Pianoroll, PITCH_COUNT};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

/// A note with resolved onset and offset in absolute ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoteEvent {
    pub onset_tick: u64,
    pub offset_tick: u64,
    pub pitch: u8,
    /// Note-on velocity, 1..=127.
    pub velocity: u8,
}

/// An FF 58 time-signature meta event, with the denominator expanded from
/// its power-of-two exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeSignatureEvent {
    pub tick: u64,
    pub numerator: u8,
    pub denominator: u32,
}

/// A parsed file: per-track note lists plus all time-signature events,
/// sorted by tick (ties keep track order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MidiPiece {
    /// Ticks per quarter note. Always ≥ 1 for parsed files.
    pub division: u16,
    pub tracks: Vec<Vec<NoteEvent>>,
    pub time_signatures: Vec<TimeSignatureEvent>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MidiError {
    #[error("not a standard MIDI file: bad MThd magic")]
    BadHeaderMagic,
    #[error("MThd length {0} is shorter than 6")]
    BadHeaderLength(u32),
    #[error("unsupported SMF format {0}: only formats 0 and 1 are handled")]
    UnsupportedFormat(u16),
    #[error("SMPTE time division is not supported")]
    SmpteDivision,
    #[error("time division of zero ticks per quarter note")]
    ZeroDivision,
    #[error("unexpected end of data at byte {0}")]
    Truncated(usize),
    #[error("variable-length quantity at byte {0} runs past four bytes")]
    InvalidVarint(usize),
    #[error("data byte {byte:#04x} at byte {offset} arrived with no running status")]
    OrphanDataByte { byte: u8, offset: usize },
    #[error("status byte {status:#04x} at byte {offset} is not valid in a track")]
    InvalidStatus { status: u8, offset: usize },
    #[error("event data byte {byte:#04x} at byte {offset} has the high bit set")]
    InvalidDataByte { byte: u8, offset: usize },
    #[error("track chunk ended without an end-of-track event")]
    MissingEndOfTrack,
}

/// Cursor over a byte slice; `bias` keeps reported offsets absolute when the
/// slice is a chunk carved out of a larger file.
struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    bias: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Reader {
            data,
            pos: 0,
            bias: 0,
        }
    }

    fn with_bias(data: &'a [u8], bias: usize) -> Self {
        Reader { data, pos: 0, bias }
    }

    fn offset(&self) -> usize {
        self.bias + self.pos
    }

    fn at_end(&self) -> bool {
        self.pos >= self.data.len()
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8], MidiError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.data.len())
            .ok_or(MidiError::Truncated(self.bias + self.data.len()))?;
        let slice = &self.data[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, MidiError> {
        Ok(self.bytes(1)?[0])
    }

    fn peek(&self) -> Result<u8, MidiError> {
        self.data
            .get(self.pos)
            .copied()
            .ok_or(MidiError::Truncated(self.offset()))
    }

    fn u16(&mut self) -> Result<u16, MidiError> {
        let b = self.bytes(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32, MidiError> {
        let b = self.bytes(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    /// MIDI variable-length quantity: 7 bits per byte, high bit set on all
    /// but the last, at most four bytes.
    fn varint(&mut self) -> Result<u32, MidiError> {
        let start = self.offset();
        let mut value: u32 = 0;
        for _ in 0..4 {
            let byte = self.u8()?;
            value = (value << 7) | u32::from(byte & 0x7F);
            if byte & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::InvalidVarint(start))
    }

    /// A data byte of a channel message; the high bit must be clear.
    fn data_byte(&mut self) -> Result<u8, MidiError> {
        let offset = self.offset();
        let byte = self.u8()?;
        if byte & 0x80 != 0 {
            return Err(MidiError::InvalidDataByte { byte, offset });
        }
        Ok(byte)
    }
}

/// Parses a complete Standard MIDI File from memory.
pub fn parse_midi(data: &[u8]) -> Result<MidiPiece, MidiError> {
    let mut r = Reader::new(data);
    if r.bytes(4).map_err(|_| MidiError::BadHeaderMagic)? != b"MThd" {
        return Err(MidiError::BadHeaderMagic);
    }
    let header_len = r.u32()?;
    if header_len < 6 {
        return Err(MidiError::BadHeaderLength(header_len));
    }
    let format = r.u16()?;
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    let declared_tracks = r.u16()?;
    let division = r.u16()?;
    if division & 0x8000 != 0 {
        return Err(MidiError::SmpteDivision);
    }
    if division == 0 {
        return Err(MidiError::ZeroDivision);
    }
    r.bytes(header_len as usize - 6)?;

    let mut tracks = Vec::new();
    let mut time_signatures = Vec::new();
    while tracks.len() < usize::from(declared_tracks) {
        let chunk_type = r.bytes(4)?;
        let chunk_len = r.u32()? as usize;
        let chunk_start = r.offset();
        let chunk = r.bytes(chunk_len)?;
        if chunk_type != b"MTrk" {
            // Alien chunks are skipped by their declared length.
            continue;
        }
        let track = parse_track(chunk, chunk_start)?;
        tracks.push(track.notes);
        time_signatures.extend(track.time_signatures);
    }
    // Stable by tick, so simultaneous events keep track order.
    time_signatures.sort_by_key(|ts: &TimeSignatureEvent| ts.tick);
    Ok(MidiPiece {
        division,
        tracks,
        time_signatures,
    })
}

struct ParsedTrack {
    notes: Vec<NoteEvent>,
    time_signatures: Vec<TimeSignatureEvent>,
}

fn parse_track(chunk: &[u8], base: usize) -> Result<ParsedTrack, MidiError> {
    let mut r = Reader::with_bias(chunk, base);
    let mut tick: u64 = 0;
    let mut running_status: Option<u8> = None;
    // Open note-ons per (channel, pitch), oldest first, so each note-off
    // closes the earliest matching onset.
    let mut open: BTreeMap<(u8, u8), VecDeque<(u64, u8)>> = BTreeMap::new();
    let mut notes = Vec::new();
    let mut time_signatures = Vec::new();

    loop {
        if r.at_end() {
            return Err(MidiError::MissingEndOfTrack);
        }
        tick = tick.saturating_add(u64::from(r.varint()?));
        let status_offset = r.offset();
        let lead = r.peek()?;
        let status = if lead & 0x80 != 0 {
            r.u8()?;
            lead
        } else {
            running_status.ok_or(MidiError::OrphanDataByte {
                byte: lead,
                offset: status_offset,
            })?
        };

        match status {
            0xFF => {
                running_status = None;
                let meta_type = r.u8()?;
                let len = r.varint()? as usize;
                let payload = r.bytes(len)?;
                match meta_type {
                    0x2F => break, // end of track; any slack after it is ignored
                    0x58 if payload.len() >= 2 => {
                        let exponent = payload[1];
                        time_signatures.push(TimeSignatureEvent {
                            tick,
                            numerator: payload[0],
                            denominator: 1u32.checked_shl(u32::from(exponent)).unwrap_or(u32::MAX),
                        });
                    }
                    _ => {}
                }
            }
            0xF0 | 0xF7 => {
                running_status = None;
                let len = r.varint()? as usize;
                r.bytes(len)?;
            }
            0xF1..=0xF6 | 0xF8..=0xFE => {
                return Err(MidiError::InvalidStatus {
                    status,
                    offset: status_offset,
                });
            }
            _ => {
                running_status = Some(status);
                let kind = status >> 4;
                let channel = status & 0x0F;
                let d1 = r.data_byte()?;
                let d2 = if matches!(kind, 0xC | 0xD) {
                    0
                } else {
                    r.data_byte()?
                };
                match kind {
                    0x9 if d2 > 0 => {
                        open.entry((channel, d1)).or_default().push_back((tick, d2));
                    }
                    0x8 | 0x9 => {
                        // Note-off, or note-on with velocity 0.
                        if let Some((onset, velocity)) =
                            open.get_mut(&(channel, d1)).and_then(VecDeque::pop_front)
                        {
                            if tick > onset {
                                notes.push(NoteEvent {
                                    onset_tick: onset,
                                    offset_tick: tick,
                                    pitch: d1,
                                    velocity,
                                });
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    // Notes still sounding are cut off at the end-of-track tick.
    for ((_, pitch), onsets) in open {
        for (onset, velocity) in onsets {
            if tick > onset {
                notes.push(NoteEvent {
                    onset_tick: onset,
                    offset_tick: tick,
                    pitch,
                    velocity,
                });
            }
        }
    }
    notes.sort_by_key(|n| (n.onset_tick, n.pitch, n.offset_tick, n.velocity));
    Ok(ParsedTrack {
        notes,
        time_signatures,
    })
}

/// Maps an absolute tick onto the timestep grid: `tick * resolution /
/// division`, rounded half up.
pub fn tick_to_step(tick: u64, resolution: u32, division: u16) -> u64 {
    let division = u128::from(division.max(1));
    let scaled = 2 * u128::from(tick) * u128::from(resolution) + division;
    (scaled / (2 * division)) as u64
}

/// Number of timesteps up to the last rounded note offset, ignoring notes
/// that quantize to zero length.
pub fn active_timesteps(piece: &MidiPiece, resolution: u32) -> u64 {
    piece
        .tracks
        .iter()
        .flatten()
        .filter_map(|n| {
            let onset = tick_to_step(n.onset_tick, resolution, piece.division);
            let offset = tick_to_step(n.offset_tick, resolution, piece.division);
            (offset > onset).then_some(offset)
        })
        .max()
        .unwrap_or(0)
}

/// Renders each track to a pianoroll at `resolution` timesteps per quarter
/// note. All rolls share the same length (the piece's active extent), notes
/// whose onset and offset quantize to the same timestep vanish, and where
/// notes of one pitch overlap, the later onset's velocity wins.
pub fn to_pianorolls(piece: &MidiPiece, resolution: u32) -> Vec<Pianoroll> {
    let total = active_timesteps(piece, resolution) as usize;
    piece
        .tracks
        .iter()
        .map(|track| {
            let mut grid = vec![vec![0u8; PITCH_COUNT]; total];
            for note in track {
                if usize::from(note.pitch) >= PITCH_COUNT {
                    continue;
                }
                let onset = tick_to_step(note.onset_tick, resolution, piece.division) as usize;
                let offset = tick_to_step(note.offset_tick, resolution, piece.division) as usize;
                for row in grid.iter_mut().take(offset.min(total)).skip(onset) {
                    row[usize::from(note.pitch)] = note.velocity;
                }
            }
            Pianoroll::from_grid(grid, resolution)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use iemb_fixtures::{quarter_melody_smf, smf, TrackBytes};

    /// A minimal file, spelled out byte by byte: format 0, division 96, one
    /// track holding a single quarter note C4 at velocity 100.
    #[rustfmt::skip]
    const SINGLE_NOTE: &[u8] = &[
        0x4D, 0x54, 0x68, 0x64,             // "MThd"
        0x00, 0x00, 0x00, 0x06,             // header length 6
        0x00, 0x00,                         // format 0
        0x00, 0x01,                         // one track
        0x00, 0x60,                         // division 96
        0x4D, 0x54, 0x72, 0x6B,             // "MTrk"
        0x00, 0x00, 0x00, 0x0C,             // chunk length 12
        0x00, 0x90, 0x3C, 0x64,             // delta 0, note on ch0 pitch 60 vel 100
        0x60, 0x80, 0x3C, 0x40,             // delta 96, note off
        0x00, 0xFF, 0x2F, 0x00,             // delta 0, end of track
    ];

    #[test]
    fn single_note_file_parses_byte_for_byte() {
        let piece = parse_midi(SINGLE_NOTE).unwrap();
        assert_eq!(piece.division, 96);
        assert_eq!(piece.time_signatures, vec![]);
        assert_eq!(
            piece.tracks,
            vec![vec![NoteEvent {
                onset_tick: 0,
                offset_tick: 96,
                pitch: 60,
                velocity: 100,
            }]]
        );
    }

    #[test]
    fn builder_output_matches_hand_written_bytes() {
        assert_eq!(quarter_melody_smf(96, &[60])[..14], SINGLE_NOTE[..14]);
    }

    #[test]
    fn bad_magic_is_rejected() {
        assert_eq!(parse_midi(b"RIFF1234"), Err(MidiError::BadHeaderMagic));
        assert_eq!(parse_midi(b""), Err(MidiError::BadHeaderMagic));
        assert_eq!(parse_midi(b"MTh"), Err(MidiError::BadHeaderMagic));
    }

    #[test]
    fn truncation_is_reported_with_an_offset() {
        // Cut the single-note file in the middle of the track chunk.
        let cut = &SINGLE_NOTE[..SINGLE_NOTE.len() - 6];
        match parse_midi(cut) {
            Err(MidiError::Truncated(_)) => {}
            other => panic!("expected Truncated, got {other:?}"),
        }
    }

    #[test]
    fn smpte_zero_division_and_formats() {
        let mut smpte = SINGLE_NOTE.to_vec();
        smpte[12] = 0xE7; // -25 fps SMPTE division
        smpte[13] = 0x28;
        assert_eq!(parse_midi(&smpte), Err(MidiError::SmpteDivision));

        let mut zero = SINGLE_NOTE.to_vec();
        zero[12] = 0;
        zero[13] = 0;
        assert_eq!(parse_midi(&zero), Err(MidiError::ZeroDivision));

        let mut f2 = SINGLE_NOTE.to_vec();
        f2[9] = 2;
        assert_eq!(parse_midi(&f2), Err(MidiError::UnsupportedFormat(2)));
        let mut f9 = SINGLE_NOTE.to_vec();
        f9[9] = 9;
        assert_eq!(parse_midi(&f9), Err(MidiError::UnsupportedFormat(9)));
    }

    #[test]
    fn over_long_header_is_skipped_by_declared_length() {
        let mut long = Vec::from(&SINGLE_NOTE[..8]);
        long[7] = 8; // header claims 8 bytes
        long.extend_from_slice(&SINGLE_NOTE[8..14]);
        long.extend_from_slice(&[0xAB, 0xCD]); // two slack bytes
        long.extend_from_slice(&SINGLE_NOTE[14..]);
        assert_eq!(parse_midi(&long).unwrap(), parse_midi(SINGLE_NOTE).unwrap());
    }

    #[test]
    fn running_status_reuses_the_previous_channel_status() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 100);
        t.running_data(96, &[60, 0]); // note-on vel 0 via running status = off
        t.running_data(0, &[64, 90]);
        t.running_data(96, &[64, 0]);
        t.end_of_track(0);
        let piece = parse_midi(&smf(0, 96, &[t])).unwrap();
        assert_eq!(
            piece.tracks[0],
            vec![
                NoteEvent {
                    onset_tick: 0,
                    offset_tick: 96,
                    pitch: 60,
                    velocity: 100
                },
                NoteEvent {
                    onset_tick: 96,
                    offset_tick: 192,
                    pitch: 64,
                    velocity: 90
                },
            ]
        );
    }

    #[test]
    fn data_byte_with_no_running_status_is_an_error() {
        let mut t = TrackBytes::new();
        t.push_varint(0);
        t.raw(&[0x3C, 0x64]); // data bytes before any status
        t.end_of_track(0);
        match parse_midi(&smf(0, 96, &[t])) {
            Err(MidiError::OrphanDataByte { byte: 0x3C, .. }) => {}
            other => panic!("expected OrphanDataByte, got {other:?}"),
        }
    }

    #[test]
    fn meta_and_sysex_cancel_running_status() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 100);
        t.tempo(0, 500_000); // meta event interposes
        t.running_data(96, &[60, 0]); // now orphaned
        t.end_of_track(0);
        match parse_midi(&smf(0, 96, &[t])) {
            Err(MidiError::OrphanDataByte { .. }) => {}
            other => panic!("expected OrphanDataByte, got {other:?}"),
        }

        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 100);
        t.sysex(0, &[0x01, 0x02, 0xF7]);
        t.running_data(96, &[60, 0]);
        t.end_of_track(0);
        match parse_midi(&smf(0, 96, &[t])) {
            Err(MidiError::OrphanDataByte { .. }) => {}
            other => panic!("expected OrphanDataByte, got {other:?}"),
        }
    }

    #[test]
    fn high_bit_data_bytes_are_rejected() {
        let mut t = TrackBytes::new();
        t.push_varint(0);
        t.raw(&[0x90, 0x3C, 0x90]); // velocity byte has the high bit set
        t.end_of_track(0);
        match parse_midi(&smf(0, 96, &[t])) {
            Err(MidiError::InvalidDataByte { byte: 0x90, .. }) => {}
            other => panic!("expected InvalidDataByte, got {other:?}"),
        }
    }

    #[test]
    fn realtime_status_bytes_in_a_track_are_rejected() {
        let mut t = TrackBytes::new();
        t.push_varint(0);
        t.raw(&[0xF8]);
        t.end_of_track(0);
        match parse_midi(&smf(0, 96, &[t])) {
            Err(MidiError::InvalidStatus { status: 0xF8, .. }) => {}
            other => panic!("expected InvalidStatus, got {other:?}"),
        }
    }

    #[test]
    fn varint_longer_than_four_bytes_is_rejected() {
        let mut t = TrackBytes::new();
        t.raw(&[0x81, 0x81, 0x81, 0x81, 0x01]); // five-byte delta
        match parse_midi(&smf(0, 96, &[t])) {
            Err(MidiError::InvalidVarint(_)) => {}
            other => panic!("expected InvalidVarint, got {other:?}"),
        }
    }

    #[test]
    fn missing_end_of_track_is_rejected() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 100);
        t.note_off(96, 0, 60, 0);
        match parse_midi(&smf(0, 96, &[t])) {
            Err(MidiError::MissingEndOfTrack) => {}
            other => panic!("expected MissingEndOfTrack, got {other:?}"),
        }
    }

    #[test]
    fn note_off_closes_the_earliest_open_note() {
        // Two overlapping onsets of the same pitch; offs close them oldest-first.
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 10);
        t.note_on(10, 0, 60, 20);
        t.note_off(10, 0, 60, 0); // closes the tick-0 onset
        t.note_off(10, 0, 60, 0); // closes the tick-10 onset
        t.end_of_track(0);
        let piece = parse_midi(&smf(0, 96, &[t])).unwrap();
        assert_eq!(
            piece.tracks[0],
            vec![
                NoteEvent {
                    onset_tick: 0,
                    offset_tick: 20,
                    pitch: 60,
                    velocity: 10
                },
                NoteEvent {
                    onset_tick: 10,
                    offset_tick: 30,
                    pitch: 60,
                    velocity: 20
                },
            ]
        );
    }

    #[test]
    fn unterminated_notes_end_at_the_end_of_track_tick() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 72, 80);
        t.end_of_track(50);
        let piece = parse_midi(&smf(0, 96, &[t])).unwrap();
        assert_eq!(
            piece.tracks[0],
            vec![NoteEvent {
                onset_tick: 0,
                offset_tick: 50,
                pitch: 72,
                velocity: 80
            }]
        );
    }

    #[test]
    fn zero_length_notes_are_dropped() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 100);
        t.note_off(0, 0, 60, 0); // off at the same tick
        t.end_of_track(0);
        let piece = parse_midi(&smf(0, 96, &[t])).unwrap();
        assert_eq!(piece.tracks[0], vec![]);

        // An unmatched note-off is ignored outright.
        let mut t = TrackBytes::new();
        t.note_off(0, 0, 60, 0);
        t.end_of_track(0);
        assert_eq!(parse_midi(&smf(0, 96, &[t])).unwrap().tracks[0], vec![]);
    }

    #[test]
    fn notes_on_different_channels_do_not_pair() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 100);
        t.note_off(10, 1, 60, 0); // different channel: no match
        t.end_of_track(90);
        let piece = parse_midi(&smf(0, 96, &[t])).unwrap();
        assert_eq!(
            piece.tracks[0],
            vec![NoteEvent {
                onset_tick: 0,
                offset_tick: 100,
                pitch: 60,
                velocity: 100
            }]
        );
    }

    #[test]
    fn time_signatures_are_collected_in_tick_order_across_tracks() {
        let mut a = TrackBytes::new();
        a.time_signature(0, 4, 2);
        a.time_signature(960, 3, 3); // 3/8 at tick 960
        a.end_of_track(0);
        let mut b = TrackBytes::new();
        b.time_signature(480, 6, 2);
        b.end_of_track(0);
        let piece = parse_midi(&smf(1, 96, &[a, b])).unwrap();
        assert_eq!(
            piece.time_signatures,
            vec![
                TimeSignatureEvent {
                    tick: 0,
                    numerator: 4,
                    denominator: 4
                },
                TimeSignatureEvent {
                    tick: 480,
                    numerator: 6,
                    denominator: 4
                },
                TimeSignatureEvent {
                    tick: 960,
                    numerator: 3,
                    denominator: 8
                },
            ]
        );
    }

    #[test]
    fn alien_chunks_are_skipped() {
        let note_track = quarter_melody_smf(96, &[60]);
        let mut bytes = Vec::from(&note_track[..14]);
        bytes.extend_from_slice(b"XFIH");
        bytes.extend_from_slice(&4u32.to_be_bytes());
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        bytes.extend_from_slice(&note_track[14..]);
        let piece = parse_midi(&bytes).unwrap();
        assert_eq!(piece.tracks.len(), 1);
        assert_eq!(piece.tracks[0].len(), 1);
    }

    #[test]
    fn fewer_chunks_than_declared_is_truncation() {
        let mut t = TrackBytes::new();
        t.end_of_track(0);
        let mut bytes = smf(1, 96, &[t]);
        bytes[11] = 2; // declare two tracks, provide one
        match parse_midi(&bytes) {
            Err(MidiError::Truncated(_)) => {}
            other => panic!("expected Truncated, got {other:?}"),
        }
    }

    #[test]
    fn rounding_is_half_up() {
        // division 96, resolution 24: four ticks per timestep.
        assert_eq!(tick_to_step(0, 24, 96), 0);
        assert_eq!(tick_to_step(1, 24, 96), 0);
        assert_eq!(tick_to_step(2, 24, 96), 1); // exact half rounds up
        assert_eq!(tick_to_step(3, 24, 96), 1);
        assert_eq!(tick_to_step(4, 24, 96), 1);
        assert_eq!(tick_to_step(96, 24, 96), 24);
        // Large values stay exact through the wide intermediate.
        assert_eq!(tick_to_step(u64::MAX, 1, 1), u64::MAX);
    }

    #[test]
    fn quarter_note_fills_exactly_one_beat_of_timesteps() {
        let piece = parse_midi(&quarter_melody_smf(96, &[60])).unwrap();
        let rolls = to_pianorolls(&piece, 24);
        assert_eq!(rolls.len(), 1);
        assert_eq!(rolls[0].timesteps(), 24);
        assert_eq!(rolls[0].resolution(), 24);
        for t in 0..24 {
            assert_eq!(rolls[0].velocity_at(t, 60), 100);
        }
    }

    #[test]
    fn sub_timestep_notes_vanish() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 100);
        t.note_off(1, 0, 60, 0); // one tick at division 960, resolution 24
        t.end_of_track(0);
        let piece = parse_midi(&smf(0, 960, &[t])).unwrap();
        assert_eq!(active_timesteps(&piece, 24), 0);
        let rolls = to_pianorolls(&piece, 24);
        assert_eq!(rolls[0].timesteps(), 0);
    }

    #[test]
    fn all_tracks_are_padded_to_the_piece_length() {
        let long = iemb_fixtures::quarter_note_track(96, 0, 100, &[60, 62, 64, 65]);
        let short = iemb_fixtures::quarter_note_track(96, 1, 90, &[72]);
        let piece = parse_midi(&smf(1, 96, &[long, short])).unwrap();
        let rolls = to_pianorolls(&piece, 24);
        assert_eq!(rolls[0].timesteps(), 96);
        assert_eq!(rolls[1].timesteps(), 96);
        assert_eq!(rolls[1].active_length(), 24);
    }

    #[test]
    fn later_onsets_overwrite_overlapping_velocities() {
        let mut t = TrackBytes::new();
        t.note_on(0, 0, 60, 40);
        t.note_on(48, 0, 60, 90); // overlaps the first note's second half
        t.note_off(0, 0, 60, 0); // same tick: closes the earliest onset
        t.note_off(48, 0, 60, 0);
        t.end_of_track(0);
        let piece = parse_midi(&smf(0, 96, &[t])).unwrap();
        let roll = &to_pianorolls(&piece, 24)[0];
        assert_eq!(roll.velocity_at(0, 60), 40);
        assert_eq!(roll.velocity_at(11, 60), 40);
        assert_eq!(roll.velocity_at(12, 60), 90);
        assert_eq!(roll.velocity_at(23, 60), 90);
        assert_eq!(roll.timesteps(), 24);
    }
}

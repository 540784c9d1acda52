//! Byte-level Standard MIDI File assembly.
//!
//! The reader in `iemb-core` is exercised against files built here, byte by
//! byte, so the two sides never share serialization code. Everything is plain
//! `Vec<u8>` pushing; malformed files are built by appending raw bytes.

/// Accumulates the event bytes of a single MTrk chunk (without the chunk
/// header, which [`smf`] adds).
#[derive(Debug, Default, Clone)]
pub struct TrackBytes {
    buf: Vec<u8>,
}

impl TrackBytes {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a MIDI variable-length quantity (1..=4 bytes, big-endian 7-bit
    /// groups, high bit set on all but the last byte).
    pub fn push_varint(&mut self, value: u32) -> &mut Self {
        assert!(value <= 0x0FFF_FFFF, "varint out of range: {value}");
        let mut groups = [0u8; 4];
        let mut n = 0;
        let mut v = value;
        loop {
            groups[n] = (v & 0x7F) as u8;
            n += 1;
            v >>= 7;
            if v == 0 {
                break;
            }
        }
        for i in (0..n).rev() {
            let mut byte = groups[i];
            if i != 0 {
                byte |= 0x80;
            }
            self.buf.push(byte);
        }
        self
    }

    /// Appends raw bytes verbatim. The escape hatch for malformed fixtures.
    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn note_on(&mut self, delta: u32, channel: u8, pitch: u8, velocity: u8) -> &mut Self {
        self.push_varint(delta);
        self.raw(&[0x90 | (channel & 0x0F), pitch, velocity])
    }

    pub fn note_off(&mut self, delta: u32, channel: u8, pitch: u8, velocity: u8) -> &mut Self {
        self.push_varint(delta);
        self.raw(&[0x80 | (channel & 0x0F), pitch, velocity])
    }

    /// Appends a channel event without a status byte, relying on running status.
    pub fn running_data(&mut self, delta: u32, data: &[u8]) -> &mut Self {
        self.push_varint(delta);
        self.raw(data)
    }

    pub fn meta(&mut self, delta: u32, meta_type: u8, payload: &[u8]) -> &mut Self {
        self.push_varint(delta);
        self.raw(&[0xFF, meta_type]);
        self.push_varint(payload.len() as u32);
        self.raw(payload)
    }

    /// FF 58: time signature `numerator`/`2^denominator_pow2`.
    pub fn time_signature(&mut self, delta: u32, numerator: u8, denominator_pow2: u8) -> &mut Self {
        self.meta(delta, 0x58, &[numerator, denominator_pow2, 24, 8])
    }

    /// FF 51: tempo in microseconds per quarter note.
    pub fn tempo(&mut self, delta: u32, us_per_quarter: u32) -> &mut Self {
        let b = us_per_quarter.to_be_bytes();
        self.meta(delta, 0x51, &[b[1], b[2], b[3]])
    }

    pub fn sysex(&mut self, delta: u32, payload: &[u8]) -> &mut Self {
        self.push_varint(delta);
        self.buf.push(0xF0);
        self.push_varint(payload.len() as u32);
        self.raw(payload)
    }

    pub fn end_of_track(&mut self, delta: u32) -> &mut Self {
        self.meta(delta, 0x2F, &[])
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.buf
    }
}

/// Appends back-to-back notes, each `beats[i]` quarter notes long with no gap
/// between them. Panics only on empty input with nothing to emit (harmless).
pub fn legato_notes(
    track: &mut TrackBytes,
    division: u16,
    channel: u8,
    velocity: u8,
    notes: &[(u8, u32)],
) {
    for &(pitch, beats) in notes {
        track.note_on(0, channel, pitch, velocity);
        track.note_off(beats * division as u32, channel, pitch, 0x40);
    }
}

/// A track of back-to-back quarter notes, one per pitch, with a terminating
/// end-of-track event.
pub fn quarter_note_track(division: u16, channel: u8, velocity: u8, pitches: &[u8]) -> TrackBytes {
    let mut t = TrackBytes::new();
    let notes: Vec<(u8, u32)> = pitches.iter().map(|&p| (p, 1)).collect();
    legato_notes(&mut t, division, channel, velocity, &notes);
    t.end_of_track(0);
    t
}

/// Assembles a complete SMF: MThd header plus one MTrk chunk per track.
pub fn smf(format: u16, division: u16, tracks: &[TrackBytes]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&format.to_be_bytes());
    out.extend_from_slice(&(tracks.len() as u16).to_be_bytes());
    out.extend_from_slice(&division.to_be_bytes());
    for track in tracks {
        out.extend_from_slice(b"MTrk");
        out.extend_from_slice(&(track.as_bytes().len() as u32).to_be_bytes());
        out.extend_from_slice(track.as_bytes());
    }
    out
}

/// A single-track 4/4 file of back-to-back quarter notes. The workhorse
/// fixture: `pitches.len()` beats long, one time-signature event at tick 0.
pub fn quarter_melody_smf(division: u16, pitches: &[u8]) -> Vec<u8> {
    let mut t = TrackBytes::new();
    t.time_signature(0, 4, 2);
    let notes: Vec<(u8, u32)> = pitches.iter().map(|&p| (p, 1)).collect();
    legato_notes(&mut t, division, 0, 100, &notes);
    t.end_of_track(0);
    smf(0, division, &[t])
}

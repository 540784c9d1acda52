//! Pianoroll JSON reader: accepted input round-trips bit-exactly through
//! the writer.

#![no_main]

use iemb_core::pianoroll::Pianoroll;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(roll) = Pianoroll::read_json(data, 24) else {
        return;
    };
    let mut out = Vec::new();
    roll.write_json(&mut out).unwrap();
    let back = Pianoroll::read_json(&out[..], 24).unwrap();
    assert_eq!(back, roll);
});

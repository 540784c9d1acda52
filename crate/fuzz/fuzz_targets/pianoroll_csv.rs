//! Pianoroll CSV reader: anything it accepts must serialize back to a form
//! it accepts again, unchanged.

#![no_main]

use iemb_core::pianoroll::Pianoroll;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(roll) = Pianoroll::read_csv(data, 24) else {
        return;
    };
    let mut out = Vec::new();
    roll.write_csv(&mut out).unwrap();
    let back = Pianoroll::read_csv(&out[..], 24).unwrap();
    assert_eq!(back, roll);
});

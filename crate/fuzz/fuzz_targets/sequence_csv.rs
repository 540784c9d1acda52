//! Sequence CSV reader: accepted runs expand without panicking, and the
//! expansion re-encodes to an equivalent token stream.

#![no_main]

use iemb_core::embedder::{rle_decode, rle_encode, Mode, RleSequence};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(runs) = iemb_core::embedder::read_runs_csv(data) else {
        return;
    };
    let total = runs.iter().fold(0u64, |acc, r| acc.saturating_add(r.run));
    if total > 1 << 16 {
        return; // expansion is linear in the run total
    }
    let rle = RleSequence {
        mode: Mode::Melodic,
        resolution: 24,
        runs,
        origin: None,
        reference_track: None,
        bar_length: None,
        bar_anchors: None,
    };
    let seq = rle_decode(&rle);
    assert_eq!(rle_decode(&rle_encode(&seq)).tokens, seq.tokens);
});

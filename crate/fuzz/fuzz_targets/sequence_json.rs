//! Sequence JSON decoding, in both the plain and run-length layouts.

#![no_main]

use iemb_core::embedder::{rle_decode, rle_encode, IntervalSequence, RleSequence};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(seq) = serde_json::from_slice::<IntervalSequence>(data) {
        let text = serde_json::to_vec(&seq).unwrap();
        let back: IntervalSequence = serde_json::from_slice(&text).unwrap();
        assert_eq!(back, seq);
        assert_eq!(rle_decode(&rle_encode(&seq)).tokens, seq.tokens);
    }
    if let Ok(rle) = serde_json::from_slice::<RleSequence>(data) {
        let total = rle
            .runs
            .iter()
            .fold(0u64, |acc, r| acc.saturating_add(r.run));
        if total <= 1 << 16 {
            let _ = rle_decode(&rle);
        }
    }
});

//! SMF parser entry point: arbitrary bytes must either fail cleanly or
//! produce a piece the whole downstream pipeline can digest.

#![no_main]

use iemb_core::analysis::screen_piece;
use iemb_core::embedder::{melodic_from_pianoroll, rle_decode, rle_encode};
use iemb_core::midi::{active_timesteps, parse_midi, to_pianorolls};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(piece) = parse_midi(data) else { return };
    let _ = screen_piece(&piece, 24);
    // Grid rendering is linear in timesteps x tracks; keep degenerate tick
    // values from turning the harness into an allocation benchmark.
    if piece.tracks.len() <= 64 && active_timesteps(&piece, 24) <= 1 << 14 {
        for roll in to_pianorolls(&piece, 24) {
            let seq = melodic_from_pianoroll(&roll);
            let rle = rle_encode(&seq);
            assert_eq!(rle_decode(&rle).tokens, seq.tokens);
        }
    }
});

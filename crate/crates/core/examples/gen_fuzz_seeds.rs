//! Regenerates the checked-in fuzz corpus seeds:
//!
//! ```sh
//! cargo run -p iemb-core --example gen_fuzz_seeds
//! ```
//!
//! One representative well-formed input per fuzz target, so the fuzzers
//! start from deep program states instead of rediscovering the file magics.

use std::fs;
use std::path::{Path, PathBuf};

use iemb_core::embedder::{barline_from_pianoroll, melodic_from_line, rle_encode};
use iemb_core::pianoroll::{Pianoroll, PitchLine, PITCH_COUNT};
use iemb_fixtures::{legato_notes, quarter_melody_smf, quarter_note_track, smf, TrackBytes};

fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus")
}

fn put(target: &str, name: &str, bytes: &[u8]) {
    let dir = corpus_root().join(target);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join(name), bytes).unwrap();
    println!("wrote {target}/{name} ({} bytes)", bytes.len());
}

fn demo_roll() -> Pianoroll {
    let mut grid = vec![vec![0u8; PITCH_COUNT]; 12];
    for (t, row) in grid.iter_mut().enumerate() {
        row[60 + (t % 3) * 2] = 100;
    }
    Pianoroll::from_grid(grid, 24)
}

fn demo_line() -> PitchLine {
    let mut line = vec![Some(60u8); 4];
    line.extend(vec![Some(64u8); 4]);
    line.extend(vec![None; 2]);
    line.extend(vec![Some(62u8); 4]);
    PitchLine::new(line)
}

fn main() {
    // --- parse_midi ---------------------------------------------------
    put(
        "parse_midi",
        "melody.mid",
        &quarter_melody_smf(96, &[60, 64, 62, 65, 63, 67]),
    );
    let mut quartet_first = TrackBytes::new();
    quartet_first.time_signature(0, 4, 2);
    legato_notes(
        &mut quartet_first,
        96,
        0,
        100,
        &[(76, 1), (78, 1), (81, 1), (79, 1)],
    );
    quartet_first.end_of_track(0);
    put(
        "parse_midi",
        "quartet.mid",
        &smf(
            1,
            96,
            &[
                quartet_first,
                quarter_note_track(96, 1, 100, &[69, 72, 70, 72]),
                quarter_note_track(96, 2, 100, &[60, 64, 61, 63]),
            ],
        ),
    );
    let mut running = TrackBytes::new();
    running.time_signature(0, 3, 2);
    running.note_on(0, 0, 60, 90);
    running.running_data(48, &[60, 0]); // note off via running status
    running.running_data(0, &[65, 90]);
    running.running_data(48, &[65, 0]);
    running.end_of_track(0);
    put("parse_midi", "running_status.mid", &smf(0, 96, &[running]));
    let mut empty = TrackBytes::new();
    empty.end_of_track(0);
    put("parse_midi", "empty_track.mid", &smf(0, 96, &[empty]));

    // --- pianoroll readers --------------------------------------------
    let roll = demo_roll();
    let mut csv = Vec::new();
    roll.write_csv(&mut csv).unwrap();
    put("pianoroll_csv", "small.csv", &csv);
    let mut json = Vec::new();
    roll.write_json(&mut json).unwrap();
    put("pianoroll_json", "small.json", &json);

    // --- sequence readers ---------------------------------------------
    let melodic = melodic_from_line(&demo_line(), 24);
    let mut plain_csv = Vec::new();
    iemb_core::embedder::write_sequence_csv(&mut plain_csv, &melodic).unwrap();
    put("sequence_csv", "plain.csv", &plain_csv);
    let mut rle_csv = Vec::new();
    iemb_core::embedder::write_rle_csv(&mut rle_csv, &rle_encode(&melodic)).unwrap();
    put("sequence_csv", "rle.csv", &rle_csv);

    put(
        "sequence_json",
        "melodic.json",
        serde_json::to_string_pretty(&melodic).unwrap().as_bytes(),
    );
    put(
        "sequence_json",
        "melodic_rle.json",
        serde_json::to_string_pretty(&rle_encode(&melodic))
            .unwrap()
            .as_bytes(),
    );
    let barline = barline_from_pianoroll(&demo_roll(), 6).unwrap();
    put(
        "sequence_json",
        "barline.json",
        serde_json::to_string_pretty(&barline).unwrap().as_bytes(),
    );
}

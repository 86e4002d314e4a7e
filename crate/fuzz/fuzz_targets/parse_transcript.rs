#![no_main]

use libfuzzer_sys::fuzz_target;
use vaov::io::Labels;

// parse_transcript must never panic on arbitrary bytes under any small
// label universe; accepted transcripts must round-trip.
fuzz_target!(|data: &[u8]| {
    let (m, rest) = match data.split_first() {
        Some((&m, rest)) => ((m as usize % 12) + 1, rest),
        None => return,
    };
    let labels = Labels::numbered(m);
    if let Ok(transcript) = vaov::io::parse_transcript(rest, &labels) {
        let json = vaov::io::transcript_to_json(&transcript, &labels);
        let back = vaov::io::parse_transcript(json.as_bytes(), &labels).expect("round trip parses");
        assert_eq!(back, transcript);
    }
});

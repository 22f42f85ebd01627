#![no_main]

//! Input: a source scenario and an embedding, separated by a NUL byte.

use contextuality::embeddings::verify_conditional;
use contextuality::io::{parse_embedding, parse_scenario};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let (Ok(s), Ok(e)) = (std::str::from_utf8(&data[..split]), std::str::from_utf8(&data[split + 1..])) else {
        return;
    };
    let Ok(h) = parse_scenario(s) else { return };
    if let Ok(emb) = parse_embedding(e, &h) {
        if h.vertex_count() <= 8 && emb.target.vertex_count() <= 64 {
            let _ = verify_conditional(&h, &emb, 8);
        }
    }
});

#![no_main]

//! Input: a scenario and a model, separated by a NUL byte.

use contextuality::io::{parse_model, parse_scenario, to_json_string};
use contextuality::polytope::is_model;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let (Ok(s), Ok(m)) = (std::str::from_utf8(&data[..split]), std::str::from_utf8(&data[split + 1..])) else {
        return;
    };
    let Ok(h) = parse_scenario(s) else { return };
    if let Ok(p) = parse_model(m, &h) {
        let _ = is_model(&h, &p);
        assert_eq!(parse_model(&to_json_string(&p.to_json(&h)), &h).unwrap(), p);
    }
});

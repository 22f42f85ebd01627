#![no_main]

use contextuality::io::{parse_rule, to_json_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rule(text) {
        assert_eq!(parse_rule(&to_json_string(&r)).unwrap(), r);
    }
});

#![no_main]

use contextuality::io::{parse_scenario, to_json_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = parse_scenario(text) {
        let again = parse_scenario(&to_json_string(&h.to_raw())).expect("canonical form parses");
        assert_eq!(again, h);
    }
});

#![no_main]

use contextuality::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = Rational::parse(text) {
        assert_eq!(Rational::parse(&r.to_fraction_string()).unwrap(), r);
    }
});

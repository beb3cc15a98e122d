#![no_main]

use libfuzzer_sys::fuzz_target;
use salemfrac::numeric::parse_rational;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = parse_rational(text) {
            assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
        }
    }
});

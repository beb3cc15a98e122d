#![no_main]

use libfuzzer_sys::fuzz_target;
use salemfrac::ifs::{format_word, parse_word};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(word) = parse_word(text) {
            assert_eq!(parse_word(&format_word(&word)).unwrap(), word);
        }
    }
});

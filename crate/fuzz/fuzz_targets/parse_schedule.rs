#![no_main]

use libfuzzer_sys::fuzz_target;
use salemfrac::moran::{parse_schedule, schedule_from_l};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(input) = parse_schedule(text) {
        if let Ok(s) = schedule_from_l(&input.l, 64) {
            s.check_invariants().unwrap();
        }
    }
});

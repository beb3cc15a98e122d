#![no_main]

use libfuzzer_sys::fuzz_target;
use salemfrac::ifs::parse_ifs;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ifs) = parse_ifs(text) {
        let again = parse_ifs(&ifs.to_text()).expect("printed system parses");
        assert_eq!(ifs.digest(), again.digest());
    }
});

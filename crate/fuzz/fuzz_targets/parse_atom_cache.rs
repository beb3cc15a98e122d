#![no_main]

use libfuzzer_sys::fuzz_target;
use salemfrac::ifs::EqualRatioIfs;
use salemfrac::measure::{parse_atom_cache, write_atom_cache};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let systems = [
        EqualRatioIfs::salem_bernoulli(4).unwrap(),
        EqualRatioIfs::cantor(),
    ];
    for ifs in &systems {
        if let Ok(measure) = parse_atom_cache(text, ifs) {
            let again = parse_atom_cache(&write_atom_cache(&measure, ifs), ifs).unwrap();
            assert_eq!(measure.atoms(), again.atoms());
        }
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;

use interleave::io::{format_poset, parse_poset};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(poset) = parse_poset(text) {
        assert_eq!(parse_poset(&format_poset(&poset)).unwrap(), poset);
    }
});

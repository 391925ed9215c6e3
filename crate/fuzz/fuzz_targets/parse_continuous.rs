#![no_main]
use libfuzzer_sys::fuzz_target;

use interleave::io::{format_continuous, parse_continuous};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(barcode) = parse_continuous(text) {
        assert_eq!(parse_continuous(&format_continuous(&barcode)).unwrap(), barcode);
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;

use interleave::io::{format_barcode, parse_barcode, parse_poset};

// Input is a poset, a line holding `%`, then a barcode. Without the
// separator the whole input is a barcode over a fixed poset.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (poset_text, bars_text) = text.split_once("\n%\n").unwrap_or(("b 10\n0\n1\n3\n4\n5\n7\n", text));
    let Ok(poset) = parse_poset(poset_text) else { return };
    if let Ok(barcode) = parse_barcode(bars_text, &poset) {
        assert_eq!(parse_barcode(&format_barcode(&poset, &barcode), &poset).unwrap(), barcode);
    }
});

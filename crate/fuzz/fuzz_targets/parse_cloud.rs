#![no_main]
use libfuzzer_sys::fuzz_target;

use interleave::io::{format_cloud, parse_cloud};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cloud) = parse_cloud(text) {
        assert_eq!(parse_cloud(&format_cloud(&cloud)).unwrap(), cloud);
    }
});

//! Every parse entry point accepts or rejects arbitrary text without panicking.
#![no_main]

use jetcalc::SmoothMap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    for n in 1..=4 {
        let _ = SmoothMap::parse_inferred(src, n);
        let _ = SmoothMap::parse(src, n, 2);
    }
    let _ = SmoothMap::parse_split(src, 2, 1);
});

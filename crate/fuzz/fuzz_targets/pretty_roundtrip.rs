//! Printing an accepted map and parsing it back gives the same map.
#![no_main]

use jetcalc::SmoothMap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(map) = SmoothMap::parse_inferred(src, 3) else {
        return;
    };
    let printed = map.to_string();
    let back = SmoothMap::parse(&printed, 3, map.arity_out())
        .unwrap_or_else(|e| panic!("printed form `{printed}` does not parse: {e}"));
    assert_eq!(back.to_string(), printed);
});

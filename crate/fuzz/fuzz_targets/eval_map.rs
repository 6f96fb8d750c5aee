//! Parsed maps evaluate, differentiate and prolong without panicking; any
//! failure is a typed error.
#![no_main]

use jetcalc::jet::{jet1_of, jet2_of};
use jetcalc::taylor::second_order;
use jetcalc::SmoothMap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let Ok(src) = std::str::from_utf8(rest) else {
        return;
    };
    let p = 1 + usize::from(selector % 3);
    if let Ok(map) = SmoothMap::parse_inferred(src, p) {
        let point: Vec<f64> = (0..p).map(|i| f64::from(selector) / 64.0 - i as f64).collect();
        let _ = map.eval(&point);
        let _ = second_order(&map, &point);
        let _ = jet1_of(&map);
    }
    if let Ok(map) = SmoothMap::parse_with(src, 2 * p, jetcalc::expr::VarScheme::Split { p }) {
        let _ = jet2_of(&map);
    }
});

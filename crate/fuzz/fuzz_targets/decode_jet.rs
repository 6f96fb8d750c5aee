//! The JSON jet decoder rejects malformed payloads with an error, and
//! accepted payloads re-encode to an equal value.
#![no_main]

use jetcalc::AnyJet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(jet) = AnyJet::from_json(text) {
        let again = AnyJet::from_json(&jet.to_json()).expect("encoded jets decode");
        assert_eq!(again, jet);
    }
});

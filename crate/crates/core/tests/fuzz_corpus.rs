//! Replays the checked-in fuzz corpus through the fuzz-target checks, so the
//! seeds stay meaningful on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use jetcalc::expr::VarScheme;
use jetcalc::jet::{jet1_of, jet2_of};
use jetcalc::taylor::second_order;
use jetcalc::{AnyJet, SmoothMap};

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut entries: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    assert!(!entries.is_empty(), "empty corpus for {target}");
    entries.into_iter().map(|p| fs::read(p).unwrap()).collect()
}

#[test]
fn parse_map_seeds() {
    let mut accepted = 0;
    for data in corpus("parse_map") {
        let src = std::str::from_utf8(&data).unwrap();
        accepted += usize::from(SmoothMap::parse_inferred(src, 3).is_ok());
        for n in 1..=4 {
            let _ = SmoothMap::parse(src, n, 2);
        }
        let _ = SmoothMap::parse_split(src, 2, 1);
    }
    assert!(accepted > 0);
}

#[test]
fn pretty_roundtrip_seeds() {
    for data in corpus("pretty_roundtrip") {
        let src = std::str::from_utf8(&data).unwrap();
        let Ok(map) = SmoothMap::parse_inferred(src, 3) else {
            continue;
        };
        let printed = map.to_string();
        let back = SmoothMap::parse(&printed, 3, map.arity_out()).unwrap();
        assert_eq!(back.to_string(), printed);
    }
}

#[test]
fn eval_map_seeds() {
    for data in corpus("eval_map") {
        let (&selector, rest) = data.split_first().unwrap();
        let src = std::str::from_utf8(rest).unwrap();
        let p = 1 + usize::from(selector % 3);
        if let Ok(map) = SmoothMap::parse_inferred(src, p) {
            let point: Vec<f64> = (0..p).map(|i| f64::from(selector) / 64.0 - i as f64).collect();
            let _ = map.eval(&point);
            let _ = second_order(&map, &point);
            let _ = jet1_of(&map);
        }
        if let Ok(map) = SmoothMap::parse_with(src, 2 * p, VarScheme::Split { p }) {
            let _ = jet2_of(&map);
        }
    }
}

#[test]
fn decode_jet_seeds() {
    let mut accepted = 0;
    for data in corpus("decode_jet") {
        let text = String::from_utf8_lossy(&data);
        if let Ok(jet) = AnyJet::from_json(&text) {
            accepted += 1;
            assert_eq!(AnyJet::from_json(&jet.to_json()).unwrap(), jet);
        }
    }
    assert_eq!(accepted, 4);
}

use std::collections::BTreeMap;

use serde::Deserialize;
use uai_core::utm::{enumerate_chron, enumerate_joint};
use uai_core::Prob;

#[derive(Deserialize)]
struct Case {
    kind: String,
    l: u32,
    s: u64,
    depth: usize,
    actions: Vec<u8>,
    masses: BTreeMap<String, Prob>,
}

#[derive(Deserialize)]
struct Oracle {
    cases: Vec<Case>,
}

fn bits(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

fn all_strings(depth: usize) -> Vec<Vec<u8>> {
    (0..=depth)
        .flat_map(|n| (0u32..1 << n).map(move |c| (0..n).rev().map(|i| ((c >> i) & 1) as u8).collect()))
        .collect()
}

#[test]
fn enumeration_matches_brute_force_oracle() {
    let oracle: Oracle =
        serde_json::from_str(include_str!("../../../oracles/utm_enum.json")).expect("oracle file");
    for case in &oracle.cases {
        let approx = match case.kind.as_str() {
            "joint" => enumerate_joint(case.l, case.s, case.depth).unwrap(),
            _ => enumerate_chron(case.l, case.s, &case.actions).unwrap(),
        };
        for y in all_strings(case.depth) {
            let key: String = y.iter().map(|b| char::from(b'0' + b)).collect();
            let expected = case.masses.get(&key).cloned().unwrap_or_else(Prob::zero);
            assert_eq!(approx.mass(&y), expected, "{} L={} y={key}", case.kind, case.l);
        }
        for k in case.masses.keys() {
            assert!(bits(k).len() <= case.depth);
        }
    }
}

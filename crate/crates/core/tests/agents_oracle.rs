use proptest::prelude::*;
use uai_core::agents::{brute_force_action, expectimax_action, expectimax_value, policy_value};
use uai_core::semimeasure::builtin::*;
use uai_core::semimeasure::table::{ChronTable, TableSpec};
use uai_core::{Action, History, Interface, Prob};

/// Percept conditionals keyed by `(previous percept, action)`, in eighths.
fn table(rows: &[(u64, u64)]) -> ChronTable {
    let mut entries = Vec::new();
    for (i, (p, q)) in rows.iter().enumerate() {
        let (e, a) = (i / 2, i % 2);
        entries.push(format!(r#"{{"context": [{e}, {a}], "probs": ["{p}/8", "{q}/8"]}}"#));
    }
    let (p, q) = rows[0];
    entries.push(format!(r#"{{"context": [0], "probs": ["{p}/8", "{q}/8"]}}"#));
    let (p, q) = rows[1];
    entries.push(format!(r#"{{"context": [1], "probs": ["{p}/8", "{q}/8"]}}"#));
    let text = format!(r#"{{"kind": "chron", "conditionals": [{}]}}"#, entries.join(","));
    let spec: TableSpec = serde_json::from_str(&text).unwrap();
    ChronTable::new(&spec).unwrap()
}

fn row() -> impl Strategy<Value = (u64, u64)> {
    (0u64..=8).prop_flat_map(|p| (Just(p), 0..=8 - p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn expectimax_matches_brute_force(rows in prop::collection::vec(row(), 4), m in 1usize..=3) {
        let nu = table(&rows);
        let i = Interface::binary();
        for t in 0..=1 {
            for h in History::all_complete(&i, t) {
                match (expectimax_action(&nu, &h, m), brute_force_action(&nu, &h, m)) {
                    (Ok(a), Ok((b, v))) => {
                        prop_assert_eq!(a, b);
                        prop_assert_eq!(expectimax_value(&nu, &h, m).unwrap(), v);
                    }
                    (Err(_), Err(_)) => {}
                    (x, y) => prop_assert!(false, "{:?} vs {:?} at {}", x.ok(), y.ok(), h),
                }
            }
        }
    }
}

#[test]
fn ties_go_to_the_smallest_action() {
    let h = History::empty();
    for m in 1..=3 {
        assert_eq!(expectimax_action(&uniform_env(), &h, m).unwrap(), Action(0));
        assert_eq!(brute_force_action(&uniform_env(), &h, m).unwrap().0, Action(0));
    }
}

#[test]
fn echo_rewards_action_one() {
    let h = History::empty();
    assert_eq!(expectimax_action(&mu_id(), &h, 2).unwrap(), Action(1));
    assert_eq!(expectimax_action(&mu_not(), &h, 2).unwrap(), Action(0));
    let always_one = DeterministicPolicy::constant(Interface::binary(), Action(1));
    let v = policy_value(&always_one, &mu_id(), 3).unwrap();
    assert_eq!(v, *Prob::new(3, 1).as_rational());
}

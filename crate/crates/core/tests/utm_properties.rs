use proptest::prelude::*;
use uai_core::utm::{enumerate_chron, enumerate_joint, examples, machine_hash, run_program, Op, Stop};
use uai_core::{History, Interface, JointSemimeasure};

fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn output_grows_with_budget(p in bits(18), s in 0u64..60, extra in 0u64..60) {
        let small = run_program(&p, None, s).output;
        let large = run_program(&p, None, s + extra).output;
        prop_assert!(large.starts_with(&small));
    }

    #[test]
    fn output_grows_with_program_extension(p in bits(12), q in bits(8), s in 0u64..60) {
        let short = run_program(&p, None, s);
        let mut pq = p.clone();
        pq.extend(&q);
        let long = run_program(&pq, None, s);
        if short.stop == Stop::NeedBit {
            prop_assert!(long.output.starts_with(&short.output));
        }
    }

    #[test]
    fn enumeration_is_monotone_in_budgets(l in 0u32..=9, s in 0u64..60, ds in 0u64..60) {
        let strings = History::all_up_to_len(&Interface::binary(), 5);
        let base = enumerate_joint(l, s, 5).unwrap();
        let more_s = enumerate_joint(l, s + ds, 5).unwrap();
        let more_l = enumerate_joint(l + 1, s, 5).unwrap();
        for x in &strings {
            let v = base.eval(x).unwrap();
            prop_assert!(v <= more_s.eval(x).unwrap());
            prop_assert!(v <= more_l.eval(x).unwrap());
        }
        prop_assert!(base.mass(&[]) <= uai_core::Prob::one());
    }

    #[test]
    fn chron_examples_react_to_actions(a in prop::collection::vec(0u8..2, 1..8)) {
        let echo = run_program(&examples::echo(), Some(&a), 1000);
        prop_assert_eq!(&echo.output, &a);
        let not: Vec<u8> = a.iter().map(|x| 1 - x).collect();
        prop_assert_eq!(run_program(&examples::complement(), Some(&a), 1000).output, not);
        let zeros = run_program(&examples::constant_zero(), Some(&a), 1000).output;
        prop_assert!(zeros.iter().all(|x| *x == 0) && zeros.len() >= a.len());
    }
}

#[test]
fn opcodes_roundtrip() {
    for op in Op::ALL {
        assert_eq!(Op::from_code(op.code()), op);
    }
    assert_eq!(machine_hash().len(), 64);
}

#[test]
fn copy_program_doubles_its_data() {
    let data = [1, 0, 0, 1];
    let out = run_program(&examples::copy(&data), None, 1000).output;
    assert!(out.starts_with(&[1, 1, 0, 0, 0, 0, 1, 1]));
}

#[test]
fn chron_enumeration_root_mass_is_one() {
    let e = enumerate_chron(6, 40, &[1, 0]).unwrap();
    assert!(e.mass(&[]).is_one());
    assert!(e.mass(&[1]) <= e.mass(&[]));
}

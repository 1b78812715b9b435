mod common;

use common::{desk_halting, desk_walker, random_tm, rng, FlatTape};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;
use snp_workbench::engine::{run, validate, InputSchedule, Mode, Policy};
use snp_workbench::turing::{encode_cells, encode_config, Dir, EncodedConfig, TmConfig, TuringMachine};
use snp_workbench::unary::parse_expr;
use snp_workbench::universal::{
    boundary_time, build_input_word, build_pi_input, build_pi_m, build_schedule, conflicts, decode_output,
    input_emission_time, macro_period, run_input_encoder, verify_against_oracle,
};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn trimmed(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&1) {
        v.pop();
    }
    v
}

#[test]
fn builder_shape() {
    for tm in [desk_halting(), desk_walker()] {
        let sys = build_pi_m(&tm);
        assert_eq!(sys.neurons.len(), 10);
        assert_eq!(sys.mode, Mode::Exhaustive);
        assert_eq!((sys.input, sys.output), (Some(4), Some(2)));
        assert!(validate(&sys).is_empty(), "{:?}", validate(&sys));
        assert!(conflicts(&tm).is_empty());
        assert_eq!(macro_period(&tm), 13);
        let enc = build_pi_input(&tm);
        assert_eq!(enc.neurons.len(), 6);
        assert!(validate(&enc).is_empty());
    }
}

#[test]
fn transition_rule_instance() {
    let tm = TuringMachine::new(2, 2, 2).unwrap().with(1, 2, 2, Dir::L, 2).with(1, 1, 1, Dir::R, 1);
    let sys = build_pi_m(&tm);
    let want = parse_expr("s^112").unwrap().denote();
    let hit = sys.neurons[9].rules.iter().find(|r| r.guard == want).expect("rule for code 7");
    assert_eq!((hit.consume, hit.emit, hit.delay), (103, 48, 1));
}

#[test]
fn loading_schedule_values() {
    let tm = desk_halting();
    let enc = EncodedConfig { x: big(16), code: 7, y: big(16) };
    assert_eq!(build_schedule(&tm, &enc), InputSchedule::from_pairs([(1u64, 18u32), (2, 16), (4, 7)]));
}

#[test]
fn one_move_reaches_second_boundary() {
    let tm = TuringMachine::new(2, 2, 2).unwrap().with(1, 2, 2, Dir::L, 2).with(1, 1, 1, Dir::R, 1);
    let start = TmConfig::new(1, vec![1], 2, vec![1]);
    let trace = run(&build_pi_m(&tm), &build_schedule(&tm, &encode_config(&tm, &start)), Policy::Strict, 40);
    let at = trace.contents_at(boundary_time(&tm, 1)).unwrap();
    assert_eq!(boundary_time(&tm, 1), 18);
    assert_eq!((&at[0], &at[1], &at[3], &at[5], &at[9]), (&big(16), &big(304), &big(9), &big(9), &big(1)));
    assert_eq!(trace.output_events, vec![(20, big(304))]);
    assert_eq!(decode_output(&tm, &big(304)).unwrap(), vec![2, 1]);
}

#[test]
fn desk_machines_against_oracle() {
    for (tm, start) in [
        (desk_halting(), TmConfig::new(1, vec![2, 1, 2], 2, vec![2, 2, 2])),
        (desk_halting(), TmConfig::blank()),
        (desk_walker(), TmConfig::blank()),
        (desk_walker(), TmConfig::new(1, vec![2, 2], 1, vec![2])),
    ] {
        let v = verify_against_oracle(&tm, &start, 25, Policy::Strict);
        assert!(v.ok(), "{start}: {:?}", v.mismatches.first());
    }
}

#[test]
fn halting_output_is_final_right_tape() {
    let tm = desk_halting();
    let mut r = rng(12);
    for _ in 0..15 {
        let right: Vec<u32> = (0..r.gen_range(0..6)).map(|_| 2).collect();
        let left: Vec<u32> = (0..r.gen_range(0..4)).map(|_| r.gen_range(1..=2)).collect();
        let start = TmConfig::new(1, left.clone(), 2, right.clone());
        let mut flat = FlatTape::new(1, &left, 2, &right);
        while flat.state != tm.halt {
            flat.step(&tm);
        }
        let v = verify_against_oracle(&tm, &start, 20, Policy::Strict);
        assert!(v.ok());
        let (_, y) = v.output_events[0].clone();
        // the head cell travels in the code, the output carries the right side
        assert_eq!(trimmed(decode_output(&tm, &y).unwrap()), flat.right());
    }
}

#[test]
fn random_machines_against_oracle() {
    let mut r = rng(99);
    let mut verified = 0;
    let mut tried = 0;
    while verified < 40 {
        tried += 1;
        let (q, a) = (r.gen_range(2..=3), r.gen_range(1..=3));
        let tm = random_tm(&mut r, q, a, 0.15);
        if !conflicts(&tm).is_empty() {
            continue;
        }
        let left: Vec<u32> = (0..r.gen_range(0..4)).map(|_| r.gen_range(1..=a)).collect();
        let right: Vec<u32> = (0..r.gen_range(0..4)).map(|_| r.gen_range(1..=a)).collect();
        let start = TmConfig::new(1, left, r.gen_range(1..=a), right);
        let v = verify_against_oracle(&tm, &start, 15, Policy::Strict);
        assert!(v.ok(), "machine {:?} from {start}: {:?}", tm.delta, v.mismatches.first());
        verified += 1;
    }
    assert!(tried < 200, "too many machines with guard overlaps: {tried}");
}

#[test]
fn encoder_small_cases() {
    let tm = desk_halting();
    assert_eq!(build_input_word(&tm, &[1]), vec![1, 0, 0, 0, 2]);
    assert_eq!(run_input_encoder(&tm, &[1], Policy::Strict), Some((7, big(16))));
    assert_eq!(input_emission_time(&tm, 1), 7);
    assert_eq!(run_input_encoder(&tm, &[2, 1], Policy::Strict), Some((11, big(304))));
}

#[test]
fn encoder_on_larger_alphabet() {
    let tm = random_tm(&mut rng(5), 3, 3, 0.2);
    let mut r = rng(6);
    for _ in 0..10 {
        let cells: Vec<u32> = (0..r.gen_range(1..=6)).map(|_| r.gen_range(1..=3)).collect();
        let want = (input_emission_time(&tm, cells.len()), encode_cells(&tm, &cells));
        assert_eq!(run_input_encoder(&tm, &cells, Policy::Strict), Some(want), "{cells:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn walker_boundaries_match(left in prop::collection::vec(1u32..=2, 0..4), right in prop::collection::vec(1u32..=2, 0..4), head in 1u32..=2) {
        let tm = desk_walker();
        let v = verify_against_oracle(&tm, &TmConfig::new(1, left, head, right), 12, Policy::Strict);
        prop_assert!(v.ok());
    }

    #[test]
    fn encoder_emits_x(cells in prop::collection::vec(1u32..=2, 1..=8)) {
        let tm = desk_walker();
        let got = run_input_encoder(&tm, &cells, Policy::Strict);
        prop_assert_eq!(got, Some((input_emission_time(&tm, cells.len()), encode_cells(&tm, &cells))));
    }
}

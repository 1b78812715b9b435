mod common;

use common::{random_flat_expr, random_tree_expr, rng, Nfa};
use num_bigint::BigUint;
use proptest::prelude::*;
use snp_workbench::unary::{normalize, parse_expr, tail_cycle, EventuallyPeriodicSet, SetOp, UnaryExpr};

fn members(set: &EventuallyPeriodicSet, upto: u64) -> Vec<u64> {
    (0..=upto).filter(|&k| set.contains(k)).collect()
}

#[test]
fn offset_progression_matches_brute_force() {
    let expr = UnaryExpr::concat(vec![UnaryExpr::pow(2), UnaryExpr::star(16)]);
    let set = expr.denote();
    let table = Nfa::new(&expr).table(200);
    assert_eq!(members(&set, 200), (0..=200).filter(|&k| table[k as usize]).collect::<Vec<_>>());
    assert_eq!(set.period(), 16);
    assert!(set.member(&BigUint::from(18u32)));
    assert!(!set.member(&BigUint::from(16u32)));
}

#[test]
fn numerical_semigroup_three_five() {
    let sum = normalize(&[EventuallyPeriodicSet::multiples(3), EventuallyPeriodicSet::multiples(5)], SetOp::Sum);
    let mut brute = vec![false; 101];
    for a in (0..=100).step_by(3) {
        for b in (0..=100 - a).step_by(5) {
            brute[a + b] = true;
        }
    }
    assert_eq!(members(&sum, 100), (0..=100u64).filter(|&k| brute[k as usize]).collect::<Vec<_>>());
    assert!((8..=100).all(|k| sum.contains(k)));
}

#[test]
fn tail_cycle_tracks_membership() {
    for (text, b) in [("s^2(s^3)*", 2), ("s^3", 3), ("(s)*", 1), ("s^5(s^4)* | s^2", 2), ("(s^7)*s^3", 1)] {
        let set = parse_expr(text).unwrap().denote();
        let tc = tail_cycle(&set, b);
        assert!(tc.x > b, "{text}");
        for k in 0..=60 {
            let j = tc.state_after(k);
            assert_eq!(tc.accepts_state(j), k >= b && set.contains(k), "{text} at {k}");
        }
    }
}

#[test]
fn tail_cycle_small_cases() {
    let tc = tail_cycle(&parse_expr("s^2(s^3)*").unwrap().denote(), 2);
    assert_eq!((tc.x, tc.cycle_len()), (3, 3));
    let forget = tail_cycle(&EventuallyPeriodicSet::singleton(4), 4);
    assert_eq!(forget.y, 6);
    assert_eq!((1..=forget.y).filter(|&j| forget.accepts_state(j)).collect::<Vec<_>>(), vec![5]);
}

#[test]
fn hundred_random_expressions_agree_with_nfa() {
    let mut r = rng(9);
    for _ in 0..100 {
        let expr = random_tree_expr(&mut r, 3);
        let set = expr.denote();
        let table = Nfa::new(&expr).table(500);
        for k in 0..=500u64 {
            assert_eq!(set.contains(k), table[k as usize], "{expr:?} at {k}");
        }
    }
}

#[test]
fn parse_errors_carry_offsets() {
    assert_eq!(parse_expr("s^2 x").unwrap_err().offset(), 4);
    assert_eq!(parse_expr("(s^3)").unwrap_err().offset(), 5);
    assert_eq!(parse_expr("s^0").unwrap_err().offset(), 2);
}

fn flat_expr() -> impl Strategy<Value = UnaryExpr> {
    any::<u64>().prop_map(|seed| random_flat_expr(&mut rng(seed)))
}

proptest! {
    #[test]
    fn printed_expressions_reparse_to_same_set(expr in flat_expr()) {
        let text = expr.to_string();
        let back = parse_expr(&text).unwrap();
        prop_assert_eq!(back.denote(), expr.denote());
    }

    #[test]
    fn membership_is_periodic_past_threshold(expr in flat_expr(), k in 0u64..400) {
        let set = expr.denote();
        if k >= set.threshold() {
            prop_assert_eq!(set.contains(k), set.contains(k + set.period()));
        }
        prop_assert_eq!(set.contains(k), set.member(&BigUint::from(k)));
    }

    #[test]
    fn huge_members_follow_residue(expr in flat_expr(), mult in 1u64..1000) {
        let set = expr.denote();
        let base = set.threshold() + 3;
        let big = BigUint::from(base) + BigUint::from(set.period()) * BigUint::from(mult) * BigUint::from(u64::MAX);
        prop_assert_eq!(set.member(&big), set.contains(base));
    }

    #[test]
    fn union_and_sum_match_definitions(a in flat_expr(), b in flat_expr()) {
        let (sa, sb) = (a.denote(), b.denote());
        let union = normalize(&[sa.clone(), sb.clone()], SetOp::Union);
        let sum = normalize(&[sa.clone(), sb.clone()], SetOp::Sum);
        for k in 0..120u64 {
            prop_assert_eq!(union.contains(k), sa.contains(k) || sb.contains(k));
            let brute = (0..=k).any(|i| sa.contains(i) && sb.contains(k - i));
            prop_assert_eq!(sum.contains(k), brute);
        }
    }

    #[test]
    fn min_at_least_is_smallest_member(expr in flat_expr(), floor in 0u64..50) {
        let set = expr.denote();
        let brute = (floor..floor + 200).find(|&k| set.contains(k));
        prop_assert_eq!(set.min_at_least(floor), brute);
    }
}

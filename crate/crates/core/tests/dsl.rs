mod common;

use common::{desk_halting, random_standard_system, random_tm, rng};
use proptest::prelude::*;
use snp_workbench::cm::unary_copier;
use snp_workbench::dsl::{parse_cm, parse_document, parse_snp, parse_tm, print_cm, print_snp, print_tm, Document};
use snp_workbench::engine::{validate, Policy};
use snp_workbench::snp2cm::translate;
use snp_workbench::universal::{build_pi_input, build_pi_m};

fn same_system(a: &snp_workbench::engine::SnpSystem, b: &snp_workbench::engine::SnpSystem) -> bool {
    a.mode == b.mode
        && a.convention == b.convention
        && a.synapses == b.synapses
        && a.input == b.input
        && a.output == b.output
        && a.neurons.len() == b.neurons.len()
        && a.neurons.iter().zip(&b.neurons).all(|(x, y)| {
            x.initial == y.initial
                && x.rules.len() == y.rules.len()
                && x.rules.iter().zip(&y.rules).all(|(r, s)| r.same_action(s))
        })
}

#[test]
fn generated_systems_round_trip() {
    let mut r = rng(3);
    for _ in 0..10 {
        let tm = random_tm(&mut r, 3, 2, 0.2);
        for sys in [build_pi_m(&tm), build_pi_input(&tm)] {
            let back = parse_snp(&print_snp(&sys)).unwrap();
            assert!(same_system(&sys, &back));
            assert_eq!(back, sys);
            assert!(validate(&back).is_empty());
        }
    }
}

#[test]
fn machines_round_trip() {
    let tm = desk_halting();
    assert_eq!(parse_tm(&print_tm(&tm)).unwrap(), tm);
    let cm = unary_copier();
    assert_eq!(parse_cm(&print_cm(&cm)).unwrap(), cm);
    let sys = random_standard_system(&mut rng(1), 2, true);
    let table = translate(&sys).unwrap().materialize(100_000).unwrap();
    assert_eq!(parse_cm(&print_cm(&table)).unwrap(), table);
}

#[test]
fn documents_pick_their_kind() {
    assert!(matches!(parse_document("tm states=1 symbols=1 blank=1 halt=1\n"), Ok(Document::Tm(_))));
    assert!(matches!(parse_document(&print_cm(&unary_copier())), Ok(Document::Cm(_))));
    assert!(parse_document("widget 3\n").is_err());
}

#[test]
fn errors_point_at_the_problem() {
    let head = "system s mode=standard input=none output=1 output_convention=gap\n";
    let cases = [
        ("neuron 1 spikes=1 {\n  rule \"s\" / 1 -> 1 ; 0\n}\n", 3, "delay"),
        ("neuron 1 spikes=1 {\n  rule \"s\" / 1 -> 1\n}\n", 3, "delay"),
        ("neuron 1 spikes=1 {\n  rule \"s^2\" / 2 -> 0 ; 1\n}\n", 3, "forgetting"),
        ("neuron 1 spikes=1 {\n  rule \"s^2(s^\" / 1 -> 1 ; 1\n}\n", 3, "expression"),
    ];
    for (body, line, word) in cases {
        let err = parse_snp(&format!("{head}{body}")).unwrap_err();
        assert_eq!(err.line, line, "{err}");
        assert!(err.to_string().contains(word), "{err}");
    }
    let err = parse_snp(&format!("{head}neuron 1 spikes=1 {{\n  rule \"s^2(s^\" / 1 -> 1 ; 1\n}}\n")).unwrap_err();
    assert_eq!(err.col, 15);
    let dup = "tm states=2 symbols=1 blank=1 halt=2\ndelta q1 a1 -> a1 L q2\ndelta q1 a1 -> a1 R q2\n";
    assert_eq!(parse_tm(dup).unwrap_err().line, 3);
    let range = "cm counters=1 output=1 states=2 initial=1 halt=2 alphabet=1\nf 1 q1 * -> Y q1 INC c2\n";
    assert_eq!(parse_cm(range).unwrap_err().line, 2);
}

#[test]
fn parsed_system_runs_like_the_original() {
    let tm = desk_halting();
    let sys = build_pi_m(&tm);
    let back = parse_snp(&print_snp(&sys)).unwrap();
    let start = snp_workbench::turing::TmConfig::new(1, vec![2], 2, vec![2, 2]);
    let schedule = snp_workbench::universal::build_schedule(&tm, &snp_workbench::turing::encode_config(&tm, &start));
    let a = snp_workbench::engine::run(&sys, &schedule, Policy::Strict, 100);
    let b = snp_workbench::engine::run(&back, &schedule, Policy::Strict, 100);
    assert_eq!(a.records, b.records);
}

proptest! {
    #[test]
    fn random_systems_round_trip(seed in any::<u64>(), m in 1usize..=4) {
        let sys = random_standard_system(&mut rng(seed), m, seed % 2 == 0);
        let back = parse_snp(&print_snp(&sys)).unwrap();
        prop_assert!(same_system(&sys, &back));
    }

    #[test]
    fn random_machines_round_trip(seed in any::<u64>(), q in 2u32..=5, a in 1u32..=4) {
        let tm = random_tm(&mut rng(seed), q, a, 0.3);
        prop_assert_eq!(parse_tm(&print_tm(&tm)).unwrap(), tm);
    }
}

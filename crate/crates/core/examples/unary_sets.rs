//! Regular expressions over one letter, their eventually periodic sets, and the
//! tail-cycle automata used to track a neuron's content.

use snp_workbench::unary::{normalize, parse_expr, tail_cycle, EventuallyPeriodicSet, SetOp};

fn show(set: &EventuallyPeriodicSet, upto: u64) -> String {
    (0..=upto).filter(|&k| set.contains(k)).map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
}

fn main() {
    for text in ["s^3", "s(s^2)*", "s^2(s^16)*", "s^3 | s^5(s^2)*", "(s^2)*s^7"] {
        let set = parse_expr(text).unwrap().denote();
        println!(
            "{text:<16} threshold={:<2} period={:<2} members<=24: {}",
            set.threshold(),
            set.period(),
            show(&set, 24)
        );
    }

    let odd = parse_expr("s(s^2)*").unwrap().denote();
    let thirds = EventuallyPeriodicSet::multiples(3);
    println!("odd plus a multiple of 3: {}", show(&normalize(&[odd.clone(), thirds.clone()], SetOp::Sum), 30));
    println!("odd or a multiple of 3:   {}", show(&normalize(&[odd, thirds], SetOp::Union), 30));

    match parse_expr("s^2(s^") {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error at offset {}: {e}", e.offset()),
    }

    // Which states of the content tracker accept for a rule that consumes 4 spikes.
    let rule = parse_expr("s^5(s^3)*").unwrap().denote();
    let tc = tail_cycle(&rule, 4);
    println!("tail cycle: states 1..={}, loop back to {}", tc.y, tc.x);
    for k in 0..14 {
        let j = tc.state_after(k);
        println!("  {k:>2} spikes -> g{j:<2} {}", if tc.accepts_state(j) { "fires" } else { "" });
    }
}

//! Turn a left-hand tape into the number `X` with the 6-neuron encoder.

use snp_workbench::engine::{self, InputSchedule, Policy};
use snp_workbench::turing::{Dir, TuringMachine};
use snp_workbench::universal::{build_input_word, build_pi_input, input_emission_time, input_target, run_input_encoder};

fn main() {
    let tm = TuringMachine::new(2, 2, 2).unwrap().with(1, 1, 2, Dir::L, 2).with(1, 2, 1, Dir::R, 1);
    let cells = [2, 1, 2, 2];
    let word = build_input_word(&tm, &cells);
    println!("cells (nearest first) {cells:?}");
    println!("spike train {word:?}");

    let sys = build_pi_input(&tm);
    // The doubling ring keeps running after the emission, so stop right there.
    let until = input_emission_time(&tm, cells.len());
    let trace = engine::run(&sys, &InputSchedule::from_train(&word), Policy::Strict, until);
    for (t, contents) in trace.snapshots() {
        let row: Vec<String> = contents.iter().map(|n| format!("{n:>8}")).collect();
        println!("t={t:<3}{}", row.join(""));
    }
    println!("emitted {:?}, expected X={} at t={}", trace.output_events, input_target(&tm, &cells), until);

    // Every left side holds at least one cell.
    for len in 1..8 {
        let cells: Vec<u32> = (0..len).map(|i| 1 + (i % 2)).collect();
        let got = run_input_encoder(&tm, &cells, Policy::Strict);
        assert_eq!(got, Some((input_emission_time(&tm, len as usize), input_target(&tm, &cells))));
    }
    println!("tapes of length 1..8 all encode correctly");
}

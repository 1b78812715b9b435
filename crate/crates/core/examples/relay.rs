//! Build a three-neuron chain in code, run it, and read the result both ways.
//!
//! ```sh
//! cargo run --example relay
//! ```

use snp_workbench::engine::{self, InputSchedule, Mode, Neuron, OutputConvention, Policy, RuleSpec, SnpSystem};
use snp_workbench::unary::UnaryExpr;

fn main() {
    let mut sys = SnpSystem::new("chain", Mode::Standard, OutputConvention::SpikeGap);
    // The source fires twice: once at t=1 with both spikes present, once with the last one.
    let src = sys.add_neuron(
        Neuron::new(2u32)
            .with_rule(RuleSpec::spiking(UnaryExpr::pow(2), 1, 1, 1))
            .with_rule(RuleSpec::spiking(UnaryExpr::pow(1), 1, 1, 3)),
    );
    let mid = sys.add_neuron(Neuron::new(0u32).with_rule(RuleSpec::spiking(UnaryExpr::pow(1), 1, 1, 1)));
    let out = sys.add_neuron(Neuron::new(0u32).with_rule(RuleSpec::spiking(UnaryExpr::pow(1), 1, 1, 1)));
    sys.connect(src, mid);
    sys.connect(mid, out);
    sys.output = Some(out);
    assert!(engine::validate(&sys).is_empty());

    let trace = engine::run(&sys, &InputSchedule::new(), Policy::Strict, 100);
    for (t, contents) in trace.snapshots() {
        let row: Vec<String> = contents.iter().map(|n| n.to_string()).collect();
        println!("t={t:<3} [{}]", row.join(", "));
    }
    println!("halted: {:?} at t={}", trace.halt_reason, trace.final_time);
    println!("output firings: {:?}", trace.output_events);
    println!("gap between the first two firings: {}", engine::output_value(&trace, OutputConvention::SpikeGap).unwrap());
    println!("peak spikes in the system: {}", trace.space_used());
}

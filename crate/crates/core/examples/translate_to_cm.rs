//! Compile a standard system with an input neuron into a counter machine and
//! run both on the same binary word.

use snp_workbench::cm::{cm_run, Program};
use snp_workbench::dsl::{parse_snp, print_cm};
use snp_workbench::engine::Policy;
use snp_workbench::snp2cm::{compare, translate};

const SYSTEM: &str = r#"
# neuron 2 is closed for two steps after each 1, so close 1s are skipped;
# the result is the distance between the first two 1s that get through
system debounce mode=standard input=1 output=3 output_convention=gap
neuron 1 spikes=0 {
  rule "s" / 1 -> 1 ; 1
}
neuron 2 spikes=0 {
  rule "s" / 1 -> 1 ; 3
  rule "s^2" / 2 -> 0
}
neuron 3 spikes=0 {
  rule "s" / 1 -> 1 ; 1
}
synapses { (1,2) (2,3) }
"#;

fn main() {
    let sys = parse_snp(SYSTEM).unwrap();
    let tr = translate(&sys).unwrap();
    for (i, rules) in tr.automata.iter().enumerate() {
        for (k, a) in rules.iter().enumerate() {
            println!("neuron {} rule {}: {} tracker states, cycle back to g{}", i + 1, k + 1, a.y(), a.x());
        }
    }

    let cm = tr.materialize(100_000).unwrap();
    println!("{} counters, {} control states, {} entries", cm.counters, cm.states, cm.entries.len());
    for line in print_cm(&cm).lines().take(6) {
        println!("  {line}");
    }

    for word in ["1", "11", "101", "1101", "111001", "0110011"] {
        let bits: Vec<char> = word.chars().collect();
        let cmp = compare(&tr, &bits, 60, Policy::First, 100_000).unwrap();
        let run = cm_run(&cm, &bits, Policy::First, 100_000).unwrap();
        let show = |v: Option<&snp_workbench::BigUint>| v.map_or("-".to_string(), |n| n.to_string());
        println!(
            "{word:<8} system {:<2} machine {:<2} table {:<2} agree={} max steps/timestep {}",
            show(cmp.snp_output.as_ref()),
            show(cmp.cm_output.as_ref()),
            show(run.output(cm.output())),
            cmp.ok(),
            cmp.max_steps_per_timestep()
        );
    }
}

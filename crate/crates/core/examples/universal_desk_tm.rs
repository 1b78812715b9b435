//! Load a tape into the 10-neuron universal system, watch it carry the
//! configuration from move to move and read the halting tape back.

use snp_workbench::engine::{self, Policy};
use snp_workbench::turing::{encode_config, Dir, TmConfig, TuringMachine};
use snp_workbench::universal::{self, boundary_time, build_pi_m, build_schedule, decode_output};

fn main() {
    // Flips a2 to a1 while walking right; on the first blank it writes a2,
    // steps back left and halts.
    let tm = TuringMachine::new(2, 2, 2).unwrap().with(1, 1, 2, Dir::L, 2).with(1, 2, 1, Dir::R, 1);
    let sys = build_pi_m(&tm);
    println!("{} neurons, {} rules, period {}", sys.neurons.len(), sys.rule_count(), universal::macro_period(&tm));
    assert!(universal::conflicts(&tm).is_empty());

    let start = TmConfig::new(1, vec![], 2, vec![2, 2]);
    let schedule = build_schedule(&tm, &encode_config(&tm, &start));
    print!("loading schedule:\n{}", schedule.to_text());

    let trace = engine::run(&sys, &schedule, Policy::Strict, 200);
    let mut oracle = start.clone();
    for n in 0.. {
        let t = boundary_time(&tm, n);
        let Some(contents) = trace.contents_at(t) else { break };
        let enc = encode_config(&tm, &oracle);
        let same = contents[0] == enc.x && contents[1] == enc.y && contents[3] == enc.code.into();
        println!(
            "move {n} t={t:<3} X={:<6} Y={:<6} code={:<3} {oracle}  {}",
            contents[0],
            contents[1],
            contents[3],
            if same { "ok" } else { "DIFFERS" }
        );
        if oracle.state == tm.halt {
            break;
        }
        oracle.step(&tm);
    }

    let (t, y) = trace.output_events.first().expect("the machine halts").clone();
    let cells = decode_output(&tm, &y).unwrap();
    println!("output at t={t}: Y={y} -> right of head {cells:?}, quiescent at t={}", trace.final_time);
    println!("peak spikes: {}", trace.space_used());
}

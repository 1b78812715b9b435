//! Encode a tape as three numbers, step the machine on the numbers alone and
//! check the result against ordinary simulation.

use snp_workbench::turing::{decode_config, encode_config, encoded_step, Dir, Outcome, TmConfig, TuringMachine};

fn main() {
    // Binary increment with the least significant bit under the head:
    // symbols a1 = blank, a2 = 0, a3 = 1.
    let tm = TuringMachine::new(2, 3, 2)
        .unwrap()
        .with(1, 3, 2, Dir::L, 1)
        .with(1, 2, 3, Dir::R, 2)
        .with(1, 1, 3, Dir::R, 2);
    println!("z = {} (log2 z = {})", tm.z(), tm.log_z());
    for q in 1..=tm.states {
        for a in 1..=tm.symbols {
            let halts = if tm.is_halt_code(tm.code(q, a)) { " halting" } else { "" };
            println!("  <q{q}> + <a{a}> = {}{halts}", tm.code(q, a));
        }
    }

    // 0111 with the head on the last 1; left cells are listed nearest first.
    let mut cfg = TmConfig::new(1, vec![3, 3, 2], 3, vec![]);
    let mut enc = encode_config(&tm, &cfg);
    println!("start  {cfg}");
    println!("       X={} code={} Y={}", enc.x, enc.code, enc.y);
    loop {
        let outcome = cfg.step(&tm);
        let Some(next) = encoded_step(&tm, &enc) else {
            assert_eq!(outcome, Outcome::Halted);
            break;
        };
        enc = next;
        assert_eq!(decode_config(&tm, &enc).unwrap(), cfg);
        println!("{:<6} {cfg}", format!("{outcome:?}").to_lowercase());
        println!("       X={} code={} Y={}", enc.x, enc.code, enc.y);
    }
    println!("halted on code {}", enc.code);
}

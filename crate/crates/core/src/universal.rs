//! A 10-neuron system that simulates any Turing machine move by move, and
//! a 6-neuron encoder that turns a spike train into the left-tape number `X`.
//!
//! The universal system runs in exhaustive mode with the environment feeding
//! neuron 5. The loading schedule delivers `X + e` at `t = 1`, `Y` at `t = 2`
//! and the state/symbol code at `t = 4`, where `e` is a small even marker
//! (see [`load_marker`]; it is 2 for most two-symbol machines). From `t = 5` on, one machine move
//! takes `log2(z) + 9` timesteps; at every move boundary neuron 1 holds `X`,
//! neuron 2 holds `Y`, neurons 4 and 6 hold the code and neuron 10 holds one
//! spike. When the code is halting, neuron 3 sends `Y` to the environment two
//! steps later and the system falls silent.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::engine::{
    overlap_report, run, HaltReason, InputSchedule, Mode, Neuron, OutputConvention, Overlap, Policy, RuleSpec,
    SnpSystem, Trace,
};
use crate::turing::{
    decode_cells, encode_cells, encode_config, Dir, EncodedConfig, TmConfig, TmError, TuringMachine,
};
use crate::unary::UnaryExpr;

fn pow(n: u64) -> UnaryExpr {
    UnaryExpr::pow(n)
}

/// `s^{lead} (s^z)* s^{tail}` with empty parts dropped.
fn zrun(lead: u64, z: u64, tail: u64) -> UnaryExpr {
    let mut parts = Vec::new();
    if lead > 0 {
        parts.push(pow(lead));
    }
    parts.push(UnaryExpr::star(z));
    if tail > 0 {
        parts.push(pow(tail));
    }
    UnaryExpr::concat(parts)
}

fn fire(expr: UnaryExpr, b: u64, p: u64, d: u64) -> RuleSpec {
    RuleSpec::spiking(expr, b, p, d as u32)
}

fn forget(expr: UnaryExpr, b: u64) -> RuleSpec {
    RuleSpec::forgetting(expr, b)
}

/// Sent when the shrinking side held a single cell with symbol code `r`.
fn marker(z: u64, r: u64) -> u64 {
    z + 2 * r + 2
}

/// Residue mod `z` that tags `X` during loading. `2` unless that value can
/// also appear in the middle of a doubling, then the next free even value.
pub fn load_marker(tm: &TuringMachine) -> u64 {
    let z = tm.z();
    let live: Vec<u64> = tm.codes().into_iter().filter(|&c| !tm.is_halt_code(c)).collect();
    let taken = |e: u64| {
        tm.symbol_codes().iter().any(|&r| (2 * r + 2) % z == e)
            || (1..z).filter(|j| j.is_power_of_two()).any(|j| live.iter().any(|&c| j * c % z == e))
    };
    (2..z).step_by(2).find(|&e| !taken(e)).unwrap_or(2)
}

/// Spikes neuron 10 keeps after reading a transition into state code `qu`.
fn state_leftover(qu: u64) -> u64 {
    if [3, 7, 15, 31].contains(&(qu + 1)) {
        qu + 2
    } else {
        qu + 1
    }
}

/// Timesteps per simulated move.
pub fn macro_period(tm: &TuringMachine) -> u64 {
    u64::from(tm.log_z()) + 9
}

/// Time at which the configuration after `n` moves is loaded.
pub fn boundary_time(tm: &TuringMachine, n: u64) -> u64 {
    5 + n * macro_period(tm)
}

pub const NEURONS: usize = 10;

/// Builds the universal system for `tm`. Neuron `i` of the construction is
/// index `i - 1`; input is neuron 5, output neuron 3.
pub fn build_pi_m(tm: &TuringMachine) -> SnpSystem {
    let z = tm.z();
    let l = u64::from(tm.log_z());
    let codes = tm.codes();
    let halting: Vec<u64> = tm.halt_codes();
    let live: Vec<(u64, crate::turing::Transition)> = tm
        .delta
        .iter()
        .map(|(&(q, a), &t)| (tm.code(q, a), t))
        .collect();
    let symbols = tm.symbol_codes();
    let e = load_marker(tm);
    let mut n: Vec<Neuron> = (0..NEURONS).map(|_| Neuron::new(0u32)).collect();
    n[9].initial = BigUint::from(31u32);

    // 1 and 2 hold X and Y; the side the head moves away from is shifted
    for (side, toward) in [(0usize, Dir::R), (1usize, Dir::L)] {
        for &(c, t) in &live {
            if t.dir == toward {
                n[side].push_unique(fire(zrun(0, z, c), 1, 1, 1).with_note(format!("pass code {}", c)));
            } else {
                n[side].push_unique(
                    fire(zrun(z * z, z, c), z, 1, l + 6).with_note(format!("shift out, code {}", c)),
                );
                for &r in &symbols {
                    n[side].push_unique(
                        fire(pow(z * r + c), z * r + c, marker(z, r), l + 6)
                            .with_note(format!("last cell {}, code {}", r, c)),
                    );
                }
                n[side].push_unique(forget(pow(c), 1));
            }
        }
        if side == 1 {
            for &c in &halting {
                n[1].push_unique(fire(zrun(0, z, c), 1, 1, 1).with_note(format!("halting code {}", c)));
            }
        }
    }

    // 3 is the output neuron
    for &c in &codes {
        if tm.is_halt_code(c) {
            n[2].push_unique(fire(zrun(0, z, c), z, z, 1).with_note("emit Y"));
        } else {
            n[2].push_unique(forget(zrun(0, z, c), 1));
        }
    }
    for &r in &symbols {
        n[2].push_unique(forget(zrun(0, z, r), 1));
    }
    for &r in &symbols {
        n[2].push_unique(forget(pow(marker(z, r)), 1));
    }

    // 4 and 6 feed 1 and 2
    for (k, loading) in [(3usize, true), (5usize, false)] {
        if loading {
            n[k].push_unique(fire(zrun(e, z, 0), z, z, 2).with_note("load X"));
        } else {
            n[k].push_unique(forget(zrun(e, z, 0), 1));
        }
        n[k].push_unique(fire(zrun(0, z, 0), 1, 1, 1));
        if loading {
            n[k].push_unique(forget(pow(e), e));
        }
        for &c in &codes {
            n[k].push_unique(fire(pow(c), 1, 1, 1));
        }
        for &c in &codes {
            n[k].push_unique(forget(zrun(z, z, c), 1));
        }
        n[k].push_unique(forget(pow(1), 1));
        for &r in &symbols {
            n[k].push_unique(fire(zrun(z, z, r), z, z, 1));
            n[k].push_unique(forget(pow(r), 1));
        }
        for &r in &symbols {
            n[k].push_unique(fire(pow(marker(z, r)), marker(z, r), z, 1).with_note("regrow one blank"));
        }
    }

    // 5 takes the environment input and the freshly read symbol
    n[4].push_unique(fire(zrun(e, z, 0), 1, 1, 1).with_note("load X"));
    n[4].push_unique(fire(zrun(z, z, 0), 1, 1, 1).with_note("load Y"));
    for &c in &codes {
        n[4].push_unique(fire(zrun(0, z, c), 1, 1, 1));
    }
    for &r in &symbols {
        n[4].push_unique(forget(zrun(z, z, r), z));
    }
    for &r in &symbols {
        n[4].push_unique(forget(pow(marker(z, r)), marker(z, r) - r));
    }
    for &r in &symbols {
        n[4].push_unique(fire(pow(r), 1, 1, 1));
    }

    // 7, 8, 9 multiply by z through repeated doubling
    let live_codes: Vec<u64> = codes.iter().copied().filter(|&c| !tm.is_halt_code(c)).collect();
    for k in 6..9 {
        n[k].push_unique(forget(zrun(e, z, 0), 1));
        n[k].push_unique(forget(zrun(0, z, 0), 1));
        for &c in &codes {
            n[k].push_unique(forget(pow(c), 1));
        }
        let mut m = 2;
        while m <= z && !live_codes.is_empty() {
            let j = z / m;
            let guard = UnaryExpr::union(live_codes.iter().map(|&c| zrun(z, z, j * c)).collect());
            n[k].push_unique(fire(guard, 1, 1, 1).with_note(format!("doubling {}/{}", m, z)));
            m *= 2;
        }
        for &r in &symbols {
            n[k].push_unique(forget(pow(r), r));
        }
    }

    // 10 is the clock and the transition table
    for (have, drop) in [(31, 16), (15, 8), (7, 4), (3, 2)] {
        n[9].push_unique(forget(pow(have), drop));
    }
    n[9].push_unique(fire(pow(1), 1, 1, l + 3).with_note("tick"));
    for &c in &live_codes {
        n[9].push_unique(fire(zrun(0, z * z, z * c), z * z, z * z, 1));
    }
    let mut next_states = Vec::new();
    for &(c, t) in &live {
        let qu = tm.state_code(t.next);
        n[9].push_unique(
            fire(pow(z * c), z * c - state_leftover(qu), z * tm.symbol_code(t.write), 1)
                .with_note(format!("code {} -> write a{}, {}, q{}", c, t.write, t.dir, t.next)),
        );
        if !next_states.contains(&qu) {
            next_states.push(qu);
        }
    }
    for qu in next_states {
        let left = state_leftover(qu);
        n[9].push_unique(fire(pow(left), left - 1, qu, 4));
    }

    let mut sys = SnpSystem::new("universal", Mode::Exhaustive, OutputConvention::EmissionEvents);
    sys.neurons = n;
    let edges = [
        (5, 4), (5, 6), (5, 7), (5, 8), (5, 9),
        (7, 8), (8, 7), (8, 9), (9, 8), (7, 9), (9, 7),
        (7, 10), (9, 10), (10, 4), (10, 6),
        (1, 4), (4, 1), (2, 6), (6, 2), (2, 3), (2, 5), (1, 5),
    ];
    for (i, j) in edges {
        sys.connect(i - 1, j - 1);
    }
    sys.input = Some(4);
    sys.output = Some(2);
    sys
}

/// Pairs of rules of the universal system for `tm` that could compete.
pub fn conflicts(tm: &TuringMachine) -> Vec<Overlap> {
    overlap_report(&build_pi_m(tm))
}

/// Environment input that loads `enc` into the universal system.
pub fn build_schedule(tm: &TuringMachine, enc: &EncodedConfig) -> InputSchedule {
    InputSchedule::from_pairs([(1, &enc.x + load_marker(tm)), (2, enc.y.clone()), (4, BigUint::from(enc.code))])
}

/// Reads the tape to the right of the head from the halting output.
pub fn decode_output(tm: &TuringMachine, value: &BigUint) -> Result<Vec<u32>, TmError> {
    decode_cells(tm, value)
}

/// Neurons whose boundary contents carry the configuration.
pub const TRACKED: [usize; 5] = [0, 1, 3, 5, 9];

/// Neuron contents at a move boundary; only [`TRACKED`] entries are
/// meaningful, the rest are zero.
pub fn expected_boundary(enc: &EncodedConfig) -> Vec<BigUint> {
    let code = BigUint::from(enc.code);
    let mut v = vec![BigUint::zero(); NEURONS];
    v[0] = enc.x.clone();
    v[1] = enc.y.clone();
    v[3] = code.clone();
    v[5] = code;
    v[9] = BigUint::from(1u32);
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub moves: u64,
    pub time: u64,
    pub expected: Vec<BigUint>,
    pub found: Option<Vec<BigUint>>,
}

#[derive(Debug, Clone)]
pub struct Verification {
    /// Moves whose boundary snapshot was compared.
    pub moves_checked: u64,
    pub mismatches: Vec<Mismatch>,
    /// Set when the machine halted within the move budget.
    pub halted_at: Option<u64>,
    pub expected_output: Option<BigUint>,
    pub output_events: Vec<(u64, BigUint)>,
    pub halt_reason: HaltReason,
    pub trace: Trace,
    pub period: u64,
}

impl Verification {
    pub fn ok(&self) -> bool {
        let output_ok = match (self.halted_at, &self.expected_output) {
            (Some(n), Some(y)) => self.output_events == vec![(5 + n * self.period + 2, y.clone())],
            _ => self.output_events.is_empty(),
        };
        self.mismatches.is_empty() && output_ok && !matches!(self.halt_reason, HaltReason::StrictViolation { .. })
    }
}

/// Runs the universal system from `cfg` for up to `max_moves` moves and
/// compares every move boundary with the direct tape simulation.
pub fn verify_against_oracle(tm: &TuringMachine, cfg: &TmConfig, max_moves: u64, policy: Policy) -> Verification {
    let sys = build_pi_m(tm);
    let period = macro_period(tm);
    let mut oracle = cfg.clone();
    let mut expected = vec![encode_config(tm, &oracle)];
    let mut halted_at = None;
    for n in 0..max_moves {
        if oracle.state == tm.halt {
            halted_at = Some(n);
            break;
        }
        if oracle.step(tm) != crate::turing::Outcome::Moved {
            break;
        }
        expected.push(encode_config(tm, &oracle));
    }
    if halted_at.is_none() && oracle.state == tm.halt {
        halted_at = Some(expected.len() as u64 - 1);
    }
    let moves = expected.len() as u64 - 1;
    let limit = boundary_time(tm, moves) + if halted_at.is_some() { 4 } else { 0 };
    let trace = run(&sys, &build_schedule(tm, &expected[0]), policy, limit);
    let mut mismatches = Vec::new();
    for (n, enc) in expected.iter().enumerate() {
        let time = boundary_time(tm, n as u64);
        let found = trace.contents_at(time).map(<[BigUint]>::to_vec);
        let want = expected_boundary(enc);
        let agrees = found.as_ref().map_or(false, |f| TRACKED.iter().all(|&i| f[i] == want[i]));
        if !agrees {
            mismatches.push(Mismatch { moves: n as u64, time, expected: want, found });
        }
    }
    Verification {
        moves_checked: moves + 1,
        mismatches,
        halted_at,
        expected_output: halted_at.map(|n| expected[n as usize].y.clone()),
        output_events: trace.output_events.clone(),
        halt_reason: trace.halt_reason.clone(),
        trace,
        period,
    }
}

/// The 6-neuron encoder: reads a spike train on neuron 1 and sends `X` to the
/// environment from neuron 6.
pub fn build_pi_input(tm: &TuringMachine) -> SnpSystem {
    let z = tm.z();
    let l = u64::from(tm.log_z());
    let mut n: Vec<Neuron> = (0..6).map(|_| Neuron::new(0u32)).collect();
    for neuron in n.iter_mut().take(4) {
        neuron.push_unique(fire(UnaryExpr::star(1), 1, 1, 1));
    }
    for r in tm.symbol_codes() {
        n[4].push_unique(fire(zrun(0, z, r), 1, 1, l).with_note(format!("cell code {}", r)));
    }
    n[4].push_unique(fire(zrun(0, z, 2), 1, 1, 1).with_note("end marker"));
    for r in tm.symbol_codes() {
        n[5].push_unique(forget(zrun(0, z, r), 1));
    }
    n[5].push_unique(fire(zrun(0, z, 2), z, z, 1).with_note("emit X"));

    let mut sys = SnpSystem::new("input-encoder", Mode::Exhaustive, OutputConvention::EmissionEvents);
    sys.neurons = n;
    for (i, j) in [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 2), (3, 4), (4, 3), (2, 4), (4, 2), (2, 5), (4, 5), (5, 6)] {
        sys.connect(i - 1, j - 1);
    }
    sys.input = Some(0);
    sys.output = Some(5);
    sys
}

/// Spike train for the cells left of the head, nearest first: the farthest
/// cell code comes first, each code is followed by `log2(z) - 1` empty steps,
/// and the train ends with two spikes.
pub fn build_input_word(tm: &TuringMachine, cells: &[u32]) -> Vec<u64> {
    let gap = tm.log_z() as usize - 1;
    let mut word = Vec::with_capacity(cells.len() * (gap + 1) + 1);
    for &a in cells.iter().rev() {
        word.push(tm.symbol_code(a));
        word.extend(std::iter::repeat(0).take(gap));
    }
    word.push(2);
    word
}

/// When the encoder emits `X` for `cells` cells.
pub fn input_emission_time(tm: &TuringMachine, cells: usize) -> u64 {
    cells as u64 * u64::from(tm.log_z()) + 3
}

/// Runs the encoder on `cells` and returns the first emission.
pub fn run_input_encoder(tm: &TuringMachine, cells: &[u32], policy: Policy) -> Option<(u64, BigUint)> {
    let sys = build_pi_input(tm);
    let schedule = InputSchedule::from_train(&build_input_word(tm, cells));
    let trace = run(&sys, &schedule, policy, input_emission_time(tm, cells.len()) + 2);
    trace.output_events.first().cloned()
}

/// Expected encoder output.
pub fn input_target(tm: &TuringMachine, cells: &[u32]) -> BigUint {
    encode_cells(tm, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::validate;

    fn halting() -> TuringMachine {
        TuringMachine::new(2, 2, 2).unwrap().with(1, 1, 2, Dir::L, 2).with(1, 2, 1, Dir::R, 1)
    }

    fn walker() -> TuringMachine {
        TuringMachine::new(2, 2, 2).unwrap().with(1, 1, 2, Dir::L, 1).with(1, 2, 1, Dir::R, 1)
    }

    #[test]
    fn desk_machines_are_conflict_free() {
        for tm in [halting(), walker()] {
            assert!(validate(&build_pi_m(&tm)).is_empty());
            assert_eq!(conflicts(&tm), vec![]);
        }
    }

    #[test]
    fn halting_machine_emits_304() {
        let v = verify_against_oracle(&halting(), &TmConfig::blank(), 10, Policy::Strict);
        assert!(v.ok(), "{:?} {:?} {:?}", v.mismatches, v.output_events, v.halt_reason);
        assert_eq!(v.output_events, vec![(20, BigUint::from(304u32))]);
    }

    #[test]
    fn walker_matches_tape() {
        let v = verify_against_oracle(&walker(), &TmConfig::new(1, vec![2, 1], 1, vec![2]), 12, Policy::Strict);
        assert!(v.ok(), "{:?} {:?}", v.mismatches.first(), v.halt_reason);
    }

    #[test]
    fn encoder_emits_x() {
        let tm = walker();
        let cells = [2, 1, 2];
        assert_eq!(
            run_input_encoder(&tm, &cells, Policy::Strict),
            Some((input_emission_time(&tm, 3), input_target(&tm, &cells)))
        );
    }
}

//! Counter machines with a one-way read-only input tape.
//!
//! Each step reads the symbol under the head (or the end marker `_` past the
//! last cell), optionally tests one counter for zero, then moves the head or
//! not, changes state and performs at most one `INC`/`DEC`. The same run loop
//! drives explicit tables ([`CmSpec`]) and machines generated on demand, via
//! the [`Program`] trait.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::engine::{Policy, Selector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Read {
    Sym(char),
    /// Past the last input cell.
    End,
    Any,
}

impl Read {
    pub fn matches(self, current: Option<char>) -> bool {
        match (self, current) {
            (Read::Any, _) => true,
            (Read::Sym(a), Some(b)) => a == b,
            (Read::End, None) => true,
            _ => false,
        }
    }
}

/// Counter indices are 0-based here and 1-based in text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Test {
    Zero(usize),
    Pos(usize),
    Any,
}

impl Test {
    pub fn holds(self, counters: &[BigUint]) -> bool {
        match self {
            Test::Zero(i) => counters[i].is_zero(),
            Test::Pos(i) => !counters[i].is_zero(),
            Test::Any => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Inc(usize),
    Dec(usize),
    Null,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move<S> {
    pub advance: bool,
    pub next: S,
    pub op: Op,
}

/// Anything that lists the moves available in a state.
pub trait Program {
    type State: Clone + Eq + Hash + fmt::Debug;

    fn counters(&self) -> usize;
    fn initial(&self) -> Self::State;
    fn is_halt(&self, state: &Self::State) -> bool;
    /// Moves enabled by `current` (the symbol under the head) and the counters.
    fn moves(&self, state: &Self::State, current: Option<char>, counters: &[BigUint]) -> Vec<Move<Self::State>>;
    /// Index of the counter reported as the result.
    fn output(&self) -> usize;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub read: Read,
    pub state: u32,
    pub test: Test,
    pub advance: bool,
    pub next: u32,
    pub op: Op,
}

/// An explicit transition table. States are `1..=states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmSpec {
    pub counters: usize,
    pub output: usize,
    pub states: u32,
    pub initial: u32,
    pub halt: u32,
    pub alphabet: Vec<char>,
    pub entries: Vec<Entry>,
}

impl CmSpec {
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let counter_ok = |i: usize| i < self.counters;
        if !counter_ok(self.output) {
            out.push(format!("output counter c{} does not exist", self.output + 1));
        }
        for (name, q) in [("initial", self.initial), ("halt", self.halt)] {
            if q == 0 || q > self.states {
                out.push(format!("{} state q{} does not exist", name, q));
            }
        }
        for (k, e) in self.entries.iter().enumerate() {
            let at = format!("entry {}", k + 1);
            if e.state == 0 || e.state > self.states || e.next == 0 || e.next > self.states {
                out.push(format!("{}: state out of range", at));
            }
            if e.state == self.halt {
                out.push(format!("{}: leaves the halting state", at));
            }
            if let Read::Sym(c) = e.read {
                if !self.alphabet.contains(&c) {
                    out.push(format!("{}: symbol {} is not in the alphabet", at, c));
                }
            }
            match e.test {
                Test::Zero(i) | Test::Pos(i) if !counter_ok(i) => {
                    out.push(format!("{}: counter c{} does not exist", at, i + 1))
                }
                _ => {}
            }
            match e.op {
                Op::Inc(h) | Op::Dec(h) if !counter_ok(h) => {
                    out.push(format!("{}: counter c{} does not exist", at, h + 1))
                }
                Op::Dec(h) if e.test != Test::Pos(h) => {
                    out.push(format!("{}: DEC c{} must test c{} > 0", at, h + 1, h + 1))
                }
                _ => {}
            }
        }
        out
    }
}

impl Program for CmSpec {
    type State = u32;

    fn counters(&self) -> usize {
        self.counters
    }

    fn initial(&self) -> u32 {
        self.initial
    }

    fn is_halt(&self, state: &u32) -> bool {
        *state == self.halt
    }

    fn moves(&self, state: &u32, current: Option<char>, counters: &[BigUint]) -> Vec<Move<u32>> {
        self.entries
            .iter()
            .filter(|e| e.state == *state && e.read.matches(current) && e.test.holds(counters))
            .map(|e| Move { advance: e.advance, next: e.next, op: e.op })
            .collect()
    }

    fn output(&self) -> usize {
        self.output
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CmError {
    #[error("no entry applies in state {state} at step {step}")]
    Stuck { state: String, step: u64 },
    #[error("DEC on zero counter c{} at step {step}", counter + 1)]
    DecZero { counter: usize, step: u64 },
    #[error("strict policy: {count} entries apply in state {state} at step {step}")]
    Ambiguous { state: String, count: usize, step: u64 },
    #[error("{0}")]
    Limit(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmConfig<S> {
    pub state: S,
    pub counters: Vec<BigUint>,
    pub head: usize,
    pub steps: u64,
}

impl<S> CmConfig<S> {
    pub fn max_counter(&self) -> BigUint {
        self.counters.iter().max().cloned().unwrap_or_default()
    }
}

pub fn initial_config<P: Program>(program: &P) -> CmConfig<P::State> {
    CmConfig { state: program.initial(), counters: vec![BigUint::zero(); program.counters()], head: 0, steps: 0 }
}

/// Applies one entry. Halted configurations are returned unchanged.
pub fn cm_step<P: Program>(
    program: &P,
    config: &mut CmConfig<P::State>,
    input: &[char],
    selector: &mut Selector,
) -> Result<(), CmError> {
    if program.is_halt(&config.state) {
        return Ok(());
    }
    let current = input.get(config.head).copied();
    let moves = program.moves(&config.state, current, &config.counters);
    if moves.is_empty() {
        return Err(CmError::Stuck { state: format!("{:?}", config.state), step: config.steps });
    }
    let indices: Vec<usize> = (0..moves.len()).collect();
    let pick = selector.select(&indices).map_err(|c| CmError::Ambiguous {
        state: format!("{:?}", config.state),
        count: c.len(),
        step: config.steps,
    })?;
    let mv = moves.into_iter().nth(pick).unwrap();
    match mv.op {
        Op::Inc(h) => config.counters[h] += 1u32,
        Op::Dec(h) => {
            if config.counters[h].is_zero() {
                return Err(CmError::DecZero { counter: h, step: config.steps });
            }
            config.counters[h] -= 1u32;
        }
        Op::Null => {}
    }
    if mv.advance {
        config.head += 1;
    }
    config.state = mv.next;
    config.steps += 1;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmRun<S> {
    pub halted: bool,
    pub config: CmConfig<S>,
    /// Largest value any counter held.
    pub peak: BigUint,
}

impl<S> CmRun<S> {
    pub fn output(&self, index: usize) -> Option<&BigUint> {
        self.halted.then(|| &self.config.counters[index])
    }
}

/// Runs until the halting state or `max_steps`.
pub fn cm_run<P: Program>(
    program: &P,
    input: &[char],
    policy: Policy,
    max_steps: u64,
) -> Result<CmRun<P::State>, CmError> {
    cm_run_observed(program, input, policy, max_steps, |_| {})
}

/// [`cm_run`] calling `observe` before every step and once at the end.
pub fn cm_run_observed<P: Program>(
    program: &P,
    input: &[char],
    policy: Policy,
    max_steps: u64,
    mut observe: impl FnMut(&CmConfig<P::State>),
) -> Result<CmRun<P::State>, CmError> {
    let mut config = initial_config(program);
    let mut selector = Selector::new(policy);
    let mut peak = BigUint::zero();
    while !program.is_halt(&config.state) && config.steps < max_steps {
        observe(&config);
        cm_step(program, &mut config, input, &mut selector)?;
        peak = peak.max(config.max_counter());
    }
    observe(&config);
    Ok(CmRun { halted: program.is_halt(&config.state), config, peak })
}

/// Copies every `1` of the input into counter 1 and halts at the end marker.
pub fn unary_copier() -> CmSpec {
    CmSpec {
        counters: 1,
        output: 0,
        states: 2,
        initial: 1,
        halt: 2,
        alphabet: vec!['1'],
        entries: vec![
            Entry { read: Read::Sym('1'), state: 1, test: Test::Any, advance: true, next: 1, op: Op::Inc(0) },
            Entry { read: Read::End, state: 1, test: Test::Any, advance: false, next: 2, op: Op::Null },
        ],
    }
}

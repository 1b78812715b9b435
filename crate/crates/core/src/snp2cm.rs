//! Compiles a standard SN P system into a nondeterministic counter machine.
//!
//! Counter `i` mirrors the content of neuron `i`; one extra counter collects
//! the result, the number of timesteps between the first two firings of the
//! output neuron. The finite control never stores spike counts. For every
//! rule it keeps the state of a chain-plus-cycle automaton ([`RuleAutomaton`])
//! that follows the neuron's content through `+s` and `-s` moves, plus the
//! remaining delay of every neuron.
//!
//! One simulated timestep is
//!
//! * a read step: the next input bit is added to the input neuron (if open);
//! * stage 1: every idle neuron with an accepting automaton picks one such
//!   rule (one entry per rule, so the choice is the machine's own
//!   nondeterminism) and decrements its counter `b` times;
//! * stage 2: every neuron whose delay expires increments each open target;
//! * a closing step that ages delays and counts the output gap.
//!
//! `-s` is ambiguous only at the entry state `g_x` of a cycle. The machine
//! resolves it with a probe on the same counter: `x - 2` further decrements,
//! a zero test, and `x - 2` increments to restore the count. Probe moves are
//! not reported to the automata.
//!
//! States are generated on demand and memoized.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::cm::{CmSpec, Entry, Move, Op, Program, Read, Test};
use crate::engine::{
    run, validate, HaltReason, InputSchedule, Mode, OutputConvention, Policy, RuleSpec, Selector, SnpSystem,
};
use crate::unary::{tail_cycle, TailCycle};

/// Tracks one rule's applicability while the neuron's content moves by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleAutomaton {
    pub shape: TailCycle,
    pub consume: u64,
}

/// Result of a `-s` move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Minus {
    To(u64),
    /// From `g_x`: `g_{x-1}` if the count was exactly `x - 1`, else `g_y`.
    Either { exact: u64, wrap: u64 },
}

impl RuleAutomaton {
    pub fn new(rule: &RuleSpec) -> Self {
        RuleAutomaton { shape: tail_cycle(&rule.guard, rule.consume), consume: rule.consume }
    }

    pub fn x(&self) -> u64 {
        self.shape.x
    }

    pub fn y(&self) -> u64 {
        self.shape.y
    }

    pub fn start(&self, count: u64) -> u64 {
        self.shape.state_after(count)
    }

    pub fn accepts(&self, state: u64) -> bool {
        self.shape.accepts_state(state)
    }

    pub fn plus(&self, j: u64) -> u64 {
        if j == self.y() {
            self.x()
        } else {
            j + 1
        }
    }

    pub fn minus(&self, j: u64) -> Minus {
        assert!(j > 1, "-s from the empty state");
        if j == self.x() {
            Minus::Either { exact: j - 1, wrap: self.y() }
        } else {
            Minus::To(j - 1)
        }
    }

    /// Every `-s` edge as `(from, to)`; the only state with two is `g_x`.
    pub fn minus_edges(&self) -> Vec<(u64, u64)> {
        let mut edges = Vec::new();
        for j in 2..=self.y() {
            match self.minus(j) {
                Minus::To(k) => edges.push((j, k)),
                Minus::Either { exact, wrap } => {
                    edges.push((j, exact));
                    edges.push((j, wrap));
                }
            }
        }
        edges
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Phase {
    Prologue { neuron: usize, left: u64 },
    Read,
    Consume { neuron: usize, rule: usize, left: u64 },
    Probe { neuron: usize, rule: usize, left: u64, pending: Vec<usize>, down: u64, up: Option<u64> },
    Select { neuron: usize },
    Send { neuron: usize, target: usize },
    Close,
    Halt,
}

/// Finite control of the generated machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Control {
    pub tracks: Vec<Vec<u64>>,
    pub rem: Vec<u32>,
    pub fired: bool,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("only standard systems can be translated, not {0}")]
    Mode(&'static str),
    #[error("only the spike-gap output convention is supported")]
    Convention,
    #[error("system is invalid: {0}")]
    Invalid(String),
    #[error("more than {0} control states")]
    TooManyStates(usize),
    #[error("{0}")]
    Input(String),
}

/// The generated counter machine. Counters `0..m` are the neurons, `m` the
/// result.
pub struct Translation {
    pub system: SnpSystem,
    pub automata: Vec<Vec<RuleAutomaton>>,
    targets: Vec<Vec<usize>>,
    memo: RefCell<HashMap<Control, Vec<Entry2>>>,
}

#[derive(Debug, Clone)]
struct Entry2 {
    read: Read,
    test: Test,
    advance: bool,
    next: Control,
    op: Op,
}

pub fn translate(system: &SnpSystem) -> Result<Translation, TranslateError> {
    if system.mode != Mode::Standard {
        return Err(TranslateError::Mode(system.mode.name()));
    }
    if system.convention != OutputConvention::SpikeGap {
        return Err(TranslateError::Convention);
    }
    if let Some(problem) = validate(system).into_iter().next() {
        return Err(TranslateError::Invalid(problem));
    }
    let automata = system.neurons.iter().map(|n| n.rules.iter().map(RuleAutomaton::new).collect()).collect();
    let targets = (0..system.neurons.len()).map(|i| system.targets(i).collect()).collect();
    Ok(Translation { system: system.clone(), automata, targets, memo: RefCell::new(HashMap::new()) })
}

impl Translation {
    pub fn neurons(&self) -> usize {
        self.system.neurons.len()
    }

    /// Largest `x` over all automata.
    pub fn x_r(&self) -> u64 {
        self.automata.iter().flatten().map(RuleAutomaton::x).max().unwrap_or(0)
    }

    pub fn states_seen(&self) -> usize {
        self.memo.borrow().len()
    }

    fn prologue_from(&self, neuron: usize) -> Phase {
        (neuron..self.neurons())
            .find_map(|i| {
                let n = self.system.neurons[i].initial.to_u64().expect("initial marking fits in u64");
                (n > 0).then_some(Phase::Prologue { neuron: i, left: n })
            })
            .unwrap_or(Phase::Read)
    }

    fn applicable(&self, ctl: &Control, neuron: usize) -> Vec<usize> {
        if ctl.rem[neuron] != 0 {
            return Vec::new();
        }
        (0..self.automata[neuron].len()).filter(|&r| self.automata[neuron][r].accepts(ctl.tracks[neuron][r])).collect()
    }

    fn select_from(&self, ctl: &Control, neuron: usize) -> Phase {
        (neuron..self.neurons())
            .find(|&i| !self.applicable(ctl, i).is_empty())
            .map(|i| Phase::Select { neuron: i })
            .unwrap_or_else(|| self.send_from(ctl, 0, 0))
    }

    fn send_from(&self, ctl: &Control, neuron: usize, target: usize) -> Phase {
        let mut t0 = target;
        for i in neuron..self.neurons() {
            if ctl.rem[i] == 1 {
                if let Some(k) = (t0..self.targets[i].len()).find(|&k| ctl.rem[self.targets[i][k]] <= 1) {
                    return Phase::Send { neuron: i, target: k };
                }
            }
            t0 = 0;
        }
        Phase::Close
    }

    fn bump(&self, ctl: &mut Control, neuron: usize) {
        for (r, a) in self.automata[neuron].iter().enumerate() {
            ctl.tracks[neuron][r] = a.plus(ctl.tracks[neuron][r]);
        }
    }

    fn finish_consume(&self, mut ctl: Control, neuron: usize, rule: usize) -> Control {
        let spec = &self.system.neurons[neuron].rules[rule];
        if !spec.is_forgetting() {
            ctl.rem[neuron] = spec.delay;
        }
        ctl.phase = self.select_from(&ctl, neuron + 1);
        ctl
    }

    /// Continues after a `-s` update with `pending` ambiguous automata.
    fn after_decrement(&self, mut ctl: Control, neuron: usize, rule: usize, left: u64, pending: Vec<usize>) -> Control {
        match pending.first() {
            Some(&a) => {
                let down = self.automata[neuron][a].x() - 2;
                ctl.phase = Phase::Probe { neuron, rule, left, pending, down, up: None };
                ctl
            }
            None if left == 0 => self.finish_consume(ctl, neuron, rule),
            None => {
                ctl.phase = Phase::Consume { neuron, rule, left };
                ctl
            }
        }
    }

    fn entries(&self, ctl: &Control) -> Vec<Entry2> {
        if let Some(hit) = self.memo.borrow().get(ctl) {
            return hit.clone();
        }
        let made = self.make_entries(ctl);
        self.memo.borrow_mut().insert(ctl.clone(), made.clone());
        made
    }

    fn make_entries(&self, ctl: &Control) -> Vec<Entry2> {
        let m = self.neurons();
        let any = |test: Test, next: Control, op: Op| Entry2 { read: Read::Any, test, advance: false, next, op };
        match &ctl.phase {
            Phase::Halt => Vec::new(),
            Phase::Prologue { neuron, left } => {
                let mut next = ctl.clone();
                next.phase = if *left > 1 {
                    Phase::Prologue { neuron: *neuron, left: left - 1 }
                } else {
                    self.prologue_from(neuron + 1)
                };
                vec![any(Test::Any, next, Op::Inc(*neuron))]
            }
            Phase::Read => {
                let mut quiet = ctl.clone();
                quiet.phase = self.select_from(&quiet, 0);
                let mut spike = ctl.clone();
                let op = match self.system.input {
                    Some(i) if ctl.rem[i] <= 1 => {
                        self.bump(&mut spike, i);
                        Op::Inc(i)
                    }
                    _ => Op::Null,
                };
                spike.phase = self.select_from(&spike, 0);
                vec![
                    Entry2 { read: Read::Sym('1'), test: Test::Any, advance: true, next: spike, op },
                    Entry2 { read: Read::Sym('0'), test: Test::Any, advance: true, next: quiet.clone(), op: Op::Null },
                    Entry2 { read: Read::End, test: Test::Any, advance: false, next: quiet, op: Op::Null },
                ]
            }
            Phase::Select { neuron } => self
                .applicable(ctl, *neuron)
                .into_iter()
                .map(|rule| {
                    let mut next = ctl.clone();
                    next.phase = Phase::Consume { neuron: *neuron, rule, left: self.system.neurons[*neuron].rules[rule].consume };
                    any(Test::Any, next, Op::Null)
                })
                .collect(),
            Phase::Consume { neuron, rule, left } => {
                let i = *neuron;
                // Materialization ignores counters and can pair tracker states
                // that no run produces; such states get no moves.
                if ctl.tracks[i].contains(&1) {
                    return Vec::new();
                }
                let mut next = ctl.clone();
                let mut pending = Vec::new();
                for (r, a) in self.automata[i].iter().enumerate() {
                    match a.minus(ctl.tracks[i][r]) {
                        Minus::To(k) => next.tracks[i][r] = k,
                        Minus::Either { .. } => pending.push(r),
                    }
                }
                let next = self.after_decrement(next, i, *rule, left - 1, pending);
                vec![any(Test::Pos(i), next, Op::Dec(i))]
            }
            Phase::Probe { neuron, rule, left, pending, down, up } => {
                let i = *neuron;
                let a = &self.automata[i][pending[0]];
                let with_phase = |phase: Phase| {
                    let mut next = ctl.clone();
                    next.phase = phase;
                    next
                };
                match up {
                    None if *down > 0 => {
                        let next = with_phase(Phase::Probe {
                            neuron: i,
                            rule: *rule,
                            left: *left,
                            pending: pending.clone(),
                            down: down - 1,
                            up: None,
                        });
                        vec![any(Test::Pos(i), next, Op::Dec(i))]
                    }
                    None => {
                        let Minus::Either { exact, wrap } = a.minus(a.x()) else { unreachable!() };
                        [(Test::Zero(i), exact), (Test::Pos(i), wrap)]
                            .into_iter()
                            .map(|(test, state)| {
                                let mut next = ctl.clone();
                                next.tracks[i][pending[0]] = state;
                                let restore = a.x() - 2;
                                let next = if restore > 0 {
                                    next.phase = Phase::Probe {
                                        neuron: i,
                                        rule: *rule,
                                        left: *left,
                                        pending: pending.clone(),
                                        down: 0,
                                        up: Some(restore),
                                    };
                                    next
                                } else {
                                    self.after_decrement(next, i, *rule, *left, pending[1..].to_vec())
                                };
                                any(test, next, Op::Null)
                            })
                            .collect()
                    }
                    Some(u) => {
                        let next = if *u > 1 {
                            with_phase(Phase::Probe {
                                neuron: i,
                                rule: *rule,
                                left: *left,
                                pending: pending.clone(),
                                down: 0,
                                up: Some(u - 1),
                            })
                        } else {
                            self.after_decrement(ctl.clone(), i, *rule, *left, pending[1..].to_vec())
                        };
                        vec![any(Test::Any, next, Op::Inc(i))]
                    }
                }
            }
            Phase::Send { neuron, target } => {
                let j = self.targets[*neuron][*target];
                let mut next = ctl.clone();
                self.bump(&mut next, j);
                next.phase = self.send_from(&next, *neuron, target + 1);
                vec![any(Test::Any, next, Op::Inc(j))]
            }
            Phase::Close => {
                let mut next = ctl.clone();
                let out_fired = self.system.output.map_or(false, |o| ctl.rem[o] == 1);
                for r in next.rem.iter_mut() {
                    *r = r.saturating_sub(1);
                }
                next.phase = Phase::Read;
                let op = if out_fired && ctl.fired {
                    next.phase = Phase::Halt;
                    Op::Null
                } else if out_fired || ctl.fired {
                    next.fired = true;
                    Op::Inc(m)
                } else {
                    Op::Null
                };
                vec![any(Test::Any, next, op)]
            }
        }
    }

    /// Builds the explicit table of every control state reachable from the
    /// start, numbering states in discovery order.
    pub fn materialize(&self, cap: usize) -> Result<CmSpec, TranslateError> {
        let start = self.initial();
        let mut ids: HashMap<Control, u32> = HashMap::new();
        let mut queue = VecDeque::new();
        ids.insert(start.clone(), 1);
        queue.push_back(start);
        let mut rows = Vec::new();
        // Halting controls differ only in bookkeeping, so they share one state.
        let mut halt = None;
        while let Some(ctl) = queue.pop_front() {
            let id = ids[&ctl];
            for e in self.entries(&ctl) {
                let known = if e.next.phase == Phase::Halt { halt } else { ids.get(&e.next).copied() };
                let next_id = match known {
                    Some(n) => n,
                    None => {
                        if ids.len() >= cap {
                            return Err(TranslateError::TooManyStates(cap));
                        }
                        let n = ids.len() as u32 + 1;
                        ids.insert(e.next.clone(), n);
                        if e.next.phase == Phase::Halt {
                            halt = Some(n);
                        } else {
                            queue.push_back(e.next.clone());
                        }
                        n
                    }
                };
                rows.push(Entry { read: e.read, state: id, test: e.test, advance: e.advance, next: next_id, op: e.op });
            }
        }
        let states = ids.len() as u32 + u32::from(halt.is_none());
        Ok(CmSpec {
            counters: self.neurons() + 1,
            output: self.neurons(),
            states,
            initial: 1,
            halt: halt.unwrap_or(states),
            alphabet: vec!['0', '1'],
            entries: rows,
        })
    }
}

impl Program for Translation {
    type State = Control;

    fn counters(&self) -> usize {
        self.neurons() + 1
    }

    fn initial(&self) -> Control {
        let tracks = self
            .automata
            .iter()
            .zip(&self.system.neurons)
            .map(|(rules, n)| {
                let count = n.initial.to_u64().expect("initial marking fits in u64");
                rules.iter().map(|a| a.start(count)).collect()
            })
            .collect();
        let mut ctl = Control { tracks, rem: vec![0; self.neurons()], fired: false, phase: Phase::Read };
        ctl.phase = self.prologue_from(0);
        ctl
    }

    fn is_halt(&self, state: &Control) -> bool {
        state.phase == Phase::Halt
    }

    fn moves(&self, state: &Control, current: Option<char>, counters: &[BigUint]) -> Vec<Move<Control>> {
        self.entries(state)
            .into_iter()
            .filter(|e| e.read.matches(current) && e.test.holds(counters))
            .map(|e| Move { advance: e.advance, next: e.next, op: e.op })
            .collect()
    }

    fn output(&self) -> usize {
        self.neurons()
    }
}

/// Spike train for a binary input word: bit `t` arrives at time `t`.
pub fn schedule_for(word: &[char]) -> Result<InputSchedule, TranslateError> {
    let mut train = Vec::with_capacity(word.len());
    for &c in word {
        match c {
            '0' => train.push(0u32),
            '1' => train.push(1u32),
            other => return Err(TranslateError::Input(format!("input symbol {:?} is not a bit", other))),
        }
    }
    Ok(InputSchedule::from_train(&train))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub t: u64,
    pub counters: Vec<BigUint>,
    pub contents: Vec<BigUint>,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// Simulated timesteps whose counters were compared.
    pub timesteps: u64,
    pub divergence: Option<Divergence>,
    pub snp_output: Option<BigUint>,
    pub cm_output: Option<BigUint>,
    /// CM steps spent on each simulated timestep, prologue excluded.
    pub steps_per_timestep: Vec<u64>,
    pub prologue_steps: u64,
    pub cm_steps: u64,
    pub x_r: u64,
    pub neurons: usize,
    pub states_seen: usize,
    /// Largest counter sum observed.
    pub cm_space: BigUint,
    /// Final value of the result counter, halted or not.
    pub gap_counter: BigUint,
    pub snp_space: BigUint,
    pub cm_halted: bool,
    pub snp_halt: HaltReason,
}

impl Comparison {
    pub fn ok(&self) -> bool {
        self.divergence.is_none()
            && self.snp_output == self.cm_output
            && self.cm_space <= &self.snp_space + &self.gap_counter
    }

    pub fn max_steps_per_timestep(&self) -> u64 {
        self.steps_per_timestep.iter().copied().max().unwrap_or(0)
    }
}

/// Runs the system and its translation side by side for up to `max_t`
/// timesteps under `policy` (`First` or `Strict` keep both sides in step).
pub fn compare(
    tr: &Translation,
    word: &[char],
    max_t: u64,
    policy: Policy,
    cap: usize,
) -> Result<Comparison, TranslateError> {
    let schedule = schedule_for(word)?;
    let trace = run(&tr.system, &schedule, policy, max_t);
    let snp_output = (trace.output_events.len() >= 2).then(|| BigUint::from(trace.output_events[1].0 - trace.output_events[0].0));

    let mut config = crate::cm::initial_config(tr);
    let mut selector = Selector::new(policy);
    let mut steps_per_timestep = Vec::new();
    let mut divergence = None;
    let mut prologue_steps = 0;
    let mut mark = 0;
    let mut space = BigUint::zero();
    let mut t = 0u64;
    loop {
        if tr.states_seen() > cap {
            return Err(TranslateError::TooManyStates(cap));
        }
        if tr.is_halt(&config.state) {
            break;
        }
        let at_read = config.state.phase == Phase::Read;
        if at_read {
            if t == 0 {
                prologue_steps = config.steps;
            } else {
                steps_per_timestep.push(config.steps - mark);
            }
            if t >= max_t {
                break;
            }
            mark = config.steps;
            t += 1;
        }
        crate::cm::cm_step(tr, &mut config, word, &mut selector).map_err(|e| TranslateError::Input(e.to_string()))?;
        space = space.max(config.counters.iter().sum());
        if at_read && divergence.is_none() {
            let counters = config.counters[..tr.neurons()].to_vec();
            match trace.contents_at(t) {
                Some(contents) if contents == counters.as_slice() => {}
                Some(contents) => divergence = Some(Divergence { t, counters, contents: contents.to_vec() }),
                None if matches!(trace.halt_reason, HaltReason::Quiescent) => {
                    let contents = trace.final_config.contents();
                    if contents != counters {
                        divergence = Some(Divergence { t, counters, contents });
                    }
                }
                None => {}
            }
        }
    }
    if tr.is_halt(&config.state) {
        steps_per_timestep.push(config.steps - mark);
    }
    let cm_halted = tr.is_halt(&config.state);
    Ok(Comparison {
        timesteps: t,
        divergence,
        snp_output,
        cm_output: cm_halted.then(|| config.counters[tr.neurons()].clone()),
        steps_per_timestep,
        prologue_steps,
        cm_steps: config.steps,
        x_r: tr.x_r(),
        neurons: tr.neurons(),
        states_seen: tr.states_seen(),
        cm_space: space,
        gap_counter: config.counters[tr.neurons()].clone(),
        snp_space: trace.space_used(),
        cm_halted,
        snp_halt: trace.halt_reason,
    })
}

/// Every result the machine can produce on `word`, exploring all choices.
pub fn reachable_outputs(tr: &Translation, word: &[char], max_steps: u64) -> HashSet<BigUint> {
    let mut out = HashSet::new();
    let mut seen = HashSet::new();
    let start = crate::cm::initial_config(tr);
    let mut queue = VecDeque::from([start]);
    while let Some(config) = queue.pop_front() {
        if tr.is_halt(&config.state) {
            out.insert(config.counters[tr.neurons()].clone());
            continue;
        }
        if config.steps >= max_steps || !seen.insert((config.state.clone(), config.counters.clone(), config.head)) {
            continue;
        }
        let current = word.get(config.head).copied();
        for mv in tr.moves(&config.state, current, &config.counters) {
            let mut next = config.clone();
            match mv.op {
                Op::Inc(h) => next.counters[h] += 1u32,
                Op::Dec(h) => next.counters[h] -= 1u32,
                Op::Null => {}
            }
            next.head += usize::from(mv.advance);
            next.state = mv.next;
            next.steps += 1;
            queue.push_back(next);
        }
    }
    out
}

//! Discrete-time simulation of spiking neural P systems.
//!
//! One global timestep `t` runs three phases in a fixed order:
//!
//! 1. spikes scheduled by the environment for `t` enter the input neuron,
//!    unless it is closed;
//! 2. every idle neuron with an applicable rule picks one and consumes its
//!    spikes; a spiking rule with delay `d` fires at `t + d - 1` and keeps the
//!    neuron closed for the sending times `t ..= t + d - 2`;
//! 3. every neuron whose firing time is `t` sends its pending emission along
//!    each outgoing synapse. Spikes reach a receiver (visible at `t + 1`)
//!    only if it is open at `t`. Emissions of the output neuron are logged as
//!    environment output.
//!
//! Spike counts are arbitrary precision throughout.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::unary::{EventuallyPeriodicSet, UnaryExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Standard,
    Extended,
    Exhaustive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Extended => "extended",
            Mode::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputConvention {
    /// Result is the time between the first two firings of the output neuron.
    SpikeGap,
    /// Result is the spike count of the first output emission.
    EmissionEvents,
}

/// `E / s^b -> s^p ; d`. A rule with `emit == 0` is a forgetting rule and has
/// delay 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    pub expr: UnaryExpr,
    pub guard: EventuallyPeriodicSet,
    pub consume: u64,
    pub emit: u64,
    pub delay: u32,
    /// Free-form provenance, printed as a comment.
    pub note: Option<String>,
}

impl RuleSpec {
    pub fn spiking(expr: UnaryExpr, consume: u64, emit: u64, delay: u32) -> Self {
        let guard = expr.denote();
        RuleSpec { expr, guard, consume, emit, delay, note: None }
    }

    pub fn forgetting(expr: UnaryExpr, consume: u64) -> Self {
        let guard = expr.denote();
        RuleSpec { expr, guard, consume, emit: 0, delay: 0, note: None }
    }

    /// Standard-mode forgetting rule `s^e -> λ`.
    pub fn forget_exactly(e: u64) -> Self {
        Self::forgetting(UnaryExpr::pow(e), e)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_forgetting(&self) -> bool {
        self.emit == 0
    }

    /// Guard holds and there are at least `consume` spikes.
    pub fn applicable(&self, content: &BigUint) -> bool {
        *content >= BigUint::from(self.consume) && self.guard.member(content)
    }

    /// Same rule ignoring the provenance note.
    pub fn same_action(&self, other: &RuleSpec) -> bool {
        self.guard == other.guard
            && self.consume == other.consume
            && self.emit == other.emit
            && self.delay == other.delay
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/s^{} -> ", self.expr, self.consume)?;
        if self.is_forgetting() {
            write!(f, "λ")
        } else {
            write!(f, "s^{};{}", self.emit, self.delay)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Neuron {
    pub rules: Vec<RuleSpec>,
    pub initial: BigUint,
}

impl Neuron {
    pub fn new(initial: impl Into<BigUint>) -> Self {
        Neuron { rules: Vec::new(), initial: initial.into() }
    }

    pub fn with_rule(mut self, rule: RuleSpec) -> Self {
        self.rules.push(rule);
        self
    }

    /// Adds `rule` unless an identical action is already present.
    pub fn push_unique(&mut self, rule: RuleSpec) {
        if !self.rules.iter().any(|r| r.same_action(&rule)) {
            self.rules.push(rule);
        }
    }
}

/// Static description of a system. Neuron ids are 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnpSystem {
    pub name: String,
    pub mode: Mode,
    pub convention: OutputConvention,
    pub neurons: Vec<Neuron>,
    pub synapses: BTreeSet<(usize, usize)>,
    pub input: Option<usize>,
    pub output: Option<usize>,
}

impl SnpSystem {
    pub fn new(name: impl Into<String>, mode: Mode, convention: OutputConvention) -> Self {
        SnpSystem {
            name: name.into(),
            mode,
            convention,
            neurons: Vec::new(),
            synapses: BTreeSet::new(),
            input: None,
            output: None,
        }
    }

    pub fn add_neuron(&mut self, neuron: Neuron) -> usize {
        self.neurons.push(neuron);
        self.neurons.len() - 1
    }

    pub fn connect(&mut self, from: usize, to: usize) {
        self.synapses.insert((from, to));
    }

    pub fn targets(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        self.synapses.range((from, 0)..(from + 1, 0)).map(|&(_, to)| to)
    }

    pub fn initial_config(&self) -> SnpConfig {
        SnpConfig {
            time: 1,
            neurons: self
                .neurons
                .iter()
                .map(|n| NeuronState { content: n.initial.clone(), busy: None })
                .collect(),
        }
    }

    pub fn rule_count(&self) -> usize {
        self.neurons.iter().map(|n| n.rules.len()).sum()
    }
}

/// Checks the structural invariants and returns one line per violation.
pub fn validate(system: &SnpSystem) -> Vec<String> {
    let mut out = Vec::new();
    let m = system.neurons.len();
    for &(i, j) in &system.synapses {
        if i == j {
            out.push(format!("synapse ({},{}) is a self loop", i + 1, j + 1));
        }
        if i >= m || j >= m {
            out.push(format!("synapse ({},{}) names a missing neuron", i + 1, j + 1));
        }
    }
    for (label, id) in [("input", system.input), ("output", system.output)] {
        if let Some(id) = id.filter(|&id| id >= m) {
            out.push(format!("{} neuron {} does not exist", label, id + 1));
        }
    }
    for (i, neuron) in system.neurons.iter().enumerate() {
        for (k, rule) in neuron.rules.iter().enumerate() {
            let at = format!("neuron {} rule {}", i + 1, k + 1);
            if rule.consume == 0 {
                out.push(format!("{}: must consume at least one spike", at));
            }
            if rule.is_forgetting() {
                if rule.delay != 0 {
                    out.push(format!("{}: forgetting rules have delay 0", at));
                }
            } else if rule.delay == 0 {
                out.push(format!("{}: spiking rules need delay >= 1", at));
            }
            match system.mode {
                Mode::Standard => {
                    if !rule.is_forgetting() && rule.emit != 1 {
                        out.push(format!("{}: standard rules emit exactly one spike", at));
                    }
                    if rule.is_forgetting() && rule.guard != EventuallyPeriodicSet::singleton(rule.consume) {
                        out.push(format!("{}: standard forgetting rules have the form s^e -> λ", at));
                    }
                }
                Mode::Exhaustive => {}
                Mode::Extended => {
                    if rule.emit > rule.consume {
                        out.push(format!("{}: emits more spikes than it consumes", at));
                    }
                }
            }
        }
        if system.mode == Mode::Standard {
            for forget in neuron.rules.iter().filter(|r| r.is_forgetting()) {
                let e = forget.consume;
                for (k, fire) in neuron.rules.iter().enumerate().filter(|(_, r)| !r.is_forgetting()) {
                    if fire.guard.contains(e) {
                        out.push(format!(
                            "neuron {}: forgetting count {} is accepted by spiking rule {} ({})",
                            i + 1,
                            e,
                            k + 1,
                            fire.expr
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Smallest spike count at which both rules are applicable, if any.
pub fn rule_overlap(a: &RuleSpec, b: &RuleSpec) -> Option<u64> {
    let lo = a.consume.max(b.consume);
    let period = a.guard.period().lcm(&b.guard.period());
    let hi = lo.max(a.guard.threshold()).max(b.guard.threshold()) + period;
    (lo..hi).find(|&k| a.guard.contains(k) && b.guard.contains(k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub neuron: usize,
    pub rules: (usize, usize),
    pub witness: u64,
}

/// Pairs of rules in one neuron that can be applicable together. Empty means
/// the strict policy can never fail, whatever the input.
pub fn overlap_report(system: &SnpSystem) -> Vec<Overlap> {
    let mut out = Vec::new();
    for (i, neuron) in system.neurons.iter().enumerate() {
        for (a, ra) in neuron.rules.iter().enumerate() {
            for (b, rb) in neuron.rules.iter().enumerate().skip(a + 1) {
                if let Some(witness) = rule_overlap(ra, rb) {
                    out.push(Overlap { neuron: i, rules: (a, b), witness });
                }
            }
        }
    }
    out
}

/// Indices of the rules of `neuron` that may fire with `content` spikes.
pub fn applicable_rules(neuron: &Neuron, content: &BigUint, _mode: Mode) -> Vec<usize> {
    neuron
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.applicable(content))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Busy {
    pub rule: usize,
    pub fire_at: u64,
    pub emission: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeuronState {
    pub content: BigUint,
    pub busy: Option<Busy>,
}

impl NeuronState {
    /// Closed neurons drop every spike sent to them at time `t`.
    pub fn closed_at(&self, t: u64) -> bool {
        self.busy.as_ref().map_or(false, |b| b.fire_at > t)
    }
}

/// Dynamic state: `time` is the next timestep to execute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnpConfig {
    pub time: u64,
    pub neurons: Vec<NeuronState>,
}

impl SnpConfig {
    pub fn content(&self, neuron: usize) -> &BigUint {
        &self.neurons[neuron].content
    }

    pub fn contents(&self) -> Vec<BigUint> {
        self.neurons.iter().map(|n| n.content.clone()).collect()
    }

    /// Spikes held or pending in the whole system.
    pub fn total_spikes(&self) -> BigUint {
        self.neurons
            .iter()
            .map(|n| &n.content + n.busy.as_ref().map_or_else(BigUint::zero, |b| b.emission.clone()))
            .sum()
    }
}

/// Spikes delivered by the environment, keyed by timestep (absent = 0).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputSchedule {
    deliveries: BTreeMap<u64, BigUint>,
}

impl InputSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, N>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (u64, N)>,
        N: Into<BigUint>,
    {
        let mut s = Self::new();
        for (t, n) in pairs {
            s.set(t, n.into());
        }
        s
    }

    /// A spike train: position `i` of `counts` is delivered at `t = i + 1`.
    pub fn from_train<N: Into<BigUint> + Clone>(counts: &[N]) -> Self {
        Self::from_pairs(counts.iter().cloned().enumerate().map(|(i, n)| (i as u64 + 1, n)))
    }

    pub fn set(&mut self, t: u64, count: BigUint) {
        if count.is_zero() {
            self.deliveries.remove(&t);
        } else {
            self.deliveries.insert(t, count);
        }
    }

    pub fn at(&self, t: u64) -> BigUint {
        self.deliveries.get(&t).cloned().unwrap_or_default()
    }

    pub fn last_time(&self) -> u64 {
        self.deliveries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, &BigUint)> {
        self.deliveries.iter().map(|(t, n)| (*t, n))
    }

    /// Parses lines `t count`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut s = Self::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (t, n) = match (parts.next(), parts.next(), parts.next()) {
                (Some(t), Some(n), None) => (t, n),
                _ => return Err(format!("line {}: expected `t count`", no + 1)),
            };
            let t: u64 = t.parse().map_err(|_| format!("line {}: bad timestep `{}`", no + 1, t))?;
            if t == 0 {
                return Err(format!("line {}: timesteps start at 1", no + 1));
            }
            let n: BigUint = n.parse().map_err(|_| format!("line {}: bad spike count `{}`", no + 1, n))?;
            s.set(t, n);
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        self.deliveries.iter().map(|(t, n)| format!("{} {}\n", t, n)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    First,
    Seeded(u64),
    Strict,
}

/// Resolves the choice between several applicable rules.
pub struct Selector {
    policy: Policy,
    rng: Option<ChaCha8Rng>,
}

impl Selector {
    pub fn new(policy: Policy) -> Self {
        let rng = match policy {
            Policy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Selector { policy, rng }
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn select(&mut self, candidates: &[usize]) -> Result<usize, Vec<usize>> {
        assert!(!candidates.is_empty());
        match self.policy {
            Policy::First => Ok(candidates[0]),
            Policy::Seeded(_) => {
                let rng = self.rng.as_mut().unwrap();
                Ok(candidates[rng.gen_range(0..candidates.len())])
            }
            Policy::Strict if candidates.len() == 1 => Ok(candidates[0]),
            Policy::Strict => Err(candidates.to_vec()),
        }
    }
}

pub fn select_rule(policy: Policy, candidates: &[usize]) -> Result<usize, EngineError> {
    Selector::new(policy).select(candidates).map_err(|candidates| EngineError::StrictViolation {
        time: 0,
        neuron: 0,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("strict policy: neuron {} has applicable rules {candidates:?} at t={time}", neuron + 1)]
    StrictViolation { time: u64, neuron: usize, candidates: Vec<usize> },
    #[error("{0}")]
    Output(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub neuron: usize,
    pub rule: usize,
    #[serde(serialize_with = "ser_big")]
    pub groups: BigUint,
}

/// What happened during one timestep.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct StepRecord {
    pub t: u64,
    /// Contents after environment delivery, before rules fire.
    #[serde(serialize_with = "ser_big_vec")]
    pub contents: Vec<BigUint>,
    pub selections: Vec<Selection>,
    #[serde(serialize_with = "ser_firings")]
    pub firings: Vec<(usize, BigUint)>,
    #[serde(serialize_with = "ser_opt_big")]
    pub output: Option<BigUint>,
    /// Environment spikes that hit a closed input neuron.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_big")]
    pub dropped_input: Option<BigUint>,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|n| n.to_string()))
}

fn ser_opt_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_some(&n.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_firings<S: serde::Serializer>(v: &[(usize, BigUint)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(i, n)| (*i, n.to_string())))
}

/// Executes timestep `config.time` and advances the clock.
pub fn step(
    system: &SnpSystem,
    config: &mut SnpConfig,
    schedule: &InputSchedule,
    selector: &mut Selector,
) -> Result<StepRecord, EngineError> {
    let t = config.time;
    let mut record = StepRecord { t, ..Default::default() };

    // phase 1: environment
    if let Some(input) = system.input {
        let arriving = schedule.at(t);
        if !arriving.is_zero() {
            let state = &mut config.neurons[input];
            if state.closed_at(t) {
                record.dropped_input = Some(arriving);
            } else {
                state.content += arriving;
            }
        }
    }
    record.contents = config.contents();

    // phase 2: rule application in idle neurons
    for (i, neuron) in system.neurons.iter().enumerate() {
        let state = &mut config.neurons[i];
        if state.busy.is_some() {
            continue;
        }
        let candidates = applicable_rules(neuron, &state.content, system.mode);
        if candidates.is_empty() {
            continue;
        }
        let chosen = selector.select(&candidates).map_err(|candidates| EngineError::StrictViolation {
            time: t,
            neuron: i,
            candidates,
        })?;
        let rule = &neuron.rules[chosen];
        let consume = BigUint::from(rule.consume);
        let groups = match system.mode {
            Mode::Exhaustive => state.content.div_floor(&consume),
            Mode::Standard | Mode::Extended => BigUint::one(),
        };
        state.content -= &consume * &groups;
        if !rule.is_forgetting() {
            state.busy = Some(Busy {
                rule: chosen,
                fire_at: t + u64::from(rule.delay) - 1,
                emission: &groups * rule.emit,
            });
        }
        record.selections.push(Selection { neuron: i, rule: chosen, groups });
    }

    // phase 3: firing
    let mut deliveries: Vec<(usize, BigUint)> = Vec::new();
    for i in 0..system.neurons.len() {
        let fires = matches!(&config.neurons[i].busy, Some(b) if b.fire_at == t);
        if !fires {
            continue;
        }
        let busy = config.neurons[i].busy.take().unwrap();
        for j in system.targets(i) {
            if !config.neurons[j].closed_at(t) {
                deliveries.push((j, busy.emission.clone()));
            }
        }
        if system.output == Some(i) {
            record.output = Some(busy.emission.clone());
        }
        record.firings.push((i, busy.emission));
    }
    for (j, n) in deliveries {
        config.neurons[j].content += n;
    }
    config.time += 1;
    Ok(record)
}

/// True when nothing can happen any more from `config` on.
pub fn is_quiescent(system: &SnpSystem, config: &SnpConfig, schedule: &InputSchedule) -> bool {
    config.time > schedule.last_time()
        && config.neurons.iter().zip(&system.neurons).all(|(state, neuron)| {
            state.busy.is_none() && applicable_rules(neuron, &state.content, system.mode).is_empty()
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HaltReason {
    /// No applicable rule, no closed neuron and no pending input at `time`.
    Quiescent,
    MaxSteps,
    StrictViolation { time: u64, neuron: usize, candidates: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<StepRecord>,
    pub output_events: Vec<(u64, BigUint)>,
    pub halt_reason: HaltReason,
    /// The timestep at which the run stopped (not executed).
    pub final_time: u64,
    pub final_config: SnpConfig,
    pub peak_spikes: BigUint,
}

impl Trace {
    /// Maximum over all timesteps of the spikes held or pending anywhere.
    pub fn space_used(&self) -> BigUint {
        self.peak_spikes.clone()
    }

    /// Contents at the start of each executed step, after environment input.
    pub fn snapshots(&self) -> impl Iterator<Item = (u64, &[BigUint])> {
        self.records.iter().map(|r| (r.t, r.contents.as_slice()))
    }

    pub fn contents_at(&self, t: u64) -> Option<&[BigUint]> {
        self.records.iter().find(|r| r.t == t).map(|r| r.contents.as_slice())
    }
}

/// Steps until quiescence, a strict-policy violation or `max_steps`.
pub fn run(system: &SnpSystem, schedule: &InputSchedule, policy: Policy, max_steps: u64) -> Trace {
    run_with_sink(system, schedule, policy, max_steps, None::<&mut std::io::Sink>)
        .expect("no sink, no io errors")
}

/// Like [`run`], also writing every step as one JSON line to `sink`.
pub fn run_with_sink<W: Write>(
    system: &SnpSystem,
    schedule: &InputSchedule,
    policy: Policy,
    max_steps: u64,
    mut sink: Option<&mut W>,
) -> std::io::Result<Trace> {
    let mut config = system.initial_config();
    let mut selector = Selector::new(policy);
    let mut records = Vec::new();
    let mut output_events = Vec::new();
    let mut peak = config.total_spikes();
    let halt_reason = loop {
        if is_quiescent(system, &config, schedule) {
            break HaltReason::Quiescent;
        }
        if records.len() as u64 >= max_steps {
            break HaltReason::MaxSteps;
        }
        match step(system, &mut config, schedule, &mut selector) {
            Ok(record) => {
                let held: BigUint = record.contents.iter().sum::<BigUint>()
                    + config.neurons.iter().filter_map(|n| n.busy.as_ref()).map(|b| &b.emission).sum::<BigUint>();
                peak = peak.max(held).max(config.total_spikes());
                if let Some(out) = &record.output {
                    output_events.push((record.t, out.clone()));
                }
                if let Some(w) = sink.as_deref_mut() {
                    serde_json::to_writer(&mut *w, &record)?;
                    writeln!(w)?;
                }
                records.push(record);
            }
            Err(EngineError::StrictViolation { time, neuron, candidates }) => {
                break HaltReason::StrictViolation { time, neuron, candidates };
            }
            Err(e) => unreachable!("{}", e),
        }
    };
    Ok(Trace { records, output_events, halt_reason, final_time: config.time, final_config: config, peak_spikes: peak })
}

pub fn output_value(trace: &Trace, convention: OutputConvention) -> Result<BigUint, EngineError> {
    match convention {
        OutputConvention::SpikeGap => match trace.output_events.as_slice() {
            [(t1, _), (t2, _), ..] => Ok(BigUint::from(t2 - t1)),
            events => Err(EngineError::Output(format!(
                "spike-gap output needs two output firings, got {}",
                events.len()
            ))),
        },
        OutputConvention::EmissionEvents => trace
            .output_events
            .first()
            .map(|(_, n)| n.clone())
            .ok_or_else(|| EngineError::Output("no output emission".into())),
    }
}

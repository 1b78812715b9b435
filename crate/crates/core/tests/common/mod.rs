//! Independent reference implementations and random generators shared by the
//! integration tests. Nothing here calls the library's own evaluators: guards
//! are decided by a Thompson NFA, SN P runs by a plain branching executor and
//! Turing machines by list-based tapes.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snp_workbench::engine::{Mode, Neuron, OutputConvention, RuleSpec, SnpSystem};
use snp_workbench::turing::{Dir, TuringMachine};
use snp_workbench::unary::UnaryExpr;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- NFA oracle

/// Thompson automaton over the single letter `s`.
pub struct Nfa {
    eps: Vec<Vec<usize>>,
    step: Vec<Vec<usize>>,
    start: usize,
    accept: usize,
}

impl Nfa {
    pub fn new(expr: &UnaryExpr) -> Self {
        let mut nfa = Nfa { eps: Vec::new(), step: Vec::new(), start: 0, accept: 0 };
        let (s, a) = nfa.build(expr);
        nfa.start = s;
        nfa.accept = a;
        nfa
    }

    fn node(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.step.push(Vec::new());
        self.eps.len() - 1
    }

    fn chain(&mut self, from: usize, len: u64) -> usize {
        let mut at = from;
        for _ in 0..len {
            let next = self.node();
            self.step[at].push(next);
            at = next;
        }
        at
    }

    fn build(&mut self, expr: &UnaryExpr) -> (usize, usize) {
        match expr {
            UnaryExpr::Pow(n) => {
                let s = self.node();
                let a = self.chain(s, *n);
                (s, a)
            }
            UnaryExpr::Star(p) => {
                let s = self.node();
                let end = self.chain(s, *p);
                self.eps[end].push(s);
                (s, s)
            }
            UnaryExpr::Concat(parts) => {
                let s = self.node();
                let mut at = s;
                for part in parts {
                    let (ps, pa) = self.build(part);
                    self.eps[at].push(ps);
                    at = pa;
                }
                (s, at)
            }
            UnaryExpr::Union(parts) => {
                let s = self.node();
                let a = self.node();
                for part in parts {
                    let (ps, pa) = self.build(part);
                    self.eps[s].push(ps);
                    self.eps[pa].push(a);
                }
                (s, a)
            }
        }
    }

    fn close(&self, set: &mut Vec<bool>) {
        let mut stack: Vec<usize> = (0..set.len()).filter(|&i| set[i]).collect();
        while let Some(n) = stack.pop() {
            for &m in &self.eps[n] {
                if !set[m] {
                    set[m] = true;
                    stack.push(m);
                }
            }
        }
    }

    /// `table[k]` is true iff `s^k` is accepted, for `k <= max`.
    pub fn table(&self, max: u64) -> Vec<bool> {
        let mut cur = vec![false; self.eps.len()];
        cur[self.start] = true;
        self.close(&mut cur);
        let mut out = Vec::with_capacity(max as usize + 1);
        for _ in 0..=max {
            out.push(cur[self.accept]);
            let mut next = vec![false; cur.len()];
            for (n, on) in cur.iter().enumerate() {
                if *on {
                    for &m in &self.step[n] {
                        next[m] = true;
                    }
                }
            }
            self.close(&mut next);
            cur = next;
        }
        out
    }
}

// ------------------------------------------------------ random expressions

pub fn random_atom(r: &mut impl Rng) -> UnaryExpr {
    if r.gen_bool(0.5) {
        UnaryExpr::pow(r.gen_range(1..=9))
    } else {
        UnaryExpr::star(r.gen_range(1..=7))
    }
}

/// Union of concatenations of atoms: exactly the shapes the text syntax has.
pub fn random_flat_expr(r: &mut impl Rng) -> UnaryExpr {
    let branches = r.gen_range(1..=3);
    UnaryExpr::union(
        (0..branches).map(|_| UnaryExpr::concat((0..r.gen_range(1..=3)).map(|_| random_atom(r)).collect())).collect(),
    )
}

/// Arbitrarily nested expression trees.
pub fn random_tree_expr(r: &mut impl Rng, depth: u32) -> UnaryExpr {
    if depth == 0 || r.gen_bool(0.35) {
        return random_atom(r);
    }
    let parts = (0..r.gen_range(2..=3)).map(|_| random_tree_expr(r, depth - 1)).collect();
    if r.gen_bool(0.5) {
        UnaryExpr::Concat(parts)
    } else {
        UnaryExpr::Union(parts)
    }
}

// --------------------------------------------------- branching SN P oracle

/// One branch of a nondeterministic run; contents fit in `u64` at test sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RefState {
    pub contents: Vec<u64>,
    /// `(fire_at, emission)` of neurons waiting to fire.
    pub busy: Vec<Option<(u64, u64)>>,
    pub first_output: Option<u64>,
}

pub struct RefSystem {
    pub mode: Mode,
    /// Per neuron, per rule: membership table, consume, emit, delay.
    pub rules: Vec<Vec<(Vec<bool>, u64, u64, u64)>>,
    pub synapses: Vec<(usize, usize)>,
    pub input: Option<usize>,
    pub output: Option<usize>,
    pub initial: Vec<u64>,
    limit: u64,
}

impl RefSystem {
    /// Guards are tabulated up to `limit` spikes; larger contents panic.
    pub fn new(sys: &SnpSystem, limit: u64) -> Self {
        let rules = sys
            .neurons
            .iter()
            .map(|n| {
                n.rules.iter().map(|r| (Nfa::new(&r.expr).table(limit), r.consume, r.emit, u64::from(r.delay))).collect()
            })
            .collect();
        RefSystem {
            mode: sys.mode,
            rules,
            synapses: sys.synapses.iter().copied().collect(),
            input: sys.input,
            output: sys.output,
            initial: sys.neurons.iter().map(|n| u64::try_from(&n.initial).unwrap()).collect(),
            limit,
        }
    }

    pub fn start(&self) -> RefState {
        RefState { contents: self.initial.clone(), busy: vec![None; self.initial.len()], first_output: None }
    }

    fn open(state: &RefState, j: usize, t: u64) -> bool {
        state.busy[j].map_or(true, |(at, _)| at <= t)
    }

    /// Contents after delivering `arriving` spikes at time `t`.
    pub fn deliver(&self, state: &mut RefState, t: u64, arriving: u64) {
        if let Some(i) = self.input {
            if arriving > 0 && Self::open(state, i, t) {
                state.contents[i] += arriving;
            }
        }
    }

    /// Every way timestep `t` can go after input delivery. The second value
    /// is the spike-gap result if this step made the output fire a second time.
    pub fn successors(&self, state: &RefState, t: u64) -> Vec<(RefState, Option<u64>)> {
        let m = state.contents.len();
        let mut branches = vec![state.clone()];
        for i in 0..m {
            if state.busy[i].is_some() {
                continue;
            }
            let c = state.contents[i];
            assert!(c <= self.limit, "content {} beyond the tabulated guards", c);
            let options: Vec<_> = self.rules[i].iter().filter(|(g, b, _, _)| g[c as usize] && c >= *b).collect();
            if options.is_empty() {
                continue;
            }
            let mut next = Vec::new();
            for b in &branches {
                for &&(_, consume, emit, delay) in &options {
                    let groups = if self.mode == Mode::Exhaustive { c / consume } else { 1 };
                    let mut s = b.clone();
                    s.contents[i] -= consume * groups;
                    if emit > 0 {
                        s.busy[i] = Some((t + delay - 1, emit * groups));
                    }
                    next.push(s);
                }
            }
            branches = next;
        }
        branches
            .into_iter()
            .map(|mut s| {
                let before = s.clone();
                let mut gap = None;
                for i in 0..m {
                    let Some((at, n)) = before.busy[i] else { continue };
                    if at != t {
                        continue;
                    }
                    s.busy[i] = None;
                    for &(a, j) in &self.synapses {
                        if a == i && Self::open(&before, j, t) {
                            s.contents[j] += n;
                        }
                    }
                    if self.output == Some(i) {
                        match s.first_output {
                            None => s.first_output = Some(t),
                            Some(f) => gap = Some(t - f),
                        }
                    }
                }
                (s, gap)
            })
            .collect()
    }

    /// Contents (after input delivery) reachable at each time `1..=steps`.
    pub fn reachable_contents(&self, train: &[u64], steps: u64) -> Vec<HashSet<Vec<u64>>> {
        let mut frontier: HashSet<RefState> = HashSet::from([self.start()]);
        let mut out = Vec::new();
        for t in 1..=steps {
            let arriving = train.get(t as usize - 1).copied().unwrap_or(0);
            let delivered: HashSet<RefState> = frontier
                .into_iter()
                .map(|mut s| {
                    self.deliver(&mut s, t, arriving);
                    s
                })
                .collect();
            out.push(delivered.iter().map(|s| s.contents.clone()).collect());
            frontier = delivered.iter().flat_map(|s| self.successors(s, t)).map(|(s, _)| s).collect();
        }
        out
    }

    /// Every spike-gap result some branch produces within `steps` steps.
    pub fn reachable_outputs(&self, train: &[u64], steps: u64) -> BTreeSet<u64> {
        let mut frontier: HashSet<RefState> = HashSet::from([self.start()]);
        let mut results = BTreeSet::new();
        for t in 1..=steps {
            let arriving = train.get(t as usize - 1).copied().unwrap_or(0);
            let mut next = HashSet::new();
            for mut s in frontier {
                self.deliver(&mut s, t, arriving);
                for (succ, gap) in self.successors(&s, t) {
                    match gap {
                        Some(g) => {
                            results.insert(g);
                        }
                        None => {
                            next.insert(succ);
                        }
                    }
                }
            }
            frontier = next;
        }
        results
    }
}

// ------------------------------------------------------ random SN P systems

fn random_guard(r: &mut impl Rng) -> UnaryExpr {
    match r.gen_range(0..4) {
        0 => UnaryExpr::pow(r.gen_range(1..=4)),
        1 => UnaryExpr::concat(vec![UnaryExpr::pow(r.gen_range(1..=3)), UnaryExpr::star(r.gen_range(1..=3))]),
        2 => UnaryExpr::concat(vec![UnaryExpr::star(r.gen_range(1..=3)), UnaryExpr::pow(r.gen_range(1..=2))]),
        _ => UnaryExpr::union(vec![UnaryExpr::pow(r.gen_range(1..=3)), UnaryExpr::pow(r.gen_range(2..=5))]),
    }
}

/// A valid standard system with `m` neurons, spike-gap output, neuron 1 as
/// input when `with_input`. Guards may overlap, so runs can branch.
pub fn random_standard_system(r: &mut impl Rng, m: usize, with_input: bool) -> SnpSystem {
    loop {
        let mut sys = SnpSystem::new("random", Mode::Standard, OutputConvention::SpikeGap);
        for _ in 0..m {
            let mut n = Neuron::new(r.gen_range(0u32..=3));
            for _ in 0..r.gen_range(1..=2) {
                let guard = random_guard(r);
                let min = guard.denote().min_at_least(1).unwrap_or(1);
                let b = r.gen_range(1..=min.clamp(1, 3));
                n.rules.push(RuleSpec::spiking(guard, b, 1, r.gen_range(1..=3)));
            }
            if r.gen_bool(0.3) {
                n.rules.push(RuleSpec::forget_exactly(r.gen_range(1..=5)));
            }
            sys.add_neuron(n);
        }
        for i in 0..m {
            for j in 0..m {
                if i != j && r.gen_bool(0.6) {
                    sys.connect(i, j);
                }
            }
        }
        sys.output = Some(r.gen_range(0..m));
        if with_input {
            sys.input = Some(0);
        }
        if snp_workbench::engine::validate(&sys).is_empty() {
            return sys;
        }
    }
}

pub fn random_word(r: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| if r.gen_bool(0.5) { '1' } else { '0' }).collect()
}

pub fn train_of(word: &str) -> Vec<u64> {
    word.chars().map(|c| u64::from(c == '1')).collect()
}

// ------------------------------------------------------------ Turing oracle

/// A total machine on `states` states (the last one halting) and `symbols`
/// symbols. `halt_bias` is the chance a transition enters the halting state.
pub fn random_tm(r: &mut impl Rng, states: u32, symbols: u32, halt_bias: f64) -> TuringMachine {
    let mut tm = TuringMachine::new(states, symbols, states).unwrap();
    for q in 1..states {
        for a in 1..=symbols {
            let next = if r.gen_bool(halt_bias) { states } else { r.gen_range(1..states) };
            let dir = if r.gen_bool(0.5) { Dir::L } else { Dir::R };
            tm.add(q, a, r.gen_range(1..=symbols), dir, next).unwrap();
        }
    }
    tm
}

/// A tape as one vector with the head index; blanks are symbol 1 and the
/// tape grows on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatTape {
    pub cells: Vec<u32>,
    pub head: usize,
    pub state: u32,
}

impl FlatTape {
    pub fn new(state: u32, left_nearest_first: &[u32], head: u32, right: &[u32]) -> Self {
        let mut cells: Vec<u32> = left_nearest_first.iter().rev().copied().collect();
        let pos = cells.len();
        cells.push(head);
        cells.extend_from_slice(right);
        FlatTape { cells, head: pos, state }
    }

    /// One move; false when there is no transition.
    pub fn step(&mut self, tm: &TuringMachine) -> bool {
        let Some(tr) = tm.transition(self.state, self.cells[self.head]) else { return false };
        self.cells[self.head] = tr.write;
        self.state = tr.next;
        match tr.dir {
            Dir::L if self.head == 0 => self.cells.insert(0, 1),
            Dir::L => self.head -= 1,
            Dir::R => {
                self.head += 1;
                if self.head == self.cells.len() {
                    self.cells.push(1);
                }
            }
        }
        true
    }

    pub fn symbol(&self) -> u32 {
        self.cells[self.head]
    }

    /// Cells left of the head, nearest first, with trailing blanks trimmed.
    pub fn left(&self) -> Vec<u32> {
        trim(self.cells[..self.head].iter().rev().copied().collect())
    }

    pub fn right(&self) -> Vec<u32> {
        trim(self.cells[self.head + 1..].to_vec())
    }
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&1) {
        v.pop();
    }
    v
}

/// The two small machines over `{a1, a2}` used throughout: one halts after
/// walking right over `a2` cells, the other never halts.
pub fn desk_halting() -> TuringMachine {
    TuringMachine::new(2, 2, 2).unwrap().with(1, 1, 2, Dir::L, 2).with(1, 2, 1, Dir::R, 1)
}

pub fn desk_walker() -> TuringMachine {
    TuringMachine::new(2, 2, 2).unwrap().with(1, 1, 2, Dir::L, 1).with(1, 2, 1, Dir::R, 1)
}

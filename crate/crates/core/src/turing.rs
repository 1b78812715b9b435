//! Deterministic single-tape Turing machines and their base-`z` encoding.
//!
//! States are `q1..=qn`, symbols `α1..=αk` with `α1` the blank. A
//! configuration is stored as the cells left of the head (nearest first), the
//! scanned symbol and the cells right of the head (nearest first). Neither
//! side is ever empty: when the head leaves the last cell on a side, one blank
//! is grown in its place.
//!
//! Encoding: `⟨αi⟩ = 2i - 1`, `⟨qr⟩ = 2r|A|`, the pair code is
//! `⟨qr⟩ + ⟨αi⟩`, `z = 2^v` with `v = ⌈log2(2|Q||A| + 2|A|)⌉`, and a side
//! `c1 c2 …` (nearest first) is `Σ z^i ⟨ci⟩` for `i ≥ 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    L,
    R,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::L => "L",
            Dir::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub write: u32,
    pub dir: Dir,
    pub next: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TmError {
    #[error("machine needs at least one state and one symbol")]
    Empty,
    #[error("state q{0} is out of range")]
    BadState(u32),
    #[error("symbol a{0} is out of range")]
    BadSymbol(u32),
    #[error("duplicate transition for (q{0}, a{1})")]
    Duplicate(u32, u32),
    #[error("transition out of the halting state q{0}")]
    FromHalt(u32),
    #[error("no transition for (q{0}, a{1})")]
    Missing(u32, u32),
    #[error("{0} is not a valid side encoding: {1}")]
    BadEncoding(BigUint, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: u32,
    pub symbols: u32,
    pub halt: u32,
    pub delta: BTreeMap<(u32, u32), Transition>,
}

impl TuringMachine {
    pub fn new(states: u32, symbols: u32, halt: u32) -> Result<Self, TmError> {
        if states == 0 || symbols == 0 {
            return Err(TmError::Empty);
        }
        if halt == 0 || halt > states {
            return Err(TmError::BadState(halt));
        }
        Ok(TuringMachine { states, symbols, halt, delta: BTreeMap::new() })
    }

    /// Adds `δ(q, a) = (write, dir, next)`.
    pub fn add(&mut self, q: u32, a: u32, write: u32, dir: Dir, next: u32) -> Result<(), TmError> {
        for s in [q, next] {
            if s == 0 || s > self.states {
                return Err(TmError::BadState(s));
            }
        }
        for s in [a, write] {
            if s == 0 || s > self.symbols {
                return Err(TmError::BadSymbol(s));
            }
        }
        if q == self.halt {
            return Err(TmError::FromHalt(q));
        }
        if self.delta.contains_key(&(q, a)) {
            return Err(TmError::Duplicate(q, a));
        }
        self.delta.insert((q, a), Transition { write, dir, next });
        Ok(())
    }

    pub fn with(mut self, q: u32, a: u32, write: u32, dir: Dir, next: u32) -> Self {
        self.add(q, a, write, dir, next).expect("valid transition");
        self
    }

    pub fn transition(&self, q: u32, a: u32) -> Option<Transition> {
        self.delta.get(&(q, a)).copied()
    }

    /// Non-halting pairs without a transition.
    pub fn missing(&self) -> Vec<(u32, u32)> {
        (1..=self.states)
            .filter(|&q| q != self.halt)
            .flat_map(|q| (1..=self.symbols).map(move |a| (q, a)))
            .filter(|k| !self.delta.contains_key(k))
            .collect()
    }

    pub fn log_z(&self) -> u32 {
        let top = 2 * u64::from(self.states) * u64::from(self.symbols) + 2 * u64::from(self.symbols);
        64 - (top - 1).leading_zeros()
    }

    pub fn z(&self) -> u64 {
        1 << self.log_z()
    }

    pub fn symbol_code(&self, a: u32) -> u64 {
        2 * u64::from(a) - 1
    }

    pub fn state_code(&self, q: u32) -> u64 {
        2 * u64::from(q) * u64::from(self.symbols)
    }

    pub fn code(&self, q: u32, a: u32) -> u64 {
        self.state_code(q) + self.symbol_code(a)
    }

    pub fn decode_code(&self, c: u64) -> Option<(u32, u32)> {
        let k = 2 * u64::from(self.symbols);
        let (q, r) = (c / k, c % k);
        (q >= 1 && q <= u64::from(self.states) && r % 2 == 1).then(|| (q as u32, (r as u32 + 1) / 2))
    }

    /// All state/symbol codes in increasing order.
    pub fn codes(&self) -> Vec<u64> {
        (1..=self.states).flat_map(|q| (1..=self.symbols).map(move |a| (q, a))).map(|(q, a)| self.code(q, a)).collect()
    }

    pub fn halt_codes(&self) -> Vec<u64> {
        (1..=self.symbols).map(|a| self.code(self.halt, a)).collect()
    }

    pub fn symbol_codes(&self) -> Vec<u64> {
        (1..=self.symbols).map(|a| self.symbol_code(a)).collect()
    }

    pub fn is_halt_code(&self, c: u64) -> bool {
        self.decode_code(c).map_or(false, |(q, _)| q == self.halt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Moved,
    Halted,
    Stuck,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmConfig {
    pub state: u32,
    pub left: Vec<u32>,
    pub head: u32,
    pub right: Vec<u32>,
}

impl TmConfig {
    /// Empty sides are filled with one blank.
    pub fn new(state: u32, left: Vec<u32>, head: u32, right: Vec<u32>) -> Self {
        let grow = |v: Vec<u32>| if v.is_empty() { vec![1] } else { v };
        TmConfig { state, left: grow(left), head, right: grow(right) }
    }

    /// Blank tape in state `q1`.
    pub fn blank() -> Self {
        Self::new(1, vec![], 1, vec![])
    }

    pub fn step(&mut self, tm: &TuringMachine) -> Outcome {
        if self.state == tm.halt {
            return Outcome::Halted;
        }
        let Some(t) = tm.transition(self.state, self.head) else {
            return Outcome::Stuck;
        };
        let (from, to) = match t.dir {
            Dir::L => (&mut self.left, &mut self.right),
            Dir::R => (&mut self.right, &mut self.left),
        };
        to.insert(0, t.write);
        self.head = from.remove(0);
        if from.is_empty() {
            from.push(1);
        }
        self.state = t.next;
        Outcome::Moved
    }

    /// Runs until halting, getting stuck, or `limit` moves.
    pub fn run(&mut self, tm: &TuringMachine, limit: u64) -> (Outcome, u64) {
        for n in 0..limit {
            match self.step(tm) {
                Outcome::Moved => {}
                other => return (other, n),
            }
        }
        let outcome = if self.state == tm.halt { Outcome::Halted } else { Outcome::Moved };
        (outcome, limit)
    }
}

impl fmt::Display for TmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.left.iter().rev() {
            write!(f, "a{} ", a)?;
        }
        write!(f, "[q{} a{}]", self.state, self.head)?;
        for a in &self.right {
            write!(f, " a{}", a)?;
        }
        Ok(())
    }
}

/// The numeric triple `(X, code, Y)` held by the universal system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedConfig {
    pub x: BigUint,
    pub code: u64,
    pub y: BigUint,
}

/// `Σ z^i ⟨ci⟩`, nearest cell at `i = 1`.
pub fn encode_cells(tm: &TuringMachine, cells: &[u32]) -> BigUint {
    let z = BigUint::from(tm.z());
    cells.iter().rev().fold(BigUint::zero(), |acc, &a| (acc + tm.symbol_code(a)) * &z)
}

pub fn encode_config(tm: &TuringMachine, cfg: &TmConfig) -> EncodedConfig {
    EncodedConfig {
        x: encode_cells(tm, &cfg.left),
        code: tm.code(cfg.state, cfg.head),
        y: encode_cells(tm, &cfg.right),
    }
}

/// Reads a side encoding back into cells. The lowest base-`z` digit must be
/// zero; further zero digits at the low end are skipped.
pub fn decode_cells(tm: &TuringMachine, value: &BigUint) -> Result<Vec<u32>, TmError> {
    let bad = |why: &str| TmError::BadEncoding(value.clone(), why.to_string());
    let digits = value.to_radix_le(tm.z() as u32);
    if digits.first().map_or(false, |&d| d != 0) {
        return Err(bad("lowest digit is not zero"));
    }
    let start = digits.iter().position(|&d| d != 0).unwrap_or(digits.len());
    digits[start..]
        .iter()
        .map(|&d| {
            let d = u32::from(d);
            if d % 2 == 1 && d < 2 * tm.symbols {
                Ok((d + 1) / 2)
            } else {
                Err(bad(&format!("digit {} is not a symbol code", d)))
            }
        })
        .collect()
}

pub fn decode_config(tm: &TuringMachine, enc: &EncodedConfig) -> Result<TmConfig, TmError> {
    let (state, head) = tm
        .decode_code(enc.code)
        .ok_or_else(|| TmError::BadEncoding(BigUint::from(enc.code), "not a state/symbol code".into()))?;
    Ok(TmConfig::new(state, decode_cells(tm, &enc.x)?, head, decode_cells(tm, &enc.y)?))
}

/// One move computed purely on the numbers. `None` when the code is halting
/// or has no transition.
pub fn encoded_step(tm: &TuringMachine, enc: &EncodedConfig) -> Option<EncodedConfig> {
    let (q, a) = tm.decode_code(enc.code)?;
    if q == tm.halt {
        return None;
    }
    let t = tm.transition(q, a)?;
    let z = BigUint::from(tm.z());
    let (from, to) = match t.dir {
        Dir::L => (&enc.x, &enc.y),
        Dir::R => (&enc.y, &enc.x),
    };
    let shifted = from / &z;
    let (_, read) = shifted.div_rem(&z);
    let mut from2 = shifted - &read;
    if from2.is_zero() {
        from2 = z.clone();
    }
    let to2 = &z * to + &z * tm.symbol_code(t.write);
    let code = tm.state_code(t.next) + read.to_u64().expect("digit below z");
    let (x, y) = match t.dir {
        Dir::L => (from2, to2),
        Dir::R => (to2, from2),
    };
    Some(EncodedConfig { x, code, y })
}

//! Regular expressions over the one-letter alphabet `{s}` and their exact
//! denotations as eventually periodic sets of natural numbers.
//!
//! Every rule guard of a spiking neural P system is such an expression; the
//! simulator only ever needs membership of (possibly huge) spike counts, so
//! expressions are compiled once into an [`EventuallyPeriodicSet`].

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

/// Abstract syntax of a unary regular expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UnaryExpr {
    /// `s^n`, the single word of length `n >= 1`.
    Pow(u64),
    /// `(s^p)*`, every multiple of `p >= 1` (including zero).
    Star(u64),
    Concat(Vec<UnaryExpr>),
    Union(Vec<UnaryExpr>),
}

impl UnaryExpr {
    pub fn pow(n: u64) -> Self {
        assert!(n >= 1, "s^0 is not a valid atom");
        UnaryExpr::Pow(n)
    }

    pub fn star(p: u64) -> Self {
        assert!(p >= 1, "(s^0)* is not a valid atom");
        UnaryExpr::Star(p)
    }

    /// Concatenation that drops the list wrapper for a single factor.
    pub fn concat(parts: Vec<UnaryExpr>) -> Self {
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            UnaryExpr::Concat(parts)
        }
    }

    pub fn union(parts: Vec<UnaryExpr>) -> Self {
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            UnaryExpr::Union(parts)
        }
    }

    /// The exact set of word lengths this expression denotes.
    pub fn denote(&self) -> EventuallyPeriodicSet {
        match self {
            UnaryExpr::Pow(n) => EventuallyPeriodicSet::singleton(*n),
            UnaryExpr::Star(p) => EventuallyPeriodicSet::multiples(*p),
            UnaryExpr::Concat(parts) => {
                let sets: Vec<_> = parts.iter().map(UnaryExpr::denote).collect();
                normalize(&sets, SetOp::Sum)
            }
            UnaryExpr::Union(parts) => {
                let sets: Vec<_> = parts.iter().map(UnaryExpr::denote).collect();
                normalize(&sets, SetOp::Union)
            }
        }
    }
}

impl fmt::Display for UnaryExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnaryExpr::Pow(1) => write!(f, "s"),
            UnaryExpr::Pow(n) => write!(f, "s^{}", n),
            UnaryExpr::Star(1) => write!(f, "(s)*"),
            UnaryExpr::Star(p) => write!(f, "(s^{})*", p),
            UnaryExpr::Concat(parts) => {
                for part in parts {
                    match part {
                        UnaryExpr::Union(_) => {
                            return Err(fmt::Error);
                        }
                        _ => write!(f, "{}", part)?,
                    }
                }
                Ok(())
            }
            UnaryExpr::Union(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{}", part)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unexpected {found} at offset {pos}")]
    Unexpected { pos: usize, found: String },
    #[error("exponent must be at least 1 at offset {pos}")]
    ZeroExponent { pos: usize },
    #[error("exponent too large at offset {pos}")]
    Overflow { pos: usize },
}

impl ExprError {
    pub fn offset(&self) -> usize {
        match self {
            ExprError::Unexpected { pos, .. }
            | ExprError::ZeroExponent { pos }
            | ExprError::Overflow { pos } => *pos,
        }
    }
}

/// Parses the concrete syntax
///
/// ```text
/// expr := cat ("|" cat)*
/// cat  := atom+
/// atom := "s" "^" INT | "s" | "(" "s" ("^" INT)? ")" "*"
/// ```
///
/// Whitespace is ignored everywhere.
pub fn parse_expr(text: &str) -> Result<UnaryExpr, ExprError> {
    let mut p = ExprParser {
        chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
        idx: 0,
        len: text.len(),
    };
    let expr = p.alt()?;
    if let Some(&(pos, c)) = p.chars.get(p.idx) {
        return Err(ExprError::Unexpected { pos, found: format!("'{}'", c) });
    }
    Ok(expr)
}

struct ExprParser {
    chars: Vec<(usize, char)>,
    idx: usize,
    len: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.idx).map(|&(p, _)| p).unwrap_or(self.len)
    }

    fn unexpected(&self) -> ExprError {
        let found = match self.peek() {
            Some(c) => format!("'{}'", c),
            None => "end of expression".to_string(),
        };
        ExprError::Unexpected { pos: self.pos(), found }
    }

    fn expect(&mut self, want: char) -> Result<(), ExprError> {
        if self.peek() == Some(want) {
            self.idx += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn alt(&mut self) -> Result<UnaryExpr, ExprError> {
        let mut parts = vec![self.cat()?];
        while self.peek() == Some('|') {
            self.idx += 1;
            parts.push(self.cat()?);
        }
        Ok(UnaryExpr::union(parts))
    }

    fn cat(&mut self) -> Result<UnaryExpr, ExprError> {
        let mut parts = Vec::new();
        while matches!(self.peek(), Some('s') | Some('(')) {
            parts.push(self.atom()?);
        }
        if parts.is_empty() {
            return Err(self.unexpected());
        }
        Ok(UnaryExpr::concat(parts))
    }

    fn atom(&mut self) -> Result<UnaryExpr, ExprError> {
        match self.peek() {
            Some('s') => {
                self.idx += 1;
                let n = self.exponent()?;
                Ok(UnaryExpr::Pow(n))
            }
            Some('(') => {
                self.idx += 1;
                self.expect('s')?;
                let p = self.exponent()?;
                self.expect(')')?;
                self.expect('*')?;
                Ok(UnaryExpr::Star(p))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn exponent(&mut self) -> Result<u64, ExprError> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.idx += 1;
        let start = self.pos();
        let mut value: u64 = 0;
        let mut digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(c as u64 - '0' as u64))
                .ok_or(ExprError::Overflow { pos: start })?;
            digits += 1;
            self.idx += 1;
        }
        if digits == 0 {
            return Err(self.unexpected());
        }
        if value == 0 {
            return Err(ExprError::ZeroExponent { pos: start });
        }
        Ok(value)
    }
}

/// A set of naturals `S` stored as a prefix of membership bits for
/// `0..threshold` followed by a cycle: for `k >= threshold`,
/// `k ∈ S` iff `cycle[(k - threshold) % period]`.
///
/// Values built through [`normalize`] or [`UnaryExpr::denote`] are canonical:
/// both the threshold and the period are minimal, so structural equality is set
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicSet {
    prefix: Vec<bool>,
    cycle: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    /// Minkowski sum `{a + b : a ∈ A, b ∈ B}`.
    Sum,
}

impl EventuallyPeriodicSet {
    /// Builds a set from raw parts and canonicalizes it.
    pub fn from_parts(prefix: Vec<bool>, cycle: Vec<bool>) -> Self {
        assert!(!cycle.is_empty(), "period must be at least 1");
        let mut set = EventuallyPeriodicSet { prefix, cycle };
        set.canonicalize();
        set
    }

    pub fn empty() -> Self {
        EventuallyPeriodicSet { prefix: Vec::new(), cycle: vec![false] }
    }

    pub fn universal() -> Self {
        EventuallyPeriodicSet { prefix: Vec::new(), cycle: vec![true] }
    }

    pub fn singleton(n: u64) -> Self {
        let mut prefix = vec![false; n as usize + 1];
        prefix[n as usize] = true;
        EventuallyPeriodicSet { prefix, cycle: vec![false] }
    }

    /// `{0, p, 2p, ...}`
    pub fn multiples(p: u64) -> Self {
        assert!(p >= 1);
        let mut cycle = vec![false; p as usize];
        cycle[0] = true;
        EventuallyPeriodicSet { prefix: Vec::new(), cycle }
    }

    pub fn threshold(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn period(&self) -> u64 {
        self.cycle.len() as u64
    }

    pub fn prefix_bits(&self) -> &[bool] {
        &self.prefix
    }

    pub fn cycle_bits(&self) -> &[bool] {
        &self.cycle
    }

    pub fn is_finite(&self) -> bool {
        self.cycle.iter().all(|b| !b)
    }

    pub fn contains(&self, k: u64) -> bool {
        let theta = self.prefix.len() as u64;
        if k < theta {
            self.prefix[k as usize]
        } else {
            self.cycle[((k - theta) % self.cycle.len() as u64) as usize]
        }
    }

    /// Membership for arbitrary-precision counts.
    pub fn member(&self, k: &BigUint) -> bool {
        match k.to_u64() {
            Some(small) => self.contains(small),
            None => {
                // k exceeds every threshold we can store
                let theta = BigUint::from(self.prefix.len());
                let offset = (k - theta) % BigUint::from(self.cycle.len());
                self.cycle[offset.to_usize().unwrap()]
            }
        }
    }

    /// Smallest member that is at least `floor`, if any.
    pub fn min_at_least(&self, floor: u64) -> Option<u64> {
        let horizon = floor.max(self.threshold()) + self.period();
        (floor..horizon).find(|&k| self.contains(k))
    }

    fn canonicalize(&mut self) {
        let lambda = self.cycle.len();
        // smallest divisor of the period under which the cycle repeats
        let best = (1..=lambda)
            .filter(|d| lambda % d == 0)
            .find(|&d| (0..lambda).all(|j| self.cycle[j] == self.cycle[j % d]))
            .unwrap_or(lambda);
        self.cycle.truncate(best);
        // pull the threshold back while the prefix already follows the cycle
        while let Some(&last) = self.prefix.last() {
            let len = self.cycle.len();
            if last != self.cycle[len - 1] {
                break;
            }
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
    }

    fn bits_upto(&self, n: usize) -> Vec<bool> {
        (0..n as u64).map(|k| self.contains(k)).collect()
    }
}

impl fmt::Display for EventuallyPeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = (0..self.threshold())
            .filter(|&k| self.contains(k))
            .map(|k| k.to_string())
            .collect();
        write!(f, "{{{}}}", members.join(","))?;
        let residues: Vec<String> = (0..self.period())
            .filter(|&j| self.cycle[j as usize])
            .map(|j| (self.threshold() + j).to_string())
            .collect();
        if !residues.is_empty() {
            write!(f, " ∪ {{{} + {}n}}", residues.join(","), self.period())?;
        }
        Ok(())
    }
}

/// Canonical representation of the union or Minkowski sum of `sets`.
pub fn normalize(sets: &[EventuallyPeriodicSet], op: SetOp) -> EventuallyPeriodicSet {
    assert!(!sets.is_empty(), "normalize needs at least one set");
    let mut acc = sets[0].clone();
    acc.canonicalize();
    for next in &sets[1..] {
        acc = match op {
            SetOp::Union => union2(&acc, next),
            SetOp::Sum => sum2(&acc, next),
        };
    }
    acc
}

fn union2(a: &EventuallyPeriodicSet, b: &EventuallyPeriodicSet) -> EventuallyPeriodicSet {
    let theta = a.threshold().max(b.threshold()) as usize;
    let lambda = a.period().lcm(&b.period()) as usize;
    let bits: Vec<bool> = (0..(theta + lambda) as u64).map(|k| a.contains(k) || b.contains(k)).collect();
    EventuallyPeriodicSet::from_parts(bits[..theta].to_vec(), bits[theta..].to_vec())
}

fn sum2(a: &EventuallyPeriodicSet, b: &EventuallyPeriodicSet) -> EventuallyPeriodicSet {
    if a.is_empty_set() || b.is_empty_set() {
        return EventuallyPeriodicSet::empty();
    }
    // A + B is L-periodic from θa + θb + L on, with L = lcm(λa, λb).
    let lambda = a.period().lcm(&b.period()) as usize;
    let theta = (a.threshold() + b.threshold()) as usize + lambda;
    let n = theta + lambda;
    let a_bits = a.bits_upto(n);
    let b_bits = b.bits_upto(n);
    let b_members: Vec<usize> = (0..n).filter(|&j| b_bits[j]).collect();
    let mut out = vec![false; n];
    for (i, _) in a_bits.iter().enumerate().filter(|(_, &m)| m) {
        for &j in &b_members {
            if i + j >= n {
                break;
            }
            out[i + j] = true;
        }
    }
    let cycle = out.split_off(theta);
    EventuallyPeriodicSet::from_parts(out, cycle)
}

impl EventuallyPeriodicSet {
    fn is_empty_set(&self) -> bool {
        self.is_finite() && self.prefix.iter().all(|b| !b)
    }
}

/// Shape of the chain-plus-cycle acceptor deciding whether a rule with
/// guard `set` and consumption `b` is applicable.
///
/// States are `g_1..g_y`. State `g_j` with `j < x` stands for exactly `j - 1`
/// spikes; the cycle `g_x..g_y` stands for every count `>= x - 1`, in steps of
/// the period. Padding guarantees `x > b`, so every count below `b` sits on the
/// chain and can be rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailCycle {
    pub x: u64,
    pub y: u64,
    /// `accepts[j - 1]` is true iff `g_j` accepts.
    pub accepts: Vec<bool>,
}

impl TailCycle {
    pub fn cycle_len(&self) -> u64 {
        self.y - self.x + 1
    }

    /// Smallest spike count represented by state `g_j`.
    pub fn count_of(&self, j: u64) -> u64 {
        j - 1
    }

    /// State reached from `g_1` after reading `k` spikes.
    pub fn state_after(&self, k: u64) -> u64 {
        if k + 1 < self.x {
            k + 1
        } else {
            self.x + (k + 1 - self.x) % self.cycle_len()
        }
    }

    pub fn accepts_state(&self, j: u64) -> bool {
        self.accepts[(j - 1) as usize]
    }
}

pub fn tail_cycle(set: &EventuallyPeriodicSet, b: u64) -> TailCycle {
    let x = set.threshold().max(b) + 1;
    let y = x + set.period() - 1;
    let accepts = (1..=y).map(|j| {
        let count = j - 1;
        count >= b && set.contains(count)
    });
    TailCycle { x, y, accepts: accepts.collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(set: &EventuallyPeriodicSet, upto: u64) -> Vec<u64> {
        (0..=upto).filter(|&k| set.contains(k)).collect()
    }

    #[test]
    fn parses_table_guards() {
        assert_eq!(
            parse_expr("s^2(s^16)*").unwrap(),
            UnaryExpr::Concat(vec![UnaryExpr::Pow(2), UnaryExpr::Star(16)])
        );
        assert_eq!(
            parse_expr("(s^16)* s^7").unwrap(),
            UnaryExpr::Concat(vec![UnaryExpr::Star(16), UnaryExpr::Pow(7)])
        );
        assert_eq!(parse_expr("s").unwrap(), UnaryExpr::Pow(1));
        assert_eq!(parse_expr("(s)*").unwrap(), UnaryExpr::Star(1));
        assert_eq!(
            parse_expr("s^3 | s^5").unwrap(),
            UnaryExpr::Union(vec![UnaryExpr::Pow(3), UnaryExpr::Pow(5)])
        );
    }

    #[test]
    fn rejects_zero_and_garbage() {
        assert_eq!(parse_expr("s^0"), Err(ExprError::ZeroExponent { pos: 2 }));
        assert!(matches!(parse_expr("s^"), Err(ExprError::Unexpected { pos: 2, .. })));
        assert!(matches!(parse_expr("(s^2)"), Err(ExprError::Unexpected { .. })));
        assert!(matches!(parse_expr(""), Err(ExprError::Unexpected { pos: 0, .. })));
        assert!(matches!(parse_expr("s | "), Err(ExprError::Unexpected { .. })));
        let err = parse_expr("s^2 x").unwrap_err();
        assert_eq!(err.offset(), 4);
    }

    #[test]
    fn denotes_offset_progression() {
        let set = parse_expr("s^2(s^16)*").unwrap().denote();
        // {2 + 16n} is exactly the residue class 2 mod 16
        assert_eq!(set.threshold(), 0);
        assert_eq!(set.period(), 16);
        assert_eq!(members(&set, 40), vec![2, 18, 34]);
        assert!(set.member(&BigUint::from(18u32)));
        assert!(!set.member(&BigUint::from(16u32)));
    }

    #[test]
    fn denotes_universal_and_finite() {
        let all = UnaryExpr::Star(1).denote();
        assert_eq!(all, EventuallyPeriodicSet::universal());
        assert!(all.member(&BigUint::from(0u32)));

        let finite = UnaryExpr::Union(vec![UnaryExpr::Pow(3), UnaryExpr::Pow(5)]).denote();
        assert_eq!(finite.threshold(), 6);
        assert_eq!(finite.cycle_bits(), &[false]);
        assert_eq!(members(&finite, 20), vec![3, 5]);
    }

    #[test]
    fn normalize_union_and_sum() {
        let two = EventuallyPeriodicSet::singleton(2);
        let prog = parse_expr("s^2(s^16)*").unwrap().denote();
        assert_eq!(normalize(&[two.clone(), prog.clone()], SetOp::Union), prog);
        let sixteen = EventuallyPeriodicSet::multiples(16);
        assert_eq!(normalize(&[two, sixteen], SetOp::Sum), prog);

        let semigroup = normalize(
            &[EventuallyPeriodicSet::multiples(3), EventuallyPeriodicSet::multiples(5)],
            SetOp::Sum,
        );
        assert_eq!(members(&semigroup, 12), vec![0, 3, 5, 6, 8, 9, 10, 11, 12]);
        assert_eq!(semigroup.threshold(), 8);
        assert_eq!(semigroup.period(), 1);
    }

    #[test]
    fn huge_counts() {
        let set = parse_expr("(s^256)*s^112").unwrap().denote();
        let big = BigUint::from(256u32).pow(40) + BigUint::from(112u32);
        assert!(set.member(&big));
        assert!(!set.member(&(big + 1u32)));
    }

    #[test]
    fn tail_cycle_shapes() {
        let g = tail_cycle(&parse_expr("s^2(s^3)*").unwrap().denote(), 2);
        assert_eq!((g.x, g.cycle_len()), (3, 3));
        let g = tail_cycle(&EventuallyPeriodicSet::universal(), 1);
        assert_eq!((g.x, g.y), (2, 2));
        assert_eq!(g.accepts, vec![false, true]);
        let g = tail_cycle(&EventuallyPeriodicSet::singleton(4), 4);
        assert_eq!(g.x - 1, 5);
        assert_eq!(g.accepts, vec![false, false, false, false, true, false]);
    }

    #[test]
    fn display_round_trips() {
        for text in ["s^2(s^16)*", "(s)*", "s", "s^3 | (s^4)*s^2", "(s^256)*s^112"] {
            let e = parse_expr(text).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
    }
}

//! Text format for SN P systems, Turing machines and counter machines.
//!
//! The first keyword of a document picks its kind:
//!
//! ```text
//! # a two-neuron relay
//! system relay mode=standard input=none output=2 output_convention=gap
//! neuron 1 spikes=1 {
//!   rule "s" / 1 -> 1 ; 1
//! }
//! neuron 2 spikes=0 {
//!   rule "s" / 1 -> 1 ; 1
//!   rule "s^2" / 2 -> 0      # forgetting
//! }
//! synapses { (1,2) }
//! ```
//!
//! ```text
//! tm states=2 symbols=2 blank=1 halt=2
//! delta q1 a1 -> a2 L q2
//! ```
//!
//! ```text
//! cm counters=1 output=1 states=2 initial=1 halt=2 alphabet=1
//! f 1 q1 * -> Y q1 INC c1
//! f _ q1 * -> N q2 NULL
//! ```
//!
//! Neuron, counter, state and symbol numbers are 1-based. A comment after a
//! rule is kept as that rule's note. In counter machine entries `*` matches
//! any symbol (or skips the counter test) and `_` is the end of the input.

use std::fmt::Write as _;

use num_bigint::BigUint;
use thiserror::Error;

use crate::cm::{CmSpec, Entry, Op, Read, Test};
use crate::engine::{Mode, Neuron, OutputConvention, RuleSpec, SnpSystem};
use crate::turing::{Dir, TmError, TuringMachine};
use crate::unary::parse_expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Snp(SnpSystem),
    Tm(TuringMachine),
    Cm(CmSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Comment(String),
    Arrow,
    Punct(char),
    Newline,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '*' | '^')
}

fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let at = |tok| Token { tok, line: ln + 1, col: i + 1 };
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                let rest: String = chars[i + 1..].iter().collect();
                out.push(at(Tok::Comment(rest.trim().to_string())));
                i = chars.len();
            } else if c == '"' {
                let end = chars[i + 1..].iter().position(|&d| d == '"').ok_or(DslError {
                    line: ln + 1,
                    col: i + 1,
                    message: "unterminated string".into(),
                })?;
                out.push(at(Tok::Str(chars[i + 1..i + 1 + end].iter().collect())));
                i += end + 2;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(at(Tok::Arrow));
                i += 2;
            } else if "{}(),/;=>".contains(c) {
                out.push(at(Tok::Punct(c)));
                i += 1;
            } else if is_word_char(c) {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>')) {
                    i += 1;
                }
                out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), line: ln + 1, col: start + 1 });
            } else {
                return Err(DslError { line: ln + 1, col: i + 1, message: format!("unexpected character {:?}", c) });
            }
        }
        out.push(Token { tok: Tok::Newline, line: ln + 1, col: chars.len() + 1 });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, DslError> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, message: impl Into<String>) -> DslError {
        let (line, col) = match self.peek().or_else(|| self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        DslError { line, col, message: message.into() }
    }

    fn err_at(t: &Token, message: impl Into<String>) -> DslError {
        DslError { line: t.line, col: t.col, message: message.into() }
    }

    /// Skips newlines and stand-alone comments.
    fn skip_blank(&mut self) {
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Newline | Tok::Comment(_))) {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<(String, Token), DslError> {
        match self.next() {
            Some(t) => match &t.tok {
                Tok::Word(w) => Ok((w.clone(), t.clone())),
                _ => Err(Self::err_at(&t, format!("expected {}", what))),
            },
            None => Err(self.err_here(format!("expected {}", what))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        let (w, t) = self.word(kw)?;
        if w == kw {
            Ok(())
        } else {
            Err(Self::err_at(&t, format!("expected `{}`, found `{}`", kw, w)))
        }
    }

    fn punct(&mut self, p: char) -> Result<(), DslError> {
        match self.next() {
            Some(Token { tok: Tok::Punct(c), .. }) if c == p => Ok(()),
            Some(t) => Err(Self::err_at(&t, format!("expected `{}`", p))),
            None => Err(self.err_here(format!("expected `{}`", p))),
        }
    }

    fn arrow(&mut self) -> Result<(), DslError> {
        match self.next() {
            Some(Token { tok: Tok::Arrow, .. }) => Ok(()),
            Some(t) => Err(Self::err_at(&t, "expected `->`")),
            None => Err(self.err_here("expected `->`")),
        }
    }

    fn at_punct(&self, p: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(c), .. }) if *c == p)
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<(T, Token), DslError> {
        let (w, t) = self.word(what)?;
        w.parse().map(|n| (n, t.clone())).map_err(|_| Self::err_at(&t, format!("expected {}, found `{}`", what, w)))
    }

    /// `key=value` pairs up to the end of the line.
    fn settings(&mut self) -> Result<Vec<(String, String, Token)>, DslError> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if matches!(t.tok, Tok::Newline | Tok::Comment(_)) {
                break;
            }
            let (key, t) = self.word("a key=value setting")?;
            self.punct('=')?;
            let (value, _) = self.word(&format!("a value for `{}`", key))?;
            out.push((key, value, t));
        }
        Ok(out)
    }

    fn end_of_line(&mut self) -> Result<Option<String>, DslError> {
        let mut note = None;
        if let Some(Token { tok: Tok::Comment(c), .. }) = self.peek() {
            note = Some(c.clone());
            self.pos += 1;
        }
        match self.next() {
            None | Some(Token { tok: Tok::Newline, .. }) => Ok(note),
            Some(t) => Err(Self::err_at(&t, "expected end of line")),
        }
    }
}

/// Index like `q3` or `a2` with the given prefix.
fn prefixed(p: &mut Parser, prefix: char, what: &str) -> Result<(u32, Token), DslError> {
    let (w, t) = p.word(what)?;
    w.strip_prefix(prefix)
        .and_then(|n| n.parse().ok())
        .map(|n| (n, t.clone()))
        .ok_or_else(|| Parser::err_at(&t, format!("expected {}, found `{}`", what, w)))
}

fn setting_number<T: std::str::FromStr>(value: &str, key: &str, t: &Token) -> Result<T, DslError> {
    value.parse().map_err(|_| Parser::err_at(t, format!("bad value `{}` for `{}`", value, key)))
}

fn optional_id(value: &str, key: &str, t: &Token) -> Result<Option<usize>, DslError> {
    if value == "none" {
        return Ok(None);
    }
    let id: usize = setting_number(value, key, t)?;
    if id == 0 {
        return Err(Parser::err_at(t, format!("`{}` ids start at 1", key)));
    }
    Ok(Some(id - 1))
}

pub fn parse_document(text: &str) -> Result<Document, DslError> {
    let mut p = Parser::new(text)?;
    p.skip_blank();
    let first = p.peek().cloned();
    match first.as_ref().map(|t| &t.tok) {
        Some(Tok::Word(w)) if w == "system" => parse_snp(text).map(Document::Snp),
        Some(Tok::Word(w)) if w == "tm" => parse_tm(text).map(Document::Tm),
        Some(Tok::Word(w)) if w == "cm" => parse_cm(text).map(Document::Cm),
        _ => Err(p.err_here("expected `system`, `tm` or `cm`")),
    }
}

pub fn parse_snp(text: &str) -> Result<SnpSystem, DslError> {
    let mut p = Parser::new(text)?;
    p.skip_blank();
    p.keyword("system")?;
    let (name, _) = p.word("a system name")?;
    let mut sys = SnpSystem::new(name, Mode::Standard, OutputConvention::SpikeGap);
    for (key, value, t) in p.settings()? {
        match key.as_str() {
            "mode" => {
                sys.mode = match value.as_str() {
                    "standard" => Mode::Standard,
                    "extended" => Mode::Extended,
                    "exhaustive" => Mode::Exhaustive,
                    _ => return Err(Parser::err_at(&t, format!("unknown mode `{}`", value))),
                }
            }
            "input" => sys.input = optional_id(&value, &key, &t)?,
            "output" => sys.output = optional_id(&value, &key, &t)?,
            "output_convention" => {
                sys.convention = match value.as_str() {
                    "gap" => OutputConvention::SpikeGap,
                    "events" => OutputConvention::EmissionEvents,
                    _ => return Err(Parser::err_at(&t, format!("unknown output convention `{}`", value))),
                }
            }
            _ => return Err(Parser::err_at(&t, format!("unknown setting `{}`", key))),
        }
    }
    p.end_of_line()?;
    loop {
        p.skip_blank();
        let Some(t) = p.peek().cloned() else { break };
        match &t.tok {
            Tok::Word(w) if w == "neuron" => {
                p.pos += 1;
                let (id, idt) = p.number::<usize>("a neuron id")?;
                if id != sys.neurons.len() + 1 {
                    return Err(Parser::err_at(&idt, format!("expected neuron {}", sys.neurons.len() + 1)));
                }
                let mut neuron = Neuron::default();
                for (key, value, t) in p.settings_until_brace()? {
                    match key.as_str() {
                        "spikes" => neuron.initial = setting_number::<BigUint>(&value, &key, &t)?,
                        _ => return Err(Parser::err_at(&t, format!("unknown setting `{}`", key))),
                    }
                }
                p.punct('{')?;
                loop {
                    p.skip_blank();
                    if p.at_punct('}') {
                        p.pos += 1;
                        break;
                    }
                    neuron.rules.push(parse_rule(&mut p)?);
                }
                sys.neurons.push(neuron);
            }
            Tok::Word(w) if w == "synapses" => {
                p.pos += 1;
                p.punct('{')?;
                loop {
                    p.skip_blank();
                    if p.at_punct('}') {
                        p.pos += 1;
                        break;
                    }
                    p.punct('(')?;
                    let (i, it) = p.number::<usize>("a neuron id")?;
                    p.punct(',')?;
                    let (j, jt) = p.number::<usize>("a neuron id")?;
                    p.punct(')')?;
                    for (n, t) in [(i, &it), (j, &jt)] {
                        if n == 0 {
                            return Err(Parser::err_at(t, "neuron ids start at 1"));
                        }
                    }
                    sys.connect(i - 1, j - 1);
                }
            }
            _ => return Err(Parser::err_at(&t, "expected `neuron` or `synapses`")),
        }
    }
    Ok(sys)
}

impl Parser {
    fn settings_until_brace(&mut self) -> Result<Vec<(String, String, Token)>, DslError> {
        let mut out = Vec::new();
        while !self.at_punct('{') {
            let (key, t) = self.word("a key=value setting or `{`")?;
            self.punct('=')?;
            let (value, _) = self.word(&format!("a value for `{}`", key))?;
            out.push((key, value, t));
        }
        Ok(out)
    }
}

fn parse_rule(p: &mut Parser) -> Result<RuleSpec, DslError> {
    p.keyword("rule")?;
    let st = p.next().ok_or_else(|| p.err_here("expected a quoted expression"))?;
    let Tok::Str(src) = &st.tok else {
        return Err(Parser::err_at(&st, "expected a quoted expression"));
    };
    let expr = parse_expr(src).map_err(|e| DslError {
        line: st.line,
        col: st.col + 1 + src.chars().take(e.offset()).count(),
        message: e.to_string(),
    })?;
    p.punct('/')?;
    let (b, bt) = p.number::<u64>("a consumed spike count")?;
    if b == 0 {
        return Err(Parser::err_at(&bt, "rules consume at least one spike"));
    }
    p.arrow()?;
    let (emit, _) = p.number::<u64>("an emitted spike count")?;
    let mut delay = None;
    if p.at_punct(';') {
        p.pos += 1;
        delay = Some(p.number::<u32>("a delay")?);
    }
    let mut rule = if emit == 0 {
        if let Some((d, t)) = delay.filter(|(d, _)| *d != 0) {
            return Err(Parser::err_at(&t, format!("forgetting rules have delay 0, not {}", d)));
        }
        RuleSpec::forgetting(expr, b)
    } else {
        match delay {
            Some((d, _)) if d >= 1 => RuleSpec::spiking(expr, b, emit, d),
            Some((_, t)) => return Err(Parser::err_at(&t, "spiking rules need delay >= 1")),
            None => return Err(p.err_here("spiking rules need `; <delay>`")),
        }
    };
    rule.note = p.end_of_line()?;
    Ok(rule)
}

fn note_text(note: &Option<String>) -> String {
    match note {
        Some(n) => format!("  # {}", n.replace('\n', " ")),
        None => String::new(),
    }
}

pub fn print_snp(sys: &SnpSystem) -> String {
    let id = |o: Option<usize>| o.map_or("none".to_string(), |i| (i + 1).to_string());
    let mut out = String::new();
    let convention = match sys.convention {
        OutputConvention::SpikeGap => "gap",
        OutputConvention::EmissionEvents => "events",
    };
    writeln!(
        out,
        "system {} mode={} input={} output={} output_convention={}",
        sys.name,
        sys.mode.name(),
        id(sys.input),
        id(sys.output),
        convention
    )
    .unwrap();
    for (i, n) in sys.neurons.iter().enumerate() {
        if n.rules.is_empty() {
            writeln!(out, "neuron {} spikes={} {{ }}", i + 1, n.initial).unwrap();
            continue;
        }
        writeln!(out, "neuron {} spikes={} {{", i + 1, n.initial).unwrap();
        for r in &n.rules {
            if r.is_forgetting() {
                writeln!(out, "  rule \"{}\" / {} -> 0{}", r.expr, r.consume, note_text(&r.note)).unwrap();
            } else {
                writeln!(out, "  rule \"{}\" / {} -> {} ; {}{}", r.expr, r.consume, r.emit, r.delay, note_text(&r.note))
                    .unwrap();
            }
        }
        writeln!(out, "}}").unwrap();
    }
    out.push_str("synapses {");
    for (k, (i, j)) in sys.synapses.iter().enumerate() {
        out.push_str(if k % 8 == 0 { "\n  " } else { " " });
        write!(out, "({},{})", i + 1, j + 1).unwrap();
    }
    out.push_str("\n}\n");
    out
}

pub fn parse_tm(text: &str) -> Result<TuringMachine, DslError> {
    let mut p = Parser::new(text)?;
    p.skip_blank();
    let head = p.peek().cloned();
    p.keyword("tm")?;
    let (mut states, mut symbols, mut halt) = (None, None, None);
    for (key, value, t) in p.settings()? {
        match key.as_str() {
            "states" => states = Some(setting_number::<u32>(&value, &key, &t)?),
            "symbols" => symbols = Some(setting_number::<u32>(&value, &key, &t)?),
            "halt" => halt = Some(setting_number::<u32>(&value, &key, &t)?),
            "blank" if value == "1" => {}
            "blank" => return Err(Parser::err_at(&t, "the blank symbol is always a1")),
            _ => return Err(Parser::err_at(&t, format!("unknown setting `{}`", key))),
        }
    }
    let head = head.unwrap();
    let states = states.ok_or_else(|| Parser::err_at(&head, "missing `states=`"))?;
    let symbols = symbols.ok_or_else(|| Parser::err_at(&head, "missing `symbols=`"))?;
    let mut tm = TuringMachine::new(states, symbols, halt.unwrap_or(states))
        .map_err(|e| Parser::err_at(&head, e.to_string()))?;
    p.end_of_line()?;
    loop {
        p.skip_blank();
        if p.peek().is_none() {
            break;
        }
        let start = p.peek().cloned().unwrap();
        p.keyword("delta")?;
        let (q, _) = prefixed(&mut p, 'q', "a state like q1")?;
        let (a, _) = prefixed(&mut p, 'a', "a symbol like a1")?;
        p.arrow()?;
        let (w, _) = prefixed(&mut p, 'a', "a symbol like a1")?;
        let (d, dt) = p.word("L or R")?;
        let dir = match d.as_str() {
            "L" => Dir::L,
            "R" => Dir::R,
            _ => return Err(Parser::err_at(&dt, "expected L or R")),
        };
        let (u, _) = prefixed(&mut p, 'q', "a state like q1")?;
        tm.add(q, a, w, dir, u).map_err(|e: TmError| Parser::err_at(&start, e.to_string()))?;
        p.end_of_line()?;
    }
    Ok(tm)
}

pub fn print_tm(tm: &TuringMachine) -> String {
    let mut out = format!("tm states={} symbols={} blank=1 halt={}\n", tm.states, tm.symbols, tm.halt);
    for (&(q, a), t) in &tm.delta {
        writeln!(out, "delta q{} a{} -> a{} {} q{}", q, a, t.write, t.dir, t.next).unwrap();
    }
    out
}

pub fn parse_cm(text: &str) -> Result<CmSpec, DslError> {
    let mut p = Parser::new(text)?;
    p.skip_blank();
    let head = p.peek().cloned();
    p.keyword("cm")?;
    let mut fields: [Option<u64>; 5] = [None; 5];
    let names = ["counters", "output", "states", "initial", "halt"];
    let mut alphabet = None;
    for (key, value, t) in p.settings()? {
        if key == "alphabet" {
            alphabet = Some(value.chars().collect::<Vec<char>>());
        } else if let Some(k) = names.iter().position(|n| *n == key) {
            fields[k] = Some(setting_number(&value, &key, &t)?);
        } else {
            return Err(Parser::err_at(&t, format!("unknown setting `{}`", key)));
        }
    }
    let head = head.unwrap();
    let mut vals = [0u64; 5];
    for (k, v) in fields.iter().enumerate() {
        vals[k] = v.ok_or_else(|| Parser::err_at(&head, format!("missing `{}=`", names[k])))?;
    }
    let [counters, output, states, initial, halt] = vals;
    if output == 0 || output > counters {
        return Err(Parser::err_at(&head, format!("output counter {} is out of range", output)));
    }
    let alphabet = alphabet.ok_or_else(|| Parser::err_at(&head, "missing `alphabet=`"))?;
    for c in &alphabet {
        if matches!(c, '*' | '_') {
            return Err(Parser::err_at(&head, format!("`{}` is reserved", c)));
        }
    }
    let counters = counters as usize;
    let mut spec = CmSpec {
        counters,
        output: output as usize - 1,
        states: states as u32,
        initial: initial as u32,
        halt: halt as u32,
        alphabet,
        entries: Vec::new(),
    };
    p.end_of_line()?;
    let counter = |p: &mut Parser, w: &str, t: &Token| -> Result<usize, DslError> {
        let _ = p;
        let i: usize = w
            .strip_prefix('c')
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Parser::err_at(t, format!("expected a counter like c1, found `{}`", w)))?;
        if i == 0 || i > counters {
            return Err(Parser::err_at(t, format!("counter c{} is out of range (1..={})", i, counters)));
        }
        Ok(i - 1)
    };
    loop {
        p.skip_blank();
        if p.peek().is_none() {
            break;
        }
        p.keyword("f")?;
        let (sym, st) = p.word("an input symbol, `*` or `_`")?;
        let read = match sym.as_str() {
            "*" => Read::Any,
            "_" => Read::End,
            s if s.chars().count() == 1 => {
                let c = s.chars().next().unwrap();
                if !spec.alphabet.contains(&c) {
                    return Err(Parser::err_at(&st, format!("symbol `{}` is not in the alphabet", c)));
                }
                Read::Sym(c)
            }
            _ => return Err(Parser::err_at(&st, format!("expected one symbol, found `{}`", sym))),
        };
        let (q, qt) = prefixed(&mut p, 'q', "a state like q1")?;
        let (tw, tt) = p.word("a test like c1=0, c1>0 or *")?;
        let test = if tw == "*" {
            Test::Any
        } else {
            let i = counter(&mut p, &tw, &tt)?;
            let zero = if p.at_punct('=') {
                true
            } else if p.at_punct('>') {
                false
            } else {
                return Err(p.err_here("expected `=0` or `>0`"));
            };
            p.pos += 1;
            let (z, zt) = p.word("0")?;
            if z != "0" {
                return Err(Parser::err_at(&zt, "counters are only compared with 0"));
            }
            if zero {
                Test::Zero(i)
            } else {
                Test::Pos(i)
            }
        };
        p.arrow()?;
        let (mv, mt) = p.word("Y or N")?;
        let advance = match mv.as_str() {
            "Y" => true,
            "N" => false,
            _ => return Err(Parser::err_at(&mt, "expected Y or N")),
        };
        let (u, ut) = prefixed(&mut p, 'q', "a state like q1")?;
        for (s, t) in [(q, &qt), (u, &ut)] {
            if s == 0 || s > spec.states {
                return Err(Parser::err_at(t, format!("state q{} is out of range", s)));
            }
        }
        let (opw, ot) = p.word("INC, DEC or NULL")?;
        let op = match opw.as_str() {
            "NULL" => Op::Null,
            "INC" | "DEC" => {
                let (cw, ct) = p.word("a counter like c1")?;
                let h = counter(&mut p, &cw, &ct)?;
                if opw == "INC" {
                    Op::Inc(h)
                } else {
                    Op::Dec(h)
                }
            }
            _ => return Err(Parser::err_at(&ot, "expected INC, DEC or NULL")),
        };
        p.end_of_line()?;
        spec.entries.push(Entry { read, state: q, test, advance, next: u, op });
    }
    Ok(spec)
}

pub fn print_cm(cm: &CmSpec) -> String {
    let mut out = format!(
        "cm counters={} output={} states={} initial={} halt={} alphabet={}\n",
        cm.counters,
        cm.output + 1,
        cm.states,
        cm.initial,
        cm.halt,
        cm.alphabet.iter().collect::<String>()
    );
    for e in &cm.entries {
        let read = match e.read {
            Read::Any => "*".to_string(),
            Read::End => "_".to_string(),
            Read::Sym(c) => c.to_string(),
        };
        let test = match e.test {
            Test::Any => "*".to_string(),
            Test::Zero(i) => format!("c{}=0", i + 1),
            Test::Pos(i) => format!("c{}>0", i + 1),
        };
        let op = match e.op {
            Op::Null => "NULL".to_string(),
            Op::Inc(h) => format!("INC c{}", h + 1),
            Op::Dec(h) => format!("DEC c{}", h + 1),
        };
        writeln!(
            out,
            "f {} q{} {} -> {} q{} {}",
            read,
            e.state,
            test,
            if e.advance { "Y" } else { "N" },
            e.next,
            op
        )
        .unwrap();
    }
    out
}

pub fn print_document(doc: &Document) -> String {
    match doc {
        Document::Snp(s) => print_snp(s),
        Document::Tm(t) => print_tm(t),
        Document::Cm(c) => print_cm(c),
    }
}

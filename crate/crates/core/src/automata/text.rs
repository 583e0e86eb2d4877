//! Line-oriented text format for automata.
//!
//! ```text
//! # K = { a^n b^n }
//! kind ocn
//! alphabet a b
//! states q0 qf
//! init q0 0
//! final qf 0
//! trans q0 a q0 +1
//! trans q0 eps qf 0
//! trans qf b qf -1
//! ```
//!
//! `zerotest q a q'` lines are allowed for `kind oca`. Counters on `init` and
//! `final` default to 0. Several `init` or `final` lines are normalized into a
//! single pair of fresh states, and `final q *` accepts in `q` with any counter.
//! A `#` at the start of a token comments out the rest of the line.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{
    normalize_acceptance, Alphabet, Config1, Edge, FinalCondition, Label, Machine, Nfa, Oca, Ocn, OcnTransition,
    StateId,
};

/// Largest absolute value accepted for deltas and counters in the text format.
pub const MAX_ABS_INT: i64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

pub(crate) fn err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, col, msg: msg.into() }
}

/// Splits a line into `(column, token)` pairs (columns are 1-based), dropping
/// comments.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            if ch == '#' {
                break;
            }
            start = Some(i);
        }
    }
    out
}

pub(crate) fn parse_int(tok: (usize, &str), line: usize) -> Result<i64, ParseError> {
    let s = tok.1.strip_prefix('+').unwrap_or(tok.1);
    let v: i64 = s
        .parse()
        .map_err(|_| err(line, tok.0, format!("expected an integer, found `{}`", tok.1)))?;
    if v.abs() > MAX_ABS_INT {
        return Err(err(line, tok.0, format!("integer {v} out of range (|x| <= 2^31)")));
    }
    Ok(v)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Nfa,
    Ocn,
    Oca,
}

enum FinalSpec {
    Config(Config1),
    AnyCounter(StateId),
}

struct Pending {
    line: usize,
    col: usize,
    label: String,
    from: StateId,
    to: StateId,
    delta: i64,
}

#[derive(Default)]
struct Parser {
    kind: Option<Kind>,
    alphabet: Option<Alphabet>,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    declared: bool,
    inits: Vec<(usize, Config1)>,
    finals: Vec<(usize, FinalSpec)>,
    trans: Vec<Pending>,
    zero: Vec<Pending>,
}

impl Parser {
    fn state(&mut self, tok: (usize, &str), line: usize) -> Result<StateId, ParseError> {
        if let Some(&i) = self.index.get(tok.1) {
            return Ok(i);
        }
        if self.declared {
            return Err(err(line, tok.0, format!("undeclared state `{}`", tok.1)));
        }
        let i = self.states.len();
        self.states.push(tok.1.to_string());
        self.index.insert(tok.1.to_string(), i);
        Ok(i)
    }

    fn line(&mut self, line: usize, toks: &[(usize, &str)]) -> Result<(), ParseError> {
        let Some(&(col, kw)) = toks.first() else { return Ok(()) };
        let args = &toks[1..];
        let arity = |lo: usize, hi: usize| -> Result<(), ParseError> {
            if args.len() < lo || args.len() > hi {
                Err(err(line, col, format!("`{kw}` takes {lo} to {hi} arguments, found {}", args.len())))
            } else {
                Ok(())
            }
        };
        if kw != "kind" && self.kind.is_none() {
            return Err(err(line, col, "the first directive must be `kind nfa|ocn|oca`"));
        }
        match kw {
            "kind" => {
                arity(1, 1)?;
                if self.kind.is_some() {
                    return Err(err(line, col, "duplicate `kind`"));
                }
                self.kind = Some(match args[0].1 {
                    "nfa" => Kind::Nfa,
                    "ocn" => Kind::Ocn,
                    "oca" => Kind::Oca,
                    other => return Err(err(line, args[0].0, format!("unknown kind `{other}`"))),
                });
            }
            "alphabet" => {
                if self.alphabet.is_some() {
                    return Err(err(line, col, "duplicate `alphabet`"));
                }
                let a = Alphabet::new(args.iter().map(|t| t.1)).map_err(|e| err(line, col, e.to_string()))?;
                self.alphabet = Some(a);
            }
            "states" => {
                if self.declared || !self.states.is_empty() {
                    return Err(err(line, col, "`states` must appear once, before any state is used"));
                }
                for &t in args {
                    if self.index.contains_key(t.1) {
                        return Err(err(line, t.0, format!("duplicate state `{}`", t.1)));
                    }
                    self.state(t, line)?;
                }
                self.declared = true;
            }
            "init" | "final" => {
                arity(1, 2)?;
                let q = self.state(args[0], line)?;
                if self.kind == Some(Kind::Nfa) && args.len() == 2 {
                    return Err(err(line, args[1].0, "NFA configurations take no counter"));
                }
                if kw == "final" && args.get(1).map(|t| t.1) == Some("*") {
                    self.finals.push((line, FinalSpec::AnyCounter(q)));
                    return Ok(());
                }
                let c = match args.get(1) {
                    Some(&t) => parse_int(t, line)?,
                    None => 0,
                };
                if c < 0 {
                    return Err(err(line, args[1].0, "counter values must be nonnegative"));
                }
                if kw == "init" {
                    self.inits.push((line, (q, c)));
                } else {
                    self.finals.push((line, FinalSpec::Config((q, c))));
                }
            }
            "trans" => {
                if self.kind == Some(Kind::Nfa) {
                    arity(3, 3)?;
                } else {
                    arity(4, 4)?;
                }
                let from = self.state(args[0], line)?;
                let to = self.state(args[2], line)?;
                let delta = if args.len() == 4 { parse_int(args[3], line)? } else { 0 };
                self.trans.push(Pending { line, col: args[1].0, label: args[1].1.to_string(), from, to, delta });
            }
            "zerotest" => {
                if self.kind != Some(Kind::Oca) {
                    return Err(err(line, col, "`zerotest` is only allowed for kind oca"));
                }
                arity(3, 3)?;
                let from = self.state(args[0], line)?;
                let to = self.state(args[2], line)?;
                self.zero.push(Pending { line, col: args[1].0, label: args[1].1.to_string(), from, to, delta: 0 });
            }
            other => return Err(err(line, col, format!("unknown directive `{other}`"))),
        }
        Ok(())
    }

    fn finish(self, last_line: usize) -> Result<Machine, ParseError> {
        let end = last_line.max(1);
        let kind = self.kind.ok_or_else(|| err(end, 1, "missing `kind`"))?;
        let alphabet = self.alphabet.ok_or_else(|| err(end, 1, "missing `alphabet`"))?;
        if self.states.is_empty() {
            return Err(err(end, 1, "no states"));
        }
        let label = |p: &Pending| alphabet.parse_label(&p.label).map_err(|e| err(p.line, p.col, e.to_string()));
        let trans = self
            .trans
            .iter()
            .map(|p| Ok(OcnTransition { from: p.from, label: label(p)?, to: p.to, delta: p.delta }))
            .collect::<Result<Vec<_>, ParseError>>()?;
        let zero = self
            .zero
            .iter()
            .map(|p| Ok(Edge { from: p.from, label: label(p)?, to: p.to }))
            .collect::<Result<Vec<_>, ParseError>>()?;
        if self.inits.is_empty() {
            return Err(err(end, 1, "missing `init`"));
        }
        if self.finals.is_empty() {
            return Err(err(end, 1, "missing `final`"));
        }
        let build = |e: super::AutomataError| err(end, 1, e.to_string());

        if kind == Kind::Nfa {
            if self.inits.len() > 1 || self.finals.len() > 1 {
                return Err(err(self.inits.last().map_or(end, |x| x.0), 1, "an NFA has one initial and one final state"));
            }
            let FinalSpec::Config((f, _)) = self.finals[0].1 else {
                return Err(err(self.finals[0].0, 1, "NFA configurations take no counter"));
            };
            let edges = trans.iter().map(|t| Edge { from: t.from, label: t.label, to: t.to }).collect();
            return Nfa::new(alphabet, self.states, self.inits[0].1 .0, f, edges).map(Machine::Nfa).map_err(build);
        }

        let inits: Vec<Config1> = self.inits.iter().map(|x| x.1).collect();
        let mut configs = Vec::new();
        let mut any = Vec::new();
        for (_, f) in &self.finals {
            match *f {
                FinalSpec::Config(c) => configs.push(c),
                FinalSpec::AnyCounter(q) => any.push(q),
            }
        }
        let simple = inits.len() == 1 && any.is_empty() && configs.len() == 1;
        let (i0, f0) = if simple { (inits[0], configs[0]) } else { ((inits[0].0, 0), (inits[0].0, 0)) };
        let net = Ocn::new(alphabet, self.states, i0, f0, trans).map_err(build)?;
        let mut oca = Oca::new(net, zero).map_err(build)?;
        if !simple {
            let cond = if any.is_empty() {
                FinalCondition::Configs(configs)
            } else {
                // route configuration finals through their exact counters first
                let mut oca2 = oca.clone();
                if !configs.is_empty() {
                    oca2 = normalize_acceptance(&oca2, &[oca2.initial()], &FinalCondition::Configs(configs));
                    any.push(oca2.final_config().0);
                }
                oca = oca2;
                FinalCondition::States(any)
            };
            oca = normalize_acceptance(&oca, &inits, &cond);
        }
        Ok(match kind {
            Kind::Ocn => Machine::Ocn(oca.into_ocn().expect("kind ocn has no zero tests")),
            _ => Machine::Oca(oca),
        })
    }
}

/// Parses a machine description.
pub fn parse_machine(src: &str) -> Result<Machine, ParseError> {
    let mut p = Parser::default();
    let mut last_line = 0;
    for (ln, raw) in src.lines().enumerate() {
        last_line = ln + 1;
        p.line(ln + 1, &tokens(raw))?;
    }
    p.finish(last_line)
}

fn label_str(alphabet: &Alphabet, l: Label) -> &str {
    alphabet.label_name(l)
}

fn header(out: &mut String, kind: &str, alphabet: &Alphabet, states: &[String], comments: &[String]) {
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "kind {kind}");
    let _ = writeln!(out, "alphabet {}", alphabet.names().join(" "));
    let _ = writeln!(out, "states {}", states.join(" "));
}

/// Serializes a machine; `comments` become leading `#` lines.
pub fn write_machine_with_comments(m: &Machine, comments: &[String]) -> String {
    let mut out = String::new();
    match m {
        Machine::Nfa(n) => {
            let s = n.states();
            header(&mut out, "nfa", n.alphabet(), s, comments);
            let _ = writeln!(out, "init {}", s[n.initial()]);
            let _ = writeln!(out, "final {}", s[n.final_state()]);
            for t in n.transitions() {
                let _ = writeln!(out, "trans {} {} {}", s[t.from], label_str(n.alphabet(), t.label), s[t.to]);
            }
        }
        Machine::Ocn(o) => write_net(&mut out, "ocn", o, &[], comments),
        Machine::Oca(o) => write_net(&mut out, "oca", o.net(), o.zero_tests(), comments),
    }
    out
}

fn write_net(out: &mut String, kind: &str, o: &Ocn, zero: &[Edge], comments: &[String]) {
    let s = o.states();
    header(out, kind, o.alphabet(), s, comments);
    let _ = writeln!(out, "init {} {}", s[o.initial().0], o.initial().1);
    let _ = writeln!(out, "final {} {}", s[o.final_config().0], o.final_config().1);
    for t in o.transitions() {
        let _ = writeln!(out, "trans {} {} {} {:+}", s[t.from], label_str(o.alphabet(), t.label), s[t.to], t.delta);
    }
    for z in zero {
        let _ = writeln!(out, "zerotest {} {} {}", s[z.from], label_str(o.alphabet(), z.label), s[z.to]);
    }
}

pub fn write_machine(m: &Machine) -> String {
    write_machine_with_comments(m, &[])
}

//! Instance generators from the hardness arguments, and oracles to test them.
//!
//! * [`gen_pspace_instance`] turns an acyclic one-counter automaton `A` and a
//!   bound `b` into nets `B`, `B'` whose languages intersect iff `A` has an
//!   accepting run with counter values at most `b`. `B` follows `A` and
//!   ignores zero tests; `B'` keeps the counter at `b - v` and checks zero
//!   tests by subtracting and re-adding `b`.
//! * [`gen_undecidability_instance`] turns a deterministic two-counter machine
//!   and an input `k` into one-counter automata `A1`, `A2` whose languages
//!   intersect iff the machine accepts `k`. `A1` tracks the first counter and
//!   guesses the tests on the second; `A2` does the opposite.
//!
//! Two-counter machine text format:
//!
//! ```text
//! # decrement c1 until zero, then accept
//! init q0
//! accept qa
//! reject qr
//! state q0 type2 c1 q0 qa
//! ```
//!
//! `state q type1 cI q'` increments `cI`; `state q type2 cI q' q''`
//! decrements `cI` and goes to `q'` if it is positive, and goes to `q''`
//! otherwise.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automata::text::{err, tokens, ParseError};
use crate::automata::{Alphabet, Edge, Label, Letter, Oca, Ocn, OcnTransition, StateId, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("configuration ({state}, {counter}) lies on a cycle of {bound}-bounded configurations")]
    NotAcyclic { state: String, counter: i64, bound: u64 },
    #[error("malformed two-counter machine: {0}")]
    Malformed(String),
}

/// Counter index, `0` for `c1` and `1` for `c2`.
pub type CounterId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    /// Increment the counter and go to `next`.
    Inc { counter: CounterId, next: StateId },
    /// If the counter is positive, decrement it and go to `next`; otherwise
    /// go to `zero`.
    Dec { counter: CounterId, next: StateId, zero: StateId },
}

/// A deterministic two-counter machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCounterMachine {
    states: Vec<String>,
    init: StateId,
    accept: StateId,
    reject: StateId,
    instrs: Vec<Option<Instr>>,
}

impl TwoCounterMachine {
    /// Every state other than `accept` and `reject` needs exactly one
    /// instruction; those two need none.
    pub fn new(
        states: Vec<String>,
        init: StateId,
        accept: StateId,
        reject: StateId,
        instrs: Vec<Option<Instr>>,
    ) -> Result<Self, ReductionError> {
        let n = states.len();
        let bad = |m: String| Err(ReductionError::Malformed(m));
        if instrs.len() != n || init >= n || accept >= n || reject >= n {
            return bad("state index out of range".into());
        }
        if accept == reject {
            return bad("the accepting and rejecting states coincide".into());
        }
        if HashSet::<&String>::from_iter(&states).len() != n {
            return bad("duplicate state name".into());
        }
        for (q, ins) in instrs.iter().enumerate() {
            let halting = q == accept || q == reject;
            match ins {
                Some(_) if halting => return bad(format!("halting state `{}` has an instruction", states[q])),
                None if !halting => return bad(format!("state `{}` has no instruction", states[q])),
                Some(Instr::Inc { counter, next }) if *counter > 1 || *next >= n => return bad("bad instruction".into()),
                Some(Instr::Dec { counter, next, zero }) if *counter > 1 || *next >= n || *zero >= n => {
                    return bad("bad instruction".into())
                }
                _ => {}
            }
        }
        Ok(TwoCounterMachine { states, init, accept, reject, instrs })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn init(&self) -> StateId {
        self.init
    }
    pub fn accept(&self) -> StateId {
        self.accept
    }
    pub fn reject(&self) -> StateId {
        self.reject
    }
    pub fn instr(&self, q: StateId) -> Option<Instr> {
        self.instrs[q]
    }

    /// Letter naming the instruction of state `q`.
    pub fn letter_name(&self, q: StateId) -> String {
        format!("t_{}", self.states[q])
    }

    /// The input alphabet of the generated automata: one letter per
    /// instruction.
    pub fn alphabet(&self) -> Alphabet {
        let names: Vec<String> = (0..self.states.len()).filter(|&q| self.instrs[q].is_some()).map(|q| self.letter_name(q)).collect();
        Alphabet::new(names).expect("state names have no whitespace")
    }

    /// The word of a trace (states whose instruction fired).
    pub fn trace_word(&self, trace: &[StateId]) -> Word {
        let a = self.alphabet();
        trace.iter().map(|&q| a.letter(&self.letter_name(q)).expect("non-halting state")).collect()
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, StateId> = HashMap::new();
        let mut id = |s: &str, names: &mut Vec<String>| -> StateId {
            *ids.entry(s.to_string()).or_insert_with(|| {
                names.push(s.to_string());
                names.len() - 1
            })
        };
        let mut init = None;
        let mut accept = None;
        let mut reject = None;
        let mut instrs: HashMap<StateId, Instr> = HashMap::new();
        let counter = |tok: (usize, &str), line: usize| match tok.1 {
            "c1" => Ok(0),
            "c2" => Ok(1),
            other => Err(err(line, tok.0, format!("expected `c1` or `c2`, found `{other}`"))),
        };
        let mut last_line = 0;
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let toks = tokens(raw);
            let Some(&(col, head)) = toks.first() else { continue };
            let want = |k: usize| -> Result<(), ParseError> {
                if toks.len() == k {
                    Ok(())
                } else {
                    Err(err(line, col, format!("`{head}` takes {} arguments, found {}", k - 1, toks.len() - 1)))
                }
            };
            match head {
                "init" | "accept" | "reject" => {
                    want(2)?;
                    let q = id(toks[1].1, &mut names);
                    let slot = match head {
                        "init" => &mut init,
                        "accept" => &mut accept,
                        _ => &mut reject,
                    };
                    if slot.replace(q).is_some() {
                        return Err(err(line, col, format!("duplicate `{head}` line")));
                    }
                }
                "state" => {
                    if toks.len() < 3 {
                        return Err(err(line, col, "`state` needs a name and a type"));
                    }
                    let q = id(toks[1].1, &mut names);
                    let ins = match toks[2].1 {
                        "type1" => {
                            want(5)?;
                            Instr::Inc { counter: counter(toks[3], line)?, next: id(toks[4].1, &mut names) }
                        }
                        "type2" => {
                            want(6)?;
                            Instr::Dec {
                                counter: counter(toks[3], line)?,
                                next: id(toks[4].1, &mut names),
                                zero: id(toks[5].1, &mut names),
                            }
                        }
                        other => return Err(err(line, toks[2].0, format!("expected `type1` or `type2`, found `{other}`"))),
                    };
                    if instrs.insert(q, ins).is_some() {
                        return Err(err(line, col, format!("second instruction for state `{}`", toks[1].1)));
                    }
                }
                other => return Err(err(line, col, format!("unknown directive `{other}`"))),
            }
        }
        let need = |v: Option<StateId>, what: &str| v.ok_or_else(|| err(last_line.max(1), 1, format!("missing `{what}` line")));
        let (init, accept, reject) = (need(init, "init")?, need(accept, "accept")?, need(reject, "reject")?);
        let table = (0..names.len()).map(|q| instrs.get(&q).copied()).collect();
        TwoCounterMachine::new(names, init, accept, reject, table).map_err(|e| err(1, 1, e.to_string()))
    }
}

impl fmt::Display for TwoCounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.states;
        writeln!(f, "init {}", s[self.init])?;
        writeln!(f, "accept {}", s[self.accept])?;
        writeln!(f, "reject {}", s[self.reject])?;
        for (q, ins) in self.instrs.iter().enumerate() {
            match ins {
                Some(Instr::Inc { counter, next }) => writeln!(f, "state {} type1 c{} {}", s[q], counter + 1, s[*next])?,
                Some(Instr::Dec { counter, next, zero }) => {
                    writeln!(f, "state {} type2 c{} {} {}", s[q], counter + 1, s[*next], s[*zero])?
                }
                None => {}
            }
        }
        Ok(())
    }
}

/// Outcome of [`run_2cm`]. Traces list the states whose instruction fired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunResult {
    Accepted(Vec<StateId>),
    Rejected(Vec<StateId>),
    Timeout,
}

/// Runs the machine from `(init, k, 0)` for at most `max_steps` steps.
/// Halting in the accepting state with a nonzero counter counts as
/// rejection.
pub fn run_2cm(m: &TwoCounterMachine, k: u64, max_steps: usize) -> RunResult {
    let mut q = m.init;
    let mut c = [k, 0u64];
    let mut trace = Vec::new();
    loop {
        if q == m.accept {
            return if c == [0, 0] { RunResult::Accepted(trace) } else { RunResult::Rejected(trace) };
        }
        if q == m.reject {
            return RunResult::Rejected(trace);
        }
        if trace.len() >= max_steps {
            return RunResult::Timeout;
        }
        trace.push(q);
        q = match m.instrs[q].expect("validated") {
            Instr::Inc { counter, next } => {
                c[counter] += 1;
                next
            }
            Instr::Dec { counter, next, zero } => {
                if c[counter] > 0 {
                    c[counter] -= 1;
                    next
                } else {
                    zero
                }
            }
        };
    }
}

/// The pair `(A1, A2)` for input `k`. `A1` starts in `(init, k)`, `A2` in
/// `(init, 0)`; both accept in `(accept, 0)`.
pub fn gen_undecidability_instance(m: &TwoCounterMachine, k: u64) -> (Oca, Oca) {
    let alphabet = m.alphabet();
    let side = |own: CounterId, start: i64| -> Oca {
        let mut ts = Vec::new();
        let mut zs = Vec::new();
        for (q, ins) in m.instrs.iter().enumerate() {
            let Some(ins) = ins else { continue };
            let label = Label::Sym(alphabet.letter(&m.letter_name(q)).expect("instruction letter"));
            match *ins {
                Instr::Inc { counter, next } => {
                    ts.push(OcnTransition { from: q, label, to: next, delta: i64::from(counter == own) });
                }
                Instr::Dec { counter, next, zero } if counter == own => {
                    ts.push(OcnTransition { from: q, label, to: next, delta: -1 });
                    zs.push(Edge { from: q, label, to: zero });
                }
                Instr::Dec { next, zero, .. } => {
                    ts.push(OcnTransition { from: q, label, to: next, delta: 0 });
                    ts.push(OcnTransition { from: q, label, to: zero, delta: 0 });
                }
            }
        }
        let net = Ocn::new(alphabet.clone(), m.states.clone(), (m.init, start), (m.accept, 0), ts).expect("valid by construction");
        Oca::new(net, zs).expect("valid by construction")
    };
    (side(0, k as i64), side(1, 0))
}

/// Comment lines recording where an undecidability instance came from.
pub fn undecidability_comments(m: &TwoCounterMachine, k: u64, which: usize) -> Vec<String> {
    let mut out = vec![format!("A{which} generated from a two-counter machine with input k = {k}")];
    out.extend(m.to_string().lines().map(|l| format!("  {l}")));
    out
}

/// Whether `a` has an accepting run with every counter value in `0..=b`,
/// by search over the finite configuration graph.
pub fn bounded_nonemptiness(a: &Oca, b: u64) -> bool {
    let b = b as i64;
    let (q0, c0) = a.initial();
    if c0 > b {
        return false;
    }
    let succ = bounded_successors(a, b);
    let mut seen = HashSet::from([(q0, c0)]);
    let mut queue = VecDeque::from([(q0, c0)]);
    while let Some(c) = queue.pop_front() {
        if c == a.final_config() {
            return true;
        }
        for d in succ(c) {
            if seen.insert(d) {
                queue.push_back(d);
            }
        }
    }
    false
}

fn bounded_successors(a: &Oca, b: i64) -> impl Fn((StateId, i64)) -> Vec<(StateId, i64)> + '_ {
    move |(q, c)| {
        let mut out = Vec::new();
        for t in a.transitions().iter().filter(|t| t.from == q) {
            let d = c + t.delta;
            if (0..=b).contains(&d) {
                out.push((t.to, d));
            }
        }
        if c == 0 {
            out.extend(a.zero_tests().iter().filter(|z| z.from == q).map(|z| (z.to, 0)));
        }
        out
    }
}

/// A configuration on a cycle of the `b`-bounded reachable configuration
/// graph, by iterative depth-first search.
fn bounded_cycle(a: &Oca, b: i64) -> Option<(StateId, i64)> {
    let succ = bounded_successors(a, b);
    let start = a.initial();
    if start.1 > b {
        return None;
    }
    // true while on the stack, false when done
    let mut on_stack: HashMap<(StateId, i64), bool> = HashMap::from([(start, true)]);
    let mut stack = vec![(start, succ(start), 0usize)];
    while let Some((c, next, i)) = stack.last_mut() {
        if *i == next.len() {
            on_stack.insert(*c, false);
            stack.pop();
            continue;
        }
        let d = next[*i];
        *i += 1;
        match on_stack.get(&d) {
            Some(true) => return Some(d),
            Some(false) => {}
            None => {
                on_stack.insert(d, true);
                let s = succ(d);
                stack.push((d, s, 0));
            }
        }
    }
    None
}

/// A one-counter automaton with no cycle among its reachable
/// configurations with counter at most `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicOca {
    oca: Oca,
    bound: u64,
}

impl AcyclicOca {
    /// Normalizes `a` and searches the `b`-bounded reachable configuration
    /// graph for a cycle.
    pub fn certify(a: &Oca, b: u64) -> Result<Self, ReductionError> {
        let a = a.normalized();
        if let Some((state, counter)) = bounded_cycle(&a, b as i64) {
            return Err(ReductionError::NotAcyclic { state: a.states()[state].clone(), counter, bound: b });
        }
        Ok(AcyclicOca { oca: a, bound: b })
    }

    pub fn oca(&self) -> &Oca {
        &self.oca
    }
    pub fn bound(&self) -> u64 {
        self.bound
    }
}

/// The pair `(B, B')` for an acyclic automaton and bound `b`.
///
/// The alphabet has a letter `t{i}` for the `i`-th transition and `z{j}` for
/// the `j`-th zero test of the normalized automaton.
pub fn gen_pspace_instance(a: &Oca, b: u64) -> Result<(Ocn, Ocn), ReductionError> {
    let cert = AcyclicOca::certify(a, b)?;
    let a = cert.oca();
    let nt = a.transitions().len();
    let names: Vec<String> = (0..nt).map(|i| format!("t{i}")).chain((0..a.zero_tests().len()).map(|j| format!("z{j}"))).collect();
    let alphabet = Alphabet::new(names).expect("valid letters");
    let t = |i: usize| Label::Sym(alphabet.letter(&format!("t{i}")).expect("letter"));
    let z = |j: usize| Label::Sym(alphabet.letter(&format!("z{j}")).expect("letter"));
    let bi = b as i64;

    let mut ub = Vec::new();
    let mut ub2 = Vec::new();
    for (i, tr) in a.transitions().iter().enumerate() {
        ub.push(OcnTransition { from: tr.from, label: t(i), to: tr.to, delta: tr.delta });
        ub2.push(OcnTransition { from: tr.from, label: t(i), to: tr.to, delta: -tr.delta });
    }
    let mut states2 = a.states().to_vec();
    let fresh = |base: String, states: &mut Vec<String>| -> StateId {
        let mut name = base;
        while states.contains(&name) {
            name.push('\'');
        }
        states.push(name);
        states.len() - 1
    };
    for (j, zt) in a.zero_tests().iter().enumerate() {
        ub.push(OcnTransition { from: zt.from, label: z(j), to: zt.to, delta: 0 });
        let p = fresh(format!("z{j}.p"), &mut states2);
        let p2 = fresh(format!("z{j}.p'"), &mut states2);
        ub2.push(OcnTransition { from: zt.from, label: Label::Eps, to: p, delta: -bi });
        ub2.push(OcnTransition { from: p, label: Label::Eps, to: p2, delta: bi });
        ub2.push(OcnTransition { from: p2, label: z(j), to: zt.to, delta: 0 });
    }
    let (q0, _) = a.initial();
    let (qf, _) = a.final_config();
    let big_b = Ocn::new(alphabet.clone(), a.states().to_vec(), (q0, 0), (qf, 0), ub).expect("valid by construction");
    let big_b2 = Ocn::new(alphabet, states2, (q0, bi), (qf, bi), ub2).expect("valid by construction");
    Ok((big_b, big_b2))
}

/// Comment lines recording where a hardness instance came from.
pub fn pspace_comments(source: &str, b: u64, which: &str) -> Vec<String> {
    vec![format!("{which} generated from `{source}` with bound b = {b}")]
}

/// A word of length at most `max_len` accepted by both automata, found by
/// exhaustive search over pairs of configurations with counters at most
/// `cap`. When neither automaton has ε-transitions that raise the counter,
/// `cap = max initial counter + max_len · max |delta|` makes the search
/// exact.
pub fn common_word_bounded(x: &Oca, y: &Oca, max_len: usize, cap: i64) -> Option<Word> {
    type Node = (StateId, i64, StateId, i64);
    let start: Node = (x.initial().0, x.initial().1, y.initial().0, y.initial().1);
    if start.1 > cap || start.3 > cap {
        return None;
    }
    let moves = |a: &Oca, q: StateId, c: i64| -> Vec<(Label, StateId, i64)> {
        let mut out: Vec<(Label, StateId, i64)> =
            a.transitions().iter().filter(|t| t.from == q).map(|t| (t.label, t.to, c + t.delta)).collect();
        if c == 0 {
            out.extend(a.zero_tests().iter().filter(|z| z.from == q).map(|z| (z.label, z.to, 0)));
        }
        out.retain(|m| (0..=cap).contains(&m.2));
        out
    };
    // layers by word length; ε moves stay in the layer
    let mut parent: HashMap<(Node, usize), ((Node, usize), Option<Letter>)> = HashMap::new();
    let mut layer: Vec<Node> = vec![start];
    parent.insert((start, 0), ((start, 0), None));
    for len in 0..=max_len {
        // ε closure of the layer
        let mut queue: VecDeque<Node> = layer.iter().copied().collect();
        while let Some(n) = queue.pop_front() {
            let mut next = Vec::new();
            for (l, q, c) in moves(x, n.0, n.1) {
                if l == Label::Eps {
                    next.push((q, c, n.2, n.3));
                }
            }
            for (l, p, d) in moves(y, n.2, n.3) {
                if l == Label::Eps {
                    next.push((n.0, n.1, p, d));
                }
            }
            for m in next {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry((m, len)) {
                    e.insert(((n, len), None));
                    layer.push(m);
                    queue.push_back(m);
                }
            }
        }
        if let Some(&hit) = layer.iter().find(|n| (n.0, n.1) == x.final_config() && (n.2, n.3) == y.final_config()) {
            let mut word = Vec::new();
            let mut cur = (hit, len);
            while cur != (start, 0) {
                let (prev, l) = parent[&cur];
                word.extend(l);
                cur = prev;
            }
            word.reverse();
            return Some(word);
        }
        if len == max_len {
            break;
        }
        let mut next_layer = Vec::new();
        for &n in &layer {
            for (l, q, c) in moves(x, n.0, n.1) {
                let Label::Sym(letter) = l else { continue };
                for (l2, p, d) in moves(y, n.2, n.3) {
                    if l2 == l {
                        let m = (q, c, p, d);
                        if let std::collections::hash_map::Entry::Vacant(e) = parent.entry((m, len + 1)) {
                            e.insert(((n, len), Some(letter)));
                            next_layer.push(m);
                        }
                    }
                }
            }
        }
        layer = next_layer;
    }
    None
}

/// The exact-search cap for [`common_word_bounded`] described there.
pub fn letter_bound_cap(x: &Oca, y: &Oca, max_len: usize) -> i64 {
    let delta = x.net().max_abs_delta().max(y.net().max_abs_delta()).max(1);
    x.initial().1.max(y.initial().1) + max_len as i64 * delta
}

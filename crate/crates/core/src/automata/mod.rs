//! Finite automata, one-counter nets (OCN), one-counter automata with zero
//! tests (OCA) and two-dimensional integer VASS.
//!
//! All machines are immutable after construction. State ids are dense indices
//! into the state-name table; transitions are kept sorted and deduplicated so
//! that every traversal is deterministic.

mod builder;
mod ops;
pub mod text;
mod words;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builder::MachineBuilder;
pub use ops::{
    cross_product, normalize_acceptance, product_nfa_nfa, product_oca_nfa, product_ocn_nfa,
    reverse_vass2, FinalCondition,
};
pub use words::{enumerate_words, enumerate_words_with_cap, Language, DEFAULT_WORD_CAP};

pub type StateId = usize;

/// A configuration of a one-counter machine: control state and counter value.
pub type Config1 = (StateId, i64);

/// A configuration of a [`Vass2`].
pub type Config2 = (StateId, [i64; 2]);

/// The reserved spelling of the empty label in text formats.
pub const EPSILON: &str = "eps";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown state id {0}")]
    UnknownState(StateId),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("invalid letter name `{0}`")]
    InvalidLetter(String),
    #[error("negative counter {0} in a configuration")]
    NegativeCounter(i64),
    #[error("word length {max_len} exceeds the enumeration cap {cap}")]
    CapExceeded { max_len: usize, cap: usize },
}

/// Index of a letter in its [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub u32);

/// A transition label: either a letter or the empty word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Eps,
    Sym(Letter),
}

impl Label {
    pub fn letter(self) -> Option<Letter> {
        match self {
            Label::Eps => None,
            Label::Sym(l) => Some(l),
        }
    }
}

/// A finite word. Epsilon cannot occur in it by construction.
pub type Word = Vec<Letter>;

/// A finite, sorted set of letter names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, AutomataError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        for n in &set {
            if n == EPSILON || n.is_empty() || n.chars().any(char::is_whitespace) || n.starts_with('#') {
                return Err(AutomataError::InvalidLetter(n.clone()));
            }
        }
        Ok(Alphabet { names: set.into_iter().collect() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.0 as usize]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| Letter(i as u32))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len() as u32).map(Letter)
    }

    pub fn label_name(&self, l: Label) -> &str {
        match l {
            Label::Eps => EPSILON,
            Label::Sym(x) => self.name(x),
        }
    }

    pub fn parse_label(&self, s: &str) -> Result<Label, AutomataError> {
        if s == EPSILON {
            return Ok(Label::Eps);
        }
        self.letter(s).map(Label::Sym).ok_or_else(|| AutomataError::UnknownLetter(s.to_string()))
    }

    /// Parses a word. Whitespace-separated tokens are letter names; a single
    /// token is split into characters when every letter is one character long.
    /// `eps` and the empty string denote the empty word.
    pub fn parse_word(&self, s: &str) -> Result<Word, AutomataError> {
        let s = s.trim();
        if s.is_empty() || s == EPSILON {
            return Ok(Vec::new());
        }
        let tokens: Vec<String> = if s.contains(char::is_whitespace) {
            s.split_whitespace().map(str::to_string).collect()
        } else if self.letter(s).is_some() {
            vec![s.to_string()]
        } else if self.names.iter().all(|n| n.chars().count() == 1) {
            s.chars().map(|c| c.to_string()).collect()
        } else {
            vec![s.to_string()]
        };
        tokens
            .iter()
            .map(|t| self.letter(t).ok_or_else(|| AutomataError::UnknownLetter(t.clone())))
            .collect()
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return EPSILON.to_string();
        }
        let single = self.names.iter().all(|n| n.chars().count() == 1);
        let parts: Vec<&str> = w.iter().map(|&l| self.name(l)).collect();
        if single {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    pub(crate) fn check_same(&self, other: &Alphabet) -> Result<(), AutomataError> {
        if self == other {
            Ok(())
        } else {
            Err(AutomataError::AlphabetMismatch {
                left: self.names.clone(),
                right: other.names.clone(),
            })
        }
    }
}

/// An NFA transition, also used for zero tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: StateId,
    pub label: Label,
    pub to: StateId,
}

/// A counter-updating transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OcnTransition {
    pub from: StateId,
    pub label: Label,
    pub to: StateId,
    pub delta: i64,
}

fn check_names(states: &[String]) -> Result<(), AutomataError> {
    let mut seen = BTreeSet::new();
    for s in states {
        if !seen.insert(s.as_str()) {
            return Err(AutomataError::DuplicateState(s.clone()));
        }
    }
    Ok(())
}

fn check_id(states: &[String], id: StateId) -> Result<(), AutomataError> {
    if id < states.len() {
        Ok(())
    } else {
        Err(AutomataError::UnknownState(id))
    }
}

/// Nondeterministic finite automaton with a single initial and a single final state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    final_state: StateId,
    transitions: Vec<Edge>,
}

impl Nfa {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        final_state: StateId,
        mut transitions: Vec<Edge>,
    ) -> Result<Self, AutomataError> {
        check_names(&states)?;
        check_id(&states, initial)?;
        check_id(&states, final_state)?;
        for t in &transitions {
            check_id(&states, t.from)?;
            check_id(&states, t.to)?;
            if let Label::Sym(l) = t.label {
                if l.0 as usize >= alphabet.len() {
                    return Err(AutomataError::UnknownLetter(format!("#{}", l.0)));
                }
            }
        }
        transitions.sort();
        transitions.dedup();
        Ok(Nfa { alphabet, states, initial, final_state, transitions })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn initial(&self) -> StateId {
        self.initial
    }
    pub fn final_state(&self) -> StateId {
        self.final_state
    }
    pub fn transitions(&self) -> &[Edge] {
        &self.transitions
    }
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    /// The NFA accepting exactly `Σ*`.
    pub fn universal(alphabet: &Alphabet) -> Nfa {
        let transitions = alphabet.letters().map(|l| Edge { from: 0, label: Label::Sym(l), to: 0 }).collect();
        Nfa::new(alphabet.clone(), vec!["u".into()], 0, 0, transitions).expect("valid by construction")
    }

    /// The NFA accepting nothing.
    pub fn empty_language(alphabet: &Alphabet) -> Nfa {
        Nfa::new(alphabet.clone(), vec!["i".into(), "f".into()], 0, 1, Vec::new()).expect("valid by construction")
    }

    /// The NFA accepting `w · Σ^{≤ extra}`; with `extra == 0` it accepts `w` only.
    pub fn prefix_line(alphabet: &Alphabet, w: &[Letter], extra: usize) -> Nfa {
        let n = w.len() + extra;
        let states = (0..=n).map(|i| format!("l{i}")).collect();
        let mut transitions = Vec::new();
        for (i, &l) in w.iter().enumerate() {
            transitions.push(Edge { from: i, label: Label::Sym(l), to: i + 1 });
        }
        for i in w.len()..n {
            for l in alphabet.letters() {
                transitions.push(Edge { from: i, label: Label::Sym(l), to: i + 1 });
            }
            transitions.push(Edge { from: i, label: Label::Eps, to: n });
        }
        Nfa::new(alphabet.clone(), states, 0, n, transitions).expect("valid by construction")
    }

    /// Removes states that are not both reachable and co-reachable, keeping
    /// the initial and final state.
    pub fn prune(&self) -> Nfa {
        let n = self.states.len();
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for t in &self.transitions {
            fwd[t.from].push(t.to);
            bwd[t.to].push(t.from);
        }
        let reach = graph_closure(&fwd, self.initial);
        let coreach = graph_closure(&bwd, self.final_state);
        let keep: Vec<bool> = (0..n)
            .map(|s| (reach[s] && coreach[s]) || s == self.initial || s == self.final_state)
            .collect();
        let mut remap = vec![usize::MAX; n];
        let mut states = Vec::new();
        for s in 0..n {
            if keep[s] {
                remap[s] = states.len();
                states.push(self.states[s].clone());
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep[t.from] && keep[t.to] && reach[t.from] && coreach[t.to])
            .map(|t| Edge { from: remap[t.from], label: t.label, to: remap[t.to] })
            .collect();
        Nfa::new(self.alphabet.clone(), states, remap[self.initial], remap[self.final_state], transitions)
            .expect("pruning preserves validity")
    }

    pub(crate) fn eps_closure(&self, set: &mut [bool]) {
        let mut stack: Vec<StateId> = (0..set.len()).filter(|&s| set[s]).collect();
        while let Some(s) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.from == s && t.label == Label::Eps) {
                if !set[t.to] {
                    set[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
    }
}

pub(crate) fn graph_closure(adj: &[Vec<StateId>], start: StateId) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(s) = stack.pop() {
        for &t in &adj[s] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// One-counter net: an NFA with a nonnegative counter updated by integer deltas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ocn {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: Config1,
    final_config: Config1,
    transitions: Vec<OcnTransition>,
}

impl Ocn {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: Config1,
        final_config: Config1,
        mut transitions: Vec<OcnTransition>,
    ) -> Result<Self, AutomataError> {
        check_names(&states)?;
        for c in [initial, final_config] {
            check_id(&states, c.0)?;
            if c.1 < 0 {
                return Err(AutomataError::NegativeCounter(c.1));
            }
        }
        for t in &transitions {
            check_id(&states, t.from)?;
            check_id(&states, t.to)?;
            if let Label::Sym(l) = t.label {
                if l.0 as usize >= alphabet.len() {
                    return Err(AutomataError::UnknownLetter(format!("#{}", l.0)));
                }
            }
        }
        transitions.sort();
        transitions.dedup();
        Ok(Ocn { alphabet, states, initial, final_config, transitions })
    }

    /// The NFA as a net whose transitions leave the counter unchanged.
    pub fn from_nfa(n: &Nfa) -> Ocn {
        let ts = n.transitions().iter().map(|e| OcnTransition { from: e.from, label: e.label, to: e.to, delta: 0 }).collect();
        Ocn::new(n.alphabet().clone(), n.states().to_vec(), (n.initial(), 0), (n.final_state(), 0), ts).expect("valid NFA")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn initial(&self) -> Config1 {
        self.initial
    }
    pub fn final_config(&self) -> Config1 {
        self.final_config
    }
    pub fn transitions(&self) -> &[OcnTransition] {
        &self.transitions
    }
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    /// Largest absolute delta, at least 1.
    pub fn max_abs_delta(&self) -> i64 {
        self.transitions.iter().map(|t| t.delta.abs()).max().unwrap_or(0).max(1)
    }

    pub fn is_normalized(&self) -> bool {
        self.initial.1 == 0 && self.final_config.1 == 0
    }

    /// Equivalent net with initial and final counter 0.
    pub fn normalized(&self) -> Ocn {
        if self.is_normalized() {
            return self.clone();
        }
        let oca = Oca::from(self.clone());
        normalize_acceptance(&oca, &[self.initial], &FinalCondition::Configs(vec![self.final_config]))
            .into_ocn()
            .expect("normalization adds no zero tests")
    }
}

/// One-counter automaton: an [`Ocn`] plus zero tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oca {
    net: Ocn,
    zero_tests: Vec<Edge>,
}

impl Oca {
    pub fn new(net: Ocn, mut zero_tests: Vec<Edge>) -> Result<Self, AutomataError> {
        for z in &zero_tests {
            check_id(&net.states, z.from)?;
            check_id(&net.states, z.to)?;
        }
        zero_tests.sort();
        zero_tests.dedup();
        Ok(Oca { net, zero_tests })
    }

    pub fn net(&self) -> &Ocn {
        &self.net
    }
    pub fn zero_tests(&self) -> &[Edge] {
        &self.zero_tests
    }
    pub fn alphabet(&self) -> &Alphabet {
        &self.net.alphabet
    }
    pub fn states(&self) -> &[String] {
        &self.net.states
    }
    pub fn num_states(&self) -> usize {
        self.net.states.len()
    }
    pub fn initial(&self) -> Config1 {
        self.net.initial
    }
    pub fn final_config(&self) -> Config1 {
        self.net.final_config
    }
    pub fn transitions(&self) -> &[OcnTransition] {
        &self.net.transitions
    }

    /// The underlying net, if there are no zero tests.
    pub fn into_ocn(self) -> Option<Ocn> {
        self.zero_tests.is_empty().then_some(self.net)
    }

    pub fn is_normalized(&self) -> bool {
        self.net.is_normalized()
    }

    pub fn normalized(&self) -> Oca {
        if self.is_normalized() {
            return self.clone();
        }
        normalize_acceptance(self, &[self.net.initial], &FinalCondition::Configs(vec![self.net.final_config]))
    }
}

impl From<Ocn> for Oca {
    fn from(net: Ocn) -> Self {
        Oca { net, zero_tests: Vec::new() }
    }
}

/// Any of the three machine kinds, as read from the text format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Machine {
    Nfa(Nfa),
    Ocn(Ocn),
    Oca(Oca),
}

impl Machine {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Machine::Nfa(m) => m.alphabet(),
            Machine::Ocn(m) => m.alphabet(),
            Machine::Oca(m) => m.alphabet(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Machine::Nfa(_) => "nfa",
            Machine::Ocn(_) => "ocn",
            Machine::Oca(_) => "oca",
        }
    }
}

/// Per-coordinate domain of a [`Vass2`] configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coord {
    /// Values must stay nonnegative.
    Nat,
    /// Any integer value is allowed.
    Int,
}

pub const NAT_NAT: [Coord; 2] = [Coord::Nat, Coord::Nat];
pub const INT_NAT: [Coord; 2] = [Coord::Int, Coord::Nat];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VassTransition {
    pub from: StateId,
    pub delta: [i64; 2],
    pub to: StateId,
    /// The letter that synchronized the two factors (metadata only).
    pub label: Label,
}

/// Two-dimensional integer VASS with a per-coordinate nonnegativity mask.
///
/// When built as a cross-product of nets with state sets `Q` and `P`, the pair
/// `(q, p)` has id `q * |P| + p` and [`Vass2::factors`] records `(|Q|, |P|)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vass2 {
    states: Vec<String>,
    transitions: Vec<VassTransition>,
    mask: [Coord; 2],
    initial: Option<Config2>,
    final_config: Option<Config2>,
    factors: Option<(usize, usize)>,
}

impl Vass2 {
    pub fn new(states: Vec<String>, transitions: Vec<VassTransition>, mask: [Coord; 2]) -> Result<Self, AutomataError> {
        check_names(&states)?;
        for t in &transitions {
            check_id(&states, t.from)?;
            check_id(&states, t.to)?;
        }
        let mut v = Vass2 { states, transitions, mask, initial: None, final_config: None, factors: None };
        v.canonicalize();
        Ok(v)
    }

    fn canonicalize(&mut self) {
        // one transition per (from, delta, to); the smallest label wins
        self.transitions.sort_by_key(|t| (t.from, t.to, t.delta, t.label));
        self.transitions.dedup_by_key(|t| (t.from, t.to, t.delta));
        self.transitions.sort();
    }

    pub fn with_endpoints(mut self, initial: Config2, final_config: Config2) -> Result<Self, AutomataError> {
        check_id(&self.states, initial.0)?;
        check_id(&self.states, final_config.0)?;
        self.initial = Some(initial);
        self.final_config = Some(final_config);
        Ok(self)
    }

    pub fn with_mask(&self, mask: [Coord; 2]) -> Vass2 {
        Vass2 { mask, ..self.clone() }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn transitions(&self) -> &[VassTransition] {
        &self.transitions
    }
    pub fn mask(&self) -> [Coord; 2] {
        self.mask
    }
    pub fn initial(&self) -> Option<Config2> {
        self.initial
    }
    pub fn final_config(&self) -> Option<Config2> {
        self.final_config
    }
    pub fn factors(&self) -> Option<(usize, usize)> {
        self.factors
    }
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    /// Id of the pair state `(q, p)` of a cross-product.
    pub fn pair(&self, q: StateId, p: StateId) -> Option<StateId> {
        let (nq, np) = self.factors?;
        (q < nq && p < np).then_some(q * np + p)
    }

    /// Whether the vector satisfies the mask.
    pub fn admits(&self, v: [i64; 2]) -> bool {
        self.mask.iter().zip(v).all(|(c, x)| *c == Coord::Int || x >= 0)
    }

    /// Fires transition `t` (an index) from `c`, if enabled under the mask.
    pub fn fire(&self, c: Config2, t: usize) -> Option<Config2> {
        let tr = &self.transitions[t];
        if tr.from != c.0 {
            return None;
        }
        let v = [c.1[0] + tr.delta[0], c.1[1] + tr.delta[1]];
        self.admits(v).then_some((tr.to, v))
    }

    /// Replays a path of transition indices; `None` if some step is disabled.
    pub fn replay(&self, from: Config2, path: &[usize]) -> Option<Config2> {
        path.iter().try_fold(from, |c, &t| self.fire(c, t))
    }

    /// Outgoing transition indices per state.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.from].push(i);
        }
        out
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Eps => write!(f, "{EPSILON}"),
            Label::Sym(l) => write!(f, "#{}", l.0),
        }
    }
}

//! Name-based construction of machines, used by the text parser, the
//! generators and tests.

use std::collections::HashMap;

use super::{Alphabet, AutomataError, Edge, Nfa, Oca, Ocn, OcnTransition, StateId};

/// Incremental builder keyed by state and letter names.
///
/// States are numbered in order of first mention. The letter `eps` denotes ε.
///
/// ```
/// use ocnsep::automata::MachineBuilder;
/// let k = MachineBuilder::new(["a", "b"])
///     .trans("q0", "a", "q0", 1)
///     .trans("q0", "eps", "qf", 0)
///     .trans("qf", "b", "qf", -1)
///     .init("q0", 0)
///     .fin("qf", 0)
///     .build_ocn()
///     .unwrap();
/// assert_eq!(k.num_states(), 2);
/// ```
#[derive(Clone, Debug, Default)]
pub struct MachineBuilder {
    alphabet: Vec<String>,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    init: Option<(StateId, i64)>,
    fin: Option<(StateId, i64)>,
    trans: Vec<(StateId, String, StateId, i64)>,
    zero: Vec<(StateId, String, StateId)>,
}

impl MachineBuilder {
    pub fn new<I, S>(alphabet: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MachineBuilder { alphabet: alphabet.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    fn id(&mut self, name: &str) -> StateId {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.states.len();
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    /// Declares states in the given order without adding transitions.
    pub fn states<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for n in names {
            self.id(n.as_ref());
        }
        self
    }

    pub fn init(mut self, q: &str, counter: i64) -> Self {
        let id = self.id(q);
        self.init = Some((id, counter));
        self
    }

    pub fn fin(mut self, q: &str, counter: i64) -> Self {
        let id = self.id(q);
        self.fin = Some((id, counter));
        self
    }

    pub fn trans(mut self, q: &str, letter: &str, q2: &str, delta: i64) -> Self {
        let (a, b) = (self.id(q), self.id(q2));
        self.trans.push((a, letter.to_string(), b, delta));
        self
    }

    /// An NFA edge; same as [`MachineBuilder::trans`] with delta 0.
    pub fn edge(self, q: &str, letter: &str, q2: &str) -> Self {
        self.trans(q, letter, q2, 0)
    }

    pub fn zerotest(mut self, q: &str, letter: &str, q2: &str) -> Self {
        let (a, b) = (self.id(q), self.id(q2));
        self.zero.push((a, letter.to_string(), b));
        self
    }

    fn parts(&self) -> Result<(Alphabet, StateId, i64, StateId, i64), AutomataError> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let (i, ic) = self.init.unwrap_or((0, 0));
        let (f, fc) = self.fin.unwrap_or((0, 0));
        if self.states.is_empty() {
            return Err(AutomataError::UnknownState(0));
        }
        Ok((alphabet, i, ic, f, fc))
    }

    pub fn build_nfa(self) -> Result<Nfa, AutomataError> {
        let (alphabet, i, _, f, _) = self.parts()?;
        let mut edges = Vec::new();
        for (a, l, b, _) in &self.trans {
            edges.push(Edge { from: *a, label: alphabet.parse_label(l)?, to: *b });
        }
        Nfa::new(alphabet, self.states, i, f, edges)
    }

    pub fn build_ocn(self) -> Result<Ocn, AutomataError> {
        let (alphabet, i, ic, f, fc) = self.parts()?;
        let mut ts = Vec::new();
        for (a, l, b, d) in &self.trans {
            ts.push(OcnTransition { from: *a, label: alphabet.parse_label(l)?, to: *b, delta: *d });
        }
        Ocn::new(alphabet, self.states, (i, ic), (f, fc), ts)
    }

    pub fn build_oca(self) -> Result<Oca, AutomataError> {
        let zero = self.zero.clone();
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let mut zs = Vec::new();
        for (a, l, b) in &zero {
            zs.push(Edge { from: *a, label: alphabet.parse_label(l)?, to: *b });
        }
        let net = self.build_ocn()?;
        Oca::new(net, zs)
    }
}

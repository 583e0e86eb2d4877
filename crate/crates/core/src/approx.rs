//! The `n`-approximation of a one-counter net.
//!
//! `A_n` is an NFA that tracks the counter exactly while it stays below `n`
//! (LOW mode) and only modulo `n` afterwards (HIGH mode). Its states are
//! triples `(q, r, mode)` named `q@r!L` or `q@r!H`. Every word of `L(A)` is
//! accepted by `A_n`, and `L(A_n) ⊆ L(A_m)` whenever `m` divides `n`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::automata::{Edge, Label, Nfa, Ocn, StateId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApproxError {
    #[error("the modulus n must be positive")]
    NIsZero,
    #[error("the net must have initial and final counter 0")]
    NotNormalized,
    #[error("state `{0}` is not an approximation state")]
    NotAnApproximation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Low,
    High,
}

/// A state of `A_n`, with the base state given by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApproxState {
    pub base: String,
    pub residue: usize,
    pub mode: Mode,
}

impl ApproxState {
    /// Parses `q@r!L` / `q@r!H`.
    pub fn parse(name: &str) -> Option<ApproxState> {
        let (rest, m) = name.rsplit_once('!')?;
        let (base, r) = rest.rsplit_once('@')?;
        let mode = match m {
            "L" => Mode::Low,
            "H" => Mode::High,
            _ => return None,
        };
        Some(ApproxState { base: base.to_string(), residue: r.parse().ok()?, mode })
    }
}

impl fmt::Display for ApproxState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = match self.mode {
            Mode::Low => 'L',
            Mode::High => 'H',
        };
        write!(f, "{}@{}!{}", self.base, self.residue, m)
    }
}

/// Id of `(q, r, mode)` in [`build_approximation`]'s output.
pub fn approx_state_id(n: usize, q: StateId, residue: usize, mode: Mode) -> StateId {
    (q * n + residue) * 2 + usize::from(mode == Mode::High)
}

/// Builds `A_n` with all `2·n·|Q|` states (no pruning).
///
/// For a transition `(q, x, q', z)` and residue `c`:
/// LOW goes to LOW at `c+z` when `0 ≤ c+z < n`, and to HIGH at `(c+z) mod n`
/// when `c+z ≥ n`; HIGH goes to LOW at `(c+z) mod n` when `c+z < 0`, and
/// always to HIGH at `(c+z) mod n`.
pub fn build_approximation(a: &Ocn, n: usize) -> Result<Nfa, ApproxError> {
    if n == 0 {
        return Err(ApproxError::NIsZero);
    }
    if !a.is_normalized() {
        return Err(ApproxError::NotNormalized);
    }
    let nq = a.num_states();
    let mut states = Vec::with_capacity(nq * n * 2);
    for q in a.states() {
        for r in 0..n {
            for mode in [Mode::Low, Mode::High] {
                states.push(ApproxState { base: q.clone(), residue: r, mode }.to_string());
            }
        }
    }
    let id = |q, r, m| approx_state_id(n, q, r, m);
    let ni = n as i64;
    let mut edges = Vec::new();
    for t in a.transitions() {
        for c in 0..ni {
            let v = c + t.delta;
            let r = v.rem_euclid(ni) as usize;
            let c = c as usize;
            if (0..ni).contains(&v) {
                edges.push(Edge { from: id(t.from, c, Mode::Low), label: t.label, to: id(t.to, r, Mode::Low) });
            }
            if v >= ni {
                edges.push(Edge { from: id(t.from, c, Mode::Low), label: t.label, to: id(t.to, r, Mode::High) });
            }
            if v < 0 {
                edges.push(Edge { from: id(t.from, c, Mode::High), label: t.label, to: id(t.to, r, Mode::Low) });
            }
            edges.push(Edge { from: id(t.from, c, Mode::High), label: t.label, to: id(t.to, r, Mode::High) });
        }
    }
    let init = id(a.initial().0, 0, Mode::Low);
    let fin = id(a.final_config().0, 0, Mode::Low);
    Ok(Nfa::new(a.alphabet().clone(), states, init, fin, edges).expect("valid by construction"))
}

/// Checks that every transition leaving LOW mode or entering it has a
/// HIGH-to-HIGH counterpart with the same letter, base states and residues.
pub fn check_high_closure(a_n: &Nfa) -> Result<bool, ApproxError> {
    let parsed: Vec<ApproxState> = a_n
        .states()
        .iter()
        .map(|s| ApproxState::parse(s).ok_or_else(|| ApproxError::NotAnApproximation(s.clone())))
        .collect::<Result<_, _>>()?;
    let ids: HashMap<&ApproxState, StateId> = parsed.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let present: HashSet<(StateId, Label, StateId)> = a_n.transitions().iter().map(|t| (t.from, t.label, t.to)).collect();
    for t in a_n.transitions() {
        let (s, d) = (&parsed[t.from], &parsed[t.to]);
        if s.mode == Mode::High && d.mode == Mode::High {
            continue;
        }
        let hs = ApproxState { mode: Mode::High, ..s.clone() };
        let hd = ApproxState { mode: Mode::High, ..d.clone() };
        match (ids.get(&hs), ids.get(&hd)) {
            (Some(&a), Some(&b)) if present.contains(&(a, t.label, b)) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{enumerate_words_with_cap, Alphabet, Language, Letter, MachineBuilder, Word};

    fn k_ocn() -> Ocn {
        MachineBuilder::new(["a", "b"])
            .trans("q0", "a", "q0", 1)
            .trans("q0", "eps", "qf", 0)
            .trans("qf", "b", "qf", -1)
            .init("q0", 0)
            .fin("qf", 0)
            .build_ocn()
            .unwrap()
    }

    fn has_edge(n: &Nfa, from: &str, l: &str, to: &str) -> bool {
        let (f, t) = (n.state_id(from).unwrap(), n.state_id(to).unwrap());
        let l = n.alphabet().parse_label(l).unwrap();
        n.transitions().contains(&Edge { from: f, label: l, to: t })
    }

    #[test]
    fn example_two_structure() {
        let a2 = build_approximation(&k_ocn(), 2).unwrap();
        assert_eq!(a2.num_states(), 8);
        assert!(has_edge(&a2, "q0@1!L", "a", "q0@0!H"));
        assert!(has_edge(&a2, "qf@0!H", "b", "qf@1!L"));
        for q in ["q0", "qf"] {
            for x in ["a", "b"] {
                let src_has_x = (q == "q0" && x == "a") || (q == "qf" && x == "b");
                if src_has_x {
                    for c in 0..2 {
                        assert!(has_edge(&a2, &format!("{q}@{c}!H"), x, &format!("{q}@{}!H", 1 - c)));
                    }
                }
            }
        }
    }

    fn example_two_language(max: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 0..=max {
            for n in 0..=len {
                let m = len - n;
                if (n == m && n < 2) || (n >= 2 && m >= 2 && n % 2 == m % 2) {
                    let mut w = vec![Letter(0); n];
                    w.extend(vec![Letter(1); m]);
                    out.push(w);
                }
            }
        }
        // length-lexicographic: a < b, so more a's first within a length
        out.sort_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
        out
    }

    #[test]
    fn example_two_language_matches() {
        let a2 = build_approximation(&k_ocn(), 2).unwrap();
        let got = enumerate_words_with_cap(&a2, 10, 12).unwrap();
        assert_eq!(got, example_two_language(10));
    }

    #[test]
    fn errors() {
        assert_eq!(build_approximation(&k_ocn(), 0), Err(ApproxError::NIsZero));
        let m = MachineBuilder::new(["a"]).trans("p", "a", "p", 1).init("p", 1).fin("p", 1).build_ocn().unwrap();
        assert_eq!(build_approximation(&m, 2), Err(ApproxError::NotNormalized));
        let plain = Nfa::universal(&Alphabet::new(["a"]).unwrap());
        assert!(matches!(check_high_closure(&plain), Err(ApproxError::NotAnApproximation(_))));
    }

    #[test]
    fn high_closure_holds_and_detects_mutants() {
        for n in [2, 5] {
            assert!(check_high_closure(&build_approximation(&k_ocn(), n).unwrap()).unwrap());
        }
        let a2 = build_approximation(&k_ocn(), 2).unwrap();
        let mut edges = a2.transitions().to_vec();
        let hh = edges
            .iter()
            .position(|e| {
                let (s, d) = (ApproxState::parse(&a2.states()[e.from]).unwrap(), ApproxState::parse(&a2.states()[e.to]).unwrap());
                s.mode == Mode::High && d.mode == Mode::High && s.base == "q0" && s.residue == 1
            })
            .unwrap();
        edges.remove(hh);
        let mutant = Nfa::new(a2.alphabet().clone(), a2.states().to_vec(), a2.initial(), a2.final_state(), edges).unwrap();
        assert!(!check_high_closure(&mutant).unwrap());
    }

    #[test]
    fn state_names_round_trip() {
        let s = ApproxState { base: "q@x".into(), residue: 3, mode: Mode::High };
        assert_eq!(ApproxState::parse(&s.to_string()), Some(s));
    }

    #[test]
    fn n_one_includes_language() {
        let k = k_ocn();
        let a1 = build_approximation(&k, 1).unwrap();
        for w in crate::automata::enumerate_words(&k, 8).unwrap() {
            assert!(a1.accepts(&w));
        }
    }
}

//! Exact membership and bounded word enumeration.

use std::collections::VecDeque;

use super::{product_oca_nfa, AutomataError, Alphabet, Label, Letter, Machine, Nfa, Oca, Ocn, Word};
use crate::reach1;

/// Default cap on the length passed to [`enumerate_words`].
pub const DEFAULT_WORD_CAP: usize = 12;

/// A language with decidable membership and prefix viability.
pub trait Language {
    fn alphabet(&self) -> &Alphabet;

    /// Exact membership of `w`.
    fn accepts(&self, w: &[Letter]) -> bool {
        self.extendable(w, 0)
    }

    /// Whether some accepted word has the form `prefix · u` with `|u| ≤ extra`.
    fn extendable(&self, prefix: &[Letter], extra: usize) -> bool;
}

impl Nfa {
    fn step(&self, set: &[bool], l: Letter) -> Vec<bool> {
        let mut next = vec![false; set.len()];
        for t in &self.transitions {
            if t.label == Label::Sym(l) && set[t.from] {
                next[t.to] = true;
            }
        }
        self.eps_closure(&mut next);
        next
    }

    /// Subset of states reachable by reading `w` from the initial state.
    pub fn run_set(&self, w: &[Letter]) -> Vec<bool> {
        let mut set = vec![false; self.states.len()];
        set[self.initial] = true;
        self.eps_closure(&mut set);
        for &l in w {
            set = self.step(&set, l);
        }
        set
    }

    /// For each state, the least number of letters needed to reach the final state.
    pub(crate) fn letters_to_final(&self) -> Vec<Option<usize>> {
        let n = self.states.len();
        let mut dist: Vec<Option<usize>> = vec![None; n];
        let mut rev: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for t in &self.transitions {
            let w = usize::from(t.label != Label::Eps);
            rev[t.to].push((t.from, w));
        }
        let mut dq = VecDeque::new();
        dist[self.final_state] = Some(0);
        dq.push_back(self.final_state);
        while let Some(s) = dq.pop_front() {
            let d = dist[s].expect("queued states have a distance");
            for &(p, w) in &rev[s] {
                if dist[p].is_none_or(|old| old > d + w) {
                    dist[p] = Some(d + w);
                    if w == 0 {
                        dq.push_front(p);
                    } else {
                        dq.push_back(p);
                    }
                }
            }
        }
        dist
    }
}

impl Language for Nfa {
    fn alphabet(&self) -> &Alphabet {
        Nfa::alphabet(self)
    }

    fn accepts(&self, w: &[Letter]) -> bool {
        self.run_set(w)[self.final_state]
    }

    fn extendable(&self, prefix: &[Letter], extra: usize) -> bool {
        let set = self.run_set(prefix);
        let dist = self.letters_to_final();
        set.iter().zip(&dist).any(|(&inside, d)| inside && d.is_some_and(|d| d <= extra))
    }
}

impl Language for Oca {
    fn alphabet(&self) -> &Alphabet {
        Oca::alphabet(self)
    }

    fn extendable(&self, prefix: &[Letter], extra: usize) -> bool {
        let line = Nfa::prefix_line(self.alphabet(), prefix, extra);
        let p = product_oca_nfa(self, &line).expect("same alphabet");
        !reach1::oca_empty(&p)
    }
}

impl Language for Ocn {
    fn alphabet(&self) -> &Alphabet {
        Ocn::alphabet(self)
    }

    fn extendable(&self, prefix: &[Letter], extra: usize) -> bool {
        let line = Nfa::prefix_line(self.alphabet(), prefix, extra);
        let p = super::product_ocn_nfa(self, &line).expect("same alphabet");
        !reach1::ocn_empty(&p)
    }
}

impl Language for Machine {
    fn alphabet(&self) -> &Alphabet {
        Machine::alphabet(self)
    }

    fn accepts(&self, w: &[Letter]) -> bool {
        match self {
            Machine::Nfa(m) => m.accepts(w),
            Machine::Ocn(m) => m.accepts(w),
            Machine::Oca(m) => m.accepts(w),
        }
    }

    fn extendable(&self, prefix: &[Letter], extra: usize) -> bool {
        match self {
            Machine::Nfa(m) => m.extendable(prefix, extra),
            Machine::Ocn(m) => m.extendable(prefix, extra),
            Machine::Oca(m) => m.extendable(prefix, extra),
        }
    }
}

/// All accepted words of length at most `max_len`, in length-lexicographic
/// order. Fails when `max_len` exceeds [`DEFAULT_WORD_CAP`].
pub fn enumerate_words<L: Language + ?Sized>(m: &L, max_len: usize) -> Result<Vec<Word>, AutomataError> {
    enumerate_words_with_cap(m, max_len, DEFAULT_WORD_CAP)
}

/// [`enumerate_words`] with an explicit cap.
///
/// Only prefixes that extend to an accepted word within the length bound are
/// expanded, so the cost is proportional to the output rather than `|Σ|^max_len`.
pub fn enumerate_words_with_cap<L: Language + ?Sized>(
    m: &L,
    max_len: usize,
    cap: usize,
) -> Result<Vec<Word>, AutomataError> {
    if max_len > cap {
        return Err(AutomataError::CapExceeded { max_len, cap });
    }
    let letters: Vec<Letter> = m.alphabet().letters().collect();
    let mut out = Vec::new();
    if !m.extendable(&[], max_len) {
        return Ok(out);
    }
    let mut layer: Vec<Word> = vec![Vec::new()];
    for len in 0..=max_len {
        for w in &layer {
            if m.accepts(w) {
                out.push(w.clone());
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l);
                if m.extendable(&v, max_len - len - 1) {
                    next.push(v);
                }
            }
        }
        layer = next;
    }
    Ok(out)
}

//! Oracles and generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashSet;

use ocnsep::automata::{Alphabet, Config1, FinalCondition, Label, Letter, Ocn, Word};
use ocnsep::random::NetShape;

/// Small nets: at most 4 states, deltas in `-2..=2`, two letters.
pub const SHAPE: NetShape = NetShape { max_states: 4, max_delta: 2, letters: 2, max_out: 3 };

/// Every word over `alph` of length at most `max_len`, shortest first.
pub fn all_words(alph: &Alphabet, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = alph.letters().collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Configurations reachable by reading `w` from any of `from`, with counters
/// kept in `0..=cap`.
pub fn read(net: &Ocn, from: &[Config1], w: &[Letter], cap: i64) -> HashSet<Config1> {
    let closure = |set: &mut HashSet<Config1>| {
        let mut stack: Vec<Config1> = set.iter().copied().collect();
        while let Some((q, c)) = stack.pop() {
            for t in net.transitions().iter().filter(|t| t.from == q && t.label == Label::Eps) {
                let d = (t.to, c + t.delta);
                if (0..=cap).contains(&d.1) && set.insert(d) {
                    stack.push(d);
                }
            }
        }
    };
    let mut set: HashSet<Config1> = from.iter().copied().filter(|c| (0..=cap).contains(&c.1)).collect();
    closure(&mut set);
    for &l in w {
        let mut next = HashSet::new();
        for &(q, c) in &set {
            for t in net.transitions().iter().filter(|t| t.from == q && t.label == Label::Sym(l)) {
                let d = (t.to, c + t.delta);
                if (0..=cap).contains(&d.1) {
                    next.insert(d);
                }
            }
        }
        closure(&mut next);
        set = next;
    }
    set
}

/// Membership by direct search, for several initial configurations and a
/// general final condition.
pub fn accepts_multi(net: &Ocn, inits: &[Config1], fin: &FinalCondition, w: &[Letter], cap: i64) -> bool {
    let end = read(net, inits, w, cap);
    match fin {
        FinalCondition::Configs(cs) => cs.iter().any(|c| end.contains(c)),
        FinalCondition::States(qs) => end.iter().any(|(q, _)| qs.contains(q)),
    }
}

/// Membership of a single-init, single-final net by direct search.
pub fn accepts_direct(net: &Ocn, w: &[Letter], cap: i64) -> bool {
    accepts_multi(net, &[net.initial()], &FinalCondition::Configs(vec![net.final_config()]), w, cap)
}

//! Products, acceptance normalization and VASS reversal.

use std::collections::HashSet;

use super::{
    AutomataError, Config1, Coord, Edge, Label, Nfa, Oca, Ocn, OcnTransition, StateId, Vass2, VassTransition,
};

/// How a machine accepts, before normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FinalCondition {
    /// Accept in any of these configurations.
    Configs(Vec<Config1>),
    /// Accept in any of these control states, whatever the counter.
    States(Vec<StateId>),
}

/// Makes names unique by appending primes to later duplicates.
pub(crate) fn uniquify(names: Vec<String>) -> Vec<String> {
    let mut seen: HashSet<String> = HashSet::new();
    names
        .into_iter()
        .map(|mut n| {
            while seen.contains(&n) {
                n.push('\'');
            }
            seen.insert(n.clone());
            n
        })
        .collect()
}

fn fresh(existing: &[String], base: &str) -> String {
    let mut n = base.to_string();
    while existing.contains(&n) {
        n.push('\'');
    }
    n
}

pub(crate) fn pair_names(left: &[String], right: &[String]) -> Vec<String> {
    let mut names = Vec::with_capacity(left.len() * right.len());
    for q in left {
        for p in right {
            names.push(format!("({q},{p})"));
        }
    }
    uniquify(names)
}

/// Rewrites `machine` to have a single initial configuration `(q0, 0)` and a
/// single final configuration `(qf, 0)`, keeping its language.
///
/// `initial` must be nonempty. Already-normalized inputs (one initial and one
/// final configuration, both with counter 0) come back unchanged.
pub fn normalize_acceptance(machine: &Oca, initial: &[Config1], accept: &FinalCondition) -> Oca {
    assert!(!initial.is_empty(), "at least one initial configuration is required");
    let net = machine.net();
    let mut states = net.states().to_vec();
    let mut trans: Vec<OcnTransition> = net.transitions().to_vec();

    let init = match initial {
        [(s, 0)] => *s,
        _ => {
            let q0 = states.len();
            states.push(fresh(&states, "q0"));
            for &(s, c) in initial {
                trans.push(OcnTransition { from: q0, label: Label::Eps, to: s, delta: c });
            }
            q0
        }
    };
    let fin = match accept {
        FinalCondition::Configs(cs) if cs.len() == 1 && cs[0].1 == 0 => cs[0].0,
        FinalCondition::Configs(cs) => {
            let qf = states.len();
            states.push(fresh(&states, "qf"));
            for &(f, c) in cs {
                trans.push(OcnTransition { from: f, label: Label::Eps, to: qf, delta: -c });
            }
            qf
        }
        FinalCondition::States(fs) => {
            let qf = states.len();
            states.push(fresh(&states, "qf"));
            for &f in fs {
                trans.push(OcnTransition { from: f, label: Label::Eps, to: qf, delta: 0 });
            }
            trans.push(OcnTransition { from: qf, label: Label::Eps, to: qf, delta: -1 });
            qf
        }
    };
    let net = Ocn::new(net.alphabet().clone(), states, (init, 0), (fin, 0), trans)
        .expect("normalization preserves validity");
    Oca::new(net, machine.zero_tests().to_vec()).expect("normalization preserves validity")
}

/// Synchronized product of two NFAs; ε moves of one side leave the other put.
pub fn product_nfa_nfa(n1: &Nfa, n2: &Nfa) -> Result<Nfa, AutomataError> {
    n1.alphabet().check_same(n2.alphabet())?;
    let np = n2.num_states();
    let id = |q: StateId, p: StateId| q * np + p;
    let mut edges = Vec::new();
    for t1 in n1.transitions() {
        match t1.label {
            Label::Eps => {
                for p in 0..np {
                    edges.push(Edge { from: id(t1.from, p), label: Label::Eps, to: id(t1.to, p) });
                }
            }
            Label::Sym(_) => {
                for t2 in n2.transitions().iter().filter(|t2| t2.label == t1.label) {
                    edges.push(Edge { from: id(t1.from, t2.from), label: t1.label, to: id(t1.to, t2.to) });
                }
            }
        }
    }
    for t2 in n2.transitions().iter().filter(|t| t.label == Label::Eps) {
        for q in 0..n1.num_states() {
            edges.push(Edge { from: id(q, t2.from), label: Label::Eps, to: id(q, t2.to) });
        }
    }
    Nfa::new(
        n1.alphabet().clone(),
        pair_names(n1.states(), n2.states()),
        id(n1.initial(), n2.initial()),
        id(n1.final_state(), n2.final_state()),
        edges,
    )
}

fn product_transitions(a: &Ocn, n: &Nfa) -> Vec<OcnTransition> {
    let np = n.num_states();
    let id = |q: StateId, p: StateId| q * np + p;
    let mut ts = Vec::new();
    for t in a.transitions() {
        match t.label {
            Label::Eps => {
                for p in 0..np {
                    ts.push(OcnTransition { from: id(t.from, p), label: Label::Eps, to: id(t.to, p), delta: t.delta });
                }
            }
            Label::Sym(_) => {
                for e in n.transitions().iter().filter(|e| e.label == t.label) {
                    ts.push(OcnTransition { from: id(t.from, e.from), label: t.label, to: id(t.to, e.to), delta: t.delta });
                }
            }
        }
    }
    for e in n.transitions().iter().filter(|e| e.label == Label::Eps) {
        for q in 0..a.num_states() {
            ts.push(OcnTransition { from: id(q, e.from), label: Label::Eps, to: id(q, e.to), delta: 0 });
        }
    }
    ts
}

/// Synchronized product of a net and an NFA, over state space `Q × P`.
pub fn product_ocn_nfa(a: &Ocn, n: &Nfa) -> Result<Ocn, AutomataError> {
    a.alphabet().check_same(n.alphabet())?;
    let np = n.num_states();
    let (q0, c0) = a.initial();
    let (qf, cf) = a.final_config();
    Ocn::new(
        a.alphabet().clone(),
        pair_names(a.states(), n.states()),
        (q0 * np + n.initial(), c0),
        (qf * np + n.final_state(), cf),
        product_transitions(a, n),
    )
}

/// Synchronized product of an OCA and an NFA; zero tests synchronize like
/// ordinary transitions.
pub fn product_oca_nfa(a: &Oca, n: &Nfa) -> Result<Oca, AutomataError> {
    let net = product_ocn_nfa(a.net(), n)?;
    let np = n.num_states();
    let mut zs = Vec::new();
    for z in a.zero_tests() {
        match z.label {
            Label::Eps => {
                for p in 0..np {
                    zs.push(Edge { from: z.from * np + p, label: Label::Eps, to: z.to * np + p });
                }
            }
            Label::Sym(_) => {
                for e in n.transitions().iter().filter(|e| e.label == z.label) {
                    zs.push(Edge { from: z.from * np + e.from, label: z.label, to: z.to * np + e.to });
                }
            }
        }
    }
    Oca::new(net, zs)
}

/// Cross-product `A ⊗ B`: a 2-VASS over `Q × P` whose transitions pair
/// letter-synchronized transitions of `a` and `b` with joint delta `(z, v)`.
///
/// ε transitions of either side move alone (the other side takes its implicit
/// ε stay-loop). The joint stay-loop with delta `(0, 0)` is left implicit.
/// The initial and final configurations combine those of `a` and `b`.
pub fn cross_product(a: &Ocn, b: &Ocn, mask: [Coord; 2]) -> Result<Vass2, AutomataError> {
    a.alphabet().check_same(b.alphabet())?;
    let np = b.num_states();
    let id = |q: StateId, p: StateId| q * np + p;
    let mut ts = Vec::new();
    for ta in a.transitions() {
        match ta.label {
            Label::Eps => {
                for p in 0..np {
                    ts.push(VassTransition { from: id(ta.from, p), delta: [ta.delta, 0], to: id(ta.to, p), label: Label::Eps });
                }
            }
            Label::Sym(_) => {
                for tb in b.transitions().iter().filter(|tb| tb.label == ta.label) {
                    ts.push(VassTransition {
                        from: id(ta.from, tb.from),
                        delta: [ta.delta, tb.delta],
                        to: id(ta.to, tb.to),
                        label: ta.label,
                    });
                }
            }
        }
    }
    for tb in b.transitions().iter().filter(|t| t.label == Label::Eps) {
        for q in 0..a.num_states() {
            ts.push(VassTransition { from: id(q, tb.from), delta: [0, tb.delta], to: id(q, tb.to), label: Label::Eps });
        }
    }
    ts.retain(|t| !(t.from == t.to && t.delta == [0, 0]));
    let (qa, ca) = a.initial();
    let (qb, cb) = b.initial();
    let (fa, da) = a.final_config();
    let (fb, db) = b.final_config();
    let mut v = Vass2::new(pair_names(a.states(), b.states()), ts, mask)?
        .with_endpoints((id(qa, qb), [ca, cb]), (id(fa, fb), [da, db]))?;
    v.factors = Some((a.num_states(), np));
    Ok(v)
}

/// Flips every transition and negates its delta; initial and final
/// configurations swap roles.
pub fn reverse_vass2(v: &Vass2) -> Vass2 {
    let ts = v
        .transitions()
        .iter()
        .map(|t| VassTransition { from: t.to, delta: [-t.delta[0], -t.delta[1]], to: t.from, label: t.label })
        .collect();
    let mut r = Vass2::new(v.states().to_vec(), ts, v.mask()).expect("reversal preserves validity");
    r.initial = v.final_config();
    r.final_config = v.initial();
    r.factors = v.factors();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{enumerate_words, Alphabet, Language, MachineBuilder, NAT_NAT};

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

    #[test]
    fn nfa_product_intersects() {
        let astar = MachineBuilder::new(["a"]).edge("s", "a", "s").init("s", 0).fin("s", 0).build_nfa().unwrap();
        let aa = MachineBuilder::new(["a"]).edge("0", "a", "1").edge("1", "a", "2").init("0", 0).fin("2", 0).build_nfa().unwrap();
        let p = product_nfa_nfa(&astar, &aa).unwrap();
        let words = enumerate_words(&p, 5).unwrap();
        assert_eq!(words, vec![vec![crate::automata::Letter(0); 2]]);
    }

    #[test]
    fn product_with_line_nfa() {
        let k = k_ocn();
        let ab = MachineBuilder::new(["a", "b"]).edge("0", "a", "1").edge("1", "b", "2").init("0", 0).fin("2", 0).build_nfa().unwrap();
        let p = product_ocn_nfa(&k, &ab).unwrap();
        let words = enumerate_words(&p, 6).unwrap();
        assert_eq!(words.len(), 1);
        assert_eq!(p.alphabet().format_word(&words[0]), "ab");
        let none = product_ocn_nfa(&k, &Nfa::empty_language(k.alphabet())).unwrap();
        assert!(enumerate_words(&none, 6).unwrap().is_empty());
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        let k = k_ocn();
        let other = Nfa::universal(&Alphabet::new(["a"]).unwrap());
        assert!(matches!(product_ocn_nfa(&k, &other), Err(AutomataError::AlphabetMismatch { .. })));
    }

    #[test]
    fn accept_by_state_normalization() {
        // counter may be left positive in the final state
        let m = MachineBuilder::new(["a"]).trans("p", "a", "p", 1).init("p", 0).fin("p", 0).build_ocn().unwrap();
        let oca = Oca::from(m);
        let norm = normalize_acceptance(&oca, &[(0, 0)], &FinalCondition::States(vec![0]));
        assert!(norm.is_normalized());
        assert!(norm.accepts(&[crate::automata::Letter(0); 3]));
        let qf = norm.final_config().0;
        assert!(norm.transitions().iter().any(|t| t.from == qf && t.to == qf && t.delta == -1));
    }

    #[test]
    fn normalization_is_identity_on_normalized_input() {
        let oca = Oca::from(k_ocn());
        let norm = normalize_acceptance(&oca, &[oca.initial()], &FinalCondition::Configs(vec![oca.final_config()]));
        assert_eq!(norm, oca);
    }

    #[test]
    fn several_initial_configurations() {
        // p reads a and decrements; r reads b and decrements
        let m = MachineBuilder::new(["a", "b"])
            .trans("p", "a", "p", -1)
            .trans("r", "b", "r", -1)
            .trans("p", "eps", "f", 0)
            .trans("r", "eps", "f", 0)
            .init("p", 0)
            .fin("f", 0)
            .build_ocn()
            .unwrap();
        let oca = Oca::from(m);
        let (p, r) = (0, 1);
        let norm = normalize_acceptance(&oca, &[(p, 0), (r, 3)], &FinalCondition::Configs(vec![(2, 0)]));
        let words = enumerate_words(&norm, 6).unwrap();
        let shown: Vec<String> = words.iter().map(|w| norm.alphabet().format_word(w)).collect();
        assert_eq!(shown, ["eps", "bbb"]);
    }

    #[test]
    fn cross_product_of_k_with_itself_reaches_final() {
        let k = k_ocn();
        let v = cross_product(&k, &k, NAT_NAT).unwrap();
        let from = v.initial().unwrap();
        let to = v.final_config().unwrap();
        let out = crate::reach1::bfs_reach(&v, from, to, crate::reach1::BfsBudget::default());
        let path = out.path().expect("reached");
        assert_eq!(v.replay(from, path), Some(to));
    }

    #[test]
    fn reverse_is_an_involution() {
        let k = k_ocn();
        let v = cross_product(&k, &k, NAT_NAT).unwrap();
        assert_eq!(reverse_vass2(&reverse_vass2(&v)), v);
        let single = Vass2::new(
            vec!["s".into(), "t".into()],
            vec![VassTransition { from: 0, delta: [1, 2], to: 1, label: Label::Eps }],
            NAT_NAT,
        )
        .unwrap();
        let r = reverse_vass2(&single);
        assert_eq!(r.transitions()[0], VassTransition { from: 1, delta: [-1, -2], to: 0, label: Label::Eps });
    }
}

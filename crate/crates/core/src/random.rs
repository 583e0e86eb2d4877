//! Seeded random instances for property tests, benchmarks and fuzzing.
//!
//! Every generator takes an explicit [`Rng`]; [`rng`] builds the
//! reproducible one used throughout the crate.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{Alphabet, Edge, Label, Nfa, Oca, Ocn, OcnTransition, Vass2, VassTransition, NAT_NAT};
use crate::reductions::AcyclicOca;
use crate::semilinear::{DioRow, DioSystem, Relation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of random nets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetShape {
    pub max_states: usize,
    pub max_delta: i64,
    /// Number of letters, named `a`, `b`, ...
    pub letters: usize,
    /// Upper bound on transitions per state.
    pub max_out: usize,
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape { max_states: 4, max_delta: 2, letters: 2, max_out: 3 }
    }
}

pub fn alphabet(letters: usize) -> Alphabet {
    Alphabet::new((0..letters.clamp(1, 26)).map(|i| ((b'a' + i as u8) as char).to_string())).expect("plain letters")
}

/// A net with initial configuration `(s0, 0)` and final configuration
/// `(s_k, 0)` for a random state `s_k`. About one label in five is ε.
pub fn random_ocn<R: Rng>(rng: &mut R, shape: NetShape) -> Ocn {
    let alph = alphabet(shape.letters);
    let n = rng.gen_range(1..=shape.max_states.max(1));
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut ts = Vec::new();
    for from in 0..n {
        for _ in 0..rng.gen_range(0..=shape.max_out) {
            let label = if rng.gen_bool(0.2) { Label::Eps } else { Label::Sym(*alph.letters().collect::<Vec<_>>().choose(rng).expect("nonempty")) };
            ts.push(OcnTransition {
                from,
                label,
                to: rng.gen_range(0..n),
                delta: rng.gen_range(-shape.max_delta..=shape.max_delta),
            });
        }
    }
    let fin = rng.gen_range(0..n);
    Ocn::new(alph, states, (0, 0), (fin, 0), ts).expect("valid by construction")
}

/// A random NFA with the shape's state and letter counts (deltas unused).
pub fn random_nfa<R: Rng>(rng: &mut R, shape: NetShape) -> Nfa {
    let alph = alphabet(shape.letters);
    let letters: Vec<_> = alph.letters().collect();
    let n = rng.gen_range(1..=shape.max_states.max(1));
    let states: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    let mut es = Vec::new();
    for from in 0..n {
        for _ in 0..rng.gen_range(0..=shape.max_out) {
            let label = if rng.gen_bool(0.2) { Label::Eps } else { Label::Sym(*letters.choose(rng).expect("nonempty")) };
            es.push(Edge { from, label, to: rng.gen_range(0..n) });
        }
    }
    let fin = rng.gen_range(0..n);
    Nfa::new(alph, states, 0, fin, es).expect("valid by construction")
}

/// A random net plus up to one zero test per state.
pub fn random_oca<R: Rng>(rng: &mut R, shape: NetShape) -> Oca {
    let net = random_ocn(rng, shape);
    let n = net.num_states();
    let letters: Vec<_> = net.alphabet().letters().collect();
    let mut zs = Vec::new();
    for from in 0..n {
        if rng.gen_bool(0.4) {
            let label = if rng.gen_bool(0.2) { Label::Eps } else { Label::Sym(*letters.choose(rng).expect("nonempty")) };
            zs.push(Edge { from, label, to: rng.gen_range(0..n) });
        }
    }
    Oca::new(net, zs).expect("valid by construction")
}

/// A random automaton that is acyclic up to bound `b`, found by rejection
/// sampling (at most 1000 draws, then a chain with no loops).
pub fn random_acyclic_oca<R: Rng>(rng: &mut R, shape: NetShape, b: u64) -> Oca {
    for _ in 0..1000 {
        let a = random_oca(rng, shape);
        if AcyclicOca::certify(&a, b).is_ok() {
            return a;
        }
    }
    let alph = alphabet(shape.letters);
    let x = Label::Sym(alph.letters().next().expect("nonempty"));
    let net = Ocn::new(alph, vec!["s0".into(), "s1".into()], (0, 0), (1, 0), vec![OcnTransition { from: 0, label: x, to: 1, delta: 0 }])
        .expect("valid by construction");
    Oca::from(net)
}

/// A 2-VASS with mask `(ℕ, ℕ)`, initial `(s0, (0, 0))` and a random final
/// state with `(0, 0)`.
pub fn random_vass2<R: Rng>(rng: &mut R, max_states: usize, max_delta: i64, max_out: usize) -> Vass2 {
    let n = rng.gen_range(1..=max_states.max(1));
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut ts = Vec::new();
    for from in 0..n {
        for _ in 0..rng.gen_range(0..=max_out) {
            let delta = [rng.gen_range(-max_delta..=max_delta), rng.gen_range(-max_delta..=max_delta)];
            if delta != [0, 0] {
                ts.push(VassTransition { from, delta, to: rng.gen_range(0..n), label: Label::Eps });
            }
        }
    }
    let fin = rng.gen_range(0..n);
    Vass2::new(states, ts, NAT_NAT)
        .and_then(|v| v.with_endpoints((0, [0, 0]), (fin, [0, 0])))
        .expect("valid by construction")
}

/// A system with `1..=max_vars` unknowns and `1..=max_rows` rows, each an
/// equation or an inequality with entries in `-max_abs..=max_abs`.
pub fn random_dio_system<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize, max_abs: i64) -> DioSystem {
    let nv = rng.gen_range(1..=max_vars.max(1));
    let rows = (0..rng.gen_range(1..=max_rows.max(1)))
        .map(|_| DioRow {
            coeffs: (0..nv).map(|_| rng.gen_range(-max_abs..=max_abs)).collect(),
            rel: if rng.gen_bool(0.7) { Relation::Eq } else { Relation::Ge },
            rhs: rng.gen_range(-max_abs..=max_abs),
        })
        .collect();
    DioSystem::new(nv, rows).expect("consistent widths")
}

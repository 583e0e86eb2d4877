//! End-to-end properties of the decision procedure on random pairs.

mod common;

use common::all_words;
use ocnsep::automata::{cross_product, product_ocn_nfa, Language, MachineBuilder, Oca, Ocn, NAT_NAT};
use ocnsep::decider::{
    approximation_separates, check_separability, direct_n_reachability, verify_verdict, NReachOutcome, RunConfig,
    Verdict,
};
use ocnsep::lps::LpsBudget;
use ocnsep::parikh::ParikhBudget;
use ocnsep::random::{random_ocn, rng, NetShape};
use ocnsep::reach1::{bounded_accepts, bounded_empty, BfsBudget};
use proptest::prelude::*;

const SHAPE: NetShape = NetShape { max_states: 3, max_delta: 1, letters: 2, max_out: 2 };

fn small_config() -> RunConfig {
    RunConfig {
        n_max: 8,
        lps: LpsBudget { max_seg_len: 3, max_loop_len: 3, max_loops: 2 },
        parikh: ParikhBudget { max_run_len: 10, max_pump_len: 6 },
        bfs: BfsBudget { max_counter: 32, max_steps: 20_000 },
        ..RunConfig::default()
    }
}

fn larger_config() -> RunConfig {
    let c = small_config();
    RunConfig {
        n_max: c.n_max * 4,
        lps: LpsBudget { max_seg_len: 6, max_loop_len: 6, max_loops: 3 },
        parikh: ParikhBudget { max_run_len: 20, max_pump_len: 12 },
        bfs: BfsBudget { max_counter: 128, max_steps: 80_000 },
        ..c
    }
}

fn pair(seed: u64) -> (Ocn, Ocn) {
    let mut r = rng(seed);
    (random_ocn(&mut r, SHAPE), random_ocn(&mut r, SHAPE))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Each definite verdict passes the certificate checker and an
    /// independent check of its own.
    #[test]
    fn verdicts_are_sound(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let config = small_config();
        let verdict = check_separability(&a, &b, &config).unwrap();
        if !matches!(verdict, Verdict::Unknown { .. }) {
            prop_assert!(verify_verdict(&verdict, &a, &b), "{} does not verify", verdict.kind());
        }
        let v = cross_product(&a, &b, NAT_NAT).unwrap();
        match &verdict {
            Verdict::Separable { n, separator } => {
                for w in all_words(a.alphabet(), 6) {
                    if bounded_accepts(&Oca::from(a.clone()), &w, 40) {
                        prop_assert!(separator.accepts(&w));
                    }
                }
                prop_assert!(bounded_empty(&Oca::from(product_ocn_nfa(&b, separator).unwrap()), 60));
                prop_assert!(approximation_separates(&a, &b, 2 * n).unwrap());
                let big = BfsBudget { max_counter: 48, max_steps: 200_000 };
                prop_assert_eq!(direct_n_reachability(&v, *n as u64, big), NReachOutcome::NotFoundWithinBudget);
            }
            Verdict::NotSeparable(_) => {
                for n in 1..=4 {
                    match direct_n_reachability(&v, n, BfsBudget::default()) {
                        NReachOutcome::Witness(w) => prop_assert!(w.check(&v)),
                        NReachOutcome::NotFoundWithinBudget => prop_assert!(false, "no {}-reachability witness", n),
                    }
                }
            }
            Verdict::NotDisjoint { witness } => {
                prop_assert!(bounded_accepts(&Oca::from(a.clone()), witness, 60));
                prop_assert!(bounded_accepts(&Oca::from(b.clone()), witness, 60));
            }
            Verdict::Unknown { .. } => {}
        }
        let back = Verdict::from_json(&verdict.to_json(&a, &v, &config), &a, &b).unwrap();
        prop_assert_eq!(back.kind(), verdict.kind());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Larger budgets never flip a definite answer.
    #[test]
    fn verdicts_are_exclusive(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let small = check_separability(&a, &b, &small_config()).unwrap();
        let large = check_separability(&a, &b, &larger_config()).unwrap();
        if !matches!(small, Verdict::Unknown { .. }) {
            prop_assert_eq!(small.kind(), large.kind());
        }
    }
}

/// `{a^i b^i}` with counter steps of size `p`.
fn balanced(p: i64) -> Ocn {
    MachineBuilder::new(["a", "b"])
        .trans("q0", "a", "q0", p)
        .trans("q0", "eps", "qf", 0)
        .trans("qf", "b", "qf", -p)
        .init("q0", 0)
        .fin("qf", 0)
        .build_ocn()
        .unwrap()
}

/// `{a^i b^j : j > i}` with counter steps of size `s`.
fn more_bs(s: i64) -> Ocn {
    MachineBuilder::new(["a", "b"])
        .trans("p0", "a", "p0", s)
        .trans("p0", "b", "p1", 0)
        .trans("p1", "b", "p1", -s)
        .trans("p1", "b", "p1", 0)
        .init("p0", 0)
        .fin("p1", 0)
        .build_ocn()
        .unwrap()
}

#[test]
fn scaled_counting_pairs_are_not_separable() {
    for p in 1..=2 {
        for s in 1..=2 {
            let (a, b) = (balanced(p), more_bs(s));
            let verdict = check_separability(&a, &b, &RunConfig::default()).unwrap();
            assert_eq!(verdict.kind(), "not_separable", "p = {p}, s = {s}");
            assert!(verify_verdict(&verdict, &a, &b));
            let v = cross_product(&a.normalized(), &b.normalized(), NAT_NAT).unwrap();
            for n in 1..=4 {
                match direct_n_reachability(&v, n, BfsBudget::default()) {
                    NReachOutcome::Witness(w) => assert!(w.check(&v)),
                    NReachOutcome::NotFoundWithinBudget => panic!("p = {p}, s = {s}: no {n}-reachability witness"),
                }
            }
        }
    }
}

#[test]
fn bounded_counting_pairs_are_separable() {
    // a^i b^i against a^i b^j with j > i and i at most 2
    let b = MachineBuilder::new(["a", "b"])
        .trans("p0", "a", "p1", 1)
        .trans("p1", "a", "p2", 1)
        .trans("p0", "b", "r", 0)
        .trans("p1", "b", "r", 0)
        .trans("p2", "b", "r", 0)
        .trans("r", "b", "r", 0)
        .trans("r", "b", "r", -1)
        .init("p0", 0)
        .fin("r", 0)
        .build_ocn()
        .unwrap();
    let a = balanced(1);
    let verdict = check_separability(&a, &b, &RunConfig::default()).unwrap();
    let Verdict::Separable { n, .. } = verdict else { panic!("got {}", verdict.kind()) };
    assert!(verify_verdict(&verdict, &a, &b));
    assert!(approximation_separates(&a.normalized(), &b.normalized(), n).unwrap());
}

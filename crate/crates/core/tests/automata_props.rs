//! Properties of membership, products, acceptance normalization, reversal
//! and the text format.

mod common;

use common::{accepts_direct, accepts_multi, all_words, SHAPE};
use ocnsep::automata::{
    normalize_acceptance, product_ocn_nfa, reverse_vass2, FinalCondition, Language, Machine, Oca,
};
use ocnsep::automata::text::{parse_machine, write_machine};
use ocnsep::random::{random_nfa, random_oca, random_ocn, random_vass2, rng};
use ocnsep::reductions::TwoCounterMachine;
use proptest::prelude::*;
use rand::Rng;

const CAP: i64 = 60;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn membership_matches_direct_search(seed in any::<u64>()) {
        let a = random_ocn(&mut rng(seed), SHAPE);
        for w in all_words(a.alphabet(), 6) {
            prop_assert_eq!(a.accepts(&w), accepts_direct(&a, &w, CAP), "word {:?}", w);
        }
    }

    #[test]
    fn product_is_intersection(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_ocn(&mut r, SHAPE);
        let n = random_nfa(&mut r, SHAPE);
        let p = product_ocn_nfa(&a, &n).unwrap();
        for w in all_words(a.alphabet(), 6) {
            prop_assert_eq!(p.accepts(&w), a.accepts(&w) && n.accepts(&w), "word {:?}", w);
        }
    }

    #[test]
    fn normalization_keeps_the_language(seed in any::<u64>(), by_state in any::<bool>()) {
        let mut r = rng(seed);
        let a = random_ocn(&mut r, SHAPE);
        let k = a.num_states();
        let inits = vec![(0, 0), (r.gen_range(0..k), r.gen_range(0..3))];
        let fin = if by_state {
            FinalCondition::States(vec![r.gen_range(0..k)])
        } else {
            FinalCondition::Configs(vec![(r.gen_range(0..k), r.gen_range(0..3)), a.final_config()])
        };
        let norm = normalize_acceptance(&Oca::from(a.clone()), &inits, &fin);
        prop_assert!(norm.is_normalized());
        for w in all_words(a.alphabet(), 5) {
            prop_assert_eq!(norm.accepts(&w), accepts_multi(&a, &inits, &fin, &w, CAP), "word {:?}", w);
        }
    }

    #[test]
    fn reversal_inverts_steps(seed in any::<u64>()) {
        let v = random_vass2(&mut rng(seed), 4, 2, 3);
        let rv = reverse_vass2(&v);
        prop_assert_eq!(rv.initial(), v.final_config());
        prop_assert_eq!(rv.final_config(), v.initial());
        for (i, t) in v.transitions().iter().enumerate() {
            let j = rv
                .transitions()
                .iter()
                .position(|u| u.from == t.to && u.to == t.from && u.delta == [-t.delta[0], -t.delta[1]]);
            prop_assert!(j.is_some(), "transition {} has no reverse", i);
            let j = j.unwrap();
            for x in 0..3 {
                for y in 0..3 {
                    if let Some(d) = v.fire((t.from, [x, y]), i) {
                        prop_assert_eq!(rv.fire(d, j), Some((t.from, [x, y])));
                    }
                }
            }
        }
        prop_assert_eq!(reverse_vass2(&rv), v);
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        for m in [
            Machine::Nfa(random_nfa(&mut r, SHAPE)),
            Machine::Ocn(random_ocn(&mut r, SHAPE)),
            Machine::Oca(random_oca(&mut r, SHAPE)),
        ] {
            let text = write_machine(&m);
            prop_assert_eq!(parse_machine(&text).unwrap(), m, "text:\n{}", text);
        }
    }
}

#[test]
fn two_counter_text_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/2cm");
    for entry in std::fs::read_dir(dir).unwrap() {
        let src = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let m = TwoCounterMachine::parse(&src).unwrap();
        assert_eq!(TwoCounterMachine::parse(&m.to_string()).unwrap(), m);
    }
}

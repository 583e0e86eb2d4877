//! Emptiness, the level relation and bounded VASS search.

mod common;

use std::collections::HashSet;

use common::SHAPE;
use ocnsep::automata::{enumerate_words, Oca};
use ocnsep::random::{random_oca, random_ocn, random_vass2, rng};
use ocnsep::reach1::{
    bfs_reach, bfs_reachable_set, bounded_empty, expand_to_unit, level_relation, oca_empty, ocn_empty, BfsBudget,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ocn_emptiness_matches_cutoff_search(seed in any::<u64>()) {
        let a = random_ocn(&mut rng(seed), SHAPE);
        prop_assert_eq!(ocn_empty(&a), bounded_empty(&Oca::from(a.clone()), 100));
    }

    #[test]
    fn oca_emptiness_matches_cutoff_search(seed in any::<u64>()) {
        let a = random_oca(&mut rng(seed), SHAPE);
        prop_assert_eq!(oca_empty(&a), bounded_empty(&a, 100));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_imply_nonemptiness(seed in any::<u64>()) {
        let a = random_ocn(&mut rng(seed), SHAPE);
        if !enumerate_words(&a, 6).unwrap().is_empty() {
            prop_assert!(!ocn_empty(&a));
        }
    }

    /// Every pair comes with a replayable witness, and every balanced run
    /// found by brute force is covered.
    #[test]
    fn level_relation_is_exact(seed in any::<u64>()) {
        let unit = expand_to_unit(&random_ocn(&mut rng(seed), SHAPE));
        let net = unit.as_ocn();
        let rel = level_relation(&unit);
        let ts = net.transitions();
        for (p, q) in rel.pairs() {
            let path = rel.witness(p, q).expect("recorded");
            for base in [0, 3] {
                let (mut s, mut c) = (p, base);
                for &t in &path {
                    prop_assert_eq!(ts[t].from, s);
                    c += ts[t].delta;
                    s = ts[t].to;
                    prop_assert!(c >= base, "witness for ({}, {}) drops below its level", p, q);
                }
                prop_assert_eq!((s, c), (q, base));
            }
        }
        for p in 0..net.num_states() {
            let mut seen = HashSet::from([(p, 0i64)]);
            let mut stack = vec![(p, 0i64)];
            while let Some((s, c)) = stack.pop() {
                for t in ts.iter().filter(|t| t.from == s) {
                    let d = (t.to, c + t.delta);
                    if (0..=30).contains(&d.1) && seen.insert(d) {
                        stack.push(d);
                    }
                }
            }
            for &(q, c) in &seen {
                if c == 0 {
                    prop_assert!(rel.contains(p, q), "missing pair ({}, {})", p, q);
                }
            }
        }
    }

    #[test]
    fn bfs_paths_replay(seed in any::<u64>()) {
        let v = random_vass2(&mut rng(seed), 4, 2, 3);
        let from = v.initial().unwrap();
        let budget = BfsBudget { max_counter: 8, max_steps: 20_000 };
        for target in bfs_reachable_set(&v, from, budget).into_iter().take(20) {
            let path = bfs_reach(&v, from, target, budget).path().map(<[usize]>::to_vec);
            prop_assert!(path.is_some(), "listed target {:?} not reached", target);
            let mut c = from;
            for t in path.unwrap() {
                c = v.fire(c, t).expect("path fires under the mask");
            }
            prop_assert_eq!(c, target);
        }
    }
}

//! Linear path schemes against brute-force loop unrolling, and the
//! five-letter middle net against direct simulation.

use ocnsep::automata::{Label, Vass2, INT_NAT};
use ocnsep::lps::{enumerate_lps, profile_of, reach_pieces, reach_via_lps, LpsBudget};
use ocnsep::parikh::{build_mid_ocn, host_runs, mid_map, parikh_semilinear, ParikhBudget};
use ocnsep::random::{random_vass2, rng};
use ocnsep::reach1::{bfs_reach, BfsBudget};
use ocnsep::semilinear::SolverBudget;
use proptest::prelude::*;

const LPS: LpsBudget = LpsBudget { max_seg_len: 3, max_loop_len: 3, max_loops: 2 };
const PARIKH: ParikhBudget = ParikhBudget { max_run_len: 10, max_pump_len: 6 };

fn replay(v: &Vass2, start: (usize, [i64; 2]), run: &[usize]) -> Option<(usize, [i64; 2])> {
    run.iter().try_fold(start, |c, &t| v.fire(c, t))
}

/// Multiplicity vectors in `[0, bound]^k`.
fn grid(k: usize, bound: u64) -> Vec<Vec<u64>> {
    (0..k).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|m| (0..=bound).map(move |i| [m.clone(), vec![i]].concat()))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scheme_reach_is_exact(seed in any::<u64>(), s0 in 0i64..3, s1 in 0i64..3) {
        let v = random_vass2(&mut rng(seed), 3, 2, 3);
        let solver = SolverBudget::default();
        for lps in enumerate_lps(&v, 0, None, LPS).into_iter().take(12) {
            let prof = profile_of(&lps, &v).unwrap();
            let start = [s0, s1];
            // soundness: every piece point replays along its own loop counts
            let pieces = reach_pieces(&prof, start, 2, &solver).unwrap();
            for piece in &pieces {
                for m in grid(piece.reached.periods().len(), 2) {
                    let x = piece.counts_at(&m);
                    let end = replay(&v, (lps.from(), start), &lps.run(&x));
                    prop_assert_eq!(end, Some((lps.to(), {
                        let y = piece.reached.at(&m);
                        [y[0], y[1]]
                    })));
                }
            }
            // completeness: every enabled unrolling lands in the set
            let set = reach_via_lps(&prof, start, 2, &solver).unwrap();
            for x in grid(lps.k(), if lps.k() == 2 { 5 } else { 8 }) {
                if let Some((q, y)) = replay(&v, (lps.from(), start), &lps.run(&x)) {
                    prop_assert_eq!(q, lps.to());
                    prop_assert!(set.member(&y, &solver).unwrap(), "{:?} missing for counts {:?}", y, x);
                }
            }
        }
    }

    #[test]
    fn middle_net_pumps_and_image(seed in any::<u64>()) {
        let v = random_vass2(&mut rng(seed), 3, 2, 3);
        let to = v.final_config().unwrap().0;
        let c = build_mid_ocn(&v, 0, to).unwrap();
        let net = c.ocn();
        prop_assert!(net.transitions().iter().all(|t| t.label != Label::Eps && t.delta.abs() <= 1));
        let ts = net.transitions();
        let sl = parikh_semilinear(&c, PARIKH).unwrap();
        let (fm, _) = mid_map();
        let int = v.with_mask(INT_NAT);
        let solver = SolverBudget::default();
        for h in host_runs(&c, PARIKH).unwrap().into_iter().take(20) {
            let k = h.pumps.len().min(3);
            for m in grid(k, 2) {
                let mult: Vec<u64> = m.iter().copied().chain(std::iter::repeat(0)).take(h.pumps.len()).collect();
                let run = h.pumped(&mult);
                // the pumped run is a run of C from (entry, 0) to (exit, 0)
                let (mut s, mut cnt) = net.initial();
                for &t in &run {
                    prop_assert_eq!(ts[t].from, s);
                    cnt += ts[t].delta;
                    prop_assert!(cnt >= 0);
                    s = ts[t].to;
                }
                prop_assert_eq!((s, cnt), net.final_config());
                let word: Vec<_> = run.iter().filter_map(|&t| ts[t].label.letter()).collect();
                let p = c.parikh(&word);
                prop_assert!(sl.member(&p, &solver).unwrap(), "Parikh vector {:?} not covered", p);
                let x: Vec<i64> = fm.iter().map(|row| row.iter().zip(&p).map(|(a, b)| a * b).sum()).collect();
                let found = bfs_reach(&int, (0, [x[0], x[1]]), (to, [x[2], x[3]]), BfsBudget { max_counter: 64, max_steps: 200_000 });
                prop_assert!(found.path().is_some(), "image {:?} is not a middle run", x);
            }
        }
    }
}

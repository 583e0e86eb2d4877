//! Linear path schemes of a small 2-dimensional VASS and the exact sets of
//! counter vectors each one reaches.

use ocnsep::automata::{Label, Vass2, VassTransition, NAT_NAT};
use ocnsep::lps::{enumerate_lps, profile_of, reach_via_lps, LpsBudget};
use ocnsep::semilinear::SolverBudget;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // s0 pumps (1, 0), moves to s1, which trades (-1, +2)
    let t = |from, delta, to| VassTransition { from, delta, to, label: Label::Eps };
    let v = Vass2::new(
        vec!["s0".into(), "s1".into()],
        vec![t(0, [1, 0], 0), t(0, [0, 0], 1), t(1, [-1, 2], 1)],
        NAT_NAT,
    )?;
    let budget = LpsBudget { max_seg_len: 2, max_loop_len: 2, max_loops: 2 };
    let solver = SolverBudget::default();
    for lps in enumerate_lps(&v, 0, Some(1), budget) {
        let prof = profile_of(&lps, &v)?;
        let reach = reach_via_lps(&prof, [0, 0], 6, &solver)?;
        println!("segments {:?}, loops {:?}", lps.segments(), lps.loops());
        for c in reach.components() {
            println!("  reaches {:?} + {:?}*", c.base(), c.periods());
        }
    }
    Ok(())
}

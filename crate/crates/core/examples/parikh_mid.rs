//! The middle relation of the product of `{a^i b^i}` and `{a^i b^j : j > i}`,
//! computed from Parikh images of the five-letter simulation net.

use std::path::PathBuf;

use ocnsep::automata::{cross_product, NAT_NAT};
use ocnsep::cli::load_net;
use ocnsep::parikh::{build_mid_ocn, mid_set, parikh_semilinear, ParikhBudget, MID_LETTERS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let a = load_net(&data.join("k.ocn"))?.normalized();
    let b = load_net(&data.join("l_prime.ocn"))?.normalized();
    let v = cross_product(&a, &b, NAT_NAT)?;
    let (from, to) = (v.initial().expect("set").0, v.final_config().expect("set").0);
    let budget = ParikhBudget { max_run_len: 12, max_pump_len: 8 };

    let c = build_mid_ocn(&v, from, to)?;
    println!("simulation net: {} states, {} transitions", c.ocn().num_states(), c.ocn().transitions().len());
    println!("Parikh components over {MID_LETTERS:?}:");
    for l in parikh_semilinear(&c, budget)?.components() {
        println!("  {:?} + {:?}*", l.base(), l.periods());
    }
    println!("MID from {} to {} as (m, l, m'', l'):", v.states()[from], v.states()[to]);
    for l in mid_set(&v, from, to, budget)?.components() {
        println!("  {:?} + {:?}*", l.base(), l.periods());
    }
    Ok(())
}

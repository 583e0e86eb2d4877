//! Exact emptiness of nets and automata with zero tests, with a replayed
//! witness run from the level relation.

use std::path::PathBuf;

use ocnsep::automata::text::parse_machine;
use ocnsep::automata::Machine;
use ocnsep::reach1::{bounded_empty, expand_to_unit, level_relation, oca_empty, ocn_empty};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    for name in ["k.ocn", "l.ocn", "up_down.oca", "needs_two.oca"] {
        let m = parse_machine(&std::fs::read_to_string(data.join(name))?)?;
        let (empty, cutoff) = match &m {
            Machine::Ocn(o) => (ocn_empty(o), bounded_empty(&o.clone().into(), 50)),
            Machine::Oca(o) => (oca_empty(o), bounded_empty(o, 50)),
            Machine::Nfa(_) => continue,
        };
        println!("{name}: empty = {empty} (search up to counter 50 agrees: {})", empty == cutoff);
    }

    // balanced runs of the K net: from q0 back to its own level at qf
    let k = match parse_machine(&std::fs::read_to_string(data.join("k.ocn"))?)? {
        Machine::Ocn(o) => o,
        _ => unreachable!("k.ocn is a net"),
    };
    let unit = expand_to_unit(&k);
    let rel = level_relation(&unit);
    let net = unit.as_ocn();
    let names = net.states();
    for (p, q) in rel.pairs() {
        let steps: Vec<String> = rel
            .witness(p, q)
            .unwrap_or_default()
            .iter()
            .map(|&t| {
                let t = net.transitions()[t];
                format!("{}({:+})", net.alphabet().label_name(t.label), t.delta)
            })
            .collect();
        println!("level ({}, {}): [{}]", names[p], names[q], steps.join(" "));
    }
    Ok(())
}

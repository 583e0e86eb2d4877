//! The two hardness generators: a bounded-run question for an acyclic
//! automaton, and acceptance of a two-counter machine.

use std::path::PathBuf;

use ocnsep::automata::text::parse_machine;
use ocnsep::automata::Machine;
use ocnsep::automata::Language;
use ocnsep::reductions::{
    bounded_nonemptiness, gen_pspace_instance, gen_undecidability_instance, run_2cm, RunResult, TwoCounterMachine,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");

    let Machine::Oca(a) = parse_machine(&std::fs::read_to_string(data.join("up_down.oca"))?)? else {
        return Err("up_down.oca is not an automaton with zero tests".into());
    };
    for b in 0..=2 {
        let (x, y) = gen_pspace_instance(&a, b)?;
        println!(
            "bound {b}: run within bound = {}, generated nets have {} and {} states",
            bounded_nonemptiness(&a, b),
            x.num_states(),
            y.num_states()
        );
    }

    let m = TwoCounterMachine::parse(&std::fs::read_to_string(data.join("2cm/even.2cm"))?)?;
    for k in 0..=4 {
        let (a1, a2) = gen_undecidability_instance(&m, k);
        match run_2cm(&m, k, 10_000) {
            RunResult::Accepted(trace) => {
                let w = m.trace_word(&trace);
                println!("k = {k}: accepted; trace word accepted by both: {}", a1.accepts(&w) && a2.accepts(&w));
            }
            RunResult::Rejected(trace) => println!("k = {k}: rejected after {} steps", trace.len()),
            RunResult::Timeout => println!("k = {k}: no halt within the step limit"),
        }
    }
    Ok(())
}

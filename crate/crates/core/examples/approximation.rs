//! Builds modular approximations of `{a^i b^i}` and lists their short
//! words. Each approximation is a finite automaton containing the net's
//! language; larger moduli give tighter languages when one divides the other.

use ocnsep::approx::{build_approximation, check_high_closure};
use ocnsep::automata::text::write_machine;
use ocnsep::automata::Machine;
use ocnsep::automata::{enumerate_words, MachineBuilder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = MachineBuilder::new(["a", "b"])
        .trans("q0", "a", "q0", 1)
        .trans("q0", "eps", "qf", 0)
        .trans("qf", "b", "qf", -1)
        .init("q0", 0)
        .fin("qf", 0)
        .build_ocn()?;

    let exact: Vec<String> = enumerate_words(&k, 6)?.iter().map(|w| k.alphabet().format_word(w)).collect();
    println!("net, words up to length 6: {}", exact.join(" "));

    for n in 1..=3 {
        let an = build_approximation(&k, n)?;
        let words: Vec<String> = enumerate_words(&an, 6)?.iter().map(|w| k.alphabet().format_word(w)).collect();
        println!("A_{n} ({} states, high-closed: {}): {}", an.num_states(), check_high_closure(&an)?, words.join(" "));
    }

    println!("\nA_2 pruned, in the text format:\n");
    print!("{}", write_machine(&Machine::Nfa(build_approximation(&k, 2)?.prune())));
    Ok(())
}

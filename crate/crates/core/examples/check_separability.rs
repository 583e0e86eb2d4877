//! Decides separability of two machines given on the command line and
//! prints the verdict JSON.
//!
//! ```text
//! cargo run --example check_separability -- data/k.ocn data/l_prime.ocn
//! ```

use std::path::PathBuf;

use ocnsep::automata::{cross_product, NAT_NAT};
use ocnsep::cli::load_net;
use ocnsep::decider::{check_separability, verify_verdict, RunConfig, Verdict};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let a_path = args.next().unwrap_or_else(|| data.join("k.ocn"));
    let b_path = args.next().unwrap_or_else(|| data.join("l.ocn"));
    let a = load_net(&a_path)?;
    let b = load_net(&b_path)?;

    let config = RunConfig::default();
    let verdict = check_separability(&a, &b, &config)?;
    match &verdict {
        Verdict::Separable { n, separator } => {
            println!("separable: the {n}-approximation ({} states) separates", separator.num_states())
        }
        Verdict::NotSeparable(piece) => {
            println!("not separable: witness component {:?}", piece.component)
        }
        Verdict::NotDisjoint { witness } => {
            println!("not disjoint: both accept `{}`", a.alphabet().format_word(witness))
        }
        Verdict::Unknown { budgets_tried, .. } => println!("unknown after {} budget levels", budgets_tried.len()),
    }
    println!("certificate checks: {}", verify_verdict(&verdict, &a, &b));

    let v = cross_product(&a.normalized(), &b.normalized(), NAT_NAT)?;
    println!("{}", serde_json::to_string_pretty(&verdict.to_json(&a, &v, &config))?);
    Ok(())
}

//! Verdicts round-trip through JSON and are re-checked independently of the
//! search; a tampered certificate is rejected.

use std::path::PathBuf;

use ocnsep::automata::{cross_product, NAT_NAT};
use ocnsep::cli::load_net;
use ocnsep::decider::{check_separability, verify_verdict, RunConfig, Verdict};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let k = load_net(&data.join("k.ocn"))?;
    let config = RunConfig::default();
    for other in ["l.ocn", "l_prime.ocn", "k.ocn"] {
        let b = load_net(&data.join(other))?;
        let verdict = check_separability(&k, &b, &config)?;
        let v = cross_product(&k.normalized(), &b.normalized(), NAT_NAT)?;
        let json = verdict.to_json(&k, &v, &config);
        let back = Verdict::from_json(&json, &k, &b)?;
        println!("k.ocn vs {other}: {} (verifies after round trip: {})", back.kind(), verify_verdict(&back, &k, &b));

        if let Verdict::Separable { n, separator } = back {
            let tampered = Verdict::Separable { n: n + 1, separator };
            println!("  claiming modulus {} instead: verifies = {}", n + 1, verify_verdict(&tampered, &k, &b));
        }
    }
    Ok(())
}

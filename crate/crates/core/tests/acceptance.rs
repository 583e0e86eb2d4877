//! Acceptance suite: one check per criterion, each printing
//! `criterion N: PASS` or `criterion N: FAIL (reason)`.
//!
//! Run with `cargo test --test acceptance`. The process exits nonzero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Parser;
use ocnsep::approx::{build_approximation, check_high_closure};
use ocnsep::automata::text::parse_machine;
use ocnsep::automata::{
    cross_product, enumerate_words, product_nfa_nfa, product_ocn_nfa, reverse_vass2, Language, Machine, Oca, Ocn, Vass2,
    Word, INT_NAT, NAT_NAT,
};
use ocnsep::cli::{self, Cli};
use ocnsep::decider::{direct_n_reachability, verify_verdict, NReachOutcome, Verdict};
use ocnsep::lps::{pref_suff_sets, reach_from, LpsBudget};
use ocnsep::parikh::{build_mid_ocn, mid_set, parikh_semilinear, ParikhBudget};
use ocnsep::random::{random_acyclic_oca, random_dio_system, random_nfa, random_oca, random_ocn, random_vass2, rng, NetShape};
use ocnsep::reach1::{bfs_reach, bfs_reachable_set, bounded_empty, oca_empty, ocn_empty, BfsBudget};
use ocnsep::reductions::{
    bounded_nonemptiness, common_word_bounded, gen_pspace_instance, gen_undecidability_instance, letter_bound_cap, run_2cm,
    RunResult, TwoCounterMachine,
};
use ocnsep::semilinear::{solve_nonneg, SolverBudget};
use serde_json::Value;

type Check = Result<(), String>;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn load_ocn(name: &str) -> Ocn {
    let src = std::fs::read_to_string(data(name)).expect("data file");
    match parse_machine(&src).expect("data file parses") {
        Machine::Ocn(o) => o,
        other => panic!("{name} is a {}", other.kind()),
    }
}

fn load_oca(name: &str) -> Oca {
    let src = std::fs::read_to_string(data(name)).expect("data file");
    match parse_machine(&src).expect("data file parses") {
        Machine::Oca(o) => o,
        Machine::Ocn(o) => Oca::from(o),
        other => panic!("{name} is a {}", other.kind()),
    }
}

fn check_cmd(a: &str, b: &str, extra: &[&str]) -> cli::Outcome {
    let pa = data(a);
    let pb = data(b);
    let mut args = vec!["ocnsep".to_string(), "check".into(), pa.display().to_string(), pb.display().to_string()];
    args.extend(extra.iter().map(|s| s.to_string()));
    cli::run(&Cli::parse_from(args))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Check {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

/// K vs L is separable and the separator is checked independently.
fn criterion_1() -> Check {
    let start = Instant::now();
    let out = check_cmd("k.ocn", "l.ocn", &[]);
    ensure(out.code == 0, || format!("exit code {} ({})", out.code, out.stderr))?;
    let j: Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    ensure(j["verdict"] == "separable", || format!("verdict {}", j["verdict"]))?;
    let text = j["separator"]["text"].as_str().ok_or("no separator text")?;
    let Machine::Nfa(sep) = parse_machine(text).map_err(|e| e.to_string())? else {
        return Err("separator is not an NFA".into());
    };
    let k = load_ocn("k.ocn");
    let l = load_ocn("l.ocn");
    for w in enumerate_words(&k, 12).map_err(|e| e.to_string())? {
        ensure(sep.accepts(&w), || format!("separator rejects {}", k.alphabet().format_word(&w)))?;
    }
    let prod = product_ocn_nfa(&l.normalized(), &sep).map_err(|e| e.to_string())?;
    ensure(ocn_empty(&prod), || "separator meets L".into())?;
    within(start, Duration::from_secs(5))
}

/// K vs L' is not separable; the witness verifies and n-reachability holds
/// for small n.
fn criterion_2() -> Check {
    let start = Instant::now();
    let out = check_cmd("k.ocn", "l_prime.ocn", &[]);
    ensure(out.code == 1, || format!("exit code {} ({})", out.code, out.stderr))?;
    let j: Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    ensure(j["verdict"] == "not_separable", || format!("verdict {}", j["verdict"]))?;
    let k = load_ocn("k.ocn");
    let lp = load_ocn("l_prime.ocn");
    let verdict = Verdict::from_json(&j, &k, &lp)?;
    ensure(verify_verdict(&verdict, &k, &lp), || "verify_verdict rejects the witness".into())?;
    let v = cross_product(&k.normalized(), &lp.normalized(), NAT_NAT).map_err(|e| e.to_string())?;
    for n in 1..=6 {
        match direct_n_reachability(&v, n, BfsBudget::default()) {
            NReachOutcome::Witness(w) => ensure(w.check(&v), || format!("n = {n}: witness does not replay"))?,
            NReachOutcome::NotFoundWithinBudget => return Err(format!("n = {n}: no n-reachability witness")),
        }
    }
    within(start, Duration::from_secs(60))
}

/// The 2-approximation of the K net has exactly the expected words up to
/// length 10.
fn criterion_3() -> Check {
    let k = load_ocn("k.ocn");
    let a2 = build_approximation(&k, 2).map_err(|e| e.to_string())?;
    let got: BTreeSet<Word> = enumerate_words(&a2, 10).map_err(|e| e.to_string())?.into_iter().collect();
    let a = k.alphabet().letter("a").ok_or("no letter a")?;
    let b = k.alphabet().letter("b").ok_or("no letter b")?;
    let mut want = BTreeSet::new();
    for n in 0..=10usize {
        for m in 0..=10 - n {
            if (n == m && n < 2) || (n >= 2 && m >= 2 && n % 2 == m % 2) {
                want.insert([vec![a; n], vec![b; m]].concat());
            }
        }
    }
    ensure(got == want, || {
        let extra: Vec<_> = got.difference(&want).map(|w| k.alphabet().format_word(w)).collect();
        let missing: Vec<_> = want.difference(&got).map(|w| k.alphabet().format_word(w)).collect();
        format!("extra {extra:?}, missing {missing:?}")
    })
}

/// Inclusion, monotonicity, high closure and commutation on random nets.
fn criterion_4() -> Check {
    let shape = NetShape { max_states: 4, max_delta: 2, letters: 2, max_out: 3 };
    let mut r = rng(4);
    for i in 0..30 {
        let a = random_ocn(&mut r, shape);
        let nfa = random_nfa(&mut r, NetShape { max_states: 3, ..shape });
        let words = enumerate_words(&a, 8).map_err(|e| e.to_string())?;
        let approx: Vec<_> = (1..=4).map(|n| build_approximation(&a, n).expect("normalized")).collect();
        let approx_words: Vec<BTreeSet<Word>> =
            approx.iter().map(|an| enumerate_words(an, 8).expect("within cap").into_iter().collect()).collect();
        for (k, an) in approx.iter().enumerate() {
            let n = k + 1;
            for w in &words {
                ensure(an.accepts(w), || format!("instance {i}: L(A) not in L(A_{n})"))?;
            }
            for m in (1..=n).filter(|m| n % m == 0) {
                ensure(approx_words[k].is_subset(&approx_words[m - 1]), || format!("instance {i}: L(A_{n}) not in L(A_{m})"))?;
            }
            ensure(check_high_closure(an) == Ok(true), || format!("instance {i}: A_{n} is not high-closed"))?;
            let prod = product_ocn_nfa(&a, &nfa).map_err(|e| e.to_string())?;
            let lhs: BTreeSet<Word> =
                enumerate_words(&build_approximation(&prod, n).map_err(|e| e.to_string())?, 8).expect("cap").into_iter().collect();
            let rhs: BTreeSet<Word> =
                enumerate_words(&product_nfa_nfa(an, &nfa).map_err(|e| e.to_string())?, 8).expect("cap").into_iter().collect();
            ensure(lhs == rhs, || format!("instance {i}: (A x B)_{n} differs from A_{n} x B"))?;
        }
    }
    Ok(())
}

/// Exact emptiness against the cutoff search.
fn criterion_5() -> Check {
    let shape = NetShape::default();
    let mut r = rng(5);
    let oracle = |a: &Oca| {
        let at50 = bounded_empty(a, 50);
        if at50 {
            bounded_empty(a, 100)
        } else {
            false
        }
    };
    for i in 0..200 {
        let a = random_ocn(&mut r, shape);
        ensure(ocn_empty(&a) == oracle(&Oca::from(a.clone())), || format!("OCN {i}: ocn_empty disagrees"))?;
    }
    for i in 0..200 {
        let a = random_oca(&mut r, shape);
        ensure(oca_empty(&a) == oracle(&a), || format!("OCA {i}: oca_empty disagrees"))?;
    }
    Ok(())
}

/// `B + P*` against brute force over the box `[0, 25]^vars`.
fn criterion_6() -> Check {
    const BOX: i64 = 25;
    let mut r = rng(6);
    let budget = SolverBudget::default();
    for i in 0..100 {
        let sys = random_dio_system(&mut r, 3, 2, 4);
        let nv = sys.num_vars();
        let sol = solve_nonneg(&sys, &budget).map_err(|e| format!("system {i}: {e}"))?;
        let mut brute = BTreeSet::new();
        let mut x = vec![0i64; nv];
        loop {
            if sys.satisfied_by(&x) {
                brute.insert(x.clone());
            }
            let mut j = 0;
            while j < nv && x[j] == BOX {
                x[j] = 0;
                j += 1;
            }
            if j == nv {
                break;
            }
            x[j] += 1;
        }
        let in_box = |v: &[i64]| v.iter().all(|&c| (0..=BOX).contains(&c));
        let mut generated: BTreeSet<Vec<i64>> = sol.bases.iter().filter(|b| in_box(b)).cloned().collect();
        let mut frontier: Vec<Vec<i64>> = generated.iter().cloned().collect();
        while let Some(v) = frontier.pop() {
            for p in &sol.periods {
                let w: Vec<i64> = v.iter().zip(p).map(|(a, b)| a + b).collect();
                if in_box(&w) && generated.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        ensure(generated == brute, || format!("system {i}: B + P* differs from the brute-force solutions"))?;
    }
    Ok(())
}

fn small_mults(k: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0; k], vec![1; k], vec![2; k]];
    for i in 0..k {
        let mut e = vec![0; k];
        e[i] = 1;
        out.push(e.clone());
        e[i] = 3;
        out.push(e);
    }
    out
}

/// Seeded random 2-VASS, keeping only those with at least 8 configurations
/// reachable under counter value 6 so the checks are not vacuous.
fn random_instances(seed: u64, count: usize) -> Vec<Vass2> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let v = random_vass2(&mut r, 3, 2, 3);
        let reach = bfs_reachable_set(&v, v.initial().expect("endpoints"), BfsBudget { max_counter: 6, max_steps: 100_000 });
        if reach.len() >= 8 {
            out.push(v);
        }
    }
    out
}

/// PREF/SUFF sets replay, and cover everything BFS reaches with counters
/// at most 6.
fn criterion_7() -> Check {
    let budget = LpsBudget { max_seg_len: 6, max_loop_len: 6, max_loops: 3 };
    let solver = SolverBudget::default();
    for (i, v) in random_instances(7, 20).iter().enumerate() {
        let targets: Vec<usize> = (0..v.num_states()).collect();
        for (side, w) in [("PREF", v.clone()), ("SUFF", reverse_vass2(v))] {
            let start = w.initial().expect("endpoints");
            let pieces = reach_from(&w, start, &targets, budget, &solver).map_err(|e| format!("instance {i}: {e}"))?;
            for (&q, list) in &pieces {
                for (lps, piece) in list {
                    for mult in small_mults(piece.reached.periods().len()) {
                        let y = piece.reached.at(&mult);
                        let counts = piece.counts_at(&mult);
                        let end = w.replay(start, &lps.run(&counts));
                        ensure(end == Some((q, [y[0], y[1]])), || {
                            format!("instance {i}: {side} vector ({q}, {y:?}) does not replay along its scheme")
                        })?;
                    }
                }
            }
            let sets = pref_suff_sets(&w, &targets, budget, &solver).map_err(|e| format!("instance {i}: {e}"))?;
            for (&q, set) in &sets {
                for comp in set.components() {
                    let from_pieces = pieces[&q].iter().any(|(_, p)| &p.reached == comp);
                    ensure(from_pieces, || format!("instance {i}: {side} component for {q} has no scheme"))?;
                }
            }
            let truncated = BfsBudget { max_counter: 6, max_steps: 1_000_000 };
            for (q, x) in bfs_reachable_set(&w, start, truncated) {
                let member = sets[&q].member(&x, &solver).map_err(|e| format!("instance {i}: membership of {x:?}: {e}"))?;
                ensure(member, || format!("instance {i}: {side} misses ({q}, {x:?})"))?;
            }
        }
    }
    Ok(())
}

/// Sampled MID members replay, and short words of C are covered.
fn criterion_8() -> Check {
    let budget = ParikhBudget { max_run_len: 8, max_pump_len: 6 };
    let solver = SolverBudget::default();
    let k = load_ocn("k.ocn");
    let lp = load_ocn("l_prime.ocn");
    let mut instances = vec![cross_product(&k.normalized(), &lp.normalized(), NAT_NAT).map_err(|e| e.to_string())?];
    instances.extend(random_instances(8, 6));
    let bfs = BfsBudget { max_counter: 64, max_steps: 200_000 };
    for (i, v) in instances.iter().enumerate() {
        let int = v.with_mask(INT_NAT);
        for from in 0..v.num_states() {
            for to in 0..v.num_states() {
                let mid = mid_set(v, from, to, budget).map_err(|e| format!("instance {i}: {e}"))?;
                for comp in mid.components() {
                    for mult in small_mults(comp.periods().len()) {
                        let x = comp.at(&mult);
                        let ok = bfs_reach(&int, (from, [x[0], x[1]]), (to, [x[2], x[3]]), bfs).path().is_some();
                        ensure(ok, || format!("instance {i}: MID member {x:?} for ({from}, {to}) does not replay"))?;
                    }
                }
                let c = build_mid_ocn(v, from, to).map_err(|e| e.to_string())?;
                let image = parikh_semilinear(&c, budget).map_err(|e| e.to_string())?;
                for w in enumerate_words(c.ocn(), 8).map_err(|e| e.to_string())? {
                    let p = c.parikh(&w);
                    let member = image.member(&p, &solver).map_err(|e| e.to_string())?;
                    ensure(member, || format!("instance {i}: Parikh vector {p:?} of an accepted word is missing"))?;
                }
            }
        }
    }
    Ok(())
}

/// The hardness pair intersects exactly when a bounded run exists.
fn criterion_9() -> Check {
    let mut r = rng(9);
    let shape = NetShape { max_states: 4, max_delta: 2, letters: 2, max_out: 2 };
    let mut positives = 0;
    for i in 0..20u64 {
        let b = i % 6;
        let a = random_acyclic_oca(&mut r, shape, b);
        let (big_b, big_b2) = gen_pspace_instance(&a, b).map_err(|e| format!("instance {i}: {e}"))?;
        if bounded_nonemptiness(&a, b) {
            positives += 1;
            let v = cross_product(&big_b.normalized(), &big_b2.normalized(), NAT_NAT).map_err(|e| e.to_string())?;
            let found = bfs_reach(&v, v.initial().expect("endpoints"), v.final_config().expect("endpoints"), BfsBudget::default());
            ensure(found.path().is_some(), || format!("instance {i}: bounded run but no common word"))?;
        } else {
            let (x, y) = (Oca::from(big_b), Oca::from(big_b2));
            let len = (b.max(1) as usize) * a.num_states();
            let cap = letter_bound_cap(&x, &y, len);
            let w = common_word_bounded(&x, &y, len, cap);
            ensure(w.is_none(), || format!("instance {i}: no bounded run but a common word exists"))?;
        }
    }
    // the up_down corpus automaton is a fixed positive case
    let a = load_oca("up_down.oca");
    ensure(bounded_nonemptiness(&a, 1) && !bounded_nonemptiness(&a, 0), || "up_down.oca bounds".into())?;
    ensure(positives > 0 || bounded_nonemptiness(&a, 1), || "no positive instance exercised".into())
}

/// Two-counter machine runs against the generated pairs.
fn criterion_10() -> Check {
    for name in ["drain", "even", "transfer", "at_least_two", "mod_three"] {
        let src = std::fs::read_to_string(data(&format!("2cm/{name}.2cm"))).map_err(|e| e.to_string())?;
        let m = TwoCounterMachine::parse(&src).map_err(|e| format!("{name}: {e}"))?;
        for k in 0..=5 {
            let (a1, a2) = gen_undecidability_instance(&m, k);
            match run_2cm(&m, k, 10_000) {
                RunResult::Accepted(trace) => {
                    let w = m.trace_word(&trace);
                    ensure(a1.accepts(&w) && a2.accepts(&w), || format!("{name}, k = {k}: trace is not a common word"))?;
                }
                RunResult::Rejected(trace) => {
                    let len = trace.len();
                    let cap = letter_bound_cap(&a1, &a2, len);
                    let w = common_word_bounded(&a1, &a2, len, cap);
                    ensure(w.is_none(), || format!("{name}, k = {k}: rejected input but a common word exists"))?;
                }
                RunResult::Timeout => return Err(format!("{name}, k = {k}: timeout")),
            }
        }
    }
    Ok(())
}

/// Repeated runs give byte-identical JSON, whatever the job count.
fn criterion_11() -> Check {
    for (a, b) in [("k.ocn", "l.ocn"), ("k.ocn", "l_prime.ocn"), ("l.ocn", "l_prime.ocn"), ("l_prime.ocn", "k.ocn")] {
        let first = check_cmd(a, b, &["--seed", "17"]);
        for extra in [&["--seed", "17"][..], &["--seed", "17", "--jobs", "4"][..]] {
            let again = check_cmd(a, b, extra);
            ensure(first == again, || format!("{a} vs {b}: output differs with {extra:?}"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(usize, fn() -> Check); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (n, f) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        match std::panic::catch_unwind(f) {
            Ok(Ok(())) => println!("criterion {n}: PASS ({:.2?})", start.elapsed()),
            Ok(Err(e)) => {
                failed += 1;
                println!("criterion {n}: FAIL ({e})");
            }
            Err(_) => {
                failed += 1;
                println!("criterion {n}: FAIL (panicked)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

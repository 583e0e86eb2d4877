//! Command implementations behind the `ocnsep` binary.
//!
//! Each `cmd_*` function returns an [`Outcome`] holding the exit code and
//! the text for stdout and stderr, so the commands are testable without a
//! process. Exit codes of `check` are 0 separable, 1 not separable, 2 not
//! disjoint, 3 unknown; every command exits with 4 on errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::approx::build_approximation;
use crate::automata::text::{parse_machine, write_machine_with_comments};
use crate::automata::{cross_product, enumerate_words_with_cap, Language, Machine, Ocn, DEFAULT_WORD_CAP, NAT_NAT};
use crate::decider::{check_separability, verify_verdict, RunConfig, Verdict};
use crate::lps::LpsBudget;
use crate::parikh::ParikhBudget;
use crate::reach1::{oca_empty, ocn_empty, BfsBudget};
use crate::reductions::{gen_pspace_instance, gen_undecidability_instance, pspace_comments, undecidability_comments, TwoCounterMachine};

pub const EXIT_ERROR: i32 = 4;

/// Message for automata with zero tests passed to `check`.
pub const ZERO_TEST_MESSAGE: &str = "zero tests unsupported for separability (undecidable for one-counter automata)";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: impl Into<String>) -> Self {
        Outcome { code, stdout: stdout.into(), stderr: String::new() }
    }
    fn error(msg: impl std::fmt::Display) -> Self {
        Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ocnsep", version, about = "Regular separability of one-counter-net languages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether L(A) and L(B) are regular separable; prints verdict JSON.
    Check {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Print the n-approximation of a net.
    Approx {
        file: PathBuf,
        n: usize,
        /// Drop states that are not both reachable and co-reachable.
        #[arg(long)]
        prune: bool,
    },
    /// Decide emptiness of an NFA, net or one-counter automaton.
    Empty { file: PathBuf },
    /// Decide membership of a word (letters separated by spaces, or `eps`).
    Member {
        file: PathBuf,
        #[arg(num_args = 0.., allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// List the accepted words up to a length, in length-lexicographic order.
    Words {
        file: PathBuf,
        max_len: usize,
        /// Largest allowed `max_len`.
        #[arg(long, default_value_t = DEFAULT_WORD_CAP)]
        cap: usize,
    },
    /// Generate the net pair (B, B') from an acyclic one-counter automaton and a bound.
    GenHard {
        oca: PathBuf,
        b: u64,
        /// Write PREFIX.B.ocn and PREFIX.Bprime.ocn instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the automaton pair (A1, A2) from a two-counter machine and an input.
    GenUndec {
        machine: PathBuf,
        k: u64,
        /// Write PREFIX.A1.oca and PREFIX.A2.oca instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a verdict JSON file against the two input machines.
    Verify { verdict: PathBuf, a: PathBuf, b: PathBuf },
    /// Print a random net or one-counter automaton.
    Random {
        #[arg(long, default_value = "ocn")]
        kind: String,
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        max_delta: i64,
        #[arg(long, default_value_t = 2)]
        letters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args, Clone)]
pub struct CheckOpts {
    /// Largest modulus n tried for an approximation separator.
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    /// Linear path scheme budget: segment length, loop length, loop count.
    #[arg(long, value_parser = parse_lps_budget, default_value = "6,6,3")]
    pub lps_budget: LpsBudget,
    /// Parikh budget: host run length, pump length.
    #[arg(long, value_parser = parse_parikh_budget, default_value = "24,12")]
    pub parikh_budget: ParikhBudget,
    /// Breadth-first search budget: counter bound, expanded configurations.
    #[arg(long, value_parser = parse_bfs_budget, default_value = "64,100000")]
    pub bfs_budget: BfsBudget,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the verdict JSON to this file.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    /// Report the budgets tried on stderr.
    #[arg(short, long)]
    pub verbose: bool,
}

impl CheckOpts {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            n_max: self.n_max,
            lps: self.lps_budget,
            parikh: self.parikh_budget,
            bfs: self.bfs_budget,
            jobs: self.jobs,
            seed: self.seed,
            ..RunConfig::default()
        }
    }
}

fn numbers<const N: usize>(s: &str) -> Result<[u64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, found `{s}`"));
    }
    let mut out = [0u64; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("`{p}` is not a nonnegative integer"))?;
        if *o == 0 {
            return Err("budgets must be positive".into());
        }
    }
    Ok(out)
}

pub fn parse_lps_budget(s: &str) -> Result<LpsBudget, String> {
    let [a, b, c] = numbers::<3>(s)?;
    Ok(LpsBudget { max_seg_len: a as usize, max_loop_len: b as usize, max_loops: c as usize })
}

pub fn parse_parikh_budget(s: &str) -> Result<ParikhBudget, String> {
    let [a, b] = numbers::<2>(s)?;
    Ok(ParikhBudget { max_run_len: a as usize, max_pump_len: b as usize })
}

pub fn parse_bfs_budget(s: &str) -> Result<BfsBudget, String> {
    let [a, b] = numbers::<2>(s)?;
    Ok(BfsBudget { max_counter: a as i64, max_steps: b as usize })
}

fn load(path: &Path) -> Result<Machine, String> {
    let src = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_machine(&src).map_err(|e| format!("{}:{}:{}: {}", path.display(), e.line, e.col, e.msg))
}

/// Loads a machine usable by the decider: NFAs become nets with zero
/// deltas; automata with zero tests are refused.
pub fn load_net(path: &Path) -> Result<Ocn, String> {
    match load(path)? {
        Machine::Nfa(n) => Ok(Ocn::from_nfa(&n)),
        Machine::Ocn(o) => Ok(o),
        Machine::Oca(o) => o.into_ocn().ok_or_else(|| format!("{}: {ZERO_TEST_MESSAGE}", path.display())),
    }
}

pub fn cmd_check(a: &Path, b: &Path, opts: &CheckOpts) -> Outcome {
    let (na, nb) = match (load_net(a), load_net(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
    };
    let config = opts.config();
    let verdict = match check_separability(&na, &nb, &config) {
        Ok(v) => v,
        Err(e) => return Outcome::error(e),
    };
    let v = cross_product(&na.normalized(), &nb.normalized(), NAT_NAT).expect("alphabets already checked");
    let json = serde_json::to_string_pretty(&verdict.to_json(&na, &v, &config)).expect("serializable") + "\n";
    if let Some(path) = &opts.json_out {
        if let Err(e) = fs::write(path, &json) {
            return Outcome::error(format!("{}: {e}", path.display()));
        }
    }
    let mut out = Outcome::ok(verdict.exit_code(), json);
    if opts.verbose {
        if let Verdict::Unknown { budgets_tried, partial_findings } = &verdict {
            for line in budgets_tried.iter().chain(partial_findings) {
                out.stderr.push_str(line);
                out.stderr.push('\n');
            }
        }
    }
    out
}

pub fn cmd_approx(file: &Path, n: usize, prune: bool) -> Outcome {
    let net = match load_net(file) {
        Ok(o) => o.normalized(),
        Err(e) => return Outcome::error(e),
    };
    match build_approximation(&net, n) {
        Ok(a) => {
            let a = if prune { a.prune() } else { a };
            Outcome::ok(0, write_machine_with_comments(&Machine::Nfa(a), &[format!("{n}-approximation of {}", file.display())]))
        }
        Err(e) => Outcome::error(e),
    }
}

pub fn cmd_empty(file: &Path) -> Outcome {
    let empty = match load(file) {
        Ok(Machine::Nfa(n)) => ocn_empty(&Ocn::from_nfa(&n)),
        Ok(Machine::Ocn(o)) => ocn_empty(&o),
        Ok(Machine::Oca(o)) => oca_empty(&o),
        Err(e) => return Outcome::error(e),
    };
    Outcome::ok(0, if empty { "empty\n" } else { "nonempty\n" })
}

pub fn cmd_member(file: &Path, word: &str) -> Outcome {
    let m = match load(file) {
        Ok(m) => m,
        Err(e) => return Outcome::error(e),
    };
    match m.alphabet().parse_word(word) {
        Ok(w) => Outcome::ok(0, if m.accepts(&w) { "accepted\n" } else { "rejected\n" }),
        Err(e) => Outcome::error(e),
    }
}

pub fn cmd_words(file: &Path, max_len: usize, cap: usize) -> Outcome {
    let m = match load(file) {
        Ok(m) => m,
        Err(e) => return Outcome::error(e),
    };
    match enumerate_words_with_cap(&m, max_len, cap) {
        Ok(words) => {
            let mut out = String::new();
            for w in words {
                out.push_str(&m.alphabet().format_word(&w));
                out.push('\n');
            }
            Outcome::ok(0, out)
        }
        Err(e) => Outcome::error(e),
    }
}

fn emit_pair(out: Option<&Path>, files: [(&str, String); 2]) -> Outcome {
    match out {
        Some(prefix) => {
            let mut listing = String::new();
            for (suffix, text) in files {
                let path = PathBuf::from(format!("{}.{suffix}", prefix.display()));
                if let Err(e) = fs::write(&path, text) {
                    return Outcome::error(format!("{}: {e}", path.display()));
                }
                listing.push_str(&format!("{}\n", path.display()));
            }
            Outcome::ok(0, listing)
        }
        None => Outcome::ok(0, files.map(|(_, t)| t).join("\n")),
    }
}

pub fn cmd_gen_hard(oca: &Path, b: u64, out: Option<&Path>) -> Outcome {
    let a = match load(oca) {
        Ok(Machine::Oca(a)) => a,
        Ok(Machine::Ocn(o)) => o.into(),
        Ok(Machine::Nfa(n)) => Ocn::from_nfa(&n).into(),
        Err(e) => return Outcome::error(e),
    };
    match gen_pspace_instance(&a, b) {
        Ok((x, y)) => {
            let src = oca.display().to_string();
            emit_pair(
                out,
                [
                    ("B.ocn", write_machine_with_comments(&Machine::Ocn(x), &pspace_comments(&src, b, "B"))),
                    ("Bprime.ocn", write_machine_with_comments(&Machine::Ocn(y), &pspace_comments(&src, b, "B'"))),
                ],
            )
        }
        Err(e) => Outcome::error(e),
    }
}

pub fn cmd_gen_undec(machine: &Path, k: u64, out: Option<&Path>) -> Outcome {
    let src = match fs::read_to_string(machine) {
        Ok(s) => s,
        Err(e) => return Outcome::error(format!("{}: {e}", machine.display())),
    };
    let m = match TwoCounterMachine::parse(&src) {
        Ok(m) => m,
        Err(e) => return Outcome::error(format!("{}:{}:{}: {}", machine.display(), e.line, e.col, e.msg)),
    };
    let (a1, a2) = gen_undecidability_instance(&m, k);
    emit_pair(
        out,
        [
            ("A1.oca", write_machine_with_comments(&Machine::Oca(a1), &undecidability_comments(&m, k, 1))),
            ("A2.oca", write_machine_with_comments(&Machine::Oca(a2), &undecidability_comments(&m, k, 2))),
        ],
    )
}

pub fn cmd_verify(verdict: &Path, a: &Path, b: &Path) -> Outcome {
    let (na, nb) = match (load_net(a), load_net(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
    };
    let text = match fs::read_to_string(verdict) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{}: {e}", verdict.display())),
    };
    let json = match serde_json::from_str(&text) {
        Ok(j) => j,
        Err(e) => return Outcome::error(format!("{}: {e}", verdict.display())),
    };
    match Verdict::from_json(&json, &na, &nb) {
        Ok(v) if verify_verdict(&v, &na, &nb) => Outcome::ok(0, format!("valid {}\n", v.kind())),
        Ok(v) => Outcome::ok(1, format!("invalid {}\n", v.kind())),
        Err(e) => Outcome::error(format!("{}: {e}", verdict.display())),
    }
}

pub fn cmd_random(kind: &str, states: usize, max_delta: i64, letters: usize, seed: u64) -> Outcome {
    use crate::random::{random_oca, random_ocn, rng, NetShape};
    let shape = NetShape { max_states: states, max_delta, letters, ..NetShape::default() };
    let mut r = rng(seed);
    let m = match kind {
        "ocn" => Machine::Ocn(random_ocn(&mut r, shape)),
        "oca" => Machine::Oca(random_oca(&mut r, shape)),
        other => return Outcome::error(format!("unknown kind `{other}` (expected `ocn` or `oca`)")),
    };
    Outcome::ok(0, write_machine_with_comments(&m, &[format!("random {kind}, seed {seed}")]))
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { a, b, opts } => cmd_check(a, b, opts),
        Command::Approx { file, n, prune } => cmd_approx(file, *n, *prune),
        Command::Empty { file } => cmd_empty(file),
        Command::Member { file, word } => cmd_member(file, &word.join(" ")),
        Command::Words { file, max_len, cap } => cmd_words(file, *max_len, *cap),
        Command::GenHard { oca, b, out } => cmd_gen_hard(oca, *b, out.as_deref()),
        Command::GenUndec { machine, k, out } => cmd_gen_undec(machine, *k, out.as_deref()),
        Command::Verify { verdict, a, b } => cmd_verify(verdict, a, b),
        Command::Random { kind, states, max_delta, letters, seed } => cmd_random(kind, *states, *max_delta, *letters, *seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_flags() {
        assert_eq!(parse_lps_budget("6,6,3").unwrap(), LpsBudget::default());
        assert_eq!(parse_parikh_budget("24, 12").unwrap(), ParikhBudget::default());
        assert_eq!(parse_bfs_budget("64,100000").unwrap(), BfsBudget::default());
        assert!(parse_lps_budget("6,6").is_err());
        assert!(parse_parikh_budget("0,3").is_err());
        assert!(parse_bfs_budget("x,3").is_err());
    }

    #[test]
    fn defaults_match_library() {
        let cli = Cli::parse_from(["ocnsep", "check", "a", "b"]);
        let Command::Check { opts, .. } = cli.command else { panic!() };
        assert_eq!(opts.config(), RunConfig::default());
    }

    #[test]
    fn missing_file_is_an_error() {
        let out = cmd_empty(Path::new("/nonexistent/machine.ocn"));
        assert_eq!(out.code, EXIT_ERROR);
        assert!(out.stderr.starts_with("error:"));
    }
}

//! The separability decision procedure and certificate checking.
//!
//! [`check_separability`] runs three phases on normalized nets `A`, `B`:
//!
//! 0. a bounded search for a common word on `A ⊗ B`;
//! 1. for growing `n`, an exact emptiness test of `L(A_n) ∩ L(B)`; an empty
//!    intersection makes `A_n` a separator;
//! 2. an under-approximation of the set `R` of triples `(m, m', x)` from
//!    prefix, middle and suffix runs of `A ⊗ B`, searched for a linear
//!    component that contains `n`-witnesses for every `n`.
//!
//! Phases 1 and 2 alternate: each round probes a block of moduli and then
//! retries phase 2 with larger budgets. A verdict other than
//! [`Verdict::Unknown`] is always correct; [`verify_verdict`] re-checks it
//! without using the search code.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde_json::{json, Value};
use thiserror::Error;

use crate::approx::build_approximation;
use crate::automata::text::{parse_machine, write_machine};
use crate::automata::{
    cross_product, enumerate_words_with_cap, product_ocn_nfa, reverse_vass2, AutomataError, Config2, Language, Machine, Nfa,
    Ocn, StateId, Vass2, Word, INT_NAT, NAT_NAT,
};
use crate::lps::{pref_suff_sets, LpsBudget};
use crate::parikh::{mid_set, ParikhBudget};
use crate::reach1::{bfs_reach, ocn_empty, BfsBudget, BfsOutcome};
use crate::semilinear::{linear_witness_check, solve_nonneg, DioRow, DioSystem, LinearSet, Relation, SemilinearSet, SolverBudget};

/// Number of moduli probed per round.
pub const N_BLOCK: usize = 8;

#[derive(Debug, Error)]
pub enum DeciderError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Budgets and limits of a run. Everything except `jobs` is echoed into the
/// verdict JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub n_max: usize,
    pub lps: LpsBudget,
    pub parikh: ParikhBudget,
    pub bfs: BfsBudget,
    pub solver: SolverBudget,
    #[serde(skip)]
    pub jobs: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: 64,
            lps: LpsBudget::default(),
            parikh: ParikhBudget::default(),
            bfs: BfsBudget::default(),
            solver: SolverBudget::default(),
            jobs: 1,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), DeciderError> {
        let bad = |what: &str| Err(DeciderError::InvalidConfig(format!("{what} must be positive")));
        if self.n_max == 0 {
            return bad("n_max");
        }
        if self.lps.max_seg_len == 0 || self.lps.max_loop_len == 0 || self.lps.max_loops == 0 {
            return bad("every LPS budget");
        }
        if self.parikh.max_run_len == 0 || self.parikh.max_pump_len == 0 {
            return bad("every Parikh budget");
        }
        if self.bfs.max_counter <= 0 || self.bfs.max_steps == 0 {
            return bad("every BFS budget");
        }
        if self.solver.max_magnitude <= 0 || self.solver.max_candidates == 0 {
            return bad("every solver budget");
        }
        if self.jobs == 0 {
            return bad("jobs");
        }
        Ok(())
    }

    /// Phase-2 budgets, smallest first, ending with the configured ones.
    pub fn ladder(&self) -> Vec<(LpsBudget, ParikhBudget)> {
        let l = self.lps;
        let p = self.parikh;
        let mut out: Vec<(LpsBudget, ParikhBudget)> = Vec::new();
        for (s, lp, k, r, pp) in [(2, 2, 1, 8, 4), (4, 4, 2, 16, 8)] {
            let step = (
                LpsBudget { max_seg_len: l.max_seg_len.min(s), max_loop_len: l.max_loop_len.min(lp), max_loops: l.max_loops.min(k) },
                ParikhBudget { max_run_len: p.max_run_len.min(r), max_pump_len: p.max_pump_len.min(pp) },
            );
            if out.last() != Some(&step) {
                out.push(step);
            }
        }
        if out.last() != Some(&(l, p)) {
            out.push((l, p));
        }
        out
    }
}

/// One piece of the set `R`, with the sets it was glued from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPiece {
    /// The pair state `(q, p)` where the middle part starts.
    pub from: StateId,
    /// The pair state `(q', p')` where the middle part ends.
    pub to: StateId,
    pub pref: LinearSet,
    pub mid: LinearSet,
    pub suff: LinearSet,
    /// Gluing equations over the period multiplicities of `pref`, `mid`
    /// and `suff`, in that order.
    pub system: DioSystem,
    /// Tuples `(m, l, m'', l', m')`.
    pub extended: LinearSet,
    /// Triples `(m, m', m'' - m')`.
    pub component: LinearSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Separable { n: usize, separator: Nfa },
    NotSeparable(Box<RPiece>),
    NotDisjoint { witness: Word },
    Unknown { budgets_tried: Vec<String>, partial_findings: Vec<String> },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Separable { .. } => "separable",
            Verdict::NotSeparable(_) => "not_separable",
            Verdict::NotDisjoint { .. } => "not_disjoint",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Separable { .. } => 0,
            Verdict::NotSeparable(_) => 1,
            Verdict::NotDisjoint { .. } => 2,
            Verdict::Unknown { .. } => 3,
        }
    }

    /// The verdict as JSON. `v` must be `cross_product(a, b, _)` of the
    /// normalized inputs, for state names.
    pub fn to_json(&self, a: &Ocn, v: &Vass2, config: &RunConfig) -> Value {
        let mut out = json!({
            "verdict": self.kind(),
            "n": Value::Null,
            "separator": Value::Null,
            "witness": Value::Null,
            "budgets": serde_json::to_value(config).expect("plain data"),
        });
        match self {
            Verdict::Separable { n, separator } => {
                out["n"] = json!(n);
                out["separator"] = json!({ "text": write_machine(&Machine::Nfa(separator.clone())) });
            }
            Verdict::NotSeparable(p) => {
                out["witness"] = json!({
                    "from": v.states()[p.from],
                    "to": v.states()[p.to],
                    "component": p.component,
                    "extended": p.extended,
                    "pref": p.pref,
                    "mid": p.mid,
                    "suff": p.suff,
                    "system": p.system,
                });
            }
            Verdict::NotDisjoint { witness } => {
                out["witness"] = json!({ "word": a.alphabet().format_word(witness) });
            }
            Verdict::Unknown { budgets_tried, partial_findings } => {
                out["budgets_tried"] = json!(budgets_tried);
                out["partial_findings"] = json!(partial_findings);
            }
        }
        out
    }

    /// Reads a verdict written by [`Verdict::to_json`] for the same inputs.
    pub fn from_json(j: &Value, a: &Ocn, b: &Ocn) -> Result<Verdict, String> {
        let a = a.normalized();
        let b = b.normalized();
        let field = |k: &str| j.get(k).ok_or_else(|| format!("missing field `{k}`"));
        let kind = field("verdict")?.as_str().ok_or("`verdict` is not a string")?;
        match kind {
            "separable" => {
                let n = field("n")?.as_u64().ok_or("`n` is not a number")? as usize;
                let text = field("separator")?.get("text").and_then(Value::as_str).ok_or("missing separator text")?;
                match parse_machine(text).map_err(|e| e.to_string())? {
                    Machine::Nfa(separator) => Ok(Verdict::Separable { n, separator }),
                    m => Err(format!("separator is a {}, not an NFA", m.kind())),
                }
            }
            "not_separable" => {
                let w = field("witness")?;
                let v = cross_product(&a, &b, NAT_NAT).map_err(|e| e.to_string())?;
                let state = |k: &str| -> Result<StateId, String> {
                    let name = w.get(k).and_then(Value::as_str).ok_or(format!("missing `{k}`"))?;
                    v.state_id(name).ok_or(format!("unknown pair state `{name}`"))
                };
                let set = |k: &str| -> Result<LinearSet, String> {
                    serde_json::from_value(w.get(k).cloned().ok_or(format!("missing `{k}`"))?).map_err(|e| e.to_string())
                };
                let system = serde_json::from_value(w.get("system").cloned().ok_or("missing `system`")?).map_err(|e| e.to_string())?;
                Ok(Verdict::NotSeparable(Box::new(RPiece {
                    from: state("from")?,
                    to: state("to")?,
                    pref: set("pref")?,
                    mid: set("mid")?,
                    suff: set("suff")?,
                    system,
                    extended: set("extended")?,
                    component: set("component")?,
                })))
            }
            "not_disjoint" => {
                let word = field("witness")?.get("word").and_then(Value::as_str).ok_or("missing word")?;
                Ok(Verdict::NotDisjoint { witness: a.alphabet().parse_word(word).map_err(|e| e.to_string())? })
            }
            "unknown" => {
                let strings = |k: &str| -> Vec<String> {
                    j.get(k).and_then(Value::as_array).map_or(Vec::new(), |xs| xs.iter().filter_map(|x| x.as_str().map(String::from)).collect())
                };
                Ok(Verdict::Unknown { budgets_tried: strings("budgets_tried"), partial_findings: strings("partial_findings") })
            }
            other => Err(format!("unknown verdict `{other}`")),
        }
    }
}

/// Runs `f` on every item with at most `jobs` threads; results keep the
/// input order.
fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Whether `L(A_n) ∩ L(B) = ∅`. Both nets must be normalized.
pub fn approximation_separates(a: &Ocn, b: &Ocn, n: usize) -> Result<bool, DeciderError> {
    let an = build_approximation(a, n).map_err(|e| DeciderError::InvalidConfig(e.to_string()))?.prune();
    Ok(ocn_empty(&product_ocn_nfa(b, &an)?))
}

fn word_of(v: &Vass2, path: &[usize]) -> Word {
    path.iter().filter_map(|&t| v.transitions()[t].label.letter()).collect()
}

/// Decides regular separability of `L(a)` and `L(b)` within the budgets of
/// `config`.
pub fn check_separability(a: &Ocn, b: &Ocn, config: &RunConfig) -> Result<Verdict, DeciderError> {
    config.validate()?;
    a.alphabet().check_same(b.alphabet())?;
    let a = a.normalized();
    let b = b.normalized();
    let v = cross_product(&a, &b, NAT_NAT)?;
    let (init, fin) = (v.initial().expect("set by cross_product"), v.final_config().expect("set by cross_product"));

    if let BfsOutcome::Reached(path) = bfs_reach(&v, init, fin, config.bfs) {
        return Ok(Verdict::NotDisjoint { witness: word_of(&v, &path) });
    }

    let ladder = config.ladder();
    let mut budgets_tried = Vec::new();
    let mut findings = Vec::new();
    let mut next_n = 1;
    let mut level = 0;
    while next_n <= config.n_max || level < ladder.len() {
        if next_n <= config.n_max {
            let block: Vec<usize> = (next_n..=(next_n + N_BLOCK - 1).min(config.n_max)).collect();
            let results = par_map(&block, config.jobs, |&n| approximation_separates(&a, &b, n));
            for (&n, r) in block.iter().zip(results) {
                if r? {
                    let separator = build_approximation(&a, n).expect("validated above");
                    return Ok(Verdict::Separable { n, separator });
                }
            }
            budgets_tried.push(format!("n={}..{}", block[0], block[block.len() - 1]));
            next_n += block.len();
        }
        if level < ladder.len() {
            let (lps, parikh) = ladder[level];
            budgets_tried.push(format!(
                "lps=({},{},{}) parikh=({},{})",
                lps.max_seg_len, lps.max_loop_len, lps.max_loops, parikh.max_run_len, parikh.max_pump_len
            ));
            let pieces = r_pieces(&v, lps, parikh, &config.solver, config.jobs, true, &mut findings);
            if let Some(p) = pieces.into_iter().find(|p| linear_witness_check(&p.component).unwrap_or(false)) {
                return Ok(Verdict::NotSeparable(Box::new(p)));
            }
            level += 1;
        }
    }
    if findings.is_empty() {
        findings.push(format!("L(A_n) meets L(B) for every n <= {}", config.n_max));
    }
    Ok(Verdict::Unknown { budgets_tried, partial_findings: findings })
}

/// Components of a linear set whose first coordinate can grow.
fn growing(s: Option<&SemilinearSet>) -> Vec<LinearSet> {
    s.map_or(Vec::new(), |s| s.components().iter().filter(|c| c.periods().iter().any(|p| p[0] > 0)).cloned().collect())
}

/// Glues one prefix, middle and suffix component.
///
/// The unknowns are the period multiplicities `u`, `v`, `w` of the three
/// sets; the equations identify the prefix's `(m, l)` with the middle's
/// start and the middle's `l'` with the suffix's `l'`. There is one piece
/// per minimal solution.
pub fn glue(
    from: StateId,
    to: StateId,
    pref: &LinearSet,
    mid: &LinearSet,
    suff: &LinearSet,
    solver: &SolverBudget,
) -> Result<Vec<RPiece>, crate::semilinear::SemilinearError> {
    let (pp, mp, sp) = (pref.periods(), mid.periods(), suff.periods());
    let (nu, nv, nw) = (pp.len(), mp.len(), sp.len());
    let nvars = nu + nv + nw;
    let row = |fp: &dyn Fn(&[i64]) -> i64, fm: &dyn Fn(&[i64]) -> i64, fs: &dyn Fn(&[i64]) -> i64, rhs: i64| {
        let mut coeffs = Vec::with_capacity(nvars);
        coeffs.extend(pp.iter().map(|p| fp(p)));
        coeffs.extend(mp.iter().map(|p| fm(p)));
        coeffs.extend(sp.iter().map(|p| fs(p)));
        DioRow { coeffs, rel: Relation::Eq, rhs }
    };
    let rows = vec![
        row(&|p| p[0], &|p| -p[0], &|_| 0, mid.base()[0] - pref.base()[0]),
        row(&|p| p[1], &|p| -p[1], &|_| 0, mid.base()[1] - pref.base()[1]),
        row(&|_| 0, &|p| p[3], &|p| -p[1], suff.base()[1] - mid.base()[3]),
    ];
    let system = DioSystem::new(nvars, rows.clone())?;
    let mut live = Vec::new();
    for r in rows {
        if r.coeffs.iter().all(|&c| c == 0) {
            if r.rhs != 0 {
                return Ok(Vec::new());
            }
        } else {
            live.push(r);
        }
    }
    let sols = if live.is_empty() {
        let unit = (0..nvars).map(|i| (0..nvars).map(|j| i64::from(i == j)).collect()).collect();
        crate::semilinear::Solutions { bases: vec![vec![0; nvars]], periods: unit }
    } else {
        solve_nonneg(&DioSystem::new(nvars, live)?, solver)?
    };
    // x ↦ (m, l, m'', l', m')
    let ext = |x: &[i64], with_base: bool| -> Vec<i64> {
        let dot = |ps: &[Vec<i64>], xs: &[i64], k: usize| ps.iter().zip(xs).map(|(p, c)| p[k] * c).sum::<i64>();
        let (u, rest) = x.split_at(nu);
        let (v, w) = rest.split_at(nv);
        let base = |b: i64| if with_base { b } else { 0 };
        vec![
            base(pref.base()[0]) + dot(pp, u, 0),
            base(pref.base()[1]) + dot(pp, u, 1),
            base(mid.base()[2]) + dot(mp, v, 2),
            base(mid.base()[3]) + dot(mp, v, 3),
            base(suff.base()[0]) + dot(sp, w, 0),
        ]
    };
    let periods: Vec<Vec<i64>> = sols.periods.iter().map(|p| ext(p, false)).collect();
    let mut out = Vec::new();
    for b in &sols.bases {
        let extended = LinearSet::new(ext(b, true), periods.clone())?;
        out.push(RPiece {
            from,
            to,
            pref: pref.clone(),
            mid: mid.clone(),
            suff: suff.clone(),
            system: system.clone(),
            component: project(&extended)?,
            extended,
        });
    }
    Ok(out)
}

/// `(m, l, m'', l', m') ↦ (m, m', m'' - m')`.
pub fn project(extended: &LinearSet) -> Result<LinearSet, crate::semilinear::SemilinearError> {
    let f = |x: &[i64]| vec![x[0], x[4], x[2] - x[4]];
    LinearSet::new(f(extended.base()), extended.periods().iter().map(|p| f(p)).collect())
}

/// Pieces of `R` for `v` (mask ignored). With `stop_at_witness`, stops at
/// the first quadruple that yields a piece passing the witness check.
/// Budget overruns are recorded in `findings` and the affected part is
/// skipped.
pub fn r_pieces(
    v: &Vass2,
    lps: LpsBudget,
    parikh: ParikhBudget,
    solver: &SolverBudget,
    jobs: usize,
    stop_at_witness: bool,
    findings: &mut Vec<String>,
) -> Vec<RPiece> {
    let v = v.with_mask(NAT_NAT);
    let all: Vec<StateId> = (0..v.num_states()).collect();
    let pref = match pref_suff_sets(&v, &all, lps, solver) {
        Ok(p) => p,
        Err(e) => {
            findings.push(format!("PREF: {e}"));
            return Vec::new();
        }
    };
    let suff = match pref_suff_sets(&reverse_vass2(&v), &all, lps, solver) {
        Ok(s) => s,
        Err(e) => {
            findings.push(format!("SUFF: {e}"));
            return Vec::new();
        }
    };
    let pref_g: BTreeMap<StateId, Vec<LinearSet>> = all.iter().map(|&s| (s, growing(pref.get(&s)))).collect();
    let suff_g: BTreeMap<StateId, Vec<LinearSet>> = all.iter().map(|&s| (s, growing(suff.get(&s)))).collect();
    let quads: Vec<(StateId, StateId)> = all
        .iter()
        .filter(|s| !pref_g[s].is_empty())
        .flat_map(|&s| all.iter().filter(|t| !suff_g[t].is_empty()).map(move |&t| (s, t)))
        .collect();
    let work = |&(s, t): &(StateId, StateId)| -> (Vec<RPiece>, Vec<String>) {
        let mut notes = Vec::new();
        let mid = match mid_set(&v, s, t, parikh) {
            Ok(m) => m,
            Err(e) => {
                notes.push(format!("MID {} -> {}: {e}", v.states()[s], v.states()[t]));
                return (Vec::new(), notes);
            }
        };
        let mut pieces = Vec::new();
        for p in &pref_g[&s] {
            for m in mid.components() {
                for q in &suff_g[&t] {
                    match glue(s, t, p, m, q, solver) {
                        Ok(ps) => {
                            let hit = ps.iter().any(|p| linear_witness_check(&p.component).unwrap_or(false));
                            pieces.extend(ps);
                            if hit && stop_at_witness {
                                return (pieces, notes);
                            }
                        }
                        Err(e) => notes.push(format!("gluing at {} -> {}: {e}", v.states()[s], v.states()[t])),
                    }
                }
            }
        }
        (pieces, notes)
    };
    let mut out = Vec::new();
    let chunk = jobs.max(1);
    for batch in quads.chunks(chunk) {
        let mut hit = false;
        for (pieces, notes) in par_map(batch, jobs, work) {
            findings.extend(notes);
            if stop_at_witness && hit {
                continue;
            }
            hit = pieces.iter().any(|p| linear_witness_check(&p.component).unwrap_or(false));
            out.extend(pieces);
        }
        if stop_at_witness && hit {
            break;
        }
    }
    out
}

/// Under-approximation of `R ⊆ ℕ² × ℤ` over all quadruples.
pub fn build_r(v: &Vass2, lps: LpsBudget, parikh: ParikhBudget, solver: &SolverBudget) -> (SemilinearSet, Vec<String>) {
    let mut findings = Vec::new();
    let mut s = SemilinearSet::empty(3);
    for p in r_pieces(v, lps, parikh, solver, 1, false, &mut findings) {
        s.push(p.component).expect("dimension 3");
    }
    (s, findings)
}

/// Runs witnessing `n`-reachability: a prefix run in `V[ℕ, ℕ]` from the
/// initial configuration to `(from, (m, l))`, a middle run in `V[ℤ, ℕ]` to
/// `(to, (m'', l'))`, and a suffix run in `V[ℕ, ℕ]` from `(to, (m', l'))`
/// to the final configuration, with `m, m' ≥ n` and `m'' ≡ m' (mod n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NReachWitness {
    pub n: u64,
    pub from: StateId,
    pub to: StateId,
    pub m: i64,
    pub l: i64,
    pub m_mid: i64,
    pub l_mid: i64,
    pub m_suff: i64,
    pub prefix: Vec<usize>,
    pub middle: Vec<usize>,
    pub suffix: Vec<usize>,
}

impl NReachWitness {
    /// Replays the three runs in `v` under their masks.
    pub fn check(&self, v: &Vass2) -> bool {
        let n = self.n as i64;
        let (Some(init), Some(fin)) = (v.initial(), v.final_config()) else { return false };
        let nat = v.with_mask(NAT_NAT);
        let int = v.with_mask(INT_NAT);
        n > 0
            && self.m >= n
            && self.m_suff >= n
            && (self.m_mid - self.m_suff).rem_euclid(n) == 0
            && nat.replay(init, &self.prefix) == Some((self.from, [self.m, self.l]))
            && int.replay((self.from, [self.m, self.l]), &self.middle) == Some((self.to, [self.m_mid, self.l_mid]))
            && nat.replay((self.to, [self.m_suff, self.l_mid]), &self.suffix) == Some(fin)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NReachOutcome {
    Witness(Box<NReachWitness>),
    NotFoundWithinBudget,
}

/// Searches `n`-reachability witnesses by breadth-first search: backwards
/// from the final configuration for suffix starts, then forwards through
/// the prefix phase and the middle phase, where the first coordinate is only
/// tracked modulo `n`. Counters are bounded by `budget.max_counter` and each
/// search expands at most `budget.max_steps` nodes.
pub fn direct_n_reachability(v: &Vass2, n: u64, budget: BfsBudget) -> NReachOutcome {
    let (Some(init), Some(fin)) = (v.initial(), v.final_config()) else { return NReachOutcome::NotFoundWithinBudget };
    if n == 0 {
        return NReachOutcome::NotFoundWithinBudget;
    }
    let ni = n as i64;
    let nat = v.with_mask(NAT_NAT);
    let rev = reverse_vass2(&nat);
    let ok = |c: &[i64; 2]| c.iter().all(|&x| (0..=budget.max_counter).contains(&x));

    // suffix starts (to, m', l') with m' >= n, indexed by (to, m' mod n, l')
    let mut back: HashMap<Config2, (Config2, usize)> = HashMap::from([(fin, (fin, usize::MAX))]);
    let mut queue = VecDeque::from([fin]);
    let mut starts: HashMap<(StateId, i64, i64), Config2> = HashMap::new();
    let mut steps = 0;
    while let Some(c) = queue.pop_front() {
        if c.1[0] >= ni {
            starts.entry((c.0, c.1[0].rem_euclid(ni), c.1[1])).or_insert(c);
        }
        steps += 1;
        if steps > budget.max_steps {
            break;
        }
        for (t, tr) in rev.transitions().iter().enumerate() {
            if tr.from != c.0 {
                continue;
            }
            if let Some(d) = rev.fire(c, t).filter(|d| ok(&d.1)) {
                back.entry(d).or_insert_with(|| {
                    queue.push_back(d);
                    (c, t)
                });
            }
        }
    }
    if starts.is_empty() {
        return NReachOutcome::NotFoundWithinBudget;
    }

    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Node {
        Pre(Config2),
        Mid(StateId, i64, i64),
    }
    const SWITCH: usize = usize::MAX;
    let mut parent: HashMap<Node, (Node, usize)> = HashMap::from([(Node::Pre(init), (Node::Pre(init), SWITCH))]);
    let mut queue = VecDeque::from([Node::Pre(init)]);
    let mut steps = 0;
    let mut goal = None;
    while let Some(node) = queue.pop_front() {
        if let Node::Mid(s, r, l) = node {
            if let Some(&c) = starts.get(&(s, r, l)) {
                goal = Some((node, c));
                break;
            }
        }
        steps += 1;
        if steps > budget.max_steps {
            break;
        }
        let mut next: Vec<(Node, usize)> = Vec::new();
        match node {
            Node::Pre(c) => {
                if c.1[0] >= ni {
                    next.push((Node::Mid(c.0, c.1[0].rem_euclid(ni), c.1[1]), SWITCH));
                }
                for t in 0..nat.transitions().len() {
                    if let Some(d) = nat.fire(c, t).filter(|d| ok(&d.1)) {
                        next.push((Node::Pre(d), t));
                    }
                }
            }
            Node::Mid(s, r, l) => {
                for (t, tr) in v.transitions().iter().enumerate() {
                    let l2 = l + tr.delta[1];
                    if tr.from == s && (0..=budget.max_counter).contains(&l2) {
                        next.push((Node::Mid(tr.to, (r + tr.delta[0]).rem_euclid(ni), l2), t));
                    }
                }
            }
        }
        for (d, t) in next {
            parent.entry(d).or_insert_with(|| {
                queue.push_back(d);
                (node, t)
            });
        }
    }
    let Some((end, suffix_start)) = goal else { return NReachOutcome::NotFoundWithinBudget };

    let mut middle = Vec::new();
    let mut prefix = Vec::new();
    let mut cur = end;
    let mut switch_at = None;
    while cur != Node::Pre(init) {
        let (prev, t) = parent[&cur];
        match (cur, t) {
            (Node::Mid(..), SWITCH) => switch_at = Some(prev),
            (Node::Mid(..), t) => middle.push(t),
            (Node::Pre(_), t) => prefix.push(t),
        }
        cur = prev;
    }
    prefix.reverse();
    middle.reverse();
    let Some(Node::Pre((from, [m, l]))) = switch_at else { unreachable!("middle nodes descend from a switch") };
    let int = v.with_mask(INT_NAT);
    let (to, [m_mid, l_mid]) = int.replay((from, [m, l]), &middle).expect("middle phase respects the mask");

    // suffix: reverse path from fin to suffix_start, mapped back to v's indices
    let mut suffix = Vec::new();
    let mut c = suffix_start;
    while c != fin {
        let (prev, t) = back[&c];
        let rt = &rev.transitions()[t];
        let orig = v
            .transitions()
            .iter()
            .position(|o| o.from == rt.to && o.to == rt.from && o.delta == [-rt.delta[0], -rt.delta[1]] && o.label == rt.label)
            .expect("reverse transitions come from v");
        suffix.push(orig);
        c = prev;
    }
    NReachOutcome::Witness(Box::new(NReachWitness {
        n,
        from,
        to,
        m,
        l,
        m_mid,
        l_mid,
        m_suff: suffix_start.1[0],
        prefix,
        middle,
        suffix,
    }))
}

/// Maximum word length used when re-checking `L(A) ⊆ L(separator)`.
pub const VERIFY_WORD_LEN: usize = 10;

/// Re-checks a verdict for `(a, b)` without the search code. `Unknown`
/// carries no certificate and never verifies.
pub fn verify_verdict(verdict: &Verdict, a: &Ocn, b: &Ocn) -> bool {
    if a.alphabet().check_same(b.alphabet()).is_err() {
        return false;
    }
    let a = a.normalized();
    let b = b.normalized();
    match verdict {
        Verdict::Separable { n, separator } => {
            let Ok(expected) = build_approximation(&a, *n) else { return false };
            if &expected != separator {
                return false;
            }
            let Ok(product) = product_ocn_nfa(&b, separator) else { return false };
            if !ocn_empty(&product) {
                return false;
            }
            match enumerate_words_with_cap(&a, VERIFY_WORD_LEN, VERIFY_WORD_LEN) {
                Ok(words) => words.iter().all(|w| separator.accepts(w)),
                Err(_) => false,
            }
        }
        Verdict::NotSeparable(p) => {
            let Ok(v) = cross_product(&a, &b, NAT_NAT) else { return false };
            if p.from >= v.num_states() || p.to >= v.num_states() || p.extended.dim() != 5 {
                return false;
            }
            if !linear_witness_check(&p.component).unwrap_or(false) || project(&p.extended).ok().as_ref() != Some(&p.component) {
                return false;
            }
            sample_multiplicities(p.extended.periods().len(), 5)
                .iter()
                .all(|mult| replay_member(&v, p.from, p.to, &p.extended.at(mult)))
        }
        Verdict::NotDisjoint { witness } => a.accepts(witness) && b.accepts(witness),
        Verdict::Unknown { .. } => false,
    }
}

/// Up to `count` small multiplicity vectors: zero, then unit vectors, then
/// all ones.
fn sample_multiplicities(k: usize, count: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0; k]];
    for i in 0..k {
        let mut e = vec![0; k];
        e[i] = 1;
        out.push(e);
    }
    out.push(vec![1; k]);
    out.dedup();
    out.truncate(count);
    out
}

/// Whether `(m, l, m'', l', m')` is realized by prefix, middle and suffix
/// runs, found by bounded search.
pub fn replay_member(v: &Vass2, from: StateId, to: StateId, x: &[i64]) -> bool {
    let (Some(init), Some(fin)) = (v.initial(), v.final_config()) else { return false };
    let budget = BfsBudget { max_counter: 64.max(x.iter().map(|c| c.abs()).max().unwrap_or(0) * 2), max_steps: 400_000 };
    let nat = v.with_mask(NAT_NAT);
    let int = v.with_mask(INT_NAT);
    let (m, l, m2, l2, m1) = (x[0], x[1], x[2], x[3], x[4]);
    bfs_reach(&nat, init, (from, [m, l]), budget).path().is_some()
        && bfs_reach(&int, (from, [m, l]), (to, [m2, l2]), budget).path().is_some()
        && bfs_reach(&nat, (to, [m1, l2]), fin, budget).path().is_some()
}

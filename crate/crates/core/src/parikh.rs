//! The middle relation `MID` of a cross-product, via Parikh images of a
//! five-letter one-counter net.
//!
//! For pair states `s = (q, p)` and `s' = (q', p')` of `V = A ⊗ B`, the net
//! `C` reads `a0^m b0^l` (the counter becomes `l`), then simulates
//! `V[ℤ, ℕ]` from `s` to `s'`: `A`'s coordinate is written as letters `a+`
//! and `a-`, `B`'s coordinate is the counter of `C`. Finally it reads `bf`
//! while draining the counter. The image of `Parikh(L(C))` under
//! `(a0, b0, a+, a-, bf) ↦ (a0, b0, a0 + a+ - a-, bf)` is exactly `MID`.
//!
//! The reading of `a0`/`b0` and of `bf` happens on self-loops at `s` and
//! `s'`. Words that interleave them with the simulation have the same Parikh
//! vectors as words that do not (moving increments earlier and decrements
//! later never disables a net run), so the image is unchanged.
//!
//! [`parikh_semilinear`] enumerates accepting runs of bounded length and, for
//! each, the pumps found inside it; every member of the returned set is the
//! Parikh vector of an accepted word.

use std::collections::{BTreeMap, HashSet, VecDeque};

use thiserror::Error;

use crate::automata::{Alphabet, Label, Letter, Ocn, OcnTransition, StateId, Vass2};
use crate::semilinear::{affine_image, LinearSet, SemilinearError, SemilinearSet, SolverBudget};

/// Letters of `C`, in Parikh-vector order.
pub const MID_LETTERS: [&str; 5] = ["a0", "b0", "a+", "a-", "bf"];

/// Cap on the number of host runs enumerated by [`parikh_semilinear`].
pub const MAX_HOSTS: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParikhError {
    #[error("state {0} is not a state of the VASS")]
    StatesNotInV(StateId),
    #[error("Parikh enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
}

/// The net `C` for one pair of states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidOcn {
    ocn: Ocn,
    entry: StateId,
    exit: StateId,
    letters: [Letter; 5],
    sim_states: usize,
}

impl MidOcn {
    pub fn ocn(&self) -> &Ocn {
        &self.ocn
    }
    pub fn entry(&self) -> StateId {
        self.entry
    }
    pub fn exit(&self) -> StateId {
        self.exit
    }
    /// Ids of `a0, b0, a+, a-, bf`.
    pub fn letters(&self) -> [Letter; 5] {
        self.letters
    }
    /// States `0..sim_states` are the states of `V`; the rest are gadget states.
    pub fn sim_states(&self) -> usize {
        self.sim_states
    }

    /// Parikh vector `(a0, b0, a+, a-, bf)` of a word.
    pub fn parikh(&self, w: &[Letter]) -> [i64; 5] {
        let mut v = [0i64; 5];
        for l in w {
            if let Some(i) = self.letters.iter().position(|x| x == l) {
                v[i] += 1;
            }
        }
        v
    }
}

/// Builds `C` for entry state `from` and exit state `to` of `v`.
///
/// Each transition with delta `(z1, z2)` becomes a chain of letters through
/// fresh states: `|z1|` letters `a+` (or `a-`), the first `|z2|` of which
/// also move the counter by `sign(z2)`. When `|z2| > |z1|`, every extra
/// counter step is a pair `a+` (moving the counter) then `a-`, so `a+ - a-`
/// is still `z1`. A `(0, 0)` transition becomes `a+` then `a-`; `(0, 0)`
/// self-loops are dropped as they do not change anything.
pub fn build_mid_ocn(v: &Vass2, from: StateId, to: StateId) -> Result<MidOcn, ParikhError> {
    let n = v.num_states();
    for s in [from, to] {
        if s >= n {
            return Err(ParikhError::StatesNotInV(s));
        }
    }
    let alphabet = Alphabet::new(MID_LETTERS).expect("valid letters");
    let l = |s: &str| alphabet.letter(s).expect("known letter");
    let [a0, b0, ap, am, bf] = MID_LETTERS.map(l);
    let mut states: Vec<String> = v.states().to_vec();
    let mut ts = vec![
        OcnTransition { from, label: Label::Sym(a0), to: from, delta: 0 },
        OcnTransition { from, label: Label::Sym(b0), to: from, delta: 1 },
        OcnTransition { from: to, label: Label::Sym(bf), to, delta: -1 },
    ];
    for (i, t) in v.transitions().iter().enumerate() {
        let [z1, z2] = t.delta;
        if z1 == 0 && z2 == 0 && t.from == t.to {
            continue;
        }
        let mut steps: Vec<(Letter, i64)> = Vec::new();
        if z1 == 0 && z2 == 0 {
            steps.push((ap, 0));
            steps.push((am, 0));
        } else {
            let n1 = z1.unsigned_abs();
            let n2 = z2.unsigned_abs();
            let letter = if z1 >= 0 { ap } else { am };
            for j in 0..n1 {
                steps.push((letter, if j < n2 { z2.signum() } else { 0 }));
            }
            for _ in n1..n2 {
                steps.push((ap, z2.signum()));
                steps.push((am, 0));
            }
        }
        let mut prev = t.from;
        for (j, &(letter, d)) in steps.iter().enumerate() {
            let next = if j + 1 == steps.len() {
                t.to
            } else {
                let mut name = format!("g{i}.{j}");
                while states.contains(&name) {
                    name.push('\'');
                }
                states.push(name);
                states.len() - 1
            };
            ts.push(OcnTransition { from: prev, label: Label::Sym(letter), to: next, delta: d });
            prev = next;
        }
    }
    let ocn = Ocn::new(alphabet, states, (from, 0), (to, 0), ts).expect("valid by construction");
    Ok(MidOcn { ocn, entry: from, exit: to, letters: [a0, b0, ap, am, bf], sim_states: n })
}

/// Budget for [`parikh_semilinear`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ParikhBudget {
    pub max_run_len: usize,
    pub max_pump_len: usize,
}

impl Default for ParikhBudget {
    fn default() -> Self {
        ParikhBudget { max_run_len: 24, max_pump_len: 12 }
    }
}

/// A pump of a host run, given by positions in the run (half-open ranges).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pump {
    /// A cycle with effect 0; may be repeated in place.
    First { alpha: (usize, usize) },
    /// A cycle `α` with effect `e > 0` followed later by a cycle `β` with
    /// effect `-e`; both are repeated the same number of times.
    Second { alpha: (usize, usize), beta: (usize, usize) },
}

/// An accepting run of `C` (transition indices) with its pumps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostRun {
    pub transitions: Vec<usize>,
    pub pumps: Vec<Pump>,
}

impl HostRun {
    /// The run with pump `i` inserted `mult[i]` times.
    pub fn pumped(&self, mult: &[u64]) -> Vec<usize> {
        let len = self.transitions.len();
        // insertions after position p (copies of infixes), in pump order
        let mut inserts: Vec<Vec<(usize, usize)>> = vec![Vec::new(); len + 1];
        for (pump, &k) in self.pumps.iter().zip(mult) {
            let ranges: Vec<(usize, usize)> = match *pump {
                Pump::First { alpha } => vec![alpha],
                Pump::Second { alpha, beta } => vec![alpha, beta],
            };
            for r in ranges {
                for _ in 0..k {
                    inserts[r.1].push(r);
                }
            }
        }
        // at one position, copies of increasing infixes go first
        let mut out = Vec::new();
        for p in 0..=len {
            let mut here = inserts[p].clone();
            here.sort_by_key(|&(a, b)| (b as i64 - a as i64, a));
            for (a, b) in here {
                out.extend_from_slice(&self.transitions[a..b]);
            }
            if p < len {
                out.push(self.transitions[p]);
            }
        }
        out
    }
}

fn dist_to(c: &Ocn, target: StateId) -> Vec<usize> {
    let n = c.num_states();
    let mut rev = vec![Vec::new(); n];
    for t in c.transitions() {
        rev[t.to].push(t.from);
    }
    let mut dist = vec![usize::MAX; n];
    dist[target] = 0;
    let mut q = VecDeque::from([target]);
    while let Some(s) = q.pop_front() {
        for &p in &rev[s] {
            if dist[p] == usize::MAX {
                dist[p] = dist[s] + 1;
                q.push_back(p);
            }
        }
    }
    dist
}

/// Accepting runs of `C` of the form `a0^{0|1} b0^j · middle · bf^c` with
/// length at most `max_run_len`, each with all pumps of length at most
/// `max_pump_len` (for second-kind pumps, `|α| + |β|`).
///
/// Partial runs are explored by length; of several partial runs that agree
/// on state, counter and letter counts only the first is kept. Hosts come out
/// in order of length.
pub fn host_runs(c: &MidOcn, budget: ParikhBudget) -> Result<Vec<HostRun>, ParikhError> {
    let ocn = &c.ocn;
    let ts = ocn.transitions();
    let [a0, b0, _, _, bf] = c.letters;
    let find = |from: StateId, l: Letter| ts.iter().position(|t| t.from == from && t.label == Label::Sym(l)).expect("phase loop");
    let (t_a0, t_b0, t_bf) = (find(c.entry, a0), find(c.entry, b0), find(c.exit, bf));
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); ocn.num_states()];
    for (i, t) in ts.iter().enumerate() {
        if i != t_a0 && i != t_b0 && i != t_bf {
            succ[t.from].push(i);
        }
    }
    let dist = dist_to(ocn, c.exit);
    let max = budget.max_run_len;
    if dist[c.entry] > max {
        return Ok(Vec::new());
    }
    type Key = (StateId, i64, [i64; 5]);
    let mut levels: Vec<BTreeMap<Key, Vec<usize>>> = vec![BTreeMap::new(); max + 1];
    for with_a0 in [false, true] {
        let head = usize::from(with_a0);
        for j in 0..=max.saturating_sub(head) {
            let mut run = Vec::new();
            if with_a0 {
                run.push(t_a0);
            }
            run.extend(std::iter::repeat_n(t_b0, j));
            let key = (c.entry, j as i64, [head as i64, j as i64, 0, 0, 0]);
            levels[run.len()].insert(key, run);
        }
    }
    let mut hosts = Vec::new();
    for len in 0..=max {
        let level = std::mem::take(&mut levels[len]);
        let rest = max - len;
        for ((s, ctr, parikh), run) in level {
            if s == c.exit && ctr as usize <= rest {
                let mut full = run.clone();
                full.extend(std::iter::repeat_n(t_bf, ctr as usize));
                hosts.push(full);
                if hosts.len() > MAX_HOSTS {
                    return Err(ParikhError::BudgetExceeded(format!("more than {MAX_HOSTS} host runs")));
                }
            }
            if rest == 0 {
                continue;
            }
            for &t in &succ[s] {
                let tr = &ts[t];
                let nc = ctr + tr.delta;
                if nc < 0 || dist[tr.to] > rest - 1 || nc as usize > rest - 1 {
                    continue;
                }
                let mut p = parikh;
                if let Some(i) = tr.label.letter().and_then(|l| c.letters.iter().position(|&x| x == l)) {
                    p[i] += 1;
                }
                levels[len + 1].entry((tr.to, nc, p)).or_insert_with(|| {
                    let mut r = run.clone();
                    r.push(t);
                    r
                });
            }
        }
    }
    Ok(hosts.into_iter().map(|h| with_pumps(c, h, budget.max_pump_len)).collect())
}

fn with_pumps(c: &MidOcn, run: Vec<usize>, max_pump_len: usize) -> HostRun {
    let ts = c.ocn.transitions();
    let mut states = vec![c.entry];
    let mut ctr = vec![0i64];
    for &t in &run {
        states.push(ts[t].to);
        ctr.push(ctr.last().unwrap() + ts[t].delta);
    }
    let n = run.len();
    // cycles (i, j) with their effect
    let mut cycles = Vec::new();
    for i in 0..n {
        for j in i + 1..=n.min(i + max_pump_len) {
            if states[i] == states[j] {
                cycles.push((i, j, ctr[j] - ctr[i]));
            }
        }
    }
    let mut pumps = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut consider = |p: Pump, key: Vec<usize>, pumps: &mut Vec<Pump>| {
        let mut key = key;
        key.sort_unstable();
        if seen.insert(key) {
            pumps.push(p);
        }
    };
    for &(i, j, e) in &cycles {
        if e == 0 {
            consider(Pump::First { alpha: (i, j) }, run[i..j].to_vec(), &mut pumps);
        }
    }
    for &(i, j, e) in &cycles {
        if e <= 0 {
            continue;
        }
        for &(k, l, f) in &cycles {
            if k >= j && f == -e && (j - i) + (l - k) <= max_pump_len {
                let mut key = run[i..j].to_vec();
                key.extend_from_slice(&run[k..l]);
                consider(Pump::Second { alpha: (i, j), beta: (k, l) }, key, &mut pumps);
            }
        }
    }
    HostRun { transitions: run, pumps }
}

/// Under-approximation of `Parikh(L(C)) ⊆ ℕ^5`: the union over host runs `ρ`
/// of `Parikh(ρ) + {Parikh(π) : π pump of ρ}*`.
pub fn parikh_semilinear(c: &MidOcn, budget: ParikhBudget) -> Result<SemilinearSet, ParikhError> {
    let ts = c.ocn.transitions();
    let word = |seq: &[usize]| -> Vec<Letter> { seq.iter().filter_map(|&t| ts[t].label.letter()).collect() };
    let mut out = SemilinearSet::empty(5);
    let mut seen = HashSet::new();
    let solver = SolverBudget::default();
    for h in host_runs(c, budget)? {
        let base = c.parikh(&word(&h.transitions)).to_vec();
        let periods: Vec<Vec<i64>> = h
            .pumps
            .iter()
            .map(|p| match *p {
                Pump::First { alpha } => c.parikh(&word(&h.transitions[alpha.0..alpha.1])).to_vec(),
                Pump::Second { alpha, beta } => {
                    let mut w = word(&h.transitions[alpha.0..alpha.1]);
                    w.extend(word(&h.transitions[beta.0..beta.1]));
                    c.parikh(&w).to_vec()
                }
            })
            .collect();
        let l = LinearSet::new(base, periods)?;
        if !seen.insert(l.clone()) || out.components().iter().any(|k| k.subsumes(&l, &solver).unwrap_or(false)) {
            continue;
        }
        out.push(l)?;
    }
    Ok(out)
}

/// The linear map `(a0, b0, a+, a-, bf) ↦ (a0, b0, a0 + a+ - a-, bf)`.
pub fn mid_map() -> (Vec<Vec<i64>>, Vec<i64>) {
    (
        vec![vec![1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0], vec![1, 0, 1, -1, 0], vec![0, 0, 0, 0, 1]],
        vec![0; 4],
    )
}

/// Under-approximation of `MID ⊆ ℕ² × ℤ × ℕ` for entry `from` and exit `to`:
/// tuples `(m, l, m'', l')` with `(from, m, l) → (to, m'', l')` in `V[ℤ, ℕ]`.
pub fn mid_set(v: &Vass2, from: StateId, to: StateId, budget: ParikhBudget) -> Result<SemilinearSet, ParikhError> {
    let c = build_mid_ocn(v, from, to)?;
    let s = parikh_semilinear(&c, budget)?;
    let (m, off) = mid_map();
    let mut img = affine_image(&s, &m, &off)?;
    img.simplify(&SolverBudget::default());
    Ok(img)
}

//! Linear path schemes over a [`Vass2`] and their exact reachability sets.
//!
//! A scheme `α0 β1* α1 … βk* αk` is a sequence of segments `α` and loops `β`
//! (transition sequences). Its profile records the effect and the minimal
//! enabling vector of every segment and loop; from the profile the set of
//! vectors reachable through the scheme is an exact semilinear set, obtained
//! by solving one Diophantine system per choice of which loops are taken.
//!
//! Under the `(ℕ, ℕ)` mask, enumerating all schemes up to a budget yields a
//! sound under-approximation of the reachability set that grows with the
//! budget.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};

use thiserror::Error;

use crate::automata::{Config2, Coord, StateId, Vass2};
use crate::semilinear::{
    solve_nonneg, DioRow, DioSystem, LinearSet, Relation, SemilinearError, SemilinearSet, SolverBudget,
};

/// Default cap on the number of loops in [`reach_via_lps`].
pub const DEFAULT_MAX_K: usize = 6;

/// Cap on the number of schemes produced by one enumeration.
pub const MAX_SCHEMES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpsError {
    #[error("malformed linear path scheme: {0}")]
    Malformed(String),
    #[error("scheme has {k} loops, more than the cap {cap}")]
    KTooLarge { k: usize, cap: usize },
    #[error(transparent)]
    Solver(#[from] SemilinearError),
}

/// `α0 β1* α1 … βk* αk` as transition indices of a [`Vass2`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lps {
    segments: Vec<Vec<usize>>,
    loops: Vec<Vec<usize>>,
    from: StateId,
    to: StateId,
}

impl Lps {
    /// Checks that consecutive transitions connect, that each loop is a cycle
    /// at its junction, and that `segments.len() == loops.len() + 1`.
    pub fn new(
        v: &Vass2,
        from: StateId,
        segments: Vec<Vec<usize>>,
        loops: Vec<Vec<usize>>,
    ) -> Result<Self, LpsError> {
        if segments.len() != loops.len() + 1 {
            return Err(LpsError::Malformed(format!("{} segments for {} loops", segments.len(), loops.len())));
        }
        let ts = v.transitions();
        let mut at = from;
        let walk = |at: &mut StateId, seq: &[usize]| -> Result<(), LpsError> {
            for &t in seq {
                let tr = ts.get(t).ok_or_else(|| LpsError::Malformed(format!("no transition {t}")))?;
                if tr.from != *at {
                    return Err(LpsError::Malformed(format!("transition {t} does not leave state {at}")));
                }
                *at = tr.to;
            }
            Ok(())
        };
        for i in 0..segments.len() {
            walk(&mut at, &segments[i])?;
            if let Some(l) = loops.get(i) {
                if l.is_empty() {
                    return Err(LpsError::Malformed("empty loop".into()));
                }
                let junction = at;
                walk(&mut at, l)?;
                if at != junction {
                    return Err(LpsError::Malformed(format!("loop {} is not a cycle", i + 1)));
                }
            }
        }
        Ok(Lps { segments, loops, from, to: at })
    }

    pub fn k(&self) -> usize {
        self.loops.len()
    }
    pub fn segments(&self) -> &[Vec<usize>] {
        &self.segments
    }
    pub fn loops(&self) -> &[Vec<usize>] {
        &self.loops
    }
    pub fn from(&self) -> StateId {
        self.from
    }
    pub fn to(&self) -> StateId {
        self.to
    }

    /// The run `α0 β1^{x1} α1 … βk^{xk} αk`.
    pub fn run(&self, mult: &[u64]) -> Vec<usize> {
        let mut out = self.segments[0].clone();
        for (i, l) in self.loops.iter().enumerate() {
            for _ in 0..mult[i] {
                out.extend_from_slice(l);
            }
            out.extend_from_slice(&self.segments[i + 1]);
        }
        out
    }
}

/// Effects and minimal enabling vectors of a scheme.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LpsProfile {
    pub a: Vec<[i64; 2]>,
    pub b: Vec<[i64; 2]>,
    pub c: Vec<[i64; 2]>,
    pub d: Vec<[i64; 2]>,
}

/// Effect and pointwise-minimal nonnegative start vector of a sequence.
pub fn effect_and_deficit(v: &Vass2, seq: &[usize]) -> ([i64; 2], [i64; 2]) {
    let mut cur = [0i64; 2];
    let mut need = [0i64; 2];
    for &t in seq {
        let d = v.transitions()[t].delta;
        for i in 0..2 {
            cur[i] += d[i];
            need[i] = need[i].max(-cur[i]);
        }
    }
    (cur, need)
}

pub fn profile_of(lps: &Lps, v: &Vass2) -> Result<LpsProfile, LpsError> {
    // revalidate against this VASS
    let lps = Lps::new(v, lps.from, lps.segments.clone(), lps.loops.clone())?;
    let (a, c) = lps.segments.iter().map(|s| effect_and_deficit(v, s)).unzip();
    let (b, d) = lps.loops.iter().map(|l| effect_and_deficit(v, l)).unzip();
    Ok(LpsProfile { a, b, c, d })
}

/// Part of a reachability set with the loop multiplicities that produce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachPiece {
    /// Loop multiplicities `x ∈ ℕ^k`.
    pub counts: LinearSet,
    /// The reached vectors `y = start + Σ a_i + Σ b_i x_i`.
    pub reached: LinearSet,
    /// `start + Σ a_i`.
    pub offset: [i64; 2],
    /// Loop effects `b_i`.
    pub effects: Vec<[i64; 2]>,
}

impl ReachPiece {
    /// `offset + Σ effects_i · x_i`.
    pub fn image(&self, x: &[i64]) -> [i64; 2] {
        let mut y = self.offset;
        for (b, c) in self.effects.iter().zip(x) {
            y[0] += b[0] * c;
            y[1] += b[1] * c;
        }
        y
    }

    /// Loop multiplicities in `counts` whose run reaches `reached.at(mult)`.
    /// Periods of the two sets are normalized separately; this matches each
    /// reached period with a counts period that maps onto it.
    pub fn counts_at(&self, mult: &[u64]) -> Vec<u64> {
        let zero = self.image(&vec![0; self.effects.len()]);
        let lin = |p: &[i64]| {
            let y = self.image(p);
            vec![y[0] - zero[0], y[1] - zero[1]]
        };
        let mut x = self.counts.base().to_vec();
        for (yp, &k) in self.reached.periods().iter().zip(mult) {
            let xp = self.counts.periods().iter().find(|xp| &lin(xp) == yp).expect("reached periods are images of counts periods");
            for (xi, pi) in x.iter_mut().zip(xp) {
                *xi += k as i64 * pi;
            }
        }
        x.iter().map(|&c| c as u64).collect()
    }
}

/// Exact reachability set of the scheme from `start`, split by solution base.
///
/// For every subset of loops taken at least once (`x_i = 1 + x_i'`), the
/// constraints are: each segment is enabled where it starts, and each taken
/// loop is enabled at its first and at its last iteration (the counter moves
/// linearly across iterations, so these two suffice).
pub fn reach_pieces(
    profile: &LpsProfile,
    start: [i64; 2],
    max_k: usize,
    budget: &SolverBudget,
) -> Result<Vec<ReachPiece>, LpsError> {
    let k = profile.b.len();
    if k > max_k {
        return Err(LpsError::KTooLarge { k, cap: max_k });
    }
    if profile.a.len() != k + 1 || profile.c.len() != k + 1 || profile.d.len() != k {
        return Err(LpsError::Malformed("profile lengths disagree".into()));
    }
    let mut out = Vec::new();
    let mut offset = start;
    for a in &profile.a {
        offset[0] += a[0];
        offset[1] += a[1];
    }
    if (0..2).any(|i| start[i] < profile.c[0][i]) {
        return Ok(out);
    }
    for mask in 0u32..(1 << k) {
        let taken: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
        // variables: x'_i for taken loops, in loop order
        let var: Vec<Option<usize>> = {
            let mut next = 0;
            taken.iter().map(|&t| t.then(|| { next += 1; next - 1 })).collect()
        };
        let nv = var.iter().flatten().count();
        // affine form per coordinate: (const, coeffs over x')
        let mut rows: Vec<DioRow> = Vec::new();
        let mut feasible = true;
        let mut cur: [(i64, Vec<i64>); 2] = [(start[0] + profile.a[0][0], vec![0; nv]), (start[1] + profile.a[0][1], vec![0; nv])];
        let ge = |form: &(i64, Vec<i64>), extra: &[i64], bound: i64, rows: &mut Vec<DioRow>| -> bool {
            // form + extra·x' >= bound
            let coeffs: Vec<i64> = form.1.iter().zip(extra).map(|(a, b)| a + b).collect();
            let rhs = bound - form.0;
            if coeffs.iter().all(|&c| c == 0) {
                return rhs <= 0;
            }
            if rhs <= 0 && coeffs.iter().all(|&c| c >= 0) {
                return true;
            }
            let row = DioRow { coeffs, rel: Relation::Ge, rhs };
            if !rows.contains(&row) {
                rows.push(row);
            }
            true
        };
        let zero = vec![0; nv];
        for i in 0..k {
            let b = profile.b[i];
            if let Some(vi) = var[i] {
                for j in 0..2 {
                    // first iteration: W >= d
                    feasible &= ge(&cur[j], &zero, profile.d[i][j], &mut rows);
                    // last iteration: W + b (x_i - 1) = W + b x'_i >= d
                    let mut e = vec![0; nv];
                    e[vi] = b[j];
                    feasible &= ge(&cur[j], &e, profile.d[i][j], &mut rows);
                    // after the loop: W + b (1 + x'_i)
                    cur[j].0 += b[j];
                    cur[j].1[vi] += b[j];
                }
            }
            for j in 0..2 {
                feasible &= ge(&cur[j], &zero, profile.c[i + 1][j], &mut rows);
                cur[j].0 += profile.a[i + 1][j];
            }
        }
        if !feasible {
            continue;
        }
        let sols = if nv == 0 {
            crate::semilinear::Solutions { bases: vec![vec![]], periods: vec![] }
        } else if rows.is_empty() {
            let periods = (0..nv).map(|i| (0..nv).map(|j| i64::from(i == j)).collect()).collect();
            crate::semilinear::Solutions { bases: vec![vec![0; nv]], periods }
        } else {
            solve_nonneg(&DioSystem::new(nv, rows)?, budget)?
        };
        // x = offset + embed(x')
        let embed = |xp: &[i64], offset: bool| -> Vec<i64> {
            (0..k).map(|i| var[i].map_or(0, |vi| xp[vi] + i64::from(offset))).collect()
        };
        let y_of = |xp: &[i64], offset: bool| -> Vec<i64> {
            (0..2)
                .map(|j| (if offset { cur[j].0 } else { 0 }) + cur[j].1.iter().zip(xp).map(|(a, b)| a * b).sum::<i64>())
                .collect()
        };
        let x_periods: Vec<Vec<i64>> = sols.periods.iter().map(|p| embed(p, false)).collect();
        let y_periods: Vec<Vec<i64>> = sols.periods.iter().map(|p| y_of(p, false)).collect();
        for base in &sols.bases {
            out.push(ReachPiece {
                counts: LinearSet::new(embed(base, true), x_periods.clone())?,
                reached: LinearSet::new(y_of(base, true), y_periods.clone())?,
                offset,
                effects: profile.b.clone(),
            });
        }
    }
    Ok(out)
}

/// Exact set of vectors reachable from `start` through the scheme.
pub fn reach_via_lps(
    profile: &LpsProfile,
    start: [i64; 2],
    max_k: usize,
    budget: &SolverBudget,
) -> Result<SemilinearSet, LpsError> {
    let mut s = SemilinearSet::empty(2);
    for p in reach_pieces(profile, start, max_k, budget)? {
        s.push(p.reached)?;
    }
    Ok(s)
}

/// Limits on the schemes enumerated by [`enumerate_lps`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LpsBudget {
    pub max_seg_len: usize,
    pub max_loop_len: usize,
    pub max_loops: usize,
}

impl Default for LpsBudget {
    fn default() -> Self {
        LpsBudget { max_seg_len: 6, max_loop_len: 6, max_loops: 3 }
    }
}

/// Simple paths from `u` (including the empty one), minimal in deficit per
/// `(end, effect)`, shortest first.
fn simple_paths(v: &Vass2, succ: &[Vec<usize>], u: StateId, max_len: usize) -> Vec<(StateId, Vec<usize>)> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut layer: Vec<(StateId, Vec<usize>, Vec<bool>)> = {
        let mut visited = vec![false; v.num_states()];
        visited[u] = true;
        vec![(u, Vec::new(), visited)]
    };
    for _ in 0..=max_len {
        let mut next = Vec::new();
        for (at, path, visited) in layer {
            let (e, c) = effect_and_deficit(v, &path);
            if seen.insert((at, e, c)) {
                out.push((at, path.clone()));
            }
            if path.len() == max_len {
                continue;
            }
            for &t in &succ[at] {
                let to = v.transitions()[t].to;
                if visited[to] {
                    continue;
                }
                let mut p = path.clone();
                p.push(t);
                let mut vis = visited.clone();
                vis[to] = true;
                next.push((to, p, vis));
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    pareto(v, out, |(end, p)| (*end, p.as_slice()))
}

/// Drops every path dominated by another with the same key and effect and a
/// pointwise smaller or equal deficit (ties keep the earliest). A dominated
/// path fires in fewer configurations with the same result.
fn pareto<T, K: PartialEq>(v: &Vass2, items: Vec<T>, key: impl Fn(&T) -> (K, &[usize])) -> Vec<T> {
    let info: Vec<(K, [i64; 2], [i64; 2])> = items
        .iter()
        .map(|it| {
            let (k, p) = key(it);
            let (e, c) = effect_and_deficit(v, p);
            (k, e, c)
        })
        .collect();
    let dominated = |j: usize| {
        info.iter().enumerate().any(|(i, (k, e, c))| {
            let (kj, ej, cj) = &info[j];
            i != j && k == kj && e == ej && c[0] <= cj[0] && c[1] <= cj[1] && (c != cj || i < j)
        })
    };
    let keep: Vec<bool> = (0..items.len()).map(|j| !dominated(j)).collect();
    items.into_iter().zip(keep).filter_map(|(it, k)| k.then_some(it)).collect()
}

/// Simple cycles at `u` with nonzero effect, minimal in deficit per effect.
fn simple_cycles(v: &Vass2, succ: &[Vec<usize>], u: StateId, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut layer: Vec<(StateId, Vec<usize>, Vec<bool>)> = vec![(u, Vec::new(), vec![false; v.num_states()])];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (at, path, visited) in layer {
            for &t in &succ[at] {
                let to = v.transitions()[t].to;
                let mut p = path.clone();
                p.push(t);
                if to == u {
                    let (e, c) = effect_and_deficit(v, &p);
                    if e != [0, 0] && seen.insert((e, c)) {
                        out.push(p);
                    }
                    continue;
                }
                if visited[to] {
                    continue;
                }
                let mut vis = visited.clone();
                vis[to] = true;
                next.push((to, p, vis));
            }
        }
        layer = next;
    }
    pareto(v, out, |p| ((), p.as_slice()))
}

/// Deterministic list of schemes from `from` to `to` (or to any state when
/// `to` is `None`), built from simple paths and simple nonzero cycles, in
/// order of total length (segments plus one copy of each loop). At most
/// [`MAX_SCHEMES`] schemes are produced.
pub fn enumerate_lps(v: &Vass2, from: StateId, to: Option<StateId>, budget: LpsBudget) -> Vec<Lps> {
    enumerate(v, from, [None, None], to, budget)
}

/// [`enumerate_lps`] restricted to schemes that can possibly run from
/// `start`: every segment must fit under an upper bound on the counters,
/// which stays `start + Σ a_i` in a `ℕ` coordinate until some earlier loop
/// increases it.
pub fn enumerate_lps_from(v: &Vass2, start: Config2, to: Option<StateId>, budget: LpsBudget) -> Vec<Lps> {
    enumerate(v, start.0, [Some(start.1[0]), Some(start.1[1])], to, budget)
}

enum Item {
    /// Segments and loops so far (one more segment pending), junction,
    /// counter upper bound.
    Open(Vec<Vec<usize>>, Vec<Vec<usize>>, StateId, [Option<i64>; 2]),
    Done(Lps),
}

fn enumerate(v: &Vass2, from: StateId, start: [Option<i64>; 2], to: Option<StateId>, budget: LpsBudget) -> Vec<Lps> {
    let succ = v.successors();
    let n = v.num_states();
    let paths: Vec<Vec<(StateId, Vec<usize>)>> = (0..n).map(|u| simple_paths(v, &succ, u, budget.max_seg_len)).collect();
    let cycles: Vec<Vec<Vec<usize>>> = (0..n).map(|u| simple_cycles(v, &succ, u, budget.max_loop_len)).collect();
    let nat = v.mask().map(|c| c == Coord::Nat);
    let start = [start[0].filter(|_| nat[0]), start[1].filter(|_| nat[1])];
    let mut out = Vec::new();
    let mut seen_profiles = HashSet::new();
    // partials with equal junction and profile so far extend identically
    let mut seen_partial = HashSet::new();
    // items are popped by (total length, insertion order)
    let mut items: Vec<Option<Item>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let push = |item: Item, len: usize, items: &mut Vec<Option<Item>>, heap: &mut BinaryHeap<Reverse<(usize, usize)>>| {
        heap.push(Reverse((len, items.len())));
        items.push(Some(item));
    };
    push(Item::Open(Vec::new(), Vec::new(), from, start), 0, &mut items, &mut heap);
    while let Some(Reverse((len, id))) = heap.pop() {
        match items[id].take().expect("each item is popped once") {
            Item::Done(lps) => {
                let prof = profile_of(&lps, v).expect("well-formed by construction");
                if seen_profiles.insert((lps.to, prof)) {
                    out.push(lps);
                    if out.len() >= MAX_SCHEMES {
                        break;
                    }
                }
            }
            Item::Open(segs, loops, at, ub) => {
                for (end, alpha) in &paths[at] {
                    let (a, c) = effect_and_deficit(v, alpha);
                    if (0..2).any(|j| ub[j].is_some_and(|u| u < c[j])) {
                        continue;
                    }
                    let ub = [ub[0].map(|u| u + a[0]), ub[1].map(|u| u + a[1])];
                    let mut s = segs.clone();
                    s.push(alpha.clone());
                    if to.is_none_or(|t| t == *end) {
                        let lps = Lps { segments: s.clone(), loops: loops.clone(), from, to: *end };
                        push(Item::Done(lps), len + alpha.len(), &mut items, &mut heap);
                    }
                    if loops.len() == budget.max_loops {
                        continue;
                    }
                    for beta in &cycles[*end] {
                        if alpha.is_empty() && loops.last() == Some(beta) {
                            continue;
                        }
                        let mut l = loops.clone();
                        l.push(beta.clone());
                        let key: Vec<_> = s.iter().chain(&l).map(|p| effect_and_deficit(v, p)).collect();
                        let (b, _) = effect_and_deficit(v, beta);
                        let ub = [0, 1].map(|j| ub[j].filter(|_| b[j] <= 0));
                        if seen_partial.insert((*end, s.len(), key, ub)) {
                            push(Item::Open(s.clone(), l, *end, ub), len + alpha.len() + beta.len(), &mut items, &mut heap);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Under-approximation of the reachability set of `v` (mask `(ℕ, ℕ)`) from
/// its initial configuration, for each target state. For SUFF sets call this
/// on the reverse of `v`.
pub fn pref_suff_sets(
    v: &Vass2,
    targets: &[StateId],
    budget: LpsBudget,
    solver: &SolverBudget,
) -> Result<BTreeMap<StateId, SemilinearSet>, LpsError> {
    let (start_state, start) = v.initial().ok_or_else(|| LpsError::Malformed("the VASS has no initial configuration".into()))?;
    let pieces = reach_from(v, (start_state, start), targets, budget, solver)?;
    Ok(pieces
        .into_iter()
        .map(|(t, ps)| {
            let mut s = SemilinearSet::empty(2);
            for (_, p) in ps {
                s.push(p.reached).expect("dimension 2");
            }
            s.simplify(solver);
            (t, s)
        })
        .collect())
}

/// Reach pieces per target state, each with the scheme that produced it.
pub fn reach_from(
    v: &Vass2,
    start: Config2,
    targets: &[StateId],
    budget: LpsBudget,
    solver: &SolverBudget,
) -> Result<BTreeMap<StateId, Vec<(Lps, ReachPiece)>>, LpsError> {
    let mut out: BTreeMap<StateId, Vec<(Lps, ReachPiece)>> = targets.iter().map(|&t| (t, Vec::new())).collect();
    for lps in enumerate_lps_from(v, start, None, budget) {
        let Some(bucket) = out.get_mut(&lps.to) else { continue };
        let prof = profile_of(&lps, v)?;
        for piece in reach_pieces(&prof, start.1, DEFAULT_MAX_K.max(budget.max_loops), solver)? {
            if !bucket.iter().any(|(_, p)| p.reached == piece.reached) {
                bucket.push((lps.clone(), piece));
            }
        }
    }
    Ok(out)
}

//! Exact emptiness for one-counter nets and automata, plus bounded BFS over
//! two-dimensional VASS.
//!
//! Emptiness goes through unit-delta expansion and a summary saturation: the
//! level relation holds `(p, q)` when some run from `(p, c)` reaches `(q, c)`
//! without ever dropping below `c`. For a net normalized to start and end at
//! counter 0, the language is nonempty iff `(q0, qf)` is in the relation.

use std::collections::{HashMap, VecDeque};

use crate::automata::{
    Config2, Edge, Label, Oca, Ocn, OcnTransition, StateId, Vass2,
};

/// An [`Ocn`] whose deltas all lie in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitOcn(Ocn);

impl UnitOcn {
    pub fn new(net: Ocn) -> Option<Self> {
        net.transitions().iter().all(|t| t.delta.abs() <= 1).then_some(UnitOcn(net))
    }

    pub fn as_ocn(&self) -> &Ocn {
        &self.0
    }

    pub fn into_ocn(self) -> Ocn {
        self.0
    }
}

fn expand_parts(net: &Ocn) -> (Vec<String>, Vec<OcnTransition>) {
    let mut states = net.states().to_vec();
    let mut out = Vec::new();
    for (i, t) in net.transitions().iter().enumerate() {
        let k = t.delta.unsigned_abs();
        if k <= 1 {
            out.push(*t);
            continue;
        }
        let step = t.delta.signum();
        let mut prev = t.from;
        for j in 1..k {
            let mut name = format!("{}~{}.{}", net.states()[t.from], i, j);
            while states.contains(&name) {
                name.push('\'');
            }
            let id = states.len();
            states.push(name);
            let label = if j == 1 { t.label } else { Label::Eps };
            out.push(OcnTransition { from: prev, label, to: id, delta: step });
            prev = id;
        }
        let label = if k == 1 { t.label } else { Label::Eps };
        out.push(OcnTransition { from: prev, label, to: t.to, delta: step });
    }
    (states, out)
}

/// Replaces each transition with delta `z`, `|z| > 1`, by a chain of `|z|`
/// unit steps through fresh states; the letter is read on the first step.
pub fn expand_to_unit(net: &Ocn) -> UnitOcn {
    if net.transitions().iter().all(|t| t.delta.abs() <= 1) {
        return UnitOcn(net.clone());
    }
    let (states, ts) = expand_parts(net);
    let out = Ocn::new(net.alphabet().clone(), states, net.initial(), net.final_config(), ts)
        .expect("expansion preserves validity");
    UnitOcn(out)
}

/// [`expand_to_unit`] for automata with zero tests (kept as they are).
pub fn expand_oca_to_unit(a: &Oca) -> Oca {
    let net = expand_to_unit(a.net()).into_ocn();
    Oca::new(net, a.zero_tests().to_vec()).expect("expansion preserves validity")
}

/// How a pair entered the level relation; used to rebuild witness runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    Refl,
    /// A single transition with delta 0 (index into the net's transitions).
    Edge0(usize),
    /// `(p, mid)` followed by `(mid, q)`.
    Compose(StateId),
    /// An increment, an inner balanced run, and a decrement.
    Nest { up: usize, inner: (StateId, StateId), down: usize },
}

/// The set of state pairs connected by balanced runs that never go below
/// their starting level.
#[derive(Clone, Debug)]
pub struct LevelRelation {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    deriv: Option<HashMap<(StateId, StateId), Derivation>>,
}

impl LevelRelation {
    fn bit(&self, p: StateId, q: StateId) -> bool {
        self.rows[p * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    pub fn contains(&self, p: StateId, q: StateId) -> bool {
        p < self.n && q < self.n && self.bit(p, q)
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    /// All pairs, in lexicographic order.
    pub fn pairs(&self) -> Vec<(StateId, StateId)> {
        let mut out = Vec::new();
        for p in 0..self.n {
            for q in 0..self.n {
                if self.bit(p, q) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    pub fn derivation(&self, p: StateId, q: StateId) -> Option<Derivation> {
        self.deriv.as_ref()?.get(&(p, q)).copied()
    }

    /// A run (as transition indices of the saturated net) witnessing `(p, q)`.
    ///
    /// Only available when the relation was built by [`level_relation`].
    pub fn witness(&self, p: StateId, q: StateId) -> Option<Vec<usize>> {
        let deriv = self.deriv.as_ref()?;
        deriv.get(&(p, q))?;
        enum Job {
            Pair(StateId, StateId),
            Emit(usize),
        }
        let mut out = Vec::new();
        let mut stack = vec![Job::Pair(p, q)];
        while let Some(job) = stack.pop() {
            match job {
                Job::Emit(t) => out.push(t),
                Job::Pair(a, b) => match deriv[&(a, b)] {
                    Derivation::Refl => {}
                    Derivation::Edge0(t) => out.push(t),
                    Derivation::Compose(m) => {
                        stack.push(Job::Pair(m, b));
                        stack.push(Job::Pair(a, m));
                    }
                    Derivation::Nest { up, inner, down } => {
                        stack.push(Job::Emit(down));
                        stack.push(Job::Pair(inner.0, inner.1));
                        stack.push(Job::Emit(up));
                    }
                },
            }
        }
        Some(out)
    }
}

fn saturate(net: &Ocn, record: bool) -> LevelRelation {
    let n = net.num_states();
    let words = n.div_ceil(64).max(1);
    let mut rel = LevelRelation { n, words, rows: vec![0; n * words], deriv: record.then(HashMap::new) };
    let mut cols = vec![0u64; n * words];
    let mut ups_into: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut downs_from: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, t) in net.transitions().iter().enumerate() {
        match t.delta {
            1 => ups_into[t.to].push(i),
            -1 => downs_from[t.from].push(i),
            _ => {}
        }
    }
    let mut work: VecDeque<(StateId, StateId)> = VecDeque::new();
    let add = |rel: &mut LevelRelation, cols: &mut Vec<u64>, work: &mut VecDeque<_>, p: usize, q: usize, d: Derivation| {
        if rel.bit(p, q) {
            return;
        }
        rel.rows[p * words + q / 64] |= 1 << (q % 64);
        cols[q * words + p / 64] |= 1 << (p % 64);
        if let Some(m) = rel.deriv.as_mut() {
            m.insert((p, q), d);
        }
        work.push_back((p, q));
    };
    for p in 0..n {
        add(&mut rel, &mut cols, &mut work, p, p, Derivation::Refl);
    }
    for (i, t) in net.transitions().iter().enumerate() {
        if t.delta == 0 {
            add(&mut rel, &mut cols, &mut work, t.from, t.to, Derivation::Edge0(i));
        }
    }
    let ts = net.transitions();
    let bits = |v: &[u64], base: usize| -> Vec<usize> {
        let mut out = Vec::new();
        for w in 0..words {
            let mut x = v[base + w];
            while x != 0 {
                let b = x.trailing_zeros() as usize;
                out.push(w * 64 + b);
                x &= x - 1;
            }
        }
        out
    };
    while let Some((p, q)) = work.pop_front() {
        for r in bits(&rel.rows, q * words) {
            add(&mut rel, &mut cols, &mut work, p, r, Derivation::Compose(q));
        }
        for r in bits(&cols, p * words) {
            add(&mut rel, &mut cols, &mut work, r, q, Derivation::Compose(p));
        }
        for &u in &ups_into[p] {
            for &d in &downs_from[q] {
                add(&mut rel, &mut cols, &mut work, ts[u].from, ts[d].to, Derivation::Nest { up: u, inner: (p, q), down: d });
            }
        }
    }
    rel
}

/// Least fixpoint of reflexivity, 0-delta steps, composition and
/// increment/balanced/decrement nesting, with derivations recorded.
pub fn level_relation(net: &UnitOcn) -> LevelRelation {
    saturate(net.as_ocn(), true)
}

/// Keeps only states that lie on some path from `from` to `to` in the
/// underlying graph (zero tests counted as edges). Returns the restricted
/// machine and the new ids of `from` and `to`, or `None` if `to` is unreachable.
fn trim(net: &Ocn, zero: &[Edge]) -> Option<(Ocn, Vec<Edge>)> {
    let n = net.num_states();
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for (a, b) in net.transitions().iter().map(|t| (t.from, t.to)).chain(zero.iter().map(|z| (z.from, z.to))) {
        fwd[a].push(b);
        bwd[b].push(a);
    }
    let (s, f) = (net.initial().0, net.final_config().0);
    let reach = crate::automata::graph_closure(&fwd, s);
    if !reach[f] {
        return None;
    }
    let co = crate::automata::graph_closure(&bwd, f);
    let keep: Vec<bool> = (0..n).map(|i| reach[i] && co[i]).collect();
    let mut remap = vec![usize::MAX; n];
    let mut states = Vec::new();
    for i in 0..n {
        if keep[i] {
            remap[i] = states.len();
            states.push(net.states()[i].clone());
        }
    }
    let ts = net
        .transitions()
        .iter()
        .filter(|t| keep[t.from] && keep[t.to])
        .map(|t| OcnTransition { from: remap[t.from], to: remap[t.to], ..*t })
        .collect();
    let zs = zero
        .iter()
        .filter(|z| keep[z.from] && keep[z.to])
        .map(|z| Edge { from: remap[z.from], label: z.label, to: remap[z.to] })
        .collect();
    let out = Ocn::new(
        net.alphabet().clone(),
        states,
        (remap[s], net.initial().1),
        (remap[f], net.final_config().1),
        ts,
    )
    .ok()?;
    Some((out, zs))
}

/// Whether the net accepts no word. Inputs that are not normalized are
/// normalized first.
pub fn ocn_empty(a: &Ocn) -> bool {
    let norm = a.normalized();
    let Some((small, _)) = trim(&norm, &[]) else { return true };
    let unit = expand_to_unit(&small);
    let rel = saturate(unit.as_ocn(), false);
    let (s, f) = (unit.as_ocn().initial().0, unit.as_ocn().final_config().0);
    !rel.contains(s, f)
}

/// Whether the automaton accepts no word. Segments between zero tests are
/// balanced runs at level 0, so emptiness is reachability in the graph of
/// level-relation pairs and zero-test edges.
pub fn oca_empty(a: &Oca) -> bool {
    if a.zero_tests().is_empty() {
        return ocn_empty(a.net());
    }
    let norm = a.normalized();
    let Some((small, zs)) = trim(norm.net(), norm.zero_tests()) else { return true };
    let unit = expand_to_unit(&small);
    let net = unit.as_ocn();
    let rel = saturate(net, false);
    let n = net.num_states();
    let mut adj = vec![Vec::new(); n];
    for (p, q) in rel.pairs() {
        adj[p].push(q);
    }
    for z in &zs {
        adj[z.from].push(z.to);
    }
    !crate::automata::graph_closure(&adj, net.initial().0)[net.final_config().0]
}

/// Budget for [`bfs_reach`]: configurations with a coordinate of absolute
/// value above `max_counter` are not explored, and at most `max_steps`
/// configurations are expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BfsBudget {
    pub max_counter: i64,
    pub max_steps: usize,
}

impl Default for BfsBudget {
    fn default() -> Self {
        BfsBudget { max_counter: 64, max_steps: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BfsOutcome {
    /// Transition indices of a path from the source to the target.
    Reached(Vec<usize>),
    NotFoundWithinBudget,
}

impl BfsOutcome {
    pub fn path(&self) -> Option<&[usize]> {
        match self {
            BfsOutcome::Reached(p) => Some(p),
            BfsOutcome::NotFoundWithinBudget => None,
        }
    }
}

/// Breadth-first search from `from` for the first configuration satisfying
/// `goal`, with deterministic tie-breaking by transition order.
pub fn bfs_search<F>(v: &Vass2, from: Config2, budget: BfsBudget, mut goal: F) -> Option<(Vec<usize>, Config2)>
where
    F: FnMut(Config2) -> bool,
{
    if !v.admits(from.1) {
        return None;
    }
    let succ = v.successors();
    let mut parent: HashMap<Config2, (Config2, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(from, (from, usize::MAX));
    queue.push_back(from);
    let mut expanded = 0;
    while let Some(c) = queue.pop_front() {
        if goal(c) {
            let mut path = Vec::new();
            let mut cur = c;
            while cur != from {
                let (prev, t) = parent[&cur];
                path.push(t);
                cur = prev;
            }
            path.reverse();
            return Some((path, c));
        }
        expanded += 1;
        if expanded > budget.max_steps {
            return None;
        }
        for &t in &succ[c.0] {
            if let Some(d) = v.fire(c, t) {
                if d.1.iter().any(|x| x.abs() > budget.max_counter) || parent.contains_key(&d) {
                    continue;
                }
                parent.insert(d, (c, t));
                queue.push_back(d);
            }
        }
    }
    None
}

/// Bounded reachability query. `Reached` paths always replay under the mask;
/// `NotFoundWithinBudget` is inconclusive.
pub fn bfs_reach(v: &Vass2, from: Config2, to: Config2, budget: BfsBudget) -> BfsOutcome {
    match bfs_search(v, from, budget, |c| c == to) {
        Some((p, _)) => BfsOutcome::Reached(p),
        None => BfsOutcome::NotFoundWithinBudget,
    }
}

/// All configurations reachable from `from` within the budget, sorted.
pub fn bfs_reachable_set(v: &Vass2, from: Config2, budget: BfsBudget) -> Vec<Config2> {
    let mut seen = Vec::new();
    bfs_search(v, from, budget, |c| {
        seen.push(c);
        false
    });
    seen.sort();
    seen
}

/// Membership in a one-counter language by exhaustive search over
/// configurations with counter at most `cap`; an oracle for tests.
pub fn bounded_accepts(a: &Oca, w: &[crate::automata::Letter], cap: i64) -> bool {
    let n = a.num_states();
    let width = (cap + 1) as usize;
    let idx = |q: usize, c: i64, i: usize| (i * n + q) * width + c as usize;
    let mut seen = vec![false; (w.len() + 1) * n * width];
    let (q0, c0) = a.initial();
    if c0 > cap {
        return false;
    }
    let mut stack = vec![(q0, c0, 0usize)];
    seen[idx(q0, c0, 0)] = true;
    while let Some((q, c, i)) = stack.pop() {
        if i == w.len() && (q, c) == a.final_config() {
            return true;
        }
        let mut push = |q2: usize, c2: i64, j: usize, stack: &mut Vec<_>| {
            if (0..=cap).contains(&c2) && !seen[idx(q2, c2, j)] {
                seen[idx(q2, c2, j)] = true;
                stack.push((q2, c2, j));
            }
        };
        for t in a.transitions().iter().filter(|t| t.from == q) {
            match t.label {
                Label::Eps => push(t.to, c + t.delta, i, &mut stack),
                Label::Sym(l) if i < w.len() && w[i] == l => push(t.to, c + t.delta, i + 1, &mut stack),
                _ => {}
            }
        }
        if c == 0 {
            for z in a.zero_tests().iter().filter(|z| z.from == q) {
                match z.label {
                    Label::Eps => push(z.to, 0, i, &mut stack),
                    Label::Sym(l) if i < w.len() && w[i] == l => push(z.to, 0, i + 1, &mut stack),
                    _ => {}
                }
            }
        }
    }
    false
}

/// Emptiness by exhaustive search over configurations with counter at most
/// `cap`; `false` answers are exact, `true` answers are relative to the cap.
pub fn bounded_empty(a: &Oca, cap: i64) -> bool {
    let n = a.num_states();
    let width = (cap + 1) as usize;
    let mut seen = vec![false; n * width];
    let (q0, c0) = a.initial();
    if c0 > cap {
        return true;
    }
    let mut stack = vec![(q0, c0)];
    seen[q0 * width + c0 as usize] = true;
    while let Some((q, c)) = stack.pop() {
        if (q, c) == a.final_config() {
            return false;
        }
        let mut next = Vec::new();
        for t in a.transitions().iter().filter(|t| t.from == q) {
            next.push((t.to, c + t.delta));
        }
        if c == 0 {
            for z in a.zero_tests().iter().filter(|z| z.from == q) {
                next.push((z.to, 0));
            }
        }
        for (q2, c2) in next {
            if (0..=cap).contains(&c2) && !seen[q2 * width + c2 as usize] {
                seen[q2 * width + c2 as usize] = true;
                stack.push((q2, c2));
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{enumerate_words, Language, MachineBuilder, NAT_NAT};

    fn k_ocn() -> Ocn {
        MachineBuilder::new(["a", "b"])
            .trans("q0", "a", "q0", 1)
            .trans("q0", "eps", "qf", 0)
            .trans("qf", "b", "qf", -1)
            .init("q0", 0)
            .fin("qf", 0)
            .build_ocn()
            .unwrap()
    }

    #[test]
    fn expansion_builds_chains() {
        let m = MachineBuilder::new(["a"]).trans("q", "a", "r", 3).init("q", 0).fin("r", 3).build_ocn().unwrap();
        let u = expand_to_unit(&m).into_ocn();
        assert_eq!(u.num_states(), 4);
        assert_eq!(u.transitions().len(), 3);
        assert!(u.transitions().iter().all(|t| t.delta == 1));
        assert_eq!(u.transitions().iter().filter(|t| t.label != Label::Eps).count(), 1);
        assert_eq!(enumerate_words(&u, 3).unwrap(), enumerate_words(&m, 3).unwrap());
    }

    #[test]
    fn unit_nets_are_unchanged() {
        let k = k_ocn();
        assert_eq!(expand_to_unit(&k).into_ocn(), k);
    }

    #[test]
    fn k_relation_contains_initial_final_pair() {
        let k = k_ocn();
        let u = expand_to_unit(&k);
        let rel = level_relation(&u);
        assert!(rel.contains(0, 1));
        let run = rel.witness(0, 1).unwrap();
        let ts = u.as_ocn().transitions();
        let mut c = 0;
        for (i, &t) in run.iter().enumerate() {
            c += ts[t].delta;
            assert!(c >= 0);
            if i > 0 {
                assert_eq!(ts[run[i - 1]].to, ts[t].from);
            }
        }
        assert_eq!(c, 0);
    }

    #[test]
    fn decrement_only_net_has_identity_relation() {
        let m = MachineBuilder::new(["a"]).trans("q0", "a", "q1", -1).init("q0", 0).fin("q1", 0).build_ocn().unwrap();
        let rel = level_relation(&UnitOcn::new(m.clone()).unwrap());
        assert_eq!(rel.pairs(), vec![(0, 0), (1, 1)]);
        assert!(ocn_empty(&m));
    }

    #[test]
    fn nesting_chain() {
        let m = MachineBuilder::new(["a"]).trans("q", "a", "r", 1).trans("r", "a", "s", -1).init("q", 0).fin("s", 0).build_ocn().unwrap();
        let rel = level_relation(&UnitOcn::new(m).unwrap());
        assert!(rel.contains(0, 2));
    }

    #[test]
    fn emptiness_examples() {
        assert!(!ocn_empty(&k_ocn()));
        let abb = MachineBuilder::new(["a", "b"]).edge("0", "a", "1").edge("1", "b", "2").edge("2", "b", "3").init("0", 0).fin("3", 0).build_nfa().unwrap();
        let p = crate::automata::product_ocn_nfa(&k_ocn(), &abb).unwrap();
        assert!(ocn_empty(&p));
    }

    #[test]
    fn oca_examples() {
        let inc_then_test = MachineBuilder::new(["a"]).trans("p", "a", "q", 1).zerotest("q", "a", "r").init("p", 0).fin("r", 0).build_oca().unwrap();
        assert!(oca_empty(&inc_then_test));
        assert!(!oca_empty(&Oca::from(k_ocn())));
    }

    #[test]
    fn bfs_trivial_and_disjoint() {
        let k = k_ocn();
        let v = crate::automata::cross_product(&k, &k, NAT_NAT).unwrap();
        let c = v.initial().unwrap();
        assert_eq!(bfs_reach(&v, c, c, BfsBudget::default()), BfsOutcome::Reached(vec![]));
        let l = MachineBuilder::new(["a", "b"])
            .trans("p0", "a", "p0", 1)
            .trans("p0", "b", "p1", 0)
            .trans("p1", "b", "p1", -1)
            .init("p0", 0)
            .fin("p1", 0)
            .build_ocn()
            .unwrap();
        let v = crate::automata::cross_product(&k, &l, NAT_NAT).unwrap();
        let out = bfs_reach(&v, v.initial().unwrap(), v.final_config().unwrap(), BfsBudget { max_counter: 30, max_steps: 200_000 });
        assert_eq!(out, BfsOutcome::NotFoundWithinBudget);
    }

    #[test]
    fn bounded_accepts_matches_exact() {
        let k = Oca::from(k_ocn());
        for w in ["", "ab", "aabb", "aab", "ba"] {
            let w = k.alphabet().parse_word(w).unwrap();
            assert_eq!(bounded_accepts(&k, &w, 10), k.accepts(&w));
        }
    }
}

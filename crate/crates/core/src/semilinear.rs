//! Linear and semilinear sets over `ℤ^d`, and exact nonnegative solution sets
//! of linear Diophantine systems.
//!
//! [`solve_nonneg`] returns the solution set of a system as `B + P*`: the
//! minimal solutions `B` and the Hilbert basis `P` of the homogeneous system.
//! It runs the Contejean–Devie completion procedure on the system extended by
//! one variable `t` for the right-hand side, with `t` capped at 1: minimal
//! solutions with `t = 0` are periods and those with `t = 1` are bases.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemilinearError {
    #[error("solver budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed linear set `{0}`")]
    Malformed(String),
}

/// `{base} + periods*`. Periods are sorted, deduplicated and nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "RawLinearSet")]
pub struct LinearSet {
    base: Vec<i64>,
    periods: Vec<Vec<i64>>,
}

impl LinearSet {
    pub fn new(base: Vec<i64>, periods: Vec<Vec<i64>>) -> Result<Self, SemilinearError> {
        let dim = base.len();
        for p in &periods {
            if p.len() != dim {
                return Err(SemilinearError::DimensionMismatch { expected: dim, found: p.len() });
            }
        }
        let mut periods: Vec<Vec<i64>> = periods.into_iter().filter(|p| p.iter().any(|&x| x != 0)).collect();
        periods.sort();
        periods.dedup();
        Ok(LinearSet { base, periods })
    }

    /// A single point.
    pub fn point(base: Vec<i64>) -> Self {
        LinearSet { base, periods: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }
    pub fn base(&self) -> &[i64] {
        &self.base
    }
    pub fn periods(&self) -> &[Vec<i64>] {
        &self.periods
    }

    /// `base + Σ mult[i] · periods[i]`.
    pub fn at(&self, mult: &[u64]) -> Vec<i64> {
        let mut v = self.base.clone();
        for (p, &k) in self.periods.iter().zip(mult) {
            for (x, y) in v.iter_mut().zip(p) {
                *x += k as i64 * y;
            }
        }
        v
    }

    /// Exact membership, by feasibility of `Σ x_i p_i = v - base`.
    pub fn contains(&self, v: &[i64], budget: &SolverBudget) -> Result<bool, SemilinearError> {
        check_dim(self.dim(), v.len())?;
        let rhs: Vec<i64> = v.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        if self.periods.is_empty() {
            return Ok(rhs.iter().all(|&x| x == 0));
        }
        // per coordinate: sign and divisibility
        for (i, &r) in rhs.iter().enumerate() {
            let col = self.periods.iter().map(|p| p[i]);
            let g = col.clone().fold(0i64, |g, c| g.gcd(&c));
            if (g == 0 && r != 0) || (g != 0 && r % g != 0) {
                return Ok(false);
            }
            if (r < 0 && col.clone().all(|c| c >= 0)) || (r > 0 && col.clone().all(|c| c <= 0)) {
                return Ok(false);
            }
        }
        let rows = (0..self.dim())
            .map(|i| DioRow { coeffs: self.periods.iter().map(|p| p[i]).collect(), rel: Relation::Eq, rhs: rhs[i] })
            .collect();
        let sys = DioSystem::new(self.periods.len(), rows)?;
        Ok(feasible(&sys, budget)?.is_some())
    }

    /// Sufficient test for `other ⊆ self`: the base of `other` is a member
    /// and each of its periods is a sum of periods of `self`.
    pub fn subsumes(&self, other: &LinearSet, budget: &SolverBudget) -> Result<bool, SemilinearError> {
        check_dim(self.dim(), other.dim())?;
        if !self.contains(&other.base, budget)? {
            return Ok(false);
        }
        let cone = LinearSet { base: vec![0; self.dim()], periods: self.periods.clone() };
        for p in &other.periods {
            if !self.periods.contains(p) && !cone.contains(p, budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Multiplicities `x` with `at(x) == v`, if any.
    pub fn decompose(&self, v: &[i64], budget: &SolverBudget) -> Result<Option<Vec<u64>>, SemilinearError> {
        check_dim(self.dim(), v.len())?;
        let rhs: Vec<i64> = v.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        if self.periods.is_empty() {
            return Ok(rhs.iter().all(|&x| x == 0).then(Vec::new));
        }
        let rows = (0..self.dim())
            .map(|i| DioRow { coeffs: self.periods.iter().map(|p| p[i]).collect(), rel: Relation::Eq, rhs: rhs[i] })
            .collect();
        let sys = DioSystem::new(self.periods.len(), rows)?;
        Ok(feasible(&sys, budget)?.map(|x| x.into_iter().map(|v| v as u64).collect()))
    }
}

#[derive(serde::Deserialize)]
struct RawLinearSet {
    base: Vec<i64>,
    periods: Vec<Vec<i64>>,
}

impl TryFrom<RawLinearSet> for LinearSet {
    type Error = SemilinearError;
    fn try_from(r: RawLinearSet) -> Result<Self, Self::Error> {
        LinearSet::new(r.base, r.periods)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), SemilinearError> {
    if expected == found {
        Ok(())
    } else {
        Err(SemilinearError::DimensionMismatch { expected, found })
    }
}

fn fmt_vec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for LinearSet {
    /// `lin base=(1,0,-2) periods=(1,0,0);(0,1,-1)`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.periods.iter().map(|p| fmt_vec(p)).collect();
        write!(f, "lin base={} periods={}", fmt_vec(&self.base), ps.join(";"))
    }
}

fn parse_vec(s: &str) -> Option<Vec<i64>> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|x| x.trim().parse().ok()).collect()
}

impl FromStr for LinearSet {
    type Err = SemilinearError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SemilinearError::Malformed(s.to_string());
        let rest = s.trim().strip_prefix("lin").ok_or_else(bad)?.trim_start();
        let rest = rest.strip_prefix("base=").ok_or_else(bad)?;
        let (base, rest) = rest.split_once(' ').unwrap_or((rest, ""));
        let base = parse_vec(base).ok_or_else(bad)?;
        let periods_str = rest.trim().strip_prefix("periods=").ok_or_else(bad)?;
        let mut periods = Vec::new();
        if !periods_str.is_empty() {
            for p in periods_str.split(';') {
                periods.push(parse_vec(p.trim()).ok_or_else(bad)?);
            }
        }
        LinearSet::new(base, periods)
    }
}

/// A finite union of linear sets of a common dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemilinearSet {
    dim: usize,
    components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn empty(dim: usize) -> Self {
        SemilinearSet { dim, components: Vec::new() }
    }

    pub fn new(dim: usize, components: Vec<LinearSet>) -> Result<Self, SemilinearError> {
        for c in &components {
            check_dim(dim, c.dim())?;
        }
        Ok(SemilinearSet { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn push(&mut self, l: LinearSet) -> Result<(), SemilinearError> {
        check_dim(self.dim, l.dim())?;
        if !self.components.contains(&l) {
            self.components.push(l);
        }
        Ok(())
    }

    pub fn extend(&mut self, other: SemilinearSet) -> Result<(), SemilinearError> {
        check_dim(self.dim, other.dim)?;
        for c in other.components {
            self.push(c)?;
        }
        Ok(())
    }

    /// Exact membership.
    pub fn member(&self, v: &[i64], budget: &SolverBudget) -> Result<bool, SemilinearError> {
        check_dim(self.dim, v.len())?;
        for c in &self.components {
            if c.contains(v, budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Drops components that another kept component subsumes (see
    /// [`LinearSet::subsumes`]). Each test runs under at most
    /// [`SIMPLIFY_CANDIDATES`] candidates; a test that runs out keeps the
    /// component.
    pub fn simplify(&mut self, budget: &SolverBudget) {
        let budget = &SolverBudget { max_candidates: budget.max_candidates.min(SIMPLIFY_CANDIDATES), ..*budget };
        let mut keep: Vec<LinearSet> = Vec::new();
        let mut comps = std::mem::take(&mut self.components);
        comps.sort_by_key(|c| std::cmp::Reverse(c.periods.len()));
        'outer: for c in comps {
            for k in &keep {
                if k.subsumes(&c, budget).unwrap_or(false) {
                    continue 'outer;
                }
            }
            keep.push(c);
        }
        self.components = keep;
    }
}

impl fmt::Display for SemilinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Ge,
}

/// One row `coeffs · x (= | ≥) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct DioRow {
    pub coeffs: Vec<i64>,
    pub rel: Relation,
    pub rhs: i64,
}

/// Linear equations and inequalities over nonnegative unknowns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct DioSystem {
    num_vars: usize,
    rows: Vec<DioRow>,
}

impl DioSystem {
    pub fn new(num_vars: usize, rows: Vec<DioRow>) -> Result<Self, SemilinearError> {
        for r in &rows {
            check_dim(num_vars, r.coeffs.len())?;
        }
        Ok(DioSystem { num_vars, rows })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
    pub fn rows(&self) -> &[DioRow] {
        &self.rows
    }

    /// Whether `x` satisfies every row.
    pub fn satisfied_by(&self, x: &[i64]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|&v| v >= 0)
            && self.rows.iter().all(|r| {
                let s: i64 = r.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                match r.rel {
                    Relation::Eq => s == r.rhs,
                    Relation::Ge => s >= r.rhs,
                }
            })
    }
}

impl fmt::Display for DioSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let terms: Vec<String> = r
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(j, c)| format!("{c}*x{j}"))
                .collect();
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            let op = if r.rel == Relation::Eq { "=" } else { ">=" };
            write!(f, "{lhs} {op} {}", r.rhs)?;
        }
        Ok(())
    }
}

/// Per-test candidate cap used by [`SemilinearSet::simplify`].
pub const SIMPLIFY_CANDIDATES: usize = 20_000;

/// Limits for [`solve_nonneg`]. Exceeding either aborts with
/// [`SemilinearError::BudgetExceeded`] instead of returning partial sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SolverBudget {
    /// Largest value any unknown may take in a candidate.
    pub max_magnitude: i64,
    /// Largest total number of candidates explored.
    pub max_candidates: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget { max_magnitude: 1 << 16, max_candidates: 2_000_000 }
    }
}

/// `Sol(sys) = bases + periods*` over `ℕ^num_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solutions {
    pub bases: Vec<Vec<i64>>,
    pub periods: Vec<Vec<i64>>,
}

impl Solutions {
    /// One linear set per base.
    pub fn to_semilinear(&self, dim: usize) -> SemilinearSet {
        let mut s = SemilinearSet::empty(dim);
        for b in &self.bases {
            s.push(LinearSet::new(b.clone(), self.periods.clone()).expect("uniform dimension")).expect("uniform dimension");
        }
        s
    }
}

/// The homogeneous matrix `[A | S | -rhs]` with a slack column per `≥` row.
struct Homogenized {
    cols: Vec<Vec<i64>>,
    t: usize,
    orig: usize,
}

/// Same solution set over `ℕ`, with fewer `≥` rows: each is divided by
/// the gcd of its coefficients (rounding the bound up), rows that always
/// hold are dropped, and so is every row implied by another one with
/// pointwise smaller coefficients and a larger bound.
fn presolve(sys: &DioSystem) -> DioSystem {
    let mut eqs = Vec::new();
    let mut ges: Vec<DioRow> = Vec::new();
    for r in &sys.rows {
        if r.rel == Relation::Eq {
            if !eqs.contains(r) {
                eqs.push(r.clone());
            }
            continue;
        }
        let g = r.coeffs.iter().fold(0i64, |g, &c| g.gcd(&c));
        let row = if g > 1 {
            DioRow { coeffs: r.coeffs.iter().map(|c| c / g).collect(), rel: Relation::Ge, rhs: Integer::div_ceil(&r.rhs, &g) }
        } else {
            r.clone()
        };
        if row.rhs <= 0 && row.coeffs.iter().all(|&c| c >= 0) {
            continue;
        }
        if !ges.contains(&row) {
            ges.push(row);
        }
    }
    let implies = |a: &DioRow, b: &DioRow| a.rhs >= b.rhs && a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| x <= y);
    let kept: Vec<DioRow> = ges
        .iter()
        .enumerate()
        .filter(|&(j, b)| !ges.iter().enumerate().any(|(i, a)| i != j && implies(a, b) && (!implies(b, a) || i < j)))
        .map(|(_, b)| b.clone())
        .collect();
    eqs.extend(kept);
    DioSystem { num_vars: sys.num_vars, rows: eqs }
}

fn homogenize(sys: &DioSystem) -> Homogenized {
    let rows = sys.rows.len();
    let mut cols: Vec<Vec<i64>> = (0..sys.num_vars).map(|j| sys.rows.iter().map(|r| r.coeffs[j]).collect()).collect();
    for (i, r) in sys.rows.iter().enumerate() {
        if r.rel == Relation::Ge {
            let mut c = vec![0; rows];
            c[i] = -1;
            cols.push(c);
        }
    }
    let t = cols.len();
    cols.push(sys.rows.iter().map(|r| -r.rhs).collect());
    Homogenized { cols, t, orig: sys.num_vars }
}

fn dominated(v: &[i64], by: &[Vec<i64>]) -> bool {
    by.iter().any(|m| m.iter().zip(v).all(|(a, b)| a <= b))
}

/// Contejean–Devie completion with `t ≤ 1`. With `stop_at_base` the search
/// returns as soon as one solution with `t = 1` is found.
fn completion(
    h: &Homogenized,
    budget: &SolverBudget,
    stop_at_base: bool,
) -> Result<Vec<Vec<i64>>, SemilinearError> {
    let n = h.cols.len();
    let rows = h.cols.first().map_or(0, Vec::len);
    let mut minimal: Vec<Vec<i64>> = Vec::new();
    // frontier entries carry the vector and its image A·y
    let mut frontier: Vec<(Vec<i64>, Vec<i64>)> = (0..n)
        .map(|j| {
            let mut y = vec![0; n];
            y[j] = 1;
            (y, h.cols[j].clone())
        })
        .collect();
    let mut explored = 0usize;
    while !frontier.is_empty() {
        let mut rest = Vec::new();
        for (y, ay) in frontier {
            if ay.iter().all(|&x| x == 0) {
                if !dominated(&y, &minimal) {
                    let is_base = y[h.t] == 1;
                    minimal.push(y);
                    if stop_at_base && is_base {
                        return Ok(minimal);
                    }
                }
            } else {
                rest.push((y, ay));
            }
        }
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut next = Vec::new();
        for (y, ay) in rest {
            for j in 0..n {
                if j == h.t && y[h.t] >= 1 {
                    continue;
                }
                let dot: i64 = (0..rows).map(|r| ay[r] * h.cols[j][r]).sum();
                if dot >= 0 {
                    continue;
                }
                let mut z = y.clone();
                z[j] += 1;
                if z[j] > budget.max_magnitude {
                    return Err(SemilinearError::BudgetExceeded(format!(
                        "a candidate exceeds the magnitude cap {}",
                        budget.max_magnitude
                    )));
                }
                if dominated(&z, &minimal) || seen.contains(&z) {
                    continue;
                }
                explored += 1;
                if explored > budget.max_candidates {
                    return Err(SemilinearError::BudgetExceeded(format!(
                        "more than {} candidates explored",
                        budget.max_candidates
                    )));
                }
                let az: Vec<i64> = (0..rows).map(|r| ay[r] + h.cols[j][r]).collect();
                seen.insert(z.clone());
                next.push((z, az));
            }
        }
        frontier = next;
    }
    Ok(minimal)
}

/// Exact solution set of `sys` over the nonnegative integers.
///
/// Bases are the pointwise-minimal solutions, periods the minimal nonzero
/// solutions of the homogeneous system (slack variables of `≥` rows are
/// projected out, so after projection bases need not be pairwise incomparable).
pub fn solve_nonneg(sys: &DioSystem, budget: &SolverBudget) -> Result<Solutions, SemilinearError> {
    let h = homogenize(&presolve(sys));
    let minimal = completion(&h, budget, false)?;
    let mut bases = Vec::new();
    let mut periods = Vec::new();
    for y in minimal {
        let x = y[..h.orig].to_vec();
        if y[h.t] == 1 {
            bases.push(x);
        } else if x.iter().any(|&v| v != 0) {
            periods.push(x);
        }
    }
    bases.sort();
    bases.dedup();
    periods.sort();
    periods.dedup();
    Ok(Solutions { bases, periods })
}

/// Some solution of `sys`, or `None` if there is none.
pub fn feasible(sys: &DioSystem, budget: &SolverBudget) -> Result<Option<Vec<i64>>, SemilinearError> {
    if sys.rows.iter().all(|r| r.rhs == 0) && sys.rows.iter().all(|r| r.rel == Relation::Eq || r.rhs <= 0) {
        return Ok(Some(vec![0; sys.num_vars]));
    }
    let h = homogenize(&presolve(sys));
    let minimal = completion(&h, budget, true)?;
    Ok(minimal.into_iter().find(|y| y[h.t] == 1).map(|y| y[..h.orig].to_vec()))
}

/// `{M·x + c : x ∈ s}`, computed on bases and periods.
pub fn affine_image(s: &SemilinearSet, m: &[Vec<i64>], c: &[i64]) -> Result<SemilinearSet, SemilinearError> {
    check_dim(m.len(), c.len())?;
    for row in m {
        check_dim(s.dim, row.len())?;
    }
    let apply = |v: &[i64], offset: bool| -> Vec<i64> {
        m.iter()
            .enumerate()
            .map(|(i, row)| row.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() + if offset { c[i] } else { 0 })
            .collect()
    };
    let mut out = SemilinearSet::empty(c.len());
    for comp in &s.components {
        let base = apply(&comp.base, true);
        let periods = comp.periods.iter().map(|p| apply(p, false)).collect();
        out.push(LinearSet::new(base, periods)?)?;
    }
    Ok(out)
}

fn gcd_all(xs: impl Iterator<Item = i64>) -> i64 {
    xs.fold(0i64, |g, x| g.gcd(&x))
}

/// Whether a linear set `L ⊆ ℕ² × ℤ` contains an `n`-witness (a point with
/// the first two coordinates at least `n` and the third divisible by `n`) for
/// every `n > 0`.
///
/// This holds iff some period is positive on coordinate 1, some period is
/// positive on coordinate 2, and the gcd of the periods' third coordinates
/// divides the base's third coordinate (gcd of nothing is 0, and 0 divides
/// only 0).
pub fn linear_witness_check(l: &LinearSet) -> Result<bool, SemilinearError> {
    check_dim(3, l.dim())?;
    let grows1 = l.periods.iter().any(|p| p[0] > 0);
    let grows2 = l.periods.iter().any(|p| p[1] > 0);
    let g = gcd_all(l.periods.iter().map(|p| p[2]));
    let b3 = l.base[2];
    let divides = if g == 0 { b3 == 0 } else { b3 % g == 0 };
    Ok(grows1 && grows2 && divides)
}

/// Index of the first component passing [`linear_witness_check`].
pub fn semilinear_witness_check(s: &SemilinearSet) -> Result<Option<usize>, SemilinearError> {
    check_dim(3, s.dim)?;
    for (i, c) in s.components.iter().enumerate() {
        if linear_witness_check(c)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// An explicit `n`-witness in `l`, assuming [`linear_witness_check`] holds.
///
/// Writes the base's third coordinate as an integer combination of the
/// periods' third coordinates, shifts every coefficient into the nonnegative
/// range modulo `n`, then adds `n` copies of growing periods until both
/// leading coordinates reach `n`.
pub fn n_witness(l: &LinearSet, n: u64) -> Option<(Vec<i64>, Vec<u64>)> {
    if n == 0 || l.dim() != 3 || !linear_witness_check(l).ok()? {
        return None;
    }
    let ni = n as i64;
    // acc · thirds ≡ g (mod n), where g is the gcd of the thirds folded so far
    let mut acc = vec![0i64; l.periods.len()];
    let mut g = 0i64;
    for (i, p) in l.periods.iter().enumerate() {
        let e = g.extended_gcd(&p[2]);
        for a in acc.iter_mut() {
            *a = (*a * e.x).rem_euclid(ni);
        }
        acc[i] = e.y.rem_euclid(ni);
        g = e.gcd;
    }
    let target = -l.base[2];
    let f = if g == 0 { 0 } else { (target / g).rem_euclid(ni) };
    let mut mult: Vec<u64> = acc.iter().map(|&a| (a * f).rem_euclid(ni) as u64).collect();
    let i1 = l.periods.iter().position(|p| p[0] > 0)?;
    let i2 = l.periods.iter().position(|p| p[1] > 0)?;
    for _ in 0..10_000 {
        let v = l.at(&mult);
        if v[0] >= ni && v[1] >= ni {
            debug_assert_eq!(v[2].rem_euclid(ni), 0);
            return Some((v, mult));
        }
        if v[0] < ni {
            mult[i1] += n;
        }
        if v[1] < ni {
            mult[i2] += n;
        }
    }
    None
}

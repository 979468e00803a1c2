//! Neighbour-denseness, mostly-denseness and clique-denseness checkers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::graph::{common_neighbourhood, Graph, Partition};
use crate::set::VertexSet;

/// Default number of subsets an exhaustive check may visit.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Largest graph accepted by the exhaustive `W` mode.
pub const EXHAUSTIVE_W_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensenessParams {
    pub k: usize,
    pub t: f64,
    pub r: f64,
    /// Radius of the mostly-dense check, `t * r`.
    pub r_prime: f64,
    pub s: f64,
    pub epsilon: f64,
    pub q: f64,
    pub q_prime: f64,
    pub xi: Option<f64>,
    pub delta: Option<f64>,
}

/// `q' = ε r s^(1+ε) ln s`.
pub fn q_prime(epsilon: f64, r: f64, s: f64) -> f64 {
    epsilon * r * libm::pow(s, 1.0 + epsilon) * libm::log(s)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Parameters of the random-graph lower bound for given `n, k, ξ, ε`.
pub fn derive_parameters(n: usize, k: usize, xi: f64, epsilon: f64) -> Result<DensenessParams> {
    if k < 2 || n < 2 {
        return Err(Error::InvalidParameter("need n >= 2 and k >= 2".into()));
    }
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1/4), got {epsilon}")));
    }
    positive("xi", xi)?;
    let kf = k as f64;
    let t = 32.0 * xi / epsilon;
    let s = libm::sqrt(n as f64);
    let delta = 2.0 * xi / (kf - 1.0);
    let r = 4.0 * kf / (t * t);
    let q = libm::pow(n as f64, 1.0 - t * delta * r) / (4.0 * kf * t);
    Ok(DensenessParams {
        k,
        t,
        r,
        r_prime: t * r,
        s,
        epsilon,
        q,
        q_prime: q_prime(epsilon, r, s),
        xi: Some(xi),
        delta: Some(delta),
    })
}

impl DensenessParams {
    /// User-chosen `t, r, q, s, ε`; `r'` and `q'` follow from them.
    pub fn custom(k: usize, t: f64, r: f64, q: f64, s: f64, epsilon: f64) -> Result<Self> {
        positive("t", t)?;
        positive("s", s)?;
        if !(r >= 0.0 && r.is_finite()) || !q.is_finite() {
            return Err(Error::InvalidParameter("r must be non-negative and q finite".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(DensenessParams { k, t, r, r_prime: t * r, s, epsilon, q, q_prime: q_prime(epsilon, r, s), xi: None, delta: None })
    }

    /// Which of the documented side conditions fail (`t ∈ [1,k]`, `r >= 4k/t²`,
    /// positive `q` and `q'`). At small `n` some of them cannot all hold.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let kf = self.k as f64;
        if !(1.0..=kf).contains(&self.t) {
            out.push(format!("t = {} outside [1, {}]", self.t, self.k));
        }
        if self.r < 4.0 * kf / (self.t * self.t) * (1.0 - 1e-12) {
            out.push(format!("r = {} below 4k/t^2 = {}", self.r, 4.0 * kf / (self.t * self.t)));
        }
        if !(self.q > 0.0) {
            out.push(format!("q = {} not positive", self.q));
        }
        if !(self.q_prime > 0.0) {
            out.push(format!("q' = {} not positive", self.q_prime));
        }
        out
    }
}

/// Calls `f` on every subset of `items` with at most `max` elements, smallest
/// sets first and lexicographically within a size. Counts visits against `budget`.
pub fn for_each_subset_upto<F>(items: &[usize], max: usize, budget: u64, mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let mut used = 0u64;
    let max = max.min(items.len());
    let mut idx: Vec<usize> = Vec::with_capacity(max);
    let mut cur: Vec<usize> = Vec::with_capacity(max);
    for size in 0..=max {
        idx.clear();
        idx.extend(0..size);
        loop {
            used += 1;
            if used > budget {
                return Err(Error::BudgetExhausted(budget));
            }
            cur.clear();
            cur.extend(idx.iter().map(|&i| items[i]));
            if f(&cur).is_break() {
                return Ok(());
            }
            // Next combination of `size` indices out of items.len().
            let m = items.len();
            let Some(p) = (0..size).rev().find(|&p| idx[p] < m - size + p) else { break };
            idx[p] += 1;
            for j in p + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(())
}

fn radius(r: f64) -> usize {
    if r <= 0.0 {
        0
    } else {
        libm::floor(r + 1e-9) as usize
    }
}

pub fn is_neighbour_dense_for(g: &Graph, w: &VertexSet, r_set: &[usize], q: f64) -> bool {
    common_neighbourhood(g, r_set, w).len() as f64 >= q
}

/// Outcome of a denseness check with the first violating set, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub counterexample: Option<Vec<usize>>,
}

impl Verdict {
    fn from_counterexample(c: Option<Vec<usize>>) -> Self {
        Verdict { holds: c.is_none(), counterexample: c }
    }
}

/// Is `W` `(r, q)`-neighbour-dense? The smallest violating `R` is returned.
pub fn is_r_q_dense(g: &Graph, w: &VertexSet, r: f64, q: f64, budget: u64) -> Result<Verdict> {
    if q <= 0.0 {
        return Ok(Verdict { holds: true, counterexample: None });
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let mut bad = None;
    for_each_subset_upto(&all, radius(r), budget, |rs| {
        if is_neighbour_dense_for(g, w, rs, q) {
            ControlFlow::Continue(())
        } else {
            bad = Some(rs.to_vec());
            ControlFlow::Break(())
        }
    })?;
    Ok(Verdict::from_counterexample(bad))
}

/// Every `R` with `|R| <= r'` and `|N̂(R, W)| < q'` meets `S` in at least `r` vertices?
pub fn check_mostly_dense(
    g: &Graph,
    w: &VertexSet,
    s_set: &VertexSet,
    r_prime: f64,
    r: f64,
    q_prime: f64,
    budget: u64,
) -> Result<Verdict> {
    let all: Vec<usize> = (0..g.n()).collect();
    let mut bad = None;
    for_each_subset_upto(&all, radius(r_prime), budget, |rs| {
        let sparse = (common_neighbourhood(g, rs, w).len() as f64) < q_prime;
        let hit = rs.iter().filter(|&&v| s_set.contains(v)).count() as f64;
        if sparse && hit < r {
            bad = Some(rs.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(Verdict::from_counterexample(bad))
}

/// Union of a maximal `r`-disjoint tuple of sparse sets, built greedily in
/// size-lexicographic order. Sets already covered by the union are skipped.
pub fn greedy_witness(g: &Graph, w: &VertexSet, r_prime: f64, r: f64, q_prime: f64, budget: u64) -> Result<VertexSet> {
    let all: Vec<usize> = (0..g.n()).collect();
    let mut union = VertexSet::new(g.n());
    for_each_subset_upto(&all, radius(r_prime), budget, |rs| {
        let inside = rs.iter().filter(|&&v| union.contains(v)).count();
        if inside < rs.len()
            && inside as f64 <= r
            && common_neighbourhood(g, rs, w).len() as f64 <= q_prime
        {
            for &v in rs {
                union.insert(v);
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(union)
}

/// The sets `R` a mostly-dense check of `W` cares about, precomputed once per graph.
struct SmallSets {
    sets: Vec<(VertexSet, VertexSet)>,
}

impl SmallSets {
    fn new(g: &Graph, max: usize, budget: u64) -> Result<Self> {
        let all: Vec<usize> = (0..g.n()).collect();
        let full = g.vertex_set();
        let mut sets = Vec::new();
        for_each_subset_upto(&all, max, budget, |rs| {
            sets.push((VertexSet::from_iter(g.n(), rs.iter().copied()), common_neighbourhood(g, rs, &full)));
            ControlFlow::Continue(())
        })?;
        Ok(SmallSets { sets })
    }

    /// Sets `R` with `|N̂(R, W)| < q'`.
    fn sparse(&self, w: &VertexSet, q_prime: f64) -> Vec<&VertexSet> {
        self.sets
            .iter()
            .filter(|(_, nb)| (nb.intersection_len(w) as f64) < q_prime)
            .map(|(r, _)| r)
            .collect()
    }
}

fn witnesses(sparse: &[&VertexSet], s: &VertexSet, r: f64) -> bool {
    sparse.iter().all(|rs| rs.intersection_len(s) as f64 >= r)
}

/// Which candidate sets `W` property 2 ranges over.
#[derive(Clone, Debug)]
pub enum WMode {
    Exhaustive,
    Candidates(Vec<VertexSet>),
}

#[derive(Clone, Debug)]
pub struct WFailure {
    pub w: VertexSet,
    /// The greedy union, which was too large or did not verify.
    pub greedy: VertexSet,
}

#[derive(Clone, Debug)]
pub struct DensenessReport {
    pub params: DensenessParams,
    pub parameter_violations: Vec<String>,
    /// Per block: is `V_i` `(tr, tq)`-neighbour-dense?
    pub blocks: Vec<Verdict>,
    pub property1: bool,
    pub w_checked: usize,
    pub w_dense: usize,
    /// Dense sets `W` for which some `S` with `|S| <= s` was found.
    pub w_witnessed: usize,
    pub failures: Vec<WFailure>,
    pub property2: bool,
}

impl DensenessReport {
    pub fn clique_dense(&self) -> bool {
        self.property1 && self.property2
    }
}

/// Checks both parts of clique-denseness for `(G, part)`.
pub fn is_clique_dense(
    g: &Graph,
    part: &Partition,
    params: &DensenessParams,
    mode: &WMode,
    budget: u64,
) -> Result<DensenessReport> {
    let n = g.n();
    let (t, r) = (params.t, params.r);
    let blocks = (0..part.k())
        .map(|i| is_r_q_dense(g, part.block_set(i), t * r, t * params.q, budget))
        .collect::<Result<Vec<_>>>()?;
    let property1 = blocks.iter().all(|v| v.holds);

    let candidates: Vec<VertexSet> = match mode {
        WMode::Candidates(ws) => ws.clone(),
        WMode::Exhaustive => {
            if n > EXHAUSTIVE_W_LIMIT {
                return Err(Error::TooLarge(format!("exhaustive W mode limited to n <= {EXHAUSTIVE_W_LIMIT}")));
            }
            (0u32..1 << n).map(|m| VertexSet::from_iter(n, (0..n).filter(|&v| m >> v & 1 == 1))).collect()
        }
    };
    let small = SmallSets::new(g, radius(params.r_prime), budget)?;
    let all: Vec<usize> = (0..n).collect();
    let s_max = radius(params.s);
    let mut report = DensenessReport {
        params: *params,
        parameter_violations: params.invariant_violations(),
        blocks,
        property1,
        w_checked: candidates.len(),
        w_dense: 0,
        w_witnessed: 0,
        failures: Vec::new(),
        property2: true,
    };
    for w in candidates {
        if !is_r_q_dense(g, &w, r, params.q, budget)?.holds {
            continue;
        }
        report.w_dense += 1;
        let sparse = small.sparse(&w, params.q_prime);
        let greedy = greedy_witness(g, &w, params.r_prime, r, params.q_prime, budget)?;
        let mut found = greedy.len() <= s_max && witnesses(&sparse, &greedy, r);
        if !found {
            for_each_subset_upto(&all, s_max, budget, |ss| {
                found = witnesses(&sparse, &VertexSet::from_iter(n, ss.iter().copied()), r);
                if found {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
        }
        if found {
            report.w_witnessed += 1;
        } else {
            report.property2 = false;
            report.failures.push(WFailure { w, greedy });
        }
    }
    Ok(report)
}

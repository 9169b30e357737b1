//! TSP oracle over arbitrary (possibly asymmetric) real cost matrices.
//!
//! Two solvers sit behind one contract, "give me a depot-rooted circuit of
//! low cost":
//!
//! * [`solve_exact`] runs Held-Karp dynamic programming and is limited to
//!   small instances ([`DEFAULT_EXACT_CAP`] nodes by default).
//! * [`solve_anytime`] builds a nearest-neighbour tour and improves it with
//!   or-opt and direction-aware 2-opt, then keeps kicking the incumbent
//!   (double bridge) or restarting from random tours until the budget runs
//!   out. The incumbent only ever improves.
//!
//! [`TspOracle`] dispatches between the two by instance size.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::Tour;
use crate::{Error, Matrix, Result};

/// Largest instance [`solve_exact`] accepts unless told otherwise.
pub const DEFAULT_EXACT_CAP: usize = 13;

/// A validated cost matrix: square, all off-diagonal entries finite.
/// The diagonal is ignored by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix(Matrix);

impl CostMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        for i in 0..m.n() {
            for j in 0..m.n() {
                if i != j && !m.get(i, j).is_finite() {
                    return Err(Error::InvalidInput(alloc::format!(
                        "cost[{i}][{j}] = {} is not finite",
                        m.get(i, j)
                    )));
                }
            }
        }
        Ok(CostMatrix(m))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_abs(&self) -> f64 {
        let n = self.n();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    best = best.max(self.get(i, j).abs());
                }
            }
        }
        best
    }
}

/// Monotonic seconds since an arbitrary origin. The core crate has no clock of
/// its own; `std` users plug one in.
pub trait Stopwatch: Send + Sync {
    fn now_secs(&self) -> f64;
}

/// Wall-clock limit for one solver call.
#[derive(Clone)]
pub struct TimeLimit {
    pub seconds: f64,
    pub clock: Arc<dyn Stopwatch>,
}

impl fmt::Debug for TimeLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeLimit").field("seconds", &self.seconds).finish_non_exhaustive()
    }
}

/// How long [`solve_anytime`] may search.
///
/// The iteration cap always applies. Results are reproducible for a fixed
/// `(matrix, seed, iteration_cap)` as long as no time limit is set.
#[derive(Debug, Clone)]
pub struct SolveBudget {
    pub seed: u64,
    /// Number of local-search descents (the first one starts from the
    /// nearest-neighbour tour).
    pub iteration_cap: u64,
    pub time_limit: Option<TimeLimit>,
}

impl SolveBudget {
    pub fn iterations(seed: u64, iteration_cap: u64) -> Self {
        SolveBudget {
            seed,
            iteration_cap,
            time_limit: None,
        }
    }

    pub fn with_time_limit(mut self, seconds: f64, clock: Arc<dyn Stopwatch>) -> Self {
        self.time_limit = Some(TimeLimit { seconds, clock });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iteration_cap == 0 {
            return Err(Error::invalid("iteration cap must be at least 1"));
        }
        if let Some(tl) = &self.time_limit {
            if !(tl.seconds > 0.0) {
                return Err(Error::invalid("time limit must be positive"));
            }
        }
        Ok(())
    }
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget::iterations(0, 64)
    }
}

/// Sum of the arc costs of `t`, closing arc included. Self-loops cost nothing.
pub fn tour_cost(c: &CostMatrix, t: &Tour) -> Result<f64> {
    if t.len() != c.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            got: t.len(),
        });
    }
    Ok(order_cost(c, t.order()))
}

fn order_cost(c: &CostMatrix, order: &[usize]) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 0..n {
        total += c.get(order[k], order[(k + 1) % n]);
    }
    total
}

/// Provably optimal circuit by Held-Karp, for `n <= DEFAULT_EXACT_CAP`.
pub fn solve_exact(c: &CostMatrix) -> Result<Tour> {
    solve_exact_with_cap(c, DEFAULT_EXACT_CAP)
}

/// Held-Karp with an explicit size cap. Memory is `2^(n-1) * n` entries.
///
/// Among circuits of equal cost the lexicographically smallest order vector
/// is returned.
pub fn solve_exact_with_cap(c: &CostMatrix, cap: usize) -> Result<Tour> {
    let n = c.n();
    if n > cap {
        return Err(Error::SizeExceeded { n, cap });
    }
    match n {
        0 => return Err(Error::invalid("empty cost matrix")),
        1 => return Ok(Tour::new_unchecked(vec![0], 0.0)),
        _ => {}
    }

    // rest[mask * n + j]: cheapest path that starts at j, visits every node of
    // `mask` (bit k-1 stands for node k) and ends at the depot. `next` holds
    // the first node after j on that path. Nodes are tried in ascending order
    // with a strict comparison, so ties resolve to the smallest successor.
    let full = (1usize << (n - 1)) - 1;
    let mut rest = vec![f64::INFINITY; (full + 1) * n];
    let mut next = vec![0u8; (full + 1) * n];
    for j in 1..n {
        rest[j] = c.get(j, 0);
    }
    for mask in 1..=full {
        for j in 1..n {
            if mask & (1 << (j - 1)) != 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut arg = 0u8;
            for k in 1..n {
                let bit = 1 << (k - 1);
                if mask & bit == 0 {
                    continue;
                }
                let v = c.get(j, k) + rest[(mask ^ bit) * n + k];
                if v < best {
                    best = v;
                    arg = k as u8;
                }
            }
            rest[mask * n + j] = best;
            next[mask * n + j] = arg;
        }
    }

    let mut best = f64::INFINITY;
    let mut first = 0;
    for k in 1..n {
        let v = c.get(0, k) + rest[(full ^ (1 << (k - 1))) * n + k];
        if v < best {
            best = v;
            first = k;
        }
    }

    let mut order = Vec::with_capacity(n);
    order.push(0);
    let mut cur = first;
    let mut mask = full ^ (1 << (first - 1));
    order.push(cur);
    while mask != 0 {
        let k = next[mask * n + cur] as usize;
        order.push(k);
        mask ^= 1 << (k - 1);
        cur = k;
    }
    Ok(Tour::new_unchecked(order, best))
}

/// Anytime heuristic. See the module docs for the search scheme.
pub fn solve_anytime(c: &CostMatrix, budget: &SolveBudget) -> Result<Tour> {
    solve_anytime_with(c, budget, |_| {})
}

/// [`solve_anytime`] that reports every new incumbent cost to `on_improve`.
/// Reported costs are strictly decreasing.
pub fn solve_anytime_with(c: &CostMatrix, budget: &SolveBudget, mut on_improve: impl FnMut(f64)) -> Result<Tour> {
    budget.validate()?;
    let n = c.n();
    match n {
        0 => return Err(Error::invalid("empty cost matrix")),
        1 => {
            on_improve(0.0);
            return Ok(Tour::new_unchecked(vec![0], 0.0));
        }
        2 => {
            let cost = c.get(0, 1) + c.get(1, 0);
            on_improve(cost);
            return Ok(Tour::new_unchecked(vec![0, 1], cost));
        }
        _ => {}
    }

    let started = budget.time_limit.as_ref().map(|tl| tl.clock.now_secs());
    let out_of_time = || match (&budget.time_limit, started) {
        (Some(tl), Some(t0)) => tl.clock.now_secs() - t0 >= tl.seconds,
        _ => false,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut ls = LocalSearch::new(c);

    let mut best = nearest_neighbor(c);
    let mut best_cost = ls.run(&mut best);
    on_improve(best_cost);

    let mut scratch = best.clone();
    for iter in 1..budget.iteration_cap {
        if out_of_time() {
            break;
        }
        scratch.clear();
        scratch.extend_from_slice(&best);
        if iter % RESTART_EVERY == 0 || n < 8 {
            scratch[1..].shuffle(&mut rng);
        } else {
            double_bridge(&mut scratch, &mut rng);
        }
        let cost = ls.run(&mut scratch);
        if cost < best_cost - improvement_tol(best_cost) {
            best_cost = cost;
            core::mem::swap(&mut best, &mut scratch);
            on_improve(best_cost);
        }
    }
    let cost = order_cost(c, &best);
    Ok(Tour::new_unchecked(best, cost))
}

/// Every this many iterations the search restarts from a random tour instead
/// of kicking the incumbent.
const RESTART_EVERY: u64 = 8;

#[inline]
fn improvement_tol(reference: f64) -> f64 {
    1e-12 * (1.0 + reference.abs())
}

/// Greedy tour from the depot; ties go to the smaller index.
pub fn nearest_neighbor(c: &CostMatrix) -> Vec<usize> {
    let n = c.n();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = 0;
    visited[0] = true;
    order.push(0);
    for _ in 1..n {
        let mut best = f64::INFINITY;
        let mut arg = usize::MAX;
        for j in 0..n {
            if !visited[j] && c.get(cur, j) < best {
                best = c.get(cur, j);
                arg = j;
            }
        }
        visited[arg] = true;
        order.push(arg);
        cur = arg;
    }
    order
}

/// Cost of the nearest-neighbour tour; an upper bound on the anytime result.
pub fn nearest_neighbor_cost(c: &CostMatrix) -> f64 {
    order_cost(c, &nearest_neighbor(c))
}

/// Cut positions 1..n into four segments A B C D and reorder them A C B D.
/// Segment directions are kept, which matters for asymmetric costs.
fn double_bridge(order: &mut Vec<usize>, rng: &mut ChaCha8Rng) {
    let n = order.len();
    let mut cuts = [rng.gen_range(2..n), rng.gen_range(2..n), rng.gen_range(2..n)];
    cuts.sort_unstable();
    let [p, q, r] = cuts;
    if p == q || q == r {
        // degenerate cut, fall back to swapping two nodes
        let a = rng.gen_range(1..n);
        let b = rng.gen_range(1..n);
        order.swap(a, b);
        return;
    }
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&order[..p]);
    out.extend_from_slice(&order[q..r]);
    out.extend_from_slice(&order[p..q]);
    out.extend_from_slice(&order[r..]);
    *order = out;
}

/// First-improvement descent over or-opt and 2-opt moves. Position 0 holds
/// the depot and never moves.
struct LocalSearch<'a> {
    c: &'a CostMatrix,
    /// fwd[k]: cost of the path order[0..=k] walked forwards.
    fwd: Vec<f64>,
    /// bwd[k]: cost of the path order[0..=k] walked backwards.
    bwd: Vec<f64>,
    buf: Vec<usize>,
}

impl<'a> LocalSearch<'a> {
    fn new(c: &'a CostMatrix) -> Self {
        LocalSearch {
            c,
            fwd: vec![0.0; c.n()],
            bwd: vec![0.0; c.n()],
            buf: Vec::with_capacity(c.n()),
        }
    }

    fn run(&mut self, order: &mut Vec<usize>) -> f64 {
        let mut cost = order_cost(self.c, order);
        loop {
            let tol = improvement_tol(cost);
            let gain = self
                .two_opt(order, tol)
                .or_else(|| self.or_opt(order, tol))
                .or_else(|| self.reverse_all(order, tol));
            match gain {
                Some(_) => cost = order_cost(self.c, order),
                None => return cost,
            }
        }
    }

    fn prefix_sums(&mut self, order: &[usize]) {
        let c = self.c;
        self.fwd[0] = 0.0;
        self.bwd[0] = 0.0;
        for k in 1..order.len() {
            self.fwd[k] = self.fwd[k - 1] + c.get(order[k - 1], order[k]);
            self.bwd[k] = self.bwd[k - 1] + c.get(order[k], order[k - 1]);
        }
    }

    /// Reverse order[i..=j]. Internal arcs flip direction, so their cost is
    /// re-read from the backward prefix sums.
    fn two_opt(&mut self, order: &mut [usize], tol: f64) -> Option<f64> {
        let n = order.len();
        let c = self.c;
        self.prefix_sums(order);
        for i in 1..n - 1 {
            let prev = order[i - 1];
            let first = order[i];
            for j in i + 1..n {
                let last = order[j];
                let after = order[(j + 1) % n];
                let old = c.get(prev, first) + (self.fwd[j] - self.fwd[i]) + c.get(last, after);
                let new = c.get(prev, last) + (self.bwd[j] - self.bwd[i]) + c.get(first, after);
                if new < old - tol {
                    order[i..=j].reverse();
                    return Some(old - new);
                }
            }
        }
        None
    }

    /// Move a segment of 1 to 3 nodes to another gap, keeping its direction.
    fn or_opt(&mut self, order: &mut Vec<usize>, tol: f64) -> Option<f64> {
        let n = order.len();
        let c = self.c;
        for len in 1..=3usize {
            if len + 1 >= n {
                break;
            }
            for i in 1..=n - len {
                let a = order[i - 1];
                let s0 = order[i];
                let s1 = order[i + len - 1];
                let b = order[(i + len) % n];
                let removal = c.get(a, s0) + c.get(s1, b) - c.get(a, b);
                // insert between order[p] and order[p + 1]
                for p in 0..n {
                    if p + 1 >= i && p < i + len {
                        continue;
                    }
                    let x = order[p];
                    let y = order[(p + 1) % n];
                    let insertion = c.get(x, s0) + c.get(s1, y) - c.get(x, y);
                    if insertion < removal - tol {
                        self.relocate(order, i, len, p);
                        return Some(removal - insertion);
                    }
                }
            }
        }
        None
    }

    fn relocate(&mut self, order: &mut Vec<usize>, i: usize, len: usize, p: usize) {
        self.buf.clear();
        let seg = &order[i..i + len];
        for (k, &v) in order.iter().enumerate() {
            if k >= i && k < i + len {
                continue;
            }
            self.buf.push(v);
            if k == p {
                self.buf.extend_from_slice(seg);
            }
        }
        order.clear();
        order.extend_from_slice(&self.buf);
    }

    /// Walk the whole circuit the other way round.
    fn reverse_all(&mut self, order: &mut [usize], tol: f64) -> Option<f64> {
        let n = order.len();
        let c = self.c;
        let mut fwd = 0.0;
        let mut bwd = 0.0;
        for k in 0..n {
            let (u, v) = (order[k], order[(k + 1) % n]);
            fwd += c.get(u, v);
            bwd += c.get(v, u);
        }
        if bwd < fwd - tol {
            order[1..].reverse();
            Some(fwd - bwd)
        } else {
            None
        }
    }
}

/// Anything that turns a cost matrix into a tour.
pub trait TourSolver {
    fn solve(&self, c: &CostMatrix) -> Result<Tour>;
}

/// Exact up to `exact_cap` nodes, anytime above.
#[derive(Debug, Clone)]
pub struct TspOracle {
    pub exact_cap: usize,
    pub budget: SolveBudget,
}

impl TspOracle {
    pub fn new(budget: SolveBudget) -> Self {
        TspOracle {
            exact_cap: DEFAULT_EXACT_CAP,
            budget,
        }
    }

    pub fn anytime_only(budget: SolveBudget) -> Self {
        TspOracle { exact_cap: 0, budget }
    }

    pub fn with_exact_cap(mut self, exact_cap: usize) -> Self {
        self.exact_cap = exact_cap;
        self
    }
}

impl Default for TspOracle {
    fn default() -> Self {
        TspOracle::new(SolveBudget::default())
    }
}

impl TourSolver for TspOracle {
    fn solve(&self, c: &CostMatrix) -> Result<Tour> {
        if c.n() <= self.exact_cap {
            solve_exact_with_cap(c, self.exact_cap)
        } else {
            solve_anytime(c, &self.budget)
        }
    }
}

impl<T: TourSolver + ?Sized> TourSolver for &T {
    fn solve(&self, c: &CostMatrix) -> Result<Tour> {
        (**self).solve(c)
    }
}

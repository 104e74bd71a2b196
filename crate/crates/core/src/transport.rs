//! Exact Wasserstein-1 distances between finite point-mass measures.
//!
//! The 1-D case integrates the CDF difference. Higher dimensions solve the
//! uncapacitated transportation problem with a primal network simplex. The
//! simplex runs on a sparse arc set, seeded with each source's nearest sinks;
//! a full pricing pass over all source-sink pairs then adds the arcs that
//! still have negative reduced cost, until none remain. The result is the
//! optimum of the complete bipartite problem. Masses and costs are scaled to
//! integers so pivoting is exact.

use crate::error::{Error, Result};
use rayon::prelude::*;

const NONE: usize = usize::MAX;
const FLOW_SCALE: f64 = (1u64 << 50) as f64;
const COST_SCALE: f64 = (1u64 << 40) as f64;
/// Nearest sinks per source in the initial arc set.
const SEED_NEIGHBOURS: usize = 8;
/// Most negative arcs per source added by one pricing pass.
const ADD_PER_SOURCE: usize = 4;

/// True when the pair should be swapped so that both argument orders solve
/// the same problem bit for bit.
fn swap_first(xs: &[f64], wx: &[f64], ys: &[f64], wy: &[f64]) -> bool {
    let key = |p: &[f64], w: &[f64]| (w.len(), p.iter().chain(w).map(|v| v.to_bits()).collect::<Vec<u64>>());
    key(xs, wx) > key(ys, wy)
}

/// 1-D Wasserstein-1 distance, the L1 distance between the two CDFs.
pub fn w1_line(xs: &[f64], wx: &[f64], ys: &[f64], wy: &[f64]) -> f64 {
    if swap_first(xs, wx, ys, wy) {
        return w1_line(ys, wy, xs, wx);
    }
    let mut events: Vec<(f64, f64)> = xs.iter().zip(wx).map(|(p, w)| (*p, *w)).collect();
    events.extend(ys.iter().zip(wy).map(|(p, w)| (*p, -*w)));
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cdf = 0.0;
    let mut total = 0.0;
    for pair in events.windows(2) {
        cdf += pair[0].1;
        total += cdf.abs() * (pair[1].0 - pair[0].0);
    }
    total
}

/// Integer masses summing exactly to `FLOW_SCALE`; the rounding residual
/// goes to the heaviest atom.
fn scaled_masses(w: &[f64]) -> Vec<i64> {
    let total: f64 = w.iter().sum();
    let mut out: Vec<i64> = w.iter().map(|v| (v / total * FLOW_SCALE).round() as i64).collect();
    let resid = FLOW_SCALE as i64 - out.iter().sum::<i64>();
    if let Some(i) = (0..w.len()).max_by(|&a, &b| w[a].total_cmp(&w[b])) {
        out[i] += resid;
    }
    out
}

/// Optimal transport cost between two probability vectors on point clouds
/// of dimension `dim` (points stored row-major) with Euclidean ground cost.
pub fn w1_euclidean(xs: &[f64], wx: &[f64], ys: &[f64], wy: &[f64], dim: usize) -> Result<f64> {
    if dim == 0 || xs.len() != wx.len() * dim || ys.len() != wy.len() * dim {
        return Err(Error::DimensionMismatch { expected: wx.len() * dim, found: xs.len() });
    }
    if dim == 1 {
        return Ok(w1_line(xs, wx, ys, wy));
    }
    if swap_first(xs, wx, ys, wy) {
        return w1_euclidean(ys, wy, xs, wx, dim);
    }
    let keep = |p: &[f64], w: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut pts = Vec::new();
        let mut ws = Vec::new();
        for (i, &v) in w.iter().enumerate() {
            if v > 0.0 {
                pts.extend_from_slice(&p[i * dim..(i + 1) * dim]);
                ws.push(v);
            }
        }
        (pts, ws)
    };
    let (xs, wx) = keep(xs, wx);
    let (ys, wy) = keep(ys, wy);
    if wx.is_empty() || wy.is_empty() {
        return Err(Error::NotProbability("no positive mass".into()));
    }
    let mut solver = NetworkSimplex::new(&xs, &scaled_masses(&wx), &ys, &scaled_masses(&wy), dim);
    solver.seed_arcs();
    loop {
        solver.run()?;
        if !solver.price_all_pairs() {
            break;
        }
    }
    solver.check_balanced()?;
    Ok(solver.total_cost() / FLOW_SCALE)
}

struct NetworkSimplex<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    dim: usize,
    n1: usize,
    n2: usize,
    node_num: usize,
    // arcs 0..node_num are the artificial root arcs; real arc e joins source
    // arc_src[e - node_num] to sink arc_snk[e - node_num]
    arc_src: Vec<u32>,
    arc_snk: Vec<u32>,
    arc_cost: Vec<i64>,
    root: usize,
    supply: Vec<i64>,
    cost_unit: f64,
    art_cost: i64,

    parent: Vec<usize>,
    pred: Vec<usize>,
    pred_dir: Vec<i64>,
    pred_flow: Vec<i64>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pi: Vec<i64>,
    dirty_revs: Vec<usize>,

    block_size: usize,
    next_arc: usize,

    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: i64,
}

const DIR_UP: i64 = 1;
const DIR_DOWN: i64 = -1;

impl<'a> NetworkSimplex<'a> {
    fn new(xs: &'a [f64], sx: &[i64], ys: &'a [f64], sy: &[i64], dim: usize) -> Self {
        let n1 = sx.len();
        let n2 = sy.len();
        let node_num = n1 + n2;
        let mut max_d: f64 = 0.0;
        // A cheap upper bound on the largest distance: the joint bounding box diagonal.
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in xs.chunks(dim).chain(ys.chunks(dim)) {
            for i in 0..dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        for i in 0..dim {
            max_d += (hi[i] - lo[i]).powi(2);
        }
        let max_d = max_d.sqrt().max(f64::MIN_POSITIVE);
        let cost_unit = max_d / COST_SCALE;
        let art_cost = (COST_SCALE as i64 + 1) * (node_num as i64 + 1);

        let mut supply: Vec<i64> = sx.to_vec();
        supply.extend(sy.iter().map(|v| -v));
        supply.push(0);

        let root = node_num;
        let mut s = NetworkSimplex {
            xs,
            ys,
            dim,
            n1,
            n2,
            node_num,
            arc_src: Vec::new(),
            arc_snk: Vec::new(),
            arc_cost: Vec::new(),
            root,
            supply,
            cost_unit,
            art_cost,
            parent: vec![NONE; node_num + 1],
            pred: vec![NONE; node_num + 1],
            pred_dir: vec![0; node_num + 1],
            pred_flow: vec![0; node_num + 1],
            thread: vec![0; node_num + 1],
            rev_thread: vec![0; node_num + 1],
            succ_num: vec![0; node_num + 1],
            last_succ: vec![0; node_num + 1],
            pi: vec![0; node_num + 1],
            dirty_revs: Vec::new(),
            block_size: 10,
            next_arc: 0,
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0,
        };
        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = node_num + 1;
        s.last_succ[root] = root - 1;
        for u in 0..node_num {
            s.parent[u] = root;
            s.pred[u] = u;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            if s.supply[u] >= 0 {
                s.pred_dir[u] = DIR_UP;
                s.pi[u] = 0;
                s.pred_flow[u] = s.supply[u];
            } else {
                s.pred_dir[u] = DIR_DOWN;
                s.pi[u] = art_cost;
                s.pred_flow[u] = -s.supply[u];
            }
        }
        s
    }

    #[inline]
    fn source(&self, e: usize) -> usize {
        if e >= self.node_num {
            self.arc_src[e - self.node_num] as usize
        } else if self.supply[e] >= 0 {
            e
        } else {
            self.root
        }
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        if e >= self.node_num {
            self.n1 + self.arc_snk[e - self.node_num] as usize
        } else if self.supply[e] >= 0 {
            self.root
        } else {
            e
        }
    }

    #[inline]
    fn distance(&self, s: usize, t: usize) -> f64 {
        let a = &self.xs[s * self.dim..(s + 1) * self.dim];
        let b = &self.ys[t * self.dim..(t + 1) * self.dim];
        a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
    }

    #[inline]
    fn pair_cost(&self, s: usize, t: usize) -> i64 {
        (self.distance(s, t) / self.cost_unit).round() as i64
    }

    #[inline]
    fn cost(&self, e: usize) -> i64 {
        if e >= self.node_num {
            self.arc_cost[e - self.node_num]
        } else if self.supply[e] >= 0 {
            0
        } else {
            self.art_cost
        }
    }

    fn push_arc(&mut self, s: usize, t: usize) {
        self.arc_src.push(s as u32);
        self.arc_snk.push(t as u32);
        self.arc_cost.push(self.pair_cost(s, t));
    }

    fn reset_block_size(&mut self) {
        self.block_size = ((self.arc_cost.len() as f64).sqrt() as usize).max(10);
    }

    /// Initial arc set: the nearest sinks of every source and the nearest
    /// source of every sink.
    fn seed_arcs(&mut self) {
        let k = SEED_NEIGHBOURS.min(self.n2);
        let near: Vec<Vec<u32>> = (0..self.n1)
            .into_par_iter()
            .map(|s| {
                let mut d: Vec<(i64, u32)> = (0..self.n2).map(|t| (self.pair_cost(s, t), t as u32)).collect();
                if k < d.len() {
                    d.select_nth_unstable(k - 1);
                    d.truncate(k);
                }
                d.into_iter().map(|p| p.1).collect()
            })
            .collect();
        let back: Vec<u32> = (0..self.n2)
            .into_par_iter()
            .map(|t| (0..self.n1).min_by_key(|&s| (self.pair_cost(s, t), s)).unwrap_or(0) as u32)
            .collect();
        let mut pairs: Vec<(u32, u32)> =
            near.iter().enumerate().flat_map(|(s, ts)| ts.iter().map(move |&t| (s as u32, t))).collect();
        pairs.extend(back.iter().enumerate().map(|(t, &s)| (s, t as u32)));
        pairs.sort_unstable();
        pairs.dedup();
        for (s, t) in pairs {
            self.push_arc(s as usize, t as usize);
        }
        self.reset_block_size();
    }

    /// Scans every source-sink pair against the current potentials and adds
    /// the most negative arcs of each source. Returns false at optimality.
    fn price_all_pairs(&mut self) -> bool {
        let found: Vec<Vec<(i64, u32)>> = (0..self.n1)
            .into_par_iter()
            .map(|s| {
                let mut neg: Vec<(i64, u32)> = (0..self.n2)
                    .filter_map(|t| {
                        let c = self.pair_cost(s, t) + self.pi[s] - self.pi[self.n1 + t];
                        (c < 0).then_some((c, t as u32))
                    })
                    .collect();
                if neg.len() > ADD_PER_SOURCE {
                    neg.select_nth_unstable(ADD_PER_SOURCE - 1);
                    neg.truncate(ADD_PER_SOURCE);
                }
                neg.sort_unstable();
                neg
            })
            .collect();
        let mut added = false;
        for (s, ts) in found.into_iter().enumerate() {
            for (_, t) in ts {
                self.push_arc(s, t as usize);
                added = true;
            }
        }
        self.reset_block_size();
        added
    }

    /// Block search: scan arcs cyclically and pick the most negative reduced
    /// cost within the first block that has one.
    fn find_entering_arc(&mut self) -> bool {
        let m = self.arc_cost.len();
        if m == 0 {
            return false;
        }
        let mut min = 0i64;
        let mut cnt = self.block_size;
        let mut e = self.next_arc.min(m - 1);
        let mut scanned = 0;
        while scanned < m {
            let c = self.arc_cost[e] + self.pi[self.arc_src[e] as usize]
                - self.pi[self.n1 + self.arc_snk[e] as usize];
            if c < min {
                min = c;
                self.in_arc = self.node_num + e;
            }
            scanned += 1;
            e += 1;
            if e == m {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if min < 0 {
                    break;
                }
                cnt = self.block_size;
            }
        }
        if min >= 0 {
            return false;
        }
        self.next_arc = e;
        true
    }

    fn find_join_node(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    /// Leaving arc: the last blocking arc in cycle orientation, which keeps
    /// the spanning tree strongly feasible. Only arcs whose flow decreases can
    /// block since capacities are unbounded.
    fn find_leaving_arc(&mut self) -> bool {
        let first = self.source(self.in_arc);
        let second = self.target(self.in_arc);
        let mut delta = i64::MAX;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            if self.pred_dir[u] == DIR_UP && self.pred_flow[u] < delta {
                delta = self.pred_flow[u];
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        u = second;
        while u != self.join {
            if self.pred_dir[u] == DIR_DOWN && self.pred_flow[u] <= delta {
                delta = self.pred_flow[u];
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        self.delta = delta;
        result != 0
    }

    /// Pushes `delta` around the cycle and returns the new flow on the
    /// entering arc.
    fn change_flow(&mut self) -> i64 {
        let val = self.delta;
        if val > 0 {
            let mut u = self.source(self.in_arc);
            while u != self.join {
                self.pred_flow[u] -= self.pred_dir[u] * val;
                u = self.parent[u];
            }
            u = self.target(self.in_arc);
            while u != self.join {
                self.pred_flow[u] += self.pred_dir[u] * val;
                u = self.parent[u];
            }
        }
        val
    }

    fn update_tree_structure(&mut self, in_flow: i64) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let in_arc = self.in_arc;
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];
        let in_dir = if u_in == self.source(in_arc) { DIR_UP } else { DIR_DOWN };

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            self.pred_flow[u_in] = in_flow;
            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue =
                if old_rev_thread == v_in { self.thread[old_last_succ] } else { self.thread[v_in] };

            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for i in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[i];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                self.pred_flow[u] = self.pred_flow[p];
                tmp_sc = tmp_sc + self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            self.pred_flow[u_in] = in_flow;
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let u_in = self.u_in;
        let sigma = self.pi[self.v_in] - self.pi[u_in] - self.pred_dir[u_in] * self.cost(self.in_arc);
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    fn run(&mut self) -> Result<()> {
        while self.find_entering_arc() {
            self.find_join_node();
            if !self.find_leaving_arc() {
                return Err(Error::InvalidArgument("transport problem is unbounded".into()));
            }
            let in_flow = self.change_flow();
            self.update_tree_structure(in_flow);
            self.update_potential();
        }
        Ok(())
    }

    fn check_balanced(&self) -> Result<()> {
        for u in 0..self.node_num {
            if self.pred[u] < self.node_num && self.pred_flow[u] != 0 {
                return Err(Error::NotProbability("masses do not balance".into()));
            }
        }
        Ok(())
    }

    fn total_cost(&self) -> f64 {
        let mut total = 0.0;
        for u in 0..self.node_num {
            let e = self.pred[u];
            if e >= self.node_num && self.pred_flow[u] != 0 {
                let a = e - self.node_num;
                total += self.pred_flow[u] as f64 * self.distance(self.arc_src[a] as usize, self.arc_snk[a] as usize);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Brute force over permutations for uniform measures of equal size.
    fn assignment_oracle(xs: &[f64], ys: &[f64], dim: usize) -> f64 {
        let n = xs.len() / dim;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        fn rec(k: usize, perm: &mut Vec<usize>, best: &mut f64, xs: &[f64], ys: &[f64], dim: usize) {
            let n = perm.len();
            if k == n {
                let c: f64 = (0..n)
                    .map(|i| {
                        let a = &xs[i * dim..(i + 1) * dim];
                        let b = &ys[perm[i] * dim..(perm[i] + 1) * dim];
                        a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
                    })
                    .sum();
                *best = best.min(c / n as f64);
                return;
            }
            for i in k..n {
                perm.swap(k, i);
                rec(k + 1, perm, best, xs, ys, dim);
                perm.swap(k, i);
            }
        }
        rec(0, &mut perm, &mut best, xs, ys, dim);
        best
    }

    #[test]
    fn matches_assignment_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(1..7);
            let xs: Vec<f64> = (0..2 * n).map(|_| rng.gen()).collect();
            let ys: Vec<f64> = (0..2 * n).map(|_| rng.gen()).collect();
            let w = vec![1.0 / n as f64; n];
            let got = w1_euclidean(&xs, &w, &ys, &w, 2).unwrap();
            let want = assignment_oracle(&xs, &ys, 2);
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    /// O(n^3) Hungarian algorithm with potentials, for square cost matrices.
    fn hungarian(cost: &[Vec<f64>]) -> f64 {
        let n = cost.len();
        let mut u = vec![0.0; n + 1];
        let mut v = vec![0.0; n + 1];
        let mut p = vec![0usize; n + 1];
        let mut way = vec![0usize; n + 1];
        for i in 1..=n {
            p[0] = i;
            let mut j0 = 0;
            let mut minv = vec![f64::INFINITY; n + 1];
            let mut used = vec![false; n + 1];
            loop {
                used[j0] = true;
                let i0 = p[j0];
                let mut delta = f64::INFINITY;
                let mut j1 = 0;
                for j in 1..=n {
                    if !used[j] {
                        let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                        if cur < minv[j] {
                            minv[j] = cur;
                            way[j] = j0;
                        }
                        if minv[j] < delta {
                            delta = minv[j];
                            j1 = j;
                        }
                    }
                }
                for j in 0..=n {
                    if used[j] {
                        u[p[j]] += delta;
                        v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
                if p[j0] == 0 {
                    break;
                }
            }
            loop {
                let j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
                if j0 == 0 {
                    break;
                }
            }
        }
        (1..=n).map(|j| cost[p[j] - 1][j - 1]).sum()
    }

    #[test]
    fn matches_hungarian_on_larger_clouds() {
        // large enough that the optimum needs arcs outside the seeded set
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [30usize, 60, 90] {
            let xs: Vec<f64> = (0..2 * n).map(|_| rng.gen()).collect();
            let ys: Vec<f64> = (0..2 * n).map(|i| rng.gen::<f64>() * 0.5 + if i % 2 == 0 { 0.5 } else { 0.0 }).collect();
            let cost: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| ((xs[2 * i] - ys[2 * j]).powi(2) + (xs[2 * i + 1] - ys[2 * j + 1]).powi(2)).sqrt())
                        .collect()
                })
                .collect();
            let w = vec![1.0 / n as f64; n];
            let got = w1_euclidean(&xs, &w, &ys, &w, 2).unwrap();
            let want = hungarian(&cost) / n as f64;
            assert!((got - want).abs() < 1e-9, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn line_examples() {
        assert_eq!(w1_line(&[0.0], &[1.0], &[1.0], &[1.0]), 1.0);
        assert_eq!(w1_line(&[0.0], &[1.0], &[0.0, 1.0], &[0.5, 0.5]), 0.5);
    }

    #[test]
    fn split_mass_in_the_plane() {
        let d = w1_euclidean(&[0.0, 0.0], &[1.0], &[0.0, 0.0, 3.0, 4.0], &[0.5, 0.5], 2).unwrap();
        assert!((d - 2.5).abs() < 1e-12);
    }
}

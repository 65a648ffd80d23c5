//! Exact discrete optimal transport by the primal network simplex method.

use std::io::Write;

use crate::error::{Error, Result};
use crate::measures::ParticleCloud;

/// Largest combined number of points accepted by [`w2_discrete`].
pub const EXACT_BUDGET: usize = 2000;

/// Tolerance on the marginals of a returned plan.
pub const PLAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// A sparse coupling between `n_sources` and `n_targets` atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePlan {
    pub n_sources: usize,
    pub n_targets: usize,
    pub entries: Vec<PlanEntry>,
    /// `Σ weight · cost` over the entries.
    pub cost: f64,
}

impl DiscretePlan {
    pub fn row_marginals(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.n_sources];
        for e in &self.entries {
            r[e.source] += e.weight;
        }
        r
    }

    pub fn col_marginals(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_targets];
        for e in &self.entries {
            c[e.target] += e.weight;
        }
        c
    }

    /// Writes `(source_index, target_index, weight)` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::NumericalFailure(format!("csv: {e}"));
        w.write_record(["source_index", "target_index", "weight"]).map_err(io)?;
        for e in &self.entries {
            w.write_record([e.source.to_string(), e.target.to_string(), e.weight.to_string()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::NumericalFailure(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Squared Euclidean cost matrix, row-major `a.len() × b.len()`.
pub fn squared_distances(a: &ParticleCloud, b: &ParticleCloud) -> Vec<f64> {
    let mut c = Vec::with_capacity(a.len() * b.len());
    for i in 0..a.len() {
        let p = a.point(i);
        for j in 0..b.len() {
            c.push(p.iter().zip(b.point(j)).map(|(x, y)| (x - y) * (x - y)).sum());
        }
    }
    c
}

/// Exact `W₂²` between two clouds and an optimal plan.
pub fn w2_discrete(a: &ParticleCloud, b: &ParticleCloud) -> Result<(f64, DiscretePlan)> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidParameter(format!("dimensions {} and {}", a.dim(), b.dim())));
    }
    let points = a.len() + b.len();
    if points > EXACT_BUDGET {
        return Err(Error::TooLarge { points, budget: EXACT_BUDGET });
    }
    let cost = squared_distances(a, b);
    let plan = transport_lp(a.weights(), b.weights(), &cost)?;
    Ok((plan.cost, plan))
}

const NONE: usize = usize::MAX;
const STATE_TREE: u8 = 0;
const STATE_LOWER: u8 = 1;

/// Solves `min ⟨π, C⟩` over couplings of `supply` and `demand`.
///
/// Sources are nodes `0..m`, sinks `m..m+n`, and node `m+n` is an artificial
/// root joined to every node. The spanning tree is kept as parent/pred
/// arrays plus child lists; pivots use block search for the entering arc and
/// the strongly feasible leaving-arc rule, which rules out cycling.
pub fn transport_lp(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<DiscretePlan> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 || cost.len() != m * n {
        return Err(Error::InvalidParameter("cost matrix does not match the marginals".into()));
    }
    let mut solver = Simplex::new(supply, demand, cost);
    solver.run()?;
    let artificial: f64 = solver.flow[m * n..].iter().sum();
    let imbalance = (supply.iter().sum::<f64>() - demand.iter().sum::<f64>()).abs();
    if artificial > imbalance + PLAN_TOLERANCE {
        return Err(Error::NumericalFailure(format!("{artificial} units left on artificial arcs")));
    }
    let mut entries = Vec::new();
    let mut total = 0.0;
    for (e, &f) in solver.flow[..m * n].iter().enumerate() {
        if f > 0.0 {
            entries.push(PlanEntry { source: e / n, target: e % n, weight: f });
            total += f * cost[e];
        }
    }
    Ok(DiscretePlan { n_sources: m, n_targets: n, entries, cost: total })
}

struct Simplex<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    art_cost: f64,
    eps: f64,
    flow: Vec<f64>,
    state: Vec<u8>,
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    /// `true` when `pred[u]` is directed from `u` to `parent[u]`.
    up: Vec<bool>,
    first_child: Vec<usize>,
    next_sibling: Vec<usize>,
    prev_sibling: Vec<usize>,
    stamp: Vec<usize>,
    epoch: usize,
    next_arc: usize,
    block: usize,
}

impl<'a> Simplex<'a> {
    fn new(supply: &[f64], demand: &[f64], cost: &'a [f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let nodes = m + n + 1;
        let root = m + n;
        let arcs = m * n + m + n;
        let max_c = cost.iter().cloned().fold(0.0, f64::max);
        let art_cost = (max_c + 1.0) * nodes as f64;
        let mut s = Self {
            m,
            n,
            cost,
            art_cost,
            eps: 1e-13 * art_cost,
            flow: vec![0.0; arcs],
            state: vec![STATE_LOWER; arcs],
            pi: vec![0.0; nodes],
            parent: vec![root; nodes],
            pred: vec![NONE; nodes],
            up: vec![false; nodes],
            first_child: vec![NONE; nodes],
            next_sibling: vec![NONE; nodes],
            prev_sibling: vec![NONE; nodes],
            stamp: vec![0; nodes],
            epoch: 0,
            next_arc: 0,
            block: ((arcs as f64).sqrt() as usize).max(10),
        };
        s.parent[root] = NONE;
        for u in 0..m + n {
            let arc = m * n + u;
            s.pred[u] = arc;
            s.state[arc] = STATE_TREE;
            if u < m {
                s.up[u] = true;
                s.flow[arc] = supply[u];
            } else {
                s.flow[arc] = demand[u - m];
                s.pi[u] = art_cost;
            }
            s.add_child(root, u);
        }
        s
    }

    fn root(&self) -> usize {
        self.m + self.n
    }

    #[inline]
    fn ends(&self, arc: usize) -> (usize, usize) {
        let mn = self.m * self.n;
        if arc < mn {
            (arc / self.n, self.m + arc % self.n)
        } else {
            let u = arc - mn;
            if u < self.m {
                (u, self.root())
            } else {
                (self.root(), u)
            }
        }
    }

    #[inline]
    fn arc_cost(&self, arc: usize) -> f64 {
        let mn = self.m * self.n;
        if arc < mn {
            self.cost[arc]
        } else if arc - mn < self.m {
            0.0
        } else {
            self.art_cost
        }
    }

    #[inline]
    fn reduced_cost(&self, arc: usize) -> f64 {
        let (s, t) = self.ends(arc);
        self.arc_cost(arc) + self.pi[s] - self.pi[t]
    }

    fn add_child(&mut self, p: usize, c: usize) {
        let head = self.first_child[p];
        self.next_sibling[c] = head;
        self.prev_sibling[c] = NONE;
        if head != NONE {
            self.prev_sibling[head] = c;
        }
        self.first_child[p] = c;
    }

    fn remove_child(&mut self, p: usize, c: usize) {
        let (prev, next) = (self.prev_sibling[c], self.next_sibling[c]);
        if prev != NONE {
            self.next_sibling[prev] = next;
        } else {
            self.first_child[p] = next;
        }
        if next != NONE {
            self.prev_sibling[next] = prev;
        }
        self.prev_sibling[c] = NONE;
        self.next_sibling[c] = NONE;
    }

    fn find_entering(&mut self) -> Option<usize> {
        let arcs = self.flow.len();
        let mut best = None;
        let mut min = -self.eps;
        let mut count = self.block;
        for k in 0..arcs {
            let e = (self.next_arc + k) % arcs;
            if self.state[e] == STATE_LOWER {
                let rc = self.reduced_cost(e);
                if rc < min {
                    min = rc;
                    best = Some(e);
                }
            }
            count -= 1;
            if count == 0 {
                if best.is_some() {
                    self.next_arc = (e + 1) % arcs;
                    return best;
                }
                count = self.block;
            }
        }
        best
    }

    fn find_join(&mut self, a: usize, b: usize) -> usize {
        self.epoch += 1;
        let mut u = a;
        while u != NONE {
            self.stamp[u] = self.epoch;
            u = self.parent[u];
        }
        let mut v = b;
        while self.stamp[v] != self.epoch {
            v = self.parent[v];
        }
        v
    }

    fn run(&mut self) -> Result<()> {
        let cap = 50 * self.flow.len() + 10_000;
        for _ in 0..cap {
            let Some(entering) = self.find_entering() else {
                return Ok(());
            };
            self.pivot(entering);
        }
        Err(Error::NoConvergence { iterations: cap, residual: f64::NAN })
    }

    fn pivot(&mut self, entering: usize) {
        let (first, second) = self.ends(entering);
        let join = self.find_join(first, second);

        // the cycle pushes flow join → … → first → second → … → join; arcs on
        // the first side carry it against the tree direction when `up`
        let mut delta = f64::INFINITY;
        let mut u_out = NONE;
        let mut on_first = true;
        let mut u = first;
        while u != join {
            let d = if self.up[u] { self.flow[self.pred[u]] } else { f64::INFINITY };
            if d < delta {
                delta = d;
                u_out = u;
                on_first = true;
            }
            u = self.parent[u];
        }
        u = second;
        while u != join {
            let d = if self.up[u] { f64::INFINITY } else { self.flow[self.pred[u]] };
            if d <= delta {
                delta = d;
                u_out = u;
                on_first = false;
            }
            u = self.parent[u];
        }
        debug_assert!(delta.is_finite(), "uncapacitated transport problems are bounded");

        if delta > 0.0 {
            self.flow[entering] += delta;
            let mut u = first;
            while u != join {
                let a = self.pred[u];
                self.flow[a] += if self.up[u] { -delta } else { delta };
                u = self.parent[u];
            }
            let mut u = second;
            while u != join {
                let a = self.pred[u];
                self.flow[a] += if self.up[u] { delta } else { -delta };
                u = self.parent[u];
            }
        }
        let leaving = self.pred[u_out];
        self.flow[leaving] = 0.0;
        self.state[leaving] = STATE_LOWER;
        self.state[entering] = STATE_TREE;

        let rc = self.reduced_cost(entering);
        let (u_in, v_in) = if on_first { (first, second) } else { (second, first) };

        // reverse the tree path u_in → … → u_out and hang it below v_in
        let mut path = vec![u_in];
        while *path.last().unwrap() != u_out {
            let p = self.parent[*path.last().unwrap()];
            path.push(p);
        }
        let old_pred: Vec<usize> = path.iter().map(|&w| self.pred[w]).collect();
        let old_up: Vec<bool> = path.iter().map(|&w| self.up[w]).collect();
        for &w in &path {
            let p = self.parent[w];
            self.remove_child(p, w);
        }
        self.parent[u_in] = v_in;
        self.pred[u_in] = entering;
        self.up[u_in] = self.ends(entering).0 == u_in;
        self.add_child(v_in, u_in);
        for k in 1..path.len() {
            let w = path[k];
            self.parent[w] = path[k - 1];
            self.pred[w] = old_pred[k - 1];
            self.up[w] = !old_up[k - 1];
            self.add_child(path[k - 1], w);
        }

        // restore zero reduced cost on the entering arc
        let shift = if self.ends(entering).0 == u_in { -rc } else { rc };
        let mut stack = vec![u_in];
        while let Some(w) = stack.pop() {
            self.pi[w] += shift;
            let mut c = self.first_child[w];
            while c != NONE {
                stack.push(c);
                c = self.next_sibling[c];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_marginals(plan: &DiscretePlan, a: &[f64], b: &[f64]) {
        for (r, w) in plan.row_marginals().iter().zip(a) {
            assert!((r - w).abs() < PLAN_TOLERANCE);
        }
        for (c, w) in plan.col_marginals().iter().zip(b) {
            assert!((c - w).abs() < PLAN_TOLERANCE);
        }
        assert!(plan.entries.iter().all(|e| e.weight >= 0.0));
    }

    #[test]
    fn identical_clouds_cost_nothing() {
        let a = ParticleCloud::uniform_1d(vec![0.0, 1.0, 2.5, -3.0]).unwrap();
        let (c, plan) = w2_discrete(&a, &a).unwrap();
        assert_eq!(c, 0.0);
        assert!(plan.entries.iter().all(|e| e.source == e.target));
    }

    #[test]
    fn two_point_example() {
        let a = ParticleCloud::uniform_1d(vec![0.0, 1.0]).unwrap();
        let b = ParticleCloud::uniform_1d(vec![2.0, 3.0]).unwrap();
        let (c, plan) = w2_discrete(&a, &b).unwrap();
        assert!((c - 4.0).abs() < 1e-12);
        let mut pairs: Vec<(usize, usize)> = plan.entries.iter().map(|e| (e.source, e.target)).collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn uniform_1d_clouds_pair_in_sorted_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [5, 40, 300] {
            let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
            let a = ParticleCloud::uniform_1d(xs.clone()).unwrap();
            let b = ParticleCloud::uniform_1d(ys.clone()).unwrap();
            let (c, plan) = w2_discrete(&a, &b).unwrap();
            let (mut sx, mut sy) = (xs, ys);
            sx.sort_by(f64::total_cmp);
            sy.sort_by(f64::total_cmp);
            let sorted: f64 = sx.iter().zip(&sy).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n as f64;
            assert!((c - sorted).abs() < 1e-10, "n={n}: {c} vs {sorted}");
            check_marginals(&plan, a.weights(), b.weights());
        }
    }

    #[test]
    fn unequal_weights_in_two_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = |k: usize, rng: &mut ChaCha8Rng| (0..2 * k).map(|_| rng.random::<f64>()).collect::<Vec<_>>();
        let raw_a: Vec<f64> = (0..30).map(|_| rng.random::<f64>() + 0.1).collect();
        let raw_b: Vec<f64> = (0..45).map(|_| rng.random::<f64>() + 0.1).collect();
        let (sa, sb) = (raw_a.iter().sum::<f64>(), raw_b.iter().sum::<f64>());
        let wa: Vec<f64> = raw_a.iter().map(|w| w / sa).collect();
        let wb: Vec<f64> = raw_b.iter().map(|w| w / sb).collect();
        let a = ParticleCloud::new(2, pts(30, &mut rng), wa.clone()).unwrap();
        let b = ParticleCloud::new(2, pts(45, &mut rng), wb.clone()).unwrap();
        let (c, plan) = w2_discrete(&a, &b).unwrap();
        check_marginals(&plan, &wa, &wb);
        // a basic optimal plan has at most m + n − 1 positive entries
        assert!(plan.entries.len() < 30 + 45);
        // dual certificate: the translation-invariant lower bound
        let ma = a.mean();
        let mb = b.mean();
        let mean_gap: f64 = ma.iter().zip(&mb).map(|(x, y)| (x - y).powi(2)).sum();
        assert!(c >= mean_gap - 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let a = ParticleCloud::uniform_1d(vec![0.0; 1500]).unwrap();
        let b = ParticleCloud::uniform_1d(vec![1.0; 600]).unwrap();
        assert_eq!(w2_discrete(&a, &b).unwrap_err(), Error::TooLarge { points: 2100, budget: EXACT_BUDGET });
    }

    #[test]
    fn plan_csv_has_header_and_rows() {
        let a = ParticleCloud::uniform_1d(vec![0.0, 1.0]).unwrap();
        let (_, plan) = w2_discrete(&a, &a).unwrap();
        let mut buf = Vec::new();
        plan.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("source_index,target_index,weight"));
        assert_eq!(text.lines().count(), 3);
    }
}

//! Minimum spanning trees under i.i.d. continuous weights.
//!
//! The law of the MST depends only on the rank order of the weights, so the
//! exact oracle works over edge orderings and never sees a tie.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::estimator::{merge_all, run_chunks, EstimatorReport, Moments, Z95};
use crate::graph::{EdgeId, EdgeSubset, Graph};

/// Per-edge weights, pairwise distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment {
    weights: Vec<f64>,
    /// Ties found and redrawn while sampling.
    pub tie_redraws: u64,
}

impl WeightAssignment {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Precondition("weights must be finite".into()));
        }
        let order = sorted_order(&weights);
        if let Some(w) = order.windows(2).find(|p| weights[p[0]] == weights[p[1]]) {
            return Err(Error::Precondition(format!(
                "edges {} and {} share the weight {}",
                w[0], w[1], weights[w[0]]
            )));
        }
        Ok(Self { weights, tie_redraws: 0 })
    }

    /// Uniform `[0, 1)` weights. A tie redraws the later of the two weights.
    pub fn sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut weights: Vec<f64> = (0..m).map(|_| rng.random()).collect();
        let mut tie_redraws = 0;
        loop {
            let order = sorted_order(&weights);
            match order.windows(2).find(|p| weights[p[0]] == weights[p[1]]) {
                None => break,
                Some(p) => {
                    tie_redraws += 1;
                    weights[p[1].max(p[0])] = rng.random();
                }
            }
        }
        Self { weights, tie_redraws }
    }

    /// Weights equal to the position of each edge in `order`.
    pub fn from_ordering(order: &[EdgeId]) -> Result<Self> {
        let mut weights = vec![f64::NAN; order.len()];
        for (rank, &e) in order.iter().enumerate() {
            if e >= order.len() || !weights[e].is_nan() {
                return Err(Error::Precondition("ordering is not a permutation".into()));
            }
            weights[e] = rank as f64;
        }
        Ok(Self { weights, tie_redraws: 0 })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Edge ids by increasing weight.
    pub fn order(&self) -> Vec<EdgeId> {
        sorted_order(&self.weights)
    }

    /// Applies a strictly increasing map to every weight.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.weights.iter().map(|&w| f(w)).collect())
    }
}

fn sorted_order(w: &[f64]) -> Vec<EdgeId> {
    let mut idx: Vec<EdgeId> = (0..w.len()).collect();
    idx.sort_unstable_by(|&a, &b| w[a].total_cmp(&w[b]));
    idx
}

fn check_weights(g: &Graph, w: &WeightAssignment) -> Result<()> {
    if w.len() != g.m() {
        return Err(Error::Precondition(format!(
            "{} weights for {} edges",
            w.len(),
            g.m()
        )));
    }
    Ok(())
}

/// Kruskal on a precomputed edge order; the order must list every edge once.
fn kruskal_by_order(g: &Graph, order: &[EdgeId]) -> Result<Vec<EdgeId>> {
    let n = g.n();
    let mut dsu = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for &e in order {
        let (u, v) = g.edges()[e];
        if dsu.union(u, v) {
            tree.push(e);
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    if n > 0 && tree.len() + 1 != n {
        return Err(Error::Disconnected);
    }
    Ok(tree)
}

pub fn kruskal(g: &Graph, w: &WeightAssignment) -> Result<EdgeSubset> {
    check_weights(g, w)?;
    let tree = kruskal_by_order(g, &w.order())?;
    EdgeSubset::from_ids(g.m(), tree)
}

#[derive(PartialEq)]
struct HeapWeight(f64);

impl Eq for HeapWeight {}

impl PartialOrd for HeapWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Prim from vertex 0 with a lazy binary heap.
pub fn prim(g: &Graph, w: &WeightAssignment) -> Result<EdgeSubset> {
    check_weights(g, w)?;
    let n = g.n();
    let mut tree = EdgeSubset::empty(g.m());
    if n == 0 {
        return Ok(tree);
    }
    let mut seen = vec![false; n];
    let mut heap = BinaryHeap::new();
    let visit = |v: usize, seen: &mut Vec<bool>, heap: &mut BinaryHeap<_>| {
        seen[v] = true;
        for &(u, e) in g.incident(v) {
            if !seen[u] {
                heap.push(Reverse((HeapWeight(w.weights[e]), e, u)));
            }
        }
    };
    visit(0, &mut seen, &mut heap);
    let mut added = 0;
    while let Some(Reverse((_, e, u))) = heap.pop() {
        if seen[u] {
            continue;
        }
        tree.insert(e);
        added += 1;
        visit(u, &mut seen, &mut heap);
    }
    if added + 1 != n {
        return Err(Error::Disconnected);
    }
    Ok(tree)
}

/// The unique minimum spanning tree (computed by Kruskal).
pub fn mst_of(g: &Graph, w: &WeightAssignment) -> Result<EdgeSubset> {
    WeightAssignment::new(w.weights.clone())?;
    kruskal(g, w)
}

/// Ordered pairs of distinct edges of `edges` sharing at least one endpoint,
/// and the remaining ordered pairs.
pub fn ordered_pair_classes(n: usize, edges: &[(usize, usize)]) -> (u64, u64) {
    let mut deg = vec![0u64; n];
    let mut mult: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
        *mult.entry((u.min(v), u.max(v))).or_default() += 1;
    }
    let m = edges.len() as u64;
    let at_vertex: u64 = deg.iter().map(|d| d * d.saturating_sub(1)).sum();
    // parallel pairs were counted at both endpoints
    let parallel: u64 = mult.values().map(|k| k * (k - 1)).sum();
    let adjacent = at_vertex - parallel;
    (adjacent, m * m.saturating_sub(1) - adjacent)
}

pub fn is_complete(g: &Graph) -> bool {
    let n = g.n();
    g.is_simple() && g.m() == n * n.saturating_sub(1) / 2
}

/// `p1 <= p0^2` on `K_n` iff the mean squared degree is at most this.
pub fn adjacent_pnc_threshold(n: usize) -> f64 {
    let n = n as f64;
    6.0 - 14.0 / n + 8.0 / (n * n)
}

/// `p2 <= p0^2` on `K_n` iff the mean squared degree is at least this.
pub fn nonadjacent_pnc_threshold(n: usize) -> f64 {
    let n = n as f64;
    5.0 - 11.0 / n + 6.0 / (n * n)
}

pub const EXACT_EDGE_CAP: usize = 12;
pub const STRATIFIED_EDGE_CAP: usize = 16;

/// Integer tallies over all `m!` orderings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingCounts {
    pub total: u128,
    /// Number of orderings whose MST is each tree (edge-id bitmask).
    pub trees: BTreeMap<u32, u128>,
    pub edge: Vec<u128>,
    pub pair: Vec<Vec<u128>>,
    pub sum_sq_degree: u128,
    pub adjacent_pairs: u128,
    pub nonadjacent_pairs: u128,
}

fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl OrderingCounts {
    fn from_trees(g: &Graph, trees: BTreeMap<u32, u128>) -> Self {
        let m = g.m();
        let total = trees.values().sum();
        let mut c = Self {
            total,
            trees: BTreeMap::new(),
            edge: vec![0; m],
            pair: vec![vec![0; m]; m],
            sum_sq_degree: 0,
            adjacent_pairs: 0,
            nonadjacent_pairs: 0,
        };
        for (&mask, &count) in &trees {
            let ids: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
            let mut deg = vec![0u128; g.n()];
            for &e in &ids {
                c.edge[e] += count;
                let (u, v) = g.edges()[e];
                deg[u] += 1;
                deg[v] += 1;
                for &f in &ids {
                    if f == e {
                        continue;
                    }
                    c.pair[e][f] += count;
                    let (a, b) = g.edges()[f];
                    if a == u || a == v || b == u || b == v {
                        c.adjacent_pairs += count;
                    } else {
                        c.nonadjacent_pairs += count;
                    }
                }
            }
            c.sum_sq_degree += count * deg.iter().map(|d| d * d).sum::<u128>();
        }
        c.trees = trees;
        c
    }

    pub fn edge_probability(&self, e: EdgeId) -> BigRational {
        ratio(self.edge[e], self.total)
    }

    pub fn pair_probability(&self, e: EdgeId, f: EdgeId) -> BigRational {
        if e == f {
            return self.edge_probability(e);
        }
        ratio(self.pair[e][f], self.total)
    }

    /// `P[e, f in T] - P[e in T] P[f in T]`.
    pub fn margin(&self, e: EdgeId, f: EdgeId) -> BigRational {
        self.pair_probability(e, f) - self.edge_probability(e) * self.edge_probability(f)
    }

    /// `sum_x E[deg(x)^2]`.
    pub fn sum_sq_degree(&self) -> BigRational {
        ratio(self.sum_sq_degree, self.total)
    }
}

/// Statistics of the MST law for one small graph.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingOracleResult {
    pub n: usize,
    pub m: usize,
    pub exact: bool,
    pub orderings_evaluated: u64,
    pub distinct_trees: usize,
    pub edge_probability: Vec<f64>,
    pub sum_sq_degree: f64,
    pub mean_sq_degree: f64,
    /// Mean pair probability over ordered pairs of adjacent edges.
    pub p1: Option<f64>,
    /// Same over non-adjacent pairs.
    pub p2: Option<f64>,
    pub pairs: Vec<PairStat>,
    pub host_adjacent_pairs: u64,
    pub host_nonadjacent_pairs: u64,
    /// Integer tallies; present only for exact runs.
    #[serde(skip)]
    pub counts: Option<OrderingCounts>,
    #[serde(skip)]
    pair_matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairStat {
    pub e: EdgeId,
    pub f: EdgeId,
    pub p_pair: f64,
    pub p_e: f64,
    pub p_f: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_exact: Option<String>,
}

impl OrderingOracleResult {
    fn build(g: &Graph, counts: OrderingCounts, pairs: &[(EdgeId, EdgeId)], exact: bool) -> Self {
        let (m, n) = (g.m(), g.n());
        let tot = counts.total as f64;
        let edge_probability: Vec<f64> = counts.edge.iter().map(|&c| c as f64 / tot).collect();
        let pair_matrix: Vec<Vec<f64>> = counts
            .pair
            .iter()
            .map(|row| row.iter().map(|&c| c as f64 / tot).collect())
            .collect();
        let (adj, nonadj) = ordered_pair_classes(n, g.edges());
        let sum_sq_degree = counts.sum_sq_degree as f64 / tot;
        let pairs = pairs
            .iter()
            .map(|&(e, f)| {
                let p_pair = if e == f { edge_probability[e] } else { pair_matrix[e][f] };
                let (p_e, p_f) = (edge_probability[e], edge_probability[f]);
                PairStat {
                    e,
                    f,
                    p_pair,
                    p_e,
                    p_f,
                    margin: p_pair - p_e * p_f,
                    margin_exact: exact.then(|| counts.margin(e, f).to_string()),
                }
            })
            .collect();
        Self {
            n,
            m,
            exact,
            orderings_evaluated: counts.total as u64,
            distinct_trees: counts.trees.len(),
            edge_probability,
            sum_sq_degree,
            mean_sq_degree: sum_sq_degree / n as f64,
            p1: (adj > 0).then(|| counts.adjacent_pairs as f64 / (tot * adj as f64)),
            p2: (nonadj > 0).then(|| counts.nonadjacent_pairs as f64 / (tot * nonadj as f64)),
            pairs,
            host_adjacent_pairs: adj,
            host_nonadjacent_pairs: nonadj,
            counts: exact.then_some(counts),
            pair_matrix,
        }
    }

    pub fn pair_probability(&self, e: EdgeId, f: EdgeId) -> f64 {
        if e == f {
            self.edge_probability[e]
        } else {
            self.pair_matrix[e][f]
        }
    }

    pub fn p1_exact(&self) -> Option<BigRational> {
        let c = self.counts.as_ref()?;
        (self.host_adjacent_pairs > 0)
            .then(|| ratio(c.adjacent_pairs, c.total * self.host_adjacent_pairs as u128))
    }

    pub fn p2_exact(&self) -> Option<BigRational> {
        let c = self.counts.as_ref()?;
        (self.host_nonadjacent_pairs > 0)
            .then(|| ratio(c.nonadjacent_pairs, c.total * self.host_nonadjacent_pairs as u128))
    }

    /// On a complete host with `n >= 4`, the differences
    /// `p1 - (S - 2(n-1)) / (n(n-1)(n-2))` and
    /// `p2 - 4(n(n-1) - S) / (n(n-1)(n-2)(n-3))` with `S = sum_x E[deg^2]`.
    /// Both are zero.
    pub fn degree_identity_residuals(&self) -> Option<(BigRational, BigRational)> {
        let c = self.counts.as_ref()?;
        if self.n < 4 || self.host_adjacent_pairs != (self.n * (self.n - 1) * (self.n - 2)) as u64
        {
            return None;
        }
        let n = BigInt::from(self.n);
        let one = BigInt::from(1);
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        let s = c.sum_sq_degree();
        let n_r = BigRational::from_integer(n.clone());
        let adj = &n * (&n - &one) * (&n - &two);
        let r1 = self.p1_exact()?
            - (s.clone() - BigRational::from_integer(&two * (&n - &one)))
                / BigRational::from_integer(adj.clone());
        let nn1 = n_r.clone() * (n_r - BigRational::from_integer(one));
        let r2 = self.p2_exact()?
            - (nn1 - s) * BigRational::from_integer(BigInt::from(4))
                / BigRational::from_integer(adj * (&n - &three));
        Some((r1, r2))
    }

    /// Largest `P[e, f] / (P[e] P[f])` over distinct edges.
    pub fn max_pair_ratio(&self) -> Option<(EdgeId, EdgeId, f64)> {
        let mut best: Option<(EdgeId, EdgeId, f64)> = None;
        for e in 0..self.m {
            for f in e + 1..self.m {
                let den = self.edge_probability[e] * self.edge_probability[f];
                if den > 0.0 {
                    let r = self.pair_matrix[e][f] / den;
                    if best.is_none_or(|b| r > b.2) {
                        best = Some((e, f, r));
                    }
                }
            }
        }
        best
    }
}

const FACTORIALS: [u128; 17] = {
    let mut f = [1u128; 17];
    let mut i = 1;
    while i < 17 {
        f[i] = f[i - 1] * i as u128;
        i += 1;
    }
    f
};

/// Edges of `useful` whose endpoints still lie in different components.
fn live_edges(edges: &[(usize, usize)], labels: &[u8], useful: u32) -> u32 {
    let mut out = 0;
    let mut rest = useful;
    while rest != 0 {
        let e = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let (u, v) = edges[e];
        if labels[u] != labels[v] {
            out |= 1 << e;
        }
    }
    out
}

/// Counts orderings of `useful` by resulting tree. Edges that close a cycle
/// never matter, so the recursion only branches on the first live edge;
/// `(u-1)! / u'!` orderings of the old live set map onto each ordering of
/// the new one.
fn explore(
    edges: &[(usize, usize)],
    labels: &mut [u8],
    useful: u32,
    tree: u32,
    mult: u128,
    acc: &mut BTreeMap<u32, u128>,
) {
    if useful == 0 {
        *acc.entry(tree).or_default() += mult;
        return;
    }
    let u = useful.count_ones() as usize;
    let mut rest = useful;
    while rest != 0 {
        let e = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let (a, b) = edges[e];
        let (from, to) = (labels[b], labels[a]);
        let saved = labels.to_vec();
        for l in labels.iter_mut() {
            if *l == from {
                *l = to;
            }
        }
        let next = live_edges(edges, labels, useful & !(1 << e));
        let u2 = next.count_ones() as usize;
        let factor = FACTORIALS[u - 1] / FACTORIALS[u2];
        explore(edges, labels, next, tree | 1 << e, mult * factor, acc);
        labels.copy_from_slice(&saved);
    }
}

fn check_oracle_input(g: &Graph, cap: usize) -> Result<()> {
    if g.m() > cap {
        return Err(Error::CapExceeded(format!(
            "ordering oracle handles at most {cap} edges, got {}",
            g.m()
        )));
    }
    if g.n() > 255 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

fn check_pairs(g: &Graph, pairs: &[(EdgeId, EdgeId)]) -> Result<()> {
    for &(e, f) in pairs {
        g.edge(e)?;
        g.edge(f)?;
    }
    Ok(())
}

/// Tree counts over all `m!` orderings.
pub fn ordering_counts(g: &Graph) -> Result<OrderingCounts> {
    check_oracle_input(g, EXACT_EDGE_CAP)?;
    let edges = g.edges();
    let labels0: Vec<u8> = (0..g.n() as u8).collect();
    let all = live_edges(edges, &labels0, ((1u64 << g.m()) - 1) as u32);
    let u = all.count_ones() as usize;
    let root_mult = FACTORIALS[g.m()] / FACTORIALS[u];
    let firsts: Vec<usize> = (0..g.m()).filter(|e| all >> e & 1 == 1).collect();
    let parts: Vec<BTreeMap<u32, u128>> = firsts
        .par_iter()
        .map(|&e| {
            let mut labels = labels0.clone();
            let (a, b) = edges[e];
            let from = labels[b];
            for l in labels.iter_mut() {
                if *l == from {
                    *l = labels0[a];
                }
            }
            let next = live_edges(edges, &labels, all & !(1 << e));
            let factor = FACTORIALS[u - 1] / FACTORIALS[next.count_ones() as usize];
            let mut acc = BTreeMap::new();
            if g.n() == 1 {
                return acc;
            }
            explore(edges, &mut labels, next, 1 << e, root_mult * factor, &mut acc);
            acc
        })
        .collect();
    let mut trees = BTreeMap::new();
    for p in parts {
        for (t, c) in p {
            *trees.entry(t).or_default() += c;
        }
    }
    if trees.is_empty() {
        // a single vertex: the empty tree under the one empty ordering
        trees.insert(0, FACTORIALS[g.m()]);
    }
    Ok(OrderingCounts::from_trees(g, trees))
}

/// Exact MST statistics over every edge ordering; `m <= 12`.
pub fn exact_ordering_oracle(g: &Graph, pairs: &[(EdgeId, EdgeId)]) -> Result<OrderingOracleResult> {
    check_pairs(g, pairs)?;
    let counts = ordering_counts(g)?;
    debug_assert_eq!(counts.total, FACTORIALS[g.m()]);
    Ok(OrderingOracleResult::build(g, counts, pairs, true))
}

/// Approximate statistics for up to 16 edges: `per_stratum` random orderings
/// for each choice of the lightest edge.
pub fn stratified_ordering_oracle(
    g: &Graph,
    pairs: &[(EdgeId, EdgeId)],
    per_stratum: u64,
    seed: u64,
) -> Result<OrderingOracleResult> {
    check_oracle_input(g, STRATIFIED_EDGE_CAP)?;
    check_pairs(g, pairs)?;
    let m = g.m();
    let parts: Vec<Result<BTreeMap<u32, u128>>> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut rng = crate::estimator::chunk_rng(seed, first as u64);
            let mut rest: Vec<EdgeId> = (0..m).filter(|&e| e != first).collect();
            let mut order = Vec::with_capacity(m);
            let mut acc = BTreeMap::new();
            for _ in 0..per_stratum {
                rest.shuffle(&mut rng);
                order.clear();
                order.push(first);
                order.extend_from_slice(&rest);
                let mask = kruskal_by_order(g, &order)?.iter().fold(0u32, |a, &e| a | 1 << e);
                *acc.entry(mask).or_default() += 1;
            }
            Ok(acc)
        })
        .collect();
    let mut trees = BTreeMap::new();
    for p in parts {
        for (t, c) in p? {
            *trees.entry(t).or_default() += c;
        }
    }
    Ok(OrderingOracleResult::build(g, OrderingCounts::from_trees(g, trees), pairs, false))
}

/// Exact up to 12 edges, stratified up to 16.
pub fn ordering_oracle(
    g: &Graph,
    pairs: &[(EdgeId, EdgeId)],
    per_stratum: u64,
    seed: u64,
) -> Result<OrderingOracleResult> {
    if g.m() <= EXACT_EDGE_CAP {
        exact_ordering_oracle(g, pairs)
    } else {
        stratified_ordering_oracle(g, pairs, per_stratum, seed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackedEdge {
    pub edge: EdgeId,
    pub p0: EstimatorReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct MstMomentsReport {
    pub n: usize,
    pub m: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub p0: Vec<TrackedEdge>,
    pub p1: Option<EstimatorReport>,
    pub p2: Option<EstimatorReport>,
    pub mean_sq_degree: EstimatorReport,
    pub tie_redraws: u64,
}

#[derive(Debug, Clone, Default)]
struct MstTally {
    p0: Vec<Moments>,
    p1: Moments,
    p2: Moments,
    sq: Moments,
    ties: u64,
}

/// Draws one uniform weight vector and its MST; returns the tree and the
/// number of tie redraws.
pub fn sample_mst<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<(Vec<EdgeId>, u64)> {
    let w = WeightAssignment::sample(g.m(), rng);
    Ok((kruskal_by_order(g, &w.order())?, w.tie_redraws))
}

/// Monte Carlo MST moments: `p0` for each tracked edge, the pair averages
/// `p1`, `p2` and the mean squared degree.
pub fn mc_mst_moments(
    g: &Graph,
    n_samples: u64,
    seed: u64,
    tracked: &[EdgeId],
) -> Result<MstMomentsReport> {
    if n_samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    for &e in tracked {
        g.edge(e)?;
    }
    let n = g.n();
    let (adj, nonadj) = ordered_pair_classes(n, g.edges());
    let tree_pairs = ((n - 1) * n.saturating_sub(2)) as f64;
    let parts = run_chunks(n_samples, seed, |rng, count| {
        let mut t = MstTally {
            p0: vec![Moments::default(); tracked.len()],
            ..Default::default()
        };
        let mut deg = vec![0usize; n];
        let mut member = vec![false; g.m()];
        for _ in 0..count {
            let (tree, ties) = sample_mst(g, rng).expect("connected");
            t.ties += ties;
            deg.iter_mut().for_each(|d| *d = 0);
            for &e in &tree {
                let (u, v) = g.edges()[e];
                deg[u] += 1;
                deg[v] += 1;
                member[e] = true;
            }
            for (slot, &e) in t.p0.iter_mut().zip(tracked) {
                slot.push(if member[e] { 1.0 } else { 0.0 });
            }
            for &e in &tree {
                member[e] = false;
            }
            let sq: usize = deg.iter().map(|d| d * d).sum();
            let at_vertex = (sq - 2 * (n - 1)) as f64;
            t.sq.push(sq as f64 / n as f64);
            if adj > 0 {
                t.p1.push(at_vertex / adj as f64);
            }
            if nonadj > 0 {
                t.p2.push((tree_pairs - at_vertex) / nonadj as f64);
            }
        }
        t
    });
    let p0 = tracked
        .iter()
        .enumerate()
        .map(|(i, &edge)| TrackedEdge {
            edge,
            p0: merge_all(parts.iter().map(|p| &p.p0[i])).report(seed),
        })
        .collect();
    Ok(MstMomentsReport {
        n,
        m: g.m(),
        n_samples,
        seed,
        p0,
        p1: (adj > 0).then(|| merge_all(parts.iter().map(|p| &p.p1)).report(seed)),
        p2: (nonadj > 0).then(|| merge_all(parts.iter().map(|p| &p.p2)).report(seed)),
        mean_sq_degree: merge_all(parts.iter().map(|p| &p.sq)).report(seed),
        tie_redraws: parts.iter().map(|p| p.ties).sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PncMethod {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PncStatus {
    /// Exact margin `<= 0`.
    Holds,
    /// Exact margin `> 0`.
    Violated,
    CiBelowZero,
    CiStraddlesZero,
    CiAboveZero,
}

/// The second-moment form of the p-NC inequality on `K_n`.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdCheck {
    pub relation: &'static str,
    pub threshold: f64,
    pub mean_sq_degree: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_sq_degree_ci: Option<[f64; 2]>,
    /// Decided only for exact runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PncVerdict {
    pub graph: String,
    pub pair: [EdgeId; 2],
    pub pair_class: &'static str,
    pub method: PncMethod,
    pub p_pair: f64,
    pub p_e: f64,
    pub p_f: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<[f64; 2]>,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orderings: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub status: PncStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdCheck>,
}

pub fn edges_adjacent(g: &Graph, e: EdgeId, f: EdgeId) -> Result<bool> {
    let (a, b) = g.edge(e)?;
    let (c, d) = g.edge(f)?;
    Ok(a == c || a == d || b == c || b == d)
}

/// First ordered pair of distinct edges in the requested class.
pub fn find_pair(g: &Graph, adjacent: bool) -> Option<(EdgeId, EdgeId)> {
    (0..g.m())
        .flat_map(|e| (e + 1..g.m()).map(move |f| (e, f)))
        .find(|&(e, f)| edges_adjacent(g, e, f).ok() == Some(adjacent))
}

fn threshold_value(n: usize, adjacent: bool) -> BigRational {
    let nn = BigInt::from(n * n);
    let n = BigInt::from(n);
    let num = if adjacent {
        BigInt::from(6) * &nn - BigInt::from(14) * &n + BigInt::from(8)
    } else {
        BigInt::from(5) * &nn - BigInt::from(11) * &n + BigInt::from(6)
    };
    BigRational::new(num, nn)
}

/// Sign and size of `P[e, f in T] - P[e in T] P[f in T]` for the MST.
pub fn pnc_verdict(
    g: &Graph,
    label: &str,
    e: EdgeId,
    f: EdgeId,
    method: PncMethod,
    n_samples: u64,
    seed: u64,
) -> Result<PncVerdict> {
    if e == f {
        return Err(Error::Precondition("the pair needs two distinct edges".into()));
    }
    let adjacent = edges_adjacent(g, e, f)?;
    let complete = is_complete(g) && g.n() >= 4;
    let relation = if adjacent { "<=" } else { ">=" };
    match method {
        PncMethod::Exact => {
            let r = exact_ordering_oracle(g, &[(e, f)])?;
            let c = r.counts.as_ref().expect("exact run");
            let margin = c.margin(e, f);
            let threshold = complete.then(|| {
                let t = threshold_value(g.n(), adjacent);
                let s = c.sum_sq_degree() / BigRational::from_integer(BigInt::from(g.n()));
                let satisfied = if adjacent { s <= t } else { s >= t };
                ThresholdCheck {
                    relation,
                    threshold: t.to_f64().unwrap_or(f64::NAN),
                    mean_sq_degree: r.mean_sq_degree,
                    mean_sq_degree_ci: None,
                    satisfied: Some(satisfied),
                }
            });
            let p = &r.pairs[0];
            Ok(PncVerdict {
                graph: label.to_string(),
                pair: [e, f],
                pair_class: if adjacent { "adjacent" } else { "non-adjacent" },
                method,
                p_pair: p.p_pair,
                p_e: p.p_e,
                p_f: p.p_f,
                margin: p.margin,
                margin_exact: Some(margin.to_string()),
                ci: None,
                exact: true,
                orderings: Some(r.orderings_evaluated),
                n_samples: None,
                seed: None,
                status: if margin > BigRational::zero() {
                    PncStatus::Violated
                } else {
                    PncStatus::Holds
                },
                threshold,
            })
        }
        PncMethod::Mc => {
            if n_samples < 2 {
                return Err(Error::Precondition("need at least two samples".into()));
            }
            if !g.is_connected() {
                return Err(Error::Disconnected);
            }
            let n = g.n();
            let parts = run_chunks(n_samples, seed, |rng, count| {
                let mut cells = [0u64; 4];
                let mut sq = Moments::default();
                let mut deg = vec![0usize; n];
                for _ in 0..count {
                    let (tree, _) = sample_mst(g, rng).expect("connected");
                    deg.iter_mut().for_each(|d| *d = 0);
                    let (mut ie, mut i_f) = (0, 0);
                    for &x in &tree {
                        let (u, v) = g.edges()[x];
                        deg[u] += 1;
                        deg[v] += 1;
                        ie |= (x == e) as usize;
                        i_f |= (x == f) as usize;
                    }
                    cells[2 * ie + i_f] += 1;
                    sq.push(deg.iter().map(|d| d * d).sum::<usize>() as f64 / n as f64);
                }
                (cells, sq)
            });
            let mut cells = [0u64; 4];
            for p in &parts {
                for i in 0..4 {
                    cells[i] += p.0[i];
                }
            }
            let sq = merge_all(parts.iter().map(|p| &p.1)).report(seed);
            let total = n_samples as f64;
            let prob = |i: usize| cells[i] as f64 / total;
            let p_pair = prob(3);
            let p_e = prob(2) + prob(3);
            let p_f = prob(1) + prob(3);
            let margin = p_pair - p_e * p_f;
            // influence function of the covariance estimator: (Ie - pe)(If - pf) - cov
            let second: f64 = (0..4)
                .map(|i| {
                    let x = ((i >> 1) as f64 - p_e) * ((i & 1) as f64 - p_f);
                    prob(i) * x * x
                })
                .sum();
            let se = ((second - margin * margin).max(0.0) / total).sqrt();
            let ci = [margin - Z95 * se, margin + Z95 * se];
            let status = if ci[1] < 0.0 {
                PncStatus::CiBelowZero
            } else if ci[0] > 0.0 {
                PncStatus::CiAboveZero
            } else {
                PncStatus::CiStraddlesZero
            };
            let threshold = complete.then(|| ThresholdCheck {
                relation,
                threshold: if adjacent {
                    adjacent_pnc_threshold(n)
                } else {
                    nonadjacent_pnc_threshold(n)
                },
                mean_sq_degree: sq.estimate,
                mean_sq_degree_ci: Some([sq.ci_low, sq.ci_high]),
                satisfied: None,
            });
            Ok(PncVerdict {
                graph: label.to_string(),
                pair: [e, f],
                pair_class: if adjacent { "adjacent" } else { "non-adjacent" },
                method,
                p_pair,
                p_e,
                p_f,
                margin,
                margin_exact: None,
                ci: Some(ci),
                exact: false,
                orderings: None,
                n_samples: Some(n_samples),
                seed: Some(seed),
                status,
                threshold,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle, lps_gadget, path};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tree_input_is_its_own_mst() {
        let g = path(5);
        let w = WeightAssignment::new(vec![0.4, 0.1, 0.3, 0.2]).unwrap();
        assert_eq!(mst_of(&g, &w).unwrap().ids(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn four_cycle_drops_heaviest() {
        let g = cycle(4).unwrap();
        let w = WeightAssignment::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(mst_of(&g, &w).unwrap().ids(), vec![0, 1, 2]);
        assert_eq!(prim(&g, &w).unwrap().ids(), vec![0, 1, 2]);
    }

    #[test]
    fn ties_and_disconnection_rejected() {
        assert!(WeightAssignment::new(vec![0.1, 0.1]).is_err());
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let w = WeightAssignment::new(vec![0.1, 0.2]).unwrap();
        assert!(matches!(mst_of(&g, &w), Err(Error::Disconnected)));
        assert!(matches!(prim(&g, &w), Err(Error::Disconnected)));
    }

    #[test]
    fn kruskal_agrees_with_prim_on_k4() {
        let g = complete_graph(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let w = WeightAssignment::sample(g.m(), &mut rng);
            assert_eq!(kruskal(&g, &w).unwrap(), prim(&g, &w).unwrap());
        }
    }

    #[test]
    fn monotone_transform_invariance() {
        let g = complete_graph(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let w = WeightAssignment::sample(g.m(), &mut rng);
            let t = mst_of(&g, &w).unwrap();
            for f in [|x: f64| x.exp(), |x: f64| x * x * x - 7.0, |x: f64| (x + 0.1).ln()] {
                assert_eq!(mst_of(&g, &w.map_monotone(f).unwrap()).unwrap(), t);
            }
        }
    }

    #[test]
    fn k4_exact_oracle() {
        let g = complete_graph(4);
        let r = exact_ordering_oracle(&g, &[]).unwrap();
        assert_eq!(r.orderings_evaluated, 720);
        let c = r.counts.as_ref().unwrap();
        let half = BigRational::new(1.into(), 2.into());
        for e in 0..6 {
            assert_eq!(c.edge_probability(e), half);
        }
        assert_eq!(c.edge.iter().sum::<u128>(), 720 * 3);
        let (r1, r2) = r.degree_identity_residuals().unwrap();
        assert!(r1.is_zero() && r2.is_zero());
        assert_eq!(r.distinct_trees, 16);
    }

    #[test]
    fn k5_orbit_symmetry() {
        let r = exact_ordering_oracle(&complete_graph(5), &[]).unwrap();
        assert_eq!(r.orderings_evaluated, 3_628_800);
        let c = r.counts.as_ref().unwrap();
        assert!(c.edge.iter().all(|&x| x == c.edge[0]));
        let (r1, r2) = r.degree_identity_residuals().unwrap();
        assert!(r1.is_zero() && r2.is_zero());
    }

    #[test]
    fn lps_bundle_pair_is_positively_correlated() {
        let gadget = lps_gadget();
        let v = pnc_verdict(&gadget.graph, "lps", 0, 3, PncMethod::Exact, 0, 0).unwrap();
        assert_eq!(v.status, PncStatus::Violated);
        assert_eq!(v.orderings, Some(3_628_800));
        assert!(v.margin > 0.0);
        assert_eq!(v.pair_class, "non-adjacent");
    }

    #[test]
    fn threshold_matches_margin_sign_on_k4() {
        let g = complete_graph(4);
        let (e, f) = find_pair(&g, false).unwrap();
        let v = pnc_verdict(&g, "k4", e, f, PncMethod::Exact, 0, 0).unwrap();
        let t = v.threshold.as_ref().unwrap();
        assert_eq!(t.satisfied, Some(v.status == PncStatus::Holds));
        let (e, f) = find_pair(&g, true).unwrap();
        let v = pnc_verdict(&g, "k4", e, f, PncMethod::Exact, 0, 0).unwrap();
        assert_eq!(v.threshold.unwrap().satisfied, Some(v.status == PncStatus::Holds));
    }

    #[test]
    fn stratified_tracks_exact_on_k5() {
        let g = complete_graph(5);
        let approx = stratified_ordering_oracle(&g, &[], 4000, 9).unwrap();
        assert!(!approx.exact && approx.counts.is_none());
        assert_eq!(approx.orderings_evaluated, 40_000);
        let exact = exact_ordering_oracle(&g, &[]).unwrap();
        assert!((approx.mean_sq_degree - exact.mean_sq_degree).abs() < 0.05);
        let s: f64 = approx.edge_probability.iter().sum();
        assert!((s - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pair_classes_count_parallel_edges() {
        let g = lps_gadget().graph;
        let (adj, non) = ordered_pair_classes(g.n(), g.edges());
        assert_eq!(adj + non, 90);
        // only the two bundles are mutually non-adjacent: 3 * 3 * 2 ordered pairs
        // plus the two matchings among the singles: 2 * 2
        assert_eq!(non, 18 + 4);
    }

    #[test]
    fn mc_moments_on_k4() {
        let g = complete_graph(4);
        let r = mc_mst_moments(&g, 40_000, 1, &[0, 5]).unwrap();
        let exact = exact_ordering_oracle(&g, &[]).unwrap();
        assert!(r.mean_sq_degree.within_sigmas(exact.mean_sq_degree, 5.0));
        assert!(r.p0[0].p0.within_sigmas(0.5, 5.0));
        assert!(r.p1.unwrap().within_sigmas(exact.p1.unwrap(), 5.0));
    }

    #[test]
    fn factorial_table() {
        assert_eq!(FACTORIALS[12], 479_001_600);
        assert_eq!(FACTORIALS[16], 20_922_789_888_000);
    }
}

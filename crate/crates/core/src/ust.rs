//! Uniform spanning trees: sampling, exact degree second moments and the
//! resistance-split bounds on regular graphs.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::TreeTable;
use crate::error::{Error, Result};
use crate::estimator::{merge_all, run_chunks, EstimatorReport, Moments};
use crate::graph::{sharpness_block, EdgeSubset, Graph};
use crate::spectral::{LaplacianSystem, ResistanceBuckets};

/// Uniform spanning tree by loop-erased random walks (Wilson), rooted at 0.
/// Parallel edges are walked with their multiplicity.
pub fn sample_ust<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<EdgeSubset> {
    let n = g.n();
    if n == 0 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut in_tree = vec![false; n];
    let mut next_vertex = vec![0usize; n];
    let mut next_edge = vec![0usize; n];
    let mut tree = EdgeSubset::empty(g.m());
    in_tree[0] = true;
    for start in 1..n {
        let mut u = start;
        while !in_tree[u] {
            let inc = g.incident(u);
            let (w, e) = inc[rng.random_range(0..inc.len())];
            next_vertex[u] = w;
            next_edge[u] = e;
            u = w;
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            tree.insert(next_edge[u]);
            u = next_vertex[u];
        }
    }
    Ok(tree)
}

pub fn sample_ust_seeded(g: &Graph, seed: u64) -> Result<EdgeSubset> {
    sample_ust(g, &mut crate::estimator::chunk_rng(seed, 0))
}

/// Both sides of the second-moment/pair-probability identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub n: usize,
    /// Sum over ordered adjacent distinct pairs of `P[both]`.
    pub adjacent_pair_sum: f64,
    /// Sum over ordered non-adjacent pairs of `P[both]`.
    pub nonadjacent_pair_sum: f64,
    /// `sum_x E[deg(x)^2]`.
    pub sum_sq_degree: f64,
    /// `adjacent_pair_sum - (sum_sq_degree - 2(n-1))`.
    pub adjacent_residual: f64,
    /// `nonadjacent_pair_sum - (n(n-1) - sum_sq_degree)`.
    pub nonadjacent_residual: f64,
}

impl IdentityResiduals {
    pub fn new(n: usize, adjacent: f64, nonadjacent: f64, sum_sq_degree: f64) -> Self {
        let nf = n as f64;
        Self {
            n,
            adjacent_pair_sum: adjacent,
            nonadjacent_pair_sum: nonadjacent,
            sum_sq_degree,
            adjacent_residual: adjacent - (sum_sq_degree - 2.0 * (nf - 1.0)),
            nonadjacent_residual: nonadjacent - (nf * (nf - 1.0) - sum_sq_degree),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.adjacent_residual.abs().max(self.nonadjacent_residual.abs())
    }
}

fn adjacent(g: &Graph, e: usize, f: usize) -> bool {
    let (a, b) = g.edges()[e];
    let (c, d) = g.edges()[f];
    a == c || a == d || b == c || b == d
}

/// Identity check with exact transfer-current pair probabilities; the
/// per-vertex second moments come from the same pair table.
pub fn identity_check_exact(sys: &LaplacianSystem<'_>) -> Result<IdentityResiduals> {
    let g = sys.graph();
    let m = g.m();
    let rows: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .map(|e| {
            let mut adj = 0.0;
            let mut non = 0.0;
            for f in (0..m).filter(|&f| f != e) {
                let p = sys.pair_probability_ust(e, f).expect("valid distinct edges");
                if adjacent(g, e, f) {
                    adj += p;
                } else {
                    non += p;
                }
            }
            (adj, non)
        })
        .collect();
    let (adj, non) = rows
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let sum_sq: f64 = vertex_second_moments(sys).iter().sum();
    Ok(IdentityResiduals::new(g.n(), adj, non, sum_sq))
}

/// Identity check from a brute-force spanning-tree table, where second
/// moments are read off the trees themselves.
pub fn identity_check_enumerated(g: &Graph, table: &TreeTable) -> IdentityResiduals {
    let m = g.m();
    let (mut adj, mut non) = (0.0, 0.0);
    for e in 0..m {
        for f in (0..m).filter(|&f| f != e) {
            let p = table.pair_probability(e, f);
            if adjacent(g, e, f) {
                adj += p;
            } else {
                non += p;
            }
        }
    }
    let sum_sq = table.sum_sq_degree as f64 / table.tree_count as f64;
    IdentityResiduals::new(g.n(), adj, non, sum_sq)
}

/// Identity check on empirical frequencies of sampled trees.
pub fn identity_check_samples(g: &Graph, samples: &[EdgeSubset]) -> IdentityResiduals {
    let k = samples.len() as f64;
    let (mut adj, mut non, mut sq) = (0.0, 0.0, 0.0);
    for s in samples {
        let ids = s.ids();
        for &e in &ids {
            for &f in ids.iter().filter(|&&f| f != e) {
                if adjacent(g, e, f) {
                    adj += 1.0;
                } else {
                    non += 1.0;
                }
            }
        }
        sq += g.subset_degrees(s).iter().map(|&d| (d * d) as f64).sum::<f64>();
    }
    IdentityResiduals::new(g.n(), adj / k, non / k, sq / k)
}

/// `E[deg(x)^2]` for every vertex: incident edge probabilities plus ordered
/// incident pair probabilities. Works on any connected multigraph.
pub fn vertex_second_moments(sys: &LaplacianSystem<'_>) -> Vec<f64> {
    let g = sys.graph();
    (0..g.n())
        .into_par_iter()
        .map(|x| {
            let inc = g.incident(x);
            let mut total = 0.0;
            for (i, &(_, e)) in inc.iter().enumerate() {
                total += sys.edge_probability_ust(e).expect("valid edge");
                for (j, &(_, f)) in inc.iter().enumerate() {
                    if i != j {
                        total += sys.pair_probability_ust(e, f).expect("distinct edges");
                    }
                }
            }
            total
        })
        .collect()
}

/// Closed-form UST statistics on `K_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompleteGraphMoments {
    pub n: usize,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub mean_sq_degree: f64,
}

pub fn kn_ust_moments(n: usize) -> Result<CompleteGraphMoments> {
    if n < 4 {
        return Err(Error::Precondition(format!("kn_ust_moments needs n >= 4, got {n}")));
    }
    let nf = n as f64;
    let p0 = 2.0 / nf;
    let mean_sq_degree = 5.0 - 11.0 / nf + 6.0 / (nf * nf);
    let p1 = (nf * mean_sq_degree - 2.0 * (nf - 1.0)) / (nf * (nf - 1.0) * (nf - 2.0));
    Ok(CompleteGraphMoments {
        n,
        p0,
        p1,
        p2: p0 * p0,
        mean_sq_degree,
    })
}

/// `6 - (d+7)/(d+1)^2 - 2/(d(d+1))`, the regular-graph bound on the mean
/// squared UST degree.
pub fn upper_bound(d: usize) -> f64 {
    let d = d as f64;
    6.0 - (d + 7.0) / ((d + 1.0) * (d + 1.0)) - 2.0 / (d * (d + 1.0))
}

/// Second-moment threshold on `K_{n,n}` for non-adjacent p-NC.
pub fn knn_threshold(n: usize) -> f64 {
    let n = n as f64;
    5.0 - 13.0 / (2.0 * n) + 3.0 / (n * n) - 1.0 / (2.0 * n * n * n)
}

fn require_simple_regular(g: &Graph) -> Result<usize> {
    if !g.is_simple() {
        return Err(Error::NotSimple);
    }
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(d)
}

/// Every ordered wedge `(y, x, z)`: `y != z` both neighbours of `x`.
pub fn ordered_wedges(g: &Graph) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for x in 0..g.n() {
        let nb = g.neighbors(x);
        for &y in &nb {
            for &z in nb.iter().filter(|&&z| z != y) {
                out.push((y, x, z));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondMomentReport {
    pub graph: String,
    pub n: usize,
    pub d: usize,
    /// `2 - 2/n + d(d-1) p1`.
    pub exact_mean_sq_degree: f64,
    /// Mean of the per-vertex values below.
    pub direct_mean_sq_degree: f64,
    pub per_vertex: Vec<f64>,
    /// Probability that both edges of a uniform ordered wedge are in the UST.
    pub p1_adjacent: f64,
    pub upper_bound_value: f64,
    pub identity_residual: f64,
}

/// Exact mean squared UST degree of a simple connected regular graph.
pub fn exact_mean_sq_degree(g: &Graph, label: &str) -> Result<SecondMomentReport> {
    let d = require_simple_regular(g)?;
    let sys = LaplacianSystem::new(g)?;
    let n = g.n();
    let wedges = ordered_wedges(g);
    let p1 = if wedges.is_empty() {
        0.0
    } else {
        let probs: Vec<f64> = wedges
            .par_iter()
            .map(|&(y, x, z)| {
                sys.wedge_resistances(x, y, z, d)
                    .expect("wedge of a simple graph")
                    .pair_probability()
            })
            .collect();
        probs.iter().sum::<f64>() / wedges.len() as f64
    };
    let nf = n as f64;
    let df = d as f64;
    let exact = 2.0 - 2.0 / nf + df * (df - 1.0) * p1;
    let per_vertex = vertex_second_moments(&sys);
    let direct = per_vertex.iter().sum::<f64>() / nf;
    Ok(SecondMomentReport {
        graph: label.to_string(),
        n,
        d,
        exact_mean_sq_degree: exact,
        direct_mean_sq_degree: direct,
        per_vertex,
        p1_adjacent: p1,
        upper_bound_value: upper_bound(d),
        identity_residual: (exact - direct).abs(),
    })
}

/// `p1` under the law of a two-step simple random walk from a uniform start,
/// conditioned on not backtracking.
pub fn wedge_law_p1(g: &Graph) -> Result<f64> {
    let d = require_simple_regular(g)?;
    let sys = LaplacianSystem::new(g)?;
    let n = g.n() as f64;
    let df = d as f64;
    let step = 1.0 / (n * df * df);
    let mut weighted = 0.0;
    let mut mass = 0.0;
    for x0 in 0..g.n() {
        for x1 in g.neighbors(x0) {
            for x2 in g.neighbors(x1) {
                if x2 == x0 {
                    continue;
                }
                let w = sys.wedge_resistances(x1, x0, x2, d)?;
                weighted += step * w.pair_probability();
                mass += step;
            }
        }
    }
    debug_assert!((mass - (1.0 - 1.0 / df)).abs() < 1e-9);
    Ok(weighted / mass)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WedgeExpectationReport {
    pub n: usize,
    pub d: usize,
    pub e_alpha: f64,
    pub e_alpha_closed_form: f64,
    pub e_gamma: f64,
    pub e_gamma_closed_form: f64,
    pub e_k: f64,
    pub e_k_closed_form: f64,
    pub e_alpha_beta: f64,
    pub e_alpha_beta_bound: f64,
    /// Smallest `alpha`, `beta` or `gamma` over all wedges.
    pub min_correction: f64,
    /// Largest `|2K - (a + alpha + beta - gamma)|` over all wedges.
    pub max_split_residual: f64,
}

impl WedgeExpectationReport {
    pub fn max_closed_form_error(&self) -> f64 {
        (self.e_alpha - self.e_alpha_closed_form)
            .abs()
            .max((self.e_gamma - self.e_gamma_closed_form).abs())
            .max((self.e_k - self.e_k_closed_form).abs())
    }
}

pub fn wedge_expectations(g: &Graph) -> Result<WedgeExpectationReport> {
    let d = require_simple_regular(g)?;
    if d < 3 {
        return Err(Error::Precondition(format!("wedge expectations need d >= 3, got {d}")));
    }
    let sys = LaplacianSystem::new(g)?;
    let wedges = ordered_wedges(g);
    let splits: Vec<_> = wedges
        .par_iter()
        .map(|&(y, x, z)| sys.wedge_resistances(x, y, z, d).expect("wedge"))
        .collect();
    let count = splits.len() as f64;
    let mean = |f: &dyn Fn(&crate::spectral::WedgeResistances) -> f64| {
        splits.iter().map(f).sum::<f64>() / count
    };
    let e_alpha = mean(&|w| w.alpha);
    let e_gamma = mean(&|w| w.gamma);
    let e_k = mean(&|w| w.k);
    let e_alpha_beta = mean(&|w| w.alpha * w.beta);
    let min_correction = splits
        .iter()
        .flat_map(|w| [w.alpha, w.beta, w.gamma])
        .fold(f64::INFINITY, f64::min);
    let max_split_residual = splits
        .iter()
        .map(|w| (2.0 * w.k - (w.a + w.alpha + w.beta - w.gamma)).abs())
        .fold(0.0, f64::max);
    let (nf, df) = (g.n() as f64, d as f64);
    let excess = nf - df - 1.0;
    Ok(WedgeExpectationReport {
        n: g.n(),
        d,
        e_alpha,
        e_alpha_closed_form: 2.0 * excess / (nf * df * (df + 1.0)),
        e_gamma,
        e_gamma_closed_form: 4.0 * excess / (nf * (df - 1.0) * (df + 1.0)),
        e_k,
        e_k_closed_form: (nf * df - 2.0 * (nf - 1.0)) / (nf * df * (df - 1.0)),
        e_alpha_beta,
        e_alpha_beta_bound: (df + 2.0) * excess / (nf * df * df * (df + 1.0)),
        min_correction,
        max_split_residual,
    })
}

/// Audit of the coarse constant: `sum_e Reff(e)^2 <= 45|V|/d` and
/// `sum_x E[deg(x)^2] <= 92|V|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantAudit {
    pub graph: String,
    pub n: usize,
    pub d: usize,
    pub sum_reff_sq: f64,
    pub reff_sq_bound: f64,
    pub sum_sq_degree: f64,
    pub sum_sq_degree_bound: f64,
    pub buckets: ResistanceBuckets,
    pub holds: bool,
}

pub fn coarse_constant_check(g: &Graph, label: &str) -> Result<ConstantAudit> {
    let d = require_simple_regular(g)?;
    let sys = LaplacianSystem::new(g)?;
    let reff = sys.edge_resistances();
    let n = g.n() as f64;
    let sum_reff_sq: f64 = reff.iter().map(|r| r * r).sum();
    let reff_sq_bound = 45.0 * n / d as f64;
    let sum_sq_degree: f64 = vertex_second_moments(&sys).iter().sum();
    let buckets = ResistanceBuckets::from_resistances(&reff, g.n(), d)?;
    let holds = sum_reff_sq <= reff_sq_bound && sum_sq_degree <= 92.0 * n && buckets.holds;
    Ok(ConstantAudit {
        graph: label.to_string(),
        n: g.n(),
        d,
        sum_reff_sq,
        reff_sq_bound,
        sum_sq_degree,
        sum_sq_degree_bound: 92.0 * n,
        buckets,
        holds,
    })
}

/// One row of the sharpness sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub d: usize,
    pub q: usize,
    pub n: usize,
    /// `sum_v E[deg(v)^2]` for the UST of a single block.
    pub block_sum_sq_degree: f64,
    /// `block_sum_sq_degree / q`.
    pub block_mean_sq_degree: f64,
    /// `E[deg(port)]` inside the block.
    pub port_mean_degree: f64,
    /// Mean squared UST degree of the full glued graph.
    pub mean_sq_degree: f64,
    pub upper_bound: f64,
    pub gap_to_six: f64,
}

/// Mean squared UST degree of the glued sharpness graph for one `d`, from the
/// block alone: the UST of the glued graph is the product of block USTs plus
/// every bridge, so the centre has degree `d` and each port gains one.
pub fn sharpness_row(d: usize) -> Result<SharpnessRow> {
    let (block, port) = sharpness_block(d)?;
    let sys = LaplacianSystem::new(&block)?;
    let q = block.n();
    let block_sum: f64 = vertex_second_moments(&sys).iter().sum();
    let port_mean: f64 = block
        .incident(port)
        .iter()
        .map(|&(_, e)| sys.edge_probability_ust(e).expect("edge"))
        .sum();
    let n = 1 + d * q;
    let df = d as f64;
    let block_contribution = block_sum + 2.0 * port_mean + 1.0;
    let mean_sq = (df * df + df * block_contribution) / n as f64;
    Ok(SharpnessRow {
        d,
        q,
        n,
        block_sum_sq_degree: block_sum,
        block_mean_sq_degree: block_sum / q as f64,
        port_mean_degree: port_mean,
        mean_sq_degree: mean_sq,
        upper_bound: upper_bound(d),
        gap_to_six: 6.0 - mean_sq,
    })
}

pub fn sharpness_sweep(ds: &[usize]) -> Result<Vec<SharpnessRow>> {
    ds.par_iter().map(|&d| sharpness_row(d)).collect()
}

/// CSV table `d,q,n,mean_sq_degree,upper_bound,gap_to_six,block_mean_sq_degree,port_mean_degree`.
pub fn sharpness_csv(rows: &[SharpnessRow]) -> String {
    let mut out =
        String::from("d,q,n,mean_sq_degree,upper_bound,gap_to_six,block_mean_sq_degree,port_mean_degree\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.d,
            r.q,
            r.n,
            r.mean_sq_degree,
            r.upper_bound,
            r.gap_to_six,
            r.block_mean_sq_degree,
            r.port_mean_degree
        ));
    }
    out
}

/// Monte Carlo mean squared degree of a uniform vertex in the UST.
pub fn mc_mean_sq_degree(g: &Graph, n_samples: u64, seed: u64) -> Result<EstimatorReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n() as f64;
    let parts = run_chunks(n_samples, seed, |rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            let t = sample_ust(g, rng).expect("connected");
            let sq: usize = g.subset_degrees(&t).iter().map(|d| d * d).sum();
            m.push(sq as f64 / n);
        }
        m
    });
    Ok(merge_all(&parts).report(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle, path, petersen, random_regular, sharpness_graph};

    #[test]
    fn complete_graph_closed_forms() {
        let k4 = kn_ust_moments(4).unwrap();
        assert!((k4.mean_sq_degree - 2.625).abs() < 1e-15);
        assert_eq!((k4.p0, k4.p2), (0.5, 0.25));
        assert!((k4.p1 - 3.0 / 16.0).abs() < 1e-15);
        // p1 on K5 cross-checked against the transfer-current determinant
        let k5 = kn_ust_moments(5).unwrap();
        let g = complete_graph(5);
        let sys = LaplacianSystem::new(&g).unwrap();
        assert!((sys.pair_probability_ust(0, 1).unwrap() - k5.p1).abs() < 1e-12);
        assert!((k5.p1 - 3.0 / 25.0).abs() < 1e-15);
        assert!((kn_ust_moments(1_000_000).unwrap().mean_sq_degree - 5.0).abs() < 2e-5);
        assert!(kn_ust_moments(3).is_err());
    }

    #[test]
    fn exact_second_moment_matches_closed_form_on_kn() {
        for n in [4, 6, 9] {
            let r = exact_mean_sq_degree(&complete_graph(n), "K").unwrap();
            let nf = n as f64;
            assert!((r.exact_mean_sq_degree - (5.0 - 11.0 / nf + 6.0 / (nf * nf))).abs() < 1e-10);
            assert!(r.identity_residual < 1e-10);
        }
    }

    #[test]
    fn cycle_second_moment_is_four_minus_six_over_n() {
        for n in 3..=8 {
            let g = cycle(n).unwrap();
            let table = TreeTable::build(&g).unwrap();
            let brute = table.sum_sq_degree as f64 / table.tree_count as f64 / n as f64;
            let exact = exact_mean_sq_degree(&g, "C").unwrap().exact_mean_sq_degree;
            assert!((brute - (4.0 - 6.0 / n as f64)).abs() < 1e-12);
            assert!((exact - brute).abs() < 1e-10);
        }
    }

    #[test]
    fn petersen_is_below_the_bound() {
        let r = exact_mean_sq_degree(&petersen(), "petersen").unwrap();
        assert!(r.exact_mean_sq_degree < r.upper_bound_value);
        assert!(r.exact_mean_sq_degree < 6.0);
    }

    #[test]
    fn rejects_non_regular_and_non_simple() {
        assert!(matches!(exact_mean_sq_degree(&path(4), "P"), Err(Error::NotRegular)));
        let multi = Graph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        assert!(matches!(exact_mean_sq_degree(&multi, "M"), Err(Error::NotSimple)));
    }

    #[test]
    fn upper_bound_values() {
        assert!((upper_bound(3) - (6.0 - 10.0 / 16.0 - 2.0 / 12.0)).abs() < 1e-15);
        assert!((upper_bound(9) - (6.0 - 0.16 - 2.0 / 90.0)).abs() < 1e-15);
        assert!(6.0 - upper_bound(1_000_000) < 1e-5);
    }

    #[test]
    fn knn_threshold_values() {
        assert!((knn_threshold(2) - 2.4375).abs() < 1e-15);
        assert!((knn_threshold(3) - (5.0 - 13.0 / 6.0 + 1.0 / 3.0 - 1.0 / 54.0)).abs() < 1e-15);
        assert!((knn_threshold(1 << 20) - 5.0).abs() < 1e-5);
    }

    #[test]
    fn wedge_law_matches_uniform_wedges() {
        for g in [petersen(), random_regular(16, 3, 4).unwrap()] {
            let a = wedge_law_p1(&g).unwrap();
            let b = exact_mean_sq_degree(&g, "").unwrap().p1_adjacent;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn wedge_expectations_closed_forms() {
        let p = wedge_expectations(&petersen()).unwrap();
        assert!((p.e_alpha - 0.1).abs() < 1e-9);
        assert!(p.e_alpha_beta <= 1.0 / 12.0 + 1e-12);
        assert!((p.e_alpha_beta_bound - 1.0 / 12.0).abs() < 1e-15);
        let rr = wedge_expectations(&random_regular(30, 4, 1).unwrap()).unwrap();
        assert!((rr.e_alpha - 1.0 / 12.0).abs() < 1e-9);
        assert!(rr.max_closed_form_error() < 1e-9);
        assert!(rr.max_split_residual < 1e-12);
        let k = wedge_expectations(&complete_graph(7)).unwrap();
        assert!(k.e_alpha.abs() < 1e-12 && k.e_gamma.abs() < 1e-12);
    }

    #[test]
    fn constant_audit_on_k20() {
        let a = coarse_constant_check(&complete_graph(20), "K20").unwrap();
        assert!((a.sum_reff_sq - 1.9).abs() < 1e-10);
        assert!(a.holds);
    }

    #[test]
    fn sharpness_row_matches_full_graph_for_d5() {
        let row = sharpness_row(5).unwrap();
        let full = sharpness_graph(5).unwrap();
        let exact = exact_mean_sq_degree(&full.graph, "G5").unwrap();
        assert!((row.mean_sq_degree - exact.exact_mean_sq_degree).abs() < 1e-10);
        assert!(row.mean_sq_degree < upper_bound(5));
        // the centre is always saturated
        assert!((exact.per_vertex[full.center] - 25.0).abs() < 1e-9);
    }

    #[test]
    fn tree_input_sampler_returns_the_tree() {
        let g = path(6);
        let t = sample_ust_seeded(&g, 3).unwrap();
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn identities_on_a_tree_are_deterministic() {
        let g = Graph::new(5, vec![(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let table = TreeTable::build(&g).unwrap();
        let r = identity_check_enumerated(&g, &table);
        assert!(r.max_abs() < 1e-12);
        let sys = LaplacianSystem::new(&g).unwrap();
        assert!(identity_check_exact(&sys).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn identities_hold_exactly_on_k4_and_k5() {
        for n in [4, 5] {
            let g = complete_graph(n);
            let sys = LaplacianSystem::new(&g).unwrap();
            assert!(identity_check_exact(&sys).unwrap().max_abs() < 1e-10);
        }
    }
}

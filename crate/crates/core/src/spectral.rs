//! Laplacian-based exact computation: effective resistance, transfer
//! currents, UST edge and pair probabilities, spanning-tree counts.
//!
//! Every edge is a unit resistor. Potentials are obtained from a Cholesky
//! factorization of the Laplacian grounded at the last vertex; the grounded
//! Green matrix is formed once, on first bulk query, and shared read-only.

use std::fmt::Write as _;
use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{complete_graph, EdgeId, Graph, VertexId};

/// Largest vertex count for which [`LaplacianSystem::tree_count`] is exact.
pub const EXACT_TREE_COUNT_MAX_N: usize = 64;

/// Dense Laplacian `D - A`, with `A` counting parallel edges.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    l
}

fn integer_laplacian(g: &Graph) -> Vec<Vec<i64>> {
    let n = g.n();
    let mut l = vec![vec![0i64; n]; n];
    for &(u, v) in g.edges() {
        l[u][u] += 1;
        l[v][v] += 1;
        l[u][v] -= 1;
        l[v][u] -= 1;
    }
    l
}

/// Factorized grounded Laplacian of a connected graph.
pub struct LaplacianSystem<'g> {
    graph: &'g Graph,
    chol: Option<Cholesky<f64, Dyn>>,
    green: OnceLock<DMatrix<f64>>,
}

impl<'g> LaplacianSystem<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        if graph.n() == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = graph.n();
        let chol = if n > 1 {
            let reduced = laplacian(graph).view((0, 0), (n - 1, n - 1)).into_owned();
            Some(Cholesky::new(reduced).ok_or_else(|| {
                Error::Numerical("grounded Laplacian is not positive definite".into())
            })?)
        } else {
            None
        };
        Ok(Self {
            graph,
            chol,
            green: OnceLock::new(),
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Potentials `phi` with `L phi = rhs` and `phi[ground] = 0`.
    /// `rhs` must sum to zero.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.graph.n();
        if rhs.len() != n {
            return Err(Error::Precondition(format!(
                "right-hand side has length {}, expected {n}",
                rhs.len()
            )));
        }
        let total: f64 = rhs.iter().sum();
        let scale = rhs.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        if total.abs() > 1e-12 * scale {
            return Err(Error::Precondition(format!(
                "right-hand side must sum to zero, sums to {total}"
            )));
        }
        let mut phi = vec![0.0; n];
        if let Some(chol) = &self.chol {
            let b = DVector::from_column_slice(&rhs[..n - 1]);
            let x = chol.solve(&b);
            phi[..n - 1].copy_from_slice(x.as_slice());
        }
        Ok(phi)
    }

    /// Grounded Green matrix: `G[(u, v)]` is the potential at `u` when unit
    /// current enters at `v` and leaves at the ground.
    pub fn green(&self) -> &DMatrix<f64> {
        self.green.get_or_init(|| {
            let n = self.graph.n();
            let mut g = DMatrix::zeros(n, n);
            if let Some(chol) = &self.chol {
                let inv = chol.inverse();
                g.view_mut((0, 0), (n - 1, n - 1)).copy_from(&inv);
            }
            g
        })
    }

    fn dipole_form(&self, a: VertexId, b: VertexId, c: VertexId, d: VertexId) -> f64 {
        let g = self.green();
        g[(a, c)] - g[(a, d)] - g[(b, c)] + g[(b, d)]
    }

    pub fn effective_resistance(&self, u: VertexId, v: VertexId) -> Result<f64> {
        self.graph.check_vertex(u)?;
        self.graph.check_vertex(v)?;
        if u == v {
            return Err(Error::Precondition(
                "effective resistance needs distinct vertices".into(),
            ));
        }
        Ok(self.dipole_form(u, v, u, v))
    }

    /// Effective resistance between the endpoints of every edge, by edge id.
    pub fn edge_resistances(&self) -> Vec<f64> {
        self.graph
            .edges()
            .iter()
            .map(|&(u, v)| self.dipole_form(u, v, u, v))
            .collect()
    }

    /// `Y(e, f)`: current through `f` (oriented as stored) when unit current
    /// enters at the first endpoint of `e` and leaves at the second.
    pub fn transfer_current(&self, e: EdgeId, f: EdgeId) -> Result<f64> {
        let (e0, e1) = self.graph.edge(e)?;
        let (f0, f1) = self.graph.edge(f)?;
        Ok(self.dipole_form(e0, e1, f0, f1))
    }

    /// Kirchhoff: `P[e in UST] = Reff(e-, e+)` in the full multigraph, so a
    /// bundle of `k` parallel edges carries total probability `k * Reff`.
    pub fn edge_probability_ust(&self, e: EdgeId) -> Result<f64> {
        self.transfer_current(e, e)
    }

    /// `P[e, f in UST]` as the 2x2 transfer-current determinant.
    pub fn pair_probability_ust(&self, e: EdgeId, f: EdgeId) -> Result<f64> {
        if e == f {
            return Err(Error::Precondition("pair probability needs distinct edges".into()));
        }
        let yee = self.transfer_current(e, e)?;
        let yff = self.transfer_current(f, f)?;
        let yef = self.transfer_current(e, f)?;
        let yfe = self.transfer_current(f, e)?;
        Ok(yee * yff - yef * yfe)
    }

    /// Resistances of the wedge `y - x - z` for a `d`-regular host.
    pub fn wedge_resistances(
        &self,
        x: VertexId,
        y: VertexId,
        z: VertexId,
        d: usize,
    ) -> Result<WedgeResistances> {
        let g = self.graph;
        if y == z || g.multiplicity(x, y) == 0 || g.multiplicity(x, z) == 0 {
            return Err(Error::Precondition(format!(
                "({y}, {z}) are not distinct neighbours of {x}"
            )));
        }
        Ok(WedgeResistances::new(
            self.effective_resistance(x, y)?,
            self.effective_resistance(x, z)?,
            self.effective_resistance(y, z)?,
            d,
        ))
    }

    pub fn foster_sum(&self) -> f64 {
        self.edge_resistances().iter().sum()
    }

    pub fn resistance_buckets(&self, d: usize) -> Result<ResistanceBuckets> {
        ResistanceBuckets::from_resistances(&self.edge_resistances(), self.graph.n(), d)
    }

    /// Number of spanning trees: exact fraction-free elimination up to
    /// [`EXACT_TREE_COUNT_MAX_N`] vertices, Cholesky log-determinant beyond.
    pub fn tree_count(&self) -> TreeCount {
        let n = self.graph.n();
        if n <= EXACT_TREE_COUNT_MAX_N {
            return TreeCount::Exact(exact_tree_count(self.graph));
        }
        let chol = self.chol.as_ref().expect("n > 1");
        let l = chol.l_dirty();
        let log_det: f64 = (0..n - 1).map(|i| 2.0 * l[(i, i)].ln()).sum();
        // per-pivot relative rounding of order n * eps, accumulated over n pivots
        let err = (n as f64).powi(2) * f64::EPSILON * 4.0;
        TreeCount::Approximate {
            ln_value: log_det,
            ln_abs_error: err,
        }
    }

    /// `edge_id,u,v,reff` table.
    pub fn resistance_csv(&self) -> String {
        let mut out = String::from("edge_id,u,v,reff\n");
        for (e, (&(u, v), r)) in self
            .graph
            .edges()
            .iter()
            .zip(self.edge_resistances())
            .enumerate()
        {
            let _ = writeln!(out, "{e},{u},{v},{r:.16e}");
        }
        out
    }
}

/// Spanning-tree count of a graph; zero when disconnected.
pub fn exact_tree_count(g: &Graph) -> BigInt {
    let n = g.n();
    if n <= 1 {
        return BigInt::from(1);
    }
    let full = integer_laplacian(g);
    let a: Vec<Vec<BigInt>> = full[..n - 1]
        .iter()
        .map(|row| row[..n - 1].iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bareiss_determinant(a)
}

/// Determinant by Bareiss fraction-free elimination with row pivoting.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let k = a.len();
    if k == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for i in 0..k {
        if a[i][i].is_zero() {
            match (i + 1..k).find(|&r| !a[r][i].is_zero()) {
                Some(r) => {
                    a.swap(i, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for r in i + 1..k {
            for c in i + 1..k {
                let v = (&a[r][c] * &a[i][i] - &a[r][i] * &a[i][c]) / &prev;
                a[r][c] = v;
            }
            a[r][i] = BigInt::zero();
        }
        prev = a[i][i].clone();
    }
    let det = a[k - 1][k - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TreeCount {
    Exact(#[serde(serialize_with = "ser_bigint")] BigInt),
    /// Natural log of the count with an absolute error estimate.
    Approximate { ln_value: f64, ln_abs_error: f64 },
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl TreeCount {
    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            TreeCount::Exact(v) => Some(v),
            TreeCount::Approximate { .. } => None,
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            TreeCount::Exact(v) if v.is_positive() => {
                let bits = v.bits();
                // shift to keep ~60 significant bits before converting
                let shift = bits.saturating_sub(60);
                let top: BigInt = v >> shift;
                let f: f64 = top.to_string().parse().unwrap_or(f64::NAN);
                f.ln() + shift as f64 * std::f64::consts::LN_2
            }
            TreeCount::Exact(_) => f64::NEG_INFINITY,
            TreeCount::Approximate { ln_value, .. } => *ln_value,
        }
    }
}

/// The three resistances of a wedge and their split around the regular
/// baseline `a = 2 / (d + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeResistances {
    pub r1: f64,
    pub r2: f64,
    pub t: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Transfer current between the two edges oriented away from the centre.
    pub k: f64,
}

impl WedgeResistances {
    pub fn new(r1: f64, r2: f64, t: f64, d: usize) -> Self {
        let a = 2.0 / (d as f64 + 1.0);
        Self {
            r1,
            r2,
            t,
            a,
            alpha: r1 - a,
            beta: r2 - a,
            gamma: t - a,
            k: (r1 + r2 - t) / 2.0,
        }
    }

    /// Probability that both wedge edges lie in the UST: `r1 r2 - K^2`.
    pub fn pair_probability(&self) -> f64 {
        self.r1 * self.r2 - self.k * self.k
    }
}

/// Edge counts per resistance level `E_0, ..., E_M`, `M = floor(log_3 d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResistanceBuckets {
    pub d: usize,
    pub levels: usize,
    pub counts: Vec<usize>,
    /// `|V| / (3^i - 2)` for `i >= 1`; `None` for level 0.
    pub caps: Vec<Option<f64>>,
    pub holds: bool,
}

impl ResistanceBuckets {
    pub fn from_resistances(reff: &[f64], n: usize, d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::Precondition(format!("resistance buckets need d >= 3, got {d}")));
        }
        let mut levels = 0;
        while 3usize.pow(levels as u32 + 1) <= d {
            levels += 1;
        }
        let df = d as f64;
        let mut counts = vec![0; levels + 1];
        for &r in reff {
            let i = if r <= 3.0 / df {
                0
            } else {
                // largest i <= levels with 3^i / d < r
                (1..=levels)
                    .rev()
                    .find(|&i| 3f64.powi(i as i32) / df < r)
                    .unwrap_or(levels)
            };
            counts[i] += 1;
        }
        let caps: Vec<_> = (0..=levels)
            .map(|i| (i > 0).then(|| n as f64 / (3f64.powi(i as i32) - 2.0)))
            .collect();
        let holds = counts
            .iter()
            .zip(&caps)
            .all(|(&c, cap)| cap.is_none_or(|cap| c as f64 <= cap));
        Ok(Self {
            d,
            levels,
            counts,
            caps,
            holds,
        })
    }
}

/// Effective resistance in `G = K_n \ H` through the complement route
/// `(1/n) (I - L_H / n)^{-1}`, valid when `H` has maximum degree at most 2,
/// `n >= 5` and `G` is connected.
pub fn complement_route_resistance(g: &Graph, u: VertexId, v: VertexId) -> Result<f64> {
    let n = g.n();
    if n < 5 || !g.is_simple() {
        return Err(Error::Precondition(
            "complement route needs a simple graph on at least 5 vertices".into(),
        ));
    }
    let h_edges: Vec<_> = complete_graph(n)
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| g.multiplicity(a, b) == 0)
        .collect();
    let h = Graph::new(n, h_edges)?;
    if h.degrees().into_iter().max().unwrap_or(0) > 2 {
        return Err(Error::Precondition("complement has a vertex of degree > 2".into()));
    }
    let nf = n as f64;
    let m = DMatrix::identity(n, n) - laplacian(&h) / nf;
    let mut rhs = DVector::zeros(n);
    rhs[u] = 1.0;
    rhs[v] = -1.0;
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("I - L_H / n is singular".into()))?
        / nf;
    Ok(x[u] - x[v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, cycle, lps_gadget, path, random_regular};

    #[test]
    fn complete_graph_resistance_is_two_over_n() {
        let g = complete_graph(5);
        let sys = LaplacianSystem::new(&g).unwrap();
        assert!((sys.effective_resistance(0, 3).unwrap() - 0.4).abs() < 1e-12);
        assert!((sys.foster_sum() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn series_and_single_edge() {
        let g = path(2);
        let sys = LaplacianSystem::new(&g).unwrap();
        assert!((sys.effective_resistance(0, 1).unwrap() - 1.0).abs() < 1e-12);
        let g = path(3);
        let sys = LaplacianSystem::new(&g).unwrap();
        assert!((sys.effective_resistance(0, 2).unwrap() - 2.0).abs() < 1e-12);
        assert!((sys.foster_sum() - 2.0).abs() < 1e-12);
        assert!((sys.edge_probability_ust(0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        assert!(matches!(LaplacianSystem::new(&g), Err(Error::Disconnected)));
        let k3 = complete_graph(3);
        let sys = LaplacianSystem::new(&k3).unwrap();
        assert!(sys.effective_resistance(1, 1).is_err());
        assert!(sys.pair_probability_ust(0, 0).is_err());
        assert!(sys.wedge_resistances(0, 1, 1, 2).is_err());
        assert!(sys.solve(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn tree_counts() {
        let cases = [
            (complete_graph(4), 16),
            (cycle(4).unwrap(), 4),
            (complete_bipartite(3), 81),
            (complete_graph(9), 4_782_969),
        ];
        for (g, want) in cases {
            let sys = LaplacianSystem::new(&g).unwrap();
            assert_eq!(sys.tree_count().exact().unwrap(), &BigInt::from(want));
        }
        let disconnected = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(exact_tree_count(&disconnected).is_zero());
    }

    #[test]
    fn large_tree_count_is_approximate_and_close() {
        // Cayley: ln(70^68)
        let g = complete_graph(70);
        let sys = LaplacianSystem::new(&g).unwrap();
        let tc = sys.tree_count();
        assert!(tc.exact().is_none());
        assert!((tc.ln() - 68.0 * 70f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn bundle_edge_probability_is_endpoint_resistance() {
        let gadget = lps_gadget();
        let sys = LaplacianSystem::new(&gadget.graph).unwrap();
        let r = sys.effective_resistance(0, 1).unwrap();
        for e in gadget.bundles[0] {
            assert!((sys.edge_probability_ust(e).unwrap() - r).abs() < 1e-12);
        }
        assert!((sys.foster_sum() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn wedge_on_k4() {
        let g = complete_graph(4);
        let sys = LaplacianSystem::new(&g).unwrap();
        let w = sys.wedge_resistances(0, 1, 2, 3).unwrap();
        for r in [w.r1, w.r2, w.t] {
            assert!((r - 0.5).abs() < 1e-12);
        }
        assert!((w.k - 0.25).abs() < 1e-12);
        assert!(w.alpha.abs() < 1e-12 && w.gamma.abs() < 1e-12);
        assert!((w.pair_probability() - 3.0 / 16.0).abs() < 1e-12);
        // edges (0,1) and (0,2) are ids 0 and 1
        assert!((sys.pair_probability_ust(0, 1).unwrap() - 3.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn non_adjacent_pairs_in_complete_graph_are_independent() {
        let g = complete_graph(7);
        let sys = LaplacianSystem::new(&g).unwrap();
        // (0,1) is edge 0, (2,3) is edge 11
        assert_eq!(g.edge(11).unwrap(), (2, 3));
        let p = sys.pair_probability_ust(0, 11).unwrap();
        assert!((p - (2.0 / 7.0f64).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn bridge_pair_factorizes() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let sys = LaplacianSystem::new(&g).unwrap();
        let pf = sys.edge_probability_ust(0).unwrap();
        assert!((sys.pair_probability_ust(3, 0).unwrap() - pf).abs() < 1e-12);
    }

    #[test]
    fn solve_residual_is_small() {
        let g = random_regular(40, 4, 3).unwrap();
        let sys = LaplacianSystem::new(&g).unwrap();
        let mut rhs = vec![0.0; 40];
        rhs[3] = 1.0;
        rhs[17] = -1.0;
        let phi = sys.solve(&rhs).unwrap();
        let l = laplacian(&g);
        let res = &l * DVector::from_vec(phi) - DVector::from_vec(rhs);
        assert!(res.norm() <= 1e-11 * 2f64.sqrt());
    }

    #[test]
    fn node_law_sums_to_one() {
        let g = random_regular(30, 4, 21).unwrap();
        let sys = LaplacianSystem::new(&g).unwrap();
        for e in [0, 7, 33] {
            let (x, _) = g.edge(e).unwrap();
            let total: f64 = g
                .incident(x)
                .iter()
                .map(|&(_, f)| {
                    let y = sys.transfer_current(e, f).unwrap();
                    if g.edge(f).unwrap().0 == x { y } else { -y }
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn buckets_on_complete_graph() {
        let g = complete_graph(10);
        let sys = LaplacianSystem::new(&g).unwrap();
        let b = sys.resistance_buckets(9).unwrap();
        assert_eq!(b.levels, 2);
        assert_eq!(b.counts, vec![45, 0, 0]);
        assert!(b.holds);
        assert!(sys.resistance_buckets(2).is_err());
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let g = complete_graph(3);
        let sys = LaplacianSystem::new(&g).unwrap();
        let csv = sys.resistance_csv();
        assert!(csv.starts_with("edge_id,u,v,reff\n0,0,1,"));
        assert_eq!(csv.lines().count(), 4);
    }
}

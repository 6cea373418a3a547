//! Graphic-matroid rank and membership in the forest polytope
//! `{x >= 0 : x(S) <= r(S) for all S}`.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{random_regular, EdgeSubset, Graph};
use crate::spectral::LaplacianSystem;

pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Largest vertex count for the exhaustive subset check.
pub const EXHAUSTIVE_VERTEX_CAP: usize = 20;

/// Rank function of the graphic matroid of a host graph.
#[derive(Debug, Clone, Copy)]
pub struct RankOracle<'g> {
    graph: &'g Graph,
}

impl<'g> RankOracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self { graph }
    }

    /// `|V| - c(V, S)`, isolated vertices counted as components.
    pub fn rank(&self, s: &EdgeSubset) -> Result<usize> {
        Ok(self.graph.n() - self.graph.component_count(s)?)
    }

    /// `c(S)`.
    pub fn components(&self, s: &EdgeSubset) -> Result<usize> {
        self.graph.component_count(s)
    }
}

/// A vertex set `U` whose induced rank inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolatedConstraint {
    pub vertices: Vec<usize>,
    pub lhs: f64,
    pub rank: usize,
    /// `rank - lhs`; negative.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub member: bool,
    /// `"exhaustive"` or `"heuristic"`.
    pub method: &'static str,
    pub subsets_checked: u64,
    /// Smallest `rank(E(U)) - x(E(U))` seen.
    pub min_slack: f64,
    pub violated: Option<ViolatedConstraint>,
}

#[derive(Debug, Clone, Copy)]
struct SubsetResult {
    slack: f64,
    lhs: f64,
    rank: usize,
    mask: u64,
}

fn induced_slack(g: &Graph, x: &[f64], in_u: impl Fn(usize) -> bool, size: usize) -> (f64, usize) {
    let mut dsu = DisjointSets::new(g.n());
    let mut lhs = 0.0;
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if in_u(a) && in_u(b) {
            lhs += x[e];
            dsu.union(a, b);
        }
    }
    // vertices outside U stay singletons in the DSU
    let comps_in_u = dsu.components() - (g.n() - size);
    (lhs, size - comps_in_u)
}

fn check_point(g: &Graph, x: &[f64]) -> Result<()> {
    if x.len() != g.m() {
        return Err(Error::Precondition(format!(
            "point has {} coordinates for {} edges",
            x.len(),
            g.m()
        )));
    }
    if let Some(e) = x.iter().position(|v| !(*v >= 0.0)) {
        return Err(Error::Precondition(format!(
            "coordinate {e} is negative or not a number: {}",
            x[e]
        )));
    }
    Ok(())
}

fn verdict_from(best: SubsetResult, checked: u64, method: &'static str, n: usize) -> MembershipVerdict {
    let member = best.slack >= -MEMBERSHIP_TOL;
    MembershipVerdict {
        member,
        method,
        subsets_checked: checked,
        min_slack: best.slack,
        violated: (!member).then(|| ViolatedConstraint {
            vertices: (0..n).filter(|v| best.mask >> v & 1 == 1).collect(),
            lhs: best.lhs,
            rank: best.rank,
            slack: best.slack,
        }),
    }
}

/// Exact membership by enumerating every vertex set `U` with `|U| >= 2`;
/// the induced inequalities `x(E(U)) <= |U| - c(G[U])` imply the rest.
pub fn membership(g: &Graph, x: &[f64]) -> Result<MembershipVerdict> {
    check_point(g, x)?;
    let n = g.n();
    if n > EXHAUSTIVE_VERTEX_CAP {
        return Err(Error::CapExceeded(format!(
            "exhaustive membership handles at most {EXHAUSTIVE_VERTEX_CAP} vertices, got {n}"
        )));
    }
    let start = SubsetResult { slack: f64::INFINITY, lhs: 0.0, rank: 0, mask: 0 };
    // split on the top bits so the chunks are independent
    let split = n.min(6);
    let low_bits = n - split;
    let best = (0u64..1 << split)
        .into_par_iter()
        .map(|high| {
            let mut best = start;
            for low in 0u64..1 << low_bits {
                let mask = high << low_bits | low;
                let size = mask.count_ones() as usize;
                if size < 2 {
                    continue;
                }
                let (lhs, rank) = induced_slack(g, x, |v| mask >> v & 1 == 1, size);
                let slack = rank as f64 - lhs;
                if slack < best.slack {
                    best = SubsetResult { slack, lhs, rank, mask };
                }
            }
            best
        })
        .reduce(|| start, |a, b| if b.slack < a.slack { b } else { a });
    let checked = (1u64 << n) - 1 - n as u64;
    Ok(verdict_from(best, checked, "exhaustive", n))
}

/// Randomized search for a violated induced inequality on hosts too large
/// for [`membership`]. Grows connected vertex sets from random seeds. A
/// `member` answer here is not a proof.
pub fn membership_heuristic(g: &Graph, x: &[f64], trials: u64, seed: u64) -> Result<MembershipVerdict> {
    check_point(g, x)?;
    let n = g.n();
    if n > 64 {
        return Err(Error::CapExceeded(format!("heuristic membership handles at most 64 vertices, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = SubsetResult { slack: f64::INFINITY, lhs: 0.0, rank: 0, mask: 0 };
    let mut checked = 0;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut candidates = vec![full];
    for _ in 0..trials {
        let target = rng.random_range(2..=n.max(2));
        let mut mask = 1u64 << rng.random_range(0..n);
        let mut frontier: Vec<usize> = Vec::new();
        while (mask.count_ones() as usize) < target {
            frontier.clear();
            for v in (0..n).filter(|v| mask >> v & 1 == 1) {
                frontier.extend(g.incident(v).iter().map(|&(w, _)| w).filter(|w| mask >> w & 1 == 0));
            }
            match frontier.choose(&mut rng) {
                Some(&w) => mask |= 1 << w,
                None => break,
            }
        }
        candidates.push(mask);
        if candidates.len() >= 1024 {
            check_candidates(g, x, &mut candidates, &mut best, &mut checked);
        }
    }
    check_candidates(g, x, &mut candidates, &mut best, &mut checked);
    Ok(verdict_from(best, checked, "heuristic", n))
}

fn check_candidates(g: &Graph, x: &[f64], c: &mut Vec<u64>, best: &mut SubsetResult, checked: &mut u64) {
    for &mask in c.iter() {
        let size = mask.count_ones() as usize;
        if size < 2 {
            continue;
        }
        *checked += 1;
        let (lhs, rank) = induced_slack(g, x, |v| mask >> v & 1 == 1, size);
        let slack = rank as f64 - lhs;
        if slack < best.slack {
            *best = SubsetResult { slack, lhs, rank, mask };
        }
    }
    c.clear();
}

/// Exhaustive up to 20 vertices, heuristic beyond.
pub fn membership_auto(g: &Graph, x: &[f64], seed: u64) -> Result<MembershipVerdict> {
    if g.n() <= EXHAUSTIVE_VERTEX_CAP {
        membership(g, x)
    } else {
        membership_heuristic(g, x, 20_000, seed)
    }
}

fn regular_degree_checked(g: &Graph) -> Result<usize> {
    if !g.is_simple() {
        return Err(Error::NotSimple);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if d < 3 {
        return Err(Error::Precondition(format!("need degree at least 3, got {d}")));
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaCheck {
    pub n: usize,
    pub d: usize,
    /// `Reff(e) - 2/(d+1)` per edge.
    pub alpha: Vec<f64>,
    pub min_alpha: f64,
    pub alpha_nonnegative: bool,
    pub alpha_membership: MembershipVerdict,
    /// The resistance vector itself is in the polytope, which dominates alpha.
    pub resistance_membership: MembershipVerdict,
    pub passed: bool,
}

/// Checks that `alpha_e = Reff(e) - 2/(d+1)` lies in the forest polytope of
/// a `d`-regular host.
pub fn alpha_membership_check(g: &Graph, seed: u64) -> Result<AlphaCheck> {
    let d = regular_degree_checked(g)?;
    let reff = LaplacianSystem::new(g)?.edge_resistances();
    let shift = 2.0 / (d as f64 + 1.0);
    let alpha: Vec<f64> = reff.iter().map(|r| r - shift).collect();
    let min_alpha = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    let alpha_nonnegative = min_alpha >= -MEMBERSHIP_TOL;
    // clamp rounding noise on K_n, where alpha vanishes identically
    let clamped: Vec<f64> = alpha.iter().map(|a| a.max(0.0)).collect();
    let alpha_membership = membership_auto(g, &clamped, seed)?;
    let resistance_membership = membership_auto(g, &reff, seed)?;
    let passed = alpha_nonnegative && alpha_membership.member && resistance_membership.member;
    Ok(AlphaCheck {
        n: g.n(),
        d,
        alpha,
        min_alpha,
        alpha_nonnegative,
        alpha_membership,
        resistance_membership,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FosterAlpha {
    pub total: f64,
    /// `(n - d - 1) / (d + 1)`.
    pub expected: f64,
    pub abs_error: f64,
}

pub fn foster_alpha_total(g: &Graph) -> Result<FosterAlpha> {
    let d = regular_degree_checked(g)?;
    let reff = LaplacianSystem::new(g)?.edge_resistances();
    let shift = 2.0 / (d as f64 + 1.0);
    let total: f64 = reff.iter().map(|r| r - shift).sum();
    let expected = (g.n() as f64 - d as f64 - 1.0) / (d as f64 + 1.0);
    Ok(FosterAlpha {
        total,
        expected,
        abs_error: (total - expected).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ForestDegreeCheck {
    pub edges: usize,
    /// Tree components with at least one edge.
    pub components: usize,
    pub sum_sq_degree: usize,
    /// `(d + 2) |F|`.
    pub bound: usize,
    /// `sum over touched x of (D_x - 1)`; equals `edges - components`.
    pub excess_degree: usize,
    pub holds: bool,
}

/// `sum_x deg(x; F)^2 <= (d + 2)|F|` for a forest of maximum degree `d`.
pub fn forest_degree_inequality(g: &Graph, f: &EdgeSubset, d: usize) -> Result<ForestDegreeCheck> {
    if !g.is_forest(f)? {
        return Err(Error::Precondition("edge set contains a cycle".into()));
    }
    let deg = g.subset_degrees(f);
    if let Some(x) = deg.iter().position(|&k| k > d) {
        return Err(Error::Precondition(format!(
            "vertex {x} has forest degree {} above the cap {d}",
            deg[x]
        )));
    }
    let edges = f.len();
    let touched = deg.iter().filter(|&&k| k > 0).count();
    // a tree with k edges has k + 1 vertices
    let components = touched - edges;
    let sum_sq_degree = deg.iter().map(|k| k * k).sum();
    let excess_degree = deg.iter().filter(|&&k| k > 0).map(|k| k - 1).sum();
    let bound = (d + 2) * edges;
    Ok(ForestDegreeCheck {
        edges,
        components,
        sum_sq_degree,
        bound,
        excess_degree,
        holds: sum_sq_degree <= bound && excess_degree == edges - components,
    })
}

/// Random forest: edges in random order, each kept with probability
/// `keep` when it joins two components.
pub fn random_forest<R: Rng + ?Sized>(g: &Graph, keep: f64, rng: &mut R) -> EdgeSubset {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.shuffle(rng);
    let mut dsu = DisjointSets::new(g.n());
    let mut f = EdgeSubset::empty(g.m());
    for e in order {
        let (u, v) = g.edges()[e];
        if rng.random::<f64>() < keep && dsu.union(u, v) {
            f.insert(e);
        }
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForestAudit {
    pub forests: u64,
    pub failures: u64,
    /// Largest `sum deg^2 / ((d + 2)|F|)` seen.
    pub max_ratio: f64,
}

/// Checks the forest inequality on random forests of random regular hosts.
pub fn forest_audit(count: u64, seed: u64) -> Result<ForestAudit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hosts = [(12, 3), (16, 4), (20, 5), (30, 6), (40, 3)];
    let mut graphs = Vec::new();
    for (i, &(n, d)) in hosts.iter().enumerate() {
        graphs.push((random_regular(n, d, seed.wrapping_add(i as u64))?, d));
    }
    let mut audit = ForestAudit { forests: 0, failures: 0, max_ratio: 0.0 };
    for i in 0..count {
        let (g, d) = &graphs[i as usize % graphs.len()];
        let keep = rng.random_range(0.05..=1.0);
        let f = random_forest(g, keep, &mut rng);
        let c = forest_degree_inequality(g, &f, *d)?;
        audit.forests += 1;
        if !c.holds {
            audit.failures += 1;
        }
        if c.edges > 0 {
            audit.max_ratio = audit.max_ratio.max(c.sum_sq_degree as f64 / c.bound as f64);
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle, petersen};

    #[test]
    fn rank_basics() {
        let g = complete_graph(4);
        let r = RankOracle::new(&g);
        assert_eq!(r.rank(&EdgeSubset::full(6)).unwrap(), 3);
        assert_eq!(r.rank(&EdgeSubset::empty(6)).unwrap(), 0);
        // edges 0,1,3 are (0,1),(0,2),(1,2)
        assert_eq!(r.rank(&EdgeSubset::from_ids(6, [0, 1, 3]).unwrap()).unwrap(), 2);
    }

    #[test]
    fn membership_small_cases() {
        let g = complete_graph(4);
        assert!(membership(&g, &[0.0; 6]).unwrap().member);
        let tree = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        assert!(membership(&g, &tree).unwrap().member);
        let tri = [1.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        let v = membership(&g, &tri).unwrap();
        assert!(!v.member);
        let bad = v.violated.unwrap();
        assert_eq!(bad.vertices, vec![0, 1, 2]);
        assert_eq!(bad.rank, 2);
        assert!((bad.slack + 1.0).abs() < 1e-12);
        assert!(membership(&g, &[-0.1, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn alpha_vanishes_on_complete_graphs() {
        let c = alpha_membership_check(&complete_graph(7), 0).unwrap();
        assert!(c.passed);
        assert!(c.alpha.iter().all(|a| a.abs() < 1e-12));
        assert!(foster_alpha_total(&complete_graph(7)).unwrap().abs_error < 1e-9);
    }

    #[test]
    fn petersen_alpha() {
        let g = petersen();
        let c = alpha_membership_check(&g, 0).unwrap();
        assert!(c.passed);
        assert_eq!(c.alpha_membership.subsets_checked, 1024 - 11);
        let f = foster_alpha_total(&g).unwrap();
        assert!((f.total - 1.5).abs() < 1e-9);
    }

    #[test]
    fn alpha_needs_regular() {
        let g = crate::graph::path(5);
        assert!(alpha_membership_check(&g, 0).is_err());
        assert!(alpha_membership_check(&cycle(6).unwrap(), 0).is_err());
    }

    #[test]
    fn forest_inequality_examples() {
        let g = complete_graph(6);
        let single = EdgeSubset::from_ids(g.m(), [0]).unwrap();
        let c = forest_degree_inequality(&g, &single, 3).unwrap();
        assert_eq!((c.sum_sq_degree, c.bound, c.components), (2, 5, 1));
        // star at vertex 0 with 5 leaves
        let star = EdgeSubset::from_ids(g.m(), 0..5).unwrap();
        let c = forest_degree_inequality(&g, &star, 5).unwrap();
        assert_eq!(c.sum_sq_degree, 25 + 5);
        assert_eq!(c.bound, 35);
        assert!(c.holds);
        assert!(forest_degree_inequality(&g, &star, 4).is_err());
    }

    #[test]
    fn small_forest_audit() {
        let a = forest_audit(500, 3).unwrap();
        assert_eq!(a.failures, 0);
        assert!(a.max_ratio <= 1.0);
    }

    #[test]
    fn heuristic_finds_a_dense_violation() {
        let g = complete_graph(24);
        let x = vec![0.2; g.m()];
        // whole graph: 0.2 * 276 = 55.2 > 23
        let v = membership_heuristic(&g, &x, 200, 1).unwrap();
        assert!(!v.member);
        assert_eq!(v.method, "heuristic");
    }
}

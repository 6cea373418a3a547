//! Finite multigraphs, the generator families used throughout the crate, and
//! structural queries.
//!
//! Vertices are `0..n`, edges are `0..m` in insertion order. Parallel edges
//! are allowed; self-loops are rejected at construction.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// An immutable finite multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    /// `adj[v]` lists `(neighbor, edge id)` for every edge incident to `v`.
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::InvalidVertex { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {id} is a self-loop at {u}")));
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        Ok(Self { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Result<(VertexId, VertexId)> {
        self.edges
            .get(e)
            .copied()
            .ok_or(Error::InvalidEdge { edge: e, m: self.m() })
    }

    pub fn incident(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, n: self.n })
        }
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.adj[v].len())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Number of parallel edges joining `u` and `v`.
    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        self.adj[u].iter().filter(|&&(w, _)| w == v).count()
    }

    /// Distinct neighbours of `v` in ascending order.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<_> = self.adj[v].iter().map(|&(w, _)| w).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first()?.len();
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.m());
        self.edges
            .iter()
            .all(|&(u, v)| seen.insert((u.min(v), u.max(v))))
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_count(&EdgeSubset::full(self.m())).unwrap_or(0) == 1
    }

    /// Components of the spanning subgraph `(V, S)`, isolated vertices included.
    pub fn component_count(&self, s: &EdgeSubset) -> Result<usize> {
        self.check_subset(s)?;
        let mut dsu = DisjointSets::new(self.n);
        for e in s.iter() {
            let (u, v) = self.edges[e];
            dsu.union(u, v);
        }
        Ok(dsu.components())
    }

    pub fn is_forest(&self, s: &EdgeSubset) -> Result<bool> {
        self.check_subset(s)?;
        let mut dsu = DisjointSets::new(self.n);
        Ok(s.iter().all(|e| {
            let (u, v) = self.edges[e];
            dsu.union(u, v)
        }))
    }

    pub fn is_spanning_tree(&self, s: &EdgeSubset) -> Result<bool> {
        Ok(s.len() + 1 == self.n && self.is_forest(s)?)
    }

    /// Degree of every vertex inside the subgraph `(V, S)`.
    pub fn subset_degrees(&self, s: &EdgeSubset) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in s.iter() {
            let (u, v) = self.edges[e];
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    fn check_subset(&self, s: &EdgeSubset) -> Result<()> {
        if s.universe() != self.m() {
            return Err(Error::Precondition(format!(
                "edge subset over {} edges used with a graph of {} edges",
                s.universe(),
                self.m()
            )));
        }
        Ok(())
    }

    /// Bridge edges, found by an iterative lowlink DFS that distinguishes
    /// parallel edges by id.
    pub fn bridges(&self) -> EdgeSubset {
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut out = EdgeSubset::empty(self.m());
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // (vertex, edge used to enter it, next adjacency index)
            let mut stack = vec![(root, usize::MAX, 0usize)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(top) = stack.last_mut() {
                let (v, via, idx) = *top;
                if idx < self.adj[v].len() {
                    top.2 += 1;
                    let (w, e) = self.adj[v][idx];
                    if e == via {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, e, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            out.insert(via);
                        }
                    }
                }
            }
        }
        out
    }

    /// Line-based text form: header `n m`, then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `n m` header".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header announces {m} edges but {} were listed",
                edges.len()
            )));
        }
        Graph::new(n, edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Parse(format!("expected two integers, got `{line}`"))),
    }
}

/// A subset of the edges of some host graph, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeSubset {
    mask: Vec<bool>,
}

impl EdgeSubset {
    pub fn empty(m: usize) -> Self {
        Self { mask: vec![false; m] }
    }

    pub fn full(m: usize) -> Self {
        Self { mask: vec![true; m] }
    }

    pub fn from_ids(m: usize, ids: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let mut s = Self::empty(m);
        for e in ids {
            if e >= m {
                return Err(Error::InvalidEdge { edge: e, m });
            }
            s.mask[e] = true;
        }
        Ok(s)
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn insert(&mut self, e: EdgeId) {
        self.mask[e] = true;
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.mask.get(e).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn ids(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges).expect("complete graph is valid")
}

/// `K_{n,n}` with sides `0..n` and `n..2n`.
pub fn complete_bipartite(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in n..2 * n {
            edges.push((u, v));
        }
    }
    Graph::new(2 * n, edges).expect("complete bipartite graph is valid")
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Precondition(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path is valid")
}

pub fn petersen() -> Graph {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    Graph::new(10, edges).expect("Petersen graph is valid")
}

/// `K_4` with two non-adjacent edges each tripled.
#[derive(Debug, Clone)]
pub struct LpsGadget {
    pub graph: Graph,
    /// Edge ids of the two parallel bundles: `{0,1}` and `{2,3}`.
    pub bundles: [[EdgeId; 3]; 2],
}

pub fn lps_gadget() -> LpsGadget {
    let edges = vec![
        (0, 1),
        (0, 1),
        (0, 1),
        (2, 3),
        (2, 3),
        (2, 3),
        (0, 2),
        (0, 3),
        (1, 2),
        (1, 3),
    ];
    LpsGadget {
        graph: Graph::new(4, edges).expect("gadget is valid"),
        bundles: [[0, 1, 2], [3, 4, 5]],
    }
}

fn check_sharpness_degree(d: usize) -> Result<()> {
    if d < 5 || d % 2 == 0 {
        return Err(Error::Precondition(format!(
            "sharpness construction needs an odd degree >= 5, got {d}"
        )));
    }
    Ok(())
}

/// Deleted edges of the one-port block on `q = d + 2` vertices: `{o,a}`,
/// `{o,b}` and the matching `(3,4), (5,6), ...` on the remaining vertices,
/// with `o = 0`, `a = 1`, `b = 2`.
pub fn sharpness_deleted_edges(d: usize) -> Result<Vec<(VertexId, VertexId)>> {
    check_sharpness_degree(d)?;
    let q = d + 2;
    let mut deleted = vec![(0, 1), (0, 2)];
    deleted.extend((3..q).step_by(2).map(|u| (u, u + 1)));
    Ok(deleted)
}

/// One-port dense block: `K_{d+2}` minus the edges of
/// [`sharpness_deleted_edges`]. Returns the block and its port (vertex 0).
pub fn sharpness_block(d: usize) -> Result<(Graph, VertexId)> {
    let deleted = sharpness_deleted_edges(d)?;
    let q = d + 2;
    let edges = complete_graph(q)
        .edges()
        .iter()
        .copied()
        .filter(|e| !deleted.contains(e))
        .collect();
    let block = Graph::new(q, edges)?;
    debug_assert!(block.is_connected());
    Ok((block, 0))
}

/// `d` blocks attached to a central vertex through their ports.
#[derive(Debug, Clone)]
pub struct SharpnessGraph {
    pub graph: Graph,
    pub d: usize,
    /// Vertices per block, `d + 2`.
    pub q: usize,
    pub center: VertexId,
    /// Port of block `i` is `ports[i] = i * q`.
    pub ports: Vec<VertexId>,
    /// Ids of the `d` bridge edges `{c, o_i}`.
    pub bridge_edges: Vec<EdgeId>,
}

pub fn sharpness_graph(d: usize) -> Result<SharpnessGraph> {
    let (block, port) = sharpness_block(d)?;
    let q = d + 2;
    let center = d * q;
    let mut edges = Vec::with_capacity(d * block.m() + d);
    for i in 0..d {
        let off = i * q;
        edges.extend(block.edges().iter().map(|&(u, v)| (u + off, v + off)));
    }
    let first_bridge = edges.len();
    let ports: Vec<_> = (0..d).map(|i| i * q + port).collect();
    edges.extend(ports.iter().map(|&o| (center, o)));
    let graph = Graph::new(center + 1, edges)?;
    Ok(SharpnessGraph {
        graph,
        d,
        q,
        center,
        ports,
        bridge_edges: (first_bridge..first_bridge + d).collect(),
    })
}

/// Attempt budget for [`random_regular`].
pub fn random_regular_attempt_cap(n: usize, d: usize) -> usize {
    (10 * n * d).max(1_000_000)
}

/// Uniform simple connected `d`-regular graph on `n` vertices, by rejection
/// from the configuration model. Each attempt aborts at the first loop or
/// repeated pair.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d == 0 || d >= n || (n * d) % 2 != 0 {
        return Err(Error::Precondition(format!(
            "random_regular needs 1 <= d < n and n*d even, got n={n}, d={d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
    let cap = random_regular_attempt_cap(n, d);
    'attempt: for _ in 0..cap {
        stubs.shuffle(&mut rng);
        seen.clear();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        edges.sort_unstable();
        let g = Graph::new(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::CapExceeded(format!(
        "random_regular({n}, {d}) found no simple connected sample in {cap} attempts"
    )))
}

/// Random connected multigraph with exactly `m` edges: a random spanning
/// tree plus `m - n + 1` uniformly chosen extra vertex pairs (repeats allowed).
pub fn random_connected(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if n < 2 || m + 1 < n {
        return Err(Error::Precondition(format!(
            "random_connected needs n >= 2 and m >= n - 1, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(m);
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((order[j], order[i]));
    }
    while edges.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn handshake(g: &Graph) {
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.m());
    }

    #[test]
    fn complete_graph_shapes() {
        let k4 = complete_graph(4);
        assert_eq!((k4.n(), k4.m(), k4.regular_degree()), (4, 6, Some(3)));
        let k1 = complete_graph(1);
        assert_eq!((k1.n(), k1.m()), (1, 0));
        assert!(k1.is_connected());
        handshake(&k4);
    }

    #[test]
    fn bipartite_shapes() {
        let c4 = complete_bipartite(2);
        assert_eq!((c4.n(), c4.m(), c4.regular_degree()), (4, 4, Some(2)));
        let k33 = complete_bipartite(3);
        assert_eq!((k33.m(), k33.regular_degree()), (9, Some(3)));
        handshake(&k33);
    }

    #[test]
    fn lps_gadget_shape() {
        let gadget = lps_gadget();
        let g = &gadget.graph;
        assert_eq!(g.m(), 10);
        assert_eq!(g.degrees(), vec![5, 5, 5, 5]);
        assert_eq!(g.multiplicity(0, 1), 3);
        assert_eq!(g.multiplicity(2, 3), 3);
        for bundle in gadget.bundles {
            let keep = (0..g.m()).filter(|e| !bundle.contains(e));
            let rest = EdgeSubset::from_ids(g.m(), keep).unwrap();
            assert_eq!(g.component_count(&rest).unwrap(), 1);
        }
    }

    #[test]
    fn sharpness_block_degrees() {
        let (b, port) = sharpness_block(5).unwrap();
        assert_eq!(b.n(), 7);
        assert_eq!(b.m(), 17);
        assert_eq!(b.degree(port).unwrap(), 4);
        assert!((1..7).all(|v| b.degree(v).unwrap() == 5));
        assert!(b.is_connected() && b.is_simple());
        assert!(sharpness_block(6).is_err());
        assert!(sharpness_block(3).is_err());
    }

    #[test]
    fn sharpness_graph_is_regular_with_port_bridges() {
        for d in [5, 7, 9] {
            let sg = sharpness_graph(d).unwrap();
            let g = &sg.graph;
            assert_eq!(g.n(), 1 + d * (d + 2));
            assert_eq!(g.regular_degree(), Some(d));
            assert!(g.is_simple() && g.is_connected());
            assert_eq!(g.bridges().ids(), sg.bridge_edges);
            // dropping the bridges leaves d blocks plus the isolated center
            let non_bridge = (0..g.m()).filter(|e| !sg.bridge_edges.contains(e));
            let s = EdgeSubset::from_ids(g.m(), non_bridge).unwrap();
            assert_eq!(g.component_count(&s).unwrap(), d + 1);
            let (block, _) = sharpness_block(d).unwrap();
            assert_eq!(&g.edges()[..block.m()], block.edges());
        }
        assert_eq!(sharpness_graph(7).unwrap().graph.n(), 64);
    }

    #[test]
    fn random_regular_small_cases() {
        let k4 = random_regular(4, 3, 11).unwrap();
        assert_eq!(k4.m(), 6);
        assert!(k4.is_simple());
        let g = random_regular(6, 3, 5).unwrap();
        assert_eq!((g.m(), g.regular_degree()), (9, Some(3)));
        assert!(g.is_connected() && g.is_simple());
        assert_eq!(random_regular(20, 4, 9).unwrap(), random_regular(20, 4, 9).unwrap());
        assert!(random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn structural_queries_on_k4() {
        let k4 = complete_graph(4);
        let all = EdgeSubset::full(6);
        assert_eq!(k4.component_count(&all).unwrap(), 1);
        assert!(!k4.is_forest(&all).unwrap());
        // star at 0: edges (0,1),(0,2),(0,3) are ids 0,1,2
        let star = EdgeSubset::from_ids(6, [0, 1, 2]).unwrap();
        assert!(k4.is_forest(&star).unwrap());
        assert!(k4.bridges().is_empty());
        assert!(path(5).bridges().len() == 4);
    }

    #[test]
    fn parallel_edges_are_not_bridges() {
        let g = Graph::new(3, vec![(0, 1), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.bridges().ids(), vec![2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
        assert!(complete_graph(3).degree(3).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let g = lps_gadget().graph;
        let text = g.to_text();
        assert!(text.starts_with("4 10\n0 1\n0 1\n"));
        assert_eq!(Graph::from_text(&text).unwrap(), g);
        assert!(Graph::from_text("3 2\n0 1\n").is_err());
    }

    #[test]
    fn petersen_is_cubic() {
        let p = petersen();
        assert_eq!((p.n(), p.m(), p.regular_degree()), (10, 15, Some(3)));
        assert!(p.is_simple() && p.is_connected());
    }
}

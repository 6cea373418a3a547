//! Exhaustive spanning-tree enumeration for small graphs.
//!
//! This is the combinatorial reference the Laplacian routes are checked
//! against; it never touches linear algebra.

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{EdgeSubset, Graph};

/// Largest edge count accepted by [`spanning_trees`].
pub const MAX_ENUMERATION_EDGES: usize = 24;

/// Every spanning tree of `g`, as sorted edge-id lists.
pub fn spanning_trees(g: &Graph) -> Result<Vec<Vec<usize>>> {
    let m = g.m();
    if m > MAX_ENUMERATION_EDGES {
        return Err(Error::CapExceeded(format!(
            "spanning-tree enumeration limited to {MAX_ENUMERATION_EDGES} edges, got {m}"
        )));
    }
    let k = g.n().saturating_sub(1);
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    fn rec(g: &Graph, start: usize, k: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == k {
            let mut dsu = DisjointSets::new(g.n());
            if chosen.iter().all(|&e| {
                let (u, v) = g.edges()[e];
                dsu.union(u, v)
            }) {
                out.push(chosen.clone());
            }
            return;
        }
        let remaining = k - chosen.len();
        for e in start..g.m() {
            if g.m() - e < remaining {
                break;
            }
            chosen.push(e);
            rec(g, e + 1, k, chosen, out);
            chosen.pop();
        }
    }
    rec(g, 0, k, &mut chosen, &mut out);
    Ok(out)
}

/// Edge and pair frequencies over all spanning trees.
#[derive(Debug, Clone)]
pub struct TreeTable {
    pub tree_count: u64,
    /// `edge_hits[e]`: trees containing `e`.
    pub edge_hits: Vec<u64>,
    /// `pair_hits[e][f]`: trees containing both (diagonal = `edge_hits`).
    pub pair_hits: Vec<Vec<u64>>,
    /// Sum over trees of `sum_x deg(x)^2`.
    pub sum_sq_degree: u64,
    /// Per vertex, sum over trees of `deg(x)^2`.
    pub vertex_sq_degree: Vec<u64>,
}

impl TreeTable {
    pub fn build(g: &Graph) -> Result<Self> {
        let trees = spanning_trees(g)?;
        let m = g.m();
        let mut edge_hits = vec![0; m];
        let mut pair_hits = vec![vec![0; m]; m];
        let mut vertex_sq_degree = vec![0; g.n()];
        for t in &trees {
            for &e in t {
                edge_hits[e] += 1;
                for &f in t {
                    pair_hits[e][f] += 1;
                }
            }
            let s = EdgeSubset::from_ids(m, t.iter().copied())?;
            for (x, d) in g.subset_degrees(&s).into_iter().enumerate() {
                vertex_sq_degree[x] += (d * d) as u64;
            }
        }
        Ok(Self {
            tree_count: trees.len() as u64,
            edge_hits,
            pair_hits,
            sum_sq_degree: vertex_sq_degree.iter().sum(),
            vertex_sq_degree,
        })
    }

    pub fn edge_probability(&self, e: usize) -> f64 {
        self.edge_hits[e] as f64 / self.tree_count as f64
    }

    pub fn pair_probability(&self, e: usize, f: usize) -> f64 {
        self.pair_hits[e][f] as f64 / self.tree_count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle, lps_gadget};

    #[test]
    fn counts_match_known_values() {
        assert_eq!(spanning_trees(&complete_graph(4)).unwrap().len(), 16);
        assert_eq!(spanning_trees(&complete_graph(5)).unwrap().len(), 125);
        assert_eq!(spanning_trees(&cycle(6).unwrap()).unwrap().len(), 6);
        // gadget: K4 trees weighted by bundle multiplicities
        // trees using 0 bundles: 4-cycle trees = 4; 1 bundle: 2*3*4 = 24 (choose which
        // bundle, which parallel copy, then 2 more edges from the 4 singles forming a tree
        // with it); 2 bundles: 3*3*4 = 36
        assert_eq!(spanning_trees(&lps_gadget().graph).unwrap().len(), 4 + 24 + 36);
    }

    #[test]
    fn table_edge_sums() {
        let g = complete_graph(4);
        let t = TreeTable::build(&g).unwrap();
        assert_eq!(t.tree_count, 16);
        assert!(t.edge_hits.iter().all(|&h| h == 8));
        assert_eq!(t.edge_hits.iter().sum::<u64>(), 16 * 3);
    }
}

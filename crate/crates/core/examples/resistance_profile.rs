//! Effective resistances of a graph: per-edge values, Foster's sum and a
//! few transfer currents.
//!
//! Usage: cargo run --example resistance_profile -- [graph-desc]

use spanlab::graph_desc::parse_graph;
use spanlab::LaplacianSystem;

fn main() -> spanlab::Result<()> {
    let desc = std::env::args().nth(1).unwrap_or_else(|| "petersen".into());
    let g = parse_graph(&desc)?;
    let sys = LaplacianSystem::new(&g)?;
    print!("{}", sys.resistance_csv());
    eprintln!("{desc}: n={} m={} foster={:.12} (n-1 = {})", g.n(), g.m(), sys.foster_sum(), g.n() - 1);
    eprintln!("spanning trees: ln = {:.6}", sys.tree_count().ln());
    if g.m() >= 2 {
        for f in 0..g.m().min(4) {
            eprintln!("Y(0,{f}) = {:+.6}", sys.transfer_current(0, f)?);
        }
    }
    if let Some(d) = g.regular_degree() {
        let b = sys.resistance_buckets(d)?;
        eprintln!("{b:?}");
    }
    Ok(())
}

//! UST degree moments on complete graphs: the transfer-current computation
//! next to the closed form 5 - 11/n + 6/n^2.

use spanlab::graph::complete_graph;
use spanlab::ust::{exact_mean_sq_degree, kn_ust_moments, upper_bound};

fn main() -> spanlab::Result<()> {
    println!("{:>4} {:>20} {:>20} {:>10} {:>10}", "n", "exact", "closed form", "p1", "bound");
    for n in [4, 5, 6, 8, 12, 20, 30, 50] {
        let r = exact_mean_sq_degree(&complete_graph(n), &format!("K{n}"))?;
        let c = kn_ust_moments(n)?;
        println!(
            "{n:>4} {:>20.15} {:>20.15} {:>10.6} {:>10.6}",
            r.exact_mean_sq_degree,
            c.mean_sq_degree,
            c.p1,
            upper_bound(n - 1)
        );
    }
    Ok(())
}

//! MST degree moments on K_n by simulation, next to the two p-NC thresholds.
//!
//! Usage: cargo run --release --example mst_montecarlo -- [samples]

use spanlab::graph::complete_graph;
use spanlab::mst::{adjacent_pnc_threshold, mc_mst_moments, nonadjacent_pnc_threshold};

fn main() -> spanlab::Result<()> {
    let samples: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50_000);
    println!("n,mean_sq_degree,stderr,p0,p0_stderr,nonadjacent_threshold,adjacent_threshold");
    for n in [5, 10, 20, 30, 50, 100] {
        let r = mc_mst_moments(&complete_graph(n), samples, 11, &[0])?;
        let p0 = &r.p0[0].p0;
        println!(
            "{n},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.mean_sq_degree.estimate,
            r.mean_sq_degree.standard_error,
            p0.estimate,
            p0.standard_error,
            nonadjacent_pnc_threshold(n),
            adjacent_pnc_threshold(n)
        );
    }
    Ok(())
}

//! Mean squared UST degree of the glued sharpness graphs as d grows.
//!
//! Usage: cargo run --example sharpness_sweep -- [dmax]

use spanlab::ust::{sharpness_csv, sharpness_sweep};

fn main() -> spanlab::Result<()> {
    let dmax: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(41);
    let ds: Vec<usize> = (5..=dmax).step_by(2).collect();
    let rows = sharpness_sweep(&ds)?;
    print!("{}", sharpness_csv(&rows));
    for r in &rows {
        eprintln!("d={:>3}  6-m(d)={:.5}  d*(6-m(d))={:.4}", r.d, r.gap_to_six, r.d as f64 * r.gap_to_six);
    }
    Ok(())
}

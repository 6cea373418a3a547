//! Root degree of the limiting minimal spanning forest: theta table, then
//! E[N^2] by simulation against 10 - 4 zeta(3).
//!
//! Usage: cargo run --release --example pwit_moment -- [samples]

use spanlab::pwit::{e_n2_exact, mc_root_degree, moment_integrals, ThetaEntry};

fn main() -> spanlab::Result<()> {
    let samples: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "lambda", "theta", "theta'", "alpha", "beta");
    for lambda in [1.1, 1.5, 2.0, 3.0, 5.0, 10.0] {
        let e = ThetaEntry::new(lambda)?;
        println!(
            "{lambda:>6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            e.theta, e.theta_prime, e.alpha, e.beta
        );
    }
    let ints = moment_integrals()?;
    println!(
        "E[N^2] - 5: quadrature {:.12}, q-integral {:.12}, series {:.12}",
        ints.combo, ints.q_integral_value, ints.series_value
    );
    let r = mc_root_degree(samples, 7)?;
    println!(
        "E[N] = {:.5} +- {:.5};  E[N^2] = {:.5} +- {:.5}  (exact {:.6}, z = {:.2})",
        r.mean_estimate,
        r.mean_stderr,
        r.mc_estimate,
        r.stderr,
        e_n2_exact(),
        r.second_moment.z_score(e_n2_exact())
    );
    Ok(())
}

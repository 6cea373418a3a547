//! Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.
//!
//! `SPANLAB_SEED` and `SPANLAB_THREADS` override the defaults.

use spanlab::verify::{run_all, VerifyConfig};

fn env_or<T: std::str::FromStr>(key: &str, default: T) -> T {
    std::env::var(key).ok().and_then(|v| v.parse().ok()).unwrap_or(default)
}

fn main() {
    let defaults = VerifyConfig::default();
    let cfg = VerifyConfig {
        seed: env_or("SPANLAB_SEED", defaults.seed),
        threads: env_or("SPANLAB_THREADS", defaults.threads),
        ..defaults
    };
    let results = run_all(&cfg);
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} [{}] ({:.1}s) {}", r.id, r.name, r.seconds, r.detail);
        failed += usize::from(!r.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

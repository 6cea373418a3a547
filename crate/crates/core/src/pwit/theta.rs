//! Survival probability of Poisson(lambda) Galton-Watson trees and the
//! quantities built from it.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{dilog, integrate, ln_factorial};

pub const THETA_TOL: f64 = 1e-13;

/// `1 - theta - exp(-lambda theta)`, written to keep precision for small theta.
fn fixed_point_residual(lambda: f64, t: f64) -> f64 {
    -t - (-lambda * t).exp_m1()
}

/// Positive root of `1 - theta = exp(-lambda theta)`. Returns 0 for
/// `lambda <= 1`, where no positive root exists; see [`is_supercritical`].
pub fn theta(lambda: f64) -> f64 {
    if !is_supercritical(lambda) {
        return 0.0;
    }
    if lambda > 40.0 {
        // q = exp(-lambda(1-q)) with q below 1e-17: one step is exact
        let q = (-lambda).exp();
        return 1.0 - q * (lambda * q).exp();
    }
    // Newton from the right converges monotonically: g is concave and g(1) < 0.
    let mut t = 1.0;
    for _ in 0..200 {
        let g = fixed_point_residual(lambda, t);
        let dg = -1.0 + lambda * (-lambda * t).exp();
        let next = t - g / dg;
        if !(next.is_finite() && next > 0.0 && next < t + 1e-15) {
            return theta_bisect(lambda);
        }
        let done = (t - next).abs() <= 1e-16 * t.max(1e-300);
        t = next;
        if done {
            break;
        }
    }
    if fixed_point_residual(lambda, t).abs() > THETA_TOL * t.max(1e-3) {
        return theta_bisect(lambda);
    }
    t
}

fn theta_bisect(lambda: f64) -> f64 {
    // g > 0 just right of 0 and g(1) < 0
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fixed_point_residual(lambda, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn is_supercritical(lambda: f64) -> bool {
    lambda > 1.0
}

/// Inverse of [`theta`]: `lambda = -ln(1 - F) / F`.
pub fn theta_inv(f: f64) -> Result<f64> {
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Precondition(format!("theta_inv needs F in (0, 1), got {f}")));
    }
    Ok(-(-f).ln_1p() / f)
}

/// `1 - lambda q` as a function of `theta = 1 - q`, with `lambda` tied to
/// `theta` by the fixed point: `sum_j theta^j / (j(j+1))`.
pub fn criticality_gap(t: f64) -> f64 {
    if t >= 1.0 {
        return 1.0;
    }
    if t < 0.5 {
        let mut sum = 0.0;
        let mut pow = t;
        let mut j = 1.0;
        while pow > 1e-18 * sum {
            sum += pow / (j * (j + 1.0));
            pow *= t;
            j += 1.0;
        }
        sum
    } else {
        1.0 + (1.0 - t) * (-t).ln_1p() / t
    }
}

/// `theta'(lambda) = q (1 - q) / (1 - lambda q)`.
pub fn theta_prime(lambda: f64) -> f64 {
    let t = theta(lambda);
    if t == 0.0 {
        return 0.0;
    }
    (1.0 - t) * t / criticality_gap(t)
}

/// `beta(lambda) = q - lambda q^2 / 2`, the mean inverse total progeny of
/// PGW(lambda) (infinite trees count as zero).
pub fn beta(lambda: f64) -> f64 {
    let q = 1.0 - theta(lambda);
    q - lambda * q * q / 2.0
}

/// `alpha(lambda) = int_lambda^inf (1 - theta(x)) dx` in closed form:
/// `pi^2/6 - Li2(theta) - lambda q`.
pub fn alpha(lambda: f64) -> f64 {
    if !is_supercritical(lambda) {
        return PI * PI / 6.0 - 1.0 + (1.0 - lambda);
    }
    let t = theta(lambda);
    (PI * PI / 6.0 - dilog(t) - lambda * (1.0 - t)).max(0.0)
}

/// Upper limit beyond which `1 - theta(x) < 1e-17`.
const ALPHA_CUTOFF: f64 = 40.0;

/// `alpha(lambda)` by adaptive quadrature of `1 - theta` with the tail past
/// the cutoff bounded analytically.
pub fn alpha_fn(lambda: f64) -> Result<f64> {
    if !is_supercritical(lambda) {
        return Err(Error::Precondition(format!("alpha needs lambda > 1, got {lambda}")));
    }
    if lambda >= ALPHA_CUTOFF {
        // q(x) <= e^{-x theta(x)} <= 2 e^{-x} here
        let q = 1.0 - theta(lambda);
        return Ok(q * (1.0 + lambda * q));
    }
    let head = integrate(|x| 1.0 - theta(x), lambda, ALPHA_CUTOFF, 1e-12)?;
    // tail: q(x) ~ e^{-x}(1 + x e^{-x}); integral ~ e^{-cutoff}
    let tail = (-ALPHA_CUTOFF).exp();
    Ok(head.value + tail)
}

/// `P[|PGW(lambda)| = m] = e^{-lambda m} (lambda m)^{m-1} / m!`.
pub fn borel_pmf(lambda: f64, m: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    (-lambda * mf + (mf - 1.0) * (lambda * mf).ln() - ln_factorial(m)).exp()
}

/// Everything the sampler needs at one `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaEntry {
    pub lambda: f64,
    pub theta: f64,
    pub q: f64,
    pub theta_prime: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ThetaEntry {
    pub fn new(lambda: f64) -> Result<Self> {
        if !is_supercritical(lambda) {
            return Err(Error::Precondition(format!("lambda must exceed 1, got {lambda}")));
        }
        let t = theta(lambda);
        let q = 1.0 - t;
        Ok(Self {
            lambda,
            theta: t,
            q,
            theta_prime: q * t / criticality_gap(t),
            alpha: alpha(lambda),
            beta: q - lambda * q * q / 2.0,
        })
    }

    /// `|1 - theta - exp(-lambda theta)|`.
    pub fn residual(&self) -> f64 {
        fixed_point_residual(self.lambda, self.theta).abs()
    }

    pub fn check(&self) -> bool {
        self.residual() <= THETA_TOL
            && self.q > 0.0
            && self.q < 1.0 / self.lambda
            && self.theta_prime > 0.0
    }
}

/// Cache of [`ThetaEntry`] values keyed by the exact `lambda`.
#[derive(Debug, Default)]
pub struct ThetaTable {
    cache: RwLock<HashMap<u64, ThetaEntry>>,
}

impl ThetaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, lambda: f64) -> Result<ThetaEntry> {
        let key = lambda.to_bits();
        if let Some(e) = self.cache.read().expect("poisoned").get(&key) {
            return Ok(*e);
        }
        let e = ThetaEntry::new(lambda)?;
        self.cache.write().expect("poisoned").insert(key, e);
        Ok(e)
    }

    pub fn len(&self) -> usize {
        self.cache.read().expect("poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when every cached entry satisfies its invariants.
    pub fn all_valid(&self) -> bool {
        self.cache.read().expect("poisoned").values().all(ThetaEntry::check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_at_two() {
        let t = theta(2.0);
        assert!((t - 0.796_812_130_020_02).abs() < 1e-12);
        assert!(fixed_point_residual(2.0, t).abs() < 1e-15);
    }

    #[test]
    fn theta_subcritical_is_zero() {
        assert_eq!(theta(1.0), 0.0);
        assert_eq!(theta(0.3), 0.0);
        assert!(theta(1.0 + 1e-9) < 1e-8);
    }

    #[test]
    fn theta_inverse_round_trip() {
        for i in 1..10 {
            let f = i as f64 / 10.0;
            assert!((theta(theta_inv(f).unwrap()) - f).abs() < 1e-12);
        }
        assert!((theta_inv(0.5).unwrap() - 2f64.ln() / 0.5).abs() < 1e-15);
        assert!((theta_inv(1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(theta_inv(0.0).is_err() && theta_inv(1.0).is_err());
    }

    #[test]
    fn large_lambda() {
        let t = theta(50.0);
        assert!(fixed_point_residual(50.0, t).abs() < 1e-15);
        assert!(beta(50.0) >= 0.0 && beta(50.0) < 1e-20);
        assert!(alpha(60.0) < 1e-25);
    }

    #[test]
    fn criticality_gap_branches_agree() {
        for t in [0.3, 0.49, 0.51, 0.7] {
            let lambda = theta_inv(t).unwrap();
            assert!((criticality_gap(t) - (1.0 - lambda * (1.0 - t))).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_closed_form_matches_quadrature() {
        for lambda in [1.05, 1.5, 2.0, 5.0, 12.0] {
            let a = alpha_fn(lambda).unwrap();
            assert!((alpha(lambda) - a).abs() < 1e-10, "lambda {lambda}");
        }
        assert!((alpha(1.0 + 1e-12) - (PI * PI / 6.0 - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn alpha_derivative_is_minus_q() {
        for lambda in [1.3, 2.0, 4.0] {
            let h = 1e-5;
            let d = (alpha(lambda + h) - alpha(lambda - h)) / (2.0 * h);
            assert!((d + 1.0 - theta(lambda)).abs() < 1e-6);
        }
    }

    #[test]
    fn borel_basics() {
        assert!((borel_pmf(2.0, 1) - (-2f64).exp()).abs() < 1e-16);
        for lambda in [0.5, 1.5, 2.0, 3.0] {
            let mut sum = 0.0;
            for m in 1..20_000 {
                sum += borel_pmf(lambda, m);
            }
            assert!((sum - (1.0 - theta(lambda))).abs() < 1e-10, "lambda {lambda}");
        }
    }

    #[test]
    fn table_invariants() {
        let table = ThetaTable::new();
        for i in 1..200 {
            let e = table.get(1.0 + i as f64 * 0.1).unwrap();
            assert!(e.check(), "{e:?}");
            assert!(2.0 * e.beta - e.q > 0.0);
        }
        assert_eq!(table.len(), 199);
        assert!(table.all_valid());
        assert!(table.get(0.9).is_err());
    }
}

//! The second moment of the root degree: Monte Carlo and three quadrature or
//! series evaluations.

use serde::Serialize;

use super::pond::{pgw_total_progeny, sample_root_degree};
use super::theta::{alpha, beta, criticality_gap, theta};
use crate::error::{Error, Result};
use crate::estimator::{merge_all, run_chunks, EstimatorReport, Moments};
use crate::numerics::{integrate, zeta};

/// `10 - 4 zeta(3)`.
pub fn e_n2_exact() -> f64 {
    10.0 - 4.0 * zeta(3.0)
}

/// Upper end of the lambda integrals; the integrands are below 1e-16 past it.
const LAMBDA_MAX: f64 = 40.0;
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIntegrals {
    /// `int theta (1 - theta) dlambda` over `(1, inf)`.
    pub i1: f64,
    /// `int theta beta dlambda`.
    pub i2: f64,
    /// `2 I2 - I1` from the lambda quadrature of `theta (2 beta - q)`.
    pub combo: f64,
    /// `int_0^1 (1 + q ln q / (1 - q))^2 dq`.
    pub q_integral_value: f64,
    /// `1 - 2(zeta(2) - 1) + 2(zeta(2) + 1 - 2 zeta(3))`.
    pub series_value: f64,
}

impl MomentIntegrals {
    pub fn max_disagreement(&self) -> f64 {
        let v = [self.combo, self.q_integral_value, self.series_value, 2.0 * self.i2 - self.i1];
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

pub fn moment_integrals() -> Result<MomentIntegrals> {
    let i1 = integrate(
        |l| {
            let t = theta(l);
            t * (1.0 - t)
        },
        1.0,
        LAMBDA_MAX,
        QUAD_TOL,
    )?
    .value;
    let i2 = integrate(|l| theta(l) * beta(l), 1.0, LAMBDA_MAX, QUAD_TOL)?.value;
    let combo = integrate(
        |l| {
            let t = theta(l);
            let q = 1.0 - t;
            t * (2.0 * (q - l * q * q / 2.0) - q)
        },
        1.0,
        LAMBDA_MAX,
        QUAD_TOL,
    )?
    .value;
    let q_integral_value = integrate(
        |q: f64| {
            let v = 1.0 + q * q.ln() / (1.0 - q);
            v * v
        },
        0.0,
        1.0,
        QUAD_TOL,
    )?
    .value;
    let (z2, z3) = (zeta(2.0), zeta(3.0));
    let series_value = 1.0 - 2.0 * (z2 - 1.0) + 2.0 * (z2 + 1.0 - 2.0 * z3);
    Ok(MomentIntegrals {
        i1,
        i2,
        combo,
        q_integral_value,
        series_value,
    })
}

/// `E[N^2 | X1 = lambda]` assembled from the conditional pond moments
/// `E[1/Z1] = theta q / theta'` and `E[1/Z1^2] = theta beta / theta'`.
pub fn conditional_second_moment(lambda: f64) -> f64 {
    let t = theta(lambda);
    let q = 1.0 - t;
    // theta q / theta' and theta beta / theta', with theta' = q theta / gap
    let gap = criticality_gap(t);
    let inv1 = gap;
    let inv2 = gap * (1.0 - lambda * q / 2.0);
    let a = alpha(lambda);
    5.0 - 6.0 * inv1 + 2.0 * inv2 + a * a + 5.0 * a - 2.0 * a * inv1
}

/// `int theta'(lambda) E[N^2 | lambda] dlambda`: the law of `X1` has density
/// `theta'` because `theta(X1)` is uniform.
pub fn conditional_assembly() -> Result<f64> {
    let q = integrate(
        |l| {
            let t = theta(l);
            if t == 0.0 {
                return 2.0 * conditional_second_moment(1.0 + 1e-12);
            }
            let tp = (1.0 - t) * t / criticality_gap(t);
            tp * conditional_second_moment(l)
        },
        1.0,
        LAMBDA_MAX,
        1e-10,
    )?;
    // past LAMBDA_MAX, theta' < 1e-16 and E[N^2 | lambda] -> 2
    Ok(q.value)
}

/// `E[N]` by the same route; equals 2.
pub fn conditional_first_moment() -> Result<f64> {
    let q = integrate(
        |l| {
            let t = theta(l);
            if t == 0.0 {
                return 2.0 * 2.0;
            }
            let gap = criticality_gap(t);
            let tp = (1.0 - t) * t / gap;
            tp * (2.0 - gap + alpha(l))
        },
        1.0,
        LAMBDA_MAX,
        1e-10,
    )?;
    Ok(q.value)
}

/// Monte Carlo report for `E[N^2]` next to its quadrature and series values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PwitMomentReport {
    pub target: &'static str,
    pub mc_estimate: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub quadrature_value: f64,
    pub series_value: f64,
    pub q_integral_value: f64,
    /// Fraction of draws discarded because the pond exceeded the cap.
    pub truncation_mass: f64,
    pub mean_estimate: f64,
    pub mean_stderr: f64,
    pub second_moment: EstimatorReport,
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkTally {
    n: Moments,
    n2: Moments,
    overflow: u64,
    min_n: u64,
}

/// `n_samples` root-degree draws; returns the `E[N^2]` report.
pub fn mc_root_degree(n_samples: u64, seed: u64) -> Result<PwitMomentReport> {
    if n_samples < 2 {
        return Err(Error::Precondition("need at least two samples".into()));
    }
    let parts = run_chunks(n_samples, seed, |rng, count| {
        let mut t = ChunkTally {
            min_n: u64::MAX,
            ..Default::default()
        };
        let mut done = 0;
        while done < count {
            match sample_root_degree(rng) {
                Ok(s) => {
                    let n = s.n() as f64;
                    t.n.push(n);
                    t.n2.push(n * n);
                    t.min_n = t.min_n.min(s.n());
                    done += 1;
                }
                Err(Error::CapExceeded(_)) => t.overflow += 1,
                Err(e) => panic!("root-degree sampler failed: {e}"),
            }
        }
        t
    });
    let n = merge_all(parts.iter().map(|p| &p.n));
    let n2 = merge_all(parts.iter().map(|p| &p.n2));
    let overflow: u64 = parts.iter().map(|p| p.overflow).sum();
    let min_n = parts.iter().map(|p| p.min_n).min().unwrap_or(0);
    if min_n == 0 {
        return Err(Error::Numerical("sampled a root of degree zero".into()));
    }
    let ints = moment_integrals()?;
    let second = n2.report(seed);
    let first = n.report(seed);
    Ok(PwitMomentReport {
        target: "E_N2",
        mc_estimate: second.estimate,
        stderr: second.standard_error,
        n_samples,
        seed,
        quadrature_value: 5.0 + ints.combo,
        series_value: 5.0 + ints.series_value,
        q_integral_value: 5.0 + ints.q_integral_value,
        truncation_mass: overflow as f64 / (overflow + n_samples) as f64,
        mean_estimate: first.estimate,
        mean_stderr: first.standard_error,
        second_moment: second,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PgwBetaReport {
    pub lambda: f64,
    /// `q - lambda q^2 / 2`.
    pub closed_form: f64,
    pub estimate: EstimatorReport,
    /// Fraction of trees declared infinite; compare with `theta`.
    pub explosion_rate: f64,
    pub theta: f64,
}

/// `E[1/|PGW(lambda)|]` by simulation, infinite trees counting as zero.
pub fn pgw_beta_check(lambda: f64, n_samples: u64, seed: u64) -> Result<PgwBetaReport> {
    if lambda <= 1.0 {
        return Err(Error::Precondition(format!("lambda must exceed 1, got {lambda}")));
    }
    let parts = run_chunks(n_samples, seed, |rng, count| {
        let mut m = Moments::default();
        let mut exploded = 0u64;
        for _ in 0..count {
            match pgw_total_progeny(lambda, 1_000_000, rng) {
                Some(s) => m.push(1.0 / s as f64),
                None => {
                    exploded += 1;
                    m.push(0.0);
                }
            }
        }
        (m, exploded)
    });
    let m = merge_all(parts.iter().map(|p| &p.0));
    let exploded: u64 = parts.iter().map(|p| p.1).sum();
    Ok(PgwBetaReport {
        lambda,
        closed_form: beta(lambda),
        estimate: m.report(seed),
        explosion_rate: exploded as f64 / n_samples as f64,
        theta: theta(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_routes_agree() {
        let r = moment_integrals().unwrap();
        let target = 5.0 - 4.0 * 1.202_056_903_159_594_2;
        assert!((r.series_value - target).abs() < 1e-14);
        assert!(r.max_disagreement() < 1e-6, "{r:?}");
        assert!((r.q_integral_value - target).abs() < 1e-9);
    }

    #[test]
    fn conditional_assembly_reproduces_the_constant() {
        let v = conditional_assembly().unwrap();
        assert!((v - e_n2_exact()).abs() < 1e-4, "{v}");
        assert!((conditional_first_moment().unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn small_mc_run_is_sane() {
        let r = mc_root_degree(20_000, 5).unwrap();
        assert!(r.second_moment.within_sigmas(e_n2_exact(), 5.0));
        assert_eq!(r.target, "E_N2");
    }

    #[test]
    fn beta_simulation_small() {
        let r = pgw_beta_check(3.0, 20_000, 2).unwrap();
        assert!(r.estimate.within_sigmas(r.closed_form, 5.0));
        assert!((r.explosion_rate - r.theta).abs() < 0.02);
    }
}

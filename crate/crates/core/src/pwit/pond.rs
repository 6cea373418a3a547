//! Pond sizes and the root-degree sampler.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp, Gamma, Poisson};
use serde::Serialize;

use super::theta::{alpha, criticality_gap, theta, theta_inv};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::ln_factorial;

/// Exact inverse-CDF head of the pond-size law; above it a rejection tail.
const HEAD: u64 = 64;

/// Largest pond size the sampler returns; larger draws are reported as
/// overflow instead of clipped.
pub const POND_CAP: u64 = 1 << 60;

/// Law of the pond size `Z1` given `X1 = lambda`:
/// `P[Z1 = m] = theta/theta' * e^{-lambda m} (lambda m)^{m-1} / (m-1)!`.
///
/// Writing `mu = lambda q`, this is the size-biased Borel(`mu`) law
/// `(1 - mu) e^{-mu m} mu^{m-1} m^m / m!`.
#[derive(Debug, Clone)]
pub struct PondLaw {
    pub lambda: f64,
    pub theta: f64,
    /// `lambda q`.
    pub mu: f64,
    /// `1 - mu`, accurate for small theta.
    pub gap: f64,
    /// `mu - 1 - ln mu`, the exponential decay rate of the tail.
    pub rate: f64,
    head_pmf: Vec<f64>,
    head_mass: f64,
}

fn decay_rate(gap: f64) -> f64 {
    // -gap - ln(1 - gap) = sum gap^k / k, k >= 2
    if gap < 0.1 {
        let mut sum = 0.0f64;
        let mut pow = gap * gap;
        let mut k = 2.0;
        while pow > 1e-18 * sum.max(1e-300) && k < 200.0 {
            sum += pow / k;
            pow *= gap;
            k += 1.0;
        }
        sum
    } else {
        -gap - (-gap).ln_1p()
    }
}

/// Stirling remainder `ln m! - (m ln m - m + ln(2 pi m)/2)`.
fn stirling_remainder(m: u64) -> f64 {
    let x = m as f64;
    if m < 30 {
        ln_factorial(m) - (x * x.ln() - x + 0.5 * (2.0 * PI * x).ln())
    } else {
        let x2 = x * x;
        1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2)
    }
}

impl PondLaw {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda <= 1.0 {
            return Err(Error::Precondition(format!("pond law needs lambda > 1, got {lambda}")));
        }
        Self::build(lambda, theta(lambda))
    }

    /// Same law, parametrised by `theta` in (0, 1) (so `lambda = theta_inv(theta)`).
    pub fn from_theta(t: f64) -> Result<Self> {
        let lambda = theta_inv(t)?;
        Self::build(lambda, t)
    }

    fn build(lambda: f64, t: f64) -> Result<Self> {
        let gap = criticality_gap(t);
        if !(gap > 0.0) {
            return Err(Error::Numerical(format!("degenerate pond law at lambda = {lambda}")));
        }
        let mu = 1.0 - gap;
        let mut law = Self {
            lambda,
            theta: t,
            mu,
            gap,
            rate: decay_rate(gap),
            head_pmf: Vec::with_capacity(HEAD as usize),
            head_mass: 0.0,
        };
        for m in 1..=HEAD {
            let p = law.pmf(m);
            law.head_pmf.push(p);
            law.head_mass += p;
        }
        Ok(law)
    }

    /// `P[Z1 = m]`.
    pub fn pmf(&self, m: u64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let x = m as f64;
        let ln = self.gap.ln() - self.mu.ln() - self.rate * x
            - 0.5 * (2.0 * PI * x).ln()
            - stirling_remainder(m);
        ln.exp()
    }

    /// `E[1/Z1]` and `E[1/Z1^2]` by direct summation of the pmf.
    pub fn inverse_moments(&self) -> (f64, f64) {
        let (mut s1, mut s2) = (0.0, 0.0);
        let mut m = 1u64;
        loop {
            let p = self.pmf(m);
            let x = m as f64;
            s1 += p / x;
            s2 += p / (x * x);
            if p / x < 1e-18 * s1 && m > 8 {
                break;
            }
            m += 1;
        }
        (s1, s2)
    }

    /// Total mass up to `m_max` (for normalization checks).
    pub fn mass_up_to(&self, m_max: u64) -> f64 {
        (1..=m_max).map(|m| self.pmf(m)).sum()
    }

    /// Exact draw from the law. Draws above [`POND_CAP`] return
    /// `Error::CapExceeded`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        let u: f64 = rng.random();
        if u < self.head_mass {
            let mut acc = 0.0;
            for (i, p) in self.head_pmf.iter().enumerate() {
                acc += p;
                if u < acc {
                    return Ok(i as u64 + 1);
                }
            }
            return Ok(HEAD);
        }
        self.sample_tail(rng)
    }

    /// Rejection sampler on `m > HEAD`. Envelope: `m! >= sqrt(2 pi m) (m/e)^m`
    /// gives `pmf(m) <= K m^{-1/2} e^{-rate m}`, and the continuous density
    /// `x^{-1/2} e^{-rate x}` on `(HEAD, inf)` is pushed to `ceil(x)`.
    fn sample_tail<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        let m0 = HEAD as f64;
        let h = self.rate;
        let use_gamma = h * m0 < 1.0;
        let gamma = Gamma::new(0.5, 1.0 / h).map_err(|e| Error::Numerical(e.to_string()))?;
        let exp = Exp::new(h).map_err(|e| Error::Numerical(e.to_string()))?;
        for _ in 0..1_000_000 {
            let x = if use_gamma {
                let x = gamma.sample(rng);
                if x <= m0 {
                    continue;
                }
                x
            } else {
                let x = m0 + exp.sample(rng);
                // exp proposal has no x^{-1/2}: thin by sqrt(m0 / x)
                if rng.random::<f64>() >= (m0 / x).sqrt() {
                    continue;
                }
                x
            };
            if !(x < POND_CAP as f64) {
                return Err(Error::CapExceeded(format!(
                    "pond size {x:e} at lambda = {}",
                    self.lambda
                )));
            }
            let m = x.ceil() as u64;
            let mf = m as f64;
            // pmf(m) / envelope(x)
            let ratio = (-stirling_remainder(m) - h * (mf - x)).exp() * (x / mf).sqrt();
            if rng.random::<f64>() < ratio {
                return Ok(m);
            }
        }
        Err(Error::Numerical("pond tail sampler failed to accept".into()))
    }
}

/// Uniform labelled tree on `size` vertices (Pruefer decoding) and a uniform
/// root.
pub fn uniform_labelled_tree<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<(Graph, usize)> {
    if size == 0 {
        return Err(Error::Precondition("tree size must be at least 1".into()));
    }
    let root = rng.random_range(0..size);
    if size == 1 {
        return Ok((Graph::new(1, vec![])?, root));
    }
    let code: Vec<usize> = (0..size - 2).map(|_| rng.random_range(0..size)).collect();
    let mut degree = vec![1usize; size];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(size - 1);
    let mut ptr = degree.iter().position(|&d| d == 1).expect("a leaf exists");
    let mut leaf = ptr;
    for &c in &code {
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 && c < ptr {
            leaf = c;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, size - 1));
    Ok((Graph::new(size, edges)?, root))
}

/// Degree of a uniform root in a uniform labelled tree on `size` vertices:
/// `1 + Binomial(size - 2, 1/size)` (occurrences in the Pruefer code).
pub fn labelled_tree_root_degree<R: Rng + ?Sized>(size: u64, rng: &mut R) -> u64 {
    match size {
        0 | 1 => 0,
        2 => 1,
        _ => {
            let b = Binomial::new(size - 2, 1.0 / size as f64).expect("valid binomial");
            1 + b.sample(rng)
        }
    }
}

/// One draw of the root degree `N = D1 + D2 + D3` of the wired minimal
/// spanning forest on the PWIT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PwitSample {
    pub lambda: f64,
    pub z1: u64,
    pub d1: u64,
    pub d2: u64,
    pub d3: u64,
}

impl PwitSample {
    pub fn n(&self) -> u64 {
        self.d1 + self.d2 + self.d3
    }

    pub fn check(&self) -> bool {
        self.n() >= 1
            && self.d3 <= 1
            && self.d1 < self.z1
            && (self.z1 != 1 || (self.d1 == 0 && self.d3 == 1))
    }
}

/// Draws `lambda = theta^{-1}(F)` with `F` uniform, then the pond size, the
/// in-pond degree, the Poisson(`alpha`) attached degree and the outgoing
/// edge indicator.
pub fn sample_root_degree<R: Rng + ?Sized>(rng: &mut R) -> Result<PwitSample> {
    let f = loop {
        let f: f64 = rng.random();
        if f > 0.0 {
            break f;
        }
    };
    let law = PondLaw::from_theta(f)?;
    let z1 = law.sample(rng)?;
    let d1 = labelled_tree_root_degree(z1, rng);
    let a = alpha(law.lambda);
    let d2 = if a > 0.0 {
        Poisson::new(a).expect("positive mean").sample(rng) as u64
    } else {
        0
    };
    let d3 = u64::from(rng.random::<f64>() < 1.0 / z1 as f64);
    Ok(PwitSample {
        lambda: law.lambda,
        z1,
        d1,
        d2,
        d3,
    })
}

/// Total progeny of a Poisson(`lambda`) Galton-Watson tree; `None` when the
/// tree is declared infinite (active population at a level where extinction
/// has probability below 1e-15, or size past `size_cap`).
pub fn pgw_total_progeny<R: Rng + ?Sized>(lambda: f64, size_cap: u64, rng: &mut R) -> Option<u64> {
    let q = 1.0 - theta(lambda);
    let active_cap = if q > 0.0 && q < 1.0 {
        ((1e-15f64).ln() / q.ln()).ceil().max(1.0) as u64
    } else {
        u64::MAX
    };
    let poisson = Poisson::new(lambda).expect("positive mean");
    let mut active = 1u64;
    let mut size = 0u64;
    while active > 0 {
        if active >= active_cap || size >= size_cap {
            return None;
        }
        active -= 1;
        size += 1;
        active += poisson.sample(rng) as u64;
    }
    Some(size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::chunk_rng;

    #[test]
    fn pond_pmf_normalizes() {
        for lambda in [1.2, 1.5, 2.0, 3.0, 5.0] {
            let law = PondLaw::new(lambda).unwrap();
            let mut total = 0.0;
            let mut m = 1;
            while m < 10_000_000 {
                let p = law.pmf(m);
                total += p;
                if p < 1e-20 && m > 10 {
                    break;
                }
                m += 1;
            }
            assert!((total - 1.0).abs() < 1e-10, "lambda {lambda}: {total}");
        }
    }

    #[test]
    fn pond_pmf_matches_borel_form() {
        let lambda = 1.7;
        let law = PondLaw::new(lambda).unwrap();
        let t = theta(lambda);
        let tp = super::super::theta::theta_prime(lambda);
        for m in [1u64, 2, 5, 40, 300] {
            let direct = t / tp * m as f64 * super::super::theta::borel_pmf(lambda, m);
            assert!((law.pmf(m) - direct).abs() < 1e-12 * direct.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn conditional_inverse_moments() {
        for lambda in [1.1, 1.5, 2.0, 4.0] {
            let law = PondLaw::new(lambda).unwrap();
            let (e1, e2) = law.inverse_moments();
            let t = theta(lambda);
            let q = 1.0 - t;
            let tp = super::super::theta::theta_prime(lambda);
            let b = super::super::theta::beta(lambda);
            assert!((e1 - t * q / tp).abs() < 1e-8);
            assert!((e2 - t * b / tp).abs() < 1e-8);
        }
    }

    #[test]
    fn labelled_tree_is_a_tree() {
        let mut rng = chunk_rng(1, 0);
        for size in 1..30 {
            let (g, root) = uniform_labelled_tree(size, &mut rng).unwrap();
            assert!(root < size);
            assert_eq!(g.m(), size - 1);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn sample_invariants() {
        let mut rng = chunk_rng(9, 0);
        for _ in 0..20_000 {
            let s = sample_root_degree(&mut rng).unwrap();
            assert!(s.check(), "{s:?}");
            assert!(s.lambda > 1.0);
        }
    }

    #[test]
    fn tiny_theta_gives_huge_ponds() {
        let law = PondLaw::from_theta(1e-4).unwrap();
        assert!(law.gap > 0.0 && law.gap < 1e-4);
        let mut rng = chunk_rng(3, 0);
        let big = (0..200).filter(|_| law.sample(&mut rng).unwrap() > 1000).count();
        assert!(big > 50);
    }

    #[test]
    fn pgw_subcritical_terminates() {
        let mut rng = chunk_rng(4, 0);
        for _ in 0..100 {
            assert!(pgw_total_progeny(0.5, 1_000_000, &mut rng).is_some());
        }
    }
}

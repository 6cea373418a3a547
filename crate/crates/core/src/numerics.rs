//! Scalar numerics: adaptive quadrature, zeta values, the dilogarithm.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights on the odd Kronrod nodes (indices 1, 3, 5, 7).
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss-Kronrod (7/15) on a finite interval. Subdivides the worst
/// interval until the summed error estimate is below `tol` (absolute).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numerical("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    const MAX_INTERVALS: usize = 20_000;
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        if !value.is_finite() {
            return Err(Error::Numerical("integrand produced a non-finite value".into()));
        }
        if total_err <= tol || intervals.len() >= MAX_INTERVALS {
            if total_err > tol * 1e3 {
                return Err(Error::Numerical(format!(
                    "quadrature did not converge: error {total_err:e} > {tol:e}"
                )));
            }
            return Ok(Quadrature { value, abs_error: total_err, evaluations });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(Quadrature { value, abs_error: total_err, evaluations });
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Riemann zeta for real `s > 1`: a partial sum plus an Euler-Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    const N: usize = 32;
    let head: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    let n = N as f64;
    // tail from N: integral + f(N)/2 - sum B_2k/(2k)! f^(2k-1)(N)
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let bernoulli = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut rising = s; // s (s+1) ... (s + 2k - 2)
    let mut fact = 2.0; // (2k)!
    for (k, b) in bernoulli.iter().enumerate() {
        let k = k + 1;
        tail += b / fact * rising * n.powf(-s - (2 * k - 1) as f64);
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
    }
    head + tail
}

/// Dilogarithm `Li_2(x)` for `x <= 1`.
pub fn dilog(x: f64) -> f64 {
    assert!(x <= 1.0, "dilog implemented for x <= 1");
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    if x < 0.0 {
        // Li2(x) = -Li2(x/(x-1)) - ln(1-x)^2 / 2 maps x < 0 into (0, 1)
        let y = x / (x - 1.0);
        let l = (-x).ln_1p();
        return -dilog(y) - 0.5 * l * l;
    }
    if x > 0.5 {
        return PI * PI / 6.0 - x.ln() * (-x).ln_1p() - dilog(1.0 - x);
    }
    let mut term = x;
    let mut sum = 0.0f64;
    let mut k = 1.0;
    while term > 1e-18 * sum.max(1e-300) || k < 2.0 {
        sum += term / (k * k);
        term *= x;
        k += 1.0;
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// `ln(k!)`.
pub fn ln_factorial(k: u64) -> f64 {
    statrs::function::gamma::ln_gamma(k as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_polynomials_and_smooth() {
        let q = integrate(|x| x * x, 0.0, 3.0, 1e-13).unwrap();
        assert!((q.value - 9.0).abs() < 1e-12);
        let q = integrate(f64::sin, 0.0, PI, 1e-13).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let q = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-11).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-10);
        let q = integrate(|x| -x.ln(), 0.0, 1.0, 1e-11).unwrap();
        assert!((q.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadrature_rejects_infinite_limits() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-9).is_err());
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta(3.0) - 1.202_056_903_159_594_2).abs() < 1e-15);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-15);
    }

    #[test]
    fn dilog_values() {
        let ln2 = 2f64.ln();
        assert!((dilog(0.5) - (PI * PI / 12.0 - ln2 * ln2 / 2.0)).abs() < 1e-15);
        assert!((dilog(-1.0) + PI * PI / 12.0).abs() < 1e-15);
        assert!(dilog(0.0).abs() < 1e-300);
        assert!((dilog(1.0) - PI * PI / 6.0).abs() < 1e-15);
        // against direct quadrature of -ln(1-t)/t
        for x in [0.1, 0.3, 0.7, 0.95] {
            let q = integrate(|t: f64| -(-t).ln_1p() / t, 0.0, x, 1e-14).unwrap();
            assert!((dilog(x) - q.value).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn ln_factorial_small() {
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-12);
        assert!(ln_factorial(0).abs() < 1e-14);
    }
}

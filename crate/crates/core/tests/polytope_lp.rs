//! Forest polytope membership against an exact rational LP: x is a member
//! iff it is a convex combination of forest indicator vectors.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanlab::graph::{complete_graph, cycle, random_connected};
use spanlab::polytope::{membership, RankOracle};
use spanlab::{EdgeSubset, Graph};

type Q = BigRational;

fn q(num: i64, den: i64) -> Q {
    Q::new(num.into(), den.into())
}

/// Phase-one simplex with Bland's rule on `A y = b, y >= 0` (`b >= 0`).
/// Returns whether the system is feasible.
fn feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    let rows = a.len();
    let cols = a[0].len();
    // tableau: original columns, one artificial per row, rhs
    let width = cols + rows + 1;
    let mut t: Vec<Vec<Q>> = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.extend((0..rows).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    // reduced costs of minimising the artificial sum
    let mut cost = vec![Q::zero(); width];
    for r in &t {
        for j in 0..cols {
            cost[j] -= &r[j];
        }
        cost[width - 1] -= &r[width - 1];
    }
    loop {
        let Some(enter) = (0..cols + rows).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (p, _) = leave.expect("phase one is bounded");
        let pivot = t[p][enter].clone();
        for v in t[p].iter_mut() {
            *v /= &pivot;
        }
        let prow = t[p].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != p && !r[enter].is_zero() {
                let f = r[enter].clone();
                for (v, pv) in r.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
        let f = cost[enter].clone();
        for (v, pv) in cost.iter_mut().zip(&prow) {
            *v -= &f * pv;
        }
        basis[p] = enter;
    }
    cost[width - 1].is_zero()
}

fn forests(g: &Graph) -> Vec<Vec<bool>> {
    let m = g.m();
    (0u32..1 << m)
        .map(|mask| (0..m).map(|e| mask >> e & 1 == 1).collect::<Vec<bool>>())
        .filter(|ind| g.is_forest(&EdgeSubset::from_mask(ind.clone())).unwrap())
        .collect()
}

fn lp_member(g: &Graph, x: &[Q]) -> bool {
    let fs = forests(g);
    let mut a: Vec<Vec<Q>> = (0..g.m())
        .map(|e| fs.iter().map(|f| if f[e] { Q::one() } else { Q::zero() }).collect())
        .collect();
    a.push(vec![Q::one(); fs.len()]);
    // the empty forest absorbs slack, so the weights may sum to exactly one
    let mut b = x.to_vec();
    b.push(Q::one());
    feasible(&a, &b)
}

fn to_f64(x: &[Q]) -> Vec<f64> {
    x.iter()
        .map(|v| v.numer().to_string().parse::<f64>().unwrap() / v.denom().to_string().parse::<f64>().unwrap())
        .collect()
}

#[test]
fn lp_agrees_with_subset_membership() {
    let mut graphs = vec![complete_graph(4), cycle(5).unwrap(), cycle(3).unwrap()];
    for seed in 0..6 {
        graphs.push(random_connected(4 + (seed % 2) as usize, 7, seed).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut members, mut outsiders) = (0, 0);
    for g in &graphs {
        for _ in 0..25 {
            let scale = rng.random_range(2..=4);
            let x: Vec<Q> = (0..g.m()).map(|_| q(rng.random_range(0..=4), 2 * scale)).collect();
            let x: Vec<Q> = x.into_iter().map(|v| if v > Q::one() { Q::one() } else { v }).collect();
            let expected = lp_member(g, &x);
            let verdict = membership(g, &to_f64(&x)).unwrap();
            assert_eq!(verdict.member, expected, "x = {x:?} on {:?}", g.edges());
            if expected {
                members += 1;
            } else {
                outsiders += 1;
            }
        }
    }
    assert!(members > 20 && outsiders > 20, "{members} / {outsiders}");
}

#[test]
fn rank_is_submodular() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for g in [complete_graph(6), random_connected(7, 14, 3).unwrap(), cycle(9).unwrap()] {
        let oracle = RankOracle::new(&g);
        let r = |s: Vec<bool>| oracle.rank(&EdgeSubset::from_mask(s)).unwrap();
        assert_eq!(r(vec![false; g.m()]), 0);
        for _ in 0..10_000 {
            let a: Vec<bool> = (0..g.m()).map(|_| rng.random_bool(0.4)).collect();
            let b: Vec<bool> = (0..g.m()).map(|_| rng.random_bool(0.4)).collect();
            let union: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x || *y).collect();
            let inter = a.iter().zip(&b).map(|(x, y)| *x && *y).collect();
            assert!(r(a.clone()) <= r(union.clone()));
            assert!(r(union) + r(inter) <= r(a) + r(b));
        }
    }
}

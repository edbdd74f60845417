#![allow(dead_code)]

use asdim_core::abelian::{IntegerMatrix, PresentedAbelian};
use asdim_core::group::{GroupElement, GroupSpec};
use asdim_core::metric::{MetricContext, WeightFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One representative group of every kind, all with unit default weights
/// except the truncated rationals.
pub fn sample_groups() -> Vec<(&'static str, GroupSpec)> {
    let presented =
        PresentedAbelian::new(3, IntegerMatrix::from_rows(3, &[vec![2, 0, 0], vec![0, 3, 3]]).unwrap()).unwrap();
    vec![
        ("Z^2", GroupSpec::FreeAbelian { rank: 2 }),
        ("F2", GroupSpec::Free { rank: 2 }),
        ("Z/7", GroupSpec::FiniteCyclic { order: 7 }),
        ("Z/2+Z/3+Z", GroupSpec::PresentedAbelian(presented)),
        ("H3", GroupSpec::Heisenberg),
        (
            "ZxZ/3",
            GroupSpec::DirectProduct(vec![
                GroupSpec::FreeAbelian { rank: 1 },
                GroupSpec::FiniteCyclic { order: 3 },
            ]),
        ),
        ("Q3", GroupSpec::RationalsTruncated { depth: 3 }),
    ]
}

/// Unit-weight symmetric generating set.
pub fn symmetric_generators(group: &GroupSpec) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for g in group.generators() {
        let inv = group.invert(&g).unwrap();
        if g != group.identity() {
            out.push(g.clone());
            if inv != g {
                out.push(inv);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Product of at most `max_len` random generators or inverses.
pub fn random_word(group: &GroupSpec, rng: &mut ChaCha8Rng, max_len: usize) -> GroupElement {
    let gens = symmetric_generators(group);
    let len = rng.gen_range(0..=max_len);
    let mut x = group.identity();
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        x = group.multiply(&x, g).unwrap();
    }
    x
}

pub fn standard_context(group: &GroupSpec) -> MetricContext {
    MetricContext::intrinsic(WeightFunction::standard(group.clone()).unwrap())
}

/// Rank over the rationals by fraction-exact Gaussian elimination.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    use num_traits::Zero;
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, p) in m[i][c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant by cofactor expansion.
pub fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::from(1);
    }
    let mut total = BigInt::from(0);
    for (j, a) in m[0].iter().enumerate() {
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = a * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: `d_k / d_{k-1}` where
/// `d_k` is the gcd of all `k × k` minors.
pub fn invariant_factors(rows: &[Vec<i64>], cols: usize) -> Vec<BigInt> {
    use num_integer::Integer;
    use num_traits::Zero;
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut prev = BigInt::from(1);
    let mut out = Vec::new();
    for k in 1..=rows.len().min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows.len(), k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect())
                    .collect();
                g = g.gcd(&cofactor_det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

/// A random unimodular `n × n` matrix as a product of elementary operations.
pub fn random_unimodular(n: usize, rng: &mut ChaCha8Rng, steps: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let f = rng.gen_range(-2..=2);
        let source = m[j].clone();
        for (x, y) in m[i].iter_mut().zip(&source) {
            *x += f * y;
        }
        if rng.gen_bool(0.2) {
            m.swap(i, j);
        }
    }
    m
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>], inner: usize, cols: usize) -> Vec<Vec<i64>> {
    a.iter()
        .map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect())
        .collect()
}

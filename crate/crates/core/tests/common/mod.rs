#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use localcent::graph::{Graph, MatrixMode, SquareMatrix};

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i:03}")).collect()
}

pub fn directed_cycle(n: usize) -> Graph {
    Graph::new(ids(n), true, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
}

pub fn directed_path(n: usize) -> Graph {
    Graph::new(ids(n), true, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
    Graph::new(ids(n), false, edges).unwrap()
}

pub fn disjoint_cliques(m: usize) -> Graph {
    let edges = (0..2).flat_map(|b| {
        (0..m).flat_map(move |i| (i + 1..m).map(move |j| (b * m + i, b * m + j, 1.0)))
    });
    Graph::new(ids(2 * m), false, edges).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub enum Weights {
    /// Uniform on [0.1, 2).
    Continuous,
    /// Uniform on {1, 2, 3}.
    Integer,
}

/// Erdős–Rényi style graph with random density and weights.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, directed: bool, weights: Weights) -> Graph {
    let p: f64 = rng.random_range(0.1..0.7);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            if rng.random::<f64>() < p {
                let w = match weights {
                    Weights::Continuous => rng.random_range(0.1..2.0),
                    Weights::Integer => rng.random_range(1..=3) as f64,
                };
                edges.push((i, j, w));
            }
        }
    }
    Graph::new(ids(n), directed, edges).unwrap()
}

/// Connected undirected graph containing a triangle (hence aperiodic).
pub fn random_connected_aperiodic(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges = vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)];
    for i in 3..n {
        let j = rng.random_range(0..i);
        edges.push((j, i, rng.random_range(0.1..2.0)));
    }
    for _ in 0..n {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            edges.push((i, j, rng.random_range(0.1..2.0)));
        }
    }
    Graph::new(ids(n), false, edges).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

// ---- characteristic polynomial oracle -------------------------------------

type Poly = Vec<BigRational>; // coefficients, lowest degree first

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn degree(p: &Poly) -> usize {
    p.len() - 1
}

fn is_zero_poly(p: &Poly) -> bool {
    p.iter().all(Zero::is_zero)
}

fn derivative(p: &Poly) -> Poly {
    if p.len() == 1 {
        return vec![BigRational::zero()];
    }
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// Quotient and remainder.
fn divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    let db = degree(b);
    let lead = b[db].clone();
    if degree(&r) < db {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); degree(&r) - db + 1];
    while !is_zero_poly(&r) && degree(&r) >= db {
        let shift = degree(&r) - db;
        let c = r[degree(&r)].clone() / lead.clone();
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &c * bi;
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(p: Poly) -> Poly {
    let lead = p.last().unwrap().clone();
    p.into_iter().map(|c| c / lead.clone()).collect()
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !is_zero_poly(&y) {
        let (_, r) = divmod(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// det(λI − A) by the Faddeev–LeVerrier recursion, exact over the rationals.
pub fn characteristic_polynomial(a: &SquareMatrix) -> Poly {
    let n = a.n();
    let to_q = |v: f64| BigRational::from_float(v).expect("finite entry");
    let am: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| to_q(a.get(i, j))).collect()).collect();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    if !am[i][l].is_zero() && !m[l][j].is_zero() {
                        s += &am[i][l] * &m[l][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &am[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    coeffs
}

/// Square-free factors `(factor, multiplicity)` by Yun's algorithm.
fn square_free(f: &Poly) -> Vec<(Poly, usize)> {
    let f = monic(f.clone());
    let fp = derivative(&f);
    if degree(&f) == 0 {
        return vec![];
    }
    let a0 = gcd(&f, &fp);
    let mut b = divmod(&f, &a0).0;
    let c = divmod(&fp, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while degree(&b) > 0 {
        let a = gcd(&b, &d);
        let b_next = divmod(&b, &a).0;
        let c_next = divmod(&d, &a).0;
        if degree(&a) > 0 {
            out.push((a, i));
        }
        d = sub(&c_next, &derivative(&b_next));
        b = b_next;
        i += 1;
    }
    out
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Roots of a square-free polynomial by Aberth–Ehrlich iteration.
fn simple_roots(p: &Poly) -> Vec<Complex64> {
    let p = monic(p.clone());
    let n = degree(&p);
    let c: Vec<Complex64> = p.iter().map(|q| Complex64::new(q.to_f64().unwrap(), 0.0)).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    let dc: Vec<Complex64> = (1..=n).map(|i| c[i] * i as f64).collect();
    let bound = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound * 0.7, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let ratio = horner(&c, z[k]) / horner(&dc, z[k]);
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    z
}

/// Eigenvalues of `a` with multiplicity from the exact characteristic
/// polynomial.
pub fn charpoly_eigenvalues(a: &SquareMatrix) -> Vec<Complex64> {
    let mut p = characteristic_polynomial(a);
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        roots.push(Complex64::new(0.0, 0.0));
        p.remove(0);
    }
    for (factor, mult) in square_free(&p) {
        for r in simple_roots(&factor) {
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    roots
}

/// Largest distance in a greedy nearest-neighbour matching of two multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multiset sizes differ");
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn square(rows: &[Vec<f64>]) -> SquareMatrix {
    SquareMatrix::from_rows(MatrixMode::Adjacency, rows).unwrap()
}


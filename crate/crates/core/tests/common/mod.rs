//! Test-only oracles, written without the crate's LP or vertex enumeration.
#![allow(dead_code)]

use std::collections::BTreeSet;

use contextuality::{Model, Rational, Scenario};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn big(r: &Rational) -> BigRational {
    BigRational::new(r.numer(), r.denom())
}

pub fn model_big(m: &Model) -> Vec<BigRational> {
    m.weights().iter().map(big).collect()
}

fn bi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Solves `A_S x_S = b` by Gauss-Jordan. Returns `None` unless the columns in
/// `cols` are independent and the system is consistent.
fn solve_on_support(a: &[Vec<BigRational>], b: &[BigRational], cols: &[usize]) -> Option<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r: Vec<BigRational> = cols.iter().map(|&c| row[c].clone()).collect();
            r.push(rhs.clone());
            r
        })
        .collect();
    let k = cols.len();
    let mut r = 0;
    for c in 0..k {
        let p = (r..m.len()).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = &*x - &f * y;
                }
            }
        }
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k].clone()).collect())
}

fn rank(a: &[Vec<BigRational>], n: usize) -> usize {
    let mut m = a.to_vec();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = &*x - &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Vertices of `{x ≥ 0 : A x = b}` as basic feasible solutions: every
/// support with independent columns whose solution is strictly positive on it.
pub fn basic_feasible_solutions(a: &[Vec<BigRational>], b: &[BigRational], n: usize) -> BTreeSet<Vec<BigRational>> {
    let max = rank(a, n);
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize > max {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
        if let Some(x) = solve_on_support(a, b, &cols) {
            if x.iter().all(|v| v.is_positive()) {
                let mut full = vec![BigRational::zero(); n];
                for (&c, v) in cols.iter().zip(x) {
                    full[c] = v;
                }
                out.insert(full);
            }
        }
    }
    out
}

/// Oracle for the extreme points of a scenario's model polytope.
pub fn oracle_extreme_points(h: &Scenario) -> BTreeSet<Vec<BigRational>> {
    let n = h.vertex_count();
    let a: Vec<Vec<BigRational>> = h
        .edges()
        .iter()
        .map(|e| (0..n).map(|v| if e.contains(&v) { bi(1) } else { bi(0) }).collect())
        .collect();
    let b = vec![BigRational::one(); a.len()];
    basic_feasible_solutions(&a, &b, n)
}

/// Random scenario with `n ≤ max_n` vertices and up to `max_edges` edges of
/// size at most `max_edge`, resampled until every vertex is covered.
pub fn random_scenario(rng: &mut ChaCha8Rng, max_n: usize, max_edges: usize, max_edge: usize) -> Scenario {
    loop {
        let n = rng.gen_range(2..=max_n);
        let m = rng.gen_range(1..=max_edges);
        let mut edges: Vec<Vec<String>> = Vec::new();
        for _ in 0..m {
            let size = rng.gen_range(1..=max_edge.min(n));
            let mut e = BTreeSet::new();
            while e.len() < size {
                e.insert(rng.gen_range(0..n));
            }
            edges.push(e.into_iter().map(|v| format!("v{v}")).collect());
        }
        let labels: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
        if let Ok(h) = Scenario::new(labels, edges) {
            return h;
        }
    }
}

/// Random rational in `[0, 1]` with small denominator.
pub fn random_unit(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.gen_range(1..=12);
    Rational::new(rng.gen_range(0..=d), d)
}

/// Random convex combination of the given points.
pub fn random_convex(rng: &mut ChaCha8Rng, points: &[Model]) -> Model {
    let mut w: Vec<Rational> = points.iter().map(|_| Rational::from_integer(rng.gen_range(0..5))).collect();
    if w.iter().all(Rational::is_zero) {
        w[0] = Rational::one();
    }
    let total: Rational = w.iter().sum();
    let n = points[0].len();
    let mut acc = vec![Rational::zero(); n];
    for (p, wi) in points.iter().zip(&w) {
        let c = wi / &total;
        for (a, x) in acc.iter_mut().zip(p.weights()) {
            *a += &(&c * x);
        }
    }
    Model::new(acc)
}

/// Connected graphs on `n` vertices up to isomorphism, as sorted edge lists.
///
/// Every connected graph has a vertex whose removal leaves it connected, so
/// all classes on `n` vertices arise by attaching a new vertex to a class on
/// `n - 1`. Classes are identified by the least adjacency bitmask over all
/// vertex permutations.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!((1..=7).contains(&n));
    let mut classes: BTreeSet<u32> = BTreeSet::from([0]);
    for k in 2..=n {
        let perms = permutations(k);
        let mut next = BTreeSet::new();
        for &g in &classes {
            for nbrs in 1u32..(1 << (k - 1)) {
                let mut h = g;
                for u in 0..k - 1 {
                    if nbrs >> u & 1 == 1 {
                        h |= 1 << pair_bit(u, k - 1);
                    }
                }
                next.insert(canonical(h, k, &perms));
            }
        }
        classes = next;
    }
    classes
        .into_iter()
        .map(|g| {
            let mut edges = Vec::new();
            for v in 0..n {
                for u in 0..v {
                    if g >> pair_bit(u, v) & 1 == 1 {
                        edges.push((u, v));
                    }
                }
            }
            edges
        })
        .collect()
}

fn pair_bit(u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    v * (v - 1) / 2 + u
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    fn rec(i: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(i + 1, p, out);
            p.swap(i, j);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

fn canonical(g: u32, k: usize, perms: &[Vec<usize>]) -> u32 {
    let pairs: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|v| (0..v).map(move |u| (u, v)))
        .filter(|&(u, v)| g >> pair_bit(u, v) & 1 == 1)
        .map(|(u, v)| (u, v, 0))
        .collect();
    perms
        .iter()
        .map(|p| pairs.iter().fold(0u32, |acc, &(u, v, _)| acc | 1 << pair_bit(p[u], p[v])))
        .min()
        .unwrap()
}

pub fn graph_scenario(n: usize, edges: &[(usize, usize)]) -> Scenario {
    Scenario::new(
        (0..n).map(|v| format!("v{v}")),
        edges.iter().map(|&(u, v)| [format!("v{u}"), format!("v{v}")]),
    )
    .unwrap()
}

#![allow(dead_code)]

use lapmahler::{EdgeOrbit, IntegerMatrix, PeriodicGraph};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shift(rng: &mut ChaCha8Rng, d: usize, range: i64) -> Vec<i64> {
    (0..d).map(|_| rng.gen_range(-range..=range)).collect()
}

/// Periodic graph with `n` in `1..=max_n` orbits and `1..=max_edges` edge
/// orbits. True loops are redrawn so the edge count is exact.
pub fn periodic_graph(
    rng: &mut ChaCha8Rng,
    d: usize,
    max_n: usize,
    max_edges: usize,
    range: i64,
    weights: &[i64],
) -> PeriodicGraph {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_edges);
    let mut edges = Vec::new();
    while edges.len() < m {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let s = shift(rng, d, range);
        if u == v && s.iter().all(|&c| c == 0) {
            continue;
        }
        edges.push(EdgeOrbit::new(u, v, s, *weights.choose(rng).unwrap()));
    }
    PeriodicGraph::new(d, n, edges).unwrap()
}

/// Periodic graph whose quotient graph is connected: a random spanning tree
/// plus extra edge orbits.
pub fn connected_periodic_graph(
    rng: &mut ChaCha8Rng,
    d: usize,
    max_n: usize,
    extra_edges: usize,
    range: i64,
    weights: &[i64],
) -> PeriodicGraph {
    let n = rng.gen_range(1..=max_n);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(EdgeOrbit::new(
            u,
            v,
            shift(rng, d, range),
            *weights.choose(rng).unwrap(),
        ));
    }
    let extra = rng.gen_range(1..=extra_edges);
    while edges.len() < n - 1 + extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let s = shift(rng, d, range);
        if u == v && s.iter().all(|&c| c == 0) {
            continue;
        }
        edges.push(EdgeOrbit::new(u, v, s, *weights.choose(rng).unwrap()));
    }
    PeriodicGraph::new(d, n, edges).unwrap()
}

/// Connected finite graph on `2..=max_n` vertices with at most `max_edges`
/// edges, possibly with parallel edges.
pub fn connected_finite_graph(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_edges: usize,
    weights: &[i64],
) -> PeriodicGraph {
    let n = rng.gen_range(2..=max_n);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v, *weights.choose(rng).unwrap()));
    }
    let total = rng.gen_range(n - 1..=max_edges.max(n - 1));
    while edges.len() < total {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u, v, *weights.choose(rng).unwrap()));
        }
    }
    PeriodicGraph::finite(n, &edges).unwrap()
}

pub fn integer_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, range: i64) -> IntegerMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-range..=range)).collect())
        .collect();
    IntegerMatrix::from_rows(&data).unwrap()
}

/// Matrix with prescribed rank pattern: a product of random factors, to make
/// nontrivial torsion and rank deficiency common.
pub fn structured_matrix(rng: &mut ChaCha8Rng, n: usize) -> IntegerMatrix {
    let k = rng.gen_range(1..=n);
    let a = integer_matrix(rng, n, k, 3);
    let b = integer_matrix(rng, k, n, 3);
    a.mul(&b).unwrap()
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Order of the torsion subgroup of `coker M` from determinantal divisors:
/// the gcd of the `r x r` minors, `r` the largest order with a nonzero minor.
pub fn torsion_from_minors(m: &IntegerMatrix) -> BigInt {
    let rows = m.to_rows();
    let (nr, nc) = (m.rows(), m.cols());
    let mut last = BigInt::one();
    for k in 1..=nr.min(nc) {
        let mut g = BigInt::zero();
        for rs in subsets(nr, k) {
            for cs in subsets(nc, k) {
                let sub: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect())
                    .collect();
                g = g.gcd(&cofactor_det(&sub));
            }
        }
        if g.is_zero() {
            break;
        }
        last = g;
    }
    last.abs()
}

/// `|sum over spanning trees of the weight product|` by checking every
/// `(n-1)`-edge subset for acyclicity.
pub fn spanning_tree_sum_by_subsets(g: &PeriodicGraph) -> BigInt {
    let n = g.vertex_orbits();
    let edges = g.edges();
    let mut total = BigInt::zero();
    for s in subsets(edges.len(), n - 1) {
        let mut parent: Vec<usize> = (0..n).collect();
        let find = |p: &mut Vec<usize>, mut x: usize| {
            while p[x] != x {
                x = p[x];
            }
            x
        };
        let mut ok = true;
        for &k in &s {
            let (a, b) = (
                find(&mut parent, edges[k].tail),
                find(&mut parent, edges[k].head),
            );
            if a == b {
                ok = false;
                break;
            }
            parent[a] = b;
        }
        if ok {
            total += s
                .iter()
                .map(|&k| BigInt::from(edges[k].weight))
                .product::<BigInt>();
        }
    }
    total.abs()
}

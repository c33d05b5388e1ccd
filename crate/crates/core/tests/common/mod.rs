//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the crate's linear algebra: distances come from the
//! square of the normalized Laplacian instead of an eigendecomposition,
//! magnitude from a Gauss-Jordan inverse, and contraction from edge lists.
#![allow(dead_code)]

use magpool::graph::Graph;
use magpool::io::{generate, GraphKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<f64>>;

pub fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    // repeated relaxation; fine for test sizes
    loop {
        let mut changed = false;
        for &(u, v) in edges {
            let m = label[u].min(label[v]);
            if label[u] != m || label[v] != m {
                label[u] = m;
                label[v] = m;
                changed = true;
            }
        }
        if !changed {
            return label;
        }
    }
}

/// Diffusion distances from `d(x,y)² = L²[x,x] + L²[y,y] − 2·L²[x,y]`.
pub fn distances(n: usize, edges: &[(usize, usize)]) -> Matrix {
    let mut deg = vec![0.0; n];
    for &(u, v) in edges {
        deg[u] += 1.0;
        deg[v] += 1.0;
    }
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        l[i][i] = 1.0;
    }
    for &(u, v) in edges {
        let w = 1.0 / (deg[u] as f64 * deg[v] as f64).sqrt();
        l[u][v] -= w;
        l[v][u] -= w;
    }
    let l2: Matrix = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| l[i][k] * l[k][j]).sum()).collect())
        .collect();
    let comp = components(n, edges);
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    if x == y {
                        0.0
                    } else if comp[x] != comp[y] {
                        f64::INFINITY
                    } else {
                        (l2[x][x] + l2[y][y] - 2.0 * l2[x][y]).max(0.0).sqrt()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn graph_distances(g: &Graph) -> Matrix {
    distances(g.node_count(), &g.edges())
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        let pivot = a[c][c];
        for x in a[c].iter_mut() {
            *x /= pivot;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn similarity(d: &Matrix, t: f64) -> Matrix {
    d.iter()
        .map(|row| row.iter().map(|&x| if x.is_infinite() { 0.0 } else { (-t * x).exp() }).collect())
        .collect()
}

/// Sum of all entries of `ζ⁻¹`.
pub fn magnitude(d: &Matrix, t: f64) -> f64 {
    inverse(&similarity(d, t))
        .expect("similarity matrix is invertible")
        .iter()
        .flatten()
        .sum()
}

pub fn spread(d: &Matrix, t: f64) -> f64 {
    similarity(d, t).iter().map(|row| 1.0 / row.iter().sum::<f64>()).sum()
}

/// `G/e` on edge lists: `v` folds into `u`, later nodes shift down.
pub fn contract(n: usize, edges: &[(usize, usize)], u: usize, v: usize) -> (usize, Vec<(usize, usize)>) {
    let (keep, gone) = (u.min(v), u.max(v));
    let relabel = |x: usize| {
        let x = if x == gone { keep } else { x };
        if x > gone {
            x - 1
        } else {
            x
        }
    };
    let mut out: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (relabel(a), relabel(b)))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    out.sort_unstable();
    out.dedup();
    (n - 1, out)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::new(n, edges).unwrap()
}

/// Random spanning tree plus extra edges with probability `p`.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Half Erdős–Rényi `G(n, 0.3)`, half random geometric with radius 0.35,
/// `n` uniform in `[10, 30]`, all drawn from one seed.
pub fn synthetic_corpus(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(10..=30);
            let graph_seed = rng.gen();
            let kind = if i % 2 == 0 {
                GraphKind::ErdosRenyi { n, p: 0.3 }
            } else {
                GraphKind::RandomGeometric { n, radius: 0.35 }
            };
            generate(kind, graph_seed).unwrap()
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix_of(d: &magpool::diffusion::DistanceMatrix) -> Matrix {
    (0..d.len()).map(|i| (0..d.len()).map(|j| d.get(i, j)).collect()).collect()
}

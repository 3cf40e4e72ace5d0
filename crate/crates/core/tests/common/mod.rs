#![allow(dead_code)]

use nalgebra::DMatrix;
use ncdrank::{DanglingStrategy, Decomposition, SparseGraph};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph with an exact share of dangling nodes.
pub fn graph(rng: &mut ChaCha8Rng, n: usize, max_deg: usize, dangling: f64) -> SparseGraph {
    let dead: Vec<usize> = sample(rng, n, (dangling * n as f64).ceil() as usize).into_vec();
    let mut edges = Vec::new();
    for u in 0..n {
        if dead.contains(&u) {
            continue;
        }
        for _ in 0..rng.random_range(1..=max_deg) {
            edges.push((u, rng.random_range(0..n)));
        }
    }
    SparseGraph::from_edges(n, &edges)
}

/// Random cover with `k` blocks; with `overlap` some nodes join a second block.
pub fn cover(rng: &mut ChaCha8Rng, n: usize, k: usize, overlap: bool) -> Decomposition {
    let k = k.clamp(1, n);
    let mut blocks = vec![Vec::new(); k];
    let perm = sample(rng, n, n).into_vec();
    for (i, &u) in perm.iter().enumerate() {
        let b = if i < k { i } else { rng.random_range(0..k) };
        blocks[b].push(u);
        if overlap && k > 1 && rng.random_bool(0.2) {
            let extra = rng.random_range(0..k);
            if extra != b {
                blocks[extra].push(u);
            }
        }
    }
    Decomposition::from_blocks(n, &blocks).unwrap()
}

/// Inter-level matrix straight from its definition.
pub fn inter_level(g: &SparseGraph, d: &Decomposition) -> DMatrix<f64> {
    let n = g.node_count();
    let mut m = DMatrix::zeros(n, n);
    for u in 0..n {
        let mut prox: Vec<usize> = d.blocks_of(u).to_vec();
        for &v in g.successors(u) {
            prox.extend_from_slice(d.blocks_of(v));
        }
        prox.sort_unstable();
        prox.dedup();
        for &k in &prox {
            let blk = d.block(k);
            for &v in blk {
                m[(u, v)] += 1.0 / (prox.len() * blk.len()) as f64;
            }
        }
    }
    m
}

/// Dense `P` built entry by entry.
pub fn dense_p(
    g: &SparseGraph,
    decomps: &[Decomposition],
    eta: f64,
    mus: &[f64],
    v: &[f64],
    dangling: &DanglingStrategy,
) -> DMatrix<f64> {
    let n = g.node_count();
    let ms: Vec<DMatrix<f64>> = decomps.iter().map(|d| inter_level(g, d)).collect();
    let tele = 1.0 - eta - mus.iter().sum::<f64>();
    let mut p = DMatrix::zeros(n, n);
    for u in 0..n {
        let succ = g.successors(u);
        for j in 0..n {
            let h = if succ.is_empty() {
                match dangling {
                    DanglingStrategy::StronglyPreferential => v[j],
                    DanglingStrategy::WeaklyPreferential(f) => f[j],
                    DanglingStrategy::NcdAware => ms[0][(u, j)],
                }
            } else {
                succ.iter().filter(|&&s| s == j).count() as f64 / succ.len() as f64
            };
            let mut x = eta * h + tele * v[j];
            for (m, mu) in ms.iter().zip(mus) {
                x += mu * m[(u, j)];
            }
            p[(u, j)] = x;
        }
    }
    p
}

/// Stationary vector from `(Pᵀ − I) π = 0, Σπ = 1`.
pub fn stationary(p: &DMatrix<f64>) -> Vec<f64> {
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    let mut b = nalgebra::DVector::zeros(n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    b[n - 1] = 1.0;
    a.full_piv_lu()
        .solve(&b)
        .expect("irreducible chain")
        .iter()
        .copied()
        .collect()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Primitivity by Wielandt's bound: some power `≤ (n−1)² + 1` is positive.
pub fn primitive_by_powers(pattern: &[Vec<bool>]) -> bool {
    let n = pattern.len();
    let limit = (n - 1) * (n - 1) + 1;
    let mut cur = pattern.to_vec();
    for _ in 1..limit {
        if cur.iter().all(|r| r.iter().all(|&x| x)) {
            return true;
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if cur[i][k] {
                    for j in 0..n {
                        next[i][j] |= pattern[k][j];
                    }
                }
            }
        }
        cur = next;
    }
    cur.iter().all(|r| r.iter().all(|&x| x))
}

/// Two dense communities with `k` blocks each and no links across.
pub fn separable_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
) -> (SparseGraph, Decomposition) {
    let half = n / 2;
    let mut edges = Vec::new();
    for u in 0..n {
        let (lo, hi) = if u < half { (0, half) } else { (half, n) };
        if rng.random_bool(0.25) {
            continue;
        }
        for _ in 0..rng.random_range(1..=4) {
            edges.push((u, rng.random_range(lo..hi)));
        }
    }
    let g = SparseGraph::from_edges(n, &edges);
    let mut blocks = Vec::new();
    for (lo, hi) in [(0, half), (half, n)] {
        let size = (hi - lo).div_ceil(k);
        let mut s = lo;
        while s < hi {
            blocks.push((s..(s + size).min(hi)).collect::<Vec<_>>());
            s += size;
        }
    }
    (g, Decomposition::from_blocks(n, &blocks).unwrap())
}

//! Dense reference implementations for unit tests. Built straight from the
//! elementwise definitions, sharing no code with the sparse solvers.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::Decomposition;
use crate::graph::SparseGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph with roughly `dangling_frac` of nodes having no out-links.
pub fn random_graph(
    rng: &mut impl Rng,
    n: usize,
    max_deg: usize,
    dangling_frac: f64,
) -> SparseGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        if rng.random_bool(dangling_frac) {
            continue;
        }
        let d = rng.random_range(1..=max_deg);
        for _ in 0..d {
            edges.push((u, rng.random_range(0..n)));
        }
    }
    SparseGraph::from_edges(n, &edges)
}

/// Random partition into at most `k` non-empty blocks.
pub fn random_partition(rng: &mut impl Rng, n: usize, k: usize) -> Decomposition {
    let k = k.clamp(1, n);
    let mut assign: Vec<usize> = (0..n)
        .map(|u| if u < k { u } else { rng.random_range(0..k) })
        .collect();
    // shuffle so block ids are not tied to the first nodes
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        assign.swap(i, j);
    }
    Decomposition::from_assignment(&assign).unwrap()
}

/// Random overlapping cover: a partition plus a few extra memberships.
pub fn random_cover(rng: &mut impl Rng, n: usize, k: usize) -> Decomposition {
    let base = random_partition(rng, n, k);
    let mut blocks: Vec<Vec<usize>> = base.blocks().to_vec();
    let kk = blocks.len();
    for _ in 0..n / 4 {
        let u = rng.random_range(0..n);
        blocks[rng.random_range(0..kk)].push(u);
    }
    Decomposition::from_blocks(n, &blocks).unwrap()
}

/// Row-normalized adjacency with zero dangling rows.
pub fn dense_h(g: &SparseGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut h = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        h[(u, v)] = 1.0 / g.out_degree(u) as f64;
    }
    h
}

/// `M_uv = Σ_{k ∈ M_u, v ∈ D_k} 1 / (N_u |D_k|)` evaluated elementwise.
pub fn dense_m(g: &SparseGraph, d: &Decomposition) -> DMatrix<f64> {
    let n = g.node_count();
    let mut m = DMatrix::zeros(n, n);
    for u in 0..n {
        let mut near: Vec<usize> = vec![u];
        near.extend_from_slice(g.successors(u));
        let prox: Vec<usize> = (0..d.block_count())
            .filter(|&k| near.iter().any(|w| d.block(k).contains(w)))
            .collect();
        let nu = prox.len() as f64;
        for &k in &prox {
            let size = d.block(k).len() as f64;
            for &v in d.block(k) {
                m[(u, v)] += 1.0 / (nu * size);
            }
        }
    }
    m
}

/// Stationary distribution via `πᵀ = 1ᵀ (P + 1 1ᵀ − I)⁻¹`.
pub fn dense_stationary(p: &DMatrix<f64>) -> Vec<f64> {
    let n = p.nrows();
    let a = p + DMatrix::from_element(n, n, 1.0) - DMatrix::identity(n, n);
    let at = a.transpose();
    let x = at
        .lu()
        .solve(&nalgebra::DVector::from_element(n, 1.0))
        .expect("nonsingular");
    x.iter().copied().collect()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

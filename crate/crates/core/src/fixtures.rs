//! Small hand-checkable models used by tests, benches and the CLI smoke runs.
//!
//! Node and block labels are 1-based strings; internal ids are 0-based.

use crate::decomposition::Decomposition;
use crate::graph::{LabelMap, SparseGraph};

fn labelled_graph(n: usize, edges: &[(usize, usize)]) -> SparseGraph {
    let mut labels = LabelMap::new();
    for i in 1..=n {
        labels.intern(&i.to_string());
    }
    SparseGraph::new(labels, edges.iter().map(|&(u, v)| (u - 1, v - 1)))
}

fn blocks(n: usize, members: &[&[usize]]) -> Decomposition {
    let owned: Vec<Vec<usize>> = members
        .iter()
        .map(|b| b.iter().map(|u| u - 1).collect())
        .collect();
    Decomposition::from_blocks(n, &owned).expect("fixture blocks cover the node set")
}

/// Eight pages on two disconnected sites with dangling pages 4, 6 and 7.
/// Blocks `{1,2} {3,4} {5,6,7} {8}`.
pub fn two_site_web() -> (SparseGraph, Decomposition) {
    let g = labelled_graph(
        8,
        &[
            (1, 2),
            (2, 3),
            (2, 4),
            (3, 2),
            (3, 4),
            (5, 6),
            (5, 7),
            (5, 8),
            (8, 5),
        ],
    );
    let d = blocks(8, &[&[1, 2], &[3, 4], &[5, 6, 7], &[8]]);
    (g, d)
}

/// Edges of the seven-node example graph; node 7 is dangling.
pub const SEVEN_NODE_EDGES: [(usize, usize); 8] = [
    (1, 3),
    (2, 1),
    (2, 3),
    (3, 4),
    (3, 7),
    (4, 5),
    (5, 6),
    (6, 4),
];

pub fn seven_node_graph() -> SparseGraph {
    labelled_graph(7, &SEVEN_NODE_EDGES)
}

/// Seven-node graph with blocks `{1,2} {3,4,7} {5,6}` (reducible indicator).
pub fn seven_node() -> (SparseGraph, Decomposition) {
    (
        seven_node_graph(),
        blocks(7, &[&[1, 2], &[3, 4, 7], &[5, 6]]),
    )
}

/// Seven-node graph with blocks `{1} {2,3,4,7} {5,6}` (irreducible indicator).
pub fn seven_node_irreducible() -> (SparseGraph, Decomposition) {
    (
        seven_node_graph(),
        blocks(7, &[&[1], &[2, 3, 4, 7], &[5, 6]]),
    )
}

/// Seven-node graph with two individually reducible decompositions whose
/// stacked indicator is irreducible: `{1,2} {3,4,7} {5,6}` and `{1,2,3} {4,5,6} {7}`.
pub fn seven_node_pair() -> (SparseGraph, Decomposition, Decomposition) {
    (
        seven_node_graph(),
        blocks(7, &[&[1, 2], &[3, 4, 7], &[5, 6]]),
        blocks(7, &[&[1, 2, 3], &[4, 5, 6], &[7]]),
    )
}

/// The 8-state Courtois matrix, nearly decomposable into blocks of sizes 3, 2, 3.
pub fn courtois() -> Vec<Vec<f64>> {
    vec![
        vec![0.85, 0.0, 0.149, 0.0009, 0.0, 5e-5, 0.0, 5e-5],
        vec![0.1, 0.65, 0.249, 0.0, 0.0009, 5e-5, 0.0, 5e-5],
        vec![0.1, 0.8, 0.0996, 0.0003, 0.0, 0.0, 0.0001, 0.0],
        vec![0.0, 0.0004, 0.0, 0.7, 0.2995, 0.0, 0.0001, 0.0],
        vec![0.0005, 0.0, 0.0004, 0.399, 0.6, 0.0001, 0.0, 0.0],
        vec![0.0, 5e-5, 0.0, 0.0, 5e-5, 0.6, 0.2499, 0.15],
        vec![3e-5, 0.0, 3e-5, 4e-5, 0.0, 0.1, 0.8, 0.0999],
        vec![0.0, 5e-5, 0.0, 0.0, 5e-5, 0.1999, 0.25, 0.55],
    ]
}

pub const COURTOIS_BLOCK_SIZES: [usize; 3] = [3, 2, 3];

/// Stochastic completions of the Courtois diagonal blocks in which each row's
/// deficit is folded into one in-block entry, rounded to the printed digits.
pub fn courtois_adjusted_blocks() -> Vec<Vec<Vec<f64>>> {
    vec![
        vec![
            vec![0.85, 0.0, 0.15],
            vec![0.1, 0.65, 0.25],
            vec![0.1, 0.8, 0.1],
        ],
        vec![vec![0.7, 0.3], vec![0.4, 0.6]],
        vec![
            vec![0.6, 0.25, 0.15],
            vec![0.1, 0.8, 0.1],
            vec![0.2, 0.25, 0.55],
        ],
    ]
}

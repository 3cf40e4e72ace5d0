//! Compressed directed graphs and connectivity primitives.
//!
//! Nodes carry arbitrary string labels on input; internally they are dense
//! ids `0..n` assigned in first-appearance order. Edges are unweighted and
//! deduplicated, self-loops are kept.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Compressed sparse row pattern: `indices[offsets[i]..offsets[i + 1]]` are
/// the column ids of row `i`, sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Csr {
    offsets: Vec<usize>,
    indices: Vec<usize>,
}

impl Csr {
    /// Builds a pattern from `(row, col)` pairs. Rows are sorted and deduplicated.
    pub fn from_pairs(rows: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; rows + 1];
        for &(r, _) in &pairs {
            offsets[r + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let indices = pairs.into_iter().map(|(_, c)| c).collect();
        Csr { offsets, indices }
    }

    /// Builds a pattern from per-row lists that are already sorted and unique.
    pub fn from_rows(rows: &[Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut indices = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for r in rows {
            indices.extend_from_slice(r);
            offsets.push(indices.len());
        }
        Csr { offsets, indices }
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.indices[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Transposed pattern with `cols` rows.
    pub fn transpose(&self, cols: usize) -> Csr {
        let mut counts = vec![0usize; cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for i in 0..cols {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut indices = vec![0usize; self.indices.len()];
        // Rows are visited in increasing order, so each transposed row ends up sorted.
        for r in 0..self.rows() {
            for &c in self.row(r) {
                indices[fill[c]] = r;
                fill[c] += 1;
            }
        }
        Csr {
            offsets: counts,
            indices,
        }
    }
}

/// Bidirectional map between external labels and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels `"0"`, `"1"`, ... for `n` nodes.
    pub fn numeric(n: usize) -> Self {
        let mut m = Self::new();
        for i in 0..n {
            m.intern(&i.to_string());
        }
        m
    }

    /// Returns the id of `label`, inserting it if unseen.
    pub fn intern(&mut self, label: &str) -> usize {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

/// Immutable directed graph in compressed adjacency form.
#[derive(Debug)]
pub struct SparseGraph {
    out: Csr,
    dangling: Vec<bool>,
    labels: LabelMap,
    inbound: OnceLock<Csr>,
}

impl Clone for SparseGraph {
    fn clone(&self) -> Self {
        SparseGraph {
            out: self.out.clone(),
            dangling: self.dangling.clone(),
            labels: self.labels.clone(),
            inbound: OnceLock::new(),
        }
    }
}

impl PartialEq for SparseGraph {
    fn eq(&self, other: &Self) -> bool {
        self.out == other.out && self.labels == other.labels
    }
}

impl SparseGraph {
    /// Builds a graph over `labels.len()` nodes. Duplicate edges collapse.
    pub fn new(labels: LabelMap, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let n = labels.len();
        let out = Csr::from_pairs(n, edges);
        let dangling = (0..n).map(|u| out.row(u).is_empty()).collect();
        SparseGraph {
            out,
            dangling,
            labels,
            inbound: OnceLock::new(),
        }
    }

    /// Graph on `n` nodes labelled by their numeric id.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::new(LabelMap::numeric(n), edges.iter().copied())
    }

    pub fn node_count(&self) -> usize {
        self.dangling.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.nnz()
    }

    #[inline]
    pub fn successors(&self, u: usize) -> &[usize] {
        self.out.row(u)
    }

    #[inline]
    pub fn out_degree(&self, u: usize) -> usize {
        self.out.row(u).len()
    }

    #[inline]
    pub fn is_dangling(&self, u: usize) -> bool {
        self.dangling[u]
    }

    pub fn dangling_mask(&self) -> &[bool] {
        &self.dangling
    }

    pub fn dangling_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&u| self.dangling[u])
            .collect()
    }

    pub fn out_offsets(&self) -> &[usize] {
        self.out.offsets()
    }

    pub fn out_csr(&self) -> &Csr {
        &self.out
    }

    /// In-adjacency, built on first use.
    pub fn in_csr(&self) -> &Csr {
        self.inbound
            .get_or_init(|| self.out.transpose(self.node_count()))
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        self.in_csr().row(v)
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    pub fn label(&self, u: usize) -> &str {
        self.labels.label(u)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    /// Subgraph induced by `nodes` (given in the order they should be renumbered).
    pub fn induced(&self, nodes: &[usize]) -> SparseGraph {
        let mut local = vec![usize::MAX; self.node_count()];
        let mut labels = LabelMap::new();
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i;
            labels.intern(self.label(u));
        }
        let edges = nodes.iter().enumerate().flat_map(|(i, &u)| {
            let local = &local;
            self.successors(u)
                .iter()
                .filter(move |&&v| local[v] != usize::MAX)
                .map(move |&v| (i, local[v]))
        });
        SparseGraph::new(labels, edges.collect::<Vec<_>>())
    }

    /// Writes the graph as an edge list. Isolated nodes are not representable
    /// in this format and are therefore lost.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{}\t{}", self.label(u), self.label(v))?;
        }
        Ok(())
    }
}

/// Options for [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct EdgeListOptions {
    pub comment_prefix: String,
    /// Single-character field separator; `None` splits on runs of whitespace.
    pub delimiter: Option<char>,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            comment_prefix: "#".into(),
            delimiter: None,
        }
    }
}

pub(crate) fn split_fields<'a>(line: &'a str, delimiter: Option<char>) -> Vec<&'a str> {
    match delimiter {
        Some(d) => line
            .split(d)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect(),
        None => line.split_whitespace().collect(),
    }
}

/// Reads a `source target` edge list.
pub fn load_edge_list<R: BufRead>(reader: R, opts: &EdgeListOptions) -> Result<SparseGraph> {
    let mut labels = LabelMap::new();
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty()
            || (!opts.comment_prefix.is_empty() && trimmed.starts_with(&opts.comment_prefix))
        {
            continue;
        }
        let fields = split_fields(trimmed, opts.delimiter);
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let u = labels.intern(fields[0]);
        let v = labels.intern(fields[1]);
        edges.push((u, v));
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput("edge list has no edges"));
    }
    Ok(SparseGraph::new(labels, edges))
}

/// Component assignment of every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub component_of: Vec<usize>,
    pub component_count: usize,
    pub component_sizes: Vec<usize>,
}

impl ComponentLabeling {
    /// Relabels arbitrary root ids to `0..count` in order of first appearance.
    fn from_roots(roots: &[usize]) -> Self {
        let mut map = vec![usize::MAX; roots.len()];
        let mut component_of = Vec::with_capacity(roots.len());
        let mut component_sizes = Vec::new();
        for &r in roots {
            if map[r] == usize::MAX {
                map[r] = component_sizes.len();
                component_sizes.push(0);
            }
            component_of.push(map[r]);
            component_sizes[map[r]] += 1;
        }
        ComponentLabeling {
            component_of,
            component_count: component_sizes.len(),
            component_sizes,
        }
    }

    /// Member lists per component, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (u, &c) in self.component_of.iter().enumerate() {
            out[c].push(u);
        }
        out
    }
}

/// Strongly connected components of a square pattern (iterative Tarjan).
pub fn strongly_connected_components(pattern: &Csr) -> ComponentLabeling {
    let n = pattern.rows();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut root = vec![0usize; n];
    let mut next = 0usize;
    // (node, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        call.push((start, 0));
        index[start] = next;
        low[start] = next;
        next += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = pattern.row(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    root[w] = v;
                    if w == v {
                        break;
                    }
                }
            }
        }
    }
    ComponentLabeling::from_roots(&root)
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn labeling(&mut self) -> ComponentLabeling {
        let roots: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        ComponentLabeling::from_roots(&roots)
    }
}

/// Weakly connected components (edge direction ignored).
pub fn weakly_connected_components(g: &SparseGraph) -> ComponentLabeling {
    let mut uf = UnionFind::new(g.node_count());
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    uf.labeling()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<SparseGraph> {
        load_edge_list(s.as_bytes(), &EdgeListOptions::default())
    }

    #[test]
    fn three_cycle() {
        let g = load("0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.dangling_nodes().is_empty());
        assert_eq!(
            strongly_connected_components(g.out_csr()).component_count,
            1
        );
        assert_eq!(weakly_connected_components(&g).component_count, 1);
    }

    #[test]
    fn duplicates_collapse() {
        let g = load("a b\na b\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.dangling_nodes(), vec![1]);
    }

    #[test]
    fn self_loops_kept() {
        let g = load("x x\nx y\n").unwrap();
        assert_eq!(g.out_degree(0), 2);
        assert!(!g.is_dangling(0));
    }

    #[test]
    fn comments_and_delimiter() {
        let opts = EdgeListOptions {
            comment_prefix: "%".into(),
            delimiter: Some(','),
        };
        let g = load_edge_list(
            "% header\nsite a,site b\n\nsite b,site a\n".as_bytes(),
            &opts,
        )
        .unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.label(0), "site a");
    }

    #[test]
    fn malformed_line_reports_number() {
        match load("0 1\n1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load("# only comments\n"),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn two_site_web_graph() {
        let text = "1 2\n2 3\n2 4\n3 2\n3 4\n5 6\n5 7\n5 8\n8 5\n";
        let g = load(text).unwrap();
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.edge_count(), 9);
        let dangling: Vec<&str> = g.dangling_nodes().iter().map(|&u| g.label(u)).collect();
        assert_eq!(dangling, vec!["4", "6", "7"]);
        let wcc = weakly_connected_components(&g);
        assert_eq!(wcc.component_count, 2);
        let members: Vec<Vec<&str>> = wcc
            .members()
            .iter()
            .map(|m| m.iter().map(|&u| g.label(u)).collect())
            .collect();
        assert_eq!(
            members,
            vec![vec!["1", "2", "3", "4"], vec!["5", "6", "7", "8"]]
        );
    }

    #[test]
    fn disjoint_cycles_and_isolated() {
        let g = SparseGraph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert_eq!(
            strongly_connected_components(g.out_csr()).component_count,
            2
        );
        let iso = SparseGraph::from_edges(5, &[]);
        let wcc = weakly_connected_components(&iso);
        assert_eq!(wcc.component_count, 5);
        assert_eq!(wcc.component_sizes, vec![1; 5]);
    }

    #[test]
    fn upper_triangular_pattern_is_reducible() {
        let p = Csr::from_pairs(3, [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
        assert_eq!(strongly_connected_components(&p).component_count, 3);
    }

    #[test]
    fn transpose_and_predecessors() {
        let g = SparseGraph::from_edges(3, &[(0, 2), (1, 2), (2, 0)]);
        assert_eq!(g.predecessors(2), &[0, 1]);
        assert_eq!(g.predecessors(0), &[2]);
        assert!(g.predecessors(1).is_empty());
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let g = SparseGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let s = g.induced(&[2, 3]);
        assert_eq!(s.node_count(), 2);
        assert_eq!(s.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(s.label(0), "2");
    }
}

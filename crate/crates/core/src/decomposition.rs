//! Block decompositions, proximal sets, the `R`/`A` factors of the
//! inter-level proximity matrix and the indicator-matrix primitivity tests.
//!
//! A decomposition is a family of non-empty, possibly overlapping node
//! blocks covering the node set. For a node `u`, its proximal blocks are the
//! blocks containing `u` or one of its out-neighbours; row `u` of the
//! inter-level matrix `M = R A` spreads mass evenly over those blocks and
//! then uniformly inside each block. `M` itself is never stored.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{
    split_fields, strongly_connected_components, ComponentLabeling, Csr, LabelMap, SparseGraph,
};

/// Indexed family of non-empty node blocks covering `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    blocks_of: Vec<Vec<usize>>,
    block_labels: LabelMap,
}

impl Decomposition {
    /// Builds a decomposition from `(node, block)` membership pairs.
    ///
    /// Blocks are numbered by `block_labels`; duplicate memberships are dropped.
    /// Every node in `0..n` must belong to at least one block.
    pub fn from_membership(
        n: usize,
        block_labels: LabelMap,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let k = block_labels.len();
        let mut blocks = vec![Vec::new(); k];
        let mut blocks_of = vec![Vec::new(); n];
        for (u, b) in pairs {
            if u >= n || b >= k {
                return Err(Error::DimensionMismatch {
                    expected: if u >= n { n } else { k },
                    got: if u >= n { u } else { b },
                });
            }
            blocks[b].push(u);
            blocks_of[u].push(b);
        }
        for list in blocks.iter_mut().chain(blocks_of.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        if let Some(b) = blocks.iter().position(Vec::is_empty) {
            return Err(Error::InvalidConfig(format!(
                "block `{}` is empty",
                block_labels.label(b)
            )));
        }
        if let Some(u) = blocks_of.iter().position(Vec::is_empty) {
            return Err(Error::CoverViolated(u.to_string()));
        }
        Ok(Decomposition {
            n,
            blocks,
            blocks_of,
            block_labels,
        })
    }

    /// Partition given by one block id per node; block ids must be `0..K` and all used.
    pub fn from_assignment(assignment: &[usize]) -> Result<Self> {
        let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
        Self::from_membership(
            assignment.len(),
            LabelMap::numeric(k),
            assignment.iter().copied().enumerate(),
        )
    }

    /// Decomposition with explicit member lists.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let pairs = blocks
            .iter()
            .enumerate()
            .flat_map(|(b, members)| members.iter().map(move |&u| (u, b)));
        Self::from_membership(
            n,
            LabelMap::numeric(blocks.len()),
            pairs.collect::<Vec<_>>(),
        )
    }

    /// All nodes in one block.
    pub fn single_block(n: usize) -> Self {
        Self::from_assignment(&vec![0; n]).expect("single block always covers")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn blocks_of(&self, u: usize) -> &[usize] {
        &self.blocks_of[u]
    }

    pub fn block_labels(&self) -> &LabelMap {
        &self.block_labels
    }

    pub fn is_partition(&self) -> bool {
        self.blocks_of.iter().all(|b| b.len() == 1)
    }

    /// Restriction to `nodes`, renumbered in the given order. Only blocks lying
    /// entirely inside `nodes` are kept; blocks that straddle the boundary are
    /// an error because restriction would change their size.
    pub fn restrict(&self, nodes: &[usize]) -> Result<Decomposition> {
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i;
        }
        let mut labels = LabelMap::new();
        let mut pairs = Vec::new();
        let mut seen = vec![false; self.blocks.len()];
        for &u in nodes {
            for &b in &self.blocks_of[u] {
                if seen[b] {
                    continue;
                }
                seen[b] = true;
                if self.blocks[b].iter().any(|&w| local[w] == usize::MAX) {
                    return Err(Error::InvalidConfig(format!(
                        "block `{}` straddles the restriction boundary",
                        self.block_labels.label(b)
                    )));
                }
                let lb = labels.intern(self.block_labels.label(b));
                pairs.extend(self.blocks[b].iter().map(|&w| (local[w], lb)));
            }
        }
        Decomposition::from_membership(nodes.len(), labels, pairs)
    }

    /// Blocks intersected with `nodes` (renumbered in the given order); blocks
    /// that become empty are dropped.
    pub fn intersect(&self, nodes: &[usize]) -> Decomposition {
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i;
        }
        let mut labels = LabelMap::new();
        let mut pairs = Vec::new();
        for (b, members) in self.blocks.iter().enumerate() {
            let inside: Vec<usize> = members
                .iter()
                .map(|&u| local[u])
                .filter(|&l| l != usize::MAX)
                .collect();
            if inside.is_empty() {
                continue;
            }
            let lb = labels.intern(self.block_labels.label(b));
            pairs.extend(inside.into_iter().map(|l| (l, lb)));
        }
        Decomposition::from_membership(nodes.len(), labels, pairs)
            .expect("intersection keeps the cover")
    }

    /// Appends `count` new nodes that join every block of `template`.
    pub fn extend_inheriting(&self, template: usize, count: usize) -> Decomposition {
        let mut d = self.clone();
        let inherited = self.blocks_of[template].clone();
        for i in 0..count {
            let u = self.n + i;
            for &b in &inherited {
                d.blocks[b].push(u);
            }
            d.blocks_of.push(inherited.clone());
        }
        d.n += count;
        d
    }
}

/// Reads a `node_label block_label` membership file against `g`'s labels.
pub fn load_decomposition<R: BufRead>(reader: R, g: &SparseGraph) -> Result<Decomposition> {
    let mut block_labels = LabelMap::new();
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields = split_fields(t, None);
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected `node block`, found {} fields", fields.len()),
            });
        }
        let u = g
            .labels()
            .get(fields[0])
            .ok_or_else(|| Error::UnknownNode {
                label: fields[0].to_owned(),
                line: i + 1,
            })?;
        pairs.push((u, block_labels.intern(fields[1])));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput("decomposition has no memberships"));
    }
    Decomposition::from_membership(g.node_count(), block_labels, pairs).map_err(|e| match e {
        Error::CoverViolated(u) => Error::CoverViolated(g.label(u.parse().unwrap_or(0)).to_owned()),
        other => other,
    })
}

/// Host part of a URL-like label: `http://a.b/x/y` → `a.b`, `a.b/x` → `a.b`.
pub fn url_host(label: &str) -> &str {
    let rest = label.find("://").map_or(label, |i| &label[i + 3..]);
    let end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let host = &rest[..end];
    // strip userinfo and port
    let host = host.rsplit('@').next().unwrap_or(host);
    host.split(':').next().unwrap_or(host)
}

/// Partition of a web graph into websites, grouping nodes by URL host.
pub fn partition_by_host(g: &SparseGraph) -> Decomposition {
    let mut labels = LabelMap::new();
    let assignment: Vec<(usize, usize)> = (0..g.node_count())
        .map(|u| (u, labels.intern(url_host(g.label(u)))))
        .collect();
    Decomposition::from_membership(g.node_count(), labels, assignment)
        .expect("every node gets a host block")
}

/// Proximal blocks of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximalStructure {
    proximal: Csr,
}

impl ProximalStructure {
    pub fn proximal_blocks(&self, u: usize) -> &[usize] {
        self.proximal.row(u)
    }

    /// `N_u`, the number of proximal blocks of `u`.
    pub fn count(&self, u: usize) -> usize {
        self.proximal.row(u).len()
    }

    pub fn node_count(&self) -> usize {
        self.proximal.rows()
    }
}

/// Proximal sets: blocks holding `u` or any successor of `u`.
pub fn proximal_sets(g: &SparseGraph, d: &Decomposition) -> ProximalStructure {
    let n = g.node_count();
    assert_eq!(
        n,
        d.node_count(),
        "graph and decomposition disagree on node count"
    );
    let mut mark = vec![usize::MAX; d.block_count()];
    let rows: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            let mut row = Vec::new();
            for &w in std::iter::once(&u).chain(g.successors(u)) {
                for &b in d.blocks_of(w) {
                    if mark[b] != u {
                        mark[b] = u;
                        row.push(b);
                    }
                }
            }
            row.sort_unstable();
            row
        })
        .collect();
    ProximalStructure {
        proximal: Csr::from_rows(&rows),
    }
}

/// The factor pair of `M = R A`.
///
/// `R` (n × K) has row `u` uniform over the proximal blocks of `u`; `A`
/// (K × n) has row `k` uniform over the members of block `k`. Both are kept
/// as patterns; values are `1 / row length`.
#[derive(Debug, Clone)]
pub struct ProximityFactors {
    r: Csr,
    r_t: Csr,
    a: Csr,
    a_t: Csr,
}

/// Builds `R` and `A` from a proximal structure.
pub fn build_factors(p: &ProximalStructure, d: &Decomposition) -> ProximityFactors {
    let n = d.node_count();
    let k = d.block_count();
    let r = p.proximal.clone();
    let r_t = r.transpose(k);
    let a = Csr::from_rows(d.blocks());
    let a_t = a.transpose(n);
    ProximityFactors { r, r_t, a, a_t }
}

impl ProximityFactors {
    /// Convenience: proximal sets followed by factor construction.
    pub fn new(g: &SparseGraph, d: &Decomposition) -> Self {
        build_factors(&proximal_sets(g, d), d)
    }

    pub fn node_count(&self) -> usize {
        self.r.rows()
    }

    pub fn block_count(&self) -> usize {
        self.a.rows()
    }

    /// Proximal blocks of `u` (nonzero columns of row `u` of `R`).
    #[inline]
    pub fn r_row(&self, u: usize) -> &[usize] {
        self.r.row(u)
    }

    #[inline]
    pub fn r_value(&self, u: usize) -> f64 {
        1.0 / self.r.row(u).len() as f64
    }

    /// Nodes having block `k` among their proximal blocks (column `k` of `R`).
    #[inline]
    pub fn r_col(&self, k: usize) -> &[usize] {
        self.r_t.row(k)
    }

    /// Members of block `k` (nonzero columns of row `k` of `A`).
    #[inline]
    pub fn a_row(&self, k: usize) -> &[usize] {
        self.a.row(k)
    }

    #[inline]
    pub fn a_value(&self, k: usize) -> f64 {
        1.0 / self.a.row(k).len() as f64
    }

    /// Blocks containing node `v` (column `v` of `A`).
    #[inline]
    pub fn a_col(&self, v: usize) -> &[usize] {
        self.a_t.row(v)
    }

    pub fn r_pattern(&self) -> &Csr {
        &self.r
    }

    pub fn a_pattern(&self) -> &Csr {
        &self.a
    }

    /// Row-major dense `R`.
    pub fn dense_r(&self) -> Vec<Vec<f64>> {
        (0..self.node_count())
            .map(|u| {
                let mut row = vec![0.0; self.block_count()];
                for &k in self.r_row(u) {
                    row[k] = self.r_value(u);
                }
                row
            })
            .collect()
    }

    /// Row-major dense `A`.
    pub fn dense_a(&self) -> Vec<Vec<f64>> {
        (0..self.block_count())
            .map(|k| {
                let mut row = vec![0.0; self.node_count()];
                for &v in self.a_row(k) {
                    row[v] = self.a_value(k);
                }
                row
            })
            .collect()
    }

    /// Indices of `R` and `A` after restricting to `n` and `K` sizes; useful for
    /// checking that two factor sets share the node set.
    fn same_nodes(&self, other: &ProximityFactors) -> bool {
        self.node_count() == other.node_count()
    }
}

/// Row `u` of `M = R A` as sorted `(column, value)` pairs.
pub fn inter_level_row(u: usize, f: &ProximityFactors) -> Vec<(usize, f64)> {
    let ru = f.r_value(u);
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for &k in f.r_row(u) {
        let w = ru * f.a_value(k);
        entries.extend(f.a_row(k).iter().map(|&v| (v, w)));
    }
    entries.sort_by_key(|&(v, _)| v);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for (v, w) in entries {
        match out.last_mut() {
            Some((last, acc)) if *last == v => *acc += w,
            _ => out.push((v, w)),
        }
    }
    out
}

/// Sparse non-negative square matrix used for primitivity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    pattern: Csr,
    values: Vec<f64>,
    pub diagonal_positive: bool,
}

impl IndicatorMatrix {
    pub fn order(&self) -> usize {
        self.pattern.rows()
    }

    pub fn pattern(&self) -> &Csr {
        &self.pattern
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = self.pattern.row(i);
        match row.binary_search(&j) {
            Ok(p) => self.values[self.pattern.offsets()[i] + p],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let k = self.order();
        (0..k)
            .map(|i| (0..k).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `true` when every entry of row block `rows` × column block `cols` is positive.
    fn block_positive(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> bool {
        rows.into_iter().all(|i| {
            let row = self.pattern.row(i);
            let start = row.partition_point(|&c| c < cols.start);
            let end = row.partition_point(|&c| c < cols.end);
            end - start == cols.len()
        })
    }
}

/// Sparse product `A_i R_j` as rows of `(column, value)`.
fn product_rows(a: &ProximityFactors, r: &ProximityFactors) -> Vec<Vec<(usize, f64)>> {
    let kr = r.block_count();
    let mut acc = vec![0.0f64; kr];
    let mut touched: Vec<usize> = Vec::new();
    (0..a.block_count())
        .map(|i| {
            let ai = a.a_value(i);
            for &u in a.a_row(i) {
                let w = ai * r.r_value(u);
                for &j in r.r_row(u) {
                    if acc[j] == 0.0 {
                        touched.push(j);
                    }
                    acc[j] += w;
                }
            }
            touched.sort_unstable();
            let row = touched.iter().map(|&j| (j, acc[j])).collect();
            for &j in &touched {
                acc[j] = 0.0;
            }
            touched.clear();
            row
        })
        .collect()
}

fn assemble(rows: Vec<Vec<(usize, f64)>>) -> IndicatorMatrix {
    let mut values = Vec::new();
    let cols: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| {
            values.extend(r.iter().map(|&(_, v)| v));
            r.iter().map(|&(c, _)| c).collect()
        })
        .collect();
    let pattern = Csr::from_rows(&cols);
    let diagonal_positive = (0..pattern.rows()).all(|i| pattern.row(i).binary_search(&i).is_ok());
    IndicatorMatrix {
        pattern,
        values,
        diagonal_positive,
    }
}

/// Indicator matrix `W = A R` (K × K).
pub fn indicator_matrix(f: &ProximityFactors) -> IndicatorMatrix {
    assemble(product_rows(f, f))
}

/// Cross product `A_i R_j` of two factor sets over the same nodes.
pub fn cross_indicator(
    a_side: &ProximityFactors,
    r_side: &ProximityFactors,
) -> Result<IndicatorMatrix> {
    if !a_side.same_nodes(r_side) {
        return Err(Error::DimensionMismatch {
            expected: a_side.node_count(),
            got: r_side.node_count(),
        });
    }
    let rows = product_rows(a_side, r_side);
    let mut m = assemble(rows);
    m.diagonal_positive = false;
    Ok(m)
}

/// Stacked indicator `[A_1; …; A_S] [R_1 … R_S]`, scalar weights dropped.
pub fn stacked_indicator(fs: &[ProximityFactors]) -> Result<IndicatorMatrix> {
    let first = fs
        .first()
        .ok_or_else(|| Error::InvalidConfig("at least one decomposition is required".into()))?;
    if let Some(bad) = fs.iter().find(|f| !first.same_nodes(f)) {
        return Err(Error::DimensionMismatch {
            expected: first.node_count(),
            got: bad.node_count(),
        });
    }
    let offsets: Vec<usize> = fs
        .iter()
        .scan(0, |acc, f| {
            let o = *acc;
            *acc += f.block_count();
            Some(o)
        })
        .collect();
    let mut rows = Vec::new();
    for a in fs {
        let mut stacked: Vec<Vec<(usize, f64)>> = vec![Vec::new(); a.block_count()];
        for (r, &off) in fs.iter().zip(&offsets) {
            for (i, row) in product_rows(a, r).into_iter().enumerate() {
                stacked[i].extend(row.into_iter().map(|(j, v)| (j + off, v)));
            }
        }
        rows.extend(stacked);
    }
    Ok(assemble(rows))
}

/// Outcome of an irreducibility test on an indicator matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimitivityVerdict {
    Primitive,
    Reducible { witness: ComponentLabeling },
}

impl PrimitivityVerdict {
    pub fn is_primitive(&self) -> bool {
        matches!(self, PrimitivityVerdict::Primitive)
    }
}

/// Irreducibility of `W` (single SCC). With a positive diagonal this is
/// equivalent to primitivity of `η H + μ M` for `η + μ = 1`.
pub fn check_primitivity_single(w: &IndicatorMatrix) -> PrimitivityVerdict {
    debug_assert!(w.diagonal_positive, "indicator diagonal must be positive");
    let scc = strongly_connected_components(w.pattern());
    if scc.component_count == 1 {
        PrimitivityVerdict::Primitive
    } else {
        PrimitivityVerdict::Reducible { witness: scc }
    }
}

/// Which sufficient primitivity condition held, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SufficientCondition {
    /// `A_i R_i` is irreducible.
    Irreducible {
        decomposition: usize,
    },
    /// `A_i R_j > 0` for `i != j`.
    PositiveCross {
        a: usize,
        r: usize,
    },
    Inconclusive,
}

/// Tests the two cheap sufficient conditions for multi-decomposition primitivity.
pub fn check_sufficient_conditions(fs: &[ProximityFactors]) -> Result<SufficientCondition> {
    for (i, f) in fs.iter().enumerate() {
        if check_primitivity_single(&indicator_matrix(f)).is_primitive() {
            return Ok(SufficientCondition::Irreducible { decomposition: i });
        }
    }
    for (i, a) in fs.iter().enumerate() {
        for (j, r) in fs.iter().enumerate() {
            if i == j {
                continue;
            }
            let cross = cross_indicator(a, r)?;
            if cross.block_positive(0..a.block_count(), 0..r.block_count()) {
                return Ok(SufficientCondition::PositiveCross { a: i, r: j });
            }
        }
    }
    Ok(SufficientCondition::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn assert_rows(actual: &[Vec<f64>], expected: &[&[f64]]) {
        assert_eq!(actual.len(), expected.len());
        for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
            assert_eq!(a.len(), e.len(), "row {i}");
            for (j, (x, y)) in a.iter().zip(e.iter()).enumerate() {
                assert!(close(*x, *y), "entry ({i},{j}): {x} != {y}");
            }
        }
    }

    #[test]
    fn two_site_web_decomposition_and_proximal_sets() {
        let (g, d) = fixtures::two_site_web();
        assert_eq!(d.block_count(), 4);
        let p = proximal_sets(&g, &d);
        // node 2 (id 1) sits in A1 and links into A2
        assert_eq!(p.proximal_blocks(1), &[0, 1]);
        assert_eq!(p.count(1), 2);
        // node 4 (id 3) is dangling in A2
        assert_eq!(p.proximal_blocks(3), &[1]);
    }

    #[test]
    fn two_site_web_factors() {
        let (g, d) = fixtures::two_site_web();
        let f = ProximityFactors::new(&g, &d);
        let h = 0.5;
        let t = 1.0 / 3.0;
        assert_rows(
            &f.dense_r(),
            &[
                &[1.0, 0.0, 0.0, 0.0],
                &[h, h, 0.0, 0.0],
                &[h, h, 0.0, 0.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, h, h],
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 0.0, h, h],
            ],
        );
        assert_rows(
            &f.dense_a(),
            &[
                &[h, h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, h, h, 0.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 0.0, t, t, t, 0.0],
                &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            ],
        );
    }

    #[test]
    fn seven_node_factors_and_rows() {
        let (g, d) = fixtures::seven_node();
        let f = ProximityFactors::new(&g, &d);
        let r = f.dense_r();
        assert_rows(&r[3..4], &[&[0.0, 0.5, 0.5]]);
        let a = f.dense_a();
        let t = 1.0 / 3.0;
        assert_rows(&a[1..2], &[&[0.0, 0.0, t, t, 0.0, 0.0, t]]);
        let row1: Vec<(usize, f64)> = inter_level_row(0, &f);
        let s = 1.0 / 6.0;
        let expected = [(0, 0.25), (1, 0.25), (2, s), (3, s), (6, s)];
        assert_eq!(row1.len(), expected.len());
        for ((c, v), (ec, ev)) in row1.iter().zip(expected) {
            assert_eq!(*c, ec);
            assert!(close(*v, ev));
        }
        let row5 = inter_level_row(4, &f);
        assert_eq!(row5, vec![(4, 0.5), (5, 0.5)]);
    }

    #[test]
    fn single_block_factors() {
        let g = SparseGraph::from_edges(4, &[(0, 1), (2, 3)]);
        let d = Decomposition::single_block(4);
        let f = ProximityFactors::new(&g, &d);
        assert_rows(&f.dense_r(), &[&[1.0], &[1.0], &[1.0], &[1.0]]);
        assert_rows(&f.dense_a(), &[&[0.25; 4]]);
        for u in 0..4 {
            let row = inter_level_row(u, &f);
            assert_eq!(row.len(), 4);
            assert!(row.iter().all(|&(_, v)| close(v, 0.25)));
        }
        let w = indicator_matrix(&f);
        assert_eq!(w.to_dense(), vec![vec![1.0]]);
        assert!(check_primitivity_single(&w).is_primitive());
    }

    #[test]
    fn overlapping_membership() {
        let labels = LabelMap::numeric(2);
        let d = Decomposition::from_membership(3, labels, [(0, 0), (1, 0), (1, 1), (2, 1), (1, 1)])
            .unwrap();
        assert_eq!(d.blocks_of(1), &[0, 1]);
        assert!(!d.is_partition());
        assert_eq!(d.block(1), &[1, 2]);
    }

    #[test]
    fn load_rejects_unknown_and_uncovered() {
        let (g, _) = fixtures::two_site_web();
        let err = load_decomposition("1 A\n99 B\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(err, Error::UnknownNode { line: 2, .. }));
        let err = load_decomposition("1 A\n2 A\n".as_bytes(), &g).unwrap_err();
        match err {
            Error::CoverViolated(label) => assert_eq!(label, "3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn indicator_irreducible_partition() {
        let (g, d) = fixtures::seven_node_irreducible();
        let f = ProximityFactors::new(&g, &d);
        let w = indicator_matrix(&f);
        assert!(w.diagonal_positive);
        assert_rows(
            &w.to_dense(),
            &[&[0.5, 0.5, 0.0], &[0.125, 0.75, 0.125], &[0.0, 0.25, 0.75]],
        );
        assert!(check_primitivity_single(&w).is_primitive());
    }

    #[test]
    fn indicator_reducible_pair() {
        let (g, d1, d2) = fixtures::seven_node_pair();
        let f1 = ProximityFactors::new(&g, &d1);
        let f2 = ProximityFactors::new(&g, &d2);
        let w1 = indicator_matrix(&f1);
        let s = 1.0 / 6.0;
        assert_rows(
            &w1.to_dense(),
            &[&[0.5, 0.5, 0.0], &[0.0, 5.0 * s, s], &[0.0, 0.25, 0.75]],
        );
        match check_primitivity_single(&w1) {
            PrimitivityVerdict::Reducible { witness } => assert_eq!(witness.component_count, 2),
            v => panic!("expected reducible, got {v:?}"),
        }
        let w2 = indicator_matrix(&f2);
        let n9 = 1.0 / 9.0;
        assert_rows(
            &w2.to_dense(),
            &[&[7.0 * n9, n9, n9], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
        );
        assert!(!check_primitivity_single(&w2).is_primitive());

        let stacked = stacked_indicator(&[f1.clone(), f2.clone()]).unwrap();
        assert_eq!(stacked.order(), 6);
        assert!(check_primitivity_single(&stacked).is_primitive());
        assert_eq!(
            check_sufficient_conditions(&[f1, f2]).unwrap(),
            SufficientCondition::Inconclusive
        );
    }

    #[test]
    fn sufficient_condition_i_when_one_is_irreducible() {
        let (g, d) = fixtures::seven_node_irreducible();
        let (_, d1, _) = fixtures::seven_node_pair();
        let fs = [
            ProximityFactors::new(&g, &d1),
            ProximityFactors::new(&g, &d),
        ];
        assert_eq!(
            check_sufficient_conditions(&fs).unwrap(),
            SufficientCondition::Irreducible { decomposition: 1 }
        );
        let single = Decomposition::single_block(g.node_count());
        let fs = [
            ProximityFactors::new(&g, &single),
            ProximityFactors::new(&g, &single),
        ];
        assert_eq!(
            check_sufficient_conditions(&fs).unwrap(),
            SufficientCondition::Irreducible { decomposition: 0 }
        );
    }

    #[test]
    fn condition_ii_positive_cross() {
        // Two reducible decompositions whose cross product is all-positive.
        let g = SparseGraph::from_edges(4, &[]);
        let d1 = Decomposition::from_assignment(&[0, 0, 1, 1]).unwrap();
        let d2 = Decomposition::from_assignment(&[0, 1, 0, 1]).unwrap();
        let fs = [
            ProximityFactors::new(&g, &d1),
            ProximityFactors::new(&g, &d2),
        ];
        assert_eq!(
            check_sufficient_conditions(&fs).unwrap(),
            SufficientCondition::PositiveCross { a: 0, r: 1 }
        );
    }

    #[test]
    fn stacked_single_equals_indicator() {
        let (g, d) = fixtures::seven_node_irreducible();
        let f = ProximityFactors::new(&g, &d);
        assert_eq!(
            stacked_indicator(std::slice::from_ref(&f)).unwrap(),
            indicator_matrix(&f)
        );
    }

    #[test]
    fn stacked_dimension_mismatch() {
        let f1 = ProximityFactors::new(
            &SparseGraph::from_edges(2, &[]),
            &Decomposition::single_block(2),
        );
        let f2 = ProximityFactors::new(
            &SparseGraph::from_edges(3, &[]),
            &Decomposition::single_block(3),
        );
        assert!(matches!(
            stacked_indicator(&[f1, f2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn host_partition() {
        assert_eq!(url_host("http://a.example.org/x/y"), "a.example.org");
        assert_eq!(url_host("https://user@b.org:8080/p?q"), "b.org");
        assert_eq!(url_host("c.net/page"), "c.net");
        let mut labels = LabelMap::new();
        for l in ["http://a.org/1", "http://b.org/", "http://a.org/2"] {
            labels.intern(l);
        }
        let g = SparseGraph::new(labels, [(0, 1)]);
        let d = partition_by_host(&g);
        assert_eq!(d.block_count(), 2);
        assert_eq!(d.block(0), &[0, 2]);
    }

    #[test]
    fn spam_extension_inherits_blocks() {
        let d = Decomposition::from_assignment(&[0, 1, 1]).unwrap();
        let e = d.extend_inheriting(1, 2);
        assert_eq!(e.node_count(), 5);
        assert_eq!(e.block(1), &[1, 2, 3, 4]);
        assert_eq!(e.blocks_of(4), &[1]);
    }
}

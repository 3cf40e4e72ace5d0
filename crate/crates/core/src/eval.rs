//! Graph perturbations, synthetic block-structured graphs and ranking
//! comparisons for stability and spam-resistance experiments.
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed_from_u64(seed)`;
//! repetition `r` at level `l` of an experiment uses stream
//! `r * levels + l` of that generator, so every cell is reproducible on its own.

use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::graph::{LabelMap, SparseGraph};
use crate::ranking::{
    functional_rank, ncdawarerank, pagerank, teleport_vector, Damping, DanglingStrategy,
    PageRankConfig, RankVector, RankingConfig, TeleportSpec, Truncation,
};

/// Seeded generator on a given stream.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Pair counts `t (t − 1) / 2` summed over runs of equal adjacent values.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `v` and returns the number of strictly inverted pairs.
fn count_inversions(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = count_inversions(&mut v[..mid], buf) + count_inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            inv += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    inv
}

/// Kendall's tau-b between two score vectors, in `O(n log n)`.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidConfig(
            "Kendall tau needs at least two items".into(),
        ));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("Kendall tau input"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i].total_cmp(&a[j]).then(b[i].total_cmp(&b[j])));
    let sa: Vec<f64> = idx.iter().map(|&i| a[i]).collect();
    let sab: Vec<(f64, f64)> = idx.iter().map(|&i| (a[i], b[i])).collect();
    let mut sb: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let n1 = tied_pairs(&sa);
    let n3 = tied_pairs(&sab);
    let swaps = count_inversions(&mut sb, &mut Vec::with_capacity(n));
    let n2 = tied_pairs(&sb);
    let den = ((n0 - n1) as f64 * (n0 - n2) as f64).sqrt();
    if den == 0.0 {
        return Err(Error::InvalidConfig(
            "Kendall tau is undefined for constant scores".into(),
        ));
    }
    let num = n0 as f64 - n1 as f64 - n2 as f64 + n3 as f64 - 2.0 * swaps as f64;
    Ok(num / den)
}

/// Adds `count` satellites, each linked to and from `target`.
pub fn inject_spam_farm(g: &SparseGraph, target: usize, count: usize) -> Result<SparseGraph> {
    let n = g.node_count();
    if target >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: target,
        });
    }
    if count == 0 {
        return Ok(g.clone());
    }
    let mut labels = g.labels().clone();
    let base = format!("{}~spam", g.label(target));
    for i in 0..count {
        let mut label = format!("{base}{i}");
        while labels.get(&label).is_some() {
            label.push('_');
        }
        labels.intern(&label);
    }
    let extra = (n..n + count).flat_map(|s| [(s, target), (target, s)]);
    Ok(SparseGraph::new(
        labels,
        g.edges().chain(extra).collect::<Vec<_>>(),
    ))
}

fn with_edges(g: &SparseGraph, edges: Vec<(usize, usize)>) -> SparseGraph {
    SparseGraph::new(g.labels().clone(), edges)
}

/// Keeps a uniform sample of exactly `round(keep_fraction · |E|)` edges.
pub fn sparsify(g: &SparseGraph, keep_fraction: f64, rng: &mut impl Rng) -> Result<SparseGraph> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "keep fraction must lie in (0, 1], got {keep_fraction}"
        )));
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let keep = (keep_fraction * edges.len() as f64).round() as usize;
    let mut chosen = sample(rng, edges.len(), keep).into_vec();
    chosen.sort_unstable();
    Ok(with_edges(
        g,
        chosen.into_iter().map(|i| edges[i]).collect(),
    ))
}

/// Deletes `round(fraction · indegree)` uniformly chosen in-links of each node in `nodes`.
pub fn remove_inlinks(
    g: &SparseGraph,
    nodes: &[usize],
    fraction: f64,
    rng: &mut impl Rng,
) -> Result<SparseGraph> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!(
            "remove fraction must lie in [0, 1], got {fraction}"
        )));
    }
    if nodes.is_empty() {
        return Err(Error::InvalidConfig("no nodes selected".into()));
    }
    let n = g.node_count();
    let mut removed = std::collections::HashSet::new();
    for &v in nodes {
        if v >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v,
            });
        }
        let preds = g.predecessors(v);
        let k = (fraction * preds.len() as f64).round() as usize;
        for i in sample(rng, preds.len(), k) {
            removed.insert((preds[i], v));
        }
    }
    Ok(with_edges(
        g,
        g.edges().filter(|e| !removed.contains(e)).collect(),
    ))
}

/// A single seeded graph perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Perturbation {
    SpamFarm {
        target: usize,
        satellites: usize,
    },
    Sparsify {
        keep_fraction: f64,
    },
    RemoveInlinks {
        nodes: Vec<usize>,
        remove_fraction: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub variant: Perturbation,
    pub seed: u64,
}

impl PerturbationSpec {
    /// Perturbed copy of `g`; `g` itself is never modified.
    pub fn apply(&self, g: &SparseGraph) -> Result<SparseGraph> {
        let mut rng = seeded_rng(self.seed, 0);
        match &self.variant {
            Perturbation::SpamFarm { target, satellites } => {
                inject_spam_farm(g, *target, *satellites)
            }
            Perturbation::Sparsify { keep_fraction } => sparsify(g, *keep_fraction, &mut rng),
            Perturbation::RemoveInlinks {
                nodes,
                remove_fraction,
            } => remove_inlinks(g, nodes, *remove_fraction, &mut rng),
        }
    }

    /// Decomposition matching the perturbed node set.
    pub fn adapt(&self, d: &Decomposition) -> Decomposition {
        match &self.variant {
            Perturbation::SpamFarm { target, satellites } => {
                d.extend_inheriting(*target, *satellites)
            }
            _ => d.clone(),
        }
    }
}

/// Parameters of the synthetic block-structured generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockGraphParams {
    pub nodes: usize,
    pub blocks: usize,
    /// Mean out-degree of non-dangling nodes.
    pub mean_degree: usize,
    /// Probability that a link stays inside its source's block.
    pub intra_probability: f64,
    pub dangling_fraction: f64,
}

impl Default for BlockGraphParams {
    fn default() -> Self {
        BlockGraphParams {
            nodes: 10_000,
            blocks: 100,
            mean_degree: 8,
            intra_probability: 0.9,
            dangling_fraction: 0.2,
        }
    }
}

/// Random graph with planted blocks of near-equal size (contiguous ids).
pub fn block_graph(
    p: &BlockGraphParams,
    rng: &mut impl Rng,
) -> Result<(SparseGraph, Decomposition)> {
    if p.nodes == 0 || p.blocks == 0 || p.blocks > p.nodes {
        return Err(Error::InvalidConfig(
            "generator needs 1 ≤ blocks ≤ nodes".into(),
        ));
    }
    let mut sizes = vec![0usize; p.blocks];
    for u in 0..p.nodes {
        sizes[u * p.blocks / p.nodes] += 1;
    }
    block_graph_with_sizes(&sizes, p, rng)
}

/// Random graph with planted blocks of the given sizes; `p.nodes` and
/// `p.blocks` are ignored. Out-degrees are uniform on `1..=2·mean_degree − 1`,
/// each link stays in the source's block with probability `intra_probability`
/// and otherwise hits a uniform node. Self-links are skipped.
pub fn block_graph_with_sizes(
    sizes: &[usize],
    p: &BlockGraphParams,
    rng: &mut impl Rng,
) -> Result<(SparseGraph, Decomposition)> {
    if sizes.is_empty() || sizes.contains(&0) || p.mean_degree == 0 {
        return Err(Error::InvalidConfig(
            "generator needs non-empty blocks and a positive degree".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p.intra_probability) || !(0.0..1.0).contains(&p.dangling_fraction) {
        return Err(Error::InvalidConfig(
            "probabilities must lie in [0, 1]".into(),
        ));
    }
    let n: usize = sizes.iter().sum();
    let mut start = vec![0usize; sizes.len() + 1];
    for (b, &s) in sizes.iter().enumerate() {
        start[b + 1] = start[b] + s;
    }
    let block_of: Vec<usize> = (0..sizes.len())
        .flat_map(|b| std::iter::repeat_n(b, sizes[b]))
        .collect();
    let mut dangling = vec![false; n];
    for i in sample(rng, n, (p.dangling_fraction * n as f64).round() as usize) {
        dangling[i] = true;
    }
    let mut edges = Vec::new();
    for u in 0..n {
        if dangling[u] {
            continue;
        }
        let b = block_of[u];
        let deg = rng.random_range(1..=2 * p.mean_degree - 1);
        for _ in 0..deg {
            let v = if rng.random_bool(p.intra_probability) {
                rng.random_range(start[b]..start[b + 1])
            } else {
                rng.random_range(0..n)
            };
            if v != u {
                edges.push((u, v));
            }
        }
    }
    let g = SparseGraph::new(LabelMap::numeric(n), edges);
    let d = Decomposition::from_assignment(&block_of)?;
    Ok((g, d))
}

/// A ranking method evaluated in experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MethodKind {
    /// Decomposition-aware ranking over the experiment's decomposition.
    NcdAwareRank(RankingConfig),
    /// PageRank; an `NcdAware` dangling strategy uses the experiment's decomposition.
    PageRank(PageRankConfig),
    /// Damping-function series with uniform teleportation and strongly preferential patching.
    Functional(Damping),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub name: String,
    pub kind: MethodKind,
}

impl Method {
    pub fn new(name: impl Into<String>, kind: MethodKind) -> Self {
        Method {
            name: name.into(),
            kind,
        }
    }

    pub fn run(&self, g: &SparseGraph, d: &Decomposition) -> Result<RankVector> {
        match &self.kind {
            MethodKind::NcdAwareRank(cfg) => ncdawarerank(g, std::slice::from_ref(d), cfg),
            MethodKind::PageRank(cfg) => {
                let needs_d = cfg.dangling == DanglingStrategy::NcdAware
                    || matches!(cfg.teleport, TeleportSpec::BlockBalanced(_));
                pagerank(g, needs_d.then_some(d), cfg)
            }
            MethodKind::Functional(psi) => {
                let v = teleport_vector(&TeleportSpec::UniformNodes, g, None)?;
                functional_rank(
                    g,
                    |k| psi.weight(k),
                    &v,
                    Truncation::default(),
                    &DanglingStrategy::StronglyPreferential,
                    None,
                )
            }
        }
    }
}

/// Experiment protocols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExperimentKind {
    /// Target-score trajectory as satellites are added. With no target, each
    /// repetition picks a random node from the lower half of the first
    /// method's base ranking.
    Spam {
        target: Option<usize>,
        counts: Vec<usize>,
    },
    /// Kendall tau against the base ranking after global edge sampling.
    Sparsity { keep_fractions: Vec<f64> },
    /// Kendall tau after removing most in-links of `count` random nodes.
    NewPages {
        counts: Vec<usize>,
        remove_fraction: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub repetitions: usize,
    pub seed: u64,
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub perturbation_level: f64,
    pub repetition: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub spec: ExperimentSpec,
    pub methods: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl ComparisonReport {
    /// Values of `metric` for `method`, in row order.
    pub fn values(&self, method: &str, metric: &str) -> Vec<(f64, usize, f64)> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.metric == metric)
            .map(|r| (r.perturbation_level, r.repetition, r.value))
            .collect()
    }

    /// Mean of `metric` for `method` at each level, averaged over repetitions.
    pub fn mean_by_level(&self, method: &str, metric: &str) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for (level, _, v) in self.values(method, metric) {
            match out.iter_mut().find(|(l, _, _)| *l == level) {
                Some(e) => {
                    e.1 += v;
                    e.2 += 1;
                }
                None => out.push((level, v, 1)),
            }
        }
        out.into_iter().map(|(l, s, c)| (l, s / c as f64)).collect()
    }
}

fn run_all(methods: &[Method], g: &SparseGraph, d: &Decomposition) -> Result<Vec<RankVector>> {
    methods.par_iter().map(|m| m.run(g, d)).collect()
}

/// Runs `spec` for every method on the base graph `g` with decomposition `d`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    methods: &[Method],
    g: &SparseGraph,
    d: &Decomposition,
) -> Result<ComparisonReport> {
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no methods given".into()));
    }
    if spec.repetitions == 0 {
        return Err(Error::InvalidConfig(
            "at least one repetition is required".into(),
        ));
    }
    let base = run_all(methods, g, d)?;
    let mut rows = Vec::new();
    let mut push = |m: usize, level: f64, rep: usize, metric: &str, value: f64| {
        rows.push(ReportRow {
            method: methods[m].name.clone(),
            perturbation_level: level,
            repetition: rep,
            metric: metric.to_owned(),
            value,
        })
    };
    match &spec.kind {
        ExperimentKind::Spam { target, counts } => {
            let order = crate::ranking::ranking_order(&base[0].pi);
            let lower_half = &order[order.len() / 2..];
            for rep in 0..spec.repetitions {
                let t = match target {
                    Some(t) => *t,
                    None => {
                        let mut rng = seeded_rng(spec.seed, rep as u64);
                        lower_half[rng.random_range(0..lower_half.len())]
                    }
                };
                let mut levels = counts.clone();
                if !levels.contains(&0) {
                    levels.insert(0, 0);
                }
                let mut baseline: Vec<f64> = Vec::new();
                for &c in &levels {
                    let sg = inject_spam_farm(g, t, c)?;
                    let sd = d.extend_inheriting(t, c);
                    let ranks = run_all(methods, &sg, &sd)?;
                    if c == 0 {
                        baseline = ranks.iter().map(|r| r.pi[t]).collect();
                    }
                    for (m, r) in ranks.iter().enumerate() {
                        push(m, c as f64, rep, "target_score", r.pi[t]);
                        if c > 0 {
                            push(
                                m,
                                c as f64,
                                rep,
                                "gain_per_satellite",
                                (r.pi[t] - baseline[m]) / c as f64,
                            );
                        }
                    }
                }
            }
        }
        ExperimentKind::Sparsity { keep_fractions } => {
            let levels = keep_fractions.len() as u64;
            for rep in 0..spec.repetitions {
                for (li, &keep) in keep_fractions.iter().enumerate() {
                    let mut rng = seeded_rng(spec.seed, rep as u64 * levels + li as u64);
                    let sg = sparsify(g, keep, &mut rng)?;
                    for (m, r) in run_all(methods, &sg, d)?.iter().enumerate() {
                        push(
                            m,
                            keep,
                            rep,
                            "kendall_tau",
                            kendall_tau(&base[m].pi, &r.pi)?,
                        );
                    }
                }
            }
        }
        ExperimentKind::NewPages {
            counts,
            remove_fraction,
        } => {
            let levels = counts.len() as u64;
            for rep in 0..spec.repetitions {
                for (li, &count) in counts.iter().enumerate() {
                    let mut rng = seeded_rng(spec.seed, rep as u64 * levels + li as u64);
                    let chosen =
                        sample(&mut rng, g.node_count(), count.min(g.node_count())).into_vec();
                    let sg = remove_inlinks(g, &chosen, *remove_fraction, &mut rng)?;
                    for (m, r) in run_all(methods, &sg, d)?.iter().enumerate() {
                        push(
                            m,
                            count as f64,
                            rep,
                            "kendall_tau",
                            kendall_tau(&base[m].pi, &r.pi)?,
                        );
                    }
                }
            }
        }
    }
    Ok(ComparisonReport {
        spec: spec.clone(),
        methods: methods.iter().map(|m| m.name.clone()).collect(),
        rows,
    })
}

/// Writes `method,perturbation_level,repetition,metric,value` records.
pub fn write_report_csv<W: Write>(mut w: W, report: &ComparisonReport) -> Result<()> {
    writeln!(w, "method,perturbation_level,repetition,metric,value")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.method, r.perturbation_level, r.repetition, r.metric, r.value
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;

    fn brute_tau(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let (mut c, mut d, mut ta, mut tb) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let x = (a[i] - a[j]).signum() * if a[i] == a[j] { 0.0 } else { 1.0 };
                let y = (b[i] - b[j]).signum() * if b[i] == b[j] { 0.0 } else { 1.0 };
                if x == 0.0 && y == 0.0 {
                    continue;
                } else if x == 0.0 {
                    ta += 1;
                } else if y == 0.0 {
                    tb += 1;
                } else if x == y {
                    c += 1;
                } else {
                    d += 1;
                }
            }
        }
        (c - d) as f64 / (((c + d + ta) as f64) * ((c + d + tb) as f64)).sqrt()
    }

    #[test]
    fn tau_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        assert_eq!(kendall_tau(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!((kendall_tau(&a, &[1.0, 2.0, 4.0, 3.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(kendall_tau(&[1.0, 1.0], &[2.0, 2.0]).is_err());
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn tau_matches_brute_force_with_ties() {
        let mut rng = testutil::rng(1);
        for _ in 0..200 {
            let n = rng.random_range(2..120);
            let levels = rng.random_range(2..12);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
            let brute = brute_tau(&a, &b);
            match kendall_tau(&a, &b) {
                Ok(t) => assert!((t - brute).abs() < 1e-12),
                Err(_) => assert!(brute.is_nan()),
            }
        }
    }

    #[test]
    fn spam_farm_counts() {
        let g = SparseGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(inject_spam_farm(&g, 2, 0).unwrap(), g);
        let s = inject_spam_farm(&g, 2, 3).unwrap();
        assert_eq!(s.node_count(), 8);
        assert_eq!(s.edge_count(), 11);
        assert_eq!(s.successors(6), &[2]);
        assert_eq!(s.successors(2), &[3, 5, 6, 7]);
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn spam_raises_pagerank() {
        let mut rng = testutil::rng(6);
        let g = testutil::random_graph(&mut rng, 300, 4, 0.1);
        let mut last = 0.0;
        for c in [0, 10, 100, 1000] {
            let s = inject_spam_farm(&g, 17, c).unwrap();
            let r = pagerank(&s, None, &PageRankConfig::default()).unwrap();
            assert!(r.pi[17] > last);
            last = r.pi[17];
        }
    }

    #[test]
    fn sparsify_counts_and_determinism() {
        let mut rng = testutil::rng(2);
        let g = testutil::random_graph(&mut rng, 60, 6, 0.0);
        let m = g.edge_count();
        assert_eq!(sparsify(&g, 1.0, &mut seeded_rng(1, 0)).unwrap(), g);
        let half = sparsify(&g, 0.5, &mut seeded_rng(1, 0)).unwrap();
        assert_eq!(half.edge_count(), (m as f64 * 0.5).round() as usize);
        assert_eq!(half.node_count(), g.node_count());
        assert_eq!(half, sparsify(&g, 0.5, &mut seeded_rng(1, 0)).unwrap());
        assert!(sparsify(&g, 0.0, &mut seeded_rng(1, 0)).is_err());

        let edges: Vec<(usize, usize)> = (0..100).map(|i| (i, (i + 1) % 100)).collect();
        let ring = SparseGraph::from_edges(100, &edges);
        assert_eq!(
            sparsify(&ring, 0.5, &mut seeded_rng(3, 0))
                .unwrap()
                .edge_count(),
            50
        );
    }

    #[test]
    fn inlink_removal() {
        let edges: Vec<(usize, usize)> = (1..=10).map(|u| (u, 0)).collect();
        let g = SparseGraph::from_edges(11, &edges);
        let r = remove_inlinks(&g, &[0], 0.9, &mut seeded_rng(5, 0)).unwrap();
        assert_eq!(r.predecessors(0).len(), 1);
        assert_eq!(
            remove_inlinks(&g, &[0], 0.0, &mut seeded_rng(5, 0)).unwrap(),
            g
        );
        assert_eq!(
            r,
            remove_inlinks(&g, &[0], 0.9, &mut seeded_rng(5, 0)).unwrap()
        );
        assert!(remove_inlinks(&g, &[], 0.5, &mut seeded_rng(5, 0)).is_err());
    }

    #[test]
    fn perturbation_spec_is_pure_and_seeded() {
        let mut rng = testutil::rng(3);
        let g = testutil::random_graph(&mut rng, 40, 5, 0.1);
        let before = g.clone();
        let spec = PerturbationSpec {
            variant: Perturbation::Sparsify { keep_fraction: 0.6 },
            seed: 11,
        };
        assert_eq!(spec.apply(&g).unwrap(), spec.apply(&g).unwrap());
        assert_eq!(g, before);
        let spam = PerturbationSpec {
            variant: Perturbation::SpamFarm {
                target: 0,
                satellites: 4,
            },
            seed: 0,
        };
        let d = Decomposition::single_block(40);
        assert_eq!(
            spam.adapt(&d).node_count(),
            spam.apply(&g).unwrap().node_count()
        );
    }

    #[test]
    fn generator_shape() {
        let p = BlockGraphParams {
            nodes: 1000,
            blocks: 10,
            ..BlockGraphParams::default()
        };
        let (g, d) = block_graph(&p, &mut seeded_rng(9, 0)).unwrap();
        assert_eq!(g.node_count(), 1000);
        assert_eq!(d.block_count(), 10);
        assert_eq!(g.dangling_nodes().len(), 200);
        let (g2, _) = block_graph(&p, &mut seeded_rng(9, 0)).unwrap();
        assert_eq!(g, g2);
        let intra = g
            .edges()
            .filter(|&(u, v)| d.blocks_of(u) == d.blocks_of(v))
            .count();
        assert!(intra as f64 / g.edge_count() as f64 > 0.85);
    }

    #[test]
    fn full_keep_gives_unit_tau() {
        let p = BlockGraphParams {
            nodes: 300,
            blocks: 6,
            ..BlockGraphParams::default()
        };
        let (g, d) = block_graph(&p, &mut seeded_rng(4, 0)).unwrap();
        let methods = vec![
            Method::new("ncd", MethodKind::NcdAwareRank(RankingConfig::default())),
            Method::new("pr", MethodKind::PageRank(PageRankConfig::default())),
            Method::new("total", MethodKind::Functional(Damping::TotalRank)),
        ];
        let spec = ExperimentSpec {
            kind: ExperimentKind::Sparsity {
                keep_fractions: vec![1.0, 0.5],
            },
            repetitions: 2,
            seed: 1,
        };
        let rep = run_experiment(&spec, &methods, &g, &d).unwrap();
        for m in ["ncd", "pr", "total"] {
            let vals = rep.values(m, "kendall_tau");
            assert_eq!(vals.len(), 4);
            for (level, _, tau) in vals {
                if level == 1.0 {
                    assert_eq!(tau, 1.0);
                } else {
                    assert!(tau < 1.0);
                }
            }
        }
        let mut csv = Vec::new();
        write_report_csv(&mut csv, &rep).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("method,perturbation_level,repetition,metric,value\n"));
        assert_eq!(text.lines().count(), 1 + 12);
    }

    #[test]
    fn spam_gain_is_smaller_with_block_teleport() {
        let p = BlockGraphParams {
            nodes: 500,
            blocks: 25,
            ..BlockGraphParams::default()
        };
        let (g, d) = block_graph(&p, &mut seeded_rng(8, 0)).unwrap();
        let ncd = RankingConfig {
            teleport: TeleportSpec::BlockBalanced(0),
            ..RankingConfig::default()
        };
        let methods = vec![
            Method::new("pr", MethodKind::PageRank(PageRankConfig::default())),
            Method::new("ncd", MethodKind::NcdAwareRank(ncd)),
        ];
        let spec = ExperimentSpec {
            kind: ExperimentKind::Spam {
                target: None,
                counts: vec![5, 10, 25, 50],
            },
            repetitions: 5,
            seed: 3,
        };
        let rep = run_experiment(&spec, &methods, &g, &d).unwrap();
        let pr = rep.values("pr", "gain_per_satellite");
        let nc = rep.values("ncd", "gain_per_satellite");
        assert_eq!(pr.len(), 20);
        for (a, b) in pr.iter().zip(&nc) {
            assert!(b.2 < a.2, "{a:?} {b:?}");
        }
        for rep_idx in 0..5 {
            let traj: Vec<f64> = rep
                .values("ncd", "target_score")
                .into_iter()
                .filter(|r| r.1 == rep_idx)
                .map(|r| r.2)
                .collect();
            assert!(traj.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn newpages_protocol_runs() {
        let p = BlockGraphParams {
            nodes: 200,
            blocks: 5,
            ..BlockGraphParams::default()
        };
        let (g, d) = block_graph(&p, &mut seeded_rng(4, 0)).unwrap();
        let methods = vec![Method::new(
            "pr",
            MethodKind::PageRank(PageRankConfig::default()),
        )];
        let spec = ExperimentSpec {
            kind: ExperimentKind::NewPages {
                counts: vec![10, 50],
                remove_fraction: 0.9,
            },
            repetitions: 3,
            seed: 2,
        };
        let rep = run_experiment(&spec, &methods, &g, &d).unwrap();
        assert_eq!(rep.mean_by_level("pr", "kendall_tau").len(), 2);
    }
}

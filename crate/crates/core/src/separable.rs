//! Block-level separable models: aggregate detection, lumpability checks and
//! the parallel per-aggregate solver.
//!
//! When no link crosses between groups of blocks (aggregates), the stationary
//! vector is the concatenation of the aggregates' own stationary vectors
//! scaled by the teleport mass each aggregate receives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::graph::{weakly_connected_components, SparseGraph, UnionFind};
use crate::ranking::{
    ncdawarerank, teleport_vector, DanglingStrategy, PageRankConfig, RankVector, RankingConfig,
    RankingModel, TeleportSpec, Workspace,
};

/// Partition of nodes (and blocks) into aggregates no link crosses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatePartition {
    pub count: usize,
    pub aggregate_of_node: Vec<usize>,
    /// `aggregate_of_block[i][k]` for block `k` of decomposition `i`.
    pub aggregate_of_block: Vec<Vec<usize>>,
    /// Sorted node lists per aggregate.
    pub members: Vec<Vec<usize>>,
}

impl AggregatePartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    fn from_labels(component_of: Vec<usize>, count: usize, decomps: &[Decomposition]) -> Self {
        let mut members = vec![Vec::new(); count];
        for (u, &c) in component_of.iter().enumerate() {
            members[c].push(u);
        }
        let aggregate_of_block = decomps
            .iter()
            .map(|d| d.blocks().iter().map(|b| component_of[b[0]]).collect())
            .collect();
        AggregatePartition {
            count,
            aggregate_of_node: component_of,
            aggregate_of_block,
            members,
        }
    }
}

/// Finest aggregate partition: connected components of the undirected union
/// of link edges and block co-membership. Fails with a witness edge when the
/// dangling patch would link two aggregates.
pub fn detect_aggregates(
    g: &SparseGraph,
    decomps: &[Decomposition],
    strategy: &DanglingStrategy,
) -> Result<AggregatePartition> {
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    for d in decomps {
        if d.node_count() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d.node_count(),
            });
        }
        for b in d.blocks() {
            for &u in &b[1..] {
                uf.union(b[0], u);
            }
        }
    }
    let labeling = uf.labeling();
    let part =
        AggregatePartition::from_labels(labeling.component_of, labeling.component_count, decomps);
    if part.count > 1 {
        let dangling = g.dangling_nodes();
        let agg = &part.aggregate_of_node;
        match strategy {
            DanglingStrategy::StronglyPreferential => {
                if let Some(&d) = dangling.first() {
                    let to = (0..n)
                        .find(|&w| agg[w] != agg[d])
                        .expect("more than one aggregate");
                    return Err(Error::NotSeparable { from: d, to });
                }
            }
            DanglingStrategy::WeaklyPreferential(f) => {
                for &d in &dangling {
                    if let Some(to) =
                        (0..n).find(|&w| f.get(w).is_some_and(|&x| x > 0.0) && agg[w] != agg[d])
                    {
                        return Err(Error::NotSeparable { from: d, to });
                    }
                }
            }
            DanglingStrategy::NcdAware => {}
        }
    }
    Ok(part)
}

/// Proven upper bound `1 − η − Σμ` on the aggregate coupling degree.
pub fn coupling_bound(cfg: &RankingConfig) -> f64 {
    cfg.teleport_weight()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LumpabilityReport {
    pub rows_checked: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// Largest off-aggregate row mass seen among the checked rows.
    pub max_coupling: f64,
}

/// Compares lumped row sums of `P` with their closed forms on up to
/// `max_rows` evenly spaced rows.
pub fn verify_lumpability(
    g: &SparseGraph,
    decomps: &[Decomposition],
    cfg: &RankingConfig,
    partition: &AggregatePartition,
    max_rows: usize,
) -> Result<LumpabilityReport> {
    let model = RankingModel::new(g, decomps, cfg)?;
    let v = model.teleport();
    let n = g.node_count();
    let l = partition.count;
    let mut v_mass = vec![0.0; l];
    for (u, &a) in partition.aggregate_of_node.iter().enumerate() {
        v_mass[a] += v[u];
    }
    let tele = cfg.teleport_weight();
    let stay = cfg.eta + cfg.mu_total();
    let stride = n.div_ceil(max_rows.max(1)).max(1);
    let mut ws = Workspace::default();
    let mut e = vec![0.0; n];
    let mut row = vec![0.0; n];
    let mut max_dev = 0.0f64;
    let mut max_coupling = 0.0f64;
    let mut checked = 0;
    for i in (0..n).step_by(stride) {
        e[i] = 1.0;
        model.apply_into(&e, &mut row, &mut ws);
        e[i] = 0.0;
        let mut lumped = vec![0.0; l];
        for (j, &p) in row.iter().enumerate() {
            lumped[partition.aggregate_of_node[j]] += p;
        }
        let own = partition.aggregate_of_node[i];
        for (a, &mass) in lumped.iter().enumerate() {
            let expected = if a == own {
                stay + tele * v_mass[a]
            } else {
                tele * v_mass[a]
            };
            max_dev = max_dev.max((mass - expected).abs());
        }
        max_coupling = max_coupling.max(1.0 - lumped[own]);
        checked += 1;
    }
    let tolerance = 1e-12;
    Ok(LumpabilityReport {
        rows_checked: checked,
        max_deviation: max_dev,
        tolerance,
        holds: max_dev <= tolerance,
        max_coupling,
    })
}

/// Output of the separable solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableSolution {
    pub rank: RankVector,
    pub partition: AggregatePartition,
    /// Teleport mass per aggregate; the stationary vector of the coupling matrix.
    pub xi: Vec<f64>,
    /// Stationary vector of each aggregate's sub-model, in member order.
    pub local: Vec<Vec<f64>>,
    pub sub_iterations: Vec<usize>,
    /// `‖πᵀP − πᵀ‖₁` of the assembled vector under the full model.
    pub global_residual: f64,
}

/// Solves every aggregate independently (largest first) and scales by `ξ`.
fn solve_by_aggregates(
    members: &[Vec<usize>],
    v: &[f64],
    workers: Option<usize>,
    solve_sub: impl Fn(usize, &[f64]) -> Result<RankVector> + Sync,
) -> Result<(Vec<f64>, Vec<RankVector>)> {
    let xi: Vec<f64> = members
        .iter()
        .map(|m| m.iter().map(|&u| v[u]).sum())
        .collect();
    for (a, &x) in xi.iter().enumerate() {
        if !(x > 0.0) {
            return Err(Error::ZeroTeleportMass { aggregate: a });
        }
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&a| std::cmp::Reverse(members[a].len()));
    let run = || -> Vec<(usize, Result<RankVector>)> {
        order
            .par_iter()
            .map(|&a| {
                let local_v: Vec<f64> = members[a].iter().map(|&u| v[u] / xi[a]).collect();
                (a, solve_sub(a, &local_v))
            })
            .collect()
    };
    let results = match workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Other(format!("thread pool: {e}")))?
            .install(run),
    };
    let mut subs: Vec<Option<RankVector>> = vec![None; members.len()];
    for (a, r) in results {
        subs[a] = Some(r?);
    }
    Ok((
        xi,
        subs.into_iter()
            .map(|s| s.expect("every aggregate solved"))
            .collect(),
    ))
}

fn assemble(
    g: &SparseGraph,
    decomps: &[Decomposition],
    full_cfg: &RankingConfig,
    partition: AggregatePartition,
    xi: Vec<f64>,
    subs: Vec<RankVector>,
) -> Result<SeparableSolution> {
    let n = g.node_count();
    let mut pi = vec![0.0; n];
    for ((nodes, s), &x) in partition.members.iter().zip(&subs).zip(&xi) {
        for (&u, &p) in nodes.iter().zip(&s.pi) {
            pi[u] = x * p;
        }
    }
    let model = RankingModel::new(g, decomps, full_cfg)?;
    let mut next = vec![0.0; n];
    model.apply_into(&pi, &mut next, &mut Workspace::default());
    let global_residual = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
    let rank = RankVector {
        pi,
        iterations: subs.iter().map(|s| s.iterations).max().unwrap_or(0),
        final_residual: subs.iter().map(|s| s.final_residual).fold(0.0, f64::max),
        converged: subs.iter().all(|s| s.converged),
        residuals: Vec::new(),
    };
    Ok(SeparableSolution {
        sub_iterations: subs.iter().map(|s| s.iterations).collect(),
        local: subs.into_iter().map(|s| s.pi).collect(),
        rank,
        partition,
        xi,
        global_residual,
    })
}

fn restricted_dangling(
    strategy: &DanglingStrategy,
    sub: &SparseGraph,
    nodes: &[usize],
) -> DanglingStrategy {
    match strategy {
        DanglingStrategy::WeaklyPreferential(f) if !sub.dangling_nodes().is_empty() => {
            let part: Vec<f64> = nodes.iter().map(|&u| f[u]).collect();
            let s: f64 = part.iter().sum();
            DanglingStrategy::WeaklyPreferential(part.into_iter().map(|x| x / s).collect())
        }
        DanglingStrategy::NcdAware => DanglingStrategy::NcdAware,
        // no dangling rows inside the aggregate, or a single aggregate
        _ => DanglingStrategy::StronglyPreferential,
    }
}

/// Decomposition-aware ranking computed aggregate by aggregate.
pub fn solve_separable(
    g: &SparseGraph,
    decomps: &[Decomposition],
    cfg: &RankingConfig,
) -> Result<SeparableSolution> {
    cfg.validate(decomps.len())?;
    let partition = detect_aggregates(g, decomps, &cfg.dangling)?;
    let bb = match cfg.teleport {
        TeleportSpec::BlockBalanced(i) => decomps.get(i),
        _ => None,
    };
    let v = teleport_vector(&cfg.teleport, g, bb)?;
    let (xi, subs) = solve_by_aggregates(&partition.members, &v, cfg.workers, |a, local_v| {
        let nodes = &partition.members[a];
        let sub_g = g.induced(nodes);
        let sub_d = decomps
            .iter()
            .map(|d| d.restrict(nodes))
            .collect::<Result<Vec<_>>>()?;
        let sub_cfg = RankingConfig {
            teleport: TeleportSpec::Custom(local_v.to_vec()),
            dangling: if partition.count == 1 {
                cfg.dangling.clone()
            } else {
                restricted_dangling(&cfg.dangling, &sub_g, nodes)
            },
            workers: None,
            ..cfg.clone()
        };
        ncdawarerank(&sub_g, &sub_d, &sub_cfg)
    })?;
    assemble(g, decomps, cfg, partition, xi, subs)
}

/// Dangling patch for [`pagerank_confined`]; both keep the patch inside the
/// dangling node's weakly connected component.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfinedPatch {
    /// Spread over the blocks of the given decomposition that hold the node.
    Proximal(Decomposition),
    /// Spread uniformly over the node's weakly connected component.
    ComponentUniform,
}

/// PageRank solved per weakly connected component under a confined patch.
pub fn pagerank_confined(
    g: &SparseGraph,
    cfg: &PageRankConfig,
    patch: &ConfinedPatch,
) -> Result<SeparableSolution> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {}",
            cfg.alpha
        )));
    }
    let n = g.node_count();
    let wcc = weakly_connected_components(g);
    let wcc_decomp =
        || Decomposition::from_assignment(&wcc.component_of).expect("components cover");
    let d = match patch {
        ConfinedPatch::Proximal(d) => {
            if d.node_count() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d.node_count(),
                });
            }
            for u in g.dangling_nodes() {
                for &b in d.blocks_of(u) {
                    if let Some(&w) = d
                        .block(b)
                        .iter()
                        .find(|&&w| wcc.component_of[w] != wcc.component_of[u])
                    {
                        return Err(Error::NotSeparable { from: u, to: w });
                    }
                }
            }
            d.clone()
        }
        ConfinedPatch::ComponentUniform => wcc_decomp(),
    };
    let bb = match cfg.teleport {
        TeleportSpec::BlockBalanced(0) => Some(&d),
        TeleportSpec::BlockBalanced(i) => {
            return Err(Error::InvalidConfig(format!(
                "teleport refers to decomposition {i}"
            )));
        }
        _ => None,
    };
    let v = teleport_vector(&cfg.teleport, g, bb)?;
    let members = wcc.members();
    let partition =
        AggregatePartition::from_labels(wcc.component_of.clone(), wcc.component_count, &[]);
    let sub_cfg = |local_v: &[f64]| PageRankConfig {
        teleport: TeleportSpec::Custom(local_v.to_vec()),
        dangling: DanglingStrategy::NcdAware,
        workers: None,
        ..cfg.clone()
    };
    let (xi, subs) = solve_by_aggregates(&members, &v, cfg.workers, |a, local_v| {
        let nodes = &members[a];
        let sub_g = g.induced(nodes);
        let sub_d = d.intersect(nodes);
        crate::ranking::pagerank(&sub_g, Some(&sub_d), &sub_cfg(local_v))
    })?;
    let full = PageRankConfig {
        teleport: TeleportSpec::Custom(v),
        dangling: DanglingStrategy::NcdAware,
        ..cfg.clone()
    };
    assemble(g, &[d], &full.as_ranking(true), partition, xi, subs)
}

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use ncdrank::eval::{
    block_graph, run_experiment, seeded_rng, write_report_csv, BlockGraphParams, ExperimentKind,
    ExperimentSpec, Method, MethodKind,
};
use ncdrank::ranking::Damping;
use ncdrank::{DanglingStrategy, PageRankConfig, RankingConfig, TeleportSpec};

use crate::inputs;
use crate::{CliResult, GraphInput};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Spam,
    Sparsity,
    Newpages,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,

    /// Comma-separated: ncd, naive, pagerank, totalrank, linearrank, hyperrank.
    #[arg(long, default_value = "ncd,naive,pagerank")]
    pub methods: String,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 10)]
    pub reps: usize,

    /// Perturbation levels: satellite counts (spam), keep fractions
    /// (sparsity) or node counts (newpages). Defaults depend on the kind.
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<f64>,

    /// Spam target label; a low-ranked node per repetition when absent.
    #[arg(long)]
    pub target: Option<String>,

    /// Share of in-links removed from each selected node (newpages).
    #[arg(long, default_value_t = 0.9)]
    pub remove_fraction: f64,

    /// Teleportation of the decomposition-aware methods: uniform | blocks.
    #[arg(long, default_value = "blocks")]
    pub ncd_teleport: String,

    /// Edge list of the base graph; a synthetic block graph is generated when absent.
    #[arg(long, requires = "blocks")]
    pub graph: Option<PathBuf>,

    #[arg(long = "blocks")]
    pub blocks: Vec<PathBuf>,

    /// Synthetic graph: node count.
    #[arg(long, default_value_t = 2000)]
    pub nodes: usize,

    /// Synthetic graph: block count.
    #[arg(long, default_value_t = 100)]
    pub sites: usize,

    /// Synthetic graph: mean out-degree.
    #[arg(long, default_value_t = 8)]
    pub degree: usize,

    /// Synthetic graph: probability that a link stays inside its block.
    #[arg(long, default_value_t = 0.9)]
    pub intra: f64,

    /// Synthetic graph: share of dangling nodes.
    #[arg(long, default_value_t = 0.2)]
    pub dangling_fraction: f64,

    /// CSV report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn methods(
    list: &str,
    ncd_teleport: TeleportSpec,
    workers: Option<usize>,
) -> anyhow::Result<Vec<Method>> {
    let ncd = |dangling| RankingConfig {
        teleport: ncd_teleport.clone(),
        dangling,
        workers,
        ..RankingConfig::default()
    };
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            let kind = match name {
                "ncd" => MethodKind::NcdAwareRank(ncd(DanglingStrategy::NcdAware)),
                "naive" => MethodKind::NcdAwareRank(ncd(DanglingStrategy::StronglyPreferential)),
                "pagerank" => MethodKind::PageRank(PageRankConfig {
                    workers,
                    ..PageRankConfig::default()
                }),
                "totalrank" => MethodKind::Functional(Damping::TotalRank),
                "linearrank" => MethodKind::Functional(Damping::LinearRank { l: 10 }),
                "hyperrank" => MethodKind::Functional(Damping::HyperRank { beta: 3.0 }),
                other => bail!("unknown method `{other}`"),
            };
            Ok(Method::new(name, kind))
        })
        .collect()
}

fn counts(levels: &[f64]) -> anyhow::Result<Vec<usize>> {
    levels
        .iter()
        .map(|&x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(anyhow!("level {x} is not a count"))
            }
        })
        .collect()
}

pub fn run(args: ExperimentArgs, workers: Option<usize>) -> CliResult {
    let teleport = match args.ncd_teleport.as_str() {
        "uniform" => TeleportSpec::UniformNodes,
        "blocks" => TeleportSpec::BlockBalanced(0),
        other => {
            return Err(anyhow!("--ncd-teleport must be uniform or blocks, got `{other}`").into())
        }
    };
    let methods = methods(&args.methods, teleport, workers)?;
    if methods.is_empty() {
        return Err(anyhow!("--methods is empty").into());
    }

    let (g, d) = match &args.graph {
        Some(path) => {
            let mut loaded = inputs::load(&GraphInput {
                graph: path.clone(),
                blocks: args.blocks.clone(),
            })?;
            if loaded.decomps.len() != 1 {
                return Err(anyhow!("experiments take exactly one --blocks file").into());
            }
            (loaded.graph, loaded.decomps.remove(0))
        }
        None => {
            let params = BlockGraphParams {
                nodes: args.nodes,
                blocks: args.sites,
                mean_degree: args.degree,
                intra_probability: args.intra,
                dangling_fraction: args.dangling_fraction,
            };
            // Stream u64::MAX keeps the graph independent of perturbation streams.
            block_graph(&params, &mut seeded_rng(args.seed, u64::MAX))
                .context("generating synthetic graph")?
        }
    };
    let n = g.node_count();
    let pct = |p: &[f64]| {
        p.iter()
            .map(|x| ((x * n as f64).round() as usize).max(1))
            .collect::<Vec<_>>()
    };

    let kind = match args.kind {
        Kind::Spam => ExperimentKind::Spam {
            target: match &args.target {
                Some(l) => Some(
                    g.labels()
                        .get(l)
                        .ok_or_else(|| anyhow!("unknown target `{l}`"))?,
                ),
                None => None,
            },
            counts: if args.levels.is_empty() {
                pct(&[0.01, 0.02, 0.05, 0.10])
            } else {
                counts(&args.levels)?
            },
        },
        Kind::Sparsity => ExperimentKind::Sparsity {
            keep_fractions: if args.levels.is_empty() {
                vec![0.9, 0.8, 0.7, 0.6, 0.5, 0.4]
            } else {
                args.levels.clone()
            },
        },
        Kind::Newpages => ExperimentKind::NewPages {
            counts: if args.levels.is_empty() {
                pct(&[0.01, 0.02, 0.05])
            } else {
                counts(&args.levels)?
            },
            remove_fraction: args.remove_fraction,
        },
    };
    let spec = ExperimentSpec {
        kind,
        repetitions: args.reps,
        seed: args.seed,
    };
    log::info!(
        "{} nodes, {} edges, {} blocks",
        n,
        g.edge_count(),
        d.block_count()
    );
    let report = run_experiment(&spec, &methods, &g, &d)?;
    let mut w = inputs::output(args.out.as_deref())?;
    write_report_csv(&mut w, &report)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_list() {
        let m = methods("ncd, pagerank,,hyperrank", TeleportSpec::UniformNodes, None).unwrap();
        let names: Vec<&str> = m.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(names, ["ncd", "pagerank", "hyperrank"]);
        assert!(methods("ncd,bogus", TeleportSpec::UniformNodes, None).is_err());
    }

    #[test]
    fn levels_must_be_counts() {
        assert_eq!(counts(&[0.0, 20.0]).unwrap(), vec![0, 20]);
        assert!(counts(&[1.5]).is_err());
        assert!(counts(&[-1.0]).is_err());
    }
}

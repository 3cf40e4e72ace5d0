use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use ncdrank::decomposition::{check_primitivity_single, stacked_indicator};
use ncdrank::ncdlab::{materialize_p, write_dense_csv, DEFAULT_DENSE_CAP};
use ncdrank::ranking::{ncdawarerank, write_rank_tsv};
use ncdrank::separable::{coupling_bound, detect_aggregates, solve_separable};
use ncdrank::{DanglingStrategy, ProximityFactors, RankVector, RankingConfig, TeleportSpec};
use serde::Serialize;

use crate::inputs::{self, InputDigest};
use crate::{CliResult, Failure, GraphInput};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Power,
    Separable,
    Auto,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: GraphInput,

    /// Weight of the link matrix.
    #[arg(long, default_value_t = 0.85)]
    pub eta: f64,

    /// Weight of each inter-level matrix, matched to --blocks by position
    /// (default 0.1 when a single --blocks is given).
    #[arg(long = "mu")]
    pub mu: Vec<f64>,

    /// uniform | blocks | file:PATH
    #[arg(long, default_value = "uniform")]
    pub teleport: String,

    /// strong | weak:PATH | ncd (default ncd with blocks, strong without)
    #[arg(long)]
    pub dangling: Option<String>,

    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,

    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,

    /// Rank TSV; a `<out>.manifest.json` is written next to it. Stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Also write the dense transition matrix as CSV (small graphs only).
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,
}

#[derive(Serialize)]
struct Metrics {
    iterations: usize,
    final_residual: f64,
    converged: bool,
    wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    aggregates: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling_bound: Option<f64>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    mode: Mode,
    config: &'a RankingConfig,
    inputs: Vec<InputDigest>,
    seed: Option<u64>,
    artifacts: Vec<PathBuf>,
    metrics: Metrics,
}

fn teleport_spec(
    s: &str,
    g: &ncdrank::SparseGraph,
    has_blocks: bool,
) -> anyhow::Result<TeleportSpec> {
    Ok(match s {
        "uniform" => TeleportSpec::UniformNodes,
        "blocks" => {
            if !has_blocks {
                bail!("--teleport blocks needs --blocks");
            }
            TeleportSpec::BlockBalanced(0)
        }
        _ => match s.strip_prefix("file:") {
            Some(p) => TeleportSpec::Custom(inputs::load_weights(Path::new(p), g)?),
            None => bail!("--teleport must be uniform, blocks or file:PATH, got `{s}`"),
        },
    })
}

fn dangling_strategy(
    s: Option<&str>,
    g: &ncdrank::SparseGraph,
    has_blocks: bool,
) -> anyhow::Result<DanglingStrategy> {
    let s = s.unwrap_or(if has_blocks { "ncd" } else { "strong" });
    Ok(match s {
        "strong" => DanglingStrategy::StronglyPreferential,
        "ncd" => {
            if !has_blocks {
                bail!("--dangling ncd needs --blocks");
            }
            DanglingStrategy::NcdAware
        }
        _ => match s.strip_prefix("weak:") {
            Some(p) => DanglingStrategy::WeaklyPreferential(inputs::load_weights(Path::new(p), g)?),
            None => bail!("--dangling must be strong, weak:PATH or ncd, got `{s}`"),
        },
    })
}

/// Resolves the μ list against the number of decompositions.
pub fn resolve_mus(mus: &[f64], blocks: usize) -> anyhow::Result<Vec<f64>> {
    match (mus.len(), blocks) {
        (0, 1) => Ok(vec![0.1]),
        (0, 0) => Ok(Vec::new()),
        (m, 0) => Err(anyhow!("{m} --mu value(s) given without --blocks")),
        (m, b) if m == b => Ok(mus.to_vec()),
        (m, b) => Err(anyhow!("{m} --mu value(s) for {b} --blocks file(s)")),
    }
}

pub fn run(args: RankArgs, workers: Option<usize>) -> CliResult {
    let start = Instant::now();
    let mus = resolve_mus(&args.mu, args.input.blocks.len())?;
    let loaded = inputs::load(&args.input)?;
    let (g, decomps) = (&loaded.graph, &loaded.decomps);
    let has_blocks = !decomps.is_empty();
    let cfg = RankingConfig {
        eta: args.eta,
        mus,
        teleport: teleport_spec(&args.teleport, g, has_blocks)?,
        dangling: dangling_strategy(args.dangling.as_deref(), g, has_blocks)?,
        tol: args.tol,
        max_iters: args.max_iters,
        workers,
    };
    cfg.validate(decomps.len())?;

    if cfg.no_teleport_mode() {
        if !has_blocks {
            return Err(Failure::NotPrimitive(
                "without teleportation a decomposition is needed to guarantee primitivity".into(),
            ));
        }
        let fs: Vec<ProximityFactors> = decomps
            .iter()
            .map(|d| ProximityFactors::new(g, d))
            .collect();
        let w = stacked_indicator(&fs)?;
        if !check_primitivity_single(&w).is_primitive() {
            return Err(Failure::NotPrimitive(
                "indicator matrix is reducible; the model without teleportation is not primitive"
                    .into(),
            ));
        }
    }

    if let Some(path) = &args.dump_matrix {
        let p = materialize_p(g, decomps, &cfg, DEFAULT_DENSE_CAP)?;
        let mut w = inputs::create(path)?;
        write_dense_csv(&mut w, p.matrix())?;
        w.flush()?;
    }

    let separable = match args.mode {
        Mode::Power => None,
        Mode::Separable => Some(true),
        Mode::Auto => Some(false),
    };
    let mut aggregates = None;
    let mut xi = None;
    let mut bound = None;
    let mut used = Mode::Power;
    let rank: RankVector = match separable {
        Some(forced) => {
            let detected = detect_aggregates(g, decomps, &cfg.dangling);
            match detected {
                Ok(part) if forced || part.count > 1 => {
                    let sol = solve_separable(g, decomps, &cfg)?;
                    log::info!("separable solve over {} aggregates", sol.partition.count);
                    aggregates = Some(part.sizes());
                    xi = Some(sol.xi.clone());
                    bound = Some(coupling_bound(&cfg));
                    used = Mode::Separable;
                    sol.rank
                }
                Err(e) if forced => return Err(anyhow!(e).context("--mode separable").into()),
                _ => ncdawarerank(g, decomps, &cfg)?,
            }
        }
        None => ncdawarerank(g, decomps, &cfg)?,
    };
    for (k, r) in rank.residuals.iter().enumerate() {
        log::info!("iteration {:>4}  residual {r:.3e}", k + 1);
    }

    let mut tsv = inputs::output(args.out.as_deref())?;
    write_rank_tsv(&mut tsv, g.labels(), &rank.pi)?;
    tsv.flush()?;
    drop(tsv);

    if let Some(out) = &args.out {
        let manifest_path = manifest_path(out);
        let mut artifacts = vec![out.clone(), manifest_path.clone()];
        artifacts.extend(args.dump_matrix.clone());
        let manifest = Manifest {
            command: "rank",
            mode: used,
            config: &cfg,
            inputs: loaded.digests.clone(),
            seed: None,
            artifacts,
            metrics: Metrics {
                iterations: rank.iterations,
                final_residual: rank.final_residual,
                converged: rank.converged,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                aggregates,
                xi,
                coupling_bound: bound,
            },
        };
        inputs::write_json(Some(&manifest_path), &manifest).context("writing manifest")?;
    }

    if !rank.converged {
        return Err(Failure::NotConverged(format!(
            "no convergence after {} iterations (residual {:.3e} > {:.1e}); best iterate written",
            rank.iterations, rank.final_residual, cfg.tol
        )));
    }
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

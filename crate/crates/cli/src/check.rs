use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use ncdrank::decomposition::{
    check_primitivity_single, check_sufficient_conditions, indicator_matrix, stacked_indicator,
};
use ncdrank::separable::{detect_aggregates, verify_lumpability};
use ncdrank::{
    DanglingStrategy, PrimitivityVerdict, ProximityFactors, RankingConfig, SufficientCondition,
};
use serde::Serialize;

use crate::inputs;
use crate::rank::resolve_mus;
use crate::{CliResult, Failure, GraphInput};

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: GraphInput,

    /// Also detect aggregates and measure the coupling between them.
    #[arg(long)]
    pub separability: bool,

    /// Link weight used for the coupling measurement.
    #[arg(long, default_value_t = 0.85)]
    pub eta: f64,

    /// Inter-level weights used for the coupling measurement.
    #[arg(long = "mu")]
    pub mu: Vec<f64>,

    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Verdict {
    verdict: &'static str,
    /// Strongly connected components of the indicator pattern.
    components: usize,
}

impl From<&PrimitivityVerdict> for Verdict {
    fn from(v: &PrimitivityVerdict) -> Self {
        match v {
            PrimitivityVerdict::Primitive => Verdict {
                verdict: "primitive",
                components: 1,
            },
            PrimitivityVerdict::Reducible { witness } => Verdict {
                verdict: "reducible",
                components: witness.component_count,
            },
        }
    }
}

#[derive(Serialize)]
struct Separability {
    separable: bool,
    aggregates: usize,
    sizes: Vec<usize>,
    epsilon: f64,
    lumpable: bool,
}

#[derive(Serialize)]
struct Report {
    single: Vec<Verdict>,
    sufficient_condition: &'static str,
    stacked: Verdict,
    primitive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    separability: Option<Separability>,
}

pub fn run(args: CheckArgs) -> CliResult {
    if args.input.blocks.is_empty() {
        return Err(anyhow::anyhow!("check needs at least one --blocks file").into());
    }
    let loaded = inputs::load(&args.input)?;
    let (g, decomps) = (&loaded.graph, &loaded.decomps);
    let fs: Vec<ProximityFactors> = decomps
        .iter()
        .map(|d| ProximityFactors::new(g, d))
        .collect();
    let single: Vec<PrimitivityVerdict> = fs
        .iter()
        .map(|f| check_primitivity_single(&indicator_matrix(f)))
        .collect();
    let stacked = check_primitivity_single(&stacked_indicator(&fs)?);
    let sufficient = match check_sufficient_conditions(&fs)? {
        SufficientCondition::Irreducible { .. } => "i",
        SufficientCondition::PositiveCross { .. } => "ii",
        SufficientCondition::Inconclusive => "inconclusive",
    };

    let separability = if args.separability {
        let cfg = RankingConfig {
            eta: args.eta,
            mus: resolve_mus(&args.mu, decomps.len()).or_else(|_| {
                if args.mu.is_empty() {
                    Ok(vec![0.1 / decomps.len() as f64; decomps.len()])
                } else {
                    bail!(
                        "{} --mu value(s) for {} --blocks file(s)",
                        args.mu.len(),
                        decomps.len()
                    )
                }
            })?,
            dangling: DanglingStrategy::NcdAware,
            ..RankingConfig::default()
        };
        cfg.validate(decomps.len())?;
        match detect_aggregates(g, decomps, &cfg.dangling) {
            Ok(part) => {
                let lump = verify_lumpability(g, decomps, &cfg, &part, g.node_count())?;
                Some(Separability {
                    separable: part.count > 1,
                    aggregates: part.count,
                    sizes: part.sizes(),
                    epsilon: lump.max_coupling,
                    lumpable: lump.holds,
                })
            }
            Err(e) => {
                log::warn!("{e}");
                Some(Separability {
                    separable: false,
                    aggregates: 1,
                    sizes: vec![g.node_count()],
                    epsilon: 0.0,
                    lumpable: true,
                })
            }
        }
    } else {
        None
    };

    let primitive = stacked.is_primitive();
    let report = Report {
        single: single.iter().map(Verdict::from).collect(),
        sufficient_condition: sufficient,
        stacked: Verdict::from(&stacked),
        primitive,
        separability,
    };
    inputs::write_json(args.out.as_deref(), &report)?;
    if primitive {
        Ok(())
    } else {
        Err(Failure::Reducible)
    }
}

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::Args;
use nalgebra::DMatrix;
use ncdrank::ncdlab::{
    coupling_degree, exact_via_complementation, ncd_approximate, read_dense_csv, stationary_dense,
    stochastic_complement, DenseStochasticMatrix, StatePartition, StochasticityAdjustment,
};
use serde_json::json;

use crate::inputs::{self, digest};
use crate::CliResult;

#[derive(Args, Debug)]
pub struct LabArgs {
    /// Dense row-stochastic matrix, one comma- or space-separated row per line.
    #[arg(long)]
    pub matrix: PathBuf,

    /// `sizes:3,2,3` or `labels:0,0,0,1,1,2,2,2`.
    #[arg(long)]
    pub partition: Option<String>,

    /// stationary | ncd-approx | complement:I | exact-complement | coupling-eps
    #[arg(long)]
    pub op: String,

    /// Completion of diagonal blocks for ncd-approx:
    /// diagonal | proportional | explicit:B1.csv,B2.csv,...
    #[arg(long, default_value = "diagonal")]
    pub adjust: String,

    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn read_matrix(path: &std::path::Path) -> anyhow::Result<DMatrix<f64>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_dense_csv(BufReader::new(f)).with_context(|| format!("matrix {}", path.display()))
}

fn adjustment(spec: &str) -> anyhow::Result<StochasticityAdjustment> {
    Ok(match spec {
        "diagonal" => StochasticityAdjustment::DiagonalAbsorption,
        "proportional" => StochasticityAdjustment::Proportional,
        _ => match spec.strip_prefix("explicit:") {
            Some(list) => StochasticityAdjustment::Explicit(
                list.split(',')
                    .map(|p| read_matrix(std::path::Path::new(p.trim())))
                    .collect::<anyhow::Result<_>>()?,
            ),
            None => {
                bail!("--adjust must be diagonal, proportional or explicit:FILES, got `{spec}`")
            }
        },
    })
}

pub fn run(args: LabArgs) -> CliResult {
    let p = DenseStochasticMatrix::from_matrix(read_matrix(&args.matrix)?)?.into_matrix();
    let part = || -> anyhow::Result<StatePartition> {
        let spec = args
            .partition
            .as_deref()
            .ok_or_else(|| anyhow!("--op {} needs --partition", args.op))?;
        Ok(StatePartition::parse(spec)?)
    };
    let input = digest(&args.matrix)?;
    let op = args.op.as_str();
    let body = match op {
        "stationary" => json!({ "pi": stationary_dense(&p)? }),
        "coupling-eps" => json!({ "epsilon": coupling_degree(&p, &part()?)? }),
        "ncd-approx" => {
            let a = ncd_approximate(&p, &part()?, &adjustment(&args.adjust)?)?;
            json!({
                "pi_tilde": a.pi_tilde,
                "xi": a.xi,
                "local": a.block_distributions,
                "adjusted_blocks": a.adjusted_blocks.iter().map(rows).collect::<Vec<_>>(),
                "coupling": rows(&a.coupling),
            })
        }
        "exact-complement" => {
            let c = exact_via_complementation(&p, &part()?)?;
            json!({
                "complements": c.complements.iter().map(rows).collect::<Vec<_>>(),
                "local": c.local,
                "coupling": rows(&c.coupling),
                "xi": c.xi,
                "pi": c.pi,
            })
        }
        _ => match op.strip_prefix("complement:") {
            Some(i) => {
                let i: usize = i
                    .parse()
                    .map_err(|e| anyhow!("complement index `{i}`: {e}"))?;
                let part = part()?;
                if i == 0 || i > part.cluster_count() {
                    return Err(anyhow!(
                        "complement index {i} outside 1..={}",
                        part.cluster_count()
                    )
                    .into());
                }
                let s = stochastic_complement(&p, &part, i - 1)?;
                json!({ "index": i, "matrix": rows(&s), "stationary": stationary_dense(&s)? })
            }
            None => return Err(anyhow!("unknown --op `{op}`").into()),
        },
    };
    let report = json!({ "op": op, "input": input, "result": body });
    inputs::write_json(args.out.as_deref(), &report)?;
    Ok(())
}

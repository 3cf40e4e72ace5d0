use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ncdrank::decomposition::load_decomposition;
use ncdrank::graph::{load_edge_list, EdgeListOptions};
use ncdrank::{Decomposition, SparseGraph};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::GraphInput;

/// A consumed input file and its content digest.
#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

pub fn digest(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = Sha256::digest(&bytes);
    Ok(InputDigest {
        path: path.to_owned(),
        sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// Writes to `path`, or to stdout when absent.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

pub struct Loaded {
    pub graph: SparseGraph,
    pub decomps: Vec<Decomposition>,
    pub digests: Vec<InputDigest>,
}

pub fn load(input: &GraphInput) -> Result<Loaded> {
    let graph = load_edge_list(open(&input.graph)?, &EdgeListOptions::default())
        .with_context(|| format!("graph {}", input.graph.display()))?;
    let mut digests = vec![digest(&input.graph)?];
    let mut decomps = Vec::new();
    for p in &input.blocks {
        let d = load_decomposition(open(p)?, &graph)
            .with_context(|| format!("blocks {}", p.display()))?;
        decomps.push(d);
        digests.push(digest(p)?);
    }
    log::info!(
        "loaded {} nodes, {} edges, {} dangling, {} decomposition(s)",
        graph.node_count(),
        graph.edge_count(),
        graph.dangling_nodes().len(),
        decomps.len()
    );
    Ok(Loaded {
        graph,
        decomps,
        digests,
    })
}

/// Reads `label weight` lines into a distribution over `g`'s nodes; unlisted
/// nodes get weight zero and the result is scaled to sum 1.
pub fn load_weights(path: &Path, g: &SparseGraph) -> Result<Vec<f64>> {
    let mut w = vec![0.0; g.node_count()];
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace();
        let (Some(label), Some(x), None) = (it.next(), it.next(), it.next()) else {
            bail!("{}:{}: expected `label weight`", path.display(), i + 1);
        };
        let u = g
            .labels()
            .get(label)
            .with_context(|| format!("{}:{}: unknown node `{label}`", path.display(), i + 1))?;
        let x: f64 = x
            .parse()
            .with_context(|| format!("{}:{}: weight `{x}`", path.display(), i + 1))?;
        if !(x >= 0.0 && x.is_finite()) {
            bail!(
                "{}:{}: weight must be finite and non-negative",
                path.display(),
                i + 1
            );
        }
        w[u] += x;
    }
    let s: f64 = w.iter().sum();
    if s <= 0.0 {
        bail!("{}: weights sum to zero", path.display());
    }
    w.iter_mut().for_each(|x| *x /= s);
    Ok(w)
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

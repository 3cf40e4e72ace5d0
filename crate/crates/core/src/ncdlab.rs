//! Dense analysis of nearly completely decomposable chains: coupling degree,
//! aggregation approximation, stochastic complements and exact stationary
//! solves. Intended for matrices of a few thousand states at most.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::graph::{strongly_connected_components, Csr, SparseGraph};
use crate::ranking::{RankingConfig, RankingModel};

/// Default size cap for [`materialize_p`].
pub const DEFAULT_DENSE_CAP: usize = 5000;

const ROW_TOL: f64 = 1e-10;

/// Square row-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStochasticMatrix {
    m: DMatrix<f64>,
}

impl DenseStochasticMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyInput("matrix has no rows"));
        }
        for (i, row) in m.row_iter().enumerate() {
            if row.iter().any(|&x| !x.is_finite() || x < -1e-14) {
                return Err(Error::InvalidDistribution(format!(
                    "row {} has a negative or non-finite entry",
                    i + 1
                )));
            }
            let s = row.sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "row {} sums to {s}",
                    i + 1
                )));
            }
        }
        Ok(DenseStochasticMatrix { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }
}

/// Partition of the states `0..n` into `L` clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePartition {
    /// States listed cluster by cluster.
    order: Vec<usize>,
    /// Cluster `I` occupies `order[bounds[I]..bounds[I + 1]]`.
    bounds: Vec<usize>,
}

impl StatePartition {
    /// Consecutive clusters of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidConfig(
                "cluster sizes must be positive".into(),
            ));
        }
        let mut bounds = vec![0];
        for s in sizes {
            bounds.push(bounds.last().unwrap() + s);
        }
        let n = *bounds.last().unwrap();
        Ok(StatePartition {
            order: (0..n).collect(),
            bounds,
        })
    }

    /// One cluster label per state; clusters are numbered by first appearance.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput("partition has no states"));
        }
        let mut ids: Vec<usize> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (s, &l) in labels.iter().enumerate() {
            let g = match ids.iter().position(|&x| x == l) {
                Some(g) => g,
                None => {
                    ids.push(l);
                    groups.push(Vec::new());
                    ids.len() - 1
                }
            };
            groups[g].push(s);
        }
        let mut bounds = vec![0];
        let mut order = Vec::with_capacity(labels.len());
        for g in groups {
            order.extend(g);
            bounds.push(order.len());
        }
        Ok(StatePartition { order, bounds })
    }

    /// Parses `sizes:3,2,3` or `labels:0,0,0,1,1,2,2,2`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, list) = spec.split_once(':').ok_or_else(|| {
            Error::InvalidConfig(format!(
                "partition `{spec}` must start with `sizes:` or `labels:`"
            ))
        })?;
        let values = list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidConfig(format!("partition entry `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match kind.trim() {
            "sizes" => Self::from_sizes(&values),
            "labels" => Self::from_labels(&values),
            other => Err(Error::InvalidConfig(format!(
                "unknown partition kind `{other}`"
            ))),
        }
    }

    pub fn state_count(&self) -> usize {
        self.order.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.bounds.len() - 1
    }

    /// States of cluster `i`, in ascending order.
    pub fn cluster(&self, i: usize) -> &[usize] {
        &self.order[self.bounds[i]..self.bounds[i + 1]]
    }

    /// States outside cluster `i`, in ascending order.
    pub fn complement(&self, i: usize) -> Vec<usize> {
        let mut inside = vec![false; self.state_count()];
        for &s in self.cluster(i) {
            inside[s] = true;
        }
        (0..self.state_count()).filter(|&s| !inside[s]).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.state_count() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.state_count(),
            });
        }
        Ok(())
    }
}

fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn pattern(m: &DMatrix<f64>) -> Csr {
    let pairs = (0..m.nrows()).flat_map(|i| {
        (0..m.ncols())
            .filter(move |&j| m[(i, j)] > 0.0)
            .map(move |j| (i, j))
    });
    Csr::from_pairs(m.nrows(), pairs)
}

/// Irreducibility of a non-negative square matrix via its pattern.
pub fn is_irreducible(m: &DMatrix<f64>) -> bool {
    strongly_connected_components(&pattern(m)).component_count == 1
}

/// Stationary distribution from `πᵀ (P + 1 1ᵀ − I) = 1ᵀ`.
pub fn stationary_dense(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    if n != p.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.ncols(),
        });
    }
    let a = (p + DMatrix::from_element(n, n, 1.0) - DMatrix::identity(n, n)).transpose();
    let lu = a.full_piv_lu();
    if !lu.is_invertible() {
        return Err(Error::Singular(
            "P + 11ᵀ − I is singular; the chain is reducible".into(),
        ));
    }
    let x = lu
        .solve(&DVector::from_element(n, 1.0))
        .ok_or_else(|| Error::Singular("stationary system has no solution".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("stationary solve"));
    }
    let s = x.sum();
    Ok(x.iter().map(|v| v / s).collect())
}

/// Largest row mass leaving the row's own cluster.
pub fn coupling_degree(p: &DMatrix<f64>, part: &StatePartition) -> Result<f64> {
    part.check(p.nrows())?;
    let mut eps = 0.0f64;
    for i in 0..part.cluster_count() {
        let outside = part.complement(i);
        for &r in part.cluster(i) {
            eps = eps.max(outside.iter().map(|&c| p[(r, c)]).sum());
        }
    }
    Ok(eps)
}

/// How a substochastic diagonal block is completed to a stochastic one.
#[derive(Debug, Clone, PartialEq)]
pub enum StochasticityAdjustment {
    /// Each row's deficit is added to its diagonal entry.
    DiagonalAbsorption,
    /// Each row is rescaled to sum 1.
    Proportional,
    /// User-supplied blocks; each must be stochastic and dominate `P_II`.
    Explicit(Vec<DMatrix<f64>>),
}

fn adjust_block(
    p_ii: &DMatrix<f64>,
    adj: &StochasticityAdjustment,
    index: usize,
) -> Result<DMatrix<f64>> {
    let mut b = p_ii.clone();
    match adj {
        StochasticityAdjustment::DiagonalAbsorption => {
            for i in 0..b.nrows() {
                let deficit = 1.0 - b.row(i).sum();
                b[(i, i)] += deficit;
            }
        }
        StochasticityAdjustment::Proportional => {
            for i in 0..b.nrows() {
                let s = b.row(i).sum();
                if !(s > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "block {}: row {} has no in-block mass to rescale",
                        index + 1,
                        i + 1
                    )));
                }
                b.row_mut(i).iter_mut().for_each(|x| *x /= s);
            }
        }
        StochasticityAdjustment::Explicit(blocks) => {
            let given = blocks.get(index).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "no explicit block supplied for cluster {}",
                    index + 1
                ))
            })?;
            if given.shape() != b.shape() {
                return Err(Error::DimensionMismatch {
                    expected: b.nrows(),
                    got: given.nrows(),
                });
            }
            DenseStochasticMatrix::from_matrix(given.clone())
                .map_err(|e| Error::InvalidConfig(format!("explicit block {}: {e}", index + 1)))?;
            if given.iter().zip(b.iter()).any(|(g, p)| *g < p - 1e-14) {
                return Err(Error::InvalidConfig(format!(
                    "explicit block {} drops mass below the diagonal block of P",
                    index + 1
                )));
            }
            b = given.clone();
        }
    }
    Ok(b)
}

/// Coupling matrix `C_IJ = s_Iᵀ P_IJ 1` for per-cluster distributions `s_I`.
pub fn coupling_matrix(
    p: &DMatrix<f64>,
    part: &StatePartition,
    local: &[Vec<f64>],
) -> Result<DMatrix<f64>> {
    part.check(p.nrows())?;
    let l = part.cluster_count();
    if local.len() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            got: local.len(),
        });
    }
    let mut c = DMatrix::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            c[(i, j)] = part
                .cluster(i)
                .iter()
                .zip(&local[i])
                .map(|(&r, &w)| w * part.cluster(j).iter().map(|&col| p[(r, col)]).sum::<f64>())
                .sum();
        }
    }
    Ok(c)
}

fn concatenate(part: &StatePartition, xi: &[f64], local: &[Vec<f64>]) -> Vec<f64> {
    let mut pi = vec![0.0; part.state_count()];
    for (i, (x, s)) in xi.iter().zip(local).enumerate() {
        for (&state, &w) in part.cluster(i).iter().zip(s) {
            pi[state] = x * w;
        }
    }
    pi
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcdApproximation {
    pub pi_tilde: Vec<f64>,
    pub xi: Vec<f64>,
    /// Stationary vector of each adjusted diagonal block.
    pub block_distributions: Vec<Vec<f64>>,
    pub adjusted_blocks: Vec<DMatrix<f64>>,
    pub coupling: DMatrix<f64>,
}

/// Aggregation approximation: solve the adjusted diagonal blocks, weight them
/// by the stationary vector of the resulting coupling matrix.
pub fn ncd_approximate(
    p: &DMatrix<f64>,
    part: &StatePartition,
    adj: &StochasticityAdjustment,
) -> Result<NcdApproximation> {
    part.check(p.nrows())?;
    let l = part.cluster_count();
    let mut adjusted = Vec::with_capacity(l);
    let mut local = Vec::with_capacity(l);
    for i in 0..l {
        let states = part.cluster(i);
        let b = adjust_block(&select(p, states, states), adj, i)?;
        if !is_irreducible(&b) {
            return Err(Error::Singular(format!(
                "adjusted block {} is reducible",
                i + 1
            )));
        }
        local.push(stationary_dense(&b)?);
        adjusted.push(b);
    }
    let coupling = coupling_matrix(p, part, &local)?;
    let xi = if is_irreducible(&coupling) {
        stationary_dense(&coupling)?
    } else {
        log::warn!("coupling matrix is reducible; weighting clusters by size");
        let n = part.state_count() as f64;
        (0..l).map(|i| part.cluster(i).len() as f64 / n).collect()
    };
    Ok(NcdApproximation {
        pi_tilde: concatenate(part, &xi, &local),
        xi,
        block_distributions: local,
        adjusted_blocks: adjusted,
        coupling,
    })
}

/// `S_I = P_II + P_I⋆ (I − P⋆⋆)⁻¹ P_⋆I`.
pub fn stochastic_complement(
    p: &DMatrix<f64>,
    part: &StatePartition,
    index: usize,
) -> Result<DMatrix<f64>> {
    part.check(p.nrows())?;
    if index >= part.cluster_count() {
        return Err(Error::InvalidConfig(format!(
            "cluster {} does not exist",
            index + 1
        )));
    }
    let inside = part.cluster(index);
    let outside = part.complement(index);
    let p_ii = select(p, inside, inside);
    if outside.is_empty() {
        return Ok(p_ii);
    }
    let p_io = select(p, inside, &outside);
    if p_io.iter().all(|&x| x == 0.0) {
        return Ok(p_ii);
    }
    let p_oi = select(p, &outside, inside);
    let p_oo = select(p, &outside, &outside);
    let resolvent = DMatrix::identity(outside.len(), outside.len()) - p_oo;
    let lu = resolvent.full_piv_lu();
    if !lu.is_invertible() {
        return Err(Error::Singular(format!(
            "I − P⋆ is singular for cluster {}",
            index + 1
        )));
    }
    let x = lu
        .solve(&p_oi)
        .ok_or_else(|| Error::Singular(format!("I − P⋆ is singular for cluster {}", index + 1)))?;
    Ok(p_ii + p_io * x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Complementation {
    pub complements: Vec<DMatrix<f64>>,
    /// Stationary vector of each complement.
    pub local: Vec<Vec<f64>>,
    pub coupling: DMatrix<f64>,
    pub xi: Vec<f64>,
    pub pi: Vec<f64>,
}

/// Exact stationary vector assembled from stochastic complements.
pub fn exact_via_complementation(
    p: &DMatrix<f64>,
    part: &StatePartition,
) -> Result<Complementation> {
    let l = part.cluster_count();
    let complements = (0..l)
        .map(|i| stochastic_complement(p, part, i))
        .collect::<Result<Vec<_>>>()?;
    let local = complements
        .iter()
        .map(stationary_dense)
        .collect::<Result<Vec<_>>>()?;
    let coupling = coupling_matrix(p, part, &local)?;
    let xi = stationary_dense(&coupling)?;
    Ok(Complementation {
        pi: concatenate(part, &xi, &local),
        complements,
        local,
        coupling,
        xi,
    })
}

/// Dense `P` of the decomposition-aware model.
pub fn materialize_p(
    g: &SparseGraph,
    decomps: &[Decomposition],
    cfg: &RankingConfig,
    cap: usize,
) -> Result<DenseStochasticMatrix> {
    let rows = RankingModel::new(g, decomps, cfg)?.to_dense(cap)?;
    DenseStochasticMatrix::from_rows(&rows)
}

/// Reads a dense matrix, one row per line, comma- or whitespace-separated.
pub fn read_dense_csv<R: BufRead>(reader: R) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("`{f}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("matrix file has no rows"));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn write_dense_csv<W: Write>(mut w: W, m: &DMatrix<f64>) -> Result<()> {
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

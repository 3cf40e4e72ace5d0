//! Matrix-free random-surfer operators and power-iteration solvers.
//!
//! The operator is
//! `P = η H̄ + Σ_i μ_i R_i A_i + (1 − η − Σ_i μ_i) 1 vᵀ`
//! where `H̄` is the row-normalized adjacency with dangling rows patched by
//! the configured strategy. Every product is computed by pulling along the
//! transposed patterns, so each output entry is summed in a fixed order and
//! results do not depend on the number of worker threads.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{Decomposition, ProximityFactors};
use crate::error::{Error, Result};
use crate::graph::{LabelMap, SparseGraph};

const SUM_TOL: f64 = 1e-12;
/// Below this size the step runs serially.
const PAR_THRESHOLD: usize = 1 << 14;

/// How rows of dangling nodes are completed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DanglingStrategy {
    /// Dangling rows become the teleport vector `v`.
    StronglyPreferential,
    /// Dangling rows become a fixed distribution `f`.
    WeaklyPreferential(Vec<f64>),
    /// Dangling rows become the corresponding row of the first decomposition's
    /// inter-level matrix, spreading mass over the node's own blocks.
    NcdAware,
}

/// Source of the teleport vector `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TeleportSpec {
    UniformNodes,
    /// Mass split evenly across blocks of the given decomposition, then evenly
    /// inside each block.
    BlockBalanced(usize),
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingConfig {
    pub eta: f64,
    /// One weight per decomposition.
    pub mus: Vec<f64>,
    pub teleport: TeleportSpec,
    pub dangling: DanglingStrategy,
    pub tol: f64,
    pub max_iters: usize,
    /// Worker threads for the step; `None` uses the ambient rayon pool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig {
            eta: 0.85,
            mus: vec![0.1],
            teleport: TeleportSpec::UniformNodes,
            dangling: DanglingStrategy::NcdAware,
            tol: 1e-8,
            max_iters: 1000,
            workers: None,
        }
    }
}

impl RankingConfig {
    pub fn mu_total(&self) -> f64 {
        self.mus.iter().sum()
    }

    /// Teleport weight `1 − η − Σμ`, clamped at zero.
    pub fn teleport_weight(&self) -> f64 {
        (1.0 - self.eta - self.mu_total()).max(0.0)
    }

    /// `η + Σμ = 1`: the model has no teleportation term.
    pub fn no_teleport_mode(&self) -> bool {
        (self.eta + self.mu_total() - 1.0).abs() <= SUM_TOL
    }

    pub fn validate(&self, decompositions: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        if self.mus.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return bad("mu weights must be finite and non-negative".into());
        }
        if self.mus.len() != decompositions {
            return bad(format!(
                "{} mu weights given for {} decompositions",
                self.mus.len(),
                decompositions
            ));
        }
        if self.eta + self.mu_total() > 1.0 + SUM_TOL {
            return bad(format!(
                "eta + sum(mu) = {} exceeds 1",
                self.eta + self.mu_total()
            ));
        }
        if !(self.tol > 0.0) {
            return bad("tolerance must be positive".into());
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if matches!(self.workers, Some(0)) {
            return bad("worker count must be at least 1".into());
        }
        Ok(())
    }
}

/// Stationary vector and convergence record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    pub pi: Vec<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    /// L1 residual after each iteration.
    pub residuals: Vec<f64>,
}

fn check_distribution(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{name} has negative or non-finite entries"
        )));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SUM_TOL * (n as f64).max(1.0) {
        return Err(Error::InvalidDistribution(format!(
            "{name} sums to {s}, not 1"
        )));
    }
    Ok(())
}

/// Block-balanced teleport vector. For overlapping blocks each membership
/// contributes `1/(K |D_k|)` and the result is renormalized.
pub fn block_balanced(d: &Decomposition) -> Vec<f64> {
    let k = d.block_count() as f64;
    let mut v: Vec<f64> = (0..d.node_count())
        .map(|u| {
            d.blocks_of(u)
                .iter()
                .map(|&b| 1.0 / (k * d.block(b).len() as f64))
                .sum()
        })
        .collect();
    if !d.is_partition() {
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
    }
    v
}

/// Materializes the teleport vector described by `spec`.
pub fn teleport_vector(
    spec: &TeleportSpec,
    g: &SparseGraph,
    d: Option<&Decomposition>,
) -> Result<Vec<f64>> {
    let n = g.node_count();
    match spec {
        TeleportSpec::UniformNodes => Ok(vec![1.0 / n as f64; n]),
        TeleportSpec::BlockBalanced(_) => {
            let d = d.ok_or_else(|| {
                Error::InvalidConfig("block-balanced teleport needs a decomposition".into())
            })?;
            if d.node_count() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d.node_count(),
                });
            }
            Ok(block_balanced(d))
        }
        TeleportSpec::Custom(v) => {
            check_distribution("teleport vector", v, n)?;
            Ok(v.clone())
        }
    }
}

struct Term {
    factors: ProximityFactors,
    mu: f64,
    absorbs_dangling: bool,
}

/// Assembled operator `P`, ready for repeated application.
pub struct RankingModel<'g> {
    g: &'g SparseGraph,
    eta: f64,
    teleport: f64,
    v: Vec<f64>,
    dangling_target: Option<Vec<f64>>,
    terms: Vec<Term>,
    inv_deg: Vec<f64>,
}

/// Reusable buffers for [`RankingModel::apply_into`].
#[derive(Default)]
pub struct Workspace {
    x: Vec<f64>,
    w: Vec<f64>,
    y: Vec<f64>,
}

impl<'g> RankingModel<'g> {
    /// Builds the operator for `g` with one factor pair per decomposition.
    pub fn new(g: &'g SparseGraph, decomps: &[Decomposition], cfg: &RankingConfig) -> Result<Self> {
        cfg.validate(decomps.len())?;
        let n = g.node_count();
        if n == 0 {
            return Err(Error::EmptyInput("graph has no nodes"));
        }
        for d in decomps {
            if d.node_count() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d.node_count(),
                });
            }
        }
        let decomp_for_teleport = match cfg.teleport {
            TeleportSpec::BlockBalanced(i) => Some(decomps.get(i).ok_or_else(|| {
                Error::InvalidConfig(format!("teleport refers to decomposition {i}"))
            })?),
            _ => None,
        };
        let v = teleport_vector(&cfg.teleport, g, decomp_for_teleport)?;
        if !cfg.no_teleport_mode() && v.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidDistribution(
                "teleport vector must be strictly positive when the teleport term is active".into(),
            ));
        }
        let dangling_target = match &cfg.dangling {
            DanglingStrategy::StronglyPreferential => Some(v.clone()),
            DanglingStrategy::WeaklyPreferential(f) => {
                check_distribution("dangling distribution", f, n)?;
                Some(f.clone())
            }
            DanglingStrategy::NcdAware => {
                let d = decomps.first().ok_or_else(|| {
                    Error::InvalidConfig("dangling strategy NcdAware needs a decomposition".into())
                })?;
                for u in g.dangling_nodes() {
                    let own = d.blocks_of(u);
                    if own.len() == 1 && d.block(own[0]).len() == 1 {
                        log::warn!(
                            "dangling node `{}` is alone in its block; its patched row is a self-loop",
                            g.label(u)
                        );
                    }
                }
                None
            }
        };
        let terms = decomps
            .iter()
            .zip(&cfg.mus)
            .enumerate()
            .map(|(i, (d, &mu))| Term {
                factors: ProximityFactors::new(g, d),
                mu,
                absorbs_dangling: i == 0 && cfg.dangling == DanglingStrategy::NcdAware,
            })
            .collect();
        let inv_deg = (0..n)
            .map(|u| match g.out_degree(u) {
                0 => 0.0,
                d => 1.0 / d as f64,
            })
            .collect();
        Ok(RankingModel {
            g,
            eta: cfg.eta,
            teleport: cfg.teleport_weight(),
            v,
            dangling_target,
            terms,
            inv_deg,
        })
    }

    pub fn node_count(&self) -> usize {
        self.g.node_count()
    }

    pub fn teleport(&self) -> &[f64] {
        &self.v
    }

    /// `out = xᵀ P` without renormalization; linear in `x`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64], ws: &mut Workspace) {
        let n = self.node_count();
        let g = self.g;
        let par = n >= PAR_THRESHOLD;

        ws.x.resize(n, 0.0);
        for ((s, &xi), &id) in ws.x.iter_mut().zip(x).zip(&self.inv_deg) {
            *s = xi * id;
        }
        let inbound = g.in_csr();
        let eta = self.eta;
        let scaled = &ws.x;
        let pull_h = |(v, o): (usize, &mut f64)| {
            *o = eta * inbound.row(v).iter().map(|&u| scaled[u]).sum::<f64>();
        };
        if par {
            out.par_iter_mut()
                .enumerate()
                .with_min_len(4096)
                .for_each(pull_h);
        } else {
            out.iter_mut().enumerate().for_each(pull_h);
        }

        let dangling_mass: f64 = g
            .dangling_mask()
            .iter()
            .zip(x)
            .filter(|(d, _)| **d)
            .map(|(_, xi)| xi)
            .sum();

        for term in &self.terms {
            let f = &term.factors;
            ws.w.resize(n, 0.0);
            for (u, w) in ws.w.iter_mut().enumerate() {
                let mut weight = term.mu;
                if term.absorbs_dangling && g.is_dangling(u) {
                    weight += eta;
                }
                *w = weight * x[u] * f.r_value(u);
            }
            let kb = f.block_count();
            ws.y.resize(kb, 0.0);
            let w = &ws.w;
            for (k, y) in ws.y.iter_mut().enumerate() {
                *y = f.r_col(k).iter().map(|&u| w[u]).sum::<f64>() * f.a_value(k);
            }
            let y = &ws.y;
            let pull_m = |(v, o): (usize, &mut f64)| {
                *o += f.a_col(v).iter().map(|&k| y[k]).sum::<f64>();
            };
            if par {
                out.par_iter_mut()
                    .enumerate()
                    .with_min_len(4096)
                    .for_each(pull_m);
            } else {
                out.iter_mut().enumerate().for_each(pull_m);
            }
        }

        if let Some(target) = &self.dangling_target {
            let c = eta * dangling_mass;
            if c != 0.0 {
                out.iter_mut().zip(target).for_each(|(o, t)| *o += c * t);
            }
        }
        if self.teleport > 0.0 {
            let c = self.teleport * x.iter().sum::<f64>();
            out.iter_mut().zip(&self.v).for_each(|(o, t)| *o += c * t);
        }
    }

    /// One normalized power step `πᵀ P / ‖πᵀ P‖₁`.
    pub fn step(&self, pi: &[f64], out: &mut [f64], ws: &mut Workspace) -> Result<()> {
        self.apply_into(pi, out, ws);
        let s: f64 = out.iter().sum();
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::NonFinite("power step"));
        }
        out.iter_mut().for_each(|o| *o /= s);
        Ok(())
    }

    /// Dense `P`, row by row, for models with at most `cap` nodes.
    pub fn to_dense(&self, cap: usize) -> Result<Vec<Vec<f64>>> {
        let n = self.node_count();
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let mut ws = Workspace::default();
        let mut e = vec![0.0; n];
        Ok((0..n)
            .map(|u| {
                e[u] = 1.0;
                let mut row = vec![0.0; n];
                self.apply_into(&e, &mut row, &mut ws);
                e[u] = 0.0;
                row
            })
            .collect())
    }

    /// Power iteration from the uniform vector.
    pub fn solve(&self, tol: f64, max_iters: usize) -> Result<RankVector> {
        let n = self.node_count();
        let mut pi = vec![1.0 / n as f64; n];
        self.iterate(&mut pi, tol, max_iters)
    }

    /// Power iteration from `start` (normalized to sum 1).
    pub fn iterate(&self, start: &mut [f64], tol: f64, max_iters: usize) -> Result<RankVector> {
        let n = self.node_count();
        let s: f64 = start.iter().sum();
        start.iter_mut().for_each(|x| *x /= s);
        let mut cur = start.to_vec();
        let mut next = vec![0.0; n];
        let mut ws = Workspace::default();
        let mut residuals = Vec::new();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for it in 1..=max_iters {
            self.step(&cur, &mut next, &mut ws)?;
            let r: f64 = cur.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            if !r.is_finite() {
                return Err(Error::NonFinite("residual"));
            }
            residuals.push(r);
            std::mem::swap(&mut cur, &mut next);
            if r < tol {
                return Ok(RankVector {
                    pi: cur,
                    iterations: it,
                    final_residual: r,
                    converged: true,
                    residuals,
                });
            }
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                best = Some((r, cur.clone()));
            }
        }
        let (r, pi) = best.expect("at least one iteration");
        log::warn!("power iteration stopped after {max_iters} iterations, best residual {r:e}");
        Ok(RankVector {
            pi,
            iterations: max_iters,
            final_residual: r,
            converged: false,
            residuals,
        })
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Other(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// One normalized step `πᵀP` for the model described by `g`, `decomps` and `cfg`.
pub fn apply_step(
    pi: &[f64],
    g: &SparseGraph,
    decomps: &[Decomposition],
    cfg: &RankingConfig,
) -> Result<Vec<f64>> {
    let model = RankingModel::new(g, decomps, cfg)?;
    if pi.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            got: pi.len(),
        });
    }
    let mut out = vec![0.0; pi.len()];
    model.step(pi, &mut out, &mut Workspace::default())?;
    Ok(out)
}

/// Stationary distribution of the decomposition-aware model.
pub fn ncdawarerank(
    g: &SparseGraph,
    decomps: &[Decomposition],
    cfg: &RankingConfig,
) -> Result<RankVector> {
    let model = RankingModel::new(g, decomps, cfg)?;
    with_pool(cfg.workers, || model.solve(cfg.tol, cfg.max_iters))?
}

/// Settings for the classic model `α H̄ + (1 − α) 1 vᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRankConfig {
    pub alpha: f64,
    pub teleport: TeleportSpec,
    pub dangling: DanglingStrategy,
    pub tol: f64,
    pub max_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            alpha: 0.85,
            teleport: TeleportSpec::UniformNodes,
            dangling: DanglingStrategy::StronglyPreferential,
            tol: 1e-8,
            max_iters: 1000,
            workers: None,
        }
    }
}

impl PageRankConfig {
    /// Equivalent configuration of the general model; `patch` decomposition
    /// (if any) enters with weight zero.
    pub fn as_ranking(&self, with_patch: bool) -> RankingConfig {
        RankingConfig {
            eta: self.alpha,
            mus: if with_patch { vec![0.0] } else { Vec::new() },
            teleport: self.teleport.clone(),
            dangling: self.dangling.clone(),
            tol: self.tol,
            max_iters: self.max_iters,
            workers: self.workers,
        }
    }
}

/// PageRank. `patch` supplies the decomposition used by the `NcdAware`
/// dangling strategy and by block-balanced teleportation.
pub fn pagerank(
    g: &SparseGraph,
    patch: Option<&Decomposition>,
    cfg: &PageRankConfig,
) -> Result<RankVector> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {}",
            cfg.alpha
        )));
    }
    let decomps: Vec<Decomposition> = patch.into_iter().cloned().collect();
    ncdawarerank(g, &decomps, &cfg.as_ranking(patch.is_some()))
}

/// Series truncation for [`functional_rank`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_terms: usize,
    pub tail_tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            max_terms: 200,
            tail_tol: 1e-10,
        }
    }
}

/// Common damping functions for [`functional_rank`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Damping {
    /// `(1 − α) αᵏ`
    Geometric { alpha: f64 },
    /// `1 / ((k + 1)(k + 2))`
    TotalRank,
    /// `2 (L − k) / (L (L + 1))` for `k < L`
    LinearRank { l: usize },
    /// `(k + 1)^(−β)`, unnormalized
    HyperRank { beta: f64 },
}

impl Damping {
    pub fn weight(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            Damping::Geometric { alpha } => (1.0 - alpha) * alpha.powi(k as i32),
            Damping::TotalRank => 1.0 / ((kf + 1.0) * (kf + 2.0)),
            Damping::LinearRank { l } => {
                if k < l {
                    2.0 * (l - k) as f64 / (l as f64 * (l as f64 + 1.0))
                } else {
                    0.0
                }
            }
            Damping::HyperRank { beta } => (kf + 1.0).powf(-beta),
        }
    }
}

/// Truncated series `Σ_k ψ(k) (H̄ᵀ)ᵏ v`, renormalized.
///
/// `H̄` is completed by `dangling`; `patch` is needed for `NcdAware`.
pub fn functional_rank(
    g: &SparseGraph,
    psi: impl Fn(usize) -> f64,
    v: &[f64],
    trunc: Truncation,
    dangling: &DanglingStrategy,
    patch: Option<&Decomposition>,
) -> Result<RankVector> {
    let n = g.node_count();
    check_distribution("teleport vector", v, n)?;
    let cfg = RankingConfig {
        eta: 1.0,
        mus: if patch.is_some() {
            vec![0.0]
        } else {
            Vec::new()
        },
        teleport: TeleportSpec::Custom(v.to_vec()),
        dangling: dangling.clone(),
        tol: 1.0,
        max_iters: 1,
        workers: None,
    };
    let decomps: Vec<Decomposition> = patch.into_iter().cloned().collect();
    let model = RankingModel::new(g, &decomps, &cfg)?;
    let mut ws = Workspace::default();
    let mut power = v.to_vec();
    let mut next = vec![0.0; n];
    let mut acc = vec![0.0; n];
    let mut terms = 0;
    let mut last_mass = 0.0;
    let mut residuals = Vec::new();
    for k in 0..trunc.max_terms {
        let w = psi(k);
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "damping weight psi({k}) = {w} is not a non-negative number"
            )));
        }
        if k > 0 {
            model.apply_into(&power, &mut next, &mut ws);
            std::mem::swap(&mut power, &mut next);
        }
        let mass = w * power.iter().sum::<f64>();
        acc.iter_mut().zip(&power).for_each(|(a, p)| *a += w * p);
        residuals.push(mass);
        terms = k + 1;
        last_mass = mass;
        if mass < trunc.tail_tol {
            break;
        }
    }
    let s: f64 = acc.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::NonFinite("damping series"));
    }
    acc.iter_mut().for_each(|a| *a /= s);
    Ok(RankVector {
        pi: acc,
        iterations: terms,
        final_residual: last_mass,
        converged: last_mass < trunc.tail_tol,
        residuals,
    })
}

/// Asymptotic contraction rate estimated by a least-squares fit of
/// `log r_k` against `k` over the second half of the history.
pub fn convergence_ratio(history: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = history
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0 && r.is_finite())
        .map(|(k, r)| (k as f64, r.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InvalidConfig(format!(
            "at least 5 positive residuals are needed, got {}",
            pts.len()
        )));
    }
    let tail = &pts[(pts.len() / 2).min(pts.len() - 5)..];
    let m = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / m;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx).exp())
}

/// Positional decimal with 17 significant digits.
pub fn format_score(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (16 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Node order by descending score, ties by ascending id.
pub fn ranking_order(pi: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pi.len()).collect();
    order.sort_by(|&a, &b| pi[b].total_cmp(&pi[a]).then(a.cmp(&b)));
    order
}

/// Writes `label<TAB>score` lines in ranking order.
pub fn write_rank_tsv<W: Write>(mut w: W, labels: &LabelMap, pi: &[f64]) -> Result<()> {
    for u in ranking_order(pi) {
        writeln!(w, "{}\t{}", labels.label(u), format_score(pi[u]))?;
    }
    Ok(())
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::testutil;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn step_preserves_mass(seed in any::<u64>(), n in 2usize..80, k in 1usize..8, strategy in 0u8..3) {
            let mut rng = testutil::rng(seed);
            let g = testutil::random_graph(&mut rng, n, 4, 0.3);
            let d = testutil::random_cover(&mut rng, n, k);
            let dangling = match strategy {
                0 => DanglingStrategy::StronglyPreferential,
                1 => {
                    let mut f = vec![0.0; n];
                    f[0] = 0.5;
                    f[n - 1] += 0.5;
                    DanglingStrategy::WeaklyPreferential(f)
                }
                _ => DanglingStrategy::NcdAware,
            };
            let cfg = RankingConfig { dangling, ..RankingConfig::default() };
            let model = RankingModel::new(&g, std::slice::from_ref(&d), &cfg).unwrap();
            let pi: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
            let s: f64 = pi.iter().sum();
            let pi: Vec<f64> = pi.iter().map(|x| x / s).collect();
            let mut out = vec![0.0; n];
            model.apply_into(&pi, &mut out, &mut Workspace::default());
            prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(out.iter().all(|&x| x >= 0.0));
        }
    }
}

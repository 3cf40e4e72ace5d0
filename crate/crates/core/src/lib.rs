//! Ranking of directed graphs with block-level structure.

pub mod decomposition;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod graph;
pub mod ncdlab;
pub mod ranking;
pub mod separable;

#[cfg(test)]
mod testutil;

pub use decomposition::{
    Decomposition, IndicatorMatrix, PrimitivityVerdict, ProximityFactors, SufficientCondition,
};
pub use error::{Error, Result};
pub use graph::{LabelMap, SparseGraph};
pub use ranking::{DanglingStrategy, PageRankConfig, RankVector, RankingConfig, TeleportSpec};

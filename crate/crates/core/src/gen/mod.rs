//! Benchmark generators.

mod dt;
mod lubm;

use thiserror::Error;

pub use dt::{deep_taxonomy, deep_taxonomy_split, dt_class, dt_individual};
pub use lubm::{synthetic_lubm, LubmConfig, LubmDataset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("depth must be at least 1, got {0}")]
    Depth(usize),
    #[error("need at least one existential rule")]
    NoExistentialRules,
}

//! Finite abelian groups via integer presentations.
//!
//! A group is always stored in invariant-factor form `Z/d_1 ⊕ ... ⊕ Z/d_k`
//! with `d_1 | d_2 | ... | d_k` and every `d_j ≥ 2`, so isomorphism testing
//! is equality. Subgroups are carried as generator lists; indices come from
//! stacking presentations and reading off a Smith normal form.

mod group;
mod matrix;

use thiserror::Error;

pub use group::{
    direct_sum, group_from_presentation, join_index, p_primary_part, q_symbol, FiniteAbelianGroup, QSymbolInput,
    SubgroupGens,
};
pub use matrix::{smith_normal_form, IntMatrix, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("presentation defines an infinite group (free rank {free_rank})")]
    InfiniteQuotient { free_rank: usize },
    #[error("invalid invariant factors: {0}")]
    InvalidFactors(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("subgroup generators live in a different ambient group")]
    AmbientMismatch,
}

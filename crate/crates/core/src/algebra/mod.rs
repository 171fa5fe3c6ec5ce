//! Finite abelian groups in invariant-factor form and exact integer
//! group-ring arithmetic over them.

mod factor;
mod group;
mod ring;

use thiserror::Error;

pub use factor::{factor, gcd, is_prime, partition_count, partitions, PrimeFactorization};
pub use group::{enumerate_abelian_groups, FiniteAbelianGroup, GroupElement};
pub use ring::{is_inverse_closed, is_inverse_closed_elements, GroupRingElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("invalid invariant factors: {0}")]
    InvalidInvariantFactors(String),
    #[error("integer overflow in group ring arithmetic")]
    Overflow,
}

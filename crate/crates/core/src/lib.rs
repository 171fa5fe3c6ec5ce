pub mod algebra;
pub mod geometry;
pub mod certificate;
pub mod sieve;
pub mod search;
pub mod cli;

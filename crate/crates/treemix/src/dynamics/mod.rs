//! Seeded samplers for the spin and random-cluster chains.
//!
//! Every step draws from [`Streams`](crate::rng::Streams) keyed by the step
//! counter, so two chains fed the same streams share their randomness edge by
//! edge and vertex by vertex.

pub mod blocks;
pub mod rc;
pub mod spin;

pub use blocks::BlockSpec;
pub use rc::{rc_edge_hb_step, rc_sw_step, single_bond_step};
pub use spin::{block_step, coupled_sw_step, glauber_step, sw_block_step, sw_step, BlockKind};

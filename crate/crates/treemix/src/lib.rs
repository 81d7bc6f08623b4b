//! Exact and Monte Carlo tools for Swendsen-Wang, heat-bath and
//! random-cluster dynamics on complete d-ary trees.

pub mod cli;
pub mod error;
pub mod dynamics;
pub mod exact;
pub mod experiments;
pub mod mixcond;
pub mod model;
pub mod rng;
pub mod slowmix;
pub mod tree;

pub use error::{Error, Result};

//! Potts, random-cluster and Edwards-Sokal measures.

pub mod boundary;
pub mod components;
pub mod params;
pub mod rc;
pub mod spin;
pub mod treedp;

pub use boundary::{RcBoundary, RcBoundarySpec, SpinBoundary, SpinBoundarySpec};
pub use components::{components, ComponentReport};
pub use params::{cut_edge_prob, Potts};
pub use rc::RcGraph;
pub use spin::{Clusters, MeasureTable, SpinModel};

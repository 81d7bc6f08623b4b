//! Spatial-mixing constants (GVM, VM, PVM, EM) and the variance and entropy
//! factorization audit.

pub mod audit;
pub mod em;
pub mod updown;
pub mod vm;

use serde::{Deserialize, Serialize};

pub use audit::{factorization_audit, AuditReport, Check};
pub use em::em_epsilon_estimate;
pub use updown::{random_joint, UpDown, UpDownReport};
pub use vm::{pvm_epsilon, vm_epsilon, PvmReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Gvm,
    Vm,
    Pvm,
    Em,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Mode {
    /// Every relevant outside configuration.
    Exhaustive,
    /// `budget` uniformly drawn `(site, eta)` cells.
    Sampled { budget: usize, seed: u64 },
}

/// Where the maximum was attained: vertex (VM, EM) or level (PVM), and the
/// outside spins that matter (1-based).
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub site: usize,
    pub eta: Vec<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub condition: Condition,
    pub ell: usize,
    pub epsilon: f64,
    /// `true` when `epsilon` only bounds the true constant from below.
    pub lower_bound: bool,
    pub mode: Mode,
    pub cells: usize,
    pub witness: Option<Witness>,
}

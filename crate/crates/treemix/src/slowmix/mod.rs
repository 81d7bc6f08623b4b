//! Slow mixing through boundary embeddings: subdivision, the wiring
//! embedding, gap transfer, bad-set conductance and the tail estimate.

pub mod chain;
pub mod conductance;
pub mod embed;
pub mod graph;
pub mod tail;
pub mod transfer;

pub use chain::{mhb_chain, mhb_step, transfer_p, two_edge_chain, RcBlockChain};
pub use conductance::{bad_set_conductance, ConductanceReport};
pub use embed::{embed_boundary, EmbedReport, Embedding, Gadget};
pub use graph::HostGraph;
pub use tail::{clopper_pearson, tail_monte_carlo, TailReport};
pub use transfer::{gap_transfer_check, GapTransferReport};

//! Experimental instruments: accuracy scores, perturbations, synthetic
//! fixtures, the exhaustive modularity oracle and the stability protocol.

mod f1;
mod oracle;
mod perturb;
mod planted;
mod protocol;

pub use f1::{f1_scores, AccuracyReport};
pub use oracle::{brute_force_best_partition, MAX_ORACLE_NODES};
pub use perturb::{perturb, remove_links};
pub use planted::{planted_partition, planted_sparse};
pub use protocol::{
    run_stability_protocol, write_trace_csv, PerturbationTrace, ProtocolConfig, StageResult,
};

//! Trace-based repair of Reed-Solomon codes.
//!
//! A symbol of `F = GF(p^{mt})` is rebuilt from one sub-symbol of
//! `B = GF(p^m)` per helper node. [`single_repair`] handles one erasure;
//! [`dual_erasure`] handles two erasures with a collaboration phase between
//! the two replacement nodes. [`cluster_sim`] drives both through an
//! in-process cluster with a message log and bandwidth ledger.

pub mod cluster_sim;
pub mod dual_erasure;
pub mod error;
pub mod field;
mod linalg;
pub mod report;
pub mod rs_code;
pub mod single_repair;

pub use cluster_sim::{Cluster, Event, PayloadKind, Phase, Record};
pub use dual_erasure::{
    build_dual_plan, build_dual_plan_with_bases, run_depth_one, run_depth_two, DualPlan,
    DualScheme, RnState, Role,
};
pub use error::{Error, Result};
pub use field::{make_tower, BBasis, Belem, Felem, TowerParams};
pub use report::{BandwidthReport, RnBandwidth, Scheme};
pub use rs_code::{check_eval, expand_check, CheckSpec, CodeParams, Codeword};
pub use single_repair::{build_single_plan, node_repair_trace, recover_single, SinglePlan};

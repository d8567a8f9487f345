//! Correctness harness: sequential reference oracle, quiescent structural
//! checks, recorded-history linearizability checking, and the concurrent
//! stress driver that feeds them.

mod history;
mod linear;
mod oracle;
mod structure;
mod stress;

pub use history::{parse_history, serialize_history, HistoryEvent, HistoryParseError, Op, Phase};
pub use linear::{check_linearizable, CheckError, MAX_CHECK_OPS};
pub use oracle::oracle_replay;
pub use structure::{check_structure, StructureViolation};
pub use stress::{stress, StressConfig, StressOutcome};

//! Pairwise demographic-parity audits, gaze analysis and saliency statistics.

mod attach;
mod distribution;
mod gaze;
mod pairwise;
mod stats;
pub mod synthetic;

pub use attach::{attach_horizontal, run_pairwise_trial, run_pairwise_trial_with, Favored, TrialOutcome, VerticalAlign};
pub use distribution::{subgroup_saliency_stats, SubgroupSaliencyStats};
pub use gaze::{gaze_analysis, GazeAnalysisConfig, GazeGroupReport, GazeImage, GazeReport};
pub use pairwise::{
    audit_pair, audit_pair_no_attach, pairwise_wins, run_audit, AuditOutcome, AuditReport, AuditVariant,
    PairAuditConfig, TrialRecord,
};
pub use stats::{confidence_interval, demographic_parity_verdict, z_for_level, CiMethod, Ecdf, ParityVerdict};

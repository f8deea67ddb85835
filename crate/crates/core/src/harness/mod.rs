//! Instance generation and randomized campaigns.

pub mod campaign;
pub mod generators;

pub use campaign::{
    evaluate, gen_instance, run_campaign, summarize, CampaignConfig, CheckKind, CheckSummary, Instance, Report,
    ToleranceOverrides, SCHEMA_VERSION,
};
pub use generators::{gen_hamiltonian, gen_insertions, gen_positive, HamiltonianKind};

//! Experiment configs, dispatch and reports (wired up in `config`/`report`).

mod config;
mod report;
mod runner;

pub use config::{
    BatchConfig, BatchEntry, BodyConfig, ExperimentConfig, ExperimentKind, NormConfig, Tolerances,
};
pub use report::{
    CertificateRecord, ExactValue, OracleRecord, RenormRecord, RunReport, Verdict,
};
pub use runner::{run, run_batch, verify_report, write_output, RunOutput};

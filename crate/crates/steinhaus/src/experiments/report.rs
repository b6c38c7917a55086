//! Self-contained run reports: everything needed to re-verify the embedded
//! certificates is in the report itself.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::describe::{PatchDesc, PathDesc};
use crate::error::Result;
use crate::interval1d::RationalValue;
use crate::paths::{VerifyReport, WitnessCertificate};

use super::config::ExperimentConfig;

pub const REPORT_SCHEMA: &str = "steinhaus-report/1";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub name: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenormRecord {
    pub translation: Vec<f64>,
    pub delta: f64,
    pub eps_inner: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub name: String,
    /// The patch the construction ran on (the gauge-body patch when the
    /// decision renormed).
    pub patch: PatchDesc,
    pub path: PathDesc,
    pub certificate: WitnessCertificate,
    pub verify: VerifyReport,
    pub ball_center: Vec<f64>,
    pub ball_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renorm: Option<RenormRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleRecord {
    pub name: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_h: Option<f64>,
    pub resolutions: Vec<f64>,
    pub fatten: f64,
    pub measures: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactValue {
    pub name: String,
    pub value: RationalValue,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub schema: String,
    pub kind: String,
    /// Echo of the configuration; re-verification rebuilds inputs from it.
    pub config: ExperimentConfig,
    pub config_digest: String,
    /// Overall outcome: every verdict as expected, every certificate verified.
    pub ok: bool,
    pub verdicts: Vec<Verdict>,
    pub certificates: Vec<CertificateRecord>,
    pub oracle: Vec<OracleRecord>,
    pub exact: Vec<ExactValue>,
    /// Relative names of the artifact files written next to the report.
    pub artifacts: Vec<String>,
}

pub fn config_digest(config: &ExperimentConfig) -> Result<String> {
    let json = serde_json::to_string(config)?;
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

impl RunReport {
    pub fn new(config: &ExperimentConfig) -> Result<RunReport> {
        Ok(RunReport {
            schema: REPORT_SCHEMA.into(),
            kind: config.kind.as_str().into(),
            config: config.clone(),
            config_digest: config_digest(config)?,
            ok: true,
            verdicts: Vec::new(),
            certificates: Vec::new(),
            oracle: Vec::new(),
            exact: Vec::new(),
            artifacts: Vec::new(),
        })
    }

    pub fn verdict(&mut self, name: &str, outcome: &str, value: Option<serde_json::Value>) {
        self.verdicts.push(Verdict {
            name: name.into(),
            outcome: outcome.into(),
            value,
        });
    }

    pub fn fail(&mut self, name: &str, detail: String) {
        self.ok = false;
        self.verdicts.push(Verdict {
            name: name.into(),
            outcome: "error".into(),
            value: Some(serde_json::Value::String(detail)),
        });
    }

    /// Deterministic serialization: pretty JSON plus a trailing newline.
    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }
}

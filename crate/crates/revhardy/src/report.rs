//! Machine-readable verdict envelopes.
//!
//! Every front-end run produces one [`ReportEnvelope`]: configuration echo,
//! derived exponents, the result payload, seeds, warnings and a verdict.
//! Serialisation is deterministic — struct fields keep declaration order and
//! payloads avoid hash maps — so identical runs produce byte-identical JSON
//! outside the `timing` section, which is kept apart precisely so it can be
//! stripped before comparison.

use serde::{Deserialize, Serialize};

use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Overall outcome of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every tested consequence of the inequality held within tolerance.
    Verified,
    /// Some tested ratio fell below the certified lower constant.
    Violated,
    /// A hypothesis gate failed (for example a non-monotone profile); the
    /// theorem draws no conclusion and neither do we.
    Inconclusive,
    /// The left side is provably infinite in this regime, so the reverse
    /// inequality holds with no content to measure.
    TriviallyHolds,
    /// The parameters violate the theorem hypotheses.
    InvalidParams,
}

impl Verdict {
    /// Process exit code contract: 0 verified / trivially holds, 1 violated,
    /// 2 invalid parameters, 3 numerical failure or no conclusion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Verified | Verdict::TriviallyHolds => 0,
            Verdict::Violated => 1,
            Verdict::InvalidParams => 2,
            Verdict::Inconclusive => 3,
        }
    }
}

/// Derived quantities echoed for the reader.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct DerivedExponents {
    pub p_conj: Option<f64>,
    pub q_conj: Option<f64>,
    pub lambda: Option<f64>,
}

/// Wall-clock accounting, kept in its own section so reports can be compared
/// net of timing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    pub elapsed_ms: u64,
}

/// The envelope written by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Resolved configuration echo.
    pub config: serde_json::Value,
    pub derived: DerivedExponents,
    /// Command-specific result payload.
    pub results: serde_json::Value,
    pub seeds: Vec<u64>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

impl ReportEnvelope {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            derived: DerivedExponents::default(),
            results: serde_json::Value::Null,
            seeds: Vec::new(),
            verdict: Verdict::Inconclusive,
            warnings: Vec::new(),
            timing: Timing::default(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the timing section nulled out; two runs of the same seeded
    /// configuration must agree byte-for-byte on this view.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut clone = self.clone();
        clone.timing = Timing::default();
        Ok(serde_json::to_string_pretty(&clone)?)
    }
}

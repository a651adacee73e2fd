use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::crystal::DatumFile;
use crate::field::FieldDescriptor;
use crate::prepmod::ModuleDump;
use crate::rootsys::GraphFile;

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    /// Passed, but a randomized step could in principle have hidden a
    /// failure; `log2_bound` bounds that probability per instance.
    ProbabilisticPass { log2_bound: f64, retries: usize },
    /// Nothing to check.
    Vacuous { warning: String },
}

impl Outcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::Fail)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::ProbabilisticPass { .. } => "probabilistic-pass",
            Outcome::Vacuous { .. } => "vacuous",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Everything needed to rerun a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub graph: GraphFile,
    pub field: FieldDescriptor,
    pub master_seed: u64,
    pub job_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxlen: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<bool>,
}

/// A counterexample: the item seed and inputs reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub seed: u64,
    pub inputs: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modules: Vec<ModuleDump>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub data: Vec<DatumFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub statement: String,
    pub params: CheckParams,
    pub outcome: Outcome,
    pub stats: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// Failure messages kept per report.
pub const MAX_FAILURE_MESSAGES: usize = 20;

impl CheckReport {
    pub fn stat(&mut self, key: &str, v: impl Into<Value>) {
        self.stats.insert(key.to_string(), v.into());
    }
}

/// Writes the JSON array of reports.
pub fn write_json<W: Write>(out: W, reports: &[CheckReport]) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, reports)
}

/// Writes the `id,outcome,elapsed_ms` summary.
pub fn write_csv<W: Write>(out: W, reports: &[CheckReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "outcome", "elapsed_ms"])?;
    for r in reports {
        let t = r.elapsed_ms.map(|t| t.to_string()).unwrap_or_default();
        w.write_record([r.id.as_str(), r.outcome.label(), t.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

/// True iff no report failed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| !r.outcome.is_failure())
}

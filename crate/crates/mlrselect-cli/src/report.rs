//! Output file structures. Every report embeds the run manifest, and all
//! content is a pure function of the manifest, so re-running a command
//! reproduces its output byte for byte.

use serde::Serialize;

use mlrselect::{ConditionValues, MethodVerdicts, NoncentralityLimit};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub inputs: Vec<String>,
    pub methods: Vec<String>,
    pub rule: String,
    pub seed: Option<u64>,
    pub out: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            methods: Vec::new(),
            rule: "-".to_string(),
            seed: None,
            out: String::new(),
        }
    }
}

/// Per-method entry of a `select` report.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum SelectMethodReport {
    Koo {
        method: String,
        rule: String,
        threshold: f64,
        selected: Vec<usize>,
        stats: Vec<f64>,
    },
    Exhaustive {
        method: String,
        selected: Vec<usize>,
        value: f64,
        subsets_evaluated: usize,
    },
}

#[derive(Debug, Serialize)]
pub struct SelectReport {
    pub manifest: RunManifest,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub alpha_k: f64,
    pub c_n: f64,
    pub methods: Vec<SelectMethodReport>,
}

#[derive(Debug, Serialize)]
pub struct WorstCaseEntry {
    #[serde(flatten)]
    pub limit: NoncentralityLimit,
    pub v3: f64,
    pub v4: f64,
}

#[derive(Debug, Serialize)]
pub struct DiagnoseReport {
    pub manifest: RunManifest,
    pub alpha: f64,
    pub c: f64,
    pub phi: f64,
    pub psi: f64,
    #[serde(flatten)]
    pub conditions: ConditionValues,
    pub worst_case: Vec<WorstCaseEntry>,
    pub verdicts: MethodVerdicts,
}

//! Configuration parsing, report emission and the pieces of the `colloc`
//! command-line tool.

pub mod config;
pub mod report;
pub mod trials;

use std::io::Write;

use thiserror::Error;

pub use config::{document_json, parse_config, parse_json, ConfigDocument, ConfigError};
pub use report::{analyze, emit_report, ChshSection, Provenance, Report, VerdictEntry};
pub use trials::{run_logged, ShellIoError, CSV_HEADER};

use crate::bell::TrialSetup;
use crate::collapse::ModelPreset;
use crate::error::{BellError, DesignError, ModelError};

/// Any failure of a CLI command, with its process exit code.
#[derive(Debug, Error)]
pub enum ShellError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Design(DesignError),
    #[error("{0}")]
    Bell(BellError),
}

impl From<DesignError> for ShellError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::Model(m) => ShellError::Model(m),
            other => ShellError::Design(other),
        }
    }
}

impl From<BellError> for ShellError {
    fn from(e: BellError) -> Self {
        match e {
            BellError::Design(d) => d.into(),
            other => ShellError::Bell(other),
        }
    }
}

impl From<ShellIoError> for ShellError {
    fn from(e: ShellIoError) -> Self {
        match e {
            ShellIoError::Bell(b) => b.into(),
            other => ShellError::Io {
                path: "trial log".into(),
                msg: other.to_string(),
            },
        }
    }
}

impl ShellError {
    /// 1 usage, 2 configuration or I/O, 3 model.
    pub fn exit_code(&self) -> i32 {
        match self {
            ShellError::Usage(_) => 1,
            ShellError::Config(_) | ShellError::Io { .. } => 2,
            ShellError::Design(DesignError::Invalid { .. }) => 2,
            ShellError::Model(_) | ShellError::Design(_) | ShellError::Bell(_) => 3,
        }
    }
}

/// Runs the trials of `doc` under one model and returns the report with its
/// CHSH section, writing the trial log to `csv` when given.
pub fn simulate<W: Write>(
    doc: &ConfigDocument,
    preset: ModelPreset,
    provenance: Provenance,
    csv: Option<W>,
) -> Result<Report, ShellError> {
    let model = doc.collapse_model(preset);
    let setup = TrialSetup::from_config(&doc.experiment, model, doc.collapse_timing)?;
    let result = run_logged(&setup, doc.engine, doc.trials, doc.seed, csv)?;
    let mut single = doc.clone();
    single.models = if doc.models.is_empty() {
        Vec::new()
    } else {
        vec![preset]
    };
    let mut report = analyze(&single, provenance)?;
    report.chsh = Some(ChshSection {
        engine: doc.engine,
        model: report
            .verdicts
            .first()
            .map_or_else(|| preset.name().into(), |v| v.label.clone()),
        timing: doc.collapse_timing,
        result,
    });
    Ok(report)
}

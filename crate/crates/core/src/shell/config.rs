//! JSON configuration documents.
//!
//! A document names a built-in scenario or spells out a full layout under
//! `experiment`, and adds the run parameters. Numbers are bare SI values.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bell::{CollapseTiming, Engine};
use crate::collapse::{CollapseModel, GrwConvention, ModelPreset};
use crate::design::scenarios::{space_human, ScenarioId, HUMAN_PERCEPTION_S, SPACE_HUMAN_ALTITUDE_M};
use crate::design::ExperimentConfig;
use crate::error::DesignError;

pub const DEFAULT_TRIALS: u64 = 100_000;

/// Failure to turn config text into a document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
}

impl ConfigError {
    fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        ConfigError::Schema {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// Key path of a schema error.
    pub fn path(&self) -> Option<&str> {
        match self {
            ConfigError::Schema { path, .. } => Some(path),
            ConfigError::Syntax { .. } => None,
        }
    }
}

/// A validated configuration with all defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub experiment: ExperimentConfig<f64>,
    #[serde(rename = "model", skip_serializing_if = "Vec::is_empty")]
    pub models: Vec<ModelPreset>,
    pub engine: Engine,
    pub trials: u64,
    pub seed: u64,
    pub safety_k: f64,
    pub collapse_timing: CollapseTiming,
    pub grw_displacement: GrwConvention,
}

impl ConfigDocument {
    /// Document for a built-in scenario with default run parameters.
    pub fn from_scenario(id: &ScenarioId, models: Vec<ModelPreset>) -> Option<Self> {
        Some(Self::with_defaults(Some(id.name()), id.builtin()?, models))
    }

    fn with_defaults(name: Option<String>, experiment: ExperimentConfig<f64>, models: Vec<ModelPreset>) -> Self {
        Self {
            name,
            experiment,
            models,
            engine: Engine::CausalCollapse,
            trials: DEFAULT_TRIALS,
            seed: 0,
            safety_k: 1.0,
            collapse_timing: CollapseTiming::Exponential,
            grw_displacement: GrwConvention::Full,
        }
    }

    pub fn collapse_model(&self, preset: ModelPreset) -> CollapseModel {
        CollapseModel {
            preset,
            grw_displacement: self.grw_displacement,
        }
    }

    /// Models to evaluate. Layouts with only human observers do not depend
    /// on the model, so one placeholder stands in when none is given.
    pub fn effective_models(&self) -> Vec<ModelPreset> {
        if self.models.is_empty() {
            vec![ModelPreset::DpDiosi]
        } else {
            self.models.clone()
        }
    }

    /// Checks run parameters and the layout.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.safety_k.is_finite() && self.safety_k >= 0.0) {
            return Err(ConfigError::schema("safety_k", "must be a non-negative number"));
        }
        if self.trials == 0 {
            return Err(ConfigError::schema("trials", "must be at least 1"));
        }
        if self.models.is_empty() && self.experiment.has_device_observer() {
            return Err(ConfigError::schema(
                "model",
                "missing key: a model is required for device observers",
            ));
        }
        self.experiment.validate().map_err(|e| match e {
            DesignError::Invalid { path, msg } => ConfigError::schema(format!("experiment.{path}"), msg),
            other => ConfigError::schema("experiment", other.to_string()),
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    scenario: Option<String>,
    experiment: Option<ExperimentConfig<f64>>,
    observer_altitude_m: Option<f64>,
    perception_s: Option<f64>,
    model: Option<Value>,
    engine: Option<Engine>,
    trials: Option<u64>,
    seed: Option<u64>,
    safety_k: Option<f64>,
    collapse_timing: Option<CollapseTiming>,
    grw_displacement: Option<GrwConvention>,
}

/// Parses and validates a JSON config.
///
/// Syntax errors carry a line and column, schema errors the key path.
pub fn parse_config(text: &[u8]) -> Result<ConfigDocument, ConfigError> {
    let raw: RawConfig = parse_json(text)?;
    let doc = expand(raw)?;
    doc.validate()?;
    Ok(doc)
}

/// Deserializes one JSON document with positioned syntax errors and
/// key-path schema errors.
pub fn parse_json<T: DeserializeOwned>(text: &[u8]) -> Result<T, ConfigError> {
    let mut de = serde_json::Deserializer::from_slice(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        classify(e.into_inner(), path)
    })?;
    de.end().map_err(|e| classify(e, String::new()))?;
    Ok(value)
}

fn classify(e: serde_json::Error, path: String) -> ConfigError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Io | Category::Syntax | Category::Eof => ConfigError::Syntax {
            line: e.line(),
            column: e.column(),
            msg: strip_position(&e.to_string()),
        },
        Category::Data => {
            let mut msg = strip_position(&e.to_string());
            if msg.starts_with("invalid type: string") && msg.contains("f64") {
                msg.push_str("; numbers are bare SI values, unit strings are not accepted");
            }
            let path = if path.is_empty() || path == "." {
                "<root>".to_string()
            } else {
                path
            };
            ConfigError::schema(path, msg)
        }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn parse_models(v: &Value) -> Result<Vec<ModelPreset>, ConfigError> {
    let one = |v: &Value, path: String| -> Result<ModelPreset, ConfigError> {
        match v {
            Value::String(s) => s.parse().map_err(|m: String| ConfigError::schema(path, m)),
            _ => Err(ConfigError::schema(path, "expected a model name string")),
        }
    };
    match v {
        Value::Array(items) => {
            let models = items
                .iter()
                .enumerate()
                .map(|(i, x)| one(x, format!("model[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            if models.is_empty() {
                return Err(ConfigError::schema("model", "at least one model is required"));
            }
            Ok(models)
        }
        other => Ok(vec![one(other, "model".into())?]),
    }
}

fn expand(raw: RawConfig) -> Result<ConfigDocument, ConfigError> {
    let models = raw.model.as_ref().map(parse_models).transpose()?.unwrap_or_default();
    let (name, experiment) = match (raw.scenario, raw.experiment) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::schema("experiment", "cannot be combined with scenario"));
        }
        (None, None) => {
            return Err(ConfigError::schema(
                "scenario",
                "missing key: give a scenario name or an experiment",
            ));
        }
        (Some(s), None) => {
            let id = match s.parse::<ScenarioId>() {
                Ok(ScenarioId::Custom(_)) | Err(_) => {
                    return Err(ConfigError::schema(
                        "scenario",
                        format!("unknown scenario '{s}' (expected salart2008, antipodal_terrestrial or space_human)"),
                    ));
                }
                Ok(id) => id,
            };
            let experiment = if id == ScenarioId::SpaceHuman {
                let altitude = raw.observer_altitude_m.unwrap_or(SPACE_HUMAN_ALTITUDE_M);
                let perception = raw.perception_s.unwrap_or(HUMAN_PERCEPTION_S);
                if !(altitude.is_finite() && altitude >= 0.0) {
                    return Err(ConfigError::schema("observer_altitude_m", "must be non-negative"));
                }
                if !(perception.is_finite() && perception > 0.0) {
                    return Err(ConfigError::schema("perception_s", "must be positive"));
                }
                space_human(altitude, perception)
            } else {
                for (key, v) in [
                    ("observer_altitude_m", raw.observer_altitude_m),
                    ("perception_s", raw.perception_s),
                ] {
                    if v.is_some() {
                        return Err(ConfigError::schema(key, "only valid with scenario space_human"));
                    }
                }
                id.builtin().expect("built-in scenario")
            };
            (raw.name.or(Some(id.name())), experiment)
        }
        (None, Some(exp)) => {
            for (key, v) in [
                ("observer_altitude_m", raw.observer_altitude_m),
                ("perception_s", raw.perception_s),
            ] {
                if v.is_some() {
                    return Err(ConfigError::schema(key, "only valid with scenario space_human"));
                }
            }
            (raw.name, exp)
        }
    };
    let mut doc = ConfigDocument::with_defaults(name, experiment, models);
    if let Some(e) = raw.engine {
        doc.engine = e;
    }
    if let Some(n) = raw.trials {
        doc.trials = n;
    }
    if let Some(s) = raw.seed {
        doc.seed = s;
    }
    if let Some(k) = raw.safety_k {
        doc.safety_k = k;
    }
    if let Some(t) = raw.collapse_timing {
        doc.collapse_timing = t;
    }
    if let Some(g) = raw.grw_displacement {
        doc.grw_displacement = g;
    }
    Ok(doc)
}

/// Full JSON form of a document; parsing it gives the same document back.
pub fn document_json(doc: &ConfigDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

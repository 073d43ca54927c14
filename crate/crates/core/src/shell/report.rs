//! Analysis reports and their canonical JSON form.
//!
//! Keys are sorted, floats are written in scientific notation with six
//! significant digits and every numeric key ends in its unit: `_s`, `_m`,
//! `_j`, `_count`, `_prob` or `_ratio` for dimensionless values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::config::ConfigDocument;
use super::ShellError;
use crate::bell::{ChshResult, CollapseTiming, Engine};
use crate::collapse::{
    estimate_for_apparatus, ApparatusSpec, GrwConvention, ModelPreset, ModelTag, SALART_ATTACHED_MASS_KG,
};
use crate::design::{
    amplifier_input_event, discrimination_for, margin_factor, max_collapse_window, verdict, Discrimination,
    LoopholeVerdict, Observer,
};
use crate::error::DesignError;
use crate::spacetime::StationWindow;

/// Figure commonly quoted for the CSL collapse time of the 2008 mirror, s.
const CSL_QUOTED_TAU_S: f64 = 1e-8;

/// One model's verdict with its margin and discrimination summary.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictEntry {
    /// Preset name, or `perception` when both wings are human.
    pub label: String,
    pub verdict: LoopholeVerdict<f64>,
    /// `None` when the essential verdict is open.
    pub margin_factor: Option<f64>,
    pub discrimination: Discrimination<f64>,
}

/// Simulation section of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSection {
    pub engine: Engine,
    pub model: String,
    pub timing: CollapseTiming,
    pub result: ChshResult<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Hex SHA-256 of the input document.
    pub input_sha256: String,
    pub seed: u64,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(input: &[u8], seed: u64) -> Self {
        Self {
            input_sha256: hex::encode(Sha256::digest(input)),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: Option<String>,
    pub safety_k: f64,
    pub max_collapse_window: f64,
    /// Left minus right amplifier input time.
    pub input_offset: f64,
    pub verdicts: Vec<VerdictEntry>,
    pub notes: Vec<String>,
    pub chsh: Option<ChshSection>,
    pub provenance: Provenance,
}

/// Verdicts, margins and notes for every model of `doc`.
pub fn analyze(doc: &ConfigDocument, provenance: Provenance) -> Result<Report, ShellError> {
    let exp = &doc.experiment;
    let k = &exp.constants;
    let mut verdicts = Vec::new();
    for preset in doc.effective_models() {
        let model = doc.collapse_model(preset);
        let v = verdict(exp, model, doc.safety_k)?;
        let margin = match margin_factor(exp, model, doc.safety_k) {
            Ok(m) => Some(m),
            Err(DesignError::VerdictOpen { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let label = if v.tau_models == (ModelTag::Perception, ModelTag::Perception) {
            ModelTag::Perception.name().to_string()
        } else {
            preset.name().to_string()
        };
        verdicts.push(VerdictEntry {
            label,
            margin_factor: margin,
            discrimination: discrimination_for(&exp.settings, v.essential_closed),
            verdict: v,
        });
    }
    let l = amplifier_input_event(&exp.left, k);
    let r = amplifier_input_event(&exp.right, k);
    Ok(Report {
        scenario: doc.name.clone(),
        safety_k: doc.safety_k,
        max_collapse_window: max_collapse_window(exp),
        input_offset: l.t - r.t,
        verdicts,
        notes: notes(doc),
        chsh: None,
        provenance,
    })
}

fn notes(doc: &ConfigDocument) -> Vec<String> {
    let exp = &doc.experiment;
    let k = &exp.constants;
    let mut apparatus: Vec<ApparatusSpec<f64>> = Vec::new();
    let mut human = false;
    for w in [&exp.left, &exp.right] {
        match &w.observer {
            Observer::Device(a) if !apparatus.contains(a) => apparatus.push(*a),
            Observer::Device(_) => {}
            Observer::Human { .. } => human = true,
        }
    }
    let mut out = Vec::new();
    for preset in &doc.models {
        let model = doc.collapse_model(*preset);
        for a in &apparatus {
            let Ok(est) = estimate_for_apparatus(model, a, k) else {
                continue;
            };
            let salart = a.attached_mass == SALART_ATTACHED_MASS_KG;
            match preset {
                ModelPreset::CslStandard | ModelPreset::CslLow => {
                    let mut s = format!(
                        "{}: {:.3e} nucleons in the displaced sliver over a {:.3e} m2 face give tau = {:.3e} s",
                        preset.name(),
                        est.nucleons.unwrap_or(f64::NAN),
                        est.area.unwrap_or(f64::NAN),
                        est.estimate.tau,
                    );
                    if salart && *preset == ModelPreset::CslStandard {
                        let _ = write!(
                            s,
                            "; the value usually quoted for this apparatus is about {CSL_QUOTED_TAU_S:.0e} s, \
                             and the nucleon count and area behind it are not stated, so the two are reported \
                             side by side"
                        );
                    }
                    out.push(s);
                }
                ModelPreset::GrwStandard => {
                    let mut s = format!(
                        "{}: {:.3e} nucleons displaced by {:.3e} m give tau = {:.3e} s",
                        preset.name(),
                        est.nucleons.unwrap_or(f64::NAN),
                        est.displacement.unwrap_or(f64::NAN),
                        est.estimate.tau,
                    );
                    if salart {
                        s.push_str(
                            "; the actuator mass of this apparatus is not measured but backed out so that the \
                             full-displacement estimate is 2e-4 s",
                        );
                    }
                    if doc.grw_displacement == GrwConvention::Half {
                        s.push_str("; mean displacement d/2 used");
                    }
                    out.push(s);
                }
                ModelPreset::DpDiosi | ModelPreset::DpPenrose => {}
            }
        }
    }
    if human {
        out.push("human observers: tau is the perception time and does not depend on the collapse model".into());
    }
    out
}

/// Canonical JSON value: like `serde_json::Value` but with explicit
/// integer/float distinction and non-finite floats.
#[derive(Debug, Clone, PartialEq)]
pub enum Canon {
    Null,
    Bool(bool),
    Int(i128),
    Float(f64),
    Str(String),
    Array(Vec<Canon>),
    Object(BTreeMap<String, Canon>),
}

impl Canon {
    fn obj<const N: usize>(entries: [(&str, Canon); N]) -> Canon {
        Canon::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    fn floats(xs: &[f64]) -> Canon {
        Canon::Array(xs.iter().map(|&x| Canon::Float(x)).collect())
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
        match self {
            Canon::Null => out.push_str("null"),
            Canon::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Canon::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Canon::Float(x) => out.push_str(&format_float(*x)),
            Canon::Str(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
            Canon::Array(items) if items.is_empty() => out.push_str("[]"),
            Canon::Array(items) if items.iter().all(Canon::is_scalar) => {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    v.write(out, indent);
                }
                out.push(']');
            }
            Canon::Array(items) => {
                out.push_str("[\n");
                for (i, v) in items.iter().enumerate() {
                    pad(out, indent + 2);
                    v.write(out, indent + 2);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
            Canon::Object(map) if map.is_empty() => out.push_str("{}"),
            Canon::Object(map) => {
                out.push_str("{\n");
                for (i, (k, v)) in map.iter().enumerate() {
                    pad(out, indent + 2);
                    out.push_str(&serde_json::to_string(k).expect("key serializes"));
                    out.push_str(": ");
                    v.write(out, indent + 2);
                    out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push('}');
            }
        }
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Canon::Array(_) | Canon::Object(_))
    }

    /// Canonical text, newline-terminated.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }
}

/// Six significant digits in scientific notation; non-finite values become
/// the strings `"inf"`, `"-inf"` and `"nan"`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".into()
    } else if x.is_infinite() {
        if x > 0.0 { "\"inf\"" } else { "\"-inf\"" }.into()
    } else if x == 0.0 {
        "0.00000e0".into()
    } else {
        format!("{x:.5e}")
    }
}

fn window(w: &StationWindow<f64>) -> Canon {
    Canon::obj([
        ("pos_m", Canon::floats(&w.pos)),
        ("t_start_s", Canon::Float(w.t_start)),
        ("t_end_s", Canon::Float(w.t_end)),
    ])
}

fn verdict_entry(e: &VerdictEntry) -> Canon {
    let v = &e.verdict;
    let d = &e.discrimination;
    Canon::obj([
        ("model", Canon::Str(e.label.clone())),
        ("essential_closed", Canon::Bool(v.essential_closed)),
        ("extended_closed", Canon::Bool(v.extended_closed)),
        ("essential_margin_s", Canon::Float(v.essential_margin)),
        ("extended_margin_s", Canon::Float(v.extended_margin)),
        ("tau_left_s", Canon::Float(v.tau_values.0)),
        ("tau_right_s", Canon::Float(v.tau_values.1)),
        ("window_left", window(&v.collapse_windows.0)),
        ("window_right", window(&v.collapse_windows.1)),
        ("margin_factor_ratio", e.margin_factor.map_or(Canon::Null, Canon::Float)),
        (
            "discrimination",
            Canon::obj([
                ("discriminates", Canon::Bool(d.discriminates())),
                ("predicted_s_qm_ratio", Canon::Float(d.predicted_s_qm)),
                ("predicted_s_causal_ratio", Canon::Float(d.predicted_s_causal)),
                ("gap_ratio", Canon::Float(d.gap)),
            ]),
        ),
    ])
}

fn chsh_section(c: &ChshSection) -> Canon {
    let r = &c.result;
    Canon::obj([
        ("engine", Canon::Str(c.engine.name().into())),
        ("model", Canon::Str(c.model.clone())),
        (
            "collapse_timing",
            Canon::Str(
                match c.timing {
                    CollapseTiming::Exponential => "exponential",
                    CollapseTiming::Deterministic => "deterministic",
                }
                .into(),
            ),
        ),
        ("trials_count", Canon::Int(r.n.into())),
        ("s_hat_ratio", Canon::Float(r.s_hat)),
        ("s_abs_ratio", Canon::Float(r.s_abs)),
        ("std_err_ratio", Canon::Float(r.std_err)),
        (
            "correlations_ratio",
            Canon::Array(r.correlations.iter().map(|row| Canon::floats(row)).collect()),
        ),
        (
            "pair_counts_count",
            Canon::Array(
                r.pair_counts
                    .iter()
                    .map(|row| Canon::Array(row.iter().map(|&n| Canon::Int(n.into())).collect()))
                    .collect(),
            ),
        ),
        ("game_score_ratio", Canon::Float(r.game_score)),
        ("p_bound_prob", Canon::Float(r.p_bound)),
        ("ln_p_bound_ratio", Canon::Float(r.ln_p_bound)),
        ("spacelike_fraction_prob", Canon::Float(r.spacelike_fraction)),
    ])
}

/// Canonical tree of a report.
pub fn report_canon(r: &Report) -> Canon {
    let mut top = BTreeMap::new();
    top.insert(
        "scenario".to_string(),
        r.scenario.clone().map_or(Canon::Null, Canon::Str),
    );
    top.insert("safety_k_ratio".into(), Canon::Float(r.safety_k));
    top.insert("max_collapse_window_s".into(), Canon::Float(r.max_collapse_window));
    top.insert("amplifier_input_offset_s".into(), Canon::Float(r.input_offset));
    top.insert(
        "verdicts".into(),
        Canon::Array(r.verdicts.iter().map(verdict_entry).collect()),
    );
    top.insert(
        "notes".into(),
        Canon::Array(r.notes.iter().cloned().map(Canon::Str).collect()),
    );
    if let Some(c) = &r.chsh {
        top.insert("chsh".into(), chsh_section(c));
    }
    top.insert(
        "provenance".into(),
        Canon::obj([
            ("input_sha256", Canon::Str(r.provenance.input_sha256.clone())),
            ("seed", Canon::Int(r.provenance.seed.into())),
            ("tool_version", Canon::Str(r.provenance.tool_version.clone())),
        ]),
    );
    Canon::Object(top)
}

/// Canonical JSON bytes of a report; identical reports give identical bytes.
pub fn emit_report(r: &Report) -> Vec<u8> {
    report_canon(r).to_text().into_bytes()
}

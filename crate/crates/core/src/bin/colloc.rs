//! `colloc`: collapse-locality analysis and Bell-trial simulation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use collapse_locality::bell::Engine;
use collapse_locality::collapse::{estimate_for_apparatus, ApparatusSpec, CollapseModel, ModelPreset};
use collapse_locality::design::scenarios::ScenarioId;
use collapse_locality::shell::report::Canon;
use collapse_locality::shell::{
    analyze, document_json, emit_report, parse_config, parse_json, simulate, ConfigDocument, Provenance, ShellError,
};
use collapse_locality::spacetime::PhysicalConstants;

#[derive(Parser)]
#[command(
    name = "colloc",
    version,
    about = "Collapse-locality verdicts and Bell-trial simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print loophole verdicts, margins and notes for a layout.
    Analyze {
        /// Config file, or a built-in scenario name.
        config: String,
        /// Collapse model preset; repeatable, `all` selects every preset.
        #[arg(long = "model")]
        models: Vec<String>,
        #[arg(long)]
        safety_k: Option<f64>,
    },
    /// Simulate Bell trials and print the CHSH statistics.
    Simulate {
        /// Config file, or a built-in scenario name.
        config: String,
        #[arg(long)]
        engine: Option<Engine>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write one CSV row per trial to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        /// `exponential` or `deterministic` collapse timing for devices.
        #[arg(long)]
        timing: Option<String>,
        #[arg(long)]
        safety_k: Option<f64>,
    },
    /// Print collapse-time estimates for an apparatus.
    CollapseTime {
        /// Collapse model preset; repeatable, defaults to all presets.
        #[arg(long = "model")]
        models: Vec<String>,
        /// Apparatus JSON file, or `salart2008`.
        #[arg(long)]
        apparatus: String,
    },
    /// List built-in scenarios or print one as a full config document.
    Scenarios {
        #[command(subcommand)]
        action: Option<ScenarioAction>,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    List,
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("colloc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), ShellError> {
    match command {
        Command::Analyze {
            config,
            models,
            safety_k,
        } => {
            let mut overrides = serde_json::Map::new();
            if !models.is_empty() {
                overrides.insert("model".into(), models_value(&models)?);
            }
            if let Some(k) = safety_k {
                overrides.insert("safety_k".into(), json!(k));
            }
            let doc = load(&config, overrides)?;
            let report = analyze(&doc, provenance(&doc))?;
            print(&emit_report(&report))
        }
        Command::Simulate {
            config,
            engine,
            trials,
            seed,
            csv,
            model,
            timing,
            safety_k,
        } => {
            let mut overrides = serde_json::Map::new();
            if let Some(m) = &model {
                overrides.insert("model".into(), models_value(std::slice::from_ref(m))?);
            }
            if let Some(e) = engine {
                overrides.insert("engine".into(), json!(e.name()));
            }
            if let Some(n) = trials {
                overrides.insert("trials".into(), json!(n));
            }
            if let Some(s) = seed {
                overrides.insert("seed".into(), json!(s));
            }
            if let Some(t) = timing {
                let t = match t.as_str() {
                    "exponential" | "deterministic" => t,
                    other => {
                        return Err(ShellError::Usage(format!(
                            "unknown timing '{other}' (expected exponential or deterministic)"
                        )))
                    }
                };
                overrides.insert("collapse_timing".into(), json!(t));
            }
            if let Some(k) = safety_k {
                overrides.insert("safety_k".into(), json!(k));
            }
            let doc = load(&config, overrides)?;
            let preset = match doc.effective_models().as_slice() {
                [one] => *one,
                _ => {
                    return Err(ShellError::Usage(
                        "simulate runs one model; select it with --model".into(),
                    ))
                }
            };
            let prov = provenance(&doc);
            let report = match csv {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| io_error(&path, e))?;
                    simulate(&doc, preset, prov, Some(BufWriter::new(file)))?
                }
                None => simulate::<io::Sink>(&doc, preset, prov, None)?,
            };
            print(&emit_report(&report))
        }
        Command::CollapseTime { models, apparatus } => collapse_time(&models, &apparatus),
        Command::Scenarios { action } => match action.unwrap_or(ScenarioAction::List) {
            ScenarioAction::List => {
                let mut out = String::new();
                for id in ScenarioId::BUILTIN {
                    out.push_str(&format!("{:<24}{}\n", id.name(), id.summary()));
                }
                print(out.as_bytes())
            }
            ScenarioAction::Show { name } => {
                let id = builtin(&name).ok_or_else(|| ShellError::Usage(format!("unknown scenario '{name}'")))?;
                let doc = ConfigDocument::from_scenario(&id, id.default_model().into_iter().collect())
                    .expect("built-in scenario");
                print(document_json(&doc).as_bytes())
            }
        },
    }
}

fn builtin(name: &str) -> Option<ScenarioId> {
    match name.parse::<ScenarioId>() {
        Ok(ScenarioId::Custom(_)) | Err(_) => None,
        Ok(id) => Some(id),
    }
}

fn models_value(names: &[String]) -> Result<Value, ShellError> {
    let presets = parse_models(names)?;
    Ok(Value::Array(presets.iter().map(|m| json!(m.name())).collect()))
}

fn parse_models(names: &[String]) -> Result<Vec<ModelPreset>, ShellError> {
    let mut out = Vec::new();
    for name in names.iter().flat_map(|n| n.split(',')) {
        if name == "all" {
            out.extend(ModelPreset::ALL);
        } else {
            out.push(name.parse().map_err(ShellError::Usage)?);
        }
    }
    out.dedup();
    Ok(out)
}

/// Reads a config file or expands a scenario name, then applies overrides.
fn load(source: &str, overrides: serde_json::Map<String, Value>) -> Result<ConfigDocument, ShellError> {
    let mut value = match builtin(source) {
        Some(id) => {
            let mut v = json!({ "scenario": id.name() });
            if let Some(m) = id.default_model() {
                v["model"] = json!(m.name());
            }
            v
        }
        None => {
            let bytes = std::fs::read(source).map_err(|e| io_error(source, e))?;
            if overrides.is_empty() {
                return Ok(parse_config(&bytes)?);
            }
            // surface syntax and schema errors against the original text
            match serde_json::from_slice::<Value>(&bytes) {
                Ok(v @ Value::Object(_)) => v,
                _ => return Ok(parse_config(&bytes)?),
            }
        }
    };
    for (k, v) in overrides {
        value[k.as_str()] = v;
    }
    Ok(parse_config(value.to_string().as_bytes())?)
}

fn provenance(doc: &ConfigDocument) -> Provenance {
    Provenance::new(document_json(doc).as_bytes(), doc.seed)
}

fn io_error(path: impl AsRef<std::path::Path>, e: io::Error) -> ShellError {
    ShellError::Io {
        path: path.as_ref().display().to_string(),
        msg: e.to_string(),
    }
}

fn print(bytes: &[u8]) -> Result<(), ShellError> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| io_error("<stdout>", e))
}

fn collapse_time(models: &[String], apparatus: &str) -> Result<(), ShellError> {
    let presets = if models.is_empty() {
        ModelPreset::ALL.to_vec()
    } else {
        parse_models(models)?
    };
    let spec: ApparatusSpec<f64> = if apparatus == "salart2008" {
        ApparatusSpec::salart2008()
    } else {
        let bytes = std::fs::read(apparatus).map_err(|e| io_error(apparatus, e))?;
        parse_json(&bytes)?
    };
    let k = PhysicalConstants::default();
    let mut estimates = Vec::new();
    let mut infinite = None;
    for preset in presets {
        let est = estimate_for_apparatus(CollapseModel::from(preset), &spec, &k)?;
        if !est.estimate.is_finite() && infinite.is_none() {
            infinite = Some(preset);
        }
        let opt = |x: Option<f64>| x.map_or(Canon::Null, Canon::Float);
        estimates.push(Canon::Object(
            [
                ("model", Canon::Str(preset.name().into())),
                ("tau_s", Canon::Float(est.estimate.tau)),
                ("nucleons_count", opt(est.nucleons)),
                ("face_area_m2", opt(est.area)),
                ("displacement_m", opt(est.displacement)),
                ("self_energy_j", opt(est.self_energy)),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        ));
    }
    let doc = Canon::Object(
        [
            ("apparatus".to_string(), Canon::Str(apparatus.to_string())),
            ("estimates".to_string(), Canon::Array(estimates)),
        ]
        .into_iter()
        .collect(),
    );
    print(doc.to_text().as_bytes())?;
    match infinite {
        Some(p) => Err(collapse_locality::ModelError::NoCollapse {
            model: p.name().to_string(),
        }
        .into()),
        None => Ok(()),
    }
}

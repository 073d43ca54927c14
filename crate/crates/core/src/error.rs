use thiserror::Error;

/// Malformed geometric input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("window starts at {start} s, after its end at {end} s")]
    InvertedWindow { start: f64, end: f64 },
    #[error("latitude {0} rad outside [-pi/2, pi/2]")]
    Latitude(f64),
    #[error("altitude {0} m is negative")]
    Altitude(f64),
    #[error("non-finite coordinate")]
    NonFinite,
}

/// Failures of the collapse-time estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{model}: model predicts no collapse at this apparatus")]
    NoCollapse { model: String },
    #[error("non-positive collapse time {tau} s")]
    NonPositiveTau { tau: f64 },
    #[error("invalid {name}: {reason}")]
    InvalidInput { name: &'static str, reason: String },
    #[error("mass distributions have unequal total mass ({m1} kg vs {m2} kg)")]
    UnequalMasses { m1: f64, m2: f64 },
}

impl ModelError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidInput {
            name,
            reason: reason.into(),
        }
    }
}

/// Failures of the experiment-design analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("essential verdict is open for {model}; no margin to report")]
    VerdictOpen { model: String },
    #[error("maximal collapse window of the reference layout is zero")]
    ZeroWindow,
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
}

impl DesignError {
    pub(crate) fn invalid(path: impl Into<String>, msg: impl Into<String>) -> Self {
        DesignError::Invalid {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

/// Failures of the trial engine and the CHSH statistics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("setting pair ({left},{right}) never observed")]
    MissingSettingPair { left: u8, right: u8 },
    #[error(transparent)]
    Design(#[from] DesignError),
}

impl From<ModelError> for BellError {
    fn from(e: ModelError) -> Self {
        BellError::Design(DesignError::Model(e))
    }
}

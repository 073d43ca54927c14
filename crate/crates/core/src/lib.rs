//! Bell experiments under localized-collapse hypotheses.
//!
//! The library computes collapse times for spontaneous-localization and
//! gravitational collapse models, checks whether the collapse regions of an
//! experiment layout are spacelike separated, and simulates Bell trials under
//! quantum theory and under a causal-collapse local model.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

pub mod bell;
pub mod collapse;
pub mod design;
pub mod error;
pub mod num;
pub mod shell;
pub mod spacetime;

pub use error::{BellError, DesignError, GeometryError, ModelError};
pub use num::Real;

pub type Constants = spacetime::PhysicalConstants<f64>;
pub type Event = spacetime::SpacetimeEvent<f64>;
pub type Window = spacetime::StationWindow<f64>;
pub type Geo = spacetime::GeoPoint<f64>;
pub type Apparatus = collapse::ApparatusSpec<f64>;
pub type Mass = collapse::MassDistribution<f64>;
pub type Params = collapse::CollapseParams<f64>;
pub type Estimate = collapse::CollapseEstimate<f64>;
pub type Experiment = design::ExperimentConfig<f64>;
pub type Wing = design::WingSpec<f64>;
pub type Verdict = design::LoopholeVerdict<f64>;
pub type Settings = bell::SettingsSpec<f64>;
pub type Trial = bell::TrialRecord<f64>;
pub type Chsh = bell::ChshResult<f64>;

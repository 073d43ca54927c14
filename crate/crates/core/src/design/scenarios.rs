//! Built-in experiment layouts.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::{synchronized, ExperimentConfig, Observer, Position, WingSpec};
use crate::bell::SettingsSpec;
use crate::collapse::{ApparatusSpec, ModelPreset};
use crate::num::{lit, Real};
use crate::spacetime::{distance, GeoPoint, PhysicalConstants, SpacetimeEvent};

/// Default orbital altitude of the space-based observer, meters.
pub const SPACE_HUMAN_ALTITUDE_M: f64 = 2.0e7;
/// Default perception time of a human observer, seconds.
pub const HUMAN_PERCEPTION_S: f64 = 0.1;
/// Fiber delay on each wing of the antipodal layout, seconds.
pub const ANTIPODAL_CHANNEL_DELAY_S: f64 = 0.060;
/// Light-time separation of the tabletop amplifiers, seconds.
pub const SALART_SEPARATION_S: f64 = 60e-6;

/// A built-in layout or a path to a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioId {
    Salart2008,
    AntipodalTerrestrial,
    SpaceHuman,
    Custom(PathBuf),
}

impl ScenarioId {
    pub const BUILTIN: [ScenarioId; 3] = [
        ScenarioId::Salart2008,
        ScenarioId::AntipodalTerrestrial,
        ScenarioId::SpaceHuman,
    ];

    pub fn name(&self) -> String {
        match self {
            ScenarioId::Salart2008 => "salart2008".into(),
            ScenarioId::AntipodalTerrestrial => "antipodal_terrestrial".into(),
            ScenarioId::SpaceHuman => "space_human".into(),
            ScenarioId::Custom(p) => p.display().to_string(),
        }
    }

    /// One-line description for listings.
    pub fn summary(&self) -> &'static str {
        match self {
            ScenarioId::Salart2008 => "tabletop piezo-mirror amplifiers 60 us of light travel apart",
            ScenarioId::AntipodalTerrestrial => "adjacent detectors, fiber-delayed amplifiers at antipodes",
            ScenarioId::SpaceHuman => "human observers on the ground and in orbit on the far side",
            ScenarioId::Custom(_) => "layout read from a config file",
        }
    }

    /// Model analyzed when none is requested.
    pub fn default_model(&self) -> Option<ModelPreset> {
        match self {
            ScenarioId::Salart2008 => Some(ModelPreset::DpDiosi),
            ScenarioId::AntipodalTerrestrial => Some(ModelPreset::GrwStandard),
            ScenarioId::SpaceHuman | ScenarioId::Custom(_) => None,
        }
    }

    /// Layout of a built-in scenario with its default parameters.
    pub fn builtin<T: Real>(&self) -> Option<ExperimentConfig<T>> {
        match self {
            ScenarioId::Salart2008 => Some(salart2008()),
            ScenarioId::AntipodalTerrestrial => Some(antipodal_terrestrial()),
            ScenarioId::SpaceHuman => Some(space_human(lit(SPACE_HUMAN_ALTITUDE_M), lit(HUMAN_PERCEPTION_S))),
            ScenarioId::Custom(_) => None,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = std::convert::Infallible;

    /// Built-in names map to their layouts; anything else is a path.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "salart2008" => ScenarioId::Salart2008,
            "antipodal_terrestrial" => ScenarioId::AntipodalTerrestrial,
            "space_human" => ScenarioId::SpaceHuman,
            other => ScenarioId::Custom(PathBuf::from(other)),
        })
    }
}

fn device_wing<T: Real>(detector: SpacetimeEvent<T>, delay: T, amplifier: Position<T>) -> WingSpec<T> {
    WingSpec {
        detector_event: detector,
        channel_delay: delay,
        amplifier_pos: amplifier,
        added_sync_delay: T::zero(),
        observer: Observer::Device(ApparatusSpec::salart2008()),
    }
}

/// Tabletop layout: amplifiers co-sited with their detectors and driven
/// directly, `60 us · c` apart, source midway.
pub fn salart2008<T: Real>() -> ExperimentConfig<T> {
    let k = PhysicalConstants::<T>::default();
    let r = k.earth_radius();
    let half = k.c * lit::<T>(SALART_SEPARATION_S) / lit(2.0);
    let arrival = lit::<T>(1.5) * half / k.c;
    let at = |y: T| [r, y, T::zero()];
    let wing = |y: T| {
        device_wing(
            SpacetimeEvent::new(arrival, at(y)),
            T::zero(),
            Position::Cartesian(at(y)),
        )
    };
    ExperimentConfig {
        source_event: SpacetimeEvent::new(T::zero(), at(T::zero())),
        left: wing(-half),
        right: wing(half),
        settings: SettingsSpec::optimal(),
        constants: k,
        sync_tolerance: None,
    }
}

/// Detectors a few meters apart next to the source; fibers carry the
/// readings to amplifiers on opposite sides of the Earth, entered
/// simultaneously.
pub fn antipodal_terrestrial<T: Real>() -> ExperimentConfig<T> {
    let k = PhysicalConstants::<T>::default();
    let source = GeoPoint {
        latitude: T::zero(),
        longitude: T::FRAC_PI_2(),
        altitude: T::zero(),
    }
    .to_cartesian(&k);
    let offset = lit::<T>(5.0);
    let arrival = lit::<T>(1.5) * offset / k.c;
    let delay = lit::<T>(ANTIPODAL_CHANNEL_DELAY_S);
    let detector = |dx: T| SpacetimeEvent::new(arrival, [source[0] + dx, source[1], source[2]]);
    let amp = |lon: T| {
        Position::Geo(GeoPoint {
            latitude: T::zero(),
            longitude: lon,
            altitude: T::zero(),
        })
    };
    let config = ExperimentConfig {
        source_event: SpacetimeEvent::new(T::zero(), source),
        left: device_wing(detector(-offset), delay, amp(T::zero())),
        right: device_wing(detector(offset), delay, amp(T::PI())),
        settings: SettingsSpec::optimal(),
        constants: k,
        sync_tolerance: None,
    };
    synchronized(&config)
}

/// A ground observer next to the source and an orbiting observer at
/// `altitude` above the antipode, both human. The ground wing is delayed
/// until the orbiting observer receives its reading.
pub fn space_human<T: Real>(altitude: T, perception_time: T) -> ExperimentConfig<T> {
    let k = PhysicalConstants::<T>::default();
    let ground = GeoPoint {
        latitude: T::zero(),
        longitude: T::zero(),
        altitude: T::zero(),
    };
    let orbit = GeoPoint {
        latitude: T::zero(),
        longitude: T::PI(),
        altitude,
    };
    let source = ground.to_cartesian(&k);
    let offset = lit::<T>(5.0);
    let arrival = lit::<T>(1.5) * offset / k.c;
    let detector = |dy: T| SpacetimeEvent::new(arrival, [source[0], source[1] + dy, source[2]]);
    let observer = Observer::Human { perception_time };
    let wing = |det: SpacetimeEvent<T>, amp: GeoPoint<T>| WingSpec {
        detector_event: det,
        channel_delay: distance(det.pos, amp.to_cartesian(&k)) / k.c,
        amplifier_pos: Position::Geo(amp),
        added_sync_delay: T::zero(),
        observer,
    };
    let config = ExperimentConfig {
        source_event: SpacetimeEvent::new(T::zero(), source),
        left: wing(detector(-offset), ground),
        right: wing(detector(offset), orbit),
        settings: SettingsSpec::optimal(),
        constants: k,
        sync_tolerance: None,
    };
    synchronized(&config)
}

//! Experiment layouts and collapse-locality verdicts.
//!
//! A layout has a source, and per wing a detector, a channel (a pure delay)
//! and an amplifier watched by an observer. The essential verdict asks
//! whether the two collapse windows at the amplifiers are spacelike. The
//! extended verdict also includes the detector events of each wing.

pub mod scenarios;

use serde::{Deserialize, Serialize};

use crate::bell::{chsh_closed_form, CorrelationModel, SettingsSpec};
use crate::collapse::{estimate_for_apparatus, ApparatusSpec, CollapseEstimate, CollapseModel, ModelPreset, ModelTag};
use crate::error::{DesignError, ModelError};
use crate::num::{lit, Real, Vec3};
use crate::spacetime::{
    causal_class, distance, windows_spacelike, CausalClass, GeoPoint, PhysicalConstants, SpacetimeEvent, StationWindow,
};

/// Default tolerance on amplifier-input simultaneity, seconds.
pub const DEFAULT_SYNC_TOLERANCE_S: f64 = 1e-6;

/// Amplifier location, either Cartesian or geographic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub enum Position<T> {
    #[serde(rename = "xyz_m")]
    Cartesian(Vec3<T>),
    #[serde(rename = "geo")]
    Geo(GeoPoint<T>),
}

impl<T: Real> Position<T> {
    pub fn resolve(&self, k: &PhysicalConstants<T>) -> Vec3<T> {
        match self {
            Position::Cartesian(p) => *p,
            Position::Geo(g) => g.to_cartesian(k),
        }
    }
}

/// Who completes the measurement at the end of a wing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub enum Observer<T> {
    #[serde(rename = "device")]
    Device(ApparatusSpec<T>),
    #[serde(rename = "human")]
    Human {
        #[serde(rename = "perception_s")]
        perception_time: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub struct WingSpec<T> {
    /// Photon arrival at the detector.
    pub detector_event: SpacetimeEvent<T>,
    #[serde(rename = "channel_delay_s")]
    pub channel_delay: T,
    #[serde(rename = "amplifier")]
    pub amplifier_pos: Position<T>,
    #[serde(rename = "added_sync_delay_s", default)]
    pub added_sync_delay: T,
    pub observer: Observer<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig<T> {
    pub source_event: SpacetimeEvent<T>,
    #[serde(rename = "wing_left")]
    pub left: WingSpec<T>,
    #[serde(rename = "wing_right")]
    pub right: WingSpec<T>,
    #[serde(default)]
    pub settings: SettingsSpec<T>,
    #[serde(default)]
    pub constants: PhysicalConstants<T>,
    #[serde(rename = "sync_tolerance_s", default, skip_serializing_if = "Option::is_none")]
    pub sync_tolerance: Option<T>,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn sync_tolerance(&self) -> T {
        self.sync_tolerance.unwrap_or_else(|| lit(DEFAULT_SYNC_TOLERANCE_S))
    }

    pub fn has_device_observer(&self) -> bool {
        [&self.left, &self.right]
            .iter()
            .any(|w| matches!(w.observer, Observer::Device(_)))
    }

    /// Checks field invariants; errors carry the offending key path.
    pub fn validate(&self) -> Result<(), DesignError> {
        let k = &self.constants;
        if let Some(name) = k.first_invalid() {
            return Err(DesignError::invalid(
                format!("constants.{name}"),
                "must be positive and finite",
            ));
        }
        if !self.source_event.is_finite() {
            return Err(DesignError::invalid("source_event", "non-finite value"));
        }
        if let Some(tol) = self.sync_tolerance {
            if !(tol.is_finite() && tol >= T::zero()) {
                return Err(DesignError::invalid("sync_tolerance_s", "must be non-negative"));
            }
        }
        if let Some((wing, i)) = self.settings.first_out_of_range() {
            let side = match wing {
                crate::bell::Wing::Left => "left_rad",
                crate::bell::Wing::Right => "right_rad",
            };
            return Err(DesignError::invalid(
                format!("settings.{side}[{i}]"),
                "angle must lie in [0, 2pi)",
            ));
        }
        for (name, w) in [("wing_left", &self.left), ("wing_right", &self.right)] {
            validate_wing(name, w, &self.source_event, k)?;
        }
        Ok(())
    }
}

fn validate_wing<T: Real>(
    name: &str,
    w: &WingSpec<T>,
    source: &SpacetimeEvent<T>,
    k: &PhysicalConstants<T>,
) -> Result<(), DesignError> {
    if !w.detector_event.is_finite() {
        return Err(DesignError::invalid(
            format!("{name}.detector_event"),
            "non-finite value",
        ));
    }
    for (key, v) in [
        ("channel_delay_s", w.channel_delay),
        ("added_sync_delay_s", w.added_sync_delay),
    ] {
        if !(v.is_finite() && v >= T::zero()) {
            return Err(DesignError::invalid(
                format!("{name}.{key}"),
                "delay must be non-negative",
            ));
        }
    }
    if let Position::Geo(g) = &w.amplifier_pos {
        g.validate()
            .map_err(|e| DesignError::invalid(format!("{name}.amplifier.geo"), e.to_string()))?;
    }
    match &w.observer {
        Observer::Device(a) => a.validate().map_err(|e| {
            let field = match &e {
                ModelError::InvalidInput { name, .. } => format!(".{name}"),
                _ => String::new(),
            };
            DesignError::invalid(format!("{name}.observer.device{field}"), e.to_string())
        })?,
        Observer::Human { perception_time } => {
            if !(perception_time.is_finite() && *perception_time > T::zero()) {
                return Err(DesignError::invalid(
                    format!("{name}.observer.human.perception_s"),
                    "perception time must be positive",
                ));
            }
        }
    }
    if causal_class(source, &w.detector_event, k) == CausalClass::Spacelike || w.detector_event.t < source.t {
        return Err(DesignError::invalid(
            format!("{name}.detector_event"),
            "detector event must lie in or on the future light cone of the source",
        ));
    }
    Ok(())
}

/// Detector time plus channel and sync delays, at the amplifier.
pub fn amplifier_input_event<T: Real>(w: &WingSpec<T>, k: &PhysicalConstants<T>) -> SpacetimeEvent<T> {
    SpacetimeEvent::new(
        w.detector_event.t + w.channel_delay + w.added_sync_delay,
        w.amplifier_pos.resolve(k),
    )
}

/// Collapse timing of one wing under a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingCollapse<T> {
    pub input: SpacetimeEvent<T>,
    /// Actuation time before the collapse clock starts.
    pub lead: T,
    pub estimate: CollapseEstimate<T>,
    /// Human observers collapse at a fixed time, not a random one.
    pub deterministic: bool,
}

pub fn wing_collapse<T: Real>(
    w: &WingSpec<T>,
    model: CollapseModel,
    k: &PhysicalConstants<T>,
) -> Result<WingCollapse<T>, ModelError> {
    let input = amplifier_input_event(w, k);
    match &w.observer {
        Observer::Device(a) => {
            let est = estimate_for_apparatus(model, a, k)?;
            Ok(WingCollapse {
                input,
                lead: a.actuation_time,
                estimate: est.estimate,
                deterministic: false,
            })
        }
        Observer::Human { perception_time } => Ok(WingCollapse {
            input,
            lead: T::zero(),
            estimate: CollapseEstimate {
                tau: *perception_time,
                model: ModelTag::Perception,
            },
            deterministic: true,
        }),
    }
}

/// Window at the amplifier from the input event to `lead + safety_k·τ` later.
pub fn collapse_window<T: Real>(
    w: &WingSpec<T>,
    model: CollapseModel,
    safety_k: T,
    k: &PhysicalConstants<T>,
) -> Result<StationWindow<T>, DesignError> {
    let c = wing_collapse(w, model, k)?;
    window_of(&c, model, safety_k)
}

fn window_of<T: Real>(c: &WingCollapse<T>, model: CollapseModel, safety_k: T) -> Result<StationWindow<T>, DesignError> {
    if !c.estimate.tau.is_finite() {
        return Err(ModelError::NoCollapse {
            model: model.preset.name().to_string(),
        }
        .into());
    }
    let end = c.input.t + c.lead + safety_k * c.estimate.tau;
    Ok(StationWindow {
        pos: c.input.pos,
        t_start: c.input.t,
        t_end: end,
    })
}

/// Essential and extended collapse-locality verdicts for one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopholeVerdict<T> {
    pub essential_closed: bool,
    pub extended_closed: bool,
    pub essential_margin: T,
    pub extended_margin: T,
    pub collapse_windows: (StationWindow<T>, StationWindow<T>),
    pub model: ModelPreset,
    pub tau_values: (T, T),
    pub tau_models: (ModelTag, ModelTag),
}

pub fn verdict<T: Real>(
    config: &ExperimentConfig<T>,
    model: CollapseModel,
    safety_k: T,
) -> Result<LoopholeVerdict<T>, DesignError> {
    let k = &config.constants;
    let cl = wing_collapse(&config.left, model, k)?;
    let cr = wing_collapse(&config.right, model, k)?;
    let wl = window_of(&cl, model, safety_k)?;
    let wr = window_of(&cr, model, safety_k)?;
    let essential = windows_spacelike(&wl, &wr, k);

    let dl = StationWindow::instant(config.left.detector_event);
    let dr = StationWindow::instant(config.right.detector_event);
    let mut extended_closed = true;
    let mut extended_margin = T::infinity();
    for (a, b) in [(&dl, &dr), (&dl, &wr), (&wl, &dr), (&wl, &wr)] {
        let s = windows_spacelike(a, b, k);
        extended_closed &= s.spacelike;
        extended_margin = extended_margin.min(s.margin);
    }

    Ok(LoopholeVerdict {
        essential_closed: essential.spacelike,
        extended_closed,
        essential_margin: essential.margin,
        extended_margin,
        collapse_windows: (wl, wr),
        model: model.preset,
        tau_values: (cl.estimate.tau, cr.estimate.tau),
        tau_models: (cl.estimate.model, cr.estimate.model),
    })
}

/// Longest common window length starting at both amplifier inputs that keeps
/// the windows spacelike: `D/c − |Δt|`, floored at zero.
pub fn max_collapse_window<T: Real>(config: &ExperimentConfig<T>) -> T {
    let k = &config.constants;
    let l = amplifier_input_event(&config.left, k);
    let r = amplifier_input_event(&config.right, k);
    (distance(l.pos, r.pos) / k.c - (l.t - r.t).abs()).max(T::zero())
}

/// Smallest non-negative extra delays that make the amplifier inputs
/// simultaneous, ignoring any sync delay already configured.
pub fn sync_delays<T: Real>(config: &ExperimentConfig<T>) -> (T, T) {
    let raw = |w: &WingSpec<T>| w.detector_event.t + w.channel_delay;
    let (l, r) = (raw(&config.left), raw(&config.right));
    let latest = l.max(r);
    (latest - l, latest - r)
}

/// Copy of `config` with [`sync_delays`] installed.
pub fn synchronized<T: Real>(config: &ExperimentConfig<T>) -> ExperimentConfig<T> {
    let (l, r) = sync_delays(config);
    let mut c = *config;
    c.left.added_sync_delay = l;
    c.right.added_sync_delay = r;
    c
}

/// Whether the amplifier inputs agree to within the configured tolerance.
pub fn inputs_simultaneous<T: Real>(config: &ExperimentConfig<T>) -> bool {
    let k = &config.constants;
    let l = amplifier_input_event(&config.left, k);
    let r = amplifier_input_event(&config.right, k);
    (l.t - r.t).abs() <= config.sync_tolerance()
}

/// Largest factor by which both wings' time-to-collapse (actuation plus
/// `safety_k·τ`) can grow with the essential verdict still closed.
pub fn margin_factor<T: Real>(
    config: &ExperimentConfig<T>,
    model: CollapseModel,
    safety_k: T,
) -> Result<T, DesignError> {
    let v = verdict(config, model, safety_k)?;
    if !v.essential_closed {
        return Err(DesignError::VerdictOpen {
            model: model.preset.name().to_string(),
        });
    }
    let k = &config.constants;
    let (wl, wr) = v.collapse_windows;
    let light = distance(wl.pos, wr.pos) / k.c;
    let offset = wl.t_start - wr.t_start;
    let bound = |room: T, len: T| if len > T::zero() { room / len } else { T::infinity() };
    Ok(bound(light - offset, wl.duration()).min(bound(light + offset, wr.duration())))
}

/// Ratio of the maximal collapse windows of two layouts.
pub fn improvement_factor<T: Real>(c1: &ExperimentConfig<T>, c2: &ExperimentConfig<T>) -> Result<T, DesignError> {
    let denom = max_collapse_window(c2);
    if denom <= T::zero() {
        return Err(DesignError::ZeroWindow);
    }
    Ok(max_collapse_window(c1) / denom)
}

/// Altitude above the antipode of a ground observer at which light needs
/// `perception_time` to cross: `c·T − earth_diameter`, floored at zero.
pub fn required_altitude<T: Real>(perception_time: T, k: &PhysicalConstants<T>) -> T {
    (k.c * perception_time - k.earth_diameter).max(T::zero())
}

/// Predicted CHSH values with and without spacelike collapses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discrimination<T> {
    pub essential_closed: bool,
    pub predicted_s_qm: T,
    pub predicted_s_causal: T,
    pub gap: T,
}

impl<T: Real> Discrimination<T> {
    pub fn discriminates(&self) -> bool {
        self.gap > T::zero()
    }
}

pub fn discriminates<T: Real>(
    config: &ExperimentConfig<T>,
    model: CollapseModel,
    safety_k: T,
) -> Result<Discrimination<T>, DesignError> {
    let v = verdict(config, model, safety_k)?;
    Ok(discrimination_for(&config.settings, v.essential_closed))
}

pub(crate) fn discrimination_for<T: Real>(settings: &SettingsSpec<T>, essential_closed: bool) -> Discrimination<T> {
    let qm = chsh_closed_form(CorrelationModel::Qm, settings);
    let causal = if essential_closed {
        chsh_closed_form(CorrelationModel::LhvSpacelike, settings)
    } else {
        qm
    };
    Discrimination {
        essential_closed,
        predicted_s_qm: qm,
        predicted_s_causal: causal,
        gap: (qm - causal).max(T::zero()),
    }
}

#[cfg(test)]
mod tests {
    use super::scenarios::*;
    use super::*;

    fn wing(det_t: f64, delay: f64, sync: f64, pos: Vec3<f64>) -> WingSpec<f64> {
        WingSpec {
            detector_event: SpacetimeEvent::new(det_t, pos),
            channel_delay: delay,
            amplifier_pos: Position::Cartesian(pos),
            added_sync_delay: sync,
            observer: Observer::Human { perception_time: 0.1 },
        }
    }

    #[test]
    fn input_event_examples() {
        let k = PhysicalConstants::default();
        let w = wing(0.0, 0.01, 0.05, [1.0, 2.0, 3.0]);
        let e = amplifier_input_event(&w, &k);
        assert!((e.t - 0.06).abs() < 1e-15);
        assert_eq!(e.pos, [1.0, 2.0, 3.0]);
        let w = wing(0.25, 0.0, 0.0, [4.0, 5.0, 6.0]);
        assert_eq!(amplifier_input_event(&w, &k), w.detector_event);
        let salart = salart2008::<f64>();
        let e = amplifier_input_event(&salart.left, &k);
        assert_eq!(e.t, salart.left.detector_event.t);
    }

    #[test]
    fn collapse_window_examples() {
        let k = PhysicalConstants::default();
        let salart = salart2008::<f64>();
        let w = collapse_window(&salart.left, ModelPreset::DpDiosi.into(), 1.0, &k).unwrap();
        let len = w.duration();
        assert!(len > 6e-6 && len < 8e-6, "{len}");

        let human = wing(0.0, 0.0, 0.0, [0.0; 3]);
        let w = collapse_window(&human, ModelPreset::GrwStandard.into(), 1.0, &k).unwrap();
        assert!((w.duration() - 0.1).abs() < 1e-15);

        let w = collapse_window(&human, ModelPreset::GrwStandard.into(), 0.0, &k).unwrap();
        assert_eq!(w.duration(), 0.0);
    }

    #[test]
    fn no_collapse_is_an_error() {
        let k = PhysicalConstants::default();
        let mut salart = salart2008::<f64>();
        if let Observer::Device(a) = &mut salart.left.observer {
            a.displacement_d = 0.0;
        }
        let err = collapse_window(&salart.left, ModelPreset::DpDiosi.into(), 1.0, &k).unwrap_err();
        assert!(err.to_string().contains("model predicts no collapse"));
    }

    #[test]
    fn sync_examples() {
        let mut c = salart2008::<f64>();
        c.left.detector_event.t = 0.0;
        c.right.detector_event.t = 0.0;
        c.left.channel_delay = 0.060;
        c.right.channel_delay = 0.010;
        let (l, r) = sync_delays(&c);
        assert_eq!(l, 0.0);
        assert!((r - 0.050).abs() < 1e-15);
        c.left.channel_delay = 0.010;
        c.right.channel_delay = 0.060;
        let (l, r) = sync_delays(&c);
        assert!((l - 0.050).abs() < 1e-15);
        assert_eq!(r, 0.0);
        c.right.channel_delay = 0.010;
        assert_eq!(sync_delays(&c), (0.0, 0.0));
    }

    #[test]
    fn required_altitude_examples() {
        let k = PhysicalConstants::<f64>::default();
        let a1 = required_altitude(0.1, &k);
        assert!((a1 - (0.1 * k.c - 1.24e7)).abs() < 1e-6);
        assert!((a1 - 1.76e7).abs() < 1e5);
        let a2 = required_altitude(0.2, &k);
        assert!((a2 - 4.76e7).abs() < 1e5);
        assert_eq!(required_altitude(0.01, &k), 0.0);
        assert!(required_altitude(1.24e7 / k.c, &k) < 1e-6);
    }

    #[test]
    fn salart_verdicts() {
        let c = salart2008::<f64>();
        let dp = verdict(&c, ModelPreset::DpDiosi.into(), 1.0).unwrap();
        assert!(dp.essential_closed && dp.extended_closed);
        let grw = verdict(&c, ModelPreset::GrwStandard.into(), 1.0).unwrap();
        assert!(!grw.essential_closed);
        assert!(!grw.extended_closed);
        assert!(margin_factor(&c, ModelPreset::GrwStandard.into(), 1.0).is_err());
    }

    #[test]
    fn antipodal_grw_closes_only_the_essential_loophole() {
        let c = antipodal_terrestrial::<f64>();
        let v = verdict(&c, ModelPreset::GrwStandard.into(), 1.0).unwrap();
        assert!(v.essential_closed);
        assert!(!v.extended_closed);
    }

    #[test]
    fn margin_factor_examples() {
        let salart = salart2008::<f64>();
        let m = margin_factor(&salart, ModelPreset::DpDiosi.into(), 1.0).unwrap();
        let w = collapse_window(&salart.left, ModelPreset::DpDiosi.into(), 1.0, &salart.constants).unwrap();
        assert!((m - 60e-6 / w.duration()).abs() / m < 1e-9);

        let anti = antipodal_terrestrial::<f64>();
        let m = margin_factor(&anti, ModelPreset::DpDiosi.into(), 1.0).unwrap();
        let expected = max_collapse_window(&anti) / w.duration();
        assert!((m - expected).abs() / m < 1e-9);
        assert!(m > 5e3 && m < 7e3, "{m}");

        // a window exactly at the bound: human observers whose perception equals D/c
        let k = PhysicalConstants::<f64>::default();
        let d = 3.0e7;
        let t = d / k.c;
        let mut c = space_human::<f64>(d - k.earth_diameter, t * 0.5);
        if let Observer::Human { perception_time } = &mut c.left.observer {
            *perception_time = t;
        }
        if let Observer::Human { perception_time } = &mut c.right.observer {
            *perception_time = t;
        }
        // shrink by a hair so the verdict is closed, then the factor is ~1
        let m = margin_factor(&c, ModelPreset::DpDiosi.into(), 1.0 - 1e-9).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "{m}");
    }

    #[test]
    fn improvement_examples() {
        let anti = antipodal_terrestrial::<f64>();
        let salart = salart2008::<f64>();
        let f = improvement_factor(&anti, &salart).unwrap();
        assert!((f - 689.3).abs() < 1.0, "{f}");
        assert_eq!(improvement_factor(&anti, &anti).unwrap(), 1.0);
        let space = space_human::<f64>(2e7, 0.1);
        let f = improvement_factor(&space, &anti).unwrap();
        // the orbital layout separates amplifiers by more than 0.1 s of light travel
        assert!(f > 2.4, "{f}");
        let mut zero = salart;
        zero.right.amplifier_pos = zero.left.amplifier_pos;
        assert_eq!(improvement_factor(&anti, &zero), Err(DesignError::ZeroWindow));
    }

    #[test]
    fn max_window_examples() {
        let anti = antipodal_terrestrial::<f64>();
        let t = max_collapse_window(&anti);
        assert!((t - 1.24e7 / anti.constants.c).abs() < 1e-9);
        let salart = salart2008::<f64>();
        assert!((max_collapse_window(&salart) - 60e-6).abs() < 1e-12);
        let mut offset = salart;
        offset.right.added_sync_delay = 60e-6;
        assert!(max_collapse_window(&offset).abs() < 1e-12);
    }

    #[test]
    fn discrimination_examples() {
        let salart = salart2008::<f64>();
        let d = discriminates(&salart, ModelPreset::DpDiosi.into(), 1.0).unwrap();
        assert!((d.gap - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
        assert!(d.discriminates());
        let d = discriminates(&salart, ModelPreset::GrwStandard.into(), 1.0).unwrap();
        assert_eq!(d.gap, 0.0);
        let space = space_human::<f64>(2e7, 0.1);
        let d = discriminates(&space, ModelPreset::DpDiosi.into(), 1.0).unwrap();
        assert!((d.gap - 0.828_427).abs() < 1e-6);
    }

    #[test]
    fn library_layouts_validate() {
        salart2008::<f64>().validate().unwrap();
        antipodal_terrestrial::<f64>().validate().unwrap();
        space_human::<f64>(2e7, 0.1).validate().unwrap();
    }

    #[test]
    fn validation_reports_paths() {
        let mut c = salart2008::<f64>();
        c.right.channel_delay = -1.0;
        let err = c.validate().unwrap_err();
        assert!(err.to_string().starts_with("wing_right.channel_delay_s"), "{err}");
        let mut c = salart2008::<f64>();
        c.left.detector_event.t = -1.0;
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("future light cone"), "{err}");
    }
}

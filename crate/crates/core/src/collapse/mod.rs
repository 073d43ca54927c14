//! Collapse-time estimators for CSL, GRW and Diósi–Penrose, plus the
//! apparatus geometry they are evaluated on.
//!
//! Every estimator returns an expected collapse time. Sampling actual
//! collapse instants is left to the trial engine.

pub mod gravity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::num::{all_finite, lit, Real, Vec3};
use crate::spacetime::PhysicalConstants;

use self::gravity::{Cuboid, DEFAULT_STEPS_PER_EFOLD};

/// Rate and localization length of a spontaneous-localization model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub struct CollapseParams<T> {
    #[serde(rename = "rate_lambda_per_s")]
    pub rate_lambda: T,
    #[serde(rename = "length_a_m")]
    pub length_a: T,
}

impl<T: Real> CollapseParams<T> {
    pub fn new(rate_lambda: T, length_a: T) -> Result<Self, ModelError> {
        let p = Self { rate_lambda, length_a };
        p.validate()?;
        Ok(p)
    }

    /// λ = 1e-16 s⁻¹, a = 1e-7 m.
    pub fn standard() -> Self {
        Self {
            rate_lambda: lit(1e-16),
            length_a: lit(1e-7),
        }
    }

    /// λ = 1e-19 s⁻¹, a = 1e-7 m.
    pub fn low_rate() -> Self {
        Self {
            rate_lambda: lit(1e-19),
            length_a: lit(1e-7),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.rate_lambda.is_finite() && self.rate_lambda > T::zero()) {
            return Err(ModelError::invalid("rate_lambda", "must be positive and finite"));
        }
        if !(self.length_a.is_finite() && self.length_a > T::zero()) {
            return Err(ModelError::invalid("length_a", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Mirror dimension along which the displacement happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Length,
    Width,
    Thickness,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::Length => 0,
            Axis::Width => 1,
            Axis::Thickness => 2,
        }
    }
}

/// Mechanical amplifier: a mirror driven by an actuator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub struct ApparatusSpec<T> {
    #[serde(rename = "mirror_mass_kg")]
    pub mirror_mass: T,
    /// length, width, thickness
    #[serde(rename = "mirror_dims_m")]
    pub mirror_dims: Vec3<T>,
    #[serde(rename = "displacement_m")]
    pub displacement_d: T,
    pub displacement_axis: Axis,
    /// Actuator and other mass moving with the mirror.
    #[serde(rename = "attached_mass_kg", default)]
    pub attached_mass: T,
    /// Mirror density; derived from mass and volume when absent.
    #[serde(rename = "density_kg_per_m3", default, skip_serializing_if = "Option::is_none")]
    pub density: Option<T>,
    /// Delay between the input signal and the completed displacement.
    #[serde(rename = "actuation_time_s", default)]
    pub actuation_time: T,
}

impl<T: Real> ApparatusSpec<T> {
    /// The piezo-driven mirror of the 2008 Geneva experiment.
    ///
    /// The attached (actuator) mass is not a measured value: it is the mass
    /// for which the GRW estimate with the standard parameters and the full
    /// displacement comes out at 2e-4 s, i.e. about 5.04e22 nucleons in total.
    pub fn salart2008() -> Self {
        Self {
            mirror_mass: lit(2e-6),
            mirror_dims: [lit(3e-3), lit(2e-3), lit(1.5e-4)],
            displacement_d: lit(12.6e-9),
            displacement_axis: Axis::Thickness,
            attached_mass: lit(SALART_ATTACHED_MASS_KG),
            density: None,
            actuation_time: lit(6e-6),
        }
    }

    pub fn mirror_volume(&self) -> T {
        self.mirror_dims[0] * self.mirror_dims[1] * self.mirror_dims[2]
    }

    pub fn density(&self) -> T {
        self.density.unwrap_or_else(|| self.mirror_mass / self.mirror_volume())
    }

    /// Area of the mirror face perpendicular to the displacement.
    pub fn face_area(&self) -> T {
        let i = self.displacement_axis.index();
        (0..3)
            .filter(|&j| j != i)
            .fold(T::one(), |acc, j| acc * self.mirror_dims[j])
    }

    pub fn dim_along_axis(&self) -> T {
        self.mirror_dims[self.displacement_axis.index()]
    }

    pub fn total_mass(&self) -> T {
        self.mirror_mass + self.attached_mass
    }

    /// Mirror as a uniform box, undisplaced and displaced.
    pub fn mirror_pair(&self) -> (MassDistribution<T>, MassDistribution<T>) {
        let mass = self.density() * self.mirror_volume();
        let rest = MassDistribution {
            dims: self.mirror_dims,
            total_mass: mass,
            offset: [T::zero(); 3],
        };
        let mut shifted = rest;
        shifted.offset[self.displacement_axis.index()] = self.displacement_d;
        (rest, shifted)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fin = all_finite(&[
            self.mirror_mass,
            self.displacement_d,
            self.attached_mass,
            self.actuation_time,
        ]) && all_finite(&self.mirror_dims);
        if !fin {
            return Err(ModelError::invalid("apparatus", "non-finite value"));
        }
        if self.mirror_mass < T::zero() {
            return Err(ModelError::invalid("mirror_mass_kg", "must be non-negative"));
        }
        if self.attached_mass < T::zero() {
            return Err(ModelError::invalid("attached_mass_kg", "must be non-negative"));
        }
        if self.mirror_dims.iter().any(|d| *d <= T::zero()) {
            return Err(ModelError::invalid("mirror_dims_m", "all dimensions must be positive"));
        }
        if self.displacement_d < T::zero() {
            return Err(ModelError::invalid("displacement_m", "must be non-negative"));
        }
        if self.actuation_time < T::zero() {
            return Err(ModelError::invalid("actuation_time_s", "must be non-negative"));
        }
        if let Some(rho) = self.density {
            if !(rho.is_finite() && rho > T::zero()) {
                return Err(ModelError::invalid("density_kg_per_m3", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Attached mass that makes the GRW worked example consistent (kg).
pub const SALART_ATTACHED_MASS_KG: f64 = 8.167_548_500_881_834e-5;

/// Uniform rectangular box of matter. `offset` is its minimum corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub struct MassDistribution<T> {
    #[serde(rename = "dims_m")]
    pub dims: Vec3<T>,
    #[serde(rename = "total_mass_kg")]
    pub total_mass: T,
    #[serde(rename = "offset_m")]
    pub offset: Vec3<T>,
}

impl<T: Real> MassDistribution<T> {
    pub fn new(dims: Vec3<T>, total_mass: T, offset: Vec3<T>) -> Result<Self, ModelError> {
        let m = Self {
            dims,
            total_mass,
            offset,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(all_finite(&self.dims) && all_finite(&self.offset) && self.total_mass.is_finite()) {
            return Err(ModelError::invalid("mass distribution", "non-finite value"));
        }
        if self.total_mass <= T::zero() {
            return Err(ModelError::invalid("total_mass_kg", "must be positive"));
        }
        if self.dims.iter().any(|d| *d <= T::zero()) {
            return Err(ModelError::invalid("dims_m", "all dimensions must be positive"));
        }
        Ok(())
    }

    pub fn cuboid(&self) -> Cuboid<T> {
        Cuboid::from_corner(self.offset, self.dims)
    }

    pub fn density(&self) -> T {
        self.total_mass / (self.dims[0] * self.dims[1] * self.dims[2])
    }

    pub fn translated(&self, by: Vec3<T>) -> Self {
        let mut m = *self;
        for (o, b) in m.offset.iter_mut().zip(by) {
            *o = *o + b;
        }
        m
    }
}

/// Which estimator produced a collapse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    #[serde(rename = "csl")]
    Csl,
    #[serde(rename = "grw")]
    Grw,
    #[serde(rename = "dp-diosi")]
    DpDiosi,
    #[serde(rename = "dp-penrose")]
    DpPenrose,
    /// Human observer: collapse by the end of conscious perception.
    #[serde(rename = "perception")]
    Perception,
}

impl ModelTag {
    pub fn name(self) -> &'static str {
        match self {
            ModelTag::Csl => "csl",
            ModelTag::Grw => "grw",
            ModelTag::DpDiosi => "dp-diosi",
            ModelTag::DpPenrose => "dp-penrose",
            ModelTag::Perception => "perception",
        }
    }
}

/// Expected collapse time. Infinite when the model predicts no collapse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapseEstimate<T> {
    pub tau: T,
    pub model: ModelTag,
}

impl<T: Real> CollapseEstimate<T> {
    pub fn is_finite(&self) -> bool {
        self.tau.is_finite()
    }
}

/// Named model presets accepted by configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelPreset {
    #[serde(rename = "csl-standard")]
    CslStandard,
    #[serde(rename = "csl-low")]
    CslLow,
    #[serde(rename = "grw-standard")]
    GrwStandard,
    #[serde(rename = "dp-diosi")]
    DpDiosi,
    #[serde(rename = "dp-penrose")]
    DpPenrose,
}

impl ModelPreset {
    pub const ALL: [ModelPreset; 5] = [
        ModelPreset::CslStandard,
        ModelPreset::CslLow,
        ModelPreset::GrwStandard,
        ModelPreset::DpDiosi,
        ModelPreset::DpPenrose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelPreset::CslStandard => "csl-standard",
            ModelPreset::CslLow => "csl-low",
            ModelPreset::GrwStandard => "grw-standard",
            ModelPreset::DpDiosi => "dp-diosi",
            ModelPreset::DpPenrose => "dp-penrose",
        }
    }

    /// Rate/length parameters; `None` for the gravitational models.
    pub fn params<T: Real>(self) -> Option<CollapseParams<T>> {
        match self {
            ModelPreset::CslStandard | ModelPreset::GrwStandard => Some(CollapseParams::standard()),
            ModelPreset::CslLow => Some(CollapseParams::low_rate()),
            ModelPreset::DpDiosi | ModelPreset::DpPenrose => None,
        }
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelPreset::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = ModelPreset::ALL.iter().map(|m| m.name()).collect();
            format!("unknown model '{s}' (expected one of: {})", names.join(", "))
        })
    }
}

/// Displacement fed into the GRW estimate: the full `d` or the mean `d/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrwConvention {
    #[default]
    Full,
    Half,
}

/// A preset plus the GRW displacement convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollapseModel {
    pub preset: ModelPreset,
    pub grw_displacement: GrwConvention,
}

impl From<ModelPreset> for CollapseModel {
    fn from(preset: ModelPreset) -> Self {
        Self {
            preset,
            grw_displacement: GrwConvention::Full,
        }
    }
}

/// Diósi or Penrose normalization of the gravitational estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpVariant {
    Diosi,
    Penrose,
}

pub fn nucleon_count<T: Real>(mass: T, k: &PhysicalConstants<T>) -> T {
    mass / k.nucleon_mass
}

/// Nucleons in the part of the mirror not shared by the two branches.
pub fn sliver_nucleons<T: Real>(spec: &ApparatusSpec<T>, k: &PhysicalConstants<T>) -> T {
    let total = nucleon_count(spec.mirror_mass, k);
    let dim = spec.dim_along_axis();
    if spec.displacement_d >= dim {
        total
    } else {
        total * (spec.displacement_d / dim)
    }
}

/// CSL collapse time `A / (4π λ a² N²)`.
pub fn csl_tau<T: Real>(p: &CollapseParams<T>, n_sliver: T, area: T) -> Result<CollapseEstimate<T>, ModelError> {
    p.validate()?;
    if !(area.is_finite() && area > T::zero()) {
        return Err(ModelError::invalid("area", "must be positive"));
    }
    if !(n_sliver.is_finite() && n_sliver >= T::zero()) {
        return Err(ModelError::invalid("nucleon count", "must be non-negative"));
    }
    let tau = if n_sliver == T::zero() {
        T::infinity()
    } else {
        // ordered so that N² never forms on its own (overflows f32)
        let rate = lit::<T>(4.0) * T::PI() * p.rate_lambda * p.length_a * p.length_a * n_sliver;
        area / rate / n_sliver
    };
    Ok(CollapseEstimate {
        tau,
        model: ModelTag::Csl,
    })
}

/// GRW collapse time `16 a² / (λ N d²)`.
pub fn grw_tau<T: Real>(p: &CollapseParams<T>, n_total: T, displacement: T) -> Result<CollapseEstimate<T>, ModelError> {
    p.validate()?;
    if !(n_total.is_finite() && n_total >= T::zero()) {
        return Err(ModelError::invalid("nucleon count", "must be non-negative"));
    }
    if !(displacement.is_finite() && displacement >= T::zero()) {
        return Err(ModelError::invalid("displacement", "must be non-negative"));
    }
    let tau = if n_total == T::zero() || displacement == T::zero() {
        T::infinity()
    } else {
        let ratio = p.length_a / displacement;
        lit::<T>(16.0) * ratio * ratio / (p.rate_lambda * n_total)
    };
    Ok(CollapseEstimate {
        tau,
        model: ModelTag::Grw,
    })
}

/// Both displacement readings of a rigid GRW shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrwDisplacement<T> {
    pub full: T,
    pub half: T,
}

impl<T: Real> GrwDisplacement<T> {
    pub fn select(&self, c: GrwConvention) -> T {
        match c {
            GrwConvention::Full => self.full,
            GrwConvention::Half => self.half,
        }
    }
}

pub fn grw_effective_displacement<T: Real>(spec: &ApparatusSpec<T>) -> GrwDisplacement<T> {
    GrwDisplacement {
        full: spec.displacement_d,
        half: spec.displacement_d / lit(2.0),
    }
}

/// Gravitational self-energy of `m1 − m2`, in joules.
pub fn dp_self_energy<T: Real>(
    m1: &MassDistribution<T>,
    m2: &MassDistribution<T>,
    k: &PhysicalConstants<T>,
) -> Result<T, ModelError> {
    dp_self_energy_with_resolution(m1, m2, k, DEFAULT_STEPS_PER_EFOLD)
}

/// [`dp_self_energy`] with an explicit radial grid density.
pub fn dp_self_energy_with_resolution<T: Real>(
    m1: &MassDistribution<T>,
    m2: &MassDistribution<T>,
    k: &PhysicalConstants<T>,
    steps_per_efold: usize,
) -> Result<T, ModelError> {
    m1.validate()?;
    m2.validate()?;
    let scale = m1.total_mass.max(m2.total_mass);
    if (m1.total_mass - m2.total_mass).abs() > lit::<T>(1e-9) * scale {
        return Err(ModelError::UnequalMasses {
            m1: m1.total_mass.to_f64().unwrap_or(f64::NAN),
            m2: m2.total_mass.to_f64().unwrap_or(f64::NAN),
        });
    }
    let integral =
        gravity::difference_energy_integral(&m1.cuboid(), m1.density(), &m2.cuboid(), m2.density(), steps_per_efold);
    Ok((k.g * integral).max(T::zero()))
}

/// `ħ / E_Δ` (Diósi), halved for Penrose.
pub fn dp_tau<T: Real>(
    m1: &MassDistribution<T>,
    m2: &MassDistribution<T>,
    variant: DpVariant,
    k: &PhysicalConstants<T>,
) -> Result<CollapseEstimate<T>, ModelError> {
    let energy = dp_self_energy(m1, m2, k)?;
    Ok(dp_tau_from_energy(energy, variant, k))
}

fn dp_tau_from_energy<T: Real>(energy: T, variant: DpVariant, k: &PhysicalConstants<T>) -> CollapseEstimate<T> {
    let diosi = if energy > T::zero() {
        k.hbar / energy
    } else {
        T::infinity()
    };
    match variant {
        DpVariant::Diosi => CollapseEstimate {
            tau: diosi,
            model: ModelTag::DpDiosi,
        },
        DpVariant::Penrose => CollapseEstimate {
            tau: diosi / lit(2.0),
            model: ModelTag::DpPenrose,
        },
    }
}

/// Inputs and result of evaluating one preset on one apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApparatusEstimate<T> {
    pub estimate: CollapseEstimate<T>,
    /// Nucleons entering the estimate (sliver for CSL, whole system for GRW).
    pub nucleons: Option<T>,
    pub area: Option<T>,
    pub displacement: Option<T>,
    pub self_energy: Option<T>,
}

/// Evaluates a preset on an apparatus.
///
/// CSL uses the sliver nucleons and the mirror face area; GRW counts the
/// mirror and attached mass; the gravitational models compare the mirror box
/// with its displaced copy.
pub fn estimate_for_apparatus<T: Real>(
    model: CollapseModel,
    spec: &ApparatusSpec<T>,
    k: &PhysicalConstants<T>,
) -> Result<ApparatusEstimate<T>, ModelError> {
    spec.validate()?;
    let none = ApparatusEstimate {
        estimate: CollapseEstimate {
            tau: T::infinity(),
            model: ModelTag::Csl,
        },
        nucleons: None,
        area: None,
        displacement: None,
        self_energy: None,
    };
    match model.preset {
        ModelPreset::CslStandard | ModelPreset::CslLow => {
            let p = model.preset.params().expect("csl preset has params");
            let n = sliver_nucleons(spec, k);
            let area = spec.face_area();
            Ok(ApparatusEstimate {
                estimate: csl_tau(&p, n, area)?,
                nucleons: Some(n),
                area: Some(area),
                ..none
            })
        }
        ModelPreset::GrwStandard => {
            let p = model.preset.params().expect("grw preset has params");
            let n = nucleon_count(spec.total_mass(), k);
            let d = grw_effective_displacement(spec).select(model.grw_displacement);
            Ok(ApparatusEstimate {
                estimate: grw_tau(&p, n, d)?,
                nucleons: Some(n),
                displacement: Some(d),
                ..none
            })
        }
        ModelPreset::DpDiosi | ModelPreset::DpPenrose => {
            let variant = if model.preset == ModelPreset::DpDiosi {
                DpVariant::Diosi
            } else {
                DpVariant::Penrose
            };
            if spec.mirror_mass == T::zero() || spec.displacement_d == T::zero() {
                return Ok(ApparatusEstimate {
                    estimate: dp_tau_from_energy(T::zero(), variant, k),
                    self_energy: Some(T::zero()),
                    ..none
                });
            }
            let (a, b) = spec.mirror_pair();
            let energy = dp_self_energy(&a, &b, k)?;
            Ok(ApparatusEstimate {
                estimate: dp_tau_from_energy(energy, variant, k),
                displacement: Some(spec.displacement_d),
                self_energy: Some(energy),
                ..none
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> PhysicalConstants<f64> {
        PhysicalConstants::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn nucleon_count_examples() {
        let k = k();
        assert!(rel(nucleon_count(2e-6, &k), 2e-6 / 1.660_54e-27) < 1e-15);
        assert!(rel(nucleon_count(2e-6, &k), 1.204e21) < 1e-3);
        assert_eq!(nucleon_count(0.0, &k), 0.0);
        assert!(rel(nucleon_count(1.660_54e-27, &k), 1.0) < 1e-15);
    }

    #[test]
    fn sliver_examples() {
        let k = k();
        let spec = ApparatusSpec::salart2008();
        let n = sliver_nucleons(&spec, &k);
        let total = nucleon_count(2e-6, &k);
        assert!(rel(n, total * 12.6e-9 / 1.5e-4) < 1e-12);
        assert!(rel(n, 1.011e17) < 1e-3);

        let mut zero = spec;
        zero.displacement_d = 0.0;
        assert_eq!(sliver_nucleons(&zero, &k), 0.0);

        let mut full = spec;
        full.displacement_d = 1.5e-4;
        assert!(rel(sliver_nucleons(&full, &k), total) < 1e-15);
        full.displacement_d = 1.0;
        assert!(rel(sliver_nucleons(&full, &k), total) < 1e-15);
    }

    #[test]
    fn csl_examples() {
        let p = CollapseParams::standard();
        let t = csl_tau(&p, 1e17, 6e-6).unwrap().tau;
        let expected = 6e-6 / (4.0 * std::f64::consts::PI * 1e-16 * 1e-14 * 1e34);
        assert!(rel(t, expected) < 1e-12);
        assert!(rel(t, 4.77e-11) < 1e-3);
        let t2 = csl_tau(&p, 2e17, 6e-6).unwrap().tau;
        assert!(rel(t2, t / 4.0) < 1e-12);
        let t3 = csl_tau(&p, 1e15, 6e-6).unwrap().tau;
        assert!(rel(t3, 4.77e-7) < 1e-3);
        assert!(csl_tau(&p, 0.0, 6e-6).unwrap().tau.is_infinite());
        assert!(csl_tau(&p, 1e17, 0.0).is_err());
    }

    #[test]
    fn grw_examples() {
        let p = CollapseParams::standard();
        let t = grw_tau(&p, 5.04e22, 12.6e-9).unwrap().tau;
        assert!(rel(t, 2.0e-4) < 0.01, "{t}");
        let t2 = grw_tau(&p, 5.04e22, 25.2e-9).unwrap().tau;
        assert!(rel(t2, t / 4.0) < 1e-12);
        let mirror_only = grw_tau(&p, 1.204e21, 12.6e-9).unwrap().tau;
        assert!(rel(mirror_only, 8.4e-3) < 0.01, "{mirror_only}");
        assert!(grw_tau(&p, 0.0, 1e-9).unwrap().tau.is_infinite());
        assert!(grw_tau(&p, 1e20, 0.0).unwrap().tau.is_infinite());
    }

    #[test]
    fn grw_displacement_conventions() {
        let mut spec = ApparatusSpec::<f64>::salart2008();
        let g = grw_effective_displacement(&spec);
        assert_eq!((g.full, g.half), (12.6e-9, 6.3e-9));
        spec.displacement_d = 0.0;
        let g = grw_effective_displacement(&spec);
        assert_eq!((g.full, g.half), (0.0, 0.0));
        spec.displacement_d = 2e-8;
        let g = grw_effective_displacement(&spec);
        assert_eq!((g.full, g.half), (2e-8, 1e-8));
    }

    #[test]
    fn salart_attached_mass_reproduces_grw_example() {
        let k = k();
        let spec = ApparatusSpec::salart2008();
        let n = nucleon_count(spec.total_mass(), &k);
        assert!(rel(n, 5.04e22) < 1e-3, "{n}");
        let est = estimate_for_apparatus(ModelPreset::GrwStandard.into(), &spec, &k).unwrap();
        assert!(rel(est.estimate.tau, 2.0e-4) < 1e-3);
    }

    #[test]
    fn dp_rejects_unequal_masses() {
        let k = k();
        let a = MassDistribution::new([1.0; 3], 1.0, [0.0; 3]).unwrap();
        let b = MassDistribution::new([1.0; 3], 2.0, [3.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            dp_self_energy(&a, &b, &k),
            Err(ModelError::UnequalMasses { .. })
        ));
    }

    #[test]
    fn dp_identical_is_zero_and_infinite_tau() {
        let k = k();
        let a = MassDistribution::new([1e-3, 2e-3, 3e-4], 2e-6, [0.0; 3]).unwrap();
        assert_eq!(dp_self_energy(&a, &a, &k).unwrap(), 0.0);
        assert!(dp_tau(&a, &a, DpVariant::Diosi, &k).unwrap().tau.is_infinite());
    }

    #[test]
    fn penrose_is_half_diosi() {
        let k = k();
        let (a, b) = ApparatusSpec::salart2008().mirror_pair();
        let d = dp_tau(&a, &b, DpVariant::Diosi, &k).unwrap().tau;
        let p = dp_tau(&a, &b, DpVariant::Penrose, &k).unwrap().tau;
        assert_eq!(p, d / 2.0);
    }

    #[test]
    fn preset_names_round_trip() {
        for m in ModelPreset::ALL {
            assert_eq!(m.name().parse::<ModelPreset>().unwrap(), m);
        }
        assert!("grw".parse::<ModelPreset>().is_err());
    }

    #[test]
    fn single_precision_estimates() {
        let k = PhysicalConstants::<f32>::default();
        let p = CollapseParams::<f32>::standard();
        let t = grw_tau(&p, 5.04e22, 12.6e-9).unwrap().tau;
        assert!((t - 2.0e-4).abs() / 2.0e-4 < 0.01);
        let t = csl_tau(&p, 1e17, 6e-6).unwrap().tau;
        assert!((t - 4.77e-11).abs() / 4.77e-11 < 1e-3);
        let spec = ApparatusSpec::<f32>::salart2008();
        assert!((sliver_nucleons(&spec, &k) - 1.011e17).abs() / 1.011e17 < 1e-3);
    }
}

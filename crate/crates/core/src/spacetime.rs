//! Minkowski causal geometry in a single Earth-centered inertial frame.
//!
//! Intervals use the timelike-positive convention `s² = c²Δt² − |Δx|²`.
//! Earth is a sphere whose diameter comes from [`PhysicalConstants`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::num::{all_finite, lit, norm3, norm3_sq, sub3, Real, Vec3};

/// Relative tolerance on `s²` under which a pair of events counts as lightlike.
pub const LIGHTLIKE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConstants<T> {
    #[serde(rename = "c_m_per_s")]
    pub c: T,
    #[serde(rename = "hbar_j_s")]
    pub hbar: T,
    #[serde(rename = "g_m3_per_kg_s2")]
    pub g: T,
    #[serde(rename = "nucleon_mass_kg")]
    pub nucleon_mass: T,
    #[serde(rename = "earth_diameter_m")]
    pub earth_diameter: T,
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self {
            c: lit(2.997_924_58e8),
            hbar: lit(1.054_572e-34),
            g: lit(6.674e-11),
            nucleon_mass: lit(1.660_54e-27),
            earth_diameter: lit(1.24e7),
        }
    }
}

impl<T: Real> PhysicalConstants<T> {
    pub fn earth_radius(&self) -> T {
        self.earth_diameter / lit(2.0)
    }

    /// Names the first constant that is not strictly positive and finite.
    pub fn first_invalid(&self) -> Option<&'static str> {
        [
            ("c_m_per_s", self.c),
            ("hbar_j_s", self.hbar),
            ("g_m3_per_kg_s2", self.g),
            ("nucleon_mass_kg", self.nucleon_mass),
            ("earth_diameter_m", self.earth_diameter),
        ]
        .into_iter()
        .find(|(_, v)| !(v.is_finite() && *v > T::zero()))
        .map(|(k, _)| k)
    }
}

/// A point in spacetime: coordinate time and position in the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeEvent<T> {
    #[serde(rename = "t_s")]
    pub t: T,
    #[serde(rename = "pos_m")]
    pub pos: Vec3<T>,
}

impl<T: Real> SpacetimeEvent<T> {
    pub fn new(t: T, pos: Vec3<T>) -> Self {
        Self { t, pos }
    }

    pub fn at_origin(t: T) -> Self {
        Self::new(t, [T::zero(); 3])
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && all_finite(&self.pos)
    }
}

/// Which of two events comes first in frame time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeOrder {
    FirstEarlier,
    SecondEarlier,
    Simultaneous,
}

impl TimeOrder {
    pub fn reversed(self) -> Self {
        match self {
            TimeOrder::FirstEarlier => TimeOrder::SecondEarlier,
            TimeOrder::SecondEarlier => TimeOrder::FirstEarlier,
            TimeOrder::Simultaneous => TimeOrder::Simultaneous,
        }
    }
}

/// Causal relation between two events. Spacelike pairs carry no ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalClass {
    Timelike(TimeOrder),
    Lightlike(TimeOrder),
    Spacelike,
}

impl CausalClass {
    pub fn is_spacelike(self) -> bool {
        matches!(self, CausalClass::Spacelike)
    }

    /// Lightlike pairs count as ordered: a signal can connect them.
    pub fn is_causally_ordered(self) -> bool {
        !self.is_spacelike()
    }

    pub fn order(self) -> Option<TimeOrder> {
        match self {
            CausalClass::Timelike(o) | CausalClass::Lightlike(o) => Some(o),
            CausalClass::Spacelike => None,
        }
    }

    /// Same class with the arguments swapped.
    pub fn reversed(self) -> Self {
        match self {
            CausalClass::Timelike(o) => CausalClass::Timelike(o.reversed()),
            CausalClass::Lightlike(o) => CausalClass::Lightlike(o.reversed()),
            CausalClass::Spacelike => CausalClass::Spacelike,
        }
    }

    /// Stable token used in trial logs.
    pub fn label(self) -> &'static str {
        match self {
            CausalClass::Spacelike => "spacelike",
            CausalClass::Timelike(TimeOrder::FirstEarlier) => "timelike_first",
            CausalClass::Timelike(TimeOrder::SecondEarlier) => "timelike_second",
            CausalClass::Timelike(TimeOrder::Simultaneous) => "timelike_simultaneous",
            CausalClass::Lightlike(TimeOrder::FirstEarlier) => "lightlike_first",
            CausalClass::Lightlike(TimeOrder::SecondEarlier) => "lightlike_second",
            CausalClass::Lightlike(TimeOrder::Simultaneous) => "lightlike_simultaneous",
        }
    }
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A fixed spatial location together with a closed time interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationWindow<T> {
    #[serde(rename = "pos_m")]
    pub pos: Vec3<T>,
    #[serde(rename = "t_start_s")]
    pub t_start: T,
    #[serde(rename = "t_end_s")]
    pub t_end: T,
}

impl<T: Real> StationWindow<T> {
    pub fn new(pos: Vec3<T>, t_start: T, t_end: T) -> Result<Self, GeometryError> {
        if !(all_finite(&pos) && t_start.is_finite() && t_end.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if t_start > t_end {
            return Err(GeometryError::InvertedWindow {
                start: t_start.to_f64().unwrap_or(f64::NAN),
                end: t_end.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { pos, t_start, t_end })
    }

    pub fn instant(e: SpacetimeEvent<T>) -> Self {
        Self {
            pos: e.pos,
            t_start: e.t,
            t_end: e.t,
        }
    }

    pub fn duration(&self) -> T {
        self.t_end - self.t_start
    }
}

/// Outcome of a window-pair separation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Separation<T> {
    pub spacelike: bool,
    /// `D/c` minus the largest time offset between the windows, seconds.
    pub margin: T,
}

/// Latitude/longitude/altitude on the spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoPoint<T> {
    #[serde(rename = "lat_rad")]
    pub latitude: T,
    #[serde(rename = "lon_rad")]
    pub longitude: T,
    #[serde(rename = "alt_m")]
    pub altitude: T,
}

impl<T: Real> GeoPoint<T> {
    pub fn new(latitude: T, longitude: T, altitude: T) -> Result<Self, GeometryError> {
        let g = Self {
            latitude,
            longitude,
            altitude,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn surface(latitude: T, longitude: T) -> Result<Self, GeometryError> {
        Self::new(latitude, longitude, T::zero())
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !all_finite(&[self.latitude, self.longitude, self.altitude]) {
            return Err(GeometryError::NonFinite);
        }
        if self.latitude.abs() > T::FRAC_PI_2() {
            return Err(GeometryError::Latitude(self.latitude.to_f64().unwrap_or(f64::NAN)));
        }
        if self.altitude < T::zero() {
            return Err(GeometryError::Altitude(self.altitude.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    /// Cartesian position at radius `earth_diameter/2 + altitude`.
    pub fn to_cartesian(&self, k: &PhysicalConstants<T>) -> Vec3<T> {
        let r = k.earth_radius() + self.altitude;
        let (slat, clat) = self.latitude.sin_cos();
        let (slon, clon) = self.longitude.sin_cos();
        [r * clat * clon, r * clat * slon, r * slat]
    }
}

/// Signed squared interval `c²Δt² − |Δx|²` in m².
pub fn squared_interval<T: Real>(e1: &SpacetimeEvent<T>, e2: &SpacetimeEvent<T>, k: &PhysicalConstants<T>) -> T {
    let cdt = k.c * (e2.t - e1.t);
    cdt * cdt - norm3_sq(sub3(e2.pos, e1.pos))
}

fn classify<T: Real>(c_dt: T, dist_sq: T, dt: T) -> CausalClass {
    let time_sq = c_dt * c_dt;
    let s2 = time_sq - dist_sq;
    let scale = time_sq + dist_sq;
    let order = if dt > T::zero() {
        TimeOrder::FirstEarlier
    } else if dt < T::zero() {
        TimeOrder::SecondEarlier
    } else {
        TimeOrder::Simultaneous
    };
    if s2.abs() <= lit::<T>(LIGHTLIKE_EPS) * scale {
        CausalClass::Lightlike(order)
    } else if s2 > T::zero() {
        CausalClass::Timelike(order)
    } else {
        CausalClass::Spacelike
    }
}

/// Causal class of the ordered pair `(e1, e2)`.
pub fn causal_class<T: Real>(e1: &SpacetimeEvent<T>, e2: &SpacetimeEvent<T>, k: &PhysicalConstants<T>) -> CausalClass {
    let dt = e2.t - e1.t;
    classify(k.c * dt, norm3_sq(sub3(e2.pos, e1.pos)), dt)
}

/// Whether every event of `w1` is spacelike to every event of `w2`.
///
/// The extremal pair is the one with the largest time offset, so only that
/// pair is classified. Co-located windows are never spacelike.
pub fn windows_spacelike<T: Real>(
    w1: &StationWindow<T>,
    w2: &StationWindow<T>,
    k: &PhysicalConstants<T>,
) -> Separation<T> {
    let dist_sq = norm3_sq(sub3(w1.pos, w2.pos));
    let dist = dist_sq.sqrt();
    let worst_dt = (w1.t_end - w2.t_start).abs().max((w2.t_end - w1.t_start).abs());
    let margin = dist / k.c - worst_dt;
    let extremal = classify(k.c * worst_dt, dist_sq, worst_dt);
    Separation {
        spacelike: margin > T::zero() && extremal.is_spacelike(),
        margin,
    }
}

pub fn geo_to_event<T: Real>(g: &GeoPoint<T>, t: T, k: &PhysicalConstants<T>) -> SpacetimeEvent<T> {
    SpacetimeEvent::new(t, g.to_cartesian(k))
}

/// Straight-line distance through the Earth between two geographic points.
pub fn chord_distance<T: Real>(g1: &GeoPoint<T>, g2: &GeoPoint<T>, k: &PhysicalConstants<T>) -> T {
    norm3(sub3(g1.to_cartesian(k), g2.to_cartesian(k)))
}

pub fn light_time<T: Real>(distance: T, k: &PhysicalConstants<T>) -> T {
    distance / k.c
}

pub fn distance<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    norm3(sub3(a, b))
}

//! Singlet-state Bell trials: closed-form correlations, the local sign model,
//! the Monte Carlo engine and CHSH statistics.

mod engine;
mod stats;

pub use engine::{run_trials, CollapseSite, CollapseTiming, TrialRecord, TrialSetup};
pub use stats::{azuma_ln_p_bound, azuma_p_bound, chsh_estimate, ChshAccumulator, ChshResult};

use serde::{Deserialize, Serialize};

use crate::num::{lit, Real};

/// Measurement station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wing {
    Left,
    Right,
}

/// ±1 measurement result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    fn from_sign<T: Real>(x: T) -> Self {
        if x >= T::zero() {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// Two analyzer angles per wing, radians in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[serde(deny_unknown_fields)]
pub struct SettingsSpec<T> {
    #[serde(rename = "left_rad")]
    pub left: [T; 2],
    #[serde(rename = "right_rad")]
    pub right: [T; 2],
}

impl<T: Real> SettingsSpec<T> {
    /// `(0, π/2; π/4, 3π/4)`: maximal quantum CHSH value.
    pub fn optimal() -> Self {
        let q = T::FRAC_PI_4();
        Self {
            left: [T::zero(), T::FRAC_PI_2()],
            right: [q, lit::<T>(3.0) * q],
        }
    }

    pub fn angle(&self, wing: Wing, index: usize) -> T {
        match wing {
            Wing::Left => self.left[index],
            Wing::Right => self.right[index],
        }
    }

    /// Index of the first angle outside `[0, 2π)`, as `(wing, index)`.
    pub fn first_out_of_range(&self) -> Option<(Wing, usize)> {
        let tau = T::TAU();
        let bad = |x: T| !(x.is_finite() && x >= T::zero() && x < tau);
        (0..2)
            .find(|&i| bad(self.left[i]))
            .map(|i| (Wing::Left, i))
            .or_else(|| (0..2).find(|&i| bad(self.right[i])).map(|i| (Wing::Right, i)))
    }
}

impl<T: Real> Default for SettingsSpec<T> {
    fn default() -> Self {
        Self::optimal()
    }
}

/// Shared local hidden variable: an angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenVariable<T>(pub T);

/// Outcome-generating rule of a simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    /// Singlet statistics on every trial.
    #[serde(rename = "qm")]
    StandardQm,
    /// Local hidden variable when collapses are spacelike, sequential
    /// quantum sampling when they are causally ordered.
    #[serde(rename = "causal")]
    CausalCollapse,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::StandardQm => "qm",
            Engine::CausalCollapse => "causal",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qm" => Ok(Engine::StandardQm),
            "causal" => Ok(Engine::CausalCollapse),
            other => Err(format!("unknown engine '{other}' (expected qm or causal)")),
        }
    }
}

/// Which closed-form correlation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationModel {
    Qm,
    LhvSpacelike,
}

/// Singlet joint probability `P(a, b) = (1 − ab·cos δ) / 4`.
pub fn qm_joint_prob<T: Real>(delta: T, a: Outcome, b: Outcome) -> T {
    let ab = lit::<T>(f64::from(a.value() * b.value()));
    (T::one() - ab * delta.cos()) / lit(4.0)
}

/// Sign model: left gives `sign cos(θ − λ)`, right the opposite, `sign(0) = +1`.
pub fn lhv_outcome<T: Real>(lambda: HiddenVariable<T>, theta: T, wing: Wing) -> Outcome {
    let o = Outcome::from_sign((theta - lambda.0).cos());
    match wing {
        Wing::Left => o,
        Wing::Right => o.flipped(),
    }
}

/// Folds an angle difference into `[0, π]`.
pub fn fold_angle<T: Real>(delta: T) -> T {
    let r = delta.abs() % T::TAU();
    if r > T::PI() {
        T::TAU() - r
    } else {
        r
    }
}

/// `−cos δ` for the singlet, `2δ/π − 1` for the sign model.
pub fn correlation_closed_form<T: Real>(model: CorrelationModel, delta: T) -> T {
    let d = fold_angle(delta);
    match model {
        CorrelationModel::Qm => -d.cos(),
        CorrelationModel::LhvSpacelike => lit::<T>(2.0) * d / T::PI() - T::one(),
    }
}

/// `|E(1,1) − E(1,2) + E(2,1) + E(2,2)|` from the closed-form correlations.
pub fn chsh_closed_form<T: Real>(model: CorrelationModel, s: &SettingsSpec<T>) -> T {
    let e = |i: usize, j: usize| correlation_closed_form(model, s.right[j] - s.left[i]);
    (e(0, 0) - e(0, 1) + e(1, 0) + e(1, 1)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use Outcome::{Minus, Plus};

    #[test]
    fn joint_probability_examples() {
        assert_eq!(qm_joint_prob(0.0, Plus, Minus), 0.5);
        assert_eq!(qm_joint_prob(0.0, Plus, Plus), 0.0);
        for (a, b) in [(Plus, Plus), (Plus, Minus), (Minus, Plus), (Minus, Minus)] {
            assert!((qm_joint_prob(PI / 2.0, a, b) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn lhv_examples() {
        let l0 = HiddenVariable(0.0);
        assert_eq!(lhv_outcome(l0, 0.0, Wing::Left), Plus);
        assert_eq!(lhv_outcome(l0, 0.0, Wing::Right), Minus);
        assert_eq!(lhv_outcome(HiddenVariable(PI), 0.0, Wing::Left), Minus);
        assert_eq!(Outcome::from_sign(0.0), Plus);
    }

    #[test]
    fn correlation_examples() {
        let q = correlation_closed_form(CorrelationModel::Qm, PI / 4.0);
        assert!((q + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let l = correlation_closed_form(CorrelationModel::LhvSpacelike, PI / 4.0);
        assert!((l + 0.5).abs() < 1e-15);
        assert_eq!(correlation_closed_form(CorrelationModel::Qm, 0.0), -1.0);
        assert_eq!(correlation_closed_form(CorrelationModel::LhvSpacelike, 0.0), -1.0);
        // folding: −π/4 and 7π/4 behave like π/4
        for d in [-PI / 4.0, 7.0 * PI / 4.0] {
            assert!((correlation_closed_form(CorrelationModel::LhvSpacelike, d) + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_examples() {
        let s = SettingsSpec::<f64>::optimal();
        assert!((chsh_closed_form(CorrelationModel::Qm, &s) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((chsh_closed_form(CorrelationModel::LhvSpacelike, &s) - 2.0).abs() < 1e-12);
        let degenerate = SettingsSpec {
            left: [0.0, 0.0],
            right: [0.0, 0.0],
        };
        assert_eq!(chsh_closed_form(CorrelationModel::Qm, &degenerate), 2.0);
    }

    #[test]
    fn settings_range_check() {
        let mut s = SettingsSpec::<f64>::optimal();
        assert_eq!(s.first_out_of_range(), None);
        s.right[1] = 2.0 * PI;
        assert_eq!(s.first_out_of_range(), Some((Wing::Right, 1)));
        s.left[0] = -0.1;
        assert_eq!(s.first_out_of_range(), Some((Wing::Left, 0)));
    }
}

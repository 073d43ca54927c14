//! Monte Carlo Bell trials with counter-based seeding.
//!
//! Trial `i` draws all of its randomness from a ChaCha8 stream selected by
//! `(seed, i)`, so results do not depend on how trials are scheduled across
//! threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lhv_outcome, ChshAccumulator, ChshResult, Engine, HiddenVariable, Outcome, SettingsSpec, Wing};
use crate::collapse::CollapseModel;
use crate::design::{wing_collapse, ExperimentConfig};
use crate::error::{BellError, ModelError};
use crate::num::{lit, Real, Vec3};
use crate::spacetime::{causal_class, CausalClass, PhysicalConstants, SpacetimeEvent, TimeOrder};

/// How collapse instants are drawn around the expected collapse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseTiming {
    /// Exponential waiting time with mean τ.
    #[default]
    Exponential,
    /// Collapse exactly τ after actuation.
    Deterministic,
}

/// Where and when one wing's collapse happens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseSite<T> {
    /// Amplifier input event.
    pub input: SpacetimeEvent<T>,
    /// Fixed delay before the collapse clock starts (actuation).
    pub lead: T,
    /// Expected collapse time after `lead`.
    pub tau: T,
    pub timing: CollapseTiming,
}

impl<T: Real> CollapseSite<T> {
    fn sample<R: Rng>(&self, rng: &mut R) -> SpacetimeEvent<T> {
        let wait = match self.timing {
            CollapseTiming::Deterministic => self.tau,
            CollapseTiming::Exponential => {
                let u: f64 = rng.random();
                self.tau * lit::<T>(-(-u).ln_1p())
            }
        };
        SpacetimeEvent::new(self.input.t + self.lead + wait, self.input.pos)
    }
}

/// One simulated Bell trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord<T> {
    pub index: u64,
    /// Setting index per wing, 1 or 2.
    pub setting_left: u8,
    pub setting_right: u8,
    pub angle_left: T,
    pub angle_right: T,
    pub outcome_a: Outcome,
    pub outcome_b: Outcome,
    pub collapse_left: SpacetimeEvent<T>,
    pub collapse_right: SpacetimeEvent<T>,
    pub causal_class: CausalClass,
}

/// Everything the engine needs, resolved from an experiment layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSetup<T> {
    pub left: CollapseSite<T>,
    pub right: CollapseSite<T>,
    pub settings: SettingsSpec<T>,
    pub constants: PhysicalConstants<T>,
}

impl<T: Real> TrialSetup<T> {
    /// Resolves collapse sites for `model`. Human observers always collapse
    /// deterministically at the end of their perception time.
    pub fn from_config(
        config: &ExperimentConfig<T>,
        model: CollapseModel,
        timing: CollapseTiming,
    ) -> Result<Self, BellError> {
        let k = &config.constants;
        let site = |w| -> Result<CollapseSite<T>, BellError> {
            let c = wing_collapse(w, model, k)?;
            if !c.estimate.tau.is_finite() {
                return Err(ModelError::NoCollapse {
                    model: model.preset.name().to_string(),
                }
                .into());
            }
            Ok(CollapseSite {
                input: c.input,
                lead: c.lead,
                tau: c.estimate.tau,
                timing: if c.deterministic {
                    CollapseTiming::Deterministic
                } else {
                    timing
                },
            })
        };
        Ok(Self {
            left: site(&config.left)?,
            right: site(&config.right)?,
            settings: config.settings,
            constants: config.constants,
        })
    }

    fn validate(&self) -> Result<(), BellError> {
        for s in [&self.left, &self.right] {
            if !(s.tau.is_finite() && s.tau > T::zero()) {
                return Err(ModelError::NonPositiveTau {
                    tau: s.tau.to_f64().unwrap_or(f64::NAN),
                }
                .into());
            }
        }
        Ok(())
    }

    /// Simulates trial `index` of the run seeded with `seed`.
    pub fn trial(&self, engine: Engine, seed: u64, index: u64) -> TrialRecord<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);

        let set_l = if rng.random::<bool>() { 1 } else { 0 };
        let set_r = if rng.random::<bool>() { 1 } else { 0 };
        let theta_l = self.settings.left[set_l];
        let theta_r = self.settings.right[set_r];
        let delta = theta_r - theta_l;

        let collapse_left = self.left.sample(&mut rng);
        let collapse_right = self.right.sample(&mut rng);
        let class = causal_class(&collapse_left, &collapse_right, &self.constants);

        let (a, b) = match engine {
            Engine::StandardQm => sample_singlet(delta, Wing::Left, &mut rng),
            Engine::CausalCollapse if co_located(collapse_left.pos, collapse_right.pos) => {
                sample_singlet(delta, Wing::Left, &mut rng)
            }
            Engine::CausalCollapse => match class {
                CausalClass::Spacelike => {
                    let u: f64 = rng.random();
                    let lambda = HiddenVariable(lit::<T>(u) * T::TAU());
                    (
                        lhv_outcome(lambda, theta_l, Wing::Left),
                        lhv_outcome(lambda, theta_r, Wing::Right),
                    )
                }
                CausalClass::Timelike(order) | CausalClass::Lightlike(order) => match order {
                    TimeOrder::FirstEarlier | TimeOrder::Simultaneous => sample_singlet(delta, Wing::Left, &mut rng),
                    TimeOrder::SecondEarlier => sample_singlet(delta, Wing::Right, &mut rng),
                },
            },
        };

        TrialRecord {
            index,
            setting_left: set_l as u8 + 1,
            setting_right: set_r as u8 + 1,
            angle_left: theta_l,
            angle_right: theta_r,
            outcome_a: a,
            outcome_b: b,
            collapse_left,
            collapse_right,
            causal_class: class,
        }
    }

    /// All `n` trial records, in index order.
    pub fn run(&self, engine: Engine, n: u64, seed: u64) -> Result<Vec<TrialRecord<T>>, BellError> {
        if n == 0 {
            return Err(BellError::NoTrials);
        }
        self.validate()?;
        Ok((0..n).into_par_iter().map(|i| self.trial(engine, seed, i)).collect())
    }

    /// CHSH statistics of `n` trials without keeping the records.
    pub fn run_chsh(&self, engine: Engine, n: u64, seed: u64) -> Result<ChshResult<T>, BellError> {
        if n == 0 {
            return Err(BellError::NoTrials);
        }
        self.validate()?;
        let acc = (0..n)
            .into_par_iter()
            .fold(ChshAccumulator::default, |mut acc, i| {
                acc.push(&self.trial(engine, seed, i));
                acc
            })
            .reduce(ChshAccumulator::default, |a, b| a.merged(&b));
        acc.result()
    }
}

/// Runs `n` trials of `config` under `model` with exponential collapse timing.
pub fn run_trials<T: Real>(
    config: &ExperimentConfig<T>,
    model: CollapseModel,
    engine: Engine,
    n: u64,
    seed: u64,
) -> Result<Vec<TrialRecord<T>>, BellError> {
    if n == 0 {
        return Err(BellError::NoTrials);
    }
    TrialSetup::from_config(config, model, CollapseTiming::Exponential)?.run(engine, n, seed)
}

fn co_located<T: Real>(a: Vec3<T>, b: Vec3<T>) -> bool {
    a == b
}

/// Draws a singlet pair: the `first` wing gets a fair coin, the other the
/// conditional `P(x | first) = (1 − x·first·cos δ) / 2`.
fn sample_singlet<T: Real, R: Rng>(delta: T, first: Wing, rng: &mut R) -> (Outcome, Outcome) {
    let leader = if rng.random::<bool>() {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    let p_same = ((T::one() - delta.cos()) / lit(2.0)).to_f64().unwrap_or(0.5);
    let u: f64 = rng.random();
    let follower = if u < p_same { leader } else { leader.flipped() };
    match first {
        Wing::Left => (leader, follower),
        Wing::Right => (follower, leader),
    }
}

use serde::Serialize;

use super::TrialRecord;
use crate::error::BellError;
use crate::num::{lit, Real};

/// CHSH estimate with its uncertainty and a memory-robust p-value bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshResult<T> {
    /// `E(1,1) − E(1,2) + E(2,1) + E(2,2)`; negative for the singlet.
    pub s_hat: T,
    pub s_abs: T,
    /// `correlations[i][j]` is `E(i+1, j+1)`.
    pub correlations: [[T; 2]; 2],
    pub pair_counts: [[u64; 2]; 2],
    pub n: u64,
    /// Binomial standard error of `s_hat`, propagated over the four pairs.
    pub std_err: T,
    /// `4 · mean(−a·b·σ)` with `σ = −1` on pair (1,2): the pooled score
    /// oriented so that singlet violations are positive.
    pub game_score: T,
    pub p_bound: T,
    pub ln_p_bound: T,
    /// Fraction of trials whose collapse events were spacelike separated.
    pub spacelike_fraction: T,
}

/// Integer tallies of a trial stream. Merging is exact, so parallel
/// reductions give identical results for any split.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChshAccumulator {
    counts: [[u64; 2]; 2],
    product_sums: [[i64; 2]; 2],
    score_sum: i64,
    spacelike: u64,
    n: u64,
}

impl ChshAccumulator {
    pub fn push<T: Real>(&mut self, r: &TrialRecord<T>) {
        let i = usize::from(r.setting_left - 1);
        let j = usize::from(r.setting_right - 1);
        let ab = i64::from(r.outcome_a.value() * r.outcome_b.value());
        let sigma = if (i, j) == (0, 1) { -1 } else { 1 };
        self.counts[i][j] += 1;
        self.product_sums[i][j] += ab;
        self.score_sum -= ab * sigma;
        self.spacelike += u64::from(r.causal_class.is_spacelike());
        self.n += 1;
    }

    pub fn merged(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.counts[i][j] += other.counts[i][j];
                out.product_sums[i][j] += other.product_sums[i][j];
            }
        }
        out.score_sum += other.score_sum;
        out.spacelike += other.spacelike;
        out.n += other.n;
        out
    }

    #[allow(clippy::needless_range_loop)]
    pub fn result<T: Real>(&self) -> Result<ChshResult<T>, BellError> {
        let mut correlations = [[T::zero(); 2]; 2];
        let mut variance = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let n = self.counts[i][j];
                if n == 0 {
                    return Err(BellError::MissingSettingPair {
                        left: i as u8 + 1,
                        right: j as u8 + 1,
                    });
                }
                let e = lit::<T>(self.product_sums[i][j] as f64) / lit(n as f64);
                correlations[i][j] = e;
                variance = variance + (T::one() - e * e) / lit(n as f64);
            }
        }
        let e = correlations;
        let s_hat = e[0][0] - e[0][1] + e[1][0] + e[1][1];
        let n = lit::<T>(self.n as f64);
        let game_score = lit::<T>(4.0) * lit::<T>(self.score_sum as f64) / n;
        Ok(ChshResult {
            s_hat,
            s_abs: s_hat.abs(),
            correlations,
            pair_counts: self.counts,
            n: self.n,
            std_err: variance.sqrt(),
            game_score,
            p_bound: azuma_p_bound(game_score, self.n),
            ln_p_bound: azuma_ln_p_bound(game_score, self.n),
            spacelike_fraction: lit::<T>(self.spacelike as f64) / n,
        })
    }
}

/// CHSH statistics of a recorded trial sequence.
pub fn chsh_estimate<'a, T: Real>(
    records: impl IntoIterator<Item = &'a TrialRecord<T>>,
) -> Result<ChshResult<T>, BellError> {
    let mut acc = ChshAccumulator::default();
    for r in records {
        acc.push(r);
    }
    acc.result()
}

/// `ln` of the Azuma–Hoeffding bound: `−n (s − 2)² / 32` above 2, else 0.
pub fn azuma_ln_p_bound<T: Real>(s_hat: T, n: u64) -> T {
    let two = lit::<T>(2.0);
    if s_hat > two {
        let excess = s_hat - two;
        -lit::<T>(n as f64) * excess * excess / lit(32.0)
    } else {
        T::zero()
    }
}

/// Probability that any local model, memory included, scores `s_hat` or more
/// over `n` uniformly-set trials. Clamped to the smallest positive normal.
pub fn azuma_p_bound<T: Real>(s_hat: T, n: u64) -> T {
    azuma_ln_p_bound(s_hat, n).exp().max(T::min_positive_value())
}

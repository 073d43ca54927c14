//! Streaming trial runs with an optional CSV log.

use std::io::Write;

use rayon::prelude::*;

use crate::bell::{ChshAccumulator, ChshResult, Engine, TrialRecord, TrialSetup};
use crate::error::BellError;

/// Trials generated per parallel batch.
const BATCH: u64 = 1 << 16;

pub const CSV_HEADER: [&str; 14] = [
    "trial", "setL", "setR", "a", "b", "tL", "xL", "yL", "zL", "tR", "xR", "yR", "zR", "class",
];

fn row(r: &TrialRecord<f64>) -> [String; 14] {
    let (l, rr) = (&r.collapse_left, &r.collapse_right);
    [
        r.index.to_string(),
        r.setting_left.to_string(),
        r.setting_right.to_string(),
        r.outcome_a.value().to_string(),
        r.outcome_b.value().to_string(),
        l.t.to_string(),
        l.pos[0].to_string(),
        l.pos[1].to_string(),
        l.pos[2].to_string(),
        rr.t.to_string(),
        rr.pos[0].to_string(),
        rr.pos[1].to_string(),
        rr.pos[2].to_string(),
        r.causal_class.label().to_string(),
    ]
}

/// Runs `n` trials in batches, feeding each record in index order to the
/// CSV writer when one is given, and returns the CHSH statistics.
pub fn run_logged<W: Write>(
    setup: &TrialSetup<f64>,
    engine: Engine,
    n: u64,
    seed: u64,
    csv: Option<W>,
) -> Result<ChshResult<f64>, ShellIoError> {
    if n == 0 {
        return Err(BellError::NoTrials.into());
    }
    let Some(out) = csv else {
        return Ok(setup.run_chsh(engine, n, seed)?);
    };
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    let mut acc = ChshAccumulator::default();
    let mut start = 0;
    while start < n {
        let end = (start + BATCH).min(n);
        let batch: Vec<_> = (start..end)
            .into_par_iter()
            .map(|i| setup.trial(engine, seed, i))
            .collect();
        for r in &batch {
            acc.push(r);
            writer.write_record(row(r))?;
        }
        start = end;
    }
    writer.flush()?;
    Ok(acc.result()?)
}

/// Trial-run failure: engine errors or an unwritable log.
#[derive(Debug, thiserror::Error)]
pub enum ShellIoError {
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error("writing trial log: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing trial log: {0}")]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::CollapseTiming;
    use crate::collapse::ModelPreset;
    use crate::design::scenarios::salart2008;

    #[test]
    fn log_matches_in_memory_statistics() {
        let setup =
            TrialSetup::from_config(&salart2008(), ModelPreset::DpDiosi.into(), CollapseTiming::Exponential).unwrap();
        let mut buf = Vec::new();
        let logged = run_logged(&setup, Engine::CausalCollapse, 2000, 7, Some(&mut buf)).unwrap();
        let direct = setup.run_chsh(Engine::CausalCollapse, 2000, 7).unwrap();
        assert_eq!(logged, direct);
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.count(), 2000);
    }
}

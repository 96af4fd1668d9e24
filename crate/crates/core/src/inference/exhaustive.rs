//! Is everything worth remembering already in the current state?
//!
//! For each state, the outcome of the next step is cross-tabulated against
//! the outcomes of the previous `lag` steps, over the moments spent in that
//! state, and tested for independence.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::edm::{Dynamics, EventStream};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::text::format_set;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExhaustivenessConfig {
    pub lag: usize,
    pub significance: f64,
    /// States with fewer samples are not tested.
    pub min_samples: usize,
}

impl Default for ExhaustivenessConfig {
    fn default() -> Self {
        ExhaustivenessConfig { lag: 1, significance: 0.05, min_samples: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExhaustiveVerdict {
    ExhaustiveAtLag(usize),
    PastDependent,
    /// No state had enough samples.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson's test of independence on a contingency table (rows of equal
/// length). Yates' continuity correction is applied to 2x2 tables. A table
/// with a single non-empty row or column carries no evidence of dependence
/// and yields `p = 1`.
pub fn chi_square_independence(table: &[Vec<f64>]) -> ChiSquare {
    let rows: Vec<&Vec<f64>> = table.iter().filter(|r| r.iter().sum::<f64>() > 0.0).collect();
    let width = table.first().map_or(0, Vec::len);
    let col_sums: Vec<f64> = (0..width).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
    let cols: Vec<usize> = (0..width).filter(|&j| col_sums[j] > 0.0).collect();
    if rows.len() < 2 || cols.len() < 2 {
        return ChiSquare { statistic: 0.0, df: 0, p_value: 1.0 };
    }
    let total: f64 = col_sums.iter().sum();
    let yates = if rows.len() == 2 && cols.len() == 2 { 0.5 } else { 0.0 };
    let mut statistic = 0.0;
    for r in &rows {
        let row_sum: f64 = r.iter().sum();
        for &j in &cols {
            let expected = row_sum * col_sums[j] / total;
            let diff = ((r[j] - expected).abs() - yates).max(0.0);
            statistic += diff * diff / expected;
        }
    }
    let df = (rows.len() - 1) * (cols.len() - 1);
    let p_value = ChiSquared::new(df as f64).map(|d| d.sf(statistic)).unwrap_or(1.0);
    ChiSquare { statistic, df, p_value }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateTest {
    pub state: Label,
    pub samples: usize,
    pub rows: usize,
    pub cols: usize,
    pub test: ChiSquare,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustivenessReport {
    pub verdict: ExhaustiveVerdict,
    /// Smallest p-value over the tested states (1 when none was tested).
    pub worst_p: f64,
    /// Statistic of the state with the smallest p-value.
    pub statistic: f64,
    /// Per-state threshold after the Bonferroni correction.
    pub corrected_significance: f64,
    pub states: Vec<StateTest>,
}

pub fn exhaustiveness_test(
    model: &dyn Dynamics,
    moment_path: &[usize],
    stream: &EventStream,
    config: &ExhaustivenessConfig,
) -> Result<ExhaustivenessReport> {
    if config.lag == 0 {
        return Err(Error::Range("lag must be at least 1".into()));
    }
    if !(config.significance > 0.0 && config.significance < 1.0) {
        return Err(Error::Range(format!("significance {} is outside (0, 1)", config.significance)));
    }
    if moment_path.len() != stream.steps() + 1 {
        return Err(Error::input("model path and stream lengths differ"));
    }
    let outcomes: Vec<String> = stream.per_step().iter().map(format_set).collect();
    let n = outcomes.len();
    // state -> past summary -> next outcome -> count
    let mut tables: BTreeMap<usize, BTreeMap<String, BTreeMap<&str, usize>>> = BTreeMap::new();
    for t in config.lag..n {
        let past = outcomes[t - config.lag..t].join("|");
        *tables
            .entry(moment_path[t])
            .or_default()
            .entry(past)
            .or_default()
            .entry(outcomes[t].as_str())
            .or_default() += 1;
    }
    let mut states = Vec::new();
    for (&state, table) in &tables {
        let samples: usize = table.values().flat_map(|r| r.values()).sum();
        if samples < config.min_samples {
            continue;
        }
        let columns: Vec<&str> = {
            let mut c: Vec<&str> = table.values().flat_map(|r| r.keys().copied()).collect();
            c.sort_unstable();
            c.dedup();
            c
        };
        let matrix: Vec<Vec<f64>> = table
            .values()
            .map(|r| columns.iter().map(|c| r.get(c).copied().unwrap_or(0) as f64).collect())
            .collect();
        states.push(StateTest {
            state: model.config_label(state),
            samples,
            rows: matrix.len(),
            cols: columns.len(),
            test: chi_square_independence(&matrix),
        });
    }
    if states.is_empty() {
        return Ok(ExhaustivenessReport {
            verdict: ExhaustiveVerdict::Inconclusive,
            worst_p: 1.0,
            statistic: 0.0,
            corrected_significance: config.significance,
            states,
        });
    }
    let corrected = config.significance / states.len() as f64;
    let worst = states
        .iter()
        .min_by(|a, b| a.test.p_value.total_cmp(&b.test.p_value))
        .expect("non-empty");
    let verdict = if worst.test.p_value < corrected {
        ExhaustiveVerdict::PastDependent
    } else {
        ExhaustiveVerdict::ExhaustiveAtLag(config.lag)
    };
    Ok(ExhaustivenessReport {
        verdict,
        worst_p: worst.test.p_value,
        statistic: worst.test.statistic,
        corrected_significance: corrected,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::edm::{simulate_edm, SequencingOracle};
    use crate::seed::Seed;

    fn alternating(n: usize) -> EventStream {
        let per: Vec<&[&str]> = (0..n).map(|i| if i % 2 == 0 { &["a"][..] } else { &["b"][..] }).collect();
        EventStream::from_sequence(vec!["a".into(), "b".into()], &per).unwrap()
    }

    fn run(model: &dyn Dynamics, stream: &EventStream) -> ExhaustivenessReport {
        let sim = simulate_edm(model, stream, &SequencingOracle, Seed(0), model.start()).unwrap();
        exhaustiveness_test(model, &sim.moment_path(stream), stream, &ExhaustivenessConfig::default()).unwrap()
    }

    #[test]
    fn textbook_two_by_two() {
        // expected 25 everywhere, |O - E| = 5, Yates gives 4.5^2/25 * 4
        let t = chi_square_independence(&[vec![30.0, 20.0], vec![20.0, 30.0]]);
        assert!((t.statistic - 3.24).abs() < 1e-12);
        assert_eq!(t.df, 1);
        assert!((t.p_value - 0.0718).abs() < 1e-3);
    }

    #[test]
    fn degenerate_tables() {
        assert_eq!(chi_square_independence(&[vec![5.0, 7.0]]).p_value, 1.0);
        assert_eq!(chi_square_independence(&[vec![5.0, 0.0], vec![3.0, 0.0]]).p_value, 1.0);
    }

    #[test]
    fn alternating_single_state_depends_on_past() {
        let r = run(&bundled::single_state_model_ab(), &alternating(200));
        assert_eq!(r.verdict, ExhaustiveVerdict::PastDependent);
    }

    #[test]
    fn alternating_remember_last_is_exhaustive() {
        let r = run(&bundled::remember_last_model(), &alternating(200));
        assert_eq!(r.verdict, ExhaustiveVerdict::ExhaustiveAtLag(1));
    }

    #[test]
    fn short_stream_is_inconclusive() {
        let r = run(&bundled::remember_last_model(), &alternating(6));
        assert_eq!(r.verdict, ExhaustiveVerdict::Inconclusive);
    }

    #[test]
    fn parameters_are_checked() {
        let m = bundled::remember_last_model();
        let s = alternating(4);
        let bad = ExhaustivenessConfig { lag: 0, ..Default::default() };
        assert!(matches!(exhaustiveness_test(&m, &[0; 5], &s, &bad), Err(Error::Range(_))));
    }
}

//! Where am I now? Set-valued state estimation.

use std::collections::{BTreeMap, BTreeSet};

use crate::edm::{event_ids, Dynamics, EventStream, Tick};
use crate::error::Result;

use super::AbridgedModel;

fn step_set(model: &dyn Dynamics, from: &BTreeSet<usize>, events: &[usize]) -> BTreeSet<usize> {
    let mut current = from.clone();
    for &e in events {
        current = current.iter().flat_map(|&s| model.successors(s, e).into_owned()).collect();
    }
    current
}

/// The configurations consistent with `prefix`, starting from every
/// admissible start. Simultaneous events are applied in name order; a
/// configuration without an arrow for an event is dropped. An empty result
/// means the prefix contradicts the model.
pub fn estimate_state(model: &dyn Dynamics, prefix: &[Tick]) -> Result<BTreeSet<usize>> {
    let mut current: BTreeSet<usize> = model.admissible_starts().into_iter().collect();
    for tick in prefix {
        current = step_set(model, &current, &event_ids(model, &tick.events)?);
    }
    Ok(current)
}

/// The estimate at every moment `0..=steps`. With `restart`, an empty
/// estimate is replaced by the admissible starts; the number of such
/// restarts is returned alongside.
pub fn estimate_moments(
    model: &dyn Dynamics,
    stream: &EventStream,
    restart: bool,
) -> Result<(Vec<BTreeSet<usize>>, usize)> {
    let starts: BTreeSet<usize> = model.admissible_starts().into_iter().collect();
    let mut out = Vec::with_capacity(stream.steps() + 1);
    let mut current = starts.clone();
    let mut restarts = 0;
    let mut ticks = stream.ticks().iter().peekable();
    out.push(current.clone());
    for t in 1..=stream.steps() {
        if let Some(tick) = ticks.next_if(|k| k.step == t) {
            current = step_set(model, &current, &event_ids(model, &tick.events)?);
            if current.is_empty() && restart {
                current = starts.clone();
                restarts += 1;
            }
        }
        out.push(current.clone());
    }
    Ok((out, restarts))
}

/// Heuristic, frequency-weighted variant of [`estimate_state`]: mass moves
/// along arrows in proportion to how often they were traversed in
/// `counts` (plus one). Not a probability in any calibrated sense.
pub fn estimate_weighted(model: &dyn Dynamics, prefix: &[Tick], counts: &AbridgedModel) -> Result<BTreeMap<usize, f64>> {
    let starts = model.admissible_starts();
    let mut mass: BTreeMap<usize, f64> = starts.iter().map(|&s| (s, 1.0 / starts.len() as f64)).collect();
    for tick in prefix {
        for e in event_ids(model, &tick.events)? {
            let label = model.events().label(e).clone();
            let mut next: BTreeMap<usize, f64> = BTreeMap::new();
            for (&s, &m) in &mass {
                let targets = model.successors(s, e);
                let from = model.config_label(s);
                let weights: Vec<f64> = targets
                    .iter()
                    .map(|&t| {
                        let key = (from.clone(), label.clone(), model.config_label(t));
                        1.0 + counts.arrow_counts.get(&key).copied().unwrap_or(0) as f64
                    })
                    .collect();
                let total: f64 = weights.iter().sum();
                for (&t, w) in targets.iter().zip(weights) {
                    *next.entry(t).or_default() += m * w / total;
                }
            }
            let total: f64 = next.values().sum();
            if total > 0.0 {
                next.values_mut().for_each(|m| *m /= total);
            }
            mass = next;
        }
    }
    Ok(mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::label::Label;

    fn ticks(names: &[&str]) -> Vec<Tick> {
        names.iter().enumerate().map(|(i, n)| Tick::new(i + 1, [Label::from(*n)].into())).collect()
    }

    fn labels(model: &dyn Dynamics, set: &BTreeSet<usize>) -> Vec<String> {
        set.iter().map(|&c| model.config_label(c).to_string()).collect()
    }

    #[test]
    fn remember_last_knows_after_one_tick() {
        let m = bundled::remember_last_model();
        assert_eq!(labels(&m, &estimate_state(&m, &ticks(&["a"])).unwrap()), ["last_a"]);
        assert_eq!(labels(&m, &estimate_state(&m, &ticks(&["a", "b"])).unwrap()), ["last_b"]);
    }

    #[test]
    fn predictor_is_ambiguous() {
        let m = bundled::predictor_model();
        assert_eq!(labels(&m, &estimate_state(&m, &[]).unwrap()), ["1", "2"]);
        assert_eq!(labels(&m, &estimate_state(&m, &ticks(&["a", "b"])).unwrap()), ["1", "2"]);
    }

    #[test]
    fn day_night_estimates() {
        let m = bundled::day_night_model();
        assert_eq!(labels(&m, &estimate_state(&m, &[]).unwrap()), ["night", "day"]);
        assert_eq!(labels(&m, &estimate_state(&m, &ticks(&["sunset", "sunrise"])).unwrap()), ["day"]);
        assert!(estimate_state(&m, &ticks(&["sunrise", "sunrise"])).unwrap().is_empty());
    }

    #[test]
    fn moments_restart_on_contradiction() {
        let m = bundled::day_night_model();
        let s = EventStream::from_sequence(vec!["sunrise".into(), "sunset".into()], &[&["sunrise"], &["sunrise"], &[]]).unwrap();
        let (sets, restarts) = estimate_moments(&m, &s, true).unwrap();
        assert_eq!(sets.len(), 4);
        assert_eq!(restarts, 1);
        assert_eq!(sets[2].len(), 2);
        let (sets, _) = estimate_moments(&m, &s, false).unwrap();
        assert!(sets[3].is_empty());
    }

    #[test]
    fn weighted_follows_counts() {
        let m = bundled::predictor_model();
        let mut counts = AbridgedModel::default();
        counts.arrow_counts.insert(("1".into(), "a".into(), "1".into()), 8);
        let w = estimate_weighted(&m, &ticks(&["a"]), &counts).unwrap();
        assert!(w[&0] > w[&1]);
        assert!((w.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

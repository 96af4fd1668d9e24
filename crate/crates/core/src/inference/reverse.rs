//! Building an oracle alpha that induces a desired trace.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use rand::Rng as _;

use crate::edm::{Dynamics, EdmOracle, EdmQuery};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::seed::Rng;

/// "In `state`, `event` occurs in the following window with probability
/// `frequency`."
#[derive(Clone, Debug, PartialEq)]
pub struct TraceConstraint {
    pub state: Label,
    pub event: Label,
    pub frequency: f64,
}

/// A choice that no arrow could make consistent with the constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub from: usize,
    pub event: usize,
    pub chosen: usize,
    pub violated: usize,
}

/// Alpha for a fixed model. At every choice it looks at the next `window`
/// ticks of the realized future, weighs each candidate target by the
/// product of `p` (event present) or `1 - p` (absent) over the target's
/// constraints, and samples among the candidates of positive weight.
/// Without such a candidate it takes the one violating the fewest
/// constraints and records a [`Deviation`].
#[derive(Debug)]
pub struct ReverseOracle {
    constraints: BTreeMap<usize, Vec<(Label, f64)>>,
    window: usize,
    deviations: Mutex<Vec<Deviation>>,
}

impl ReverseOracle {
    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window.max(1);
        self
    }

    pub fn deviations(&self) -> Vec<Deviation> {
        self.deviations.lock().expect("deviation log poisoned").clone()
    }

    fn score(&self, target: usize, upcoming: Option<&BTreeSet<Label>>) -> (f64, usize) {
        let (Some(cs), Some(upcoming)) = (self.constraints.get(&target), upcoming) else {
            return (1.0, 0);
        };
        let mut weight = 1.0;
        let mut violated = 0;
        for (event, p) in cs {
            let w = if upcoming.contains(event) { *p } else { 1.0 - p };
            if w <= 0.0 {
                violated += 1;
            }
            weight *= w;
        }
        (weight, violated)
    }
}

impl EdmOracle for ReverseOracle {
    fn choose(&self, q: &EdmQuery<'_>, rng: &mut Rng) -> usize {
        let upcoming: Option<BTreeSet<Label>> = (!q.future.is_empty())
            .then(|| q.future.iter().take(self.window).flat_map(|t| t.events.iter().cloned()).collect());
        let scored: Vec<(usize, f64, usize)> = q
            .candidates
            .iter()
            .map(|&t| {
                let (w, v) = self.score(t, upcoming.as_ref());
                (t, w, v)
            })
            .collect();
        let total: f64 = scored.iter().map(|s| s.1).sum();
        if total > 0.0 {
            let survivors: Vec<&(usize, f64, usize)> = scored.iter().filter(|s| s.1 > 0.0).collect();
            if survivors.len() == 1 {
                return survivors[0].0;
            }
            if survivors.iter().all(|s| s.1 == survivors[0].1) {
                // equal weights: the same draw the uniform oracle makes
                return survivors[rng.random_range(0..survivors.len())].0;
            }
            let mut x = rng.random::<f64>() * total;
            for s in &survivors {
                if x < s.1 {
                    return s.0;
                }
                x -= s.1;
            }
            return survivors.last().expect("non-empty").0;
        }
        let &(chosen, _, violated) = scored.iter().min_by_key(|s| s.2).expect("candidates are never empty");
        self.deviations.lock().expect("deviation log poisoned").push(Deviation {
            from: q.config,
            event: q.event,
            chosen,
            violated,
        });
        chosen
    }
}

/// An alpha for `model` that honors `constraints` where the realized future
/// allows it. With no constraints it is the uniform oracle.
pub fn reverse_oracle(model: &dyn Dynamics, constraints: &[TraceConstraint]) -> Result<ReverseOracle> {
    let mut by_state: BTreeMap<usize, Vec<(Label, f64)>> = BTreeMap::new();
    for c in constraints {
        let s = model.require_config(&c.state)?;
        model.events().require(&c.event, "event")?;
        if !(0.0..=1.0).contains(&c.frequency) {
            return Err(Error::input(format!("frequency {} is outside [0, 1]", c.frequency)));
        }
        by_state.entry(s).or_default().push((c.event.clone(), c.frequency));
    }
    Ok(ReverseOracle { constraints: by_state, window: 1, deviations: Mutex::new(Vec::new()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::edm::{simulate_edm, EventStream, SequencingOracle, Tick};
    use crate::seed::{Seed, Stream};

    fn random_ab(n: usize, seed: u64) -> EventStream {
        let mut rng = Seed(seed).stream(Stream::Indexed(0));
        let sets = (0..n).map(|_| [Label::from(if rng.random_bool(0.5) { "a" } else { "b" })].into()).collect();
        EventStream::from_sets(vec!["a".into(), "b".into()], sets).unwrap()
    }

    fn only_a() -> Vec<TraceConstraint> {
        vec![TraceConstraint { state: "1".into(), event: "b".into(), frequency: 0.0 }]
    }

    #[test]
    fn unknown_references_are_rejected() {
        let m = bundled::predictor_model();
        let bad = [TraceConstraint { state: "7".into(), event: "a".into(), frequency: 0.0 }];
        assert!(reverse_oracle(&m, &bad).is_err());
        let bad = [TraceConstraint { state: "1".into(), event: "z".into(), frequency: 0.0 }];
        assert!(reverse_oracle(&m, &bad).is_err());
    }

    #[test]
    fn no_constraints_is_uniform() {
        let m = bundled::predictor_model();
        let s = random_ab(300, 2);
        let o = reverse_oracle(&m, &[]).unwrap();
        let a = simulate_edm(&m, &s, &o, Seed(4), 1).unwrap();
        let b = simulate_edm(&m, &s, &SequencingOracle, Seed(4), 1).unwrap();
        assert_eq!(a.path, b.path);
    }

    #[test]
    fn state_one_never_sees_b() {
        let m = bundled::predictor_model();
        let s = random_ab(1000, 3);
        let o = reverse_oracle(&m, &only_a()).unwrap();
        let sim = simulate_edm(&m, &s, &o, Seed(8), m.config_id("2").unwrap()).unwrap();
        let one = m.config_id("1").unwrap();
        let bad = s.ticks().iter().zip(&sim.path).filter(|(t, &c)| c == one && t.events.contains("b")).count();
        assert_eq!(bad, 0);
        assert!(o.deviations().is_empty());
    }

    #[test]
    fn impossible_constraint_falls_back_and_logs() {
        let m = bundled::predictor_model();
        let cs = [
            TraceConstraint { state: "1".into(), event: "b".into(), frequency: 0.0 },
            TraceConstraint { state: "2".into(), event: "b".into(), frequency: 0.0 },
        ];
        let o = reverse_oracle(&m, &cs).unwrap();
        let s = EventStream::new(
            vec!["a".into(), "b".into()],
            2,
            vec![Tick::new(1, [Label::from("a")].into()), Tick::new(2, [Label::from("b")].into())],
        )
        .unwrap();
        simulate_edm(&m, &s, &o, Seed(1), 0).unwrap();
        assert_eq!(o.deviations().len(), 1);
    }
}

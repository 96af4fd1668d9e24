use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::history::History;
use crate::label::Label;
use crate::seed::Rng;

use super::{AlphaQuery, Moment, OracleRngs, StatePath, Symbols, World};

/// A total, deterministic world: `transition(s, a)` is defined for every
/// pair, every state has an observation (`view`) and a set of incorrect
/// moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectWorld {
    states: Symbols,
    actions: Symbols,
    observations: Symbols,
    /// `[s * |A| + a]`, one-element slices so that `targets` can borrow.
    transition: Vec<[usize; 1]>,
    view: Vec<usize>,
    /// `[s * |A| + a]`
    incorrect: Vec<bool>,
    start: usize,
}

impl PerfectWorld {
    /// Builds and validates a world. Every `(state, action)` pair must appear
    /// exactly once in `transitions` and every state exactly once in `view`;
    /// states missing from `incorrect` have no incorrect moves.
    pub fn new(
        states: Vec<Label>,
        actions: Vec<Label>,
        observations: Vec<Label>,
        transitions: &[(Label, Label, Label)],
        view: &[(Label, Label)],
        incorrect: &[(Label, BTreeSet<Label>)],
        current: &str,
    ) -> Result<Self> {
        let states = Symbols::new(states)?;
        let actions = Symbols::new(actions)?;
        let observations = Symbols::new(observations)?;
        if states.is_empty() || actions.is_empty() || observations.is_empty() {
            return Err(Error::input("a world needs at least one state, action and observation"));
        }
        let n_a = actions.len();
        let mut table: Vec<Option<usize>> = vec![None; states.len() * n_a];
        for (s, a, t) in transitions {
            let si = states.require(s, "state")?;
            let ai = actions.require(a, "action")?;
            let ti = states.require(t, "state")?;
            let slot = &mut table[si * n_a + ai];
            if slot.replace(ti).is_some() {
                return Err(Error::input(format!("transition ({s}, {a}) defined twice")));
            }
        }
        let mut transition = Vec::with_capacity(table.len());
        for (i, t) in table.into_iter().enumerate() {
            match t {
                Some(t) => transition.push([t]),
                None => {
                    return Err(Error::input(format!(
                        "transition ({}, {}) is missing; a perfect world is total",
                        states.label(i / n_a),
                        actions.label(i % n_a)
                    )))
                }
            }
        }
        let mut view_table = vec![None; states.len()];
        for (s, v) in view {
            let si = states.require(s, "state")?;
            let vi = observations.require(v, "observation")?;
            if view_table[si].replace(vi).is_some() {
                return Err(Error::input(format!("view of {s} defined twice")));
            }
        }
        let view = view_table
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::input(format!("state {} has no view", states.label(i)))))
            .collect::<Result<Vec<_>>>()?;
        let mut inc = vec![false; states.len() * n_a];
        let mut seen = BTreeSet::new();
        for (s, set) in incorrect {
            let si = states.require(s, "state")?;
            if !seen.insert(si) {
                return Err(Error::input(format!("incorrect set of {s} defined twice")));
            }
            for a in set {
                inc[si * n_a + actions.require(a, "action")?] = true;
            }
        }
        let start = states.require(current, "state")?;
        Ok(PerfectWorld { states, actions, observations, transition, view, incorrect: inc, start })
    }

    pub fn transition(&self, state: usize, action: usize) -> usize {
        self.transition[state * self.actions.len() + action][0]
    }

    pub fn view(&self, state: usize) -> usize {
        self.view[state]
    }

    pub fn is_incorrect(&self, state: usize, action: usize) -> bool {
        self.incorrect[state * self.actions.len() + action]
    }

    pub fn incorrect_labels(&self, state: usize) -> BTreeSet<Label> {
        (0..self.actions.len())
            .filter(|&a| self.is_incorrect(state, a))
            .map(|a| self.actions.label(a).clone())
            .collect()
    }

    /// The same world with another current state.
    pub fn with_current(&self, state: &str) -> Result<Self> {
        let start = self.states.require(state, "state")?;
        Ok(PerfectWorld { start, ..self.clone() })
    }
}

impl World for PerfectWorld {
    fn states(&self) -> &Symbols {
        &self.states
    }

    fn actions(&self) -> &Symbols {
        &self.actions
    }

    fn observations(&self) -> &Symbols {
        &self.observations
    }

    fn start(&self) -> usize {
        self.start
    }

    fn targets(&self, state: usize, action: usize) -> &[usize] {
        &self.transition[state * self.actions.len() + action]
    }

    fn usable(&self, state: usize, action: usize) -> bool {
        !self.is_incorrect(state, action)
    }

    fn successor(&self, query: &AlphaQuery<'_>, _rng: &mut Rng) -> Result<usize> {
        Ok(self.transition(query.state, query.action))
    }

    fn enter(&self, _past: &History, state: usize, _rngs: &mut OracleRngs) -> Result<Moment> {
        let n_a = self.actions.len();
        Ok(Moment {
            observation: self.view[state],
            incorrect: self.incorrect[state * n_a..(state + 1) * n_a].to_vec(),
        })
    }

    fn incorrect_at(&self, path: &StatePath, position: usize) -> Result<BTreeSet<Label>> {
        let label = path
            .states
            .get(position)
            .ok_or_else(|| Error::input(format!("path has no position {position}")))?;
        Ok(self.incorrect_labels(self.states.require(label, "state")?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{classify_state, StateClass};

    fn l(s: &str) -> Label {
        Label::from(s)
    }

    fn labels(v: &[&str]) -> Vec<Label> {
        v.iter().map(|s| l(s)).collect()
    }

    fn tri(s: &str, a: &str, t: &str) -> (Label, Label, Label) {
        (l(s), l(a), l(t))
    }

    #[test]
    fn totality_is_enforced() {
        let r = PerfectWorld::new(
            labels(&["1", "2"]),
            labels(&["a"]),
            labels(&["v"]),
            &[tri("1", "a", "2")],
            &[(l("1"), l("v")), (l("2"), l("v"))],
            &[],
            "1",
        );
        assert!(matches!(r, Err(Error::Input(m)) if m.contains("missing")));
    }

    #[test]
    fn determinism_is_enforced() {
        let r = PerfectWorld::new(
            labels(&["1"]),
            labels(&["a"]),
            labels(&["v"]),
            &[tri("1", "a", "1"), tri("1", "a", "1")],
            &[(l("1"), l("v"))],
            &[],
            "1",
        );
        assert!(r.is_err());
    }

    #[test]
    fn incorrect_must_name_actions() {
        let r = PerfectWorld::new(
            labels(&["1"]),
            labels(&["a"]),
            labels(&["v"]),
            &[tri("1", "a", "1")],
            &[(l("1"), l("v"))],
            &[(l("1"), [l("z")].into())],
            "1",
        );
        assert!(r.is_err());
    }

    /// Three states joined by red and blue arrows: `9` is only left, `4`
    /// cannot be left, `1` keeps a usable red self-loop.
    fn sample() -> PerfectWorld {
        PerfectWorld::new(
            labels(&["1", "4", "9"]),
            labels(&["red", "blue"]),
            labels(&["c"]),
            &[
                tri("1", "red", "1"),
                tri("1", "blue", "4"),
                tri("4", "red", "4"),
                tri("4", "blue", "4"),
                tri("9", "red", "1"),
                tri("9", "blue", "9"),
            ],
            &[(l("1"), l("c")), (l("4"), l("c")), (l("9"), l("c"))],
            &[(l("4"), [l("red"), l("blue")].into()), (l("9"), [l("blue")].into())],
            "9",
        )
        .unwrap()
    }

    #[test]
    fn classification() {
        let w = sample();
        assert_eq!(classify_state(&w, "9").unwrap(), StateClass::AbsoluteBeginning);
        assert_eq!(classify_state(&w, "4").unwrap(), StateClass::SuddenDeath);
        assert_eq!(classify_state(&w, "1").unwrap(), StateClass::Ordinary);
        assert!(classify_state(&w, "7").is_err());
    }

    #[test]
    fn isolated_dead_state_reports_sudden_death() {
        // no inbound arrow and no usable outbound arrow
        let w = PerfectWorld::new(
            labels(&["x", "y"]),
            labels(&["a"]),
            labels(&["v"]),
            &[tri("x", "a", "x"), tri("y", "a", "y")],
            &[(l("x"), l("v")), (l("y"), l("v"))],
            &[(l("y"), [l("a")].into())],
            "x",
        )
        .unwrap();
        assert_eq!(classify_state(&w, "y").unwrap(), StateClass::SuddenDeath);
    }
}

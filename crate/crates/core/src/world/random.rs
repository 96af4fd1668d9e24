use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::history::{History, HistoryStep};
use crate::label::Label;
use crate::seed::Rng;

use super::{Moment, OracleRngs, StatePath, Symbols, World};

/// The part of a recorded life strictly after the queried moment. Empty
/// while a life is being simulated; populated only when replaying.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealizedFuture<'a> {
    pub suffix: &'a [HistoryStep],
}

pub struct AlphaQuery<'a> {
    pub past: &'a History,
    pub state: usize,
    pub action: usize,
    /// Targets of the arrows available for `(state, action)`, sorted.
    pub candidates: &'a [usize],
    pub future: RealizedFuture<'a>,
}

/// Oracle alpha: picks the next state among the available arrows.
pub trait AlphaOracle: Send + Sync {
    fn choose(&self, query: &AlphaQuery<'_>, rng: &mut Rng) -> usize;
}

/// Oracle beta: the observation made on entering a state. `options` are the
/// observations the world declares possible there.
pub trait BetaOracle: Send + Sync {
    fn observe(&self, past: &History, state: usize, options: &[usize], rng: &mut Rng) -> usize;
}

/// Oracle chi, restricted to the events "move `action` is incorrect now".
/// `probability` is the world's declared chance for that event.
pub trait ChiOracle: Send + Sync {
    fn incorrect(&self, past: &History, state: usize, action: usize, probability: f64, rng: &mut Rng) -> bool;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UniformAlpha;

impl AlphaOracle for UniformAlpha {
    fn choose(&self, q: &AlphaQuery<'_>, rng: &mut Rng) -> usize {
        if q.candidates.len() == 1 {
            q.candidates[0]
        } else {
            q.candidates[rng.random_range(0..q.candidates.len())]
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UniformBeta;

impl BetaOracle for UniformBeta {
    fn observe(&self, _past: &History, _state: usize, options: &[usize], rng: &mut Rng) -> usize {
        if options.len() == 1 {
            options[0]
        } else {
            options[rng.random_range(0..options.len())]
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BernoulliChi;

impl ChiOracle for BernoulliChi {
    fn incorrect(&self, _past: &History, _state: usize, _action: usize, p: f64, rng: &mut Rng) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            rng.random_bool(p)
        }
    }
}

/// The three oracles of a randomized world. They are kept separate; a
/// correlated observation/event oracle is not modeled.
#[derive(Clone)]
pub struct OracleBundle {
    pub alpha: Arc<dyn AlphaOracle>,
    pub beta: Arc<dyn BetaOracle>,
    pub chi: Arc<dyn ChiOracle>,
}

impl Default for OracleBundle {
    fn default() -> Self {
        OracleBundle { alpha: Arc::new(UniformAlpha), beta: Arc::new(UniformBeta), chi: Arc::new(BernoulliChi) }
    }
}

impl fmt::Debug for OracleBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OracleBundle")
    }
}

/// A total but nondeterministic world.
///
/// For every `(state, action)` at least one arrow exists. Each state
/// declares the observations it may show and, per action, the probability
/// that the move is incorrect at a given visit; the oracles decide.
#[derive(Clone, Debug)]
pub struct RandomWorld {
    states: Symbols,
    actions: Symbols,
    observations: Symbols,
    relation: Vec<Vec<usize>>,
    views: Vec<Vec<usize>>,
    incorrect: Vec<f64>,
    start: usize,
    oracles: OracleBundle,
}

impl RandomWorld {
    pub fn new(
        states: Vec<Label>,
        actions: Vec<Label>,
        observations: Vec<Label>,
        relation: &[(Label, Label, Label)],
        views: &[(Label, Vec<Label>)],
        incorrect: &[(Label, Vec<(Label, f64)>)],
        current: &str,
    ) -> Result<Self> {
        let states = Symbols::new(states)?;
        let actions = Symbols::new(actions)?;
        let observations = Symbols::new(observations)?;
        if states.is_empty() || actions.is_empty() || observations.is_empty() {
            return Err(Error::input("a world needs at least one state, action and observation"));
        }
        let n_a = actions.len();
        let mut rel: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); states.len() * n_a];
        for (s, a, t) in relation {
            let si = states.require(s, "state")?;
            let ai = actions.require(a, "action")?;
            rel[si * n_a + ai].insert(states.require(t, "state")?);
        }
        if let Some(i) = rel.iter().position(BTreeSet::is_empty) {
            return Err(Error::input(format!(
                "no arrow for ({}, {}); the relation must be total",
                states.label(i / n_a),
                actions.label(i % n_a)
            )));
        }
        let mut view_table: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
        for (s, opts) in views {
            let si = states.require(s, "state")?;
            if !view_table[si].is_empty() {
                return Err(Error::input(format!("views of {s} defined twice")));
            }
            let mut ids: Vec<usize> = opts.iter().map(|v| observations.require(v, "observation")).collect::<Result<_>>()?;
            ids.sort_unstable();
            ids.dedup();
            view_table[si] = ids;
        }
        if let Some(i) = view_table.iter().position(Vec::is_empty) {
            return Err(Error::input(format!("state {} has no possible observation", states.label(i))));
        }
        let mut inc = vec![0.0; states.len() * n_a];
        for (s, probs) in incorrect {
            let si = states.require(s, "state")?;
            for (a, p) in probs {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::input(format!("probability {p} for ({s}, {a}) is outside [0, 1]")));
                }
                inc[si * n_a + actions.require(a, "action")?] = *p;
            }
        }
        let start = states.require(current, "state")?;
        Ok(RandomWorld {
            states,
            actions,
            observations,
            relation: rel.into_iter().map(|s| s.into_iter().collect()).collect(),
            views: view_table,
            incorrect: inc,
            start,
            oracles: OracleBundle::default(),
        })
    }

    pub fn with_oracles(mut self, oracles: OracleBundle) -> Self {
        self.oracles = oracles;
        self
    }

    pub fn with_current(&self, state: &str) -> Result<Self> {
        let start = self.states.require(state, "state")?;
        Ok(RandomWorld { start, ..self.clone() })
    }

    pub fn oracles(&self) -> &OracleBundle {
        &self.oracles
    }

    pub fn view_options(&self, state: usize) -> &[usize] {
        &self.views[state]
    }

    pub fn incorrect_probability(&self, state: usize, action: usize) -> f64 {
        self.incorrect[state * self.actions.len() + action]
    }
}

impl World for RandomWorld {
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
        &self.relation[state * self.actions.len() + action]
    }

    fn usable(&self, state: usize, action: usize) -> bool {
        self.incorrect_probability(state, action) < 1.0
    }

    fn successor(&self, query: &super::AlphaQuery<'_>, rng: &mut Rng) -> Result<usize> {
        let next = self.oracles.alpha.choose(query, rng);
        if query.candidates.binary_search(&next).is_err() {
            return Err(Error::Oracle(format!(
                "alpha chose state {next}, which no arrow from ({}, {}) reaches",
                self.states.label(query.state),
                self.actions.label(query.action)
            )));
        }
        Ok(next)
    }

    fn enter(&self, past: &History, state: usize, rngs: &mut OracleRngs) -> Result<Moment> {
        let options = &self.views[state];
        let observation = self.oracles.beta.observe(past, state, options, &mut rngs.beta);
        if observation >= self.observations.len() {
            return Err(Error::Oracle(format!("beta produced unknown observation {observation}")));
        }
        let incorrect = (0..self.actions.len())
            .map(|a| self.oracles.chi.incorrect(past, state, a, self.incorrect_probability(state, a), &mut rngs.chi))
            .collect();
        Ok(Moment { observation, incorrect })
    }

    fn incorrect_at(&self, path: &StatePath, position: usize) -> Result<BTreeSet<Label>> {
        path.incorrect
            .get(position)
            .cloned()
            .ok_or_else(|| Error::input(format!("path records no incorrect set at position {position}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{Seed, Stream};

    fn l(s: &str) -> Label {
        Label::from(s)
    }

    fn coin() -> RandomWorld {
        RandomWorld::new(
            vec![l("h"), l("t")],
            vec![l("flip")],
            vec![l("H"), l("T")],
            &[(l("h"), l("flip"), l("h")), (l("h"), l("flip"), l("t")), (l("t"), l("flip"), l("h")), (l("t"), l("flip"), l("t"))],
            &[(l("h"), vec![l("H")]), (l("t"), vec![l("T")])],
            &[],
            "h",
        )
        .unwrap()
    }

    #[test]
    fn relation_must_be_total() {
        let r = RandomWorld::new(
            vec![l("h"), l("t")],
            vec![l("flip")],
            vec![l("H")],
            &[(l("h"), l("flip"), l("t"))],
            &[(l("h"), vec![l("H")]), (l("t"), vec![l("H")])],
            &[],
            "h",
        );
        assert!(r.is_err());
    }

    struct Rogue;
    impl AlphaOracle for Rogue {
        fn choose(&self, _q: &AlphaQuery<'_>, _rng: &mut Rng) -> usize {
            99
        }
    }

    #[test]
    fn invalid_alpha_is_an_oracle_error() {
        let w = coin().with_oracles(OracleBundle { alpha: Arc::new(Rogue), ..OracleBundle::default() });
        let past = History::new();
        let q = AlphaQuery { past: &past, state: 0, action: 0, candidates: w.targets(0, 0), future: RealizedFuture::default() };
        let err = w.successor(&q, &mut Seed(1).stream(Stream::Alpha)).unwrap_err();
        assert!(matches!(err, Error::Oracle(_)));
    }

    #[test]
    fn uniform_alpha_stays_on_arrows() {
        let w = coin();
        let past = History::new();
        let mut rng = Seed(3).stream(Stream::Alpha);
        let mut seen = BTreeSet::new();
        for _ in 0..100 {
            let q = AlphaQuery { past: &past, state: 0, action: 0, candidates: w.targets(0, 0), future: RealizedFuture::default() };
            seen.insert(w.successor(&q, &mut rng).unwrap());
        }
        assert_eq!(seen, [0, 1].into());
    }
}

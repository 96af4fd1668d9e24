//! Ground-truth worlds and the single life lived in them.
//!
//! A world is a labeled digraph: states carry an observation and a set of
//! incorrect moves, arrows carry actions. [`PerfectWorld`] is total and
//! deterministic; [`RandomWorld`] resolves nondeterminism, observations and
//! incorrect moves through the oracles of an [`OracleBundle`].

mod creature;
mod format;
mod generate;
mod perfect;
mod random;
mod run;

pub use creature::{creature_stream, window_means, ConstantPredictor, Predictor, ProbabilityInterval, RunningMeanPredictor};
pub use format::{parse_world, print_world, WorldFile};
pub use generate::{generate_world, GenerateConfig};
pub use perfect::PerfectWorld;
pub use random::{
    AlphaOracle, AlphaQuery, BernoulliChi, BetaOracle, ChiOracle, OracleBundle, RandomWorld, RealizedFuture,
    UniformAlpha, UniformBeta,
};
pub use run::{run_life, AgentView, Life, Policy, PolicySpec, RepeatLast, Scripted, UniformRandom, WorldRun};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::history::History;
use crate::label::Label;
use crate::seed::Rng;

/// An indexed alphabet of labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

impl Symbols {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if !crate::label::is_valid_label(l) {
                return Err(Error::input(format!("invalid label {l:?}")));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate label {l}")));
            }
        }
        Ok(Symbols { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str, what: &str) -> Result<usize> {
        self.id(label).ok_or_else(|| Error::input(format!("unknown {what} {label:?}")))
    }

    pub fn label(&self, id: usize) -> &Label {
        &self.labels[id]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StepOutcome {
    /// The move is incorrect here; nothing changed except the bad set.
    Rejected,
    Moved(Label),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    /// The horizon was reached (the agent was shut down).
    NaturalDeath,
    /// No correct move exists in the current state.
    SuddenDeath,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::NaturalDeath => "natural-death",
            Termination::SuddenDeath => "sudden-death",
        })
    }
}

impl FromStr for Termination {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural-death" => Ok(Termination::NaturalDeath),
            "sudden-death" => Ok(Termination::SuddenDeath),
            _ => Err(Error::input(format!("unknown termination {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateClass {
    AbsoluteBeginning,
    SuddenDeath,
    Ordinary,
}

/// World-side record of a life: the state at every moment (start included)
/// and the incorrect set realised there.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StatePath {
    pub states: Vec<Label>,
    pub incorrect: Vec<BTreeSet<Label>>,
}

impl StatePath {
    /// Number of accepted moves.
    pub fn transitions(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    /// States entered by accepted moves (the start excluded).
    pub fn entered(&self) -> &[Label] {
        self.states.get(1..).unwrap_or(&[])
    }

    pub fn print(&self) -> String {
        use std::fmt::Write as _;
        let mut out = format!("# ground-truth path positions={}\n", self.states.len());
        for (s, inc) in self.states.iter().zip(&self.incorrect) {
            let _ = writeln!(out, "{s} incorrect={}", crate::text::format_set(inc));
        }
        out
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut path = StatePath::default();
        for (line, content) in crate::text::content_lines(src) {
            let mut toks = content.split_whitespace();
            let state = crate::text::label(toks.next().unwrap_or_default(), line)?;
            let inc = match toks.next() {
                Some(t) => crate::text::set(crate::text::keyed(t, "incorrect", line)?, line)?,
                None => BTreeSet::new(),
            };
            path.states.push(state);
            path.incorrect.push(inc);
        }
        Ok(path)
    }
}

/// What oracle beta and chi produce on entering a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moment {
    pub observation: usize,
    pub incorrect: Vec<bool>,
}

impl Moment {
    pub fn all_incorrect(&self) -> bool {
        self.incorrect.iter().all(|&b| b)
    }
}

/// Per-life generators for the three oracles.
pub struct OracleRngs {
    pub alpha: Rng,
    pub beta: Rng,
    pub chi: Rng,
}

/// Common interface of the ground-truth worlds.
pub trait World: Send + Sync {
    fn states(&self) -> &Symbols;
    fn actions(&self) -> &Symbols;
    fn observations(&self) -> &Symbols;
    fn start(&self) -> usize;

    /// Targets of the arrows leaving `state` under `action`: sorted, never empty.
    fn targets(&self, state: usize, action: usize) -> &[usize];

    /// Whether the move can ever be accepted in `state`.
    fn usable(&self, state: usize, action: usize) -> bool;

    /// Oracle alpha: which arrow is taken.
    fn successor(&self, query: &AlphaQuery<'_>, rng: &mut Rng) -> Result<usize>;

    /// Oracles beta and chi on entering `state`.
    fn enter(&self, past: &History, state: usize, rngs: &mut OracleRngs) -> Result<Moment>;

    /// The complete incorrect set at path position `position`.
    fn incorrect_at(&self, path: &StatePath, position: usize) -> Result<BTreeSet<Label>>;
}

/// Absolute beginnings and sudden deaths are judged on the usable subgraph:
/// arrows whose action is incorrect at their source never get traversed.
pub fn classify_state(world: &dyn World, state: &str) -> Result<StateClass> {
    let id = world.states().require(state, "state")?;
    let n_actions = world.actions().len();
    if (0..n_actions).all(|a| !world.usable(id, a)) {
        return Ok(StateClass::SuddenDeath);
    }
    let has_inbound = (0..world.states().len()).any(|s| {
        (0..n_actions).any(|a| world.usable(s, a) && world.targets(s, a).contains(&id))
    });
    Ok(if has_inbound { StateClass::Ordinary } else { StateClass::AbsoluteBeginning })
}

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::history::{History, HistoryStep};
use crate::label::Label;
use crate::seed::{Rng, Seed, Stream};

use super::{AlphaQuery, Moment, OracleRngs, RealizedFuture, StatePath, StepOutcome, Termination, World};

/// What a policy may look at: the recorded history and the moves already
/// rejected since the last observation.
pub struct AgentView<'a> {
    pub history: &'a History,
    pub pending_bad: &'a BTreeSet<Label>,
    pub actions: &'a [Label],
}

impl AgentView<'_> {
    fn untried(&self) -> Vec<&Label> {
        self.actions.iter().filter(|a| !self.pending_bad.contains(*a)).collect()
    }

    fn uniform_untried(&self, rng: &mut Rng) -> Label {
        let untried = self.untried();
        let pool: Vec<&Label> = if untried.is_empty() { self.actions.iter().collect() } else { untried };
        pool[rng.random_range(0..pool.len())].clone()
    }
}

pub trait Policy {
    fn next_action(&mut self, view: &AgentView<'_>, rng: &mut Rng) -> Label;
}

/// Uniform over the moves not yet rejected at this moment.
#[derive(Clone, Debug, Default)]
pub struct UniformRandom;

impl Policy for UniformRandom {
    fn next_action(&mut self, view: &AgentView<'_>, rng: &mut Rng) -> Label {
        view.uniform_untried(rng)
    }
}

/// Cycles through a fixed list of attempts, rejected ones included.
#[derive(Clone, Debug)]
pub struct Scripted {
    script: Vec<Label>,
    cursor: usize,
}

impl Scripted {
    pub fn new(script: Vec<Label>) -> Result<Self> {
        if script.is_empty() {
            return Err(Error::input("a scripted policy needs at least one action"));
        }
        Ok(Scripted { script, cursor: 0 })
    }
}

impl Policy for Scripted {
    fn next_action(&mut self, _view: &AgentView<'_>, _rng: &mut Rng) -> Label {
        let a = self.script[self.cursor % self.script.len()].clone();
        self.cursor += 1;
        a
    }
}

/// Repeats the last accepted move; with probability `epsilon`, or when that
/// move was just rejected, picks uniformly among untried moves.
#[derive(Clone, Debug)]
pub struct RepeatLast {
    pub epsilon: f64,
}

impl Policy for RepeatLast {
    fn next_action(&mut self, view: &AgentView<'_>, rng: &mut Rng) -> Label {
        let explore = rng.random_bool(self.epsilon.clamp(0.0, 1.0));
        match view.history.steps().last() {
            Some(last) if !explore && !view.pending_bad.contains(&last.action) => last.action.clone(),
            _ => view.uniform_untried(rng),
        }
    }
}

/// Serializable description of the bundled policies:
/// `uniform`, `scripted:a,b,a`, `repeat:0.2`.
#[derive(Clone, Debug, PartialEq)]
pub enum PolicySpec {
    Uniform,
    Scripted(Vec<Label>),
    RepeatLast(f64),
}

impl PolicySpec {
    pub fn build(&self) -> Result<Box<dyn Policy>> {
        Ok(match self {
            PolicySpec::Uniform => Box::new(UniformRandom),
            PolicySpec::Scripted(s) => Box::new(Scripted::new(s.clone())?),
            PolicySpec::RepeatLast(e) => Box::new(RepeatLast { epsilon: *e }),
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Uniform => f.write_str("uniform"),
            PolicySpec::Scripted(s) => {
                let names: Vec<&str> = s.iter().map(|l| l.as_str()).collect();
                write!(f, "scripted:{}", names.join(","))
            }
            PolicySpec::RepeatLast(e) => write!(f, "repeat:{e}"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "uniform" if arg.is_empty() => Ok(PolicySpec::Uniform),
            "scripted" => {
                let script: Vec<Label> = arg.split(',').filter(|t| !t.is_empty()).map(Label::from).collect();
                if script.is_empty() {
                    return Err(Error::input("scripted policy needs actions, e.g. scripted:a,b"));
                }
                Ok(PolicySpec::Scripted(script))
            }
            "repeat" => {
                let e: f64 = arg.parse().map_err(|_| Error::input(format!("bad epsilon {arg:?}")))?;
                if !(0.0..=1.0).contains(&e) {
                    return Err(Error::input("epsilon must lie in [0, 1]"));
                }
                Ok(PolicySpec::RepeatLast(e))
            }
            _ => Err(Error::input(format!("unknown policy {s:?}"))),
        }
    }
}

/// A cursor over one life: the world's current state plus what the agent
/// has recorded so far.
pub struct WorldRun<'w> {
    world: &'w dyn World,
    current: usize,
    moment: Moment,
    history: History,
    pending_bad: BTreeSet<Label>,
    path: StatePath,
    rngs: OracleRngs,
}

impl<'w> WorldRun<'w> {
    pub fn new(world: &'w dyn World, seed: Seed) -> Result<Self> {
        let mut rngs = OracleRngs {
            alpha: seed.stream(Stream::Alpha),
            beta: seed.stream(Stream::Beta),
            chi: seed.stream(Stream::Chi),
        };
        let history = History::new();
        let current = world.start();
        let moment = world.enter(&history, current, &mut rngs)?;
        let mut run = WorldRun {
            world,
            current,
            moment,
            history,
            pending_bad: BTreeSet::new(),
            path: StatePath::default(),
            rngs,
        };
        run.record_position();
        Ok(run)
    }

    fn record_position(&mut self) {
        let actions = self.world.actions();
        let inc = (0..actions.len())
            .filter(|&a| self.moment.incorrect[a])
            .map(|a| actions.label(a).clone())
            .collect();
        self.path.states.push(self.world.states().label(self.current).clone());
        self.path.incorrect.push(inc);
    }

    pub fn current(&self) -> &Label {
        self.world.states().label(self.current)
    }

    pub fn moved(&self) -> usize {
        self.history.len()
    }

    /// No correct move is available at this moment.
    pub fn is_sudden_death(&self) -> bool {
        self.moment.all_incorrect()
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn pending_bad(&self) -> &BTreeSet<Label> {
        &self.pending_bad
    }

    pub fn agent_view(&self) -> AgentView<'_> {
        AgentView { history: &self.history, pending_bad: &self.pending_bad, actions: self.world.actions().labels() }
    }

    /// Attempt one move. An incorrect move leaves the state unchanged and
    /// joins the bad set of the next step.
    pub fn step(&mut self, action: &str) -> Result<StepOutcome> {
        let a = self.world.actions().require(action, "action")?;
        let label = self.world.actions().label(a).clone();
        if self.moment.incorrect[a] {
            self.pending_bad.insert(label);
            return Ok(StepOutcome::Rejected);
        }
        let query = AlphaQuery {
            past: &self.history,
            state: self.current,
            action: a,
            candidates: self.world.targets(self.current, a),
            future: RealizedFuture::default(),
        };
        let next = self.world.successor(&query, &mut self.rngs.alpha)?;
        let moment = self.world.enter(&self.history, next, &mut self.rngs)?;
        let observation = self.world.observations().label(moment.observation).clone();
        self.history.push(HistoryStep {
            bad_before: std::mem::take(&mut self.pending_bad),
            action: label,
            observation: observation.clone(),
        });
        self.current = next;
        self.moment = moment;
        self.record_position();
        Ok(StepOutcome::Moved(observation))
    }

    pub fn finish(self) -> (History, StatePath) {
        (self.history, self.path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Life {
    pub history: History,
    /// Ground truth, invisible to the agent.
    pub path: StatePath,
    pub cause: Termination,
}

/// Live one life: step until `horizon` moves were accepted or the current
/// state has no correct move. Deterministic in `(world, policy, seed)`.
pub fn run_life(world: &dyn World, policy: &mut dyn Policy, horizon: usize, seed: Seed) -> Result<Life> {
    let mut run = WorldRun::new(world, seed)?;
    let mut policy_rng = seed.stream(Stream::Policy);
    let stuck_limit = 16 * world.actions().len() + 16;
    let mut rejected_in_a_row = 0;
    let cause = loop {
        if run.is_sudden_death() {
            break Termination::SuddenDeath;
        }
        if run.moved() >= horizon {
            break Termination::NaturalDeath;
        }
        let action = policy.next_action(&run.agent_view(), &mut policy_rng);
        match run.step(&action)? {
            StepOutcome::Rejected => {
                rejected_in_a_row += 1;
                if rejected_in_a_row > stuck_limit {
                    return Err(Error::input(format!(
                        "policy made {rejected_in_a_row} rejected attempts in a row in state {}",
                        run.current()
                    )));
                }
            }
            StepOutcome::Moved(_) => rejected_in_a_row = 0,
        }
    };
    let (history, path) = run.finish();
    Ok(Life { history, path, cause })
}

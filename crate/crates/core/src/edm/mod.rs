//! Event-driven models.
//!
//! Arrows are labeled by events instead of actions, so a model only moves
//! when something happens. A tick may carry several simultaneous events;
//! the oracle decides whether they are applied in sequence or one obscures
//! the others. A singleton event with no arrow leaves the model in place and
//! is reported as a notice: the stream contradicts the model there.

mod format;
mod stream;
mod variables;

pub use format::{parse_model, print_model};
pub use stream::{project_events, EventStream, Tick};
pub use variables::{flatten, Evaluation, RuleSpec, UpdateRule, Variable, VariablesModel, DEFAULT_FLATTEN_BOUND, MAX_CONFIGS};

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::seed::{Rng, Seed, Stream};
use crate::world::Symbols;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Visible,
    SemiVisible,
    Invisible,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Visible => "visible",
            EventKind::SemiVisible => "semivisible",
            EventKind::Invisible => "invisible",
        })
    }
}

impl FromStr for EventKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "visible" => Ok(EventKind::Visible),
            "semivisible" => Ok(EventKind::SemiVisible),
            "invisible" => Ok(EventKind::Invisible),
            _ => Err(Error::input(format!("unknown event kind {s:?}"))),
        }
    }
}

/// A candidate description of (part of) the world: states joined by
/// event-labeled arrows. Missing arrows are allowed and mean "this event
/// does not happen here".
#[derive(Clone, Debug, PartialEq)]
pub struct EventDrivenModel {
    states: Symbols,
    outside: Option<usize>,
    events: Symbols,
    kinds: Vec<EventKind>,
    /// `[s * |E| + e]`, sorted targets.
    arrows: Vec<Vec<usize>>,
    expected: Vec<Option<Label>>,
    start: usize,
}

impl EventDrivenModel {
    /// `start` defaults to the outside state when there is one, else to
    /// the first state.
    pub fn new(
        states: Vec<Label>,
        outside: Option<&str>,
        events: Vec<(Label, EventKind)>,
        arrows: &[(Label, Label, Label)],
        expected: &[(Label, Label)],
        start: Option<&str>,
    ) -> Result<Self> {
        let states = Symbols::new(states)?;
        if states.is_empty() {
            return Err(Error::input("a model needs at least one state"));
        }
        let (names, kinds): (Vec<Label>, Vec<EventKind>) = events.into_iter().unzip();
        let events = Symbols::new(names)?;
        let outside = outside.map(|o| states.require(o, "outside state")).transpose()?;
        let n_e = events.len();
        let mut table: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); states.len() * n_e];
        for (s, e, t) in arrows {
            let si = states.require(s, "state")?;
            let ei = events.require(e, "event")?;
            table[si * n_e + ei].insert(states.require(t, "state")?);
        }
        let mut exp = vec![None; states.len()];
        for (s, v) in expected {
            let si = states.require(s, "state")?;
            if exp[si].replace(v.clone()).is_some() {
                return Err(Error::input(format!("expected observation of {s} given twice")));
            }
        }
        let start = match start {
            Some(s) => states.require(s, "state")?,
            None => outside.unwrap_or(0),
        };
        Ok(EventDrivenModel {
            states,
            outside,
            events,
            kinds,
            arrows: table.into_iter().map(|s| s.into_iter().collect()).collect(),
            expected: exp,
            start,
        })
    }

    pub fn states(&self) -> &Symbols {
        &self.states
    }

    pub fn events(&self) -> &Symbols {
        &self.events
    }

    pub fn kind(&self, event: usize) -> EventKind {
        self.kinds[event]
    }

    pub fn outside(&self) -> Option<usize> {
        self.outside
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn expected_observation(&self, state: usize) -> Option<&Label> {
        self.expected[state].as_ref()
    }

    pub fn targets(&self, state: usize, event: usize) -> &[usize] {
        &self.arrows[state * self.events.len() + event]
    }

    /// All arrows as `(from, event, to)`, ordered by source, event, target.
    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n_e = self.events.len();
        self.arrows
            .iter()
            .enumerate()
            .flat_map(move |(i, ts)| ts.iter().map(move |&t| (i / n_e, i % n_e, t)))
    }

    /// "Do I see the object now?"
    pub fn is_visible_state(&self, state: usize) -> bool {
        self.outside != Some(state)
    }

    pub fn with_start(&self, state: &str) -> Result<Self> {
        let start = self.states.require(state, "state")?;
        Ok(EventDrivenModel { start, ..self.clone() })
    }
}

/// What a simulation needs from a model: configurations (states, or states
/// paired with evaluations) and the successors under one event.
pub trait Dynamics: Send + Sync {
    fn configs(&self) -> usize;
    fn config_label(&self, config: usize) -> Label;
    fn config_id(&self, label: &str) -> Option<usize>;
    fn events(&self) -> &Symbols;
    /// Sorted, possibly empty.
    fn successors(&self, config: usize, event: usize) -> Cow<'_, [usize]>;
    fn start(&self) -> usize;
    /// Where a life may begin when nothing is known: the outside state if
    /// the model has one, otherwise anywhere.
    fn admissible_starts(&self) -> Vec<usize>;

    fn require_config(&self, label: &str) -> Result<usize> {
        self.config_id(label).ok_or_else(|| Error::input(format!("unknown model state {label:?}")))
    }
}

impl Dynamics for EventDrivenModel {
    fn configs(&self) -> usize {
        self.states.len()
    }

    fn config_label(&self, config: usize) -> Label {
        self.states.label(config).clone()
    }

    fn config_id(&self, label: &str) -> Option<usize> {
        self.states.id(label)
    }

    fn events(&self) -> &Symbols {
        &self.events
    }

    fn successors(&self, config: usize, event: usize) -> Cow<'_, [usize]> {
        Cow::Borrowed(self.targets(config, event))
    }

    fn start(&self) -> usize {
        self.start
    }

    fn admissible_starts(&self) -> Vec<usize> {
        match self.outside {
            Some(o) => vec![o],
            None => (0..self.states.len()).collect(),
        }
    }
}

/// Arguments of one arrow choice.
pub struct EdmQuery<'a> {
    pub config: usize,
    pub event: usize,
    /// Sorted targets of the available arrows; at least one.
    pub candidates: &'a [usize],
    /// Ticks already processed, the current one excluded.
    pub past: &'a [Tick],
    /// Ticks after the current one; empty online.
    pub future: &'a [Tick],
}

/// Oracle alpha of an event-driven model.
pub trait EdmOracle: Send + Sync {
    /// Simultaneous events in the order they take effect. `events` is
    /// sorted by name; dropping some of them means they were obscured.
    fn arrange(&self, _config: usize, events: &[usize], _rng: &mut Rng) -> Vec<usize> {
        events.to_vec()
    }

    fn choose(&self, query: &EdmQuery<'_>, rng: &mut Rng) -> usize;
}

fn uniform(candidates: &[usize], rng: &mut Rng) -> usize {
    if candidates.len() == 1 {
        candidates[0]
    } else {
        candidates[rng.random_range(0..candidates.len())]
    }
}

/// Uniform arrow choice; simultaneous events applied in name order.
#[derive(Clone, Copy, Debug, Default)]
pub struct SequencingOracle;

impl EdmOracle for SequencingOracle {
    fn choose(&self, q: &EdmQuery<'_>, rng: &mut Rng) -> usize {
        uniform(q.candidates, rng)
    }
}

/// Uniform arrow choice; of simultaneous events only the first by name
/// takes effect.
#[derive(Clone, Copy, Debug, Default)]
pub struct ObscuringOracle;

impl EdmOracle for ObscuringOracle {
    fn arrange(&self, _config: usize, events: &[usize], _rng: &mut Rng) -> Vec<usize> {
        events.first().copied().into_iter().collect()
    }

    fn choose(&self, q: &EdmQuery<'_>, rng: &mut Rng) -> usize {
        uniform(q.candidates, rng)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Traversal {
    pub from: usize,
    pub event: usize,
    pub to: usize,
}

/// A singleton event with no arrow from the configuration it hit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NoArrow {
    pub config: usize,
    pub event: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Advance {
    pub config: usize,
    pub traversals: Vec<Traversal>,
    pub notices: Vec<NoArrow>,
}

/// Context of an advance: the surrounding ticks, for oracles that look at them.
#[derive(Clone, Copy, Debug, Default)]
pub struct TickContext<'a> {
    pub past: &'a [Tick],
    pub future: &'a [Tick],
}

pub fn event_ids(model: &dyn Dynamics, events: &BTreeSet<Label>) -> Result<Vec<usize>> {
    // BTreeSet iteration is name order, which is the documented sequencing order
    events
        .iter()
        .map(|e| model.events().id(e).ok_or_else(|| Error::input(format!("event {e:?} is not in the model's alphabet"))))
        .collect()
}

/// One tick of a model: no events keep it in place, one event follows an
/// arrow chosen by the oracle, several are arranged by the oracle and then
/// applied one by one.
pub fn advance(
    model: &dyn Dynamics,
    config: usize,
    events: &BTreeSet<Label>,
    oracle: &dyn EdmOracle,
    ctx: TickContext<'_>,
    rng: &mut Rng,
) -> Result<Advance> {
    let ids = event_ids(model, events)?;
    advance_ids(model, config, &ids, oracle, ctx, rng)
}

pub fn advance_ids(
    model: &dyn Dynamics,
    config: usize,
    ids: &[usize],
    oracle: &dyn EdmOracle,
    ctx: TickContext<'_>,
    rng: &mut Rng,
) -> Result<Advance> {
    let mut out = Advance { config, traversals: Vec::new(), notices: Vec::new() };
    if ids.is_empty() {
        return Ok(out);
    }
    let order = if ids.len() == 1 { ids.to_vec() } else { oracle.arrange(config, ids, rng) };
    for &e in &order {
        if !ids.contains(&e) {
            return Err(Error::Oracle(format!("oracle arranged event {e}, which did not occur in this tick")));
        }
        let from = out.config;
        let candidates = model.successors(from, e);
        if candidates.is_empty() {
            out.notices.push(NoArrow { config: from, event: e });
            continue;
        }
        let query = EdmQuery { config: from, event: e, candidates: &candidates, past: ctx.past, future: ctx.future };
        let to = oracle.choose(&query, rng);
        if candidates.binary_search(&to).is_err() {
            return Err(Error::Oracle(format!(
                "oracle chose {} which no {} arrow from {} reaches",
                model.config_label(to.min(model.configs().saturating_sub(1))),
                model.events().label(e),
                model.config_label(from)
            )));
        }
        out.traversals.push(Traversal { from, event: e, to });
        out.config = to;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TickTraversal {
    /// Index into the stream's ticks.
    pub tick: usize,
    pub step: usize,
    pub arrow: Traversal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TickNotice {
    pub tick: usize,
    pub step: usize,
    pub notice: NoArrow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    /// Configuration before the first tick and after every tick.
    pub path: Vec<usize>,
    pub traversals: Vec<TickTraversal>,
    pub notices: Vec<TickNotice>,
}

impl Simulation {
    /// The configuration at every moment `0..=steps` of the stream.
    pub fn moment_path(&self, stream: &EventStream) -> Vec<usize> {
        let mut out = Vec::with_capacity(stream.steps() + 1);
        let mut current = self.path[0];
        let mut ticks = stream.ticks().iter().zip(&self.path[1..]).peekable();
        for t in 0..=stream.steps() {
            while let Some((tick, &after)) = ticks.peek() {
                if tick.step > t {
                    break;
                }
                current = after;
                ticks.next();
            }
            out.push(current);
        }
        out
    }

    /// Start configuration followed by the target of every traversed arrow,
    /// with the arrows' events: a path in which each hop is an arrow.
    pub fn hops(&self) -> (Vec<usize>, Vec<usize>) {
        let mut states = vec![self.path[0]];
        let mut events = Vec::with_capacity(self.traversals.len());
        for t in &self.traversals {
            states.push(t.arrow.to);
            events.push(t.arrow.event);
        }
        (states, events)
    }

    pub fn labels(&self, model: &dyn Dynamics) -> Vec<Label> {
        self.path.iter().map(|&c| model.config_label(c)).collect()
    }
}

/// Fold [`advance`] over the ticks of a stream, starting at `start`.
/// The oracle sees the remaining ticks as the realized future.
pub fn simulate_edm(
    model: &dyn Dynamics,
    stream: &EventStream,
    oracle: &dyn EdmOracle,
    seed: Seed,
    start: usize,
) -> Result<Simulation> {
    if start >= model.configs() {
        return Err(Error::input(format!("start configuration {start} is out of range")));
    }
    let mut rng = seed.stream(Stream::Alpha);
    let ticks = stream.ticks();
    let mut sim = Simulation { path: Vec::with_capacity(ticks.len() + 1), traversals: Vec::new(), notices: Vec::new() };
    sim.path.push(start);
    let mut current = start;
    for (i, tick) in ticks.iter().enumerate() {
        let ids = event_ids(model, &tick.events)?;
        let ctx = TickContext { past: &ticks[..i], future: &ticks[i + 1..] };
        let adv = advance_ids(model, current, &ids, oracle, ctx, &mut rng)?;
        sim.traversals.extend(adv.traversals.iter().map(|&arrow| TickTraversal { tick: i, step: tick.step, arrow }));
        sim.notices.extend(adv.notices.iter().map(|&notice| TickNotice { tick: i, step: tick.step, notice }));
        current = adv.config;
        sim.path.push(current);
    }
    Ok(sim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn set(names: &[&str]) -> BTreeSet<Label> {
        names.iter().map(|n| Label::from(*n)).collect()
    }

    fn rng() -> Rng {
        Seed(0).stream(Stream::Alpha)
    }

    #[test]
    fn empty_set_is_identity() {
        let m = bundled::day_night_model();
        for s in 0..m.configs() {
            let adv = advance(&m, s, &BTreeSet::new(), &SequencingOracle, TickContext::default(), &mut rng()).unwrap();
            assert_eq!(adv.config, s);
            assert!(adv.traversals.is_empty());
        }
    }

    #[test]
    fn sunrise_makes_day() {
        let m = bundled::day_night_model();
        let night = m.config_id("night").unwrap();
        let adv = advance(&m, night, &set(&["sunrise"]), &SequencingOracle, TickContext::default(), &mut rng()).unwrap();
        assert_eq!(m.config_label(adv.config).as_str(), "day");
    }

    #[test]
    fn simultaneous_events_follow_name_order() {
        let m = bundled::day_night_model();
        let night = m.config_id("night").unwrap();
        let both = advance(&m, night, &set(&["sunrise", "sunset"]), &SequencingOracle, TickContext::default(), &mut rng())
            .unwrap();
        // "sunrise" < "sunset": night -> day -> night
        let mut manual = night;
        for e in ["sunrise", "sunset"] {
            manual = advance(&m, manual, &set(&[e]), &SequencingOracle, TickContext::default(), &mut rng()).unwrap().config;
        }
        assert_eq!(both.config, manual);
        assert_eq!(m.config_label(both.config).as_str(), "night");
        // the other order leaves the model in day, with a notice for sunset at night
        let mut other = night;
        let mut notices = 0;
        for e in ["sunset", "sunrise"] {
            let adv = advance(&m, other, &set(&[e]), &SequencingOracle, TickContext::default(), &mut rng()).unwrap();
            notices += adv.notices.len();
            other = adv.config;
        }
        assert_eq!(m.config_label(other).as_str(), "day");
        assert_eq!(notices, 1);
    }

    #[test]
    fn obscuring_keeps_first_event() {
        let m = bundled::day_night_model();
        let night = m.config_id("night").unwrap();
        let adv = advance(&m, night, &set(&["sunrise", "sunset"]), &ObscuringOracle, TickContext::default(), &mut rng())
            .unwrap();
        assert_eq!(m.config_label(adv.config).as_str(), "day");
        assert_eq!(adv.traversals.len(), 1);
    }

    #[test]
    fn missing_arrow_is_a_notice() {
        let m = bundled::day_night_model();
        let day = m.config_id("day").unwrap();
        let adv = advance(&m, day, &set(&["sunrise"]), &SequencingOracle, TickContext::default(), &mut rng()).unwrap();
        assert_eq!(adv.config, day);
        assert_eq!(adv.notices, vec![NoArrow { config: day, event: m.events().id("sunrise").unwrap() }]);
    }

    #[test]
    fn unknown_event_is_input_error() {
        let m = bundled::day_night_model();
        let r = advance(&m, 0, &set(&["eclipse"]), &SequencingOracle, TickContext::default(), &mut rng());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn simulate_chain() {
        let m = bundled::day_night_model();
        let stream = EventStream::from_sequence(
            vec!["sunrise".into(), "sunset".into()],
            &[&["sunrise"], &["sunset"], &["sunrise"]],
        )
        .unwrap();
        let night = m.config_id("night").unwrap();
        let sim = simulate_edm(&m, &stream, &SequencingOracle, Seed(1), night).unwrap();
        let names: Vec<String> = sim.labels(&m).iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["night", "day", "night", "day"]);
        let empty = EventStream::new(vec!["sunrise".into()], 5, vec![]).unwrap();
        assert_eq!(simulate_edm(&m, &empty, &SequencingOracle, Seed(1), night).unwrap().path, vec![night]);
    }

    #[test]
    fn moment_path_expands_ticks() {
        let m = bundled::day_night_model();
        let stream = EventStream::new(
            vec!["sunrise".into(), "sunset".into()],
            5,
            vec![Tick::new(2, set(&["sunrise"])), Tick::new(4, set(&["sunset"]))],
        )
        .unwrap();
        let night = m.config_id("night").unwrap();
        let day = m.config_id("day").unwrap();
        let sim = simulate_edm(&m, &stream, &SequencingOracle, Seed(1), night).unwrap();
        assert_eq!(sim.moment_path(&stream), vec![night, night, day, day, night, night]);
    }
}

//! Trace statistics: how often each event happens in each state and around
//! each arrow, and the excursions from the expected frequency that make a
//! model adequate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use crate::edm::{event_ids, Dynamics, EventStream, TickTraversal, Traversal};
use crate::error::{Error, Result};
use crate::label::Label;

use super::estimate::estimate_moments;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Counter {
    pub occurrences: f64,
    pub opportunities: f64,
}

impl Counter {
    fn add(&mut self, occurred: bool, weight: f64) {
        self.opportunities += weight;
        if occurred {
            self.occurrences += weight;
        }
    }

    pub fn frequency(&self) -> Option<f64> {
        (self.opportunities > 0.0).then(|| self.occurrences / self.opportunities)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowKey {
    pub from: Label,
    pub event: Label,
    pub to: Label,
}

impl fmt::Display for ArrowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-[{}]->{}", self.from, self.event, self.to)
    }
}

/// Counters of one life against one model.
///
/// The event of step `t` is attributed to the model state at moment
/// `t - 1`, the state it happened in. Around an arrow traversed at step
/// `t`, offset `o` looks at step `t + o`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceStatistics {
    pub window: usize,
    pub alphabet: BTreeSet<Label>,
    pub per_state: BTreeMap<(Label, Label), Counter>,
    pub per_arrow: BTreeMap<(ArrowKey, Label, i64), Counter>,
    /// Reference for the arrow windows: the same offsets around every
    /// occurrence of the arrow's event, whichever arrow (if any) it took.
    pub around_event: BTreeMap<(Label, Label, i64), Counter>,
    /// Built from estimated rather than known states.
    pub approximate: bool,
}

fn window_counts<K: Ord + Clone>(
    out: &mut BTreeMap<(K, Label, i64), Counter>,
    key: K,
    step: usize,
    window: usize,
    per_step: &[BTreeSet<Label>],
    alphabet: &BTreeSet<Label>,
) {
    let n = per_step.len() as i64;
    let w = window as i64;
    for o in -w..=w {
        let u = step as i64 + o;
        if u < 1 || u > n {
            continue;
        }
        let events = &per_step[(u - 1) as usize];
        for x in alphabet {
            out.entry((key.clone(), x.clone(), o)).or_default().add(events.contains(x), 1.0);
        }
    }
}

fn around_events(stats: &mut TraceStatistics, per_step: &[BTreeSet<Label>]) {
    for (i, events) in per_step.iter().enumerate() {
        for e in events {
            window_counts(&mut stats.around_event, e.clone(), i + 1, stats.window, per_step, &stats.alphabet);
        }
    }
}

/// World-side statistics from the model's state at every moment
/// (`moment_path.len() == stream.steps() + 1`) and its traversed arrows.
pub fn collect(
    model: &dyn Dynamics,
    moment_path: &[usize],
    traversals: &[TickTraversal],
    stream: &EventStream,
    window: usize,
) -> Result<TraceStatistics> {
    if moment_path.len() != stream.steps() + 1 {
        return Err(Error::input(format!(
            "a path of {} moments does not match a stream of {} steps",
            moment_path.len(),
            stream.steps()
        )));
    }
    let per_step = stream.per_step();
    let mut stats = TraceStatistics { window, alphabet: stream.alphabet().clone(), ..Default::default() };
    for (t, events) in per_step.iter().enumerate() {
        let state = model.config_label(moment_path[t]);
        for x in &stats.alphabet {
            stats.per_state.entry((state.clone(), x.clone())).or_default().add(events.contains(x), 1.0);
        }
    }
    for tr in traversals {
        if tr.step == 0 || tr.step > stream.steps() {
            return Err(Error::input(format!("traversal at step {} is outside the stream", tr.step)));
        }
        let key = arrow_key(model, tr.arrow);
        window_counts(&mut stats.per_arrow, key, tr.step, window, &per_step, &stats.alphabet);
    }
    around_events(&mut stats, &per_step);
    Ok(stats)
}

fn arrow_key(model: &dyn Dynamics, a: Traversal) -> ArrowKey {
    ArrowKey { from: model.config_label(a.from), event: model.events().label(a.event).clone(), to: model.config_label(a.to) }
}

/// Agent-side statistics: the state is only known as the set of states
/// consistent with the stream so far, and each of them receives an equal
/// share of the opportunity. When the stream contradicts the model the
/// estimate restarts from the admissible starts. Arrow windows are not
/// collected in this mode.
pub fn collect_agent_side(model: &dyn Dynamics, stream: &EventStream, window: usize) -> Result<TraceStatistics> {
    let (sets, _restarts) = estimate_moments(model, &stream.restrict(&model_alphabet(model)), true)?;
    let per_step = stream.per_step();
    let mut stats =
        TraceStatistics { window, alphabet: stream.alphabet().clone(), approximate: true, ..Default::default() };
    for (t, events) in per_step.iter().enumerate() {
        let set = &sets[t];
        let share = 1.0 / set.len() as f64;
        for &c in set {
            let state = model.config_label(c);
            for x in &stats.alphabet {
                stats.per_state.entry((state.clone(), x.clone())).or_default().add(events.contains(x), share);
            }
        }
    }
    around_events(&mut stats, &per_step);
    Ok(stats)
}

pub(crate) fn model_alphabet(model: &dyn Dynamics) -> BTreeSet<Label> {
    model.events().labels().iter().cloned().collect()
}

/// Recover which arrows a known model path took: at every tick, the first
/// sequence (in event-name order, a missing arrow meaning "stay") that leads
/// from the state before the tick to the state after it.
pub fn traversals_from_path(model: &dyn Dynamics, moment_path: &[usize], stream: &EventStream) -> Result<Vec<TickTraversal>> {
    if moment_path.len() != stream.steps() + 1 {
        return Err(Error::input("model path and stream lengths differ"));
    }
    let mut out = Vec::new();
    let mut last_step = 0;
    for (i, tick) in stream.ticks().iter().enumerate() {
        for t in last_step + 1..tick.step {
            if moment_path[t] != moment_path[t - 1] {
                return Err(Error::input(format!("model path moves at step {t} without an event")));
            }
        }
        last_step = tick.step;
        let ids = event_ids(model, &tick.events)?;
        let (from, to) = (moment_path[tick.step - 1], moment_path[tick.step]);
        let mut chain = Vec::new();
        if !search(model, from, to, &ids, &mut chain) {
            return Err(Error::input(format!(
                "no arrows of the model lead from {} to {} at step {}",
                model.config_label(from),
                model.config_label(to),
                tick.step
            )));
        }
        out.extend(chain.into_iter().map(|arrow| TickTraversal { tick: i, step: tick.step, arrow }));
    }
    for t in last_step + 1..moment_path.len() {
        if moment_path[t] != moment_path[t - 1] {
            return Err(Error::input(format!("model path moves at step {t} without an event")));
        }
    }
    Ok(out)
}

fn search(model: &dyn Dynamics, at: usize, goal: usize, events: &[usize], chain: &mut Vec<Traversal>) -> bool {
    let Some((&e, rest)) = events.split_first() else {
        return at == goal;
    };
    let targets = model.successors(at, e);
    if targets.is_empty() {
        return search(model, at, goal, rest, chain);
    }
    for &t in targets.iter() {
        chain.push(Traversal { from: at, event: e, to: t });
        if search(model, t, goal, rest, chain) {
            return true;
        }
        chain.pop();
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    /// Frequency of the event over all opportunities (per state), or over
    /// all windows around the arrow's event (per arrow).
    Global,
    /// `1 / |alphabet|`.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectConfig {
    pub min_support: f64,
    pub threshold: f64,
    pub baseline: Baseline,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig { min_support: 30.0, threshold: 3.0, baseline: Baseline::Global }
    }
}

/// Guard against a zero variance when the baseline is 0 or 1.
pub const EPSILON: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    State(Label),
    Arrow { arrow: ArrowKey, offset: i64 },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::State(s) => write!(f, "{s}"),
            Location::Arrow { arrow, offset } => write!(f, "{arrow}@{offset:+}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceFinding {
    pub location: Location,
    pub event: Label,
    pub empirical: f64,
    pub baseline: f64,
    pub support: f64,
    pub deviation: f64,
}

impl TraceFinding {
    /// `+1` when the event is more frequent than expected, `-1` when rarer.
    pub fn direction(&self) -> f64 {
        (self.empirical - self.baseline).signum()
    }
}

pub fn deviation(empirical: f64, baseline: f64, support: f64) -> f64 {
    (empirical - baseline).abs() / (baseline * (1.0 - baseline) / support + EPSILON).sqrt()
}

/// Entries with enough support whose frequency strays from the baseline by
/// at least `threshold`, largest deviation first.
pub fn detect_trace(stats: &TraceStatistics, config: &DetectConfig) -> Vec<TraceFinding> {
    let uniform = 1.0 / stats.alphabet.len().max(1) as f64;
    let mut global: BTreeMap<&Label, Counter> = BTreeMap::new();
    for ((_, e), c) in &stats.per_state {
        let g = global.entry(e).or_default();
        g.occurrences += c.occurrences;
        g.opportunities += c.opportunities;
    }
    let mut findings = Vec::new();
    let mut consider = |location: Location, event: &Label, c: &Counter, baseline: Option<f64>| {
        let (Some(empirical), Some(baseline)) = (c.frequency(), baseline) else { return };
        if c.opportunities < config.min_support {
            return;
        }
        let d = deviation(empirical, baseline, c.opportunities);
        if d >= config.threshold {
            findings.push(TraceFinding {
                location,
                event: event.clone(),
                empirical,
                baseline,
                support: c.opportunities,
                deviation: d,
            });
        }
    };
    for ((state, event), c) in &stats.per_state {
        let baseline = match config.baseline {
            Baseline::Global => global.get(event).and_then(Counter::frequency),
            Baseline::Uniform => Some(uniform),
        };
        consider(Location::State(state.clone()), event, c, baseline);
    }
    for ((arrow, event, offset), c) in &stats.per_arrow {
        let baseline = match config.baseline {
            Baseline::Global => stats
                .around_event
                .get(&(arrow.event.clone(), event.clone(), *offset))
                .and_then(Counter::frequency),
            Baseline::Uniform => Some(uniform),
        };
        consider(Location::Arrow { arrow: arrow.clone(), offset: *offset }, event, c, baseline);
    }
    findings.sort_by(|a, b| {
        b.deviation
            .total_cmp(&a.deviation)
            .then_with(|| a.location.to_string().cmp(&b.location.to_string()))
            .then_with(|| a.event.cmp(&b.event))
    });
    findings
}

/// 0 for a model without findings, otherwise the largest deviation.
pub fn adequacy(findings: &[TraceFinding]) -> f64 {
    findings.iter().map(|f| f.deviation).fold(0.0, f64::max)
}

pub fn findings_csv(findings: &[TraceFinding]) -> String {
    let mut out = String::from("location,event,empirical,baseline,support,deviation\n");
    for f in findings {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{},{:.6}",
            f.location, f.event, f.empirical, f.baseline, f.support, f.deviation
        );
    }
    out
}

//! The agent's single life as it was recorded.
//!
//! A step is `bad_before, action, observation`: the set of moves tried and
//! rejected since the previous observation, the move that was accepted and
//! what was seen afterwards. An optional pending entry holds the bad set and
//! action after the last observation.

mod events;
mod format;

pub use events::{
    occurred, BadPattern, ChiTranscript, EventDefinition, EventDefinitions, LocalPattern,
    PatternElem, SemiVisibleEvent, VisibleEvent,
};
pub use format::{parse_life_log, print_life_log, LifeLogHeader};

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::world::{StatePath, World};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HistoryStep {
    pub bad_before: BTreeSet<Label>,
    pub action: Label,
    pub observation: Label,
}

impl HistoryStep {
    pub fn new(bad_before: BTreeSet<Label>, action: Label, observation: Label) -> Result<Self> {
        if bad_before.contains(&action) {
            return Err(Error::input(format!(
                "action {action} is listed among the rejected moves of its own step"
            )));
        }
        Ok(HistoryStep { bad_before, action, observation })
    }
}

/// Bad set and chosen action after the last observation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pending {
    pub bad: BTreeSet<Label>,
    pub action: Label,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct History {
    steps: Vec<HistoryStep>,
    pending: Option<Pending>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<HistoryStep>, pending: Option<Pending>) -> Result<Self> {
        for (i, s) in steps.iter().enumerate() {
            if s.bad_before.contains(&s.action) {
                return Err(Error::input(format!("step {}: action is in its own bad set", i + 1)));
            }
        }
        if let Some(p) = &pending {
            if p.bad.contains(&p.action) {
                return Err(Error::input("pending action is in the pending bad set"));
            }
        }
        Ok(History { steps, pending })
    }

    pub fn steps(&self) -> &[HistoryStep] {
        &self.steps
    }

    pub fn pending(&self) -> Option<&Pending> {
        self.pending.as_ref()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty() && self.pending.is_none()
    }

    pub fn push(&mut self, step: HistoryStep) {
        debug_assert!(!step.bad_before.contains(&step.action));
        self.pending = None;
        self.steps.push(step);
    }

    pub fn set_pending(&mut self, pending: Option<Pending>) -> Result<()> {
        if let Some(p) = &pending {
            if p.bad.contains(&p.action) {
                return Err(Error::input("pending action is in the pending bad set"));
            }
        }
        self.pending = pending;
        Ok(())
    }

    /// The first `t` steps, without pending.
    pub fn prefix(&self, t: usize) -> Result<History> {
        if t > self.steps.len() {
            return Err(Error::Range(format!("prefix {t} of a {}-step history", self.steps.len())));
        }
        Ok(History { steps: self.steps[..t].to_vec(), pending: None })
    }

    pub fn truncated(&self) -> TruncatedHistory {
        let mut tokens = Vec::with_capacity(self.steps.len() * 2 + 1);
        for s in &self.steps {
            tokens.push(Token::Action(s.action.clone()));
            tokens.push(Token::Observation(s.observation.clone()));
        }
        if let Some(p) = &self.pending {
            tokens.push(Token::Action(p.action.clone()));
        }
        TruncatedHistory { tokens }
    }

    pub fn local(&self, k: usize) -> Result<LocalHistory> {
        let n = self.steps.len();
        if k > n {
            return Err(Error::Range(format!("local history of length {k} from {n} steps")));
        }
        Ok(LocalHistory { suffix: self.steps[n - k..].to_vec() })
    }

    pub fn approximate(&self, config: &ApproximationConfig) -> ApproximateHistory {
        let n = self.steps.len();
        let tail = LocalHistory { suffix: self.steps[n - config.tail_length.min(n)..].to_vec() };
        let mut event_log = BTreeMap::new();
        for event in &config.events {
            let hits = (1..=n).filter(|&t| occurred(event, self, t)).collect();
            event_log.insert(event.name.clone(), hits);
        }
        let mut observation_counts = BTreeMap::new();
        let mut action_counts = BTreeMap::new();
        for s in &self.steps {
            *observation_counts.entry(s.observation.clone()).or_insert(0) += 1;
            *action_counts.entry(s.action.clone()).or_insert(0) += 1;
        }
        ApproximateHistory { tail, event_log, observation_counts, action_counts, total_steps: n }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Action(Label),
    Observation(Label),
}

/// `a_1, v_1, ..., a_t, v_t` plus the pending action when there is one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TruncatedHistory {
    pub tokens: Vec<Token>,
}

impl TruncatedHistory {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Rebuilds a history with every bad set empty.
    pub fn with_empty_bad_sets(&self) -> Result<History> {
        let mut steps = Vec::new();
        let mut it = self.tokens.iter().peekable();
        let mut pending = None;
        while let Some(tok) = it.next() {
            let Token::Action(a) = tok else {
                return Err(Error::input("truncated history must alternate action, observation"));
            };
            match it.next() {
                Some(Token::Observation(v)) => steps.push(HistoryStep {
                    bad_before: BTreeSet::new(),
                    action: a.clone(),
                    observation: v.clone(),
                }),
                None => pending = Some(Pending { bad: BTreeSet::new(), action: a.clone() }),
                Some(Token::Action(_)) => {
                    return Err(Error::input("two consecutive actions in a truncated history"))
                }
            }
        }
        History::from_steps(steps, pending)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LocalHistory {
    pub suffix: Vec<HistoryStep>,
}

impl LocalHistory {
    pub fn k(&self) -> usize {
        self.suffix.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FullStep {
    pub full_before: BTreeSet<Label>,
    pub action: Label,
    pub observation: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FullPending {
    pub full: BTreeSet<Label>,
    pub action: Label,
}

/// The history as an attentive observer would have recorded it: every bad
/// set replaced by the complete set of incorrect moves at that moment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FullHistory {
    pub steps: Vec<FullStep>,
    pub pending: Option<FullPending>,
}

/// Rebuilds the full history from the world-side state path.
///
/// Position `i` of the path is the state from which step `i + 1` departed,
/// so `full_i` is the incorrect set realised there.
pub fn full_from_trace(history: &History, world: &dyn World, path: &StatePath) -> Result<FullHistory> {
    if path.states.len() != history.len() + 1 {
        return Err(Error::input(format!(
            "path has {} positions but the history has {} steps",
            path.states.len(),
            history.len()
        )));
    }
    let full_at = |i: usize| -> Result<BTreeSet<Label>> { world.incorrect_at(path, i) };
    let check = |i: usize, bad: &BTreeSet<Label>, full: &BTreeSet<Label>| -> Result<()> {
        if let Some(x) = bad.difference(full).next() {
            return Err(Error::Consistency(format!(
                "move {x} was rejected before step {} but is correct in state {}",
                i + 1,
                path.states[i]
            )));
        }
        Ok(())
    };
    let mut steps = Vec::with_capacity(history.len());
    for (i, s) in history.steps().iter().enumerate() {
        let full = full_at(i)?;
        check(i, &s.bad_before, &full)?;
        if full.contains(&s.action) {
            return Err(Error::Consistency(format!(
                "step {} took {} which is incorrect in state {}",
                i + 1,
                s.action,
                path.states[i]
            )));
        }
        steps.push(FullStep { full_before: full, action: s.action.clone(), observation: s.observation.clone() });
    }
    let pending = match history.pending() {
        Some(p) => {
            let i = history.len();
            let full = full_at(i)?;
            check(i, &p.bad, &full)?;
            Some(FullPending { full, action: p.action.clone() })
        }
        None => None,
    };
    Ok(FullHistory { steps, pending })
}

#[derive(Clone, Debug, Default)]
pub struct ApproximationConfig {
    pub tail_length: usize,
    pub events: Vec<VisibleEvent>,
}

/// What a forgetful agent keeps: the end of the life, when a few tracked
/// events happened, and totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximateHistory {
    pub tail: LocalHistory,
    /// Step indices (1-based) at which each tracked event occurred.
    pub event_log: BTreeMap<Label, Vec<usize>>,
    pub observation_counts: BTreeMap<Label, usize>,
    pub action_counts: BTreeMap<Label, usize>,
    pub total_steps: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::from(s)
    }

    fn step(bad: &[&str], a: &str, v: &str) -> HistoryStep {
        HistoryStep::new(bad.iter().map(|b| l(b)).collect(), l(a), l(v)).unwrap()
    }

    fn alternating(n: usize) -> History {
        let steps = (0..n)
            .map(|i| if i % 2 == 0 { step(&[], "a", "white") } else { step(&[], "b", "black") })
            .collect();
        History::from_steps(steps, None).unwrap()
    }

    #[test]
    fn truncated_strips_bad_sets() {
        assert!(History::new().truncated().is_empty());
        let h = History::from_steps(vec![step(&["b"], "a", "white")], None).unwrap();
        assert_eq!(
            h.truncated().tokens,
            vec![Token::Action(l("a")), Token::Observation(l("white"))]
        );
    }

    #[test]
    fn truncated_counts_pending() {
        let mut h = alternating(4);
        assert_eq!(h.truncated().len(), 8);
        h.set_pending(Some(Pending { bad: [l("b")].into(), action: l("a") })).unwrap();
        assert_eq!(h.truncated().len(), 9);
        let back = h.truncated().with_empty_bad_sets().unwrap();
        assert_eq!(back.truncated(), h.truncated());
    }

    #[test]
    fn step_rejects_action_in_own_bad_set() {
        assert!(HistoryStep::new([l("a")].into(), l("a"), l("v")).is_err());
        assert!(History::new()
            .set_pending(Some(Pending { bad: [l("a")].into(), action: l("a") }))
            .is_err());
    }

    #[test]
    fn local_slices_the_end() {
        let h = alternating(10);
        assert_eq!(h.local(0).unwrap().k(), 0);
        assert_eq!(h.local(10).unwrap().suffix, h.steps());
        assert_eq!(h.local(3).unwrap().suffix, &h.steps()[7..10]);
        assert!(matches!(h.local(11), Err(Error::Range(_))));
    }

    #[test]
    fn approximate_of_empty_history() {
        let a = History::new().approximate(&ApproximationConfig::default());
        assert_eq!(a.tail.k(), 0);
        assert!(a.event_log.is_empty());
        assert_eq!(a.total_steps, 0);
        assert!(a.observation_counts.is_empty());
    }

    #[test]
    fn approximate_logs_event_indices() {
        let h = alternating(10);
        let last_a = VisibleEvent::new(l("last_a"), vec![LocalPattern::single(PatternElem::action(l("a")))]).unwrap();
        let a = h.approximate(&ApproximationConfig { tail_length: 2, events: vec![last_a] });
        assert_eq!(a.event_log[&l("last_a")], vec![1, 3, 5, 7, 9]);
        assert_eq!(a.tail.k(), 2);
        assert_eq!(a.action_counts.values().sum::<usize>(), 10);
        assert_eq!(a.observation_counts.values().sum::<usize>(), 10);
    }
}

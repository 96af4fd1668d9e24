use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::history::{occurred, ChiTranscript, EventDefinition, EventDefinitions, History};
use crate::label::Label;
use crate::text;

/// The events that occurred at one step (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tick {
    pub step: usize,
    pub events: BTreeSet<Label>,
}

impl Tick {
    pub fn new(step: usize, events: BTreeSet<Label>) -> Self {
        Tick { step, events }
    }
}

/// Event firings over a life of `steps` steps. Only steps with at least one
/// event appear as ticks.
///
/// Text form:
///
/// ```text
/// stream steps=10 alphabet={a,b}
/// 1 {a}
/// 3 {a,b}
/// ```
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventStream {
    alphabet: BTreeSet<Label>,
    steps: usize,
    ticks: Vec<Tick>,
}

impl EventStream {
    pub fn new(alphabet: impl IntoIterator<Item = Label>, steps: usize, ticks: Vec<Tick>) -> Result<Self> {
        let alphabet: BTreeSet<Label> = alphabet.into_iter().collect();
        let mut last = 0;
        for t in &ticks {
            if t.step <= last || t.step > steps {
                return Err(Error::input(format!(
                    "tick step {} is out of order or outside 1..={steps}",
                    t.step
                )));
            }
            if t.events.is_empty() {
                return Err(Error::input(format!("tick at step {} has no events", t.step)));
            }
            if let Some(e) = t.events.iter().find(|e| !alphabet.contains(*e)) {
                return Err(Error::input(format!("event {e} at step {} is not declared", t.step)));
            }
            last = t.step;
        }
        Ok(EventStream { alphabet, steps, ticks })
    }

    /// One entry per step; empty entries become gaps.
    pub fn from_sequence(alphabet: Vec<Label>, per_step: &[&[&str]]) -> Result<Self> {
        let ticks = per_step
            .iter()
            .enumerate()
            .filter(|(_, es)| !es.is_empty())
            .map(|(i, es)| Tick::new(i + 1, es.iter().map(|e| Label::from(*e)).collect()))
            .collect();
        Self::new(alphabet, per_step.len(), ticks)
    }

    pub fn from_sets(alphabet: impl IntoIterator<Item = Label>, per_step: Vec<BTreeSet<Label>>) -> Result<Self> {
        let steps = per_step.len();
        let ticks = per_step
            .into_iter()
            .enumerate()
            .filter(|(_, es)| !es.is_empty())
            .map(|(i, events)| Tick::new(i + 1, events))
            .collect();
        Self::new(alphabet, steps, ticks)
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn ticks(&self) -> &[Tick] {
        &self.ticks
    }

    /// The event set of every step `1..=steps`, index 0 being step 1.
    pub fn per_step(&self) -> Vec<BTreeSet<Label>> {
        let mut out = vec![BTreeSet::new(); self.steps];
        for t in &self.ticks {
            out[t.step - 1] = t.events.clone();
        }
        out
    }

    /// Keep only events in `alphabet`; ticks left empty disappear.
    pub fn restrict(&self, alphabet: &BTreeSet<Label>) -> EventStream {
        let ticks = self
            .ticks
            .iter()
            .filter_map(|t| {
                let events: BTreeSet<Label> = t.events.intersection(alphabet).cloned().collect();
                (!events.is_empty()).then(|| Tick::new(t.step, events))
            })
            .collect();
        EventStream { alphabet: self.alphabet.intersection(alphabet).cloned().collect(), steps: self.steps, ticks }
    }

    /// The first `steps` steps.
    pub fn prefix(&self, steps: usize) -> EventStream {
        let steps = steps.min(self.steps);
        EventStream {
            alphabet: self.alphabet.clone(),
            steps,
            ticks: self.ticks.iter().take_while(|t| t.step <= steps).cloned().collect(),
        }
    }

    pub fn print(&self) -> String {
        let mut out = format!("stream steps={} alphabet={}\n", self.steps, text::format_set(&self.alphabet));
        for t in &self.ticks {
            let _ = writeln!(out, "{} {}", t.step, text::format_set(&t.events));
        }
        out
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = text::content_lines(src);
        let (line, header) = lines.next().ok_or_else(|| Error::parse(1, "empty stream file"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        let ["stream", steps, alphabet] = toks[..] else {
            return Err(Error::parse(line, "expected `stream steps=N alphabet={..}`"));
        };
        let steps: usize = text::number(text::keyed(steps, "steps", line)?, line)?;
        let alphabet = text::set(text::keyed(alphabet, "alphabet", line)?, line)?;
        let mut ticks = Vec::new();
        for (line, content) in lines {
            let (step, events) = content
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(line, "expected `step {events}`"))?;
            ticks.push(Tick::new(text::number(step, line)?, text::set(events.trim(), line)?));
        }
        Self::new(alphabet, steps, ticks).map_err(|e| Error::parse(0, e.to_string()))
    }
}

/// The events a recorded life shows, step by step.
///
/// Visible events come from the history itself; semi-visible events fire on
/// their visible part or when the transcript says so; invisible events need
/// the transcript.
pub fn project_events(
    history: &History,
    definitions: &EventDefinitions,
    transcript: Option<&ChiTranscript>,
) -> Result<EventStream> {
    for def in &definitions.0 {
        if let EventDefinition::Invisible(name) = def {
            if !transcript.is_some_and(|t| t.covers(name)) {
                return Err(Error::MissingOracle(format!("invisible event {name} has no chi transcript")));
            }
        }
    }
    let n = history.len();
    let mut ticks = Vec::new();
    for t in 1..=n {
        let events: BTreeSet<Label> = definitions
            .0
            .iter()
            .filter(|def| match def {
                EventDefinition::Visible(e) => occurred(e, history, t),
                EventDefinition::SemiVisible(e) => {
                    occurred(&e.visible, history, t) || transcript.is_some_and(|tr| tr.fired(&e.name, t))
                }
                EventDefinition::Invisible(name) => transcript.is_some_and(|tr| tr.fired(name, t)),
            })
            .map(|def| def.name().clone())
            .collect();
        if !events.is_empty() {
            ticks.push(Tick::new(t, events));
        }
    }
    EventStream::new(definitions.names(), n, ticks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::HistoryStep;

    fn alternating(n: usize) -> History {
        let steps = (0..n)
            .map(|i| HistoryStep::new(BTreeSet::new(), Label::from(if i % 2 == 0 { "a" } else { "b" }), Label::from("v")).unwrap())
            .collect();
        History::from_steps(steps, None).unwrap()
    }

    #[test]
    fn no_definitions_no_ticks() {
        let s = project_events(&alternating(10), &EventDefinitions::default(), None).unwrap();
        assert!(s.ticks().is_empty());
        assert_eq!(s.steps(), 10);
    }

    #[test]
    fn last_action_a_fires_on_odd_steps() {
        let defs = EventDefinitions::parse("visible a = [* a *]").unwrap();
        let s = project_events(&alternating(10), &defs, None).unwrap();
        let steps: Vec<usize> = s.ticks().iter().map(|t| t.step).collect();
        assert_eq!(steps, vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn invisible_needs_transcript() {
        let defs = EventDefinitions::parse("invisible cold").unwrap();
        let r = project_events(&alternating(4), &defs, None);
        assert!(matches!(r, Err(Error::MissingOracle(_))));
        let tr = ChiTranscript::parse("cold 2").unwrap();
        let s = project_events(&alternating(4), &defs, Some(&tr)).unwrap();
        assert_eq!(s.ticks(), &[Tick::new(2, [Label::from("cold")].into())]);
    }

    #[test]
    fn semivisible_is_union_of_visible_and_transcript() {
        let defs = EventDefinitions::parse("semivisible b = [* b *]").unwrap();
        let tr = ChiTranscript::parse("b 1 3 4").unwrap();
        let s = project_events(&alternating(6), &defs, Some(&tr)).unwrap();
        let steps: Vec<usize> = s.ticks().iter().map(|t| t.step).collect();
        assert_eq!(steps, vec![1, 2, 3, 4, 6]);
    }

    #[test]
    fn text_round_trip_and_validation() {
        let s = EventStream::from_sequence(vec!["a".into(), "b".into()], &[&["a"], &[], &["a", "b"]]).unwrap();
        assert_eq!(s.print(), "stream steps=3 alphabet={a,b}\n1 {a}\n3 {a,b}\n");
        assert_eq!(EventStream::parse(&s.print()).unwrap(), s);
        assert!(EventStream::parse("stream steps=2 alphabet={a}\n3 {a}\n").is_err());
        assert!(EventStream::parse("stream steps=2 alphabet={a}\n1 {c}\n").is_err());
        assert!(EventStream::new(vec![Label::from("a")], 3, vec![Tick::new(2, [Label::from("a")].into()), Tick::new(2, [Label::from("a")].into())]).is_err());
    }

    #[test]
    fn restrict_and_prefix() {
        let s = EventStream::from_sequence(vec!["a".into(), "b".into()], &[&["a"], &["b"], &["a", "b"]]).unwrap();
        let only_b = s.restrict(&[Label::from("b")].into());
        assert_eq!(only_b.ticks().len(), 2);
        assert_eq!(s.prefix(2).ticks().len(), 2);
        assert_eq!(s.prefix(2).steps(), 2);
    }
}

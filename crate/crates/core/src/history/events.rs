//! Visible, semi-visible and invisible events over a history.
//!
//! A visible event is a finite set of local-history patterns; it occurred at
//! moment `t` when the first `t` steps end with one of them. Each pattern
//! element constrains the bad set, the action and the observation of one
//! step, and any of the three may be a wildcard.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::text;

use super::History;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BadPattern {
    Any,
    /// The move was tried and rejected before this step.
    Contains(Label),
    Excludes(Label),
    Exactly(BTreeSet<Label>),
}

impl BadPattern {
    fn matches(&self, bad: &BTreeSet<Label>) -> bool {
        match self {
            BadPattern::Any => true,
            BadPattern::Contains(x) => bad.contains(x),
            BadPattern::Excludes(x) => !bad.contains(x),
            BadPattern::Exactly(s) => s == bad,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternElem {
    pub bad: BadPattern,
    pub action: Option<Label>,
    pub observation: Option<Label>,
}

impl PatternElem {
    pub fn any() -> Self {
        PatternElem { bad: BadPattern::Any, action: None, observation: None }
    }

    pub fn action(a: Label) -> Self {
        PatternElem { action: Some(a), ..Self::any() }
    }

    pub fn observation(v: Label) -> Self {
        PatternElem { observation: Some(v), ..Self::any() }
    }

    pub fn tried(x: Label) -> Self {
        PatternElem { bad: BadPattern::Contains(x), ..Self::any() }
    }

    fn matches(&self, bad: &BTreeSet<Label>, action: &Label, observation: Option<&Label>) -> bool {
        self.bad.matches(bad)
            && self.action.as_ref().is_none_or(|a| a == action)
            && match (&self.observation, observation) {
                (None, _) => true,
                (Some(want), Some(got)) => want == got,
                // the pending entry has no observation yet
                (Some(_), None) => false,
            }
    }
}

impl fmt::Display for PatternElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad = match &self.bad {
            BadPattern::Any => "*".to_string(),
            BadPattern::Contains(x) => format!("+{x}"),
            BadPattern::Excludes(x) => format!("-{x}"),
            BadPattern::Exactly(s) => text::format_set(s),
        };
        let opt = |o: &Option<Label>| o.as_ref().map_or("*".to_string(), |l| l.to_string());
        write!(f, "[{} {} {}]", bad, opt(&self.action), opt(&self.observation))
    }
}

/// A fixed-length suffix template; the last element matches the latest step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalPattern(Vec<PatternElem>);

impl LocalPattern {
    pub fn new(elems: Vec<PatternElem>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::input("a local-history pattern needs at least one step"));
        }
        Ok(LocalPattern(elems))
    }

    pub fn single(elem: PatternElem) -> Self {
        LocalPattern(vec![elem])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elems(&self) -> &[PatternElem] {
        &self.0
    }
}

impl fmt::Display for LocalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VisibleEvent {
    pub name: Label,
    pub members: Vec<LocalPattern>,
}

impl VisibleEvent {
    pub fn new(name: Label, members: Vec<LocalPattern>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::input(format!("visible event {name} has no patterns")));
        }
        Ok(VisibleEvent { name, members })
    }

    pub fn max_len(&self) -> usize {
        self.members.iter().map(LocalPattern::len).max().unwrap_or(0)
    }
}

/// An event with a visible subset; the rest of its firings are reported by
/// oracle chi and reach the toolkit as a transcript.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemiVisibleEvent {
    pub name: Label,
    pub visible: VisibleEvent,
}

/// Did `event` occur at moment `t`?
///
/// `t` counts completed steps. When the history has a pending entry,
/// `t = len + 1` evaluates with the pending entry as the latest element;
/// concrete observation constraints never match it.
pub fn occurred(event: &VisibleEvent, history: &History, t: usize) -> bool {
    let steps = history.steps();
    let n = steps.len();
    let with_pending = t == n + 1 && history.pending().is_some();
    if t > n && !with_pending {
        return false;
    }
    event.members.iter().any(|pattern| {
        let len = pattern.len();
        if len > t {
            return false;
        }
        pattern.elems().iter().enumerate().all(|(j, elem)| {
            let pos = t - len + j; // 0-based position of the element
            if pos < n {
                let s = &steps[pos];
                elem.matches(&s.bad_before, &s.action, Some(&s.observation))
            } else {
                let p = history.pending().expect("pending checked above");
                elem.matches(&p.bad, &p.action, None)
            }
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EventDefinition {
    Visible(VisibleEvent),
    SemiVisible(SemiVisibleEvent),
    Invisible(Label),
}

impl EventDefinition {
    pub fn name(&self) -> &Label {
        match self {
            EventDefinition::Visible(e) => &e.name,
            EventDefinition::SemiVisible(e) => &e.name,
            EventDefinition::Invisible(n) => n,
        }
    }
}

/// An ordered list of event definitions, as read from an events file:
///
/// ```text
/// visible sunrise = [* * dark] [* * light]
/// visible either = [* a *] | [* b *]
/// semivisible tried_b = [+b * *]
/// invisible cold
/// ```
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventDefinitions(pub Vec<EventDefinition>);

impl EventDefinitions {
    pub fn parse(src: &str) -> Result<Self> {
        let mut defs = Vec::new();
        let mut seen = BTreeSet::new();
        for (line, content) in text::content_lines(src) {
            let (kind, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let rest = rest.trim();
            let def = match kind {
                "invisible" => EventDefinition::Invisible(text::label(rest, line)?),
                "visible" | "semivisible" => {
                    let (name, patterns) = rest
                        .split_once('=')
                        .ok_or_else(|| Error::parse(line, "expected `name = patterns`"))?;
                    let name = text::label(name.trim(), line)?;
                    let members = parse_alternatives(patterns, line)?;
                    let visible = VisibleEvent::new(name.clone(), members)
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                    if kind == "visible" {
                        EventDefinition::Visible(visible)
                    } else {
                        EventDefinition::SemiVisible(SemiVisibleEvent { name, visible })
                    }
                }
                other => return Err(Error::parse(line, format!("unknown event kind {other:?}"))),
            };
            if !seen.insert(def.name().clone()) {
                return Err(Error::parse(line, format!("event {} defined twice", def.name())));
            }
            defs.push(def);
        }
        Ok(EventDefinitions(defs))
    }

    pub fn names(&self) -> BTreeSet<Label> {
        self.0.iter().map(|d| d.name().clone()).collect()
    }
}

impl fmt::Display for EventDefinitions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for def in &self.0 {
            match def {
                EventDefinition::Invisible(n) => writeln!(f, "invisible {n}")?,
                EventDefinition::Visible(e) | EventDefinition::SemiVisible(SemiVisibleEvent { visible: e, .. }) => {
                    let kind = if matches!(def, EventDefinition::Visible(_)) { "visible" } else { "semivisible" };
                    write!(f, "{kind} {} =", e.name)?;
                    for (i, m) in e.members.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" |")?;
                        }
                        write!(f, " {m}")?;
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

fn parse_alternatives(src: &str, line: usize) -> Result<Vec<LocalPattern>> {
    src.split('|').map(|alt| parse_pattern(alt.trim(), line)).collect()
}

fn parse_pattern(src: &str, line: usize) -> Result<LocalPattern> {
    let mut elems = Vec::new();
    let mut rest = src;
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('[')
            .ok_or_else(|| Error::parse(line, format!("expected '[' in pattern {src:?}")))?;
        let close = open
            .find(']')
            .ok_or_else(|| Error::parse(line, "unterminated pattern element"))?;
        let fields: Vec<&str> = open[..close].split_whitespace().collect();
        let [bad, action, obs] = fields[..] else {
            return Err(Error::parse(line, "a pattern element is [bad action observation]"));
        };
        let bad = match bad {
            "*" => BadPattern::Any,
            b if b.starts_with('{') => BadPattern::Exactly(text::set(b, line)?),
            b => {
                if let Some(x) = b.strip_prefix('+') {
                    BadPattern::Contains(text::label(x, line)?)
                } else if let Some(x) = b.strip_prefix('-') {
                    BadPattern::Excludes(text::label(x, line)?)
                } else {
                    return Err(Error::parse(line, format!("bad-set constraint {b:?} must be *, +x, -x or {{..}}")));
                }
            }
        };
        let opt = |t: &str| -> Result<Option<Label>> {
            if t == "*" {
                Ok(None)
            } else {
                text::label(t, line).map(Some)
            }
        };
        elems.push(PatternElem { bad, action: opt(action)?, observation: opt(obs)? });
        rest = open[close + 1..].trim_start();
    }
    LocalPattern::new(elems).map_err(|e| Error::parse(line, e.to_string()))
}

/// Firings reported by oracle chi, keyed by event, as 1-based step indices.
///
/// Text form: one line per event, `name step step ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChiTranscript(pub BTreeMap<Label, BTreeSet<usize>>);

impl ChiTranscript {
    pub fn parse(src: &str) -> Result<Self> {
        let mut map: BTreeMap<Label, BTreeSet<usize>> = BTreeMap::new();
        for (line, content) in text::content_lines(src) {
            let mut toks = content.split_whitespace();
            let name = text::label(toks.next().unwrap_or_default(), line)?;
            let entry = map.entry(name).or_default();
            for t in toks {
                let step: usize = text::number(t, line)?;
                if step == 0 {
                    return Err(Error::parse(line, "steps are 1-based"));
                }
                entry.insert(step);
            }
        }
        Ok(ChiTranscript(map))
    }

    pub fn fired(&self, event: &str, step: usize) -> bool {
        self.0.get(event).is_some_and(|s| s.contains(&step))
    }

    pub fn covers(&self, event: &str) -> bool {
        self.0.contains_key(event)
    }
}

impl fmt::Display for ChiTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, steps) in &self.0 {
            write!(f, "{name}")?;
            for s in steps {
                write!(f, " {s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{HistoryStep, Pending};

    fn l(s: &str) -> Label {
        Label::from(s)
    }

    fn h(steps: &[(&[&str], &str, &str)]) -> History {
        History::from_steps(
            steps
                .iter()
                .map(|(b, a, v)| HistoryStep::new(b.iter().map(|x| l(x)).collect(), l(a), l(v)).unwrap())
                .collect(),
            None,
        )
        .unwrap()
    }

    fn last_action(a: &str) -> VisibleEvent {
        VisibleEvent::new(l(&format!("last_{a}")), vec![LocalPattern::single(PatternElem::action(l(a)))]).unwrap()
    }

    #[test]
    fn last_action_event() {
        let hist = h(&[(&[], "b", "x"), (&[], "a", "y")]);
        assert!(occurred(&last_action("a"), &hist, 2));
        assert!(!occurred(&last_action("a"), &hist, 1));
        assert!(!occurred(&last_action("a"), &hist, 0));
    }

    #[test]
    fn too_short_prefix_never_matches() {
        let two = VisibleEvent::new(
            l("two"),
            vec![LocalPattern::new(vec![PatternElem::any(), PatternElem::any()]).unwrap()],
        )
        .unwrap();
        let hist = h(&[(&[], "a", "x"), (&[], "a", "x")]);
        assert!(!occurred(&two, &hist, 1));
        assert!(occurred(&two, &hist, 2));
        assert!(!occurred(&two, &hist, 3));
    }

    #[test]
    fn tried_incorrect_move_fires_on_bad_set() {
        let tried_b = VisibleEvent::new(l("tried_b"), vec![LocalPattern::single(PatternElem::tried(l("b")))]).unwrap();
        let hist = h(&[(&["b"], "a", "x"), (&[], "a", "x"), (&["b", "c"], "a", "x"), (&["c"], "a", "x")]);
        let fired: Vec<usize> = (1..=4).filter(|&t| occurred(&tried_b, &hist, t)).collect();
        assert_eq!(fired, vec![1, 3]);
    }

    #[test]
    fn pending_matches_actions_but_not_observations() {
        let mut hist = h(&[(&[], "b", "x")]);
        hist.set_pending(Some(Pending { bad: BTreeSet::new(), action: l("a") })).unwrap();
        assert!(occurred(&last_action("a"), &hist, 2));
        let saw = VisibleEvent::new(l("saw"), vec![LocalPattern::single(PatternElem {
            action: Some(l("a")),
            ..PatternElem::observation(l("x"))
        })])
        .unwrap();
        assert!(!occurred(&saw, &hist, 2));
    }

    #[test]
    fn definitions_round_trip() {
        let src = "visible sunrise = [* * dark] [* * light]\n\
                   visible either = [* a *] | [{b,c} b *]\n\
                   semivisible tried_b = [+b * *]\n\
                   visible not_c = [-c * *]\n\
                   invisible cold\n";
        let defs = EventDefinitions::parse(src).unwrap();
        assert_eq!(defs.0.len(), 5);
        let printed = defs.to_string();
        assert_eq!(printed, src);
        assert_eq!(EventDefinitions::parse(&printed).unwrap(), defs);
    }

    #[test]
    fn definitions_reject_garbage() {
        assert!(EventDefinitions::parse("visible x = [* a]").is_err());
        assert!(EventDefinitions::parse("visible x =").is_err());
        assert!(EventDefinitions::parse("fuzzy x").is_err());
        assert!(EventDefinitions::parse("invisible x\ninvisible x").is_err());
    }

    #[test]
    fn transcript_parse() {
        let t = ChiTranscript::parse("sunrise 3 9 4\ncold\n").unwrap();
        assert!(t.fired("sunrise", 4));
        assert!(!t.fired("sunrise", 5));
        assert!(t.covers("cold"));
        assert_eq!(t.to_string(), "cold\nsunrise 3 4 9\n");
    }
}

//! Model files.
//!
//! ```text
//! states night day
//! start night
//! events sunrise:visible sunset:visible
//! arrow night sunrise day
//! arrow day sunset night
//! expect day light
//! ```
//!
//! Optional lines: `outside <state>` after `states`; `expect <state> <obs>`;
//! variables with `var <name> <value>...`, `init <name>=<value>...` and
//! `update <state> {x=0} <event> -> <state> {x=1}`. Lines appear in the
//! order above (outside, start, events, arrows, expectations, variables,
//! init, updates).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::text;

use super::{EventDrivenModel, EventKind, RuleSpec, Variable, VariablesModel};

const ORDER: [&str; 9] = ["states", "outside", "start", "events", "arrow", "expect", "var", "init", "update"];

fn assignments(tok: &str, line: usize) -> Result<Vec<(Label, Label)>> {
    let inner = tok
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::parse(line, format!("expected {{x=v,..}}, got {tok:?}")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|a| assignment(a, line)).collect()
}

fn assignment(tok: &str, line: usize) -> Result<(Label, Label)> {
    let (n, v) = tok.split_once('=').ok_or_else(|| Error::parse(line, format!("expected name=value, got {tok:?}")))?;
    Ok((text::label(n, line)?, text::label(v, line)?))
}

fn format_assignments(model: &VariablesModel, values: &[Option<usize>]) -> String {
    let parts: Vec<String> = model
        .variables()
        .iter()
        .zip(values)
        .filter_map(|(var, v)| v.map(|v| format!("{}={}", var.name, var.domain[v])))
        .collect();
    format!("{{{}}}", parts.join(","))
}

pub fn parse_model(src: &str) -> Result<VariablesModel> {
    let mut states: Option<Vec<Label>> = None;
    let mut outside = None;
    let mut start = None;
    let mut events = None;
    let mut arrows = Vec::new();
    let mut expected = Vec::new();
    let mut variables = Vec::new();
    let mut initial = None;
    let mut rules = Vec::new();
    let mut section: Option<usize> = None;
    for (line, content) in text::content_lines(src) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let rank = ORDER
            .iter()
            .position(|k| *k == toks[0])
            .ok_or_else(|| Error::parse(line, format!("unknown keyword {:?}", toks[0])))?;
        let repeatable = matches!(toks[0], "arrow" | "expect" | "var" | "update");
        if section.is_some_and(|s| rank < s || (rank == s && !repeatable)) {
            return Err(Error::parse(line, format!("`{}` is repeated or out of order", toks[0])));
        }
        section = Some(rank);
        let args = &toks[1..];
        let single = |what: &str| -> Result<Label> {
            match args {
                [x] => text::label(x, line),
                _ => Err(Error::parse(line, format!("expected `{what} <name>`"))),
            }
        };
        match toks[0] {
            "states" => states = Some(args.iter().map(|t| text::label(t, line)).collect::<Result<Vec<_>>>()?),
            "outside" => outside = Some(single("outside")?),
            "start" => start = Some(single("start")?),
            "events" => {
                let mut list = Vec::new();
                for t in args {
                    let (name, kind) = t.split_once(':').unwrap_or((t, "visible"));
                    let kind: EventKind = kind.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?;
                    list.push((text::label(name, line)?, kind));
                }
                events = Some(list);
            }
            "arrow" => {
                let [s, e, t] = args else { return Err(Error::parse(line, "expected `arrow <state> <event> <state>`")) };
                arrows.push((text::label(s, line)?, text::label(e, line)?, text::label(t, line)?));
            }
            "expect" => {
                let [s, v] = args else { return Err(Error::parse(line, "expected `expect <state> <observation>`")) };
                expected.push((text::label(s, line)?, text::label(v, line)?));
            }
            "var" => {
                let (name, domain) =
                    args.split_first().ok_or_else(|| Error::parse(line, "expected `var <name> <values>`"))?;
                variables.push(Variable {
                    name: text::label(name, line)?,
                    domain: domain.iter().map(|t| text::label(t, line)).collect::<Result<_>>()?,
                });
            }
            "init" => initial = Some(args.iter().map(|t| assignment(t, line)).collect::<Result<Vec<_>>>()?),
            _ => {
                let [s, guard, e, "->", t, effects] = args else {
                    return Err(Error::parse(line, "expected `update <state> {..} <event> -> <state> {..}`"));
                };
                rules.push(RuleSpec {
                    state: text::label(s, line)?,
                    guard: assignments(guard, line)?,
                    event: text::label(e, line)?,
                    target: text::label(t, line)?,
                    effects: assignments(effects, line)?,
                });
            }
        }
    }
    let states = states.ok_or_else(|| Error::parse(0, "model lacks `states`"))?;
    let events = events.unwrap_or_default();
    let base = EventDrivenModel::new(states, outside.as_deref(), events, &arrows, &expected, start.as_deref())?;
    VariablesModel::new(base, variables, &initial.unwrap_or_default(), &rules)
}

pub fn print_model(model: &VariablesModel) -> String {
    let base = model.base();
    let mut out = String::from("states");
    for s in base.states().labels() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    if let Some(o) = base.outside() {
        let _ = writeln!(out, "outside {}", base.states().label(o));
    }
    let _ = writeln!(out, "start {}", base.states().label(base.start()));
    out.push_str("events");
    for e in 0..base.events().len() {
        let _ = write!(out, " {}:{}", base.events().label(e), base.kind(e));
    }
    out.push('\n');
    for (s, e, t) in base.arrows() {
        let _ = writeln!(out, "arrow {} {} {}", base.states().label(s), base.events().label(e), base.states().label(t));
    }
    for s in 0..base.states().len() {
        if let Some(v) = base.expected_observation(s) {
            let _ = writeln!(out, "expect {} {v}", base.states().label(s));
        }
    }
    for v in model.variables() {
        let _ = write!(out, "var {}", v.name);
        for d in &v.domain {
            let _ = write!(out, " {d}");
        }
        out.push('\n');
    }
    if !model.variables().is_empty() {
        let init: Vec<Option<usize>> = model.initial().0.iter().map(|&v| Some(v)).collect();
        let text = format_assignments(model, &init);
        let _ = writeln!(out, "init {}", text[1..text.len() - 1].replace(',', " "));
    }
    for r in model.rules() {
        let _ = writeln!(
            out,
            "update {} {} {} -> {} {}",
            base.states().label(r.state),
            format_assignments(model, &r.guard),
            base.events().label(r.event),
            base.states().label(r.target),
            format_assignments(model, &r.effects)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_round_trip() {
        let src = "states out night day\noutside out\nstart out\nevents sunrise:visible sunset:visible cold:invisible\n\
                   arrow day sunset night\narrow night sunrise day\narrow out sunrise day\nexpect day light\n";
        let m = parse_model(src).unwrap();
        let printed = print_model(&m);
        assert_eq!(parse_model(&printed).unwrap(), m);
        assert_eq!(print_model(&parse_model(&printed).unwrap()), printed);
        assert!(printed.starts_with("states out night day\noutside out\nstart out\n"));
    }

    #[test]
    fn variables_round_trip() {
        let src = "states p q\nstart p\nevents e:visible\narrow p e q\narrow q e p\nvar n 0 1 2\ninit n=1\n\
                   update p {n=0} e -> q {n=1}\nupdate q {} e -> p {n=2}\n";
        let m = parse_model(src).unwrap();
        assert_eq!(print_model(&m), src);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(parse_model("states a\nwobble\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_model("events e\nstates a\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_model("states a\nevents e\narrow a e b\n").is_err());
        assert!(parse_model("states a\nevents e:odd\n").is_err());
    }
}

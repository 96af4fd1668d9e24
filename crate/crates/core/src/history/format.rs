//! Life log text format.
//!
//! ```text
//! # life steps=3 cause=natural-death
//! bad={} action=a obs=black
//! bad={b} action=a obs=white
//! bad={} action=b obs=white
//! pending bad={a} action=b
//! ```
//!
//! Set elements are printed in lexicographic order, so printing is a
//! canonical form and `print(parse(x)) == x` for canonical input.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::text;
use crate::world::Termination;

use super::{History, HistoryStep, Pending};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LifeLogHeader {
    pub steps: usize,
    pub cause: Option<Termination>,
}

pub fn print_life_log(history: &History, cause: Option<Termination>) -> String {
    let mut out = format!("# life steps={}", history.len());
    if let Some(c) = cause {
        let _ = write!(out, " cause={c}");
    }
    out.push('\n');
    for s in history.steps() {
        let _ = writeln!(
            out,
            "bad={} action={} obs={}",
            text::format_set(&s.bad_before),
            s.action,
            s.observation
        );
    }
    if let Some(p) = history.pending() {
        let _ = writeln!(out, "pending bad={} action={}", text::format_set(&p.bad), p.action);
    }
    out
}

pub fn parse_life_log(src: &str) -> Result<(History, LifeLogHeader)> {
    let mut header = None;
    let mut steps = Vec::new();
    let mut pending = None;
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(h) = content.strip_prefix("# life") {
            if header.is_some() || !steps.is_empty() {
                return Err(Error::parse(line, "the header must come first and only once"));
            }
            let mut count = None;
            let mut cause = None;
            for tok in h.split_whitespace() {
                if let Some(v) = tok.strip_prefix("steps=") {
                    count = Some(text::number::<usize>(v, line)?);
                } else if let Some(v) = tok.strip_prefix("cause=") {
                    cause = Some(v.parse::<Termination>().map_err(|e| Error::parse(line, e.to_string()))?);
                } else {
                    return Err(Error::parse(line, format!("unknown header field {tok:?}")));
                }
            }
            let steps = count.ok_or_else(|| Error::parse(line, "header lacks steps="))?;
            header = Some(LifeLogHeader { steps, cause });
            continue;
        }
        if content.starts_with('#') {
            continue;
        }
        if pending.is_some() {
            return Err(Error::parse(line, "nothing may follow the pending line"));
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[..] {
            ["pending", bad, action] => {
                let bad = text::set(text::keyed(bad, "bad", line)?, line)?;
                let action = text::label(text::keyed(action, "action", line)?, line)?;
                if bad.contains(&action) {
                    return Err(Error::parse(line, "pending action is in its own bad set"));
                }
                pending = Some(Pending { bad, action });
            }
            [bad, action, obs] => {
                let bad = text::set(text::keyed(bad, "bad", line)?, line)?;
                let action = text::label(text::keyed(action, "action", line)?, line)?;
                let obs = text::label(text::keyed(obs, "obs", line)?, line)?;
                steps.push(HistoryStep::new(bad, action, obs).map_err(|e| Error::parse(line, e.to_string()))?);
            }
            _ => return Err(Error::parse(line, "expected `bad={..} action=.. obs=..`")),
        }
    }
    let header = header.unwrap_or(LifeLogHeader { steps: steps.len(), cause: None });
    if header.steps != steps.len() {
        return Err(Error::parse(
            0,
            format!("header announces {} steps, found {}", header.steps, steps.len()),
        ));
    }
    Ok((History::from_steps(steps, pending)?, header))
}

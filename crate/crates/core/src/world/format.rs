//! World files.
//!
//! ```text
//! world perfect
//! states 1 2
//! actions a b
//! observations white black
//! current 1
//! transition 1 a 2
//! transition 1 b 1
//! ...
//! view 1 white
//! view 2 black
//! incorrect 2 {a}
//! ```
//!
//! A random world uses `world random`, `arrow s a t` lines (several per
//! pair allowed), `view s v1 v2 ...` listing possible observations and
//! `incorrect s a=0.3 b=1` with per-visit probabilities. Sections appear in
//! the order shown; printing emits the canonical form.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::text;

use super::{PerfectWorld, RandomWorld, World};

#[derive(Clone, Debug)]
pub enum WorldFile {
    Perfect(PerfectWorld),
    Random(RandomWorld),
}

impl WorldFile {
    pub fn as_world(&self) -> &dyn World {
        match self {
            WorldFile::Perfect(w) => w,
            WorldFile::Random(w) => w,
        }
    }
}

fn labels_line(out: &mut String, key: &str, labels: &[Label]) {
    out.push_str(key);
    for l in labels {
        out.push(' ');
        out.push_str(l);
    }
    out.push('\n');
}

pub fn print_world(file: &WorldFile) -> String {
    let world = file.as_world();
    let (states, actions, obs) = (world.states(), world.actions(), world.observations());
    let mut out = String::new();
    out.push_str(match file {
        WorldFile::Perfect(_) => "world perfect\n",
        WorldFile::Random(_) => "world random\n",
    });
    labels_line(&mut out, "states", states.labels());
    labels_line(&mut out, "actions", actions.labels());
    labels_line(&mut out, "observations", obs.labels());
    let _ = writeln!(out, "current {}", states.label(world.start()));
    let keyword = match file {
        WorldFile::Perfect(_) => "transition",
        WorldFile::Random(_) => "arrow",
    };
    for s in 0..states.len() {
        for a in 0..actions.len() {
            for &t in world.targets(s, a) {
                let _ = writeln!(out, "{keyword} {} {} {}", states.label(s), actions.label(a), states.label(t));
            }
        }
    }
    match file {
        WorldFile::Perfect(w) => {
            for s in 0..states.len() {
                let _ = writeln!(out, "view {} {}", states.label(s), obs.label(w.view(s)));
            }
            for s in 0..states.len() {
                let inc = w.incorrect_labels(s);
                if !inc.is_empty() {
                    let _ = writeln!(out, "incorrect {} {}", states.label(s), text::format_set(&inc));
                }
            }
        }
        WorldFile::Random(w) => {
            for s in 0..states.len() {
                let _ = write!(out, "view {}", states.label(s));
                for &v in w.view_options(s) {
                    let _ = write!(out, " {}", obs.label(v));
                }
                out.push('\n');
            }
            for s in 0..states.len() {
                let probs: Vec<String> = (0..actions.len())
                    .filter(|&a| w.incorrect_probability(s, a) > 0.0)
                    .map(|a| format!("{}={}", actions.label(a), w.incorrect_probability(s, a)))
                    .collect();
                if !probs.is_empty() {
                    let _ = writeln!(out, "incorrect {} {}", states.label(s), probs.join(" "));
                }
            }
        }
    }
    out
}

const SECTIONS: [&str; 7] = ["states", "actions", "observations", "current", "arrows", "view", "incorrect"];

pub fn parse_world(src: &str) -> Result<WorldFile> {
    let mut lines = text::content_lines(src);
    let (line, header) = lines.next().ok_or_else(|| Error::parse(1, "empty world file"))?;
    let random = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["world", "perfect"] => false,
        ["world", "random"] => true,
        _ => return Err(Error::parse(line, "expected `world perfect` or `world random`")),
    };
    let mut states = None;
    let mut actions = None;
    let mut observations = None;
    let mut current = None;
    let mut arrows = Vec::new();
    let mut perfect_views = Vec::new();
    let mut random_views = Vec::new();
    let mut perfect_inc: Vec<(Label, BTreeSet<Label>)> = Vec::new();
    let mut random_inc: Vec<(Label, Vec<(Label, f64)>)> = Vec::new();
    let mut section = 0;
    for (line, content) in lines {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let key = match (toks[0], random) {
            ("transition", false) | ("arrow", true) => "arrows",
            ("transition", true) | ("arrow", false) => {
                return Err(Error::parse(line, format!("`{}` does not belong in this kind of world", toks[0])))
            }
            (k, _) => k,
        };
        let rank = SECTIONS
            .iter()
            .position(|s| *s == key)
            .ok_or_else(|| Error::parse(line, format!("unknown keyword {:?}", toks[0])))?;
        if rank < section {
            return Err(Error::parse(line, format!("`{}` is out of order", toks[0])));
        }
        let once = rank <= 3;
        if once && rank == section && line_seen(rank, &states, &actions, &observations, &current) {
            return Err(Error::parse(line, format!("`{key}` given twice")));
        }
        section = rank;
        let args = &toks[1..];
        let labels = |args: &[&str]| args.iter().map(|t| text::label(t, line)).collect::<Result<Vec<_>>>();
        match key {
            "states" => states = Some(labels(args)?),
            "actions" => actions = Some(labels(args)?),
            "observations" => observations = Some(labels(args)?),
            "current" => {
                let [s] = args else { return Err(Error::parse(line, "expected `current <state>`")) };
                current = Some(text::label(s, line)?);
            }
            "arrows" => {
                let [s, a, t] = args else { return Err(Error::parse(line, "expected `<state> <action> <state>`")) };
                arrows.push((text::label(s, line)?, text::label(a, line)?, text::label(t, line)?));
            }
            "view" => {
                let l = labels(args)?;
                match (random, l.len()) {
                    (false, 2) => perfect_views.push((l[0].clone(), l[1].clone())),
                    (true, n) if n >= 2 => random_views.push((l[0].clone(), l[1..].to_vec())),
                    _ => return Err(Error::parse(line, "malformed view line")),
                }
            }
            _ => {
                let (s, rest) = args.split_first().ok_or_else(|| Error::parse(line, "expected a state"))?;
                let s = text::label(s, line)?;
                if random {
                    let probs = rest
                        .iter()
                        .map(|t| {
                            let (a, p) = t.split_once('=').ok_or_else(|| Error::parse(line, "expected action=probability"))?;
                            Ok((text::label(a, line)?, text::number::<f64>(p, line)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    random_inc.push((s, probs));
                } else {
                    let [set] = rest else { return Err(Error::parse(line, "expected `incorrect <state> {..}`")) };
                    perfect_inc.push((s, text::set(set, line)?));
                }
            }
        }
    }
    let missing = |what: &str| Error::parse(0, format!("world file lacks `{what}`"));
    let states = states.ok_or_else(|| missing("states"))?;
    let actions = actions.ok_or_else(|| missing("actions"))?;
    let observations = observations.ok_or_else(|| missing("observations"))?;
    let current = current.ok_or_else(|| missing("current"))?;
    Ok(if random {
        WorldFile::Random(RandomWorld::new(states, actions, observations, &arrows, &random_views, &random_inc, &current)?)
    } else {
        WorldFile::Perfect(PerfectWorld::new(states, actions, observations, &arrows, &perfect_views, &perfect_inc, &current)?)
    })
}

fn line_seen(
    rank: usize,
    states: &Option<Vec<Label>>,
    actions: &Option<Vec<Label>>,
    observations: &Option<Vec<Label>>,
    current: &Option<Label>,
) -> bool {
    match rank {
        0 => states.is_some(),
        1 => actions.is_some(),
        2 => observations.is_some(),
        _ => current.is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn perfect_round_trip() {
        let w = WorldFile::Perfect(bundled::w1_guarded());
        let printed = print_world(&w);
        assert!(printed.contains("incorrect 2 {a}"));
        assert_eq!(print_world(&parse_world(&printed).unwrap()), printed);
    }

    #[test]
    fn random_round_trip() {
        let src = "world random\nstates h t\nactions flip\nobservations H T\ncurrent h\n\
                   arrow h flip h\narrow h flip t\narrow t flip h\n\
                   view h H\nview t H T\nincorrect t flip=0.25\n";
        let w = parse_world(src).unwrap();
        assert_eq!(print_world(&w), src);
    }

    #[test]
    fn rejects_disorder_and_duplicates() {
        let src = "world perfect\nactions a\nstates 1\n";
        assert!(matches!(parse_world(src), Err(Error::Parse { line: 3, .. })));
        let src = "world perfect\nstates 1\nstates 2\n";
        assert!(parse_world(src).is_err());
        assert!(parse_world("world odd\n").is_err());
        assert!(parse_world("world perfect\nstates 1\nactions a\nobservations v\ncurrent 1\narrow 1 a 1\n").is_err());
    }

    #[test]
    fn missing_transition_is_reported() {
        let src = "world perfect\nstates 1 2\nactions a\nobservations v\ncurrent 1\ntransition 1 a 2\nview 1 v\nview 2 v\n";
        assert!(matches!(parse_world(src), Err(Error::Input(m)) if m.contains("missing")));
    }
}

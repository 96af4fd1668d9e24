//! Small worlds, models and event definitions used by examples and tests.

use crate::edm::{parse_model, EventDrivenModel, VariablesModel};
use crate::history::EventDefinitions;
use crate::seed::Seed;
use crate::world::{generate_world, parse_world, GenerateConfig, PerfectWorld, WorldFile};

/// Two states, two actions; `a` toggles, `b` stays. White in 1, black in 2.
pub const W1: &str = "\
world perfect
states 1 2
actions a b
observations white black
current 1
transition 1 a 2
transition 1 b 1
transition 2 a 1
transition 2 b 2
view 1 white
view 2 black
";

/// Four moments of a day: two of night (dark), two of day (light).
pub const DAY_NIGHT_WORLD: &str = "\
world perfect
states n1 n2 d1 d2
actions wait
observations dark light
current n1
transition n1 wait n2
transition n2 wait d1
transition d1 wait d2
transition d2 wait n1
view n1 dark
view n2 dark
view d1 light
view d2 light
";

pub const DAY_NIGHT_EVENTS: &str = "\
visible sunrise = [* * dark] [* * light]
visible sunset = [* * light] [* * dark]
";

pub const DAY_NIGHT_MODEL: &str = "\
states night day
start night
events sunrise:visible sunset:visible
arrow night sunrise day
arrow day sunset night
expect night dark
expect day light
";

/// Knows nothing: every event loops on the only state.
pub const SINGLE_STATE_MODEL: &str = "\
states s
start s
events sunrise:visible sunset:visible
arrow s sunrise s
arrow s sunset s
";

/// The single-state model over the events `a` and `b`.
pub const SINGLE_STATE_AB: &str = "\
states s
start s
events a:visible b:visible
arrow s a s
arrow s b s
";

pub const WEEK_MODEL: &str = "\
states sun mon tue wed thu fri sat
start sun
events midnight:visible
arrow sun midnight mon
arrow mon midnight tue
arrow tue midnight wed
arrow wed midnight thu
arrow thu midnight fri
arrow fri midnight sat
arrow sat midnight sun
";

/// Remembers which of `a` and `b` happened last.
pub const REMEMBER_LAST_MODEL: &str = "\
states last_a last_b
start last_a
events a:visible b:visible
arrow last_a a last_a
arrow last_a b last_b
arrow last_b a last_a
arrow last_b b last_b
";

/// Predicts the next event: only `a` leaves 1, only `b` leaves 2, and both
/// may lead anywhere.
pub const PREDICTOR_MODEL: &str = "\
states 1 2
start 1
events a:visible b:visible
arrow 1 a 1
arrow 1 a 2
arrow 2 b 1
arrow 2 b 2
";

/// The observation is the last action.
pub const ECHO_WORLD: &str = "\
world perfect
states sa sb
actions a b
observations seen_a seen_b
current sa
transition sa a sa
transition sa b sb
transition sb a sa
transition sb b sb
view sa seen_a
view sb seen_b
";

pub const ECHO_EVENTS: &str = "\
visible a = [* a *]
visible b = [* b *]
";

pub const PHASE_LEFT: &str = "\
states p0 p1
start p0
events tick:visible
arrow p0 tick p1
arrow p1 tick p0
";

pub const PHASE_RIGHT: &str = "\
states q0 q1
start q0
events tick:visible
arrow q0 tick q1
arrow q1 tick q0
";

/// Two states and a three-valued counter, with nondeterministic choices.
pub const COUNTER_MODEL: &str = "\
states p q
start p
events e:visible f:visible
arrow p e q
arrow p f p
arrow p f q
arrow q e p
arrow q f q
var n 0 1 2
init n=0
update p {n=0} e -> q {n=1}
update p {n=1} e -> q {n=2}
update p {n=2} e -> q {n=0}
update p {n=2} f -> p {n=0}
update p {n=2} f -> q {n=1}
update q {} f -> q {n=0}
";

fn perfect(src: &str) -> PerfectWorld {
    match parse_world(src).expect("bundled world parses") {
        WorldFile::Perfect(w) => w,
        WorldFile::Random(_) => unreachable!("bundled world is perfect"),
    }
}

fn plain(src: &str) -> EventDrivenModel {
    parse_model(src).expect("bundled model parses").base().clone()
}

fn events(src: &str) -> EventDefinitions {
    EventDefinitions::parse(src).expect("bundled events parse")
}

pub fn w1() -> PerfectWorld {
    perfect(W1)
}

/// W1 where `a` is incorrect in state 2.
pub fn w1_guarded() -> PerfectWorld {
    perfect(&format!("{W1}incorrect 2 {{a}}\n"))
}

/// Three states: 9 is an absolute beginning,
/// 4 a sudden death, 1 keeps a usable red loop.
pub fn beginning_and_death() -> PerfectWorld {
    perfect(
        "world perfect\nstates 1 4 9\nactions red blue\nobservations c\ncurrent 9\n\
         transition 1 red 1\ntransition 1 blue 4\ntransition 4 red 4\ntransition 4 blue 4\n\
         transition 9 red 1\ntransition 9 blue 9\nview 1 c\nview 4 c\nview 9 c\n\
         incorrect 4 {blue,red}\nincorrect 9 {blue}\n",
    )
}

pub fn day_night_world() -> PerfectWorld {
    perfect(DAY_NIGHT_WORLD)
}

pub fn day_night_events() -> EventDefinitions {
    events(DAY_NIGHT_EVENTS)
}

pub fn day_night_model() -> EventDrivenModel {
    plain(DAY_NIGHT_MODEL)
}

pub fn single_state_model() -> EventDrivenModel {
    plain(SINGLE_STATE_MODEL)
}

pub fn single_state_model_ab() -> EventDrivenModel {
    plain(SINGLE_STATE_AB)
}

pub fn week_model() -> EventDrivenModel {
    plain(WEEK_MODEL)
}

pub fn remember_last_model() -> EventDrivenModel {
    plain(REMEMBER_LAST_MODEL)
}

pub fn predictor_model() -> EventDrivenModel {
    plain(PREDICTOR_MODEL)
}

pub fn echo_world() -> PerfectWorld {
    perfect(ECHO_WORLD)
}

pub fn echo_events() -> EventDefinitions {
    events(ECHO_EVENTS)
}

pub fn phase_locked_pair() -> (EventDrivenModel, EventDrivenModel) {
    (plain(PHASE_LEFT), plain(PHASE_RIGHT))
}

pub fn counter_model() -> VariablesModel {
    parse_model(COUNTER_MODEL).expect("bundled model parses")
}

pub const WORLD9_CONFIG: (usize, usize, usize, f64, u64) = (9, 3, 4, 0.2, 5);

/// The generated nine-state world: 3 actions, 4 observations, density 0.2, seed 5.
pub fn world9() -> PerfectWorld {
    let (s, a, v, d, seed) = WORLD9_CONFIG;
    generate_world(&GenerateConfig::new(s, a, v, d), Seed(seed)).expect("bundled generation succeeds")
}

/// Files making up a named example, as `(file name, contents)`.
pub fn example_files(name: &str) -> Option<Vec<(&'static str, String)>> {
    let files = match name {
        "w1" => vec![("world.txt", W1.to_string())],
        "day-night" => vec![
            ("world.txt", DAY_NIGHT_WORLD.to_string()),
            ("events.txt", DAY_NIGHT_EVENTS.to_string()),
            ("model.txt", DAY_NIGHT_MODEL.to_string()),
            ("single.txt", SINGLE_STATE_MODEL.to_string()),
        ],
        "week" => vec![("week.txt", WEEK_MODEL.to_string()), ("day-night.txt", DAY_NIGHT_MODEL.to_string())],
        "remember-last" => vec![
            ("world.txt", ECHO_WORLD.to_string()),
            ("events.txt", ECHO_EVENTS.to_string()),
            ("model.txt", REMEMBER_LAST_MODEL.to_string()),
        ],
        "predictor" => vec![("model.txt", PREDICTOR_MODEL.to_string()), ("single.txt", SINGLE_STATE_AB.to_string())],
        "phase-locked" => vec![("left.txt", PHASE_LEFT.to_string()), ("right.txt", PHASE_RIGHT.to_string())],
        "counter" => vec![("model.txt", COUNTER_MODEL.to_string())],
        "world9" => vec![("world.txt", crate::world::print_world(&WorldFile::Perfect(world9())))],
        _ => return None,
    };
    Some(files)
}

pub const EXAMPLES: [&str; 8] =
    ["w1", "day-night", "week", "remember-last", "predictor", "phase-locked", "counter", "world9"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edm::print_model;
    use crate::world::print_world;

    #[test]
    fn bundled_texts_are_canonical() {
        for src in [W1, DAY_NIGHT_WORLD, ECHO_WORLD] {
            assert_eq!(print_world(&parse_world(src).unwrap()), src);
        }
        for src in [DAY_NIGHT_MODEL, SINGLE_STATE_MODEL, SINGLE_STATE_AB, WEEK_MODEL, REMEMBER_LAST_MODEL, PREDICTOR_MODEL, PHASE_LEFT, COUNTER_MODEL] {
            assert_eq!(print_model(&parse_model(src).unwrap()), src);
        }
        for src in [DAY_NIGHT_EVENTS, ECHO_EVENTS] {
            assert_eq!(events(src).to_string(), src);
        }
    }

    #[test]
    fn every_example_resolves() {
        for name in EXAMPLES {
            assert!(example_files(name).is_some(), "{name}");
        }
        assert!(example_files("nope").is_none());
    }
}

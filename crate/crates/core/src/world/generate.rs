use std::collections::BTreeSet;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::seed::{Seed, Stream};

use super::PerfectWorld;

/// Upper bound on `states * actions` for generated worlds.
pub const MAX_TABLE: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GenerateConfig {
    pub states: usize,
    pub actions: usize,
    pub observations: usize,
    /// Probability that a given move is incorrect in a given state.
    pub incorrect_density: f64,
    pub allow_sudden_death: bool,
    /// Resampling attempts per state before giving up.
    pub max_retries: usize,
}

impl GenerateConfig {
    pub fn new(states: usize, actions: usize, observations: usize, incorrect_density: f64) -> Self {
        GenerateConfig { states, actions, observations, incorrect_density, allow_sudden_death: false, max_retries: 1000 }
    }
}

/// A random perfect world with states `s1..`, actions `a1..` and
/// observations `o1..`, starting in `s1`. Transitions and views are uniform;
/// each move is incorrect independently with the configured density. Unless
/// allowed, a state whose moves all came out incorrect is resampled.
pub fn generate_world(config: &GenerateConfig, seed: Seed) -> Result<PerfectWorld> {
    let GenerateConfig { states: n_s, actions: n_a, observations: n_v, incorrect_density: p, .. } = *config;
    if n_s == 0 || n_a == 0 || n_v == 0 {
        return Err(Error::input("state, action and observation counts must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("incorrect density {p} is outside [0, 1]")));
    }
    let needed = n_s as u128 * n_a as u128;
    if needed > MAX_TABLE {
        return Err(Error::Capacity { what: "transition table".into(), needed, limit: MAX_TABLE });
    }
    let mut rng = seed.stream(Stream::WorldGen);
    let names = |prefix: &str, n: usize| (1..=n).map(|i| Label::from(format!("{prefix}{i}"))).collect::<Vec<_>>();
    let (states, actions, observations) = (names("s", n_s), names("a", n_a), names("o", n_v));
    let mut transitions = Vec::with_capacity(n_s * n_a);
    for s in &states {
        for a in &actions {
            transitions.push((s.clone(), a.clone(), states[rng.random_range(0..n_s)].clone()));
        }
    }
    let view: Vec<(Label, Label)> =
        states.iter().map(|s| (s.clone(), observations[rng.random_range(0..n_v)].clone())).collect();
    let mut incorrect = Vec::new();
    for s in &states {
        let mut attempt = 0;
        let set = loop {
            let set: BTreeSet<Label> = actions.iter().filter(|_| rng.random_bool(p)).cloned().collect();
            if config.allow_sudden_death || set.len() < n_a {
                break set;
            }
            attempt += 1;
            if attempt > config.max_retries {
                return Err(Error::Generation(format!(
                    "state {s} drew all moves incorrect {attempt} times at density {p}"
                )));
            }
        };
        if !set.is_empty() {
            incorrect.push((s.clone(), set));
        }
    }
    PerfectWorld::new(states, actions, observations, &transitions, &view, &incorrect, "s1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{classify_state, print_world, StateClass, World, WorldFile};

    #[test]
    fn single_state_world() {
        let w = generate_world(&GenerateConfig::new(1, 1, 1, 0.0), Seed(0)).unwrap();
        assert_eq!(w.transition(0, 0), 0);
        assert!(w.incorrect_labels(0).is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let c = GenerateConfig::new(9, 3, 4, 0.2);
        let a = print_world(&WorldFile::Perfect(generate_world(&c, Seed(5)).unwrap()));
        let b = print_world(&WorldFile::Perfect(generate_world(&c, Seed(5)).unwrap()));
        let other = print_world(&WorldFile::Perfect(generate_world(&c, Seed(6)).unwrap()));
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn no_sudden_death_unless_allowed() {
        let w = generate_world(&GenerateConfig::new(20, 2, 2, 0.7), Seed(1)).unwrap();
        for s in w.states().labels() {
            assert_ne!(classify_state(&w, s).unwrap(), StateClass::SuddenDeath);
        }
    }

    #[test]
    fn infeasible_density_fails() {
        let r = generate_world(&GenerateConfig::new(3, 2, 2, 1.0), Seed(1));
        assert!(matches!(r, Err(Error::Generation(_))));
        let mut c = GenerateConfig::new(3, 2, 2, 1.0);
        c.allow_sudden_death = true;
        assert!(generate_world(&c, Seed(1)).is_ok());
        assert!(generate_world(&GenerateConfig::new(0, 2, 2, 0.1), Seed(1)).is_err());
    }
}

use edmkit::history::full_from_trace;
use edmkit::inference::abridge;
use edmkit::seed::Seed;
use edmkit::world::{
    generate_world, print_world, run_life, GenerateConfig, PolicySpec, RandomWorld, Termination, World, WorldFile,
};
use edmkit::Label;
use proptest::prelude::*;

fn labels(prefix: &str, n: usize) -> Vec<Label> {
    (1..=n).map(|i| Label::from(format!("{prefix}{i}").as_str())).collect()
}

/// A random nondeterministic world built directly from drawn tables.
fn random_world(states: usize, actions: usize, fanout: &[usize], density: f64) -> RandomWorld {
    let s = labels("s", states);
    let a = labels("a", actions);
    let v = labels("o", 2);
    let mut relation = Vec::new();
    for (i, from) in s.iter().enumerate() {
        for (j, act) in a.iter().enumerate() {
            let k = fanout[(i * actions + j) % fanout.len()] % states + 1;
            for d in 0..k {
                relation.push((from.clone(), act.clone(), s[(i + j + d) % states].clone()));
            }
        }
    }
    let views: Vec<(Label, Vec<Label>)> = s.iter().map(|x| (x.clone(), v.clone())).collect();
    let incorrect: Vec<(Label, Vec<(Label, f64)>)> =
        s.iter().map(|x| (x.clone(), a.iter().map(|y| (y.clone(), density)).collect())).collect();
    RandomWorld::new(s.clone(), a, v, &relation, &views, &incorrect, &s[0]).unwrap()
}

fn perfect_world(states: usize, actions: usize, density: f64, seed: u64) -> WorldFile {
    WorldFile::Perfect(generate_world(&GenerateConfig::new(states, actions, 3, density), Seed(seed)).unwrap())
}

fn check_life(world: &dyn World, horizon: usize, seed: u64) {
    let mut policy = PolicySpec::Uniform.build().unwrap();
    let life = run_life(world, policy.as_mut(), horizon, Seed(seed)).unwrap();
    // bad sets are always inside the full incorrect sets
    let full = full_from_trace(&life.history, world, &life.path).unwrap();
    for (s, f) in life.history.steps().iter().zip(&full.steps) {
        assert!(s.bad_before.is_subset(&f.full_before));
        assert!(!f.full_before.contains(&s.action));
    }
    if let (Some(p), Some(f)) = (life.history.pending(), &full.pending) {
        assert!(p.bad.is_subset(&f.full));
    }
    // step conservation
    assert_eq!(life.path.transitions(), life.history.len());
    match life.cause {
        Termination::NaturalDeath => assert_eq!(life.history.len(), horizon),
        Termination::SuddenDeath => assert!(life.history.len() <= horizon),
    }
    // count conservation on the abridged model
    let actions: Vec<Label> = life.history.steps().iter().map(|s| s.action.clone()).collect();
    let graph: &dyn edmkit::inference::ArrowGraph = &WorldGraph(world);
    let ab = abridge(graph, &life.path.states, &actions).unwrap();
    assert_eq!(ab.transitions(), life.history.len());
    assert_eq!(ab.visits(), life.path.states.len());
}

struct WorldGraph<'a>(&'a dyn World);

impl edmkit::inference::ArrowGraph for WorldGraph<'_> {
    fn has_arrow(&self, from: &str, label: &str, to: &str) -> edmkit::Result<bool> {
        let w = self.0;
        let s = w.states().require(from, "state")?;
        let a = w.actions().require(label, "action")?;
        let t = w.states().require(to, "state")?;
        Ok(w.targets(s, a).contains(&t))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perfect_lives_are_consistent(states in 1usize..8, actions in 1usize..4, density in 0.0f64..0.6, seed in any::<u64>(), horizon in 0usize..120) {
        let w = perfect_world(states, actions, density, seed);
        check_life(w.as_world(), horizon, seed);
    }

    #[test]
    fn random_lives_are_consistent(states in 1usize..6, actions in 1usize..4, fanout in proptest::collection::vec(0usize..3, 1..8), density in 0.0f64..0.5, seed in any::<u64>(), horizon in 0usize..120) {
        let w = random_world(states, actions, &fanout, density);
        check_life(&w, horizon, seed);
    }

    #[test]
    fn replay_is_deterministic(states in 1usize..8, actions in 1usize..4, seed in any::<u64>(), eps in 0.0f64..1.0) {
        let w = perfect_world(states, actions, 0.3, seed);
        let spec = PolicySpec::RepeatLast(eps);
        let run = |s: u64| {
            let mut p = spec.build().unwrap();
            run_life(w.as_world(), p.as_mut(), 60, Seed(s)).unwrap()
        };
        let (a, b) = (run(seed), run(seed));
        prop_assert_eq!(&a.history, &b.history);
        prop_assert_eq!(&a.path, &b.path);
    }

    #[test]
    fn generation_is_deterministic(states in 1usize..10, actions in 1usize..4, seed in any::<u64>()) {
        let a = print_world(&perfect_world(states, actions, 0.2, seed));
        let b = print_world(&perfect_world(states, actions, 0.2, seed));
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(print_world(&edmkit::world::parse_world(&a).unwrap()), a);
    }
}

#[test]
fn random_world_with_certain_rejection_dies_at_once() {
    let w = random_world(2, 2, &[0], 1.0);
    let mut p = PolicySpec::Uniform.build().unwrap();
    let life = run_life(&w, p.as_mut(), 10, Seed(0)).unwrap();
    assert_eq!(life.cause, Termination::SuddenDeath);
    assert_eq!(life.history.len(), 0);
}

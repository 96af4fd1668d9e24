use std::collections::BTreeSet;

use edmkit::bundled;
use edmkit::compose::{cartesian, simulate_composite, Component};
use edmkit::edm::{flatten, project_events, simulate_edm, Dynamics, EventStream, SequencingOracle, VariablesModel, DEFAULT_FLATTEN_BOUND};
use edmkit::history::{occurred, EventDefinition, EventDefinitions, History, HistoryStep};
use edmkit::seed::Seed;
use edmkit::Label;
use proptest::prelude::*;

fn l(s: &str) -> Label {
    Label::from(s)
}

fn history_strategy() -> impl Strategy<Value = History> {
    proptest::collection::vec((any::<bool>(), any::<bool>(), any::<bool>()), 0..40).prop_map(|v| {
        let steps = v
            .into_iter()
            .map(|(a, o, bad)| {
                let action = if a { l("a") } else { l("b") };
                let other = if a { l("b") } else { l("a") };
                let bad_before = if bad { [other].into() } else { BTreeSet::new() };
                HistoryStep::new(bad_before, action, if o { l("dark") } else { l("light") }).unwrap()
            })
            .collect();
        History::from_steps(steps, None).unwrap()
    })
}

fn definitions() -> EventDefinitions {
    EventDefinitions::parse(
        "visible sunrise = [* * dark] [* * light]\nvisible sunset = [* * light] [* * dark]\nvisible a = [* a *]\nvisible tried = [+a * *] | [+b * *]\n",
    )
    .unwrap()
}

fn stream_strategy(alphabet: &'static [&'static str], len: std::ops::Range<usize>) -> impl Strategy<Value = EventStream> {
    proptest::collection::vec(proptest::collection::vec(any::<bool>(), alphabet.len()), len).prop_map(move |rows| {
        let sets = rows
            .into_iter()
            .map(|bits| alphabet.iter().zip(bits).filter(|(_, b)| *b).map(|(e, _)| l(e)).collect())
            .collect();
        EventStream::from_sets(alphabet.iter().map(|e| l(e)), sets).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn occurrence_ignores_the_future(h in history_strategy()) {
        let defs = definitions();
        let n = h.len();
        for def in &defs.0 {
            let EventDefinition::Visible(e) = def else { continue };
            for t in 0..=n {
                let now = occurred(e, &h, t);
                for later in t..=n {
                    prop_assert_eq!(occurred(e, &h.prefix(later).unwrap(), t), now);
                }
            }
        }
    }

    #[test]
    fn projection_commutes_with_prefix(h in history_strategy(), cut in 0usize..40) {
        let defs = definitions();
        let k = cut.min(h.len());
        let whole = project_events(&h, &defs, None).unwrap();
        let part = project_events(&h.prefix(k).unwrap(), &defs, None).unwrap();
        prop_assert_eq!(whole.prefix(k), part);
    }

    #[test]
    fn local_and_prefix_partition_the_history(h in history_strategy(), cut in 0usize..40) {
        let k = cut.min(h.len());
        let mut joined = h.prefix(h.len() - k).unwrap().steps().to_vec();
        joined.extend(h.local(k).unwrap().suffix);
        prop_assert_eq!(joined.as_slice(), h.steps());
    }

    #[test]
    fn flattening_is_a_bisimulation(stream in stream_strategy(&["e", "f"], 0..200), seed in any::<u64>()) {
        let model = bundled::counter_model();
        let flat = flatten(&model, DEFAULT_FLATTEN_BOUND).unwrap();
        prop_assert_eq!(flat.states().len(), model.configs());
        let a = simulate_edm(&model, &stream, &SequencingOracle, Seed(seed), model.start()).unwrap();
        let b = simulate_edm(&flat, &stream, &SequencingOracle, Seed(seed), flat.start()).unwrap();
        prop_assert_eq!(&a.path, &b.path);
        prop_assert_eq!(a.labels(&model), b.labels(&flat));
    }

    #[test]
    fn composite_projection_matches_components(stream in stream_strategy(&["midnight", "sunrise", "sunset"], 0..200), seed in any::<u64>()) {
        let week = VariablesModel::plain(bundled::week_model());
        let sky = VariablesModel::plain(bundled::day_night_model());
        let cart = cartesian(vec![
            Component { name: l("week"), model: week.clone() },
            Component { name: l("sky"), model: sky.clone() },
        ]).unwrap();
        let composite = simulate_composite(&cart, &stream, Seed(seed)).unwrap();
        for (i, m) in [week, sky].iter().enumerate() {
            let own: BTreeSet<Label> = m.events().labels().iter().cloned().collect();
            let sim = simulate_edm(m, &stream.restrict(&own), &SequencingOracle, Seed(seed).child(i as u64), m.start()).unwrap();
            let projected: Vec<usize> = composite.iter().map(|c| c[i]).collect();
            // ticks of other components leave this one in place
            let mut expected = vec![sim.path[0]];
            let mut j = 0;
            for t in stream.ticks() {
                if t.events.iter().any(|e| own.contains(e)) {
                    j += 1;
                }
                expected.push(sim.path[j]);
            }
            prop_assert_eq!(projected, expected);
        }
    }
}

#[test]
fn ten_booleans_give_1024_states() {
    let mut src = String::from("states s\nstart s\nevents e:visible\narrow s e s\n");
    for i in 0..10 {
        src.push_str(&format!("var x{i} 0 1\n"));
    }
    let model = edmkit::edm::parse_model(&src).unwrap();
    assert_eq!(flatten(&model, DEFAULT_FLATTEN_BOUND).unwrap().states().len(), 1024);
    assert!(matches!(flatten(&model, 1000), Err(edmkit::Error::Capacity { .. })));
}

//! Synchronous products of event-driven models.
//!
//! Every component sees the events of its own alphabet; a shared event
//! moves all subscribing components in the same tick. Components are
//! [`VariablesModel`]s, so a composite state is a tuple of states with their
//! evaluations.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::edm::{
    advance_ids, event_ids, Dynamics, EdmOracle, EventStream, SequencingOracle, TickContext, VariablesModel,
};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::seed::{Rng, Seed, Stream};

#[derive(Clone, Debug)]
pub struct Component {
    pub name: Label,
    pub model: VariablesModel,
}

#[derive(Clone, Debug)]
pub struct CartesianModel {
    components: Vec<Component>,
    current: Vec<usize>,
}

/// Composite state: one configuration per component.
pub type CompositeState = Vec<usize>;

pub fn cartesian(components: Vec<Component>) -> Result<CartesianModel> {
    if components.is_empty() {
        return Err(Error::input("a product needs at least one model"));
    }
    let mut names = BTreeSet::new();
    for c in &components {
        if !names.insert(c.name.clone()) {
            return Err(Error::input(format!("component name {} used twice", c.name)));
        }
    }
    let current = components.iter().map(|c| c.model.start()).collect();
    Ok(CartesianModel { components, current })
}

impl CartesianModel {
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn current(&self) -> &CompositeState {
        &self.current
    }

    pub fn set_current(&mut self, state: CompositeState) -> Result<()> {
        self.check(&state)?;
        self.current = state;
        Ok(())
    }

    fn check(&self, state: &CompositeState) -> Result<()> {
        if state.len() != self.components.len() {
            return Err(Error::input("composite state arity differs from the component count"));
        }
        for (c, &s) in self.components.iter().zip(state) {
            if s >= c.model.configs() {
                return Err(Error::input(format!("configuration {s} is out of range for {}", c.name)));
            }
        }
        Ok(())
    }

    /// Union of the component alphabets.
    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.components.iter().flat_map(|c| c.model.events().labels().iter().cloned()).collect()
    }

    /// Size of the full product, saturating.
    pub fn product_size(&self) -> u128 {
        self.components.iter().fold(1u128, |acc, c| acc.saturating_mul(c.model.configs() as u128))
    }

    /// `(name:state, name:state/x=1)`
    pub fn format_state(&self, state: &CompositeState) -> String {
        let mut out = String::from("(");
        for (i, (c, &s)) in self.components.iter().zip(state).enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}:{}", c.name, c.model.config_label(s));
        }
        out.push(')');
        out
    }

    /// Per-component oracle generators derived from `seed` by component
    /// index, so adding a component leaves the others' randomness intact.
    pub fn component_rngs(&self, seed: Seed) -> Vec<Rng> {
        (0..self.components.len()).map(|i| seed.child(i as u64).stream(Stream::Alpha)).collect()
    }
}

/// Advance every component on the offered events that belong to its
/// alphabet; the rest stay put.
pub fn advance_composite(
    cart: &mut CartesianModel,
    events: &BTreeSet<Label>,
    oracles: &[&dyn EdmOracle],
    rngs: &mut [Rng],
    ctx: TickContext<'_>,
) -> Result<()> {
    if oracles.len() != cart.components.len() || rngs.len() != cart.components.len() {
        return Err(Error::input("one oracle and one generator per component are required"));
    }
    if let Some(e) = events.iter().find(|e| !cart.components.iter().any(|c| c.model.events().id(e).is_some())) {
        return Err(Error::input(format!("event {e:?} belongs to no component")));
    }
    let mut next = cart.current.clone();
    for (i, c) in cart.components.iter().enumerate() {
        let mine: BTreeSet<Label> = events.iter().filter(|e| c.model.events().id(e).is_some()).cloned().collect();
        if mine.is_empty() {
            continue;
        }
        let ids = event_ids(&c.model, &mine)?;
        next[i] = advance_ids(&c.model, cart.current[i], &ids, oracles[i], ctx, &mut rngs[i])?.config;
    }
    cart.current = next;
    Ok(())
}

/// Composite states visited while the product follows `stream` from its
/// current state, before the first tick and after each tick. Every
/// component uses the sequencing oracle with its own derived generator.
pub fn simulate_composite(cart: &CartesianModel, stream: &EventStream, seed: Seed) -> Result<Vec<CompositeState>> {
    let mut cart = cart.clone();
    let mut rngs = cart.component_rngs(seed);
    let oracles: Vec<&dyn EdmOracle> = vec![&SequencingOracle; cart.components.len()];
    let mut out = vec![cart.current.clone()];
    let ticks = stream.ticks();
    for (i, t) in ticks.iter().enumerate() {
        let ctx = TickContext { past: &ticks[..i], future: &ticks[i + 1..] };
        advance_composite(&mut cart, &t.events, &oracles, &mut rngs, ctx)?;
        out.push(cart.current.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachable {
    pub states: BTreeSet<CompositeState>,
    /// False when the search stopped at the cap.
    pub complete: bool,
}

impl Reachable {
    /// The states, or a capacity error when the search was cut short.
    pub fn into_result(self, cap: usize) -> Result<BTreeSet<CompositeState>> {
        if self.complete {
            Ok(self.states)
        } else {
            Err(Error::Capacity { what: "reachable composite states".into(), needed: cap as u128 + 1, limit: cap as u128 })
        }
    }
}

/// Breadth-first closure of `start` under every single event of the union
/// alphabet, visiting at most `cap` states. An event without an arrow in a
/// subscribing component leaves that component in place.
pub fn reachable_composite(cart: &CartesianModel, start: &CompositeState, cap: usize) -> Result<Reachable> {
    cart.check(start)?;
    let alphabet = cart.alphabet();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(state) = queue.pop_front() {
        for e in &alphabet {
            let per_component: Vec<Vec<usize>> = cart
                .components
                .iter()
                .zip(&state)
                .map(|(c, &s)| match c.model.events().id(e) {
                    Some(id) => {
                        let t = c.model.successors(s, id);
                        if t.is_empty() {
                            vec![s]
                        } else {
                            t.into_owned()
                        }
                    }
                    None => vec![s],
                })
                .collect();
            for next in product(&per_component) {
                if seen.contains(&next) {
                    continue;
                }
                if seen.len() >= cap {
                    return Ok(Reachable { states: seen, complete: false });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(Reachable { states: seen, complete: true })
}

fn product(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for opts in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&o| {
                    let mut p = prefix.clone();
                    p.push(o);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::edm::simulate_edm;

    fn comp(name: &str, m: crate::edm::EventDrivenModel) -> Component {
        Component { name: name.into(), model: VariablesModel::plain(m) }
    }

    fn week_day() -> CartesianModel {
        cartesian(vec![comp("week", bundled::week_model()), comp("sky", bundled::day_night_model())]).unwrap()
    }

    #[test]
    fn empty_product_is_rejected() {
        assert!(cartesian(vec![]).is_err());
    }

    #[test]
    fn week_times_day_night() {
        let c = week_day();
        assert_eq!(c.product_size(), 14);
        let r = reachable_composite(&c, c.current(), 1000).unwrap();
        assert!(r.complete);
        assert_eq!(r.states.len(), 14);
        assert_eq!(c.format_state(c.current()), "(week:sun, sky:night)");
    }

    #[test]
    fn phase_locked_pair_stays_in_phase() {
        let (l, r) = bundled::phase_locked_pair();
        let c = cartesian(vec![comp("l", l), comp("r", r)]).unwrap();
        let reach = reachable_composite(&c, c.current(), 100).unwrap();
        assert_eq!(reach.states.len(), 2);
        assert_eq!(c.product_size(), 4);
    }

    #[test]
    fn cap_reports_partial() {
        let c = week_day();
        let r = reachable_composite(&c, c.current(), 5).unwrap();
        assert!(!r.complete);
        assert_eq!(r.states.len(), 5);
        assert!(matches!(r.into_result(5), Err(Error::Capacity { .. })));
    }

    #[test]
    fn sunrise_moves_only_the_sky() {
        let mut c = week_day();
        let mut rngs = c.component_rngs(Seed(0));
        let before = c.current().clone();
        advance_composite(&mut c, &BTreeSet::new(), &[&SequencingOracle, &SequencingOracle], &mut rngs, TickContext::default()).unwrap();
        assert_eq!(c.current(), &before);
        advance_composite(&mut c, &["sunrise".into()].into(), &[&SequencingOracle, &SequencingOracle], &mut rngs, TickContext::default()).unwrap();
        assert_eq!(c.format_state(c.current()), "(week:sun, sky:day)");
        assert!(advance_composite(&mut c, &["eclipse".into()].into(), &[&SequencingOracle, &SequencingOracle], &mut rngs, TickContext::default()).is_err());
    }

    #[test]
    fn shared_event_moves_both() {
        let (l, r) = bundled::phase_locked_pair();
        let mut c = cartesian(vec![comp("l", l), comp("r", r)]).unwrap();
        let mut rngs = c.component_rngs(Seed(0));
        advance_composite(&mut c, &["tick".into()].into(), &[&SequencingOracle, &SequencingOracle], &mut rngs, TickContext::default()).unwrap();
        assert_eq!(c.format_state(c.current()), "(l:p1, r:q1)");
    }

    #[test]
    fn single_component_matches_the_model() {
        let m = bundled::day_night_model();
        let c = cartesian(vec![comp("only", m.clone())]).unwrap();
        let r = reachable_composite(&c, c.current(), 100).unwrap();
        assert_eq!(r.states.len(), m.states().len());
        let s = EventStream::from_sequence(vec!["sunrise".into(), "sunset".into()], &[&["sunrise"], &["sunset"]]).unwrap();
        let composite: Vec<usize> = simulate_composite(&c, &s, Seed(3)).unwrap().into_iter().map(|v| v[0]).collect();
        let alone = simulate_edm(&c.components()[0].model, &s, &SequencingOracle, Seed(3).child(0), m.start()).unwrap();
        assert_eq!(composite, alone.path);
    }
}

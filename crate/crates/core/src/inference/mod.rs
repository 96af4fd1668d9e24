//! Turning one recorded life into evidence about candidate models.

mod estimate;
mod exhaustive;
mod reverse;
mod trace;

pub use estimate::{estimate_moments, estimate_state, estimate_weighted};
pub use exhaustive::{
    chi_square_independence, exhaustiveness_test, ChiSquare, ExhaustiveVerdict, ExhaustivenessConfig,
    ExhaustivenessReport, StateTest,
};
pub use reverse::{reverse_oracle, Deviation, ReverseOracle, TraceConstraint};
pub use trace::{
    adequacy, collect, collect_agent_side, detect_trace, findings_csv, traversals_from_path, ArrowKey, Baseline,
    Counter, DetectConfig, Location, TraceFinding, TraceStatistics,
};

use std::collections::BTreeMap;

use crate::edm::{Dynamics, EventDrivenModel, VariablesModel};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::world::{PerfectWorld, RandomWorld, World, WorldFile};

/// Anything whose arrows can be checked by label.
pub trait ArrowGraph {
    /// Errors on unknown labels.
    fn has_arrow(&self, from: &str, label: &str, to: &str) -> Result<bool>;
}

fn world_has_arrow(w: &dyn World, from: &str, label: &str, to: &str) -> Result<bool> {
    let s = w.states().require(from, "state")?;
    let a = w.actions().require(label, "action")?;
    let t = w.states().require(to, "state")?;
    Ok(w.targets(s, a).contains(&t))
}

fn model_has_arrow(m: &dyn Dynamics, from: &str, label: &str, to: &str) -> Result<bool> {
    let s = m.require_config(from)?;
    let e = m.events().require(label, "event")?;
    let t = m.require_config(to)?;
    Ok(m.successors(s, e).contains(&t))
}

impl ArrowGraph for PerfectWorld {
    fn has_arrow(&self, from: &str, label: &str, to: &str) -> Result<bool> {
        world_has_arrow(self, from, label, to)
    }
}

impl ArrowGraph for RandomWorld {
    fn has_arrow(&self, from: &str, label: &str, to: &str) -> Result<bool> {
        world_has_arrow(self, from, label, to)
    }
}

impl ArrowGraph for WorldFile {
    fn has_arrow(&self, from: &str, label: &str, to: &str) -> Result<bool> {
        world_has_arrow(self.as_world(), from, label, to)
    }
}

impl ArrowGraph for EventDrivenModel {
    fn has_arrow(&self, from: &str, label: &str, to: &str) -> Result<bool> {
        model_has_arrow(self, from, label, to)
    }
}

impl ArrowGraph for VariablesModel {
    fn has_arrow(&self, from: &str, label: &str, to: &str) -> Result<bool> {
        model_has_arrow(self, from, label, to)
    }
}

/// The traversed part of a graph, with traversal counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbridgedModel {
    pub state_counts: BTreeMap<Label, usize>,
    pub arrow_counts: BTreeMap<(Label, Label, Label), usize>,
}

impl AbridgedModel {
    pub fn kept_states(&self) -> impl Iterator<Item = &Label> {
        self.state_counts.keys()
    }

    pub fn transitions(&self) -> usize {
        self.arrow_counts.values().sum()
    }

    pub fn visits(&self) -> usize {
        self.state_counts.values().sum()
    }
}

/// Keep the visited states and traversed arrows of `states[0] -labels[0]->
/// states[1] -> ...`. Every hop must be an arrow of `graph`.
pub fn abridge(graph: &dyn ArrowGraph, states: &[Label], labels: &[Label]) -> Result<AbridgedModel> {
    let mut out = AbridgedModel::default();
    if states.is_empty() && labels.is_empty() {
        return Ok(out);
    }
    if states.len() != labels.len() + 1 {
        return Err(Error::input(format!("a path of {} states cannot carry {} arrow labels", states.len(), labels.len())));
    }
    for (i, label) in labels.iter().enumerate() {
        let (from, to) = (&states[i], &states[i + 1]);
        if !graph.has_arrow(from, label, to)? {
            return Err(Error::input(format!("hop {} ({from} -{label}-> {to}) is not an arrow", i + 1)));
        }
        *out.arrow_counts.entry((from.clone(), label.clone(), to.clone())).or_default() += 1;
    }
    for s in states {
        *out.state_counts.entry(s.clone()).or_default() += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn ls(v: &[&str]) -> Vec<Label> {
        v.iter().map(|s| Label::from(*s)).collect()
    }

    #[test]
    fn empty_path() {
        let a = abridge(&bundled::w1(), &[], &[]).unwrap();
        assert_eq!(a, AbridgedModel::default());
    }

    #[test]
    fn w1_round_trip_counts() {
        let a = abridge(&bundled::w1(), &ls(&["1", "2", "1"]), &ls(&["a", "a"])).unwrap();
        assert_eq!(a.arrow_counts[&(Label::from("1"), Label::from("a"), Label::from("2"))], 1);
        assert_eq!(a.arrow_counts[&(Label::from("2"), Label::from("a"), Label::from("1"))], 1);
        assert_eq!(a.transitions(), 2);
        assert_eq!(a.visits(), 3);
    }

    #[test]
    fn inconsistent_path_is_rejected() {
        assert!(abridge(&bundled::w1(), &ls(&["1", "1"]), &ls(&["a"])).is_err());
        assert!(abridge(&bundled::w1(), &ls(&["1", "2"]), &ls(&[])).is_err());
        assert!(abridge(&bundled::w1(), &ls(&["1", "9"]), &ls(&["a"])).is_err());
    }

    #[test]
    fn model_paths_abridge_too() {
        let m = bundled::day_night_model();
        let a = abridge(&m, &ls(&["night", "day", "night"]), &ls(&["sunrise", "sunset"])).unwrap();
        assert_eq!(a.kept_states().count(), 2);
    }
}

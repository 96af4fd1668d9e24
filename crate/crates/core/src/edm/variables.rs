use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::world::Symbols;

use super::{Dynamics, EventDrivenModel};

pub const DEFAULT_FLATTEN_BOUND: u128 = 1_000_000;
/// Hard limit on configurations a variables model may describe at all.
pub const MAX_CONFIGS: u128 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: Label,
    pub domain: Vec<Label>,
}

/// One in-domain value index per variable, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Evaluation(pub Vec<usize>);

/// `update s {guard} e -> t {effects}`: in `s`, when the evaluation agrees
/// with `guard`, event `e` may lead to `t` with the `effects` assigned.
/// Unconstrained variables (`None`) match anything and stay unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateRule {
    pub state: usize,
    pub guard: Vec<Option<usize>>,
    pub event: usize,
    pub target: usize,
    pub effects: Vec<Option<usize>>,
}

/// An event-driven model whose configuration is a state together with an
/// evaluation of finitely many variables.
///
/// For a pair `(state, event)` the matching update rules give the choices.
/// When no rule matches the current evaluation, the base arrows apply and
/// the evaluation is kept.
#[derive(Clone, Debug, PartialEq)]
pub struct VariablesModel {
    base: EventDrivenModel,
    variables: Vec<Variable>,
    value_ids: Vec<Symbols>,
    strides: Vec<usize>,
    evaluations: usize,
    initial: Evaluation,
    rules: Vec<UpdateRule>,
    /// Rule indices per `[state * |E| + event]`.
    by_pair: Vec<Vec<usize>>,
}

/// Label-level form of an update rule, as written in model files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSpec {
    pub state: Label,
    pub guard: Vec<(Label, Label)>,
    pub event: Label,
    pub target: Label,
    pub effects: Vec<(Label, Label)>,
}

impl VariablesModel {
    /// A model without variables.
    pub fn plain(base: EventDrivenModel) -> Self {
        Self::new(base, Vec::new(), &[], &[]).expect("a model without variables is always valid")
    }

    pub fn new(
        base: EventDrivenModel,
        variables: Vec<Variable>,
        initial: &[(Label, Label)],
        rules: &[RuleSpec],
    ) -> Result<Self> {
        let names = Symbols::new(variables.iter().map(|v| v.name.clone()).collect())?;
        let mut value_ids = Vec::with_capacity(variables.len());
        let mut total: u128 = base.states().len() as u128;
        for v in &variables {
            if v.domain.is_empty() {
                return Err(Error::input(format!("variable {} has an empty domain", v.name)));
            }
            value_ids.push(Symbols::new(v.domain.clone())?);
            total = total.saturating_mul(v.domain.len() as u128);
            if total > MAX_CONFIGS {
                return Err(Error::Capacity { what: "model configurations".into(), needed: total, limit: MAX_CONFIGS });
            }
        }
        let mut strides = vec![1; variables.len()];
        for i in (0..variables.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * variables[i + 1].domain.len();
        }
        let evaluations = variables.iter().map(|v| v.domain.len()).product();
        let partial = |pairs: &[(Label, Label)]| -> Result<Vec<Option<usize>>> {
            let mut out = vec![None; variables.len()];
            for (name, value) in pairs {
                let i = names.require(name, "variable")?;
                let v = value_ids[i].require(value, &format!("value of {name}"))?;
                if out[i].replace(v).is_some() {
                    return Err(Error::input(format!("variable {name} assigned twice")));
                }
            }
            Ok(out)
        };
        let initial = Evaluation(partial(initial)?.into_iter().map(|v| v.unwrap_or(0)).collect());
        let n_e = base.events().len();
        let mut compiled = Vec::with_capacity(rules.len());
        let mut by_pair = vec![Vec::new(); base.states().len() * n_e];
        for r in rules {
            let state = base.states().require(&r.state, "state")?;
            let event = base.events().require(&r.event, "event")?;
            let target = base.states().require(&r.target, "state")?;
            if base.targets(state, event).binary_search(&target).is_err() {
                return Err(Error::input(format!(
                    "update {} -{}-> {} has no arrow in the base model",
                    r.state, r.event, r.target
                )));
            }
            by_pair[state * n_e + event].push(compiled.len());
            compiled.push(UpdateRule { state, guard: partial(&r.guard)?, event, target, effects: partial(&r.effects)? });
        }
        Ok(VariablesModel {
            base,
            variables,
            value_ids,
            strides,
            evaluations,
            initial,
            rules: compiled,
            by_pair,
        })
    }

    pub fn base(&self) -> &EventDrivenModel {
        &self.base
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn rules(&self) -> &[UpdateRule] {
        &self.rules
    }

    pub fn initial(&self) -> &Evaluation {
        &self.initial
    }

    pub fn evaluation_count(&self) -> usize {
        self.evaluations
    }

    pub fn evaluation_index(&self, eval: &Evaluation) -> usize {
        eval.0.iter().zip(&self.strides).map(|(v, s)| v * s).sum()
    }

    pub fn evaluation(&self, index: usize) -> Evaluation {
        Evaluation(self.strides.iter().zip(&self.variables).map(|(s, v)| (index / s) % v.domain.len()).collect())
    }

    pub fn config(&self, state: usize, eval: &Evaluation) -> usize {
        state * self.evaluations + self.evaluation_index(eval)
    }

    /// `(state, evaluation)` of a configuration.
    pub fn split(&self, config: usize) -> (usize, Evaluation) {
        (config / self.evaluations, self.evaluation(config % self.evaluations))
    }

    pub fn format_evaluation(&self, eval: &Evaluation) -> String {
        let mut out = String::new();
        for (i, (var, &v)) in self.variables.iter().zip(&eval.0).enumerate() {
            if i > 0 {
                out.push(';');
            }
            let _ = write!(out, "{}={}", var.name, var.domain[v]);
        }
        out
    }

    fn parse_evaluation(&self, src: &str) -> Option<Evaluation> {
        let parts: Vec<&str> = src.split(';').collect();
        if parts.len() != self.variables.len() {
            return None;
        }
        let mut values = Vec::with_capacity(parts.len());
        for ((part, var), ids) in parts.iter().zip(&self.variables).zip(&self.value_ids) {
            let (name, value) = part.split_once('=')?;
            if name != var.name.as_str() {
                return None;
            }
            values.push(ids.id(value)?);
        }
        Some(Evaluation(values))
    }
}

impl Dynamics for VariablesModel {
    fn configs(&self) -> usize {
        self.base.states().len() * self.evaluations
    }

    fn config_label(&self, config: usize) -> Label {
        let (s, eval) = self.split(config);
        let state = self.base.states().label(s);
        if self.variables.is_empty() {
            state.clone()
        } else {
            Label::from(format!("{state}/{}", self.format_evaluation(&eval)))
        }
    }

    fn config_id(&self, label: &str) -> Option<usize> {
        if self.variables.is_empty() {
            return self.base.states().id(label);
        }
        let (state, eval) = label.split_once('/')?;
        let s = self.base.states().id(state)?;
        Some(self.config(s, &self.parse_evaluation(eval)?))
    }

    fn events(&self) -> &Symbols {
        self.base.events()
    }

    fn successors(&self, config: usize, event: usize) -> Cow<'_, [usize]> {
        let n = self.evaluations;
        let (s, ev) = (config / n, config % n);
        if self.variables.is_empty() {
            return Cow::Borrowed(self.base.targets(s, event));
        }
        let eval = self.evaluation(ev);
        let mut out = BTreeSet::new();
        for &ri in &self.by_pair[s * self.base.events().len() + event] {
            let r = &self.rules[ri];
            if r.guard.iter().zip(&eval.0).all(|(g, v)| g.is_none_or(|g| g == *v)) {
                let next = Evaluation(r.effects.iter().zip(&eval.0).map(|(e, v)| e.unwrap_or(*v)).collect());
                out.insert(r.target * n + self.evaluation_index(&next));
            }
        }
        if out.is_empty() {
            out.extend(self.base.targets(s, event).iter().map(|t| t * n + ev));
        }
        Cow::Owned(out.into_iter().collect())
    }

    fn start(&self) -> usize {
        self.config(self.base.start(), &self.initial)
    }

    fn admissible_starts(&self) -> Vec<usize> {
        match self.base.outside() {
            Some(o) => vec![self.config(o, &self.initial)],
            None => (0..self.configs()).collect(),
        }
    }
}

/// The equivalent plain model whose states are the configurations of
/// `model`, labeled `state/x=v;y=w` (or just `state` without variables).
/// Configuration `i` of `model` becomes state `i` of the result.
pub fn flatten(model: &VariablesModel, bound: u128) -> Result<EventDrivenModel> {
    let needed = model.configs() as u128;
    if needed > bound {
        return Err(Error::Capacity { what: "flattened states".into(), needed, limit: bound });
    }
    let base = model.base();
    let states: Vec<Label> = (0..model.configs()).map(|c| model.config_label(c)).collect();
    let events: Vec<(Label, super::EventKind)> =
        (0..base.events().len()).map(|e| (base.events().label(e).clone(), base.kind(e))).collect();
    let mut arrows = Vec::new();
    let mut expected = Vec::new();
    for c in 0..model.configs() {
        for (e, (name, _)) in events.iter().enumerate() {
            for &t in model.successors(c, e).iter() {
                arrows.push((states[c].clone(), name.clone(), states[t].clone()));
            }
        }
        if let Some(v) = base.expected_observation(c / model.evaluation_count()) {
            expected.push((states[c].clone(), v.clone()));
        }
    }
    let outside = base.outside().map(|o| states[model.config(o, model.initial())].clone());
    let start = states[model.start()].clone();
    EventDrivenModel::new(states, outside.as_deref(), events, &arrows, &expected, Some(&start))
}

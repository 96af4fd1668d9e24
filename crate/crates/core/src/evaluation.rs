//! Scoring lives and comparing them.
//!
//! A score is a real number or [`Score::Undef`]; a life is scored on several
//! criteria at once. Lives are compared through the arithmetic mean of their
//! scores, and unbounded lives through the prefix rule: life 1 is at least
//! as good as life 2 when some `n` exists such that every beginning of
//! length `k >= n` of life 1 is at least as good as the same beginning of
//! life 2.
//!
//! There is no discount factor, not even as an option. Discounting decides
//! how an agent trades the near future against the far one, which belongs
//! to its strategy, not to the objective by which lives are judged.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::history::History;
use crate::label::Label;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Score {
    Defined(f64),
    Undef,
}

impl Score {
    pub fn value(self) -> Option<f64> {
        match self {
            Score::Defined(v) => Some(v),
            Score::Undef => None,
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Defined(v) => write!(f, "{v}"),
            Score::Undef => f.write_str("undef"),
        }
    }
}

impl FromStr for Score {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "undef" {
            return Ok(Score::Undef);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Score::Defined(v)),
            _ => Err(Error::input(format!("invalid score {s:?}"))),
        }
    }
}

/// One score per criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(pub Vec<Score>);

impl ScoreVector {
    pub fn defined(values: &[f64]) -> Self {
        ScoreVector(values.iter().map(|&v| Score::Defined(v)).collect())
    }

    pub fn undef(arity: usize) -> Self {
        ScoreVector(vec![Score::Undef; arity])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for ScoreVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// Per-coordinate mean over the steps that define the coordinate.
#[derive(Clone, Debug)]
struct MeanAccumulator {
    sums: Vec<f64>,
    counts: Vec<usize>,
}

impl MeanAccumulator {
    fn new(arity: usize) -> Self {
        MeanAccumulator { sums: vec![0.0; arity], counts: vec![0; arity] }
    }

    fn add(&mut self, v: &ScoreVector) -> Result<()> {
        check_arity(self.sums.len(), v.arity())?;
        for (i, s) in v.0.iter().enumerate() {
            if let Score::Defined(x) = s {
                self.sums[i] += x;
                self.counts[i] += 1;
            }
        }
        Ok(())
    }

    fn mean(&self) -> ScoreVector {
        ScoreVector(
            self.sums
                .iter()
                .zip(&self.counts)
                .map(|(&s, &c)| if c == 0 { Score::Undef } else { Score::Defined(s / c as f64) })
                .collect(),
        )
    }
}

fn check_arity(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::input(format!("score arity {got} differs from {expected}")))
    }
}

/// Arithmetic mean of each coordinate over the steps where it is defined;
/// undefined steps are skipped, never counted as zero.
pub fn life_mean(scores: &[ScoreVector], arity: usize) -> Result<ScoreVector> {
    let mut acc = MeanAccumulator::new(arity);
    for v in scores {
        acc.add(v)?;
    }
    Ok(acc.mean())
}

/// Which direction of a criterion is preferable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Sense {
    #[default]
    Higher,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Pareto,
    /// Coordinates in decreasing importance; later ones only break ties.
    Lexicographic { priority: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Better,
    Worse,
    Equal,
    Incomparable,
}

impl Relation {
    fn flip(self) -> Self {
        match self {
            Relation::Better => Relation::Worse,
            Relation::Worse => Relation::Better,
            r => r,
        }
    }

    /// At least as good.
    pub fn is_ge(self) -> bool {
        matches!(self, Relation::Better | Relation::Equal)
    }

    pub fn is_le(self) -> bool {
        matches!(self, Relation::Worse | Relation::Equal)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Better => "better",
            Relation::Worse => "worse",
            Relation::Equal => "equal",
            Relation::Incomparable => "incomparable",
        })
    }
}

/// How score vectors are ordered: a sense per criterion plus a mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparator {
    pub senses: Vec<Sense>,
    pub mode: Mode,
}

impl Comparator {
    /// Pareto over `arity` criteria, higher is better everywhere.
    pub fn pareto(arity: usize) -> Self {
        Comparator { senses: vec![Sense::Higher; arity], mode: Mode::Pareto }
    }

    pub fn lexicographic(senses: Vec<Sense>, priority: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; senses.len()];
        for &p in &priority {
            if p >= senses.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::input(format!("priority {priority:?} is not a list of distinct criteria")));
            }
        }
        Ok(Comparator { senses, mode: Mode::Lexicographic { priority } })
    }

    pub fn arity(&self) -> usize {
        self.senses.len()
    }

    fn coordinate(&self, i: usize, a: Score, b: Score) -> Relation {
        match (a, b) {
            (Score::Undef, Score::Undef) => Relation::Equal,
            (Score::Defined(x), Score::Defined(y)) => {
                let r = match x.partial_cmp(&y) {
                    Some(std::cmp::Ordering::Greater) => Relation::Better,
                    Some(std::cmp::Ordering::Less) => Relation::Worse,
                    _ => Relation::Equal,
                };
                if self.senses[i] == Sense::Lower {
                    r.flip()
                } else {
                    r
                }
            }
            _ => Relation::Incomparable,
        }
    }
}

/// Compares two score vectors. A criterion defined in one vector and
/// undefined in the other makes them incomparable when it is consulted.
pub fn compare_finite(v1: &ScoreVector, v2: &ScoreVector, cmp: &Comparator) -> Result<Relation> {
    check_arity(cmp.arity(), v1.arity())?;
    check_arity(cmp.arity(), v2.arity())?;
    match &cmp.mode {
        Mode::Pareto => {
            let (mut better, mut worse) = (false, false);
            for i in 0..cmp.arity() {
                match cmp.coordinate(i, v1.0[i], v2.0[i]) {
                    Relation::Incomparable => return Ok(Relation::Incomparable),
                    Relation::Better => better = true,
                    Relation::Worse => worse = true,
                    Relation::Equal => {}
                }
            }
            Ok(match (better, worse) {
                (true, true) => Relation::Incomparable,
                (true, false) => Relation::Better,
                (false, true) => Relation::Worse,
                (false, false) => Relation::Equal,
            })
        }
        Mode::Lexicographic { priority } => {
            for &i in priority {
                match cmp.coordinate(i, v1.0[i], v2.0[i]) {
                    Relation::Equal => continue,
                    r => return Ok(r),
                }
            }
            Ok(Relation::Equal)
        }
    }
}

/// The scores of a life, finite or produced on demand.
#[allow(clippy::len_without_is_empty)]
pub trait ScoreSource {
    fn arity(&self) -> usize;
    /// `None` for an unbounded life.
    fn len(&self) -> Option<usize>;
    /// Score of step `t`; only called for `t < len`.
    fn score(&self, t: usize) -> ScoreVector;
}

/// A finite life given as its score sequence.
#[derive(Clone, Copy, Debug)]
pub struct FiniteLife<'a> {
    pub arity: usize,
    pub scores: &'a [ScoreVector],
}

impl ScoreSource for FiniteLife<'_> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn len(&self) -> Option<usize> {
        Some(self.scores.len())
    }

    fn score(&self, t: usize) -> ScoreVector {
        self.scores[t].clone()
    }
}

/// An unbounded life whose step scores come from a function.
pub struct GeneratedLife<F> {
    pub arity: usize,
    pub generate: F,
}

impl<F: Fn(usize) -> ScoreVector> ScoreSource for GeneratedLife<F> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn len(&self) -> Option<usize> {
        None
    }

    fn score(&self, t: usize) -> ScoreVector {
        (self.generate)(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LifeRelation {
    Better,
    Worse,
    Equal,
    Incomparable,
    Undetermined,
}

impl fmt::Display for LifeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LifeRelation::Better => "better",
            LifeRelation::Worse => "worse",
            LifeRelation::Equal => "equal",
            LifeRelation::Incomparable => "incomparable",
            LifeRelation::Undetermined => "undetermined",
        })
    }
}

impl FromStr for LifeRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "better" => LifeRelation::Better,
            "worse" => LifeRelation::Worse,
            "equal" => LifeRelation::Equal,
            "incomparable" => LifeRelation::Incomparable,
            "undetermined" => LifeRelation::Undetermined,
            _ => return Err(Error::input(format!("unknown relation {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LifeVerdict {
    pub relation: LifeRelation,
    /// Smallest scheduled `n` from which the relation held at every
    /// scheduled length; present for better, worse and equal.
    pub witness: Option<u64>,
}

/// `relation[,n=witness]`
impl fmt::Display for LifeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        if let Some(n) = self.witness {
            write!(f, ",n={n}")?;
        }
        Ok(())
    }
}

/// Prefix lengths `1, 2, 4, ..., 2^20`.
pub fn default_schedule() -> Vec<u64> {
    (0..=20).map(|i| 1u64 << i).collect()
}

/// Number of trailing schedule points that must agree before an unbounded
/// comparison is trusted.
pub const DECISIVE_TAIL: usize = 3;

/// Compares two lives under the prefix rule over a finite schedule of
/// beginning lengths. Beyond the end of a finite life its beginning is the
/// whole life.
///
/// At every scheduled `k` the means of both beginnings are compared. Life 1
/// is at least as good when the comparison is better-or-equal on a final
/// run of schedule points, and that run is decisive: it contains a length
/// at which both lives are already complete, or at least
/// [`DECISIVE_TAIL`] points. The witness is one more than the last
/// scheduled length outside the run, or 0 when the run is the whole
/// schedule. Without a decisive verdict the result is undetermined.
pub fn compare_lives(
    l1: &dyn ScoreSource,
    l2: &dyn ScoreSource,
    cmp: &Comparator,
    schedule: &[u64],
) -> Result<LifeVerdict> {
    if schedule.is_empty() {
        return Err(Error::input("the horizon schedule is empty"));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
        return Err(Error::input("the horizon schedule must be positive and strictly increasing"));
    }
    check_arity(cmp.arity(), l1.arity())?;
    check_arity(cmp.arity(), l2.arity())?;
    let frozen_from = match (l1.len(), l2.len()) {
        (Some(a), Some(b)) => Some(a.max(b) as u64),
        _ => None,
    };
    let mut acc1 = MeanAccumulator::new(cmp.arity());
    let mut acc2 = MeanAccumulator::new(cmp.arity());
    let mut t = 0u64;
    let mut relations = Vec::with_capacity(schedule.len());
    for &k in schedule {
        let stop = frozen_from.map_or(k, |f| k.min(f));
        while t < stop {
            for (life, acc) in [(l1, &mut acc1), (l2, &mut acc2)] {
                if life.len().is_none_or(|n| (t as usize) < n) {
                    acc.add(&life.score(t as usize))?;
                }
            }
            t += 1;
        }
        relations.push(compare_finite(&acc1.mean(), &acc2.mean(), cmp)?);
    }
    let tail = |holds: &dyn Fn(Relation) -> bool| -> Option<u64> {
        let start = relations.iter().rposition(|&r| !holds(r)).map_or(0, |i| i + 1);
        let run = &schedule[start..];
        let frozen = frozen_from.is_some_and(|f| run.iter().any(|&k| k >= f));
        if run.is_empty() || !(frozen || run.len() >= DECISIVE_TAIL) {
            return None;
        }
        Some(if start == 0 { 0 } else { schedule[start - 1] + 1 })
    };
    let ge = tail(&Relation::is_ge);
    let le = tail(&Relation::is_le);
    let verdict = match (ge, le) {
        (Some(a), Some(b)) => LifeVerdict { relation: LifeRelation::Equal, witness: Some(a.max(b)) },
        (Some(a), None) => LifeVerdict { relation: LifeRelation::Better, witness: Some(a) },
        (None, Some(b)) => LifeVerdict { relation: LifeRelation::Worse, witness: Some(b) },
        (None, None) => {
            let incomparable = tail(&|r| r == Relation::Incomparable).is_some();
            LifeVerdict {
                relation: if incomparable { LifeRelation::Incomparable } else { LifeRelation::Undetermined },
                witness: None,
            }
        }
    };
    Ok(verdict)
}

/// Score of every observation, one vector per observation label.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardMap {
    arity: usize,
    map: BTreeMap<Label, ScoreVector>,
}

impl RewardMap {
    /// `observations` is the full alphabet; every label needs an entry.
    pub fn new(arity: usize, observations: &[Label], map: BTreeMap<Label, ScoreVector>) -> Result<Self> {
        for (o, v) in &map {
            check_arity(arity, v.arity())?;
            if !observations.contains(o) {
                return Err(Error::input(format!("reward for unknown observation {o}")));
            }
        }
        if let Some(o) = observations.iter().find(|o| !map.contains_key(*o)) {
            return Err(Error::input(format!("observation {o} has no reward")));
        }
        Ok(RewardMap { arity, map })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn reward(&self, observation: &str) -> Result<&ScoreVector> {
        self.map
            .get(observation)
            .ok_or_else(|| Error::input(format!("observation {observation:?} has no reward")))
    }

    /// Scores of a recorded life, one per step.
    pub fn score_history(&self, history: &History) -> Result<Vec<ScoreVector>> {
        history.steps().iter().map(|s| self.reward(&s.observation).cloned()).collect()
    }
}

/// Criterion names with their senses, the header of a score file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criteria {
    pub names: Vec<Label>,
    pub senses: Vec<Sense>,
}

/// A score file: header of criteria (`name` or `name:lower`), then one row
/// per step.
pub fn print_scores(criteria: &Criteria, scores: &[ScoreVector]) -> Result<String> {
    let mut out = String::new();
    let header: Vec<String> = criteria
        .names
        .iter()
        .zip(&criteria.senses)
        .map(|(n, s)| match s {
            Sense::Higher => n.to_string(),
            Sense::Lower => format!("{n}:lower"),
        })
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for v in scores {
        check_arity(criteria.names.len(), v.arity())?;
        let row: Vec<String> = v.0.iter().map(Score::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_scores(src: &str) -> Result<(Criteria, Vec<ScoreVector>)> {
    let mut lines = src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing criteria header"))?;
    let mut criteria = Criteria { names: Vec::new(), senses: Vec::new() };
    for tok in header.trim().split(',') {
        let (name, sense) = match tok.split_once(':') {
            None => (tok, Sense::Higher),
            Some((n, "lower")) => (n, Sense::Lower),
            Some((n, "higher")) => (n, Sense::Higher),
            Some(_) => return Err(Error::parse(1, format!("invalid criterion {tok:?}"))),
        };
        let name = crate::text::label(name, 1)?;
        if criteria.names.contains(&name) {
            return Err(Error::parse(1, format!("criterion {name} repeated")));
        }
        criteria.names.push(name);
        criteria.senses.push(sense);
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let row = line
            .trim()
            .split(',')
            .map(|t| t.parse::<Score>().map_err(|e| Error::parse(i + 1, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != criteria.names.len() {
            return Err(Error::parse(i + 1, format!("expected {} scores, got {}", criteria.names.len(), row.len())));
        }
        rows.push(ScoreVector(row));
    }
    Ok((criteria, rows))
}

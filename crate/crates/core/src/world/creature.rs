//! The adversarial creature: a binary source that keeps any predictor from
//! committing to a tight probability interval.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::seed::{Seed, Stream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityInterval {
    low: f64,
    high: f64,
}

impl ProbabilityInterval {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) || low > high {
            return Err(Error::input(format!("[{low}, {high}] is not a probability interval")));
        }
        Ok(ProbabilityInterval { low, high })
    }

    pub fn point(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn midpoint(&self) -> f64 {
        (self.low + self.high) / 2.0
    }

    pub fn contains(&self, p: f64) -> bool {
        self.low <= p && p <= self.high
    }

    /// Distance from `p` to the interval, 0 inside.
    pub fn distance(&self, p: f64) -> f64 {
        (self.low - p).max(p - self.high).max(0.0)
    }
}

/// Maps the prefix seen so far to a predicted interval for the next bit.
pub trait Predictor {
    fn predict(&mut self, prefix: &[bool]) -> ProbabilityInterval;
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantPredictor(pub ProbabilityInterval);

impl Predictor for ConstantPredictor {
    fn predict(&mut self, _prefix: &[bool]) -> ProbabilityInterval {
        self.0
    }
}

/// Predicts the point interval at the running frequency of ones (0.5 on
/// the empty prefix). Counts are cached, so feeding growing prefixes of the
/// same sequence costs O(1) per call.
#[derive(Clone, Debug, Default)]
pub struct RunningMeanPredictor {
    seen: usize,
    ones: usize,
}

impl Predictor for RunningMeanPredictor {
    fn predict(&mut self, prefix: &[bool]) -> ProbabilityInterval {
        if prefix.len() < self.seen {
            *self = Self::default();
        }
        self.ones += prefix[self.seen..].iter().filter(|&&b| b).count();
        self.seen = prefix.len();
        let f = if self.seen == 0 { 0.5 } else { self.ones as f64 / self.seen as f64 };
        ProbabilityInterval { low: f, high: f }
    }
}

/// Margin by which the running frequency must leave the predicted interval
/// before the creature considers the prediction refuted.
pub const REFUTE_MARGIN: f64 = 0.1;
/// Fraction of `b - a` within which a predicted midpoint counts as having
/// caught up with the dice in use.
pub const CAPTURE_FRACTION: f64 = 0.25;

/// Emits `length` bits thrown with one of two dice, `a <= b`.
///
/// The first dice is the one whose mean lies farther outside the first
/// prediction (ties: farther from its midpoint, then `a`). Afterwards the
/// creature keeps its dice and switches to the other one when the
/// prediction is refuted (the running frequency has passed the predicted
/// interval by [`REFUTE_MARGIN`] in the direction of the current dice) or
/// captured (the predicted midpoint is within [`CAPTURE_FRACTION`]` * (b - a)`
/// of the current dice's mean). Either way the running frequency is pushed
/// back and forth and never settles.
pub fn creature_stream(a: f64, b: f64, predictor: &mut dyn Predictor, length: usize, seed: Seed) -> Result<Vec<bool>> {
    if a > b {
        return Err(Error::input(format!("dice a = {a} exceeds dice b = {b}")));
    }
    ProbabilityInterval::new(a, b)?;
    let mut rng = seed.stream(Stream::Creature);
    let mut out = Vec::with_capacity(length);
    let mut ones = 0usize;
    let mut upper: Option<bool> = None;
    for _ in 0..length {
        let interval = predictor.predict(&out);
        let on_upper = match upper {
            None => {
                let (da, db) = (interval.distance(a), interval.distance(b));
                let mid = interval.midpoint();
                db > da || (db == da && (b - mid).abs() > (a - mid).abs())
            }
            Some(on_upper) => {
                let f = ones as f64 / out.len() as f64;
                let mean = if on_upper { b } else { a };
                let refuted = if on_upper {
                    f > interval.high() + REFUTE_MARGIN
                } else {
                    f < interval.low() - REFUTE_MARGIN
                };
                let captured = (interval.midpoint() - mean).abs() <= CAPTURE_FRACTION * (b - a);
                if b > a && (refuted || captured) {
                    !on_upper
                } else {
                    on_upper
                }
            }
        };
        upper = Some(on_upper);
        let bit = rng.random_bool(if on_upper { b } else { a });
        ones += bit as usize;
        out.push(bit);
    }
    Ok(out)
}

/// Means of consecutive disjoint windows; a trailing partial window is dropped.
pub fn window_means(bits: &[bool], window: usize) -> Vec<f64> {
    if window == 0 {
        return Vec::new();
    }
    bits.chunks_exact(window)
        .map(|c| c.iter().filter(|&&b| b).count() as f64 / window as f64)
        .collect()
}

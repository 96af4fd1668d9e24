//! Experiment config: `key = value` lines, `#` comments.
//!
//! ```text
//! seed = 7
//! world = bundled:day-night/world.txt
//! policy = uniform
//! horizon = 800
//! events = bundled:day-night/events.txt
//! model = bundled:day-night/model.txt
//! window = 2
//! output = out
//! ```
//!
//! A world may also be `generate:STATES,ACTIONS,OBSERVATIONS,DENSITY`,
//! drawn with the experiment seed. Relative paths are resolved against the
//! directory of the config file.

use std::path::{Path, PathBuf};

use edmkit::text::content_lines;
use edmkit::world::PolicySpec;
use edmkit::{Error, Result};

use crate::InferParams;

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    File(PathBuf),
    Bundled { example: String, file: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum WorldSource {
    Load(Source),
    Generate { states: usize, actions: usize, observations: usize, density: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub world: WorldSource,
    pub policy: PolicySpec,
    pub horizon: usize,
    pub events: Source,
    pub model: Source,
    pub transcript: Option<Source>,
    pub params: InferParams,
    pub output: PathBuf,
}

const KEYS: [&str; 13] = [
    "seed", "world", "policy", "horizon", "events", "model", "transcript", "window", "min-support", "threshold",
    "lag", "significance", "output",
];

fn source(value: &str, base: &Path, line: usize) -> Result<Source> {
    if let Some(rest) = value.strip_prefix("bundled:") {
        let (example, file) = rest
            .split_once('/')
            .ok_or_else(|| Error::parse(line, format!("expected bundled:EXAMPLE/FILE, got {value:?}")))?;
        let files = edmkit::bundled::example_files(example)
            .ok_or_else(|| Error::parse(line, format!("unknown example {example:?}")))?;
        if !files.iter().any(|(n, _)| *n == file) {
            return Err(Error::parse(line, format!("example {example} has no file {file}")));
        }
        return Ok(Source::Bundled { example: example.into(), file: file.into() });
    }
    let path = base.join(value);
    if !path.is_file() {
        return Err(Error::Input(format!("{} does not exist", path.display())));
    }
    Ok(Source::File(path))
}

fn number<T: std::str::FromStr>(v: &str, line: usize) -> Result<T> {
    edmkit::text::number(v, line)
}

impl ExperimentConfig {
    /// `base` is the directory relative paths are resolved against.
    pub fn parse(src: &str, base: &Path) -> Result<Self> {
        let mut seed = 0;
        let mut world = None;
        let mut policy = PolicySpec::Uniform;
        let mut horizon = None;
        let mut events = None;
        let mut model = None;
        let mut transcript = None;
        let mut params = InferParams::default();
        let mut output = None;
        let mut seen = Vec::new();
        for (line, content) in content_lines(src) {
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
            if !KEYS.contains(&key) {
                return Err(Error::parse(line, format!("unknown key {key:?}")));
            }
            if seen.contains(&key) {
                return Err(Error::parse(line, format!("key {key} repeated")));
            }
            seen.push(key);
            match key {
                "seed" => seed = number(value, line)?,
                "world" => {
                    world = Some(match value.strip_prefix("generate:") {
                        Some(spec) => {
                            let parts: Vec<&str> = spec.split(',').collect();
                            if parts.len() != 4 {
                                return Err(Error::parse(line, "expected generate:STATES,ACTIONS,OBSERVATIONS,DENSITY"));
                            }
                            WorldSource::Generate {
                                states: number(parts[0], line)?,
                                actions: number(parts[1], line)?,
                                observations: number(parts[2], line)?,
                                density: number(parts[3], line)?,
                            }
                        }
                        None => WorldSource::Load(source(value, base, line)?),
                    })
                }
                "policy" => policy = value.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?,
                "horizon" => horizon = Some(number(value, line)?),
                "events" => events = Some(source(value, base, line)?),
                "model" => model = Some(source(value, base, line)?),
                "transcript" => transcript = Some(source(value, base, line)?),
                "window" => params.window = number(value, line)?,
                "min-support" => params.min_support = number(value, line)?,
                "threshold" => params.threshold = number(value, line)?,
                "lag" => params.lag = number(value, line)?,
                "significance" => params.significance = number(value, line)?,
                "output" => output = Some(base.join(value)),
                _ => unreachable!("key checked above"),
            }
        }
        let missing = |k: &str| Error::Input(format!("config lacks {k}"));
        let config = ExperimentConfig {
            seed,
            world: world.ok_or_else(|| missing("world"))?,
            policy,
            horizon: horizon.ok_or_else(|| missing("horizon"))?,
            events: events.ok_or_else(|| missing("events"))?,
            model: model.ok_or_else(|| missing("model"))?,
            transcript,
            params,
            output: output.ok_or_else(|| missing("output"))?,
        };
        config.params.validate()?;
        Ok(config)
    }
}

impl InferParams {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::Range("window must be at least 1".into()));
        }
        if !(self.min_support >= 0.0 && self.min_support.is_finite()) {
            return Err(Error::Range("min-support must be a nonnegative number".into()));
        }
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(Error::Range("threshold must be a nonnegative number".into()));
        }
        if self.lag == 0 {
            return Err(Error::Range("lag must be at least 1".into()));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::Range("significance must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

pub fn read_source(source: &Source) -> Result<String> {
    match source {
        Source::File(p) => crate::commands::read(p),
        Source::Bundled { example, file } => edmkit::bundled::example_files(example)
            .and_then(|fs| fs.into_iter().find(|(n, _)| n == file).map(|(_, c)| c))
            .ok_or_else(|| Error::Input(format!("bundled file {example}/{file} not found"))),
    }
}

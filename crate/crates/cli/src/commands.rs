use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use edmkit::compose::{cartesian, reachable_composite, Component};
use edmkit::edm::{parse_model, project_events, simulate_edm, Dynamics, EventStream, SequencingOracle, VariablesModel};
use edmkit::evaluation::{compare_lives, default_schedule, parse_scores, Comparator, FiniteLife, Sense};
use edmkit::history::{parse_life_log, print_life_log, ChiTranscript, EventDefinitions, History};
use edmkit::inference::{
    adequacy, collect, collect_agent_side, detect_trace, estimate_moments, exhaustiveness_test, findings_csv,
    DetectConfig, ExhaustiveVerdict, ExhaustivenessConfig,
};
use edmkit::seed::Seed;
use edmkit::world::{generate_world, parse_world, print_world, run_life, GenerateConfig, PolicySpec, StatePath, WorldFile};
use edmkit::{Error, Label, Result};

use crate::config::{read_source, ExperimentConfig, WorldSource};
use crate::{CompareArgs, ComposeArgs, ExampleArgs, ExperimentArgs, GenerateArgs, InferArgs, InferParams, ProjectArgs, RunArgs};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Input(format!("cannot create {}: {e}", dir.display())))
}

fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let cfg = GenerateConfig {
        states: a.states,
        actions: a.actions,
        observations: a.observations,
        incorrect_density: a.density,
        allow_sudden_death: a.allow_sudden_death,
        max_retries: a.max_retries,
    };
    let world = generate_world(&cfg, Seed(a.seed))?;
    emit(a.output.as_deref(), &print_world(&WorldFile::Perfect(world)))
}

fn live(world: &WorldFile, policy: &PolicySpec, horizon: usize, seed: u64, dir: &Path) -> Result<(History, StatePath)> {
    let mut policy = policy.build()?;
    let life = run_life(world.as_world(), policy.as_mut(), horizon, Seed(seed))?;
    ensure_dir(dir)?;
    write(&dir.join("life.log"), &print_life_log(&life.history, Some(life.cause)))?;
    write(&dir.join("path.txt"), &life.path.print())?;
    Ok((life.history, life.path))
}

pub fn run(a: RunArgs) -> Result<()> {
    let world = parse_world(&read(&a.world)?)?;
    let policy: PolicySpec = a.policy.parse()?;
    live(&world, &policy, a.horizon, a.seed, &a.output_dir)?;
    Ok(())
}

fn load_transcript(path: Option<&Path>) -> Result<Option<ChiTranscript>> {
    path.map(|p| read(p).and_then(|s| ChiTranscript::parse(&s))).transpose()
}

pub fn project(a: ProjectArgs) -> Result<()> {
    let (history, _) = parse_life_log(&read(&a.log)?)?;
    let defs = EventDefinitions::parse(&read(&a.events)?)?;
    let transcript = load_transcript(a.transcript.as_deref())?;
    let stream = project_events(&history, &defs, transcript.as_ref())?;
    emit(a.output.as_deref(), &stream.print())
}

struct InferInputs<'a> {
    history: &'a History,
    model: &'a VariablesModel,
    definitions: &'a EventDefinitions,
    transcript: Option<&'a ChiTranscript>,
    ground_truth: Option<&'a StatePath>,
    params: &'a InferParams,
    seed: u64,
}

fn verdict_text(v: ExhaustiveVerdict) -> String {
    match v {
        ExhaustiveVerdict::ExhaustiveAtLag(l) => format!("exhaustive-at-lag-{l}"),
        ExhaustiveVerdict::PastDependent => "past-dependent".into(),
        ExhaustiveVerdict::Inconclusive => "inconclusive".into(),
    }
}

/// Findings CSV and summary text.
fn infer_report(inp: &InferInputs<'_>) -> Result<(String, String)> {
    inp.params.validate()?;
    let stream = project_events(inp.history, inp.definitions, inp.transcript)?;
    let alphabet: BTreeSet<Label> = inp.model.events().labels().iter().cloned().collect();
    if let Some(e) = alphabet.iter().find(|e| !stream.alphabet().contains(*e)) {
        return Err(Error::Input(format!("model event {e} has no definition")));
    }
    let stream = stream.restrict(&alphabet);
    let mut summary = String::new();
    let stats = match inp.ground_truth {
        Some(path) => {
            if path.transitions() != inp.history.len() {
                return Err(Error::Consistency(format!(
                    "ground-truth path has {} moves, the log has {}",
                    path.transitions(),
                    inp.history.len()
                )));
            }
            let sim = simulate_edm(inp.model, &stream, &SequencingOracle, Seed(inp.seed), inp.model.start())?;
            let moments = sim.moment_path(&stream);
            let stats = collect(inp.model, &moments, &sim.traversals, &stream, inp.params.window)?;
            summary.push_str("mode world-side\n");
            let cfg = ExhaustivenessConfig { lag: inp.params.lag, significance: inp.params.significance, ..Default::default() };
            let report = exhaustiveness_test(inp.model, &moments, &stream, &cfg)?;
            let _ = writeln!(
                summary,
                "exhaustiveness {} worst_p={:.6} corrected_significance={:.6}",
                verdict_text(report.verdict),
                report.worst_p,
                report.corrected_significance
            );
            stats
        }
        None => {
            let (_, restarts) = estimate_moments(inp.model, &stream, true)?;
            let stats = collect_agent_side(inp.model, &stream, inp.params.window)?;
            summary.push_str("mode agent-side approximate\n");
            let _ = writeln!(summary, "restarts {restarts}");
            stats
        }
    };
    let cfg = DetectConfig { min_support: inp.params.min_support, threshold: inp.params.threshold, ..Default::default() };
    let findings = detect_trace(&stats, &cfg);
    let _ = writeln!(summary, "steps {}", stream.steps());
    let _ = writeln!(summary, "ticks {}", stream.ticks().len());
    let _ = writeln!(summary, "findings {}", findings.len());
    let _ = writeln!(summary, "adequacy {:.6}", adequacy(&findings));
    Ok((findings_csv(&findings), summary))
}

fn write_infer(dir: &Path, report: (String, String)) -> Result<()> {
    ensure_dir(dir)?;
    write(&dir.join("findings.csv"), &report.0)?;
    write(&dir.join("summary.txt"), &report.1)
}

pub fn infer(a: InferArgs) -> Result<()> {
    let (history, _) = parse_life_log(&read(&a.log)?)?;
    let model = parse_model(&read(&a.model)?)?;
    let definitions = EventDefinitions::parse(&read(&a.events)?)?;
    let transcript = load_transcript(a.transcript.as_deref())?;
    let ground_truth = a.ground_truth.as_deref().map(|p| read(p).and_then(|s| StatePath::parse(&s))).transpose()?;
    let report = infer_report(&InferInputs {
        history: &history,
        model: &model,
        definitions: &definitions,
        transcript: transcript.as_ref(),
        ground_truth: ground_truth.as_ref(),
        params: &a.params,
        seed: a.seed,
    })?;
    write_infer(&a.output_dir, report)
}

fn stem(path: &Path) -> Result<Label> {
    let s = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Input(format!("{} has no usable name", path.display())))?;
    edmkit::text::label(s, 0).map_err(|_| Error::Input(format!("file name {s:?} is not a valid component name")))
}

pub fn compose(a: ComposeArgs) -> Result<()> {
    let mut components = Vec::new();
    for p in &a.models {
        components.push(Component { name: stem(p)?, model: parse_model(&read(p)?)? });
    }
    let cart = cartesian(components)?;
    let reach = reachable_composite(&cart, cart.current(), a.cap)?;
    let mut out = String::new();
    let _ = writeln!(out, "components {}", cart.components().len());
    for c in cart.components() {
        let _ = writeln!(out, "component {} configurations={}", c.name, c.model.configs());
    }
    let _ = writeln!(out, "product {}", cart.product_size());
    let _ = writeln!(out, "start {}", cart.format_state(cart.current()));
    if reach.complete {
        let _ = writeln!(out, "reachable {}", reach.states.len());
    } else {
        let _ = writeln!(out, "reachable >{} incomplete", a.cap);
    }
    if cart.components().len() == 1 {
        out.push_str("isomorphic to component\n");
    }
    for s in &reach.states {
        let _ = writeln!(out, "state {}", cart.format_state(s));
    }
    emit(a.output.as_deref(), &out)?;
    reach.into_result(a.cap).map(|_| ())
}

fn comparator(mode: &str, senses: Vec<Sense>) -> Result<Comparator> {
    if mode == "pareto" {
        return Ok(Comparator { mode: edmkit::evaluation::Mode::Pareto, senses });
    }
    let list = mode
        .strip_prefix("lex:")
        .ok_or_else(|| Error::Input(format!("mode must be pareto or lex:I,J,..., got {mode:?}")))?;
    let priority = list
        .split(',')
        .map(|t| t.parse::<usize>().map_err(|_| Error::Input(format!("invalid priority index {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Comparator::lexicographic(senses, priority)
}

fn schedule(spec: Option<&str>) -> Result<Vec<u64>> {
    match spec {
        None => Ok(default_schedule()),
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Input(format!("invalid schedule entry {t:?}"))))
            .collect(),
    }
}

pub fn compare(a: CompareArgs) -> Result<()> {
    let (c1, s1) = parse_scores(&read(&a.first)?)?;
    let (c2, s2) = parse_scores(&read(&a.second)?)?;
    if c1 != c2 {
        return Err(Error::Input("the two score files have different criteria".into()));
    }
    let arity = c1.names.len();
    let cmp = comparator(&a.mode, c1.senses)?;
    let verdict = compare_lives(
        &FiniteLife { arity, scores: &s1 },
        &FiniteLife { arity, scores: &s2 },
        &cmp,
        &schedule(a.schedule.as_deref())?,
    )?;
    println!("{verdict}");
    Ok(())
}

pub fn example(a: ExampleArgs) -> Result<()> {
    let Some(name) = a.name else {
        for e in edmkit::bundled::EXAMPLES {
            println!("{e}");
        }
        return Ok(());
    };
    let files = edmkit::bundled::example_files(&name).ok_or_else(|| {
        Error::Input(format!("unknown example {name:?}; known: {}", edmkit::bundled::EXAMPLES.join(", ")))
    })?;
    let dir = a.output_dir.unwrap_or_else(|| PathBuf::from(&name));
    ensure_dir(&dir)?;
    for (file, contents) in files {
        write(&dir.join(file), &contents)?;
    }
    Ok(())
}

pub fn experiment(a: ExperimentArgs) -> Result<()> {
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let config = ExperimentConfig::parse(&read(&a.config)?, &base)?;
    let dir = a.output_dir.unwrap_or_else(|| config.output.clone());
    let world = match &config.world {
        WorldSource::Load(s) => parse_world(&read_source(s)?)?,
        &WorldSource::Generate { states, actions, observations, density } => WorldFile::Perfect(generate_world(
            &GenerateConfig::new(states, actions, observations, density),
            Seed(config.seed),
        )?),
    };
    let model = parse_model(&read_source(&config.model)?)?;
    let definitions = EventDefinitions::parse(&read_source(&config.events)?)?;
    let transcript = config.transcript.as_ref().map(|s| read_source(s).and_then(|t| ChiTranscript::parse(&t))).transpose()?;
    ensure_dir(&dir)?;
    write(&dir.join("world.txt"), &print_world(&world))?;
    let (history, path) = live(&world, &config.policy, config.horizon, config.seed, &dir)?;
    let stream: EventStream = project_events(&history, &definitions, transcript.as_ref())?;
    write(&dir.join("stream.txt"), &stream.print())?;
    let report = infer_report(&InferInputs {
        history: &history,
        model: &model,
        definitions: &definitions,
        transcript: transcript.as_ref(),
        ground_truth: Some(&path),
        params: &config.params,
        seed: config.seed,
    })?;
    write_infer(&dir, report)
}

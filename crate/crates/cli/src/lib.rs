//! Command-line front end: game ingestion, the built-in examples, and the
//! `solve`, `sweep`, `evaluate`, `simulate` and `envelope` commands.
//!
//! Every command writes one JSON document to `--out` or standard output,
//! except `sweep`, which fills a directory with `solution.json`,
//! `vertices.csv` and `qcurves.csv`. Identical configurations produce
//! byte-identical artifacts.

mod config;
pub mod export;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use signal_picking::evaluator::{exact_value, one_shot_deviation_check, simulate, DeviationReport, ProbeSpec, SimulationReport};
use signal_picking::geometry::{argcav, AffineFunctional, CellArrangement};
use signal_picking::solver::{self, receiver_best, EquilibriumSolution, QValue};

pub use config::{BuiltinName, Command, RunConfig, Source};
use export::PlayerValues;

/// What a run produced. `passed` is false when `evaluate` finds a
/// violation; every other command passes once it has written its output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub written: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationFile {
    pub exact: PlayerValues,
    pub backward_induction: PlayerValues,
    pub gap: f64,
    pub tolerance: f64,
    pub deviations: DeviationReport,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationFile {
    pub exact: PlayerValues,
    pub simulated: SimulationReport,
}

/// A piecewise objective: `rho` of the pieces whose `f` is within the tie
/// tolerance of the largest, maximised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeInput {
    pub states: Vec<String>,
    pub functions: Vec<EnvelopePiece>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePiece {
    pub f: AffineFunctional,
    pub rho: AffineFunctional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeVertex {
    pub point: Vec<f64>,
    pub value: f64,
    /// Piece whose `rho` attains the value.
    pub piece: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFile {
    pub states: Vec<String>,
    pub vertices: Vec<EnvelopeVertex>,
    pub simplices: Vec<Vec<usize>>,
}

fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("artifacts serialise");
    text.push('\n');
    text
}

fn emit(cfg: &RunConfig, stdout: &mut dyn Write, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            written.push(path.clone());
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn solve_source(cfg: &RunConfig) -> Result<EquilibriumSolution> {
    let spec = cfg.source.load()?;
    Ok(solver::solve(&spec)?)
}

/// Runs one command. Results go to `cfg.out`, or to `stdout` when no
/// output path is given.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Outcome> {
    cfg.validate()?;
    let mut written = Vec::new();
    let mut passed = true;
    match cfg.command {
        Command::Solve => {
            let solution = solve_source(cfg)?;
            emit(cfg, stdout, &to_json(&export::solution_file(&solution)), &mut written)?;
        }
        Command::Sweep => {
            let solution = solve_source(cfg)?;
            let horizon = solution.horizon();
            let depth = cfg.depth.unwrap_or(horizon - 1);
            config::check_depth(depth, horizon)?;
            let dir = cfg.out.as_deref().expect("validated");
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let path = |name: &str| -> PathBuf { dir.join(name) };
            write_file(&path("solution.json"), to_json(&export::solution_file(&solution)).as_bytes())?;
            let mut vertices = Vec::new();
            export::write_vertices(&mut vertices, &solution, depth)?;
            write_file(&path("vertices.csv"), &vertices)?;
            let mut curves = Vec::new();
            export::write_qcurves(&mut curves, &solution, depth)?;
            write_file(&path("qcurves.csv"), &curves)?;
            written.extend(["solution.json", "vertices.csv", "qcurves.csv"].map(path));
        }
        Command::Evaluate => {
            let solution = solve_source(cfg)?;
            let (a, b) = exact_value(&solution)?;
            let (va, vb) = solution.prior_values();
            let gap = (a - va).abs().max((b - vb).abs());
            let probes = ProbeSpec { seed: cfg.seed, ..ProbeSpec::default() };
            let deviations = one_shot_deviation_check(&solution, &probes)?;
            passed = gap <= cfg.tolerance && deviations.is_clean();
            let file = EvaluationFile {
                exact: PlayerValues { principal: a, receiver: b },
                backward_induction: PlayerValues { principal: va, receiver: vb },
                gap,
                tolerance: cfg.tolerance,
                deviations,
                passed,
            };
            emit(cfg, stdout, &to_json(&file), &mut written)?;
        }
        Command::Simulate => {
            let solution = solve_source(cfg)?;
            let (a, b) = exact_value(&solution)?;
            let file = SimulationFile {
                exact: PlayerValues { principal: a, receiver: b },
                simulated: simulate(&solution, cfg.seed, cfg.trajectories)?,
            };
            emit(cfg, stdout, &to_json(&file), &mut written)?;
        }
        Command::Envelope => {
            let Source::Input(path) = &cfg.source else { unreachable!("validated") };
            let input = read_envelope_input(path)?;
            emit(cfg, stdout, &to_json(&envelope(&input)?), &mut written)?;
        }
    }
    Ok(Outcome { passed, written })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn read_envelope_input(path: &Path) -> Result<EnvelopeInput> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
}

/// The concave closure of a piecewise description.
pub fn envelope(input: &EnvelopeInput) -> Result<EnvelopeFile> {
    let n = input.states.len();
    if n == 0 {
        bail!("the envelope needs at least one state");
    }
    if input.functions.is_empty() {
        bail!("the envelope needs at least one piece");
    }
    for (j, piece) in input.functions.iter().enumerate() {
        if piece.f.weights.len() != n || piece.rho.weights.len() != n {
            bail!("piece {j} must have {n} weights in both f and rho");
        }
    }
    let choose = |w: &signal_picking::geometry::SimplexPoint| {
        let q: Vec<QValue> =
            input.functions.iter().map(|p| QValue { principal: p.rho.at(w), receiver: p.f.at(w) }).collect();
        receiver_best(&q)
    };
    let mut boundaries = Vec::new();
    for (i, a) in input.functions.iter().enumerate() {
        for b in &input.functions[i + 1..] {
            let diff = a.f.sub(&b.f);
            if !(diff.is_constant_on_simplex(1e-12) && diff.canonical().offset.abs() <= 1e-12) {
                boundaries.push(diff);
            }
        }
    }
    let arrangement = CellArrangement::new(n, boundaries)?;
    let env = argcav(|w| Ok(choose(w).principal_value), &arrangement)?;
    let vertices = env
        .triangulation()
        .vertices()
        .iter()
        .zip(env.values())
        .map(|(v, &value)| EnvelopeVertex { point: v.coords().to_vec(), value, piece: choose(v).chosen })
        .collect();
    Ok(EnvelopeFile {
        states: input.states.clone(),
        vertices,
        simplices: env.triangulation().simplices().to_vec(),
    })
}

//! Artifact formats: the solution document and the sweep tables.

use std::io::Write;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use signal_picking::geometry::SimplexPoint;
use signal_picking::solver::{EquilibriumSolution, StageSolution};

pub const SOLUTION_FORMAT: &str = "signal-picking-solution/1";
pub const VERTICES_HEADER: &str = "# signal-picking vertices v1";
pub const QCURVES_HEADER: &str = "# signal-picking qcurves v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRow {
    pub belief: Vec<f64>,
    pub value_a: f64,
    pub value_b: f64,
    pub action: usize,
    pub action_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTable {
    pub stage: usize,
    pub states: Vec<String>,
    pub vertices: Vec<VertexRow>,
    /// Maximal simplices as vertex indices.
    pub simplices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerValues {
    pub principal: f64,
    pub receiver: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format: String,
    pub horizon: usize,
    pub prior: Vec<f64>,
    pub prior_values: PlayerValues,
    pub stages: Vec<StageTable>,
}

pub fn stage_table(solution: &EquilibriumSolution, stage: &StageSolution) -> StageTable {
    let spec_stage = solution.spec().stage(stage.stage());
    let vertices = stage
        .vertices()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let action = stage.receiver_actions()[k];
            VertexRow {
                belief: v.coords().to_vec(),
                value_a: stage.value_a().values()[k],
                value_b: stage.value_b().values()[k],
                action,
                action_label: spec_stage.actions[action].clone(),
            }
        })
        .collect();
    StageTable {
        stage: stage.stage(),
        states: spec_stage.states.clone(),
        vertices,
        simplices: stage.triangulation().simplices().to_vec(),
    }
}

pub fn solution_file(solution: &EquilibriumSolution) -> SolutionFile {
    let (principal, receiver) = solution.prior_values();
    SolutionFile {
        format: SOLUTION_FORMAT.to_string(),
        horizon: solution.horizon(),
        prior: solution.spec().prior.clone(),
        prior_values: PlayerValues { principal, receiver },
        stages: solution.stages().iter().map(|s| stage_table(solution, s)).collect(),
    }
}

/// Binary beliefs are written as the probability of the first state.
fn coordinates(p: &[f64]) -> &[f64] {
    if p.len() == 2 {
        &p[..1]
    } else {
        p
    }
}

fn coordinate_columns(states: usize) -> Vec<String> {
    if states == 2 {
        vec!["pi_1".to_string()]
    } else {
        (1..=states).map(|i| format!("pi_{i}")).collect()
    }
}

fn exported<'a>(solution: &'a EquilibriumSolution, depth: usize) -> impl Iterator<Item = &'a StageSolution> {
    let horizon = solution.horizon();
    let lowest = horizon.saturating_sub(depth).max(1);
    (lowest..=horizon).rev().map(move |t| solution.stage(t))
}

/// One row per triangulation vertex for stages `T` down to `T - depth`.
pub fn write_vertices(out: &mut impl Write, solution: &EquilibriumSolution, depth: usize) -> Result<()> {
    let states = solution.spec().stage(solution.horizon()).state_count();
    writeln!(out, "{VERTICES_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["stage".to_string()];
    header.extend(coordinate_columns(states));
    header.extend(["value_a", "value_b", "action"].map(String::from));
    w.write_record(&header)?;
    for stage in exported(solution, depth) {
        let table = stage_table(solution, stage);
        for row in &table.vertices {
            let mut record = vec![table.stage.to_string()];
            record.extend(coordinates(&row.belief).iter().map(f64::to_string));
            record.extend([row.value_a.to_string(), row.value_b.to_string(), row.action_label.clone()]);
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Grid on which the action-value curves are sampled.
fn curve_grid(states: usize) -> Vec<SimplexPoint> {
    if states == 2 {
        return (0..=200).map(|k| SimplexPoint::projected(vec![k as f64 / 200.0, 1.0 - k as f64 / 200.0])).collect();
    }
    let steps = 20;
    let mut out = Vec::new();
    let mut counts = vec![0usize; states];
    loop {
        let used: usize = counts[..states - 1].iter().sum();
        if used <= steps {
            counts[states - 1] = steps - used;
            out.push(SimplexPoint::projected(counts.iter().map(|&c| c as f64 / steps as f64).collect()));
        }
        let mut i = 0;
        loop {
            if i == states - 1 {
                return out;
            }
            counts[i] += 1;
            if counts[..states - 1].iter().sum::<usize>() <= steps {
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

/// Both players' action values on a grid, one row per belief and action.
pub fn write_qcurves(out: &mut impl Write, solution: &EquilibriumSolution, depth: usize) -> Result<()> {
    let states = solution.spec().stage(solution.horizon()).state_count();
    writeln!(out, "{QCURVES_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["stage".to_string()];
    header.extend(coordinate_columns(states));
    header.extend(["action", "q_a", "q_b"].map(String::from));
    w.write_record(&header)?;
    for stage in exported(solution, depth) {
        let labels = &solution.spec().stage(stage.stage()).actions;
        for p in curve_grid(stage.triangulation().outcomes()) {
            for (u, q) in stage.objective().q_values(&p)?.iter().enumerate() {
                let mut record = vec![stage.stage().to_string()];
                record.extend(coordinates(p.coords()).iter().map(f64::to_string));
                record.extend([labels[u].clone(), q.principal.to_string(), q.receiver.to_string()]);
                w.write_record(&record)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

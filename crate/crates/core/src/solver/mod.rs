//! Backward induction over the belief simplex.
//!
//! Each stage builds both players' action values from the stage rewards
//! and the next stage's interpolants, resolves the receiver's best
//! response with ties broken for the principal, and takes the concave
//! closure of the principal's resulting value. The triangulation that
//! realises the closure carries both players' values.

mod objective;

use std::sync::Arc;

use rayon::prelude::*;

pub use objective::{q_values, receiver_best, ActionObjective, QValue, ReceiverChoice, StageObjective};

use crate::game::{validate_spec, Belief, GameSpec};
use crate::geometry::polytope::HPolytope;
use crate::geometry::{concave_envelope, dedup_points, SimplexPoint, Triangulation, VertexInterpolant};
use crate::{Error, Result, EPS_GEOM};

/// The solved stage: triangulation, both players' vertex values, and the
/// receiver's action at each vertex.
#[derive(Debug, Clone)]
pub struct StageSolution {
    stage: usize,
    value_a: VertexInterpolant,
    value_b: VertexInterpolant,
    actions: Vec<usize>,
    objective: StageObjective,
}

impl StageSolution {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn triangulation(&self) -> &Triangulation {
        self.value_a.triangulation()
    }

    pub fn vertices(&self) -> &[SimplexPoint] {
        self.triangulation().vertices()
    }

    /// The principal's value, concave by construction.
    pub fn value_a(&self) -> &VertexInterpolant {
        &self.value_a
    }

    /// The receiver's value, interpolated on the principal's triangulation.
    pub fn value_b(&self) -> &VertexInterpolant {
        &self.value_b
    }

    /// Receiver action per vertex.
    pub fn receiver_actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn objective(&self) -> &StageObjective {
        &self.objective
    }

    /// Replaces the stored receiver action at `vertex`. Values are left
    /// untouched, so this is only useful for building negative controls.
    pub fn set_receiver_action(&mut self, vertex: usize, action: usize) {
        self.actions[vertex] = action;
    }
}

/// Stage solutions for `t = 1..=T` and the equilibrium payoffs at the
/// prior.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    spec: GameSpec,
    stages: Vec<StageSolution>,
    prior_values: (f64, f64),
}

impl EquilibriumSolution {
    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    /// Stage `t` (1-based). Panics outside `1..=T`.
    pub fn stage(&self, t: usize) -> &StageSolution {
        &self.stages[t - 1]
    }

    pub fn stage_mut(&mut self, t: usize) -> &mut StageSolution {
        &mut self.stages[t - 1]
    }

    pub fn stages(&self) -> &[StageSolution] {
        &self.stages
    }

    /// `(V_A, V_B)` of the first stage at the prior.
    pub fn prior_values(&self) -> (f64, f64) {
        self.prior_values
    }

    pub fn prior(&self) -> Result<Belief> {
        Belief::prior(&self.spec)
    }
}

/// Solves stage `t` given the solution of stage `t + 1` (`None` at the
/// last stage).
pub fn stage_backup(spec: &GameSpec, t: usize, next: Option<&StageSolution>) -> Result<StageSolution> {
    let objective = StageObjective::build(spec, t, next)?;
    let candidates = candidate_points(&objective);
    let choices = candidates
        .par_iter()
        .map(|p| objective.best_response(p))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = choices.iter().map(|c| c.principal_value).collect();
    let value_a = concave_envelope(candidates, values)?;
    let triangulation: Arc<Triangulation> = value_a.shared_triangulation();
    let mut values_b = Vec::with_capacity(triangulation.vertices().len());
    let mut actions = Vec::with_capacity(triangulation.vertices().len());
    for v in triangulation.vertices() {
        let c = objective.best_response(v)?;
        values_b.push(c.receiver_value);
        actions.push(c.chosen);
    }
    let value_b = VertexInterpolant::new(triangulation, values_b)?;
    Ok(StageSolution { stage: t, value_a, value_b, actions, objective })
}

/// Backward induction from the last stage to the first.
pub fn solve(spec: &GameSpec) -> Result<EquilibriumSolution> {
    let report = validate_spec(spec);
    if !report.valid {
        return Err(Error::InvalidSpec(report.diagnostics));
    }
    let horizon = spec.horizon();
    let mut stages: Vec<StageSolution> = Vec::with_capacity(horizon);
    for t in (1..=horizon).rev() {
        let solved = stage_backup(spec, t, stages.last())?;
        stages.push(solved);
    }
    stages.reverse();
    let prior = SimplexPoint::new(spec.prior.clone())?;
    let prior_values = (stages[0].value_a.interpolate(&prior)?, stages[0].value_b.interpolate(&prior)?);
    Ok(EquilibriumSolution { spec: spec.clone(), stages, prior_values })
}

/// A cell of the common refinement of all actions' pieces, with the index
/// of the piece each action uses on it.
struct Cell {
    poly: HPolytope,
    pieces: Vec<usize>,
}

/// Points at which the principal's stage objective must be sampled for
/// its concave closure to be exact.
///
/// On each cell every action value is affine, and the objective is the
/// principal's value of the best action, so it is affine on each region
/// where one action is (weakly) best. The closure is determined by the
/// objective at the vertices of those regions, plus the simplex corners.
fn candidate_points(objective: &StageObjective) -> Vec<SimplexPoint> {
    let n = objective.states();
    let d = n - 1;
    let pieces: Vec<_> = objective.actions().iter().map(|a| a.pieces()).collect();

    let mut cells = vec![Cell { poly: HPolytope::simplex(d), pieces: Vec::new() }];
    for action_pieces in &pieces {
        let mut refined = Vec::new();
        for cell in &cells {
            for (k, (region, _, _)) in action_pieces.iter().enumerate() {
                let mut poly = cell.poly.clone();
                for f in region {
                    poly.push_nonnegative(f);
                }
                let vertices = poly.vertices();
                if !poly.is_full_dimensional(&vertices) {
                    continue;
                }
                poly.simplify(&vertices);
                let mut chosen = cell.pieces.clone();
                chosen.push(k);
                refined.push(Cell { poly, pieces: chosen });
            }
        }
        cells = refined;
    }

    let mut points: Vec<SimplexPoint> = (0..n).map(|i| SimplexPoint::corner(n, i)).collect();
    for cell in &cells {
        let receiver: Vec<_> = cell.pieces.iter().enumerate().map(|(u, &k)| &pieces[u][k].2).collect();
        for j in 0..receiver.len() {
            let mut poly = cell.poly.clone();
            for (u, f) in receiver.iter().enumerate() {
                if u != j {
                    poly.push_nonnegative(&receiver[j].sub(f));
                }
            }
            for z in poly.vertices() {
                points.push(if d == 0 { SimplexPoint::corner(1, 0) } else { SimplexPoint::from_chart(&z) });
            }
        }
    }
    dedup_points(points, EPS_GEOM)
}

//! Executable strategies read off a solved game.
//!
//! The principal's experiment at belief `pi` splits `pi` into the vertices
//! of the triangulation cell containing it; messages are labelled by the
//! vertex indices. The receiver best-responds to the posterior, breaking
//! ties in the principal's favour.

use crate::game::{split_experiment, Belief, Experiment};
use crate::solver::{EquilibriumSolution, StageSolution};
use crate::{Error, Result};

/// Distance within which a posterior is identified with a triangulation
/// vertex. Beliefs produced by Bayes' rule from a split land on vertices up
/// to round-off.
const VERTEX_SNAP: f64 = 1e-9;

fn stage_of<'a>(solution: &'a EquilibriumSolution, belief: &Belief) -> Result<&'a StageSolution> {
    let t = belief.stage();
    if t == 0 || t > solution.horizon() {
        return Err(Error::Domain(format!("stage {t} is outside 1..={}", solution.horizon())));
    }
    Ok(solution.stage(t))
}

#[derive(Debug, Clone, Copy)]
pub struct PrincipalPolicy<'a> {
    solution: &'a EquilibriumSolution,
}

impl<'a> PrincipalPolicy<'a> {
    pub fn new(solution: &'a EquilibriumSolution) -> Self {
        PrincipalPolicy { solution }
    }

    /// The experiment inducing the barycentric measure of `belief`, with
    /// each message labelled by its posterior's vertex index.
    pub fn principal_action(&self, belief: &Belief) -> Result<Experiment> {
        let stage = stage_of(self.solution, belief)?;
        let triangulation = stage.triangulation();
        let located = triangulation.locate(belief.point().coords())?;
        let measure = triangulation.barycentric(belief.point())?;
        split_experiment(belief, &measure)?.with_labels(located.into_iter().map(|(v, _)| v).collect())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReceiverPolicy<'a> {
    solution: &'a EquilibriumSolution,
}

impl<'a> ReceiverPolicy<'a> {
    pub fn new(solution: &'a EquilibriumSolution) -> Self {
        ReceiverPolicy { solution }
    }

    /// The receiver's action at `belief`: the stored action at a
    /// triangulation vertex, the tie-broken best response elsewhere.
    pub fn receiver_action(&self, belief: &Belief) -> Result<usize> {
        let stage = stage_of(self.solution, belief)?;
        if let Some(v) = stage.triangulation().vertex_index(belief.point(), VERTEX_SNAP) {
            return Ok(stage.receiver_actions()[v]);
        }
        Ok(stage.objective().best_response(belief.point())?.chosen)
    }

    /// The stored action at vertex `vertex` of stage `stage`.
    pub fn vertex_action(&self, stage: usize, vertex: usize) -> usize {
        self.solution.stage(stage).receiver_actions()[vertex]
    }
}

use serde::{Deserialize, Serialize};

use super::StageSolution;
use crate::game::{transition_map, Belief, GameSpec};
use crate::geometry::{pullback_affine, AffineFunctional, CellArrangement, PulledBack, SimplexPoint};
use crate::{Error, Result, EPS_TIE};

/// The two players' action values at one belief.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub principal: f64,
    pub receiver: f64,
}

/// The receiver's best response at one belief, with ties inside the
/// receiver's argmax broken in the principal's favour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverChoice {
    /// Actions within `EPS_TIE` of the receiver's best value.
    pub tie_set: Vec<usize>,
    pub receiver_value: f64,
    /// Best principal value over `tie_set`.
    pub principal_value: f64,
    /// Smallest action in `tie_set` attaining `principal_value` within
    /// `EPS_TIE`.
    pub chosen: usize,
}

pub fn receiver_best(q: &[QValue]) -> ReceiverChoice {
    let receiver_value = q.iter().map(|v| v.receiver).fold(f64::NEG_INFINITY, f64::max);
    let tie_set: Vec<usize> = (0..q.len()).filter(|&u| q[u].receiver >= receiver_value - EPS_TIE).collect();
    let principal_value = tie_set.iter().map(|&u| q[u].principal).fold(f64::NEG_INFINITY, f64::max);
    let chosen = *tie_set
        .iter()
        .find(|&&u| q[u].principal >= principal_value - EPS_TIE)
        .expect("tie set attains its maximum");
    ReceiverChoice { tie_set, receiver_value, principal_value, chosen }
}

/// Action values at `belief` given the solution of the following stage
/// (`None` after the last stage).
pub fn q_values(spec: &GameSpec, belief: &Belief, next: Option<&StageSolution>) -> Result<Vec<QValue>> {
    let t = belief.stage();
    if t == 0 || t > spec.horizon() {
        return Err(Error::Domain(format!("stage {t} is outside 1..={}", spec.horizon())));
    }
    let expected = if t == spec.horizon() { None } else { Some(t + 1) };
    if next.map(StageSolution::stage) != expected {
        return Err(Error::Domain(format!(
            "stage {t} needs the solution of stage {expected:?}, got {:?}",
            next.map(StageSolution::stage)
        )));
    }
    let stage = spec.stage(t);
    let pi = belief.point();
    if pi.len() != stage.state_count() {
        return Err(Error::Domain(format!("belief has {} states, stage {t} has {}", pi.len(), stage.state_count())));
    }
    (0..stage.action_count())
        .map(|u| {
            let mut q = QValue {
                principal: (0..pi.len()).map(|x| stage.rewards_a[x][u] * pi[x]).sum(),
                receiver: (0..pi.len()).map(|x| stage.rewards_b[x][u] * pi[x]).sum(),
            };
            if let (Some(next), false) = (next, stage.is_terminating(u)) {
                let image = transition_map(spec, t, u)?.apply_point(pi)?;
                q.principal += next.value_a().interpolate(&image)?;
                q.receiver += next.value_b().interpolate(&image)?;
            }
            Ok(q)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub(crate) struct Continuation {
    pub value_a: PulledBack,
    pub value_b: PulledBack,
}

/// The stage payoff structure of one action.
#[derive(Debug, Clone)]
pub struct ActionObjective {
    pub label: String,
    pub reward_a: AffineFunctional,
    pub reward_b: AffineFunctional,
    pub terminating: bool,
    pub(crate) continuation: Option<Continuation>,
}

impl ActionObjective {
    /// Continuation values pulled back through the belief transition,
    /// absent for terminating actions and at the last stage.
    pub fn continuation(&self) -> Option<(&PulledBack, &PulledBack)> {
        self.continuation.as_ref().map(|c| (&c.value_a, &c.value_b))
    }

    /// Affine pieces `(region, q_A, q_B)` of the action values.
    pub fn pieces(&self) -> Vec<(Vec<AffineFunctional>, AffineFunctional, AffineFunctional)> {
        match &self.continuation {
            None => vec![(Vec::new(), self.reward_a.clone(), self.reward_b.clone())],
            Some(c) => c
                .value_a
                .pieces()
                .iter()
                .zip(c.value_b.pieces())
                .map(|(a, b)| (a.region.clone(), self.reward_a.add(&a.value), self.reward_b.add(&b.value)))
                .collect(),
        }
    }
}

/// Both players' action values at one stage, as affine rewards plus
/// pulled-back continuation values.
#[derive(Debug, Clone)]
pub struct StageObjective {
    stage: usize,
    states: usize,
    actions: Vec<ActionObjective>,
}

impl StageObjective {
    pub fn build(spec: &GameSpec, t: usize, next: Option<&StageSolution>) -> Result<StageObjective> {
        let stage = spec.stage(t);
        let n = stage.state_count();
        let actions = (0..stage.action_count())
            .map(|u| {
                let column = |table: &Vec<Vec<f64>>| AffineFunctional::linear((0..n).map(|x| table[x][u]).collect());
                let terminating = stage.is_terminating(u);
                let continuation = match (next, terminating) {
                    (Some(next), false) => {
                        let map = transition_map(spec, t, u)?;
                        Some(Continuation {
                            value_a: pullback_affine(next.value_a(), &map)?,
                            value_b: pullback_affine(next.value_b(), &map)?,
                        })
                    }
                    _ => None,
                };
                Ok(ActionObjective {
                    label: stage.actions[u].clone(),
                    reward_a: column(&stage.rewards_a),
                    reward_b: column(&stage.rewards_b),
                    terminating,
                    continuation,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StageObjective { stage: t, states: n, actions })
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> &[ActionObjective] {
        &self.actions
    }

    pub fn q_values(&self, pi: &SimplexPoint) -> Result<Vec<QValue>> {
        if pi.len() != self.states {
            return Err(Error::Domain(format!(
                "belief has {} states, stage {} has {}",
                pi.len(),
                self.stage,
                self.states
            )));
        }
        self.actions
            .iter()
            .map(|a| {
                let mut q = QValue { principal: a.reward_a.at(pi), receiver: a.reward_b.at(pi) };
                if let Some(c) = &a.continuation {
                    q.principal += c.value_a.eval(pi)?;
                    q.receiver += c.value_b.eval(pi)?;
                }
                Ok(q)
            })
            .collect()
    }

    /// The receiver's tie-broken best response at `pi`; its
    /// `principal_value` is the principal's stage objective.
    pub fn best_response(&self, pi: &SimplexPoint) -> Result<ReceiverChoice> {
        Ok(receiver_best(&self.q_values(pi)?))
    }

    /// Pullback cell boundaries together with every difference of
    /// receiver action-value pieces between distinct actions.
    pub fn boundary_functionals(&self) -> Vec<AffineFunctional> {
        let mut out: Vec<AffineFunctional> = Vec::new();
        for a in &self.actions {
            if let Some(c) = &a.continuation {
                out.extend(c.value_a.boundary_functionals());
            }
        }
        let pieces: Vec<Vec<AffineFunctional>> = self
            .actions
            .iter()
            .map(|a| a.pieces().into_iter().map(|(_, _, b)| b).collect())
            .collect();
        for u in 0..pieces.len() {
            for v in (u + 1)..pieces.len() {
                for f in &pieces[u] {
                    for g in &pieces[v] {
                        out.push(f.sub(g));
                    }
                }
            }
        }
        out
    }

    /// The arrangement of [`StageObjective::boundary_functionals`].
    /// Functionals vanishing on the whole simplex carry no boundary and
    /// are left out.
    pub fn arrangement(&self) -> Result<CellArrangement> {
        let functionals = self
            .boundary_functionals()
            .into_iter()
            .filter(|f| !(f.is_constant_on_simplex(1e-12) && f.canonical().offset.abs() <= 1e-12))
            .collect();
        CellArrangement::new(self.states, functionals)
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{BeliefTree, DEFAULT_NODE_CAP};
use crate::builtin::random_distribution;
use crate::game::Belief;
use crate::geometry::SimplexPoint;
use crate::solver::EquilibriumSolution;
use crate::strategy::ReceiverPolicy;
use crate::Result;

/// Slack allowed before a deviation counts as profitable.
const SLACK: f64 = 1e-9;

/// Which beliefs and deviations to probe beyond the equilibrium path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    /// Random beliefs checked per stage.
    pub beliefs_per_stage: usize,
    /// Random posterior distributions tried per principal belief.
    pub deviations_per_belief: usize,
    pub seed: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec { beliefs_per_stage: 64, deviations_per_belief: 32, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    Principal,
    Receiver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub player: Player,
    pub stage: usize,
    pub belief: Vec<f64>,
    /// Gain from deviating.
    pub magnitude: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub receiver_checks: usize,
    pub principal_checks: usize,
    pub violations: Vec<Violation>,
}

impl DeviationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst(&self) -> f64 {
        self.violations.iter().map(|v| v.magnitude).fold(0.0, f64::max)
    }
}

/// A random finite-support distribution of posteriors with mean `pi`:
/// random atoms are shrunk towards `pi` just enough to stay in the simplex
/// after their mean is moved onto `pi`.
fn random_split(rng: &mut ChaCha8Rng, pi: &SimplexPoint) -> Vec<(SimplexPoint, f64)> {
    let n = pi.len();
    let count = rng.random_range(2..=n + 1);
    let atoms: Vec<Vec<f64>> = (0..count).map(|_| random_distribution(rng, n)).collect();
    let weights = random_distribution(rng, count);
    let mean: Vec<f64> = (0..n).map(|x| atoms.iter().zip(&weights).map(|(a, w)| w * a[x]).sum()).collect();
    let mut scale: f64 = 1.0;
    for a in &atoms {
        for x in 0..n {
            let shift = a[x] - mean[x];
            if shift < 0.0 {
                scale = scale.min(pi[x] / -shift);
            }
        }
    }
    atoms
        .iter()
        .zip(weights)
        .map(|(a, w)| {
            let p = (0..n).map(|x| pi[x] + scale * (a[x] - mean[x])).collect();
            (SimplexPoint::projected(p), w)
        })
        .collect()
}

/// Checks that neither player gains from a one-stage deviation followed
/// by equilibrium play, at every reachable belief and at random probes.
///
/// The receiver must choose a best action for its posterior. The
/// principal's value must dominate the expected stage objective of every
/// sampled distribution of posteriors centred on its belief; the concave
/// closure makes this hold for all such distributions, so the sample is a
/// spot check.
pub fn one_shot_deviation_check(solution: &EquilibriumSolution, probes: &ProbeSpec) -> Result<DeviationReport> {
    let tree = BeliefTree::build(solution, DEFAULT_NODE_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(probes.seed);
    let mut principal_points: Vec<(usize, SimplexPoint)> = Vec::new();
    let mut receiver_points: Vec<(usize, SimplexPoint)> = Vec::new();
    for node in tree.nodes() {
        principal_points.push((node.stage, node.belief.clone()));
        for c in &node.children {
            receiver_points.push((node.stage, c.posterior.clone()));
        }
    }
    for t in 1..=solution.horizon() {
        let n = solution.spec().stage(t).state_count();
        for _ in 0..probes.beliefs_per_stage {
            let p = SimplexPoint::projected(random_distribution(&mut rng, n));
            principal_points.push((t, p.clone()));
            receiver_points.push((t, p));
        }
    }

    let receiver = ReceiverPolicy::new(solution);
    let mut violations = Vec::new();
    for (t, pi) in &receiver_points {
        let q = solution.stage(*t).objective().q_values(pi)?;
        let chosen = receiver.receiver_action(&Belief::new(*t, pi.clone()))?;
        let best = q.iter().map(|v| v.receiver).fold(f64::NEG_INFINITY, f64::max);
        let gain = best - q[chosen].receiver;
        if gain > SLACK {
            violations.push(Violation {
                player: Player::Receiver,
                stage: *t,
                belief: pi.coords().to_vec(),
                magnitude: gain,
                detail: format!("action {chosen} is {gain:.3e} below the best action"),
            });
        }
    }

    for (t, pi) in &principal_points {
        let stage = solution.stage(*t);
        let value = stage.value_a().interpolate(pi)?;
        let mut trial = vec![vec![(pi.clone(), 1.0)]];
        trial.extend((0..probes.deviations_per_belief).map(|_| random_split(&mut rng, pi)));
        for split in trial {
            let mut gain = -value;
            for (p, w) in &split {
                gain += w * stage.objective().best_response(p)?.principal_value;
            }
            if gain > SLACK {
                violations.push(Violation {
                    player: Player::Principal,
                    stage: *t,
                    belief: pi.coords().to_vec(),
                    magnitude: gain,
                    detail: format!("a {}-posterior split gains {gain:.3e}", split.len()),
                });
            }
        }
    }
    Ok(DeviationReport {
        receiver_checks: receiver_points.len(),
        principal_checks: principal_points.len(),
        violations,
    })
}

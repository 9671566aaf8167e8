use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{bayes_update, push_forward};
use crate::solver::EquilibriumSolution;
use crate::strategy::{PrincipalPolicy, ReceiverPolicy};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trajectories: usize,
    pub seed: u64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub std_error_a: f64,
    pub std_error_b: f64,
}

fn sample(rng: &mut ChaCha8Rng, probabilities: &[f64]) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if r < acc {
                return i;
            }
        }
    }
    last
}

fn trajectory(solution: &EquilibriumSolution, seed: u64, index: u64) -> Result<(f64, f64)> {
    let spec = solution.spec();
    let principal = PrincipalPolicy::new(solution);
    let receiver = ReceiverPolicy::new(solution);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut state = sample(&mut rng, &spec.prior);
    let mut belief = solution.prior()?;
    let mut payoff = (0.0, 0.0);
    for t in 1..=solution.horizon() {
        let stage = spec.stage(t);
        let experiment = principal.principal_action(&belief)?;
        let message = sample(&mut rng, &experiment.kernel()[state]);
        let posterior = bayes_update(&belief, &experiment, message)?;
        let action = receiver.receiver_action(&posterior)?;
        payoff.0 += stage.rewards_a[state][action];
        payoff.1 += stage.rewards_b[state][action];
        if stage.is_terminating(action) || t == solution.horizon() {
            break;
        }
        let row = stage.transition(state, action).expect("non-final stage has a kernel");
        state = sample(&mut rng, row);
        belief = push_forward(spec, &posterior, action)?;
    }
    Ok(payoff)
}

fn mean_and_error(samples: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = samples.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Plays `trajectories` independent games under the equilibrium
/// strategies. Trajectory `i` draws from stream `i` of a ChaCha generator
/// seeded with `seed`, so the report does not depend on scheduling.
pub fn simulate(solution: &EquilibriumSolution, seed: u64, trajectories: usize) -> Result<SimulationReport> {
    if trajectories == 0 {
        return Err(Error::Parameter("at least one trajectory is required".into()));
    }
    let payoffs = (0..trajectories as u64)
        .into_par_iter()
        .map(|i| trajectory(solution, seed, i))
        .collect::<Result<Vec<_>>>()?;
    let (mean_a, std_error_a) = mean_and_error(payoffs.iter().map(|p| p.0), trajectories);
    let (mean_b, std_error_b) = mean_and_error(payoffs.iter().map(|p| p.1), trajectories);
    Ok(SimulationReport { trajectories, seed, mean_a, mean_b, std_error_a, std_error_b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameSpec, Stage};
    use crate::solver::solve;

    #[test]
    fn deterministic_game_has_no_variance() {
        let stage = Stage {
            states: vec!["a".into(), "b".into()],
            actions: vec!["go".into()],
            terminating: vec![],
            kernel: Some(vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]]),
            rewards_a: vec![vec![1.0], vec![2.0]],
            rewards_b: vec![vec![-1.0], vec![0.5]],
        };
        let mut last = stage.clone();
        last.kernel = None;
        let spec = GameSpec { stages: vec![stage.clone(), stage, last], prior: vec![1.0, 0.0] };
        let sol = solve(&spec).unwrap();
        let report = simulate(&sol, 9, 50).unwrap();
        assert_eq!((report.mean_a, report.mean_b), (4.0, -1.5));
        assert_eq!((report.std_error_a, report.std_error_b), (0.0, 0.0));
    }

    #[test]
    fn same_seed_same_report() {
        let sol = solve(&crate::builtin::detector(0.2, 0.15, 6).unwrap()).unwrap();
        assert_eq!(simulate(&sol, 42, 500).unwrap(), simulate(&sol, 42, 500).unwrap());
        assert_ne!(simulate(&sol, 42, 500).unwrap(), simulate(&sol, 43, 500).unwrap());
    }
}

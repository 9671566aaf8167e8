//! Built-in games: quickest detection, the detector game, and a random
//! small-game generator for tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{GameSpec, Stage};
use crate::{Error, Result};

fn check_unit(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in (0, 1), got {value}")))
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    Ok(())
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn repeat(horizon: usize, stage: Stage) -> Vec<Stage> {
    let mut stages = vec![stage; horizon];
    stages.last_mut().expect("horizon >= 1").kernel = None;
    stages
}

/// Quickest detection of a jump from state `1` to the absorbing state `2`.
///
/// The receiver declares a state; declaring `2` ends the game. A false
/// alarm costs the receiver 1 and each stage of delay after the jump costs
/// `cost`. The principal earns 1 for every stage the receiver stays. The
/// prior puts all mass on state `1`.
pub fn quickest_detection(jump: f64, cost: f64, horizon: usize) -> Result<GameSpec> {
    check_unit("p", jump)?;
    check_unit("c", cost)?;
    check_horizon(horizon)?;
    let stage = Stage {
        states: labels(&["1", "2"]),
        actions: labels(&["declare-1", "declare-2"]),
        terminating: labels(&["declare-2"]),
        kernel: Some(vec![
            vec![vec![1.0 - jump, jump], vec![1.0 - jump, jump]],
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
        ]),
        rewards_a: vec![vec![1.0, 0.0], vec![1.0, 0.0]],
        rewards_b: vec![vec![0.0, -1.0], vec![-cost, 0.0]],
    };
    Ok(GameSpec { stages: repeat(horizon, stage), prior: vec![1.0, 0.0] })
}

/// A detector facing a symmetric two-state chain that flips with
/// probability `flip`.
///
/// The receiver declares `-1` or `+1`, which ends the game and pays 1 when
/// correct, or waits at cost `cost`. The principal earns 1 per wait. The
/// prior is uniform.
pub fn detector(flip: f64, cost: f64, horizon: usize) -> Result<GameSpec> {
    check_unit("p", flip)?;
    check_unit("c", cost)?;
    check_horizon(horizon)?;
    let row_stay = |x: usize| if x == 0 { vec![1.0 - flip, flip] } else { vec![flip, 1.0 - flip] };
    let stage = Stage {
        states: labels(&["-1", "1"]),
        actions: labels(&["declare -1", "wait", "declare +1"]),
        terminating: labels(&["declare -1", "declare +1"]),
        kernel: Some((0..2).map(|x| vec![row_stay(x); 3]).collect()),
        rewards_a: vec![vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]],
        rewards_b: vec![vec![1.0, -cost, 0.0], vec![0.0, -cost, 1.0]],
    };
    Ok(GameSpec { stages: repeat(horizon, stage), prior: vec![0.5, 0.5] })
}

/// Random probability vector with `n` entries.
pub(crate) fn random_distribution(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// A random game with stage-constant alphabets: rewards uniform on
/// `[-1, 1]`, kernels and prior drawn uniformly from the simplex, and each
/// action terminating with probability 1/4.
pub fn random_game(seed: u64, states: usize, actions: usize, horizon: usize) -> Result<GameSpec> {
    if states == 0 || actions == 0 {
        return Err(Error::Parameter("a game needs at least one state and one action".into()));
    }
    check_horizon(horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state_labels: Vec<String> = (1..=states).map(|i| format!("x{i}")).collect();
    let action_labels: Vec<String> = (1..=actions).map(|i| format!("u{i}")).collect();
    let reward = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..states).map(|_| (0..actions).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect()
    };
    let stages = (1..=horizon)
        .map(|t| {
            let terminating = action_labels.iter().filter(|_| rng.random_bool(0.25)).cloned().collect();
            let kernel = (t < horizon).then(|| {
                (0..states)
                    .map(|_| (0..actions).map(|_| random_distribution(&mut rng, states)).collect())
                    .collect()
            });
            Stage {
                states: state_labels.clone(),
                actions: action_labels.clone(),
                terminating,
                kernel,
                rewards_a: reward(&mut rng),
                rewards_b: reward(&mut rng),
            }
        })
        .collect();
    let prior = random_distribution(&mut rng, states);
    Ok(GameSpec { stages, prior })
}

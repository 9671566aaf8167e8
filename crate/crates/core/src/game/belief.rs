use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GameSpec;
use crate::geometry::{check_probability_vector, AffineMap, SimplexPoint, SupportMeasure};
use crate::{Error, Result, EPS_GEOM};

/// Tolerance on experiment row sums.
const ROW_TOL: f64 = 1e-12;

/// A public belief over the states of stage `stage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    stage: usize,
    point: SimplexPoint,
}

impl Belief {
    pub fn new(stage: usize, point: SimplexPoint) -> Self {
        Belief { stage, point }
    }

    /// The prior belief of `spec`.
    pub fn prior(spec: &GameSpec) -> Result<Self> {
        Ok(Belief::new(1, SimplexPoint::new(spec.prior.clone())?))
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn point(&self) -> &SimplexPoint {
        &self.point
    }

    pub fn into_point(self) -> SimplexPoint {
        self.point
    }
}

/// An observation kernel from states to messages, `kernel[x][m]`. Each
/// message carries a label; by default the labels are `0..m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    kernel: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl Experiment {
    pub fn new(kernel: Vec<Vec<f64>>) -> Result<Self> {
        let m = kernel.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::Domain("an experiment needs at least one state and one message".into()));
        }
        for (x, row) in kernel.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Domain(format!("experiment row {x} has {} messages, expected {m}", row.len())));
            }
            check_probability_vector(row, ROW_TOL)
                .map_err(|e| Error::Domain(format!("experiment row {x}: {e}")))?;
        }
        Ok(Experiment { kernel, labels: (0..m).collect() })
    }

    /// The one-message experiment over `states` states.
    pub fn uninformative(states: usize) -> Self {
        Experiment { kernel: vec![vec![1.0]; states], labels: vec![0] }
    }

    /// Relabels the messages.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.messages() {
            return Err(Error::Domain(format!("{} labels for {} messages", labels.len(), self.messages())));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn states(&self) -> usize {
        self.kernel.len()
    }

    pub fn messages(&self) -> usize {
        self.kernel[0].len()
    }

    /// `P(m | x)`.
    pub fn likelihood(&self, state: usize, message: usize) -> f64 {
        self.kernel[state][message]
    }

    /// Marginal probability of `message` under `prior`.
    pub fn message_probability(&self, prior: &SimplexPoint, message: usize) -> f64 {
        prior.coords().iter().zip(&self.kernel).map(|(p, row)| p * row[message]).sum()
    }
}

fn check_states(belief: &Belief, experiment: &Experiment) -> Result<()> {
    if belief.point.len() != experiment.states() {
        return Err(Error::Domain(format!(
            "belief has {} states, experiment has {}",
            belief.point.len(),
            experiment.states()
        )));
    }
    Ok(())
}

/// The posterior after observing `message`. When the message has
/// (numerically) zero probability the posterior is uniform.
pub fn bayes_update(prior: &Belief, experiment: &Experiment, message: usize) -> Result<Belief> {
    check_states(prior, experiment)?;
    if message >= experiment.messages() {
        return Err(Error::Domain(format!(
            "message {message} out of range for {} messages",
            experiment.messages()
        )));
    }
    let joint: Vec<f64> = prior
        .point
        .coords()
        .iter()
        .zip(&experiment.kernel)
        .map(|(p, row)| p * row[message])
        .collect();
    let total: f64 = joint.iter().sum();
    let point = if total <= EPS_GEOM {
        SimplexPoint::uniform(joint.len())
    } else {
        SimplexPoint::projected(joint.into_iter().map(|j| j / total).collect())
    };
    Ok(Belief::new(prior.stage, point))
}

/// The affine belief transition of action `action` at stage `stage`.
pub fn transition_map(spec: &GameSpec, stage: usize, action: usize) -> Result<AffineMap> {
    if stage == 0 || stage >= spec.horizon() {
        return Err(Error::Domain(format!("stage {stage} has no successor stage")));
    }
    let s = spec.stage(stage);
    if action >= s.action_count() {
        return Err(Error::Domain(format!("action {action} out of range at stage {stage}")));
    }
    if s.is_terminating(action) {
        return Err(Error::Domain(format!(
            "action {:?} terminates the game at stage {stage}",
            s.actions[action]
        )));
    }
    let kernel = s
        .kernel
        .as_ref()
        .ok_or_else(|| Error::Domain(format!("stage {stage} has no kernel")))?;
    let rows: Vec<Vec<f64>> = kernel.iter().map(|per_action| per_action[action].clone()).collect();
    Ok(AffineMap::from_kernel(&rows))
}

/// The next-stage belief `sum_x pi(x) P(. | x, u)`.
pub fn push_forward(spec: &GameSpec, belief: &Belief, action: usize) -> Result<Belief> {
    let map = transition_map(spec, belief.stage, action)?;
    if belief.point.len() != map.source_len() {
        return Err(Error::Domain(format!(
            "belief has {} states, stage {} has {}",
            belief.point.len(),
            belief.stage,
            map.source_len()
        )));
    }
    Ok(Belief::new(belief.stage + 1, map.apply_point(&belief.point)?))
}

/// The distribution of posteriors the experiment induces from `prior`.
/// Messages with equal posteriors are merged; messages of zero probability
/// are dropped.
pub fn induced_distribution(prior: &Belief, experiment: &Experiment) -> Result<SupportMeasure> {
    check_states(prior, experiment)?;
    let mut groups: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut atoms: Vec<(SimplexPoint, f64)> = Vec::new();
    for m in 0..experiment.messages() {
        let weight = experiment.message_probability(&prior.point, m);
        if weight <= 0.0 {
            continue;
        }
        let posterior = SimplexPoint::projected(
            prior
                .point
                .coords()
                .iter()
                .zip(&experiment.kernel)
                .map(|(p, row)| p * row[m] / weight)
                .collect(),
        );
        let key = posterior.coords().iter().map(|c| (c * 1e12).round() as i64).collect();
        match groups.get(&key) {
            Some(&i) => atoms[i].1 += weight,
            None => {
                groups.insert(key, atoms.len());
                atoms.push((posterior, weight));
            }
        }
    }
    let total: f64 = atoms.iter().map(|(_, w)| w).sum();
    for (_, w) in atoms.iter_mut() {
        *w /= total;
    }
    SupportMeasure::new(atoms)
}

/// An experiment inducing `target` from `prior`: one message per atom,
/// `P(m_k | x) = w_k atom_k(x) / prior(x)`. States of zero prior
/// probability get uniform rows.
pub fn split_experiment(prior: &Belief, target: &SupportMeasure) -> Result<Experiment> {
    let n = prior.point.len();
    if target.atoms().iter().any(|(p, _)| p.len() != n) {
        return Err(Error::Domain("posterior atoms and prior live on different simplices".into()));
    }
    let mean = target.mean();
    let gap = mean.iter().zip(prior.point.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if gap > EPS_GEOM {
        return Err(Error::Inducibility(format!(
            "posterior mean {mean:?} differs from the prior {:?} by {gap:.3e}",
            prior.point
        )));
    }
    let m = target.len();
    let kernel = (0..n)
        .map(|x| {
            let px = prior.point[x];
            let row: Vec<f64> = if px > 0.0 {
                target.atoms().iter().map(|(a, w)| w * a[x] / px).collect()
            } else {
                vec![0.0; m]
            };
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                row.into_iter().map(|r| r / sum).collect()
            } else {
                vec![1.0 / m as f64; m]
            }
        })
        .collect();
    Ok(Experiment { kernel, labels: (0..m).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn belief(c: &[f64]) -> Belief {
        Belief::new(1, SimplexPoint::new(c.to_vec()).unwrap())
    }

    #[test]
    fn uninformative_keeps_the_prior() {
        let pi = belief(&[0.3, 0.7]);
        let sigma = Experiment::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        for m in 0..2 {
            assert!(bayes_update(&pi, &sigma, m).unwrap().point().approx_eq(pi.point(), 1e-15));
        }
        let eta = induced_distribution(&pi, &sigma).unwrap();
        assert_eq!(eta.len(), 1);
        assert!(eta.atoms()[0].0.approx_eq(pi.point(), 1e-15));
    }

    #[test]
    fn revealing_experiment() {
        let pi = belief(&[0.3, 0.7]);
        let sigma = Experiment::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(bayes_update(&pi, &sigma, 0).unwrap().point().coords(), &[1.0, 0.0]);
        let eta = induced_distribution(&pi, &sigma).unwrap();
        let expected = SupportMeasure::new(vec![
            (SimplexPoint::corner(2, 0), 0.3),
            (SimplexPoint::corner(2, 1), 0.7),
        ])
        .unwrap();
        assert!(eta.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn hand_computed_posterior() {
        let pi = belief(&[0.5, 0.5]);
        let sigma = Experiment::new(vec![vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap();
        let post = bayes_update(&pi, &sigma, 0).unwrap();
        assert!((post.point()[0] - 2.0 / 3.0).abs() < 1e-15);
        let eta = induced_distribution(&pi, &sigma).unwrap();
        let expected = SupportMeasure::new(vec![
            (SimplexPoint::projected(vec![2.0 / 3.0, 1.0 / 3.0]), 0.6),
            (SimplexPoint::projected(vec![0.25, 0.75]), 0.4),
        ])
        .unwrap();
        assert!(eta.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn zero_probability_message_gives_uniform() {
        let pi = belief(&[1.0, 0.0]);
        let sigma = Experiment::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(bayes_update(&pi, &sigma, 1).unwrap().point().coords(), &[0.5, 0.5]);
        assert!(bayes_update(&pi, &sigma, 2).is_err());
    }

    #[test]
    fn quickest_detection_push_forward() {
        let spec = builtin::quickest_detection(0.2, 0.1, 3).unwrap();
        let absorbed = push_forward(&spec, &belief(&[0.0, 1.0]), 0).unwrap();
        assert_eq!(absorbed.point().coords(), &[0.0, 1.0]);
        assert_eq!(absorbed.stage(), 2);
        let next = push_forward(&spec, &belief(&[0.6, 0.4]), 0).unwrap();
        assert!((next.point()[0] - 0.8 * 0.6).abs() < 1e-15);
        assert!(matches!(push_forward(&spec, &belief(&[0.6, 0.4]), 1), Err(Error::Domain(_))));
    }

    #[test]
    fn split_round_trips() {
        let pi = belief(&[0.05, 0.95]);
        let eta = SupportMeasure::new(vec![
            (SimplexPoint::projected(vec![1.0 / 11.0, 10.0 / 11.0]), 0.55),
            (SimplexPoint::corner(2, 1), 0.45),
        ])
        .unwrap();
        let sigma = split_experiment(&pi, &eta).unwrap();
        assert!(induced_distribution(&pi, &sigma).unwrap().approx_eq(&eta, EPS_GEOM));
    }

    #[test]
    fn split_of_the_prior_is_uninformative() {
        let pi = belief(&[0.2, 0.3, 0.5]);
        let sigma = split_experiment(&pi, &SupportMeasure::dirac(pi.point().clone())).unwrap();
        assert_eq!(sigma.messages(), 1);
    }

    #[test]
    fn split_with_wrong_mean_fails() {
        let pi = belief(&[0.5, 0.5]);
        let eta = SupportMeasure::dirac(SimplexPoint::corner(2, 0));
        assert!(matches!(split_experiment(&pi, &eta), Err(Error::Inducibility(_))));
    }
}

use std::collections::HashMap;

use crate::game::{push_forward, Belief};
use crate::geometry::SimplexPoint;
use crate::solver::EquilibriumSolution;
use crate::{Error, Result};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

/// Beliefs are identified after rounding to this many decimals.
const KEY_SCALE: f64 = 1e9;

/// One posterior the principal induces at a node.
#[derive(Debug, Clone)]
pub struct BeliefChild {
    /// Triangulation vertex the posterior sits on.
    pub vertex: usize,
    pub posterior: SimplexPoint,
    pub probability: f64,
    pub action: usize,
    /// Node reached at the next stage; `None` when the game ends.
    pub next: Option<usize>,
}

/// A public belief before the principal's experiment at `stage`.
#[derive(Debug, Clone)]
pub struct BeliefNode {
    pub stage: usize,
    pub belief: SimplexPoint,
    /// Probability of reaching the node.
    pub reach: f64,
    pub children: Vec<BeliefChild>,
}

/// The beliefs reachable on the equilibrium path, merged across paths.
#[derive(Debug, Clone)]
pub struct BeliefTree {
    nodes: Vec<BeliefNode>,
}

fn key(stage: usize, point: &SimplexPoint) -> (usize, Vec<i64>) {
    (stage, point.coords().iter().map(|c| (c * KEY_SCALE).round() as i64).collect())
}

impl BeliefTree {
    /// Expands the tree from the prior. Fails with a resource error once
    /// more than `node_cap` nodes have been created.
    pub fn build(solution: &EquilibriumSolution, node_cap: usize) -> Result<BeliefTree> {
        let spec = solution.spec();
        let prior = solution.prior()?;
        let mut nodes = vec![BeliefNode { stage: 1, belief: prior.into_point(), reach: 1.0, children: Vec::new() }];
        let mut index: HashMap<(usize, Vec<i64>), usize> = HashMap::new();
        let mut stage_start = 0;
        for t in 1..=solution.horizon() {
            let stage_end = nodes.len();
            let solved = solution.stage(t);
            let terminating: Vec<bool> =
                (0..spec.stage(t).action_count()).map(|u| spec.stage(t).is_terminating(u)).collect();
            for i in stage_start..stage_end {
                let located = solved.triangulation().locate(nodes[i].belief.coords())?;
                let reach = nodes[i].reach;
                let mut children = Vec::with_capacity(located.len());
                for (vertex, probability) in located {
                    let posterior = solved.vertices()[vertex].clone();
                    let action = solved.receiver_actions()[vertex];
                    let next = if terminating[action] || t == solution.horizon() {
                        None
                    } else {
                        let b = push_forward(spec, &Belief::new(t, posterior.clone()), action)?;
                        let k = key(t + 1, b.point());
                        let id = *index.entry(k).or_insert_with(|| {
                            nodes.push(BeliefNode {
                                stage: t + 1,
                                belief: b.into_point(),
                                reach: 0.0,
                                children: Vec::new(),
                            });
                            nodes.len() - 1
                        });
                        nodes[id].reach += reach * probability;
                        Some(id)
                    };
                    children.push(BeliefChild { vertex, posterior, probability, action, next });
                }
                nodes[i].children = children;
                if nodes.len() > node_cap {
                    return Err(Error::Resource(format!(
                        "belief tree exceeds {node_cap} nodes while expanding stage {t} \
                         ({} nodes created, {} at stage {})",
                        nodes.len(),
                        nodes.len() - stage_end,
                        t + 1
                    )));
                }
            }
            stage_start = stage_end;
        }
        Ok(BeliefTree { nodes })
    }

    pub fn nodes(&self) -> &[BeliefNode] {
        &self.nodes
    }

    /// Expected total rewards `(J_A, J_B)` along the tree.
    pub fn values(&self, solution: &EquilibriumSolution) -> (f64, f64) {
        let spec = solution.spec();
        let mut total = (0.0, 0.0);
        for node in &self.nodes {
            let stage = spec.stage(node.stage);
            for c in &node.children {
                let p = node.reach * c.probability;
                let pi = c.posterior.coords();
                total.0 += p * (0..pi.len()).map(|x| stage.rewards_a[x][c.action] * pi[x]).sum::<f64>();
                total.1 += p * (0..pi.len()).map(|x| stage.rewards_b[x][c.action] * pi[x]).sum::<f64>();
            }
        }
        total
    }
}

/// Expected equilibrium payoffs `(J_A, J_B)` computed forward over the
/// reachable belief tree, independently of the stage value functions.
pub fn exact_value(solution: &EquilibriumSolution) -> Result<(f64, f64)> {
    Ok(BeliefTree::build(solution, DEFAULT_NODE_CAP)?.values(solution))
}

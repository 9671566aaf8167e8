//! Oracles and invariant checks shared by the property suite and the
//! acceptance runner. Every check returns `Err` with a description of the
//! first violation it meets.
#![allow(dead_code)]

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use signal_picking::evaluator::{exact_value, one_shot_deviation_check, BeliefTree, ProbeSpec, DEFAULT_NODE_CAP};
use signal_picking::game::{
    bayes_update, induced_distribution, push_forward, split_experiment, Belief, Experiment, GameSpec,
};
use signal_picking::geometry::{SimplexPoint, SupportMeasure, Triangulation, VertexInterpolant};
use signal_picking::solver::{EquilibriumSolution, StageSolution};
use signal_picking::strategy::{PrincipalPolicy, ReceiverPolicy};
use signal_picking::{EPS_GEOM, EPS_TIE};

pub type Check = Result<(), String>;

/// Slack of the value-level invariants.
pub const SLACK: f64 = 1e-9;

pub fn random_point(rng: &mut impl Rng, n: usize) -> SimplexPoint {
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    SimplexPoint::projected(draws.into_iter().map(|d| d / total).collect())
}

/// Every point of the simplex over `n` outcomes whose coordinates are
/// multiples of `1 / steps`.
pub fn simplex_grid(n: usize, steps: usize) -> Vec<SimplexPoint> {
    fn fill(prefix: &mut Vec<usize>, left: usize, n: usize, steps: usize, out: &mut Vec<SimplexPoint>) {
        if prefix.len() == n - 1 {
            let mut coords: Vec<f64> = prefix.iter().map(|&k| k as f64 / steps as f64).collect();
            coords.push(left as f64 / steps as f64);
            out.push(SimplexPoint::projected(coords));
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            fill(prefix, left - k, n, steps, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::new(), steps, n, steps, &mut out);
    out
}

/// The coarsest uniform grid with at least 1000 points.
pub fn dense_grid(n: usize) -> Vec<SimplexPoint> {
    if n == 1 {
        return vec![SimplexPoint::corner(1, 0)];
    }
    let mut steps = 1;
    loop {
        let g = simplex_grid(n, steps);
        if g.len() >= 1000 {
            return g;
        }
        steps += 1;
    }
}

/// Value at `query` of the upper concave hull of the sampled graph
/// `{(g, f(g))}`, computed as the dual linear program
/// `min y . query` subject to `y . g >= f(g)` by adding violated sample
/// constraints one at a time. The samples must include the corners.
pub fn grid_upper_hull(samples: &[(SimplexPoint, f64)], query: &SimplexPoint) -> f64 {
    let n = query.len();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let y: Vec<_> = (0..n).map(|x| problem.add_var(query[x], (f64::NEG_INFINITY, f64::INFINITY))).collect();
    for (g, f) in samples.iter().filter(|(g, _)| g.coords().iter().filter(|&&c| c == 1.0).count() == 1) {
        let x = g.coords().iter().position(|&c| c == 1.0).unwrap();
        problem.add_constraint([(y[x], 1.0)], ComparisonOp::Ge, *f);
    }
    let mut solution = problem.solve().expect("corner constraints bound the program");
    loop {
        let current: Vec<f64> = y.iter().map(|&v| *solution.var_value(v)).collect();
        let (worst, gap) = samples
            .iter()
            .map(|(g, f)| f - g.coords().iter().zip(&current).map(|(a, b)| a * b).sum::<f64>())
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if gap <= 1e-12 {
            return solution.objective();
        }
        let (g, f) = &samples[worst];
        let row: Vec<_> = (0..n).map(|x| (y[x], g[x])).collect();
        solution = solution.add_constraint(row, ComparisonOp::Ge, *f).expect("the hull program stays feasible");
    }
}

fn mix2(a: &SimplexPoint, b: &SimplexPoint, lambda: f64) -> SimplexPoint {
    SimplexPoint::projected(SimplexPoint::mix(&[(a, lambda), (b, 1.0 - lambda)]))
}

/// A random measure with at most `n` atoms at random posteriors.
pub fn random_measure(rng: &mut impl Rng, n: usize) -> SupportMeasure {
    let count = rng.random_range(1..=n);
    let weights = random_point(rng, count);
    let atoms = (0..count).map(|k| (random_point(rng, n), weights[k])).filter(|(_, w)| *w > 0.0).collect();
    SupportMeasure::new(atoms).expect("weights are a distribution")
}

pub fn random_experiment(rng: &mut impl Rng, states: usize, messages: usize) -> Experiment {
    Experiment::new((0..states).map(|_| random_point(rng, messages).into_coords()).collect()).unwrap()
}

/// Barycentric weights reproduce the point.
pub fn barycentric_mean(t: &Triangulation, rng: &mut impl Rng, count: usize) -> Check {
    let n = t.outcomes();
    for _ in 0..count {
        let omega = random_point(rng, n);
        let measure = t.barycentric(&omega).map_err(|e| e.to_string())?;
        let gap = measure.mean().iter().zip(omega.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if gap > EPS_GEOM {
            return Err(format!("barycentric mean at {omega:?} is off by {gap:.3e}"));
        }
    }
    Ok(())
}

/// The interpolant is affine inside each simplex.
pub fn interpolation_linearity(f: &VertexInterpolant, rng: &mut impl Rng, count: usize) -> Check {
    let t = f.triangulation();
    for _ in 0..count {
        let k = rng.random_range(0..t.simplices().len());
        let cell = &t.simplices()[k];
        let inside = |w: SimplexPoint| {
            let refs: Vec<(&SimplexPoint, f64)> =
                cell.iter().zip(w.coords()).map(|(&v, &w)| (&t.vertices()[v], w)).collect();
            SimplexPoint::projected(SimplexPoint::mix(&refs))
        };
        let a = inside(random_point(rng, cell.len()));
        let b = inside(random_point(rng, cell.len()));
        let lambda: f64 = rng.random();
        let mid = mix2(&a, &b, lambda);
        let eval = |p: &SimplexPoint| f.interpolate(p).map_err(|e| e.to_string());
        let gap = (eval(&mid)? - lambda * eval(&a)? - (1.0 - lambda) * eval(&b)?).abs();
        if gap > SLACK {
            return Err(format!("interpolant bends by {gap:.3e} inside simplex {k}"));
        }
    }
    Ok(())
}

/// `env` is concave, lies above `psi` on a dense grid, and equals `psi`
/// at its vertices.
pub fn envelope_properties(env: &VertexInterpolant, psi: impl Fn(&SimplexPoint) -> f64, rng: &mut impl Rng) -> Check {
    let n = env.triangulation().outcomes();
    let eval = |p: &SimplexPoint| env.interpolate(p).map_err(|e| e.to_string());
    for _ in 0..1000 {
        let (a, b) = (random_point(rng, n), random_point(rng, n));
        let lambda: f64 = rng.random();
        let chord = lambda * eval(&a)? + (1.0 - lambda) * eval(&b)?;
        let mid = eval(&mix2(&a, &b, lambda))?;
        if mid < chord - SLACK {
            return Err(format!("envelope dips {:.3e} below a chord between {a:?} and {b:?}", chord - mid));
        }
    }
    for g in dense_grid(n) {
        let (e, p) = (eval(&g)?, psi(&g));
        if e < p - SLACK {
            return Err(format!("envelope {e} below the objective {p} at {g:?}"));
        }
    }
    for (v, value) in env.triangulation().vertices().iter().zip(env.values()) {
        let p = psi(v);
        if (value - p).abs() > SLACK {
            return Err(format!("envelope {value} differs from the objective {p} at vertex {v:?}"));
        }
    }
    Ok(())
}

/// The posteriors of any experiment average to the prior.
pub fn martingale(rng: &mut impl Rng, n: usize) -> Check {
    let prior = Belief::new(1, random_point(rng, n));
    let messages = rng.random_range(1..=4);
    let measure = induced_distribution(&prior, &random_experiment(rng, n, messages)).map_err(|e| e.to_string())?;
    let gap = measure.mean().iter().zip(prior.point().coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if gap > SLACK {
        return Err(format!("posterior mean is {gap:.3e} away from the prior"));
    }
    Ok(())
}

/// Splitting a measure and inducing it again gives it back.
pub fn split_round_trip(rng: &mut impl Rng, n: usize) -> Check {
    let target = random_measure(rng, n);
    let prior = Belief::new(1, SimplexPoint::projected(target.mean()));
    let experiment = split_experiment(&prior, &target).map_err(|e| e.to_string())?;
    let back = induced_distribution(&prior, &experiment).map_err(|e| e.to_string())?;
    if !back.approx_eq(&target, EPS_GEOM) {
        return Err(format!("split of {target:?} induces {back:?}"));
    }
    Ok(())
}

/// Belief transitions are affine in the belief.
pub fn push_forward_affine(spec: &GameSpec, rng: &mut impl Rng) -> Check {
    if spec.horizon() < 2 {
        return Ok(());
    }
    let t = rng.random_range(1..spec.horizon());
    let stage = spec.stage(t);
    let n = stage.state_count();
    let (a, b) = (random_point(rng, n), random_point(rng, n));
    let lambda: f64 = rng.random();
    for u in (0..stage.action_count()).filter(|&u| !stage.is_terminating(u)) {
        let push = |p: &SimplexPoint| push_forward(spec, &Belief::new(t, p.clone()), u).map_err(|e| e.to_string());
        let mixed = push(&mix2(&a, &b, lambda))?;
        let expected = SimplexPoint::mix(&[(push(&a)?.point(), lambda), (push(&b)?.point(), 1.0 - lambda)]);
        let gap = mixed.point().coords().iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if gap > 1e-12 {
            return Err(format!("push-forward under action {u} at stage {t} is not affine: gap {gap:.3e}"));
        }
    }
    Ok(())
}

/// Posteriors weighted by message probabilities recover the prior.
pub fn bayes_consistency(rng: &mut impl Rng, n: usize) -> Check {
    let prior = Belief::new(1, random_point(rng, n));
    let messages = rng.random_range(1..=4);
    let experiment = random_experiment(rng, n, messages);
    let mut total = vec![0.0; n];
    for m in 0..messages {
        let p = experiment.message_probability(prior.point(), m);
        if p <= 0.0 {
            continue;
        }
        let post = bayes_update(&prior, &experiment, m).map_err(|e| e.to_string())?;
        for (t, c) in total.iter_mut().zip(post.point().coords()) {
            *t += p * c;
        }
    }
    let gap = total.iter().zip(prior.point().coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if gap > SLACK {
        return Err(format!("Bayes posteriors average {gap:.3e} away from the prior"));
    }
    Ok(())
}

fn objective_values(stage: &StageSolution, p: &SimplexPoint) -> Result<(f64, f64), String> {
    let c = stage.objective().best_response(p).map_err(|e| e.to_string())?;
    Ok((c.principal_value, c.receiver_value))
}

/// Concavity, majorisation and vertex touching of the principal's value,
/// vertex touching of the receiver's, linearity on cells, and dominance
/// over random inducible distributions, at every stage.
pub fn value_function_properties(solution: &EquilibriumSolution, rng: &mut impl Rng) -> Check {
    for stage in solution.stages() {
        let t = stage.stage();
        envelope_properties(stage.value_a(), |p| objective_values(stage, p).map(|v| v.0).unwrap_or(f64::NAN), rng)
            .map_err(|e| format!("stage {t}: {e}"))?;
        for (k, v) in stage.vertices().iter().enumerate() {
            let (_, b) = objective_values(stage, v)?;
            let stored = stage.value_b().values()[k];
            if (stored - b).abs() > SLACK {
                return Err(format!("stage {t}: receiver value {stored} differs from {b} at vertex {v:?}"));
            }
        }
        interpolation_linearity(stage.value_b(), rng, 200).map_err(|e| format!("stage {t}: {e}"))?;
        let n = stage.triangulation().outcomes();
        for _ in 0..100 {
            let eta = random_measure(rng, n);
            let pi = SimplexPoint::projected(eta.mean());
            let mut induced = 0.0;
            for (p, w) in eta.atoms() {
                induced += w * objective_values(stage, p)?.0;
            }
            let value = stage.value_a().interpolate(&pi).map_err(|e| e.to_string())?;
            if value < induced - SLACK {
                return Err(format!("stage {t}: splitting {pi:?} earns {induced} above the value {value}"));
            }
        }
    }
    Ok(())
}

/// The receiver's best value solves its Bellman equation with the next
/// stage's value integrated against barycentric measures.
pub fn receiver_bellman(solution: &EquilibriumSolution) -> Check {
    let spec = solution.spec();
    for t in 1..=solution.horizon() {
        let stage = spec.stage(t);
        let solved = solution.stage(t);
        let n = stage.state_count();
        for pi in dense_grid(n).into_iter().step_by(7) {
            let mut best = f64::NEG_INFINITY;
            for u in 0..stage.action_count() {
                let mut q: f64 = (0..n).map(|x| stage.rewards_b[x][u] * pi[x]).sum();
                if t < solution.horizon() && !stage.is_terminating(u) {
                    let next = solution.stage(t + 1);
                    let image = push_forward(spec, &Belief::new(t, pi.clone()), u).map_err(|e| e.to_string())?;
                    let measure = next.triangulation().barycentric(image.point()).map_err(|e| e.to_string())?;
                    for (v, w) in measure.atoms() {
                        q += w * objective_values(next, v)?.1;
                    }
                }
                best = best.max(q);
            }
            let (_, value) = objective_values(solved, &pi)?;
            if (best - value).abs() > SLACK {
                return Err(format!("stage {t}: receiver value {value} at {pi:?} but Bellman gives {best}"));
            }
        }
    }
    Ok(())
}

/// The receiver's action attains both players' objective values, at
/// vertices and at random beliefs.
pub fn policy_value_consistency(solution: &EquilibriumSolution, rng: &mut impl Rng) -> Check {
    let receiver = ReceiverPolicy::new(solution);
    for stage in solution.stages() {
        let t = stage.stage();
        let n = stage.triangulation().outcomes();
        let probes = stage.vertices().iter().cloned().chain((0..50).map(|_| random_point(rng, n)));
        for pi in probes.collect::<Vec<_>>() {
            let action = receiver.receiver_action(&Belief::new(t, pi.clone())).map_err(|e| e.to_string())?;
            let q = stage.objective().q_values(&pi).map_err(|e| e.to_string())?[action];
            let (a, b) = objective_values(stage, &pi)?;
            if (q.receiver - b).abs() > SLACK || (q.principal - a).abs() > SLACK {
                return Err(format!(
                    "stage {t}: action {action} at {pi:?} yields ({}, {}) but the values are ({a}, {b})",
                    q.principal, q.receiver
                ));
            }
        }
    }
    Ok(())
}

/// Every posterior the principal's experiment induces is a vertex.
pub fn on_path_posteriors_are_vertices(solution: &EquilibriumSolution, rng: &mut impl Rng) -> Check {
    let principal = PrincipalPolicy::new(solution);
    for stage in solution.stages() {
        let t = stage.stage();
        let n = stage.triangulation().outcomes();
        for _ in 0..50 {
            let belief = Belief::new(t, random_point(rng, n));
            let experiment = principal.principal_action(&belief).map_err(|e| e.to_string())?;
            let measure = induced_distribution(&belief, &experiment).map_err(|e| e.to_string())?;
            for (p, _) in measure.atoms() {
                if stage.triangulation().vertex_index(p, EPS_GEOM).is_none() {
                    return Err(format!("stage {t}: posterior {p:?} from {:?} is not a vertex", belief.point()));
                }
            }
        }
    }
    Ok(())
}

/// Exact evaluation reproduces the backward-induction values, reachable
/// posteriors are vertices, and no one-shot deviation pays.
pub fn evaluator_identities(solution: &EquilibriumSolution) -> Check {
    let (a, b) = exact_value(solution).map_err(|e| e.to_string())?;
    let (va, vb) = solution.prior_values();
    if (a - va).abs() > SLACK || (b - vb).abs() > SLACK {
        return Err(format!("exact values ({a}, {b}) differ from ({va}, {vb})"));
    }
    let tree = BeliefTree::build(solution, DEFAULT_NODE_CAP).map_err(|e| e.to_string())?;
    for node in tree.nodes() {
        for child in &node.children {
            let vertices = solution.stage(node.stage).vertices();
            if !child.posterior.approx_eq(&vertices[child.vertex], EPS_TIE) {
                return Err(format!("stage {}: reachable posterior {:?} is not a vertex", node.stage, child.posterior));
            }
        }
    }
    let report = one_shot_deviation_check(solution, &ProbeSpec::default()).map_err(|e| e.to_string())?;
    if !report.is_clean() {
        return Err(format!("{} profitable deviations, worst {:.3e}", report.violations.len(), report.worst()));
    }
    Ok(())
}

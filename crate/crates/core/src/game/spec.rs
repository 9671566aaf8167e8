use serde::{Deserialize, Serialize};

use crate::geometry::check_probability_vector;
use crate::{Error, Result};

/// Tolerance on kernel row sums and prior mass.
const STOCHASTIC_TOL: f64 = 1e-12;

/// Everything the players face at one stage. `kernel[x][u][x']` is the
/// transition law to the next stage's states; it is absent at the last
/// stage, and its rows for terminating actions are never used.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub terminating: Vec<String>,
    pub kernel: Option<Vec<Vec<Vec<f64>>>>,
    pub rewards_a: Vec<Vec<f64>>,
    pub rewards_b: Vec<Vec<f64>>,
}

impl Stage {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn is_terminating(&self, action: usize) -> bool {
        self.actions.get(action).is_some_and(|a| self.terminating.contains(a))
    }

    /// The row `P(.|x, u)`.
    pub fn transition(&self, state: usize, action: usize) -> Option<&[f64]> {
        self.kernel.as_ref().map(|k| k[state][action].as_slice())
    }
}

/// A finite-horizon signal picking game. Stages are numbered from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub stages: Vec<Stage>,
    pub prior: Vec<f64>,
}

/// Outcome of [`validate_spec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

impl GameSpec {
    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    /// Stage `t` (1-based).
    pub fn stage(&self, t: usize) -> &Stage {
        &self.stages[t - 1]
    }

    /// Parses the JSON format and validates the result.
    pub fn from_json(text: &str) -> Result<GameSpec> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| {
            Error::InvalidSpec(vec![format!("line {}, column {}: {e}", e.line(), e.column())])
        })?;
        let spec = file.into_spec()?;
        let report = validate_spec(&spec);
        if !report.valid {
            return Err(Error::InvalidSpec(report.diagnostics));
        }
        Ok(spec)
    }

    /// Writes the JSON format with every per-stage field expanded.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecFile::from_spec(self)).expect("spec serialises")
    }
}

/// Checks shapes, stochasticity of kernels and the prior, and that
/// terminating actions are actions. Every violation is reported.
pub fn validate_spec(spec: &GameSpec) -> SpecReport {
    let mut diag = Vec::new();
    let horizon = spec.horizon();
    if horizon == 0 {
        diag.push("horizon must be at least 1".to_string());
    }
    for (i, stage) in spec.stages.iter().enumerate() {
        let t = i + 1;
        let (nx, nu) = (stage.state_count(), stage.action_count());
        if nx == 0 {
            diag.push(format!("stage {t}: no states"));
        }
        if nu == 0 {
            diag.push(format!("stage {t}: no actions"));
        }
        for a in &stage.terminating {
            if !stage.actions.contains(a) {
                diag.push(format!("stage {t}: terminating action {a:?} is not an action"));
            }
        }
        for (name, table) in [("rewards_A", &stage.rewards_a), ("rewards_B", &stage.rewards_b)] {
            if table.len() != nx {
                diag.push(format!("stage {t}: {name} has {} rows, expected {nx}", table.len()));
            }
            for (x, row) in table.iter().enumerate() {
                if row.len() != nu {
                    diag.push(format!("stage {t}: {name} row {x} has {} entries, expected {nu}", row.len()));
                }
                if row.iter().any(|r| !r.is_finite()) {
                    diag.push(format!("stage {t}: {name} row {x} has a non-finite entry"));
                }
            }
        }
        if t == horizon {
            continue;
        }
        let next = spec.stages[t].state_count();
        let Some(kernel) = &stage.kernel else {
            diag.push(format!("stage {t}: missing transition kernel"));
            continue;
        };
        if kernel.len() != nx {
            diag.push(format!("stage {t}: kernel has {} state rows, expected {nx}", kernel.len()));
        }
        for (x, per_action) in kernel.iter().enumerate() {
            if per_action.len() != nu {
                diag.push(format!(
                    "stage {t}: kernel state {x} has {} action rows, expected {nu}",
                    per_action.len()
                ));
                continue;
            }
            for (u, row) in per_action.iter().enumerate() {
                if stage.is_terminating(u) {
                    continue;
                }
                if row.len() != next {
                    diag.push(format!(
                        "stage {t}: kernel row (state {x}, action {u}) has {} entries, expected {next}",
                        row.len()
                    ));
                } else if let Err(e) = check_probability_vector(row, STOCHASTIC_TOL) {
                    diag.push(format!("stage {t}: kernel row (state {x}, action {u}): {e}"));
                }
            }
        }
    }
    if let Some(first) = spec.stages.first() {
        if spec.prior.len() != first.state_count() {
            diag.push(format!(
                "prior has {} entries, expected {}",
                spec.prior.len(),
                first.state_count()
            ));
        } else if let Err(e) = check_probability_vector(&spec.prior, STOCHASTIC_TOL) {
            diag.push(format!("prior: {e}"));
        }
    }
    SpecReport { valid: diag.is_empty(), diagnostics: diag }
}

/// A field given once for all stages or once per stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum PerStage<T> {
    Constant(T),
    Staged(Vec<T>),
}

impl<T: Clone> PerStage<T> {
    fn expand(self, name: &str, lengths: &[usize]) -> Result<Vec<T>> {
        match self {
            PerStage::Constant(v) => Ok(vec![v; lengths[0]]),
            PerStage::Staged(v) if lengths.contains(&v.len()) => Ok(v),
            PerStage::Staged(v) => Err(Error::InvalidSpec(vec![format!(
                "{name} lists {} stages, expected one of {lengths:?}",
                v.len()
            )])),
        }
    }
}

type Table = Vec<Vec<f64>>;
type Kernel = Vec<Vec<Vec<f64>>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecFile {
    horizon: usize,
    states: PerStage<Vec<String>>,
    actions: PerStage<Vec<String>>,
    #[serde(default = "no_terminating")]
    terminating: PerStage<Vec<String>>,
    kernels: PerStage<Kernel>,
    #[serde(rename = "rewards_A")]
    rewards_a: PerStage<Table>,
    #[serde(rename = "rewards_B")]
    rewards_b: PerStage<Table>,
    prior: Vec<f64>,
}

fn no_terminating() -> PerStage<Vec<String>> {
    PerStage::Constant(Vec::new())
}

impl SpecFile {
    fn into_spec(self) -> Result<GameSpec> {
        let t = self.horizon;
        if t == 0 {
            return Err(Error::InvalidSpec(vec!["horizon must be at least 1".into()]));
        }
        let states = self.states.expand("states", &[t])?;
        let actions = self.actions.expand("actions", &[t])?;
        let terminating = self.terminating.expand("terminating", &[t])?;
        let mut kernels = self.kernels.expand("kernels", &[t, t - 1])?;
        kernels.truncate(t - 1);
        let rewards_a = self.rewards_a.expand("rewards_A", &[t])?;
        let rewards_b = self.rewards_b.expand("rewards_B", &[t])?;
        let mut kernels = kernels.into_iter();
        let stages = (0..t)
            .map(|i| Stage {
                states: states[i].clone(),
                actions: actions[i].clone(),
                terminating: terminating[i].clone(),
                kernel: kernels.next(),
                rewards_a: rewards_a[i].clone(),
                rewards_b: rewards_b[i].clone(),
            })
            .collect();
        Ok(GameSpec { stages, prior: self.prior })
    }

    fn from_spec(spec: &GameSpec) -> SpecFile {
        let collect = |f: &dyn Fn(&Stage) -> Vec<String>| PerStage::Staged(spec.stages.iter().map(f).collect());
        SpecFile {
            horizon: spec.horizon(),
            states: collect(&|s| s.states.clone()),
            actions: collect(&|s| s.actions.clone()),
            terminating: collect(&|s| s.terminating.clone()),
            kernels: PerStage::Staged(spec.stages.iter().filter_map(|s| s.kernel.clone()).collect()),
            rewards_a: PerStage::Staged(spec.stages.iter().map(|s| s.rewards_a.clone()).collect()),
            rewards_b: PerStage::Staged(spec.stages.iter().map(|s| s.rewards_b.clone()).collect()),
            prior: spec.prior.clone(),
        }
    }
}

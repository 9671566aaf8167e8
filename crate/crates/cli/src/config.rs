use std::path::PathBuf;

use anyhow::{bail, Result};
use signal_picking::builtin;
use signal_picking::game::GameSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Sweep,
    Evaluate,
    Simulate,
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinName {
    QuickestDetection,
    Detector,
}

impl BuiltinName {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "quickest_detection" => Ok(BuiltinName::QuickestDetection),
            "detector" => Ok(BuiltinName::Detector),
            other => bail!("unknown builtin {other:?}; expected quickest_detection or detector"),
        }
    }

    /// The parameters used in the worked examples.
    pub fn default_cost(self) -> f64 {
        match self {
            BuiltinName::QuickestDetection => 0.1,
            BuiltinName::Detector => 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Input(PathBuf),
    Builtin { name: BuiltinName, p: f64, c: f64, horizon: usize },
}

impl Source {
    pub fn load(&self) -> Result<GameSpec> {
        Ok(match self {
            Source::Input(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
                GameSpec::from_json(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?
            }
            Source::Builtin { name: BuiltinName::QuickestDetection, p, c, horizon } => {
                builtin::quickest_detection(*p, *c, *horizon)?
            }
            Source::Builtin { name: BuiltinName::Detector, p, c, horizon } => builtin::detector(*p, *c, *horizon)?,
        })
    }
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Source,
    /// File, or directory for `sweep`. Standard output when absent.
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub trajectories: usize,
    /// Largest exact-versus-backward-induction gap `evaluate` accepts.
    pub tolerance: f64,
    /// Stages below the horizon exported by `sweep`; all when absent.
    pub depth: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, source: Source) -> Self {
        RunConfig { command, source, out: None, seed: 0, trajectories: 100_000, tolerance: 1e-9, depth: None }
    }

    /// Checks the parts that do not need the game.
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            bail!("tolerance must be positive, got {}", self.tolerance);
        }
        if self.command == Command::Simulate && self.trajectories == 0 {
            bail!("at least one trajectory is required");
        }
        if self.command == Command::Sweep && self.out.is_none() {
            bail!("sweep writes several files and needs --out <directory>");
        }
        if self.command == Command::Envelope && !matches!(self.source, Source::Input(_)) {
            bail!("envelope reads a piecewise description from --input");
        }
        if let (Some(depth), Source::Builtin { horizon, .. }) = (self.depth, &self.source) {
            check_depth(depth, *horizon)?;
        }
        Ok(())
    }
}

pub(crate) fn check_depth(depth: usize, horizon: usize) -> Result<()> {
    if depth > horizon {
        bail!("sweep depth {depth} exceeds the horizon {horizon}");
    }
    Ok(())
}

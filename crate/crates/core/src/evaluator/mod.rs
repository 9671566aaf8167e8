//! Verification of solved games: exact evaluation over the reachable
//! belief tree, seeded Monte Carlo simulation, and one-shot deviation
//! checks for both players.

mod deviation;
mod simulate;
mod tree;

pub use deviation::{one_shot_deviation_check, DeviationReport, Player, ProbeSpec, Violation};
pub use simulate::{simulate, SimulationReport};
pub use tree::{exact_value, BeliefChild, BeliefNode, BeliefTree, DEFAULT_NODE_CAP};

//! Solver and verification harness for finite-horizon signal picking games.
//!
//! A principal who cannot observe the state of a controlled Markov chain
//! publicly commits, stage by stage, to an experiment about the current
//! state; a receiver sees the experiment and its outcome and picks an action
//! that drives the chain. Both players have long-term payoffs.
//!
//! The crate computes equilibria in canonical-belief-based strategies by
//! backward induction over the public belief simplex. Each stage builds the
//! receiver's piecewise-linear action values, resolves ties in favour of the
//! principal, and takes the concave closure of the principal's value through
//! an explicit triangulation of the simplex. The resulting triangulation is
//! the principal's strategy: at any belief, the experiment splits the belief
//! into the vertices of the simplex that contains it.
//!
//! Modules:
//!
//! * [`geometry`]: simplex points, triangulations, barycentric measures,
//!   pullbacks of interpolants, and the concave-closure construction
//!   ([`geometry::argcav`]).
//! * [`game`]: game specifications, experiments and belief kinematics.
//! * [`solver`]: the stage backup and full backward induction.
//! * [`strategy`]: executable principal/receiver policies.
//! * [`evaluator`]: exact belief-tree evaluation, Monte Carlo simulation,
//!   and one-shot deviation checks.
//! * [`builtin`]: the quickest-detection and detector games plus a random
//!   small-game generator.
//!
//! ```
//! use signal_picking::{builtin, solver};
//!
//! let game = builtin::quickest_detection(0.2, 0.1, 3).unwrap();
//! let solution = solver::solve(&game).unwrap();
//! let last = solution.stage(3);
//! assert_eq!(last.triangulation().vertices().len(), 3);
//! ```

pub mod builtin;
pub mod error;
pub mod evaluator;
pub mod game;
pub mod geometry;
pub mod solver;
pub mod strategy;

pub use error::{Error, Result};

/// Tolerance for geometric membership and point deduplication.
pub const EPS_GEOM: f64 = 1e-12;

/// Tolerance for membership in an argmax set of payoffs.
pub const EPS_TIE: f64 = 1e-9;

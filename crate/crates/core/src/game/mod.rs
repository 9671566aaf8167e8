//! Game specifications and belief kinematics.

mod belief;
mod spec;

pub use belief::{
    bayes_update, induced_distribution, push_forward, split_experiment, transition_map, Belief, Experiment,
};
pub use spec::{validate_spec, GameSpec, SpecReport, Stage};

//! Discrete games: specs, the path tree, policies and cost evaluation.

mod model;
mod policy;
mod spec;
mod tree;

pub use model::{truncate_game, Game};
pub use policy::{JointSpace, Policy, PolicyClass, StoppingTime};
pub use spec::{Flags, GameSpec, Locus, TransitionKey};
pub use tree::{NodeId, PathTree};

/// Builds the path tree of a validated spec.
pub fn build_path_tree(spec: &GameSpec) -> crate::Result<PathTree> {
    spec.validate()?;
    PathTree::new(&spec.state_counts())
}

use alloc::vec;
use alloc::vec::Vec;

use super::tree::{NodeId, PathTree};
use crate::{Error, Result};

/// Mixed-radix numbering of joint actions, last player fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl JointSpace {
    pub fn new(sizes: &[usize]) -> Self {
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Self {
            sizes: sizes.to_vec(),
            strides,
            total: sizes.iter().product(),
        }
    }

    pub fn players(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, player: usize) -> usize {
        self.sizes[player]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of joint actions.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn encode(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn decode(&self, joint: usize) -> Vec<usize> {
        (0..self.players()).map(|i| self.action(joint, i)).collect()
    }

    pub fn action(&self, joint: usize, player: usize) -> usize {
        joint / self.strides[player] % self.sizes[player]
    }

    /// `joint` with the given player's action replaced.
    pub fn with_action(&self, joint: usize, player: usize, action: usize) -> usize {
        joint - self.action(joint, player) * self.strides[player] + action * self.strides[player]
    }

    /// Index of the other players' actions in `0..total / size(player)`.
    pub fn others_index(&self, joint: usize, player: usize) -> usize {
        let stride = self.strides[player];
        joint / (stride * self.sizes[player]) * stride + joint % stride
    }

    /// Whether every player has the same number of actions.
    pub fn is_square(&self) -> bool {
        self.sizes.windows(2).all(|w| w[0] == w[1])
    }

    /// The profile where every player plays `action`.
    pub fn diagonal(&self, action: usize) -> usize {
        self.strides.iter().map(|s| action * s).sum()
    }

    pub fn is_diagonal(&self, joint: usize) -> bool {
        let first = self.action(joint, 0);
        (1..self.players()).all(|i| self.action(joint, i) == first)
    }
}

/// Which policies a computation ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolicyClass {
    /// Actions may depend on the whole observed prefix.
    PathDependent,
    /// Actions depend on the current time and state only. Deviations are
    /// restricted to the same class.
    StateDependent,
    /// All players use the same path-dependent policy. Deviations are
    /// unrestricted.
    Symmetric,
}

impl PolicyClass {
    pub fn name(self) -> &'static str {
        match self {
            Self::PathDependent => "path_dependent",
            Self::StateDependent => "state_dependent",
            Self::Symmetric => "symmetric",
        }
    }
}

/// A joint closed-loop policy: one joint action index per tree node.
///
/// Leaves carry an unused entry so that the table is indexed by [`NodeId`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Policy {
    class: PolicyClass,
    actions: Vec<usize>,
}

impl Policy {
    /// Checks the table against the class invariants.
    pub fn new(tree: &PathTree, joint: &JointSpace, class: PolicyClass, actions: Vec<usize>) -> Result<Self> {
        if actions.len() != tree.node_count() {
            return Err(Error::InvalidArgument("policy table does not cover the tree".into()));
        }
        if actions.iter().any(|&a| a >= joint.total()) {
            return Err(Error::InvalidArgument("joint action index out of range".into()));
        }
        let policy = Self { class, actions };
        match class {
            PolicyClass::PathDependent => {}
            PolicyClass::StateDependent => {
                if !policy.is_state_dependent(tree) {
                    return Err(Error::InvalidArgument("policy is not state dependent".into()));
                }
            }
            PolicyClass::Symmetric => {
                let internal = (0..tree.node_count()).filter(|&n| !tree.is_leaf(n));
                if !joint.is_square() || internal.clone().any(|n| !joint.is_diagonal(policy.actions[n])) {
                    return Err(Error::InvalidArgument("policy is not symmetric".into()));
                }
            }
        }
        Ok(policy)
    }

    /// The policy playing joint action 0 everywhere.
    pub fn constant(tree: &PathTree, class: PolicyClass) -> Self {
        Self {
            class,
            actions: vec![0; tree.node_count()],
        }
    }

    /// Builds without checking; callers guarantee the class invariant.
    pub(crate) fn from_table(class: PolicyClass, actions: Vec<usize>) -> Self {
        Self { class, actions }
    }

    pub fn class(&self) -> PolicyClass {
        self.class
    }

    pub fn joint_action(&self, node: NodeId) -> usize {
        self.actions[node]
    }

    pub fn table(&self) -> &[usize] {
        &self.actions
    }

    pub fn with_class(mut self, class: PolicyClass) -> Self {
        self.class = class;
        self
    }

    /// Replaces one player's actions with `deviation[node]` at every node.
    pub fn deviate(&self, joint: &JointSpace, player: usize, deviation: &[usize]) -> Self {
        let actions = self
            .actions
            .iter()
            .zip(deviation)
            .map(|(&a, &d)| joint.with_action(a, player, d))
            .collect();
        Self {
            class: PolicyClass::PathDependent,
            actions,
        }
    }

    pub fn set(&mut self, node: NodeId, joint_action: usize) {
        self.actions[node] = joint_action;
    }

    fn is_state_dependent(&self, tree: &PathTree) -> bool {
        (0..tree.horizon()).all(|t| {
            let mut seen = vec![None; tree.state_count(t)];
            tree.nodes_at(t).all(|n| {
                let slot = &mut seen[tree.state(n)];
                *slot.get_or_insert(self.actions[n]) == self.actions[n]
            })
        })
    }
}

/// A stopping time given by explicit stop flags on prefixes.
///
/// `tau(x)` is the first time along `x` whose prefix is flagged; leaves are
/// always flagged, so `tau <= T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingTime {
    stop: Vec<bool>,
}

impl StoppingTime {
    pub fn from_flags(tree: &PathTree, mut stop: Vec<bool>) -> Result<Self> {
        if stop.len() != tree.node_count() {
            return Err(Error::InvalidArgument("stop flags do not cover the tree".into()));
        }
        for leaf in tree.paths() {
            stop[leaf] = true;
        }
        Ok(Self { stop })
    }

    /// `tau = t` on every path (and `T` if `t > T`).
    pub fn constant(tree: &PathTree, t: usize) -> Self {
        let stop = (0..tree.node_count())
            .map(|n| tree.time(n) == t || tree.is_leaf(n))
            .collect();
        Self { stop }
    }

    /// First time at or after `after` at which `hit(time, state)` holds.
    pub fn hitting(tree: &PathTree, after: usize, hit: impl Fn(usize, usize) -> bool) -> Self {
        let stop = (0..tree.node_count())
            .map(|n| tree.is_leaf(n) || (tree.time(n) >= after && hit(tree.time(n), tree.state(n))))
            .collect();
        Self { stop }
    }

    pub fn stops_at(&self, node: NodeId) -> bool {
        self.stop[node]
    }

    /// `tau` evaluated on the path ending at `leaf`.
    pub fn tau(&self, tree: &PathTree, leaf: NodeId) -> usize {
        (0..=tree.horizon())
            .find(|&t| self.stop[tree.ancestor_at(leaf, t)])
            .unwrap_or(tree.horizon())
    }

    /// The stopped prefixes first reached strictly after `from`, in id order.
    /// Empty if `from` itself is stopped.
    pub fn frontier(&self, tree: &PathTree, from: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        if self.stop[from] {
            return out;
        }
        let mut open = vec![from];
        while let Some(node) = open.pop() {
            for child in tree.children(node).rev() {
                if self.stop[child] {
                    out.push(child);
                } else {
                    open.push(child);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

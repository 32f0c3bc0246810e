use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// Index of a prefix node in a [`PathTree`].
pub type NodeId = usize;

/// Every prefix `(x_0, ..., x_t)` of every path, numbered time by time.
///
/// Nodes at time `t` occupy a contiguous id range and are ordered
/// lexicographically by their state indices, so the children of a node and
/// the descendants of a node at any later time are contiguous ranges too.
/// Two paths share the node at time `t` exactly when they agree on
/// coordinates `0..=t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTree {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    counts: Vec<usize>,
    time_of: Vec<u16>,
}

impl PathTree {
    /// Builds the tree for per-time state counts `sizes[0..=T]`.
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidSpec("horizon must be at least one period".into()));
        }
        if let Some(t) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidSpec(alloc::format!("state set at time {t} is empty")));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut counts = Vec::with_capacity(sizes.len());
        let mut total = 0usize;
        let mut count = 1usize;
        for &size in sizes {
            count = count
                .checked_mul(size)
                .filter(|c| *c <= 1 << 24)
                .ok_or_else(|| Error::InvalidSpec("path tree too large".into()))?;
            offsets.push(total);
            counts.push(count);
            total += count;
        }
        let mut time_of = Vec::with_capacity(total);
        for (t, &c) in counts.iter().enumerate() {
            time_of.extend(core::iter::repeat_n(t as u16, c));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            offsets,
            counts,
            time_of,
        })
    }

    pub fn horizon(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn state_count(&self, t: usize) -> usize {
        self.sizes[t]
    }

    pub fn node_count(&self) -> usize {
        self.time_of.len()
    }

    pub fn root_count(&self) -> usize {
        self.counts[0]
    }

    /// Number of prefixes at time `t`.
    pub fn count_at(&self, t: usize) -> usize {
        self.counts[t]
    }

    pub fn nodes_at(&self, t: usize) -> Range<NodeId> {
        self.offsets[t]..self.offsets[t] + self.counts[t]
    }

    /// Complete paths, i.e. the sample space.
    pub fn paths(&self) -> Range<NodeId> {
        self.nodes_at(self.horizon())
    }

    pub fn path_count(&self) -> usize {
        self.counts[self.horizon()]
    }

    pub fn time(&self, node: NodeId) -> usize {
        self.time_of[node] as usize
    }

    fn local(&self, node: NodeId) -> usize {
        node - self.offsets[self.time(node)]
    }

    /// Current state `x_t` of the prefix.
    pub fn state(&self, node: NodeId) -> usize {
        self.local(node) % self.sizes[self.time(node)]
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        self.time(node) == self.horizon()
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        let t = self.time(node);
        (t > 0).then(|| self.offsets[t - 1] + self.local(node) / self.sizes[t])
    }

    /// Successor prefixes, one per state of `S_{t+1}`, in state order.
    pub fn children(&self, node: NodeId) -> Range<NodeId> {
        let t = self.time(node);
        if t == self.horizon() {
            return node..node;
        }
        let first = self.offsets[t + 1] + self.local(node) * self.sizes[t + 1];
        first..first + self.sizes[t + 1]
    }

    /// Descendants of `node` at the later time `t` (the node itself if `t`
    /// is its own time).
    pub fn descendants_at(&self, node: NodeId, t: usize) -> Range<NodeId> {
        let t0 = self.time(node);
        debug_assert!(t >= t0);
        let width: usize = self.sizes[t0 + 1..=t].iter().product();
        let first = self.offsets[t] + self.local(node) * width;
        first..first + width
    }

    /// The ancestor of `node` at time `t <= time(node)`.
    pub fn ancestor_at(&self, node: NodeId, t: usize) -> NodeId {
        let t0 = self.time(node);
        debug_assert!(t <= t0);
        let width: usize = self.sizes[t + 1..=t0].iter().product();
        self.offsets[t] + self.local(node) / width
    }

    /// All nodes of the subtree rooted at `node`, time by time.
    pub fn subtree(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        (self.time(node)..=self.horizon()).flat_map(move |t| self.descendants_at(node, t))
    }

    pub fn is_descendant(&self, node: NodeId, ancestor: NodeId) -> bool {
        self.time(node) >= self.time(ancestor) && self.ancestor_at(node, self.time(ancestor)) == ancestor
    }

    /// State indices `(x_0, ..., x_t)` of the prefix.
    pub fn prefix(&self, node: NodeId) -> Vec<usize> {
        let t = self.time(node);
        (0..=t).map(|s| self.state(self.ancestor_at(node, s))).collect()
    }

    /// Node of the given prefix, if every state index is in range.
    pub fn node_of(&self, prefix: &[usize]) -> Option<NodeId> {
        if prefix.is_empty() || prefix.len() > self.sizes.len() {
            return None;
        }
        let mut local = 0usize;
        for (t, &s) in prefix.iter().enumerate() {
            if s >= self.sizes[t] {
                return None;
            }
            local = local * self.sizes[t] + s;
        }
        Some(self.offsets[prefix.len() - 1] + local)
    }

    /// The relation `x =_t x'` on two nodes of time at least `t`.
    pub fn agree_until(&self, a: NodeId, b: NodeId, t: usize) -> bool {
        self.ancestor_at(a, t) == self.ancestor_at(b, t)
    }
}

//! Decision keys of a policy class below an evaluation node, and the
//! odometer that walks every assignment of actions to them.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::game::{Game, NodeId, PolicyClass};
use crate::rational::Rational;
use crate::{Error, Result};

/// The nodes whose actions can change a cost from `from`, grouped by the
/// decisions a policy of `class` makes there.
///
/// Unreachable and inert nodes are left out; their actions never matter.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub class: PolicyClass,
    /// Relevant nodes of each key.
    pub keys: Vec<Vec<NodeId>>,
    /// Nodes written when a key's choice changes. For the state class this
    /// is every non-leaf node with the key's time and state, so that
    /// materialized policies stay state dependent on the whole tree.
    pub fill: Vec<Vec<NodeId>>,
    /// Choices per key: joint actions, or common actions when symmetric.
    pub radix: usize,
    /// `key_of[node]` for relevant nodes.
    pub key_of: Vec<Option<usize>>,
}

impl Layout {
    pub fn new(game: &Game, from: NodeId, class: PolicyClass) -> Result<Self> {
        let tree = game.tree();
        let joint = game.joint();
        let relevant: Vec<NodeId> = game
            .reachable_nodes(from)
            .into_iter()
            .filter(|&n| !game.is_inert(n))
            .collect();
        let mut key_of = vec![None; tree.node_count()];
        let (keys, fill, radix) = match class {
            PolicyClass::PathDependent | PolicyClass::Symmetric => {
                let radix = if class == PolicyClass::Symmetric {
                    if !joint.is_square() {
                        return Err(Error::InvalidArgument(
                            "symmetric policies need equal action sets".into(),
                        ));
                    }
                    joint.size(0)
                } else {
                    joint.total()
                };
                for (k, &n) in relevant.iter().enumerate() {
                    key_of[n] = Some(k);
                }
                let keys: Vec<Vec<NodeId>> = relevant.iter().map(|&n| vec![n]).collect();
                (keys.clone(), keys, radix)
            }
            PolicyClass::StateDependent => {
                let mut groups: BTreeMap<(usize, usize), Vec<NodeId>> = BTreeMap::new();
                for &n in &relevant {
                    groups.entry((tree.time(n), tree.state(n))).or_default().push(n);
                }
                let mut keys = Vec::new();
                let mut fill = Vec::new();
                for (k, (&(t, s), nodes)) in groups.iter().enumerate() {
                    for &n in nodes {
                        key_of[n] = Some(k);
                    }
                    keys.push(nodes.clone());
                    fill.push(tree.nodes_at(t).filter(|&n| tree.state(n) == s).collect());
                }
                (keys, fill, joint.total())
            }
        };
        Ok(Self {
            class,
            keys,
            fill,
            radix,
            key_of,
        })
    }

    /// Number of assignments, saturating.
    pub fn count(&self) -> u128 {
        let mut total: u128 = 1;
        for _ in &self.keys {
            total = total.saturating_mul(self.radix as u128);
        }
        total
    }

    pub fn check_cap(&self, cap: u128) -> Result<u128> {
        let count = self.count();
        if count > cap {
            return Err(Error::CapExceeded {
                what: "policy enumeration",
                required: count,
                cap,
            });
        }
        Ok(count)
    }

    /// Joint action index written for choice `c`.
    pub fn joint_of(&self, game: &Game, c: usize) -> usize {
        match self.class {
            PolicyClass::Symmetric => game.joint().diagonal(c),
            _ => c,
        }
    }

    /// Whether, in the state class, all relevant nodes of each key have
    /// identical continuation games. Then the best state-dependent
    /// deviation is the unrestricted one, found by backward induction.
    pub fn markov(&self, game: &Game) -> bool {
        let mut ids = Signatures::default();
        let sig: BTreeMap<NodeId, usize> = self
            .keys
            .iter()
            .flatten()
            .map(|&n| (n, ids.of(game, n)))
            .collect();
        self.keys.iter().all(|nodes| nodes.iter().all(|n| sig[n] == sig[&nodes[0]]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Terminal(Vec<Rational>),
    Inner {
        state: usize,
        kernel: Vec<Vec<Rational>>,
        running: Vec<Vec<Rational>>,
        children: Vec<usize>,
    },
}

/// Canonical ids of continuation games, shared across nodes.
#[derive(Default)]
struct Signatures {
    table: BTreeMap<Shape, usize>,
    memo: BTreeMap<NodeId, usize>,
}

impl Signatures {
    fn of(&mut self, game: &Game, node: NodeId) -> usize {
        if let Some(&id) = self.memo.get(&node) {
            return id;
        }
        let shape = match game.payoff(node) {
            Some(g) => Shape::Terminal(g.to_vec()),
            None => {
                let tree = game.tree();
                let children = tree.children(node).map(|c| self.of(game, c)).collect();
                let joint = game.joint();
                Shape::Inner {
                    state: tree.state(node),
                    kernel: (0..joint.total()).map(|j| game.kernel(node, j).to_vec()).collect(),
                    running: (0..joint.players())
                        .map(|i| (0..joint.size(i)).map(|a| *game.running_cost(node, i, a)).collect())
                        .collect(),
                    children,
                }
            }
        };
        let next = self.table.len();
        let id = *self.table.entry(shape).or_insert(next);
        self.memo.insert(node, id);
        id
    }
}

/// Walks every assignment of a layout, keeping a policy table in sync.
pub(crate) struct Odometer<'a> {
    layout: &'a Layout,
    pub digits: Vec<usize>,
    pub table: Vec<usize>,
    started: bool,
}

impl<'a> Odometer<'a> {
    pub fn new(game: &Game, layout: &'a Layout) -> Self {
        let mut table = vec![0; game.tree().node_count()];
        let zero = layout.joint_of(game, 0);
        for nodes in &layout.fill {
            for &n in nodes {
                table[n] = zero;
            }
        }
        Self {
            layout,
            digits: vec![0; layout.keys.len()],
            table,
            started: false,
        }
    }

    /// Advances to the next assignment; false once all have been visited.
    pub fn advance(&mut self, game: &Game) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        for k in 0..self.digits.len() {
            self.digits[k] += 1;
            let wrapped = self.digits[k] == self.layout.radix;
            if wrapped {
                self.digits[k] = 0;
            }
            let joint = self.layout.joint_of(game, self.digits[k]);
            for &n in &self.layout.fill[k] {
                self.table[n] = joint;
            }
            if !wrapped {
                return true;
            }
        }
        false
    }
}

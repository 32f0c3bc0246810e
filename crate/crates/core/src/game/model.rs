use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::policy::{JointSpace, Policy, StoppingTime};
use super::spec::{GameSpec, Locus};
use super::tree::{NodeId, PathTree};
use crate::rational::Rational;
use crate::{Error, Result};

/// A validated game compiled onto its path tree.
///
/// Every table is resolved per node, so evaluation never looks at the spec
/// again. A node carrying a payoff is terminal: the leaves, plus the stopped
/// prefixes of a truncated game.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    tree: PathTree,
    joint: JointSpace,
    /// `kernel[node][joint][k]`: probability of the `k`-th child.
    kernel: Vec<Vec<Vec<Rational>>>,
    /// `running[node][player][own action]`.
    running: Vec<Vec<Vec<Rational>>>,
    payoff: Vec<Option<Vec<Rational>>>,
    inert: Vec<bool>,
    state_dependent: bool,
}

impl Game {
    /// Validates `spec` and resolves every table entry on the path tree.
    pub fn new(spec: &GameSpec) -> Result<Self> {
        spec.validate()?;
        let tree = PathTree::new(&spec.state_counts())?;
        if tree.node_count() > 1 << 20 {
            return Err(Error::InvalidSpec(format!(
                "path tree has {} prefixes, more than this engine holds",
                tree.node_count()
            )));
        }
        let joint = JointSpace::new(&spec.action_counts());
        let players = joint.players();
        let n = tree.node_count();
        let mut kernel = vec![Vec::new(); n];
        let mut running = vec![Vec::new(); n];
        let mut payoff = vec![None; n];

        for node in 0..n {
            let prefix = tree.prefix(node);
            if tree.is_leaf(node) {
                let g = spec
                    .resolve_terminal_cost(&prefix)
                    .cloned()
                    .unwrap_or_else(|| vec![Rational::zero(); players]);
                payoff[node] = Some(g);
                continue;
            }
            let next = tree.children(node).len();
            let mut rows = Vec::with_capacity(joint.total());
            for j in 0..joint.total() {
                let actions = joint.decode(j);
                let row = match spec.resolve_transition(&prefix, &actions) {
                    Some(row) => row.clone(),
                    None if next == 1 => vec![Rational::one()],
                    None => {
                        return Err(Error::InvalidSpec(format!(
                            "no transition for prefix {prefix:?} and joint action {actions:?}"
                        )))
                    }
                };
                rows.push(row);
            }
            kernel[node] = rows;
            running[node] = spec.resolve_running_cost(&prefix).cloned().unwrap_or_else(|| {
                (0..players)
                    .map(|i| vec![Rational::zero(); joint.size(i)])
                    .collect()
            });
        }

        let mut game = Self {
            tree,
            joint,
            kernel,
            running,
            payoff,
            inert: Vec::new(),
            state_dependent: spec.flags.state_dependent,
        };
        if spec.flags.state_dependent {
            game.check_state_dependent()?;
        }
        if spec.flags.positive_kernel && !game.kernel_positive_below(None) {
            return Err(Error::KernelNotPositive("some resolved transition has a zero entry".into()));
        }
        game.refresh_inert();
        Ok(game)
    }

    pub fn tree(&self) -> &PathTree {
        &self.tree
    }

    pub fn joint(&self) -> &JointSpace {
        &self.joint
    }

    pub fn players(&self) -> usize {
        self.joint.players()
    }

    /// Whether the spec declared (and compilation confirmed) state dependence.
    pub fn is_state_dependent(&self) -> bool {
        self.state_dependent
    }

    /// Transition probabilities to the children of `node`, in child order.
    pub fn kernel(&self, node: NodeId, joint: usize) -> &[Rational] {
        &self.kernel[node][joint]
    }

    pub fn running_cost(&self, node: NodeId, player: usize, action: usize) -> &Rational {
        &self.running[node][player][action]
    }

    /// The payoff vector at a terminal node.
    pub fn payoff(&self, node: NodeId) -> Option<&[Rational]> {
        self.payoff[node].as_deref()
    }

    pub fn is_terminal(&self, node: NodeId) -> bool {
        self.payoff[node].is_some()
    }

    /// A non-terminal node where no action changes the kernel or any running
    /// cost. Actions there never matter, so enumerations skip such nodes.
    pub fn is_inert(&self, node: NodeId) -> bool {
        self.inert[node]
    }

    /// Whether every transition in the subtree of `from` (the whole tree when
    /// `None`) that lies above the terminal nodes is strictly positive.
    pub fn kernel_positive_below(&self, from: Option<NodeId>) -> bool {
        let mut check = |node: NodeId| {
            self.is_terminal(node) || self.kernel[node].iter().flatten().all(|p| *p > Rational::zero())
        };
        match from {
            Some(root) => self.live_nodes(root).into_iter().all(&mut check),
            None => (0..self.tree.node_count()).all(check),
        }
    }

    /// Non-terminal nodes of the subtree of `from` not cut off by a terminal
    /// ancestor, in id order.
    pub fn live_nodes(&self, from: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut open = vec![from];
        while let Some(node) = open.pop() {
            if self.is_terminal(node) {
                continue;
            }
            out.push(node);
            open.extend(self.tree.children(node));
        }
        out.sort_unstable();
        out
    }

    /// Live nodes that some policy reaches with positive probability from
    /// `from`, in id order.
    pub fn reachable_nodes(&self, from: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut open = vec![from];
        while let Some(node) = open.pop() {
            if self.is_terminal(node) {
                continue;
            }
            out.push(node);
            for (k, child) in self.tree.children(node).enumerate() {
                if self.kernel[node].iter().any(|row| !row[k].is_zero()) {
                    open.push(child);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Terminal nodes first reached below `from` with positive probability
    /// under some policy, in id order.
    pub fn reachable_terminals(&self, from: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        if self.is_terminal(from) {
            out.push(from);
            return out;
        }
        for node in self.reachable_nodes(from) {
            for (k, child) in self.tree.children(node).enumerate() {
                if self.is_terminal(child) && self.kernel[node].iter().any(|row| !row[k].is_zero()) {
                    out.push(child);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Distribution of the full path given the prefix `node` and `policy`,
    /// indexed by leaf position in [`PathTree::paths`]. Stopping is ignored:
    /// the original kernel drives the path to the horizon.
    pub fn path_measure(&self, node: NodeId, policy: &Policy) -> Vec<Rational> {
        let paths = self.tree.paths();
        let mut mass = vec![Rational::zero(); paths.len()];
        let mut open = vec![(node, Rational::one())];
        while let Some((n, p)) = open.pop() {
            if self.tree.is_leaf(n) {
                mass[n - paths.start] = p;
                continue;
            }
            let row = &self.kernel[n][policy.joint_action(n)];
            for (child, q) in self.tree.children(n).zip(row) {
                if !q.is_zero() {
                    open.push((child, p * q));
                }
            }
        }
        mass
    }

    /// Expected total cost vector from `node` under `policy`.
    pub fn cost_j(&self, node: NodeId, policy: &Policy) -> Vec<Rational> {
        self.cost_with(node, &|n| policy.joint_action(n))
    }

    /// [`Self::cost_j`] with the joint action given by a closure.
    pub fn cost_with(&self, node: NodeId, action: &dyn Fn(NodeId) -> usize) -> Vec<Rational> {
        if let Some(g) = &self.payoff[node] {
            return g.clone();
        }
        let joint = action(node);
        let mut total: Vec<Rational> = (0..self.players())
            .map(|i| self.running[node][i][self.joint.action(joint, i)])
            .collect();
        for (child, q) in self.tree.children(node).zip(&self.kernel[node][joint]) {
            if q.is_zero() {
                continue;
            }
            let sub = self.cost_with(child, action);
            for (acc, v) in total.iter_mut().zip(sub) {
                *acc += *q * v;
            }
        }
        total
    }

    /// One-step cost vector at `node` for joint action `joint` when the
    /// children's continuation values are `next[k]`.
    pub fn one_step_cost(&self, node: NodeId, joint: usize, next: &[&[Rational]]) -> Vec<Rational> {
        let mut total: Vec<Rational> = (0..self.players())
            .map(|i| self.running[node][i][self.joint.action(joint, i)])
            .collect();
        for (q, value) in self.kernel[node][joint].iter().zip(next) {
            if q.is_zero() {
                continue;
            }
            for (acc, v) in total.iter_mut().zip(value.iter()) {
                *acc += *q * v;
            }
        }
        total
    }

    /// The game stopped at `tau` below `from` with terminal payoffs `psi`.
    ///
    /// Only the frontier of `from` is cut; the rest of the tree is unchanged.
    /// `psi` must cover every stopped prefix reachable from `from`;
    /// unreachable ones default to zero.
    pub fn truncated(&self, from: NodeId, tau: &StoppingTime, psi: &BTreeMap<NodeId, Vec<Rational>>) -> Result<Self> {
        if tau.stops_at(from) {
            return Err(Error::InvalidArgument("the stopping time must exceed the evaluation time".into()));
        }
        let mut game = self.clone();
        game.state_dependent = false;
        // Cut from the top so reachability is measured in the stopped game.
        let frontier = tau.frontier(&self.tree, from);
        for &node in &frontier {
            game.payoff[node] = Some(vec![Rational::zero(); self.players()]);
        }
        let reachable = game.reachable_terminals(from);
        for &node in &frontier {
            match psi.get(&node) {
                Some(value) if value.len() == self.players() => game.payoff[node] = Some(value.clone()),
                Some(_) => return Err(Error::InvalidArgument("payoff has the wrong dimension".into())),
                None if reachable.binary_search(&node).is_ok() => {
                    return Err(Error::MissingPayoff(format!("{:?}", self.tree.prefix(node))))
                }
                None => {}
            }
        }
        game.refresh_inert();
        Ok(game)
    }

    fn refresh_inert(&mut self) {
        self.inert = (0..self.tree.node_count())
            .map(|n| {
                !self.is_terminal(n)
                    && self.kernel[n].windows(2).all(|w| w[0] == w[1])
                    && self.running[n].iter().all(|costs| costs.windows(2).all(|w| w[0] == w[1]))
            })
            .collect();
    }

    fn check_state_dependent(&self) -> Result<()> {
        for t in 0..=self.tree.horizon() {
            let mut first: Vec<Option<NodeId>> = vec![None; self.tree.state_count(t)];
            for node in self.tree.nodes_at(t) {
                let seen = *first[self.tree.state(node)].get_or_insert(node);
                let same = self.kernel[seen] == self.kernel[node]
                    && self.running[seen] == self.running[node]
                    && self.payoff[seen] == self.payoff[node];
                if !same {
                    return Err(Error::InvalidSpec(format!(
                        "declared state dependent, but prefixes {:?} and {:?} differ",
                        self.tree.prefix(seen),
                        self.tree.prefix(node)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The truncated game written back as a spec: after each stopped prefix below
/// `from` the running costs vanish and every terminal cost equals the
/// prefix's payoff. The result is keyed by prefixes, so it is never flagged
/// state dependent.
pub fn truncate_game(
    spec: &GameSpec,
    tree: &PathTree,
    from: NodeId,
    tau: &StoppingTime,
    psi: &BTreeMap<NodeId, Vec<Rational>>,
) -> Result<GameSpec> {
    // Validates psi coverage the same way as the compiled route.
    let game = Game::new(spec)?;
    game.truncated(from, tau, psi)?;
    let mut out = spec.clone();
    out.flags.state_dependent = false;
    let players = spec.players();
    let zeros: Vec<Vec<Rational>> = spec
        .actions
        .iter()
        .map(|set| vec![Rational::zero(); set.len()])
        .collect();
    for node in tau.frontier(tree, from) {
        let value = psi
            .get(&node)
            .cloned()
            .unwrap_or_else(|| vec![Rational::zero(); players]);
        for t in tree.time(node)..tree.horizon() {
            for below in tree.descendants_at(node, t) {
                out.set_running_cost(t, Locus::Prefix(tree.prefix(below)), zeros.clone());
            }
        }
        for leaf in tree.descendants_at(node, tree.horizon()) {
            out.set_terminal_cost(Locus::Prefix(tree.prefix(leaf)), value.clone());
        }
    }
    Ok(out)
}

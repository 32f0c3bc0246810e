//! A central planner choosing among equilibria by a weighted sum of costs.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::equilibrium::{set_value_bruteforce, witnesses_bruteforce, Caps, EquilibriumRecord, ValueSet};
use crate::game::{Game, NodeId, Policy, PolicyClass};
use crate::rational::Rational;
use crate::{Error, Result};

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalarization {
    weights: Vec<Rational>,
}

impl Scalarization {
    /// Normalizes nonnegative weights with a positive sum.
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.iter().any(|w| *w < Rational::zero()) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        let total = weights.iter().fold(Rational::zero(), |acc, w| acc + w);
        if total.is_zero() {
            return Err(Error::InvalidArgument("weights must not all vanish".into()));
        }
        Ok(Self {
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    /// Equal weights for `players` players.
    pub fn uniform(players: usize) -> Self {
        Self {
            weights: vec![Rational::new(1, players as i128); players],
        }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn apply(&self, y: &[Rational]) -> Rational {
        self.weights
            .iter()
            .zip(y)
            .fold(Rational::zero(), |acc, (w, v)| acc + w * v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlannerOutcome {
    /// The set value is empty.
    NoEquilibrium,
    Optimum {
        value: Rational,
        /// Every point attaining the minimum, in lexicographic order.
        argmin: Vec<Vec<Rational>>,
    },
}

impl PlannerOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Self::NoEquilibrium => None,
            Self::Optimum { value, .. } => Some(value),
        }
    }
}

/// Minimum of the weighted cost over a set value and its minimizers.
pub fn planner_optimum(vs: &ValueSet, lam: &Scalarization) -> Result<PlannerOutcome> {
    if vs.points().iter().any(|p| p.len() != lam.weights.len()) {
        return Err(Error::InvalidArgument("weights and points differ in dimension".into()));
    }
    let Some(value) = vs.points().iter().map(|p| lam.apply(p)).min() else {
        return Ok(PlannerOutcome::NoEquilibrium);
    };
    let argmin = vs
        .points()
        .iter()
        .filter(|p| lam.apply(p) == value)
        .cloned()
        .collect();
    Ok(PlannerOutcome::Optimum { value, argmin })
}

/// One prefix visited by the time-0 selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEntry {
    pub node: NodeId,
    pub time: usize,
    pub prefix: Vec<usize>,
    /// Planner optimum over the set value at this prefix.
    pub planner: PlannerOutcome,
    /// Value of the time-0 selection from this prefix on.
    pub continuation: Vec<Rational>,
    pub continuation_score: Rational,
    /// Whether the continuation still attains the planner optimum here.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub root: NodeId,
    pub optimum: PlannerOutcome,
    /// The equilibrium implementing the first optimal point.
    pub selected: Option<EquilibriumRecord>,
    /// Non-terminal prefixes after the root that the selection reaches with
    /// positive probability, in id order.
    pub entries: Vec<ProbeEntry>,
    /// Index into `entries` of the first prefix where the selection is no
    /// longer planner optimal.
    pub first_inconsistency: Option<usize>,
    /// Minimum weighted cost over all policies, equilibrium or not.
    pub dictatorship: Rational,
}

/// Picks a planner-optimal equilibrium at `root` and checks, at every later
/// prefix it reaches, whether its continuation value is still optimal for
/// the planner there. Comparisons are between values, not policies.
pub fn time_inconsistency_probe(game: &Game, root: NodeId, lam: &Scalarization, caps: &Caps) -> Result<ProbeReport> {
    let zero = Rational::zero();
    let (values, witnesses) = witnesses_bruteforce(game, root, &zero, PolicyClass::PathDependent, caps)?;
    let optimum = planner_optimum(&values, lam)?;
    let dictatorship = dictatorship_value(game, root, lam);
    let selected = match &optimum {
        PlannerOutcome::NoEquilibrium => None,
        PlannerOutcome::Optimum { argmin, .. } => witnesses.into_iter().find(|r| r.value == argmin[0]),
    };
    let mut entries = Vec::new();
    if let Some(record) = &selected {
        for node in on_path(game, root, &record.policy) {
            if node == root {
                continue;
            }
            let here = set_value_bruteforce(game, node, &zero, PolicyClass::PathDependent, caps)?;
            let planner = planner_optimum(&here, lam)?;
            let continuation = game.cost_j(node, &record.policy);
            let continuation_score = lam.apply(&continuation);
            let consistent = planner.value() == Some(&continuation_score);
            entries.push(ProbeEntry {
                node,
                time: game.tree().time(node),
                prefix: game.tree().prefix(node),
                planner,
                continuation,
                continuation_score,
                consistent,
            });
        }
    }
    let first_inconsistency = entries.iter().position(|e| !e.consistent);
    Ok(ProbeReport {
        root,
        optimum,
        selected,
        entries,
        first_inconsistency,
        dictatorship,
    })
}

fn on_path(game: &Game, root: NodeId, policy: &Policy) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut open = vec![root];
    while let Some(node) = open.pop() {
        if game.is_terminal(node) {
            continue;
        }
        out.push(node);
        let row = game.kernel(node, policy.joint_action(node));
        for (child, q) in game.tree().children(node).zip(row) {
            if !q.is_zero() {
                open.push(child);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `min` over all policies of the weighted cost, by backward induction over
/// joint actions.
pub fn dictatorship_value(game: &Game, node: NodeId, lam: &Scalarization) -> Rational {
    if let Some(g) = game.payoff(node) {
        return lam.apply(g);
    }
    let joint = game.joint();
    let next: Vec<Rational> = game
        .tree()
        .children(node)
        .map(|c| dictatorship_value(game, c, lam))
        .collect();
    (0..joint.total())
        .map(|j| {
            let running: Vec<Rational> = (0..joint.players())
                .map(|i| *game.running_cost(node, i, joint.action(j, i)))
                .collect();
            game.kernel(node, j)
                .iter()
                .zip(&next)
                .fold(lam.apply(&running), |acc, (q, v)| acc + q * v)
        })
        .min()
        .expect("joint actions exist")
}

//! Enumeration oracles shared by the integration tests. Nothing here calls
//! the engines under test: costs come from `Game::cost_with`, everything
//! else is plain enumeration.

#![allow(dead_code)]

use std::collections::BTreeSet;

use setvalue_core::game::{Game, NodeId};
use setvalue_core::Rational;

/// Calls `visit` with every assignment of `base` digits to `slots` positions.
pub fn for_each_table(slots: usize, base: usize, mut visit: impl FnMut(&[usize])) {
    let mut digits = vec![0; slots];
    loop {
        visit(&digits);
        let mut k = 0;
        while k < slots {
            digits[k] += 1;
            if digits[k] < base {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == slots {
            return;
        }
    }
}

/// Internal nodes of the subtree at `from`.
pub fn decision_nodes(game: &Game, from: NodeId) -> Vec<NodeId> {
    let tree = game.tree();
    tree.subtree(from).filter(|&n| !tree.is_leaf(n)).collect()
}

/// Keys a node either by itself or by its (time, state).
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Keying {
    Path,
    State,
}

fn slots(game: &Game, from: NodeId, keying: Keying) -> (Vec<NodeId>, Vec<usize>) {
    let tree = game.tree();
    let nodes = decision_nodes(game, from);
    let mut keys: Vec<(usize, usize)> = Vec::new();
    let slot = nodes
        .iter()
        .map(|&n| {
            let key = match keying {
                Keying::Path => (n, 0),
                Keying::State => (tree.time(n), tree.state(n)),
            };
            keys.iter().position(|k| *k == key).unwrap_or_else(|| {
                keys.push(key);
                keys.len() - 1
            })
        })
        .collect();
    (nodes, slot)
}

/// Values of all eps-Nash policies keyed by `keying`, where each player's
/// deviations are keyed the same way and enumerated exhaustively.
pub fn set_value_oracle(game: &Game, from: NodeId, eps: &Rational, keying: Keying) -> BTreeSet<Vec<Rational>> {
    let joint = game.joint();
    let (nodes, slot) = slots(game, from, keying);
    let count = slot.iter().max().map_or(0, |m| m + 1);
    let action_at = |table: &[usize], n: NodeId| nodes.iter().position(|&m| m == n).map_or(0, |k| table[slot[k]]);
    let mut out = BTreeSet::new();
    for_each_table(count, joint.total(), |table| {
        let value = game.cost_with(from, &|n| action_at(table, n));
        let stable = (0..game.players()).all(|i| {
            let mut best: Option<Rational> = None;
            for_each_table(count, joint.size(i), |own| {
                let deviated: Vec<usize> = table
                    .iter()
                    .zip(own)
                    .map(|(&j, &a)| joint.with_action(j, i, a))
                    .collect();
                let c = game.cost_with(from, &|n| action_at(&deviated, n))[i];
                best = Some(best.map_or(c, |b: Rational| b.min(c)));
            });
            value[i] <= best.unwrap() + eps
        });
        if stable {
            out.insert(value);
        }
    });
    out
}

/// Player `i`'s best path-dependent deviation cost against the joint table.
pub fn best_response_oracle(game: &Game, from: NodeId, table: &[usize], player: usize) -> Rational {
    let joint = game.joint();
    let nodes = decision_nodes(game, from);
    let mut best: Option<Rational> = None;
    for_each_table(nodes.len(), joint.size(player), |own| {
        let c = game.cost_with(from, &|n| {
            let j = table[n];
            nodes
                .iter()
                .position(|&m| m == n)
                .map_or(j, |k| joint.with_action(j, player, own[k]))
        })[player];
        best = Some(best.map_or(c, |b: Rational| b.min(c)));
    });
    best.unwrap()
}

pub fn points(vs: &setvalue_core::equilibrium::ValueSet) -> BTreeSet<Vec<Rational>> {
    vs.points().iter().cloned().collect()
}

//! Nash and epsilon-Nash equilibria and the set value.
//!
//! Equilibrium checks solve each player's best response as a single-player
//! decision problem with the other players frozen. Set values come either
//! from enumerating every policy of a class or from the one-step backward
//! recursion over continuation sets; on games with a strictly positive
//! kernel the two agree.

mod layout;
mod value_set;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::game::{Game, JointSpace, NodeId, Policy, PolicyClass};
use crate::rational::Rational;
use crate::{Error, Result};
use layout::{Layout, Odometer};

pub use value_set::{dominates, pareto_filter, Coord, ValueSet};

/// Enumeration limits. Exceeding one is an error, never a silent cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Joint policies visited by a brute-force enumeration.
    pub policies: u128,
    /// Continuation selections tried at one node of the recursion.
    pub selections: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            policies: 10_000_000,
            selections: 100_000,
        }
    }
}

/// An equilibrium with its value and each player's gain from deviating.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumRecord {
    pub policy: Policy,
    pub value: Vec<Rational>,
    /// `value[i]` minus player `i`'s best-response value; never negative.
    pub slack: Vec<Rational>,
}

/// Player `player`'s best response to `policy` from `node` over all
/// path-dependent deviations, by backward induction.
///
/// Returns the optimal cost and the deviating player's action at every node
/// (ties go to the lowest action; nodes outside the subtree keep the
/// policy's action).
pub fn best_response(game: &Game, node: NodeId, policy: &Policy, player: usize) -> (Rational, Vec<usize>) {
    let joint = game.joint();
    let mut own: Vec<usize> = policy.table().iter().map(|&j| joint.action(j, player)).collect();
    let value = induction(game, node, player, &|n| policy.joint_action(n), &mut own);
    (value, own)
}

fn induction(
    game: &Game,
    node: NodeId,
    player: usize,
    joint_at: &dyn Fn(NodeId) -> usize,
    own: &mut [usize],
) -> Rational {
    if let Some(g) = game.payoff(node) {
        return g[player];
    }
    let joint = game.joint();
    let next: Vec<Rational> = game
        .tree()
        .children(node)
        .map(|c| induction(game, c, player, joint_at, own))
        .collect();
    let base = joint_at(node);
    let mut best: Option<(Rational, usize)> = None;
    for a in 0..joint.size(player) {
        let j = joint.with_action(base, player, a);
        let mut v = *game.running_cost(node, player, a);
        for (q, w) in game.kernel(node, j).iter().zip(&next) {
            if !q.is_zero() {
                v += q * w;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, a));
        }
    }
    let (value, action) = best.expect("action sets are nonempty");
    own[node] = action;
    value
}

/// Best response restricted to the deviations allowed by `class`.
///
/// Symmetric and path-dependent equilibria face unrestricted deviations;
/// state-dependent ones only state-dependent deviations.
pub fn best_response_in(
    game: &Game,
    node: NodeId,
    policy: &Policy,
    player: usize,
    class: PolicyClass,
    caps: &Caps,
) -> Result<(Rational, Vec<usize>)> {
    if class != PolicyClass::StateDependent {
        return Ok(best_response(game, node, policy, player));
    }
    let layout = Layout::new(game, node, PolicyClass::StateDependent)?;
    state_best_response(game, node, &layout, policy.table(), player, caps)
}

fn state_best_response(
    game: &Game,
    node: NodeId,
    layout: &Layout,
    table: &[usize],
    player: usize,
    caps: &Caps,
) -> Result<(Rational, Vec<usize>)> {
    let joint = game.joint();
    let mut own: Vec<usize> = table.iter().map(|&j| joint.action(j, player)).collect();
    if layout.markov(game) {
        let value = induction(game, node, player, &|n| table[n], &mut own);
        // Identical continuation games give identical choices; copy them to
        // the whole key so the deviation itself is state dependent.
        for (nodes, fill) in layout.keys.iter().zip(&layout.fill) {
            let a = own[nodes[0]];
            for &n in fill {
                own[n] = a;
            }
        }
        return Ok((value, own));
    }
    let size = joint.size(player);
    let mut count: u128 = 1;
    for _ in &layout.keys {
        count = count.saturating_mul(size as u128);
    }
    if count > caps.policies {
        return Err(Error::CapExceeded {
            what: "state-dependent deviations",
            required: count,
            cap: caps.policies,
        });
    }
    let mut digits = vec![0usize; layout.keys.len()];
    let mut best: Option<(Rational, Vec<usize>)> = None;
    loop {
        let joint_at = |n: NodeId| match layout.key_of[n] {
            Some(k) => joint.with_action(table[n], player, digits[k]),
            None => table[n],
        };
        let v = game.cost_with(node, &joint_at)[player];
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, digits.clone()));
        }
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < size {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            break;
        }
    }
    let (value, choice) = best.expect("at least one deviation");
    for (k, fill) in layout.fill.iter().enumerate() {
        for &n in fill {
            own[n] = choice[k];
        }
    }
    Ok((value, own))
}

/// Whether `policy` is an `eps`-equilibrium of `class` at `node`, with the
/// slack vector `J_i - best response_i`.
///
/// A policy tagged with a narrower class may be checked as path dependent;
/// any other tag mismatch is an error.
pub fn is_equilibrium(
    game: &Game,
    node: NodeId,
    policy: &Policy,
    eps: &Rational,
    class: PolicyClass,
    caps: &Caps,
) -> Result<(bool, Vec<Rational>)> {
    if policy.class() != class && class != PolicyClass::PathDependent {
        return Err(Error::ClassMismatch {
            policy: policy.class().name(),
            requested: class.name(),
        });
    }
    let value = game.cost_j(node, policy);
    let mut slack = Vec::with_capacity(game.players());
    for (i, v) in value.iter().enumerate() {
        let (br, _) = best_response_in(game, node, policy, i, class, caps)?;
        slack.push(v - br);
    }
    Ok((slack.iter().all(|s| s <= eps), slack))
}

/// What a brute-force run keeps.
enum Keep {
    Values,
    FirstPerValue,
    All,
}

fn bruteforce(
    game: &Game,
    node: NodeId,
    eps: &Rational,
    class: PolicyClass,
    caps: &Caps,
    keep: Keep,
) -> Result<(ValueSet, Vec<EquilibriumRecord>)> {
    if game.is_terminal(node) {
        let g = game.payoff(node).expect("terminal").to_vec();
        let record = EquilibriumRecord {
            policy: Policy::constant(game.tree(), class),
            value: g.clone(),
            slack: vec![Rational::zero(); game.players()],
        };
        let records = if matches!(keep, Keep::Values) { vec![] } else { vec![record] };
        return Ok((ValueSet::from_points([g]).with_epsilon(*eps), records));
    }
    let layout = Layout::new(game, node, class)?;
    layout.check_cap(caps.policies)?;
    let joint = game.joint();
    let players = game.players();
    let markov = class == PolicyClass::StateDependent && layout.markov(game);

    // Best responses depend only on the other players' choices; memoize them
    // by the rank of those choices when that table is small enough.
    let memo_sizes: Vec<Option<usize>> = (0..players)
        .map(|i| {
            if class == PolicyClass::Symmetric {
                return None;
            }
            let others = joint.total() / joint.size(i);
            let mut size: u128 = 1;
            for _ in &layout.keys {
                size = size.saturating_mul(others as u128);
            }
            (size <= caps.policies).then_some(size as usize)
        })
        .collect();
    let mut memo: Vec<Vec<Option<Rational>>> = memo_sizes.iter().map(|s| vec![None; s.unwrap_or(0)]).collect();

    let mut values = ValueSet::new().with_epsilon(*eps);
    let mut records = Vec::new();
    let mut odometer = Odometer::new(game, &layout);
    while odometer.advance(game) {
        let table = &odometer.table;
        let value = game.cost_with(node, &|n| table[n]);
        let mut slack = Vec::with_capacity(players);
        let mut ok = true;
        for i in 0..players {
            let br = match memo_sizes[i] {
                Some(_) => {
                    let others = joint.total() / joint.size(i);
                    let rank = odometer
                        .digits
                        .iter()
                        .rev()
                        .fold(0usize, |acc, &d| acc * others + joint.others_index(d, i));
                    match memo[i][rank] {
                        Some(v) => v,
                        None => {
                            let v = player_best(game, node, &layout, table, i, class, markov, caps)?;
                            memo[i][rank] = Some(v);
                            v
                        }
                    }
                }
                None => player_best(game, node, &layout, table, i, class, markov, caps)?,
            };
            let s = value[i] - br;
            if s > *eps {
                ok = false;
                if matches!(keep, Keep::Values) {
                    break;
                }
            }
            slack.push(s);
        }
        if !ok {
            continue;
        }
        let fresh = values.insert(value.clone());
        let wanted = match keep {
            Keep::Values => false,
            Keep::FirstPerValue => fresh,
            Keep::All => true,
        };
        if wanted {
            records.push(EquilibriumRecord {
                policy: Policy::from_table(class, table.clone()),
                value,
                slack,
            });
        }
    }
    Ok((values, records))
}

#[allow(clippy::too_many_arguments)]
fn player_best(
    game: &Game,
    node: NodeId,
    layout: &Layout,
    table: &[usize],
    player: usize,
    class: PolicyClass,
    markov: bool,
    caps: &Caps,
) -> Result<Rational> {
    if class != PolicyClass::StateDependent || markov {
        let mut own = vec![0; table.len()];
        return Ok(induction(game, node, player, &|n| table[n], &mut own));
    }
    Ok(state_best_response(game, node, layout, table, player, caps)?.0)
}

/// The set value at `node`: values of every `eps`-equilibrium of `class`,
/// found by enumerating the class. `eps` becomes the inflation radius.
pub fn set_value_bruteforce(
    game: &Game,
    node: NodeId,
    eps: &Rational,
    class: PolicyClass,
    caps: &Caps,
) -> Result<ValueSet> {
    Ok(bruteforce(game, node, eps, class, caps, Keep::Values)?.0)
}

/// Like [`set_value_bruteforce`], with the first equilibrium found for each
/// value as its witness.
pub fn witnesses_bruteforce(
    game: &Game,
    node: NodeId,
    eps: &Rational,
    class: PolicyClass,
    caps: &Caps,
) -> Result<(ValueSet, Vec<EquilibriumRecord>)> {
    bruteforce(game, node, eps, class, caps, Keep::FirstPerValue)
}

/// Every `eps`-equilibrium of `class` at `node`, up to actions at nodes
/// that cannot affect any cost (those are set to joint action 0).
pub fn equilibria_bruteforce(
    game: &Game,
    node: NodeId,
    eps: &Rational,
    class: PolicyClass,
    caps: &Caps,
) -> Result<Vec<EquilibriumRecord>> {
    Ok(bruteforce(game, node, eps, class, caps, Keep::All)?.1)
}

/// Values of every policy at `node` (equilibrium or not).
pub fn policy_values(game: &Game, node: NodeId, caps: &Caps) -> Result<ValueSet> {
    if game.is_terminal(node) {
        return Ok(ValueSet::from_points([game.payoff(node).expect("terminal").to_vec()]));
    }
    let layout = Layout::new(game, node, PolicyClass::PathDependent)?;
    layout.check_cap(caps.policies)?;
    let mut out = ValueSet::new();
    let mut odometer = Odometer::new(game, &layout);
    while odometer.advance(game) {
        let table = &odometer.table;
        out.insert(game.cost_with(node, &|n| table[n]));
    }
    Ok(out)
}

/// Static-game equilibria at `node` when child `k` is worth `psi[k]`.
///
/// Each record's policy plays the equilibrium profile at `node` and joint
/// action 0 elsewhere.
pub fn one_step_equilibria(game: &Game, node: NodeId, psi: &[Vec<Rational>]) -> Result<Vec<EquilibriumRecord>> {
    let tree = game.tree();
    if game.is_terminal(node) {
        return Err(Error::InvalidArgument("one-step game at a terminal node".into()));
    }
    if psi.len() != tree.children(node).len() || psi.iter().any(|p| p.len() != game.players()) {
        return Err(Error::InvalidArgument("continuation values must cover every child".into()));
    }
    let next: Vec<&[Rational]> = psi.iter().map(Vec::as_slice).collect();
    let costs = one_step_costs(game, node, &next);
    let mut out = Vec::new();
    for (a, slack) in static_slack_table(game.joint(), &costs).into_iter().enumerate() {
        if slack.iter().all(Zero::is_zero) {
            let mut policy = Policy::constant(tree, PolicyClass::PathDependent);
            policy.set(node, a);
            out.push(EquilibriumRecord {
                policy,
                value: costs[a].clone(),
                slack,
            });
        }
    }
    Ok(out)
}

fn one_step_costs(game: &Game, node: NodeId, next: &[&[Rational]]) -> Vec<Vec<Rational>> {
    (0..game.joint().total())
        .map(|a| game.one_step_cost(node, a, next))
        .collect()
}

/// Per joint action of a static game with cost vectors `costs[joint]`, each
/// player's gain from the best unilateral deviation.
pub fn static_slack_table(joint: &JointSpace, costs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..joint.total())
        .map(|a| {
            (0..joint.players())
                .map(|i| {
                    let best = (0..joint.size(i))
                        .map(|b| costs[joint.with_action(a, i, b)][i])
                        .min()
                        .expect("action sets are nonempty");
                    costs[a][i] - best
                })
                .collect()
        })
        .collect()
}

/// Set value by the one-step backward recursion: at each node, the values of
/// all static equilibria over all selections of one continuation value per
/// child. Requires a strictly positive kernel below `node`.
pub fn set_value_dpp(game: &Game, node: NodeId, caps: &Caps) -> Result<ValueSet> {
    if !game.kernel_positive_below(Some(node)) {
        return Err(Error::KernelNotPositive(alloc::format!(
            "below prefix {:?}",
            game.tree().prefix(node)
        )));
    }
    let mut memo = BTreeMap::new();
    recursion(game, node, caps, &mut memo)
}

fn recursion(game: &Game, node: NodeId, caps: &Caps, memo: &mut BTreeMap<NodeId, ValueSet>) -> Result<ValueSet> {
    if let Some(vs) = memo.get(&node) {
        return Ok(vs.clone());
    }
    if let Some(g) = game.payoff(node) {
        return Ok(ValueSet::from_points([g.to_vec()]));
    }
    let children: Vec<ValueSet> = game
        .tree()
        .children(node)
        .map(|c| recursion(game, c, caps, memo))
        .collect::<Result<_>>()?;
    let out = static_union(game, node, &children, caps)?;
    memo.insert(node, out.clone());
    Ok(out)
}

/// Union over selections `psi[k] in sets[k]` of the static equilibrium
/// values at `node`.
pub(crate) fn static_union(game: &Game, node: NodeId, sets: &[ValueSet], caps: &Caps) -> Result<ValueSet> {
    let mut out = ValueSet::new();
    for_each_selection(sets, caps, |next| {
        let costs = one_step_costs(game, node, next);
        for (a, slack) in static_slack_table(game.joint(), &costs).into_iter().enumerate() {
            if slack.iter().all(Zero::is_zero) {
                out.insert(costs[a].clone());
            }
        }
        Ok(())
    })?;
    Ok(out)
}

/// Calls `visit` with every choice of one point per set, in odometer order
/// (first set fastest). Does nothing if some set is empty.
pub(crate) fn for_each_selection(
    sets: &[ValueSet],
    caps: &Caps,
    mut visit: impl FnMut(&[&[Rational]]) -> Result<()>,
) -> Result<()> {
    if sets.iter().any(ValueSet::is_empty) {
        return Ok(());
    }
    let count = sets
        .iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if count > caps.selections {
        return Err(Error::CapExceeded {
            what: "continuation selections",
            required: count,
            cap: caps.selections,
        });
    }
    let mut digits = vec![0usize; sets.len()];
    loop {
        let choice: Vec<&[Rational]> = sets
            .iter()
            .zip(&digits)
            .map(|(s, &d)| s.points()[d].as_slice())
            .collect();
        visit(&choice)?;
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < sets[k].len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            return Ok(());
        }
    }
}

/// Equilibrium values not strictly dominated by the value of any policy.
pub fn strong_pareto_filter(game: &Game, node: NodeId, vs: &ValueSet, caps: &Caps) -> Result<ValueSet> {
    let all = policy_values(game, node, caps)?;
    let kept = vs
        .points()
        .iter()
        .filter(|y| !all.points().iter().any(|v| dominates(v, y)))
        .cloned();
    Ok(ValueSet::from_points(kept).with_epsilon(*vs.epsilon()))
}

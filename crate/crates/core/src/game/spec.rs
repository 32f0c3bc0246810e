use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::rational::Rational;
use crate::{Error, Result};

/// Where a table entry applies at a given time: to every prefix whose current
/// state is `State(s)`, or to exactly one prefix `(x_0, ..., x_t)`.
///
/// Prefix entries take precedence over state entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Locus {
    State(usize),
    Prefix(Vec<usize>),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    /// Kernel and costs depend on the prefix only through its current state.
    pub state_dependent: bool,
    /// Every transition probability is strictly positive.
    pub positive_kernel: bool,
}

pub type TransitionKey = (usize, Locus, Option<Vec<usize>>);

/// Full description of a discrete game.
///
/// `transitions[(t, locus, joint)]` is the distribution of `X_{t+1}` (a `None`
/// joint action matches every profile). `running_costs[(t, locus)][i][a_i]`
/// is player `i`'s cost for playing its own action `a_i`; running costs never
/// depend on the other players' actions. Missing running or terminal costs
/// are zero; a missing transition is only allowed when `S_{t+1}` is a
/// singleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub states: Vec<Vec<String>>,
    pub actions: Vec<Vec<String>>,
    pub transitions: BTreeMap<TransitionKey, Vec<Rational>>,
    pub running_costs: BTreeMap<(usize, Locus), Vec<Vec<Rational>>>,
    pub terminal_costs: BTreeMap<Locus, Vec<Rational>>,
    pub flags: Flags,
}

impl GameSpec {
    pub fn new(states: Vec<Vec<String>>, actions: Vec<Vec<String>>) -> Self {
        Self {
            states,
            actions,
            transitions: BTreeMap::new(),
            running_costs: BTreeMap::new(),
            terminal_costs: BTreeMap::new(),
            flags: Flags::default(),
        }
    }

    /// A spec with generated labels: states `s{t}_{k}`, actions `0, 1, ...`.
    pub fn with_sizes(state_counts: &[usize], action_counts: &[usize]) -> Self {
        let states = state_counts
            .iter()
            .enumerate()
            .map(|(t, &n)| (0..n).map(|k| format!("s{t}_{k}")).collect())
            .collect();
        let actions = action_counts
            .iter()
            .map(|&n| (0..n).map(|a| format!("{a}")).collect())
            .collect();
        Self::new(states, actions)
    }

    pub fn horizon(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn players(&self) -> usize {
        self.actions.len()
    }

    pub fn state_counts(&self) -> Vec<usize> {
        self.states.iter().map(Vec::len).collect()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    pub fn set_transition(
        &mut self,
        time: usize,
        locus: Locus,
        joint: Option<Vec<usize>>,
        probs: Vec<Rational>,
    ) -> &mut Self {
        self.transitions.insert((time, locus, joint), probs);
        self
    }

    pub fn set_running_cost(&mut self, time: usize, locus: Locus, costs: Vec<Vec<Rational>>) -> &mut Self {
        self.running_costs.insert((time, locus), costs);
        self
    }

    pub fn set_terminal_cost(&mut self, locus: Locus, costs: Vec<Rational>) -> &mut Self {
        self.terminal_costs.insert(locus, costs);
        self
    }

    pub fn state_index(&self, time: usize, label: &str) -> Option<usize> {
        self.states.get(time)?.iter().position(|s| s == label)
    }

    pub fn action_index(&self, player: usize, label: &str) -> Option<usize> {
        self.actions.get(player)?.iter().position(|s| s == label)
    }

    /// Looks up `q(t, prefix, joint; .)` with prefix entries first.
    pub fn resolve_transition(&self, prefix: &[usize], joint: &[usize]) -> Option<&Vec<Rational>> {
        let t = prefix.len() - 1;
        let exact = Locus::Prefix(prefix.to_vec());
        let state = Locus::State(prefix[t]);
        let joint = Some(joint.to_vec());
        [
            (t, exact.clone(), joint.clone()),
            (t, exact, None),
            (t, state.clone(), joint),
            (t, state, None),
        ]
        .iter()
        .find_map(|key| self.transitions.get(key))
    }

    pub fn resolve_running_cost(&self, prefix: &[usize]) -> Option<&Vec<Vec<Rational>>> {
        let t = prefix.len() - 1;
        self.running_costs
            .get(&(t, Locus::Prefix(prefix.to_vec())))
            .or_else(|| self.running_costs.get(&(t, Locus::State(prefix[t]))))
    }

    pub fn resolve_terminal_cost(&self, path: &[usize]) -> Option<&Vec<Rational>> {
        self.terminal_costs
            .get(&Locus::Prefix(path.to_vec()))
            .or_else(|| self.terminal_costs.get(&Locus::State(path[path.len() - 1])))
    }

    /// Structural checks on every entry. Completeness and the state-dependence
    /// flag are checked when the spec is compiled into a [`Game`](super::Game).
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSpec(msg));
        if self.states.len() < 2 {
            return invalid("horizon must be at least 1".into());
        }
        if let Some(t) = self.states.iter().position(Vec::is_empty) {
            return invalid(format!("state set at time {t} is empty"));
        }
        if self.actions.is_empty() {
            return invalid("a game needs at least one player".into());
        }
        if let Some(i) = self.actions.iter().position(Vec::is_empty) {
            return invalid(format!("action set of player {i} is empty"));
        }
        let horizon = self.horizon();
        let players = self.players();

        for ((t, locus, joint), probs) in &self.transitions {
            if *t >= horizon {
                return invalid(format!("transition at time {t} is past the last period"));
            }
            self.check_locus(*t, locus)?;
            if let Some(joint) = joint {
                if joint.len() != players || joint.iter().zip(&self.actions).any(|(a, set)| *a >= set.len()) {
                    return invalid(format!("bad joint action {joint:?} in transition at time {t}"));
                }
            }
            if probs.len() != self.states[t + 1].len() {
                return invalid(format!(
                    "transition at time {t} has {} entries, S_{} has {}",
                    probs.len(),
                    t + 1,
                    self.states[t + 1].len()
                ));
            }
            if probs.iter().any(|p| *p < Rational::zero()) {
                return invalid(format!("negative probability in transition at time {t}"));
            }
            let total: Rational = probs.iter().fold(Rational::zero(), |acc, p| acc + p);
            if !total.is_one() {
                return invalid(format!("transition at time {t} sums to {total}, not 1"));
            }
            if self.flags.positive_kernel && probs.iter().any(Rational::is_zero) {
                return Err(Error::KernelNotPositive(format!("time {t}, {locus:?}")));
            }
        }
        for ((t, locus), costs) in &self.running_costs {
            if *t >= horizon {
                return invalid(format!("running cost at time {t} is past the last period"));
            }
            self.check_locus(*t, locus)?;
            if costs.len() != players || costs.iter().zip(&self.actions).any(|(c, set)| c.len() != set.len()) {
                return invalid(format!(
                    "running cost at time {t} must list one cost per own action for each player"
                ));
            }
        }
        for (locus, costs) in &self.terminal_costs {
            self.check_locus(horizon, locus)?;
            if costs.len() != players {
                return invalid("terminal cost must have one entry per player".into());
            }
        }
        Ok(())
    }

    fn check_locus(&self, t: usize, locus: &Locus) -> Result<()> {
        let ok = match locus {
            Locus::State(s) => *s < self.states[t].len(),
            Locus::Prefix(p) => p.len() == t + 1 && p.iter().enumerate().all(|(s, &x)| x < self.states[s].len()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("locus {locus:?} does not exist at time {t}")))
        }
    }
}

//! JSON form of a [`GameSpec`]. States and actions are referred to by label
//! and every number is a `"p/q"` string, so files round-trip exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use setvalue_core::game::{Flags, GameSpec, Locus};
use setvalue_core::rational::{self, Rational};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub horizon: usize,
    pub players: usize,
    pub states: Vec<Vec<String>>,
    pub actions: Vec<Vec<String>>,
    #[serde(default)]
    pub transitions: Vec<TransitionEntry>,
    #[serde(default)]
    pub running_costs: Vec<RunningEntry>,
    #[serde(default)]
    pub terminal_costs: Vec<TerminalEntry>,
    #[serde(default)]
    pub flags: FlagsFile,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsFile {
    #[serde(default)]
    pub state_dependent: bool,
    #[serde(default)]
    pub positive_kernel: bool,
}

/// Either `"state": label` or `"prefix": [labels]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocusFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub time: usize,
    #[serde(flatten)]
    pub at: LocusFile,
    /// Action labels, one per player; absent means every profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<String>>,
    pub probs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunningEntry {
    pub time: usize,
    #[serde(flatten)]
    pub at: LocusFile,
    /// `costs[i][a]`: player `i`'s cost for its own action `a`.
    pub costs: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalEntry {
    #[serde(flatten)]
    pub at: LocusFile,
    pub costs: Vec<String>,
}

fn numbers(values: &[String]) -> CliResult<Vec<Rational>> {
    values.iter().map(|v| rational::parse(v).map_err(CliError::from)).collect()
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational::format).collect()
}

fn invalid(msg: String) -> CliError {
    CliError::Validation(msg)
}

impl SpecFile {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("spec file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("spec files serialize");
        out.push('\n');
        out
    }

    pub fn to_spec(&self) -> CliResult<GameSpec> {
        if self.states.len() != self.horizon + 1 {
            return Err(invalid(format!(
                "horizon {} needs {} state lists, found {}",
                self.horizon,
                self.horizon + 1,
                self.states.len()
            )));
        }
        if self.actions.len() != self.players {
            return Err(invalid(format!("{} players but {} action lists", self.players, self.actions.len())));
        }
        // Entries refer to states and actions by label.
        for (what, lists) in [("state", &self.states), ("action", &self.actions)] {
            for (k, list) in lists.iter().enumerate() {
                if let Some(dup) = list.iter().enumerate().find(|(j, l)| list[..*j].contains(l)) {
                    return Err(invalid(format!("duplicate {what} label {:?} in list {k}", dup.1)));
                }
            }
        }
        let mut spec = GameSpec::new(self.states.clone(), self.actions.clone());
        let locus = |t: usize, at: &LocusFile| -> CliResult<Locus> {
            let state = |time: usize, label: &str| {
                spec.state_index(time, label)
                    .ok_or_else(|| invalid(format!("unknown state {label:?} at time {time}")))
            };
            match (&at.state, &at.prefix) {
                (Some(s), None) => Ok(Locus::State(state(t, s)?)),
                (None, Some(p)) => {
                    if p.len() != t + 1 {
                        return Err(invalid(format!("prefix {p:?} does not end at time {t}")));
                    }
                    p.iter().enumerate().map(|(k, s)| state(k, s)).collect::<CliResult<_>>().map(Locus::Prefix)
                }
                _ => Err(invalid(format!("entry at time {t} needs exactly one of state and prefix"))),
            }
        };
        let mut transitions = BTreeMap::new();
        for e in &self.transitions {
            if e.time >= self.horizon {
                return Err(invalid(format!("transition at time {} is past the last decision time", e.time)));
            }
            let at = locus(e.time, &e.at)?;
            let joint = match &e.joint {
                None => None,
                Some(labels) => {
                    if labels.len() != self.players {
                        return Err(invalid(format!("joint action {labels:?} has the wrong length")));
                    }
                    let idx = labels
                        .iter()
                        .enumerate()
                        .map(|(i, l)| spec.action_index(i, l).ok_or_else(|| invalid(format!("unknown action {l:?} of player {i}"))))
                        .collect::<CliResult<Vec<_>>>()?;
                    Some(idx)
                }
            };
            if transitions.insert((e.time, at, joint), numbers(&e.probs)?).is_some() {
                return Err(invalid(format!("duplicate transition entry at time {}", e.time)));
            }
        }
        let mut running = BTreeMap::new();
        for e in &self.running_costs {
            if e.time >= self.horizon {
                return Err(invalid(format!("running cost at time {} is past the last decision time", e.time)));
            }
            let at = locus(e.time, &e.at)?;
            let costs = e.costs.iter().map(|row| numbers(row)).collect::<CliResult<Vec<_>>>()?;
            if running.insert((e.time, at), costs).is_some() {
                return Err(invalid(format!("duplicate running cost entry at time {}", e.time)));
            }
        }
        let mut terminal = BTreeMap::new();
        for e in &self.terminal_costs {
            let at = locus(self.horizon, &e.at)?;
            if terminal.insert(at, numbers(&e.costs)?).is_some() {
                return Err(invalid("duplicate terminal cost entry".into()));
            }
        }
        spec.transitions = transitions;
        spec.running_costs = running;
        spec.terminal_costs = terminal;
        spec.flags = Flags {
            state_dependent: self.flags.state_dependent,
            positive_kernel: self.flags.positive_kernel,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &GameSpec) -> Self {
        let locus = |t: usize, l: &Locus| match l {
            Locus::State(s) => LocusFile {
                state: Some(spec.states[t][*s].clone()),
                prefix: None,
            },
            Locus::Prefix(p) => LocusFile {
                state: None,
                prefix: Some(p.iter().enumerate().map(|(k, &s)| spec.states[k][s].clone()).collect()),
            },
        };
        let horizon = spec.horizon();
        Self {
            horizon,
            players: spec.players(),
            states: spec.states.clone(),
            actions: spec.actions.clone(),
            transitions: spec
                .transitions
                .iter()
                .map(|((t, l, joint), probs)| TransitionEntry {
                    time: *t,
                    at: locus(*t, l),
                    joint: joint
                        .as_ref()
                        .map(|j| j.iter().enumerate().map(|(i, &a)| spec.actions[i][a].clone()).collect()),
                    probs: strings(probs),
                })
                .collect(),
            running_costs: spec
                .running_costs
                .iter()
                .map(|((t, l), costs)| RunningEntry {
                    time: *t,
                    at: locus(*t, l),
                    costs: costs.iter().map(|r| strings(r)).collect(),
                })
                .collect(),
            terminal_costs: spec
                .terminal_costs
                .iter()
                .map(|(l, costs)| TerminalEntry {
                    at: locus(horizon, l),
                    costs: strings(costs),
                })
                .collect(),
            flags: FlagsFile {
                state_dependent: spec.flags.state_dependent,
                positive_kernel: spec.flags.positive_kernel,
            },
        }
    }
}

pub fn read_spec(path: &std::path::Path) -> CliResult<GameSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    SpecFile::from_json(&text)?.to_spec()
}

pub fn spec_to_json(spec: &GameSpec) -> String {
    SpecFile::from_spec(spec).to_json()
}

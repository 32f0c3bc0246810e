//! The small games used throughout the documentation and tests.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::game::{GameSpec, Locus};
use crate::rational::{int, ratio, Rational};
use crate::{Error, Result};

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn binary_actions(players: usize) -> Vec<Vec<String>> {
    vec![labels(&["0", "1"]); players]
}

/// A one-shot game written as a one-period tree: one terminal state per
/// joint action, reached deterministically, whose terminal cost is the
/// game's cost matrix entry. `costs[joint]` uses the last-player-fastest
/// joint numbering.
pub fn static_game(action_counts: &[usize], costs: &[Vec<Rational>]) -> Result<GameSpec> {
    let total: usize = action_counts.iter().product();
    if costs.len() != total {
        return Err(Error::InvalidArgument(format!(
            "a static game with {total} joint actions needs {total} cost vectors"
        )));
    }
    let joint = crate::game::JointSpace::new(action_counts);
    let outcome_labels = (0..total)
        .map(|j| {
            let actions: Vec<String> = joint.decode(j).iter().map(|a| a.to_string()).collect();
            format!("a{}", actions.join(""))
        })
        .collect();
    let actions = action_counts
        .iter()
        .map(|&n| (0..n).map(|a| a.to_string()).collect())
        .collect();
    let mut spec = GameSpec::new(vec![labels(&["s0"]), outcome_labels], actions);
    for (j, cost) in costs.iter().enumerate() {
        let mut row = vec![Rational::from_integer(0); total];
        row[j] = Rational::one();
        spec.set_transition(0, Locus::State(0), Some(joint.decode(j)), row);
        spec.set_terminal_cost(Locus::State(j), cost.clone());
    }
    spec.flags.state_dependent = true;
    Ok(spec)
}

fn pairs(values: &[(i128, i128)]) -> Vec<Vec<Rational>> {
    values.iter().map(|&(a, b)| vec![int(a), int(b)]).collect()
}

/// Two equilibria with values `(0,1)` and `(1,0)`.
pub fn table1() -> GameSpec {
    static_game(&[2, 2], &pairs(&[(0, 1), (2, 2), (3, 3), (1, 0)])).expect("fixed data")
}

/// Unique equilibrium `(1,1)` with value `(3,3)`, dominated by the
/// non-equilibrium outcome `(1,1)` at `(0,0)`.
pub fn table2_left() -> GameSpec {
    static_game(&[2, 2], &pairs(&[(1, 1), (4, 0), (0, 4), (3, 3)])).expect("fixed data")
}

/// Entrywise costlier than [`table2_left`], yet its unique equilibrium
/// `(0,0)` has the smaller value `(2,2)`.
pub fn table2_right() -> GameSpec {
    static_game(&[2, 2], &pairs(&[(2, 2), (5, 5), (5, 5), (6, 6)])).expect("fixed data")
}

/// The last-period game shared by [`example_path`] and [`example_state`]:
/// its two equilibria are worth `(0,1/4)` and `(1/4,0)`.
fn coordination_period(spec: &mut GameSpec, t: usize) {
    let quarter = ratio(1, 4);
    spec.set_running_cost(
        t,
        Locus::State(0),
        vec![vec![-quarter, int(0)], vec![int(0), -quarter]],
    );
    for (actions, p) in [([0, 0], ratio(1, 4)), ([0, 1], ratio(3, 4)), ([1, 0], ratio(3, 4)), ([1, 1], ratio(1, 4))] {
        spec.set_transition(t, Locus::State(0), Some(actions.to_vec()), vec![p, Rational::one() - p]);
    }
    spec.set_terminal_cost(Locus::State(0), vec![int(1), int(1)]);
    spec.set_terminal_cost(Locus::State(1), vec![int(0), int(0)]);
}

/// States `s0 -> {s10, s11} -> s2 -> {s30, s31}`: only the action at `s2`
/// matters, and a path-dependent equilibrium reaches `(1/8,1/8)`.
pub fn example_path() -> GameSpec {
    let mut spec = GameSpec::new(
        vec![
            labels(&["s0"]),
            labels(&["s10", "s11"]),
            labels(&["s2"]),
            labels(&["s30", "s31"]),
        ],
        binary_actions(2),
    );
    spec.set_transition(0, Locus::State(0), None, vec![ratio(1, 2), ratio(1, 2)]);
    coordination_period(&mut spec, 2);
    spec.flags.state_dependent = true;
    spec.flags.positive_kernel = true;
    spec
}

/// Two copies of [`example_path`] behind a fair coin at time 0.
pub fn example_state() -> GameSpec {
    let mut spec = GameSpec::new(
        vec![
            labels(&["s0"]),
            labels(&["s10", "s11"]),
            labels(&["s20", "s21"]),
            labels(&["s3"]),
            labels(&["s40", "s41"]),
        ],
        binary_actions(2),
    );
    let half = vec![ratio(1, 2), ratio(1, 2)];
    spec.set_transition(0, Locus::State(0), None, half.clone());
    spec.set_transition(1, Locus::State(0), None, half.clone());
    spec.set_transition(1, Locus::State(1), None, half);
    coordination_period(&mut spec, 3);
    spec.flags.state_dependent = true;
    spec.flags.positive_kernel = true;
    spec
}

/// Continuation data at time 1, per state `s1j`: action-independent
/// running cost and terminal cost on reaching `s20`.
const PARETO_RUNNING: [(i128, i128); 4] = [(1, 1), (-4, 4), (4, -4), (1, 1)];
const PARETO_TERMINAL: [(i128, i128); 4] = [(4, 4), (20, 4), (4, 20), (12, 12)];

/// Which time-1 state each joint action `(a1, a2)` steers towards.
pub const PARETO_TARGET: [([usize; 2], usize); 4] = [([0, 0], 0), ([1, 0], 1), ([0, 1], 2), ([1, 1], 3)];

/// The two-period game where Pareto selection breaks dynamic programming.
///
/// At time 0 each joint action sends the state to its target `s1j` with
/// probability `1 - 3 eps` and to each other `s1j` with probability `eps`.
/// Requires `0 < eps < 1/3` for a positive kernel.
pub fn example_pareto(eps: Rational) -> Result<GameSpec> {
    if eps <= int(0) || eps * int(3) >= Rational::one() {
        return Err(Error::InvalidArgument(format!("eps = {eps} must lie in (0, 1/3)")));
    }
    let mut spec = GameSpec::new(
        vec![
            labels(&["s0"]),
            labels(&["s10", "s11", "s12", "s13"]),
            labels(&["s20", "s21"]),
        ],
        binary_actions(2),
    );
    for (actions, target) in PARETO_TARGET {
        let mut row = vec![eps; 4];
        row[target] = Rational::one() - eps * int(3);
        spec.set_transition(0, Locus::State(0), Some(actions.to_vec()), row);
    }
    for j in 0..4 {
        for (actions, p) in [([0, 0], ratio(1, 2)), ([0, 1], ratio(3, 4)), ([1, 0], ratio(3, 4)), ([1, 1], ratio(1, 4))] {
            spec.set_transition(1, Locus::State(j), Some(actions.to_vec()), vec![p, Rational::one() - p]);
        }
        let (f1, f2) = PARETO_RUNNING[j];
        spec.set_running_cost(1, Locus::State(j), vec![vec![int(f1); 2], vec![int(f2); 2]]);
        let (g1, g2) = PARETO_TERMINAL[j];
        spec.set_terminal_cost(Locus::Prefix(vec![0, j, 0]), vec![int(g1), int(g2)]);
    }
    spec.set_terminal_cost(Locus::State(1), vec![int(0), int(0)]);
    spec.flags.positive_kernel = true;
    Ok(spec)
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 6] = [
    "table1",
    "table2_left",
    "table2_right",
    "example_path",
    "example_state",
    "example_pareto",
];

/// Looks up a preset; `example_pareto` uses `eps = 1/100`.
pub fn by_name(name: &str) -> Option<GameSpec> {
    Some(match name {
        "table1" => table1(),
        "table2_left" => table2_left(),
        "table2_right" => table2_right(),
        "example_path" => example_path(),
        "example_state" => example_state(),
        "example_pareto" => example_pareto(ratio(1, 100)).ok()?,
        _ => return None,
    })
}

//! Checks of the dynamic programming principle for set values.
//!
//! [`verify_dpp`] compares the set value at a node with the set assembled
//! from equilibria of the game stopped at a stopping time, whose terminal
//! payoffs are selected from the set values at the stopped prefixes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::equilibrium::{
    for_each_selection, pareto_filter, set_value_bruteforce, static_slack_table, Caps, ValueSet,
};
use crate::game::{Game, JointSpace, NodeId, PolicyClass, StoppingTime};
use crate::presets::{example_pareto, PARETO_TARGET};
use crate::rational::Rational;
use crate::{Error, Result};

/// Which set value both sides of the identity use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// All path-dependent equilibria.
    Full,
    /// State-dependent equilibria against state-dependent deviations.
    State,
    /// Equilibria where every player uses the same policy.
    Symmetric,
    /// Equilibria whose value no other equilibrium dominates.
    Pareto,
}

impl Variant {
    /// Policy class of the equilibria behind the variant.
    pub fn class(self) -> PolicyClass {
        match self {
            Self::Full | Self::Pareto => PolicyClass::PathDependent,
            Self::State => PolicyClass::StateDependent,
            Self::Symmetric => PolicyClass::Symmetric,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::State => "state",
            Self::Symmetric => "symmetric",
            Self::Pareto => "pareto",
        }
    }
}

/// How the terminal payoffs of the stopped game may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PsiClass {
    /// One payoff per stopped prefix.
    Path,
    /// One payoff per stopping time and state, shared by all prefixes
    /// stopped there.
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Equal,
    /// The left side is a strict subset of the right side.
    LhsSubset,
    /// The right side is a strict subset of the left side.
    RhsSubset,
    Incomparable,
}

impl Relation {
    pub fn of(lhs: &ValueSet, rhs: &ValueSet) -> Self {
        match (lhs.is_subset(rhs), rhs.is_subset(lhs)) {
            (true, true) => Self::Equal,
            (true, false) => Self::LhsSubset,
            (false, true) => Self::RhsSubset,
            (false, false) => Self::Incomparable,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Equal => "equal",
            Self::LhsSubset => "lhs_subset",
            Self::RhsSubset => "rhs_subset",
            Self::Incomparable => "incomparable",
        }
    }
}

/// Both sides of a dynamic programming identity and how they relate.
#[derive(Debug, Clone, PartialEq)]
pub struct DppReport {
    /// The set value at the node.
    pub lhs: ValueSet,
    /// Values of the stopped games over all admissible payoff selections.
    pub rhs: ValueSet,
    pub relation: Relation,
    pub lhs_only: Vec<Vec<Rational>>,
    pub rhs_only: Vec<Vec<Rational>>,
}

impl DppReport {
    pub fn new(lhs: ValueSet, rhs: ValueSet) -> Self {
        Self {
            relation: Relation::of(&lhs, &rhs),
            lhs_only: lhs.difference(&rhs),
            rhs_only: rhs.difference(&lhs),
            lhs,
            rhs,
        }
    }
}

/// The exact set value of `variant` at `node`, by enumeration.
pub fn variant_value(game: &Game, node: NodeId, variant: Variant, caps: &Caps) -> Result<ValueSet> {
    let all = set_value_bruteforce(game, node, &Rational::zero(), variant.class(), caps)?;
    Ok(match variant {
        Variant::Pareto => pareto_filter(&all),
        _ => all,
    })
}

/// Compares the set value of `variant` at `node` with the union, over all
/// selections `psi` of continuation values at the prefixes where `tau`
/// stops, of the set value of the game stopped at `tau` with payoff `psi`.
///
/// Selections range over the same variant's set values. With
/// [`PsiClass::State`] one value is chosen per stopping time and state; it
/// must belong to the set value at every prefix stopped there. Prefixes the
/// game cannot reach still need a nonempty set value, but only their first
/// point is tried since their payoff never enters a cost.
pub fn verify_dpp(
    game: &Game,
    node: NodeId,
    tau: &StoppingTime,
    psi_class: PsiClass,
    variant: Variant,
    caps: &Caps,
) -> Result<DppReport> {
    let tree = game.tree();
    if tau.stops_at(node) {
        return Err(Error::InvalidArgument("the stopping time must exceed the evaluation time".into()));
    }
    let lhs = variant_value(game, node, variant, caps)?;
    let frontier = tau.frontier(tree, node);
    let sets: Vec<ValueSet> = frontier
        .iter()
        .map(|&f| variant_value(game, f, variant, caps))
        .collect::<Result<_>>()?;

    let zeros: BTreeMap<NodeId, Vec<Rational>> = frontier
        .iter()
        .map(|&f| (f, vec![Rational::zero(); game.players()]))
        .collect();
    let reachable = game.truncated(node, tau, &zeros)?.reachable_terminals(node);

    // Group the frontier into the slots a selection fills.
    let mut slots: Vec<(Vec<usize>, ValueSet)> = Vec::new();
    match psi_class {
        PsiClass::Path => {
            for (k, set) in sets.iter().enumerate() {
                let live = reachable.binary_search(&frontier[k]).is_ok();
                let choices = if live {
                    set.clone()
                } else {
                    ValueSet::from_points(set.points().first().cloned())
                };
                slots.push((vec![k], choices));
            }
        }
        PsiClass::State => {
            let mut keys: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
            for (k, &f) in frontier.iter().enumerate() {
                keys.entry((tree.time(f), tree.state(f))).or_default().push(k);
            }
            for members in keys.into_values() {
                let common = members[1..].iter().fold(sets[members[0]].clone(), |acc, &k| {
                    ValueSet::from_points(acc.points().iter().filter(|p| sets[k].has_point(p)).cloned())
                });
                slots.push((members, common));
            }
        }
    }

    let choice_sets: Vec<ValueSet> = slots.iter().map(|(_, s)| s.clone()).collect();
    let mut rhs = ValueSet::new();
    for_each_selection(&choice_sets, caps, |choice| {
        let mut psi = BTreeMap::new();
        for ((members, _), point) in slots.iter().zip(choice) {
            for &k in members {
                psi.insert(frontier[k], point.to_vec());
            }
        }
        let stopped = game.truncated(node, tau, &psi)?;
        rhs.extend(variant_value(&stopped, node, variant, caps)?.into_points());
        Ok(())
    })?;
    Ok(DppReport::new(lhs, rhs))
}

/// The Pareto counterexample at `eps`: the Pareto set value at the root
/// against the values obtained from Pareto continuation values, stopped
/// after one period.
///
/// `eps` is accepted when, for every selection of continuation values, the
/// first-period equilibrium profiles are those of the unperturbed
/// (`eps = 0`) game.
pub fn pareto_dpp_counterexample(eps: Rational, caps: &Caps) -> Result<DppReport> {
    let game = Game::new(&example_pareto(eps)?)?;
    check_pareto_eps(&game, &eps, caps)?;
    let tau = StoppingTime::constant(game.tree(), 1);
    verify_dpp(&game, 0, &tau, PsiClass::Path, Variant::Pareto, caps)
}

fn check_pareto_eps(game: &Game, eps: &Rational, caps: &Caps) -> Result<()> {
    let tree = game.tree();
    let joint = game.joint();
    let sets: Vec<ValueSet> = tree
        .children(0)
        .map(|c| set_value_bruteforce(game, c, &Rational::zero(), PolicyClass::PathDependent, caps))
        .collect::<Result<_>>()?;
    for_each_selection(&sets, caps, |psi| {
        let perturbed: Vec<Vec<Rational>> = (0..joint.total()).map(|a| game.one_step_cost(0, a, psi)).collect();
        let limit: Vec<Vec<Rational>> = (0..joint.total())
            .map(|a| {
                let target = PARETO_TARGET
                    .iter()
                    .find(|(actions, _)| joint.encode(actions) == a)
                    .map(|&(_, t)| t)
                    .expect("every profile has a target");
                psi[target].to_vec()
            })
            .collect();
        if equilibrium_profiles(joint, &perturbed) != equilibrium_profiles(joint, &limit) {
            return Err(Error::InvalidArgument(format!("eps = {eps} changes the first-period equilibria")));
        }
        Ok(())
    })
}

fn equilibrium_profiles(joint: &JointSpace, costs: &[Vec<Rational>]) -> Vec<usize> {
    static_slack_table(joint, costs)
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().all(Zero::is_zero))
        .map(|(a, _)| a)
        .collect()
}

/// Outcome of the open-loop linear-quadratic example.
#[derive(Debug, Clone, PartialEq)]
pub struct LqDemo {
    /// Equilibrium value of the two-period game.
    pub v_closed: [f64; 2],
    /// Value from composing the second-period equilibrium with the
    /// first-period game.
    pub v_composed: [f64; 2],
    /// Own-variable gradients at the two computed equilibria, in sup norm.
    pub residual: f64,
}

/// Two players steer `X1 = a1 + a2 + sigma xi1` and
/// `X2 = (b1 + b2) X1 + sigma xi2` with open-loop controls: `a_i` is a
/// number and `b_i = c_i + d_i xi1` may use the first shock only. Player
/// `i` pays `4 a_i^2 + 2 a_i + b_i^2 / 2 - X2`.
///
/// Both equilibria are found by solving the players' first-order conditions
/// as a linear system. Expectations use the two-point shocks `xi = +-1`,
/// which are exact for the quadratic costs here.
pub fn open_loop_lq_demo(sigma: f64) -> Result<LqDemo> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument("sigma must be a finite number >= 0".into()));
    }
    let shocks = [-1.0, 1.0];
    let expect = |f: &dyn Fn(f64) -> f64| shocks.iter().map(|&xi| f(xi)).sum::<f64>() / 2.0;

    // Whole game: u = [a1, a2, c1, c2, d1, d2].
    let closed_cost = |i: usize, u: &[f64]| {
        let (a, c, d) = ([u[0], u[1]], [u[2], u[3]], [u[4], u[5]]);
        expect(&|xi1| {
            let x1 = a[0] + a[1] + sigma * xi1;
            let b = [c[0] + d[0] * xi1, c[1] + d[1] * xi1];
            let x2 = expect(&|xi2| (b[0] + b[1]) * x1 + sigma * xi2);
            4.0 * a[i] * a[i] + 2.0 * a[i] + 0.5 * b[i] * b[i] - x2
        })
    };
    let owners = [0, 1, 0, 1, 0, 1];
    let closed = solve_quadratic_game(&owners, &closed_cost)?;
    let v_closed = [closed_cost(0, &closed), closed_cost(1, &closed)];

    // Second period for a known X1 = x: u = [b1, b2].
    let second = |x: f64| {
        let cost = move |i: usize, u: &[f64]| expect(&|xi2| 0.5 * u[i] * u[i] - ((u[0] + u[1]) * x + sigma * xi2));
        solve_quadratic_game(&[0, 1], &cost).map(|b| [cost(0, &b), cost(1, &b)])
    };
    // The continuation value is quadratic in x; recover it from three samples.
    let (lo, mid, hi) = (second(-1.0)?, second(0.0)?, second(1.0)?);
    let psi = move |i: usize, x: f64| {
        let c0 = mid[i];
        let c1 = (hi[i] - lo[i]) / 2.0;
        let c2 = (hi[i] + lo[i]) / 2.0 - mid[i];
        c0 + c1 * x + c2 * x * x
    };
    let first_cost = |i: usize, u: &[f64]| {
        expect(&|xi1| 4.0 * u[i] * u[i] + 2.0 * u[i] + psi(i, u[0] + u[1] + sigma * xi1))
    };
    let composed = solve_quadratic_game(&[0, 1], &first_cost)?;
    let v_composed = [first_cost(0, &composed), first_cost(1, &composed)];

    let residual = own_gradient(&owners, &closed_cost, &closed)
        .into_iter()
        .chain(own_gradient(&[0, 1], &first_cost, &composed))
        .fold(0.0f64, |m, g| m.max(libm::fabs(g)));
    Ok(LqDemo {
        v_closed,
        v_composed,
        residual,
    })
}

/// `d J_owner(k) / d u_k` for every coordinate, by central differences
/// with unit step (exact for quadratics up to rounding).
fn own_gradient(owners: &[usize], cost: &dyn Fn(usize, &[f64]) -> f64, u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|k| {
            let mut up = u.to_vec();
            let mut down = u.to_vec();
            up[k] += 1.0;
            down[k] -= 1.0;
            (cost(owners[k], &up) - cost(owners[k], &down)) / 2.0
        })
        .collect()
}

/// Stationary point of a game with quadratic costs: coordinate `k` belongs
/// to player `owners[k]`, and every player's own gradient vanishes.
fn solve_quadratic_game(owners: &[usize], cost: &dyn Fn(usize, &[f64]) -> f64) -> Result<Vec<f64>> {
    let n = owners.len();
    let origin = vec![0.0; n];
    let offset = own_gradient(owners, cost, &origin);
    let mut matrix = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut e = origin.clone();
        e[col] = 1.0;
        for (row, g) in own_gradient(owners, cost, &e).into_iter().enumerate() {
            matrix[row][col] = g - offset[row];
        }
    }
    let rhs: Vec<f64> = offset.iter().map(|b| -b).collect();
    gauss_solve(matrix, rhs)
}

fn gauss_solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| libm::fabs(m[r][col]).total_cmp(&libm::fabs(m[s][col])))
            .expect("nonempty range");
        if libm::fabs(m[pivot][col]) < 1e-12 {
            return Err(Error::Numeric("first-order conditions are singular".into()));
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Ok(x)
}

/// Closed forms of the two LQ values, for comparison with the solver.
pub fn open_loop_lq_formulas(sigma: f64) -> (f64, f64) {
    let s2 = sigma * sigma;
    (-1.5 * (s2 + 1.0), -(1.5 * s2 + 4.0))
}

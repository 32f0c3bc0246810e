//! The auxiliary control problem whose nodal set is the set value of a
//! continuous-time game with one-dimensional state.
//!
//! The state `X` is a Brownian motion under the reference measure. Player
//! `i`'s drift-coupled cost is `f_i(t, x, a_i) + b(t, x, a) z_i`; its minimum
//! over the player's own action drives the controlled value coordinate
//! `Y_i`, and the gap to that minimum is charged with power 3/2. The value
//! `W(t, x, y)` of that problem vanishes exactly on the set value.

mod nodal;
mod oracle;
pub mod presets;
mod solver;

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::game::JointSpace;
use crate::{Error, Result};

pub use nodal::{nodal_set, Cluster, NodalSet};
pub use oracle::{scalar_hjb, ScalarHjbConfig};
pub use solver::{solve_w, GridConfig, PdeField, Scheme};

type DriftFn = dyn Fn(f64, f64, &[f64]) -> f64 + Send + Sync;
type RunningFn = dyn Fn(f64, f64, usize, f64) -> f64 + Send + Sync;
type TerminalFn = dyn Fn(f64, usize) -> f64 + Send + Sync;

/// A game driven by `dX = b(t, X, a) dt + dB` on `[0, T]`, with running cost
/// `f_i(t, x, a_i)` and terminal cost `g_i(x)`. Actions live on finite grids.
pub struct DiffusionGameSpec {
    pub horizon: f64,
    pub action_grids: Vec<Vec<f64>>,
    drift: Box<DriftFn>,
    running: Box<RunningFn>,
    terminal: Box<TerminalFn>,
    /// Declared bound on `|b|`.
    pub drift_bound: f64,
    /// Declared bound on `|f|` and `|g|`.
    pub cost_bound: f64,
}

impl core::fmt::Debug for DiffusionGameSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DiffusionGameSpec")
            .field("horizon", &self.horizon)
            .field("action_grids", &self.action_grids)
            .field("drift_bound", &self.drift_bound)
            .field("cost_bound", &self.cost_bound)
            .finish_non_exhaustive()
    }
}

impl DiffusionGameSpec {
    pub fn new(
        horizon: f64,
        action_grids: Vec<Vec<f64>>,
        drift: impl Fn(f64, f64, &[f64]) -> f64 + Send + Sync + 'static,
        running: impl Fn(f64, f64, usize, f64) -> f64 + Send + Sync + 'static,
        terminal: impl Fn(f64, usize) -> f64 + Send + Sync + 'static,
        drift_bound: f64,
        cost_bound: f64,
    ) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidSpec("horizon must be positive".into()));
        }
        if action_grids.is_empty() || action_grids.iter().any(Vec::is_empty) {
            return Err(Error::InvalidSpec("every player needs a nonempty action grid".into()));
        }
        Ok(Self {
            horizon,
            action_grids,
            drift: Box::new(drift),
            running: Box::new(running),
            terminal: Box::new(terminal),
            drift_bound,
            cost_bound,
        })
    }

    pub fn players(&self) -> usize {
        self.action_grids.len()
    }

    pub fn joint(&self) -> JointSpace {
        let sizes: Vec<usize> = self.action_grids.iter().map(Vec::len).collect();
        JointSpace::new(&sizes)
    }

    pub fn drift(&self, t: f64, x: f64, actions: &[f64]) -> f64 {
        (self.drift)(t, x, actions)
    }

    pub fn running_cost(&self, t: f64, x: f64, player: usize, action: f64) -> f64 {
        (self.running)(t, x, player, action)
    }

    pub fn terminal_cost(&self, x: f64, player: usize) -> f64 {
        (self.terminal)(x, player)
    }

    /// Action values of a joint action index.
    pub fn actions_of(&self, joint: &JointSpace, j: usize) -> Vec<f64> {
        (0..self.players())
            .map(|i| self.action_grids[i][joint.action(j, i)])
            .collect()
    }

    /// Checks the declared bounds at the given sample times and states.
    /// Continuity in `(t, x)` is assumed, not checked.
    pub fn check_bounds(&self, times: &[f64], xs: &[f64]) -> Result<()> {
        let joint = self.joint();
        for &x in xs {
            for i in 0..self.players() {
                let g = self.terminal_cost(x, i);
                if !g.is_finite() || libm::fabs(g) > self.cost_bound {
                    return Err(Error::InvalidSpec(format!("|g_{i}({x})| = {g} exceeds the cost bound")));
                }
            }
            for &t in times {
                for j in 0..joint.total() {
                    let a = self.actions_of(&joint, j);
                    let b = self.drift(t, x, &a);
                    if !b.is_finite() || libm::fabs(b) > self.drift_bound {
                        return Err(Error::InvalidSpec(format!("|b({t}, {x}, {a:?})| = {b} exceeds the drift bound")));
                    }
                }
                for (i, grid) in self.action_grids.iter().enumerate() {
                    for &a in grid {
                        let f = self.running_cost(t, x, i, a);
                        if !f.is_finite() || libm::fabs(f) > self.cost_bound {
                            return Err(Error::InvalidSpec(format!("|f_{i}({t}, {x}, {a})| = {f} exceeds the cost bound")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Drift-coupled costs frozen at one `(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledCost {
    joint: JointSpace,
    /// `b(t, x, a)` per joint action.
    drift: Vec<f64>,
    /// `f_i(t, x, a_i)` per player and own action.
    own: Vec<Vec<f64>>,
}

impl CoupledCost {
    pub fn at(spec: &DiffusionGameSpec, t: f64, x: f64) -> Self {
        let joint = spec.joint();
        let drift = (0..joint.total())
            .map(|j| spec.drift(t, x, &spec.actions_of(&joint, j)))
            .collect();
        let own = spec
            .action_grids
            .iter()
            .enumerate()
            .map(|(i, grid)| grid.iter().map(|&a| spec.running_cost(t, x, i, a)).collect())
            .collect();
        Self { joint, drift, own }
    }

    pub fn joint(&self) -> &JointSpace {
        &self.joint
    }

    /// `f_i(a_i) + b(a) z_i`.
    pub fn coupled(&self, player: usize, joint: usize, z: f64) -> f64 {
        self.own[player][self.joint.action(joint, player)] + self.drift[joint] * z
    }

    /// Minimum of [`Self::coupled`] over the player's own action, the others
    /// playing as in `joint`.
    pub fn underline(&self, player: usize, joint: usize, z: f64) -> f64 {
        (0..self.joint.size(player))
            .map(|a| self.coupled(player, self.joint.with_action(joint, player, a), z))
            .fold(f64::INFINITY, f64::min)
    }

    /// `coupled - underline`, never negative.
    pub fn delta(&self, player: usize, joint: usize, z: f64) -> f64 {
        (self.coupled(player, joint, z) - self.underline(player, joint, z)).max(0.0)
    }
}

/// `delta^(3/2)`.
pub(crate) fn gap_cost(delta: f64) -> f64 {
    delta * libm::sqrt(delta)
}

/// Derivatives of `W` at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w_xx: f64,
    /// `d W / d y_i`.
    pub w_y: Vec<f64>,
    /// `d^2 W / d y_i d y_j`.
    pub w_yy: Vec<Vec<f64>>,
    /// `d^2 W / d x d y_i`.
    pub w_xy: Vec<f64>,
}

impl Gradients {
    pub fn zero(players: usize) -> Self {
        Self {
            w_xx: 0.0,
            w_y: alloc::vec![0.0; players],
            w_yy: alloc::vec![alloc::vec![0.0; players]; players],
            w_xy: alloc::vec![0.0; players],
        }
    }
}

/// The minimized bracket and a minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianValue {
    pub value: f64,
    /// Joint action index of the minimizer.
    pub action: usize,
    pub z: Vec<f64>,
}

/// Minimum over joint actions and over `z` in `z_grid^N` of
///
/// `W_xx / 2 + z' W_yy z / 2 + z . W_xy + sum_i [delta_i^(3/2) - underline_i W_y_i]`.
///
/// The bracket does not depend on `y`. Ties keep the first minimizer in
/// (action, z) lexicographic order.
pub fn hamiltonian(coupled: &CoupledCost, z_grid: &[f64], grads: &Gradients) -> HamiltonianValue {
    let joint = coupled.joint();
    let players = joint.players();
    let nz = z_grid.len();
    let mut best = HamiltonianValue {
        value: f64::INFINITY,
        action: 0,
        z: alloc::vec![0.0; players],
    };
    // Per player and z_i, the separable part for the current action.
    let mut sep = alloc::vec![0.0; players * nz];
    let mut digits = alloc::vec![0usize; players];
    for a in 0..joint.total() {
        for i in 0..players {
            for (k, &z) in z_grid.iter().enumerate() {
                sep[i * nz + k] = gap_cost(coupled.delta(i, a, z)) - coupled.underline(i, a, z) * grads.w_y[i];
            }
        }
        digits.iter_mut().for_each(|d| *d = 0);
        loop {
            let mut v = 0.5 * grads.w_xx;
            for i in 0..players {
                let zi = z_grid[digits[i]];
                v += sep[i * nz + digits[i]] + zi * grads.w_xy[i];
                for j in 0..players {
                    v += 0.5 * zi * z_grid[digits[j]] * grads.w_yy[i][j];
                }
            }
            if v < best.value {
                best.value = v;
                best.action = a;
                for i in 0..players {
                    best.z[i] = z_grid[digits[i]];
                }
            }
            if !next_digits(&mut digits, nz) {
                break;
            }
        }
    }
    best
}

/// Odometer step over `base^len`; false after the last combination.
pub(crate) fn next_digits(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn flat(players: usize) -> DiffusionGameSpec {
        DiffusionGameSpec::new(1.0, vec![vec![-1.0, 0.0, 1.0]; players], |_, _, _| 0.0, |_, _, _, _| 0.0, |_, _| 0.0, 1.0, 1.0)
            .unwrap()
    }

    #[test]
    fn zero_data_gives_zero_hamiltonian() {
        let spec = flat(2);
        let c = CoupledCost::at(&spec, 0.0, 0.0);
        let z: Vec<f64> = (-4..=4).map(|k| k as f64 * 0.5).collect();
        let h = hamiltonian(&c, &z, &Gradients::zero(2));
        assert_eq!(h.value, 0.0);
    }

    #[test]
    fn coupled_cost_gap_is_nonnegative() {
        let spec = DiffusionGameSpec::new(
            1.0,
            vec![vec![-1.0, 0.0, 1.0], vec![-1.0, 1.0]],
            |_, x, a| libm::sin(x) * a[0] + 0.5 * a[1],
            |_, x, i, a| if i == 0 { a * a + x } else { -a },
            |x, _| libm::cos(x),
            2.0,
            5.0,
        )
        .unwrap();
        let c = CoupledCost::at(&spec, 0.3, 0.7);
        for j in 0..6 {
            for i in 0..2 {
                for z in [-2.0, -0.5, 0.0, 1.5] {
                    assert!(c.delta(i, j, z) >= 0.0);
                    assert!(c.underline(i, j, z) <= c.coupled(i, j, z));
                }
            }
        }
        // underline is Lipschitz in z with the drift bound
        let (z1, z2) = (0.25, 1.75);
        assert!(libm::fabs(c.underline(0, 3, z1) - c.underline(0, 3, z2)) <= spec.drift_bound * (z2 - z1) + 1e-12);
    }

    #[test]
    fn single_player_collapse_at_zero_slope() {
        // b(a) = a, f = 0: the bracket at z = 0 is W_xx / 2.
        let spec = DiffusionGameSpec::new(1.0, vec![vec![-1.0, 0.0, 1.0]], |_, _, a| a[0], |_, _, _, _| 0.0, |x, _| x, 1.0, 10.0).unwrap();
        let c = CoupledCost::at(&spec, 0.0, 0.0);
        let grads = Gradients {
            w_xx: 0.8,
            w_y: vec![1.0],
            w_yy: vec![vec![2.0]],
            w_xy: vec![0.0],
        };
        let h = hamiltonian(&c, &[0.0], &grads);
        assert!((h.value - 0.4).abs() < 1e-15);
        // with slopes allowed, underline = -|z| and the bracket is
        // 0.4 + z^2 + |z|, still minimized at z = 0
        let h = hamiltonian(&c, &[-1.0, -0.5, 0.0, 0.5, 1.0], &grads);
        assert_eq!(h.z, [0.0]);
    }

    #[test]
    fn bounds_are_checked() {
        let spec = DiffusionGameSpec::new(1.0, vec![vec![-2.0, 2.0]], |_, _, a| a[0], |_, _, _, _| 0.0, |_, _| 0.0, 1.0, 1.0).unwrap();
        assert!(spec.check_bounds(&[0.0], &[0.0]).is_err());
        assert!(flat(1).check_bounds(&[0.0, 0.5], &[-1.0, 1.0]).is_ok());
    }
}

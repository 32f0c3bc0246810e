//! Explicit backward solver for the value `W(t, x, y)` on a box.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{gap_cost, hamiltonian, next_digits, CoupledCost, DiffusionGameSpec, Gradients};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Semi-Lagrangian differences along `(1, z)` with the y-drift carried
    /// in the foot and multilinear interpolation in `y`. Every step is a
    /// convex combination, so `W` stays nonnegative.
    Monotone,
    /// Central differences fed to [`hamiltonian`]. Not monotone.
    Central,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub x_range: (f64, f64),
    pub nx: usize,
    /// The same interval is used for every player's coordinate.
    pub y_range: (f64, f64),
    pub ny: usize,
    /// Slopes `z` range over `nz` evenly spaced values in `[-z_max, z_max]`.
    pub z_max: f64,
    pub nz: usize,
    /// Factor applied to the stability limit when choosing the time step.
    pub safety: f64,
    /// Fixed time step; rejected if above the stability limit.
    pub time_step: Option<f64>,
    pub scheme: Scheme,
    /// Directional differences reach this many x-cells; by default about
    /// `0.8 / sqrt(hx)`, so the reach shrinks like the square root of the mesh.
    pub stencil: Option<usize>,
    /// Number of evenly spaced time layers kept, including both ends.
    pub saved_layers: usize,
    /// Nodal threshold is `delta_factor * (hx + hy + sqrt(ht))`.
    pub delta_factor: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_range: (-3.0, 3.0),
            nx: 41,
            y_range: (-3.0, 3.0),
            ny: 41,
            z_max: 1.5,
            nz: 31,
            safety: 0.5,
            time_step: None,
            scheme: Scheme::Monotone,
            stencil: None,
            saved_layers: 11,
            delta_factor: 0.25,
        }
    }
}

impl GridConfig {
    fn validate(&self, players: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.nx < 3 || self.ny < 3 {
            return bad("grids need at least three nodes per axis");
        }
        if !(self.x_range.0 < self.x_range.1) || !(self.y_range.0 < self.y_range.1) {
            return bad("empty grid interval");
        }
        if self.nz == 0 || !(self.z_max >= 0.0) {
            return bad("slope grid is empty");
        }
        if matches!(self.stencil, Some(r) if r == 0 || r >= self.nx) {
            return bad("stencil must be between 1 and nx - 1");
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return bad("safety factor must lie in (0, 1]");
        }
        if self.saved_layers < 2 {
            return bad("at least two layers must be kept");
        }
        let nodes = (self.ny as u128).checked_pow(players as u32).map(|n| n * self.nx as u128);
        if nodes.is_none_or(|n| n > 1 << 26) {
            return Err(Error::CapExceeded {
                what: "grid nodes",
                required: nodes.unwrap_or(u128::MAX),
                cap: 1 << 26,
            });
        }
        Ok(())
    }

    pub fn stencil_cells(&self) -> usize {
        let hx = (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64;
        self.stencil
            .unwrap_or_else(|| (libm::round(0.8 / libm::sqrt(hx)) as usize).max(1))
            .min(self.nx - 1)
    }

    pub fn z_grid(&self) -> Vec<f64> {
        if self.nz == 1 {
            return vec![0.0];
        }
        let h = 2.0 * self.z_max / (self.nz - 1) as f64;
        (0..self.nz).map(|k| -self.z_max + k as f64 * h).collect()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { hi } else { lo + k as f64 * h }).collect()
}

/// The solution on the grid at the kept time layers.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeField {
    pub players: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub hx: f64,
    pub hy: f64,
    pub ht: f64,
    pub steps: usize,
    pub z_max: f64,
    pub delta_factor: f64,
    /// Increasing times of the kept layers; the first is 0, the last the horizon.
    pub times: Vec<f64>,
    /// One flattened layer per kept time: x slowest, then `y_1, ..., y_N`.
    pub layers: Vec<Vec<f64>>,
    /// Smallest value seen at any node and any step.
    pub min_value: f64,
}

impl PdeField {
    pub fn ny_total(&self) -> usize {
        self.y.len().pow(self.players as u32)
    }

    pub fn index(&self, ix: usize, iy: &[usize]) -> usize {
        ix * self.ny_total() + iy.iter().fold(0, |acc, &k| acc * self.y.len() + k)
    }

    pub fn value(&self, layer: usize, ix: usize, iy: &[usize]) -> f64 {
        self.layers[layer][self.index(ix, iy)]
    }

    /// Kept layer within half a step of `t`.
    pub fn layer_at(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&s| libm::fabs(s - t) <= 0.5 * self.ht + 1e-12)
            .ok_or_else(|| Error::InvalidArgument(format!("no kept layer at t = {t}")))
    }

    /// Grid index of `x`.
    pub fn x_index(&self, x: f64) -> Result<usize> {
        let tol = 1e-9 * (1.0 + libm::fabs(x));
        self.x
            .iter()
            .position(|&s| libm::fabs(s - x) <= tol.max(1e-6 * self.hx))
            .ok_or_else(|| Error::InvalidArgument(format!("x = {x} is not a grid node")))
    }

    /// Largest deviation of the kept terminal layer from `sum_i |g_i(x) - y_i|^2`.
    pub fn terminal_error(&self, spec: &DiffusionGameSpec) -> f64 {
        let last = self.layers.last().expect("the terminal layer is kept");
        let ny = self.y.len();
        let mut worst = 0.0f64;
        for (ix, &x) in self.x.iter().enumerate() {
            let g: Vec<f64> = (0..self.players).map(|i| spec.terminal_cost(x, i)).collect();
            for flat in 0..self.ny_total() {
                let mut iy = vec![0usize; self.players];
                let mut rest = flat;
                for i in (0..self.players).rev() {
                    iy[i] = rest % ny;
                    rest /= ny;
                }
                let exact: f64 = (0..self.players).map(|i| square(g[i] - self.y[iy[i]])).sum();
                worst = worst.max(libm::fabs(last[ix * self.ny_total() + flat] - exact));
            }
        }
        worst
    }

    /// The default nodal threshold of this grid.
    pub fn default_delta(&self) -> f64 {
        self.delta_factor * (self.hx + self.hy + libm::sqrt(self.ht))
    }
}

struct Grid {
    players: usize,
    nx: usize,
    ny: usize,
    nyt: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    hx: f64,
    hy: f64,
    inv_hy: f64,
    /// `ny^(N - 1 - i)`: flat stride of player `i`'s coordinate.
    stride: Vec<usize>,
}

impl Grid {
    fn new(cfg: &GridConfig, players: usize) -> Self {
        let x = linspace(cfg.x_range.0, cfg.x_range.1, cfg.nx);
        let y = linspace(cfg.y_range.0, cfg.y_range.1, cfg.ny);
        let stride = (0..players).map(|i| cfg.ny.pow((players - 1 - i) as u32)).collect();
        Self {
            players,
            nx: cfg.nx,
            ny: cfg.ny,
            nyt: cfg.ny.pow(players as u32),
            hx: (cfg.x_range.1 - cfg.x_range.0) / (cfg.nx - 1) as f64,
            hy: (cfg.y_range.1 - cfg.y_range.0) / (cfg.ny - 1) as f64,
            inv_hy: (cfg.ny - 1) as f64 / (cfg.y_range.1 - cfg.y_range.0),
            x,
            y,
            stride,
        }
    }

    fn decode(&self, mut flat: usize, out: &mut [usize]) {
        for i in (0..self.players).rev() {
            out[i] = flat % self.ny;
            flat /= self.ny;
        }
    }

    /// Cell index and weight of the upper node for coordinate `v`, clamped
    /// to the box.
    fn locate(&self, v: f64) -> (usize, f64) {
        let s = ((v - self.y[0]) * self.inv_hy).clamp(0.0, (self.ny - 1) as f64);
        // s is nonnegative, so truncation is the floor
        let k = (s as usize).min(self.ny - 2);
        (k, s - k as f64)
    }

    /// Multilinear interpolation of the x-slice `slice` at `point`, clamped
    /// to the box.
    fn interpolate(&self, slice: &[f64], point: &[f64]) -> f64 {
        match self.players {
            1 => {
                let (k, w) = self.locate(point[0]);
                (1.0 - w) * slice[k] + w * slice[k + 1]
            }
            2 => {
                let (k0, w0) = self.locate(point[0]);
                let (k1, w1) = self.locate(point[1]);
                let at = k0 * self.ny + k1;
                let lo = (1.0 - w1) * slice[at] + w1 * slice[at + 1];
                let hi = (1.0 - w1) * slice[at + self.ny] + w1 * slice[at + self.ny + 1];
                (1.0 - w0) * lo + w0 * hi
            }
            n => {
                let mut base = 0;
                let mut frac = [0.0f64; 8];
                for i in 0..n {
                    let (k, w) = self.locate(point[i]);
                    frac[i] = w;
                    base += k * self.stride[i];
                }
                let mut total = 0.0;
                for corner in 0..1usize << n {
                    let mut w = 1.0;
                    let mut idx = base;
                    for i in 0..n {
                        if corner >> i & 1 == 1 {
                            w *= frac[i];
                            idx += self.stride[i];
                        } else {
                            w *= 1.0 - frac[i];
                        }
                    }
                    total += w * slice[idx];
                }
                total
            }
        }
    }
}

/// Solves backward from the exact terminal layer `sum_i |g_i(x) - y_i|^2`
/// to time 0.
///
/// Boundaries are handled by clamping: off-box points take the nearest
/// boundary value, which keeps the monotone scheme monotone.
pub fn solve_w(spec: &DiffusionGameSpec, cfg: &GridConfig) -> Result<PdeField> {
    let players = spec.players();
    if players > 3 {
        return Err(Error::InvalidArgument("at most three players are supported".into()));
    }
    cfg.validate(players)?;
    let grid = Grid::new(cfg, players);
    let z_grid = cfg.z_grid();
    let probe_times = [0.0, 0.5 * spec.horizon, spec.horizon];
    spec.check_bounds(&probe_times, &grid.x)?;

    let stencil = cfg.stencil_cells();
    let k = stencil as f64 * grid.hx;
    let mut limit = (grid.hx * grid.hx).min(grid.hy * grid.hy / (1.0 + cfg.z_max * cfg.z_max));
    if cfg.scheme == Scheme::Monotone {
        limit = limit.min(k * k);
    }
    limit *= cfg.safety;
    let ht = match cfg.time_step {
        Some(step) if step > limit || !(step > 0.0) => return Err(Error::Cfl { step, limit }),
        Some(step) => step,
        None => limit,
    };
    let steps = libm::ceil(spec.horizon / ht - 1e-9).max(1.0) as usize;
    let ht = spec.horizon / steps as f64;
    let stride = (steps / (cfg.saved_layers - 1)).max(1);

    let mut current = vec![0.0; grid.nx * grid.nyt];
    let mut iy = vec![0usize; players];
    for ix in 0..grid.nx {
        let g: Vec<f64> = (0..players).map(|i| spec.terminal_cost(grid.x[ix], i)).collect();
        for flat in 0..grid.nyt {
            grid.decode(flat, &mut iy);
            current[ix * grid.nyt + flat] = (0..players).map(|i| square(g[i] - grid.y[iy[i]])).sum();
        }
    }
    let mut min_value = current.iter().copied().fold(f64::INFINITY, f64::min);
    let mut times = vec![spec.horizon];
    let mut layers = vec![current.clone()];
    let mut next = vec![0.0; current.len()];

    for n in (0..steps).rev() {
        let t_known = (n + 1) as f64 * ht;
        match cfg.scheme {
            Scheme::Monotone => monotone_step(spec, &grid, stencil, &z_grid, t_known, ht, &current, &mut next),
            Scheme::Central => central_step(spec, &grid, &z_grid, t_known, ht, &current, &mut next),
        }
        if let Some(pos) = next.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite value at node {pos} after stepping to t = {}; try a smaller time step",
                n as f64 * ht
            )));
        }
        min_value = next.iter().copied().fold(min_value, f64::min);
        core::mem::swap(&mut current, &mut next);
        if n % stride == 0 {
            times.push(n as f64 * ht);
            layers.push(current.clone());
        }
    }
    times.reverse();
    layers.reverse();
    Ok(PdeField {
        players,
        x: grid.x,
        y: grid.y,
        hx: grid.hx,
        hy: grid.hy,
        ht,
        steps,
        z_max: cfg.z_max,
        delta_factor: cfg.delta_factor,
        times,
        layers,
        min_value,
    })
}

/// `gap^(3/2)` and the y-drift `-underline` per joint action, player and
/// slope index.
fn tables(spec: &DiffusionGameSpec, t: f64, x: f64, z_grid: &[f64]) -> (CoupledCost, Vec<f64>, Vec<f64>) {
    let c = CoupledCost::at(spec, t, x);
    let (total, players, nz) = (c.joint().total(), c.joint().players(), z_grid.len());
    let mut gap = vec![0.0; total * players * nz];
    let mut drift = vec![0.0; total * players * nz];
    for a in 0..total {
        for i in 0..players {
            for (kz, &z) in z_grid.iter().enumerate() {
                let at = (a * players + i) * nz + kz;
                gap[at] = gap_cost(c.delta(i, a, z));
                drift[at] = -c.underline(i, a, z);
            }
        }
    }
    (c, gap, drift)
}

/// One backward step of the monotone scheme. For each slope `z` and joint
/// action the operator is `(avg - W) / k^2` plus the gap costs, where `avg`
/// averages `W` at the feet `(x +- k, y +- z k + c k^2)` and `c` is the
/// y-drift. Joint actions with the same y-drift share their interpolations.
#[allow(clippy::too_many_arguments)]
fn monotone_step(
    spec: &DiffusionGameSpec,
    grid: &Grid,
    stencil: usize,
    z_grid: &[f64],
    t: f64,
    ht: f64,
    known: &[f64],
    out: &mut [f64],
) {
    let players = grid.players;
    let nz = z_grid.len();
    let combos = nz.pow(players as u32);
    let k = stencil as f64 * grid.hx;
    let mut digits = vec![0usize; players];
    let mut iy = vec![0usize; players];
    let mut plus_pt = vec![0.0; players];
    let mut minus_pt = vec![0.0; players];

    for ix in 0..grid.nx {
        let (c, gap, drift) = tables(spec, t, grid.x[ix], z_grid);
        let total = c.joint().total();
        let row = |a: usize| &drift[a * players * nz..(a + 1) * players * nz];
        // Representatives of joint actions with equal y-drift, and per
        // representative and slope combination the cheapest gap cost.
        let mut reps: Vec<usize> = Vec::new();
        let mut class_gap: Vec<Vec<f64>> = Vec::new();
        for a in 0..total {
            let class = match reps.iter().position(|&r| row(r) == row(a)) {
                Some(pos) => pos,
                None => {
                    reps.push(a);
                    class_gap.push(vec![f64::INFINITY; combos]);
                    reps.len() - 1
                }
            };
            digits.iter_mut().for_each(|d| *d = 0);
            for slot in class_gap[class].iter_mut() {
                let cost: f64 = (0..players).map(|i| gap[(a * players + i) * nz + digits[i]]).sum();
                *slot = slot.min(cost);
                next_digits(&mut digits, nz);
            }
        }
        let ixp = (ix + stencil).min(grid.nx - 1);
        let ixm = ix.saturating_sub(stencil);
        let here = &known[ix * grid.nyt..(ix + 1) * grid.nyt];
        let plus = &known[ixp * grid.nyt..(ixp + 1) * grid.nyt];
        let minus = &known[ixm * grid.nyt..(ixm + 1) * grid.nyt];

        for flat in 0..grid.nyt {
            grid.decode(flat, &mut iy);
            let w0 = here[flat];
            let mut best = f64::INFINITY;
            for (class, &a) in reps.iter().enumerate() {
                let r = row(a);
                digits.iter_mut().for_each(|d| *d = 0);
                for &cost in &class_gap[class] {
                    for i in 0..players {
                        let y = grid.y[iy[i]] + r[i * nz + digits[i]] * k * k;
                        let shift = z_grid[digits[i]] * k;
                        plus_pt[i] = y + shift;
                        minus_pt[i] = y - shift;
                    }
                    let avg = 0.5 * (grid.interpolate(plus, &plus_pt) + grid.interpolate(minus, &minus_pt));
                    best = best.min((avg - w0) / (k * k) + cost);
                    next_digits(&mut digits, nz);
                }
            }
            out[ix * grid.nyt + flat] = w0 + ht * best;
        }
    }
}

/// First and second differences along one axis with clamped neighbours;
/// the second difference shifts inward at the ends.
fn axis_diff(get: impl Fn(usize) -> f64, k: usize, n: usize, h: f64) -> (f64, f64) {
    let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
    let first = (get(hi) - get(lo)) / ((hi - lo) as f64 * h);
    let mid = k.clamp(1, n - 2);
    let second = (get(mid + 1) - 2.0 * get(mid) + get(mid - 1)) / (h * h);
    (first, second)
}

#[allow(clippy::too_many_arguments)]
fn central_step(
    spec: &DiffusionGameSpec,
    grid: &Grid,
    z_grid: &[f64],
    t: f64,
    ht: f64,
    known: &[f64],
    out: &mut [f64],
) {
    let players = grid.players;
    let mut iy = vec![0usize; players];
    let mut grads = Gradients::zero(players);
    let at = |ix: usize, flat: usize| known[ix * grid.nyt + flat];
    for ix in 0..grid.nx {
        let c = CoupledCost::at(spec, t, grid.x[ix]);
        let (xl, xh) = (ix.saturating_sub(1), (ix + 1).min(grid.nx - 1));
        let dx = (xh - xl) as f64 * grid.hx;
        for flat in 0..grid.nyt {
            grid.decode(flat, &mut iy);
            grads.w_xx = axis_diff(|k| at(k, flat), ix, grid.nx, grid.hx).1;
            for i in 0..players {
                let s = grid.stride[i];
                let base = flat - iy[i] * s;
                let (d1, d2) = axis_diff(|k| at(ix, base + k * s), iy[i], grid.ny, grid.hy);
                grads.w_y[i] = d1;
                grads.w_yy[i][i] = d2;
                let (yl, yh) = (iy[i].saturating_sub(1), (iy[i] + 1).min(grid.ny - 1));
                let dy = (yh - yl) as f64 * grid.hy;
                grads.w_xy[i] = (at(xh, base + yh * s) - at(xh, base + yl * s) - at(xl, base + yh * s) + at(xl, base + yl * s))
                    / (dx * dy);
                for j in 0..i {
                    let r = grid.stride[j];
                    let b2 = base - iy[j] * r;
                    let (jl, jh) = (iy[j].saturating_sub(1), (iy[j] + 1).min(grid.ny - 1));
                    let dyj = (jh - jl) as f64 * grid.hy;
                    let q = |a: usize, b: usize| at(ix, b2 + a * s + b * r);
                    let cross = (q(yh, jh) - q(yh, jl) - q(yl, jh) + q(yl, jl)) / (dy * dyj);
                    grads.w_yy[i][j] = cross;
                    grads.w_yy[j][i] = cross;
                }
            }
            let h = hamiltonian(&c, z_grid, &grads);
            out[ix * grid.nyt + flat] = at(ix, flat) + ht * h.value;
        }
    }
}

fn square(v: f64) -> f64 {
    v * v
}

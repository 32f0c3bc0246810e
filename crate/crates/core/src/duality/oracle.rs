use alloc::vec::Vec;

use crate::{Error, Result};

/// Grid for [`scalar_hjb`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarHjbConfig {
    pub x_range: (f64, f64),
    pub nx: usize,
    /// Fraction of the stability limit used as time step.
    pub safety: f64,
}

impl Default for ScalarHjbConfig {
    fn default() -> Self {
        Self {
            x_range: (-6.0, 6.0),
            nx: 1201,
            safety: 0.9,
        }
    }
}

/// Value at time 0 of `v_t + v_xx / 2 + min_a (a v_x + f(a)) = 0`,
/// `v(T) = g`, over the action grid, by an explicit upwind scheme.
///
/// Returns the grid and the values on it.
pub fn scalar_hjb(
    horizon: f64,
    actions: &[f64],
    running: impl Fn(f64) -> f64,
    terminal: impl Fn(f64) -> f64,
    cfg: &ScalarHjbConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if cfg.nx < 3 || actions.is_empty() || !(horizon > 0.0) {
        return Err(Error::InvalidArgument("degenerate oracle grid".into()));
    }
    let h = (cfg.x_range.1 - cfg.x_range.0) / (cfg.nx - 1) as f64;
    let xs: Vec<f64> = (0..cfg.nx).map(|k| cfg.x_range.0 + k as f64 * h).collect();
    let amax = actions.iter().fold(0.0f64, |m, a| m.max(libm::fabs(*a)));
    let limit = cfg.safety / (1.0 / (h * h) + amax / h);
    let steps = libm::ceil(horizon / limit) as usize;
    let dt = horizon / steps as f64;
    let costs: Vec<f64> = actions.iter().map(|&a| running(a)).collect();
    let mut v: Vec<f64> = xs.iter().map(|&x| terminal(x)).collect();
    let mut next = v.clone();
    let n = cfg.nx;
    for _ in 0..steps {
        for k in 0..n {
            let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
            let fwd = (v[hi] - v[k]) / h;
            let bwd = (v[k] - v[lo]) / h;
            let lap = (v[hi] - 2.0 * v[k] + v[lo]) / (h * h);
            let ham = actions
                .iter()
                .zip(&costs)
                .map(|(&a, &c)| c + if a > 0.0 { a * fwd } else { a * bwd })
                .fold(f64::INFINITY, f64::min);
            next[k] = v[k] + dt * (0.5 * lap + ham);
        }
        core::mem::swap(&mut v, &mut next);
    }
    Ok((xs, v))
}

//! Seeded generator of small random games with rational data.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{GameSpec, JointSpace, Locus, PathTree};
use crate::rational::Rational;

/// How transition rows are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Every entry positive, on the grid `k / denominator`.
    Positive,
    /// Entries on the grid, each row having at least one zero when it has
    /// more than one entry.
    WithZeros,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomConfig {
    /// Horizon drawn uniformly from this range.
    pub horizon: (usize, usize),
    /// Each state set has between 1 and this many states.
    pub max_states: usize,
    pub actions: Vec<usize>,
    /// Costs are `k / cost_denominator` with `|k| <= cost_bound`.
    pub cost_bound: i128,
    pub cost_denominator: i128,
    /// Transition probabilities are multiples of `1 / kernel_denominator`.
    pub kernel_denominator: i128,
    pub kernel: KernelMode,
    /// Key entries by prefix (a path-dependent game) instead of by state.
    pub path_dependent: bool,
}

impl Default for RandomConfig {
    fn default() -> Self {
        Self {
            horizon: (1, 3),
            max_states: 2,
            actions: vec![2, 2],
            cost_bound: 4,
            cost_denominator: 2,
            kernel_denominator: 4,
            kernel: KernelMode::Positive,
            path_dependent: true,
        }
    }
}

/// A random spec; the same seed and config always give the same spec.
pub fn random_spec(seed: u64, config: &RandomConfig) -> GameSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = config.horizon;
    let horizon = rng.gen_range(lo.max(1)..=hi.max(lo.max(1)));
    let sizes: Vec<usize> = (0..=horizon)
        .map(|_| rng.gen_range(1..=config.max_states.max(1)))
        .collect();
    let mut spec = GameSpec::with_sizes(&sizes, &config.actions);
    let joint = JointSpace::new(&config.actions);
    let tree = PathTree::new(&sizes).expect("sizes are positive");
    let cost = |rng: &mut ChaCha8Rng| {
        Rational::new(
            rng.gen_range(-config.cost_bound..=config.cost_bound),
            config.cost_denominator,
        )
    };

    for t in 0..=horizon {
        let loci: Vec<Locus> = if config.path_dependent {
            tree.nodes_at(t).map(|n| Locus::Prefix(tree.prefix(n))).collect()
        } else {
            (0..sizes[t]).map(Locus::State).collect()
        };
        for locus in loci {
            if t == horizon {
                let g = (0..config.actions.len()).map(|_| cost(&mut rng)).collect();
                spec.set_terminal_cost(locus, g);
                continue;
            }
            let f = config
                .actions
                .iter()
                .map(|&n| (0..n).map(|_| cost(&mut rng)).collect())
                .collect();
            spec.set_running_cost(t, locus.clone(), f);
            for j in 0..joint.total() {
                let row = simplex_row(&mut rng, sizes[t + 1], config.kernel_denominator, config.kernel);
                spec.set_transition(t, locus.clone(), Some(joint.decode(j)), row);
            }
        }
    }
    spec.flags.state_dependent = !config.path_dependent;
    spec.flags.positive_kernel = config.kernel == KernelMode::Positive;
    spec
}

/// A probability vector of length `len` on the grid `1 / denominator`.
fn simplex_row(rng: &mut ChaCha8Rng, len: usize, denominator: i128, mode: KernelMode) -> Vec<Rational> {
    let d = denominator.max(len as i128);
    let mut counts = vec![0i128; len];
    match mode {
        KernelMode::Positive => {
            counts.iter_mut().for_each(|c| *c = 1);
            for _ in 0..d - len as i128 {
                counts[rng.gen_range(0..len)] += 1;
            }
        }
        KernelMode::WithZeros => {
            let zero = if len > 1 { Some(rng.gen_range(0..len)) } else { None };
            for _ in 0..d {
                let mut k = rng.gen_range(0..len);
                if Some(k) == zero {
                    k = (k + 1) % len;
                }
                counts[k] += 1;
            }
        }
    }
    counts.into_iter().map(|c| Rational::new(c, d)).collect()
}

/// File-name friendly label of a generated spec.
pub fn spec_name(seed: u64, config: &RandomConfig) -> alloc::string::String {
    let kind = match config.kernel {
        KernelMode::Positive => "qpos",
        KernelMode::WithZeros => "qzero",
    };
    format!("random_{kind}_seed{seed}")
}

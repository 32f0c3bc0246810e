//! Set values of finite-horizon nonzero-sum stochastic games.
//!
//! The set value of a game at a node is the set of payoff vectors reached by
//! all of its Nash equilibria. This crate computes it exactly for discrete
//! games (rational arithmetic throughout), checks the dynamic programming
//! principle for it, selects planner-optimal equilibria, and approximates the
//! continuous-time set value as the nodal set of an auxiliary HJB equation.
//!
//! The crate is `no_std` (it needs `alloc`); the `std` feature is on by default.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]
// Negated comparisons reject NaN on purpose; several loops index parallel arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod dpp;
pub mod duality;
pub mod equilibrium;
mod error;
pub mod game;
pub mod planner;
pub mod presets;
pub mod random;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;

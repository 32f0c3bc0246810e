//! Exact rational scalars and their `p/q` text form.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// Exact rational number used for every discrete-game quantity.
///
/// Backed by `i128`; the workspace builds with overflow checks so an
/// overflowing game panics instead of silently wrapping.
pub type Rational = num_rational::Ratio<i128>;

/// A payoff vector, one entry per player.
pub type Point = Vec<Rational>;

/// Parses `"p/q"` or `"p"` (surrounding whitespace allowed).
pub fn parse(text: &str) -> Result<Rational> {
    Rational::from_str(text.trim())
        .map_err(|_| Error::InvalidSpec(alloc::format!("not a rational: {text:?}")))
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn int(value: i128) -> Rational {
    Rational::from_integer(value)
}

pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

/// Squared Euclidean distance between two points.
pub fn dist2(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .fold(Rational::zero(), |acc, v| acc + v)
}

/// Sup-norm distance between two points.
pub fn dist_sup(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(Rational::zero(), |acc, v| if v > acc { v } else { acc })
}

pub fn to_f64(value: &Rational) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

pub fn point(values: &[(i128, i128)]) -> Point {
    values.iter().map(|&(n, d)| ratio(n, d)).collect()
}

pub fn format_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(format).collect();
    alloc::format!("({})", parts.join(", "))
}

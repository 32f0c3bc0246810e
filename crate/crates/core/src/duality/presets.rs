//! Ready-made continuous-time games.

use alloc::vec;

use super::DiffusionGameSpec;

/// One player, no drift, no running cost, constant terminal cost `level`.
pub fn static_game(level: f64) -> DiffusionGameSpec {
    DiffusionGameSpec::new(1.0, vec![vec![0.0]], |_, _, _| 0.0, |_, _, _, _| 0.0, move |_, _| level, 0.0, libm::fabs(level))
        .expect("valid preset")
}

/// One player steering the drift in `{-1, 0, 1}` to minimize `sin(X_T)`.
pub fn single_player() -> DiffusionGameSpec {
    DiffusionGameSpec::new(
        1.0,
        vec![vec![-1.0, 0.0, 1.0]],
        |_, _, a| a[0],
        |_, _, _, _| 0.0,
        |x, _| libm::sin(x),
        1.0,
        1.0,
    )
    .expect("valid preset")
}

/// Two players sharing the drift `a_1 + a_2`; player 1 pays `sin(X_T)` and
/// player 2 pays `-sin(X_T)`.
pub fn zero_sum() -> DiffusionGameSpec {
    DiffusionGameSpec::new(
        1.0,
        vec![vec![-1.0, 0.0, 1.0]; 2],
        |_, _, a| a[0] + a[1],
        |_, _, _, _| 0.0,
        |x, i| if i == 0 { libm::sin(x) } else { -libm::sin(x) },
        2.0,
        1.0,
    )
    .expect("valid preset")
}

/// [`zero_sum`] with the players' roles exchanged.
pub fn zero_sum_swapped() -> DiffusionGameSpec {
    DiffusionGameSpec::new(
        1.0,
        vec![vec![-1.0, 0.0, 1.0]; 2],
        |_, _, a| a[0] + a[1],
        |_, _, _, _| 0.0,
        |x, i| if i == 0 { -libm::sin(x) } else { libm::sin(x) },
        2.0,
        1.0,
    )
    .expect("valid preset")
}

pub const NAMES: [&str; 4] = ["static", "single_player", "zero_sum", "zero_sum_swapped"];

pub fn by_name(name: &str) -> Option<DiffusionGameSpec> {
    Some(match name {
        "static" => static_game(0.5),
        "single_player" => single_player(),
        "zero_sum" => zero_sum(),
        "zero_sum_swapped" => zero_sum_swapped(),
        _ => return None,
    })
}

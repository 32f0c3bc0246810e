use proptest::prelude::*;
use setvalue_core::duality::{
    hamiltonian, nodal_set, presets, scalar_hjb, solve_w, CoupledCost, DiffusionGameSpec, Gradients, GridConfig,
    PdeField, ScalarHjbConfig, Scheme,
};
use setvalue_core::Error;

fn small(n: usize) -> GridConfig {
    GridConfig {
        nx: n,
        ny: n,
        ..GridConfig::default()
    }
}

fn check_field(spec: &DiffusionGameSpec, field: &PdeField) {
    assert!(field.min_value >= -1e-10, "W dipped to {}", field.min_value);
    assert!(field.layers.iter().flatten().all(|w| w.is_finite() && *w >= -1e-10));
    assert_eq!(field.terminal_error(spec), 0.0);
    assert_eq!(field.times.first(), Some(&0.0));
    assert_eq!(field.times.last(), Some(&spec.horizon));
}

fn shifted_sine(c: f64) -> DiffusionGameSpec {
    DiffusionGameSpec::new(
        1.0,
        vec![vec![-1.0, 0.0, 1.0]],
        |_, _, a| a[0],
        |_, _, _, _| 0.0,
        move |x, _| x.sin() + c,
        1.0,
        1.0 + c.abs(),
    )
    .unwrap()
}

#[test]
fn static_game_keeps_its_terminal_layer() {
    // Clamping at the y edges lets W leak downward there, but only where
    // it is far above any nodal threshold.
    let spec = presets::static_game(0.5);
    let field = solve_w(&spec, &small(21)).unwrap();
    check_field(&spec, &field);
    let delta = field.default_delta();
    for ix in 0..field.x.len() {
        for (k, &y) in field.y.iter().enumerate() {
            let exact = (0.5 - y).powi(2);
            let w = field.value(0, ix, &[k]);
            assert!(w <= exact + 1e-12);
            if exact < 0.9 {
                assert!((w - exact).abs() < 1e-12, "W({y}) = {w}, expected {exact}");
            } else {
                assert!(w > delta);
            }
        }
    }
}

#[test]
fn single_player_nodal_sets() {
    let spec = presets::single_player();
    let field = solve_w(&spec, &small(21)).unwrap();
    check_field(&spec, &field);

    let tight = nodal_set(&field, 0.0, 0.0, Some(field.default_delta())).unwrap();
    let loose = nodal_set(&field, 0.0, 0.0, Some(3.0 * field.default_delta())).unwrap();
    assert!(!tight.points.is_empty());
    assert!(tight.points.is_subset(&loose.points));
    let default = nodal_set(&field, 0.0, 0.0, None).unwrap();
    assert_eq!(default.delta, field.default_delta());
    assert!(!default.clusters.is_empty());
    assert!(default.min_value <= default.delta);

    // At the horizon the set is every node within sqrt(delta) of g(x).
    let x = field.x[7];
    let delta = 0.1;
    let terminal = nodal_set(&field, 1.0, x, Some(delta)).unwrap();
    let expected: Vec<Vec<f64>> = field
        .y
        .iter()
        .filter(|&&y| (x.sin() - y).powi(2) <= delta)
        .map(|&y| vec![y])
        .collect();
    assert_eq!(terminal.points.points(), expected.as_slice());

    assert!(nodal_set(&field, 0.0, 0.1234, None).is_err());
    assert!(nodal_set(&field, 0.37, 0.0, None).is_err());
}

#[test]
fn single_player_cluster_tracks_the_scalar_value() {
    let spec = presets::single_player();
    let (xs, v) = scalar_hjb(1.0, &[-1.0, 0.0, 1.0], |_| 0.0, f64::sin, &ScalarHjbConfig::default()).unwrap();
    let v0 = v[xs.iter().position(|x| x.abs() < 1e-9).unwrap()];
    assert!(v0 < -0.5 && v0 > -0.6);
    let field = solve_w(&spec, &small(41)).unwrap();
    check_field(&spec, &field);
    let ns = nodal_set(&field, 0.0, 0.0, None).unwrap();
    let cluster = &ns.clusters[0];
    assert!((cluster.centroid[0] - v0).abs() <= 5.0 * (field.hx + field.hy));
}

#[test]
fn terminal_shift_is_exact_and_interior_shift_is_close() {
    let cfg = GridConfig {
        nx: 25,
        ny: 33,
        y_range: (-4.0, 4.0),
        ..GridConfig::default()
    };
    let base_spec = shifted_sine(0.0);
    let base = solve_w(&base_spec, &cfg).unwrap();
    let moved_spec = shifted_sine(0.75);
    let moved = solve_w(&moved_spec, &cfg).unwrap();
    check_field(&moved_spec, &moved);
    assert_eq!(base.hy, 0.25);
    let last = base.layers.len() - 1;
    for ix in 0..base.x.len() {
        for k in 0..base.y.len() - 3 {
            let (a, b) = (base.value(last, ix, &[k]), moved.value(last, ix, &[k + 3]));
            assert!((a - b).abs() < 1e-12);
        }
    }
    let x = base.x[12];
    let a = nodal_set(&base, 0.0, x, None).unwrap();
    let b = nodal_set(&moved, 0.0, x, None).unwrap();
    let shift = b.clusters[0].centroid[0] - a.clusters[0].centroid[0];
    assert!((shift - 0.75).abs() <= base.hy, "shift {shift}");
}

#[test]
fn central_scheme_runs() {
    let spec = presets::single_player();
    let cfg = GridConfig {
        scheme: Scheme::Central,
        ..small(15)
    };
    let field = solve_w(&spec, &cfg).unwrap();
    assert_eq!(field.terminal_error(&spec), 0.0);
    assert!(field.layers.iter().flatten().all(|w| w.is_finite()));
}

#[test]
fn zero_sum_is_mirror_symmetric() {
    let cfg = GridConfig {
        nx: 13,
        ny: 13,
        nz: 5,
        z_max: 1.0,
        ..GridConfig::default()
    };
    let spec = presets::zero_sum();
    let field = solve_w(&spec, &cfg).unwrap();
    check_field(&spec, &field);
    let swapped_spec = presets::zero_sum_swapped();
    let swapped = solve_w(&swapped_spec, &cfg).unwrap();
    check_field(&swapped_spec, &swapped);
    let n = field.x.len();
    let ny = field.y.len();
    let mut worst = 0.0f64;
    for ix in 0..n {
        for j in 0..ny {
            for k in 0..ny {
                let w = field.value(0, ix, &[j, k]);
                worst = worst.max((w - swapped.value(0, ix, &[k, j])).abs());
                // x -> -x exchanges the roles as well.
                worst = worst.max((w - field.value(0, n - 1 - ix, &[k, j])).abs());
            }
        }
    }
    assert!(worst < 1e-9, "asymmetry {worst}");
    let a = nodal_set(&field, 0.0, 0.0, None).unwrap();
    let b = nodal_set(&swapped, 0.0, 0.0, None).unwrap();
    let (ca, cb) = (&a.clusters[0].centroid, &b.clusters[0].centroid);
    assert!((ca[0] - cb[1]).abs() < 1e-9 && (ca[1] - cb[0]).abs() < 1e-9);
}

#[test]
fn zero_sum_centroid_approaches_the_antidiagonal() {
    // The exact set value at x = 0 is {(0, 0)}; the coarse grids bias both
    // coordinates low by O(h).
    let mut sums = Vec::new();
    for n in [13, 21] {
        let cfg = GridConfig {
            nx: n,
            ny: n,
            nz: 7,
            z_max: 1.0,
            ..GridConfig::default()
        };
        let field = solve_w(&presets::zero_sum(), &cfg).unwrap();
        let ns = nodal_set(&field, 0.0, 0.0, None).unwrap();
        let c = &ns.clusters[0].centroid;
        let sum = (c[0] + c[1]).abs();
        assert!(sum <= 2.0 * (field.hx + field.hy), "|y1 + y2| = {sum} on {n} nodes");
        sums.push(sum);
    }
    assert!(sums[1] < sums[0], "{sums:?}");
}

#[test]
fn bad_configurations() {
    let spec = presets::single_player();
    let cfg = GridConfig {
        time_step: Some(0.5),
        ..small(21)
    };
    assert!(matches!(solve_w(&spec, &cfg), Err(Error::Cfl { .. })));
    let cfg = GridConfig { nx: 2, ..small(21) };
    assert!(matches!(solve_w(&spec, &cfg), Err(Error::InvalidArgument(_))));
    let cfg = GridConfig {
        ny: 1 << 14,
        ..GridConfig::default()
    };
    assert!(matches!(solve_w(&presets::zero_sum(), &cfg), Err(Error::CapExceeded { .. })));
    let loud = DiffusionGameSpec::new(1.0, vec![vec![0.0]], |_, _, _| 0.0, |_, _, _, _| 0.0, |x, _| 10.0 * x, 0.0, 1.0).unwrap();
    assert!(solve_w(&loud, &small(11)).is_err());
    assert!(DiffusionGameSpec::new(0.0, vec![vec![0.0]], |_, _, _| 0.0, |_, _, _, _| 0.0, |_, _| 0.0, 0.0, 0.0).is_err());
}

// Direct minimization of the bracket over joint actions and slopes.
fn bracket_oracle(coupled: &CoupledCost, z_grid: &[f64], g: &Gradients) -> f64 {
    let joint = coupled.joint();
    let players = joint.players();
    let mut best = f64::INFINITY;
    for a in 0..joint.total() {
        let combos = z_grid.len().pow(players as u32);
        for c in 0..combos {
            let z: Vec<f64> = (0..players).map(|i| z_grid[(c / z_grid.len().pow(i as u32)) % z_grid.len()]).collect();
            let mut v = 0.5 * g.w_xx;
            for i in 0..players {
                let d = coupled.delta(i, a, z[i]);
                v += d.powf(1.5) - coupled.underline(i, a, z[i]) * g.w_y[i] + z[i] * g.w_xy[i];
                for j in 0..players {
                    v += 0.5 * z[i] * z[j] * g.w_yy[i][j];
                }
            }
            best = best.min(v);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_matches_direct_minimization(
        x in -2.0f64..2.0,
        wxx in -2.0f64..2.0,
        wy in prop::collection::vec(-2.0f64..2.0, 2),
        wyy in prop::collection::vec(0.0f64..2.0, 3),
        wxy in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let spec = presets::zero_sum();
        let coupled = CoupledCost::at(&spec, 0.3, x);
        let g = Gradients {
            w_xx: wxx,
            w_y: wy,
            w_yy: vec![vec![wyy[0], wyy[1]], vec![wyy[1], wyy[2]]],
            w_xy: wxy,
        };
        let coarse: Vec<f64> = (0..5).map(|k| -1.0 + 0.5 * k as f64).collect();
        let fine: Vec<f64> = (0..9).map(|k| -1.0 + 0.25 * k as f64).collect();
        let h = hamiltonian(&coupled, &coarse, &g);
        prop_assert!((h.value - bracket_oracle(&coupled, &coarse, &g)).abs() < 1e-12);
        prop_assert!(hamiltonian(&coupled, &fine, &g).value <= h.value + 1e-12);
        for i in 0..2 {
            for a in 0..coupled.joint().total() {
                for &z in &fine {
                    prop_assert!(coupled.delta(i, a, z) >= 0.0);
                    // The lower envelope is Lipschitz in z with the drift bound.
                    let step = 0.25;
                    let jump = (coupled.underline(i, a, z + step) - coupled.underline(i, a, z)).abs();
                    prop_assert!(jump <= spec.drift_bound * step + 1e-12);
                }
            }
        }
    }
}

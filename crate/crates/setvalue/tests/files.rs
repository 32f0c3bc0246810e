use proptest::prelude::*;
use setvalue::pde_file::{read_field, write_field, PdeConfigFile};
use setvalue::spec_file::{spec_to_json, SpecFile};
use setvalue::CliError;
use setvalue_core::duality::{presets, solve_w, GridConfig};
use setvalue_core::game::Locus;
use setvalue_core::random::{random_spec, KernelMode, RandomConfig};
use setvalue_core::Rational;

fn parse(text: &str) -> Result<setvalue_core::game::GameSpec, CliError> {
    SpecFile::from_json(text)?.to_spec()
}

#[test]
fn extreme_rationals_survive() {
    let mut spec = setvalue_core::presets::table1();
    let big = Rational::new(i64::MAX as i128 * 3 + 1, 7);
    spec.set_terminal_cost(Locus::State(0), vec![big, -big]);
    let back = parse(&spec_to_json(&spec)).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn malformed_files_are_validation_errors() {
    let good = spec_to_json(&setvalue_core::presets::example_path());
    assert!(parse(&good).is_ok());
    for bad in [
        good.replace("\"horizon\"", "\"horizn\""),
        good.replace("\"1/2\"", "\"1/0\""),
        good.replace("\"1/2\"", "\"half\""),
        good.replace("\"1/4\"", "\"1/3\""),
        good.replace("\"s11\"", "\"s10\""),
        String::from("{"),
    ] {
        let err = parse(&bad).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
    }
}

#[test]
fn field_round_trip_is_bit_exact() {
    let cfg = GridConfig {
        nx: 9,
        ny: 9,
        ..GridConfig::default()
    };
    let field = solve_w(&presets::single_player(), &cfg).unwrap();
    let mut bytes = Vec::new();
    write_field(&mut bytes, &field).unwrap();
    let (header, layers) = read_field(&bytes).unwrap();
    assert_eq!(header.dims, vec![9, 9]);
    assert_eq!(header.times, field.times);
    let same = layers
        .iter()
        .flatten()
        .zip(field.layers.iter().flatten())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    assert!(same && layers.len() == field.layers.len());

    assert!(read_field(&bytes[..bytes.len() - 3]).is_err());
    let mut wrong = bytes.clone();
    wrong[0] = b'X';
    assert!(read_field(&wrong).is_err());
}

#[test]
fn solver_config_defaults_and_errors() {
    let cfg = PdeConfigFile::from_json("{}").unwrap();
    assert_eq!(cfg.grid().unwrap(), GridConfig::default());
    let cfg = PdeConfigFile::from_json(r#"{"nx": 21, "scheme": "central"}"#).unwrap();
    assert_eq!(cfg.grid().unwrap().nx, 21);
    assert!(PdeConfigFile::from_json(r#"{"nx": 21, "extra": 1}"#).is_err());
    let cfg = PdeConfigFile::from_json(r#"{"scheme": "implicit"}"#).unwrap();
    assert!(cfg.grid().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_round_trip(seed in any::<u64>(), zeros in any::<bool>(), state_keyed in any::<bool>()) {
        let cfg = RandomConfig {
            kernel: if zeros { KernelMode::WithZeros } else { KernelMode::Positive },
            path_dependent: !state_keyed,
            ..RandomConfig::default()
        };
        let spec = random_spec(seed, &cfg);
        let text = spec_to_json(&spec);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(spec_to_json(&back), text);
    }
}

//! The shipped example files must describe exactly the library presets.
//! Run with `SETVALUE_REGENERATE=1` to rewrite them.

use setvalue::examples;
use setvalue::spec_file::{spec_to_json, SpecFile};
use setvalue_core::presets;
use setvalue_core::rational::ratio;

fn expected(name: &str) -> setvalue_core::game::GameSpec {
    match name {
        "example_pareto" => presets::example_pareto(ratio(1, 100)).unwrap(),
        other => presets::by_name(other).unwrap(),
    }
}

#[test]
fn data_files_match_presets() {
    let regenerate = std::env::var_os("SETVALUE_REGENERATE").is_some();
    for (name, text) in examples::FILES {
        let spec = expected(name);
        if regenerate {
            let path = format!("{}/data/{name}.json", env!("CARGO_MANIFEST_DIR"));
            std::fs::write(path, spec_to_json(&spec)).unwrap();
            continue;
        }
        assert_eq!(text, spec_to_json(&spec), "{name}.json is stale");
        assert_eq!(SpecFile::from_json(text).unwrap().to_spec().unwrap(), spec);
        assert_eq!(examples::load(name).unwrap(), spec);
    }
}

#[test]
fn every_preset_has_a_file() {
    let names: Vec<&str> = examples::names().collect();
    for n in presets::NAMES {
        assert!(names.contains(&n), "{n} has no data file");
    }
}

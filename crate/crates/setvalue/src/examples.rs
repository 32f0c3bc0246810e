//! The named example games, shipped as spec files.

use setvalue_core::game::GameSpec;

use crate::error::{CliError, CliResult};
use crate::spec_file::SpecFile;

/// `(name, file contents)` of every shipped example.
pub const FILES: [(&str, &str); 6] = [
    ("table1", include_str!("../data/table1.json")),
    ("table2_left", include_str!("../data/table2_left.json")),
    ("table2_right", include_str!("../data/table2_right.json")),
    ("example_path", include_str!("../data/example_path.json")),
    ("example_state", include_str!("../data/example_state.json")),
    ("example_pareto", include_str!("../data/example_pareto.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

pub fn load(name: &str) -> CliResult<GameSpec> {
    let name = name.replace('-', "_");
    let (_, text) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Validation(format!("unknown example {name:?}; try `examples list`")))?;
    SpecFile::from_json(text)?.to_spec()
}

//! Bundled scenarios.
//!
//! The files are compiled in; setting `DIVCODE_FIXTURES` to a directory
//! makes `<dir>/<name>.toml` take precedence.

use std::path::{Path as FsPath, PathBuf};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

pub const FIXTURE_DIR_ENV: &str = "DIVCODE_FIXTURES";

const EMBEDDED: [(&str, &str); 5] = [
    ("sink-five", include_str!("../fixtures/sink-five.toml")),
    ("relay-star", include_str!("../fixtures/relay-star.toml")),
    ("cost239-reconstruction", include_str!("../fixtures/cost239-reconstruction.toml")),
    ("uslong-reconstruction", include_str!("../fixtures/uslong-reconstruction.toml")),
    ("synthetic-reconstruction", include_str!("../fixtures/synthetic-reconstruction.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    EMBEDDED.iter().map(|(n, _)| *n)
}

fn override_path(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(FIXTURE_DIR_ENV)?;
    let path = FsPath::new(&dir).join(format!("{name}.toml"));
    path.is_file().then_some(path)
}

/// Scenario text for a bundled fixture, honoring the directory override.
pub fn text(name: &str) -> Result<String> {
    if let Some(path) = override_path(name) {
        return std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        });
    }
    EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| (*t).to_string())
        .ok_or_else(|| Error::Validation(format!("no fixture named {name:?}")))
}

pub fn load(name: &str) -> Result<Scenario> {
    Scenario::parse(&text(name)?)
}

/// A scenario argument is a file path if one exists there, else a fixture name.
pub fn resolve(arg: &str) -> Result<Scenario> {
    let path = FsPath::new(arg);
    if path.exists() || !names().any(|n| n == arg) {
        return Scenario::load(path);
    }
    load(arg)
}

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

use convalg_core::text::{parse_structure, parse_topology};
use convalg_core::{Error, FiniteTopology, HeytingLattice, RelationalStructure};

/// Reads and parses `path`, reporting errors as `path:line: message`.
pub fn load<T>(path: &Path, parse: impl FnOnce(&str) -> convalg_core::Result<T>) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).map_err(|e| match e {
        Error::Parse { line, msg } => anyhow!("{}:{line}: {msg}", path.display()),
        other => anyhow!("{}: {other}", path.display()),
    })
}

pub fn load_structure(path: &Path) -> Result<RelationalStructure> {
    load(path, parse_structure)
}

pub fn load_topology(path: &Path) -> Result<FiniteTopology> {
    load(path, parse_topology)
}

/// `chain:n` or the path of a topology file.
pub fn load_lattice(spec: &str) -> Result<HeytingLattice> {
    match spec.strip_prefix("chain:") {
        Some(n) => {
            let n: u32 = n
                .parse()
                .with_context(|| format!("bad chain size in `{spec}`"))?;
            Ok(HeytingLattice::chain(n)?)
        }
        None => Ok(HeytingLattice::open_sets(&load_topology(Path::new(spec))?)),
    }
}

//! Corpus files on disk: `corpus/<table>/<id>.grp`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use grouforge_core::constructors::{realize_built, Built, ConstructSpec, Extension};
use grouforge_core::GroupError;

pub const EXTENSION: &str = "grp";

#[derive(Clone, Debug)]
pub struct Corpus {
    root: PathBuf,
}

/// A corpus entry realized as an enumerated group.
pub struct Realized {
    pub reference: String,
    pub extension: Extension,
    pub metadata: BTreeMap<String, String>,
}

impl Corpus {
    /// `root` is the directory holding `corpus/` and `expected/`.
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Corpus { root: root.into() }
    }

    /// Uses `GROUFORGE_ROOT` if set, else the nearest ancestor of the working
    /// directory that contains a `corpus` directory.
    pub fn locate() -> Result<Self> {
        if let Ok(r) = std::env::var("GROUFORGE_ROOT") {
            return Ok(Corpus::new(r));
        }
        let cwd = std::env::current_dir()?;
        cwd.ancestors()
            .find(|d| d.join("corpus").is_dir())
            .map(Corpus::new)
            .ok_or_else(|| anyhow!("no corpus directory above {}; set GROUFORGE_ROOT", cwd.display()))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn expected_path(&self, table: &str) -> PathBuf {
        self.root.join("expected").join(format!("{table}.tsv"))
    }

    /// Accepts `<table>/<id>` or a path to a file.
    pub fn path_of(&self, reference: &str) -> PathBuf {
        let p = Path::new(reference);
        if p.is_file() {
            return p.to_path_buf();
        }
        self.root.join("corpus").join(format!("{reference}.{EXTENSION}"))
    }

    pub fn read(&self, reference: &str) -> Result<(ConstructSpec, BTreeMap<String, String>)> {
        let path = self.path_of(reference);
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        ConstructSpec::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn build(&self, reference: &str) -> Result<Built> {
        let (spec, metadata) = self.read(reference)?;
        let resolve = |r: &str| -> grouforge_core::Result<ConstructSpec> {
            self.read(r).map(|(s, _)| s).map_err(|e| GroupError::Construction(format!("{e:#}")))
        };
        let mut built = spec.build(&resolve).with_context(|| format!("building {reference}"))?;
        built.metadata = metadata;
        if built.presentation.name.is_empty() {
            built.presentation.name = built.metadata.get("name").cloned().unwrap_or_else(|| reference.to_string());
        }
        Ok(built)
    }

    pub fn realize(&self, reference: &str) -> Result<Realized> {
        let built = self.build(reference)?;
        let extension = realize_built(&built).with_context(|| format!("realizing {reference}"))?;
        Ok(Realized { reference: reference.to_string(), extension, metadata: built.metadata })
    }

    /// Entry ids of a table, in natural order.
    pub fn entries(&self, table: &str) -> Result<Vec<String>> {
        let dir = self.root.join("corpus").join(table);
        let mut ids = Vec::new();
        for e in fs::read_dir(&dir).with_context(|| format!("listing {}", dir.display()))? {
            let path = e?.path();
            if path.extension().and_then(|x| x.to_str()) == Some(EXTENSION) {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(format!("{table}/{stem}"));
                }
            }
        }
        ids.sort_by(|a, b| natural_cmp(a, b));
        Ok(ids)
    }

    /// Expands a space-separated list of references; `<table>/*` selects a whole table.
    pub fn expand(&self, patterns: &str) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for p in patterns.split_whitespace() {
            match p.strip_suffix("/*") {
                Some(table) => out.extend(self.entries(table)?),
                None => {
                    if !self.path_of(p).is_file() {
                        bail!("no corpus entry `{p}`");
                    }
                    out.push(p.to_string());
                }
            }
        }
        Ok(out)
    }
}

/// Orders strings so that embedded numbers compare by value (`4/9` < `4/10`).
pub fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    fn chunks(s: &str) -> Vec<(bool, String)> {
        let mut out: Vec<(bool, String)> = Vec::new();
        for c in s.chars() {
            let digit = c.is_ascii_digit();
            match out.last_mut() {
                Some((d, buf)) if *d == digit => buf.push(c),
                _ => out.push((digit, c.to_string())),
            }
        }
        out
    }
    let (x, y) = (chunks(a), chunks(b));
    for (p, q) in x.iter().zip(&y) {
        let ord = match (p.0, q.0) {
            (true, true) => {
                let (u, v) = (p.1.trim_start_matches('0'), q.1.trim_start_matches('0'));
                u.len().cmp(&v.len()).then_with(|| u.cmp(v))
            }
            _ => p.1.cmp(&q.1),
        };
        if ord.is_ne() {
            return ord;
        }
    }
    x.len().cmp(&y.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut v = vec!["4/10", "4/9", "4A/x", "4/29"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, vec!["4/9", "4/10", "4/29", "4A/x"]);
    }
}

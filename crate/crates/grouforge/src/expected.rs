//! Expected-value tables: `expected/<table>.tsv`.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// How expensive a row is to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Slow,
    Capacity,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Fast => "fast",
            Tier::Slow => "slow",
            Tier::Capacity => "capacity",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Yes,
    No,
}

impl Flag {
    pub fn is_yes(self) -> bool {
        self == Flag::Yes
    }
}

/// One row of an expected-value table.  Empty cells are not checked.
///
/// `group` names a corpus entry, except in the `dedup` table where it holds
/// the space-separated patterns of the catalog to partition.  `tower` lists the
/// orders of Aut(G), Aut(Aut(G)), … separated by commas; the last one is
/// expected to be complete unless the row is capacity tier.  An `iso` value
/// of `!ref` asserts non-isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub id: String,
    pub group: String,
    pub order: Option<u64>,
    pub ncl: Option<usize>,
    pub structure: Option<String>,
    pub center: Option<usize>,
    pub aut: Option<u128>,
    pub complete: Option<Flag>,
    pub tower: Option<String>,
    pub iso: Option<String>,
    pub classes: Option<usize>,
    pub tier: Tier,
    pub suspect: Flag,
    pub citation: String,
    pub note: Option<String>,
}

impl Row {
    pub fn tower_orders(&self) -> Result<Option<Vec<u128>>> {
        match &self.tower {
            None => Ok(None),
            Some(t) => t
                .split(',')
                .map(|x| x.trim().parse::<u128>().with_context(|| format!("tower entry `{x}` in row {}", self.id)))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// True when the row states at least one value to check.
    pub fn has_expectation(&self) -> bool {
        self.order.is_some()
            || self.ncl.is_some()
            || self.structure.is_some()
            || self.center.is_some()
            || self.aut.is_some()
            || self.complete.is_some()
            || self.tower.is_some()
            || self.iso.is_some()
            || self.classes.is_some()
    }
}

/// Reads a table and checks the per-row invariants.
pub fn load(path: &Path) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<Row>().enumerate() {
        let row: Row = rec.with_context(|| format!("{} line {}", path.display(), i + 2))?;
        if row.citation.trim().is_empty() {
            bail!("{}: row {} has no citation", path.display(), row.id);
        }
        if !row.has_expectation() {
            bail!("{}: row {} states no expected value", path.display(), row.id);
        }
        row.tower_orders()?;
        rows.push(row);
    }
    let mut ids: Vec<&str> = rows.iter().map(|r| r.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        bail!("{}: duplicate row id {}", path.display(), w[0]);
    }
    Ok(rows)
}

/// Parses an `o:n/c` structure string into (element order, elements, classes).
pub fn parse_structure(s: &str) -> Result<Vec<(u32, usize, usize)>> {
    s.split_whitespace()
        .map(|tok| {
            let (o, rest) = tok.split_once(':').with_context(|| format!("bad structure token `{tok}`"))?;
            let (n, c) = rest.split_once('/').with_context(|| format!("bad structure token `{tok}`"))?;
            Ok((o.parse()?, n.parse()?, c.parse()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_tokens() {
        let s = parse_structure("2:19/3 3:32/1 4:60/3").unwrap();
        assert_eq!(s, vec![(2, 19, 3), (3, 32, 1), (4, 60, 3)]);
        assert!(parse_structure("2:19").is_err());
    }

    #[test]
    fn rows_round_trip() {
        let dir = std::env::temp_dir().join(format!("grouforge-expected-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.tsv");
        std::fs::write(
            &path,
            "id\tgroup\torder\tncl\tstructure\tcenter\taut\tcomplete\ttower\tiso\tclasses\ttier\tsuspect\tcitation\tnote\n\
             a\tbase/SL23\t24\t7\t\t2\t24\t\t\t\t\tfast\tno\tstandard\t\n\
             b\tA1/x\t\t\t\t\t\t\t1536,6144\t\t\tslow\tyes\tsomewhere\tnote\n",
        )
        .unwrap();
        let rows = load(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].order, Some(24));
        assert_eq!(rows[0].aut, Some(24));
        assert_eq!(rows[1].tier, Tier::Slow);
        assert!(rows[1].suspect.is_yes());
        assert_eq!(rows[1].tower_orders().unwrap(), Some(vec![1536, 6144]));
        std::fs::remove_dir_all(&dir).ok();
    }
}

#![allow(dead_code)]

#[path = "../../../core/tests/common/oracle.rs"]
pub mod oracle;

use anyhow::{ensure, Result};
use grouforge::corpus::Corpus;
use grouforge_core::aut::automorphism_group;
use grouforge_core::iso::{is_isomorphic, verify_witness, IsoVerdict};
use grouforge_core::structure::{center, class_order_structure, conjugacy_classes};
use grouforge_core::FiniteGroup;
use oracle::Table;

/// Largest group the oracle comparison covers.
pub const ORACLE_MAX_ORDER: usize = 48;

/// Image tuples the brute-force automorphism count may try.
pub const ORACLE_SEARCH_BUDGET: u128 = 2_000_000;

pub fn corpus() -> Corpus {
    Corpus::locate().expect("corpus directory")
}

/// Every corpus entry of order at most `ORACLE_MAX_ORDER`, realized.
pub fn small_groups(corpus: &Corpus) -> Result<Vec<(String, FiniteGroup)>> {
    let mut out = Vec::new();
    for table in ["base", "2grp"] {
        for r in corpus.entries(table)? {
            let g = corpus.realize(&r)?.extension.group;
            if g.order() <= ORACLE_MAX_ORDER {
                out.push((r, g));
            }
        }
    }
    Ok(out)
}

/// |GL(n,2)|, the automorphism count of an elementary abelian group of order 2^n.
fn gl2(n: u32) -> u128 {
    (0..n).map(|i| (1u128 << n) - (1u128 << i)).product()
}

fn elementary_abelian_rank(t: &Table) -> Option<u32> {
    let n = t.n as u32;
    let abelian = (0..n).all(|x| (0..n).all(|y| t.m(x, y) == t.m(y, x)));
    let exp2 = (1..n).all(|x| t.order_of(x) == 2);
    (abelian && exp2 && t.n.is_power_of_two()).then(|| t.n.trailing_zeros())
}

/// Outcome of comparing the library with the oracle on a catalog.
#[derive(Debug, Default)]
pub struct OracleSummary {
    pub groups: usize,
    pub aut_checked: usize,
    pub iso_pairs: usize,
}

/// Compares classes, center, |Aut| and pairwise isomorphism verdicts with the
/// brute-force oracle.  Returns an error naming the first disagreement.
pub fn oracle_equivalence(groups: &[(String, FiniteGroup)]) -> Result<OracleSummary> {
    let mut summary = OracleSummary { groups: groups.len(), ..Default::default() };
    let tables: Vec<Table> = groups.iter().map(|(_, g)| Table::of(g)).collect();
    for ((name, g), t) in groups.iter().zip(&tables) {
        let cl = conjugacy_classes(g)?;
        ensure!(cl.len() == t.classes().len(), "{name}: class count");
        ensure!(class_order_structure(g, &cl).to_string() == t.structure(), "{name}: class structure");
        ensure!(center(g).order() == t.center_order(), "{name}: center");
        let want = match elementary_abelian_rank(t) {
            Some(n) => Some(gl2(n)),
            None if oracle::search_size(t, t) <= ORACLE_SEARCH_BUDGET => Some(oracle::aut_order(t)),
            None => None,
        };
        if let Some(w) = want {
            ensure!(automorphism_group(g)?.order() == w, "{name}: |Aut| expected {w}");
            summary.aut_checked += 1;
        }
    }
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            if groups[i].1.order() != groups[j].1.order() {
                continue;
            }
            summary.iso_pairs += 1;
            let brute = oracle::isomorphism(&tables[i], &tables[j]).is_some();
            let (a, b) = (&groups[i], &groups[j]);
            match is_isomorphic(&a.1, &b.1)? {
                IsoVerdict::Isomorphic { witness } => {
                    ensure!(brute, "{} and {} reported isomorphic", a.0, b.0);
                    ensure!(verify_witness(&a.1, &b.1, &witness), "{} and {}: bad witness", a.0, b.0);
                }
                IsoVerdict::NonIsomorphic { .. } => ensure!(!brute, "{} and {} reported non-isomorphic", a.0, b.0),
                IsoVerdict::Undecided { reason } => anyhow::bail!("{} and {} undecided: {reason}", a.0, b.0),
            }
        }
    }
    Ok(summary)
}

//! Recomputes expected-table rows and assembles the verification report.

use std::fmt;
use std::fs;

use anyhow::{anyhow, bail, Result};
use grouforge_core::aut::{automorphism_group, automorphism_tower, TowerStatus};
use grouforge_core::iso::{dedup, is_isomorphic, verify_witness, IsoVerdict};
use grouforge_core::structure::{center, class_order_structure, conjugacy_classes};
use grouforge_core::{FiniteGroup, GroupError};
use rayon::prelude::*;

use crate::corpus::{natural_cmp, Corpus};
use crate::expected::{self, Flag, Row, Tier};

/// Largest group an automorphism tower step may be realized as.
pub const TOWER_MAX_ORDER: u128 = 100_000;

/// Which tiers a run admits.  Each level includes the ones below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TierFilter {
    Fast,
    Slow,
    All,
}

impl TierFilter {
    pub fn admits(self, t: Tier) -> bool {
        match self {
            TierFilter::Fast => t == Tier::Fast,
            TierFilter::Slow => t <= Tier::Slow,
            TierFilter::All => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipReason {
    Tier,
    Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
    Skipped(SkipReason),
    SuspectInformational,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::Skipped(SkipReason::Tier) => "skipped(tier)",
            Verdict::Skipped(SkipReason::Bound) => "skipped(bound)",
            Verdict::SuspectInformational => "suspect-informational",
        })
    }
}

/// One checked value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub name: &'static str,
    pub expected: String,
    pub computed: String,
}

impl Field {
    pub fn agrees(&self) -> bool {
        self.expected == self.computed
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: String,
    pub id: String,
    pub group: String,
    pub tier: Tier,
    pub suspect: bool,
    pub verdict: Verdict,
    pub fields: Vec<Field>,
    pub detail: String,
}

impl Outcome {
    /// A mismatch that fails the run.
    pub fn is_gated_failure(&self) -> bool {
        self.verdict == Verdict::Mismatch
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.name == name)
    }

    fn expected_text(&self) -> String {
        self.fields.iter().map(|f| format!("{}={}", f.name, f.expected)).collect::<Vec<_>>().join(";")
    }

    fn computed_text(&self) -> String {
        self.fields.iter().map(|f| format!("{}={}", f.name, f.computed)).collect::<Vec<_>>().join(";")
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn gated_failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_gated_failure()).count()
    }

    pub fn passed(&self) -> bool {
        self.gated_failures() == 0
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.outcomes.iter().filter(|o| o.verdict == v).count()
    }

    pub fn find(&self, table: &str, id: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.table == table && o.id == id)
    }

    pub fn summary(&self) -> String {
        format!(
            "{} rows: {} match, {} mismatch, {} skipped(tier), {} skipped(bound), {} suspect-informational",
            self.outcomes.len(),
            self.count(Verdict::Match),
            self.count(Verdict::Mismatch),
            self.count(Verdict::Skipped(SkipReason::Tier)),
            self.count(Verdict::Skipped(SkipReason::Bound)),
            self.count(Verdict::SuspectInformational),
        )
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("table\tid\tgroup\ttier\tverdict\texpected\tcomputed\tdetail\n");
        for o in &self.outcomes {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                o.table,
                o.id,
                o.group,
                o.tier,
                o.verdict,
                o.expected_text(),
                o.computed_text(),
                o.detail
            ));
        }
        out
    }

    pub fn to_pretty(&self) -> String {
        let w_id = self.outcomes.iter().map(|o| o.table.len() + o.id.len() + 1).max().unwrap_or(0);
        let mut out = String::new();
        for o in &self.outcomes {
            let name = format!("{}:{}", o.table, o.id);
            out.push_str(&format!("{name:<w_id$}  {:<8}  {:<21}", o.tier, o.verdict.to_string()));
            let bad: Vec<String> = o
                .fields
                .iter()
                .filter(|f| !f.agrees())
                .map(|f| format!("{}: expected {}, got {}", f.name, f.expected, f.computed))
                .collect();
            if bad.is_empty() {
                out.push_str(&format!("  {}", o.computed_text()));
            } else {
                out.push_str(&format!("  {}", bad.join("; ")));
            }
            if !o.detail.is_empty() {
                out.push_str(&format!("  [{}]", o.detail));
            }
            out.push('\n');
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }
}

/// Names of all expected tables, sorted.
pub fn tables(corpus: &Corpus) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for e in fs::read_dir(corpus.root().join("expected"))? {
        let p = e?.path();
        if p.extension().and_then(|x| x.to_str()) == Some("tsv") {
            if let Some(s) = p.file_stem().and_then(|s| s.to_str()) {
                names.push(s.to_string());
            }
        }
    }
    names.sort_by(|a, b| natural_cmp(a, b));
    Ok(names)
}

/// Resolves a selector to (table, rows).  A selector is a table name, `all`,
/// a row id of the `dedup` table, or `<table>:<row id>`.
pub fn select(corpus: &Corpus, selector: &str) -> Result<Vec<(String, Vec<Row>)>> {
    if selector == "all" {
        return tables(corpus)?
            .into_iter()
            .map(|t| Ok((t.clone(), expected::load(&corpus.expected_path(&t))?)))
            .collect();
    }
    if corpus.expected_path(selector).is_file() {
        return Ok(vec![(selector.to_string(), expected::load(&corpus.expected_path(selector))?)]);
    }
    let (table, id) = selector.split_once(':').unwrap_or(("dedup", selector));
    let path = corpus.expected_path(table);
    if !path.is_file() {
        bail!("unknown selector `{selector}`");
    }
    let rows: Vec<Row> = expected::load(&path)?.into_iter().filter(|r| r.id == id).collect();
    if rows.is_empty() {
        bail!("no row `{id}` in table {table}");
    }
    Ok(vec![(table.to_string(), rows)])
}

/// Corpus entries under `corpus/<table>` that no row of the table names.
pub fn uncovered(corpus: &Corpus, table: &str, rows: &[Row]) -> Result<Vec<String>> {
    if !corpus.root().join("corpus").join(table).is_dir() {
        return Ok(Vec::new());
    }
    Ok(corpus.entries(table)?.into_iter().filter(|e| !rows.iter().any(|r| &r.group == e)).collect())
}

/// Verifies the selected rows, running admitted rows on the current rayon pool.
/// Outcomes are ordered by table, then by row id.
pub fn verify(corpus: &Corpus, selection: &[(String, Vec<Row>)], filter: TierFilter) -> Result<Report> {
    let mut jobs: Vec<(&str, &Row)> = Vec::new();
    let mut orphans = Vec::new();
    for (table, rows) in selection {
        for r in rows {
            jobs.push((table, r));
        }
        let full = expected::load(&corpus.expected_path(table))?;
        if full.len() == rows.len() {
            for e in uncovered(corpus, table, rows)? {
                orphans.push(Outcome {
                    table: table.clone(),
                    id: e.rsplit('/').next().unwrap_or(&e).to_string(),
                    group: e.clone(),
                    tier: Tier::Fast,
                    suspect: false,
                    verdict: Verdict::Mismatch,
                    fields: Vec::new(),
                    detail: "corpus entry has no expected row".into(),
                });
            }
        }
    }
    let mut outcomes: Vec<Outcome> = jobs.par_iter().map(|(t, r)| check_row(corpus, t, r, filter)).collect();
    outcomes.extend(orphans);
    outcomes.sort_by(|a, b| natural_cmp(&a.table, &b.table).then_with(|| natural_cmp(&a.id, &b.id)));
    Ok(Report { outcomes })
}

/// Checks one row.  Errors become verdicts so that one bad entry does not hide
/// the rest of the table.
pub fn check_row(corpus: &Corpus, table: &str, row: &Row, filter: TierFilter) -> Outcome {
    let mut out = Outcome {
        table: table.to_string(),
        id: row.id.clone(),
        group: row.group.clone(),
        tier: row.tier,
        suspect: row.suspect.is_yes(),
        verdict: Verdict::Match,
        fields: Vec::new(),
        detail: String::new(),
    };
    if !filter.admits(row.tier) {
        out.verdict = Verdict::Skipped(SkipReason::Tier);
        out.detail = format!("{} tier not selected", row.tier);
        return out;
    }
    let result = if table == "dedup" { check_dedup(corpus, row) } else { check_entry(corpus, row) };
    match result {
        Ok(fields) => {
            let bad: Vec<&str> = fields.iter().filter(|f| !f.agrees()).map(|f| f.name).collect();
            out.fields = fields;
            out.verdict = if bad.is_empty() { Verdict::Match } else { Verdict::Mismatch };
            if !bad.is_empty() {
                out.detail = format!("differs: {}", bad.join(","));
            }
        }
        Err(e) if is_bound_error(&e) => {
            out.verdict = Verdict::Skipped(SkipReason::Bound);
            out.detail = format!("{}", e.root_cause());
        }
        Err(e) => {
            out.verdict = Verdict::Mismatch;
            out.detail = format!("error: {e:#}").replace(['\t', '\n'], " ");
        }
    }
    if out.suspect && out.verdict != Verdict::Skipped(SkipReason::Tier) {
        let agreed = out.verdict == Verdict::Match;
        out.verdict = Verdict::SuspectInformational;
        if agreed {
            out.detail = "agrees".into();
        }
    }
    out
}

fn is_bound_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<GroupError>(), Some(GroupError::BoundExceeded { .. }) | Some(GroupError::CapacityExceeded(_)))
    })
}

fn field(name: &'static str, expected: impl ToString, computed: impl ToString) -> Field {
    Field { name, expected: expected.to_string(), computed: computed.to_string() }
}

fn realize(corpus: &Corpus, reference: &str) -> Result<FiniteGroup> {
    Ok(corpus.realize(reference)?.extension.group)
}

fn check_entry(corpus: &Corpus, row: &Row) -> Result<Vec<Field>> {
    let g = realize(corpus, &row.group)?;
    let mut fields = Vec::new();
    if let Some(o) = row.order {
        fields.push(field("order", o, g.order()));
    }
    if row.ncl.is_some() || row.structure.is_some() || row.center.is_some() {
        let cl = conjugacy_classes(&g)?;
        if let Some(n) = row.ncl {
            fields.push(field("ncl", n, cl.len()));
        }
        if let Some(s) = &row.structure {
            fields.push(field("structure", s, class_order_structure(&g, &cl)));
        }
        if let Some(z) = row.center {
            fields.push(field("center", z, center(&g).order()));
        }
    }
    if row.aut.is_some() || row.complete.is_some() {
        let a = automorphism_group(&g)?.order();
        if let Some(x) = row.aut {
            fields.push(field("aut", x, a));
        }
        if let Some(c) = row.complete {
            let complete = center(&g).order() == 1 && a == g.order() as u128;
            let flag = if complete { "yes" } else { "no" };
            fields.push(field("complete", if c == Flag::Yes { "yes" } else { "no" }, flag));
        }
    }
    if let Some(orders) = row.tower_orders()? {
        let report = automorphism_tower(&g, orders.len() + 2, TOWER_MAX_ORDER)?;
        let computed: Vec<String> = report.orders().iter().skip(1).map(|o| o.to_string()).collect();
        let want: Vec<String> = orders.iter().map(|o| o.to_string()).collect();
        fields.push(field("tower", want.join(","), computed.join(",")));
        let status = if row.tier == Tier::Capacity { TowerStatus::Capacity } else { TowerStatus::Complete };
        fields.push(field("tower_status", status, report.status));
    }
    if let Some(target) = &row.iso {
        let (negated, target) = match target.strip_prefix('!') {
            Some(t) => (true, t),
            None => (false, target.as_str()),
        };
        let h = realize(corpus, target)?;
        let verdict = is_isomorphic(&g, &h)?;
        let computed = match &verdict {
            IsoVerdict::Isomorphic { witness } => {
                if !verify_witness(&g, &h, witness) {
                    return Err(anyhow!("isomorphism witness to {target} failed verification"));
                }
                target.to_string()
            }
            IsoVerdict::NonIsomorphic { .. } => format!("!{target}"),
            IsoVerdict::Undecided { reason } => format!("undecided({reason})"),
        };
        let want = if negated { format!("!{target}") } else { target.to_string() };
        fields.push(field("iso", want, computed));
    }
    Ok(fields)
}

fn check_dedup(corpus: &Corpus, row: &Row) -> Result<Vec<Field>> {
    let refs = corpus.expand(&row.group)?;
    let groups: Vec<FiniteGroup> = refs.par_iter().map(|r| realize(corpus, r)).collect::<Result<_>>()?;
    let part = dedup(&groups)?;
    let mut fields = Vec::new();
    if let Some(c) = row.classes {
        fields.push(field("classes", c, part.len()));
    }
    fields.push(field("undecided", 0, part.undecided.len()));
    Ok(fields)
}

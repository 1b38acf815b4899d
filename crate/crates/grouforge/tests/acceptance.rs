//! Acceptance run: one line per criterion.  Slow-tier parts run when
//! `GROUFORGE_SLOW=1` is set.

mod common;

use std::time::Instant;

use anyhow::{anyhow, ensure, Context, Result};
use grouforge::corpus::Corpus;
use grouforge::expected::{Row, Tier};
use grouforge::verify::{self, Report, TierFilter, Verdict};
use grouforge_core::aut::{automorphism_group, is_complete, odd_order_automorphisms};
use grouforge_core::constructors::{semidirect_by_automorphism, ConstructSpec};
use grouforge_core::finite::realize_finite;
use grouforge_core::structure::{center, conjugacy_classes, has_normal_sylow};

/// Time limit for the realization criterion, in seconds.
const REALIZATION_SECONDS: f64 = 5.0;
/// Census rows that must match without any suspect flag.
const MIN_CENSUS_MATCHES: usize = 30;
/// Duplicate claims that must be confirmed by a verified witness.
const MIN_WITNESSED_CLAIMS: usize = 5;
/// Largest automorphism group order the automorphism criterion covers.
const AUT_CRITERION_MAX: u128 = 1_000_000;

enum Status {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Criterion = (&'static str, fn(&Ctx) -> Result<Status>);

struct Ctx {
    corpus: Corpus,
    slow: bool,
}

impl Ctx {
    fn tier(&self) -> TierFilter {
        if self.slow {
            TierFilter::Slow
        } else {
            TierFilter::Fast
        }
    }

    fn run(&self, selectors: &[&str], tier: TierFilter) -> Result<Report> {
        let mut sel = Vec::new();
        for s in selectors {
            sel.extend(verify::select(&self.corpus, s)?);
        }
        verify::verify(&self.corpus, &sel, tier)
    }

    fn only(&self, table: &str, pred: impl Fn(&Row) -> bool) -> Result<Vec<(String, Vec<Row>)>> {
        let rows = verify::select(&self.corpus, table)?.remove(0).1;
        Ok(vec![(table.to_string(), rows.into_iter().filter(|r| pred(r)).collect())])
    }
}

fn mismatches(r: &Report) -> Vec<String> {
    r.outcomes.iter().filter(|o| o.verdict == Verdict::Mismatch).map(|o| format!("{}:{} {}", o.table, o.id, o.detail)).collect()
}

fn realization(cx: &Ctx) -> Result<Status> {
    let start = Instant::now();
    let mut got = Vec::new();
    for (r, want) in [("base/SL23", 24), ("base/GL23", 48), ("base/234", 48), ("base/384", 384), ("8/954", 192)] {
        let n = cx.corpus.realize(r)?.extension.order();
        ensure!(n == want, "{r}: order {n}, expected {want}");
        got.push(format!("{r}={n}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < REALIZATION_SECONDS, "took {secs:.2} s");
    Ok(Status::Pass(format!("{} in {secs:.2} s", got.join(" "))))
}

fn census(cx: &Ctx) -> Result<Status> {
    let r = cx.run(&["A4"], TierFilter::Fast)?;
    let bad = mismatches(&r);
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    let matched = r.count(Verdict::Match);
    ensure!(matched >= MIN_CENSUS_MATCHES, "only {matched} rows match");
    for o in &r.outcomes {
        ensure!(o.field("structure").is_some() && o.field("ncl").is_some(), "{} not compared", o.id);
    }
    let rows = verify::select(&cx.corpus, "A4")?.remove(0).1;
    for row in &rows {
        let s = grouforge::expected::parse_structure(row.structure.as_deref().unwrap_or(""))?;
        let elems: usize = s.iter().map(|x| x.1).sum();
        let classes: usize = s.iter().map(|x| x.2).sum();
        ensure!(elems == 191 && classes + 1 == row.ncl.unwrap_or(0), "row {} breaks the class identities", row.id);
    }
    Ok(Status::Pass(format!(
        "{matched} non-suspect rows match ncl and structure, {} suspect rows informational; identities hold for all {} rows",
        r.count(Verdict::SuspectInformational),
        rows.len()
    )))
}

fn dedup_counts(cx: &Ctx) -> Result<Status> {
    let r = cx.run(&["dedup"], TierFilter::Fast)?;
    let classes = |id: &str| -> Result<String> {
        let o = r.find("dedup", id).ok_or_else(|| anyhow!("no row {id}"))?;
        ensure!(o.verdict == Verdict::Match, "{id}: {}", o.detail);
        Ok(o.field("classes").unwrap().computed.clone())
    };
    Ok(Status::Pass(format!("tables 4, 5: {} classes; with table 8: {} classes", classes("dedup45")?, classes("dedup458")?)))
}

fn duplicate_claims(cx: &Ctx) -> Result<Status> {
    let r = cx.run(&["A2", "A3", "4F"], TierFilter::Fast)?;
    let bad = mismatches(&r);
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    let witnessed = r
        .outcomes
        .iter()
        .filter(|o| o.verdict == Verdict::Match)
        .filter(|o| o.field("iso").is_some_and(|f| !f.expected.starts_with('!')))
        .count();
    let failed = r.count(Verdict::SuspectInformational);
    ensure!(witnessed >= MIN_WITNESSED_CLAIMS, "only {witnessed} claims witnessed");
    Ok(Status::Pass(format!("{witnessed} claims confirmed with verified witness maps; {failed} printed claims refuted (suspect rows)")))
}

fn aut_orders(cx: &Ctx) -> Result<Status> {
    let mut sel = Vec::new();
    for t in ["2a", "4", "5"] {
        sel.extend(cx.only(t, |r| r.aut.is_some_and(|a| a <= AUT_CRITERION_MAX))?);
    }
    let r = verify::verify(&cx.corpus, &sel, cx.tier())?;
    let bad = mismatches(&r);
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    let slow = r.outcomes.iter().filter(|o| o.tier == Tier::Slow).count();
    let msg = format!(
        "{} rows match, {} suspect informational, {slow} slow-tier rows {}",
        r.count(Verdict::Match),
        r.count(Verdict::SuspectInformational),
        if cx.slow { "included" } else { "skipped" }
    );
    Ok(Status::Pass(msg))
}

fn completeness(cx: &Ctx) -> Result<Status> {
    let g = cx.corpus.realize("base/384")?.extension.group;
    ensure!(is_complete(&g)?, "order 384 group not complete");
    if !cx.slow {
        return Ok(Status::Pass("order 384 group complete; order 10752 step is slow tier, skipped".into()));
    }
    let r = cx.run(&["III:t153-10752", "III:t153-64512"], TierFilter::Slow)?;
    let bad = mismatches(&r);
    ensure!(bad.is_empty() && r.count(Verdict::Match) == 2, "{}", bad.join("; "));
    Ok(Status::Pass("order 384 group complete; order 10752 group has |Aut| = 64512, which is complete".into()))
}

fn towers(cx: &Ctx) -> Result<Status> {
    if !cx.slow {
        return Ok(Status::Skip("slow tier; set GROUFORGE_SLOW=1".into()));
    }
    let r = cx.run(&["A1:64-181-tower", "A1:64-183-tower"], TierFilter::Slow)?;
    let bad = mismatches(&r);
    ensure!(bad.is_empty() && r.count(Verdict::Match) == 2, "{}", bad.join("; "));
    let t = |id: &str| r.find("A1", id).unwrap().field("tower").unwrap().computed.replace(',', " -> ");
    Ok(Status::Pass(format!("64#181: {} complete; 64#183: {} complete", t("64-181-tower"), t("64-183-tower"))))
}

fn odd_order_pipeline(cx: &Ctx) -> Result<Status> {
    let mut built = 0;
    for r in cx.corpus.entries("2grp")? {
        let base = cx.corpus.build(&r)?.presentation;
        let g = realize_finite(&base, 1 << 16)?;
        if g.order() > 32 || automorphism_group(&g)?.order() % 3 != 0 {
            continue;
        }
        let autos = odd_order_automorphisms(&g, 0)?;
        let (_, map) = autos.iter().find(|(p, _)| *p == 3).context("no automorphism of order 3")?;
        let p = semidirect_by_automorphism(&base, &g, map, 3);
        let h = realize_finite(&p, 1 << 16)?;
        let n = g.order();
        ensure!(h.order() == 3 * n, "{r}: extension has order {}", h.order());
        ensure!(has_normal_sylow(&h, 2)?, "{r}: Sylow 2-subgroup not normal");
        ensure!(!has_normal_sylow(&h, 3)?, "{r}: Sylow 3-subgroup normal");
        let cl = conjugacy_classes(&h)?;
        let sizes: Vec<usize> = (0..cl.len()).map(|c| cl.members(c).len()).collect();
        ensure!(sizes.iter().sum::<usize>() == h.order() && sizes.iter().all(|s| h.order() % s == 0), "{r}: class equation");
        let z = center(&h).order();
        ensure!(automorphism_group(&h)?.inner_order() * z == h.order(), "{r}: |Inn| != |G|/|Z|");
        built += 1;
    }
    ensure!(built >= 5, "only {built} extensions built");
    Ok(Status::Pass(format!("{built} stock 2-groups extended by an automorphism of order 3; all checks hold")))
}

fn matrices(cx: &Ctx) -> Result<Status> {
    let mut dims = Vec::new();
    for r in ["base/56", "2b/p7-2", "2b/p7-9"] {
        match cx.corpus.read(r)?.0 {
            ConstructSpec::Matrix { matrices, .. } => {
                for m in matrices {
                    ensure!(m.order() == Some(7), "{r}: matrix order {:?}", m.order());
                    dims.push(format!("{r}:{}x{}", m.dim(), m.dim()));
                }
            }
            _ => return Err(anyhow!("{r} is not a matrix construction")),
        }
    }
    let g = cx.corpus.realize("2b/p7-2")?.extension.group;
    ensure!(g.order() == 448, "middle matrix group has order {}", g.order());
    let mut msg = format!("matrices of order 7 ({}); middle group order 448", dims.join(" "));
    if cx.slow {
        let a = automorphism_group(&g)?.order();
        ensure!(a == 677_376, "|Aut| = {a}");
        msg.push_str("; |Aut| = 677376");
    } else {
        msg.push_str("; |Aut| check is slow tier, skipped");
    }
    Ok(Status::Pass(msg))
}

fn oracle(cx: &Ctx) -> Result<Status> {
    let groups = common::small_groups(&cx.corpus)?;
    let s = common::oracle_equivalence(&groups)?;
    ensure!(s.aut_checked == s.groups, "{} of {} automorphism counts checked", s.aut_checked, s.groups);
    Ok(Status::Pass(format!(
        "{} corpus groups of order <= {}: classes, center, |Aut| agree; {} isomorphism verdicts agree",
        s.groups,
        common::ORACLE_MAX_ORDER,
        s.iso_pairs
    )))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let cx = Ctx { corpus: common::corpus(), slow: std::env::var("GROUFORGE_SLOW").is_ok_and(|v| v == "1") };
    let criteria: [Criterion; 10] = [
        ("presentation realization", realization),
        ("class census", census),
        ("dedup counts", dedup_counts),
        ("duplicate claims", duplicate_claims),
        ("automorphism orders", aut_orders),
        ("completeness", completeness),
        ("automorphism towers", towers),
        ("odd-order extension pipeline", odd_order_pipeline),
        ("matrix actions", matrices),
        ("oracle equivalence", oracle),
    ];
    println!("acceptance ({} tier)", if cx.slow { "slow" } else { "fast" });
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let status = f(&cx).unwrap_or_else(|e| Status::Fail(format!("{e:#}")));
        let secs = start.elapsed().as_secs_f64();
        let (label, msg) = match status {
            Status::Pass(m) => ("PASS", m),
            Status::Fail(m) => {
                failed += 1;
                ("FAIL", m)
            }
            Status::Skip(m) => ("SKIP", m),
        };
        println!("criterion {:>2} {label} {name}: {msg} [{secs:.1} s]", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

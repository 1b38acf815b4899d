use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use grouforge::corpus::Corpus;
use grouforge::verify::{self, TierFilter};
use grouforge_core::constructors::{realize_built, ComplementCheck};
use grouforge_core::aut::{automorphism_group, automorphism_tower, odd_order_automorphisms};
use grouforge_core::iso::{is_isomorphic, verify_witness, IsoVerdict};
use grouforge_core::structure::{center, class_order_structure, conjugacy_classes, fingerprint};
use grouforge_core::{serialize, FiniteGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Pretty,
}

#[derive(Parser, Debug)]
#[command(name = "grouforge", version, about = "Realize, analyze and verify finitely presented groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Highest tier to run; each tier includes the cheaper ones.
    #[arg(long, value_enum, default_value = "fast", global = true)]
    tier: TierFilter,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized searches.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, value_enum, default_value = "pretty", global = true)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order of a group given as a corpus reference (`4/55`) or a file.
    Order { group: String },
    /// Conjugacy classes as an `order:elements/classes` census.
    Classes { group: String },
    /// Order of the automorphism group.
    Aut { group: String },
    /// The automorphism tower G, Aut(G), Aut(Aut(G)), …
    Tower {
        group: String,
        #[arg(long, default_value_t = 8)]
        max_steps: usize,
        #[arg(long, default_value_t = verify::TOWER_MAX_ORDER)]
        max_order: u128,
    },
    /// Decides whether two groups are isomorphic.
    Iso { a: String, b: String },
    /// Checks expected tables: a table name, `all`, a dedup row id, or `<table>:<id>`.
    Verify {
        #[arg(default_value = "all")]
        selectors: Vec<String>,
    },
    /// Builds a construction file into a presentation.
    Construct {
        spec: String,
        /// Write the presentation here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn realize(corpus: &Corpus, reference: &str) -> Result<FiniteGroup> {
    Ok(corpus.realize(reference)?.extension.group)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    }
    let corpus = Corpus::locate()?;
    let tsv = cli.format == Format::Tsv;
    match &cli.command {
        Command::Order { group } => {
            let g = realize(&corpus, group)?;
            if tsv {
                println!("group\torder\n{group}\t{}", g.order());
            } else {
                println!("{group}: order {}", g.order());
            }
        }
        Command::Classes { group } => {
            let g = realize(&corpus, group)?;
            let cl = conjugacy_classes(&g)?;
            let s = class_order_structure(&g, &cl);
            let z = center(&g).order();
            if tsv {
                println!("group\torder\tncl\tcenter\tstructure\n{group}\t{}\t{}\t{z}\t{s}", g.order(), cl.len());
            } else {
                println!("{group}: order {}, {} classes, center of order {z}", g.order(), cl.len());
                println!("  {s}");
            }
        }
        Command::Aut { group } => {
            let g = realize(&corpus, group)?;
            let a = automorphism_group(&g)?;
            let complete = center(&g).order() == 1 && a.order() == g.order() as u128;
            let odd = if g.order().is_power_of_two() { odd_order_automorphisms(&g, cli.seed)? } else { Vec::new() };
            if tsv {
                println!("group\torder\taut\tinner\touter\tcomplete");
                println!("{group}\t{}\t{}\t{}\t{}\t{complete}", g.order(), a.order(), a.inner_order(), a.outer_order());
            } else {
                println!("{group}: |Aut| = {}, |Inn| = {}, |Out| = {}", a.order(), a.inner_order(), a.outer_order());
                if complete {
                    println!("  complete");
                }
                for (p, map) in &odd {
                    let gens: Vec<String> = g.generators().iter().map(|&x| map[x as usize].to_string()).collect();
                    println!("  automorphism of order {p}: generators to elements {}", gens.join(" "));
                }
            }
        }
        Command::Tower { group, max_steps, max_order } => {
            let g = realize(&corpus, group)?;
            let report = automorphism_tower(&g, *max_steps, *max_order)?;
            if tsv {
                print!("{}", report.to_tsv());
            } else {
                let orders: Vec<String> = report.orders().iter().map(|o| o.to_string()).collect();
                println!("{group}: {} ({})", orders.join(" -> "), report.status);
            }
        }
        Command::Iso { a, b } => {
            let (ga, gb) = (realize(&corpus, a)?, realize(&corpus, b)?);
            let verdict = is_isomorphic(&ga, &gb)?;
            let (label, detail) = match &verdict {
                IsoVerdict::Isomorphic { witness } => {
                    let ok = verify_witness(&ga, &gb, witness);
                    ("isomorphic", if ok { "witness verified".to_string() } else { "witness FAILED".to_string() })
                }
                IsoVerdict::NonIsomorphic { reason } => ("not isomorphic", reason.clone()),
                IsoVerdict::Undecided { reason } => ("undecided", reason.clone()),
            };
            if tsv {
                println!("a\tb\tverdict\tdetail\n{a}\t{b}\t{label}\t{detail}");
            } else {
                println!("{a} vs {b}: {label} ({detail})");
            }
        }
        Command::Verify { selectors } => {
            let mut selection = Vec::new();
            for s in selectors {
                selection.extend(verify::select(&corpus, s)?);
            }
            let report = verify::verify(&corpus, &selection, cli.tier)?;
            if tsv {
                print!("{}", report.to_tsv());
            } else {
                print!("{}", report.to_pretty());
            }
            return Ok(report.passed());
        }
        Command::Construct { spec, output } => {
            let built = corpus.build(spec)?;
            let ext = realize_built(&built).with_context(|| format!("realizing {spec}"))?;
            let fp = fingerprint(&ext.group)?;
            let mut h = DefaultHasher::new();
            fp.hash(&mut h);
            let digest = format!("{:016x}", h.finish());
            let mut presentation = ext.presentation.clone();
            if let Some(n) = built.metadata.get("name") {
                presentation.name = n.clone();
            }
            presentation.metadata.insert("order".into(), ext.order().to_string());
            presentation.metadata.insert("fingerprint".into(), digest.clone());
            let text = serialize(&presentation);
            let complement = match ext.complement {
                ComplementCheck::Found => "found",
                ComplementCheck::NotFound => "not found",
                ComplementCheck::Unchecked => "unchecked",
            };
            match output {
                Some(path) => {
                    fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
                    if tsv {
                        println!("spec\torder\tsplit_verified\tcomplement\tfingerprint");
                        println!("{spec}\t{}\t{}\t{complement}\t{digest}", ext.order(), ext.split_verified);
                    } else {
                        println!("{spec}: order {}, complement {complement}, fingerprint {digest}", ext.order());
                        println!("  wrote {}", path.display());
                    }
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(true)
}

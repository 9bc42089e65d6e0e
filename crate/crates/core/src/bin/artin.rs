use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use stature::artin::{self, Labels};
use stature::crosscheck::k_ell_crosscheck;
use stature::fold::fold_seeded;
use stature::gog::{validate_gog, GraphOfGraphs};
use stature::io::{self, Named};
use stature::precover::fiber_product;
use stature::report;
use stature::stature::{iterate, Engine, EngineConfig, Verdict};
use stature::topology::DEFAULT_BUDGET;
use stature::Error;

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(
    name = "artin",
    version,
    about = "Finite stature checks for triangle Artin groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Labels M,N,P (integers >= 2 or inf).
    #[arg(long)]
    preset: Option<String>,
    /// Graph of graphs in JSON.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph of graphs and list every violation.
    Validate {
        /// Graph of graphs in JSON.
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        preset: Option<String>,
    },
    /// Fold a morphism into an immersion.
    Fold {
        file: PathBuf,
        /// Shuffle the fold order with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fiber product of two precovers of a common graph.
    FiberProduct { p1: PathBuf, p2: PathBuf },
    /// Run the stature iteration and print the report.
    Check {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = stature::stature::DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Coset budget for each π1 computation.
        #[arg(long, env = "ARTIN_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare random path stabilizers against the depth catalog.
    Crosscheck {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Dump the class representatives up to a depth as JSON.
    Catalog {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        depth: usize,
    },
    /// Print a preset as a graph-of-graphs file.
    Preset {
        /// Labels M,N,P.
        labels: String,
    },
    /// Shape, cycle lengths and ranks for a list of presets.
    Table {
        /// Labels M,N,P; defaults to the presets in the README.
        labels: Vec<String>,
    },
}

fn load(source: &Source) -> Result<(String, GraphOfGraphs)> {
    match (&source.preset, &source.file) {
        (Some(l), _) => {
            let labels = Labels::parse(l)?;
            Ok((labels.to_string(), artin::make_preset(labels)?.data))
        }
        (None, Some(f)) => Ok((f.display().to_string(), read_gog(f)?)),
        (None, None) => bail!("give --preset or --file"),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_gog(path: &Path) -> Result<GraphOfGraphs> {
    io::parse_gog(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { file, preset } => {
            let g = match (file, preset) {
                (Some(f), _) => read_gog(&f)?,
                (None, Some(l)) => artin::make_preset(Labels::parse(&l)?)?.data,
                (None, None) => bail!("give a file or --preset"),
            };
            let v = validate_gog(&g);
            if v.is_empty() {
                println!("valid");
                return Ok(0);
            }
            for line in &v {
                println!("{line}");
            }
            Ok(EXIT_INVALID)
        }
        Command::Fold { file, seed } => {
            let pm = io::parse_morphism(&read(&file)?)
                .with_context(|| format!("parsing {}", file.display()))?;
            let f = fold_seeded(&pm.morphism, seed)?;
            let folded = Named::plain(f.immersion.source.clone());
            print_json(&json!({
                "immersion": io::morphism_doc(&f.immersion, &folded, &pm.target),
                "projection": io::map_to_doc(&f.projection, &pm.source, &folded),
            }))?;
            Ok(0)
        }
        Command::FiberProduct { p1, p2 } => {
            let (a, pa) = io::parse_precover(&read(&p1)?)
                .with_context(|| format!("parsing {}", p1.display()))?;
            let (_, pb) = io::parse_precover(&read(&p2)?)
                .with_context(|| format!("parsing {}", p2.display()))?;
            let fp = fiber_product(&pa, &pb)?;
            let mut named = Named::plain(fp.graph.clone());
            named.basepoint = fp.immersion.basepoint;
            let components = fp.immersion.components().len();
            print_json(&json!({
                "components": components,
                "immersion": io::morphism_doc(&fp.immersion.map, &named, &a.target),
                "proj1": io::map_to_doc(&fp.proj1, &named, &a.source),
                "proj2": io::map_to_doc(&fp.proj2, &named, &Named::plain(fp.proj2.target.clone())),
            }))?;
            Ok(0)
        }
        Command::Check {
            source,
            max_depth,
            budget,
            out,
            format,
        } => {
            let (subject, g) = match load(&source) {
                Ok(x) => x,
                Err(e) => return refusal(e),
            };
            let cfg = EngineConfig {
                max_depth,
                budget,
                ..EngineConfig::default()
            };
            let r = iterate(&g, &subject, &cfg);
            if let Some(path) = out {
                fs::write(&path, report::to_json(&r))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match format {
                Format::Text => print!("{}", report::to_text(&r)),
                Format::Json => print!("{}", report::to_json(&r)),
            }
            Ok(match r.verdict {
                Verdict::FiniteStature { .. } => 0,
                Verdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
                Verdict::ValidationFailure { .. } => EXIT_INVALID,
            })
        }
        Command::Crosscheck {
            source,
            depth,
            samples,
            seed,
        } => {
            let (_, g) = match load(&source) {
                Ok(x) => x,
                Err(e) => return refusal(e),
            };
            let r = k_ell_crosscheck(&g, depth, samples, seed)?;
            let vacuous = r.samples.iter().filter(|s| s.vacuous).count();
            println!(
                "depth {depth}: {} samples, {} found, {vacuous} trivial, {} missed",
                r.samples.len(),
                r.samples.len() - vacuous - r.misses,
                r.misses
            );
            Ok(if r.passed { 0 } else { 1 })
        }
        Command::Catalog { source, depth } => {
            let (_, g) = match load(&source) {
                Ok(x) => x,
                Err(e) => return refusal(e),
            };
            let mut engine = Engine::new(&g)?;
            engine.level_one()?;
            for _ in 1..depth.max(1) {
                engine.step()?;
            }
            let levels: Vec<_> = engine
                .levels
                .iter()
                .map(|l| {
                    json!({
                        "depth": l.depth,
                        "classes": l.classes.iter().map(|c| json!({
                            "rank": c.rank,
                            "instances": c.instances,
                            "provenance": c.provenance,
                            "parents": c.parent_maps.iter().map(|(p, _)| *p).collect::<Vec<_>>(),
                            "precover": io::precover_doc(&c.precover),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            print_json(&levels)?;
            Ok(0)
        }
        Command::Preset { labels } => {
            let pre = match Labels::parse(&labels).and_then(artin::make_preset) {
                Ok(p) => p,
                Err(e) => return refusal(e.into()),
            };
            print_json(&io::gog_to_doc(&pre.data))?;
            Ok(0)
        }
        Command::Table { labels } => {
            let list: Vec<String> = if labels.is_empty() {
                [
                    "3,3,3", "3,3,5", "3,4,4", "3,4,5", "4,4,4", "5,5,5", "5,5,7", "4,4,2", "2,3,7",
                ]
                .iter()
                .map(|s| s.to_string())
                .collect()
            } else {
                labels
            };
            println!(
                "{:<10} {:<8} {:<18} {:<10} status",
                "labels", "shape", "cycle lengths", "ranks"
            );
            for l in list {
                let labels = Labels::parse(&l)?;
                match artin::make_preset(labels) {
                    Ok(pre) => {
                        let lengths: Vec<String> = pre
                            .data
                            .lengths
                            .iter()
                            .map(|(c, n)| format!("{c}:{n}"))
                            .collect();
                        let r = artin::ranks(&pre.graphs)?;
                        println!(
                            "{:<10} {:<8} {:<18} {:<10} ok",
                            labels.to_string(),
                            format!("{:?}", pre.shape),
                            lengths.join(" "),
                            format!("{},{},{}", r.a, r.b, r.c)
                        );
                    }
                    Err(e) => println!(
                        "{:<10} {:<8} {:<18} {:<10} {e}",
                        labels.to_string(),
                        "-",
                        "-",
                        "-"
                    ),
                }
            }
            Ok(0)
        }
    }
}

/// Refusals and unavailable presets exit with the validation code.
fn refusal(e: anyhow::Error) -> Result<u8> {
    match e.downcast_ref::<Error>() {
        Some(Error::Refused(_) | Error::Unavailable(_) | Error::Validation(_)) => {
            eprintln!("artin: {e}");
            Ok(EXIT_INVALID)
        }
        _ => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("artin: {e:#}");
            ExitCode::from(1)
        }
    }
}

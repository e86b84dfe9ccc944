//! `hyperlat`: runs the classification and chamber pipeline and checks its output bundles.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

use hyperlat::chamber::{chamber_aut_group, class_chamber, embedding_model, is_rootless};
use hyperlat::definite::{automorphism_group, root_type, short_vectors};
use hyperlat::genus::ClassList;
use hyperlat::mass::{genus_mass, GenusDescriptor};
use hyperlat::pipeline::{self, PipelineConfig};
use hyperlat::serial::format_rat;
use hyperlat::{catalog, Error, Lattice};

#[derive(Parser)]
#[command(name = "hyperlat", version, about = "Genus classification and induced chambers of L10(2) in L26")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed of the random generator.
    #[arg(long, global = true, default_value_t = 1)]
    rng: u64,
    /// Neighbour prime.
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Checkpoint directory for resumable runs.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Neighbour steps allowed in the classification walk.
    #[arg(long = "max-iter", global = true, default_value_t = 1_000_000)]
    max_iter: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the genus of complements and write `classes/`.
    Classify,
    /// Build the glued model of each rooted class and write `embeddings/`.
    Embed,
    /// Induced chamber of each rooted class: wall count, group order and orbits.
    Walls {
        /// Only this class index.
        #[arg(long)]
        class: Option<usize>,
    },
    /// Chambers plus a verified lift of every wall reflection, written to `chambers/`.
    Lifts,
    /// Full pipeline: classes, embeddings, chambers, tables and manifest.
    Tables,
    /// Re-check a bundle directory from its files only.
    Verify {
        /// Bundle directory (defaults to `--out`).
        dir: Option<PathBuf>,
    },
    /// Vectors of a given norm in a definite lattice.
    Shortvec {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        norm: i64,
        /// Print only the count (both signs).
        #[arg(long)]
        count: bool,
    },
    /// Automorphism group order and root type of a definite lattice.
    Aut {
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Exact mass of the genus of a definite lattice.
    Mass {
        #[command(flatten)]
        lattice: LatticeArg,
    },
}

#[derive(Args)]
struct LatticeArg {
    /// Sum of root lattices with optional scale, e.g. `D8+E8(2)`. Root lattices are negative definite.
    #[arg(long, conflicts_with = "gram")]
    lattice: Option<String>,
    /// JSON file holding the Gram matrix as an array of integer rows.
    #[arg(long)]
    gram: Option<PathBuf>,
}

impl LatticeArg {
    fn load(&self) -> Result<Lattice, Error> {
        match (&self.lattice, &self.gram) {
            (_, Some(path)) => {
                let rows: Vec<Vec<i64>> = serde_json::from_slice(&fs::read(path)?)?;
                Lattice::from_i64(&rows)
            }
            (Some(spec), None) => parse_lattice(spec),
            (None, None) => Ok(pipeline::seed_lattice()),
        }
    }
}

/// Parses `X1(k1)+X2+…` with `X` one of `An`, `Dn`, `En`.
fn parse_lattice(spec: &str) -> Result<Lattice, Error> {
    let bad = || Error::Invalid(format!("cannot parse lattice `{spec}`"));
    let mut acc: Option<Lattice> = None;
    for part in spec.split('+').map(str::trim) {
        let (name, scale) = match part.split_once('(') {
            Some((n, rest)) => (n, rest.strip_suffix(')').ok_or_else(bad)?.parse::<i64>().map_err(|_| bad())?),
            None => (part, 1),
        };
        let mut chars = name.chars();
        let kind = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        let l = match kind {
            'A' if n >= 1 => catalog::a(n),
            'D' if n >= 4 => catalog::d(n),
            'E' if (6..=8).contains(&n) => catalog::e(n),
            _ => return Err(bad()),
        };
        let l = l.rescale(scale)?;
        acc = Some(match acc {
            Some(a) => a.direct_sum(&l),
            None => l,
        });
    }
    acc.ok_or_else(bad)
}

fn config(g: &Global) -> PipelineConfig {
    PipelineConfig {
        rng_seed: g.rng,
        p: g.p,
        out: g.out.clone(),
        cache: g.cache.clone(),
        jobs: g.jobs,
        max_iter: g.max_iter,
        ..PipelineConfig::default()
    }
}

fn check_prime(cfg: &PipelineConfig) -> Result<(), Error> {
    if !hyperlat::genus::is_odd_prime(cfg.p) {
        return Err(Error::Precondition(format!("p = {} is not an odd prime", cfg.p)));
    }
    Ok(())
}

fn classes(cfg: &PipelineConfig) -> Result<ClassList, Error> {
    check_prime(cfg)?;
    pipeline::classify_stage(cfg)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let cfg = config(&cli.global);
    match cli.command {
        Command::Classify => {
            let list = classes(&cfg)?;
            let dir = cfg.out.join("classes");
            list.write_dir(&dir)?;
            list.save(&dir.join("list.json"))?;
            for (i, c) in list.classes.iter().enumerate() {
                println!("{i:2}  {:<12} |O| = {}", c.fingerprint.root_type.to_string(), c.aut_order);
            }
            println!("{} classes, mass {} ({} steps)", list.classes.len(), format_rat(&list.target_mass), list.iterations);
        }
        Command::Embed => {
            let list = classes(&cfg)?;
            let dir = cfg.out.join("embeddings");
            fs::create_dir_all(&dir)?;
            for (i, c) in list.classes.iter().enumerate() {
                let r = c.lattice()?;
                if is_rootless(&r)? {
                    println!("{i:2}  rootless, skipped");
                    continue;
                }
                let model = embedding_model(&r)?;
                let doc = json!({
                    "class_index": i,
                    "root_type": c.fingerprint.root_type.to_string(),
                    "glue_basis": model.basis.to_rows().iter().map(|r| r.iter().map(format_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "lattice_gram": model.lattice.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                });
                let path = dir.join(format!("class_{i:02}.json"));
                fs::write(&path, serde_json::to_vec_pretty(&doc)?)?;
                println!("{i:2}  det {}  {}", model.lattice.det(), path.display());
            }
        }
        Command::Walls { class } => {
            let list = classes(&cfg)?;
            for (i, c) in list.classes.iter().enumerate() {
                if class.is_some_and(|k| k != i) {
                    continue;
                }
                let r = c.lattice()?;
                if is_rootless(&r)? {
                    println!("{i:2}  {:<12} rootless, no induced chamber", c.fingerprint.root_type.to_string());
                    continue;
                }
                let cc = class_chamber(&r, cfg.rng_seed, cfg.max_steps)?;
                let g = chamber_aut_group(&cc.chamber)?;
                println!(
                    "{i:2}  {:<12} walls {:3}  |G| {:6}  orbits {:?}",
                    c.fingerprint.root_type.to_string(),
                    cc.chamber.walls.len(),
                    g.order,
                    g.orbit_sizes()
                );
            }
        }
        Command::Lifts => {
            let list = classes(&cfg)?;
            let bundles = pipeline::chamber_stage(&cfg, &list)?;
            let dir = cfg.out.join("chambers");
            fs::create_dir_all(&dir)?;
            for b in &bundles {
                let longest = b.walls.iter().filter(|w| w.lift.as_ref().is_some_and(|l| l.longest_element)).count();
                let path = dir.join(format!("class_{:02}.json", b.class_index));
                fs::write(&path, serde_json::to_vec_pretty(b)?)?;
                println!("{:2}  {:<12} {} walls lifted ({} longest elements)", b.class_index, b.root_type, b.walls.len(), longest);
            }
        }
        Command::Tables => {
            check_prime(&cfg)?;
            let m = pipeline::run_pipeline(&cfg)?;
            print!("{}", fs::read_to_string(cfg.out.join("tables").join("table2.csv"))?);
            println!("{} classes, {} files, manifest {}", m.classes.len(), m.files.len(), cfg.out.join("manifest.json").display());
        }
        Command::Verify { dir } => {
            let dir = dir.unwrap_or(cfg.out.clone());
            let report = pipeline::verify(&dir)?;
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.ok).collect();
            println!("{} checks, {} failed", report.checks.len(), failed.len());
            for c in &failed {
                println!("FAIL {} [{}]: {}", c.name, c.object, c.detail);
            }
            if !failed.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Shortvec { lattice, norm, count } => {
            let l = lattice.load()?;
            let set = short_vectors(&l, norm)?;
            if count {
                println!("{}", 2 * set.vectors.len());
            } else {
                print_json(&json!({ "norm": set.norm, "count": 2 * set.vectors.len(), "vectors": set.vectors }));
            }
        }
        Command::Aut { lattice } => {
            let l = lattice.load()?;
            let g = automorphism_group(&l)?;
            println!("root type {}", root_type(&l)?);
            println!("|O| = {}", g.order);
            println!("{} generators", g.generators.len());
        }
        Command::Mass { lattice } => {
            let l = lattice.load()?;
            println!("{}", format_rat(&genus_mass(&GenusDescriptor::of(&l)?)?));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) => 1,
        Error::Exhausted(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            info!("stopped: {e:?}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sums_with_scales() {
        let l = parse_lattice("D8+E8(2)").unwrap();
        assert_eq!(l.rank(), 16);
        assert_eq!(l.det(), pipeline::seed_lattice().det());
        assert!(parse_lattice("F4").is_err());
        assert!(parse_lattice("E9").is_err());
        assert!(parse_lattice("A2(x)").is_err());
    }
}

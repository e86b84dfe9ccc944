//! The end-to-end run: classify the genus, build every embedding and its induced chamber,
//! lift all wall reflections, and write tables, bundles and a manifest.

pub mod bundle;
pub mod tables;
pub mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog;
use crate::chamber::is_rootless;
use crate::error::{Error, Result};
use crate::genus::{classify_by_random_walk, ClassList, WalkConfig};
use crate::lattice::Lattice;
use crate::serial;

pub use bundle::ClassBundle;
pub use tables::{build_tables, Table1Row, Table2Row, Table3Row, Tables};
pub use verify::{verify, Check, VerifyReport};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub rng_seed: u64,
    pub p: u64,
    pub out: PathBuf,
    pub cache: Option<PathBuf>,
    pub jobs: usize,
    /// Neighbour steps allowed in the classification walk.
    pub max_iter: u64,
    /// Walls allowed per chamber walk.
    pub max_steps: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { rng_seed: 1, p: 3, out: PathBuf::from("out"), cache: None, jobs: 1, max_iter: 1_000_000, max_steps: 100_000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestClass {
    pub label: String,
    pub root_type: String,
    pub counts: Vec<u64>,
    pub aut_order: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: PipelineConfig,
    pub timings_ms: BTreeMap<String, u64>,
    pub genus_mass: String,
    pub classes: Vec<ManifestClass>,
    pub assumptions: Vec<String>,
    /// SHA-256 of every emitted file, keyed by its path relative to the output directory.
    pub files: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?)
    }
}

/// `D8 ⊕ E8(2)`, a member of the genus of complements.
pub fn seed_lattice() -> Lattice {
    catalog::d(8).direct_sum(&catalog::e8().rescale(2).expect("nonzero scale"))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Labels: wall count followed by a letter, letters ordered by root count of `R`, then `|O(R)|`,
/// then class index; `infty` for the rootless class.
pub fn assign_labels(list: &ClassList, wall_counts: &[Option<usize>]) -> Vec<String> {
    let mut labels = vec![String::new(); list.classes.len()];
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, w) in wall_counts.iter().enumerate() {
        match w {
            Some(n) => groups.entry(*n).or_default().push(i),
            None => labels[i] = "infty".into(),
        }
    }
    for (n, mut idx) in groups {
        idx.sort_by_key(|&i| (list.classes[i].fingerprint.roots(), list.classes[i].aut_order.clone(), i));
        for (k, i) in idx.into_iter().enumerate() {
            labels[i] = format!("{n}{}", letter(k));
        }
    }
    labels
}

fn letter(k: usize) -> String {
    let mut s = String::new();
    let mut k = k;
    loop {
        s.insert(0, (b'A' + (k % 26) as u8) as char);
        if k < 26 {
            return s;
        }
        k = k / 26 - 1;
    }
}

/// Classification stage, resumable through the cache directory.
pub fn classify_stage(cfg: &PipelineConfig) -> Result<ClassList> {
    let mut wc = WalkConfig::new(cfg.p, cfg.rng_seed);
    wc.max_iter = cfg.max_iter;
    if let Some(cache) = &cfg.cache {
        fs::create_dir_all(cache)?;
        wc.checkpoint = Some(cache.join(format!("classes-p{}-rng{}.json", cfg.p, cfg.rng_seed)));
    }
    classify_by_random_walk(&seed_lattice(), &wc)
}

fn chamber_cache_path(cfg: &PipelineConfig, r: &Lattice) -> Result<Option<PathBuf>> {
    let Some(cache) = &cfg.cache else { return Ok(None) };
    let key = hex::encode(Sha256::digest(serde_json::to_vec(&r.gram().to_rows().iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())?));
    Ok(Some(cache.join(format!("chamber-{}-rng{}.json", &key[..16], cfg.rng_seed))))
}

/// Chamber bundles of the rooted classes, computed on `cfg.jobs` threads or read from the cache.
pub fn chamber_stage(cfg: &PipelineConfig, list: &ClassList) -> Result<Vec<ClassBundle>> {
    let mut todo = Vec::new();
    for (i, c) in list.classes.iter().enumerate() {
        let r = c.lattice()?;
        if !is_rootless(&r)? {
            todo.push((i, r));
        }
    }
    let next = Mutex::new(0usize);
    let results: Mutex<Vec<Option<Result<ClassBundle>>>> = Mutex::new((0..todo.len()).map(|_| None).collect());
    let work = || loop {
        let k = {
            let mut n = next.lock().expect("poisoned");
            if *n >= todo.len() {
                return;
            }
            *n += 1;
            *n - 1
        };
        let (i, r) = &todo[k];
        let res = (|| -> Result<ClassBundle> {
            let path = chamber_cache_path(cfg, r)?;
            if let Some(p) = &path {
                if p.exists() {
                    let b: ClassBundle = serde_json::from_slice(&fs::read(p)?)?;
                    if b.r_gram == *r.gram() {
                        return Ok(b);
                    }
                }
            }
            let t = Instant::now();
            let rt = list.classes[*i].fingerprint.root_type.to_string();
            let b = ClassBundle::compute(r, *i, &rt, cfg.rng_seed, cfg.max_steps)?;
            info!("class {i} ({rt}): {} walls, |G| = {}, {:?}", b.chamber.walls.len(), b.group.order, t.elapsed());
            if let Some(p) = &path {
                fs::write(p, serde_json::to_vec(&b)?)?;
            }
            Ok(b)
        })();
        results.lock().expect("poisoned")[k] = Some(res);
    };
    std::thread::scope(|s| {
        for _ in 1..cfg.jobs.max(1) {
            s.spawn(work);
        }
        work();
    });
    results.into_inner().expect("poisoned").into_iter().map(|r| r.expect("every job ran")).collect()
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    if let Some(d) = path.parent() {
        fs::create_dir_all(d)?;
    }
    fs::write(path, serde_json::to_vec_pretty(v)?)?;
    Ok(())
}

/// Runs every stage and writes `classes/`, `embeddings/`, `chambers/`, `tables/` and
/// `manifest.json` under `cfg.out`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunManifest> {
    if !crate::genus::is_odd_prime(cfg.p) {
        return Err(Error::Precondition(format!("p = {} is not an odd prime", cfg.p)));
    }
    let mut timings = BTreeMap::new();
    let t = Instant::now();
    let list = classify_stage(cfg)?;
    timings.insert("classify".to_string(), t.elapsed().as_millis() as u64);

    let t = Instant::now();
    let mut bundles = chamber_stage(cfg, &list)?;
    timings.insert("chambers".to_string(), t.elapsed().as_millis() as u64);

    let mut wall_counts = vec![None; list.classes.len()];
    for b in &bundles {
        wall_counts[b.class_index] = Some(b.chamber.walls.len());
    }
    let labels = assign_labels(&list, &wall_counts);
    for b in &mut bundles {
        b.label = labels[b.class_index].clone();
    }

    let t = Instant::now();
    let tables = build_tables(&list, &labels, &bundles)?;
    timings.insert("tables".to_string(), t.elapsed().as_millis() as u64);

    let out = &cfg.out;
    fs::create_dir_all(out)?;
    let mut written: Vec<PathBuf> = Vec::new();
    let classes_dir = out.join("classes");
    list.write_dir(&classes_dir)?;
    written.push(classes_dir.join("manifest.json"));
    for i in 0..list.classes.len() {
        written.push(classes_dir.join(format!("class_{i:02}.json")));
    }
    write_json(&classes_dir.join("list.json"), &list)?;
    written.push(classes_dir.join("list.json"));
    for b in &bundles {
        let e = out.join("embeddings").join(format!("{}.json", b.label));
        write_json(
            &e,
            &serde_json::json!({
                "label": b.label,
                "root_type": b.root_type,
                "r_gram": b.r_gram.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "glue_basis": b.glue_basis.to_rows().iter().map(|r| r.iter().map(serial::format_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "lattice_gram": b.lattice_gram.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
        )?;
        written.push(e);
        let c = out.join("chambers").join(format!("{}.json", b.label));
        write_json(&c, b)?;
        written.push(c);
    }
    written.extend(tables.write(&out.join("tables"))?);

    let mut files = BTreeMap::new();
    for p in &written {
        let rel = p.strip_prefix(out).map_err(|_| Error::Invalid("file outside the output directory".into()))?;
        files.insert(rel.to_string_lossy().replace('\\', "/"), sha256_file(p)?);
    }
    let classes = list
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| ManifestClass {
            label: labels[i].clone(),
            root_type: c.fingerprint.root_type.to_string(),
            counts: c.fingerprint.counts.clone(),
            aut_order: c.aut_order.to_string(),
        })
        .collect();
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        timings_ms: timings,
        genus_mass: serial::format_rat(&list.target_mass),
        classes,
        assumptions: list.assumptions.clone(),
        files,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

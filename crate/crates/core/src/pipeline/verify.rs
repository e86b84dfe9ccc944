//! Re-checks an output directory from its files alone.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::bundle::ClassBundle;
use super::tables::{build_tables, Tables};
use super::{sha256_file, RunManifest};
use crate::chamber::lift::{check_restriction, sigma_type, verify_lift, wall_sigma};
use crate::chamber::walk::{apply_reflections, chamber_contains};
use crate::chamber::walls::wall_certificates;
use crate::chamber::{embed_l10, induced_chamber_walls, interiority_check, is_weyl_vector, vinberg, LeechFrame};
use crate::definite::{Definite, RootSystemType};
use crate::error::{Error, Result};
use crate::genus::{ClassList, Fingerprint};
use crate::lattice::Lattice;
use crate::mass::{genus_mass, genus_member_check};
use crate::matrix::{int, qvec, Int, Rat};
use crate::serial;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub object: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.ok)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.ok)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && !c.ok)
    }

    fn run(&mut self, name: &str, object: &str, f: impl FnOnce() -> Result<()>) -> bool {
        let (ok, detail) = match f() {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(Check { name: name.into(), object: object.into(), ok, detail });
        ok
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Verification(msg()))
    }
}

/// Runs every check on `dir` and reports all of them.
pub fn verify(dir: &Path) -> Result<VerifyReport> {
    let mut rep = VerifyReport::default();
    let manifest = RunManifest::load(dir)?;
    let list: ClassList = serde_json::from_slice(&fs::read(dir.join("classes").join("list.json"))?)?;
    verify_classes(&mut rep, &list);

    let mut bundles = Vec::new();
    let mut names: Vec<_> = fs::read_dir(dir.join("chambers"))?.collect::<std::io::Result<Vec<_>>>()?.into_iter().map(|e| e.path()).collect();
    names.sort();
    for p in names {
        let object = p.file_name().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
        let mut parsed = None;
        rep.run("bundle parses", &object, || {
            parsed = Some(serde_json::from_slice::<ClassBundle>(&fs::read(&p)?)?);
            Ok(())
        });
        if let Some(b) = parsed {
            verify_bundle(&mut rep, &list, &b);
            bundles.push(b);
        }
    }
    let rooted = list.classes.iter().filter(|c| c.fingerprint.roots() > 0).count();
    rep.run("one bundle per rooted class", "chambers", || {
        let idx: BTreeSet<usize> = bundles.iter().map(|b| b.class_index).collect();
        ensure(idx.len() == bundles.len() && bundles.len() == rooted, || format!("{} bundles for {rooted} rooted classes", bundles.len()))
    });

    rep.run("tables match bundles", "tables", || {
        let mut labels = vec!["infty".to_string(); list.classes.len()];
        for b in &bundles {
            labels[b.class_index] = b.label.clone();
        }
        let rebuilt = build_tables(&list, &labels, &bundles)?;
        let written = Tables::read(&dir.join("tables"))?;
        ensure(rebuilt == written, || "tables differ from the recomputed ones".into())
    });

    for (rel, sum) in &manifest.files {
        rep.run("checksum", rel, || {
            let got = sha256_file(&dir.join(rel))?;
            ensure(&got == sum, || format!("sha256 {got} differs from the manifest"))
        });
    }
    Ok(rep)
}

fn verify_classes(rep: &mut VerifyReport, list: &ClassList) {
    let det: BigInt = list.genus.det.clone();
    let mut lattices: Vec<Option<Lattice>> = Vec::new();
    for (i, c) in list.classes.iter().enumerate() {
        let object = format!("class_{i:02}");
        rep.run("class determinant", &object, || {
            let d = c.gram.det();
            ensure(d == det, || format!("determinant {d} instead of {det}"))
        });
        let mut lat = None;
        rep.run("class genus", &object, || {
            let l = Lattice::new(c.gram.clone())?;
            ensure(l.is_even() && l.is_negative_definite(), || "not even negative definite".into())?;
            ensure(genus_member_check(&l, &list.genus), || "not in the genus".into())?;
            lat = Some(l);
            Ok(())
        });
        if let Some(l) = &lat {
            rep.run("class fingerprint", &object, || {
                let d = Definite::new(l)?;
                let fp = Fingerprint::of(&d)?;
                ensure(fp == c.fingerprint, || format!("fingerprint {fp:?} differs"))?;
                let order = d.automorphism_group()?.order;
                ensure(order == c.aut_order, || format!("|O| = {order} instead of {}", c.aut_order))
            });
        }
        lattices.push(lat);
    }
    rep.run("classes pairwise distinct", "classes", || {
        let fps: BTreeSet<&Fingerprint> = list.classes.iter().map(|c| &c.fingerprint).collect();
        ensure(fps.len() == list.classes.len(), || "two classes share a fingerprint".into())
    });
    rep.run("mass identity", "classes", || {
        let mass = genus_mass(&list.genus)?;
        ensure(mass == list.target_mass, || format!("genus mass {} differs from the recorded one", serial::format_rat(&mass)))?;
        let sum: Rat = list.classes.iter().map(|c| c.mass_contribution()).sum();
        ensure(sum == mass, || format!("Σ 1/|O| = {} but the mass is {}", serial::format_rat(&sum), serial::format_rat(&mass)))
    });
    rep.run("one rootless class", "classes", || {
        let n = list.classes.iter().filter(|c| c.fingerprint.roots() == 0).count();
        ensure(n == 1, || format!("{n} rootless classes"))
    });
}

fn verify_bundle(rep: &mut VerifyReport, list: &ClassList, b: &ClassBundle) {
    let object = b.label.clone();
    rep.run("bundle class", &object, || {
        let c = list.classes.get(b.class_index).ok_or_else(|| Error::Verification("class index out of range".into()))?;
        ensure(c.gram == b.r_gram, || "complement Gram differs from the class list".into())?;
        let d = b.r_gram.det();
        ensure(d == list.genus.det, || format!("complement determinant {d} instead of {}", list.genus.det))
    });
    let mut model = None;
    rep.run("model", &object, || {
        let m = b.model()?;
        ensure(m.lattice.gram() == &b.lattice_gram, || "L_φ Gram differs from the glue basis".into())?;
        ensure(m.lattice.rank() == 26 && m.lattice.is_even() && m.lattice.is_unimodular(), || "L_φ is not even unimodular of rank 26".into())?;
        model = Some(m);
        Ok(())
    });
    let Some(model) = model else { return };
    let l = &model.lattice;
    rep.run("initial Weyl vector", &object, || {
        let c = is_weyl_vector(l, &b.w0)?;
        ensure(c.is_weyl, || format!("[w0]⊥/[w0] has {} roots", c.roots))
    });
    rep.run("walk replay", &object, || {
        let mut rev = b.walk_roots.clone();
        rev.reverse();
        for r in &b.walk_roots {
            ensure(l.norm(r) == int(-2), || "crossed vector is not a root".into())?;
        }
        ensure(apply_reflections(l.gram(), &rev, &b.w0) == b.weyl.w, || "reflections of w0 do not give w".into())
    });
    rep.run("Weyl certificate", &object, || {
        let c = is_weyl_vector(l, &b.weyl.w)?;
        ensure(c.is_weyl && b.weyl.quotient_roots == 0, || format!("[w]⊥/[w] has {} roots", c.roots))?;
        let q = Lattice::new(c.quotient)?;
        let stored = Lattice::new(b.weyl.quotient.clone())?;
        ensure(q.is_unimodular() && stored.is_unimodular() && stored.rank() == 24, || "quotient is not unimodular of rank 24".into())?;
        ensure(Definite::new(&stored)?.count_vectors(-2)? == 0, || "stored quotient has roots".into())
    });
    rep.run("a10 in the Conway chamber", &object, || {
        let frame = LeechFrame::from_weyl(l, &b.weyl)?;
        let t = qvec(&embed_l10(&model, &vinberg::a10())?);
        ensure(chamber_contains(&frame, &t)?, || "a wall of C(w) is negative on ι(a10)".into())
    });
    rep.run("interiority", &object, || {
        let c = interiority_check(&model, &qvec(&vinberg::a10()))?;
        ensure(c == b.interiority && c.holds(), || format!("{c:?}"))
    });
    rep.run("walls", &object, || {
        b.chamber.check()?;
        ensure(b.chamber.interior == qvec(&vinberg::a10()), || "interior point is not a10".into())?;
        let d = induced_chamber_walls(&model, &b.weyl.w)?;
        ensure(d == b.chamber, || "recomputed walls differ".into())
    });
    rep.run("chamber group", &object, || {
        b.group.verify(&b.chamber)?;
        for g in &b.group.generators {
            ensure(g.to_rat().vec_mul(&b.group.orbit_sum) == b.group.orbit_sum, || "σ10 is not fixed".into())?;
        }
        ensure(wall_certificates(&b.chamber, &b.group.orbit_sum).iter().all(|&x| x), || "a wall certificate fails".into())
    });
    rep.run("wall records", &object, || {
        ensure(b.walls.len() == b.chamber.walls.len(), || "one record per wall expected".into())?;
        for (rec, wall) in b.walls.iter().zip(&b.chamber.walls) {
            ensure(&rec.wall == wall, || format!("record for {:?} out of order", rec.wall))?;
        }
        Ok(())
    });
    let (ws, _) = model.project_int(&b.weyl.w);
    let ws = ws.coords;
    let d_w = ws.iter().fold(Int::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let g10 = crate::catalog::l10_gram().to_rat();
    let n_w = g10.form(&ws, &ws);
    for rec in &b.walls {
        let wobj = format!("{object} {:?}", rec.wall);
        rep.run("lift restriction", &wobj, || {
            let lift = rec.lift.as_ref().ok_or_else(|| Error::Verification("no lift recorded".into()))?;
            check_restriction(&model, &rec.wall, &lift.matrix)
        });
        rep.run("lift", &wobj, || {
            let lift = rec.lift.as_ref().ok_or_else(|| Error::Verification("no lift recorded".into()))?;
            let sigma = wall_sigma(&model, &b.weyl.w, &rec.wall)?;
            verify_lift(&model, &rec.wall, &sigma, &lift.matrix)?;
            let t = sigma_type(l, &sigma)?;
            ensure(RootSystemType::parse(&rec.sigma_type).as_ref() == Some(&t) || (sigma.is_empty() && rec.sigma_type.is_empty()), || format!("Σ type {t} differs from {}", rec.sigma_type))
        });
        rep.run("wall invariants", &wobj, || {
            ensure(Int::from(rec.d_w) == d_w, || format!("d_w {} instead of {d_w}", rec.d_w))?;
            ensure(rec.n_w == n_w && n_w > Rat::zero(), || format!("n_w {} instead of {}", serial::format_rat(&rec.n_w), serial::format_rat(&n_w)))?;
            let r: Vec<Rat> = rec.wall.iter().map(|&x| Rat::from_integer(int(x))).collect();
            let a_r = g10.form(&ws, &r);
            ensure(rec.a_r == a_r, || format!("a_r {} instead of {}", serial::format_rat(&rec.a_r), serial::format_rat(&a_r)))
        });
    }
    rep.run("invariants constant on orbits", &object, || {
        for orbit in &b.group.orbits {
            let first = &b.walls[orbit[0]];
            for &i in orbit {
                let w = &b.walls[i];
                ensure((w.d_w, &w.n_w, &w.a_r, &w.sigma_type) == (first.d_w, &first.n_w, &first.a_r, &first.sigma_type), || format!("wall {i} differs from its orbit"))?;
            }
        }
        Ok(())
    });
}

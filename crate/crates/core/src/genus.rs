//! Kneser `p`-neighbours and classification of a definite genus by a random neighbour walk.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::definite::{self, Definite, PosGram, RootSystemType};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeFile};
use crate::mass::{genus_mass, GenusDescriptor};
use crate::matrix::{hnf, Int, IntMatrix, Rat, RatMatrix};
use crate::serial;

pub use crate::mass::genus_member_check;

pub fn is_odd_prime(p: u64) -> bool {
    p > 2 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn inv_mod(a: i64, p: i64) -> i64 {
    let e = a.extended_gcd(&p);
    e.x.mod_floor(&p)
}

/// Replaces `v` by `v + p·w` so that `⟨v, v⟩ ≡ 0 mod p²`, given `⟨v, v⟩ ≡ 0 mod p`.
pub fn admissible_vector(l: &Lattice, v: &[Int], p: u64) -> Result<Vec<Int>> {
    let pb = BigInt::from(p);
    let n = l.norm(v);
    if !(&n % &pb).is_zero() {
        return Err(Error::Precondition("⟨v, v⟩ is not divisible by p".into()));
    }
    let vg = l.gram().vec_mul(v);
    let Some(j) = vg.iter().position(|x| !(x % &pb).is_zero()) else {
        return Err(Error::Precondition("v lies in p·L + ker".into()));
    };
    let pi = p as i64;
    let m = (&n / &pb).mod_floor(&pb).to_i64().unwrap();
    let a = vg[j].mod_floor(&pb).to_i64().unwrap();
    // want 2⟨v, w⟩ ≡ −m mod p
    let c = ((-m).mod_floor(&pi) * inv_mod(2, pi) % pi) * inv_mod(a, pi) % pi;
    let mut out = v.to_vec();
    out[j] += BigInt::from(c * pi);
    debug_assert!((l.norm(&out) % (&pb * &pb)).is_zero());
    Ok(out)
}

/// Basis (rows, in the coordinates of `L`) of the neighbour `L_v + Z·v/p`.
pub fn p_neighbor_basis(l: &Lattice, v: &[Int], p: u64) -> Result<RatMatrix> {
    if !is_odd_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    let pb = BigInt::from(p);
    if (l.det() % &pb).is_zero() {
        return Err(Error::Precondition(format!("p = {p} divides the determinant")));
    }
    if v.len() != l.rank() {
        return Err(Error::Invalid("vector length differs from rank".into()));
    }
    if v.iter().all(|x| (x % &pb).is_zero()) {
        return Err(Error::Precondition("v lies in p·L".into()));
    }
    if !(l.norm(v) % (&pb * &pb)).is_zero() {
        return Err(Error::Precondition("⟨v, v⟩ is not divisible by p²".into()));
    }
    let n = l.rank();
    let vg = l.gram().vec_mul(v);
    let a: Vec<i64> = vg.iter().map(|x| x.mod_floor(&pb).to_i64().unwrap()).collect();
    let j = a.iter().position(|&x| x != 0).expect("p does not divide det");
    let pi = p as i64;
    let aj_inv = inv_mod(a[j], pi);
    // p·(generators of L_v) and v, as integer rows
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut r = vec![Int::zero(); n];
        if i == j {
            r[j] = &pb * &pb;
        } else {
            r[i] = pb.clone();
            r[j] = BigInt::from(-(a[i] * aj_inv % pi)) * &pb;
        }
        rows.push(r);
    }
    rows.push(v.to_vec());
    let h = hnf(&IntMatrix::from_rows_with_cols(rows, n));
    if h.rank != n {
        return Err(Error::Verification("neighbour generators do not have full rank".into()));
    }
    let basis: Vec<Vec<Rat>> =
        (0..n).map(|i| h.h.row(i).iter().map(|x| Rat::new(x.clone(), pb.clone())).collect()).collect();
    Ok(RatMatrix::from_rows(basis, n))
}

/// The `p`-neighbour `L(v)` as a lattice with its own (LLL-reduced when definite) Gram matrix.
pub fn p_neighbor(l: &Lattice, v: &[Int], p: u64) -> Result<Lattice> {
    let b = p_neighbor_basis(l, v, p)?;
    let g = b.mul(&l.gram().to_rat()).mul(&b.transpose());
    let g = g.to_int().ok_or_else(|| Error::Verification("neighbour is not integral".into()))?;
    let nb = Lattice::new(g)?;
    if !nb.is_even() {
        return Err(Error::Verification("neighbour is not even".into()));
    }
    if nb.det() != l.det() {
        return Err(Error::Verification("neighbour determinant differs".into()));
    }
    if nb.is_negative_definite() || nb.is_positive_definite() {
        reduce(&nb)
    } else {
        Ok(nb)
    }
}

/// LLL-reduced copy of a definite lattice.
pub fn reduce(l: &Lattice) -> Result<Lattice> {
    let (pg, sign) = PosGram::from_lattice(l)?;
    let red = definite::lll(&pg)?;
    let g: Vec<Vec<i64>> = red.gram.g.iter().map(|r| r.iter().map(|x| x * sign).collect()).collect();
    Lattice::from_i64(&g)
}

/// Isometry invariant used to separate classes cheaply.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub root_type: RootSystemType,
    /// Numbers of vectors (both signs) of norms `∓2, ∓4, ∓6`.
    pub counts: Vec<u64>,
}

impl Fingerprint {
    pub fn of(d: &Definite) -> Result<Self> {
        let counts = d.ellipsoid.norm_counts(6)?;
        Ok(Fingerprint {
            root_type: d.root_type()?,
            counts: (1..=3).map(|k| counts.get(&(2 * k)).copied().unwrap_or(0)).collect(),
        })
    }

    pub fn roots(&self) -> u64 {
        self.counts[0]
    }

    pub fn m4(&self) -> u64 {
        self.counts[1]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassEntry {
    #[serde(with = "serial::int_matrix")]
    pub gram: IntMatrix,
    pub fingerprint: Fingerprint,
    #[serde(with = "serial::int_str")]
    pub aut_order: BigInt,
}

impl ClassEntry {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.gram.clone())
    }

    pub fn mass_contribution(&self) -> Rat {
        Rat::new(BigInt::one(), self.aut_order.clone())
    }
}

/// Representatives of the classes found so far, with walk state for resumption.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassList {
    pub genus: GenusDescriptor,
    #[serde(with = "serial::rat_str")]
    pub target_mass: Rat,
    #[serde(with = "serial::rat_str")]
    pub accumulated_mass: Rat,
    pub classes: Vec<ClassEntry>,
    pub p: u64,
    pub rng_seed: u64,
    /// Position of the ChaCha stream, as a decimal string.
    pub rng_word_pos: String,
    pub iterations: u64,
    pub complete: bool,
    pub assumptions: Vec<String>,
}

impl ClassList {
    pub fn fingerprints(&self) -> Vec<Fingerprint> {
        let mut f: Vec<Fingerprint> = self.classes.iter().map(|c| c.fingerprint.clone()).collect();
        f.sort();
        f
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(self)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }

    /// Sorts the classes by (fingerprint, |O|, Gram).
    pub fn canonicalize(&mut self) {
        self.classes.sort_by(|a, b| {
            (&a.fingerprint, &a.aut_order, a.gram.to_rows()).cmp(&(&b.fingerprint, &b.aut_order, b.gram.to_rows()))
        });
    }

    /// Writes `class_XX.json` lattice files and `manifest.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut entries = Vec::new();
        for (i, c) in self.classes.iter().enumerate() {
            let name = format!("class_{:02}", i);
            let lf = LatticeFile::from_lattice(&name, &c.lattice()?, None);
            fs::write(dir.join(format!("{name}.json")), serde_json::to_vec_pretty(&lf)?)?;
            entries.push(serde_json::json!({
                "name": name,
                "aut_order": c.aut_order.to_string(),
                "root_type": c.fingerprint.root_type.to_string(),
                "roots": c.fingerprint.roots(),
                "m4": c.fingerprint.m4(),
                "m6": c.fingerprint.counts[2],
            }));
        }
        let manifest = serde_json::json!({
            "genus_mass": serial::format_rat(&self.target_mass),
            "accumulated_mass": serial::format_rat(&self.accumulated_mass),
            "complete": self.complete,
            "p": self.p,
            "rng_seed": self.rng_seed,
            "iterations": self.iterations,
            "assumptions": self.assumptions,
            "classes": entries,
        });
        fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct WalkConfig {
    pub p: u64,
    pub rng_seed: u64,
    pub max_iter: u64,
    /// Resumable checkpoint written after every new class.
    pub checkpoint: Option<PathBuf>,
    /// Iterations without a new class before fingerprint collisions are resolved by isometry tests.
    pub stagnation: u64,
}

impl WalkConfig {
    pub fn new(p: u64, rng_seed: u64) -> Self {
        WalkConfig { p, rng_seed, max_iter: 1_000_000, checkpoint: None, stagnation: 500 }
    }
}

fn new_entry(l: &Lattice) -> Result<(ClassEntry, Definite)> {
    let d = Definite::new(l)?;
    let fingerprint = Fingerprint::of(&d)?;
    let aut = d.automorphism_group()?;
    Ok((ClassEntry { gram: l.gram().clone(), fingerprint, aut_order: aut.order }, d))
}

fn random_vector(rng: &mut ChaCha8Rng, l: &Lattice, p: u64) -> Vec<Int> {
    let pb = BigInt::from(p);
    loop {
        let v: Vec<Int> = (0..l.rank()).map(|_| BigInt::from(rng.gen_range(0..p))).collect();
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        if (l.norm(&v) % &pb).is_zero() {
            return v;
        }
    }
}

/// Classifies the genus of `seed` by random `p`-neighbours until the mass is exhausted.
pub fn classify_by_random_walk(seed: &Lattice, cfg: &WalkConfig) -> Result<ClassList> {
    if !is_odd_prime(cfg.p) {
        return Err(Error::Precondition(format!("{} is not an odd prime", cfg.p)));
    }
    if (seed.det() % BigInt::from(cfg.p)).is_zero() {
        return Err(Error::Precondition(format!("p = {} divides the determinant", cfg.p)));
    }
    let genus = GenusDescriptor::of(seed)?;
    let target = genus_mass(&genus)?;

    let resumed = match &cfg.checkpoint {
        Some(path) if path.exists() => {
            let cl = ClassList::load(path)?;
            if cl.p != cfg.p || cl.rng_seed != cfg.rng_seed || cl.genus != genus {
                return Err(Error::Precondition("checkpoint belongs to a different walk".into()));
            }
            info!("resuming walk with {} classes after {} iterations", cl.classes.len(), cl.iterations);
            Some(cl)
        }
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut list = match resumed {
        Some(cl) => {
            rng.set_word_pos(cl.rng_word_pos.parse().map_err(|_| Error::Invalid("bad rng position".into()))?);
            cl
        }
        None => {
            let l = reduce(seed)?;
            let (entry, _) = new_entry(&l)?;
            ClassList {
                genus: genus.clone(),
                target_mass: target.clone(),
                accumulated_mass: entry.mass_contribution(),
                classes: vec![entry],
                p: cfg.p,
                rng_seed: cfg.rng_seed,
                rng_word_pos: "0".into(),
                iterations: 0,
                complete: false,
                assumptions: vec!["the genus is a single proper spinor genus".into()],
            }
        }
    };
    let mut lattices: Vec<Lattice> = list.classes.iter().map(|c| c.lattice()).collect::<Result<_>>()?;
    let mut by_fp: BTreeMap<Fingerprint, Vec<usize>> = BTreeMap::new();
    for (i, c) in list.classes.iter().enumerate() {
        by_fp.entry(c.fingerprint.clone()).or_default().push(i);
    }
    let mut since_new = 0u64;
    while list.accumulated_mass < list.target_mass {
        if list.iterations >= cfg.max_iter {
            if let Some(path) = &cfg.checkpoint {
                list.rng_word_pos = rng.get_word_pos().to_string();
                list.save(path)?;
            }
            return Err(Error::Exhausted(format!(
                "{} iterations, {} classes, mass {} of {}",
                list.iterations,
                list.classes.len(),
                serial::format_rat(&list.accumulated_mass),
                serial::format_rat(&list.target_mass)
            )));
        }
        list.iterations += 1;
        since_new += 1;
        let k = rng.gen_range(0..lattices.len());
        let l = &lattices[k];
        let v = random_vector(&mut rng, l, cfg.p);
        let v = match admissible_vector(l, &v, cfg.p) {
            Ok(v) => v,
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        };
        let nb = p_neighbor(l, &v, cfg.p)?;
        let d = Definite::new(&nb)?;
        let fp = Fingerprint::of(&d)?;
        let is_new = match by_fp.get(&fp) {
            None => true,
            Some(idx) if since_new > cfg.stagnation => {
                let mut found = false;
                for &i in idx {
                    if definite::is_isometric(&lattices[i], &nb)?.is_some() {
                        found = true;
                        break;
                    }
                }
                !found
            }
            Some(_) => false,
        };
        if !is_new {
            continue;
        }
        if !genus_member_check(&nb, &genus) {
            return Err(Error::Verification("neighbour left the genus".into()));
        }
        let (entry, _) = new_entry(&nb)?;
        list.accumulated_mass += entry.mass_contribution();
        info!(
            "iteration {}: class {} root type {} |O| = {} mass {}/{}",
            list.iterations,
            list.classes.len() + 1,
            entry.fingerprint.root_type,
            entry.aut_order,
            serial::format_rat(&list.accumulated_mass),
            serial::format_rat(&list.target_mass)
        );
        by_fp.entry(fp).or_default().push(list.classes.len());
        list.classes.push(entry);
        lattices.push(nb);
        since_new = 0;
        list.rng_word_pos = rng.get_word_pos().to_string();
        if let Some(path) = &cfg.checkpoint {
            list.save(path)?;
        }
    }
    if list.accumulated_mass != list.target_mass {
        return Err(Error::Verification("accumulated mass exceeds the genus mass".into()));
    }
    verify_pairwise(&list)?;
    list.complete = true;
    list.rng_word_pos = rng.get_word_pos().to_string();
    list.canonicalize();
    if let Some(path) = &cfg.checkpoint {
        list.save(path)?;
    }
    debug!("walk finished after {} iterations", list.iterations);
    Ok(list)
}

/// Checks that classes sharing a fingerprint are not isometric.
pub fn verify_pairwise(list: &ClassList) -> Result<()> {
    let lattices: Vec<Lattice> = list.classes.iter().map(|c| c.lattice()).collect::<Result<_>>()?;
    for i in 0..lattices.len() {
        for j in i + 1..lattices.len() {
            if list.classes[i].fingerprint == list.classes[j].fingerprint
                && definite::is_isometric(&lattices[i], &lattices[j])?.is_some()
            {
                return Err(Error::Verification(format!("classes {i} and {j} are isometric")));
            }
        }
    }
    Ok(())
}

/// Sum of `1/|O(L)|` over the list.
pub fn accumulated_mass(list: &ClassList) -> Rat {
    list.classes.iter().map(|c| c.mass_contribution()).fold(Rat::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matrix::ivec;

    fn seed() -> Lattice {
        catalog::d(8).direct_sum(&catalog::e8().rescale(2).unwrap())
    }

    #[test]
    fn neighbour_preserves_genus() {
        let l = seed();
        let g = GenusDescriptor::of(&l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let v = random_vector(&mut rng, &l, 3);
            let v = admissible_vector(&l, &v, 3).unwrap();
            let nb = p_neighbor(&l, &v, 3).unwrap();
            assert_eq!(nb.det(), l.det());
            assert!(genus_member_check(&nb, &g));
        }
    }

    #[test]
    fn neighbour_preconditions() {
        let l = seed();
        let mut v = vec![Int::zero(); 16];
        v[0] = 3.into();
        assert!(matches!(p_neighbor(&l, &v, 3), Err(Error::Precondition(_))));
        assert!(matches!(p_neighbor(&l, &v, 2), Err(Error::Precondition(_))));
        assert!(matches!(p_neighbor(&catalog::a(2), &ivec(&[1, 0]), 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn membership() {
        let g = GenusDescriptor::of(&seed()).unwrap();
        assert!(genus_member_check(&seed(), &g));
        let e = catalog::e8().rescale(2).unwrap();
        assert!(!genus_member_check(&e.direct_sum(&e), &g));
    }

    #[test]
    fn e8_squared_genus_has_two_classes() {
        let l = catalog::e8().direct_sum(&catalog::e8());
        let list = classify_by_random_walk(&l, &WalkConfig::new(3, 1)).unwrap();
        assert_eq!(list.classes.len(), 2);
        assert_eq!(accumulated_mass(&list), list.target_mass);
    }
}

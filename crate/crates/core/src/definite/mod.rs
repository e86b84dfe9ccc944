//! Definite lattices: short vectors, root systems, automorphism groups, isometry testing.

pub mod autom;
pub mod enumerate;
pub mod gram;
pub mod roots;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{ivec, IntMatrix};

pub use autom::{Frame, VectorSet};
pub use enumerate::Ellipsoid;
pub use gram::{lll, PosGram};
pub use roots::RootSystemType;

/// Vectors of a given norm, one per `±` pair, first nonzero coordinate positive, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortVectorSet {
    pub norm: i64,
    pub vectors: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsometryGroup {
    #[serde(with = "matrices")]
    pub generators: Vec<IntMatrix>,
    #[serde(with = "crate::serial::int_str")]
    pub order: BigInt,
}

mod matrices {
    use super::IntMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct M(#[serde(with = "crate::serial::int_matrix")] IntMatrix);

    pub fn serialize<S: Serializer>(v: &[IntMatrix], s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<M> = v.iter().map(|m| M(m.clone())).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<IntMatrix>, D::Error> {
        let w: Vec<M> = Vec::deserialize(d)?;
        Ok(w.into_iter().map(|m| m.0).collect())
    }
}

/// A definite lattice prepared for enumeration (sign-normalised to positive definite).
#[derive(Clone, Debug)]
pub struct Definite {
    pub sign: i64,
    pub ellipsoid: Ellipsoid,
}

impl Definite {
    pub fn new(l: &Lattice) -> Result<Self> {
        let (g, sign) = PosGram::from_lattice(l)?;
        Ok(Definite { sign, ellipsoid: Ellipsoid::new(&g)? })
    }

    pub fn from_pos_gram(g: &PosGram) -> Result<Self> {
        Ok(Definite { sign: 1, ellipsoid: Ellipsoid::new(g)? })
    }

    pub fn gram(&self) -> &PosGram {
        &self.ellipsoid.original
    }

    /// Vectors with `⟨v, v⟩ = k` in the lattice's own sign convention.
    pub fn short_vectors(&self, k: i64) -> Result<ShortVectorSet> {
        let target = k * self.sign;
        if target <= 0 {
            return Ok(ShortVectorSet { norm: k, vectors: Vec::new() });
        }
        let vectors = self.ellipsoid.short_vectors(target)?.into_iter().filter(|(_, n)| *n == target).map(|(v, _)| v).collect();
        Ok(ShortVectorSet { norm: k, vectors })
    }

    /// Number of vectors of norm `k`, both signs counted.
    pub fn count_vectors(&self, k: i64) -> Result<u64> {
        let target = k * self.sign;
        if target <= 0 {
            return Ok(if k == 0 { 1 } else { 0 });
        }
        Ok(self.ellipsoid.norm_counts(target)?.get(&target).copied().unwrap_or(0))
    }

    /// Counts for all norms up to `|bound|`, both signs, keyed by the signed norm.
    pub fn norm_counts(&self, bound: i64) -> Result<BTreeMap<i64, u64>> {
        Ok(self.ellipsoid.norm_counts(bound.abs())?.into_iter().map(|(k, c)| (k * self.sign, c)).collect())
    }

    /// Roots (norm `±2` in the lattice's convention), one per `±` pair.
    pub fn roots(&self) -> Result<Vec<Vec<i64>>> {
        Ok(self.short_vectors(2 * self.sign)?.vectors)
    }

    pub fn root_type(&self) -> Result<RootSystemType> {
        let r = self.roots()?;
        Ok(roots::classify(self.gram(), &r))
    }

    fn prepared(&self) -> Result<(VectorSet, Frame)> {
        let red = &self.ellipsoid.reduced.gram;
        let bound = (0..red.n).map(|i| red.g[i][i]).max().unwrap_or(0);
        let vs = VectorSet::new(&self.ellipsoid, bound)?;
        let frame = Frame::new(&vs)?;
        Ok((vs, frame))
    }

    pub fn automorphism_group(&self) -> Result<IsometryGroup> {
        let (vs, frame) = self.prepared()?;
        let (gens, order) = autom::automorphisms(&vs, &frame)?;
        for g in &gens {
            if gram::congruence(&self.gram().g, g)? != self.gram().g {
                return Err(Error::Verification("automorphism does not preserve the Gram matrix".into()));
            }
        }
        Ok(IsometryGroup { generators: gens.iter().map(|g| IntMatrix::from_i64(g)).collect(), order })
    }

    /// An isometry `g` with `g · G_other · gᵀ = G_self`, if one exists.
    pub fn isometry_to(&self, other: &Definite) -> Result<Option<IntMatrix>> {
        if self.sign != other.sign || self.gram().n != other.gram().n {
            return Ok(None);
        }
        if IntMatrix::from_i64(&self.gram().g).det() != IntMatrix::from_i64(&other.gram().g).det() {
            return Ok(None);
        }
        let (vs1, frame) = self.prepared()?;
        let vs2 = VectorSet::new(&other.ellipsoid, vs1.bound)?;
        if vs1.norm_counts() != vs2.norm_counts() {
            return Ok(None);
        }
        let mut images = Vec::new();
        let mut budget = autom::DEFAULT_BUDGET;
        let Some(g) = frame.search(&vs2, &mut images, &mut budget)? else { return Ok(None) };
        if gram::congruence(&other.gram().g, &g)? != self.gram().g {
            return Err(Error::Verification("isometry check failed".into()));
        }
        Ok(Some(IntMatrix::from_i64(&g)))
    }
}

pub fn short_vectors(l: &Lattice, k: i64) -> Result<ShortVectorSet> {
    Definite::new(l)?.short_vectors(k)
}

pub fn count_vectors(l: &Lattice, k: i64) -> Result<u64> {
    Definite::new(l)?.count_vectors(k)
}

pub fn root_type(l: &Lattice) -> Result<RootSystemType> {
    Definite::new(l)?.root_type()
}

pub fn automorphism_group(l: &Lattice) -> Result<IsometryGroup> {
    Definite::new(l)?.automorphism_group()
}

/// `G` with `G · gram(l2) · Gᵀ = gram(l1)`, or `None`.
pub fn is_isometric(l1: &Lattice, l2: &Lattice) -> Result<Option<IntMatrix>> {
    let d1 = Definite::new(l1)?;
    let d2 = Definite::new(l2)?;
    let g = d1.isometry_to(&d2)?;
    if let Some(g) = &g {
        if &l2.gram().congruence(g) != l1.gram() {
            return Err(Error::Verification("isometry does not match Gram matrices".into()));
        }
    }
    Ok(g)
}

/// Converts a short-vector row to big integers.
pub fn big_row(v: &[i64]) -> Vec<crate::matrix::Int> {
    ivec(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn root_counts() {
        assert_eq!(count_vectors(&catalog::d(8), -2).unwrap(), 112);
        assert_eq!(count_vectors(&catalog::e8(), -2).unwrap(), 240);
        assert_eq!(count_vectors(&catalog::e8().rescale(2).unwrap(), -4).unwrap(), 240);
        assert_eq!(count_vectors(&catalog::e8(), 2).unwrap(), 0);
        assert_eq!(count_vectors(&catalog::e8(), -3).unwrap(), 0);
        assert_eq!(short_vectors(&catalog::d(8), -2).unwrap().vectors.len(), 56);
    }

    #[test]
    fn root_types() {
        assert_eq!(root_type(&catalog::e8()).unwrap().to_string(), "E8");
        assert_eq!(root_type(&catalog::e8().rescale(2).unwrap()).unwrap().to_string(), "0");
        let l = catalog::d(8).direct_sum(&catalog::e8().rescale(2).unwrap());
        assert_eq!(root_type(&l).unwrap().to_string(), "D8");
        let l = catalog::a(1).direct_sum(&catalog::a(1)).direct_sum(&catalog::e(6)).direct_sum(&catalog::d(4));
        assert_eq!(root_type(&l).unwrap().to_string(), "A1^2+D4+E6");
        assert_eq!(root_type(&catalog::e(7)).unwrap().to_string(), "E7");
        assert_eq!(root_type(&catalog::a(5)).unwrap().to_string(), "A5");
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(automorphism_group(&catalog::a(1)).unwrap().order, 2.into());
        assert_eq!(automorphism_group(&catalog::a(2)).unwrap().order, 12.into());
        assert_eq!(automorphism_group(&catalog::d(4)).unwrap().order, 1152.into());
        assert_eq!(automorphism_group(&catalog::e(6)).unwrap().order, 103680.into());
        assert_eq!(automorphism_group(&catalog::e8()).unwrap().order, 696729600u64.into());
        let a1a1 = catalog::a(1).direct_sum(&catalog::a(1));
        assert_eq!(automorphism_group(&a1a1).unwrap().order, 8.into());
    }

    #[test]
    fn isometry_of_permuted_basis() {
        let l = catalog::d(4).direct_sum(&catalog::a(2));
        let n = l.rank();
        let mut p = IntMatrix::zeros(n, n);
        let perm = [3, 5, 0, 1, 4, 2];
        for (i, &j) in perm.iter().enumerate() {
            p[(i, j)] = 1.into();
        }
        p.add_row_multiple(0, 1, &2.into());
        let l2 = Lattice::new(l.gram().congruence(&p)).unwrap();
        let g = is_isometric(&l, &l2).unwrap().unwrap();
        assert_eq!(&l2.gram().congruence(&g), l.gram());
        assert!(is_isometric(&catalog::d(4), &catalog::a(4)).unwrap().is_none());
    }
}

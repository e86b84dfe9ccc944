//! 2-elementary finite quadratic forms: discriminant forms of even lattices, glue maps,
//! the homomorphism `η(L): O(L) → O(q(L))`, and orders of finite orthogonal groups.
//!
//! Group elements are bit masks over the generators. Quadratic values are kept in half
//! units modulo 4 (`q = k/2 mod 2`), bilinear values in half units modulo 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DualVector, Lattice};
use crate::matrix::{self, rat_from_int, IntMatrix, Rat};
use crate::perm::{self, Perm};

/// Maximum number of generators for which every group element is enumerated.
pub const EXHAUSTIVE_RANK: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuadraticForm {
    /// `q(g_i) = q_half[i] / 2 mod 2`.
    q_half: Vec<u8>,
    /// `b(g_i, g_j) = b_half[i][j] / 2 mod 1`.
    b_half: Vec<Vec<u8>>,
    /// Representatives of the generators in `L∨`, when the form comes from a lattice.
    #[serde(skip)]
    gens: Vec<DualVector>,
    /// Coordinates map: `c(y) = (y · coord) mod 2` for `y ∈ L∨` in lattice coordinates.
    #[serde(skip)]
    coord: Option<IntMatrix>,
}

fn half_units(x: &Rat, modulus: i64) -> Result<u8> {
    let two = Rat::from_integer(BigInt::from(2));
    let y = x * two;
    if !y.is_integer() {
        return Err(Error::Unsupported("discriminant form is not 2-elementary".into()));
    }
    let v = y.to_integer().mod_floor(&BigInt::from(modulus));
    Ok(u8::try_from(v).unwrap())
}

impl FiniteQuadraticForm {
    /// Abstract form from generator values.
    pub fn new(q_half: Vec<u8>, b_half: Vec<Vec<u8>>) -> Result<Self> {
        let n = q_half.len();
        if b_half.len() != n || b_half.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("bilinear matrix has wrong shape".into()));
        }
        for i in 0..n {
            if q_half[i] > 3 || b_half[i][i] != q_half[i] % 2 {
                return Err(Error::Invalid("q and b are incompatible on the diagonal".into()));
            }
            for j in 0..n {
                if b_half[i][j] > 1 || b_half[i][j] != b_half[j][i] {
                    return Err(Error::Invalid("bilinear matrix must be symmetric with half values".into()));
                }
            }
        }
        Ok(FiniteQuadraticForm { q_half, b_half, gens: Vec::new(), coord: None })
    }

    /// The hyperbolic plane `u`: `q(x, y) = xy`.
    pub fn u() -> Self {
        Self::new(vec![0, 0], vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    /// The anisotropic plane `v`: all nonzero values equal 1.
    pub fn v() -> Self {
        Self::new(vec![2, 2], vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    pub fn zero() -> Self {
        Self::new(Vec::new(), Vec::new()).unwrap()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.rank();
        let m = other.rank();
        let mut q = self.q_half.clone();
        q.extend(&other.q_half);
        let mut b = vec![vec![0u8; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                b[i][j] = self.b_half[i][j];
            }
        }
        for i in 0..m {
            for j in 0..m {
                b[n + i][n + j] = other.b_half[i][j];
            }
        }
        Self::new(q, b).unwrap()
    }

    pub fn power(&self, k: usize) -> Self {
        (0..k).fold(Self::zero(), |acc, _| acc.direct_sum(self))
    }

    pub fn rank(&self) -> usize {
        self.q_half.len()
    }

    pub fn order(&self) -> BigInt {
        BigInt::one() << self.rank()
    }

    pub fn generators(&self) -> &[DualVector] {
        &self.gens
    }

    pub fn generator_values(&self) -> &[u8] {
        &self.q_half
    }

    pub fn bilinear_matrix(&self) -> &[Vec<u8>] {
        &self.b_half
    }

    /// `2 q(x) mod 4`.
    pub fn value(&self, x: u64) -> u8 {
        let mut acc: u32 = 0;
        let n = self.rank();
        for i in 0..n {
            if x >> i & 1 == 0 {
                continue;
            }
            acc += self.q_half[i] as u32;
            for j in i + 1..n {
                if x >> j & 1 == 1 {
                    acc += 2 * self.b_half[i][j] as u32;
                }
            }
        }
        (acc % 4) as u8
    }

    /// `2 b(x, y) mod 2`.
    pub fn bilinear(&self, x: u64, y: u64) -> u8 {
        let mut acc = 0u8;
        for i in 0..self.rank() {
            if x >> i & 1 == 0 {
                continue;
            }
            for j in 0..self.rank() {
                if y >> j & 1 == 1 {
                    acc ^= self.b_half[i][j];
                }
            }
        }
        acc & 1
    }

    /// All values lie in `Z/2Z`.
    pub fn is_even_type(&self) -> bool {
        self.q_half.iter().all(|&k| k % 2 == 0)
    }

    pub fn is_nondegenerate(&self) -> bool {
        let rows: Vec<u64> = (0..self.rank())
            .map(|i| (0..self.rank()).fold(0u64, |m, j| m | ((self.b_half[i][j] as u64) << j)))
            .collect();
        f2_rank(&rows, self.rank()) == self.rank()
    }

    pub fn negate(&self) -> Self {
        FiniteQuadraticForm {
            q_half: self.q_half.iter().map(|&k| (4 - k) % 4).collect(),
            b_half: self.b_half.clone(),
            gens: self.gens.clone(),
            coord: self.coord.clone(),
        }
    }

    /// Counts of elements with `2q = 0, 1, 2, 3 mod 4`.
    pub fn value_counts(&self) -> [u64; 4] {
        assert!(self.rank() <= EXHAUSTIVE_RANK, "exhaustive enumeration limited to small ranks");
        let mut c = [0u64; 4];
        for x in 0..(1u64 << self.rank()) {
            c[self.value(x) as usize] += 1;
        }
        c
    }

    /// Signature mod 8 from the Gauss sum `Σ exp(πi q(x)) = √|A| · exp(2πi σ / 8)`.
    pub fn gauss_signature(&self) -> Result<u8> {
        if !self.is_nondegenerate() {
            return Err(Error::Degenerate("finite quadratic form is degenerate".into()));
        }
        let c = self.value_counts();
        let re = c[0] as i64 - c[2] as i64;
        let im = c[1] as i64 - c[3] as i64;
        let sig = match (re.signum(), im.signum()) {
            (1, 0) => 0,
            (1, 1) => 1,
            (0, 1) => 2,
            (-1, 1) => 3,
            (-1, 0) => 4,
            (-1, -1) => 5,
            (0, -1) => 6,
            (1, -1) => 7,
            _ => return Err(Error::Degenerate("vanishing Gauss sum".into())),
        };
        Ok(sig)
    }

    /// Complete isomorphism invariant of a nondegenerate 2-elementary form:
    /// (rank, parity, signature mod 8).
    pub fn invariants(&self) -> Result<(usize, bool, u8)> {
        Ok((self.rank(), self.is_even_type(), self.gauss_signature()?))
    }

    /// Coordinates of `y ∈ L∨` (lattice coordinates) as a bit mask over the generators.
    pub fn coordinates(&self, y: &[Rat]) -> Result<u64> {
        let coord = self.coord.as_ref().ok_or_else(|| Error::Invalid("form has no lattice realisation".into()))?;
        let mut mask = 0u64;
        let qc = coord.to_rat();
        let img = qc.vec_mul(y);
        for (i, c) in img.iter().enumerate() {
            if !c.is_integer() {
                return Err(Error::Invalid("vector is not in the dual lattice".into()));
            }
            if c.to_integer().is_odd() {
                mask |= 1 << i;
            }
        }
        Ok(mask)
    }

    /// Representative in `L∨` of a group element.
    pub fn lift(&self, x: u64) -> Vec<Rat> {
        let n = self.gens.first().map_or(0, |g| g.coords.len());
        let mut v = vec![Rat::zero(); n];
        for (i, g) in self.gens.iter().enumerate() {
            if x >> i & 1 == 1 {
                for (a, b) in v.iter_mut().zip(&g.coords) {
                    *a += b;
                }
            }
        }
        v
    }
}

/// Discriminant form `q(L)` with generators from the Smith normal form of the Gram matrix.
pub fn discriminant_form(l: &Lattice) -> Result<FiniteQuadraticForm> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    let gens = l.discriminant_generators();
    if gens.iter().any(|(_, d)| d != &BigInt::from(2)) {
        return Err(Error::Unsupported("discriminant group is not 2-elementary".into()));
    }
    discriminant_form_with(l, gens.into_iter().map(|(g, _)| g).collect())
}

/// Discriminant form with prescribed generators (which must form an F2-basis of `L∨/L`).
pub fn discriminant_form_with(l: &Lattice, gens: Vec<DualVector>) -> Result<FiniteQuadraticForm> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    let g = l.gram().to_rat();
    let n = gens.len();
    let mut q_half = Vec::with_capacity(n);
    let mut b_half = vec![vec![0u8; n]; n];
    for i in 0..n {
        if !l.is_dual_vector(&gens[i].coords) {
            return Err(Error::Invalid("generator is not a dual vector".into()));
        }
        q_half.push(half_units(&g.form(&gens[i].coords, &gens[i].coords), 4)?);
        for j in 0..n {
            b_half[i][j] = half_units(&g.form(&gens[i].coords, &gens[j].coords), 2)?;
        }
    }
    // coordinate map: Smith coordinates, then change of basis to the given generators
    let snf = matrix::snf(l.gram());
    let idx: Vec<usize> = (0..l.rank()).filter(|&i| !(snf.d[(i, i)].clone() * snf.d[(i, i)].clone()).is_one()).collect();
    if idx.len() != n {
        return Err(Error::Invalid("generator count differs from the discriminant rank".into()));
    }
    if idx.iter().any(|&i| snf.d[(i, i)] != BigInt::from(2) && snf.d[(i, i)] != BigInt::from(-2)) {
        return Err(Error::Unsupported("discriminant group is not 2-elementary".into()));
    }
    // y ↦ y G V restricted to idx
    let gv = l.gram().mul(&snf.v);
    let c0 = IntMatrix::from_rows_with_cols(
        (0..l.rank()).map(|r| idx.iter().map(|&c| gv[(r, c)].clone()).collect()).collect(),
        n,
    );
    let qc0 = c0.to_rat();
    let mut t_rows = Vec::with_capacity(n);
    for gen in &gens {
        let img = qc0.vec_mul(&gen.coords);
        let mut mask = 0u64;
        for (i, c) in img.iter().enumerate() {
            if !c.is_integer() {
                return Err(Error::Invalid("generator is not a dual vector".into()));
            }
            if c.to_integer().is_odd() {
                mask |= 1 << i;
            }
        }
        t_rows.push(mask);
    }
    let tinv = f2_inverse(&t_rows, n).ok_or_else(|| Error::Invalid("generators are not a basis of L∨/L".into()))?;
    // coord = c0 · T⁻¹ (mod 2)
    let mut coord = IntMatrix::zeros(l.rank(), n);
    for r in 0..l.rank() {
        for j in 0..n {
            let mut acc = BigInt::zero();
            for k in 0..n {
                if tinv[k] >> j & 1 == 1 {
                    acc += &c0[(r, k)];
                }
            }
            coord[(r, j)] = acc;
        }
    }
    Ok(FiniteQuadraticForm { q_half, b_half, gens, coord: Some(coord) })
}

/// Rank of an F2 matrix given as row bit masks.
pub fn f2_rank(rows: &[u64], _cols: usize) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i] >> bit & 1 == 1 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of an invertible `n × n` F2 matrix (row masks).
pub fn f2_inverse(rows: &[u64], n: usize) -> Option<Vec<u64>> {
    let mut a = rows.to_vec();
    let mut inv: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| a[i] >> c & 1 == 1)?;
        a.swap(c, p);
        inv.swap(c, p);
        for i in 0..n {
            if i != c && a[i] >> c & 1 == 1 {
                a[i] ^= a[c];
                inv[i] ^= inv[c];
            }
        }
    }
    Some(inv)
}

/// `x · M` for a row vector mask `x` and row masks of `M`.
pub fn f2_apply(rows: &[u64], x: u64) -> u64 {
    rows.iter().enumerate().fold(0, |acc, (i, r)| if x >> i & 1 == 1 { acc ^ r } else { acc })
}

/// An isometry of a finite quadratic form, as an F2 matrix (generator `i ↦ rows[i]`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteIsometry {
    pub rows: Vec<u64>,
}

impl FiniteIsometry {
    pub fn identity(n: usize) -> Self {
        FiniteIsometry { rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn apply(&self, x: u64) -> u64 {
        f2_apply(&self.rows, x)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &FiniteIsometry) -> FiniteIsometry {
        FiniteIsometry { rows: self.rows.iter().map(|&r| other.apply(r)).collect() }
    }

    pub fn preserves(&self, q: &FiniteQuadraticForm) -> bool {
        let n = q.rank();
        if f2_rank(&self.rows, n) != n {
            return false;
        }
        (0..n).all(|i| {
            q.value(self.rows[i]) == q.value(1 << i)
                && (0..n).all(|j| q.bilinear(self.rows[i], self.rows[j]) == q.b_half[i][j])
        })
    }

    pub fn to_perm(&self, rank: usize) -> Perm {
        Perm((0..(1u64 << rank)).map(|x| self.apply(x) as u32).collect())
    }
}

/// `η(L)(g)`: the action of an isometry `g` (matrix in lattice coordinates, right action) on
/// the discriminant form.
pub fn eta(l: &Lattice, q: &FiniteQuadraticForm, g: &IntMatrix) -> Result<FiniteIsometry> {
    if g.rows() != l.rank() || g.cols() != l.rank() {
        return Err(Error::Invalid("isometry has wrong size".into()));
    }
    if &l.gram().congruence(g) != l.gram() {
        return Err(Error::Invalid("matrix is not an isometry of the lattice".into()));
    }
    let gq = g.to_rat();
    let mut rows = Vec::with_capacity(q.rank());
    for gen in q.generators() {
        let img = gq.vec_mul(&gen.coords);
        rows.push(q.coordinates(&img)?);
    }
    Ok(FiniteIsometry { rows })
}

/// Order of the subgroup of `O(q)` generated by `gens`, via a stabiliser chain on the
/// `2^rank` group elements.
pub fn group_order_from_generators(rank: usize, gens: &[FiniteIsometry]) -> BigInt {
    assert!(rank <= EXHAUSTIVE_RANK);
    let perms: Vec<Perm> = gens.iter().map(|g| g.to_perm(rank)).collect();
    perm::group_order(1usize << rank, &perms)
}

/// An isomorphism of finite quadratic forms `source → target`; generator `i` of the source
/// maps to the target element with mask `matrix[i]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlueMap {
    pub source: FiniteQuadraticForm,
    pub target: FiniteQuadraticForm,
    #[serde(with = "bit_rows")]
    pub matrix: Vec<Vec<bool>>,
}

mod bit_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<bool>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<u8>> = m.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<bool>>, D::Error> {
        let rows: Vec<Vec<u8>> = Vec::deserialize(d)?;
        Ok(rows.into_iter().map(|r| r.into_iter().map(|b| b != 0).collect()).collect())
    }
}

impl GlueMap {
    pub fn image_mask(&self, i: usize) -> u64 {
        self.matrix[i].iter().enumerate().fold(0, |m, (j, &b)| if b { m | 1 << j } else { m })
    }

    pub fn masks(&self) -> Vec<u64> {
        (0..self.matrix.len()).map(|i| self.image_mask(i)).collect()
    }

    pub fn apply(&self, x: u64) -> u64 {
        f2_apply(&self.masks(), x)
    }

    /// Checks that the map is bijective and preserves `q`; exhaustively for small ranks.
    pub fn check_isometry(&self) -> Result<()> {
        let n = self.source.rank();
        if self.target.rank() != n || self.matrix.len() != n {
            return Err(Error::Invalid("glue map between groups of different orders".into()));
        }
        let masks = self.masks();
        if f2_rank(&masks, n) != n {
            return Err(Error::Invalid("glue map is not invertible".into()));
        }
        let ok = if n <= EXHAUSTIVE_RANK {
            (0..(1u64 << n)).all(|x| self.target.value(f2_apply(&masks, x)) == self.source.value(x))
        } else {
            (0..n).all(|i| {
                self.target.value(masks[i]) == self.source.value(1 << i)
                    && (0..n).all(|j| self.target.bilinear(masks[i], masks[j]) == self.source.b_half[i][j])
            })
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid("glue map does not preserve the quadratic form".into()))
        }
    }

    /// `O(φ)`: transports an isometry of the source to the target.
    pub fn transport(&self, g: &FiniteIsometry) -> FiniteIsometry {
        let n = self.source.rank();
        let masks = self.masks();
        let inv = f2_inverse(&masks, n).expect("glue maps are invertible");
        // target generator j ↦ φ(g(φ⁻¹(t_j)))
        FiniteIsometry { rows: (0..n).map(|j| f2_apply(&masks, g.apply(inv[j]))).collect() }
    }
}

/// Splits a nondegenerate even-type form into hyperbolic planes and at most one `v`.
/// Returns the new basis as pairs `(x, y)` of masks and whether the last pair is a `v`.
fn symplectic_split(q: &FiniteQuadraticForm) -> Option<(Vec<(u64, u64)>, bool)> {
    let n = q.rank();
    if n % 2 == 1 || !q.is_even_type() || !q.is_nondegenerate() {
        return None;
    }
    let mut space: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    let mut pairs = Vec::new();
    let mut anisotropic = false;
    while !space.is_empty() {
        let k = space.len();
        let span = |c: u64| -> u64 {
            space.iter().enumerate().fold(0, |acc, (i, &b)| if c >> i & 1 == 1 { acc ^ b } else { acc })
        };
        // isotropic nonzero vector of the current subspace
        let iso = (1..(1u64 << k)).map(span).find(|&x| q.value(x) == 0);
        let (x, y) = match iso {
            Some(x) => {
                let mut y = (1..(1u64 << k)).map(span).find(|&y| q.bilinear(x, y) == 1)?;
                if q.value(y) != 0 {
                    y ^= x;
                }
                (x, y)
            }
            None => {
                if k != 2 {
                    return None;
                }
                anisotropic = true;
                (space[0], space[1])
            }
        };
        // orthogonal complement of <x, y> inside the current subspace
        let mut rest = Vec::new();
        for &z in &space {
            let mut z2 = z;
            if q.bilinear(z, y) == 1 {
                z2 ^= x;
            }
            if q.bilinear(z, x) == 1 {
                z2 ^= y;
            }
            rest.push(z2);
        }
        let mut basis = Vec::new();
        for z in rest {
            let mut cand = basis.clone();
            cand.push(z);
            if z != 0 && f2_rank(&cand, n) == cand.len() {
                basis = cand;
            }
        }
        basis.truncate(k - 2);
        pairs.push((x, y));
        space = basis;
        if space.len() != k - 2 {
            return None;
        }
    }
    Some((pairs, anisotropic))
}

/// Finds some isometry `q1 → q2` of 2-elementary forms, or `None` when they are not isomorphic.
/// Even-type forms use hyperbolic splitting; other forms use a backtracking search.
pub fn find_glue_isomorphism(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm) -> Option<GlueMap> {
    let n = q1.rank();
    if q2.rank() != n {
        return None;
    }
    let masks = if q1.is_even_type() && q2.is_even_type() {
        let (p1, an1) = symplectic_split(q1)?;
        let (p2, an2) = symplectic_split(q2)?;
        if an1 != an2 {
            // u ⊕ u ≅ v ⊕ v: not possible to disagree when both are maximal splittings
            return None;
        }
        let src: Vec<u64> = p1.iter().flat_map(|&(x, y)| [x, y]).collect();
        let dst: Vec<u64> = p2.iter().flat_map(|&(x, y)| [x, y]).collect();
        let inv = f2_inverse(&src, n)?;
        // generator i = Σ inv[i]_k src_k ↦ Σ inv[i]_k dst_k
        (0..n).map(|i| f2_apply(&dst, inv[i])).collect::<Vec<u64>>()
    } else {
        backtrack_isometry(q1, q2)?
    };
    let map = GlueMap {
        source: q1.clone(),
        target: q2.clone(),
        matrix: masks.iter().map(|&m| (0..n).map(|j| m >> j & 1 == 1).collect()).collect(),
    };
    map.check_isometry().ok()?;
    Some(map)
}

fn backtrack_isometry(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm) -> Option<Vec<u64>> {
    let n = q1.rank();
    if n > EXHAUSTIVE_RANK {
        return None;
    }
    fn rec(i: usize, n: usize, q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm, img: &mut Vec<u64>) -> bool {
        if i == n {
            return true;
        }
        for c in 1..(1u64 << n) {
            if q2.value(c) != q1.value(1 << i) {
                continue;
            }
            if (0..i).any(|j| q2.bilinear(img[j], c) != q1.b_half[j][i]) {
                continue;
            }
            img.push(c);
            if f2_rank(img, n) == img.len() && rec(i + 1, n, q1, q2, img) {
                return true;
            }
            img.pop();
        }
        false
    }
    let mut img = Vec::new();
    if rec(0, n, q1, q2, &mut img) {
        Some(img)
    } else {
        None
    }
}

/// Whether `(g, h) ∈ O(M) × O(N)` lifts to the glued lattice: `O(φ)(η(M)(g)) = η(N)(h)`.
pub fn lift_condition_check(phi: &GlueMap, eta_g: &FiniteIsometry, eta_h: &FiniteIsometry) -> bool {
    phi.transport(eta_g) == *eta_h
}

/// Convenience: the F2 coordinate vector of a rational vector lying in `L∨` against the
/// canonical generators `e_i / 2` of a lattice of the form `L(2)` with `L` unimodular.
pub fn halves_generators(rank: usize) -> Vec<DualVector> {
    (0..rank)
        .map(|i| {
            let mut c = vec![Rat::zero(); rank];
            c[i] = Rat::new(BigInt::one(), BigInt::from(2));
            DualVector { coords: c }
        })
        .collect()
}

/// `Rat` helper for half integers.
pub fn half(k: i64) -> Rat {
    Rat::new(BigInt::from(k), BigInt::from(2))
}

pub fn rat_int(k: &BigInt) -> Rat {
    rat_from_int(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn u_and_v_invariants() {
        assert_eq!(FiniteQuadraticForm::u().value_counts(), [3, 0, 1, 0]);
        assert_eq!(FiniteQuadraticForm::v().value_counts(), [1, 0, 3, 0]);
        assert_eq!(FiniteQuadraticForm::u().gauss_signature().unwrap(), 0);
        assert_eq!(FiniteQuadraticForm::v().gauss_signature().unwrap(), 4);
        let vv = FiniteQuadraticForm::v().power(2);
        let uu = FiniteQuadraticForm::u().power(2);
        assert!(find_glue_isomorphism(&vv, &uu).is_some());
        assert!(find_glue_isomorphism(&FiniteQuadraticForm::u(), &FiniteQuadraticForm::v()).is_none());
    }

    #[test]
    fn negation() {
        let u = FiniteQuadraticForm::u();
        assert_eq!(u.negate(), u);
        assert_eq!(FiniteQuadraticForm::zero().negate(), FiniteQuadraticForm::zero());
        let a1 = discriminant_form(&catalog::a(1)).unwrap();
        assert_eq!(a1.generator_values(), &[3]);
        assert_eq!(a1.negate().generator_values(), &[1]);
        assert_eq!(a1.negate().negate(), a1);
    }

    #[test]
    fn root_lattice_forms() {
        let d8 = discriminant_form(&catalog::d(8)).unwrap();
        assert_eq!(d8.invariants().unwrap(), FiniteQuadraticForm::u().invariants().unwrap());
        let e82 = discriminant_form(&catalog::e8().rescale(2).unwrap()).unwrap();
        assert_eq!(e82.invariants().unwrap(), FiniteQuadraticForm::u().power(4).invariants().unwrap());
        let s = catalog::l10().rescale(2).unwrap();
        let qs = discriminant_form(&s).unwrap();
        assert_eq!(qs.rank(), 10);
        assert_eq!(qs.invariants().unwrap(), FiniteQuadraticForm::u().power(5).invariants().unwrap());
        assert!(discriminant_form(&catalog::a(2)).is_err());
        assert!(matches!(discriminant_form(&Lattice::from_i64(&[vec![1]]).unwrap()), Err(Error::NotEven)));
    }

    #[test]
    fn polarisation_identity() {
        let q = discriminant_form(&catalog::l10().rescale(2).unwrap()).unwrap();
        for x in 0..(1u64 << 10) {
            for i in 0..10 {
                let y = 1u64 << i;
                let lhs = (q.value(x ^ y) + 8 - q.value(x) - q.value(y)) % 4;
                assert_eq!(lhs, 2 * q.bilinear(x, y) % 4);
            }
        }
    }

    #[test]
    fn simple_reflections_generate_o_q() {
        let l10 = catalog::l10();
        let s = l10.rescale(2).unwrap();
        let q = discriminant_form_with(&s, halves_generators(10)).unwrap();
        let gens: Vec<FiniteIsometry> = (0..10)
            .map(|i| {
                let mut e = vec![Rat::zero(); 10];
                e[i] = Rat::one();
                let r = l10.reflection(&e).unwrap();
                let g = eta(&s, &q, &r).unwrap();
                assert!(g.preserves(&q));
                g
            })
            .collect();
        assert_eq!(group_order_from_generators(10, &gens), BigInt::from(46998591897600u64));
    }

    #[test]
    fn glue_identity_on_u() {
        let u = FiniteQuadraticForm::u();
        let phi = find_glue_isomorphism(&u, &u).unwrap();
        phi.check_isometry().unwrap();
        assert!(find_glue_isomorphism(&u, &u.power(2)).is_none());
    }

    #[test]
    fn odd_forms_use_backtracking() {
        let a1 = discriminant_form(&catalog::a(1)).unwrap();
        let q = a1.direct_sum(&a1.negate());
        let r = a1.negate().direct_sum(&a1);
        assert!(find_glue_isomorphism(&q, &r).is_some());
        assert!(find_glue_isomorphism(&a1, &a1.negate()).is_none());
    }
}

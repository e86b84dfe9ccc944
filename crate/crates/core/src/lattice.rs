//! Integral lattices given by Gram matrices, their duals and discriminant
//! groups, orthogonal complements, and overlattices obtained by gluing.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fqf::GlueMap;
use crate::matrix::{
    self, hnf, int, left_kernel, qvec, rat_from_int, Int, IntMatrix, Rat, RatMatrix,
};
use crate::serial;

/// Inertia of a nondegenerate real symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }
}

/// A vector of `L ⊗ Q` in the coordinates of the basis of `L`, lying in `L∨`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualVector {
    #[serde(with = "serial::rat_vec")]
    pub coords: Vec<Rat>,
}

impl DualVector {
    pub fn zero(n: usize) -> Self {
        DualVector { coords: vec![Rat::zero(); n] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        matrix::qvec_is_integral(&self.coords)
    }
}

#[derive(Clone, Debug)]
pub struct ParentLink {
    pub parent: Arc<Lattice>,
    pub basis: RatMatrix,
}

/// An integral lattice: a nondegenerate symmetric integer Gram matrix, optionally
/// realised inside a parent lattice.
#[derive(Clone, Debug)]
pub struct Lattice {
    gram: IntMatrix,
    parent: Option<ParentLink>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for Lattice {}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::Invalid("Gram matrix is not symmetric".into()));
        }
        if gram.rows() == 0 {
            return Err(Error::Degenerate("rank 0".into()));
        }
        if gram.det().is_zero() {
            return Err(Error::Degenerate("Gram matrix is singular".into()));
        }
        Ok(Lattice { gram, parent: None })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    /// Sublattice spanned by the rows of `basis` (rational coordinates in `parent`).
    pub fn sublattice(parent: &Arc<Lattice>, basis: RatMatrix) -> Result<Self> {
        let g = basis.mul(&parent.gram.to_rat()).mul(&basis.transpose());
        let gram = g.to_int().ok_or_else(|| Error::Invalid("sublattice Gram matrix is not integral".into()))?;
        let mut l = Lattice::new(gram)?;
        l.parent = Some(ParentLink { parent: parent.clone(), basis });
        Ok(l)
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn parent(&self) -> Option<&ParentLink> {
        self.parent.as_ref()
    }

    pub fn without_parent(&self) -> Lattice {
        Lattice { gram: self.gram.clone(), parent: None }
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> Int {
        self.gram.det()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn norm(&self, v: &[Int]) -> Int {
        self.gram.form(v, v)
    }

    pub fn pair(&self, x: &[Int], y: &[Int]) -> Int {
        self.gram.form(x, y)
    }

    pub fn qpair(&self, x: &[Rat], y: &[Rat]) -> Rat {
        self.gram.to_rat().form(x, y)
    }

    /// `L(m)`: the same module with form multiplied by `m`.
    pub fn rescale(&self, m: i64) -> Result<Lattice> {
        if m == 0 {
            return Err(Error::Invalid("rescaling by zero".into()));
        }
        Lattice::new(self.gram.scale(&int(m)))
    }

    pub fn negate(&self) -> Lattice {
        Lattice { gram: self.gram.scale(&int(-1)), parent: None }
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice { gram: self.gram.direct_sum(&other.gram), parent: None }
    }

    /// Matrix (right action) of `x ↦ x − 2⟨x, r⟩/⟨r, r⟩ · r` for `r ∈ L ⊗ Q`; errors if not integral.
    pub fn reflection(&self, r: &[Rat]) -> Result<IntMatrix> {
        let g = self.gram.to_rat();
        let nr = g.form(r, r);
        if nr.is_zero() {
            return Err(Error::Invalid("reflection in an isotropic vector".into()));
        }
        let gr = g.vec_mul(r);
        let n = self.rank();
        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let c = Rat::from_integer(int(2)) * &gr[j] / &nr;
            let row: Vec<Rat> = (0..n).map(|k| Rat::from_integer(int((j == k) as i64)) - &c * &r[k]).collect();
            rows.push(row);
        }
        RatMatrix::from_rows(rows, n).to_int().ok_or_else(|| Error::Invalid("reflection is not integral".into()))
    }

    /// Rows form the basis of `L∨` dual to the basis of `L`, in `L`-coordinates.
    pub fn dual_basis(&self) -> RatMatrix {
        self.gram.to_rat().inverse().expect("nondegenerate")
    }

    /// Gram matrix of `L∨` in the dual basis (equal to the inverse Gram matrix).
    pub fn dual_gram(&self) -> RatMatrix {
        self.dual_basis()
    }

    /// Whether a rational vector lies in `L∨`.
    pub fn is_dual_vector(&self, v: &[Rat]) -> bool {
        matrix::qvec_is_integral(&self.gram.to_rat().vec_mul(v))
    }

    /// Invariant factors (> 1) of `L∨/L`.
    pub fn discriminant_group(&self) -> Vec<Int> {
        matrix::snf(&self.gram)
            .diagonal()
            .into_iter()
            .map(|d| d.abs())
            .filter(|d| !d.is_one())
            .collect()
    }

    /// Generators of `L∨/L` as dual vectors, paired with their orders.
    pub fn discriminant_generators(&self) -> Vec<(DualVector, Int)> {
        let s = matrix::snf(&self.gram);
        let ginv = self.dual_basis();
        let n = self.rank();
        let mut out = Vec::new();
        for i in 0..n {
            let d = s.d[(i, i)].abs();
            if d.is_one() {
                continue;
            }
            let y = qvec(s.vinv.row(i));
            let coords = ginv.vec_mul(&y);
            out.push((DualVector { coords }, d));
        }
        out
    }

    /// Inertia by exact rational congruence diagonalisation.
    pub fn signature(&self) -> Signature {
        signature_of(&self.gram).expect("lattice Gram matrices are nondegenerate")
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature().positive == 0
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().negative == 0
    }

    /// Basis (rows, integer `L`-coordinates) of `{v ∈ L : ⟨v, m⟩ = 0 ∀ m ∈ M}` where the rows of
    /// `sub` (rational `L`-coordinates) span `M ⊗ Q`.
    pub fn orthogonal_complement_basis(&self, sub: &RatMatrix) -> IntMatrix {
        let (_, sub_int) = sub.clear_denominators();
        let a = self.gram.mul(&sub_int.transpose());
        left_kernel(&a)
    }

    /// Orthogonal complement of the span of `sub`, carrying `self` as parent.
    pub fn orthogonal_complement(self: &Arc<Self>, sub: &RatMatrix) -> Result<Lattice> {
        let k = self.orthogonal_complement_basis(sub);
        if k.rows() == 0 {
            return Err(Error::Degenerate("orthogonal complement has rank 0".into()));
        }
        Lattice::sublattice(self, k.to_rat())
    }

    /// Primitive closure check: the rows of `sub` (integer coordinates) span a primitive
    /// sublattice iff the cokernel of the inclusion is torsion free.
    pub fn is_primitive_sublattice(sub: &IntMatrix) -> bool {
        let s = matrix::snf(sub);
        s.diagonal().iter().all(|d| d.is_zero() || d.abs().is_one())
    }
}

/// Inertia of a symmetric integer matrix; errors if degenerate.
pub fn signature_of(gram: &IntMatrix) -> Result<Signature> {
    let n = gram.rows();
    let mut a: Vec<Vec<Rat>> = gram.to_rows().iter().map(|r| qvec(r)).collect();
    let mut pos = 0;
    let mut neg = 0;
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // replace e_k by e_k + e_j: new diagonal entry 2 a_kj ≠ 0
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][k] += t;
                }
            } else {
                return Err(Error::Degenerate("singular form".into()));
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
        for i in k + 1..n {
            a[k][i] = Rat::zero();
            a[i][k] = Rat::zero();
        }
        k += 1;
    }
    Ok(Signature { positive: pos, negative: neg })
}

/// An even unimodular overlattice `L_φ ⊂ M∨ ⊕ N∨` together with the data to move between
/// `L_φ`-coordinates and the two orthogonal summands.
#[derive(Clone, Debug)]
pub struct EmbeddingModel {
    pub m: Lattice,
    pub n: Lattice,
    /// Basis of `L_φ` in `M ⊕ N` coordinates.
    pub basis: RatMatrix,
    basis_inv: RatMatrix,
    pub lattice: Lattice,
}

impl EmbeddingModel {
    pub fn from_basis(m: Lattice, n: Lattice, basis: RatMatrix) -> Result<Self> {
        let ambient = m.direct_sum(&n);
        let g = basis.mul(&ambient.gram().to_rat()).mul(&basis.transpose());
        let gram = g.to_int().ok_or_else(|| Error::Invalid("overlattice is not integral".into()))?;
        let lattice = Lattice::new(gram)?;
        let basis_inv = basis.inverse()?;
        Ok(EmbeddingModel { m, n, basis, basis_inv, lattice })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn m_rank(&self) -> usize {
        self.m.rank()
    }

    /// `L_φ`-coordinates → ambient `M ⊕ N` coordinates.
    pub fn to_ambient(&self, v: &[Rat]) -> Vec<Rat> {
        self.basis.vec_mul(v)
    }

    /// Ambient coordinates → `L_φ`-coordinates (rational).
    pub fn from_ambient(&self, v: &[Rat]) -> Vec<Rat> {
        self.basis_inv.vec_mul(v)
    }

    /// Image of a vector of `M ⊗ Q` (M-coordinates) in `L_φ`-coordinates.
    pub fn embed_m(&self, x: &[Rat]) -> Vec<Rat> {
        let mut amb = x.to_vec();
        amb.extend(std::iter::repeat(Rat::zero()).take(self.n.rank()));
        self.from_ambient(&amb)
    }

    /// Image of a vector of `N ⊗ Q` (N-coordinates) in `L_φ`-coordinates.
    pub fn embed_n(&self, y: &[Rat]) -> Vec<Rat> {
        let mut amb = vec![Rat::zero(); self.m.rank()];
        amb.extend(y.iter().cloned());
        self.from_ambient(&amb)
    }

    /// Orthogonal projections to `M∨` and `N∨` of a vector in `L_φ`-coordinates.
    pub fn project_to_summands(&self, v: &[Rat]) -> (DualVector, DualVector) {
        let amb = self.to_ambient(v);
        let mk = self.m.rank();
        (DualVector { coords: amb[..mk].to_vec() }, DualVector { coords: amb[mk..].to_vec() })
    }

    pub fn project_int(&self, v: &[Int]) -> (DualVector, DualVector) {
        self.project_to_summands(&qvec(v))
    }

    /// Whether an ambient vector lies in `L_φ`.
    pub fn contains_ambient(&self, amb: &[Rat]) -> bool {
        matrix::qvec_is_integral(&self.from_ambient(amb))
    }

    /// Basis of `ι(M)` inside `L_φ` (rows, integer `L_φ`-coordinates).
    pub fn m_basis_in_l(&self) -> IntMatrix {
        let mk = self.m.rank();
        let rows: Vec<Vec<Int>> = (0..mk)
            .map(|i| {
                let mut e = vec![Rat::zero(); mk];
                e[i] = Rat::one();
                matrix::qvec_to_int(&self.embed_m(&e)).expect("M ⊂ L_φ")
            })
            .collect();
        IntMatrix::from_rows_with_cols(rows, self.rank())
    }

    /// Basis of `ι(N)` inside `L_φ`.
    pub fn n_basis_in_l(&self) -> IntMatrix {
        let nk = self.n.rank();
        let rows: Vec<Vec<Int>> = (0..nk)
            .map(|i| {
                let mut e = vec![Rat::zero(); nk];
                e[i] = Rat::one();
                matrix::qvec_to_int(&self.embed_n(&e)).expect("N ⊂ L_φ")
            })
            .collect();
        IntMatrix::from_rows_with_cols(rows, self.rank())
    }
}

/// Overlattice `L_φ` of `M ⊕ N` defined by the graph of a glue map `φ: q(M) → -q(N)`.
pub fn overlattice_from_glue(m: &Lattice, n: &Lattice, phi: &GlueMap) -> Result<EmbeddingModel> {
    phi.check_isometry()?;
    let gm = phi.source.generators();
    let gn = phi.target.generators();
    if gm.len() != phi.matrix.len() || phi.matrix.iter().any(|r| r.len() != gn.len()) {
        return Err(Error::Invalid("glue map shape does not match the discriminant forms".into()));
    }
    if gm.first().map_or(false, |g| g.coords.len() != m.rank()) || gn.first().map_or(false, |g| g.coords.len() != n.rank()) {
        return Err(Error::Invalid("glue map forms do not belong to the given lattices".into()));
    }
    let total = m.rank() + n.rank();
    let mut gens: Vec<Vec<Rat>> = Vec::new();
    for i in 0..total {
        let mut e = vec![Rat::zero(); total];
        e[i] = Rat::one();
        gens.push(e);
    }
    for (i, g) in gm.iter().enumerate() {
        let mut v = g.coords.clone();
        let mut img = vec![Rat::zero(); n.rank()];
        for (j, bit) in phi.matrix[i].iter().enumerate() {
            if *bit {
                for (k, c) in gn[j].coords.iter().enumerate() {
                    img[k] += c;
                }
            }
        }
        v.extend(img);
        gens.push(v);
    }
    let gens = RatMatrix::from_rows(gens, total);
    let (d, ints) = gens.clear_denominators();
    let h = hnf(&ints);
    let mut basis = RatMatrix::zeros(h.rank, total);
    let dq = rat_from_int(&d);
    for i in 0..h.rank {
        for j in 0..total {
            basis[(i, j)] = rat_from_int(&h.h[(i, j)]) / &dq;
        }
    }
    let model = EmbeddingModel::from_basis(m.clone(), n.clone(), basis)?;
    if m.is_even() && n.is_even() && !model.lattice.is_even() {
        return Err(Error::Verification("glued lattice is not even".into()));
    }
    Ok(model)
}

/// The on-disk lattice format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeFile {
    pub name: String,
    #[serde(with = "serial::int_matrix")]
    pub gram: IntMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat_matrix")]
    pub parent_basis: Option<RatMatrix>,
}

mod opt_rat_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<RatMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match m {
            Some(m) => serial::rat_matrix::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<RatMatrix>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "serial::rat_matrix")] RatMatrix);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

impl LatticeFile {
    pub fn from_lattice(name: &str, l: &Lattice, parent_name: Option<&str>) -> Self {
        LatticeFile {
            name: name.to_string(),
            gram: l.gram().clone(),
            parent: parent_name.map(|s| s.to_string()),
            parent_basis: l.parent().map(|p| p.basis.clone()),
        }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        Lattice::new(self.gram.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn rescale_doubles_entries() {
        let l10 = catalog::l10();
        let s = l10.rescale(2).unwrap();
        assert_eq!(s.gram(), &l10.gram().scale(&int(2)));
        assert_eq!(l10.rescale(1).unwrap(), l10);
        let a1 = Lattice::from_i64(&[vec![-2]]).unwrap();
        assert_eq!(a1.rescale(-1).unwrap().gram(), &IntMatrix::from_i64(&[vec![2]]));
        assert!(l10.rescale(0).is_err());
    }

    #[test]
    fn discriminant_groups() {
        let s = catalog::l10().rescale(2).unwrap();
        assert_eq!(s.discriminant_group(), vec![int(2); 10]);
        assert!(catalog::e8().discriminant_group().is_empty());
        assert_eq!(catalog::e8().rescale(2).unwrap().discriminant_group(), vec![int(2); 8]);
        let gens = s.discriminant_generators();
        assert_eq!(gens.len(), 10);
        for (g, ord) in &gens {
            assert!(s.is_dual_vector(&g.coords));
            assert!(!g.is_integral());
            assert_eq!(ord, &int(2));
        }
    }

    #[test]
    fn signatures() {
        assert_eq!(catalog::l10().signature(), Signature { positive: 1, negative: 9 });
        let u = catalog::hyperbolic_plane();
        assert_eq!(u.signature(), Signature { positive: 1, negative: 1 });
        let l26 = u.direct_sum(&catalog::e8()).direct_sum(&catalog::e8()).direct_sum(&catalog::e8());
        assert_eq!(l26.signature(), Signature { positive: 1, negative: 25 });
        assert!(signature_of(&IntMatrix::from_i64(&[vec![1, 1], vec![1, 1]])).is_err());
    }

    #[test]
    fn complement_of_direct_summand() {
        let u = catalog::hyperbolic_plane();
        let a1 = Lattice::from_i64(&[vec![-2]]).unwrap();
        let l = Arc::new(u.direct_sum(&a1));
        let sub = IntMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0]]).to_rat();
        let c = l.orthogonal_complement(&sub).unwrap();
        assert_eq!(c.gram(), a1.gram());
        let all = IntMatrix::identity(3).to_rat();
        assert!(matches!(l.orthogonal_complement(&all), Err(Error::Degenerate(_))));
    }

    #[test]
    fn lattice_file_roundtrip() {
        let l = catalog::l10();
        let f = LatticeFile::from_lattice("L10", &l, None);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"-2\""));
        let back: LatticeFile = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_lattice().unwrap(), l);
        let plain: LatticeFile = serde_json::from_str(r#"{"name":"A1","gram":[[-2]]}"#).unwrap();
        assert_eq!(plain.gram, IntMatrix::from_i64(&[vec![-2]]));
    }
}

//! Lifting the reflection in a wall of an induced chamber to an isometry of `L_φ`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::vinberg::{reflect_int, root_reflection};
use super::embed_l10;
use crate::catalog;
use crate::definite::{Definite, RootSystemType};
use crate::error::{Error, Result};
use crate::lattice::{EmbeddingModel, Lattice};
use crate::matrix::{int, left_kernel, qvec, Int, IntMatrix, Rat};
use crate::serial;

/// A verified lift `g̃` of `s_r` (rows act on the right on `L_φ`-coordinates).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallLift {
    #[serde(with = "serial::int_matrix")]
    pub matrix: IntMatrix,
    /// Whether `g̃` is the longest element of `W(⟨Σ⟩)`.
    pub longest_element: bool,
}

/// Per-wall invariants and the lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRecord {
    /// The root `r = 2 r_S` of `L10`.
    pub wall: Vec<i64>,
    pub d_w: u64,
    #[serde(with = "serial::rat_str")]
    pub n_w: Rat,
    #[serde(with = "serial::rat_str")]
    pub a_r: Rat,
    pub sigma_type: String,
    pub lift: Option<WallLift>,
}

/// The roots `Σ` of `Q = ι(wall)⊥` with `⟨w, r′⟩ = 1`, in `L_φ`-coordinates.
pub fn wall_sigma(model: &EmbeddingModel, w: &[Int], wall: &[i64]) -> Result<Vec<Vec<Int>>> {
    let g10 = catalog::l10_gram();
    let r: Vec<Int> = wall.iter().map(|&x| int(x)).collect();
    let gr = IntMatrix::from_rows_with_cols(g10.vec_mul(&r).into_iter().map(|x| vec![x]).collect(), 1);
    let face = left_kernel(&gr);
    let mut ys = Vec::with_capacity(face.rows());
    for i in 0..face.rows() {
        ys.push(embed_l10(model, face.row(i))?);
    }
    let l = &model.lattice;
    let y = IntMatrix::from_rows_with_cols(ys, l.rank());
    let qb = left_kernel(&l.gram().mul(&y.transpose()));
    if qb.rows() != l.rank() - 9 {
        return Err(Error::Verification("wall complement has the wrong rank".into()));
    }
    let qg = l.gram().congruence(&qb);
    let def = Definite::new(&Lattice::new(qg)?)?;
    let mut sigma = Vec::new();
    for c in def.roots()? {
        let ci: Vec<Int> = c.iter().map(|&x| int(x)).collect();
        let v = qb.vec_mul(&ci);
        let p = l.gram().form(&v, w);
        if p.is_one() {
            sigma.push(v);
        } else if p == int(-1) {
            sigma.push(v.iter().map(|x| -x).collect());
        }
    }
    sigma.sort();
    Ok(sigma)
}

/// ADE type of the lattice spanned by `Σ`.
pub fn sigma_type(l: &Lattice, sigma: &[Vec<Int>]) -> Result<RootSystemType> {
    if sigma.is_empty() {
        return Ok(RootSystemType::empty());
    }
    let m = IntMatrix::from_rows_with_cols(sigma.to_vec(), l.rank());
    let sub = Lattice::new(l.gram().congruence(&m))?;
    Definite::new(&sub)?.root_type()
}

/// Checks (i)–(iv) for a candidate: an isometry mapping `Σ` to `−Σ`, fixing `⟨Σ⟩⊥`,
/// preserving `ι(S)` and restricting to `s_r`.
pub fn verify_lift(model: &EmbeddingModel, wall: &[i64], sigma: &[Vec<Int>], g: &IntMatrix) -> Result<()> {
    let l = &model.lattice;
    let n = l.rank();
    if g.rows() != n || g.cols() != n {
        return Err(Error::Verification("lift has the wrong shape".into()));
    }
    if l.gram().congruence(g) != *l.gram() {
        return Err(Error::Verification("lift does not preserve the Gram matrix".into()));
    }
    let mut img: Vec<Vec<Int>> = sigma.iter().map(|s| g.vec_mul(s).iter().map(|x| -x).collect()).collect();
    img.sort();
    if img != sigma {
        return Err(Error::Verification("lift does not map Σ to −Σ".into()));
    }
    if !sigma.is_empty() {
        let sm = IntMatrix::from_rows_with_cols(sigma.to_vec(), n);
        let c = left_kernel(&l.gram().mul(&sm.transpose()));
        for i in 0..c.rows() {
            if g.vec_mul(c.row(i)) != c.row_vec(i) {
                return Err(Error::Verification("lift is not the identity on ⟨Σ⟩⊥".into()));
            }
        }
    }
    check_restriction(model, wall, g)
}

/// Conditions (iii) and (iv) alone: `ι(S)^g = ι(S)` and `g|S = s_r`, by exact matrix identity
/// on the basis of `S`.
pub fn check_restriction(model: &EmbeddingModel, wall: &[i64], g: &IntMatrix) -> Result<()> {
    let r: Vec<Int> = wall.iter().map(|&x| int(x)).collect();
    let sr = root_reflection(&r);
    for i in 0..10 {
        let mut e = vec![Int::zero(); 10];
        e[i] = int(1);
        let y = embed_l10(model, &e)?;
        let gy = g.vec_mul(&y);
        let (_, rpart) = model.project_int(&gy);
        if !rpart.is_zero() {
            return Err(Error::Verification("lift does not preserve ι(S)".into()));
        }
        if gy != embed_l10(model, sr.row(i))? {
            return Err(Error::Verification(format!("lift does not restrict to the reflection in {wall:?}")));
        }
    }
    Ok(())
}

fn longest_element(l: &Lattice, sigma: &[Vec<Int>]) -> Result<IntMatrix> {
    let n = l.rank();
    let gq = l.gram().to_rat();
    let sm = IntMatrix::from_rows_with_cols(sigma.to_vec(), n).to_rat();
    let sg = sm.mul(&gq).mul(&sm.transpose());
    let ones = vec![Rat::one(); sigma.len()];
    let mut x = sg.inverse()?.mul(&sm).vec_mul(&ones);
    let mut word = Vec::new();
    let bound = 100_000;
    loop {
        let next = sigma.iter().position(|s| gq.form(&x, &qvec(s)).is_positive());
        let Some(i) = next else { break };
        x = super::vinberg::reflect_rat(l.gram(), &sigma[i], &x);
        word.push(i);
        if word.len() > bound {
            return Err(Error::Exhausted("longest element word too long".into()));
        }
    }
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Int::zero(); n];
        e[j] = int(1);
        for &i in &word {
            e = reflect_int(l.gram(), &sigma[i], &e);
        }
        rows.push(e);
    }
    Ok(IntMatrix::from_rows_with_cols(rows, n))
}

/// Permutations of `Σ` preserving its Gram matrix.
fn sigma_symmetries(l: &Lattice, sigma: &[Vec<Int>]) -> Vec<Vec<usize>> {
    let k = sigma.len();
    let p: Vec<Vec<Int>> = sigma.iter().map(|a| sigma.iter().map(|b| l.gram().form(a, b)).collect()).collect();
    let mut out = Vec::new();
    fn rec(i: usize, k: usize, p: &[Vec<Int>], img: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == k {
            out.push(img.clone());
            return;
        }
        for j in 0..k {
            if img.contains(&j) || (0..i).any(|t| p[i][t] != p[j][img[t]]) {
                continue;
            }
            img.push(j);
            rec(i + 1, k, p, img, out);
            img.pop();
        }
    }
    rec(0, k, &p, &mut Vec::new(), &mut out);
    out
}

/// Searches `g̃` with (i) `Σ^g̃ = −Σ` and (ii) `g̃ = id` on `⟨Σ⟩⊥`, then checks (iii) and (iv).
/// The longest element of `W(⟨Σ⟩)` is tried first, then every `−π` for a symmetry `π` of `Σ`.
pub fn wall_lift_search(model: &EmbeddingModel, w: &[Int], wall: &[i64]) -> Result<(WallLift, Vec<Vec<Int>>)> {
    let l = &model.lattice;
    let n = l.rank();
    let sigma = wall_sigma(model, w, wall)?;
    if sigma.is_empty() {
        return Err(Error::Verification("Σ is empty".into()));
    }
    let g = longest_element(l, &sigma)?;
    if verify_lift(model, wall, &sigma, &g).is_ok() {
        return Ok((WallLift { matrix: g, longest_element: true }, sigma));
    }
    let sm = IntMatrix::from_rows_with_cols(sigma.clone(), n);
    let c = left_kernel(&l.gram().mul(&sm.transpose()));
    let full = sm.stack(&c).to_rat();
    let finv = full.inverse()?;
    for pi in sigma_symmetries(l, &sigma) {
        let neg: Vec<Vec<Int>> = pi.iter().map(|&j| sigma[j].iter().map(|x| -x).collect()).collect();
        let img = IntMatrix::from_rows_with_cols(neg, n).stack(&c);
        let Some(g) = finv.mul(&img.to_rat()).to_int() else { continue };
        if verify_lift(model, wall, &sigma, &g).is_ok() {
            return Ok((WallLift { matrix: g, longest_element: false }, sigma));
        }
    }
    Err(Error::Exhausted(format!("no lift of the reflection in {wall:?} satisfies (i)-(iv)")))
}

/// `d_w`, `n_w`, `a_r`, the type of `Σ` and the lift for one wall.
pub fn wall_invariants(model: &EmbeddingModel, w: &[Int], wall: &[i64]) -> Result<WallRecord> {
    let (ws, _) = model.project_int(w);
    let ws = ws.coords;
    let d_w = ws.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let g10 = catalog::l10_gram().to_rat();
    let n_w = g10.form(&ws, &ws);
    let r: Vec<Rat> = wall.iter().map(|&x| Rat::from_integer(int(x))).collect();
    let a_r = g10.form(&ws, &r);
    let (lift, sigma) = match wall_lift_search(model, w, wall) {
        Ok((lift, sigma)) => (Some(lift), sigma),
        Err(Error::Exhausted(_)) => (None, wall_sigma(model, w, wall)?),
        Err(e) => return Err(e),
    };
    let sigma_type = sigma_type(&model.lattice, &sigma)?.to_string();
    let d_w = num_traits::ToPrimitive::to_u64(&d_w).ok_or(Error::Overflow("d_w"))?;
    Ok(WallRecord { wall: wall.to_vec(), d_w, n_w, a_r, sigma_type, lift })
}

//! Walking from a Conway chamber to the one containing a target point.
//!
//! The walls of `C(w)` are the roots `r_λ = (|λ|²/2 − 1) w + w′ + λ` with `λ` in the Leech
//! lattice `⟨w, w′⟩⊥`. Those with `⟨r_λ, t⟩ < 0` are the lattice points of an open ball
//! around `μ/γ` where `t = τ w + γ w′ + μ`, so each step is one close-vector enumeration.
//! The frame of the initial Weyl vector stays fixed; both endpoints of the segment are
//! reflected instead.

use log::debug;
use num_traits::{Signed, Zero};

use super::vinberg::{reflect_int, reflect_rat};
use super::weyl::{isotropic_partner, WeylVector};
use crate::definite::{Ellipsoid, PosGram};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{int, left_kernel, qvec, Int, IntMatrix, Rat, RatMatrix};

/// Coordinates for the Leech lattice `⟨w, w′⟩⊥` attached to a Weyl vector.
#[derive(Clone, Debug)]
pub struct LeechFrame {
    pub w: Vec<Int>,
    pub partner: Vec<Int>,
    basis: IntMatrix,
    gram: IntMatrix,
    gq: RatMatrix,
    to_leech: RatMatrix,
    ell: Ellipsoid,
}

impl LeechFrame {
    pub fn new(l: &Lattice, w: &[Int], partner: &[Int]) -> Result<Self> {
        let g = l.gram();
        if g.form(w, partner) != int(1) || !g.form(partner, partner).is_zero() || !g.form(w, w).is_zero() {
            return Err(Error::Precondition("frame needs isotropic w, w′ with ⟨w, w′⟩ = 1".into()));
        }
        let cols: Vec<Vec<Int>> = g.vec_mul(w).into_iter().zip(g.vec_mul(partner)).map(|(a, b)| vec![a, b]).collect();
        let basis = left_kernel(&IntMatrix::from_rows_with_cols(cols, 2));
        let kg = g.congruence(&basis);
        let pg = PosGram::from_int_matrix(&kg.scale(&int(-1)))?;
        let ell = Ellipsoid::new(&pg)?;
        let gq = g.to_rat();
        let to_leech = gq.mul(&basis.to_rat().transpose()).mul(&kg.to_rat().inverse()?);
        Ok(LeechFrame { w: w.to_vec(), partner: partner.to_vec(), basis, gram: g.clone(), gq, to_leech, ell })
    }

    pub fn from_weyl(l: &Lattice, w: &WeylVector) -> Result<Self> {
        let p = isotropic_partner(l, &w.w)?;
        LeechFrame::new(l, &w.w, &p)
    }

    fn root(&self, lambda: &[i64]) -> Vec<Int> {
        let lv = self.basis.vec_mul(&lambda.iter().map(|&x| int(x)).collect::<Vec<_>>());
        let nl = self.gram.form(&lv, &lv);
        let alpha = -nl / 2 - 1;
        (0..lv.len()).map(|i| &alpha * &self.w[i] + &self.partner[i] + &lv[i]).collect()
    }

    /// Walls `r` of `C(w)` with `⟨r, t⟩ < 0` (`≤ 0` when `closed`), for `t` in the cone of `w`.
    pub fn walls_against(&self, t: &[Rat], closed: bool) -> Result<Vec<Vec<Int>>> {
        let w = qvec(&self.w);
        let wp = qvec(&self.partner);
        let gamma = self.gq.form(t, &w);
        if !gamma.is_positive() {
            return Err(Error::Precondition("target is not on the positive side of w".into()));
        }
        let tau = self.gq.form(t, &wp);
        let mu: Vec<Rat> = (0..t.len()).map(|i| &t[i] - &tau * &w[i] - &gamma * &wp[i]).collect();
        let m = self.to_leech.vec_mul(&mu);
        let center: Vec<Rat> = m.iter().map(|x| x / &gamma).collect();
        let tt = self.gq.form(t, t);
        let bound = Rat::from_integer(int(2)) - tt / (&gamma * &gamma);
        let lambdas = self.ell.close_vectors(&center, &bound, !closed)?;
        let mut out = Vec::with_capacity(lambdas.len());
        for lam in lambdas {
            let r = self.root(&lam);
            debug_assert_eq!(self.gram.form(&r, &r), int(-2));
            debug_assert_eq!(self.gram.form(&r, &self.w), int(1));
            out.push(r);
        }
        Ok(out)
    }

    /// Walls of `C(w)` containing `t` (pairing zero).
    pub fn walls_through(&self, t: &[Rat]) -> Result<Vec<Vec<Int>>> {
        let all = self.walls_against(t, true)?;
        Ok(all.into_iter().filter(|r| self.gq.form(&qvec(r), t).is_zero()).collect())
    }
}

/// Result of [`walk_to_chamber`].
#[derive(Clone, Debug)]
pub struct WalkResult {
    pub w: Vec<Int>,
    pub partner: Vec<Int>,
    /// Walls of the initial chamber crossed in the moving frame, in order.
    pub frame_roots: Vec<Vec<Int>>,
}

impl WalkResult {
    pub fn steps(&self) -> usize {
        self.frame_roots.len()
    }
}

/// Reflects `w0` across the walls met by the segment from `start` (interior to `C(w0)`) to
/// `target`, returning a Weyl vector whose closed chamber contains `target`.
pub fn walk_to_chamber(l: &Lattice, frame: &LeechFrame, start: &[Rat], target: &[Rat], max_steps: usize) -> Result<WalkResult> {
    let g = l.gram();
    let gq = g.to_rat();
    let mut a = start.to_vec();
    let mut t = target.to_vec();
    let mut crossed: Vec<Vec<Int>> = Vec::new();
    loop {
        let walls = frame.walls_against(&t, false)?;
        if walls.is_empty() {
            break;
        }
        if crossed.len() >= max_steps {
            return Err(Error::Exhausted(format!("chamber walk exceeded {max_steps} steps")));
        }
        let mut best: Option<(Rat, usize)> = None;
        let mut tie = false;
        for (i, r) in walls.iter().enumerate() {
            let rq = qvec(r);
            let ra = gq.form(&rq, &a);
            let rt = gq.form(&rq, &t);
            if ra.is_negative() {
                return Err(Error::Verification("segment start left the chamber".into()));
            }
            let s = &ra / (&ra - &rt);
            match &best {
                Some((b, _)) if *b == s => tie = true,
                Some((b, _)) if *b < s => {}
                _ => {
                    best = Some((s, i));
                    tie = false;
                }
            }
        }
        if tie {
            return Err(Error::Tie);
        }
        let (_, i) = best.expect("nonempty wall list");
        let r = walls[i].clone();
        a = reflect_rat(g, &r, &a);
        t = reflect_rat(g, &r, &t);
        crossed.push(r);
        if crossed.len() % 500 == 0 {
            debug!("chamber walk: {} walls crossed", crossed.len());
        }
    }
    // w = w0 · s_N ⋯ s_1 in the moving frame
    let mut w = frame.w.clone();
    let mut p = frame.partner.clone();
    for r in crossed.iter().rev() {
        w = reflect_int(g, r, &w);
        p = reflect_int(g, r, &p);
    }
    Ok(WalkResult { w, partner: p, frame_roots: crossed })
}

/// Whether `target` lies in the closed Conway chamber of `frame`.
pub fn chamber_contains(frame: &LeechFrame, target: &[Rat]) -> Result<bool> {
    Ok(frame.walls_against(target, false)?.is_empty())
}

/// Applies `x ↦ x + ⟨x, r⟩ r` for the roots in order.
pub fn apply_reflections(gram: &IntMatrix, roots: &[Vec<Int>], x: &[Int]) -> Vec<Int> {
    let mut v = x.to_vec();
    for r in roots {
        v = reflect_int(gram, r, &v);
    }
    v
}

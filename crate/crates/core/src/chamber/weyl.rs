//! Weyl vectors of even unimodular lattices of signature (1, 25) and interior points of
//! their Conway chambers.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::definite::roots::generic_functional;
use crate::definite::Definite;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{complete_to_unimodular, int, left_kernel, qvec, solve_left_integral, vec_gcd, Int, IntMatrix, Rat};
use crate::serial;

/// A Weyl vector with its certificate: the Gram matrix of `[w]⊥/[w]` and its root count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeylVector {
    #[serde(with = "serial::int_vec")]
    pub w: Vec<Int>,
    #[serde(with = "serial::int_matrix")]
    pub quotient: IntMatrix,
    pub quotient_roots: u64,
}

/// Outcome of [`is_weyl_vector`].
#[derive(Clone, Debug)]
pub struct WeylCheck {
    pub is_weyl: bool,
    pub quotient: IntMatrix,
    pub roots: u64,
}

/// Gram matrix of `[w]⊥/[w]` for a primitive isotropic `w`.
pub fn quotient_gram(l: &Lattice, w: &[Int]) -> Result<IntMatrix> {
    let g = l.gram();
    if !g.form(w, w).is_zero() {
        return Err(Error::Precondition("vector is not isotropic".into()));
    }
    if !vec_gcd(w).is_one() {
        return Err(Error::Precondition("vector is not primitive".into()));
    }
    let gw = IntMatrix::from_rows_with_cols(g.vec_mul(w).into_iter().map(|x| vec![x]).collect(), 1);
    let perp = left_kernel(&gw);
    let c = solve_left_integral(&perp, w).ok_or_else(|| Error::Verification("w does not lie in its orthogonal complement".into()))?;
    let u = complete_to_unimodular(&c)?;
    let basis = u.mul(&perp);
    let rest: Vec<usize> = (1..basis.rows()).collect();
    let b = basis.select_rows(&rest);
    Ok(g.congruence(&b))
}

/// Whether `[w]⊥/[w]` has no `(-2)`-vectors.
pub fn is_weyl_vector(l: &Lattice, w: &[Int]) -> Result<WeylCheck> {
    let q = quotient_gram(l, w)?;
    let roots = Definite::new(&Lattice::new(q.clone())?)?.count_vectors(-2)?;
    Ok(WeylCheck { is_weyl: roots == 0, quotient: q, roots })
}

/// Some `x` with `⟨w, x⟩ = 1` and `⟨x, x⟩ = 0`; needs `l` even unimodular and `w` primitive
/// isotropic.
pub fn isotropic_partner(l: &Lattice, w: &[Int]) -> Result<Vec<Int>> {
    let g = l.gram();
    let gw = IntMatrix::from_rows_with_cols(g.vec_mul(w).into_iter().map(|x| vec![x]).collect(), 1);
    let x = solve_left_integral(&gw, &[int(1)]).ok_or_else(|| Error::Precondition("no vector pairs to 1 with w".into()))?;
    let nx = g.form(&x, &x);
    if !nx.is_even() {
        return Err(Error::NotEven);
    }
    let h = nx / 2;
    Ok(x.iter().zip(w).map(|(a, b)| a - &h * b).collect())
}

fn certified(l: &Lattice, w: Vec<Int>) -> Result<Option<WeylVector>> {
    let check = is_weyl_vector(l, &w)?;
    Ok(check.is_weyl.then(|| WeylVector { w, quotient: check.quotient, quotient_roots: check.roots }))
}

/// A Weyl vector built from a primitive isotropic `z` by splitting off the hyperbolic plane it
/// spans with a partner and, when the complement has roots, applying the holy construction
/// `(ρ; h, h+1)`. The sign is chosen so that `⟨w, orient⟩ > 0`.
pub fn weyl_vector_from_isotropic(l: &Lattice, z: &[Int], orient: &[Rat]) -> Result<WeylVector> {
    let g = l.gram();
    if l.rank() != 26 || !l.is_unimodular() || !l.is_even() {
        return Err(Error::Precondition("Weyl vectors need an even unimodular lattice of rank 26".into()));
    }
    let zp = isotropic_partner(l, z)?;
    let cols: Vec<Vec<Int>> = g.vec_mul(z).into_iter().zip(g.vec_mul(&zp)).map(|(a, b)| vec![a, b]).collect();
    let nb = left_kernel(&IntMatrix::from_rows_with_cols(cols, 2));
    let ng = g.congruence(&nb);
    let def = Definite::new(&Lattice::new(ng)?)?;
    let roots = def.roots()?;
    let orient_sign = |w: Vec<Int>| -> Vec<Int> {
        if g.to_rat().form(&qvec(&w), orient).is_negative() {
            w.iter().map(|x| -x).collect()
        } else {
            w
        }
    };
    if roots.is_empty() {
        return certified(l, orient_sign(z.to_vec()))?.ok_or_else(|| Error::Verification("rootless complement but z is not Weyl".into()));
    }
    let total = 2 * roots.len();
    if total % 24 != 0 {
        return Err(Error::Verification("complement is not a Niemeier lattice".into()));
    }
    let h = int((total / 24) as i64);
    let f = generic_functional(&roots);
    let mut two_rho = vec![0i64; nb.rows()];
    for r in &roots {
        let s: i128 = r.iter().zip(&f).map(|(&a, &b)| a as i128 * b as i128).sum();
        let sign = if s > 0 { 1 } else { -1 };
        for (t, &x) in two_rho.iter_mut().zip(r) {
            *t += sign * x;
        }
    }
    if two_rho.iter().any(|x| x % 2 != 0) {
        return Err(Error::Verification("Weyl vector of the Niemeier root system is not integral".into()));
    }
    let rho_n: Vec<Int> = two_rho.iter().map(|x| int(x / 2)).collect();
    let rho = nb.vec_mul(&rho_n);
    let h1 = &h + 1;
    for (a, b) in [(&h, &h1), (&h1, &h)] {
        let w: Vec<Int> = (0..rho.len()).map(|i| &rho[i] + a * &z[i] + b * &zp[i]).collect();
        if !g.form(&w, &w).is_zero() || !vec_gcd(&w).is_one() {
            continue;
        }
        if let Some(wv) = certified(l, orient_sign(w))? {
            return Ok(wv);
        }
    }
    Err(Error::Verification("holy construction did not produce a Weyl vector".into()))
}

/// `(w′, a26)` with `w′` isotropic, `⟨w, w′⟩ = 1` and `a26 = 2w + w′` interior to `C(w)`.
pub fn conway_interior_point(l: &Lattice, w: &WeylVector) -> Result<(Vec<Int>, Vec<Int>)> {
    if w.quotient_roots != 0 {
        return Err(Error::Precondition("not a Weyl vector".into()));
    }
    let wp = isotropic_partner(l, &w.w)?;
    let a: Vec<Int> = w.w.iter().zip(&wp).map(|(x, y)| int(2) * x + y).collect();
    Ok((wp, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn u_plus(n: &Lattice) -> Lattice {
        catalog::hyperbolic_plane().direct_sum(n)
    }

    fn e8_cubed() -> Lattice {
        catalog::e8().direct_sum(&catalog::e8()).direct_sum(&catalog::e8())
    }

    fn unit(n: usize, i: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); n];
        v[i] = int(1);
        v
    }

    fn orient() -> Vec<Rat> {
        let mut v = vec![Rat::zero(); 26];
        v[0] = Rat::one();
        v[1] = Rat::one();
        v
    }

    #[test]
    fn u_generator_of_e8_cubed_is_not_weyl() {
        let l = u_plus(&e8_cubed());
        let c = is_weyl_vector(&l, &unit(26, 0)).unwrap();
        assert!(!c.is_weyl);
        assert_eq!(c.roots, 720);
        let mut v = unit(26, 0);
        v[1] = int(1);
        assert!(matches!(is_weyl_vector(&l, &v), Err(Error::Precondition(_))));
    }

    #[test]
    fn holy_construction_gives_the_leech_lattice() {
        let l = u_plus(&e8_cubed());
        let w = weyl_vector_from_isotropic(&l, &unit(26, 0), &orient()).unwrap();
        assert_eq!(w.quotient_roots, 0);
        let leech = Lattice::new(w.quotient.clone()).unwrap();
        assert!(leech.is_unimodular() && leech.is_even());
        assert_eq!(Definite::new(&leech).unwrap().count_vectors(-4).unwrap(), 196560);
        // U ⊕ Leech(-1): the U generator is already a Weyl vector
        let l2 = u_plus(&leech);
        let w2 = weyl_vector_from_isotropic(&l2, &unit(26, 0), &orient()).unwrap();
        assert_eq!(w2.w, unit(26, 0));
        let (wp, a) = conway_interior_point(&l2, &w2).unwrap();
        let g = l2.gram();
        assert_eq!(g.form(&wp, &wp), int(0));
        assert_eq!(g.form(&wp, &w2.w), int(1));
        assert_eq!(g.form(&a, &a), int(4));
    }
}

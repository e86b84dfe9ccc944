//! The Vinberg chamber of `L10` bounded by the basis `e_1, …, e_10`.

use num_traits::Zero;

use crate::catalog;
use crate::matrix::{int, Int, IntMatrix, Rat};

/// The ten wall roots `e_1, …, e_10` (rows of the identity).
pub fn vinberg_chamber_walls() -> IntMatrix {
    IntMatrix::identity(10)
}

/// `a10 = Σ e_i∨`, the vector with `⟨a10, e_i⟩ = 1` for every `i`.
pub fn a10() -> Vec<Int> {
    let g = catalog::l10_gram();
    let inv = g.inverse_unimodular().expect("L10 is unimodular");
    let ones = vec![int(1); 10];
    inv.vec_mul(&ones)
}

/// The isotropic vector `3e1 + 2e2 + 4e3 + 6e4 + 5e5 + 4e6 + 3e7 + 2e8 + e9` supported on the
/// affine `E8` subdiagram.
pub fn null_root() -> Vec<Int> {
    [3, 2, 4, 6, 5, 4, 3, 2, 1, 0].iter().map(|&c| int(c)).collect()
}

/// Matrix of `x ↦ x + ⟨x, r⟩ r` on `L10` for a root `r`.
pub fn root_reflection(r: &[Int]) -> IntMatrix {
    reflection_matrix(&catalog::l10_gram(), r)
}

/// Reflection in the simple root `e_{i+1}`.
pub fn simple_reflection(i: usize) -> IntMatrix {
    let mut e = vec![Int::zero(); 10];
    e[i] = int(1);
    root_reflection(&e)
}

/// Matrix of `x ↦ x + ⟨x, r⟩ r` (rows act on the right) for a `(-2)`-vector `r`.
pub fn reflection_matrix(gram: &IntMatrix, r: &[Int]) -> IntMatrix {
    let n = gram.rows();
    let gr = gram.vec_mul(r);
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        if gr[i].is_zero() {
            continue;
        }
        for j in 0..n {
            m[(i, j)] += &gr[i] * &r[j];
        }
    }
    m
}

/// `x ↦ x + ⟨x, r⟩ r` applied to a rational vector.
pub fn reflect_rat(gram: &IntMatrix, r: &[Int], x: &[Rat]) -> Vec<Rat> {
    let gr: Vec<Rat> = gram.vec_mul(r).iter().map(|v| Rat::from_integer(v.clone())).collect();
    let c: Rat = x.iter().zip(&gr).map(|(a, b)| a * b).sum();
    x.iter().zip(r).map(|(xi, ri)| xi + &c * Rat::from_integer(ri.clone())).collect()
}

/// `x ↦ x + ⟨x, r⟩ r` applied to an integer vector.
pub fn reflect_int(gram: &IntMatrix, r: &[Int], x: &[Int]) -> Vec<Int> {
    let c = gram.form(x, r);
    x.iter().zip(r).map(|(xi, ri)| xi + &c * ri).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a10_pairs_to_one_with_simple_roots() {
        let g = catalog::l10_gram();
        let a = a10();
        for i in 0..10 {
            let e = vinberg_chamber_walls().row_vec(i);
            assert_eq!(g.form(&a, &e), int(1));
        }
        assert_eq!(g.form(&a, &a), int(1240));
    }

    #[test]
    fn null_root_is_isotropic() {
        let g = catalog::l10_gram();
        let z = null_root();
        assert_eq!(g.form(&z, &z), int(0));
        assert!(g.form(&z, &a10()) > int(0));
    }

    #[test]
    fn reflections_are_involutive_isometries() {
        let g = catalog::l10_gram();
        for i in 0..10 {
            let s = simple_reflection(i);
            assert_eq!(s.mul(&s), IntMatrix::identity(10));
            assert_eq!(g.congruence(&s), g);
            // fixes e_i⊥ pointwise
            let e = vinberg_chamber_walls().row_vec(i);
            let k = crate::matrix::left_kernel(&g.mul(&IntMatrix::from_rows(vec![e.clone()]).transpose()));
            for j in 0..k.rows() {
                let x = k.row_vec(j);
                assert_eq!(s.vec_mul(&x), x);
            }
        }
    }
}

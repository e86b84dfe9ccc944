//! Property checks shared by the proptest suite and the acceptance runner.

#![allow(dead_code)]

use hyperlat::catalog;
use hyperlat::chamber::vinberg::reflection_matrix;
use hyperlat::definite::short_vectors;
use hyperlat::genus::{admissible_vector, p_neighbor};
use hyperlat::matrix::{ivec, snf, Int, IntMatrix, Rat, RatMatrix};
use hyperlat::Lattice;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

/// Components of the random definite lattices: `(kind, n, scale)`.
fn component() -> impl Strategy<Value = (char, usize, i64)> {
    prop_oneof![
        (1usize..=5, 1i64..=2).prop_map(|(n, s)| ('A', n, s)),
        (4usize..=5, 1i64..=2).prop_map(|(n, s)| ('D', n, s)),
    ]
}

fn build(comps: &[(char, usize, i64)]) -> Lattice {
    let mut acc: Option<Lattice> = None;
    for &(k, n, s) in comps {
        let l = match k {
            'A' => catalog::a(n),
            _ => catalog::d(n),
        }
        .rescale(s)
        .unwrap();
        acc = Some(match acc {
            Some(a) => a.direct_sum(&l),
            None => l,
        });
    }
    acc.unwrap()
}

/// Applies `row_i += c · row_j` for each `(i, j, c)`.
fn transform(l: &Lattice, ops: &[(usize, usize, i64)]) -> Lattice {
    let n = l.rank();
    let mut u = IntMatrix::identity(n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            u.add_row_multiple(i, j, &Int::from(c));
        }
    }
    Lattice::new(l.gram().congruence(&u)).unwrap()
}

/// Even negative definite lattices of rank at most 8 in a randomly changed basis.
pub fn definite_lattice() -> impl Strategy<Value = Lattice> {
    (prop::collection::vec(component(), 1..=3), prop::collection::vec((0usize..8, 0usize..8, -1i64..=1), 0..4))
        .prop_filter_map("rank at most 8", |(comps, ops)| {
            let rank: usize = comps.iter().map(|c| c.1).sum();
            (rank <= 8).then(|| transform(&build(&comps), &ops))
        })
}

fn identity_rat(n: usize) -> RatMatrix {
    RatMatrix::identity(n)
}

/// `(L∨)∨ = L`: the dual basis pairs to the identity, the Gram matrix of `L∨` is `G⁻¹`, and
/// dualising again returns the basis of `L`.
pub fn dual_of_dual(l: &Lattice) -> Result<(), TestCaseError> {
    let g = l.gram().to_rat();
    let d = l.dual_basis();
    prop_assert_eq!(d.mul(&g), identity_rat(l.rank()));
    let dual_gram = d.mul(&g).mul(&d.transpose());
    prop_assert_eq!(&dual_gram, &l.dual_gram());
    let back = dual_gram.inverse().unwrap().mul(&d);
    prop_assert_eq!(back, identity_rat(l.rank()));
    for i in 0..l.rank() {
        prop_assert!(l.is_dual_vector(d.row(i)));
    }
    let order: Int = l.discriminant_group().iter().product();
    prop_assert_eq!(order, l.det().abs());
    Ok(())
}

/// For `M = B·L` of full rank: `det M = det(B)² det L`, `[L : M] = |det B|`, `|M∨/M| = |det M|`.
pub fn overlattice_index(l: &Lattice, b: &IntMatrix) -> Result<(), TestCaseError> {
    let m = Lattice::new(l.gram().congruence(b)).unwrap();
    let db = b.det();
    prop_assert_eq!(m.det(), &db * &db * l.det());
    let index: Int = snf(b).diagonal().iter().map(|x| x.abs()).product();
    prop_assert_eq!(&index, &db.abs());
    let order: Int = m.discriminant_group().iter().product();
    prop_assert_eq!(order, m.det().abs());
    // every vector of L times the index lands in M
    let binv = b.to_rat().inverse().unwrap();
    for i in 0..l.rank() {
        for x in binv.row(i) {
            prop_assert!((x * Rat::from_integer(index.clone())).is_integer());
        }
    }
    Ok(())
}

/// Upper triangular integer matrices with diagonal entries in `1..=3`.
pub fn sublattice_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
    (prop::collection::vec(1i64..=3, n), prop::collection::vec(-2i64..=2, n * n)).prop_map(move |(diag, off)| {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i] } else if j > i { off[i * n + j] } else { 0 }).collect())
            .collect();
        IntMatrix::from_i64(&rows)
    })
}

/// Number of points in the coordinate box used by [`box_vectors`].
pub fn box_size(l: &Lattice, k: i64) -> u64 {
    box_bounds(l, k).iter().map(|&b| 2 * b as u64 + 1).product()
}

fn box_bounds(l: &Lattice, k: i64) -> Vec<i64> {
    let ginv = l.gram().to_rat().inverse().unwrap();
    (0..l.rank())
        .map(|i| {
            let v = (ginv.row(i)[i].abs() * Rat::from_integer(Int::from(k.abs()))).to_f64().unwrap();
            (v.sqrt() + 1e-9).floor() as i64
        })
        .collect()
}

/// Vectors of norm `k` in the coordinate box `|x_i|² ≤ |k|·|G⁻¹_ii|`, one per sign.
pub fn box_vectors(l: &Lattice, k: i64) -> Vec<Vec<i64>> {
    let bounds = box_bounds(l, k);
    let n = l.rank();
    let g: Vec<Vec<i64>> = l.gram().to_i64().unwrap();
    let mut out = Vec::new();
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let mut s = 0i64;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * g[i][j] * x[j];
            }
        }
        if s == k && x.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
            out.push(x.clone());
        }
        let mut i = 0;
        while i < n && x[i] == bounds[i] {
            x[i] = -bounds[i];
            i += 1;
        }
        if i == n {
            break;
        }
        x[i] += 1;
    }
    out.sort();
    out
}

pub fn short_vectors_match_box(l: &Lattice, k: i64) -> Result<(), TestCaseError> {
    let got = short_vectors(l, k).unwrap();
    prop_assert_eq!(got.vectors, box_vectors(l, k));
    Ok(())
}

/// A `p`-neighbour has the same determinant, rank and parity.
pub fn neighbor_preserves_det(l: &Lattice, p: u64, coords: &[i64]) -> Result<(), TestCaseError> {
    prop_assume!(!(l.det() % Int::from(p)).is_zero());
    let n = l.rank();
    // search a vector of norm divisible by p, not in pL, starting from `coords`
    let mut v: Vec<i64> = coords.iter().take(n).map(|c| c.rem_euclid(p as i64)).collect();
    v.resize(n, 0);
    let pb = Int::from(p);
    let mut found = None;
    for _ in 0..(p.pow(3)) {
        let vi = ivec(&v);
        if v.iter().any(|&x| x != 0) && (l.norm(&vi) % &pb).is_zero() {
            if l.gram().vec_mul(&vi).iter().any(|x| !(x % &pb).is_zero()) {
                found = Some(vi);
                break;
            }
        }
        let mut i = 0;
        while i < n {
            v[i] = (v[i] + 1) % p as i64;
            if v[i] != 0 {
                break;
            }
            i += 1;
        }
    }
    prop_assume!(found.is_some());
    let v = admissible_vector(l, &found.unwrap(), p).unwrap();
    let nb = p_neighbor(l, &v, p).unwrap();
    prop_assert_eq!(nb.det(), l.det());
    prop_assert_eq!(nb.rank(), l.rank());
    prop_assert!(nb.is_even());
    prop_assert!(nb.is_negative_definite());
    Ok(())
}

/// Roots of `L10` obtained from a simple root by a word in the simple reflections.
pub fn l10_root(start: usize, word: &[usize]) -> Vec<Int> {
    let g = catalog::l10_gram();
    let mut r = vec![Int::zero(); 10];
    r[start % 10] = Int::one();
    for &i in word {
        r = reflection_matrix(&g, &{
            let mut e = vec![Int::zero(); 10];
            e[i % 10] = Int::one();
            e
        })
        .vec_mul(&r);
    }
    r
}

/// `s_r² = 1`, `s_r` preserves the Gram matrix and sends `r` to `-r`.
pub fn reflection_involutive(r: &[Int]) -> Result<(), TestCaseError> {
    let g = catalog::l10_gram();
    prop_assert_eq!(g.form(r, r), Int::from(-2));
    let s = reflection_matrix(&g, r);
    prop_assert_eq!(s.mul(&s), IntMatrix::identity(10));
    prop_assert_eq!(&g.congruence(&s), &g);
    let minus: Vec<Int> = r.iter().map(|x| -x).collect();
    prop_assert_eq!(s.vec_mul(r), minus);
    Ok(())
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

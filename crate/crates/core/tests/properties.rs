mod common;

use common::*;
use hyperlat::catalog;
use hyperlat::definite::count_vectors;
use hyperlat::fqf::{discriminant_form, find_glue_isomorphism};
use hyperlat::lattice::overlattice_from_glue;
use hyperlat::matrix::{Int, Rat};
use num_traits::Signed;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dual_of_dual_is_the_lattice(l in definite_lattice()) {
        dual_of_dual(&l)?;
    }

    #[test]
    fn sublattice_determinant_and_index((l, b) in definite_lattice().prop_flat_map(|l| {
        let n = l.rank();
        (Just(l), sublattice_matrix(n))
    })) {
        overlattice_index(&l, &b)?;
    }

    #[test]
    fn short_vectors_agree_with_box_search(l in definite_lattice(), k in prop::sample::select(vec![-2i64, -4])) {
        prop_assume!(box_size(&l, k) <= 2_000_000);
        short_vectors_match_box(&l, k)?;
    }

    #[test]
    fn neighbours_keep_the_determinant(
        l in definite_lattice(),
        p in prop::sample::select(vec![3u64, 5, 7]),
        coords in prop::collection::vec(0i64..7, 8),
    ) {
        neighbor_preserves_det(&l, p, &coords)?;
    }

    #[test]
    fn reflections_are_involutions(start in 0usize..10, word in prop::collection::vec(0usize..10, 0..8)) {
        reflection_involutive(&l10_root(start, &word))?;
    }
}

#[test]
fn gluing_two_d4_gives_e8() {
    let d4 = catalog::d(4);
    let q = discriminant_form(&d4).unwrap();
    let phi = find_glue_isomorphism(&q, &q.negate()).unwrap();
    let model = overlattice_from_glue(&d4, &d4, &phi).unwrap();
    let l = &model.lattice;
    assert_eq!(l.det().abs(), Int::from(1));
    assert!(l.is_even());
    // det(M ⊕ N) = [L : M ⊕ N]² det L
    let (d, scaled) = model.basis.clear_denominators();
    let det_basis = Rat::new(scaled.det(), d.pow(8));
    assert_eq!(det_basis.abs().recip(), Rat::from_integer(Int::from(4)));
    assert_eq!(count_vectors(l, -2).unwrap(), 240);
}

//! Standard lattices. Root lattices are negative definite (roots have norm -2).

use crate::lattice::Lattice;
use crate::matrix::IntMatrix;

fn from_edges(n: usize, edges: &[(usize, usize)]) -> Lattice {
    let mut g = vec![vec![0i64; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = -2;
    }
    for &(a, b) in edges {
        g[a][b] = 1;
        g[b][a] = 1;
    }
    Lattice::from_i64(&g).expect("Dynkin Gram matrices are nondegenerate")
}

pub fn a(n: usize) -> Lattice {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    from_edges(n, &edges)
}

pub fn d(n: usize) -> Lattice {
    assert!(n >= 4);
    let mut edges: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
    edges.push((n - 3, n - 1));
    from_edges(n, &edges)
}

/// Bourbaki labelling: chain 1-3-4-5-…, node 2 attached to node 4.
pub fn e(n: usize) -> Lattice {
    assert!((6..=8).contains(&n));
    let mut edges = vec![(0, 2), (1, 3), (2, 3)];
    for i in 4..n {
        edges.push((i - 1, i));
    }
    from_edges(n, &edges)
}

pub fn e8() -> Lattice {
    e(8)
}

pub fn hyperbolic_plane() -> Lattice {
    Lattice::from_i64(&[vec![0, 1], vec![1, 0]]).unwrap()
}

/// Edges of the basis `e_1, …, e_10` of `L10` (0-based indices).
pub const L10_EDGES: [(usize, usize); 9] = [(0, 3), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9)];

/// `L10`: even unimodular of signature (1, 9), with a basis of (-2)-vectors in the T_{2,3,7}
/// configuration bounding a Vinberg chamber.
pub fn l10() -> Lattice {
    from_edges(10, &L10_EDGES)
}

pub fn l10_gram() -> IntMatrix {
    l10().gram().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    #[test]
    fn determinants() {
        assert_eq!(a(1).det(), int(-2));
        assert_eq!(a(2).det(), int(3));
        assert_eq!(d(8).det(), int(4));
        assert_eq!(e(6).det(), int(3));
        assert_eq!(e(7).det(), int(-2));
        assert_eq!(e8().det(), int(1));
        assert_eq!(l10().det(), int(-1));
        assert!(l10().is_even());
    }
}

//! Lattice vectors of a fixed norm on affine slices `⟨x, h_i⟩ = c_i`, and the roots
//! separating two vectors of the positive cone.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::definite::{Ellipsoid, PosGram};
use crate::error::{Error, Result};
use crate::matrix::{left_kernel, qvec, qvec_denominator, rat_from_int, solve_left_integral, Int, IntMatrix, Rat, RatMatrix};

/// Constraint directions `h_1, …, h_k` of a lattice whose orthogonal complement is
/// negative definite, prepared for repeated queries with varying values and norms.
#[derive(Clone, Debug)]
pub struct Slice {
    gram: IntMatrix,
    /// Columns `d_j · G h_jᵀ`, integral.
    cols: IntMatrix,
    scale: Vec<Rat>,
    kernel: IntMatrix,
    /// `(H G Hᵀ)⁻¹ H`.
    hinv_h: RatMatrix,
    hgram_inv: RatMatrix,
    /// `G Kᵀ (K G Kᵀ)⁻¹`.
    to_kernel: RatMatrix,
    ell: Option<Ellipsoid>,
}

impl Slice {
    pub fn new(gram: &IntMatrix, h: &[Vec<Rat>]) -> Result<Self> {
        let n = gram.rows();
        let k = h.len();
        let gq = gram.to_rat();
        let hm = RatMatrix::from_rows(h.to_vec(), n);
        let ght = gq.mul(&hm.transpose());
        let mut cols = IntMatrix::zeros(n, k);
        let mut scale = Vec::with_capacity(k);
        for j in 0..k {
            let col: Vec<Rat> = (0..n).map(|i| ght[(i, j)].clone()).collect();
            let d = rat_from_int(&qvec_denominator(&col));
            for i in 0..n {
                cols[(i, j)] = (&col[i] * &d).to_integer();
            }
            scale.push(d);
        }
        let hgram = hm.mul(&ght);
        let hgram_inv = hgram.inverse().map_err(|_| Error::Degenerate("constraint directions are dependent".into()))?;
        let hinv_h = hgram_inv.mul(&hm);
        let kernel = left_kernel(&cols);
        let (to_kernel, ell) = if kernel.rows() == 0 {
            (RatMatrix::zeros(n, 0), None)
        } else {
            let kg = kernel.mul(gram).mul(&kernel.transpose());
            let pos = kg.scale(&Int::from(-1));
            let pg = PosGram::from_int_matrix(&pos).map_err(|e| match e {
                Error::Overflow(_) => e,
                _ => Error::NotDefinite,
            })?;
            let kinv = kg.to_rat().inverse()?;
            (gq.mul(&kernel.to_rat().transpose()).mul(&kinv), Some(Ellipsoid::new(&pg)?))
        };
        Ok(Slice { gram: gram.clone(), cols, scale, kernel, hinv_h, hgram_inv, to_kernel, ell })
    }

    /// All `x` with `⟨x, h_i⟩ = c_i` and `⟨x, x⟩ = norm`, sorted.
    pub fn vectors(&self, c: &[Rat], norm: &Rat) -> Result<Vec<Vec<Int>>> {
        let k = self.scale.len();
        if c.len() != k {
            return Err(Error::Invalid("wrong number of constraint values".into()));
        }
        let mut rhs = Vec::with_capacity(k);
        for (cj, d) in c.iter().zip(&self.scale) {
            let v = cj * d;
            if !v.is_integer() {
                return Ok(Vec::new());
            }
            rhs.push(v.to_integer());
        }
        let Some(x0) = solve_left_integral(&self.cols, &rhs) else { return Ok(Vec::new()) };
        let pi = self.hinv_h.vec_mul(c);
        let norm_pi = self.hgram_inv.form(c, c);
        let bound = &norm_pi - norm;
        if bound.is_negative() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let Some(ell) = &self.ell else {
            if &self.gram.form(&x0, &x0) == &norm.to_integer() && norm.is_integer() {
                out.push(x0);
            }
            return Ok(out);
        };
        let p0: Vec<Rat> = qvec(&x0).iter().zip(&pi).map(|(a, b)| a - b).collect();
        let y = self.to_kernel.vec_mul(&p0);
        let center: Vec<Rat> = y.iter().map(|v| -v).collect();
        if !norm.is_integer() {
            return Ok(out);
        }
        let target = norm.to_integer();
        for kv in ell.close_vectors(&center, &bound, false)? {
            let mut x = x0.clone();
            for (i, &ki) in kv.iter().enumerate() {
                if ki == 0 {
                    continue;
                }
                let ki = Int::from(ki);
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj += &ki * &self.kernel[(i, j)];
                }
            }
            if self.gram.form(&x, &x) == target {
                out.push(x);
            }
        }
        out.sort();
        Ok(out)
    }
}

/// A root separating two vectors together with the parameter at which the segment from
/// `v2` to `v1` meets its hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingRoot {
    pub root: Vec<Int>,
    pub t: Rat,
}

/// Roots `r` with `⟨r, v1⟩ > 0 > ⟨r, v2⟩`, ordered along the segment from `v2` to `v1`.
/// Equal parameters for two different roots yield [`Error::Tie`].
pub fn separating_roots(gram: &IntMatrix, v1: &[Rat], v2: &[Rat]) -> Result<Vec<SeparatingRoot>> {
    let out = separating_vectors(gram, v1, v2, -2)?;
    if out.windows(2).any(|w| w[0].t == w[1].t) {
        return Err(Error::Tie);
    }
    Ok(out)
}

/// Vectors of norm `norm < 0` with `⟨x, v1⟩ > 0 > ⟨x, v2⟩`, ordered along the segment from
/// `v2` to `v1`.
pub fn separating_vectors(gram: &IntMatrix, v1: &[Rat], v2: &[Rat], norm: i64) -> Result<Vec<SeparatingRoot>> {
    if norm >= 0 {
        return Err(Error::Invalid("separating vectors need a negative norm".into()));
    }
    let m = -norm as f64;
    let gq = gram.to_rat();
    let n1 = gq.form(v1, v1);
    let n2 = gq.form(v2, v2);
    let p = gq.form(v1, v2);
    if !n1.is_positive() || !n2.is_positive() {
        return Err(Error::Precondition("separating roots need vectors of positive norm".into()));
    }
    if !p.is_positive() {
        return Err(Error::Precondition("vectors lie in opposite cones".into()));
    }
    let det = &n1 * &n2 - &p * &p;
    if det.is_zero() {
        return Ok(Vec::new());
    }
    let slice = Slice::new(gram, &[v1.to_vec(), v2.to_vec()])?;
    let d1 = qvec_denominator(&gq.vec_mul(v1));
    let d2 = qvec_denominator(&gq.vec_mul(v2));
    // Q(a, b) = (a, b) M⁻¹ (a, b)ᵀ with M the Gram matrix of (v1, v2)
    let f = |x: &Rat| x.to_f64().unwrap_or(f64::NAN);
    let (al, be, ga) = (f(&(&n2 / &det)), f(&(-&p / &det)), f(&(&n1 / &det)));
    let ts = -be / ga;
    let cmax = if ts < 0.0 { al - be * be / ga } else { al };
    if !(cmax < 0.0) || !(ga < 0.0) {
        return Err(Error::Precondition("separating region is unbounded".into()));
    }
    let a_max = (m / -cmax).sqrt() * (1.0 + 1e-9) + 1e-9;
    let d1f = d1.to_f64().unwrap_or(f64::INFINITY);
    let d2f = d2.to_f64().unwrap_or(f64::INFINITY);
    let target = Rat::from_integer(Int::from(norm));
    let mut out: Vec<SeparatingRoot> = Vec::new();
    let imax = (a_max * d1f).floor() as i64;
    for i in 1..=imax {
        let a = Rat::new(Int::from(i), d1.clone());
        let af = f(&a);
        let disc = (be * af) * (be * af) - ga * (al * af * af + m);
        if disc < 0.0 {
            continue;
        }
        let r0 = (-be * af + disc.sqrt()) / ga;
        let r1 = (-be * af - disc.sqrt()) / ga;
        let (lo, hi) = (r0.min(r1), r0.max(r1).min(0.0));
        let jlo = ((-hi * d2f) - 1e-6).ceil().max(1.0) as i64;
        let jhi = ((-lo * d2f) + 1e-6).floor() as i64;
        for j in jlo..=jhi {
            let b = Rat::new(Int::from(-j), d2.clone());
            for root in slice.vectors(&[a.clone(), b.clone()], &target)? {
                let t = &b / (&b - &a);
                out.push(SeparatingRoot { root, t });
            }
        }
    }
    out.sort_by(|x, y| x.t.cmp(&y.t).then_with(|| x.root.cmp(&y.root)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matrix::{ivec, rat};

    fn box_oracle(gram: &IntMatrix, v1: &[Rat], v2: &[Rat], r: i64) -> Vec<Vec<Int>> {
        let n = gram.rows();
        let gq = gram.to_rat();
        let mut out = Vec::new();
        let mut x = vec![-r; n];
        loop {
            let xi = ivec(&x);
            if gram.form(&xi, &xi) == Int::from(-2) {
                let a = gq.form(&qvec(&xi), v1);
                let b = gq.form(&qvec(&xi), v2);
                if a.is_positive() && b.is_negative() {
                    out.push(xi);
                }
            }
            let mut i = 0;
            while i < n && x[i] == r {
                x[i] = -r;
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

    #[test]
    fn slice_roots_of_l10_on_a_level() {
        let g = catalog::l10_gram();
        let a10 = crate::chamber::vinberg::a10();
        let s = Slice::new(&g, &[qvec(&a10)]).unwrap();
        for level in 1..4 {
            let v = s.vectors(&[rat(level, 1)], &rat(-2, 1)).unwrap();
            for x in &v {
                assert_eq!(g.form(x, x), Int::from(-2));
                assert_eq!(g.form(x, &a10), Int::from(level));
            }
            if level == 1 {
                // the simple roots are exactly the roots at level 1
                assert_eq!(v.len(), 10);
            }
        }
    }

    #[test]
    fn separating_roots_match_box_search() {
        // rank-3 hyperbolic lattice U ⊕ A1
        let g = IntMatrix::from_i64(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]);
        let cases = [
            (vec![rat(1, 1), rat(5, 1), rat(1, 1)], vec![rat(7, 1), rat(1, 1), rat(-2, 1)]),
            (vec![rat(2, 1), rat(3, 1), rat(0, 1)], vec![rat(9, 2), rat(1, 3), rat(1, 5)]),
            (vec![rat(1, 1), rat(1, 1), rat(0, 1)], vec![rat(11, 1), rat(2, 1), rat(3, 1)]),
        ];
        for (v1, v2) in cases {
            let got = match separating_roots(&g, &v1, &v2) {
                Ok(v) => v,
                Err(Error::Tie) => continue,
                Err(e) => panic!("{e}"),
            };
            let mut roots: Vec<Vec<Int>> = got.iter().map(|s| s.root.clone()).collect();
            roots.sort();
            assert_eq!(roots, box_oracle(&g, &v1, &v2, 12));
            assert!(got.windows(2).all(|w| w[0].t < w[1].t));
        }
        let v = vec![rat(1, 1), rat(2, 1), rat(0, 1)];
        assert!(separating_roots(&g, &v, &v).unwrap().is_empty());
    }

    #[test]
    fn separating_roots_in_l10() {
        let g = catalog::l10_gram();
        let a10 = qvec(&crate::chamber::vinberg::a10());
        // the reflected image of a10 is separated from a10 by exactly e_1
        let s = crate::chamber::vinberg::simple_reflection(0);
        let b = RatMatrix::from_rows(vec![a10.clone()], 10).mul(&s.to_rat()).row_vec(0);
        let got = separating_roots(&g, &a10, &b).unwrap();
        assert_eq!(got.len(), 1);
        let mut e1 = vec![Int::zero(); 10];
        e1[0] = crate::matrix::int(1);
        assert_eq!(got[0].root, e1);
    }
}

//! Fincke–Pohst enumeration of lattice points in (possibly shifted) ellipsoids.
//!
//! Bounds come from a floating copy of the exact LDLᵀ decomposition of an LLL-reduced
//! Gram matrix, widened by a safety margin; every reported point is confirmed exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::gram::{lll, vec_mat, PosGram, Reduced};
use crate::error::{Error, Result};
use crate::matrix::Rat;

const REL_EPS: f64 = 1e-9;
const ABS_EPS: f64 = 1e-6;

/// A positive-definite quadratic form prepared for repeated enumeration.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    pub original: PosGram,
    pub reduced: Reduced,
    tinv: Vec<Vec<i64>>,
    q: Vec<Vec<f64>>,
    d: Vec<f64>,
}

struct Walk<'a> {
    q: &'a [Vec<f64>],
    d: &'a [f64],
    center: Vec<f64>,
    bound: f64,
    half: bool,
}

impl Walk<'_> {
    /// Visits every integer point with `Σ d_i (y_i)² ≤ bound`; the visitor returns `false` to stop.
    fn run(&self, mut visit: impl FnMut(&[i64]) -> bool) {
        let n = self.d.len();
        if n == 0 {
            return;
        }
        let mut x = vec![0i64; n];
        let mut hi = vec![0i64; n];
        let mut ctr = vec![0f64; n];
        let mut rem = vec![0f64; n];
        let mut zero_above = vec![true; n + 1];
        let c = &self.center;

        let setup = |i: usize, x: &mut [i64], hi: &mut [i64], ctr: &mut [f64], rem: &[f64], zero_above: &[bool]| {
            let mut s = c[i];
            for j in i + 1..n {
                s -= self.q[i][j] * (x[j] as f64 - c[j]);
            }
            ctr[i] = s;
            let r = (rem[i].max(0.0) / self.d[i]).sqrt() + ABS_EPS;
            let mut lo = (s - r).ceil() as i64;
            if self.half && zero_above[i + 1] {
                lo = lo.max(0);
            }
            hi[i] = (s + r).floor() as i64;
            x[i] = lo - 1;
        };

        let mut i = n - 1;
        rem[i] = self.bound;
        setup(i, &mut x, &mut hi, &mut ctr, &rem, &zero_above);
        loop {
            x[i] += 1;
            if x[i] > hi[i] {
                if i == n - 1 {
                    return;
                }
                i += 1;
                continue;
            }
            let y = x[i] as f64 - ctr[i];
            let r = rem[i] - self.d[i] * y * y;
            if r < -ABS_EPS * (1.0 + self.bound.abs()) {
                continue;
            }
            if i == 0 {
                if !visit(&x) {
                    return;
                }
                continue;
            }
            zero_above[i] = zero_above[i + 1] && x[i] == 0;
            i -= 1;
            rem[i] = r;
            setup(i, &mut x, &mut hi, &mut ctr, &rem, &zero_above);
        }
    }
}

fn widen(b: f64) -> f64 {
    b * (1.0 + REL_EPS) + ABS_EPS
}

impl Ellipsoid {
    pub fn new(g: &PosGram) -> Result<Self> {
        let reduced = lll(g)?;
        let tinv = reduced.t_inverse()?;
        let (q, d) = reduced.gram.enumeration_data()?;
        Ok(Ellipsoid { original: g.clone(), reduced, tinv, q, d })
    }

    pub fn rank(&self) -> usize {
        self.original.n
    }

    fn to_original(&self, y: &[i64]) -> Result<Vec<i64>> {
        vec_mat(y, &self.reduced.t)
    }

    /// Visits every nonzero `x` (one per `±` pair, last nonzero reduced coordinate positive)
    /// with `x G xᵀ ≤ bound`, in reduced coordinates, together with its exact norm.
    pub fn for_each_short(&self, bound: i64, mut visit: impl FnMut(&[i64], i64) -> bool) -> Result<()> {
        if bound <= 0 {
            return Ok(());
        }
        let walk = Walk { q: &self.q, d: &self.d, center: vec![0.0; self.rank()], bound: widen(bound as f64), half: true };
        let g = &self.reduced.gram;
        let mut err = None;
        walk.run(|y| {
            if y.iter().all(|&v| v == 0) {
                return true;
            }
            let nrm = g.norm(y);
            if nrm > bound as i128 {
                return true;
            }
            match i64::try_from(nrm) {
                Ok(v) => visit(y, v),
                Err(_) => {
                    err = Some(Error::Overflow("vector norm"));
                    false
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// All nonzero `x` with `x G xᵀ ≤ bound`, one per `±` pair, in original coordinates with
    /// the first nonzero coordinate positive, sorted by (norm, coordinates).
    pub fn short_vectors(&self, bound: i64) -> Result<Vec<(Vec<i64>, i64)>> {
        let mut out = Vec::new();
        let mut err = None;
        self.for_each_short(bound, |y, nrm| match self.to_original(y) {
            Ok(mut x) => {
                sign_normalize_i64(&mut x);
                out.push((x, nrm));
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Number of vectors of each norm up to `bound`, counting `x` and `-x` separately.
    pub fn norm_counts(&self, bound: i64) -> Result<BTreeMap<i64, u64>> {
        let mut counts = BTreeMap::new();
        self.for_each_short(bound, |_, nrm| {
            *counts.entry(nrm).or_insert(0) += 2;
            true
        })?;
        Ok(counts)
    }

    /// All `y ∈ Zⁿ` with `(y − c) G (y − c)ᵀ ≤ bound` (`< bound` if `strict`), in original
    /// coordinates, sorted.
    pub fn close_vectors(&self, center: &[Rat], bound: &Rat, strict: bool) -> Result<Vec<Vec<i64>>> {
        let n = self.rank();
        if center.len() != n {
            return Err(Error::Invalid("center has wrong length".into()));
        }
        if bound.is_negative() || (strict && bound.is_zero()) {
            return Ok(Vec::new());
        }
        // c' = c T⁻¹ in reduced coordinates
        let mut cr = vec![Rat::zero(); n];
        for (i, ci) in center.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for j in 0..n {
                cr[j] += ci * Rat::from_integer(BigInt::from(self.tinv[i][j]));
            }
        }
        let den = cr.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let dc: Vec<BigInt> = cr.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
        let cf: Vec<f64> = cr.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        let bf = bound.to_f64().unwrap_or(f64::INFINITY);
        let walk = Walk { q: &self.q, d: &self.d, center: cf, bound: widen(bf), half: false };
        let g = &self.reduced.gram.g;
        let lhs_scale = bound.denom().clone();
        let rhs = bound.numer() * &den * &den;
        let mut out = Vec::new();
        let mut err = None;
        walk.run(|y| {
            // exact test: (D y − D c) G (D y − D c)ᵀ · den(bound) ≤ D² num(bound)
            let z: Vec<BigInt> = (0..n).map(|i| BigInt::from(y[i]) * &den - &dc[i]).collect();
            let mut acc = BigInt::zero();
            for i in 0..n {
                if z[i].is_zero() {
                    continue;
                }
                let mut s = BigInt::zero();
                for j in 0..n {
                    if g[i][j] != 0 {
                        s += &z[j] * g[i][j];
                    }
                }
                acc += &z[i] * s;
            }
            let lhs = acc * &lhs_scale;
            let ok = if strict { lhs < rhs } else { lhs <= rhs };
            if ok {
                match self.to_original(y) {
                    Ok(x) => out.push(x),
                    Err(e) => {
                        err = Some(e);
                        return false;
                    }
                }
            }
            true
        });
        if let Some(e) = err {
            return Err(e);
        }
        out.sort();
        Ok(out)
    }
}

pub fn sign_normalize_i64(v: &mut [i64]) {
    if let Some(&f) = v.iter().find(|&&x| x != 0) {
        if f < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_search(g: &PosGram, bound: i64, r: i64) -> Vec<(Vec<i64>, i64)> {
        let n = g.n;
        let mut out = Vec::new();
        let mut x = vec![-r; n];
        loop {
            let nrm = g.norm(&x) as i64;
            if x.iter().any(|&v| v != 0) && nrm <= bound {
                let mut y = x.clone();
                sign_normalize_i64(&mut y);
                if y == x {
                    out.push((y, nrm));
                }
            }
            let mut i = 0;
            while i < n {
                x[i] += 1;
                if x[i] <= r {
                    break;
                }
                x[i] = -r;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    #[test]
    fn matches_box_search() {
        let g = PosGram::new(vec![vec![4, 2, 1], vec![2, 5, -1], vec![1, -1, 3]]).unwrap();
        let e = Ellipsoid::new(&g).unwrap();
        assert_eq!(e.short_vectors(12).unwrap(), box_search(&g, 12, 4));
    }

    #[test]
    fn close_vectors_match_box_search() {
        let g = PosGram::new(vec![vec![2, 1], vec![1, 3]]).unwrap();
        let e = Ellipsoid::new(&g).unwrap();
        let c = vec![Rat::new(1.into(), 3.into()), Rat::new((-5).into(), 2.into())];
        let b = Rat::new(7.into(), 2.into());
        let got = e.close_vectors(&c, &b, false).unwrap();
        let mut want = Vec::new();
        for a in -6i64..=6 {
            for bb in -6i64..=6 {
                let y = [Rat::from_integer(a.into()) - &c[0], Rat::from_integer(bb.into()) - &c[1]];
                let v = &y[0] * &y[0] * Rat::from_integer(2.into())
                    + &y[0] * &y[1] * Rat::from_integer(2.into())
                    + &y[1] * &y[1] * Rat::from_integer(3.into());
                if v <= b {
                    want.push(vec![a, bb]);
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
    }
}

//! Automorphism groups and isometry testing of definite lattices by backtracking over short
//! vectors (Plesken–Souvignier), with candidate-count fingerprints for pruning.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

use super::enumerate::Ellipsoid;
use super::gram::{mat_mul, vec_mat, PosGram};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::perm::Perm;

/// All vectors of norm at most `bound` (both signs) with lookup tables.
pub struct VectorSet {
    pub n: usize,
    pub gram: PosGram,
    pub bound: i64,
    pub vecs: Vec<Vec<i64>>,
    pub vg: Vec<Vec<i64>>,
    pub norms: Vec<i64>,
    pub index: HashMap<Vec<i64>, u32>,
    pub by_norm: HashMap<i64, Vec<u32>>,
}

impl VectorSet {
    pub fn new(ell: &Ellipsoid, bound: i64) -> Result<Self> {
        let gram = ell.original.clone();
        let half = ell.short_vectors(bound)?;
        let mut vecs = Vec::with_capacity(2 * half.len());
        let mut norms = Vec::with_capacity(2 * half.len());
        for (v, nrm) in half {
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            vecs.push(v);
            norms.push(nrm);
            vecs.push(neg);
            norms.push(nrm);
        }
        if vecs.len() > u32::MAX as usize / 2 {
            return Err(Error::Exhausted("too many short vectors".into()));
        }
        let vg = vecs.iter().map(|v| gram.row_times(v)).collect::<Result<Vec<_>>>()?;
        let index = vecs.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let mut by_norm: HashMap<i64, Vec<u32>> = HashMap::new();
        for (i, &nrm) in norms.iter().enumerate() {
            by_norm.entry(nrm).or_default().push(i as u32);
        }
        Ok(VectorSet { n: gram.n, gram, bound, vecs, vg, norms, index, by_norm })
    }

    #[inline]
    fn pair(&self, a: u32, b: u32) -> i64 {
        let x = &self.vg[a as usize];
        let y = &self.vecs[b as usize];
        x.iter().zip(y).map(|(p, q)| p * q).sum()
    }

    pub fn norm_counts(&self) -> Vec<(i64, usize)> {
        let mut v: Vec<(i64, usize)> = self.by_norm.iter().map(|(&k, l)| (k, l.len())).collect();
        v.sort();
        v
    }

    /// Permutation of the vector set induced by `x ↦ x g`.
    pub fn permutation(&self, g: &[Vec<i64>]) -> Result<Perm> {
        let mut p = Vec::with_capacity(self.vecs.len());
        for v in &self.vecs {
            let w = vec_mat(v, g)?;
            let j = self.index.get(&w).ok_or_else(|| Error::Verification("matrix does not preserve the vector set".into()))?;
            p.push(*j);
        }
        Ok(Perm(p))
    }
}

/// A full-rank set of short vectors with the candidate counts along the identity path.
pub struct Frame {
    pub basis: Vec<u32>,
    pub basis_rows: Vec<Vec<i64>>,
    pub basis_gram: Vec<Vec<i64>>,
    /// `fingerprint[d][k]` for `k ≥ d`: number of candidates for `b_k` once `b_0..b_{d-1}` are fixed.
    pub fingerprint: Vec<Vec<usize>>,
    /// `det(B)`; `basis_adj = det(B) · B⁻¹`.
    pub det: i64,
    pub basis_adj: Vec<Vec<i64>>,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Greedy frame: vectors in order of (norm, norm-class size) that keep the chosen set primitive,
/// so the frame is a lattice basis whenever the greedy pass completes.
fn primitive_subset(vs: &VectorSet, order: &[u32]) -> Option<Vec<u32>> {
    let n = vs.n;
    // rows 0..k of `m` are the chosen vectors; `m` stays unimodular
    let mut m = IntMatrix::identity(n);
    let mut minv: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut chosen = Vec::new();
    for &i in order {
        let k = chosen.len();
        let v = &vs.vecs[i as usize];
        let c = vec_mat(v, &minv).ok()?;
        if c[k..].iter().fold(0, |g, &x| gcd(g, x)) != 1 {
            continue;
        }
        // unimodular P on rows k..n with first row c[k..]
        let tail: Vec<Vec<crate::matrix::Int>> = c[k..].iter().map(|&x| vec![x.into()]).collect();
        let h = crate::matrix::hnf(&IntMatrix::from_rows_with_cols(tail, 1));
        let p = h.u.inverse_unimodular().ok()?.transpose();
        let rest = m.select_rows(&(k..n).collect::<Vec<_>>());
        let new_rest = p.mul(&rest);
        let mut rows: Vec<Vec<crate::matrix::Int>> = (0..k).map(|r| m.row_vec(r)).collect();
        rows.push(v.iter().map(|&x| x.into()).collect());
        for r in 1..(n - k) {
            rows.push(new_rest.row_vec(r));
        }
        let cand = IntMatrix::from_rows(rows);
        let inv = cand.inverse_unimodular().ok()?;
        minv = inv.to_i64()?;
        m = cand;
        chosen.push(i);
        if chosen.len() == n {
            return Some(chosen);
        }
    }
    None
}

fn independent_subset(vs: &VectorSet) -> Result<Vec<u32>> {
    // sort by norm then by the size of the norm class
    let n = vs.n;
    let mut order: Vec<u32> = (0..vs.vecs.len() as u32).step_by(2).collect();
    order.sort_by_key(|&i| (vs.norms[i as usize], vs.by_norm[&vs.norms[i as usize]].len(), i));
    if let Some(b) = primitive_subset(vs, &order) {
        return Ok(b);
    }
    // floating Gram–Schmidt in coordinate space with exact confirmation at the end
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for &i in &order {
        let mut v: Vec<f64> = vs.vecs[i as usize].iter().map(|&x| x as f64).collect();
        for o in &ortho {
            let dot: f64 = v.iter().zip(o).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(o) {
                *a -= dot * b;
            }
        }
        let len: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 1e-6 {
            v.iter_mut().for_each(|a| *a /= len);
            ortho.push(v);
            chosen.push(i);
            if chosen.len() == n {
                break;
            }
        }
    }
    if chosen.len() < n {
        return Err(Error::Invalid("short vectors do not span".into()));
    }
    Ok(chosen)
}

fn filter(vs: &VectorSet, list: &[u32], x: u32, want: i64) -> Vec<u32> {
    let xg = &vs.vg[x as usize];
    list.iter()
        .copied()
        .filter(|&c| {
            let y = &vs.vecs[c as usize];
            xg.iter().zip(y).map(|(p, q)| p * q).sum::<i64>() == want
        })
        .collect()
}

impl Frame {
    pub fn new(vs: &VectorSet) -> Result<Self> {
        let n = vs.n;
        let basis = independent_subset(vs)?;
        let basis_rows: Vec<Vec<i64>> = basis.iter().map(|&i| vs.vecs[i as usize].clone()).collect();
        let basis_gram: Vec<Vec<i64>> =
            (0..n).map(|i| (0..n).map(|j| vs.pair(basis[i], basis[j])).collect()).collect();
        let bm = IntMatrix::from_i64(&basis_rows);
        let det_big = bm.det();
        let det: i64 = i64::try_from(&det_big).map_err(|_| Error::Overflow("basis determinant"))?;
        if det == 0 {
            return Err(Error::Degenerate("chosen vectors are dependent".into()));
        }
        let inv = bm.to_rat().inverse()?;
        let adj: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = &inv[(i, j)] * crate::matrix::Rat::from_integer(det_big.clone());
                        i64::try_from(&v.to_integer()).map_err(|_| Error::Overflow("adjugate"))
                    })
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<_>>()?;
        let mut fingerprint = Vec::with_capacity(n + 1);
        let mut lists: Vec<Vec<u32>> = (0..n).map(|k| vs.by_norm[&basis_gram[k][k]].clone()).collect();
        for d in 0..n {
            fingerprint.push(lists.iter().map(|l| l.len()).collect::<Vec<usize>>());
            let mut next = Vec::with_capacity(n - d - 1);
            for k in d + 1..n {
                next.push(filter(vs, &lists[k - d], basis[d], basis_gram[k][d]));
            }
            lists = next;
        }
        fingerprint.push(Vec::new());
        Ok(Frame { basis, basis_rows, basis_gram, fingerprint, det, basis_adj: adj })
    }

    /// Candidate lists for levels `d..n` in `target` once `b_j ↦ images[j]` for `j < d`.
    fn lists_after(&self, target: &VectorSet, images: &[u32]) -> Option<Vec<Vec<u32>>> {
        let n = self.basis.len();
        let mut lists: Vec<Vec<u32>> =
            (0..n).map(|k| target.by_norm.get(&self.basis_gram[k][k]).cloned().unwrap_or_default()).collect();
        if lists.iter().zip(&self.fingerprint[0]).any(|(l, &f)| l.len() != f) {
            return None;
        }
        for (d, &x) in images.iter().enumerate() {
            let mut next = Vec::with_capacity(n - d - 1);
            if !lists[0].contains(&x) {
                return None;
            }
            for k in d + 1..n {
                let l = filter(target, &lists[k - d], x, self.basis_gram[k][d]);
                if l.len() != self.fingerprint[d + 1][k - d - 1] {
                    return None;
                }
                next.push(l);
            }
            lists = next;
        }
        Some(lists)
    }

    /// Matrix of the map `b_i ↦ images[i]`, if integral.
    fn transform(&self, target: &VectorSet, images: &[u32]) -> Option<Vec<Vec<i64>>> {
        let x: Vec<Vec<i64>> = images.iter().map(|&i| target.vecs[i as usize].clone()).collect();
        let num = mat_mul(&self.basis_adj, &x).ok()?;
        let mut g = num;
        for row in g.iter_mut() {
            for e in row.iter_mut() {
                if *e % self.det != 0 {
                    return None;
                }
                *e /= self.det;
            }
        }
        Some(g)
    }

    /// Depth-first search for a complete assignment extending `images`.
    pub fn search(&self, target: &VectorSet, images: &mut Vec<u32>, budget: &mut u64) -> Result<Option<Vec<Vec<i64>>>> {
        let Some(lists) = self.lists_after(target, images) else { return Ok(None) };
        self.dfs(target, lists, images, budget)
    }

    fn dfs(&self, target: &VectorSet, lists: Vec<Vec<u32>>, images: &mut Vec<u32>, budget: &mut u64) -> Result<Option<Vec<Vec<i64>>>> {
        let n = self.basis.len();
        let d = images.len();
        if d == n {
            return Ok(self.transform(target, images));
        }
        for &c in &lists[0] {
            if *budget == 0 {
                return Err(Error::Exhausted("isometry search budget exhausted".into()));
            }
            *budget -= 1;
            let mut next = Vec::with_capacity(n - d - 1);
            let mut ok = true;
            for k in d + 1..n {
                let l = filter(target, &lists[k - d], c, self.basis_gram[k][d]);
                if l.len() != self.fingerprint[d + 1][k - d - 1] {
                    ok = false;
                    break;
                }
                next.push(l);
            }
            if !ok {
                continue;
            }
            images.push(c);
            if let Some(g) = self.dfs(target, next, images, budget)? {
                images.pop();
                return Ok(Some(g));
            }
            images.pop();
        }
        Ok(None)
    }
}

/// Search budget (number of tree nodes) for a single automorphism or isometry search.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

fn orbit(perms: &[Perm], start: u32, size: usize) -> Vec<u32> {
    let mut seen = vec![false; size];
    seen[start as usize] = true;
    let mut out = vec![start];
    let mut i = 0;
    while i < out.len() {
        let x = out[i] as usize;
        for p in perms {
            let y = p.0[x];
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

/// Generators (in the coordinates of `vs`) and the order of the automorphism group.
pub fn automorphisms(vs: &VectorSet, frame: &Frame) -> Result<(Vec<Vec<Vec<i64>>>, BigInt)> {
    let n = vs.n;
    let size = vs.vecs.len();
    let mut gens: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut perms: Vec<Perm> = Vec::new();
    let mut order = BigInt::one();
    let mut budget = DEFAULT_BUDGET;
    for level in (0..n).rev() {
        let prefix: Vec<u32> = frame.basis[..level].to_vec();
        let lists = frame.lists_after(vs, &prefix).ok_or_else(|| Error::Verification("identity fails its own fingerprint".into()))?;
        let candidates = lists[0].clone();
        let b = frame.basis[level];
        let mut orb = orbit(&perms, b, size);
        let mut in_orbit = vec![false; size];
        for &x in &orb {
            in_orbit[x as usize] = true;
        }
        let mut failed = vec![false; size];
        for &c in &candidates {
            if in_orbit[c as usize] || failed[c as usize] {
                continue;
            }
            let mut images = prefix.clone();
            images.push(c);
            match frame.search(vs, &mut images, &mut budget)? {
                Some(g) => {
                    let p = vs.permutation(&g)?;
                    perms.push(p);
                    gens.push(g);
                    orb = orbit(&perms, b, size);
                    for &x in &orb {
                        in_orbit[x as usize] = true;
                    }
                }
                None => {
                    for x in orbit(&perms, c, size) {
                        failed[x as usize] = true;
                    }
                }
            }
        }
        order *= BigInt::from(orb.len());
    }
    Ok((gens, order))
}

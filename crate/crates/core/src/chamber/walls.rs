//! Walls of induced chambers of `L10`, their automorphism groups, adjacency and isomorphism.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::affine::Slice;
use super::vinberg;
use crate::catalog;
use crate::definite::Definite;
use crate::error::{Error, Result};
use crate::lattice::{DualVector, EmbeddingModel, Lattice};
use crate::matrix::{int, left_kernel, qvec, rat, Int, IntMatrix, Rat, RatMatrix};
use crate::serial;

/// An induced chamber of `P(L10)`: an interior point and its wall roots `2 r_S ∈ L10`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedChamber {
    #[serde(with = "serial::rat_vec")]
    pub interior: Vec<Rat>,
    /// Roots of `L10` (coordinates in `e_1, …, e_10`), sorted.
    pub walls: Vec<Vec<i64>>,
}

fn l10_i64() -> Vec<Vec<i64>> {
    catalog::l10_gram().to_i64().expect("small entries")
}

fn pair_i64(g: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let mut s = 0;
    for i in 0..x.len() {
        if x[i] == 0 {
            continue;
        }
        for j in 0..y.len() {
            s += x[i] * g[i][j] * y[j];
        }
    }
    s
}

fn pair_rat_i64(g: &IntMatrix, x: &[Rat], y: &[i64]) -> Rat {
    let yi: Vec<Int> = y.iter().map(|&v| int(v)).collect();
    g.to_rat().form(x, &qvec(&yi))
}

impl InducedChamber {
    pub fn new(interior: Vec<Rat>, mut walls: Vec<Vec<i64>>) -> Self {
        walls.sort();
        walls.dedup();
        InducedChamber { interior, walls }
    }

    /// The wall vectors `r_S = r / 2` as dual vectors of `L10(2)`.
    pub fn wall_dual_vectors(&self) -> Vec<DualVector> {
        self.walls.iter().map(|r| DualVector { coords: r.iter().map(|&x| rat(x, 2)).collect() }).collect()
    }

    /// Checks that every wall is a root of `L10` pairing positively with the interior point,
    /// that the hyperplanes are distinct and that the walls span.
    pub fn check(&self) -> Result<()> {
        let g = l10_i64();
        let gi = catalog::l10_gram();
        if self.walls.is_empty() {
            return Err(Error::Verification("chamber has no walls".into()));
        }
        let set: HashSet<&Vec<i64>> = self.walls.iter().collect();
        for r in &self.walls {
            if r.len() != 10 || pair_i64(&g, r, r) != -2 {
                return Err(Error::Verification(format!("wall {r:?} is not a (-2)-vector of L10")));
            }
            let neg: Vec<i64> = r.iter().map(|x| -x).collect();
            if set.contains(&neg) {
                return Err(Error::Verification(format!("walls {r:?} and its negative define one hyperplane")));
            }
            if !pair_rat_i64(&gi, &self.interior, r).is_positive() {
                return Err(Error::Verification(format!("interior point is not on the positive side of {r:?}")));
            }
        }
        if set.len() != self.walls.len() {
            return Err(Error::Verification("repeated wall".into()));
        }
        let m = IntMatrix::from_i64(&self.walls);
        if m.rank() != 10 {
            return Err(Error::Verification("walls do not span L10 ⊗ Q".into()));
        }
        Ok(())
    }
}

/// `L_φ`-coordinates of a rational vector of `L10 ⊗ Q` under `ι`.
fn embed_rat(model: &EmbeddingModel, x: &[Rat]) -> Vec<Rat> {
    model.embed_m(x)
}

/// Wall roots of the induced chamber `ι⁻¹(C(w))` from the projections of `w`.
pub fn induced_chamber_walls(model: &EmbeddingModel, w: &[Int]) -> Result<InducedChamber> {
    Ok(induced_chamber_with_roots(model, w)?.0)
}

/// As [`induced_chamber_walls`], also returning for each wall one root `r ∈ L_φ` with
/// `⟨r, w⟩ = 1` and `r_S = wall / 2`.
pub fn induced_chamber_with_roots(model: &EmbeddingModel, w: &[Int]) -> Result<(InducedChamber, Vec<Vec<Int>>)> {
    let g10 = catalog::l10_gram();
    let (ws, wr) = model.project_int(w);
    let ws = ws.coords;
    let wr = wr.coords;
    let n_w = g10.to_rat().form(&ws, &ws);
    if !n_w.is_positive() {
        return Err(Error::Unsupported("⟨w_S, w_S⟩ ≤ 0: the rootless class has no induced chamber of this kind".into()));
    }
    let gr = model.n.gram().clone();
    let ginv = gr.to_rat().inverse()?;
    let twice = RatMatrix::from_rows(ginv.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * rat(2, 1)).collect()).collect(), gr.rows());
    let dual2 = twice.to_int().ok_or_else(|| Error::Verification("2·R∨ is not contained in R".into()))?;
    let def = Definite::new(&Lattice::new(dual2)?)?;
    let mut vr: Vec<Vec<Rat>> = Vec::new();
    for y in def.short_vectors(-2)?.vectors {
        let yq: Vec<Rat> = y.iter().map(|&c| rat(c, 1)).collect();
        let v = ginv.vec_mul(&yq);
        vr.push(v.iter().map(|x| -x).collect());
        vr.push(v);
    }
    let grq = gr.to_rat();
    let slice = Slice::new(&g10, &[ws.clone()])?;
    let mut cache: BTreeMap<Rat, Vec<Vec<Int>>> = BTreeMap::new();
    let mut found: BTreeMap<Vec<i64>, Vec<Int>> = BTreeMap::new();
    let minus_two = rat(-2, 1);
    for v in &vr {
        let a = rat(1, 1) - grq.form(&wr, v);
        if !cache.contains_key(&a) {
            let xs = slice.vectors(&[a.clone()], &minus_two)?;
            cache.insert(a.clone(), xs);
        }
        for x in &cache[&a] {
            let mut amb: Vec<Rat> = x.iter().map(|c| Rat::new(c.clone(), int(2))).collect();
            amb.extend(v.iter().cloned());
            if !model.contains_ambient(&amb) {
                continue;
            }
            let key: Vec<i64> = x.iter().map(|c| c.to_i64().expect("small root coordinates")).collect();
            let r = crate::matrix::qvec_to_int(&model.from_ambient(&amb)).expect("checked integral");
            found.entry(key).or_insert(r);
        }
    }
    let interior = qvec(&vinberg::a10());
    let (walls, roots): (Vec<Vec<i64>>, Vec<Vec<Int>>) = found.into_iter().unzip();
    let d = InducedChamber { interior, walls };
    d.check()?;
    Ok((d, roots))
}

/// Roots of `L_φ` orthogonal to `ι(x)` versus roots of `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteriorityCheck {
    pub orthogonal_roots: u64,
    pub complement_roots: u64,
}

impl InteriorityCheck {
    pub fn holds(&self) -> bool {
        self.orthogonal_roots == self.complement_roots
    }
}

/// Counts the roots of `ι(x)⊥ ⊂ L_φ` and of `R`. Since `ι(R) ⊂ ι(x)⊥`, equal counts mean the
/// root sets coincide.
pub fn interiority_check(model: &EmbeddingModel, x: &[Rat]) -> Result<InteriorityCheck> {
    let l = &model.lattice;
    let v = embed_rat(model, x);
    let (_, vi) = RatMatrix::from_rows(vec![v], l.rank()).clear_denominators();
    let k = left_kernel(&l.gram().mul(&vi.transpose()));
    let kg = l.gram().congruence(&k);
    let orthogonal_roots = Definite::new(&Lattice::new(kg)?)?.count_vectors(-2)?;
    let complement_roots = Definite::new(&model.n)?.count_vectors(-2)?;
    Ok(InteriorityCheck { orthogonal_roots, complement_roots })
}

/// `O(L10, D)` as the isometries of `L10` permuting the walls and preserving the cone.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChamberGroup {
    pub order: u64,
    /// A generating set, found greedily among the elements.
    #[serde(with = "matrices")]
    pub generators: Vec<IntMatrix>,
    /// Wall orbits as sorted index lists, ordered by their smallest element.
    pub orbits: Vec<Vec<usize>>,
    /// `σ10 = Σ_g a^g` for the interior point `a` of the chamber.
    #[serde(with = "serial::rat_vec")]
    pub orbit_sum: Vec<Rat>,
}

mod matrices {
    use super::IntMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct M(#[serde(with = "crate::serial::int_matrix")] IntMatrix);

    pub fn serialize<S: Serializer>(v: &[IntMatrix], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|m| M(m.clone())).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<IntMatrix>, D::Error> {
        Ok(Vec::<M>::deserialize(d)?.into_iter().map(|m| m.0).collect())
    }
}

impl ChamberGroup {
    /// Orbit sizes, sorted descending.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.orbits.iter().map(|o| o.len()).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Checks the generators against the chamber and that they generate a group of the
    /// recorded order with the recorded orbits.
    pub fn verify(&self, d: &InducedChamber) -> Result<()> {
        let g10 = catalog::l10_gram();
        let set = WallSet::new(&d.walls);
        let mut perms = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            if g10.congruence(g) != g10 {
                return Err(Error::Verification("generator is not an isometry of L10".into()));
            }
            let gi = g.to_i64().ok_or(Error::Overflow("generator entries"))?;
            let perm = set.permutation(&gi).ok_or_else(|| Error::Verification("generator does not permute the walls".into()))?;
            let a = g.to_rat().vec_mul(&d.interior);
            if !g10.to_rat().form(&a, &d.interior).is_positive() {
                return Err(Error::Verification("generator does not preserve the positive cone".into()));
            }
            perms.push(perm);
        }
        let closure = perm_closure(d.walls.len(), &perms);
        if closure.len() as u64 != self.order {
            return Err(Error::Verification(format!("generators give order {} instead of {}", closure.len(), self.order)));
        }
        if orbits_of(d.walls.len(), &perms) != self.orbits {
            return Err(Error::Verification("orbits do not match the generators".into()));
        }
        Ok(())
    }
}

struct WallSet {
    walls: Vec<Vec<i64>>,
    pairs: Vec<Vec<i64>>,
    profiles: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl WallSet {
    fn new(walls: &[Vec<i64>]) -> Self {
        let g = l10_i64();
        let pairs: Vec<Vec<i64>> = walls.iter().map(|x| walls.iter().map(|y| pair_i64(&g, x, y)).collect()).collect();
        let profiles = pairs
            .iter()
            .map(|row| {
                let mut p = row.clone();
                p.sort_unstable();
                p
            })
            .collect();
        let index = walls.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        WallSet { walls: walls.to_vec(), pairs, profiles, index }
    }

    /// Independent walls, each chosen to meet an earlier one when possible.
    fn basis(&self) -> Result<Vec<usize>> {
        let mut chosen: Vec<usize> = Vec::new();
        let independent = |c: &[usize]| IntMatrix::from_i64(&c.iter().map(|&i| self.walls[i].clone()).collect::<Vec<_>>()).rank() == c.len();
        while chosen.len() < 10 {
            let mut pick = None;
            for pass in 0..2 {
                for i in 0..self.walls.len() {
                    if chosen.contains(&i) || (pass == 0 && !chosen.is_empty() && chosen.iter().all(|&j| self.pairs[i][j] == 0)) {
                        continue;
                    }
                    let mut c = chosen.clone();
                    c.push(i);
                    if independent(&c) {
                        pick = Some(i);
                        break;
                    }
                }
                if pick.is_some() {
                    break;
                }
            }
            chosen.push(pick.ok_or_else(|| Error::Verification("walls do not span".into()))?);
        }
        Ok(chosen)
    }

    /// Images of the walls under `g` as indices into `self`, if they are all walls.
    fn permutation_into(&self, from: &[Vec<i64>], g: &[Vec<i64>]) -> Option<Vec<u16>> {
        let mut perm = Vec::with_capacity(from.len());
        for w in from {
            let img: Vec<i64> = (0..10).map(|j| (0..10).map(|i| w[i] * g[i][j]).sum()).collect();
            perm.push(*self.index.get(&img)? as u16);
        }
        Some(perm)
    }

    fn permutation(&self, g: &[Vec<i64>]) -> Option<Vec<u16>> {
        self.permutation_into(&self.walls, g)
    }
}

fn compose(p: &[u16], q: &[u16]) -> Vec<u16> {
    p.iter().map(|&i| q[i as usize]).collect()
}

fn perm_closure(m: usize, gens: &[Vec<u16>]) -> HashSet<Vec<u16>> {
    let id: Vec<u16> = (0..m as u16).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut stack = vec![id];
    while let Some(p) = stack.pop() {
        for g in gens {
            let q = compose(&p, g);
            if seen.insert(q.clone()) {
                stack.push(q);
            }
        }
    }
    seen
}

fn orbits_of(m: usize, perms: &[Vec<u16>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for perm in perms {
        for (i, &j) in perm.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j as usize));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbits: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        orbits.entry(r).or_default().push(i);
    }
    orbits.into_values().collect()
}

/// `B⁻¹` for the basis walls as an integer matrix over a common denominator.
struct ScaledInverse {
    num: Vec<Vec<i128>>,
    den: i128,
}

impl ScaledInverse {
    fn new(b: &IntMatrix) -> Result<Self> {
        let inv = b.to_rat().inverse()?;
        let (den, num) = inv.clear_denominators();
        let den = den.to_i128().ok_or(Error::Overflow("basis inverse denominator"))?;
        let num = num.to_i64().ok_or(Error::Overflow("basis inverse"))?;
        Ok(ScaledInverse { num: num.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect(), den })
    }

    /// `B⁻¹ X` if integral.
    fn solve(&self, x: &[&Vec<i64>]) -> Option<Vec<Vec<i64>>> {
        let mut g = vec![vec![0i64; 10]; 10];
        for i in 0..10 {
            for j in 0..10 {
                let s: i128 = (0..10).map(|k| self.num[i][k] * x[k][j] as i128).sum();
                if s % self.den != 0 {
                    return None;
                }
                g[i][j] = i64::try_from(s / self.den).ok()?;
            }
        }
        Some(g)
    }
}

/// Isometries of `L10` mapping the walls of `d1` onto those of `d2` and the interior of `d1`
/// into the cone of `d2`. Calls `visit` with each matrix and its wall permutation; the search
/// stops when `visit` returns `false`.
fn wall_isometries(d1: &InducedChamber, d2: &InducedChamber, visit: &mut dyn FnMut(&[Vec<i64>], Vec<u16>) -> bool) -> Result<()> {
    if d1.walls.len() != d2.walls.len() {
        return Ok(());
    }
    let s1 = WallSet::new(&d1.walls);
    let s2 = WallSet::new(&d2.walls);
    let basis = s1.basis()?;
    let b = IntMatrix::from_i64(&basis.iter().map(|&i| s1.walls[i].clone()).collect::<Vec<_>>());
    let binv = ScaledInverse::new(&b)?;
    let g10 = l10_i64();
    let (_, a1) = RatMatrix::from_rows(vec![d1.interior.clone()], 10).clear_denominators();
    let (_, a2) = RatMatrix::from_rows(vec![d2.interior.clone()], 10).clear_denominators();
    let a1 = a1.to_i64().ok_or(Error::Overflow("interior point"))?.remove(0);
    let a2 = a2.to_i64().ok_or(Error::Overflow("interior point"))?.remove(0);

    struct Search<'a> {
        s1: &'a WallSet,
        s2: &'a WallSet,
        basis: &'a [usize],
        binv: &'a ScaledInverse,
        g10: &'a [Vec<i64>],
        a1: &'a [i64],
        a2: &'a [i64],
        images: Vec<usize>,
        stop: bool,
    }

    fn rec(st: &mut Search, visit: &mut dyn FnMut(&[Vec<i64>], Vec<u16>) -> bool) {
        if st.stop {
            return;
        }
        let k = st.images.len();
        if k == st.basis.len() {
            let x: Vec<&Vec<i64>> = st.images.iter().map(|&i| &st.s2.walls[i]).collect();
            let Some(g) = st.binv.solve(&x) else { return };
            let Some(perm) = st.s2.permutation_into(&st.s1.walls, &g) else { return };
            let img: Vec<i64> = (0..10).map(|j| (0..10).map(|i| st.a1[i] * g[i][j]).sum()).collect();
            let p: i128 = (0..10).flat_map(|i| (0..10).map(move |j| (i, j))).map(|(i, j)| img[i] as i128 * st.g10[i][j] as i128 * st.a2[j] as i128).sum();
            if p <= 0 {
                return;
            }
            if !visit(&g, perm) {
                st.stop = true;
            }
            return;
        }
        let src = st.basis[k];
        for j in 0..st.s2.walls.len() {
            if st.images.contains(&j) || st.s2.profiles[j] != st.s1.profiles[src] {
                continue;
            }
            if (0..k).any(|l| st.s2.pairs[j][st.images[l]] != st.s1.pairs[src][st.basis[l]]) {
                continue;
            }
            st.images.push(j);
            rec(st, visit);
            st.images.pop();
            if st.stop {
                return;
            }
        }
    }

    let mut st = Search { s1: &s1, s2: &s2, basis: &basis, binv: &binv, g10: &g10, a1: &a1, a2: &a2, images: Vec::new(), stop: false };
    rec(&mut st, visit);
    Ok(())
}

/// `O(L10, D)`: all cone-preserving isometries of `L10` permuting the walls of `D`.
pub fn chamber_aut_group(d: &InducedChamber) -> Result<ChamberGroup> {
    let (den, a) = RatMatrix::from_rows(vec![d.interior.clone()], 10).clear_denominators();
    let a = a.to_i64().ok_or(Error::Overflow("interior point"))?.remove(0);
    let mut sum = vec![0i128; 10];
    let mut elements: Vec<(Vec<Vec<i64>>, Vec<u16>)> = Vec::new();
    let mut perms: Vec<Vec<u16>> = Vec::new();
    let mut order = 0u64;
    wall_isometries(d, d, &mut |g, perm| {
        order += 1;
        for j in 0..10 {
            sum[j] += (0..10).map(|i| a[i] as i128 * g[i][j] as i128).sum::<i128>();
        }
        perms.push(perm.clone());
        elements.push((g.to_vec(), perm));
        true
    })?;
    let orbits = orbits_of(d.walls.len(), &perms);
    drop(perms);
    let mut generators = Vec::new();
    let mut gen_perms: Vec<Vec<u16>> = Vec::new();
    let mut closure = perm_closure(d.walls.len(), &gen_perms);
    for (g, perm) in &elements {
        if closure.len() as u64 == order {
            break;
        }
        if !closure.contains(perm) {
            gen_perms.push(perm.clone());
            generators.push(IntMatrix::from_i64(g));
            closure = perm_closure(d.walls.len(), &gen_perms);
        }
    }
    let den = Rat::from_integer(den);
    let orbit_sum = sum.iter().map(|&x| Rat::from_integer(Int::from(x)) / &den).collect();
    Ok(ChamberGroup { order, generators, orbits, orbit_sum })
}

/// Whether each wall carries a point of `D` interior to the wall: the projection of the
/// orbit sum `σ` to `(r)⊥` pairs positively with every other wall.
pub fn wall_certificates(d: &InducedChamber, sigma: &[Rat]) -> Vec<bool> {
    let g = catalog::l10_gram();
    let gq = g.to_rat();
    let walls: Vec<Vec<Rat>> = d.walls.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
    walls
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let t = gq.form(sigma, r) / rat(2, 1);
            let sp: Vec<Rat> = sigma.iter().zip(r).map(|(s, x)| s + &t * x).collect();
            gq.form(&sp, &sp).is_positive() && walls.iter().enumerate().all(|(j, r2)| j == i || gq.form(&sp, r2).is_positive())
        })
        .collect()
}

/// The chamber across the wall `r`: walls and interior point reflected by `s_r`.
pub fn adjacent_chamber(d: &InducedChamber, r: &[i64]) -> Result<InducedChamber> {
    if !d.walls.iter().any(|w| w.as_slice() == r) {
        return Err(Error::Precondition(format!("{r:?} is not a wall of the chamber")));
    }
    let g = l10_i64();
    let reflect = |x: &[i64]| -> Vec<i64> {
        let c = pair_i64(&g, x, r);
        x.iter().zip(r).map(|(a, b)| a + c * b).collect()
    };
    let ri: Vec<Int> = r.iter().map(|&x| int(x)).collect();
    let interior = vinberg::reflect_rat(&catalog::l10_gram(), &ri, &d.interior);
    Ok(InducedChamber::new(interior, d.walls.iter().map(|w| reflect(w)).collect()))
}

/// Some `g ∈ O⁺(L10)` with `walls(d1)^g = walls(d2)`.
pub fn chamber_isomorphic(d1: &InducedChamber, d2: &InducedChamber) -> Result<Option<IntMatrix>> {
    let mut found = None;
    wall_isometries(d1, d2, &mut |g, _| {
        found = Some(IntMatrix::from_i64(g));
        false
    })?;
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vinberg_chamber() -> InducedChamber {
        let walls: Vec<Vec<i64>> = (0..10).map(|i| (0..10).map(|j| (i == j) as i64).collect()).collect();
        InducedChamber::new(qvec(&vinberg::a10()), walls)
    }

    #[test]
    fn vinberg_chamber_has_trivial_group() {
        let d = vinberg_chamber();
        d.check().unwrap();
        let g = chamber_aut_group(&d).unwrap();
        assert_eq!(g.order, 1);
        assert!(g.generators.is_empty());
        assert_eq!(g.orbit_sizes(), vec![1; 10]);
        assert_eq!(g.orbit_sum, d.interior);
        g.verify(&d).unwrap();
        assert!(wall_certificates(&d, &g.orbit_sum).iter().all(|&b| b));
    }

    #[test]
    fn adjacent_chamber_is_isomorphic_by_the_reflection() {
        let d = vinberg_chamber();
        let r = d.walls[3].clone();
        let d2 = adjacent_chamber(&d, &r).unwrap();
        d2.check().unwrap();
        let minus_r: Vec<i64> = r.iter().map(|x| -x).collect();
        assert!(d2.walls.contains(&minus_r));
        assert_eq!(adjacent_chamber(&d2, &minus_r).unwrap(), d);
        let g = chamber_isomorphic(&d, &d2).unwrap().unwrap();
        let ri: Vec<Int> = r.iter().map(|&x| int(x)).collect();
        assert_eq!(g, vinberg::root_reflection(&ri));
        assert_eq!(chamber_isomorphic(&d, &d).unwrap().unwrap(), IntMatrix::identity(10));
        let not_a_wall = vec![1, 1, 0, 0, 0, 0, 0, 0, 0, 0];
        assert!(adjacent_chamber(&d, &not_a_wall).is_err());
    }
}

//! Conway–Sloane mass of a definite genus, for genera whose determinant is a power of 2.
//!
//! The standard mass is computed exactly by tracking powers of `π` and `√2` alongside a
//! rational coefficient; local factors follow the species rules for 2-adic Jordan
//! constituents.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fqf::discriminant_form;
use crate::lattice::{Lattice, Signature};
use crate::matrix::{Rat, RatMatrix};

fn r(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn pow2(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// `c · π^(pi4/4) · √2^s2`.
#[derive(Clone, Debug)]
struct Transcendental {
    c: Rat,
    pi4: i64,
    s2: i64,
}

impl Transcendental {
    fn rational(c: Rat) -> Self {
        Transcendental { c, pi4: 0, s2: 0 }
    }

    fn mul(&self, o: &Transcendental) -> Self {
        Transcendental { c: &self.c * &o.c, pi4: self.pi4 + o.pi4, s2: self.s2 + o.s2 }
    }

    fn into_rational(self) -> Result<Rat> {
        if self.pi4 != 0 || self.s2 % 2 != 0 {
            return Err(Error::Verification("standard mass did not reduce to a rational".into()));
        }
        Ok(self.c * pow2(self.s2 / 2))
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Bernoulli numbers `B_0..=B_m` with `B_1 = -1/2`.
fn bernoulli(m: usize) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for k in 1..=m {
        let mut s = Rat::zero();
        for j in 0..k {
            s += Rat::from_integer(binomial(k as u64 + 1, j as u64)) * &b[j];
        }
        b.push(-s / Rat::from_integer(BigInt::from(k + 1)));
    }
    b
}

fn bernoulli_poly(k: usize, x: &Rat, b: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for j in 0..=k {
        let mut xp = Rat::one();
        for _ in 0..(k - j) {
            xp *= x;
        }
        s += Rat::from_integer(binomial(k as u64, j as u64)) * &b[j] * xp;
    }
    s
}

/// Kronecker symbol `(a / n)` for `n > 0`.
fn kronecker(a: &BigInt, n: u64) -> i64 {
    let mut result = 1i64;
    let mut n = n;
    let a = a.clone();
    while n % 2 == 0 {
        n /= 2;
        let am8 = a.mod_floor(&BigInt::from(8)).to_i64().unwrap();
        match am8 {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    if n == 1 {
        return result;
    }
    // Jacobi symbol (a / n) for odd n
    let mut a = a.mod_floor(&BigInt::from(n)).to_u64().unwrap();
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// `ζ(2k)` as `c · π^(2k)`.
fn zeta_even(k: u64, b: &[Rat]) -> Transcendental {
    let m = 2 * k;
    let sign = if k % 2 == 1 { 1 } else { -1 };
    let c = r(sign) * &b[m as usize] * Rat::from_integer(BigInt::one() << m as usize) / Rat::from_integer(factorial(m) * 2);
    Transcendental { c, pi4: 4 * m as i64, s2: 0 }
}

/// `Γ(j/2)`.
fn gamma_half(j: u64) -> Transcendental {
    if j % 2 == 0 {
        Transcendental::rational(Rat::from_integer(factorial(j / 2 - 1)))
    } else {
        let m = (j - 1) / 2;
        let c = Rat::new(factorial(2 * m), (BigInt::one() << (2 * m) as usize) * factorial(m));
        Transcendental { c, pi4: 2, s2: 0 }
    }
}

/// Squarefree part of a nonzero integer.
fn squarefree_part(d: &BigInt) -> Result<BigInt> {
    let mut m = d.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
        if p > BigInt::from(1_000_000) {
            return Err(Error::Unsupported("determinant too large to factor".into()));
        }
    }
    out *= m;
    Ok(if d.is_negative() { -out } else { out })
}

/// `ζ_D(s) = Π_p (1 − (D/p) p^(−s))^(−1)` for `s` of the same parity as the character.
fn zeta_d(s: u64, d: &BigInt, b: &[Rat]) -> Result<Transcendental> {
    let m = squarefree_part(d)?;
    let m4 = m.mod_floor(&BigInt::from(4)).to_i64().unwrap();
    let d0 = if m4 == 1 { m.clone() } else { &m * 4 };
    let f = d0.abs().to_u64().ok_or(Error::Unsupported("conductor too large".into()))?;
    let odd = d0.is_negative();
    if (s % 2 == 1) != odd {
        return Err(Error::Unsupported("L-value at a point of the wrong parity".into()));
    }
    let mut l = if f == 1 {
        zeta_even(s / 2, b)
    } else {
        // generalized Bernoulli number B_{s,χ}
        let mut bchi = Rat::zero();
        for a in 1..=f {
            let chi = kronecker(&d0, a);
            if chi != 0 {
                bchi += r(chi) * bernoulli_poly(s as usize, &Rat::new(BigInt::from(a), BigInt::from(f)), b);
            }
        }
        bchi *= Rat::from_integer(BigInt::from(f).pow((s - 1) as u32));
        let delta = if odd { 1 } else { 0 };
        let sign = if ((s - delta) / 2) % 2 == 0 { -1 } else { 1 };
        // √f: f = 4·(odd square-free) or square-free
        let (sq_rat, s2) = sqrt_of(f)?;
        let c = r(sign) * sq_rat / r(2) * Rat::from_integer(BigInt::one() << s as usize)
            / Rat::from_integer(BigInt::from(f).pow(s as u32))
            * bchi
            / Rat::from_integer(factorial(s));
        Transcendental { c, pi4: 4 * s as i64, s2 }
    };
    // Euler factors at primes dividing D but not the conductor
    let dd = d.abs();
    let mut p = 2u64;
    let mut rest = dd.clone();
    while rest > BigInt::one() {
        if (&rest % p).is_zero() {
            while (&rest % p).is_zero() {
                rest /= p;
            }
            if f % p != 0 {
                let chi = kronecker(&d0, p);
                let factor = Rat::one() - r(chi) / Rat::from_integer(BigInt::from(p).pow(s as u32));
                l.c *= factor;
            }
        }
        p += 1;
        if p > 1_000_000 {
            return Err(Error::Unsupported("determinant too large to factor".into()));
        }
    }
    Ok(l)
}

/// `√f` as `rational · √2^s2` for `f ∈ {4, 8}` or more generally `f = 2^a · k²`.
fn sqrt_of(f: u64) -> Result<(Rat, i64)> {
    let a = f.trailing_zeros() as i64;
    let k = f >> a;
    let kr = (k as f64).sqrt().round() as u64;
    if kr * kr != k {
        return Err(Error::Unsupported("conductor with odd prime factors".into()));
    }
    Ok((r(kr as i64), a))
}

/// A Jordan constituent `2^scale · f` of the 2-adic completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanConstituent {
    pub scale: i64,
    pub dim: usize,
    /// Unit part of the determinant modulo 8 (odd).
    pub det_unit: u8,
    pub odd: bool,
    /// Oddity modulo 8 (0 for even constituents).
    pub oddity: u8,
}

impl JordanConstituent {
    /// `+1` when the unit determinant is `±1 mod 8`, else `−1`.
    pub fn epsilon(&self) -> i64 {
        if matches!(self.det_unit, 1 | 7) {
            1
        } else {
            -1
        }
    }
}

fn val2(x: &Rat) -> i64 {
    assert!(!x.is_zero());
    let n = x.numer().abs();
    let d = x.denom().abs();
    n.trailing_zeros().unwrap() as i64 - d.trailing_zeros().unwrap() as i64
}

fn unit_mod8(x: &Rat, v: i64) -> u8 {
    let y = x / pow2(v);
    let m = BigInt::from(8);
    let n = y.numer().mod_floor(&m).to_u64().unwrap();
    let d = y.denom().mod_floor(&m).to_u64().unwrap();
    // odd d is its own inverse modulo 8
    ((n * d) % 8) as u8
}

/// 2-adic Jordan decomposition by elimination over `Z_(2)`.
pub fn jordan_2adic(gram: &RatMatrix) -> Vec<JordanConstituent> {
    let mut m = gram.clone();
    let mut idx: Vec<usize> = (0..m.rows()).collect();
    let mut pieces: Vec<(i64, usize, u8, bool, u8)> = Vec::new();
    while !idx.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a..] {
                if m[(i, j)].is_zero() {
                    continue;
                }
                let v = val2(&m[(i, j)]);
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => v < bv || (v == bv && bi != bj && i == j),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, i, j) = best.expect("nondegenerate form");
        let block: Vec<usize> = if i == j { vec![i] } else { vec![i, j] };
        let rest: Vec<usize> = idx.iter().copied().filter(|k| !block.contains(k)).collect();
        // Schur complement
        let bm = RatMatrix::from_rows(
            block.iter().map(|&a| block.iter().map(|&b| m[(a, b)].clone()).collect()).collect(),
            block.len(),
        );
        let binv = bm.inverse().expect("pivot block is invertible");
        let mut updates = Vec::new();
        for &k in &rest {
            for &l in &rest {
                let mut s = Rat::zero();
                for (x, &a) in block.iter().enumerate() {
                    for (y, &b) in block.iter().enumerate() {
                        s += &m[(k, a)] * &binv[(x, y)] * &m[(b, l)];
                    }
                }
                updates.push((k, l, &m[(k, l)] - s));
            }
        }
        for (k, l, val) in updates {
            m[(k, l)] = val;
        }
        if block.len() == 1 {
            let u = unit_mod8(&m[(i, i)], v);
            pieces.push((v, 1, u, true, u));
        } else {
            let det = &m[(i, i)] * &m[(j, j)] - &m[(i, j)] * &m[(i, j)];
            let u = unit_mod8(&det, 2 * v);
            pieces.push((v, 2, u, false, 0));
        }
        idx = rest;
    }
    pieces.sort_by_key(|p| p.0);
    let mut out: Vec<JordanConstituent> = Vec::new();
    for (v, dim, u, odd, o) in pieces {
        match out.last_mut() {
            Some(c) if c.scale == v => {
                c.dim += dim;
                c.det_unit = ((c.det_unit as u32 * u as u32) % 8) as u8;
                c.odd |= odd;
                c.oddity = (c.oddity + o) % 8;
            }
            _ => out.push(JordanConstituent { scale: v, dim, det_unit: u, odd, oddity: o }),
        }
    }
    out
}

/// Invariants fixing the genus of an even definite lattice with 2-power determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusDescriptor {
    pub signature: Signature,
    pub even: bool,
    #[serde(with = "crate::serial::int_str")]
    pub det: BigInt,
    /// `(rank, even type, signature mod 8)` of the discriminant form when it is 2-elementary.
    pub discriminant: Option<(usize, bool, u8)>,
    pub jordan2: Vec<JordanConstituent>,
}

impl GenusDescriptor {
    pub fn of(l: &Lattice) -> Result<Self> {
        let discriminant = match discriminant_form(l) {
            Ok(q) => Some(q.invariants()?),
            Err(Error::Unsupported(_)) | Err(Error::NotEven) => None,
            Err(e) => return Err(e),
        };
        Ok(GenusDescriptor {
            signature: l.signature(),
            even: l.is_even(),
            det: l.det(),
            discriminant,
            jordan2: jordan_2adic(&l.gram().to_rat()),
        })
    }

    pub fn rank(&self) -> usize {
        self.signature.rank()
    }
}

/// Membership test: signature, parity, determinant and discriminant form agree.
pub fn genus_member_check(l: &Lattice, g: &GenusDescriptor) -> bool {
    if l.rank() != g.rank() || l.is_even() != g.even || l.det() != g.det || l.signature() != g.signature {
        return false;
    }
    match (discriminant_form(l), &g.discriminant) {
        (Ok(q), Some(inv)) => q.invariants().map(|i| &i == inv).unwrap_or(false),
        _ => false,
    }
}

fn m_p_species(species: i64, p: u64) -> Rat {
    if species == 0 {
        return Rat::one();
    }
    let n = species.unsigned_abs();
    let s = (n + 1) / 2;
    let pr = |e: u64| Rat::new(BigInt::one(), BigInt::from(p).pow(e as u32));
    let mut mp = r(2);
    for k in 1..s {
        mp *= Rat::one() - pr(2 * k);
    }
    if n % 2 == 0 {
        mp *= Rat::one() - r(species.signum()) * pr(s);
    }
    Rat::one() / mp
}

fn species_2adic(jordan: &[JordanConstituent]) -> Vec<i64> {
    if jordan.is_empty() {
        return Vec::new();
    }
    let lo = jordan.first().unwrap().scale;
    let hi = jordan.last().unwrap().scale;
    let get = |s: i64| jordan.iter().find(|c| c.scale == s);
    let mut out = Vec::new();
    for s in (lo - 1)..=(hi + 1) {
        let odd_at = |t: i64| get(t).map_or(false, |c| c.odd);
        let free = !odd_at(s - 1) && !odd_at(s + 1);
        let (n, odd, mut o, eps) = match get(s) {
            Some(c) => (c.dim as i64, c.odd, c.oddity as i64, c.epsilon()),
            None => (0, false, 0, 1),
        };
        if eps == -1 {
            o = (o + 4) % 8;
        }
        let t = if !odd || n % 2 == 1 { n / 2 } else { n / 2 - 1 };
        let species = if free && matches!(o, 0 | 1 | 7) {
            2 * t
        } else if free && matches!(o, 3 | 4 | 5) {
            -2 * t
        } else {
            2 * t + 1
        };
        out.push(species);
    }
    out
}

/// Exact mass of the genus of a definite lattice with 2-power determinant.
pub fn genus_mass(g: &GenusDescriptor) -> Result<Rat> {
    let n = g.rank() as u64;
    if g.signature.positive != 0 && g.signature.negative != 0 {
        return Err(Error::Unsupported("mass is defined for definite genera only".into()));
    }
    if !g.even {
        return Err(Error::Unsupported("mass formula implemented for even genera only".into()));
    }
    let absdet = g.det.abs();
    let odd_part = &absdet >> absdet.trailing_zeros().unwrap_or(0) as usize;
    if !odd_part.is_one() {
        return Err(Error::Unsupported("determinant has odd prime factors".into()));
    }
    if n == 1 {
        return Ok(Rat::new(BigInt::one(), BigInt::from(2)));
    }
    let s = if n % 2 == 1 { (n + 1) / 2 } else { n / 2 };
    let b = bernoulli(2 * s as usize + 2);
    // standard mass
    let mut std = Transcendental::rational(r(2));
    std.pi4 -= (n * (n + 1)) as i64;
    for j in 1..=n {
        std = std.mul(&gamma_half(j));
    }
    for k in 1..s {
        std = std.mul(&zeta_even(k, &b));
    }
    let d_big = if s % 2 == 0 { g.det.clone() } else { -g.det.clone() };
    if n % 2 == 0 {
        std = std.mul(&zeta_d(s, &d_big, &b)?);
    }
    let std = std.into_rational()?;

    // local factor at 2
    let jordan = &g.jordan2;
    let mut m2 = Transcendental::rational(Rat::one());
    for sp in species_2adic(jordan) {
        m2.c *= m_p_species(sp, 2);
    }
    let mut cross2 = 0i64; // exponent of √2
    for (a, ca) in jordan.iter().enumerate() {
        for cb in &jordan[a + 1..] {
            cross2 += (cb.scale - ca.scale) * (ca.dim * cb.dim) as i64;
        }
    }
    m2.s2 += cross2;
    let n_ii: i64 = jordan.iter().filter(|c| !c.odd).map(|c| c.dim as i64).sum();
    let n_i_i = jordan.windows(2).filter(|w| w[1].scale == w[0].scale + 1 && w[0].odd && w[1].odd).count() as i64;
    m2.c *= pow2(n_i_i - n_ii);
    let m2 = m2.into_rational()?;

    let mut std2 = r(2);
    for k in 1..s {
        std2 *= Rat::one() - pow2(-2 * k as i64);
    }
    if n % 2 == 0 {
        let chi = kronecker(&d_big, 2);
        std2 *= Rat::one() - r(chi) * pow2(-(s as i64));
    }
    let std2 = Rat::one() / std2;
    Ok(std * m2 / std2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn mass_of(l: &Lattice) -> Rat {
        genus_mass(&GenusDescriptor::of(l).unwrap()).unwrap()
    }

    #[test]
    fn zeta_values() {
        let b = bernoulli(10);
        let z2 = zeta_even(1, &b);
        assert_eq!(z2.c, Rat::new(1.into(), 6.into()));
        let z4 = zeta_even(2, &b);
        assert_eq!(z4.c, Rat::new(1.into(), 90.into()));
        // L(1, χ_-4) = π/4
        let l = zeta_d(1, &BigInt::from(-4), &b).unwrap();
        assert_eq!(l.pi4, 4);
        assert_eq!(l.c * pow2(l.s2 / 2), Rat::new(1.into(), 4.into()));
        assert_eq!(kronecker(&BigInt::from(-1), 2), 1);
        assert_eq!(kronecker(&BigInt::from(3), 2), -1);
        assert_eq!(kronecker(&BigInt::from(2), 7), 1);
    }

    #[test]
    fn known_masses() {
        assert_eq!(mass_of(&catalog::e8()), Rat::new(1.into(), 696729600.into()));
        let e8e8 = catalog::e8().direct_sum(&catalog::e8());
        assert_eq!(mass_of(&e8e8), Rat::new(691.into(), "277667181515243520000".parse().unwrap()));
        assert_eq!(mass_of(&catalog::d(4)), Rat::new(1.into(), 1152.into()));
        assert_eq!(mass_of(&catalog::e(7)), Rat::new(1.into(), 2903040.into()));
        assert_eq!(mass_of(&catalog::a(1)), Rat::new(1.into(), 2.into()));
        assert_eq!(mass_of(&catalog::a(1).direct_sum(&catalog::a(1))), Rat::new(1.into(), 8.into()));
    }

    #[test]
    fn seed_genus_mass() {
        let seed = catalog::d(8).direct_sum(&catalog::e8().rescale(2).unwrap());
        let expected = Rat::new(64150367.into(), "28766348771328000".parse().unwrap());
        assert_eq!(mass_of(&seed), expected);
    }

    #[test]
    fn rejects_odd_determinants() {
        let g = GenusDescriptor::of(&catalog::a(2)).unwrap();
        assert!(matches!(genus_mass(&g), Err(Error::Unsupported(_))));
    }
}

//! Permutations on `0..n` and the Schreier–Sims algorithm for group orders.
//!
//! Permutations act on the right: `x^(ab) = (x^a)^b`.

use num_bigint::BigInt;
use num_traits::One;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }
}

struct Level {
    base: usize,
    gens: Vec<Perm>,
    /// `transversal[β]` maps the base point to `β`.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<usize>,
    /// Schreier generators `(orbit index, generator index)` already verified.
    checked: std::collections::HashSet<(usize, usize)>,
}

impl Level {
    fn new(base: usize, n: usize) -> Self {
        let mut transversal = vec![None; n];
        transversal[base] = Some(Perm::identity(n));
        Level { base, gens: Vec::new(), transversal, orbit: vec![base], checked: Default::default() }
    }

    /// Extends the orbit after generators were added, keeping existing transversal entries.
    fn extend_orbit(&mut self) {
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i];
            for s in &self.gens {
                let gamma = s.image(beta);
                if self.transversal[gamma].is_none() {
                    let u = self.transversal[beta].as_ref().unwrap().then(s);
                    self.transversal[gamma] = Some(u);
                    self.orbit.push(gamma);
                }
            }
            i += 1;
        }
    }
}

/// A base and strong generating set.
pub struct StabilizerChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(n: usize, gens: &[Perm]) -> Self {
        let mut chain = StabilizerChain { n, levels: Vec::new() };
        for g in gens {
            assert_eq!(g.degree(), n, "generator degree mismatch");
            if g.is_identity() {
                continue;
            }
            let (h, j) = chain.strip(g, 0);
            if !h.is_identity() {
                chain.add_strong_generator(h, 0, j);
            }
        }
        chain.complete();
        chain
    }

    /// Sifts `g` through levels starting at `from`; returns the residue and the level reached.
    fn strip(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for j in from..self.levels.len() {
            let lvl = &self.levels[j];
            let beta = h.image(lvl.base);
            match &lvl.transversal[beta] {
                None => return (h, j),
                Some(u) => h = h.then(&u.inverse()),
            }
        }
        (h, self.levels.len())
    }

    /// Adds `h` (which fixes the base points of levels `< lo`) to levels `lo..=hi`.
    fn add_strong_generator(&mut self, h: Perm, lo: usize, hi: usize) {
        if hi == self.levels.len() {
            let b = (0..self.n).find(|&x| h.image(x) != x).expect("nonidentity");
            self.levels.push(Level::new(b, self.n));
        }
        for l in lo..=hi {
            self.levels[l].gens.push(h.clone());
            self.levels[l].extend_orbit();
        }
    }

    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() - 1;
        loop {
            let mut added = None;
            'scan: for oi in 0..self.levels[i].orbit.len() {
                for si in 0..self.levels[i].gens.len() {
                    if self.levels[i].checked.contains(&(oi, si)) {
                        continue;
                    }
                    let lvl = &self.levels[i];
                    let beta = lvl.orbit[oi];
                    let s = &lvl.gens[si];
                    let gamma = s.image(beta);
                    let g = lvl.transversal[beta]
                        .as_ref()
                        .unwrap()
                        .then(s)
                        .then(&lvl.transversal[gamma].as_ref().unwrap().inverse());
                    let (h, j) = self.strip(&g, i + 1);
                    self.levels[i].checked.insert((oi, si));
                    if !h.is_identity() {
                        added = Some((h, j));
                        break 'scan;
                    }
                }
            }
            match added {
                Some((h, j)) => {
                    self.add_strong_generator(h, i + 1, j);
                    i = j.min(self.levels.len() - 1);
                }
                None => {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                }
            }
        }
    }

    pub fn order(&self) -> BigInt {
        self.levels.iter().fold(BigInt::one(), |acc, l| acc * BigInt::from(l.orbit.len()))
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (h, _) = self.strip(g, 0);
        h.is_identity()
    }
}

/// Order of the group generated by `gens` acting on `0..n`.
pub fn group_order(n: usize, gens: &[Perm]) -> BigInt {
    StabilizerChain::new(n, gens).order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn closure(n: usize, gens: &[Perm]) -> usize {
        let mut seen: HashSet<Perm> = HashSet::new();
        let mut queue = vec![Perm::identity(n)];
        seen.insert(Perm::identity(n));
        while let Some(p) = queue.pop() {
            for g in gens {
                let q = p.then(g);
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        seen.len()
    }

    fn cycle(n: usize) -> Perm {
        Perm((0..n as u32).map(|i| (i + 1) % n as u32).collect())
    }

    fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut p = Perm::identity(n);
        p.0.swap(a, b);
        p
    }

    #[test]
    fn symmetric_and_cyclic_groups() {
        assert_eq!(group_order(6, &[cycle(6), transposition(6, 0, 1)]), BigInt::from(720));
        assert_eq!(group_order(7, &[cycle(7)]), BigInt::from(7));
        assert_eq!(group_order(5, &[]), BigInt::from(1));
        assert_eq!(group_order(4, &[transposition(4, 2, 3)]), BigInt::from(2));
    }

    #[test]
    fn agrees_with_closure_on_small_groups() {
        // dihedral and a product action
        let n = 8;
        let r = cycle(n);
        let s = Perm((0..n as u32).map(|i| (n as u32 - i) % n as u32).collect());
        assert_eq!(group_order(n, &[r.clone(), s.clone()]), BigInt::from(closure(n, &[r, s])));
        let a = Perm(vec![1, 2, 0, 3, 4, 5, 6]);
        let b = Perm(vec![0, 1, 2, 4, 5, 6, 3]);
        let c = Perm(vec![3, 4, 2, 0, 1, 5, 6]);
        let gens = [a, b, c];
        assert_eq!(group_order(7, &gens), BigInt::from(closure(7, &gens)));
    }
}

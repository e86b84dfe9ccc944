//! Root systems of definite lattices: simple systems and ADE types.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::gram::PosGram;

/// An ADE type as a sorted multiset of irreducible components, e.g. `A1^4+D6`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootSystemType {
    /// `(letter, rank)` pairs sorted by letter then rank.
    pub components: Vec<(char, usize)>,
}

impl RootSystemType {
    pub fn empty() -> Self {
        RootSystemType { components: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.1).sum()
    }

    /// Number of roots (both signs).
    pub fn num_roots(&self) -> usize {
        self.components.iter().map(|&(t, n)| component_roots(t, n)).sum()
    }

    /// Order of the Weyl group.
    pub fn weyl_order(&self) -> num_bigint::BigInt {
        let fact = |k: usize| (1..=k).fold(num_bigint::BigInt::from(1), |a, i| a * i);
        self.components
            .iter()
            .map(|&(t, n)| match t {
                'A' => fact(n + 1),
                'D' => fact(n) * (num_bigint::BigInt::from(1) << (n - 1)),
                'E' => num_bigint::BigInt::from(match n {
                    6 => 51840u64,
                    7 => 2903040,
                    _ => 696729600,
                }),
                _ => unreachable!(),
            })
            .fold(num_bigint::BigInt::from(1), |a, b| a * b)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Some(Self::empty());
        }
        let mut comps = Vec::new();
        for part in s.split('+') {
            let (base, mult) = match part.split_once('^') {
                Some((b, m)) => (b, m.parse::<usize>().ok()?),
                None => (part, 1),
            };
            let letter = base.chars().next()?;
            let rank: usize = base[1..].parse().ok()?;
            if !matches!(letter, 'A' | 'D' | 'E') || rank == 0 {
                return None;
            }
            for _ in 0..mult {
                comps.push((letter, rank));
            }
        }
        comps.sort();
        Some(RootSystemType { components: comps })
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.components.len() {
            let c = self.components[i];
            let mut j = i;
            while j < self.components.len() && self.components[j] == c {
                j += 1;
            }
            if j - i > 1 {
                parts.push(format!("{}{}^{}", c.0, c.1, j - i));
            } else {
                parts.push(format!("{}{}", c.0, c.1));
            }
            i = j;
        }
        write!(f, "{}", parts.join("+"))
    }
}

fn component_roots(t: char, n: usize) -> usize {
    match t {
        'A' => n * (n + 1),
        'D' => 2 * n * (n - 1),
        'E' => match n {
            6 => 72,
            7 => 126,
            _ => 240,
        },
        _ => 0,
    }
}

fn identify(rank: usize, roots: usize) -> Option<(char, usize)> {
    if roots == rank * (rank + 1) {
        return Some(('A', rank));
    }
    if rank >= 4 && roots == 2 * rank * (rank - 1) {
        return Some(('D', rank));
    }
    match (rank, roots) {
        (6, 72) => Some(('E', 6)),
        (7, 126) => Some(('E', 7)),
        (8, 240) => Some(('E', 8)),
        _ => None,
    }
}

/// A linear functional `x ↦ Σ c_i x_i` that does not vanish on any of `vectors`.
pub fn generic_functional(vectors: &[Vec<i64>]) -> Vec<i64> {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    loop {
        let c: Vec<i64> = (0..n)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % 1_000_003) as i64 + 1
            })
            .collect();
        if vectors.iter().all(|v| v.iter().zip(&c).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() != 0) {
            return c;
        }
    }
}

fn eval(c: &[i64], v: &[i64]) -> i128 {
    v.iter().zip(c).map(|(&a, &b)| a as i128 * b as i128).sum()
}

/// Positive roots (with respect to `functional`) that are not sums of two positive roots.
pub fn simple_roots(roots: &[Vec<i64>], functional: &[i64]) -> Vec<Vec<i64>> {
    let positive: Vec<Vec<i64>> = roots
        .iter()
        .map(|r| if eval(functional, r) > 0 { r.clone() } else { r.iter().map(|x| -x).collect() })
        .collect();
    let set: HashSet<&Vec<i64>> = positive.iter().collect();
    let mut decomposable = HashSet::new();
    for i in 0..positive.len() {
        for j in i + 1..positive.len() {
            let s: Vec<i64> = positive[i].iter().zip(&positive[j]).map(|(a, b)| a + b).collect();
            if set.contains(&s) {
                decomposable.insert(s);
            }
        }
    }
    let mut simple: Vec<Vec<i64>> = positive.into_iter().filter(|r| !decomposable.contains(r)).collect();
    simple.sort();
    simple
}

/// ADE type of the root system given by `roots` (one per `±` pair) in a positive-definite
/// lattice where roots have norm 2.
pub fn classify(g: &PosGram, roots: &[Vec<i64>]) -> RootSystemType {
    if roots.is_empty() {
        return RootSystemType::empty();
    }
    // connected components of the non-orthogonality graph
    let m = roots.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let rg: Vec<Vec<i64>> = roots.iter().map(|r| g.row_times(r).expect("small root coordinates")).collect();
    for i in 0..m {
        for j in i + 1..m {
            let ip: i64 = rg[i].iter().zip(&roots[j]).map(|(a, b)| a * b).sum();
            if ip != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut comps: HashMap<usize, Vec<Vec<i64>>> = HashMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(roots[i].clone());
    }
    let mut out = Vec::new();
    for (_, comp) in comps {
        let f = generic_functional(&comp);
        let rank = simple_roots(&comp, &f).len();
        let t = identify(rank, 2 * comp.len()).expect("root systems of definite lattices are ADE");
        out.push(t);
    }
    out.sort();
    RootSystemType { components: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_strings_roundtrip() {
        let t = RootSystemType::parse("A1^4+D6").unwrap();
        assert_eq!(t.to_string(), "A1^4+D6");
        assert_eq!(t.rank(), 10);
        assert_eq!(t.num_roots(), 8 + 60);
        assert_eq!(RootSystemType::parse("0").unwrap(), RootSystemType::empty());
        assert_eq!(RootSystemType::parse("E8").unwrap().weyl_order(), 696729600u64.into());
    }

    #[test]
    fn identify_is_unambiguous() {
        assert_eq!(identify(8, 72), Some(('A', 8)));
        assert_eq!(identify(6, 72), Some(('E', 6)));
        assert_eq!(identify(3, 12), Some(('A', 3)));
        assert_eq!(identify(4, 24), Some(('D', 4)));
    }
}

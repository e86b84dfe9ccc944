//! Small positive-definite Gram matrices with machine integers, LLL reduction on the Gram
//! matrix, and the exact rational LDLᵀ used to seed floating enumeration bounds.

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{IntMatrix, Rat};

/// A positive-definite Gram matrix with `i64` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosGram {
    pub n: usize,
    pub g: Vec<Vec<i64>>,
}

impl PosGram {
    pub fn new(g: Vec<Vec<i64>>) -> Result<Self> {
        let n = g.len();
        if g.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("Gram matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if g[i][j] != g[j][i] {
                    return Err(Error::Invalid("Gram matrix must be symmetric".into()));
                }
            }
        }
        let pg = PosGram { n, g };
        pg.ldl()?;
        Ok(pg)
    }

    /// Positive-definite Gram of a definite lattice (negated when negative definite).
    pub fn from_lattice(l: &Lattice) -> Result<(Self, i64)> {
        let sign = if l.is_negative_definite() {
            -1
        } else if l.is_positive_definite() {
            1
        } else {
            return Err(Error::NotDefinite);
        };
        let g = l.gram().to_i64().ok_or(Error::Overflow("Gram entries exceed i64"))?;
        let g = g.into_iter().map(|r| r.into_iter().map(|x| x * sign).collect()).collect();
        Ok((PosGram::new(g)?, sign))
    }

    pub fn from_int_matrix(m: &IntMatrix) -> Result<Self> {
        PosGram::new(m.to_i64().ok_or(Error::Overflow("Gram entries exceed i64"))?)
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_i64(&self.g)
    }

    pub fn norm(&self, x: &[i64]) -> i128 {
        self.pair(x, x)
    }

    pub fn pair(&self, x: &[i64], y: &[i64]) -> i128 {
        let mut acc: i128 = 0;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            let mut s: i128 = 0;
            for j in 0..self.n {
                s += self.g[i][j] as i128 * y[j] as i128;
            }
            acc += x[i] as i128 * s;
        }
        acc
    }

    /// `x · G` as machine integers.
    pub fn row_times(&self, x: &[i64]) -> Result<Vec<i64>> {
        (0..self.n)
            .map(|j| {
                let s: i128 = (0..self.n).map(|i| x[i] as i128 * self.g[i][j] as i128).sum();
                i64::try_from(s).map_err(|_| Error::Overflow("vector times Gram"))
            })
            .collect()
    }

    /// Exact `G = L D Lᵀ` (unit lower-triangular `L`); errors if not positive definite.
    pub fn ldl(&self) -> Result<(Vec<Vec<Rat>>, Vec<Rat>)> {
        let n = self.n;
        let mut l = vec![vec![Rat::zero(); n]; n];
        let mut d = vec![Rat::zero(); n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = Rat::from_integer(self.g[i][j].into());
                for k in 0..j {
                    s -= &l[i][k] * &l[j][k] * &d[k];
                }
                if i == j {
                    if s <= Rat::zero() {
                        return Err(Error::NotDefinite);
                    }
                    d[i] = s;
                    l[i][i] = Rat::from_integer(1.into());
                } else {
                    l[i][j] = s / &d[j];
                }
            }
        }
        Ok((l, d))
    }

    /// Floating data `(q, d)` with `x G xᵀ = Σ_i d_i (x_i + Σ_{j>i} q_ij x_j)²`, rounded from
    /// the exact decomposition (`q_ij = L_ji`).
    pub fn enumeration_data(&self) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let n = self.n;
        let (l, d) = self.ldl()?;
        let mut q = vec![vec![0f64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                q[i][j] = l[j][i].to_f64().unwrap_or(f64::NAN);
            }
        }
        let df = d.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        Ok((q, df))
    }
}

/// Result of LLL: reduced Gram `T G Tᵀ` and the unimodular `T` (rows are the new basis).
#[derive(Clone, Debug)]
pub struct Reduced {
    pub gram: PosGram,
    pub t: Vec<Vec<i64>>,
}

impl Reduced {
    /// `T⁻¹` as machine integers.
    pub fn t_inverse(&self) -> Result<Vec<Vec<i64>>> {
        let inv = IntMatrix::from_i64(&self.t).inverse_unimodular()?;
        inv.to_i64().ok_or(Error::Overflow("inverse transformation"))
    }
}

/// LLL reduction (δ = 0.99) of a positive-definite Gram matrix with exact integer updates.
pub fn lll(g: &PosGram) -> Result<Reduced> {
    let n = g.n;
    let mut gr: Vec<Vec<i128>> = g.g.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut t: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let mut mu = vec![vec![0f64; n]; n];
    let mut bs = vec![0f64; n];
    let delta = 0.99;
    let limit: i128 = 1 << 100;

    let gso_row = |gr: &Vec<Vec<i128>>, mu: &mut Vec<Vec<f64>>, bs: &mut Vec<f64>, k: usize| {
        for j in 0..k {
            let mut s = gr[k][j] as f64;
            for i in 0..j {
                s -= mu[j][i] * mu[k][i] * bs[i];
            }
            mu[k][j] = s / bs[j];
        }
        let mut s = gr[k][k] as f64;
        for j in 0..k {
            s -= mu[k][j] * mu[k][j] * bs[j];
        }
        bs[k] = s;
    };

    if n == 0 {
        return Ok(Reduced { gram: g.clone(), t: Vec::new() });
    }
    gso_row(&gr, &mut mu, &mut bs, 0);
    let mut k = 1;
    let mut steps: u64 = 0;
    while k < n {
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::Exhausted("LLL did not converge".into()));
        }
        gso_row(&gr, &mut mu, &mut bs, k);
        // size reduction
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q == 0.0 {
                continue;
            }
            let q = q as i128;
            // b_k -= q b_j
            let gkk = gr[k][k] - 2 * q * gr[k][j] + q * q * gr[j][j];
            for i in 0..n {
                if i != k {
                    let v = gr[k][i] - q * gr[j][i];
                    gr[k][i] = v;
                    gr[i][k] = v;
                }
            }
            gr[k][k] = gkk;
            for i in 0..n {
                t[k][i] -= q * t[j][i];
                if t[k][i].abs() > limit {
                    return Err(Error::Overflow("LLL transformation"));
                }
            }
            let qf = q as f64;
            for i in 0..j {
                mu[k][i] -= qf * mu[j][i];
            }
            mu[k][j] -= qf;
        }
        gso_row(&gr, &mut mu, &mut bs, k);
        if bs[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bs[k - 1] {
            gr.swap(k, k - 1);
            for row in gr.iter_mut() {
                row.swap(k, k - 1);
            }
            t.swap(k, k - 1);
            gso_row(&gr, &mut mu, &mut bs, k - 1);
            k = if k > 1 { k - 1 } else { 1 };
        } else {
            k += 1;
        }
    }
    let to64 = |m: Vec<Vec<i128>>| -> Result<Vec<Vec<i64>>> {
        m.into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).map_err(|_| Error::Overflow("LLL output"))).collect())
            .collect()
    };
    let gram = PosGram { n, g: to64(gr)? };
    Ok(Reduced { gram, t: to64(t)? })
}

/// `a · b` for machine-integer matrices with overflow checks.
pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let s: i128 = row.iter().zip(b).map(|(&x, br)| x as i128 * br[j] as i128).sum();
                    i64::try_from(s).map_err(|_| Error::Overflow("matrix product"))
                })
                .collect()
        })
        .collect()
}

/// `x · M` for a row vector.
pub fn vec_mat(x: &[i64], m: &[Vec<i64>]) -> Result<Vec<i64>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| {
            let s: i128 = x.iter().zip(m).map(|(&a, r)| a as i128 * r[j] as i128).sum();
            i64::try_from(s).map_err(|_| Error::Overflow("vector times matrix"))
        })
        .collect()
}

/// `T G Tᵀ` for machine-integer matrices.
pub fn congruence(g: &[Vec<i64>], t: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let tg = mat_mul(t, g)?;
    let tt: Vec<Vec<i64>> = (0..t.first().map_or(0, |r| r.len())).map(|j| t.iter().map(|r| r[j]).collect()).collect();
    mat_mul(&tg, &tt)
}

pub fn to_i64_vec(v: &[crate::matrix::Int]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow("vector entry exceeds i64"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lll_preserves_the_lattice() {
        let g = PosGram::new(vec![vec![10, 7, 3], vec![7, 6, 2], vec![3, 2, 5]]).unwrap();
        let r = lll(&g).unwrap();
        assert_eq!(congruence(&g.g, &r.t).unwrap(), r.gram.g);
        let det = IntMatrix::from_i64(&r.t).det();
        assert!(det == 1.into() || det == (-1).into());
        assert!(r.gram.g[0][0] <= 5);
    }

    #[test]
    fn ldl_rejects_indefinite() {
        assert!(PosGram::new(vec![vec![0, 1], vec![1, 0]]).is_err());
        let g = PosGram::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let (q, d) = g.enumeration_data().unwrap();
        // x G xᵀ for x = (1, 1) is 6
        let x = [1.0f64, 1.0];
        let mut s = 0.0;
        for i in 0..2 {
            let mut y = x[i];
            for j in i + 1..2 {
                y += q[i][j] * x[j];
            }
            s += d[i] * y * y;
        }
        assert!((s - 6.0).abs() < 1e-9);
    }
}

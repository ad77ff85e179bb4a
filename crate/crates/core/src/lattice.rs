//! Exact LLL reduction over the integers (all-integer variant: Gram–Schmidt
//! data is carried as the integers `d_i` and `λ_{ij}` so no rational or
//! floating arithmetic is needed).
//!
//! Reduction parameter is fixed at the canonical `δ = 3/4`.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntVector = Vec<BigInt>;

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to `num / den` for `den > 0`, ties toward +∞.
fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (num * &two + den).div_floor(&(den * two))
}

struct Reducer {
    basis: Vec<IntVector>,
    d: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
}

impl Reducer {
    // Indices follow the 1-based textbook layout: d[0] = 1, d[i] for row i-1.
    fn red(&mut self, k: usize, l: usize) {
        let dl = self.d[l + 1].clone();
        let two_lambda = (&self.lambda[k][l] * BigInt::from(2)).abs();
        if two_lambda <= dl {
            return;
        }
        let q = round_div(&self.lambda[k][l], &dl);
        let row_l = self.basis[l].clone();
        for (x, y) in self.basis[k].iter_mut().zip(&row_l) {
            *x -= &q * y;
        }
        self.lambda[k][l] -= &q * &dl;
        for i in 0..l {
            let t = &q * &self.lambda[l][i];
            self.lambda[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.basis.swap(k, k - 1);
        for j in 0..k.saturating_sub(1) {
            let tmp = self.lambda[k][j].clone();
            self.lambda[k][j] = self.lambda[k - 1][j].clone();
            self.lambda[k - 1][j] = tmp;
        }
        let lam = self.lambda[k][k - 1].clone();
        let b = (&self.d[k - 1] * &self.d[k + 1] + &lam * &lam) / &self.d[k];
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            self.lambda[i][k] = (&self.d[k + 1] * &self.lambda[i][k - 1] - &lam * &t) / &self.d[k];
            self.lambda[i][k - 1] = (&b * &t + &lam * &self.lambda[i][k]) / &self.d[k + 1];
        }
        self.d[k] = b;
    }
}

/// LLL-reduces the rows of `basis` (linearly independent) with `δ = 3/4`.
pub fn lll_reduce(basis: &[IntVector]) -> Result<Vec<IntVector>> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut r = Reducer {
        basis: basis.to_vec(),
        d: vec![BigInt::zero(); n + 1],
        lambda: vec![vec![BigInt::zero(); n]; n],
    };
    r.d[0] = BigInt::one();
    r.d[1] = dot(&r.basis[0], &r.basis[0]);
    if r.d[1].is_zero() {
        return Err(Error::DependentLattice);
    }
    if n == 1 {
        return Ok(r.basis);
    }
    let mut k = 1;
    let mut kmax = 0;
    loop {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&r.basis[k], &r.basis[j]);
                for i in 0..j {
                    u = (&r.d[i + 1] * &u - &r.lambda[k][i] * &r.lambda[j][i]) / &r.d[i];
                }
                if j < k {
                    r.lambda[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::DependentLattice);
                    }
                    r.d[k + 1] = u;
                }
            }
        }
        r.red(k, k - 1);
        // Lovász: 4 d_k d_{k-2} < 3 d_{k-1}^2 - 4 λ_{k,k-1}^2 triggers a swap.
        let lhs = BigInt::from(4) * &r.d[k + 1] * &r.d[k - 1];
        let rhs = BigInt::from(3) * &r.d[k] * &r.d[k] - BigInt::from(4) * &r.lambda[k][k - 1] * &r.lambda[k][k - 1];
        if lhs < rhs {
            r.swap(k, kmax);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                r.red(k, l);
            }
            k += 1;
            if k == n {
                return Ok(r.basis);
            }
        }
    }
}

/// Squared Euclidean norm.
pub fn norm_sq(v: &[BigInt]) -> BigInt {
    dot(v, v)
}

//! Heuristic integer-relation detection among real numbers given to finite
//! precision.
//!
//! A relation is an integer vector `(c_0, c_1, …, c_n)` of height at most `H`
//! with `|c_0 + Σ c_j x_j| ≤ 2^{-P/2}`. Candidates come from LLL reduction of
//! the lattice spanned by `e_i ⊕ round(2^P x_i)` with `x_0 = 1`.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::angle::BasisDecl;
use crate::error::{Error, Result};
use crate::lattice;
use crate::precision;

pub const DEFAULT_HEIGHT_LIMIT: u64 = 1000;
pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const PRECISION_ENV: &str = "ONESIDED_PRECISION_BITS";

/// Working precision for relation scans, overridable through
/// `ONESIDED_PRECISION_BITS`.
pub fn default_precision_bits() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&b| (16..=4096).contains(&b))
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerRelation {
    /// `(c_0, c_1, …, c_n)`: `c_0 + Σ c_j x_j ≈ 0`.
    pub coeffs: Vec<i64>,
    /// `log2 |c_0 + Σ c_j x_j|` on the given values (`-inf` when exact).
    pub log2_residual: Option<i64>,
}

impl IntegerRelation {
    pub fn height(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// `c_0 + Σ c_j x_j` evaluated exactly.
    pub fn residual(&self, values: &[BigRational]) -> BigRational {
        let mut acc = BigRational::from_integer(self.coeffs[0].into());
        for (c, x) in self.coeffs[1..].iter().zip(values) {
            acc += x * BigRational::from_integer((*c).into());
        }
        acc
    }
}

/// Bits needed so that chance near-relations of height `≤ height` among
/// `count` generic values stay above the acceptance threshold `2^{-P/2}`.
pub fn required_precision_bits(count: usize, height: u64) -> u32 {
    let n = count as f64;
    let h = height.max(1) as f64;
    let half = (n + 1.0) * (2.0 * h + 1.0).log2() - (n * h + 1.0).log2() + 4.0;
    (2.0 * half.max(1.0)).ceil() as u32
}

/// Largest height limit that `bits` of precision supports for `count` values.
pub fn max_feasible_height(count: usize, bits: u32) -> u64 {
    let (mut lo, mut hi) = (0u64, 1u64 << 40);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if required_precision_bits(count, mid) <= bits {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// `numeric_relation_scan`: integer relations among `1, x_1, …, x_n`.
pub fn numeric_relation_scan(values: &[BigRational], height_limit: u64, precision_bits: u32) -> Result<Vec<IntegerRelation>> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let required = required_precision_bits(values.len(), height_limit);
    if required > precision_bits {
        return Err(Error::InsufficientPrecision {
            available: precision_bits,
            required,
            height: height_limit,
            count: values.len(),
        });
    }
    let dim = values.len() + 1;
    let mut rows: Vec<lattice::IntVector> = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut row = vec![BigInt::zero(); dim + 1];
        row[i] = BigInt::one();
        row[dim] = if i == 0 {
            BigInt::one() << precision_bits as usize
        } else {
            precision::scaled_round(&values[i - 1], precision_bits)
        };
        rows.push(row);
    }
    let reduced = lattice::lll_reduce(&rows)?;
    let threshold_bits = precision_bits / 2;
    let mut found: Vec<IntegerRelation> = Vec::new();
    for row in reduced {
        let coeffs: Option<Vec<i64>> = row[..dim].iter().map(|c| c.to_i64()).collect();
        let Some(mut coeffs) = coeffs else { continue };
        if coeffs[1..].iter().all(|c| *c == 0) {
            continue;
        }
        if coeffs.iter().any(|c| c.unsigned_abs() > height_limit) {
            continue;
        }
        if coeffs[1..].iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
            coeffs.iter_mut().for_each(|c| *c = -*c);
        }
        let mut rel = IntegerRelation { coeffs, log2_residual: None };
        let residual = rel.residual(values);
        if !precision::below_pow2(&residual, threshold_bits) {
            continue;
        }
        if !residual.is_zero() {
            rel.log2_residual = Some(precision::log2_abs(&residual).floor() as i64);
        }
        if !found.iter().any(|r| r.coeffs == rel.coeffs) {
            found.push(rel);
        }
    }
    Ok(found)
}

/// Scans `{1, β_1, …, β_d}` of a declared basis at the largest height its
/// precision supports (capped at the default).
pub fn basis_relation_scan(basis: &BasisDecl) -> Result<Vec<IntegerRelation>> {
    let bits = basis.precision_bits().min(default_precision_bits());
    let height = max_feasible_height(basis.len(), bits).min(DEFAULT_HEIGHT_LIMIT);
    if height < 2 {
        return Err(Error::InsufficientPrecision {
            available: bits,
            required: required_precision_bits(basis.len(), 2),
            height: 2,
            count: basis.len(),
        });
    }
    numeric_relation_scan(basis.values(), height, bits)
}

/// Continued-fraction recognition: `p/q` with `q ≤ max_den` and
/// `|x - p/q| ≤ 2^{-tol_bits}`, choosing the smallest such `q`.
pub fn recognize_rational(x: &BigRational, max_den: u64, tol_bits: u32) -> Option<(BigInt, u64)> {
    let mut rest = x.clone();
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (rest.floor().to_integer(), BigInt::one());
    loop {
        let q = q1.to_u64()?;
        if q > max_den {
            return None;
        }
        let approx = BigRational::new(p1.clone(), q1.clone());
        if precision::below_pow2(&(x - &approx), tol_bits) {
            return Some((p1, q));
        }
        let frac = &rest - rest.floor();
        if frac.is_zero() {
            return None;
        }
        rest = frac.recip();
        let a = rest.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        if q1.is_negative() {
            return None;
        }
    }
}

//! Kronecker witnesses: an integer `k` with `|φ_i - β_i k - m_i| < τ` for
//! every generator `β_i` and target `φ_i`.
//!
//! Candidates come from a direct scan of `k = T, 2T, …` (smallest first) and,
//! failing that, from LLL on the inhomogeneous simultaneous-approximation
//! lattice. Every reported witness is re-checked in exact rational arithmetic.

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::{Angle, BasisDecl};
use crate::error::{Error, Result};
use crate::lattice;
use crate::precision::{self, DoubleDouble, MAX_PHASE_INDEX};

const SCAN_BLOCK: u64 = 1 << 16;
const LATTICE_GUARD_BITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    ExactHit,
    Scan,
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub k: i64,
    /// `m_i = round(φ_i - β_i k)` per generator.
    pub m: Vec<i64>,
    /// `k_j = Σ_i λ_{ij} m_i` per angle.
    pub k_corrections: Vec<i64>,
    /// `max_j |Σ_i λ_{ij} (φ_i - β_i k - m_i)|`.
    pub delta_achieved: f64,
    pub delta_requested: f64,
    /// `max_i |φ_i - β_i k - m_i|`.
    pub generator_error: f64,
    #[serde(rename = "Lambda")]
    pub lambda_max: i64,
    pub torsion: i64,
    pub method: WitnessMethod,
    pub effort_used: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_at_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_to_ct: Option<f64>,
}

/// Integer-coefficient expression `α_j = Σ_i λ_{ij} β_i` over a Z-basis of
/// the module generated by the angles (viewed as reals, not mod 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ZBasis {
    pub generators: Vec<BigRational>,
    /// `lambda[j][i] = λ_{ij}`.
    pub lambda: Vec<Vec<i64>>,
}

impl ZBasis {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `Λ = max_j Σ_i |λ_{ij}|`.
    pub fn lambda_max(&self) -> i64 {
        self.lambda.iter().map(|row| row.iter().map(|x| x.abs()).sum()).max().unwrap_or(0)
    }

    /// The identity expression over the given generators.
    pub fn identity(generators: Vec<BigRational>) -> Self {
        let d = generators.len();
        let lambda = (0..d).map(|j| (0..d).map(|i| i64::from(i == j)).collect()).collect();
        Self { generators, lambda }
    }
}

fn overflow() -> Error {
    Error::InvalidArgument("integer overflow in module basis".into())
}

/// Row echelon form over `Z` of integer rows (a basis of their Z-span).
fn integer_echelon(mut rows: Vec<Vec<i128>>) -> Result<(Vec<Vec<i128>>, Vec<usize>)> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        while let Some(p) = (r..rows.len()).filter(|&i| rows[i][col] != 0).min_by_key(|&i| rows[i][col].unsigned_abs()) {
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col] == 0 {
                    continue;
                }
                let q = Integer::div_floor(&rows[i][col], &rows[r][col]);
                let pivot = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot) {
                    *x = x.checked_sub(q.checked_mul(*p).ok_or_else(overflow)?).ok_or_else(overflow)?;
                }
                if rows[i][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && rows[r][col] != 0 {
            pivots.push(col);
            r += 1;
        }
    }
    rows.truncate(r);
    Ok((rows, pivots))
}

/// Z-basis of the module generated by exact angles `α_j` (as real numbers
/// `r_j + Σ_h a_{jh} β_h`), with integer coordinates for every angle.
pub fn z_basis(angles: &[Angle], basis: &BasisDecl) -> Result<ZBasis> {
    let mut vectors = Vec::with_capacity(angles.len());
    let mut den: i128 = 1;
    for angle in angles {
        angle.check_basis(basis)?;
        match angle {
            Angle::Exact { rational, coeffs } => {
                den = den.lcm(&(*rational.denom() as i128));
                vectors.push((*rational, coeffs.clone()));
            }
            Angle::Float { .. } => return Err(Error::FloatAngle),
        }
    }
    let rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|(r, c)| {
            let mut row = vec![*r.numer() as i128 * (den / *r.denom() as i128)];
            row.extend(c.iter().map(|x| *x as i128 * den));
            row
        })
        .collect();
    let (echelon, pivots) = integer_echelon(rows.clone())?;
    let mut lambda = Vec::with_capacity(rows.len());
    for row in &rows {
        let mut rest = row.clone();
        let mut coords = Vec::with_capacity(echelon.len());
        for (u, &col) in echelon.iter().zip(&pivots) {
            if rest[col] % u[col] != 0 {
                return Err(Error::InvalidArgument("module basis does not span an input angle".into()));
            }
            let q = rest[col] / u[col];
            for c in 0..rest.len() {
                rest[c] -= q * u[c];
            }
            coords.push(i64::try_from(q).map_err(|_| overflow())?);
        }
        if rest.iter().any(|x| *x != 0) {
            return Err(Error::InvalidArgument("module basis does not span an input angle".into()));
        }
        lambda.push(coords);
    }
    let big_den = BigRational::from_integer(BigInt::from(den));
    let generators = echelon
        .iter()
        .map(|u| {
            let mut v = BigRational::from_integer(BigInt::from(u[0]));
            for (c, beta) in u[1..].iter().zip(basis.values()) {
                v += beta * BigRational::from_integer(BigInt::from(*c));
            }
            v / &big_den
        })
        .collect();
    Ok(ZBasis { generators, lambda })
}

/// Circular distance of `x` to the nearest integer.
#[inline]
fn circ(x: f64) -> f64 {
    let f = x - x.round();
    f.abs()
}

struct Candidate {
    k: i64,
    m: Vec<BigInt>,
    errors: Vec<BigRational>,
}

fn evaluate_exact(generators: &[BigRational], targets: &[BigRational], k: i64) -> Candidate {
    let kk = BigRational::from_integer(BigInt::from(k));
    let mut m = Vec::with_capacity(generators.len());
    let mut errors = Vec::with_capacity(generators.len());
    for (beta, phi) in generators.iter().zip(targets) {
        let x = phi - beta * &kk;
        let mi = x.round().to_integer();
        errors.push(x - BigRational::from_integer(mi.clone()));
        m.push(mi);
    }
    Candidate { k, m, errors }
}

/// Options for the generic witness search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessOptions {
    pub effort: u64,
    pub torsion: i64,
    pub lattice_fallback: bool,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self { effort: 10_000_000, torsion: 1, lattice_fallback: true }
    }
}

/// Smallest `s ∈ [1, effort]` with every `‖s γ_i - θ_i‖ < τ`, plus the best
/// `(max error, s)` seen.
fn scan_for_witness(gammas: &[DoubleDouble], thetas: &[f64], tau: f64, effort: u64) -> (Option<u64>, (f64, u64)) {
    let mut best = (f64::INFINITY, 1u64);
    let mut start = 1u64;
    while start <= effort {
        let end = (start + SCAN_BLOCK).min(effort + 1);
        let (hit, block_best) = (start..end)
            .into_par_iter()
            .map(|s| {
                let err = gammas
                    .iter()
                    .zip(thetas)
                    .map(|(g, t)| circ(g.frac_mul(s as i64) - t))
                    .fold(0.0, f64::max);
                (if err < tau { Some(s) } else { None }, (err, s))
            })
            .reduce(
                || (None, (f64::INFINITY, u64::MAX)),
                |a, b| {
                    let hit = match (a.0, b.0) {
                        (Some(x), Some(y)) => Some(x.min(y)),
                        (x, y) => x.or(y),
                    };
                    let best = if b.1 .0 < a.1 .0 || (b.1 .0 == a.1 .0 && b.1 .1 < a.1 .1) { b.1 } else { a.1 };
                    (hit, best)
                },
            );
        if block_best.0 < best.0 {
            best = block_best;
        }
        if hit.is_some() {
            return (hit, best);
        }
        start = end;
    }
    (None, best)
}

/// LLL on the embedding lattice for `s γ_i - m_i ≈ θ_i`; returns candidate `s`.
fn lattice_candidates(gammas: &[BigRational], thetas: &[BigRational], tau: f64) -> Result<Vec<i64>> {
    let d = gammas.len();
    // Expected solution size ~ τ^{-d}; weight the s coordinate to match.
    let size_bits = ((-(tau.log2()) * d as f64).ceil().max(1.0) as u32).min(400);
    let tau_bits = (-(tau.log2())).ceil().max(0.0) as u32;
    let g = LATTICE_GUARD_BITS;
    let one = BigInt::one();
    let s_weight = &one << g as usize;
    let scale_bits = size_bits + tau_bits + g;
    let scale = BigRational::from_integer(&one << scale_bits as usize);
    let embed = &one << (size_bits + g) as usize;
    let dim = d + 2;
    let mut rows: Vec<lattice::IntVector> = Vec::with_capacity(dim);
    let mut row_s = vec![BigInt::zero(); dim];
    row_s[0] = s_weight;
    for (i, gamma) in gammas.iter().enumerate() {
        row_s[i + 1] = (gamma * &scale).round().to_integer();
    }
    rows.push(row_s);
    for i in 0..d {
        let mut row = vec![BigInt::zero(); dim];
        row[i + 1] = &one << scale_bits as usize;
        rows.push(row);
    }
    let mut row_t = vec![BigInt::zero(); dim];
    for (i, theta) in thetas.iter().enumerate() {
        row_t[i + 1] = -(theta * &scale).round().to_integer();
    }
    row_t[dim - 1] = embed.clone();
    rows.push(row_t);
    let reduced = lattice::lll_reduce(&rows)?;
    let mut out = Vec::new();
    for row in reduced {
        let sign = if row[dim - 1] == embed {
            1
        } else if row[dim - 1] == -embed.clone() {
            -1
        } else {
            continue;
        };
        let (s, rem): (BigInt, BigInt) = row[0].div_rem(&(&one << g as usize));
        if !rem.is_zero() {
            continue;
        }
        if let Some(s) = (s * BigInt::from(sign)).to_i64() {
            if s != 0 && !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Witness for generators `β_i`, exact targets `φ_i` and angle coordinates
/// `λ`: some `k ≡ 0 (mod T)` with `max_j |Σ_i λ_{ij} e_i| < δ`, searched at
/// generator tolerance `δ/Λ`.
pub fn witness_search(zb: &ZBasis, targets: &[BigRational], delta: f64, opts: &WitnessOptions) -> Result<WitnessReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    if opts.torsion < 1 {
        return Err(Error::InvalidArgument("torsion order must be ≥ 1".into()));
    }
    if targets.len() != zb.rank() {
        return Err(Error::InvalidArgument("one target per generator is required".into()));
    }
    let lambda_max = zb.lambda_max().max(1);
    let tau = delta / lambda_max as f64;
    let torsion = BigRational::from_integer(BigInt::from(opts.torsion));
    let gammas: Vec<BigRational> = zb.generators.iter().map(|b| b * &torsion).collect();
    let gamma_dd: Vec<DoubleDouble> = gammas.iter().map(|g| DoubleDouble::from_rational(&precision::frac_rational(g))).collect();
    let theta_f: Vec<f64> = targets.iter().map(|t| precision::rational_to_f64(&precision::frac_rational(t))).collect();
    let max_s = (MAX_PHASE_INDEX as u64 - 1) / opts.torsion as u64;
    let effort = opts.effort.min(max_s);
    let tau_exact = BigRational::from_float(tau).ok_or_else(|| Error::InvalidArgument("bad tolerance".into()))?;
    let accepts = |c: &Candidate| c.errors.iter().all(|e| e.abs() < tau_exact);

    let (hit, (best_err, best_s)) = scan_for_witness(&gamma_dd, &theta_f, tau, effort);
    let mut found: Option<(Candidate, WitnessMethod)> = None;
    if let Some(s) = hit {
        let c = evaluate_exact(&zb.generators, targets, s as i64 * opts.torsion);
        if accepts(&c) {
            found = Some((c, WitnessMethod::Scan));
        }
    }
    if found.is_none() && opts.lattice_fallback {
        for s in lattice_candidates(&gammas, targets, tau)? {
            let Some(k) = s.checked_mul(opts.torsion).filter(|k| k.abs() < MAX_PHASE_INDEX) else { continue };
            let c = evaluate_exact(&zb.generators, targets, k);
            if accepts(&c) {
                found = Some((c, WitnessMethod::Lattice));
                break;
            }
        }
    }
    let Some((c, method)) = found else {
        return Err(Error::BudgetExhausted {
            effort,
            best_k: best_s as i64 * opts.torsion,
            best_delta: best_err * lambda_max as f64,
        });
    };
    Ok(assemble(zb, c, delta, lambda_max, opts.torsion, method, hit.unwrap_or(effort)))
}

fn assemble(zb: &ZBasis, c: Candidate, delta: f64, lambda_max: i64, torsion: i64, method: WitnessMethod, effort_used: u64) -> WitnessReport {
    let m: Vec<i64> = c.m.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect();
    let k_corrections = zb
        .lambda
        .iter()
        .map(|row| row.iter().zip(&m).map(|(l, mi)| l.saturating_mul(*mi)).fold(0i64, i64::saturating_add))
        .collect();
    let delta_achieved = zb
        .lambda
        .iter()
        .map(|row| {
            let r: BigRational = row.iter().zip(&c.errors).map(|(l, e)| e * BigRational::from_integer(BigInt::from(*l))).sum();
            precision::rational_to_f64(&r.abs())
        })
        .fold(0.0, f64::max);
    let generator_error = c.errors.iter().map(|e| precision::rational_to_f64(&e.abs())).fold(0.0, f64::max);
    WitnessReport {
        k: c.k,
        m,
        k_corrections,
        delta_achieved,
        delta_requested: delta,
        generator_error,
        lambda_max,
        torsion,
        method,
        effort_used,
        sum_at_k: None,
        gap_to_ct: None,
    }
}

/// `kronecker_witness`: integer `k` (a multiple of `torsion`) and `m_i` with
/// `|β_i t₀ - β_i k - m_i| < δ` for every declared basis value.
pub fn kronecker_witness(basis: &BasisDecl, t0: &BigRational, delta: f64, effort: u64, torsion: i64) -> Result<WitnessReport> {
    if basis.is_empty() {
        return Err(Error::InvalidBasis("witness search needs at least one basis value".into()));
    }
    let zb = ZBasis::identity(basis.values().to_vec());
    let targets: Vec<BigRational> = basis.values().iter().map(|b| b * t0).collect();
    if t0.is_integer() && !t0.is_zero() {
        if let Some(k) = t0.to_integer().to_i64().filter(|k| k % torsion.max(1) == 0 && k.abs() < MAX_PHASE_INDEX) {
            let c = evaluate_exact(&zb.generators, &targets, k);
            return Ok(assemble(&zb, c, delta, 1, torsion, WitnessMethod::ExactHit, 0));
        }
    }
    witness_search(&zb, &targets, delta, &WitnessOptions { effort, torsion, lattice_fallback: true })
}

/// Re-checks `|φ_i - β_i k - m_i| < τ` for a report in exact arithmetic.
pub fn witness_holds(zb: &ZBasis, targets: &[BigRational], report: &WitnessReport) -> bool {
    let c = evaluate_exact(&zb.generators, targets, report.k);
    let tau = report.delta_requested / report.lambda_max as f64;
    let Some(tau) = BigRational::from_float(tau) else { return false };
    c.m.iter().zip(&report.m).all(|(a, b)| a.to_i64() == Some(*b)) && c.errors.iter().all(|e| e.abs() < tau)
}

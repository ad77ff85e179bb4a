//! Closed forms for the block sums `Σ₁ = Σ_{k=N}^{N+K-1} s_k` and
//! `Σ₂ = Σ_{k=N}^{N+K-1} s_k²` together with the constants bounding them
//! uniformly in `N` and `K`.

use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::{self, MAX_PHASE_INDEX};
use crate::spectrum::SpectrumConfig;

/// Relative agreement required between closed forms and direct summation.
pub const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sigma1 {
    pub sigma1: Complex64,
    /// `Σ_j 2|b_j| / |1 - z_j|`.
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sigma2 {
    pub sigma2: Complex64,
    /// `K Σ |b_i|²`.
    pub diagonal: f64,
    /// `Σ_{i≠j} 2|b_i b_j| / |1 - z_i/z_j|`.
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AveragingCertificate {
    pub start: i64,
    pub len: i64,
    pub sigma1: Complex64,
    pub sigma2: Complex64,
    pub c1: f64,
    pub c2: f64,
    pub diagonal: f64,
}

impl AveragingCertificate {
    pub fn compute(cfg: &SpectrumConfig, start: i64, len: i64) -> Result<Self> {
        let s1 = sigma1_closed_form(cfg, start, len)?;
        let s2 = sigma2_closed_form(cfg, start, len)?;
        Ok(Self {
            start,
            len,
            sigma1: s1.sigma1,
            sigma2: s2.sigma2,
            c1: s1.c1,
            c2: s2.c2,
            diagonal: s2.diagonal,
        })
    }

    /// `|Σ₁| ≤ C₁`.
    pub fn sigma1_bounded(&self) -> bool {
        self.sigma1.norm() <= self.c1 * (1.0 + 1e-12)
    }

    /// `|Σ₂ - K Σ|b|²| ≤ C₂`.
    pub fn sigma2_bounded(&self) -> bool {
        (self.sigma2 - self.diagonal).norm() <= self.c2 * (1.0 + 1e-12) + 1e-12 * self.diagonal
    }
}

fn check_range(start: i64, len: i64) -> Result<()> {
    if len < 1 {
        return Err(Error::InvalidArgument(format!("block length K must be ≥ 1, got {len}")));
    }
    let end = start.checked_add(len).ok_or(Error::IndexOutOfRange(start))?;
    if start.abs() >= MAX_PHASE_INDEX || end.abs() >= MAX_PHASE_INDEX {
        return Err(Error::IndexOutOfRange(end));
    }
    Ok(())
}

/// `exp(2πi x)`.
fn cis(x: f64) -> Complex64 {
    let (c, s) = precision::unit_circle(x);
    Complex64::new(c, s)
}

/// `(w^N - w^{N+K}) / (1 - w)` for `w = exp(2πi θ)` given the reduced phases
/// `frac(Nθ)`, `frac((N+K)θ)` and `θ`.
fn geometric_block(phase_n: f64, phase_end: f64, theta: f64) -> Complex64 {
    // 1 - e^{2πiθ} = -2i sin(πθ) e^{iπθ}
    let y = if theta >= 0.5 { theta - 1.0 } else { theta };
    let denom = Complex64::new(0.0, -2.0 * (std::f64::consts::PI * y).sin()) * cis(y / 2.0);
    (cis(phase_n) - cis(phase_end)) / denom
}

/// `|1 - exp(2πiθ)| = 2|sin πθ|`.
fn chord(theta: f64) -> f64 {
    let y = if theta >= 0.5 { theta - 1.0 } else { theta };
    2.0 * (std::f64::consts::PI * y).sin().abs()
}

/// `Σ_j b_j (z_j^N - z_j^{N+K}) / (1 - z_j)` and `C₁`.
pub fn sigma1_closed_form(cfg: &SpectrumConfig, start: i64, len: i64) -> Result<Sigma1> {
    check_range(start, len)?;
    if let Some(j) = cfg.unit_root() {
        return Err(Error::UnitRoot(j));
    }
    let mut sigma1 = Complex64::new(0.0, 0.0);
    let mut c1 = 0.0;
    for (node, phase) in cfg.nodes().iter().zip(cfg.phases()) {
        let b = node.b.to_complex();
        let theta = phase.value();
        sigma1 += b * geometric_block(phase.frac_mul(start), phase.frac_mul(start + len), theta);
        c1 += 2.0 * b.norm() / chord(theta);
    }
    Ok(Sigma1 { sigma1, c1 })
}

/// `K Σ|b_i|² + Σ_{i≠j} b_i conj(b_j) ((z_i/z_j)^N - (z_i/z_j)^{N+K}) / (1 - z_i/z_j)`
/// and `C₂`.
pub fn sigma2_closed_form(cfg: &SpectrumConfig, start: i64, len: i64) -> Result<Sigma2> {
    check_range(start, len)?;
    if let Some((i, j)) = cfg.repeated_pair() {
        return Err(Error::RepeatedAngle(i, j));
    }
    let coeffs = cfg.coefficients();
    let phases = cfg.phases();
    let diagonal = len as f64 * coeffs.iter().map(|b| b.norm_sqr()).sum::<f64>();
    let mut cross = Complex64::new(0.0, 0.0);
    let mut c2 = 0.0;
    let reduced = |x: f64| x - x.floor();
    for i in 0..cfg.n() {
        let (ni, ei, ti) = (phases[i].frac_mul(start), phases[i].frac_mul(start + len), phases[i].value());
        for j in 0..cfg.n() {
            if i == j {
                continue;
            }
            let (nj, ej, tj) = (phases[j].frac_mul(start), phases[j].frac_mul(start + len), phases[j].value());
            let theta = reduced(ti - tj);
            let w = coeffs[i] * coeffs[j].conj();
            cross += w * geometric_block(reduced(ni - nj), reduced(ei - ej), theta);
            c2 += 2.0 * w.norm() / chord(theta);
        }
    }
    Ok(Sigma2 { sigma2: cross + diagonal, diagonal, c2 })
}

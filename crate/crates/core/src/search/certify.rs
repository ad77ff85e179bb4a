//! Witness-side certification of `c_S = c_T` for cosine sums whose angles
//! span a Q-space avoiding 1.
//!
//! `c_T` is taken from the torus minimum of `g(θ) = Σ b_j cos(2π λ_j·θ)` over a
//! Z-basis of the angle module; the line `t ↦ tβ` is dense there, so this is
//! the infimum over real `t`. The witness targets the torus minimizer `θ*`
//! directly, with `δ` halved from `delta0` until `|f(k) - g(θ*)| < ε`.

use num::complex::Complex64;
use num::BigRational;
use serde::Serialize;

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::search::continuous::{continuous_minimum_torus, Method, TorusFunction, TorusOptions};
use crate::search::witness::{witness_search, z_basis, WitnessOptions, WitnessReport, ZBasis};
use crate::spectrum::CosineConfig;
use crate::structure::span_excludes_one;

/// Slack for `f(k) ≥ -c_T`, which holds up to the torus optimizer's accuracy.
pub const SANDWICH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyOptions {
    pub epsilon: f64,
    pub effort: u64,
    pub delta0: f64,
    pub min_delta: f64,
    pub torus: TorusOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { epsilon: 1e-3, effort: 10_000_000, delta0: 0.1, min_delta: 1e-12, torus: TorusOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Round {
    pub delta: f64,
    pub k: i64,
    pub f_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub c_t: f64,
    pub theta_star: Vec<f64>,
    pub torus_method: Method,
    /// `λ_{ij}` with `α_j = Σ_i λ_{ij} β_i`, one row per angle.
    pub lambda: Vec<Vec<i64>>,
    pub k: i64,
    pub f_k: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// `f(k) ≤ -c_T + 2ε`.
    pub certified: bool,
    /// `-c_T ≤ f(k)` up to the optimizer tolerance.
    pub lower_side_consistent: bool,
    pub rounds: Vec<Round>,
    pub witness: WitnessReport,
}

/// `g(θ) = Σ b_j cos(2π λ_j·θ)` over a Z-basis of the angle module.
pub fn cosine_torus(cfg: &CosineConfig) -> Result<(ZBasis, TorusFunction)> {
    let alphas: Vec<Angle> = cfg.terms().iter().map(|t| t.alpha.clone()).collect();
    let zb = z_basis(&alphas, cfg.basis())?;
    let coeffs = cfg.terms().iter().map(|t| Complex64::new(t.b, 0.0)).collect();
    let g = TorusFunction::new(coeffs, zb.lambda.clone())?;
    Ok((zb, g))
}

/// `certify_cs_equals_ct`: an integer `k` with `f(k) ≤ -c_T + 2ε`.
pub fn certify_cs_equals_ct(cfg: &CosineConfig, opts: &CertifyOptions) -> Result<CertificationReport> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if !cfg.all_exact() {
        return Err(Error::FloatAngle);
    }
    let alphas: Vec<Angle> = cfg.terms().iter().map(|t| t.alpha.clone()).collect();
    if !span_excludes_one(&alphas, cfg.basis())? {
        return Err(Error::Hypothesis("the Q-span of the angles contains 1; c_S < c_T is possible".into()));
    }
    let (zb, g) = cosine_torus(cfg)?;
    let torus = continuous_minimum_torus(&g, &opts.torus)?;
    let theta = torus.theta_star.clone().expect("torus minimizer");
    let targets: Vec<BigRational> = theta
        .iter()
        .map(|t| BigRational::from_float(*t).ok_or_else(|| Error::InvalidArgument("non-finite minimizer".into())))
        .collect::<Result<_>>()?;
    let mut delta = opts.delta0;
    let mut remaining = opts.effort;
    let mut rounds = Vec::new();
    loop {
        let wopts = WitnessOptions { effort: remaining, torsion: 1, lattice_fallback: true };
        let mut witness = witness_search(&zb, &targets, delta, &wopts)?;
        remaining = remaining.saturating_sub(witness.effort_used);
        let f_k = cfg.value_at(witness.k);
        rounds.push(Round { delta, k: witness.k, f_k });
        if (f_k - torus.value).abs() < opts.epsilon {
            witness.sum_at_k = Some(f_k);
            witness.gap_to_ct = Some(f_k - torus.value);
            return Ok(CertificationReport {
                c_t: -torus.value,
                theta_star: theta,
                torus_method: torus.method,
                lambda: zb.lambda,
                k: witness.k,
                f_k,
                epsilon: opts.epsilon,
                delta,
                certified: f_k <= torus.value + 2.0 * opts.epsilon,
                lower_side_consistent: f_k >= torus.value - SANDWICH_TOL,
                rounds,
                witness,
            });
        }
        delta /= 2.0;
        if delta < opts.min_delta || remaining == 0 {
            return Err(Error::BudgetExhausted { effort: opts.effort, best_k: witness.k, best_delta: delta * 2.0 });
        }
    }
}

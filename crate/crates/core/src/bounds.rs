//! Closed-form upper bounds on one-sided infima and the hypotheses they need.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::TrigPolynomial;
use crate::spectrum::{collapse_repeats, CosineConfig, SpectrumConfig};
use crate::structure::{self, NonDegenerate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    Thm1,
    Cor1,
    Thm2,
    Thm4,
    Cor3,
    Cor4,
    Cor5,
    Lemma1,
    Lemma2,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Thm1,
        TheoremId::Cor1,
        TheoremId::Thm2,
        TheoremId::Thm4,
        TheoremId::Cor3,
        TheoremId::Cor4,
        TheoremId::Cor5,
        TheoremId::Lemma1,
        TheoremId::Lemma2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Thm1 => "Thm1",
            TheoremId::Cor1 => "Cor1",
            TheoremId::Thm2 => "Thm2",
            TheoremId::Thm4 => "Thm4",
            TheoremId::Cor3 => "Cor3",
            TheoremId::Cor4 => "Cor4",
            TheoremId::Cor5 => "Cor5",
            TheoremId::Lemma1 => "Lemma1",
            TheoremId::Lemma2 => "Lemma2",
        }
    }

    /// Bounds stated with `<` rather than `≤`.
    pub fn is_strict(self) -> bool {
        matches!(self, TheoremId::Thm4 | TheoremId::Cor3 | TheoremId::Cor5 | TheoremId::Lemma2)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub met: bool,
}

fn hyp(name: &str, met: bool) -> Hypothesis {
    Hypothesis { name: name.to_string(), met }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub value: f64,
    pub strict: bool,
    pub hypotheses_met: Vec<Hypothesis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    fn new(theorem_id: TheoremId, value: f64, hypotheses_met: Vec<Hypothesis>) -> Self {
        debug_assert!(value.is_finite());
        Self { theorem_id, value, strict: theorem_id.is_strict(), hypotheses_met, note: None }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn applicable(&self) -> bool {
        self.hypotheses_met.iter().all(|h| h.met)
    }
}

/// `1/π⁴`.
pub fn inv_pi4() -> f64 {
    1.0 / PI.powi(4)
}

fn thm1_hypotheses(cfg: &SpectrumConfig) -> Vec<Hypothesis> {
    vec![
        hyp("conjugate_closed", cfg.is_conjugate_closed()),
        hyp("no_unit_root", cfg.unit_root().is_none()),
        hyp("distinct", cfg.repeated_pair().is_none()),
    ]
}

/// `bound_thm1`: `-Σ|b_j|² / Σ|b_j|`.
pub fn bound_thm1(cfg: &SpectrumConfig) -> BoundReport {
    BoundReport::new(TheoremId::Thm1, -cfg.abs_sq_sum() / cfg.abs_sum(), thm1_hypotheses(cfg))
}

/// `bound_cor1`: `-(1/n) Σ|b_j|`, never below the Theorem 1 value.
pub fn bound_cor1(cfg: &SpectrumConfig) -> BoundReport {
    let value = -cfg.abs_sum() / cfg.n() as f64;
    let thm1 = -cfg.abs_sq_sum() / cfg.abs_sum();
    debug_assert!(thm1 <= value + 1e-12 * value.abs().max(1.0));
    BoundReport::new(TheoremId::Cor1, value, thm1_hypotheses(cfg))
}

/// `bound_thm2`: the Theorem 1 value for positive real `b` with repeated
/// angles allowed. The note records the sharper value after collapsing.
pub fn bound_thm2(cfg: &SpectrumConfig) -> BoundReport {
    let hypotheses = vec![
        hyp("conjugate_closed", cfg.is_conjugate_closed()),
        hyp("no_unit_root", cfg.unit_root().is_none()),
        hyp("positive_real_coefficients", cfg.all_positive_real()),
    ];
    let report = BoundReport::new(TheoremId::Thm2, -cfg.abs_sq_sum() / cfg.abs_sum(), hypotheses);
    match collapse_repeats(cfg) {
        Ok(collapsed) if collapsed.n() < cfg.n() => report.with_note(format!(
            "after merging repeated angles: {}",
            -collapsed.abs_sq_sum() / collapsed.abs_sum()
        )),
        _ => report,
    }
}

/// `bound_thm4`: `-(1/π⁴) min|b| log n`, gated on a matching non-degeneracy
/// token.
pub fn bound_thm4(cfg: &SpectrumConfig, token: Option<&NonDegenerate>) -> BoundReport {
    let mut hypotheses = thm1_hypotheses(cfg);
    hypotheses.push(hyp("no_minus_one", cfg.minus_one().is_none()));
    hypotheses.push(hyp("non_degenerate_certified", token.is_some_and(|t| t.matches(cfg))));
    let value = -inv_pi4() * cfg.min_abs() * (cfg.n() as f64).ln();
    let report = BoundReport::new(TheoremId::Thm4, value, hypotheses);
    if cfg.minus_one().is_some() && !cfg.all_unit_coefficients() {
        report.with_note("z = -1 with general coefficients is not covered")
    } else {
        report
    }
}

/// `bound_cor3`: `-(1/π⁴) log n` for `n ≥ 2`.
pub fn bound_cor3(n: usize) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Cor3 needs n ≥ 2, got {n}")));
    }
    Ok(BoundReport::new(TheoremId::Cor3, -inv_pi4() * (n as f64).ln(), Vec::new()))
}

/// The Cor3 bound with its hypotheses checked on a concrete spectrum: unit
/// coefficients and no pair ratio a root of unity (`z = -1` allowed).
pub fn bound_cor3_for(cfg: &SpectrumConfig) -> Result<BoundReport> {
    let mut report = bound_cor3(cfg.n())?;
    report.hypotheses_met = thm1_hypotheses(cfg);
    report.hypotheses_met.push(hyp("unit_coefficients", cfg.all_unit_coefficients()));
    let ratio_free = structure::ratio_witness(cfg).is_none();
    report.hypotheses_met.push(hyp("no_root_of_unity_ratio_certified", ratio_free && cfg.all_exact()));
    if ratio_free && !cfg.all_exact() {
        report = report.with_note("ratio check on float angles is heuristic");
    }
    Ok(report)
}

/// `bound_cor4`: `-(1/2m) Σ|b_j|`.
pub fn bound_cor4(cfg: &CosineConfig) -> BoundReport {
    BoundReport::new(TheoremId::Cor4, -cfg.abs_sum() / (2.0 * cfg.m() as f64), vec![hyp("alphas_distinct_in_open_half", true)])
}

/// `bound_cor5`: `-log(2m)/(2π⁴) min|b|`, gated on a token for the `2m`-node
/// spectrum (no `α_i ± α_j` rational).
pub fn bound_cor5(cfg: &CosineConfig, token: Option<&NonDegenerate>) -> Result<BoundReport> {
    let spectrum = cfg.to_spectrum()?;
    let certified = token.is_some_and(|t| t.matches(&spectrum));
    let value = -(2.0 * cfg.m() as f64).ln() / (2.0 * PI.powi(4)) * cfg.min_abs();
    Ok(BoundReport::new(
        TheoremId::Cor5,
        value,
        vec![hyp("alphas_distinct_in_open_half", true), hyp("no_rational_sum_or_difference_certified", certified)],
    ))
}

/// `littlewood_lower_bound`: `(4/π³) min|b| log n`.
pub fn littlewood_lower_bound(abs_b: &[f64]) -> Result<f64> {
    if abs_b.is_empty() || abs_b.iter().any(|b| *b == 0.0 || !b.is_finite()) {
        return Err(Error::InvalidCoefficient("coefficients must be finite and nonzero".into()));
    }
    let min = abs_b.iter().map(|b| b.abs()).fold(f64::INFINITY, f64::min);
    Ok(4.0 / PI.powi(3) * min * (abs_b.len() as f64).ln())
}

/// Lemma 1 value for a polynomial (a lower bound on its `L¹` norm).
pub fn bound_lemma1(poly: &TrigPolynomial) -> Result<BoundReport> {
    let abs: Vec<f64> = poly.terms().iter().map(|(b, _)| b.norm()).collect();
    Ok(BoundReport::new(TheoremId::Lemma1, littlewood_lower_bound(&abs)?, vec![hyp("distinct_frequencies", true)]))
}

/// Lemma 2 value `-(1/π⁴) min|b| log n` for a real-valued polynomial with
/// distinct nonzero frequencies.
pub fn bound_lemma2(poly: &TrigPolynomial) -> BoundReport {
    let value = -inv_pi4() * poly.min_abs() * (poly.n() as f64).ln();
    BoundReport::new(
        TheoremId::Lemma2,
        value,
        vec![
            hyp("distinct_frequencies", true),
            hyp("nonzero_frequencies", poly.all_frequencies_nonzero()),
            hyp("real_valued", poly.is_real_valued()),
        ],
    )
}

//! End-to-end check of one bound on one configuration: hypotheses, bound
//! value, and a search for a value at or below it.

use serde::Serialize;

use crate::bounds::{self, BoundReport, Hypothesis, TheoremId};
use crate::error::{Error, Result};
use crate::quadrature::{l1_norm, TrigPolynomial};
use crate::search::continuous::{polynomial_minimum, TimeOptions};
use crate::search::scan::{self, Restrict, ScanOptions, MAX_EXACT_PERIOD};
use crate::spectrum::{CosineConfig, SpectrumConfig};
use crate::structure::{self, choose_projection, group_decompose, projected_polynomial};

/// Allowed excess over the bound when the full period was evaluated.
pub const EXACT_PERIOD_SLACK: f64 = 1e-9;
/// Quadrature tolerance for the `L¹` comparison.
pub const L1_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
    #[serde(rename = "HYPOTHESIS-FAIL")]
    HypothesisFail,
    /// The bound is violated by an exhaustive evaluation.
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::HypothesisFail => "HYPOTHESIS-FAIL",
            Verdict::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    Spectrum(&'a SpectrumConfig),
    Cosine(&'a CosineConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct VerifyOptions {
    pub scan: ScanOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub theorem_id: TheoremId,
    pub bound: f64,
    pub strict: bool,
    pub min_found: Option<f64>,
    pub k_best: Option<i64>,
    pub budget: u64,
    pub verdict: Verdict,
    /// `min_found - bound` (for Lemma1, `bound - L¹`).
    pub margin: Option<f64>,
    pub method: String,
    pub hypotheses_met: Vec<Hypothesis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationRecord {
    fn new(report: &BoundReport, budget: u64) -> Self {
        Self {
            theorem_id: report.theorem_id,
            bound: report.value,
            strict: report.strict,
            min_found: None,
            k_best: None,
            budget,
            verdict: Verdict::HypothesisFail,
            margin: None,
            method: "none".into(),
            hypotheses_met: report.hypotheses_met.clone(),
            note: report.note.clone(),
        }
    }

    fn settle(mut self, min: f64, k: Option<i64>, exhaustive: bool, method: &str) -> Self {
        self.min_found = Some(min);
        self.k_best = k;
        self.margin = Some(min - self.bound);
        self.method = method.into();
        self.verdict = if exhaustive {
            if min <= self.bound + EXACT_PERIOD_SLACK {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        } else if min <= self.bound {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
        self
    }
}

/// The Lemma 1/Lemma 2 polynomial `Σ b_j e^{i q_j t}` of a spectrum.
fn projected(cfg: &SpectrumConfig) -> Result<TrigPolynomial> {
    let g = group_decompose(cfg)?;
    let p = choose_projection(&g)?;
    TrigPolynomial::new(projected_polynomial(cfg, &p))
}

fn minimize_spectrum(record: VerificationRecord, cfg: &SpectrumConfig, opts: &VerifyOptions) -> Result<VerificationRecord> {
    if opts.scan.restrict == Restrict::All && cfg.rational_period().is_some_and(|p| p <= MAX_EXACT_PERIOD) {
        let p = scan::exact_period_scan(cfg)?;
        return Ok(record.settle(p.min, Some(p.k_min), true, "exact-period"));
    }
    let r = scan::scan_spectrum(cfg, &opts.scan)?;
    Ok(record.settle(r.value_best, Some(r.k_best), false, "scan"))
}

fn minimize_cosine(record: VerificationRecord, cfg: &CosineConfig, opts: &VerifyOptions) -> Result<VerificationRecord> {
    if opts.scan.restrict == Restrict::All && cfg.rational_period().is_some_and(|p| p <= MAX_EXACT_PERIOD) {
        let p = scan::exact_cosine_period_scan(cfg)?;
        return Ok(record.settle(p.min, Some(p.k_min), true, "exact-period"));
    }
    let r = scan::scan_infimum(cfg, &opts.scan)?;
    Ok(record.settle(r.value_best, Some(r.k_best), false, "scan"))
}

/// `verify_theorem`: `PASS` iff the minimum found is at most the bound (plus
/// `1e-9` after a full-period evaluation); budget shortfalls are
/// `INCONCLUSIVE`, never `FAIL`. A restricted scan never takes the
/// full-period path.
pub fn verify_theorem(subject: Subject<'_>, id: TheoremId, opts: &VerifyOptions) -> Result<VerificationRecord> {
    let budget = opts.scan.budget;
    let spectrum_owned;
    let cfg: &SpectrumConfig = match subject {
        Subject::Spectrum(cfg) => cfg,
        Subject::Cosine(cosine) => {
            if matches!(id, TheoremId::Cor4 | TheoremId::Cor5) {
                return verify_cosine(cosine, id, opts);
            }
            spectrum_owned = cosine.to_spectrum()?;
            &spectrum_owned
        }
    };
    let report = match id {
        TheoremId::Thm1 => bounds::bound_thm1(cfg),
        TheoremId::Cor1 => bounds::bound_cor1(cfg),
        TheoremId::Thm2 => bounds::bound_thm2(cfg),
        TheoremId::Thm4 => bounds::bound_thm4(cfg, structure::detect_degeneracy(cfg).token()),
        TheoremId::Cor3 => bounds::bound_cor3_for(cfg)?,
        TheoremId::Cor4 | TheoremId::Cor5 => {
            return Err(Error::InvalidArgument(format!("{id} applies to cosine configurations")));
        }
        TheoremId::Lemma1 | TheoremId::Lemma2 => return verify_lemma(cfg, id, budget),
    };
    let record = VerificationRecord::new(&report, budget);
    if !report.applicable() {
        return Ok(record);
    }
    minimize_spectrum(record, cfg, opts)
}

fn verify_cosine(cfg: &CosineConfig, id: TheoremId, opts: &VerifyOptions) -> Result<VerificationRecord> {
    let report = match id {
        TheoremId::Cor4 => bounds::bound_cor4(cfg),
        _ => {
            let (_, verdict) = structure::detect_cosine_degeneracy(cfg)?;
            bounds::bound_cor5(cfg, verdict.token())?
        }
    };
    let record = VerificationRecord::new(&report, opts.scan.budget);
    if !report.applicable() {
        return Ok(record);
    }
    minimize_cosine(record, cfg, opts)
}

fn verify_lemma(cfg: &SpectrumConfig, id: TheoremId, budget: u64) -> Result<VerificationRecord> {
    let poly = match projected(cfg) {
        Ok(poly) => poly,
        Err(e) => {
            let report = BoundReport {
                theorem_id: id,
                value: f64::NAN,
                strict: id.is_strict(),
                hypotheses_met: vec![Hypothesis { name: "projection_to_distinct_nonzero_frequencies".into(), met: false }],
                note: Some(e.to_string()),
            };
            return Ok(VerificationRecord::new(&report, budget));
        }
    };
    if id == TheoremId::Lemma1 {
        let report = bounds::bound_lemma1(&poly)?;
        let mut record = VerificationRecord::new(&report, budget);
        let l1 = l1_norm(&poly)?;
        record.min_found = Some(l1.value);
        record.margin = Some(report.value - l1.value);
        record.method = "quadrature".into();
        record.verdict = if l1.value >= report.value - L1_SLACK { Verdict::Pass } else { Verdict::Fail };
        return Ok(record);
    }
    let report = bounds::bound_lemma2(&poly);
    let record = VerificationRecord::new(&report, budget);
    if !report.applicable() {
        return Ok(record);
    }
    let m = polynomial_minimum(&poly, &TimeOptions::default())?;
    Ok(record.settle(m.value, None, false, "line-minimum"))
}

//! Finite scans of integer-indexed series for their minimum.
//!
//! Work is split into fixed chunks evaluated in parallel; the reduction runs in
//! chunk order with a strict `<`, so the smallest minimizing `k` wins and the
//! result does not depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::MAX_PHASE_INDEX;
use crate::spectrum::{eval_power_sum, CosineConfig, PowerSumEvaluator, SpectrumConfig};

pub const DEFAULT_BUDGET: u64 = 1_000_000;
const HISTORY_POINTS: u64 = 1000;
/// Longest period evaluated exhaustively.
pub const MAX_EXACT_PERIOD: i64 = 10_000_000;

pub trait IntegerSeries: Sync {
    fn value(&self, k: i64) -> f64;
}

impl IntegerSeries for PowerSumEvaluator {
    fn value(&self, k: i64) -> f64 {
        PowerSumEvaluator::value(self, k)
    }
}

impl IntegerSeries for CosineConfig {
    fn value(&self, k: i64) -> f64 {
        self.value_at(k)
    }
}

impl<F: Fn(i64) -> f64 + Sync> IntegerSeries for F {
    fn value(&self, k: i64) -> f64 {
        self(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Restrict {
    All,
    Odd,
    /// `k ≡ residue (mod modulus)`.
    Residue { modulus: i64, residue: i64 },
}

impl Restrict {
    /// The `i`-th admissible index at or after `start`.
    fn index(self, start: i64, i: i64) -> i64 {
        match self {
            Restrict::All => start + i,
            Restrict::Odd => start + (1 - start.rem_euclid(2)) + 2 * i,
            Restrict::Residue { modulus, residue } => {
                let first = start + (residue - start).rem_euclid(modulus);
                first + modulus * i
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanOptions {
    pub budget: u64,
    pub restrict: Restrict,
    pub start: i64,
    pub history: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, restrict: Restrict::All, start: 1, history: false }
    }
}

impl ScanOptions {
    pub fn with_budget(budget: u64) -> Self {
        Self { budget, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryPoint {
    pub evaluated: u64,
    pub k_best: i64,
    pub value_best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub k_best: i64,
    pub value_best: f64,
    pub budget: u64,
    pub restrict: Restrict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<HistoryPoint>>,
}

/// `scan_infimum`: minimum over the first `budget` admissible `k ≥ start`.
pub fn scan_infimum(series: &impl IntegerSeries, opts: &ScanOptions) -> Result<ScanResult> {
    if opts.budget == 0 {
        return Err(Error::InvalidArgument("scan budget must be ≥ 1".into()));
    }
    if let Restrict::Residue { modulus, .. } = opts.restrict {
        if modulus < 1 {
            return Err(Error::InvalidArgument("residue modulus must be ≥ 1".into()));
        }
    }
    let budget = i64::try_from(opts.budget).map_err(|_| Error::InvalidArgument("budget too large".into()))?;
    let last = opts.restrict.index(opts.start, budget - 1);
    if opts.start.abs() >= MAX_PHASE_INDEX || last.abs() >= MAX_PHASE_INDEX {
        return Err(Error::IndexOutOfRange(last));
    }
    let chunk = (opts.budget.div_ceil(HISTORY_POINTS)).max(1) as i64;
    let chunks = (budget + chunk - 1) / chunk;
    let mins: Vec<(i64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (lo, hi) = (c * chunk, ((c + 1) * chunk).min(budget));
            let mut best = (opts.restrict.index(opts.start, lo), f64::INFINITY);
            for i in lo..hi {
                let k = opts.restrict.index(opts.start, i);
                let v = series.value(k);
                if v < best.1 {
                    best = (k, v);
                }
            }
            best
        })
        .collect();
    let mut best = mins[0];
    let mut history = opts.history.then(Vec::new);
    for (c, m) in mins.iter().enumerate() {
        if m.1 < best.1 {
            best = *m;
        }
        if let Some(h) = history.as_mut() {
            h.push(HistoryPoint { evaluated: (((c as i64 + 1) * chunk).min(budget)) as u64, k_best: best.0, value_best: best.1 });
        }
    }
    Ok(ScanResult { k_best: best.0, value_best: best.1, budget: opts.budget, restrict: opts.restrict, history })
}

/// Scan of `s_k` for a conjugate-closed spectrum.
pub fn scan_spectrum(cfg: &SpectrumConfig, opts: &ScanOptions) -> Result<ScanResult> {
    let mut result = scan_infimum(&cfg.evaluator()?, opts)?;
    // Report the checked evaluation at the minimizer.
    result.value_best = eval_power_sum(cfg, result.k_best)?;
    Ok(result)
}

/// Extrema of `s_k` over one full period of a rational spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodScan {
    pub period: i64,
    pub min: f64,
    pub k_min: i64,
    pub max: f64,
    pub k_max: i64,
}

/// Exhaustive evaluation over `k = 0, …, L-1` with exact phase reduction.
pub fn exact_period_scan(cfg: &SpectrumConfig) -> Result<PeriodScan> {
    let period = cfg
        .rational_period()
        .filter(|_| cfg.all_exact() || cfg.phases().iter().all(|p| p.denominator().is_some()))
        .ok_or_else(|| Error::InvalidArgument("exact period scan needs rational angles".into()))?;
    if period > MAX_EXACT_PERIOD {
        return Err(Error::InvalidArgument(format!("period {period} exceeds {MAX_EXACT_PERIOD}")));
    }
    let values: Vec<f64> = (0..period).into_par_iter().map(|k| eval_power_sum(cfg, k)).collect::<Result<_>>()?;
    let mut out = PeriodScan { period, min: values[0], k_min: 0, max: values[0], k_max: 0 };
    for (k, &v) in values.iter().enumerate() {
        if v < out.min {
            out.min = v;
            out.k_min = k as i64;
        }
        if v > out.max {
            out.max = v;
            out.k_max = k as i64;
        }
    }
    Ok(out)
}

/// Exhaustive minimum of a rational cosine sum over one period.
pub fn exact_cosine_period_scan(cfg: &CosineConfig) -> Result<PeriodScan> {
    let period = cfg
        .rational_period()
        .ok_or_else(|| Error::InvalidArgument("exact period scan needs rational angles".into()))?;
    if period > MAX_EXACT_PERIOD {
        return Err(Error::InvalidArgument(format!("period {period} exceeds {MAX_EXACT_PERIOD}")));
    }
    let values: Vec<f64> = (0..period).into_par_iter().map(|k| cfg.value_at(k)).collect();
    let mut out = PeriodScan { period, min: values[0], k_min: 0, max: values[0], k_max: 0 };
    for (k, &v) in values.iter().enumerate() {
        if v < out.min {
            out.min = v;
            out.k_min = k as i64;
        }
        if v > out.max {
            out.max = v;
            out.k_max = k as i64;
        }
    }
    Ok(out)
}

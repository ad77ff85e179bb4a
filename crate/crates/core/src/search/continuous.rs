//! Continuous minima: along the real line for cosine sums and trigonometric
//! polynomials, and over the torus `(S¹)^d` for decomposed spectra.
//!
//! Both are grid-then-polish searches. They give upper estimates of the true
//! minimum; no interval certification is attempted.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision;
use crate::quadrature::TrigPolynomial;
use crate::spectrum::CosineConfig;
use crate::structure::GroupDecomposition;

const TAU: f64 = std::f64::consts::TAU;
const GRADIENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GridPolish,
    TorusGridPolish,
    TorusMultistartPolish,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousMinimum {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    /// Torus minimizer in turns (`ω_h = exp(2πi θ_h)`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_star: Option<Vec<f64>>,
    pub method: Method,
    pub certified_resolution: f64,
    pub derivative_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeOptions {
    /// Grid step; defaults to an eighth of the sampling bound.
    pub resolution: Option<f64>,
    /// Scan length for configurations without a rational period.
    pub horizon: f64,
    pub polish_iters: usize,
    pub candidates: usize,
}

impl Default for TimeOptions {
    fn default() -> Self {
        Self { resolution: None, horizon: 1e5, polish_iters: 100, candidates: 8 }
    }
}

const MAX_GRID_POINTS: f64 = 2e8;

/// Grid minimum of `f` over `[lo, hi]` with Newton polish of the best local
/// minima; `f` returns `(f, f', f'')`.
fn minimize_line(
    f: &(impl Fn(f64) -> (f64, f64, f64) + Sync),
    lo: f64,
    hi: f64,
    step: f64,
    opts: &TimeOptions,
) -> Result<(f64, f64, f64)> {
    let count = ((hi - lo) / step).ceil();
    if !(count.is_finite() && count <= MAX_GRID_POINTS) {
        return Err(Error::InvalidArgument(format!("grid of {count} points is too large")));
    }
    let count = count.max(1.0) as i64;
    let t_at = |i: i64| if i >= count { hi } else { lo + step * i as f64 };
    let value = |i: i64| f(t_at(i.clamp(0, count))).0;
    let chunk = 1 << 14;
    let keep = opts.candidates.max(1);
    let mut minima: Vec<(f64, i64)> = (0..=count / chunk)
        .into_par_iter()
        .flat_map_iter(|c| {
            let (a, b) = (c * chunk, ((c + 1) * chunk).min(count + 1));
            let mut local = Vec::new();
            let mut prev = value(a - 1);
            let mut cur = value(a);
            for i in a..b {
                let next = value(i + 1);
                if cur <= prev && cur <= next {
                    local.push((cur, i));
                }
                prev = cur;
                cur = next;
            }
            local.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            local.truncate(keep);
            local
        })
        .collect();
    minima.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    minima.truncate(keep);
    let mut best = (f64::INFINITY, lo, f64::INFINITY);
    for &(v, i) in &minima {
        let (a, b) = (t_at((i - 1).max(0)), t_at((i + 1).min(count)));
        let (t, fv, dv) = polish_line(f, t_at(i), a, b, opts.polish_iters);
        let cand = if fv <= v { (fv, t, dv.abs()) } else { (v, t_at(i), f(t_at(i)).1.abs()) };
        if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
            best = cand;
        }
    }
    Ok(best)
}

/// Safeguarded Newton on `f' = 0` inside `[a, b]`.
fn polish_line(f: &impl Fn(f64) -> (f64, f64, f64), t0: f64, a: f64, b: f64, iters: usize) -> (f64, f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let (dlo, dhi) = (f(lo).1, f(hi).1);
    let bracketed = dlo <= 0.0 && dhi >= 0.0;
    let mut t = t0;
    let mut cur = f(t);
    for _ in 0..iters {
        if cur.1.abs() < GRADIENT_TOL {
            break;
        }
        if bracketed {
            if cur.1 < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
        }
        let newton = if cur.2 > 0.0 { t - cur.1 / cur.2 } else { f64::NAN };
        let next = if newton > lo && newton < hi {
            newton
        } else if bracketed {
            0.5 * (lo + hi)
        } else {
            break;
        };
        let cand = f(next);
        if !bracketed && cand.0 > cur.0 {
            break;
        }
        t = next;
        cur = cand;
        if hi - lo < 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    (t, cur.0, cur.1)
}

/// `continuous_minimum_time`: grid plus polish of `Σ b_j cos(2π α_j t)` over
/// one period (rational `α`) or `[0, horizon]`.
pub fn continuous_minimum_time(cfg: &CosineConfig, opts: &TimeOptions) -> Result<ContinuousMinimum> {
    let limit = 1.0 / (4.0 * cfg.max_alpha());
    let step = opts.resolution.unwrap_or(limit / 8.0);
    if !(step > 0.0) || step > limit {
        return Err(Error::InvalidArgument(format!("resolution {step} is coarser than the sampling bound {limit}")));
    }
    let hi = cfg.rational_period().map_or(opts.horizon, |p| p as f64);
    let (value, t, derivative) = minimize_line(&|t| cfg.value_with_derivatives(t), 0.0, hi, step, opts)?;
    Ok(ContinuousMinimum {
        value,
        t_star: Some(t),
        theta_star: None,
        method: Method::GridPolish,
        certified_resolution: step,
        derivative_norm: derivative,
    })
}

/// `min_t Re Σ b_j e^{i q_j t}` over one period `[-π, π]`.
pub fn polynomial_minimum(poly: &TrigPolynomial, opts: &TimeOptions) -> Result<ContinuousMinimum> {
    let limit = TAU / (4.0 * poly.max_frequency().max(1) as f64);
    let step = opts.resolution.unwrap_or(limit / 8.0);
    if !(step > 0.0) || step > limit {
        return Err(Error::InvalidArgument(format!("resolution {step} is coarser than the sampling bound {limit}")));
    }
    let pi = std::f64::consts::PI;
    let (value, t, derivative) = minimize_line(&|t| poly.eval_real_with_derivatives(t), -pi, pi, step, opts)?;
    Ok(ContinuousMinimum {
        value,
        t_star: Some(t),
        theta_star: None,
        method: Method::GridPolish,
        certified_resolution: step,
        derivative_norm: derivative,
    })
}

/// `Re Σ_j b_j exp(2πi a_j·θ)` on `(S¹)^d`, `θ` in turns.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusFunction {
    coeffs: Vec<Complex64>,
    rows: Vec<Vec<i64>>,
    d: usize,
}

impl TorusFunction {
    pub fn new(coeffs: Vec<Complex64>, rows: Vec<Vec<i64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(Error::Degenerate("pure torsion: the torus has dimension 0".into()));
        }
        if coeffs.len() != rows.len() || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("coefficient and exponent rows disagree in shape".into()));
        }
        Ok(Self { coeffs, rows, d })
    }

    /// Identity torsion coset of a decomposed spectrum.
    pub fn from_decomposition(g: &GroupDecomposition, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs, g.exponent_matrix.clone())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn phase(row: &[i64], theta: &[f64]) -> f64 {
        let x: f64 = row.iter().zip(theta).map(|(a, t)| *a as f64 * t).sum();
        x - x.floor()
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.rows)
            .map(|(b, row)| {
                let (c, s) = precision::unit_circle(Self::phase(row, theta));
                b.re * c - b.im * s
            })
            .sum()
    }

    /// Value and first two derivatives along coordinate `h`.
    fn along(&self, theta: &[f64], h: usize) -> (f64, f64, f64) {
        let (mut f, mut df, mut d2f) = (0.0, 0.0, 0.0);
        for (b, row) in self.coeffs.iter().zip(&self.rows) {
            let (c, s) = precision::unit_circle(Self::phase(row, theta));
            let w = TAU * row[h] as f64;
            f += b.re * c - b.im * s;
            df += w * (-b.re * s - b.im * c);
            d2f += w * w * (-b.re * c + b.im * s);
        }
        (f, df, d2f)
    }

    pub fn gradient_norm(&self, theta: &[f64]) -> f64 {
        (0..self.d).map(|h| self.along(theta, h).1.powi(2)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusOptions {
    pub grid_per_dim: usize,
    pub max_grid_points: usize,
    pub polish_iters: usize,
    pub candidates: usize,
    /// Random starts for `d ≥ 4`.
    pub multistart: usize,
    pub seed: u64,
}

impl Default for TorusOptions {
    fn default() -> Self {
        Self { grid_per_dim: 512, max_grid_points: 1 << 22, polish_iters: 200, candidates: 16, multistart: 4096, seed: 0 }
    }
}

/// Coordinate-descent Newton with backtracking; returns the polished point.
fn polish_torus(f: &TorusFunction, start: &[f64], iters: usize) -> (Vec<f64>, f64) {
    let mut theta = start.to_vec();
    let mut value = f.value(&theta);
    for _ in 0..iters {
        for h in 0..f.d {
            let (_, df, d2f) = f.along(&theta, h);
            if df == 0.0 {
                continue;
            }
            let mut step = if d2f > 0.0 { -df / d2f } else { -df.signum() * 0.01 };
            step = step.clamp(-0.1, 0.1);
            for _ in 0..40 {
                let mut trial = theta.clone();
                trial[h] = (trial[h] + step).rem_euclid(1.0);
                let v = f.value(&trial);
                if v <= value {
                    theta = trial;
                    value = v;
                    break;
                }
                step *= 0.5;
            }
        }
        if f.gradient_norm(&theta) < GRADIENT_TOL {
            break;
        }
    }
    (theta, value)
}

fn grid_candidates(f: &TorusFunction, per_dim: usize, keep: usize) -> Vec<(f64, Vec<f64>)> {
    let n = per_dim as i64;
    let table: Vec<(f64, f64)> = (0..per_dim).map(|k| precision::unit_circle(k as f64 / per_dim as f64)).collect();
    let total = (per_dim as u64).pow(f.d as u32);
    let chunk = 1u64 << 14;
    let mut best: Vec<(f64, u64)> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut local: Vec<(f64, u64)> = Vec::new();
            let mut idx = vec![0i64; f.d];
            for lin in c * chunk..((c + 1) * chunk).min(total) {
                let mut rest = lin;
                for slot in idx.iter_mut() {
                    *slot = (rest % per_dim as u64) as i64;
                    rest /= per_dim as u64;
                }
                let v: f64 = f
                    .coeffs
                    .iter()
                    .zip(&f.rows)
                    .map(|(b, row)| {
                        let k = row.iter().zip(&idx).map(|(a, i)| a * i).sum::<i64>().rem_euclid(n) as usize;
                        b.re * table[k].0 - b.im * table[k].1
                    })
                    .sum();
                local.push((v, lin));
                if local.len() > 4 * keep {
                    local.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                    local.truncate(keep);
                }
            }
            local.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            local.truncate(keep);
            local
        })
        .collect();
    best.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    best.truncate(keep);
    best.into_iter()
        .map(|(v, lin)| {
            let mut rest = lin;
            let theta = (0..f.d)
                .map(|_| {
                    let i = rest % per_dim as u64;
                    rest /= per_dim as u64;
                    i as f64 / per_dim as f64
                })
                .collect();
            (v, theta)
        })
        .collect()
}

/// `continuous_minimum_torus`: grid (`d ≤ 3`) or seeded multistart (`d ≥ 4`)
/// followed by coordinate-descent polish.
pub fn continuous_minimum_torus(f: &TorusFunction, opts: &TorusOptions) -> Result<ContinuousMinimum> {
    let keep = opts.candidates.max(1);
    let (starts, method, resolution) = if f.d <= 3 {
        let cap = (opts.max_grid_points as f64).powf(1.0 / f.d as f64).floor() as usize;
        let per_dim = opts.grid_per_dim.min(cap).max(2);
        (grid_candidates(f, per_dim, keep), Method::TorusGridPolish, 1.0 / per_dim as f64)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut samples: Vec<(f64, Vec<f64>)> = (0..opts.multistart.max(1))
            .map(|_| {
                let theta: Vec<f64> = (0..f.d).map(|_| rng.gen::<f64>()).collect();
                (f.value(&theta), theta)
            })
            .collect();
        samples.sort_by(|x, y| x.0.total_cmp(&y.0));
        samples.truncate(keep);
        (samples, Method::TorusMultistartPolish, (opts.multistart.max(1) as f64).powf(-1.0 / f.d as f64))
    };
    let polished: Vec<(Vec<f64>, f64)> = starts.par_iter().map(|(_, t)| polish_torus(f, t, opts.polish_iters)).collect();
    let (theta, value) = polished
        .into_iter()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one start");
    Ok(ContinuousMinimum {
        value,
        t_star: None,
        derivative_norm: f.gradient_norm(&theta),
        theta_star: Some(theta),
        method,
        certified_resolution: resolution,
    })
}

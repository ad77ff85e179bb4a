//! Integer-frequency trigonometric polynomials and the `L¹` norm
//! `∫_{-π}^{π} |Σ b_j e^{i q_j t}| dt` by adaptive Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const L1_REL_TOL: f64 = 1e-6;
const MAX_PANELS: usize = 200_000;
const REAL_TOL: f64 = 1e-12;

/// `Σ b_j e^{i q_j t}` with distinct integer frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPolynomial {
    terms: Vec<(Complex64, i64)>,
}

impl TrigPolynomial {
    pub fn new(terms: Vec<(Complex64, i64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyConfig);
        }
        for (j, (b, q)) in terms.iter().enumerate() {
            if *b == Complex64::new(0.0, 0.0) || !b.re.is_finite() || !b.im.is_finite() {
                return Err(Error::InvalidCoefficient(format!("b at term {j} must be finite and nonzero")));
            }
            if terms[..j].iter().any(|(_, p)| p == q) {
                return Err(Error::InvalidArgument(format!("frequency {q} repeated")));
            }
        }
        Ok(Self { terms })
    }

    /// `Σ_{j=1}^n e^{ijt}`.
    pub fn dirichlet(n: usize) -> Result<Self> {
        Self::new((1..=n as i64).map(|q| (Complex64::new(1.0, 0.0), q)).collect())
    }

    pub fn terms(&self) -> &[(Complex64, i64)] {
        &self.terms
    }

    pub fn n(&self) -> usize {
        self.terms.len()
    }

    pub fn min_abs(&self) -> f64 {
        self.terms.iter().map(|(b, _)| b.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_frequency(&self) -> i64 {
        self.terms.iter().map(|(_, q)| q.abs()).max().unwrap_or(0)
    }

    pub fn all_frequencies_nonzero(&self) -> bool {
        self.terms.iter().all(|(_, q)| *q != 0)
    }

    /// Real for all real `t`: the coefficient of `-q` is `conj` of that of `q`.
    pub fn is_real_valued(&self) -> bool {
        let scale = self.terms.iter().map(|(b, _)| b.norm()).fold(1.0, f64::max);
        self.terms.iter().all(|(b, q)| {
            self.terms
                .iter()
                .find(|(_, p)| *p == -*q)
                .is_some_and(|(c, _)| (c - b.conj()).norm() <= REAL_TOL * scale)
        })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(b, q)| {
                let x = (*q as f64 * t).rem_euclid(2.0 * PI);
                b * Complex64::new(x.cos(), x.sin())
            })
            .sum()
    }

    /// `Re f(t)` and its first two derivatives.
    pub fn eval_real_with_derivatives(&self, t: f64) -> (f64, f64, f64) {
        let (mut f, mut df, mut d2f) = (0.0, 0.0, 0.0);
        for (b, q) in &self.terms {
            let qf = *q as f64;
            let x = (qf * t).rem_euclid(2.0 * PI);
            let (s, c) = x.sin_cos();
            f += b.re * c - b.im * s;
            df += qf * (-b.re * s - b.im * c);
            d2f += qf * qf * (-b.re * c + b.im * s);
        }
        (f, df, d2f)
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7–K15 panel: `(kronrod, |kronrod - gauss|)`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1Estimate {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Adaptive quadrature of `f` over sorted breakpoints to relative error `rel_tol`.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, breakpoints: &[f64], rel_tol: f64) -> Result<L1Estimate> {
    let mut heap = BinaryHeap::new();
    let (mut total, mut error) = (0.0, 0.0);
    for w in breakpoints.windows(2) {
        let (value, err) = gk15(&f, w[0], w[1]);
        total += value;
        error += err;
        heap.push(Panel { a: w[0], b: w[1], value, error: err });
    }
    while error > rel_tol * total.abs() {
        if heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergence { estimate: total, error_estimate: error });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence { estimate: total, error_estimate: error });
        }
        total -= worst.value;
        error -= worst.error;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk15(&f, a, b);
            total += value;
            error += err;
            heap.push(Panel { a, b, value, error: err });
        }
    }
    // Re-sum to shed drift from the running updates.
    let panels: Vec<Panel> = heap.into_vec();
    let value = panels.iter().map(|p| p.value).sum();
    let error_estimate = panels.iter().map(|p| p.error).sum();
    Ok(L1Estimate { value, error_estimate, panels: panels.len() })
}

/// Zeros of a real-valued polynomial located by bisection between grid points.
fn sign_change_points(poly: &TrigPolynomial, grid: &[f64]) -> Vec<f64> {
    let g = |t: f64| poly.eval_real_with_derivatives(t).0;
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut fa, fb) = (g(a), g(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = g(m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// `l1_norm`: `∫_{-π}^{π} |f(t)| dt` to relative error `1e-6`.
pub fn l1_norm(poly: &TrigPolynomial) -> Result<L1Estimate> {
    l1_norm_with(poly, 16, L1_REL_TOL)
}

/// As [`l1_norm`] with `panels_per_frequency` initial panels per unit of the
/// largest frequency.
pub fn l1_norm_with(poly: &TrigPolynomial, panels_per_frequency: usize, rel_tol: f64) -> Result<L1Estimate> {
    let count = panels_per_frequency * (poly.max_frequency() as usize + 1);
    let step = 2.0 * PI / count as f64;
    let mut points: Vec<f64> = (0..=count).map(|i| -PI + step * i as f64).collect();
    points[count] = PI;
    if poly.is_real_valued() {
        let sample: Vec<f64> = (0..=4 * count).map(|i| -PI + step / 4.0 * i as f64).collect();
        points.extend(sign_change_points(poly, &sample));
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    }
    integrate_adaptive(|t| poly.eval(t).norm(), &points, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn analytic_cases() {
        let cos2 = TrigPolynomial::new(vec![(c(1.0), 1), (c(1.0), -1)]).unwrap();
        assert!(cos2.is_real_valued());
        assert!((l1_norm(&cos2).unwrap().value - 8.0).abs() < 8e-6);
        let single = TrigPolynomial::new(vec![(c(1.0), 1)]).unwrap();
        assert!(!single.is_real_valued());
        assert!((l1_norm(&single).unwrap().value - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn dirichlet_kernels_match_reference() {
        // High-precision reference values.
        for (n, reference) in [
            (2, 8.0),
            (5, 10.3181742478078676),
            (10, 12.0810170580445014),
            (20, 13.8455379244501451),
        ] {
            let got = l1_norm(&TrigPolynomial::dirichlet(n).unwrap()).unwrap().value;
            assert!((got - reference).abs() <= 1e-6 * reference, "n={n}: {got}");
            let coarse = l1_norm_with(&TrigPolynomial::dirichlet(n).unwrap(), 4, 1e-9).unwrap().value;
            assert!((got - coarse).abs() <= 1e-6 * reference);
        }
    }

    #[test]
    fn rejects_repeated_frequencies() {
        assert!(TrigPolynomial::new(vec![(c(1.0), 2), (c(2.0), 2)]).is_err());
        assert!(TrigPolynomial::new(vec![(c(0.0), 2)]).is_err());
    }

    #[test]
    fn real_part_derivatives_match_finite_differences() {
        let p = TrigPolynomial::new(vec![(Complex64::new(1.0, 2.0), 3), (Complex64::new(1.0, -2.0), -3), (c(0.5), 1), (c(0.5), -1)])
            .unwrap();
        let h = 1e-5;
        for t in [-2.0, 0.1, 1.7] {
            let (f, df, d2f) = p.eval_real_with_derivatives(t);
            assert!((f - p.eval(t).re).abs() < 1e-12);
            let (fp, fm) = (p.eval(t + h).re, p.eval(t - h).re);
            assert!((df - (fp - fm) / (2.0 * h)).abs() < 1e-6);
            assert!((d2f - (fp - 2.0 * f + fm) / (h * h)).abs() < 1e-3);
        }
    }
}

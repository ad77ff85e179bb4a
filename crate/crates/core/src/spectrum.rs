//! Conjugate-closed spectra `s_k = Σ b_j z_j^k` and cosine sums
//! `f(t) = Σ b_j cos(2π α_j t)`.

use num::complex::Complex64;
use num::{BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::angle::{Angle, BasisDecl};
use crate::error::{Error, Result};
use crate::precision::{self, DoubleDouble, Phase};
use crate::relation;

/// Base tolerance on `|Im s_k|`; scaled by `max(1, n·max|b|)`.
pub const IMAG_TOL: f64 = 1e-9;

/// A coefficient `b_j`, exact when given as a decimal or rational literal.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Rational(BigRational),
    Complex(Complex64),
}

impl Coefficient {
    pub fn one() -> Self {
        Coefficient::Rational(BigRational::one())
    }

    pub fn real(x: f64) -> Self {
        Coefficient::Complex(Complex64::new(x, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Coefficient::Complex(Complex64::new(re, im))
    }

    pub fn integer(v: i64) -> Self {
        Coefficient::Rational(BigRational::from_integer(v.into()))
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Coefficient::Rational(r) => Complex64::new(precision::rational_to_f64(r), 0.0),
            Coefficient::Complex(c) => *c,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn conj(&self) -> Self {
        match self {
            Coefficient::Rational(r) => Coefficient::Rational(r.clone()),
            Coefficient::Complex(c) => Coefficient::Complex(c.conj()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_zero(),
            Coefficient::Complex(c) => c.norm() == 0.0,
        }
    }

    pub fn is_positive_real(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_positive(),
            Coefficient::Complex(c) => c.im == 0.0 && c.re > 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_one(),
            Coefficient::Complex(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    fn approx_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => a == b,
            _ => {
                let (a, b) = (self.to_complex(), other.to_complex());
                (a - b).norm() <= 1e-12 * a.norm().max(b.norm()).max(1.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub b: Coefficient,
    pub angle: Angle,
}

impl Node {
    pub fn new(b: Coefficient, angle: Angle) -> Self {
        Self { b, angle }
    }
}

/// A list of `(b_j, α_j)` defining `s_k = Σ b_j exp(2πi k α_j)`.
#[derive(Debug, Clone)]
pub struct SpectrumConfig {
    basis: BasisDecl,
    nodes: Vec<Node>,
    values: Vec<BigRational>,
    phases: Vec<Phase>,
    pairing: Option<Vec<usize>>,
}

/// Whether two angle values coincide mod 1 at the precision they carry.
fn same_point(a: &Angle, va: &BigRational, b: &Angle, vb: &BigRational, basis: &BasisDecl) -> bool {
    if a.is_exact() && b.is_exact() {
        return a == b;
    }
    let d = precision::frac_rational(&(va - vb));
    let dist = std::cmp::min(d.clone(), BigRational::one() - d);
    let bits = a.precision_bits(basis).min(b.precision_bits(basis)).min(1000);
    precision::below_pow2(&dist, bits.saturating_sub(1))
}

impl SpectrumConfig {
    /// Builds a spectrum, rejecting structural errors only.
    pub fn new(basis: BasisDecl, nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyConfig);
        }
        let mut values = Vec::with_capacity(nodes.len());
        let mut phases = Vec::with_capacity(nodes.len());
        for (j, node) in nodes.iter().enumerate() {
            if node.b.is_zero() {
                return Err(Error::InvalidCoefficient(format!("b at node {j} is zero")));
            }
            let v = node.angle.value_exact(&basis)?;
            phases.push(Phase::from_rational(&v));
            values.push(v);
        }
        let mut cfg = Self { basis, nodes, values, phases, pairing: None };
        cfg.pairing = cfg.find_pairing();
        Ok(cfg)
    }

    /// Spectrum with rational angles `p/q` and unit coefficients.
    pub fn unit_rational(angles: &[(i64, i64)]) -> Result<Self> {
        let nodes = angles
            .iter()
            .map(|&(p, q)| Node::new(Coefficient::one(), Angle::rational(p, q, 0)))
            .collect();
        Self::new(BasisDecl::empty(), nodes)
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn basis(&self) -> &BasisDecl {
        &self.basis
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    /// Exact decimal value of each angle in `[0, 1)`.
    pub fn angle_values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.nodes.iter().map(|n| n.b.to_complex()).collect()
    }

    /// Partner index of each node under `(b, α) ↦ (conj b, -α)`, if closed.
    pub fn pairing(&self) -> Option<&[usize]> {
        self.pairing.as_deref()
    }

    pub fn is_conjugate_closed(&self) -> bool {
        self.pairing.is_some()
    }

    pub fn all_exact(&self) -> bool {
        self.nodes.iter().all(|n| n.angle.is_exact())
    }

    pub fn all_positive_real(&self) -> bool {
        self.nodes.iter().all(|n| n.b.is_positive_real())
    }

    pub fn all_unit_coefficients(&self) -> bool {
        self.nodes.iter().all(|n| n.b.is_one())
    }

    pub fn abs_sum(&self) -> f64 {
        self.nodes.iter().map(|n| n.b.abs()).sum()
    }

    pub fn abs_sq_sum(&self) -> f64 {
        self.nodes.iter().map(|n| n.b.abs().powi(2)).sum()
    }

    pub fn min_abs(&self) -> f64 {
        self.nodes.iter().map(|n| n.b.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.nodes.iter().map(|n| n.b.abs()).fold(0.0, f64::max)
    }

    /// Index of a node with `z = 1`.
    pub fn unit_root(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.angle.is_zero())
    }

    /// Index of a node with `z = -1`.
    pub fn minus_one(&self) -> Option<usize> {
        self.minus_one_nodes().first().copied()
    }

    /// Indices of every node with `z = -1`.
    pub fn minus_one_nodes(&self) -> Vec<usize> {
        let half = BigRational::new(1.into(), 2.into());
        (0..self.n()).filter(|&j| match &self.nodes[j].angle {
            Angle::Exact { .. } => self.nodes[j].angle.as_rational() == Some(num::rational::Rational64::new(1, 2)),
            Angle::Float { .. } => same_point(
                &self.nodes[j].angle,
                &self.values[j],
                &Angle::rational(1, 2, 0),
                &half,
                &self.basis,
            ),
        })
        .collect()
    }

    pub fn same_angle(&self, i: usize, j: usize) -> bool {
        same_point(&self.nodes[i].angle, &self.values[i], &self.nodes[j].angle, &self.values[j], &self.basis)
    }

    /// First pair of nodes sharing an angle.
    pub fn repeated_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if self.same_angle(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// `lcm` of the angle denominators when every angle is rational.
    pub fn rational_period(&self) -> Option<i64> {
        let dens: Option<Vec<i64>> = self.phases.iter().map(|p| p.denominator()).collect();
        precision::checked_lcm(dens?)
    }

    fn find_pairing(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let negated: Vec<(Angle, BigRational)> = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(node, v)| (node.angle.negate(), precision::frac_rational(&-v)))
            .collect();
        let mut partner = vec![usize::MAX; n];
        for i in 0..n {
            if partner[i] != usize::MAX {
                continue;
            }
            let target_b = self.nodes[i].b.conj();
            let (neg, neg_v) = &negated[i];
            let found = (i..n).find(|&j| {
                partner[j] == usize::MAX
                    && same_point(neg, neg_v, &self.nodes[j].angle, &self.values[j], &self.basis)
                    && self.nodes[j].b.approx_eq(&target_b)
            })?;
            partner[i] = found;
            partner[found] = i;
        }
        Some(partner)
    }

    /// Complex sum `Σ b_j exp(2πi k α_j)` without the realness check.
    pub fn complex_sum(&self, k: i64) -> Result<Complex64> {
        if k.abs() >= precision::MAX_PHASE_INDEX {
            return Err(Error::IndexOutOfRange(k));
        }
        Ok(self
            .nodes
            .iter()
            .zip(&self.phases)
            .map(|(node, phase)| {
                let (c, s) = precision::unit_circle(phase.frac_mul(k));
                node.b.to_complex() * Complex64::new(c, s)
            })
            .sum())
    }

    pub fn imag_tolerance(&self) -> f64 {
        IMAG_TOL * (self.n() as f64 * self.max_abs()).max(1.0)
    }

    /// Evaluator over `k` for conjugate-closed spectra.
    pub fn evaluator(&self) -> Result<PowerSumEvaluator> {
        PowerSumEvaluator::new(self)
    }
}

/// `eval_power_sum`: `Re Σ b_j z_j^k`, failing when the imaginary residue
/// exceeds the realness tolerance.
pub fn eval_power_sum(cfg: &SpectrumConfig, k: i64) -> Result<f64> {
    let s = cfg.complex_sum(k)?;
    let tolerance = cfg.imag_tolerance();
    if s.im.abs() >= tolerance {
        return Err(Error::ImaginaryResidue { k, residue: s.im.abs(), tolerance });
    }
    Ok(s.re)
}

/// Fast real-valued evaluation of `s_k` using conjugate pairs.
#[derive(Debug, Clone)]
pub struct PowerSumEvaluator {
    terms: Vec<(f64, Complex64, Phase)>,
}

impl PowerSumEvaluator {
    pub fn new(cfg: &SpectrumConfig) -> Result<Self> {
        let pairing = cfg.pairing().ok_or(Error::NotConjugateClosed)?;
        let mut terms = Vec::new();
        for (i, &j) in pairing.iter().enumerate() {
            if j < i {
                continue;
            }
            let weight = if i == j { 1.0 } else { 2.0 };
            terms.push((weight, cfg.nodes()[i].b.to_complex(), cfg.phases()[i]));
        }
        Ok(Self { terms })
    }

    #[inline]
    pub fn value(&self, k: i64) -> f64 {
        self.terms
            .iter()
            .map(|(w, b, phase)| {
                let (c, s) = precision::unit_circle(phase.frac_mul(k));
                w * (b.re * c - b.im * s)
            })
            .sum()
    }
}

/// Outcome of `validate_config`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub conjugate_closed: bool,
    pub pairing: Option<Vec<usize>>,
    pub no_unit_root: bool,
    pub distinct: bool,
    pub all_positive_real: bool,
    pub all_exact: bool,
    pub theorem1_hypotheses: bool,
    pub theorem2_hypotheses: bool,
    pub issues: Vec<String>,
    pub warnings: Vec<String>,
}

/// Reports which hypotheses of the general and positive-coefficient bounds hold.
pub fn validate_config(cfg: &SpectrumConfig) -> ValidationReport {
    let mut issues = Vec::new();
    let conjugate_closed = cfg.is_conjugate_closed();
    if !conjugate_closed {
        issues.push("not conjugate-closed: some (b, z) has no (conj b, conj z) partner".to_string());
    }
    let unit = cfg.unit_root();
    if let Some(j) = unit {
        issues.push(format!("node {j} has z = 1"));
    }
    let repeated = cfg.repeated_pair();
    if let Some((i, j)) = repeated {
        issues.push(format!("nodes {i} and {j} share an angle"));
    }
    let all_positive_real = cfg.all_positive_real();
    let base = conjugate_closed && unit.is_none();
    let theorem1_hypotheses = base && repeated.is_none();
    let theorem2_hypotheses = base && all_positive_real;
    let mut warnings = Vec::new();
    if !cfg.basis().is_empty() {
        if let Ok(relations) = relation::basis_relation_scan(cfg.basis()) {
            for rel in relations {
                warnings.push(format!(
                    "declared basis values satisfy the integer relation {:?} numerically",
                    rel.coeffs
                ));
            }
        }
    }
    ValidationReport {
        n: cfg.n(),
        conjugate_closed,
        pairing: cfg.pairing().map(<[usize]>::to_vec),
        no_unit_root: unit.is_none(),
        distinct: repeated.is_none(),
        all_positive_real,
        all_exact: cfg.all_exact(),
        theorem1_hypotheses,
        theorem2_hypotheses,
        issues,
        warnings,
    }
}

/// `collapse_repeats`: merges equal angles, summing their (positive real)
/// coefficients.
pub fn collapse_repeats(cfg: &SpectrumConfig) -> Result<SpectrumConfig> {
    if cfg.repeated_pair().is_none() {
        return Ok(cfg.clone());
    }
    if let Some(j) = cfg.nodes().iter().position(|n| !n.b.is_positive_real()) {
        return Err(Error::InvalidCoefficient(format!(
            "node {j}: merging repeated angles requires positive real coefficients"
        )));
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for j in 0..cfg.n() {
        match groups.iter_mut().find(|(rep, _)| cfg.same_angle(*rep, j)) {
            Some((_, members)) => members.push(j),
            None => groups.push((j, vec![j])),
        }
    }
    let nodes: Vec<Node> = groups
        .iter()
        .map(|(rep, members)| {
            let exact: Option<BigRational> = members
                .iter()
                .map(|&m| match &cfg.nodes()[m].b {
                    Coefficient::Rational(r) => Some(r.clone()),
                    Coefficient::Complex(_) => None,
                })
                .sum();
            let b = match exact {
                Some(r) => Coefficient::Rational(r),
                None => Coefficient::real(members.iter().map(|&m| cfg.nodes()[m].b.to_complex().re).sum()),
            };
            Node::new(b, cfg.nodes()[*rep].angle.clone())
        })
        .collect();
    let merged = SpectrumConfig::new(cfg.basis().clone(), nodes)?;

    let exact_sum = |c: &SpectrumConfig| -> Option<BigRational> {
        c.nodes()
            .iter()
            .map(|n| match &n.b {
                Coefficient::Rational(r) => Some(r.clone()),
                Coefficient::Complex(_) => None,
            })
            .sum()
    };
    match (exact_sum(cfg), exact_sum(&merged)) {
        (Some(before), Some(after)) if before != after => {
            return Err(Error::InvalidCoefficient("coefficient sum not conserved".into()));
        }
        (Some(_), Some(_)) => {}
        _ => {
            let (before, after) = (cfg.abs_sum(), merged.abs_sum());
            if (before - after).abs() > 1e-12 * before {
                return Err(Error::InvalidCoefficient("coefficient sum not conserved".into()));
            }
        }
    }
    if merged.abs_sq_sum() < cfg.abs_sq_sum() * (1.0 - 1e-12) {
        return Err(Error::InvalidCoefficient("sum of squares decreased while merging".into()));
    }
    Ok(merged)
}

/// The tightness example `z_j = ζ^j`, `ζ = exp(2πi/(n+1))`, `b_j = 1`.
pub fn extremal_example(n: usize) -> Result<SpectrumConfig> {
    if n < 1 {
        return Err(Error::InvalidArgument("extremal example needs n ≥ 1".into()));
    }
    let q = n as i64 + 1;
    let angles: Vec<(i64, i64)> = (1..q).map(|j| (j, q)).collect();
    SpectrumConfig::unit_rational(&angles)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosineTerm {
    pub b: f64,
    pub alpha: Angle,
}

/// `f(t) = Σ_{j=1}^m b_j cos(2π α_j t)` with distinct `α_j ∈ (0, 1/2)`.
#[derive(Debug, Clone)]
pub struct CosineConfig {
    basis: BasisDecl,
    terms: Vec<CosineTerm>,
    phases: Vec<Phase>,
    dd: Vec<DoubleDouble>,
}

impl CosineConfig {
    pub fn new(basis: BasisDecl, terms: Vec<CosineTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyConfig);
        }
        let half = BigRational::new(1.into(), 2.into());
        let mut phases = Vec::new();
        let mut dd = Vec::new();
        let mut values: Vec<BigRational> = Vec::new();
        for (j, term) in terms.iter().enumerate() {
            if !term.b.is_finite() {
                return Err(Error::InvalidCoefficient(format!("b at term {j} is not finite")));
            }
            let v = term.alpha.value_exact(&basis)?;
            if !(v.is_positive() && v < half) {
                return Err(Error::InvalidAngle(format!("alpha at term {j} must lie strictly in (0, 1/2)")));
            }
            if let Some(i) = (0..j).find(|&i| {
                same_point(&terms[i].alpha, &values[i], &term.alpha, &v, &basis)
            }) {
                return Err(Error::RepeatedAngle(i, j));
            }
            phases.push(Phase::from_rational(&v));
            dd.push(DoubleDouble::from_rational(&v));
            values.push(v);
        }
        Ok(Self { basis, terms, phases, dd })
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[CosineTerm] {
        &self.terms
    }

    pub fn basis(&self) -> &BasisDecl {
        &self.basis
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    pub fn all_exact(&self) -> bool {
        self.terms.iter().all(|t| t.alpha.is_exact())
    }

    pub fn abs_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.b.abs()).sum()
    }

    pub fn min_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.b.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_alpha(&self) -> f64 {
        self.dd.iter().map(|d| d.to_f64()).fold(0.0, f64::max)
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.dd.iter().map(|d| d.to_f64()).collect()
    }

    /// Common period `lcm(q_j)` when all `α_j` are rational.
    pub fn rational_period(&self) -> Option<i64> {
        let dens: Option<Vec<i64>> = self.phases.iter().map(|p| p.denominator()).collect();
        precision::checked_lcm(dens?)
    }

    /// `f(k)` at an integer, with exact phase reduction.
    #[inline]
    pub fn value_at(&self, k: i64) -> f64 {
        self.terms
            .iter()
            .zip(&self.phases)
            .map(|(t, p)| t.b * precision::unit_circle(p.frac_mul(k)).0)
            .sum()
    }

    /// `f(t)` and `f'(t)`, `f''(t)` at real `t`.
    pub fn value_with_derivatives(&self, t: f64) -> (f64, f64, f64) {
        let mut f = 0.0;
        let mut df = 0.0;
        let mut d2f = 0.0;
        for (term, dd) in self.terms.iter().zip(&self.dd) {
            let x = frac_mul_real(*dd, t);
            let (c, s) = precision::unit_circle(x);
            let w = std::f64::consts::TAU * dd.to_f64();
            f += term.b * c;
            df -= term.b * w * s;
            d2f -= term.b * w * w * c;
        }
        (f, df, d2f)
    }

    /// The equivalent `2m`-node spectrum; its power sum equals `2 f(k)`.
    pub fn to_spectrum(&self) -> Result<SpectrumConfig> {
        let mut nodes = Vec::with_capacity(2 * self.m());
        for t in &self.terms {
            nodes.push(Node::new(Coefficient::real(t.b), t.alpha.clone()));
        }
        for t in self.terms.iter().rev() {
            nodes.push(Node::new(Coefficient::real(t.b), t.alpha.negate()));
        }
        SpectrumConfig::new(self.basis.clone(), nodes)
    }
}

/// `frac(α t)` for real `t` from a double-double `α`.
fn frac_mul_real(alpha: DoubleDouble, t: f64) -> f64 {
    let p = alpha.hi * t;
    let e = alpha.hi.mul_add(t, -p);
    let r = p - p.floor();
    let x = r + (e + alpha.lo * t);
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `eval_cosine_sum`: `Σ b_j cos(2π α_j t)` for real `t`; integral `t`
/// uses exact phase reduction.
pub fn eval_cosine_sum(cfg: &CosineConfig, t: f64) -> f64 {
    if t.fract() == 0.0 && t.abs() < precision::MAX_PHASE_INDEX as f64 {
        cfg.value_at(t as i64)
    } else {
        cfg.value_with_derivatives(t).0
    }
}

//! Degeneracy detection and the multiplicative structure of a spectrum.
//!
//! On exact angles `α_j = r_j + Σ_h a_{jh} β_h` the group generated by the
//! `z_j` decomposes syntactically: the torsion part is generated by
//! `μ = exp(2πi/|T|)` with `|T| = lcm(denominators of r_j)`, and the free part
//! by `w_h = exp(2πi β_h)`. Degeneracy (a ratio `z_i/z_j` that is a root of
//! unity) is then decided exactly.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num::complex::Complex64;
use num::{BigRational, ToPrimitive, Zero};
use serde::Serialize;

use crate::angle::{Angle, BasisDecl};
use crate::error::{Error, Result};
use crate::precision;
use crate::relation;
use crate::spectrum::{Coefficient, CosineConfig, Node, SpectrumConfig};

/// Audit witness for a degenerate configuration (node indices are 0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegeneracyWitness {
    /// `(z_i / z_j)^order = 1`.
    Ratio { i: usize, j: usize, order: u64 },
    /// `z_i^order = 1`; `order = 2` is the node `z_i = -1`.
    RootOfUnity { i: usize, order: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    NonDegenerate,
    Degenerate { witness: DegeneracyWitness, heuristic: bool },
    HeuristicNonDegenerate { note: String },
}

/// Proof token for the non-degenerate case, issued only by
/// [`detect_degeneracy`] on exact angles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonDegenerate {
    n: usize,
    fingerprint: u64,
}

impl NonDegenerate {
    pub fn matches(&self, cfg: &SpectrumConfig) -> bool {
        self.n == cfg.n() && self.fingerprint == fingerprint(cfg)
    }
}

fn fingerprint(cfg: &SpectrumConfig) -> u64 {
    let mut h = DefaultHasher::new();
    for node in cfg.nodes() {
        node.angle.hash(&mut h);
        match &node.b {
            Coefficient::Rational(r) => r.hash(&mut h),
            Coefficient::Complex(c) => {
                c.re.to_bits().hash(&mut h);
                c.im.to_bits().hash(&mut h);
            }
        }
    }
    cfg.basis().literals().hash(&mut h);
    h.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip)]
    token: Option<NonDegenerate>,
}

impl DegeneracyVerdict {
    pub fn token(&self) -> Option<&NonDegenerate> {
        self.token.as_ref()
    }

    pub fn witness(&self) -> Option<&DegeneracyWitness> {
        match &self.verdict {
            Verdict::Degenerate { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.verdict, Verdict::Degenerate { .. })
    }
}

fn exact_pair_witness(cfg: &SpectrumConfig, i: usize, j: usize) -> Option<DegeneracyWitness> {
    let (r, coeffs) = cfg.nodes()[i].angle.exact_difference(&cfg.nodes()[j].angle)?;
    coeffs
        .iter()
        .all(|c| *c == 0)
        .then(|| DegeneracyWitness::Ratio { i, j, order: *r.denom() as u64 })
}

/// Float path: `recognize_rational` at half the available precision.
fn float_settings(cfg: &SpectrumConfig) -> (u32, u64) {
    let bits = cfg
        .nodes()
        .iter()
        .map(|n| n.angle.precision_bits(cfg.basis()))
        .min()
        .unwrap_or(u32::MAX)
        .min(relation::default_precision_bits());
    let height = relation::max_feasible_height(1, bits).min(relation::DEFAULT_HEIGHT_LIMIT);
    (bits, height)
}

/// Short literals such as `0.2` are exact decimals: an exactly rational value
/// with a small denominator is accepted regardless of the literal's precision.
fn float_rational_order(x: &BigRational, bits: u32, height: u64) -> Option<u64> {
    let f = precision::frac_rational(x);
    if let Some(q) = f.denom().to_u64().filter(|&q| q <= relation::DEFAULT_HEIGHT_LIMIT) {
        return Some(q);
    }
    relation::recognize_rational(x, height, bits / 2).map(|(_, q)| q)
}

fn pair_witness(cfg: &SpectrumConfig, i: usize, j: usize, float: Option<(u32, u64)>) -> Option<DegeneracyWitness> {
    match float {
        None => exact_pair_witness(cfg, i, j),
        Some((bits, height)) => {
            let v = cfg.angle_values();
            float_rational_order(&(&v[i] - &v[j]), bits, height).map(|order| DegeneracyWitness::Ratio { i, j, order })
        }
    }
}

fn self_witness(cfg: &SpectrumConfig, i: usize, float: Option<(u32, u64)>) -> Option<DegeneracyWitness> {
    match float {
        None => cfg.nodes()[i]
            .angle
            .as_rational()
            .map(|r| DegeneracyWitness::RootOfUnity { i, order: *r.denom() as u64 }),
        Some((bits, height)) => float_rational_order(&cfg.angle_values()[i], bits, height)
            .map(|order| DegeneracyWitness::RootOfUnity { i, order }),
    }
}

/// First pair `i < j` whose ratio `z_i/z_j` is a root of unity.
pub fn ratio_witness(cfg: &SpectrumConfig) -> Option<DegeneracyWitness> {
    let float = (!cfg.all_exact()).then(|| float_settings(cfg));
    (0..cfg.n()).find_map(|i| (i + 1..cfg.n()).find_map(|j| pair_witness(cfg, i, j, float)))
}

/// `detect_degeneracy`: exact on exact angles; float angles get a heuristic
/// rational-recognition scan.
pub fn detect_degeneracy(cfg: &SpectrumConfig) -> DegeneracyVerdict {
    let float = (!cfg.all_exact()).then(|| float_settings(cfg));
    let witness = ratio_witness(cfg).or_else(|| (0..cfg.n()).find_map(|i| self_witness(cfg, i, float)));
    match (witness, float) {
        (Some(witness), _) => DegeneracyVerdict {
            verdict: Verdict::Degenerate { witness, heuristic: float.is_some() },
            token: None,
        },
        (None, None) => DegeneracyVerdict {
            verdict: Verdict::NonDegenerate,
            token: Some(NonDegenerate { n: cfg.n(), fingerprint: fingerprint(cfg) }),
        },
        (None, Some((bits, height))) => DegeneracyVerdict {
            verdict: Verdict::HeuristicNonDegenerate {
                note: format!(
                    "no rational angle or angle difference with denominator ≤ {height} within 2^-{} at {bits} bits",
                    bits / 2
                ),
            },
            token: None,
        },
    }
}

/// Checks a witness by exact arithmetic: `order · (α_i - α_j) ≡ 0 (mod 1)`.
pub fn witness_holds(cfg: &SpectrumConfig, witness: &DegeneracyWitness) -> Result<bool> {
    let (value, order) = match *witness {
        DegeneracyWitness::Ratio { i, j, order } => {
            let v = cfg.angle_values();
            (&v[i] - &v[j], order)
        }
        DegeneracyWitness::RootOfUnity { i, order } => (cfg.angle_values()[i].clone(), order),
    };
    let scaled = value * BigRational::from_integer(order.into());
    Ok(precision::frac_rational(&scaled).is_zero())
}

/// The decomposition `z_j = μ^{r_j} Π_h w_h^{a_{jh}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupDecomposition {
    pub torsion_order: i64,
    pub torsion_exponents: Vec<i64>,
    pub rank: usize,
    pub exponent_matrix: Vec<Vec<i64>>,
    /// Partner of each node under complex conjugation, when closed.
    pub pairing: Option<Vec<usize>>,
    pub basis_labels: Vec<String>,
    #[serde(skip)]
    basis: BasisDecl,
}

impl GroupDecomposition {
    pub fn n(&self) -> usize {
        self.exponent_matrix.len()
    }

    pub fn basis(&self) -> &BasisDecl {
        &self.basis
    }

    /// `r_j/|T| + Σ_h a_{jh} β_h`.
    pub fn reconstruct(&self, j: usize) -> Angle {
        Angle::combination(self.torsion_exponents[j], self.torsion_order, self.exponent_matrix[j].clone())
    }

    /// `a_{partner(j), h} = -a_{j, h}` for all `j, h`.
    pub fn pairing_holds(&self) -> bool {
        match &self.pairing {
            None => false,
            Some(p) => p.iter().enumerate().all(|(j, &pj)| {
                self.exponent_matrix[pj].iter().zip(&self.exponent_matrix[j]).all(|(a, b)| *a == -*b)
            }),
        }
    }

    fn check_rows(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Degenerate("pure torsion: no free generators".into()));
        }
        for (j, row) in self.exponent_matrix.iter().enumerate() {
            if row.iter().all(|a| *a == 0) {
                return Err(Error::Degenerate(format!("node {j} is a root of unity (zero exponent row)")));
            }
            if let Some(i) = (0..j).find(|&i| self.exponent_matrix[i] == *row) {
                return Err(Error::Degenerate(format!("nodes {i} and {j} share an exponent row")));
            }
        }
        Ok(())
    }
}

/// `group_decompose`: syntactic decomposition of exact angles.
pub fn group_decompose(cfg: &SpectrumConfig) -> Result<GroupDecomposition> {
    let mut rationals = Vec::with_capacity(cfg.n());
    let mut rows = Vec::with_capacity(cfg.n());
    for node in cfg.nodes() {
        match &node.angle {
            Angle::Exact { rational, coeffs } => {
                rationals.push(*rational);
                rows.push(coeffs.clone());
            }
            Angle::Float { .. } => return Err(Error::FloatAngle),
        }
    }
    let torsion_order = precision::checked_lcm(rationals.iter().map(|r| *r.denom()))
        .ok_or_else(|| Error::InvalidArgument("torsion order overflows".into()))?;
    let torsion_exponents = rationals.iter().map(|r| r.numer() * (torsion_order / r.denom())).collect();
    Ok(GroupDecomposition {
        torsion_order,
        torsion_exponents,
        rank: cfg.basis().len(),
        exponent_matrix: rows,
        pairing: cfg.pairing().map(<[usize]>::to_vec),
        basis_labels: cfg.basis().labels().to_vec(),
        basis: cfg.basis().clone(),
    })
}

/// Integers `p` with `q = a p` distinct and nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Projection {
    pub p: Vec<i64>,
    pub q: Vec<i64>,
}

/// `choose_projection`: `p = (1, M, …, M^{d-1})` starting from
/// `M = 1 + 2 max|a|`, increasing `M` until the `q_j` are distinct and nonzero.
pub fn choose_projection(g: &GroupDecomposition) -> Result<Projection> {
    g.check_rows()?;
    let max_a = g.exponent_matrix.iter().flatten().map(|a| a.unsigned_abs()).max().unwrap_or(0) as i64;
    let mut m = 1 + 2 * max_a;
    loop {
        let mut p = Vec::with_capacity(g.rank);
        let mut power: i64 = 1;
        for h in 0..g.rank {
            p.push(power);
            if h + 1 < g.rank {
                power = power
                    .checked_mul(m)
                    .ok_or_else(|| Error::InvalidArgument("projection integers overflow".into()))?;
            }
        }
        let q: Option<Vec<i64>> = g
            .exponent_matrix
            .iter()
            .map(|row| row.iter().zip(&p).try_fold(0i64, |acc, (a, ph)| acc.checked_add(a.checked_mul(*ph)?)))
            .collect();
        let q = q.ok_or_else(|| Error::InvalidArgument("projected frequencies overflow".into()))?;
        let distinct = q.iter().enumerate().all(|(j, x)| *x != 0 && !q[..j].contains(x));
        if distinct {
            return Ok(Projection { p, q });
        }
        m += 1;
    }
}

/// Integer-frequency polynomial `Σ b_j e^{i q_j t}` obtained by projecting the
/// torus onto the one-parameter subgroup `ω_h = e^{i p_h t}`.
pub fn projected_polynomial(cfg: &SpectrumConfig, projection: &Projection) -> Vec<(Complex64, i64)> {
    cfg.coefficients().into_iter().zip(projection.q.iter().copied()).collect()
}

/// `reduce_minus_one`: for `b_j = 1` and exactly one `z = -1`, the odd-index
/// subsequence `s_{2κ+1} = -1 + Σ_{j≠n} z_j (z_j²)^κ`.
pub fn reduce_minus_one(cfg: &SpectrumConfig) -> Result<(SpectrumConfig, f64)> {
    if !cfg.all_unit_coefficients() {
        return Err(Error::Hypothesis("odd-index reduction requires every b_j = 1".into()));
    }
    let idx = match cfg.minus_one_nodes().as_slice() {
        [idx] => *idx,
        [] => return Err(Error::Hypothesis("no node with z = -1".into())),
        _ => return Err(Error::Hypothesis("more than one node with z = -1".into())),
    };
    let nodes: Vec<Node> = cfg
        .nodes()
        .iter()
        .zip(cfg.phases())
        .enumerate()
        .filter(|(j, _)| *j != idx)
        .map(|(_, (node, phase))| {
            let (c, s) = precision::unit_circle(phase.value());
            Node::new(Coefficient::Complex(Complex64::new(c, s)), node.angle.scale(2))
        })
        .collect();
    let reduced = SpectrumConfig::new(cfg.basis().clone(), nodes)?;
    Ok((reduced, -1.0))
}

/// Non-degeneracy token for the `2m`-node spectrum of a cosine sum: no
/// `α_i ± α_j` rational (including `2α_i`).
pub fn detect_cosine_degeneracy(cfg: &CosineConfig) -> Result<(SpectrumConfig, DegeneracyVerdict)> {
    let spectrum = cfg.to_spectrum()?;
    let verdict = detect_degeneracy(&spectrum);
    Ok((spectrum, verdict))
}

/// Whether the Q-span of the exact angles excludes 1: with
/// `α_j = r_j + Σ_i λ_{ij} β_i`, 1 lies in the span iff `r` is not in the
/// row space of `λ`.
pub fn span_excludes_one(angles: &[Angle], basis: &BasisDecl) -> Result<bool> {
    let mut lambda: Vec<Vec<BigRational>> = vec![Vec::new(); basis.len()];
    let mut r = Vec::new();
    for angle in angles {
        angle.check_basis(basis)?;
        match angle {
            Angle::Exact { rational, coeffs } => {
                r.push(BigRational::new((*rational.numer()).into(), (*rational.denom()).into()));
                for (row, c) in lambda.iter_mut().zip(coeffs) {
                    row.push(BigRational::from_integer((*c).into()));
                }
            }
            Angle::Float { .. } => return Err(Error::FloatAngle),
        }
    }
    let base_rank = rank(lambda.clone());
    lambda.push(r);
    Ok(rank(lambda) == base_rank)
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &pivot_row[col];
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        rank += 1;
    }
    rank
}

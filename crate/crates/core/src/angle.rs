//! Angles `α` with `z = exp(2πiα)`, either exact over a declared irrational basis
//! or raw decimal floats.

use std::fmt;

use num::rational::Rational64;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{self, Phase};

/// Declared irrational generators `β_1..β_d`, asserted Q-linearly independent
/// together with 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisDecl {
    labels: Vec<String>,
    values: Vec<BigRational>,
    literals: Vec<String>,
    pub independence_asserted: bool,
}

impl BasisDecl {
    pub fn empty() -> Self {
        Self {
            labels: Vec::new(),
            values: Vec::new(),
            literals: Vec::new(),
            independence_asserted: true,
        }
    }

    /// Builds a basis from `(label, decimal literal)` pairs.
    pub fn new<L, V>(entries: impl IntoIterator<Item = (L, V)>) -> Result<Self>
    where
        L: Into<String>,
        V: AsRef<str>,
    {
        let mut basis = Self::empty();
        for (label, literal) in entries {
            let label = label.into();
            let literal = literal.as_ref().trim().to_string();
            if basis.labels.contains(&label) {
                return Err(Error::InvalidBasis(format!("duplicate label {label:?}")));
            }
            let value = precision::parse_decimal(&literal)?;
            if !(value.is_positive() && value < BigRational::one()) {
                return Err(Error::InvalidBasis(format!(
                    "value of {label:?} must lie strictly between 0 and 1"
                )));
            }
            basis.labels.push(label);
            basis.values.push(value);
            basis.literals.push(literal);
        }
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn literals(&self) -> &[String] {
        &self.literals
    }

    /// Binary precision carried by the least precise declared literal.
    pub fn precision_bits(&self) -> u32 {
        self.literals
            .iter()
            .map(|l| precision::decimal_precision_bits(l))
            .min()
            .unwrap_or(u32::MAX)
    }
}

/// An angle in `[0, 1)`: `z = exp(2πiα)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Angle {
    /// `α = r + Σ c_i β_i (mod 1)` with `r ∈ [0, 1)` reduced.
    Exact { rational: Rational64, coeffs: Vec<i64> },
    /// A decimal value in `[0, 1)` known to `precision_bits` bits.
    Float { value: BigRational, precision_bits: u32 },
}

fn reduce_unit(r: Rational64) -> Rational64 {
    r - r.floor()
}

impl Angle {
    pub fn exact(rational: Rational64, coeffs: Vec<i64>) -> Self {
        Angle::Exact { rational: reduce_unit(rational), coeffs }
    }

    /// The rational angle `p/q` over a basis of size `dim`.
    pub fn rational(p: i64, q: i64, dim: usize) -> Self {
        Self::exact(Rational64::new(p, q), vec![0; dim])
    }

    /// `r + Σ c_i β_i`.
    pub fn combination(p: i64, q: i64, coeffs: Vec<i64>) -> Self {
        Self::exact(Rational64::new(p, q), coeffs)
    }

    pub fn float_decimal(literal: &str) -> Result<Self> {
        let value = precision::parse_decimal(literal)?;
        let bits = precision::decimal_precision_bits(literal);
        Self::float(value, bits)
    }

    pub fn float(value: BigRational, precision_bits: u32) -> Result<Self> {
        if value.is_negative() || value >= BigRational::one() {
            return Err(Error::InvalidAngle(format!(
                "float angle {} must lie in [0, 1)",
                precision::rational_to_f64(&value)
            )));
        }
        Ok(Angle::Float { value, precision_bits })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact { .. })
    }

    /// `-α mod 1`.
    pub fn negate(&self) -> Self {
        self.scale(-1)
    }

    /// `m α mod 1`.
    pub fn scale(&self, m: i64) -> Self {
        match self {
            Angle::Exact { rational, coeffs } => Angle::Exact {
                rational: reduce_unit(*rational * m),
                coeffs: coeffs.iter().map(|c| c * m).collect(),
            },
            Angle::Float { value, precision_bits } => {
                let scaled = precision::frac_rational(&(value * BigRational::from_integer(m.into())));
                let lost = 64 - (m.unsigned_abs().max(1)).leading_zeros();
                Angle::Float {
                    value: scaled,
                    precision_bits: precision_bits.saturating_sub(lost.saturating_sub(1)),
                }
            }
        }
    }

    /// `α - β mod 1` for two exact angles.
    pub fn exact_difference(&self, other: &Angle) -> Option<(Rational64, Vec<i64>)> {
        match (self, other) {
            (
                Angle::Exact { rational: r1, coeffs: c1 },
                Angle::Exact { rational: r2, coeffs: c2 },
            ) if c1.len() == c2.len() => Some((
                reduce_unit(*r1 - *r2),
                c1.iter().zip(c2).map(|(a, b)| a - b).collect(),
            )),
            _ => None,
        }
    }

    pub fn check_basis(&self, basis: &BasisDecl) -> Result<()> {
        if let Angle::Exact { coeffs, .. } = self {
            if coeffs.len() != basis.len() {
                return Err(Error::BasisMismatch { expected: basis.len(), found: coeffs.len() });
            }
        }
        Ok(())
    }

    /// The exact value `(r + Σ c_i β_i) mod 1` of the decimal encoding.
    pub fn value_exact(&self, basis: &BasisDecl) -> Result<BigRational> {
        self.check_basis(basis)?;
        Ok(match self {
            Angle::Exact { rational, coeffs } => {
                let mut acc = BigRational::new(BigInt::from(*rational.numer()), BigInt::from(*rational.denom()));
                for (c, beta) in coeffs.iter().zip(basis.values()) {
                    if *c != 0 {
                        acc += beta * BigRational::from_integer(BigInt::from(*c));
                    }
                }
                precision::frac_rational(&acc)
            }
            Angle::Float { value, .. } => value.clone(),
        })
    }

    /// Phase source for `k ↦ frac(k α)`.
    pub fn phase(&self, basis: &BasisDecl) -> Result<Phase> {
        Ok(Phase::from_rational(&self.value_exact(basis)?))
    }

    /// Binary precision of this angle's value.
    pub fn precision_bits(&self, basis: &BasisDecl) -> u32 {
        match self {
            Angle::Exact { coeffs, .. } if coeffs.iter().all(|c| *c == 0) => u32::MAX,
            Angle::Exact { coeffs, .. } => {
                let scale: u64 = coeffs.iter().map(|c| c.unsigned_abs()).sum();
                basis
                    .precision_bits()
                    .saturating_sub(64 - scale.leading_zeros())
            }
            Angle::Float { precision_bits, .. } => *precision_bits,
        }
    }

    /// True when the angle is a rational number (exact, no basis part).
    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Angle::Exact { rational, coeffs } if coeffs.iter().all(|c| *c == 0) => Some(*rational),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Angle::Exact { rational, coeffs } => rational.is_zero() && coeffs.iter().all(|c| *c == 0),
            Angle::Float { value, .. } => value.is_zero(),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Exact { rational, coeffs } => {
                write!(f, "{}/{}", rational.numer(), rational.denom())?;
                for (i, c) in coeffs.iter().enumerate() {
                    if *c != 0 {
                        write!(f, "{:+}·β{}", c, i + 1)?;
                    }
                }
                Ok(())
            }
            Angle::Float { value, .. } => write!(f, "{}", precision::rational_to_f64(value)),
        }
    }
}

/// `angle_value`: `(r + Σ c_i β_i) mod 1` rounded to double precision.
pub fn angle_value(angle: &Angle, basis: &BasisDecl) -> Result<f64> {
    Ok(precision::rational_to_f64(&angle.value_exact(basis)?))
}

/// JSON form of an angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleSpec {
    Exact {
        rational: String,
        #[serde(default)]
        coeffs: Vec<i64>,
    },
    Float {
        float: String,
    },
}

impl AngleSpec {
    pub fn to_angle(&self, basis: &BasisDecl) -> Result<Angle> {
        match self {
            AngleSpec::Exact { rational, coeffs } => {
                let r = parse_small_rational(rational)?;
                let coeffs = if coeffs.is_empty() { vec![0; basis.len()] } else { coeffs.clone() };
                let angle = Angle::exact(r, coeffs);
                angle.check_basis(basis)?;
                Ok(angle)
            }
            AngleSpec::Float { float } => {
                let value = precision::parse_decimal(float)?;
                if value.is_negative() || value >= BigRational::one() {
                    return Err(Error::InvalidAngle(format!("float angle {float} must lie in [0, 1)")));
                }
                Angle::float(value, precision::decimal_precision_bits(float))
            }
        }
    }

    pub fn from_angle(angle: &Angle) -> Self {
        match angle {
            Angle::Exact { rational, coeffs } => AngleSpec::Exact {
                rational: format!("{}/{}", rational.numer(), rational.denom()),
                coeffs: coeffs.clone(),
            },
            Angle::Float { value, precision_bits } => {
                let digits = ((*precision_bits as f64) / std::f64::consts::LOG2_10).ceil() as usize + 1;
                AngleSpec::Float { float: rational_to_decimal(value, digits.clamp(17, 80)) }
            }
        }
    }
}

fn parse_small_rational(text: &str) -> Result<Rational64> {
    let r = precision::parse_rational(text)?;
    use num::ToPrimitive;
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(p), Some(q)) => Ok(Rational64::new(p, q)),
        _ => Err(Error::InvalidAngle(format!("rational part {text} out of range"))),
    }
}

/// Decimal expansion of `x` truncated to `digits` fractional digits
/// (exact when `x` terminates earlier).
pub fn rational_to_decimal(x: &BigRational, digits: usize) -> String {
    let negative = x.is_negative();
    let x = x.abs();
    let int = x.trunc().to_integer();
    let mut rest = x.fract();
    let mut out = String::new();
    let ten = BigRational::from_integer(10.into());
    for _ in 0..digits {
        if rest.is_zero() {
            break;
        }
        rest *= &ten;
        let d = rest.trunc().to_integer();
        out.push_str(&d.to_string());
        rest -= BigRational::from_integer(d);
    }
    let sign = if negative { "-" } else { "" };
    if out.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{out}")
    }
}

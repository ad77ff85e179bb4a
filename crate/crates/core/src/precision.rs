//! Extended-precision helpers: exact decimal parsing and double-double phases.
//!
//! Evaluating `z^k = exp(2πi k α)` for large `k` is dominated by the argument
//! reduction `k α mod 1`. Angles are held as unevaluated double-double values
//! (about 106 bits) so the reduced phase stays accurate to ~1e-16 absolute for
//! every `|k| < 2^53`.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest index for which `k as f64` is exact.
pub const MAX_PHASE_INDEX: i64 = 1 << 53;

/// Parses a plain decimal literal (`-0.125`, `3`, `1e-5`, `2.5E3`) exactly.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let err = || Error::InvalidDecimal(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(pos) => (&body[..pos], &body[pos + 1..]),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Parses `p/q`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::InvalidDecimal(text.to_string()))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::InvalidDecimal(text.to_string()))?;
        if q.is_zero() {
            return Err(Error::InvalidDecimal(text.to_string()));
        }
        Ok(BigRational::new(p, q))
    } else {
        parse_decimal(s)
    }
}

/// Number of binary digits carried by a decimal literal's significant digits.
pub fn decimal_precision_bits(text: &str) -> u32 {
    let mantissa = text.trim().split(['e', 'E']).next().unwrap_or("");
    let digits = mantissa
        .bytes()
        .filter(u8::is_ascii_digit)
        .skip_while(|&b| b == b'0')
        .count()
        .max(1);
    (digits as f64 * std::f64::consts::LOG2_10).floor() as u32
}

/// Fractional part in `[0, 1)`.
pub fn frac_rational(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Extremely large numerators or denominators; fall back on scaling.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `round(x * 2^bits)` as an integer.
pub fn scaled_round(x: &BigRational, bits: u32) -> BigInt {
    let scaled = x * BigRational::from_integer(BigInt::one() << bits as usize);
    scaled.round().to_integer()
}

/// `|x| ≤ 2^-bits`.
pub fn below_pow2(x: &BigRational, bits: u32) -> bool {
    let bound = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    x.abs() <= bound
}

/// log2 of a positive rational, accurate to a few ulps for huge values.
pub fn log2_abs(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    fn log2_int(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits <= 1000 {
            v.abs().to_f64().unwrap().log2()
        } else {
            let shift = bits - 60;
            let top = (v.abs() >> shift as usize).to_f64().unwrap();
            top.log2() + shift as f64
        }
    }
    log2_int(x.numer()) - log2_int(x.denom())
}

/// An unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn from_rational(x: &BigRational) -> Self {
        let hi = rational_to_f64(x);
        let rest = x - BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
        let lo = rational_to_f64(&rest);
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// `frac(k * self)` in `[0, 1)`.
    #[inline]
    pub fn frac_mul(self, k: i64) -> f64 {
        debug_assert!(k.abs() < MAX_PHASE_INDEX);
        let kf = k as f64;
        let (p, e) = two_prod(self.hi, kf);
        let r = p - p.floor();
        let t = r + (e + self.lo * kf);
        let f = t - t.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

/// Reduced phase source for `k ↦ frac(k α)`.
///
/// Small-denominator rationals reduce exactly in integer arithmetic, so rational
/// spectra are exactly periodic in `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Rational { numer: i64, denom: i64 },
    Real(DoubleDouble),
}

impl Phase {
    pub fn from_rational(x: &BigRational) -> Self {
        let f = frac_rational(x);
        match (f.numer().to_i64(), f.denom().to_i64()) {
            (Some(numer), Some(denom)) if denom < (1 << 31) => Phase::Rational { numer, denom },
            _ => Phase::Real(DoubleDouble::from_rational(&f)),
        }
    }

    /// `frac(k α)` in `[0, 1)`.
    #[inline]
    pub fn frac_mul(self, k: i64) -> f64 {
        match self {
            Phase::Rational { numer, denom } => {
                let r = (k.rem_euclid(denom) as i128 * numer as i128).rem_euclid(denom as i128);
                r as f64 / denom as f64
            }
            Phase::Real(dd) => dd.frac_mul(k),
        }
    }

    pub fn value(self) -> f64 {
        self.frac_mul(1)
    }

    pub fn denominator(self) -> Option<i64> {
        match self {
            Phase::Rational { denom, .. } => Some(denom),
            Phase::Real(_) => None,
        }
    }
}

/// `(cos 2πx, sin 2πx)` with `x` folded into `[-1/2, 1/2)` first.
#[inline]
pub fn unit_circle(x: f64) -> (f64, f64) {
    let y = if x >= 0.5 { x - 1.0 } else { x };
    let (s, c) = (std::f64::consts::TAU * y).sin_cos();
    (c, s)
}

/// `lcm` over positive integers, `None` on overflow.
pub fn checked_lcm(values: impl IntoIterator<Item = i64>) -> Option<i64> {
    let mut acc: i64 = 1;
    for v in values {
        let g = acc.gcd(&v);
        acc = (acc / g).checked_mul(v)?;
    }
    Some(acc)
}

//! Scalar fields: exact Gaussian rationals and tolerance-based complex floats.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Rank and comparison thresholds. Ignored by exact scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub tol: f64,
    pub pivot: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            tol: 1e-9,
            pivot: 1e-7,
        }
    }
}

/// A scalar literal as written in a scenario, before a backend is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Exact(BigRational, BigRational),
    Float(f64, f64),
}

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    const EXACT: bool;
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_literal(lit: &Literal) -> Result<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero_tol(&self, tol: f64) -> bool;
    fn abs(&self) -> f64;
    /// `exp(2 pi i k / order)` when representable in this field.
    fn root_of_unity(order: u32, k: u32) -> Option<Self>;
    fn to_json(&self) -> Value;

    fn is_exact_zero(&self) -> bool {
        self.is_zero_tol(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }
}

fn rat_json(r: &BigRational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

impl Scalar for GaussRational {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn zero() -> Self {
        GaussRational::real(BigRational::zero())
    }
    fn one() -> Self {
        GaussRational::real(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        GaussRational::real(BigRational::from_integer(BigInt::from(n)))
    }
    fn from_literal(lit: &Literal) -> Result<Self> {
        match lit {
            Literal::Exact(re, im) => Ok(GaussRational::new(re.clone(), im.clone())),
            Literal::Float(re, im) => {
                if re.fract() == 0.0 && im.fract() == 0.0 && re.abs() < 1e15 && im.abs() < 1e15 {
                    Ok(GaussRational::new(
                        BigRational::from_integer(BigInt::from(*re as i64)),
                        BigRational::from_integer(BigInt::from(*im as i64)),
                    ))
                } else {
                    Err(Error::schema(
                        "scalar",
                        "non-integer decimal in exact backend; write \"num/den\"",
                    ))
                }
            }
        }
    }
    fn add(&self, o: &Self) -> Self {
        GaussRational::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRational::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRational::real(&self.re * &o.re);
        }
        GaussRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn neg(&self) -> Self {
        GaussRational::new(-&self.re, -&self.im)
    }
    fn conj(&self) -> Self {
        GaussRational::new(self.re.clone(), -&self.im)
    }
    fn inv(&self) -> Option<Self> {
        if self.im.is_zero() {
            if self.re.is_zero() {
                return None;
            }
            return Some(GaussRational::real(self.re.recip()));
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRational::new(&self.re / &n, -&self.im / &n))
    }
    fn is_zero_tol(&self, _tol: f64) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn abs(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }
    fn root_of_unity(order: u32, k: u32) -> Option<Self> {
        if order == 0 {
            return None;
        }
        // Reduce k/order to lowest terms over 4.
        let k = k % order;
        match (4 * k) % order {
            0 => {}
            _ => return None,
        }
        Some(match (4 * k / order) % 4 {
            0 => Self::one(),
            1 => Self::i(),
            2 => Self::from_i64(-1),
            _ => Self::i().neg(),
        })
    }
    fn to_json(&self) -> Value {
        Value::Array(vec![rat_json(&self.re), rat_json(&self.im)])
    }
}

/// Complex double with tolerance-based zero tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float(pub Complex64);

impl Scalar for Float {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        Float(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Float(Complex64::new(1.0, 0.0))
    }
    fn from_i64(n: i64) -> Self {
        Float(Complex64::new(n as f64, 0.0))
    }
    fn from_literal(lit: &Literal) -> Result<Self> {
        Ok(match lit {
            Literal::Exact(re, im) => Float(Complex64::new(
                re.to_f64().unwrap_or(f64::NAN),
                im.to_f64().unwrap_or(f64::NAN),
            )),
            Literal::Float(re, im) => Float(Complex64::new(*re, *im)),
        })
    }
    fn add(&self, o: &Self) -> Self {
        Float(self.0 + o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Float(self.0 - o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Float(self.0 * o.0)
    }
    fn neg(&self) -> Self {
        Float(-self.0)
    }
    fn conj(&self) -> Self {
        Float(self.0.conj())
    }
    fn inv(&self) -> Option<Self> {
        if self.0.norm() == 0.0 {
            None
        } else {
            Some(Float(self.0.inv()))
        }
    }
    fn is_zero_tol(&self, tol: f64) -> bool {
        self.0.norm() <= tol
    }
    fn abs(&self) -> f64 {
        self.0.norm()
    }
    fn root_of_unity(order: u32, k: u32) -> Option<Self> {
        if order == 0 {
            return None;
        }
        let t = 2.0 * std::f64::consts::PI * (k % order) as f64 / order as f64;
        Some(Float(Complex64::from_polar(1.0, t)))
    }
    fn to_json(&self) -> Value {
        serde_json::json!([self.0.re, self.0.im])
    }
}

/// Parses `"n"`, `"-n/d"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::schema("scalar", format!("malformed rational {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    if n.is_empty() || d.is_empty() || n.len() > 4096 || d.len() > 4096 {
        return Err(bad());
    }
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::schema("scalar", "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

fn parse_real(v: &Value, path: &str) -> Result<Literal> {
    match v {
        Value::String(s) => Ok(Literal::Exact(parse_rational(s)?, BigRational::zero())),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Literal::Exact(
                    BigRational::from_integer(BigInt::from(i)),
                    BigRational::zero(),
                ))
            } else if let Some(f) = n.as_f64().filter(|f| f.is_finite()) {
                Ok(Literal::Float(f, 0.0))
            } else {
                Err(Error::schema(path, "non-finite number"))
            }
        }
        _ => Err(Error::schema(path, "expected number or \"num/den\" string")),
    }
}

/// Parses a scalar literal: a number, a `"num/den"` string, or `[re, im]`.
pub fn parse_literal(v: &Value, path: &str) -> Result<Literal> {
    match v {
        Value::Array(parts) => {
            if parts.len() != 2 {
                return Err(Error::schema(path, "complex literal must be [re, im]"));
            }
            let re = parse_real(&parts[0], path)?;
            let im = parse_real(&parts[1], path)?;
            Ok(match (re, im) {
                (Literal::Exact(a, _), Literal::Exact(b, _)) => Literal::Exact(a, b),
                (a, b) => Literal::Float(lit_f64(&a), lit_f64(&b)),
            })
        }
        _ => parse_real(v, path),
    }
}

fn lit_f64(l: &Literal) -> f64 {
    match l {
        Literal::Exact(r, _) => r.to_f64().unwrap_or(f64::NAN),
        Literal::Float(f, _) => *f,
    }
}

/// Exact value of a small integer rational, if it is one.
pub fn rational_to_i64(r: &BigRational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

pub fn is_nonnegative(r: &BigRational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_arithmetic() {
        let i = GaussRational::i();
        assert_eq!(i.mul(&i), GaussRational::from_i64(-1));
        let z = GaussRational::new(parse_rational("1/2").unwrap(), parse_rational("-3").unwrap());
        assert_eq!(z.mul(&z.inv().unwrap()), GaussRational::one());
        assert_eq!(z.conj().conj(), z);
    }

    #[test]
    fn roots_of_unity_exact_only_for_small_orders() {
        assert_eq!(GaussRational::root_of_unity(2, 1), Some(GaussRational::from_i64(-1)));
        assert_eq!(GaussRational::root_of_unity(4, 1), Some(GaussRational::i()));
        assert_eq!(GaussRational::root_of_unity(4, 2), Some(GaussRational::from_i64(-1)));
        assert_eq!(GaussRational::root_of_unity(1, 0), Some(GaussRational::one()));
        assert!(GaussRational::root_of_unity(3, 1).is_none());
        let w = Float::root_of_unity(3, 1).unwrap();
        assert!(w.mul(&w).mul(&w).sub(&Float::one()).is_zero_tol(1e-12));
    }

    #[test]
    fn literal_parsing() {
        let v: Value = serde_json::json!(["1/2", -1]);
        let lit = parse_literal(&v, "x").unwrap();
        let g = GaussRational::from_literal(&lit).unwrap();
        assert_eq!(g.to_json(), serde_json::json!(["1/2", "-1/1"]));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(GaussRational::from_literal(&Literal::Float(0.5, 0.0)).is_err());
    }
}

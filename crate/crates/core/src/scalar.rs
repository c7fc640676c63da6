//! The scalar abstraction: every geometric and algebraic operation in this
//! crate is generic over a [`Scalar`], instantiated either with exact
//! arbitrary-precision rationals (`Rat`) or with `f64`.
//!
//! Exact mode gives closed, canonical arithmetic and is used for all
//! algebraic identity verification; float mode is used for long orbits and
//! PDE runs, with tolerance-based comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use std::fmt::Debug;

use crate::error::{Error, Result};

/// Exact rational scalar type (arbitrary-precision).
pub type Rat = BigRational;

pub trait Scalar:
    Num + Signed + Clone + PartialEq + PartialOrd + Debug + std::fmt::Display + 'static
{
    /// True for exact rational arithmetic, false for floating point.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rat(r: &Rat) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test: exact in rational mode, absolute tolerance in float mode.
    fn tol_zero(&self, tol: f64) -> bool;

    /// Equality test: exact in rational mode, mixed absolute/relative
    /// tolerance in float mode.
    fn tol_eq(&self, other: &Self, tol: f64) -> bool;

    /// Real cube root. Exact mode returns `NonRationalLift` when the
    /// argument is not a perfect rational cube.
    fn cube_root(&self) -> Result<Self>;

    fn to_json(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Result<Self>;
}

/// Default comparison tolerance used in float mode when no explicit
/// tolerance is supplied.
pub const DEFAULT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tol_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn tol_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= tol * scale
    }

    fn cube_root(&self) -> Result<Self> {
        Ok(self.cbrt())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        v.as_f64()
            .ok_or_else(|| Error::InvalidInput(format!("expected float, got {v}")))
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }

    fn tol_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn tol_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn cube_root(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Rat::zero());
        }
        let r = self.reduced();
        let num = exact_int_cbrt(r.numer())?;
        let den = exact_int_cbrt(r.denom())?;
        Ok(Rat::new(num, den))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(rat_to_string(self))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        let s = v
            .as_str()
            .ok_or_else(|| Error::InvalidInput(format!("expected \"p/q\" string, got {v}")))?;
        rat_from_string(s)
    }
}

fn exact_int_cbrt(x: &BigInt) -> Result<BigInt> {
    let root = x.cbrt();
    if &(&root * &root * &root) == x {
        Ok(root)
    } else {
        Err(Error::NonRationalLift)
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    let f = num_traits::ToPrimitive::to_f64(r);
    f.unwrap_or_else(|| {
        // Fall back for huge numerators/denominators.
        let n = num_traits::ToPrimitive::to_f64(r.numer()).unwrap_or(f64::NAN);
        let d = num_traits::ToPrimitive::to_f64(r.denom()).unwrap_or(f64::NAN);
        n / d
    })
}

/// Canonical "p/q" form (reduced, sign on the numerator, q > 0).
pub fn rat_to_string(r: &Rat) -> String {
    let r = r.reduced();
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_string(s: &str) -> Result<Rat> {
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts.next().unwrap().trim().parse().map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

//! Small numeric helpers shared by the reporting and evaluation code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::finite_space::Rational;

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn to_big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => f64::NAN,
    }
}

/// Round to 15 significant decimal digits. Every such decimal round-trips
/// through `f64`, so the shortest printed form has at most 15 digits.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.14e}", x).parse().unwrap_or(x)
}

/// 15-significant-digit decimal string.
pub fn sig15_string(x: f64) -> String {
    let r = round_sig15(x);
    if r == 0.0 {
        return "0".to_string();
    }
    format!("{}", r)
}

/// `a` is strictly less than `b` beyond `tol`.
pub fn definitely_less(a: f64, b: f64, tol: f64) -> bool {
    a < b - tol
}

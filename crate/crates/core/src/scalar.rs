//! Coefficient rings.
//!
//! Symbolic objects (polynomials, Grassmann elements, operator words) are
//! generic over a [`Ring`]. Exact work uses [`BigRational`] and complex
//! rationals; numerics use `f64`/`f32` and their complex counterparts.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Commutative ring with unit, used as a coefficient domain.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(n: i64) -> Self;

    /// `num / den`; `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self;
}

/// A ring where non-zero elements can be inverted.
pub trait Field: Ring {
    fn try_inv(&self) -> Option<Self>;
}

/// Complex conjugation. Real domains use the identity.
pub trait Conjugate {
    fn conjugate(&self) -> Self;
}

/// A complex field with an imaginary unit.
pub trait ComplexScalar: Field + Conjugate {
    type Real: Field + Display;

    fn i() -> Self;
    fn from_real(re: Self::Real) -> Self;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    /// Modulus as an `f64`, for diagnostics.
    fn abs_f64(&self) -> f64;
}

macro_rules! float_ring {
    ($t:ty) => {
        impl Ring for $t {
            fn from_i64(n: i64) -> Self {
                n as $t
            }
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
        }
        impl Field for $t {
            fn try_inv(&self) -> Option<Self> {
                if *self == 0.0 {
                    None
                } else {
                    Some(1.0 / *self)
                }
            }
        }
        impl Conjugate for $t {
            fn conjugate(&self) -> Self {
                *self
            }
        }
        impl Ring for Complex<$t> {
            fn from_i64(n: i64) -> Self {
                Complex::new(n as $t, 0.0)
            }
            fn from_ratio(num: i64, den: i64) -> Self {
                Complex::new(num as $t / den as $t, 0.0)
            }
        }
        impl Field for Complex<$t> {
            fn try_inv(&self) -> Option<Self> {
                if self.is_zero() {
                    None
                } else {
                    Some(self.inv())
                }
            }
        }
        impl Conjugate for Complex<$t> {
            fn conjugate(&self) -> Self {
                self.conj()
            }
        }
        impl ComplexScalar for Complex<$t> {
            type Real = $t;
            fn i() -> Self {
                Complex::new(0.0, 1.0)
            }
            fn from_real(re: $t) -> Self {
                Complex::new(re, 0.0)
            }
            fn from_parts(re: $t, im: $t) -> Self {
                Complex::new(re, im)
            }
            fn re(&self) -> $t {
                self.re
            }
            fn im(&self) -> $t {
                self.im
            }
            fn abs_f64(&self) -> f64 {
                self.norm() as f64
            }
        }
    };
}

float_ring!(f32);
float_ring!(f64);

impl Ring for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Field for BigRational {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Conjugate for BigRational {
    fn conjugate(&self) -> Self {
        self.clone()
    }
}

impl Ring for Complex<BigRational> {
    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_i64(n), BigRational::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(BigRational::from_ratio(num, den), BigRational::zero())
    }
}

impl Field for Complex<BigRational> {
    fn try_inv(&self) -> Option<Self> {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        if n2.is_zero() {
            return None;
        }
        Some(Complex::new(&self.re / &n2, -&self.im / &n2))
    }
}

impl Conjugate for Complex<BigRational> {
    fn conjugate(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
}

impl ComplexScalar for Complex<BigRational> {
    type Real = BigRational;
    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_real(re: BigRational) -> Self {
        Complex::new(re, BigRational::zero())
    }
    fn from_parts(re: BigRational, im: BigRational) -> Self {
        Complex::new(re, im)
    }
    fn re(&self) -> BigRational {
        self.re.clone()
    }
    fn im(&self) -> BigRational {
        self.im.clone()
    }
    fn abs_f64(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        re.hypot(im)
    }
}

/// Lossy conversion of an exact rational to `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact rational parsed from a decimal literal such as `"2.50"` or `"17"`.
pub fn rational_from_decimal(text: &str) -> Option<BigRational> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::new(numer, denom))
}

/// Formats a rational as `n` or `n/d`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a complex rational compactly, e.g. `3/2`, `-i`, `(1+2i)`.
pub fn format_complex_rational(c: &Complex<BigRational>) -> String {
    if c.im.is_zero() {
        return format_rational(&c.re);
    }
    let im = if c.im.is_one() {
        "i".to_string()
    } else if (-c.im.clone()).is_one() {
        "-i".to_string()
    } else {
        format!("{}i", format_rational(&c.im))
    };
    if c.re.is_zero() {
        im
    } else if c.im.is_negative() {
        format!("({}{})", format_rational(&c.re), im)
    } else {
        format!("({}+{})", format_rational(&c.re), im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(rational_from_decimal("0.5"), Some(BigRational::from_ratio(1, 2)));
        assert_eq!(rational_from_decimal("12"), Some(BigRational::from_i64(12)));
        assert_eq!(rational_from_decimal("1.25"), Some(BigRational::from_ratio(5, 4)));
        assert_eq!(rational_from_decimal("."), None);
        assert_eq!(rational_from_decimal("1e3"), None);
    }

    #[test]
    fn complex_rational_inverse() {
        let z = Complex::new(BigRational::from_i64(3), BigRational::from_i64(4));
        let w = z.try_inv().unwrap();
        assert_eq!(z * w, Complex::<BigRational>::one());
    }

    #[test]
    fn formatting() {
        let c = Complex::new(BigRational::from_ratio(1, 2), BigRational::from_i64(-1));
        assert_eq!(format_complex_rational(&c), "(1/2-i)");
        assert_eq!(format_complex_rational(&Complex::<BigRational>::i()), "i");
    }
}

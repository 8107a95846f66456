//! Exact scalars in the Gaussian rationals `Q(i)`.
//!
//! Every value is kept in canonical form (both parts as reduced fractions
//! with positive denominators), so structural equality is value equality.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// A complex number `re + im·i` with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    /// `re_num/re_den + (im_num/im_den)·i`. Panics on a zero denominator.
    pub fn from_fractions(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(re_num.into(), re_den.into()),
            im: BigRational::new(im_num.into(), im_den.into()),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational::from_real(BigRational::from_integer(n.into()))
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|² = re² + im²`, always a non-negative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Default for GaussianRational {
    fn default() -> Self {
        GaussianRational::zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_int(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        GaussianRational::from_real(r)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::from_real(&self.re * &rhs.re);
        }
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

macro_rules! forward_owned_binop {
    ($($tr:ident :: $f:ident),*) => {$(
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $f(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $f(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $f(self, rhs: GaussianRational) -> GaussianRational {
                self.$f(&rhs)
            }
        }
    )*};
}

forward_owned_binop!(Add::add, Sub::sub, Mul::mul, Div::div);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `"a"`, `"a/b"`, `"c/di"`, `"a/b+c/di"`; zero is `"0"`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}i", fmt_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{}{}{}i",
                    fmt_rational(&self.re),
                    sign,
                    fmt_rational(&self.im.abs())
                )
            }
        }
    }
}

fn parse_error(input: &str, reason: &str) -> Error {
    Error::ScalarParse {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_rational(text: &str, original: &str) -> Result<BigRational, Error> {
    let text = text.trim();
    let (negative, body) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        _ => (false, text),
    };
    let body = body.trim();
    if body.is_empty() {
        return Err(parse_error(original, "empty number"));
    }
    let digits = |s: &str| -> Result<BigInt, Error> {
        let s = s.trim();
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_error(original, "expected decimal digits"));
        }
        s.parse::<BigInt>()
            .map_err(|_| parse_error(original, "invalid integer"))
    };
    let value = match body.split_once('/') {
        Some((num, den)) => {
            let den = digits(den)?;
            if den.is_zero() {
                return Err(parse_error(original, "zero denominator"));
            }
            BigRational::new(digits(num)?, den)
        }
        None => BigRational::from_integer(digits(body)?),
    };
    Ok(if negative { -value } else { value })
}

/// Parses an imaginary coefficient that preceded the trailing `i`: empty,
/// `+`, `-` mean ±1.
fn parse_imag_coeff(text: &str, original: &str) -> Result<BigRational, Error> {
    match text.trim() {
        "" | "+" => Ok(BigRational::one()),
        "-" => Ok(-BigRational::one()),
        t => parse_rational(t, original),
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `"a/b"`, `"a/b+c/di"`, integer shorthand, bare `i`, and the
    /// Unicode minus sign.
    fn from_str(s: &str) -> Result<Self, Error> {
        let normalized: String = s
            .chars()
            .map(|c| if c == '\u{2212}' { '-' } else { c })
            .filter(|c| !c.is_whitespace())
            .collect();
        if normalized.is_empty() {
            return Err(parse_error(s, "empty scalar"));
        }
        let Some(head) = normalized.strip_suffix('i') else {
            return Ok(GaussianRational::from_real(parse_rational(&normalized, s)?));
        };
        // split at the last sign that is not the leading one
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        match split {
            Some(k) => {
                let re = parse_rational(&head[..k], s)?;
                let im = parse_imag_coeff(&head[k..], s)?;
                Ok(GaussianRational { re, im })
            }
            None => Ok(GaussianRational {
                re: BigRational::zero(),
                im: parse_imag_coeff(head, s)?,
            }),
        }
    }
}

impl serde::Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_documented_forms() {
        assert_eq!(
            q("\u{2212}3/2+1/1i"),
            GaussianRational::from_fractions(-3, 2, 1, 1)
        );
        assert_eq!(q("2"), GaussianRational::from_int(2));
        assert_eq!(q("2/1"), GaussianRational::from_int(2));
        assert_eq!(q("4/6"), GaussianRational::from_fractions(2, 3, 0, 1));
        assert_eq!(q("i"), GaussianRational::i());
        assert_eq!(q("-i"), -GaussianRational::i());
        assert_eq!(q("1/2i"), GaussianRational::from_fractions(0, 1, 1, 2));
        assert_eq!(q("1-i"), GaussianRational::from_fractions(1, 1, -1, 1));
        assert_eq!(
            q("-1/3-2/5i"),
            GaussianRational::from_fractions(-1, 3, -2, 5)
        );
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1/0", "abc", "1//2", "1/2+", "1+2+3i", "3/-2"] {
            assert!(
                bad.parse::<GaussianRational>().is_err(),
                "{bad:?} should not parse"
            );
        }
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(
            GaussianRational::from_fractions(-3, 2, 1, 1).to_string(),
            "-3/2+1i"
        );
        assert_eq!(
            GaussianRational::from_fractions(0, 1, -1, 2).to_string(),
            "-1/2i"
        );
        assert_eq!(GaussianRational::zero().to_string(), "0");
        assert_eq!(
            GaussianRational::from_fractions(6, 4, -2, 1).to_string(),
            "3/2-2i"
        );
    }

    #[test]
    fn field_arithmetic() {
        let a = q("1+2i");
        let b = q("3-i");
        assert_eq!(&a * &b, q("5+5i"));
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(a.conj(), q("1-2i"));
        assert_eq!((&a * &a.conj()), GaussianRational::from_int(5));
        assert!(GaussianRational::zero().inv().is_none());
    }

    proptest::proptest! {
        #[test]
        fn display_parse_round_trip(a in -50i64..50, b in 1i64..20, c in -50i64..50, d in 1i64..20) {
            let z = GaussianRational::from_fractions(a, b, c, d);
            proptest::prop_assert_eq!(z.to_string().parse::<GaussianRational>().unwrap(), z);
        }
    }
}

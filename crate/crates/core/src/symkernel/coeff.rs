//! Exact scalars: Gaussian rationals `re + im*i` with arbitrary-precision
//! rational parts. All kernel arithmetic bottoms out here; no floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};

pub type Rat = BigRational;

/// `re + im*i`, both parts exact rationals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coeff {
    #[serde(with = "rat_serde")]
    pub re: Rat,
    #[serde(with = "rat_serde")]
    pub im: Rat,
}

pub(crate) mod rat_serde {
    use super::Rat;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        Rat::from_str(&s).map_err(|e| D::Error::custom(format!("bad rational {s:?}: {e}")))
    }
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        Coeff { re: Rat::one(), im: Rat::zero() }
    }

    pub fn i() -> Self {
        Coeff { re: Rat::zero(), im: Rat::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Coeff { re: Rat::from_integer(BigInt::from(n)), im: Rat::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coeff { re: Rat::new(BigInt::from(num), BigInt::from(den)), im: Rat::zero() }
    }

    pub fn from_rat(r: Rat) -> Self {
        Coeff { re: r, im: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coeff { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "division by zero coefficient");
        Coeff { re: &self.re / &n, im: -&self.im / &n }
    }

    pub fn pow(&self, n: i64) -> Self {
        if n == 0 {
            return Coeff::one();
        }
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = Coeff::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Exact `b`-th root of a real rational coefficient, if one exists.
    /// Negative radicands are handled for odd roots only.
    pub fn rational_root(&self, b: i64) -> Option<Coeff> {
        if !self.is_real() || b <= 0 {
            return None;
        }
        if self.re.is_negative() && b % 2 == 0 {
            return None;
        }
        let root_int = |x: &BigInt| -> Option<BigInt> {
            let r = x.abs().nth_root(b as u32);
            let mut cand = num_traits::pow::pow(r.clone(), b as usize);
            let target = x.abs();
            if cand != target {
                return None;
            }
            cand = if x.is_negative() { -r } else { r };
            Some(cand)
        };
        let n = root_int(self.re.numer())?;
        let d = root_int(self.re.denom())?;
        Some(Coeff::from_rat(Rat::new(n, d)))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        let f = |r: &Rat| {
            let n = r.numer();
            let d = r.denom();
            // Exact enough for numeric verification tolerances.
            let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
            let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
            nf / df
        };
        (f(&self.re), f(&self.im))
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        Coeff { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        Coeff { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        Coeff {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &Coeff {
    type Output = Coeff;
    fn div(self, rhs: &Coeff) -> Coeff {
        self * &rhs.inv()
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl MulAssign<&Coeff> for Coeff {
    fn mul_assign(&mut self, rhs: &Coeff) {
        *self = &*self * rhs;
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            if self.im.is_one() {
                write!(f, "i")
            } else if (-&self.im).is_one() {
                write!(f, "-i")
            } else {
                write!(f, "{}i", self.im)
            }
        } else if self.im.is_negative() {
            write!(f, "({}{}i)", self.re, self.im)
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

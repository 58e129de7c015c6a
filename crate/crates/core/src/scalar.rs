//! Exact rational scalars and fixed-dimension vectors.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"-7"` or a finite decimal such as `"4.5"` exactly.
pub fn parse_scalar(text: &str) -> std::result::Result<Scalar, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| format!("bad numerator in `{s}`"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| format!("bad denominator in `{s}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Scalar::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal `{s}`"));
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mut num = BigInt::from_str(&digits).map_err(|_| format!("bad decimal `{s}`"))?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Scalar::new(num, den));
    }
    BigInt::from_str(s)
        .map(Scalar::from_integer)
        .map_err(|_| format!("bad number `{s}`"))
}

/// Canonical text form: integers as `n`, everything else as `p/q`.
pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering with `places` digits after the point (rounded half away from zero).
pub fn format_decimal(x: &Scalar, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = x * Scalar::from_integer(scale.clone());
    let half = ratio(1, 2);
    let rounded = if scaled.is_negative() {
        -((-scaled + half).floor())
    } else {
        (scaled + half).floor()
    };
    let n = rounded.to_integer();
    let negative = n.is_negative();
    let digits = n.abs().to_string();
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = places + 1);
        let (w, f) = padded.split_at(padded.len() - places);
        let f = f.trim_end_matches('0');
        if f.is_empty() {
            w.to_string()
        } else {
            format!("{w}.{f}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// A vector in Q^d.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VecD(pub Vec<Scalar>);

impl VecD {
    pub fn new(components: Vec<Scalar>) -> Self {
        VecD(components)
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        VecD(xs.iter().map(|&x| int(x)).collect())
    }

    pub fn from_ratios(xs: &[(i64, i64)]) -> Self {
        VecD(xs.iter().map(|&(p, q)| ratio(p, q)).collect())
    }

    pub fn zeros(d: usize) -> Self {
        VecD(vec![Scalar::zero(); d])
    }

    pub fn ones(d: usize) -> Self {
        VecD(vec![Scalar::one(); d])
    }

    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = Self::zeros(d);
        v.0[i] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &VecD) -> Scalar {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, alpha: &Scalar) -> VecD {
        VecD(self.0.iter().map(|x| x * alpha).collect())
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: &Scalar, other: &VecD) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += alpha * b;
        }
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: d,
                found: self.dim(),
            })
        }
    }

    pub fn to_decimal_string(&self, places: usize) -> String {
        let parts: Vec<String> = self.0.iter().map(|x| format_decimal(x, places)).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for VecD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_scalar).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Add for &VecD {
    type Output = VecD;
    fn add(self, rhs: &VecD) -> VecD {
        VecD(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VecD {
    type Output = VecD;
    fn sub(self, rhs: &VecD) -> VecD {
        VecD(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &VecD {
    type Output = VecD;
    fn neg(self) -> VecD {
        VecD(self.0.iter().map(|a| -a).collect())
    }
}

/// Renders a finite set as `{a, b}`; the empty set as `∅`.
pub fn format_set<'a>(items: impl IntoIterator<Item = &'a VecD>) -> String {
    let parts: Vec<String> = items.into_iter().map(ToString::to_string).collect();
    if parts.is_empty() {
        "∅".to_string()
    } else {
        format!("{{{}}}", parts.join(", "))
    }
}

/// Removes exact duplicates, keeping first occurrences in order.
pub fn dedup_vectors(xs: &[VecD]) -> Vec<VecD> {
    let mut seen = std::collections::HashSet::new();
    xs.iter().filter(|x| seen.insert((*x).clone())).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_number_forms() {
        assert_eq!(parse_scalar("9/2").unwrap(), ratio(9, 2));
        assert_eq!(parse_scalar("-3").unwrap(), int(-3));
        assert_eq!(parse_scalar("4.5").unwrap(), ratio(9, 2));
        assert_eq!(parse_scalar("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_scalar(" 6/4 ").unwrap(), ratio(3, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_scalar(&ratio(9, 2)), "9/2");
        assert_eq!(format_scalar(&ratio(8, 2)), "4");
        assert_eq!(format_decimal(&ratio(9, 2), 4), "4.5");
        assert_eq!(format_decimal(&ratio(-1, 3), 3), "-0.333");
        assert_eq!(format_decimal(&ratio(2, 3), 2), "0.67");
        assert_eq!(format_decimal(&int(5), 4), "5");
        assert_eq!(VecD::from_ratios(&[(9, 2), (5, 1)]).to_string(), "(9/2,5)");
    }

    #[test]
    fn empty_set_renders_as_symbol() {
        assert_eq!(format_set(&[]), "∅");
        assert_eq!(
            format_set(&[VecD::from_ints(&[5, 4]), VecD::from_ratios(&[(9, 2), (5, 1)])]),
            "{(5,4), (9/2,5)}"
        );
    }

    #[test]
    fn exact_arithmetic_round_trips() {
        let a = ratio(1, 3);
        let b = ratio(-7, 11);
        assert_eq!((&a + &b) - &b, a);
    }
}

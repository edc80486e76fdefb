//! Exact rational parameters.
//!
//! Degree fractions and slack parameters are carried as reduced fractions so
//! that every bound reduces to an integer via explicit ceilings and floors.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatioError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse `{0}` as a fraction (expected NUM/DEN or a decimal)")]
    Parse(String),
}

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.max(1)
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Result<Self, RatioError> {
        if den == 0 {
            return Err(RatioError::ZeroDenominator);
        }
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Ok(Ratio {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn integer(v: i64) -> Self {
        Ratio { num: v, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌈self · n⌉`
    pub fn ceil_mul(&self, n: usize) -> i64 {
        let p = self.num as i128 * n as i128;
        let d = self.den as i128;
        p.div_euclid(d) as i64 + i64::from(p.rem_euclid(d) != 0)
    }

    /// `⌊self · n⌋`
    pub fn floor_mul(&self, n: usize) -> i64 {
        (self.num as i128 * n as i128).div_euclid(self.den as i128) as i64
    }

    pub fn sub(&self, other: &Ratio) -> Ratio {
        Ratio::new(
            self.num * other.den - other.num * self.den,
            self.den * other.den,
        )
        .expect("non-zero denominators")
    }

    pub fn mul(&self, other: &Ratio) -> Ratio {
        Ratio::new(self.num * other.num, self.den * other.den).expect("non-zero denominators")
    }

    pub fn mul_int(&self, k: i64) -> Ratio {
        Ratio::new(self.num * k, self.den).expect("non-zero denominator")
    }

    pub fn half() -> Ratio {
        Ratio { num: 1, den: 2 }
    }

    pub fn one() -> Ratio {
        Ratio { num: 1, den: 1 }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = RatioError;

    /// Accepts `3/5`, `1`, or a finite decimal such as `0.6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RatioError::Parse(s.to_string());
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            return Ratio::new(a, b);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let scale = 10i64.pow(frac.len() as u32);
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            let mag = int.abs() * scale + frac;
            return Ratio::new(if negative { -mag } else { mag }, scale);
        }
        let v: i64 = s.parse().map_err(|_| bad())?;
        Ok(Ratio::integer(v))
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `⌈√n⌉`
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// `⌊√n⌋`
pub fn floor_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `⌈n^{2/3}⌉`, the smallest `t` with `t³ ≥ n²`.
pub fn ceil_two_thirds_power(n: usize) -> usize {
    let target = (n as u128) * (n as u128);
    let mut t = (n as f64).powf(2.0 / 3.0) as u128;
    while t * t * t < target {
        t += 1;
    }
    while t > 0 && (t - 1) * (t - 1) * (t - 1) >= target {
        t -= 1;
    }
    t as usize
}

//! Scalar arithmetic and the combinatorial primitives shared by every module.
//!
//! All formulas are generic over [`Scalar`], an ordered field carried either
//! as an exact rational (`BigRational`, lossless) or as binary floating point
//! (`f64`). The two modes are distinct types, so a computation can never
//! drift from one to the other.
//!
//! The primitives are the increasing factorial (x)ₘ = x(x+1)⋯(x+m−1), the
//! normalized form Θ(m) = (θ)ₘ/m! (the mth coefficient of (1−x)^{−θ}, with
//! Θ(m) = 0 for negative m), and the generalized binomial coefficient with a
//! real upper argument.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Element of the ordered field the formulas are evaluated in.
///
/// Exact mode (`BigRational`) is closed and lossless: `(a + b) - b == a`
/// identically. Float mode (`f64`) trades that for speed and irrational θ.
pub trait Scalar:
    Clone + PartialOrd + fmt::Debug + fmt::Display + Signed + Neg<Output = Self> + 'static
{
    /// True when arithmetic is lossless.
    const EXACT: bool;
    /// Mode name used in reports and errors.
    const MODE: &'static str;

    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact image of a binary floating value (every finite `f64` is rational).
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Parse the mode's textual form: `p/q` or an integer in exact mode,
    /// any of those or a decimal literal in float mode.
    fn parse_text(text: &str) -> Result<Self, Error>;
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_text(text: &str) -> Result<Self, Error> {
        let err = || Error::ParseScalar {
            text: text.to_string(),
            mode: Self::MODE,
        };
        let mut parts = text.trim().splitn(2, '/');
        let num = BigInt::from_str(parts.next().ok_or_else(err)?.trim()).map_err(|_| err())?;
        let den = match parts.next() {
            Some(d) => BigInt::from_str(d.trim()).map_err(|_| err())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(err());
        }
        Ok(BigRational::new(num, den))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_text(text: &str) -> Result<Self, Error> {
        let err = || Error::ParseScalar {
            text: text.to_string(),
            mode: Self::MODE,
        };
        let t = text.trim();
        let value = if let Some((num, den)) = t.split_once('/') {
            let num = f64::from_str(num.trim()).map_err(|_| err())?;
            let den = f64::from_str(den.trim()).map_err(|_| err())?;
            num / den
        } else {
            f64::from_str(t).map_err(|_| err())?
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(err())
        }
    }
}

/// The Ewens parameter θ > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaParam<S: Scalar>(S);

impl<S: Scalar> ThetaParam<S> {
    pub fn new(theta: S) -> Result<Self, Error> {
        if theta > S::zero() {
            Ok(ThetaParam(theta))
        } else {
            Err(Error::ThetaNotPositive {
                text: theta.to_string(),
            })
        }
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        Self::new(S::parse_text(text)?)
    }

    pub fn get(&self) -> &S {
        &self.0
    }
}

impl<S: Scalar> fmt::Display for ThetaParam<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Increasing factorial (x)ₘ = x(x+1)⋯(x+m−1); empty product for m = 0.
pub fn rising_factorial<S: Scalar>(x: &S, m: usize) -> S {
    let mut acc = S::one();
    for k in 0..m {
        acc = acc * (x.clone() + S::from_int(k as i64));
    }
    acc
}

/// m! as a scalar.
pub fn factorial<S: Scalar>(m: usize) -> S {
    let mut acc = S::one();
    for k in 2..=m {
        acc = acc * S::from_int(k as i64);
    }
    acc
}

/// Θ(m) = (θ)ₘ/m! for m ≥ 0, and exactly 0 for m < 0.
pub fn theta_coeff<S: Scalar>(theta: &ThetaParam<S>, m: i64) -> S {
    if m < 0 {
        return S::zero();
    }
    let m = m as usize;
    rising_factorial(theta.get(), m) / factorial::<S>(m)
}

/// Generalized binomial coefficient: a(a−1)⋯(a−k+1)/k!; 1 when k = 0.
pub fn gen_binomial<S: Scalar>(a: &S, k: usize) -> S {
    let mut num = S::one();
    for i in 0..k {
        num = num * (a.clone() - S::from_int(i as i64));
    }
    num / factorial::<S>(k)
}

/// Integer power by repeated multiplication (exponents here are cycle counts,
/// all small).
pub fn pow_usize<S: Scalar>(base: &S, e: usize) -> S {
    let mut acc = S::one();
    for _ in 0..e {
        acc = acc * base.clone();
    }
    acc
}

/// Memoized table of Θ(0..=cap) for one (θ, n) session.
///
/// Every module queries Θ(n−j) and relatives repeatedly; the table is filled
/// once by the recurrence Θ(m) = Θ(m−1)(θ+m−1)/m.
#[derive(Clone, Debug)]
pub struct ThetaTable<S: Scalar> {
    theta: ThetaParam<S>,
    vals: Vec<S>,
}

impl<S: Scalar> ThetaTable<S> {
    pub fn new(theta: ThetaParam<S>, cap: usize) -> Self {
        let mut vals = Vec::with_capacity(cap + 1);
        vals.push(S::one());
        for m in 1..=cap {
            let prev = vals[m - 1].clone();
            let step = (theta.get().clone() + S::from_int(m as i64 - 1)) / S::from_int(m as i64);
            vals.push(prev * step);
        }
        ThetaTable { theta, vals }
    }

    pub fn theta(&self) -> &S {
        self.theta.get()
    }

    pub fn theta_param(&self) -> &ThetaParam<S> {
        &self.theta
    }

    pub fn cap(&self) -> usize {
        self.vals.len() - 1
    }

    /// Θ(m), with the convention Θ(−k) = 0 for k ∈ ℕ.
    pub fn get(&self, m: i64) -> S {
        if m < 0 {
            return S::zero();
        }
        let m = m as usize;
        assert!(
            m <= self.cap(),
            "theta table built for cap {}, asked {}",
            self.cap(),
            m
        );
        self.vals[m].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn rising_factorial_examples() {
        // (x)_0 = 1 (empty product)
        assert_eq!(rising_factorial(&q(7, 3), 0), Q::one());
        // (1)_m = m!
        assert_eq!(rising_factorial(&q(1, 1), 5), q(120, 1));
        // (1/2)_3 = (1/2)(3/2)(5/2)
        assert_eq!(rising_factorial(&q(1, 2), 3), q(15, 8));
    }

    #[test]
    fn theta_coeff_examples() {
        let one = ThetaParam::new(q(1, 1)).unwrap();
        assert_eq!(theta_coeff(&one, 7), Q::one());
        let any = ThetaParam::new(q(9, 4)).unwrap();
        assert_eq!(theta_coeff(&any, -3), Q::zero());
        let two = ThetaParam::new(q(2, 1)).unwrap();
        // (2)_3/3! = 24/6
        assert_eq!(theta_coeff(&two, 3), q(4, 1));
    }

    #[test]
    fn gen_binomial_examples() {
        assert_eq!(gen_binomial(&q(5, 1), 2), q(10, 1));
        assert_eq!(gen_binomial(&q(1, 2), 2), q(-1, 8));
        assert_eq!(gen_binomial(&q(4, 1), 0), Q::one());
    }

    #[test]
    fn gen_binomial_matches_integer_binomial() {
        for n in 0..10i64 {
            let mut pascal = 1i64;
            for k in 0..=n {
                assert_eq!(gen_binomial(&q(n, 1), k as usize), q(pascal, 1));
                pascal = pascal * (n - k) / (k + 1).max(1);
            }
        }
    }

    #[test]
    fn theta_table_matches_direct() {
        for (p, d) in [(1i64, 1i64), (2, 1), (1, 2), (7, 3)] {
            let theta = ThetaParam::new(q(p, d)).unwrap();
            let table = ThetaTable::new(theta.clone(), 20);
            for m in -3..=20i64 {
                assert_eq!(table.get(m), theta_coeff(&theta, m));
            }
        }
    }

    /// Independent power-series oracle for Θ: expand (1−x)^{−p/q} by taking
    /// the exact qth root of (1−x)^{−p}, itself built by convolving the
    /// geometric series p times. No factorials or binomials involved.
    fn series_coeffs(p: u32, den: u32, terms: usize) -> Vec<Q> {
        let f = vec![Q::one(); terms]; // geometric series 1/(1-x)
        let mut pow = vec![Q::zero(); terms];
        pow[0] = Q::one();
        for _ in 0..p {
            let mut next = vec![Q::zero(); terms];
            for i in 0..terms {
                for j in 0..=i {
                    next[i] = next[i].clone() + pow[j].clone() * f[i - j].clone();
                }
            }
            pow = next;
        }
        let f = pow; // now f = (1-x)^{-p}
        if den == 1 {
            return f;
        }
        // g with g^den = f, g_0 = 1: solve coefficient by coefficient.
        let mut g = vec![Q::zero(); terms];
        g[0] = Q::one();
        for m in 1..terms {
            // In (g^den)_m the unknown g_m appears as den·g_m; the rest uses g_{<m}.
            let mut known = g.clone();
            known[m] = Q::zero();
            let mut acc = vec![Q::zero(); terms];
            acc[0] = Q::one();
            for _ in 0..den {
                let mut next = vec![Q::zero(); terms];
                for i in 0..=m {
                    for j in 0..=i {
                        next[i] = next[i].clone() + acc[j].clone() * known[i - j].clone();
                    }
                }
                acc = next;
            }
            g[m] = (f[m].clone() - acc[m].clone()) / Q::from_int(den as i64);
        }
        g
    }

    #[test]
    fn theta_coeff_is_power_series_of_binomial_series() {
        for (p, d) in [(1u32, 1u32), (2, 1), (3, 1), (1, 2), (5, 3)] {
            let coeffs = series_coeffs(p, d, 13);
            let theta = ThetaParam::new(q(p as i64, d as i64)).unwrap();
            for (m, coeff) in coeffs.iter().enumerate() {
                assert_eq!(
                    &theta_coeff(&theta, m as i64),
                    coeff,
                    "theta = {p}/{d}, m = {m}"
                );
            }
        }
    }

    #[test]
    fn parse_and_render_round_trip() {
        let v = Q::parse_text("-21/14").unwrap();
        assert_eq!(v, q(-3, 2));
        assert_eq!(v.to_string(), "-3/2");
        assert_eq!(Q::parse_text(&v.to_string()).unwrap(), v);
        assert!(Q::parse_text("0.5").is_err());
        assert!(Q::parse_text("1/0").is_err());

        let f = f64::parse_text("0.5").unwrap();
        assert_eq!(f, 0.5);
        let f = f64::parse_text("1/3").unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-15);
        assert!(f64::parse_text("nan").is_err());
    }

    #[test]
    fn theta_must_be_positive() {
        assert!(ThetaParam::<Q>::new(q(0, 1)).is_err());
        assert!(ThetaParam::<Q>::new(q(-1, 2)).is_err());
        assert!(ThetaParam::<f64>::parse("0.0").is_err());
    }
}

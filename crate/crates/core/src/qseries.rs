//! Truncated Laurent series in `q` over exact rationals.
//!
//! A [`QSeries`] stores the coefficients of `q^e` for `lead <= e < known_through`.
//! Every stored coefficient is exact, and every operation propagates the
//! precision pessimistically so that nothing is ever reported beyond what
//! the inputs determine:
//!
//! | operation | known through |
//! |-----------|---------------|
//! | `f ± g`   | `min(K_f, K_g)` |
//! | `f · g`   | `min(K_f + v_g, K_g + v_f)` |
//! | `1 / f`   | `K_f - 2 v_f` |
//! | `U_p f`   | `ceil(K_f / p)` |
//! | `V_p f`   | `p (K_f - 1) + 1` |
//! | `θ f`     | `K_f` |

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{fmt_rat, min_val2, parse_rat, rat, Rat, Val2};

/// Convolutions shorter than this run sequentially.
const PAR_THRESHOLD: usize = 96;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    lead: i64,
    coeffs: Vec<Rat>,
    known_through: i64,
}

/// A series valuation is only a statement about the known coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesVal2 {
    pub value: Val2,
    /// The minimum was taken over exponents below this bound only.
    pub known_through: i64,
}

impl QSeries {
    /// Series with `coeffs[i]` at `q^(lead + i)`, known below `known_through`.
    /// Missing trailing coefficients are taken to be zero; extra ones are
    /// discarded.
    pub fn new(lead: i64, mut coeffs: Vec<Rat>, known_through: i64) -> QSeries {
        let len = (known_through - lead).max(0) as usize;
        coeffs.resize(len, Rat::zero());
        let mut s = QSeries {
            lead,
            coeffs,
            known_through,
        };
        s.normalize();
        s
    }

    /// Power series `Σ coeffs[i] q^i` known below `known_through`.
    pub fn from_coeffs(coeffs: Vec<Rat>, known_through: i64) -> QSeries {
        QSeries::new(0, coeffs, known_through)
    }

    pub fn from_ints(coeffs: &[i64], known_through: i64) -> QSeries {
        QSeries::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect(), known_through)
    }

    pub fn zero(known_through: i64) -> QSeries {
        QSeries {
            lead: known_through,
            coeffs: Vec::new(),
            known_through,
        }
    }

    pub fn one(known_through: i64) -> QSeries {
        QSeries::monomial(Rat::one(), 0, known_through)
    }

    pub fn monomial(c: Rat, e: i64, known_through: i64) -> QSeries {
        QSeries::new(e, vec![c], known_through)
    }

    fn normalize(&mut self) {
        let nz = self.coeffs.iter().position(|c| !c.is_zero());
        match nz {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.lead += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.lead = self.lead.max(self.known_through);
            }
        }
    }

    /// Lowest exponent with a nonzero known coefficient (equals
    /// `known_through` for a series that is zero on its known range).
    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn known_through(&self) -> i64 {
        self.known_through
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Known coefficients from `lead()` upward.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `q^e`; an error when `e` is beyond the known range.
    pub fn coeff(&self, e: i64) -> Result<Rat> {
        if e >= self.known_through {
            return Err(Error::PrecisionStarvation {
                needed: e + 1,
                available: self.known_through,
            });
        }
        Ok(self.coeff_unchecked(e))
    }

    fn coeff_unchecked(&self, e: i64) -> Rat {
        if e < self.lead || e >= self.known_through {
            Rat::zero()
        } else {
            self.coeffs[(e - self.lead) as usize].clone()
        }
    }

    /// Coefficients of `q^from .. q^to`, zero-filled below the lead.
    pub fn coeff_range(&self, from: i64, to: i64) -> Result<Vec<Rat>> {
        if to > self.known_through {
            return Err(Error::PrecisionStarvation {
                needed: to,
                available: self.known_through,
            });
        }
        Ok((from..to).map(|e| self.coeff_unchecked(e)).collect())
    }

    /// Drops coefficients at and beyond `k`. Requesting more precision than
    /// is known is an error.
    pub fn truncate(&self, k: i64) -> Result<QSeries> {
        if k > self.known_through {
            return Err(Error::PrecisionStarvation {
                needed: k,
                available: self.known_through,
            });
        }
        let keep = (k - self.lead).max(0) as usize;
        Ok(QSeries::new(
            self.lead,
            self.coeffs.iter().take(keep).cloned().collect(),
            k,
        ))
    }

    pub fn scale(&self, c: &Rat) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.known_through);
        }
        QSeries {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            known_through: self.known_through,
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            lead: self.lead + k,
            coeffs: self.coeffs.clone(),
            known_through: self.known_through + k,
        }
    }

    fn combine(&self, other: &QSeries, sign: i64) -> QSeries {
        let k = self.known_through.min(other.known_through);
        let lead = self.lead.min(other.lead).min(k);
        let coeffs = (lead..k)
            .map(|e| {
                let a = self.coeff_unchecked(e);
                let b = other.coeff_unchecked(e);
                if sign > 0 {
                    a + b
                } else {
                    a - b
                }
            })
            .collect();
        QSeries::new(lead, coeffs, k)
    }

    /// Integer numerators over a common denominator.
    fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (nums, den)
    }

    pub fn mul_series(&self, other: &QSeries) -> QSeries {
        let k = (self.known_through + other.lead).min(other.known_through + self.lead);
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(k);
        }
        let lead = self.lead + other.lead;
        if k <= lead {
            return QSeries::zero(k);
        }
        let n = (k - lead) as usize;
        let (a, da) = self.integer_form();
        let (b, db) = other.integer_form();
        let den = Rat::from_integer(da * db);
        let term = |t: usize| -> Rat {
            let lo = t.saturating_sub(b.len() - 1);
            let hi = t.min(a.len() - 1);
            let mut acc = BigInt::zero();
            for i in lo..=hi {
                acc += &a[i] * &b[t - i];
            }
            Rat::from_integer(acc) / &den
        };
        let coeffs: Vec<Rat> = if n >= PAR_THRESHOLD {
            (0..n).into_par_iter().map(term).collect()
        } else {
            (0..n).map(term).collect()
        };
        QSeries::new(lead, coeffs, k)
    }

    /// Multiplicative inverse; requires a nonzero known coefficient.
    pub fn invert(&self) -> Result<QSeries> {
        if self.is_zero() {
            return Err(Error::NotInvertible(format!(
                "series is zero below q^{}",
                self.known_through
            )));
        }
        let v = self.lead;
        let n = self.coeffs.len();
        let a0_inv = self.coeffs[0].recip();
        let mut b: Vec<Rat> = Vec::with_capacity(n);
        b.push(a0_inv.clone());
        for t in 1..n {
            let mut acc = Rat::zero();
            for i in 1..=t {
                let ai = &self.coeffs[i];
                if !ai.is_zero() {
                    acc += ai * &b[t - i];
                }
            }
            b.push(-acc * &a0_inv);
        }
        Ok(QSeries::new(-v, b, self.known_through - 2 * v))
    }

    /// Exact power by repeated squaring; negative exponents invert first.
    /// `f^0` is `1` known to the relative precision of `f`.
    pub fn pow(&self, e: i64) -> Result<QSeries> {
        if e == 0 {
            return Ok(QSeries::one((self.known_through - self.lead).max(0)));
        }
        let mut sq = if e < 0 { self.invert()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc: Option<QSeries> = None;
        loop {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul_series(&sq),
                });
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            sq = sq.mul_series(&sq);
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// `θ = q d/dq`.
    pub fn theta(&self) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * rat(self.lead + i as i64))
            .collect();
        QSeries::new(self.lead, coeffs, self.known_through)
    }

    /// `Σ a_i q^i ↦ Σ a_{pi} q^i`.
    pub fn u_p(&self, p: u32) -> QSeries {
        let p = p as i64;
        let k = Integer::div_ceil(&self.known_through, &p);
        let lead = Integer::div_ceil(&self.lead, &p).min(k);
        let coeffs = (lead..k).map(|i| self.coeff_unchecked(p * i)).collect();
        QSeries::new(lead, coeffs, k)
    }

    /// `q ↦ q^p`.
    pub fn v_p(&self, p: u32) -> QSeries {
        let p = p as i64;
        let k = p * (self.known_through - 1) + 1;
        if self.is_zero() {
            return QSeries::zero(k);
        }
        let lead = p * self.lead;
        let mut coeffs = vec![Rat::zero(); (k - lead) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * p as usize] = c.clone();
        }
        QSeries::new(lead, coeffs, k)
    }

    /// Minimum 2-adic valuation of the known coefficients.
    pub fn val2(&self) -> SeriesVal2 {
        SeriesVal2 {
            value: min_val2(&self.coeffs),
            known_through: self.known_through,
        }
    }

    /// First exponent below `k` where the two series differ.
    pub fn first_difference(&self, other: &QSeries, k: i64) -> Result<Option<i64>> {
        for s in [self, other] {
            if s.known_through < k {
                return Err(Error::PrecisionStarvation {
                    needed: k,
                    available: s.known_through,
                });
            }
        }
        let from = self.lead.min(other.lead);
        Ok((from..k).find(|&e| self.coeff_unchecked(e) != other.coeff_unchecked(e)))
    }

    /// Exact agreement of every coefficient below `q^k`.
    pub fn eq_through(&self, other: &QSeries, k: i64) -> Result<bool> {
        Ok(self.first_difference(other, k)?.is_none())
    }

    pub fn to_json(&self) -> QSeriesJson {
        QSeriesJson {
            lead: self.lead,
            known_through: self.known_through,
            coeffs: self.coeffs.iter().map(fmt_rat).collect(),
        }
    }

    pub fn from_json(j: &QSeriesJson) -> Result<QSeries> {
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>>>()?;
        if j.lead + coeffs.len() as i64 > j.known_through {
            return Err(Error::Parse(format!(
                "{} coefficients from q^{} exceed known_through {}",
                coeffs.len(),
                j.lead,
                j.known_through
            )));
        }
        Ok(QSeries::new(j.lead, coeffs, j.known_through))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeriesJson {
    pub lead: i64,
    pub known_through: i64,
    pub coeffs: Vec<String>,
}

fn q_power(e: i64) -> String {
    match e {
        1 => "q".to_string(),
        e if e < 0 => format!("q^({e})"),
        e => format!("q^{e}"),
    }
}

impl fmt::Display for QSeries {
    /// `1 - 24q - 72q^2 + O(q^3)`. Non-integral coefficients of nonconstant
    /// terms are parenthesised: `1/240 + q + (1/2)q^3 + O(q^4)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.lead + i as i64;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if e == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", q_power(e))?;
            } else if mag.is_integer() {
                write!(f, "{mag}{}", q_power(e))?;
            } else {
                write!(f, "({mag}){}", q_power(e))?;
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O({})", q_power(self.known_through))
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.combine(rhs, 1)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.combine(rhs, -1)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale(&rat(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &QSeries) -> QSeries {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

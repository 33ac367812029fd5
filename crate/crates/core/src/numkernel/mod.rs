//! Exact scalars: rationals, 2-adic valuations, Bernoulli numbers, rising
//! factorials and double factorials, plus the exact linear solver in
//! [`linalg`].

pub mod linalg;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use linalg::{solve_exact, LinearSolution};

/// Exact rational, always normalized with a positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_rat(n: BigInt) -> Rat {
    Rat::from_integer(n)
}

/// `2^e` for any integer `e`.
pub fn pow2(e: i64) -> Rat {
    prime_power(2, e)
}

/// `p^e` for any integer `e`.
pub fn prime_power(p: u64, e: i64) -> Rat {
    let base = BigInt::from(p);
    let mag = num_traits::pow(base, e.unsigned_abs() as usize);
    if e >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

/// A 2-adic valuation: an integer, or `+∞` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Val2 {
    Finite(i64),
    Infinite,
}

impl Val2 {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val2::Finite(v) => Some(v),
            Val2::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Val2::Infinite)
    }
}

impl PartialOrd for Val2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val2 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val2::Finite(a), Val2::Finite(b)) => a.cmp(b),
            (Val2::Finite(_), Val2::Infinite) => Ordering::Less,
            (Val2::Infinite, Val2::Finite(_)) => Ordering::Greater,
            (Val2::Infinite, Val2::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Val2 {
    type Output = Val2;

    fn add(self, rhs: Val2) -> Val2 {
        match (self, rhs) {
            (Val2::Finite(a), Val2::Finite(b)) => Val2::Finite(a + b),
            _ => Val2::Infinite,
        }
    }
}

impl fmt::Display for Val2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val2::Finite(v) => write!(f, "{v}"),
            Val2::Infinite => write!(f, "+inf"),
        }
    }
}

/// Exponent of `p` dividing a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `p`-adic valuation of a rational (reported in the [`Val2`] shape).
pub fn valp(x: &Rat, p: u64) -> Val2 {
    if x.is_zero() {
        return Val2::Infinite;
    }
    let num = int_valuation(x.numer(), p) as i64;
    let den = int_valuation(x.denom(), p) as i64;
    Val2::Finite(num - den)
}

/// 2-adic valuation of a rational.
pub fn val2(x: &Rat) -> Val2 {
    valp(x, 2)
}

/// Minimum of [`val2`] over an iterator; `+∞` when empty or all zero.
pub fn min_val2<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Val2 {
    xs.into_iter().map(val2).min().unwrap_or(Val2::Infinite)
}

fn bernoulli_table() -> &'static Mutex<Vec<Rat>> {
    static TABLE: OnceLock<Mutex<Vec<Rat>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(Vec::new()))
}

/// Bernoulli numbers `B_0..=B_n` by the Akiyama–Tanigawa transform
/// (which yields `B_1 = +1/2`; only even indices are exposed).
fn akiyama_tanigawa(n: usize) -> Vec<Rat> {
    let mut row: Vec<Rat> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(ratio(1, m as i64 + 1));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * rat(j as i64);
        }
        out.push(row[0].clone());
    }
    out
}

/// Bernoulli number `B_k` for even `k >= 2` (`B_2 = 1/6`, `B_4 = -1/30`).
pub fn bernoulli(k: u32) -> Result<Rat> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "bernoulli index must be even and positive, got {k}"
        )));
    }
    let k = k as usize;
    let mut table = bernoulli_table().lock().expect("bernoulli table poisoned");
    if table.len() <= k {
        *table = akiyama_tanigawa(k.max(2 * table.len()).max(32));
    }
    Ok(table[k].clone())
}

/// Rising factorial `x (x+1) ... (x+k-1)`.
pub fn pochhammer(x: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term += Rat::one();
    }
    acc
}

/// `n!!` for `n >= -1`, with the empty-product convention `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> Result<BigInt> {
    if n < -1 {
        return Err(Error::InvalidParameter(format!(
            "double factorial undefined for {n}"
        )));
    }
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Ok(acc)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Binomial coefficient for `n >= 0`; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Renders `num/den`, always with an explicit denominator.
pub fn fmt_rat(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Trial-division factorization of a nonzero integer by primes below
/// `bound`. Returns the prime exponents and the leftover unfactored
/// cofactor (1 when fully factored). The sign is dropped.
pub fn factor_small(n: &BigInt, bound: u64) -> (BTreeMap<u64, u64>, BigInt) {
    let mut rest = n.abs();
    let mut out = BTreeMap::new();
    if rest.is_zero() {
        return (out, rest);
    }
    let mut p = 2u64;
    while p < bound && !rest.is_one() {
        let bp = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.insert(p, e);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (out, rest)
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

//! Serre's sequence `λ_{n,m}` converging 2-adically (more generally
//! `p`-adically) to `λ^n`.
//!
//! Three independent constructions are provided for `p = 2`: the trace
//! formula, the closed sum in `E_4` and `Δ`, and the integral polynomial in
//! `G_4, G_6` with coefficients `c_{n,m,i}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modforms::{
    delta, e4, e_star, eval_poly, lambda_hauptmodul, Basis, ModularPoly, HAUPTMODUL_PRIMES,
};
use crate::numkernel::{
    binomial, factor_small, factorial, fmt_rat, int_rat, pochhammer, pow2, prime_power, rat, val2,
    valp, Rat, Val2,
};
use crate::qseries::{QSeries, SeriesVal2};

const MAX_BLOCK: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SerreParams {
    pub p: u32,
    pub n: u32,
    pub m: u32,
}

impl SerreParams {
    pub fn new(p: u32, n: u32, m: u32) -> Result<SerreParams> {
        if !HAUPTMODUL_PRIMES.contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "p must be one of {HAUPTMODUL_PRIMES:?}, got {p}"
            )));
        }
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "n and m must be >= 1, got n={n}, m={m}"
            )));
        }
        if (p as u64).checked_pow(m).is_none_or(|b| b > MAX_BLOCK) {
            return Err(Error::InvalidParameter(format!("p^m too large: {p}^{m}")));
        }
        Ok(SerreParams { p, n, m })
    }

    /// Parameters for the `p = 2` closed forms, which need `n < 2^m`.
    pub fn two(n: u32, m: u32) -> Result<SerreParams> {
        let s = SerreParams::new(2, n, m)?;
        s.require_closed()?;
        Ok(s)
    }

    /// `p^m`.
    pub fn block(&self) -> i64 {
        (self.p as i64).pow(self.m)
    }

    pub fn has_closed_form(&self) -> bool {
        self.p == 2 && (self.n as i64) < self.block()
    }

    fn require_closed(&self) -> Result<()> {
        if self.p != 2 {
            return Err(Error::InvalidParameter(format!(
                "closed forms exist for p = 2 only, got p = {}",
                self.p
            )));
        }
        if self.n as i64 >= self.block() {
            return Err(Error::InvalidParameter(format!(
                "closed forms need n < 2^m, got n={}, m={}",
                self.n, self.m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceVariant {
    /// `λ^n(E_4 - p^4 E_4(q^p))^{3p^m} + p^{1-12n/(p-1)} U_p(λ^{-n}(E_4(q^p) - E_4)^{3p^m})`
    General,
    /// The `p = 2` rewrite through `E_2^*` and `Δ`.
    Simplified,
}

fn finish(s: QSeries, prec: i64) -> Result<QSeries> {
    if s.known_through() < prec {
        return Err(Error::PrecisionStarvation {
            needed: prec,
            available: s.known_through(),
        });
    }
    s.truncate(prec)
}

fn check_prec(prec: i64) -> Result<()> {
    if prec < 1 {
        return Err(Error::InvalidParameter(format!(
            "precision must be >= 1, got {prec}"
        )));
    }
    Ok(())
}

fn trace_general(s: SerreParams, prec: i64) -> Result<QSeries> {
    let (p, n) = (s.p, s.n as i64);
    let e = 3 * s.block();
    let lam_n = lambda_hauptmodul(p, prec)?.pow(n)?;
    let e4k = e4(prec);
    let y = &e4k - &e4k.v_p(p).truncate(prec)?.scale(&prime_power(p as u64, 4));
    let t1 = &lam_n * &y.pow(e)?;

    // U_p needs its argument through p(K-1)+1.
    let kz = p as i64 * (prec - 1) + 1;
    let l = (kz + n + 1 - e).max(n + 3);
    let lam_inv_n = lambda_hauptmodul(p, l)?.invert()?.pow(n)?;
    let lx = (kz + n + 1 - e).max(1);
    let e4x = e4(lx);
    let x = (&e4x.v_p(p).truncate(lx)? - &e4x).pow(e)?;
    let z = &lam_inv_n * &x;
    let scalar = prime_power(p as u64, 1 - 12 * n / (p as i64 - 1));
    let t2 = z.u_p(p).scale(&scalar);
    finish(&t1 + &t2, prec)
}

/// The two summands `T₁ = λ^n(5E_4 - 20E_2^{*2})^{3·2^m}` and
/// `T₂ = 2^{1-12n} 240^{3·2^m} Δ^{2^{m+1}-n} U_2(Δ^{n-2^m})` of the `p = 2` trace.
pub fn simplified_parts(s: SerreParams, prec: i64) -> Result<(QSeries, QSeries)> {
    if s.p != 2 {
        return Err(Error::InvalidParameter(
            "the simplified trace formula is specific to p = 2".into(),
        ));
    }
    check_prec(prec)?;
    let n = s.n as i64;
    let big = s.block();
    let es = e_star(2, 2, prec)?;
    let y = &e4(prec).scale(&rat(5)) - &(&es * &es).scale(&rat(20));
    let t1 = &lambda_hauptmodul(2, prec)?.pow(n)? * &y.pow(3 * big)?;

    // Δ^{n-2^m} may have either sign of exponent.
    let t = big - n;
    let inner = if t > 0 {
        delta(2 * prec + t + 1).invert()?.pow(t)?
    } else {
        delta(2 * prec + 1).pow(-t)?
    };
    let u = inner.u_p(2);
    let outer = delta(prec + 1).pow(2 * big - n)?;
    let scalar = pow2(1 - 12 * n) * int_rat(num_traits::pow(BigInt::from(240), 3 * big as usize));
    let t2 = (&outer * &u).scale(&scalar);
    Ok((finish(t1, prec)?, finish(t2, prec)?))
}

fn trace_simplified(s: SerreParams, prec: i64) -> Result<QSeries> {
    let (t1, t2) = simplified_parts(s, prec)?;
    Ok(&t1 + &t2)
}

/// `λ_{n,m}` through `prec` by the trace formula; `p = 2` uses the simplified
/// variant.
pub fn serre_trace(s: SerreParams, prec: i64) -> Result<QSeries> {
    let variant = if s.p == 2 {
        TraceVariant::Simplified
    } else {
        TraceVariant::General
    };
    serre_trace_with(s, variant, prec)
}

pub fn serre_trace_with(s: SerreParams, variant: TraceVariant, prec: i64) -> Result<QSeries> {
    check_prec(prec)?;
    match variant {
        TraceVariant::General => trace_general(s, prec),
        TraceVariant::Simplified => trace_simplified(s, prec),
    }
}

fn check_j(s: SerreParams, j: u32) -> Result<i64> {
    s.require_closed()?;
    let t = s.block() - s.n as i64;
    if j as i64 > t {
        return Err(Error::InvalidParameter(format!(
            "j = {j} outside 0..={t} for n={}, m={}",
            s.n, s.m
        )));
    }
    Ok(t)
}

/// `ψ_j = 2^{-8j} j! (3n - 3·2^m + 1)_{2j}`.
pub fn psi_coeff(n: u32, m: u32, j: u32) -> Result<Rat> {
    let s = SerreParams::two(n, m)?;
    check_j(s, j)?;
    let base = rat(3 * n as i64 - 3 * s.block() + 1);
    Ok(pow2(-8 * j as i64) * int_rat(factorial(j as u64)) * pochhammer(&base, 2 * j))
}

/// `ψ_j` as `2^{-12j} j! Π_{l=1}^{j} (8l - 12·2^m + 12n)(8l - 12·2^m + 12n - 4)`.
pub fn psi_coeff_product(n: u32, m: u32, j: u32) -> Result<Rat> {
    let s = SerreParams::two(n, m)?;
    check_j(s, j)?;
    let shift = 12 * n as i64 - 12 * s.block();
    let prod: BigInt = (1..=j as i64)
        .map(|l| BigInt::from(8 * l + shift) * BigInt::from(8 * l + shift - 4))
        .product();
    Ok(pow2(-12 * j as i64) * int_rat(factorial(j as u64) * prod))
}

/// `Ψ_{n,m,i,j}`; zero when `i > n + j`.
pub fn big_psi(n: u32, m: u32, i: u32, j: u32) -> Result<Rat> {
    let s = SerreParams::two(n, m)?;
    check_j(s, j)?;
    let (n, i, j) = (n as i64, i as i64, j as i64);
    if i > n + j {
        return Ok(Rat::zero());
    }
    let big = s.block();
    let a = 3 * big - 3 * n;
    let den = a - 2 * j;
    assert!(
        den != 0,
        "ratio denominator vanishes inside the summation range"
    );
    let sign = if (i + j) % 2 == 0 { rat(1) } else { rat(-1) };
    let value = int_rat(binomial(n + j, i) * binomial(den, j))
        * Rat::new(BigInt::from(a), BigInt::from(den))
        * sign
        * prime_power(2, 12 * big - 6 * n - 6 * i + 2 * j)
        * prime_power(3, 6 * big - 3 * n + i - 3 * j)
        * prime_power(5, 6 * big - 3 * i)
        * prime_power(7, 2 * i);
    Ok(value)
}

/// `c_{n,m,i} = Σ_j Ψ_{n,m,i,j}` for `0 <= i <= 2^m`, checked integral and
/// checked against the split-range form of the sum.
pub fn c_coeff(n: u32, m: u32, i: u32) -> Result<Rat> {
    let s = SerreParams::two(n, m)?;
    let big = s.block();
    if i as i64 > big {
        return Err(Error::InvalidParameter(format!(
            "i = {i} exceeds 2^m = {big}"
        )));
    }
    let t = (big - n as i64) as u32;
    let full = (0..=t).map(|j| big_psi(n, m, i, j)).sum::<Result<Rat>>()?;
    let from = i.saturating_sub(n);
    let split = (from..=t)
        .map(|j| big_psi(n, m, i, j))
        .sum::<Result<Rat>>()?;
    if full != split {
        return Err(Error::Disagreement(format!(
            "c_({n},{m},{i}): full range {full} vs split range {split}"
        )));
    }
    if !full.is_integer() {
        return Err(Error::NonIntegral {
            n,
            m,
            i,
            value: full,
        });
    }
    Ok(full)
}

/// `c_{n,m,i}` for `i = 0..=2^m`.
pub fn c_coeffs(n: u32, m: u32) -> Result<Vec<Rat>> {
    let s = SerreParams::two(n, m)?;
    (0..=s.block() as u32)
        .into_par_iter()
        .map(|i| c_coeff(n, m, i))
        .collect()
}

/// `C_{n,m} = 15^{3·2^m}`, the coefficient of `q^n` in `λ_{n,m}`.
pub fn leading_constant(n: u32, m: u32) -> Result<Rat> {
    let s = SerreParams::two(n, m)?;
    Ok(int_rat(num_traits::pow(
        BigInt::from(15),
        3 * s.block() as usize,
    )))
}

/// `Σ_j ψ_j^{-1} (3n - 3·2^m)_{3j} 15^{3·2^m} E_4^{3·2^m - 3n - 3j} Δ^{n+j}`.
pub fn serre_closed(n: u32, m: u32, prec: i64) -> Result<QSeries> {
    check_prec(prec)?;
    let s = SerreParams::two(n, m)?;
    let t = s.block() - n as i64;
    let c15 = leading_constant(n, m)?;
    let base = rat(3 * n as i64 - 3 * s.block());
    let e4_cubed = e4(prec).pow(3)?;
    let d = delta(prec);
    let terms: Vec<QSeries> = (0..=t)
        .into_par_iter()
        .map(|j| {
            let coeff = pochhammer(&base, 3 * j as u32) / psi_coeff(n, m, j as u32)? * &c15;
            let f = &e4_cubed.pow(t - j)? * &d.pow(n as i64 + j)?;
            Ok(f.scale(&coeff))
        })
        .collect::<Result<_>>()?;
    let sum = terms.iter().fold(QSeries::zero(prec), |acc, f| &acc + f);
    finish(sum, prec)
}

/// `Σ_i c_{n,m,i} G_4^{3·2^m - 3i} G_6^{2i}` of weight `12·2^m`.
pub fn serre_poly(n: u32, m: u32) -> Result<ModularPoly> {
    let s = SerreParams::two(n, m)?;
    let big = s.block() as u32;
    let cs = c_coeffs(n, m)?;
    ModularPoly::from_terms(
        12 * big,
        Basis::G,
        cs.into_iter()
            .enumerate()
            .map(|(i, c)| ([0, 3 * big - 3 * i as u32, 2 * i as u32], c)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub i: u32,
    pub val2: Val2,
    pub bound: i64,
    /// `val2 - bound`; absent when the coefficient vanishes.
    pub slack: Option<i64>,
}

/// Lower bounds on `ν₂(c_{n,m,i})`: `12·2^m - 6n - 6i` for `i <= n` and
/// `12·2^m - 8n - 4i` beyond. A violation is an error.
pub fn coeff_val_bounds(n: u32, m: u32) -> Result<Vec<BoundRow>> {
    let s = SerreParams::two(n, m)?;
    let big = s.block();
    let cs = c_coeffs(n, m)?;
    let mut rows = Vec::with_capacity(cs.len());
    for (i, c) in cs.iter().enumerate() {
        let (ni, ii) = (n as i64, i as i64);
        let bound = if ii <= ni {
            12 * big - 6 * ni - 6 * ii
        } else {
            12 * big - 8 * ni - 4 * ii
        };
        let v = val2(c);
        let slack = v.finite().map(|x| x - bound);
        if matches!(slack, Some(x) if x < 0) {
            return Err(Error::BoundViolation {
                n,
                m,
                i: Some(i as u32),
                detail: format!("val2(c) = {v} < {bound}"),
            });
        }
        rows.push(BoundRow {
            i: i as u32,
            val2: v,
            bound,
            slack,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: u32,
    /// `ν₂(λ_{n,m} - λ^n)`
    pub to_limit: SeriesVal2,
    /// `ν₂(λ_{n,m+1} - λ_{n,m})`
    pub step: SeriesVal2,
}

fn first_admissible_m(n: u32) -> u32 {
    (1..)
        .find(|&m| (n as u64) < 1u64 << m)
        .expect("some power of two exceeds n")
}

/// 2-adic convergence diagnostics for fixed `n`, starting at the smallest
/// `m` with `n < 2^m` and ending at `m_max`.
pub fn convergence_report(n: u32, m_max: u32, prec: i64) -> Result<Vec<ConvergenceRow>> {
    check_prec(prec)?;
    let m_min = first_admissible_m(n.max(1));
    if n == 0 || m_max < m_min {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1 and m_max >= {m_min} for n = {n}"
        )));
    }
    let limit = lambda_hauptmodul(2, prec)?.pow(n as i64)?;
    let seq: Vec<QSeries> = (m_min..=m_max + 1)
        .into_par_iter()
        .map(|m| serre_trace(SerreParams::two(n, m)?, prec))
        .collect::<Result<_>>()?;
    Ok((m_min..=m_max)
        .zip(seq.windows(2))
        .map(|(m, w)| ConvergenceRow {
            m,
            to_limit: (&w[0] - &limit).val2(),
            step: (&w[1] - &w[0]).val2(),
        })
        .collect())
}

/// Whether the finite `to_limit` valuations strictly increase down the table.
pub fn strictly_increasing(rows: &[ConvergenceRow]) -> bool {
    rows.windows(2)
        .all(|w| w[0].to_limit.value < w[1].to_limit.value)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicRow {
    pub m: u32,
    pub lead: i64,
    pub integral: bool,
    /// Minimum `p`-adic valuation of the known coefficients of `λ_{n,m} - λ^n`.
    pub to_limit: Val2,
}

/// Report-only diagnostics of the trace formula at an odd genus-zero prime.
pub fn padic_report(p: u32, n: u32, m_max: u32, prec: i64) -> Result<Vec<PadicRow>> {
    check_prec(prec)?;
    let limit = lambda_hauptmodul(p, prec)?.pow(n as i64)?;
    (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let s = serre_trace(SerreParams::new(p, n, m)?, prec)?;
            let diff = &s - &limit;
            Ok(PadicRow {
                m,
                lead: s.lead(),
                integral: s.coeffs().iter().all(|c| c.is_integer()),
                to_limit: diff
                    .coeffs()
                    .iter()
                    .map(|c| valp(c, p as u64))
                    .min()
                    .unwrap_or(Val2::Infinite),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDiagnostics {
    /// Coefficient of `q^n` in the trace expansion.
    pub leading_coefficient: Rat,
    pub leading_matches_closed_constant: Option<bool>,
    pub bounds: Option<Vec<BoundRow>>,
    pub to_limit: Option<SeriesVal2>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerreCell {
    pub params: SerreParams,
    pub prec: i64,
    pub series_trace: QSeries,
    pub series_closed: Option<QSeries>,
    pub coeffs_c: Option<Vec<Rat>>,
    pub poly_g: Option<ModularPoly>,
    pub series_poly: Option<QSeries>,
    pub diagnostics: CellDiagnostics,
}

/// Computes every representation available for `params` and checks that
/// they agree through `prec`.
pub fn compute_cell(params: SerreParams, prec: i64) -> Result<SerreCell> {
    let series_trace = serre_trace(params, prec)?;
    let leading_coefficient = if (params.n as i64) < prec {
        series_trace.coeff(params.n as i64)?
    } else {
        return Err(Error::PrecisionStarvation {
            needed: params.n as i64 + 1,
            available: prec,
        });
    };
    if !params.has_closed_form() {
        return Ok(SerreCell {
            params,
            prec,
            series_trace,
            series_closed: None,
            coeffs_c: None,
            poly_g: None,
            series_poly: None,
            diagnostics: CellDiagnostics {
                leading_coefficient,
                leading_matches_closed_constant: None,
                bounds: None,
                to_limit: None,
            },
        });
    }
    let (n, m) = (params.n, params.m);
    let closed = serre_closed(n, m, prec)?;
    let poly = serre_poly(n, m)?;
    let from_poly = eval_poly(&poly, prec);
    for (name, other) in [("closed", &closed), ("polynomial", &from_poly)] {
        if let Some(e) = series_trace.first_difference(other, prec)? {
            return Err(Error::Disagreement(format!(
                "trace and {name} forms of lambda_({n},{m}) differ at q^{e}"
            )));
        }
    }
    let bounds = coeff_val_bounds(n, m)?;
    let limit = lambda_hauptmodul(2, prec)?.pow(n as i64)?;
    let to_limit = (&series_trace - &limit).val2();
    let coeffs_c = poly
        .terms()
        .iter()
        .map(|(e, c)| (e[2] / 2, c.clone()))
        .collect::<BTreeMap<_, _>>();
    let coeffs_c = (0..=params.block() as u32)
        .map(|i| coeffs_c.get(&i).cloned().unwrap_or_else(Rat::zero))
        .collect();
    Ok(SerreCell {
        params,
        prec,
        diagnostics: CellDiagnostics {
            leading_matches_closed_constant: Some(leading_coefficient == leading_constant(n, m)?),
            leading_coefficient,
            bounds: Some(bounds),
            to_limit: Some(to_limit),
        },
        series_trace,
        series_closed: Some(closed),
        coeffs_c: Some(coeffs_c),
        poly_g: Some(poly),
        series_poly: Some(from_poly),
    })
}

/// Cells for a whole grid, evaluated concurrently; output order follows input.
pub fn compute_grid(params: &[SerreParams], prec: i64) -> Vec<Result<SerreCell>> {
    params.par_iter().map(|&s| compute_cell(s, prec)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub sign: i8,
    /// Prime to exponent, primes below the trial-division bound only.
    pub primes: BTreeMap<String, u64>,
    /// Unfactored part (`"1"` when fully factored).
    pub cofactor: String,
}

pub fn factorization(x: &Rat) -> Factorization {
    let sign = if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    };
    let (num, num_rest) = factor_small(x.numer(), 1000);
    let (den, den_rest) = factor_small(x.denom(), 1000);
    let mut primes: BTreeMap<u64, i64> = num.into_iter().map(|(p, e)| (p, e as i64)).collect();
    for (p, e) in den {
        *primes.entry(p).or_insert(0) -= e as i64;
    }
    let cofactor = if den_rest.is_one() {
        num_rest.to_string()
    } else {
        format!("{num_rest}/{den_rest}")
    };
    Factorization {
        sign,
        primes: primes
            .into_iter()
            .filter(|(_, e)| *e != 0)
            .map(|(p, e)| (p.to_string(), e as u64))
            .collect(),
        cofactor,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CCoeffJson {
    pub i: u32,
    pub value: String,
    pub factorization: Factorization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreCellJson {
    pub p: u32,
    pub n: u32,
    pub m: u32,
    pub prec: i64,
    /// Which trace formula produced `leading["trace"]`.
    pub trace_variant: TraceVariant,
    /// Up to ten leading coefficients (exponents `0..10`) of each representation.
    pub leading: BTreeMap<String, Vec<String>>,
    pub leading_coefficient: String,
    pub c_coeffs: Option<Vec<CCoeffJson>>,
    pub bounds: Option<Vec<BoundRow>>,
    pub to_limit_val2: Option<SeriesVal2>,
}

impl SerreCell {
    pub fn to_json(&self) -> SerreCellJson {
        let head = |s: &QSeries| -> Vec<String> {
            s.coeff_range(0, self.prec.min(10))
                .expect("within precision")
                .iter()
                .map(fmt_rat)
                .collect()
        };
        let mut leading = BTreeMap::new();
        leading.insert("trace".to_string(), head(&self.series_trace));
        if let Some(s) = &self.series_closed {
            leading.insert("closed".to_string(), head(s));
        }
        if let Some(s) = &self.series_poly {
            leading.insert("poly".to_string(), head(s));
        }
        SerreCellJson {
            p: self.params.p,
            n: self.params.n,
            m: self.params.m,
            prec: self.prec,
            trace_variant: if self.params.p == 2 {
                TraceVariant::Simplified
            } else {
                TraceVariant::General
            },
            leading,
            leading_coefficient: fmt_rat(&self.diagnostics.leading_coefficient),
            c_coeffs: self.coeffs_c.as_ref().map(|cs| {
                cs.iter()
                    .enumerate()
                    .map(|(i, c)| CCoeffJson {
                        i: i as u32,
                        value: fmt_rat(c),
                        factorization: factorization(c),
                    })
                    .collect()
            }),
            bounds: self.diagnostics.bounds.clone(),
            to_limit_val2: self.diagnostics.to_limit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ratio;

    fn int(parts: &[(u64, i64)], sign: i64) -> Rat {
        parts
            .iter()
            .fold(rat(sign), |acc, &(p, e)| acc * prime_power(p, e))
    }

    #[test]
    fn params_validation() {
        assert!(SerreParams::new(11, 1, 1).is_err());
        assert!(SerreParams::new(2, 0, 1).is_err());
        assert!(SerreParams::two(2, 1).is_err());
        assert!(SerreParams::two(1, 1).is_ok());
        assert!(SerreParams::new(3, 1, 1).unwrap().require_closed().is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_coeff(1, 1, 0).unwrap(), rat(1));
        assert_eq!(psi_coeff(1, 1, 1).unwrap(), ratio(1, 128));
        assert!(psi_coeff(1, 1, 2).is_err());
        for m in 1..=4 {
            for n in 1..=3u32 {
                if n as i64 >= 1 << m {
                    continue;
                }
                for j in 0..=((1u32 << m) - n) {
                    assert_eq!(
                        psi_coeff(n, m, j).unwrap(),
                        psi_coeff_product(n, m, j).unwrap(),
                        "({n},{m},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn big_psi_examples() {
        assert_eq!(
            big_psi(1, 1, 0, 0).unwrap(),
            int(&[(2, 18), (3, 9), (5, 12)], 1)
        );
        assert_eq!(
            big_psi(1, 1, 0, 1).unwrap(),
            int(&[(2, 20), (3, 7), (5, 12)], -1)
        );
        assert_eq!(big_psi(1, 1, 2, 0).unwrap(), rat(0));
    }

    #[test]
    fn c_examples() {
        assert_eq!(
            c_coeff(1, 1, 0).unwrap(),
            int(&[(2, 18), (3, 7), (5, 13)], 1)
        );
        assert_eq!(
            c_coeff(1, 1, 1).unwrap(),
            int(&[(2, 12), (3, 8), (5, 9), (7, 2)], -1)
        );
        assert!(c_coeff(1, 1, 3).is_err());
        assert_eq!(val2(&c_coeff(1, 1, 0).unwrap()), Val2::Finite(18));
    }

    #[test]
    fn trace_leading_and_variants() {
        let s = SerreParams::two(1, 1).unwrap();
        let k = 30;
        let a = serre_trace_with(s, TraceVariant::Simplified, k).unwrap();
        let b = serre_trace_with(s, TraceVariant::General, k).unwrap();
        assert_eq!(a.first_difference(&b, k).unwrap(), None);
        assert_eq!(a.coeff(1).unwrap(), leading_constant(1, 1).unwrap());
        assert_eq!(a.coeff(0).unwrap(), rat(0));
    }

    #[test]
    fn trace_odd_prime_is_cuspidal() {
        let s = SerreParams::new(3, 1, 1).unwrap();
        let t = serre_trace(s, 12).unwrap();
        assert_eq!(t.coeff(0).unwrap(), rat(0));
        assert_eq!(t.lead(), 1);
        assert!(serre_trace_with(s, TraceVariant::Simplified, 12).is_err());
    }

    #[test]
    fn closed_and_poly_agree_small() {
        let cell = compute_cell(SerreParams::two(1, 1).unwrap(), 40).unwrap();
        assert_eq!(cell.diagnostics.leading_matches_closed_constant, Some(true));
        assert_eq!(cell.poly_g.as_ref().unwrap().weight(), 24);
        assert!(cell.coeffs_c.unwrap().iter().all(|c| c.is_integer()));
        let to_limit = cell.diagnostics.to_limit.unwrap();
        assert!(to_limit.value >= Val2::Finite(5));
    }

    #[test]
    fn bounds_small() {
        for (n, m) in [(1, 1), (1, 2), (2, 2)] {
            let rows = coeff_val_bounds(n, m).unwrap();
            assert_eq!(rows.len(), (1 << m) + 1);
        }
    }

    #[test]
    fn factorization_json() {
        let f = factorization(&c_coeff(1, 1, 1).unwrap());
        assert_eq!(f.sign, -1);
        assert_eq!(f.primes.get("7"), Some(&2));
        assert_eq!(f.cofactor, "1");
        let cell = compute_cell(SerreParams::two(1, 1).unwrap(), 12).unwrap();
        let j = serde_json::to_value(cell.to_json()).unwrap();
        assert_eq!(j["c_coeffs"][0]["factorization"]["primes"]["2"], 18);
        assert_eq!(j["leading"]["trace"].as_array().unwrap().len(), 10);
    }
}

//! The states `v_{n,m} = Σ_i c_{n,m,i} α_{3·2^m-3i} β_{2i}` whose characters
//! are `λ_{n,m}`, and their 2-adic diagnostics.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::character::{alpha_square, beta_square, character_of, SquareBracketCombination};
use super::sigma::SigmaPoly;
use super::state::{HeisenbergState, Monomial};
use crate::error::{Error, Result};
use crate::numkernel::{double_factorial, int_rat, prime_power, rat, val2, Rat, Val2};
use crate::serreseq::{c_coeffs, serre_poly, SerreParams};

fn block(n: u32, m: u32) -> Result<u32> {
    Ok(SerreParams::two(n, m)?.block() as u32)
}

/// `v_{n,m}` as a combination of square-bracket monomials.
pub fn v_square(n: u32, m: u32) -> Result<SquareBracketCombination> {
    let big = block(n, m)?;
    let cs = c_coeffs(n, m)?;
    let mut acc = SquareBracketCombination::zero();
    for (i, c) in cs.iter().enumerate() {
        let i = i as u32;
        let term = alpha_square(3 * big - 3 * i).mul(&beta_square(2 * i));
        acc = acc.add(&term.scale(c));
    }
    Ok(acc)
}

/// `v_{n,m}` in the `(x, y)` Hermite coordinates.
pub fn v_sigma(n: u32, m: u32) -> Result<SigmaPoly> {
    let big = block(n, m)?;
    let cs = c_coeffs(n, m)?;
    let parts: Vec<SigmaPoly> = cs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let i = i as u32;
            let mut p = SigmaPoly::zero();
            p.axpy(c, &SigmaPoly::alpha_beta(3 * big - 3 * i, 2 * i));
            p
        })
        .collect();
    let mut acc = SigmaPoly::zero();
    for p in &parts {
        acc.axpy(&rat(1), p);
    }
    Ok(acc)
}

/// `v_{n,m}` as a round-bracket state.
pub fn v_state(n: u32, m: u32) -> Result<HeisenbergState> {
    Ok(v_sigma(n, m)?.to_state())
}

/// `(6·2^m-6i-1)!! (6·2^m-1)!! / (6·2^{m+1}-6i-1)!!`, the factor in
/// `α_{3·2^{m+1}-3i} = (factor)·α_{3·2^m} α_{3·2^m-3i}`.
pub fn rescaling_coefficient(m: u32, i: u32) -> Rat {
    let b = 6i64 << m;
    let df = |k: i64| int_rat(double_factorial(k).expect(">= -1"));
    df(b - 6 * i as i64 - 1) * df(b - 1) / df(2 * b - 6 * i as i64 - 1)
}

/// Checks the rescaling identity in the square-bracket algebra.
pub fn rescaling_identity_holds(m: u32, i: u32) -> bool {
    let big = 3u32 << m;
    let lhs = alpha_square(2 * big - 3 * i);
    let rhs = alpha_square(big)
        .mul(&alpha_square(big - 3 * i))
        .scale(&rescaling_coefficient(m, i));
    lhs == rhs
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyRow {
    pub m: u32,
    /// `ν₂(v_{n,m+1} - v_{n,m})`
    pub step_val2: Val2,
    /// Rescaling factors have valuation zero and the identity holds, for all `i <= 2^m`.
    pub rescaling_ok: bool,
    /// `Coeff_𝟙(α_{3·2^m}) = 2^{-12·2^m} 3^{-3·2^m} 5^{-3·2^m}`.
    pub vacuum_coeff_ok: bool,
    /// `Coeff_{h(-1)^2}(α_{3·2^m}) = -2^{-12·2^m+m+3} 3^{-3·2^m+2} 5^{-3·2^m+1}`.
    pub h1_squared_coeff_ok: bool,
}

fn alpha_sigma(r: u32) -> SigmaPoly {
    SigmaPoly::alpha_beta(r, 0)
}

/// Cauchy diagnostics for fixed `n`, from the smallest admissible `m` to `m_max`.
pub fn cauchy_report(n: u32, m_max: u32) -> Result<Vec<CauchyRow>> {
    let m_min = (1..).find(|&m| (n as u64) < 1u64 << m).expect("finite");
    if n == 0 || m_max < m_min {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1 and m_max >= {m_min} for n = {n}"
        )));
    }
    let sigmas: Vec<SigmaPoly> = (m_min..=m_max + 1)
        .into_par_iter()
        .map(|m| v_sigma(n, m))
        .collect::<Result<_>>()?;
    (m_min..=m_max)
        .into_par_iter()
        .map(|m| {
            let k = (m - m_min) as usize;
            let mut diff = sigmas[k + 1].clone();
            diff.axpy(&rat(-1), &sigmas[k]);
            let step_val2 = diff.state_val2();

            let big = 1i64 << m;
            let rescaling_ok = (0..=big as u32).all(|i| {
                val2(&rescaling_coefficient(m, i)) == Val2::Finite(0)
                    && rescaling_identity_holds(m, i)
            });
            let r = 3 * big as u32;
            let alpha = alpha_sigma(r).to_state();
            let e = 3 * big;
            let vac = prime_power(2, -4 * e) * prime_power(3, -e) * prime_power(5, -e);
            let h1sq = -(prime_power(2, -4 * e + m as i64 + 3)
                * prime_power(3, -e + 2)
                * prime_power(5, -e + 1));
            let h1sq_mono = Monomial::from_exponents(vec![2]);
            Ok(CauchyRow {
                m,
                step_val2,
                rescaling_ok,
                vacuum_coeff_ok: alpha.coeff(&Monomial::vacuum()) == vac,
                h1_squared_coeff_ok: alpha.coeff(&h1sq_mono) == h1sq,
            })
        })
        .collect()
}

pub fn steps_strictly_increasing(rows: &[CauchyRow]) -> bool {
    rows.windows(2).all(|w| w[0].step_val2 < w[1].step_val2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRow {
    pub i: u32,
    pub c_val2: Val2,
    /// `ν₂(c_i) - 4(3·2^m - 3i) - 3(2i)`
    pub predicted: Option<i64>,
    /// `-6n` when `i <= n`, `-8n + 2i` beyond.
    pub regime_bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCell {
    pub n: u32,
    pub m: u32,
    pub val2: Val2,
    pub bound: i64,
    pub slack: Option<i64>,
    /// `ν₂(2^{6n} v_{n,m}) >= 0`: the rescaled coefficients are 2-integral.
    pub rescaled_integral: bool,
    pub character_matches: bool,
    pub per_i: Vec<TermRow>,
}

/// `ν₂(v_{n,m}) >= -6n` and `F_S(v_{n,m}) = λ_{n,m}` on the grid
/// `n <= n_max`, `m <= m_max`, `n < 2^m`. Any violation is an error.
pub fn overconvergence_certificate(n_max: u32, m_max: u32) -> Result<Vec<CertificateCell>> {
    let grid: Vec<(u32, u32)> = (1..=m_max)
        .flat_map(|m| (1..=n_max).map(move |n| (n, m)))
        .filter(|&(n, m)| (n as u64) < 1u64 << m)
        .collect();
    grid.into_par_iter()
        .map(|(n, m)| certify_cell(n, m))
        .collect()
}

pub fn certify_cell(n: u32, m: u32) -> Result<CertificateCell> {
    let big = block(n, m)? as i64;
    let ni = n as i64;
    let cs = c_coeffs(n, m)?;
    let mut per_i = Vec::with_capacity(cs.len());
    for (i, c) in cs.iter().enumerate() {
        let ii = i as i64;
        let c_val2 = val2(c);
        let predicted = c_val2
            .finite()
            .map(|v| v - 4 * (3 * big - 3 * ii) - 3 * (2 * ii));
        let regime_bound = if ii <= ni { -6 * ni } else { -8 * ni + 2 * ii };
        if matches!(predicted, Some(p) if p < regime_bound) {
            return Err(Error::BoundViolation {
                n,
                m,
                i: Some(i as u32),
                detail: format!("term valuation {predicted:?} below {regime_bound}"),
            });
        }
        per_i.push(TermRow {
            i: i as u32,
            c_val2,
            predicted,
            regime_bound,
        });
    }
    let v = v_sigma(n, m)?.state_val2();
    let bound = -6 * ni;
    let slack = v.finite().map(|x| x - bound);
    if matches!(slack, Some(s) if s < 0) {
        return Err(Error::BoundViolation {
            n,
            m,
            i: None,
            detail: format!("val2(v) = {v} < {bound}"),
        });
    }
    let chi = character_of(&v_square(n, m)?)?;
    let character_matches = chi == serre_poly(n, m)?;
    if !character_matches {
        return Err(Error::Disagreement(format!(
            "F_S(v_({n},{m})) differs from the Eisenstein polynomial of lambda_({n},{m})"
        )));
    }
    Ok(CertificateCell {
        n,
        m,
        val2: v,
        bound,
        slack,
        rescaled_integral: slack.is_none_or(|s| s >= 0),
        character_matches,
        per_i,
    })
}

/// `α_r`'s vacuum coefficient `1/240^r`, exposed for reports.
pub fn alpha_vacuum_coefficient(r: u32) -> Rat {
    let s = alpha_sigma(r).to_state().coeff(&Monomial::vacuum());
    debug_assert!(!s.is_zero() || r > 0);
    s
}

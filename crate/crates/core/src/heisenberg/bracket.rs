//! The square-bracket modes `h[-2]`, `h[-3]` acting on round-bracket states.
//!
//! Each is a multiplication by a linear form plus a constant-coefficient
//! derivation, where the annihilation mode `h(n)` acts as `n ∂_{h(-n)}`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::sigma::{h2_shift, h3_shift, hermite, SigmaPoly};
use super::state::HeisenbergState;
use crate::error::{Error, Result};
use crate::numkernel::{
    binomial, double_factorial, factorial, int_rat, pow2, prime_power, rat, ratio, Rat,
};

/// Highest creation mode the truncated operators are valid on.
pub const SUPPORTED_MAX_MODE: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BracketKind {
    H2,
    H3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketOp {
    pub kind: BracketKind,
    /// `(k, c)`: multiply by `c·h(-k)`.
    pub mult_part: Vec<(u32, Rat)>,
    /// `(k, c)`: apply `c·∂_{h(-k)}`.
    pub deriv_part: Vec<(u32, Rat)>,
}

impl BracketOp {
    /// `h[-2] = h(-2) + h(-1) - (1/120)∂_{h(-2)} + (1/80)∂_{h(-3)}` on modes `<= 3`.
    pub fn h2() -> BracketOp {
        BracketOp {
            kind: BracketKind::H2,
            mult_part: vec![(2, rat(1)), (1, rat(1))],
            deriv_part: vec![(2, ratio(-1, 120)), (3, ratio(1, 80))],
        }
    }

    /// `h[-3] = h(-3) + (3/2)h(-2) + (1/2)h(-1) + (1/240)∂_{h(-1)} - (1/240)∂_{h(-2)} + (1/315)∂_{h(-3)}`.
    pub fn h3() -> BracketOp {
        BracketOp {
            kind: BracketKind::H3,
            mult_part: vec![(3, rat(1)), (2, ratio(3, 2)), (1, ratio(1, 2))],
            deriv_part: vec![(1, ratio(1, 240)), (2, ratio(-1, 240)), (3, ratio(1, 315))],
        }
    }

    pub fn of(kind: BracketKind) -> BracketOp {
        match kind {
            BracketKind::H2 => BracketOp::h2(),
            BracketKind::H3 => BracketOp::h3(),
        }
    }

    pub fn apply_once(&self, v: &HeisenbergState) -> Result<HeisenbergState> {
        if v.max_mode() > SUPPORTED_MAX_MODE {
            return Err(Error::InvalidParameter(format!(
                "bracket operators are truncated to modes <= {SUPPORTED_MAX_MODE}; state uses h(-{})",
                v.max_mode()
            )));
        }
        let mut out = HeisenbergState::zero();
        for (m, c) in v.terms() {
            for (k, a) in &self.mult_part {
                out.add_term(m.with_mode(*k), c * a);
            }
            for (k, a) in &self.deriv_part {
                if let Some((e, rest)) = m.derive(*k) {
                    out.add_term(rest, c * a * rat(e as i64));
                }
            }
        }
        Ok(out)
    }
}

pub fn apply_bracket(op: &BracketOp, v: &HeisenbergState, times: u32) -> Result<HeisenbergState> {
    (0..times).try_fold(v.clone(), |acc, _| op.apply_once(&acc))
}

/// `(-1)^r / (2^r (2r-1)!!)`.
pub fn alpha_scalar(r: u32) -> Rat {
    let sign = if r.is_multiple_of(2) { rat(1) } else { rat(-1) };
    sign * pow2(-(r as i64)) / int_rat(double_factorial(2 * r as i64 - 1).expect(">= -1"))
}

/// `2^s / (2s-1)!!`.
pub fn beta_scalar(s: u32) -> Rat {
    pow2(s as i64) / int_rat(double_factorial(2 * s as i64 - 1).expect(">= -1"))
}

/// `α_r = (-1)^r/(2^r(2r-1)!!) h[-2]^{2r}𝟙` by operator iteration.
pub fn alpha_state(r: u32) -> HeisenbergState {
    apply_bracket(&BracketOp::h2(), &HeisenbergState::vacuum(), 2 * r)
        .expect("vacuum is supported")
        .scale(&alpha_scalar(r))
}

/// `β_s = 2^s/(2s-1)!! h[-3]^{2s}𝟙` by operator iteration.
pub fn beta_state(s: u32) -> HeisenbergState {
    apply_bracket(&BracketOp::h3(), &HeisenbergState::vacuum(), 2 * s)
        .expect("vacuum is supported")
        .scale(&beta_scalar(s))
}

/// `α_r` from the generalized Hermite expansion
/// `Σ_l C(2r,2l) (2l)!/((-240)^l l!) (h(-2)+h(-1))^{2(r-l)}`, without
/// iterating any operator.
pub fn alpha_closed_form(r: u32) -> HeisenbergState {
    let mut p = SigmaPoly::zero();
    let r64 = r as u64;
    for l in 0..=r64 {
        let c = int_rat(binomial(2 * r64 as i64, 2 * l as i64)) * int_rat(factorial(2 * l))
            / (int_rat(factorial(l))
                * prime_power(240, l as i64)
                * if l % 2 == 0 { rat(1) } else { rat(-1) });
        p.add_term(2 * (r - l as u32), 0, c * alpha_scalar(r));
    }
    p.to_state()
}

/// `H2^a H3^b 𝟙` through the Hermite factorization, for cross-checks.
pub fn bracket_power_state(a: u32, b: u32) -> HeisenbergState {
    let ha = hermite(a, &h2_shift());
    let hb = hermite(b, &h3_shift());
    let mut p = SigmaPoly::zero();
    for (i, x) in ha.iter().enumerate() {
        for (j, y) in hb.iter().enumerate() {
            if !x.is_zero() && !y.is_zero() {
                p.add_term(i as u32, j as u32, x * y);
            }
        }
    }
    p.to_state()
}

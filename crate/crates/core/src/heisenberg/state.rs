use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{fmt_rat, min_val2, parse_rat, Rat, Val2};

/// A monomial `h(-1)^{e_1} h(-2)^{e_2} ⋯`, stored as the exponent vector
/// `[e_1, e_2, …]` without trailing zeros. The empty vector is the vacuum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn vacuum() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Monomial {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    /// From a multiset of mode indices, e.g. `[2, 2, 1]` for `h(-2)^2 h(-1)`.
    pub fn from_modes(modes: &[u32]) -> Result<Monomial> {
        let mut exps = Vec::new();
        for &k in modes {
            if k == 0 {
                return Err(Error::InvalidParameter("mode index must be >= 1".into()));
            }
            let k = k as usize;
            if exps.len() < k {
                exps.resize(k, 0);
            }
            exps[k - 1] += 1;
        }
        Ok(Monomial(exps))
    }

    /// The mode multiset, largest first.
    pub fn modes(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (i, &e) in self.0.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(i as u32 + 1, e as usize));
        }
        out
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, mode: u32) -> u32 {
        self.0.get(mode as usize - 1).copied().unwrap_or(0)
    }

    /// Round-bracket weight `Σ k e_k`.
    pub fn weight(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| (i as u64 + 1) * e as u64)
            .sum()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn max_mode(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0))
                .collect(),
        )
    }

    pub fn with_mode(&self, mode: u32) -> Monomial {
        let mut e = self.0.clone();
        if e.len() < mode as usize {
            e.resize(mode as usize, 0);
        }
        e[mode as usize - 1] += 1;
        Monomial(e)
    }

    /// `∂_{h(-mode)}`: the multiplicity and the monomial with one factor removed.
    pub fn derive(&self, mode: u32) -> Option<(u32, Monomial)> {
        let e = self.exponent(mode);
        if e == 0 {
            return None;
        }
        let mut exps = self.0.clone();
        exps[mode as usize - 1] -= 1;
        Some((e, Monomial::from_exponents(exps)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("h(-{})", i + 1)),
                _ => parts.push(format!("h(-{})^{e}", i + 1)),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// An element of the Heisenberg VOA in round-bracket variables: a
/// polynomial in the creation modes `h(-n)` applied to the vacuum.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeisenbergState {
    terms: BTreeMap<Monomial, Rat>,
}

impl HeisenbergState {
    pub fn zero() -> HeisenbergState {
        HeisenbergState::default()
    }

    pub fn vacuum() -> HeisenbergState {
        HeisenbergState::monomial(Monomial::vacuum(), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> HeisenbergState {
        let mut s = HeisenbergState::zero();
        s.add_term(m, c);
        s
    }

    /// `h(-k)𝟙`.
    pub fn mode(k: u32) -> HeisenbergState {
        HeisenbergState::monomial(Monomial::from_modes(&[k]).expect("k >= 1"), Rat::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> HeisenbergState {
        let mut s = HeisenbergState::zero();
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rat> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn max_mode(&self) -> u32 {
        self.terms.keys().map(Monomial::max_mode).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> HeisenbergState {
        if c.is_zero() {
            return HeisenbergState::zero();
        }
        HeisenbergState {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn add(&self, other: &HeisenbergState) -> HeisenbergState {
        state_axpy(&Rat::one(), other, self)
    }

    pub fn sub(&self, other: &HeisenbergState) -> HeisenbergState {
        state_axpy(&-Rat::one(), other, self)
    }

    /// Minimum 2-adic valuation over all coefficients; `+∞` for the zero state.
    pub fn val2(&self) -> Val2 {
        min_val2(self.terms.values())
    }

    pub fn to_json(&self) -> Vec<StateTermJson> {
        self.terms
            .iter()
            .map(|(m, c)| StateTermJson {
                monomial: m.modes(),
                coeff: fmt_rat(c),
            })
            .collect()
    }

    pub fn from_json(j: &[StateTermJson]) -> Result<HeisenbergState> {
        let mut s = HeisenbergState::zero();
        for t in j {
            s.add_term(Monomial::from_modes(&t.monomial)?, parse_rat(&t.coeff)?);
        }
        Ok(s)
    }
}

impl fmt::Display for HeisenbergState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            if m.0.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({mag}) {m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateTermJson {
    pub monomial: Vec<u32>,
    pub coeff: String,
}

/// Product in the symmetric algebra.
pub fn state_mul(u: &HeisenbergState, v: &HeisenbergState) -> HeisenbergState {
    let mut out = HeisenbergState::zero();
    for (m1, c1) in &u.terms {
        for (m2, c2) in &v.terms {
            out.add_term(m1.times(m2), c1 * c2);
        }
    }
    out
}

/// `a·u + v`.
pub fn state_axpy(a: &Rat, u: &HeisenbergState, v: &HeisenbergState) -> HeisenbergState {
    let mut out = v.clone();
    if a.is_zero() {
        return out;
    }
    for (m, c) in &u.terms {
        out.add_term(m.clone(), a * c);
    }
    out
}

pub fn state_val2(v: &HeisenbergState) -> Val2 {
    v.val2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{rat, ratio};

    #[test]
    fn monomial_modes() {
        let m = Monomial::from_modes(&[2, 2, 1]).unwrap();
        assert_eq!(m.exponents(), &[1, 2]);
        assert_eq!(m.modes(), vec![2, 2, 1]);
        assert_eq!(m.weight(), 5);
        assert_eq!(
            m.derive(2),
            Some((2, Monomial::from_modes(&[2, 1]).unwrap()))
        );
        assert_eq!(m.derive(3), None);
        assert!(Monomial::from_modes(&[0]).is_err());
    }

    #[test]
    fn products() {
        let v = HeisenbergState::mode(3).scale(&ratio(2, 3));
        assert_eq!(state_mul(&HeisenbergState::vacuum(), &v), v);
        let p = state_mul(&HeisenbergState::mode(1), &HeisenbergState::mode(2));
        assert_eq!(p.coeff(&Monomial::from_modes(&[2, 1]).unwrap()), rat(1));
        assert!(v.sub(&v).is_empty());
        assert_eq!(state_axpy(&rat(2), &v, &v), v.scale(&rat(3)));
    }

    #[test]
    fn valuation_and_json() {
        assert_eq!(HeisenbergState::vacuum().val2(), Val2::Finite(0));
        assert_eq!(HeisenbergState::zero().val2(), Val2::Infinite);
        let s = HeisenbergState::from_terms([
            (Monomial::vacuum(), ratio(1, 240)),
            (Monomial::from_modes(&[2, 1]).unwrap(), rat(-1)),
        ]);
        assert_eq!(s.val2(), Val2::Finite(-4));
        let j = serde_json::to_string(&s.to_json()).unwrap();
        assert!(j.contains("\"monomial\":[2,1]"));
        let back: Vec<StateTermJson> = serde_json::from_str(&j).unwrap();
        assert_eq!(HeisenbergState::from_json(&back).unwrap(), s);
    }
}

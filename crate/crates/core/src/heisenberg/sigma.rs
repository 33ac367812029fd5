//! States in the subalgebra generated by `h[-2]` and `h[-3]`, written as
//! polynomials in the two linear forms
//!
//! ```text
//! x = h(-1) + h(-2),    y = h(-3) + (3/2)h(-2) + (1/2)h(-1).
//! ```
//!
//! `h[-2]` acts as `x - (1/120)∂_x` and `h[-3]` as `y - (1/1008)∂_y`, so
//! `h[-2]^a h[-3]^b 𝟙` is a product of two Hermite polynomials. Conversion
//! back to the monomial basis is done per homogeneous degree in integer
//! arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::bracket::{alpha_scalar, beta_scalar};
use super::state::{HeisenbergState, Monomial};
use crate::numkernel::{ratio, Rat, Val2};

/// `h[-2] x = x·x - 1/120`.
pub fn h2_shift() -> Rat {
    ratio(-1, 120)
}

/// `h[-3] y = y·y - 1/1008`.
pub fn h3_shift() -> Rat {
    ratio(-1, 1008)
}

/// Coefficients of `(t + g d/dt)^k 1` in ascending powers of `t`.
pub fn hermite(k: u32, g: &Rat) -> Vec<Rat> {
    let mut p = vec![Rat::one()];
    for _ in 0..k {
        let mut q = vec![Rat::zero(); p.len() + 1];
        for (i, a) in p.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            q[i + 1] += a;
            if i > 0 {
                q[i - 1] += g * a * Rat::from_integer(BigInt::from(i));
            }
        }
        p = q;
    }
    p
}

/// `Σ c_{ab} x^a y^b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SigmaPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl SigmaPoly {
    pub fn zero() -> SigmaPoly {
        SigmaPoly::default()
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self + c·other`.
    pub fn axpy(&mut self, c: &Rat, other: &SigmaPoly) {
        for (&(a, b), x) in &other.terms {
            self.add_term(a, b, c * x);
        }
    }

    /// `α_r β_s`.
    pub fn alpha_beta(r: u32, s: u32) -> SigmaPoly {
        let ha = hermite(2 * r, &h2_shift());
        let hb = hermite(2 * s, &h3_shift());
        let k = alpha_scalar(r) * beta_scalar(s);
        let mut p = SigmaPoly::zero();
        for (i, x) in ha.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let kx = &k * x;
            for (j, y) in hb.iter().enumerate() {
                if !y.is_zero() {
                    p.add_term(i as u32, j as u32, &kx * y);
                }
            }
        }
        p
    }

    fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    /// Integer image: coefficients `N_{e}` over the common denominator.
    fn integer_image(&self) -> (Vec<(u32, Vec<BigInt>)>, BigInt) {
        if self.terms.is_empty() {
            return (Vec::new(), BigInt::one());
        }
        let big_l = self.max_degree();
        let den_lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let binom = binomial_table(big_l as usize);
        let mut by_degree: BTreeMap<u32, Vec<(u32, u32, BigInt)>> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            let n = c.numer() * (&den_lcm / c.denom());
            by_degree.entry(a + b).or_default().push((a, b, n));
        }
        let blocks: Vec<(u32, Vec<BigInt>)> = by_degree
            .into_par_iter()
            .map(|(d, inputs)| (d, convert_degree(d, &inputs, big_l, &binom)))
            .collect();
        (blocks, den_lcm << big_l as usize)
    }

    pub fn to_state(&self) -> HeisenbergState {
        let (blocks, den) = self.integer_image();
        let mut out = HeisenbergState::zero();
        for (d, dense) in blocks {
            let w = d as usize + 1;
            for (idx, n) in dense.into_iter().enumerate() {
                if n.is_zero() {
                    continue;
                }
                let (e2, e3) = ((idx / w) as u32, (idx % w) as u32);
                let e1 = d - e2 - e3;
                out.add_term(
                    Monomial::from_exponents(vec![e1, e2, e3]),
                    Rat::new(n, den.clone()),
                );
            }
        }
        out
    }

    /// `ν₂` of the corresponding round-bracket state, without building it.
    pub fn state_val2(&self) -> Val2 {
        let (blocks, den) = self.integer_image();
        let dv = den.trailing_zeros().unwrap_or(0) as i64;
        blocks
            .par_iter()
            .flat_map_iter(|(_, dense)| dense.iter())
            .filter_map(|n| n.trailing_zeros().map(|t| t as i64 - dv))
            .min()
            .map_or(Val2::Infinite, Val2::Finite)
    }
}

fn binomial_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigInt::one(); i + 1];
        for j in 1..i {
            row[j] = &t[i - 1][j - 1] + &t[i - 1][j];
        }
        t.push(row);
    }
    t
}

/// Dense `(e2, e3)`-indexed image of the degree-`d` part, scaled by `2^L`.
fn convert_degree(
    d: u32,
    inputs: &[(u32, u32, BigInt)],
    big_l: u32,
    binom: &[Vec<BigInt>],
) -> Vec<BigInt> {
    let w = d as usize + 1;
    let idx = |p2: u32, p3: u32| p2 as usize * w + p3 as usize;
    // y = h(-3) + x/2 + h(-2): expand y^b into (x, h(-2), h(-3)).
    let mut t = vec![BigInt::zero(); w * w];
    for (_, b, n) in inputs {
        let b = *b;
        for i in 0..=b {
            let ci = n * &binom[b as usize][i as usize];
            for j in 0..=(b - i) {
                let k = b - i - j;
                let c = (&ci * &binom[(b - i) as usize][j as usize]) << (big_l - j) as usize;
                t[idx(k, i)] += c;
            }
        }
    }
    // x = h(-1) + h(-2).
    let mut out = vec![BigInt::zero(); w * w];
    for p2 in 0..=d {
        for p3 in 0..=(d - p2) {
            let v = &t[idx(p2, p3)];
            if v.is_zero() {
                continue;
            }
            let xp = d - p2 - p3;
            for u in 0..=xp {
                out[idx(p2 + xp - u, p3)] += v * &binom[xp as usize][u as usize];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::bracket::{alpha_state, beta_state};
    use crate::heisenberg::state::state_mul;
    use crate::numkernel::rat;

    #[test]
    fn hermite_small() {
        assert_eq!(hermite(0, &rat(1)), vec![rat(1)]);
        assert_eq!(hermite(2, &rat(1)), vec![rat(1), rat(0), rat(1)]);
        assert_eq!(hermite(3, &rat(1)), vec![rat(0), rat(3), rat(0), rat(1)]);
    }

    #[test]
    fn sigma_matches_direct_products() {
        for r in 0..=3 {
            for s in 0..=3 {
                let direct = state_mul(&alpha_state(r), &beta_state(s));
                let sigma = SigmaPoly::alpha_beta(r, s);
                assert_eq!(sigma.to_state(), direct, "({r},{s})");
                assert_eq!(sigma.state_val2(), direct.val2(), "({r},{s})");
            }
        }
    }

    #[test]
    fn zero_poly() {
        assert!(SigmaPoly::zero().to_state().is_empty());
        assert_eq!(SigmaPoly::zero().state_val2(), Val2::Infinite);
    }
}

//! The character map on square-bracket monomials via pair partitions:
//!
//! ```text
//! F_S(h[-k_1]⋯h[-k_r]𝟙) = Σ_{matchings} Π_{{s,t}} 2(-1)^{s+1}/((s-1)!(t-1)!) G_{s+t}.
//! ```
//!
//! Odd-weight `G_k` vanish, so any pair with `s + t` odd kills the matching.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modforms::{
    dim_modular, eisenstein, to_eisenstein_basis, Basis, EisensteinVariant, ModularPoly,
};
use crate::numkernel::{factorial, int_rat, rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairPartition {
    pub pairs: Vec<(u32, u32)>,
}

/// All perfect matchings of `phi`, treating repeated values as distinct
/// labelled elements. Odd cardinality gives no matchings.
pub fn pair_partitions(phi: &[u32]) -> Vec<PairPartition> {
    fn go(rest: &[u32], acc: &mut Vec<(u32, u32)>, out: &mut Vec<PairPartition>) {
        let Some((&s, tail)) = rest.split_first() else {
            out.push(PairPartition { pairs: acc.clone() });
            return;
        };
        for j in 0..tail.len() {
            let mut remaining = tail.to_vec();
            let t = remaining.remove(j);
            acc.push((s, t));
            go(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if phi.len().is_multiple_of(2) {
        go(phi, &mut Vec::new(), &mut out);
    }
    out
}

/// `2(-1)^{s+1}/((s-1)!(t-1)!)`.
pub fn pair_weight(s: u32, t: u32) -> Rat {
    let sign = if s % 2 == 1 { rat(2) } else { rat(-2) };
    sign / int_rat(factorial(s as u64 - 1) * factorial(t as u64 - 1))
}

fn g_table() -> &'static Mutex<HashMap<u32, ModularPoly>> {
    static T: OnceLock<Mutex<HashMap<u32, ModularPoly>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `G_k` as a G-basis polynomial: `G_2`, `G_4`, `G_6` are generators, odd
/// weights are zero and higher weights are reduced to `G_4, G_6`.
pub fn g_poly(k: u32) -> ModularPoly {
    if k % 2 == 1 {
        return ModularPoly::zero(k, Basis::G);
    }
    if matches!(k, 2 | 4 | 6) {
        return ModularPoly::generator(Basis::G, k);
    }
    if let Some(p) = g_table().lock().expect("table poisoned").get(&k) {
        return p.clone();
    }
    let prec = dim_modular(k) as i64 + 12;
    let series = eisenstein(k, EisensteinVariant::G, prec).expect("even weight");
    let p = to_eisenstein_basis(&series, k)
        .expect("G_k is a level-one modular form")
        .to_basis(Basis::G);
    g_table()
        .lock()
        .expect("table poisoned")
        .insert(k, p.clone());
    p
}

fn weight_of(phi: &[u32]) -> u32 {
    phi.iter().sum()
}

/// `F_S` of `h[-k_1]⋯h[-k_r]𝟙` for the multiset `phi = {k_i}`.
pub fn character_mt(phi: &[u32]) -> ModularPoly {
    let mut memo = HashMap::new();
    let mut sorted = phi.to_vec();
    sorted.sort_unstable();
    character_memo(&sorted, &mut memo)
}

fn character_memo(phi: &[u32], memo: &mut HashMap<Vec<u32>, ModularPoly>) -> ModularPoly {
    let weight = weight_of(phi);
    if phi.is_empty() {
        return ModularPoly::constant(Rat::one()).to_basis(Basis::G);
    }
    if phi.len() % 2 == 1 {
        return ModularPoly::zero(weight, Basis::G);
    }
    if let Some(p) = memo.get(phi) {
        return p.clone();
    }
    let s = phi[0];
    let tail = &phi[1..];
    let mut acc = ModularPoly::zero(weight, Basis::G);
    let mut j = 0;
    while j < tail.len() {
        let t = tail[j];
        let mult = tail[j..].iter().take_while(|&&x| x == t).count();
        if (s + t).is_multiple_of(2) {
            let mut rest = tail.to_vec();
            rest.remove(j);
            let sub = character_memo(&rest, memo);
            let term = g_poly(s + t)
                .mul(&sub)
                .scale(&(pair_weight(s, t) * rat(mult as i64)));
            acc = acc.add(&term).expect("same weight");
        }
        j += mult;
    }
    memo.insert(phi.to_vec(), acc.clone());
    acc
}

/// A formal combination of square-bracket monomials `h[-k_1]⋯h[-k_r]𝟙`,
/// each keyed by its sorted mode multiset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SquareBracketCombination {
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl SquareBracketCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::monomial(&[], Rat::one())
    }

    pub fn monomial(modes: &[u32], c: Rat) -> Self {
        let mut s = Self::zero();
        s.add_term(modes, c);
        s
    }

    pub fn add_term(&mut self, modes: &[u32], c: Rat) {
        if c.is_zero() {
            return;
        }
        let mut key = modes.to_vec();
        key.sort_unstable();
        let e = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rat> {
        &self.terms
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero();
        for (k, x) in &self.terms {
            out.add_term(k, x * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, x) in &other.terms {
            out.add_term(k, x.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    /// Concatenation product `h[-a…]𝟙 · h[-b…]𝟙 = h[-a…]h[-b…]𝟙`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, x1) in &self.terms {
            for (k2, x2) in &other.terms {
                let mut k = k1.clone();
                k.extend_from_slice(k2);
                out.add_term(&k, x1 * x2);
            }
        }
        out
    }

    /// Square-bracket weight when homogeneous.
    pub fn weight(&self) -> Option<u32> {
        let mut ws = self.terms.keys().map(|k| weight_of(k));
        let w = ws.next()?;
        ws.all(|x| x == w).then_some(w)
    }
}

/// `α_r = (-1)^r/(2^r(2r-1)!!) h[-2]^{2r}𝟙` in the square-bracket algebra.
pub fn alpha_square(r: u32) -> SquareBracketCombination {
    SquareBracketCombination::monomial(&vec![2; 2 * r as usize], super::bracket::alpha_scalar(r))
}

/// `β_s = 2^s/(2s-1)!! h[-3]^{2s}𝟙` in the square-bracket algebra.
pub fn beta_square(s: u32) -> SquareBracketCombination {
    SquareBracketCombination::monomial(&vec![3; 2 * s as usize], super::bracket::beta_scalar(s))
}

/// Linear extension of [`character_mt`]; the combination must be
/// homogeneous (the zero combination maps to `0` of weight `0`).
pub fn character_of(v: &SquareBracketCombination) -> Result<ModularPoly> {
    let Some(weight) = v.weight().or(v.terms.is_empty().then_some(0)) else {
        return Err(Error::DimensionMismatch(
            "character_of needs a homogeneous square-bracket combination".into(),
        ));
    };
    let mut memo = HashMap::new();
    let mut acc = ModularPoly::zero(weight, Basis::G);
    for (k, c) in &v.terms {
        let f = character_memo(k, &mut memo);
        acc = acc.add(&f.scale(c))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{double_factorial, ratio};
    use proptest::prelude::*;

    /// Direct sum over explicit matchings.
    fn character_brute(phi: &[u32]) -> ModularPoly {
        let w = weight_of(phi);
        let mut acc = ModularPoly::zero(w, Basis::G);
        for pp in pair_partitions(phi) {
            let mut term = ModularPoly::constant(Rat::one()).to_basis(Basis::G);
            for &(s, t) in &pp.pairs {
                term = term.mul(&g_poly(s + t).scale(&pair_weight(s, t)));
            }
            acc = acc.add(&term).unwrap();
        }
        acc
    }

    #[test]
    fn matching_counts() {
        assert_eq!(pair_partitions(&[2, 2]).len(), 1);
        assert_eq!(pair_partitions(&[2, 2, 2, 2]).len(), 3);
        assert_eq!(
            pair_partitions(&[2, 3]),
            vec![PairPartition {
                pairs: vec![(2, 3)]
            }]
        );
        assert!(pair_partitions(&[2, 2, 2]).is_empty());
        for r in 1..=5 {
            let n = pair_partitions(&vec![2; 2 * r]).len();
            assert_eq!(
                num_bigint::BigInt::from(n),
                double_factorial(2 * r as i64 - 1).unwrap()
            );
        }
    }

    #[test]
    fn character_examples() {
        let g4 = ModularPoly::generator(Basis::G, 4);
        let g6 = ModularPoly::generator(Basis::G, 6);
        assert_eq!(character_mt(&[2, 2]), g4.scale(&rat(-2)));
        assert_eq!(character_mt(&[3, 3]), g6.scale(&ratio(1, 2)));
        assert!(character_mt(&[2, 3]).is_zero());
        assert!(character_mt(&[2, 2, 3]).is_zero());
        assert_eq!(character_mt(&[2, 2, 2, 2]), g4.pow(2).scale(&rat(12)));
        assert_eq!(
            character_of(&SquareBracketCombination::vacuum()).unwrap(),
            ModularPoly::constant(rat(1)).to_basis(Basis::G)
        );
        let a2b1 = alpha_square(2).mul(&beta_square(1));
        assert_eq!(character_of(&a2b1).unwrap(), g4.pow(2).mul(&g6));
    }

    #[test]
    fn high_weight_pairs_reduce() {
        // G_4 = E_4/240, G_8 = E_8/480 = E_4^2/480, so G_8 = 120 G_4^2
        assert_eq!(
            g_poly(8),
            ModularPoly::generator(Basis::G, 4).pow(2).scale(&rat(120))
        );
        assert!(g_poly(7).is_zero());
    }

    #[test]
    fn mixed_weights_rejected() {
        let mut v = SquareBracketCombination::vacuum();
        v.add_term(&[2, 2], rat(1));
        assert!(character_of(&v).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn memo_matches_brute_force(phi in proptest::collection::vec(1u32..6, 0..7)) {
            prop_assert_eq!(character_mt(&phi), character_brute(&phi));
        }
    }
}

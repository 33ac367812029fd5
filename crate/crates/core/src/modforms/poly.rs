//! Polynomials in the quasi-modular generators with a declared weight.
//!
//! A [`ModularPoly`] is keyed by exponent triples `(a, b, c)` of
//! `E_2^a E_4^b E_6^c` (E-basis) or `G_2^a G_4^b G_6^c` (G-basis). The
//! symbolic derivative uses the Ramanujan identities
//!
//! ```text
//! θE_2 = (E_2^2 - E_4)/12,  θE_4 = (E_2 E_4 - E_6)/3,  θE_6 = (E_2 E_6 - E_4^2)/2.
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::series::{e2, e4, e6, g_over_e};
use crate::error::{Error, Result};
use crate::numkernel::{fmt_rat, parse_rat, rat, ratio, solve_exact, LinearSolution, Rat};
use crate::qseries::QSeries;

pub type Exponents = [u32; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    E,
    G,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularPoly {
    weight: u32,
    basis: Basis,
    terms: BTreeMap<Exponents, Rat>,
}

pub fn monomial_weight(exp: &Exponents) -> u32 {
    2 * exp[0] + 4 * exp[1] + 6 * exp[2]
}

/// All `(a, b, c)` of the given weight; with `quasi == false` only `a = 0`.
pub fn monomials_of_weight(weight: u32, quasi: bool) -> Vec<Exponents> {
    let mut out = Vec::new();
    if weight % 2 == 1 {
        return out;
    }
    let max_a = if quasi { weight / 2 } else { 0 };
    for a in 0..=max_a {
        let rest = weight - 2 * a;
        for c in 0..=rest / 6 {
            let r = rest - 6 * c;
            if r.is_multiple_of(4) {
                out.push([a, r / 4, c]);
            }
        }
    }
    out.sort();
    out
}

/// Dimension of the level-one space `M_w`.
pub fn dim_modular(weight: u32) -> usize {
    monomials_of_weight(weight, false).len()
}

impl ModularPoly {
    pub fn zero(weight: u32, basis: Basis) -> ModularPoly {
        ModularPoly {
            weight,
            basis,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> ModularPoly {
        let mut p = ModularPoly::zero(0, Basis::E);
        p.push([0, 0, 0], c).expect("weight 0");
        p
    }

    pub fn monomial(basis: Basis, exp: Exponents, c: Rat) -> ModularPoly {
        let mut p = ModularPoly::zero(monomial_weight(&exp), basis);
        p.push(exp, c).expect("weight matches by construction");
        p
    }

    /// `E_k` or `G_k` for `k ∈ {2, 4, 6}`.
    pub fn generator(basis: Basis, k: u32) -> ModularPoly {
        let exp = match k {
            2 => [1, 0, 0],
            4 => [0, 1, 0],
            6 => [0, 0, 1],
            _ => panic!("generator weight must be 2, 4 or 6"),
        };
        ModularPoly::monomial(basis, exp, Rat::one())
    }

    pub fn from_terms(
        weight: u32,
        basis: Basis,
        terms: impl IntoIterator<Item = (Exponents, Rat)>,
    ) -> Result<ModularPoly> {
        let mut p = ModularPoly::zero(weight, basis);
        for (e, c) in terms {
            p.push(e, c)?;
        }
        Ok(p)
    }

    /// Adds `c` times a monomial; the monomial must carry the declared weight.
    pub fn push(&mut self, exp: Exponents, c: Rat) -> Result<()> {
        if monomial_weight(&exp) != self.weight {
            return Err(Error::InvalidParameter(format!(
                "monomial {exp:?} has weight {}, polynomial has weight {}",
                monomial_weight(&exp),
                self.weight
            )));
        }
        if c.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(exp).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
        Ok(())
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rat> {
        &self.terms
    }

    pub fn coeff(&self, exp: &Exponents) -> Rat {
        self.terms.get(exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether every monomial avoids `E_2` (resp. `G_2`).
    pub fn is_modular(&self) -> bool {
        self.terms.keys().all(|e| e[0] == 0)
    }

    fn basis_scalars(basis: Basis) -> [Rat; 3] {
        match basis {
            Basis::E => [rat(1), rat(1), rat(1)],
            Basis::G => [
                g_over_e(2).expect("k=2"),
                g_over_e(4).expect("k=4"),
                g_over_e(6).expect("k=6"),
            ],
        }
    }

    pub fn to_basis(&self, target: Basis) -> ModularPoly {
        if target == self.basis {
            return self.clone();
        }
        // G_k = s_k E_k, so a G-monomial is a scalar multiple of the same
        // E-monomial.
        let s = Self::basis_scalars(Basis::G);
        let mut out = ModularPoly::zero(self.weight, target);
        for (e, c) in &self.terms {
            let mut f = Rat::one();
            for i in 0..3 {
                f *= num_traits::pow(s[i].clone(), e[i] as usize);
            }
            let c = if target == Basis::E { c * f } else { c / f };
            out.push(*e, c).expect("same weight");
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> ModularPoly {
        let mut out = ModularPoly::zero(self.weight, self.basis);
        for (e, x) in &self.terms {
            out.push(*e, x * c).expect("same weight");
        }
        out
    }

    pub fn add(&self, other: &ModularPoly) -> Result<ModularPoly> {
        if self.weight != other.weight {
            return Err(Error::InvalidParameter(format!(
                "cannot add weights {} and {}",
                self.weight, other.weight
            )));
        }
        let other = other.to_basis(self.basis);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(*e, c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ModularPoly) -> Result<ModularPoly> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn mul(&self, other: &ModularPoly) -> ModularPoly {
        let other = other.to_basis(self.basis);
        let mut out = ModularPoly::zero(self.weight + other.weight, self.basis);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                out.push(e, c1 * c2).expect("weights add");
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> ModularPoly {
        let mut acc = ModularPoly::constant(Rat::one()).to_basis(self.basis);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Value of the polynomial with `E_2 = E_4 = E_6 = 1` (E-basis), i.e. the
    /// constant term of its q-expansion.
    pub fn constant_term(&self) -> Rat {
        self.to_basis(Basis::E).terms.values().cloned().sum()
    }

    pub fn to_json(&self) -> ModularPolyJson {
        ModularPolyJson {
            weight: self.weight,
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: *e,
                    coeff: fmt_rat(c),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ModularPolyJson) -> Result<ModularPoly> {
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((t.exp, parse_rat(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        ModularPoly::from_terms(j.weight, j.basis, terms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Exponents,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularPolyJson {
    pub weight: u32,
    pub basis: Basis,
    pub terms: Vec<TermJson>,
}

impl fmt::Display for ModularPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sym = match self.basis {
            Basis::E => "E",
            Basis::G => "G",
        };
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mag = c.abs();
            let factors: Vec<String> = [2, 4, 6]
                .iter()
                .zip(e)
                .filter(|(_, &p)| p > 0)
                .map(|(k, &p)| {
                    if p == 1 {
                        format!("{sym}{k}")
                    } else {
                        format!("{sym}{k}^{p}")
                    }
                })
                .collect();
            let body = factors.join("*");
            match (mag.is_one(), body.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => write!(f, "{body}")?,
                (false, false) if mag.is_integer() => write!(f, "{mag}*{body}")?,
                (false, false) => write!(f, "({mag})*{body}")?,
            }
        }
        Ok(())
    }
}

/// Symbolic `θ` on an E-basis polynomial (G-basis input is converted).
pub fn sym_theta(p: &ModularPoly) -> ModularPoly {
    let p = p.to_basis(Basis::E);
    // θ of each generator, as lists of (coefficient, exponent shift).
    let d2 = ModularPoly::from_terms(
        4,
        Basis::E,
        [([2, 0, 0], ratio(1, 12)), ([0, 1, 0], ratio(-1, 12))],
    )
    .expect("weight 4");
    let d4 = ModularPoly::from_terms(
        6,
        Basis::E,
        [([1, 1, 0], ratio(1, 3)), ([0, 0, 1], ratio(-1, 3))],
    )
    .expect("weight 6");
    let d6 = ModularPoly::from_terms(
        8,
        Basis::E,
        [([1, 0, 1], ratio(1, 2)), ([0, 2, 0], ratio(-1, 2))],
    )
    .expect("weight 8");
    let derivs = [d2, d4, d6];
    let mut out = ModularPoly::zero(p.weight + 2, Basis::E);
    for (e, c) in &p.terms {
        for (i, d) in derivs.iter().enumerate() {
            if e[i] == 0 {
                continue;
            }
            let mut rest = *e;
            rest[i] -= 1;
            let term = ModularPoly::monomial(Basis::E, rest, c * rat(e[i] as i64)).mul(d);
            out = out.add(&term).expect("weight w+2");
        }
    }
    out
}

/// Symbolic Ramanujan–Serre derivative `θP - (w/12) E_2 P`.
pub fn sym_serre(p: &ModularPoly) -> ModularPoly {
    let e2p = ModularPoly::generator(Basis::E, 2).mul(&p.to_basis(Basis::E));
    sym_theta(p)
        .add(&e2p.scale(&ratio(-(p.weight as i64), 12)))
        .expect("weight w+2")
}

/// Substitutes the Eisenstein expansions, exact through `prec`.
pub fn eval_poly(p: &ModularPoly, prec: i64) -> QSeries {
    let p = p.to_basis(Basis::E);
    let gens = [e2(prec), e4(prec), e6(prec)];
    let mut powers: HashMap<(usize, u32), QSeries> = HashMap::new();
    let mut acc = QSeries::zero(prec);
    for (e, c) in &p.terms {
        let mut term = QSeries::one(prec).scale(c);
        for i in 0..3 {
            if e[i] == 0 {
                continue;
            }
            let pw = powers
                .entry((i, e[i]))
                .or_insert_with(|| gens[i].pow(e[i] as i64).expect("positive power"));
            term = &term * &*pw;
        }
        acc = &acc + &term;
    }
    acc
}

/// The unique E_4/E_6 polynomial of weight `w` whose expansion matches `f`.
///
/// The system is solved on the leading coefficients and every further known
/// coefficient is then checked; a nonzero residual is an error, never a
/// best fit.
pub fn to_eisenstein_basis(f: &QSeries, weight: u32) -> Result<ModularPoly> {
    let prec = f.known_through();
    if f.lead() < 0 {
        return Err(Error::NotModular {
            weight,
            exponent: f.lead(),
        });
    }
    let monos = monomials_of_weight(weight, false);
    if monos.is_empty() {
        if f.is_zero() {
            return Ok(ModularPoly::zero(weight, Basis::E));
        }
        return Err(Error::NotModular {
            weight,
            exponent: f.lead(),
        });
    }
    let d = monos.len();
    if prec < d as i64 {
        return Err(Error::PrecisionStarvation {
            needed: d as i64,
            available: prec,
        });
    }
    let columns: Vec<QSeries> = monos
        .iter()
        .map(|e| eval_poly(&ModularPoly::monomial(Basis::E, *e, Rat::one()), prec))
        .collect();
    let target = f.coeff_range(0, prec)?;
    let col_coeffs: Vec<Vec<Rat>> = columns
        .iter()
        .map(|c| c.coeff_range(0, prec))
        .collect::<Result<_>>()?;
    let mut rows = d;
    let solution = loop {
        let a: Vec<Vec<Rat>> = (0..rows)
            .map(|r| col_coeffs.iter().map(|c| c[r].clone()).collect())
            .collect();
        match solve_exact(&a, &target[..rows])? {
            LinearSolution::Unique(x) => break x,
            LinearSolution::Inconsistent => {
                return Err(Error::NotModular {
                    weight,
                    exponent: rows as i64 - 1,
                })
            }
            LinearSolution::Family { .. } if (rows as i64) < prec => rows += 1,
            LinearSolution::Family { .. } => {
                return Err(Error::PrecisionStarvation {
                    needed: prec + 1,
                    available: prec,
                })
            }
        }
    };
    let poly = ModularPoly::from_terms(weight, Basis::E, monos.iter().copied().zip(solution))?;
    if let Some(e) = eval_poly(&poly, prec).first_difference(f, prec)? {
        return Err(Error::NotModular {
            weight,
            exponent: e,
        });
    }
    Ok(poly)
}

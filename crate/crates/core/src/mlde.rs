//! Monic modular linear differential equations
//! `𝒟^t f + Σ_{i<t} g_i 𝒟^i f = 0` with `weight(g_i) = 2(t - i)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modforms::{
    delta, e4, e_star, eval_poly, lambda_hauptmodul, monomials_of_weight, serre_derivative, Basis,
    ModularPoly, ModularPolyJson,
};
use crate::numkernel::{factor_small, linalg, rat, ratio, solve_exact, LinearSolution, Rat};
use crate::qseries::QSeries;
use crate::serreseq::{serre_trace, simplified_parts, SerreParams};

/// How an [`Mlde`] came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Verified,
    Searched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mlde {
    degree: u32,
    base_weight: u32,
    coeffs: Vec<ModularPoly>,
    provenance: Provenance,
}

impl Mlde {
    /// `coeffs[i]` multiplies `𝒟^i f` and must have weight `2(degree - i)`.
    pub fn new(base_weight: u32, coeffs: Vec<ModularPoly>, provenance: Provenance) -> Result<Mlde> {
        let degree = coeffs.len() as u32;
        if degree == 0 {
            return Err(Error::InvalidParameter("MLDE degree must be >= 1".into()));
        }
        for (i, g) in coeffs.iter().enumerate() {
            let want = 2 * (degree - i as u32);
            if g.weight() != want {
                return Err(Error::InvalidParameter(format!(
                    "g_{i} has weight {}, expected {want}",
                    g.weight()
                )));
            }
        }
        Ok(Mlde {
            degree,
            base_weight,
            coeffs: coeffs.into_iter().map(|g| g.to_basis(Basis::E)).collect(),
            provenance,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn base_weight(&self) -> u32 {
        self.base_weight
    }

    pub fn coeffs(&self) -> &[ModularPoly] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn to_json(&self) -> MldeJson {
        MldeJson {
            degree: self.degree,
            base_weight: self.base_weight,
            coeffs: self.coeffs.iter().map(ModularPoly::to_json).collect(),
            provenance: self.provenance,
        }
    }

    pub fn from_json(j: &MldeJson) -> Result<Mlde> {
        let coeffs = j
            .coeffs
            .iter()
            .map(ModularPoly::from_json)
            .collect::<Result<Vec<_>>>()?;
        let m = Mlde::new(j.base_weight, coeffs, j.provenance)?;
        if m.degree != j.degree {
            return Err(Error::Parse(format!(
                "degree {} does not match {} coefficients",
                j.degree, m.degree
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MldeJson {
    pub degree: u32,
    pub base_weight: u32,
    pub coeffs: Vec<ModularPolyJson>,
    pub provenance: Provenance,
}

/// `[f, 𝒟f, …, 𝒟^t f]` along the weight ladder `w, w+2, …`.
fn derivative_ladder(f: &QSeries, weight: i64, t: u32) -> Vec<QSeries> {
    let mut out = vec![f.clone()];
    for i in 0..t {
        let next = serre_derivative(&out[i as usize], weight + 2 * i as i64);
        out.push(next);
    }
    out
}

fn eval_prec(f: &QSeries) -> i64 {
    f.known_through() - f.lead().min(0)
}

/// Applies the operator to a series of weight `base_weight`.
pub fn mlde_apply(l: &Mlde, f: &QSeries) -> QSeries {
    let ladder = derivative_ladder(f, l.base_weight as i64, l.degree);
    let prec = eval_prec(f);
    l.coeffs
        .iter()
        .zip(&ladder)
        .fold(ladder[l.degree as usize].clone(), |acc, (g, d)| {
            &acc + &(&eval_poly(g, prec) * d)
        })
}

/// Exponent of the first nonzero coefficient below `prec`, if any.
fn first_nonzero(s: &QSeries, prec: i64) -> Result<Option<i64>> {
    s.first_difference(&QSeries::zero(prec), prec)
}

/// `𝒟^3(Δ^nλ^n) = ((n^2 - n^3)E_2^{*3} - (n^2/2 + n/18)E_2^*E_4)Δ^nλ^n`, together
/// with `𝒟^i_{12n}(Δ^nλ^n) = Δ^n 𝒟^i_0(λ^n)` for `i <= 3`.
pub fn verify_limit_mlde(n: u32, prec: i64) -> Result<bool> {
    Ok(limit_mlde_first_failure(n, prec)?.is_none())
}

/// The first exponent at which either identity of [`verify_limit_mlde`] fails.
pub fn limit_mlde_first_failure(n: u32, prec: i64) -> Result<Option<i64>> {
    let ni = n as i64;
    let (lam_n, dn) = if n == 0 {
        (QSeries::one(prec), QSeries::one(prec))
    } else {
        (lambda_hauptmodul(2, prec)?.pow(ni)?, delta(prec).pow(ni)?)
    };
    let f = &dn * &lam_n;
    let ladder = derivative_ladder(&f, 12 * ni, 3);
    let inner = derivative_ladder(&lam_n, 0, 3);
    for (outer, inner) in ladder.iter().zip(&inner).skip(1) {
        if let Some(e) = first_nonzero(&(outer - &(&dn * inner)), prec)? {
            return Ok(Some(e));
        }
    }
    let es = e_star(2, 2, prec)?;
    let es3 = &(&es * &es) * &es;
    let coeff = &es3.scale(&rat(ni * ni - ni * ni * ni))
        - &(&es * &e4(prec)).scale(&(ratio(ni * ni, 2) + ratio(ni, 18)));
    let rhs = &coeff * &f;
    first_nonzero(&(&ladder[3] - &rhs), prec)
}

/// `3t^2/4 + t/4 + 1/18`, the `E_4 𝒟` coefficient.
pub fn serre_mlde_c1(t: &Rat) -> Rat {
    ratio(3, 4) * t * t + ratio(1, 4) * t + ratio(1, 18)
}

/// `(t^3 + t^2)/4`, the `E_6` coefficient.
pub fn serre_mlde_c0(t: &Rat) -> Rat {
    ratio(1, 4) * (t * t * t + t * t)
}

/// The degree-3 MLDE of `Δ^nλ_{n,m}`, with `t = 2^m - n`:
/// `𝒟^3 f - c_1(t) E_4 𝒟f + c_0(t) E_6 f = 0`.
pub fn serre_mlde(n: u32, m: u32) -> Result<Mlde> {
    let s = SerreParams::two(n, m)?;
    let t = rat(s.block() - n as i64);
    let g0 = ModularPoly::monomial(Basis::E, [0, 0, 1], serre_mlde_c0(&t));
    let g1 = ModularPoly::monomial(Basis::E, [0, 1, 0], -serre_mlde_c1(&t));
    let g2 = ModularPoly::zero(2, Basis::E);
    Mlde::new(
        12 * (s.block() as u32 + n),
        vec![g0, g1, g2],
        Provenance::Verified,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreMldeReport {
    pub sum: bool,
    pub t1: bool,
    pub t2: bool,
    /// Smallest exponent with a nonzero residual across the three checks.
    pub first_failure: Option<i64>,
}

impl SerreMldeReport {
    pub fn all(&self) -> bool {
        self.sum && self.t1 && self.t2
    }
}

/// Checks the MLDE on `Δ^nλ_{n,m}` and separately on `Δ^n T₁`, `Δ^n T₂`.
pub fn verify_serre_mlde(n: u32, m: u32, prec: i64) -> Result<SerreMldeReport> {
    let s = SerreParams::two(n, m)?;
    let l = serre_mlde(n, m)?;
    let dn = delta(prec).pow(n as i64)?;
    let (t1, t2) = simplified_parts(s, prec)?;
    let whole = serre_trace(s, prec)?;
    let residual = |g: &QSeries| first_nonzero(&mlde_apply(&l, &(&dn * g)), prec);
    let (sum, r1, r2) = (residual(&whole)?, residual(&t1)?, residual(&t2)?);
    Ok(SerreMldeReport {
        sum: sum.is_none(),
        t1: r1.is_none(),
        t2: r2.is_none(),
        first_failure: [sum, r1, r2].into_iter().flatten().min(),
    })
}

/// Symbolic check that the `t → -n` limit of the Serre-sequence MLDE is the
/// limit MLDE. Polynomials here are in `E_2^*` and `E_4`, keyed by exponents.
pub fn limit_consistency(n: u32) -> bool {
    type P = BTreeMap<[u32; 2], Rat>;
    fn add(acc: &mut P, e: [u32; 2], c: Rat) {
        let v = acc.entry(e).or_insert_with(Rat::zero);
        *v += c;
        if v.is_zero() {
            acc.remove(&e);
        }
    }
    let ni = n as i64;
    let t = rat(-ni);
    let (c1, c0) = (serre_mlde_c1(&t), serre_mlde_c0(&t));
    // 𝒟(Δ^nλ^n) = -n E_2^* Δ^nλ^n and E_6 = -4E_2^{*3} + 3E_2^*E_4.
    let mut lhs = P::new();
    add(&mut lhs, [1, 1], &c1 * rat(-ni));
    add(&mut lhs, [3, 0], -&c0 * rat(-4));
    add(&mut lhs, [1, 1], -&c0 * rat(3));
    let mut rhs = P::new();
    add(&mut rhs, [3, 0], rat(ni * ni - ni * ni * ni));
    add(&mut rhs, [1, 1], -(ratio(ni * ni, 2) + ratio(ni, 18)));
    lhs == rhs
}

/// Where the coefficients `g_i` are sought.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffSpace {
    /// Holomorphic modular forms `C[E_4, E_6]`.
    M,
    /// Quasi-modular forms `C[E_2, E_4, E_6]`.
    MPrime,
}

pub const SEARCH_MARGIN: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// `None` when the linear system is inconsistent at this precision.
    pub found: Option<Mlde>,
    pub unknowns: usize,
    pub equations: usize,
    /// Nullity of the homogeneous system that also leaves the leading
    /// coefficient free (report only).
    pub nonmonic_nullity: usize,
}

/// Exact search for a monic degree-`t` MLDE satisfied by `f` of weight `w`,
/// using the coefficients of `q^e` for `e` below `prec`.
pub fn mlde_search(
    f: &QSeries,
    weight: u32,
    t: u32,
    space: CoeffSpace,
    prec: i64,
) -> Result<SearchOutcome> {
    if t == 0 {
        return Err(Error::InvalidParameter("MLDE degree must be >= 1".into()));
    }
    let quasi = space == CoeffSpace::MPrime;
    let f = f.truncate(prec.min(f.known_through()))?;
    let ladder = derivative_ladder(&f, weight as i64, t);
    let ep = eval_prec(&f);
    let mut unknowns: Vec<(usize, [u32; 3])> = Vec::new();
    let mut columns: Vec<QSeries> = Vec::new();
    for (i, d) in ladder.iter().enumerate().take(t as usize) {
        for mono in monomials_of_weight(2 * (t - i as u32), quasi) {
            let g = eval_poly(&ModularPoly::monomial(Basis::E, mono, Rat::one()), ep);
            columns.push(&g * d);
            unknowns.push((i, mono));
        }
    }
    let top = &ladder[t as usize];
    let lo = f.lead();
    let hi = columns
        .iter()
        .map(QSeries::known_through)
        .chain([top.known_through()])
        .min()
        .expect("nonempty");
    let equations = (hi - lo).max(0) as usize;
    if equations < unknowns.len() + SEARCH_MARGIN {
        return Err(Error::InsufficientMargin {
            needed: unknowns.len() + SEARCH_MARGIN,
            available: equations,
        });
    }
    let rows: Vec<Vec<Rat>> = (lo..hi)
        .map(|e| {
            columns
                .iter()
                .map(|c| c.coeff(e).expect("within precision"))
                .collect()
        })
        .collect();
    let rhs: Vec<Rat> = (lo..hi)
        .map(|e| -top.coeff(e).expect("within precision"))
        .collect();

    let homogeneous: Vec<Vec<Rat>> = rows
        .iter()
        .zip(&rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(-b.clone());
            r
        })
        .collect();
    let nonmonic_nullity = unknowns.len() + 1 - linalg::rank(&homogeneous);

    let solution = match solve_exact(&rows, &rhs)? {
        LinearSolution::Inconsistent => None,
        sol => Some(sol.particular().expect("consistent").to_vec()),
    };
    let found = match solution {
        None => None,
        Some(x) => {
            let mut coeffs: Vec<ModularPoly> = (0..t)
                .map(|i| ModularPoly::zero(2 * (t - i), Basis::E))
                .collect();
            for ((i, mono), c) in unknowns.iter().zip(x) {
                coeffs[*i].push(*mono, c)?;
            }
            let l = Mlde::new(weight, coeffs, Provenance::Searched)?;
            let residual = mlde_apply(&l, &f);
            if let Some(e) = residual.first_difference(&QSeries::zero(hi), hi)? {
                return Err(Error::Disagreement(format!(
                    "searched MLDE fails re-verification at q^{e}"
                )));
            }
            Some(l)
        }
    };
    Ok(SearchOutcome {
        found,
        unknowns: unknowns.len(),
        equations,
        nonmonic_nullity,
    })
}

/// Dense polynomial with ascending rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicialData {
    pub polynomial: Vec<Rat>,
    /// Rational roots with multiplicity, ascending.
    pub roots: Vec<Rat>,
}

fn poly_mul_linear(p: &[Rat], root: &Rat) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * root;
    }
    out
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

/// Synthetic division by `(r - root)`; the remainder must be zero.
fn deflate(p: &[Rat], root: &Rat) -> Vec<Rat> {
    let n = p.len() - 1;
    let mut out = vec![Rat::zero(); n];
    let mut carry = Rat::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + carry * root;
        out[i] = carry.clone();
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let (primes, rest) = factor_small(n, 100_000);
    let mut out = vec![BigInt::one()];
    let mut factors: Vec<(BigInt, u64)> = primes
        .into_iter()
        .map(|(p, e)| (BigInt::from(p), e))
        .collect();
    if !rest.is_one() {
        factors.push((rest, 1));
    }
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out
}

fn rational_roots(poly: &[Rat]) -> Vec<Rat> {
    let mut p: Vec<Rat> = poly.to_vec();
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        roots.push(Rat::zero());
        p.remove(0);
    }
    if p.len() > 1 {
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let nums = divisors(&ints[0].abs());
        let dens = divisors(&ints[ints.len() - 1].abs());
        let mut candidates: Vec<Rat> = Vec::new();
        for a in &nums {
            for b in &dens {
                for s in [1, -1] {
                    let c = Rat::new(a * s, b.clone());
                    if !candidates.contains(&c) {
                        candidates.push(c);
                    }
                }
            }
        }
        candidates.sort();
        for c in candidates {
            while p.len() > 1 && poly_eval(&p, &c).is_zero() {
                roots.push(c.clone());
                p = deflate(&p, &c);
            }
        }
    }
    roots.sort();
    roots
}

/// `P(r) = Π_{l<t}(r - (w+2l)/12) + Σ_i g_i(0) Π_{l<i}(r - (w+2l)/12)`.
pub fn indicial_roots(l: &Mlde) -> IndicialData {
    let w = l.base_weight as i64;
    let mut ladder = vec![vec![Rat::one()]];
    for k in 0..l.degree as i64 {
        let next = poly_mul_linear(ladder.last().expect("nonempty"), &ratio(w + 2 * k, 12));
        ladder.push(next);
    }
    let mut polynomial = ladder[l.degree as usize].clone();
    for (i, g) in l.coeffs.iter().enumerate() {
        let c0 = g.constant_term();
        for (k, c) in ladder[i].iter().enumerate() {
            polynomial[k] += &c0 * c;
        }
    }
    let roots = rational_roots(&polynomial);
    IndicialData { polynomial, roots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::e6;

    #[test]
    fn weights_enforced() {
        let bad = ModularPoly::generator(Basis::E, 4);
        assert!(Mlde::new(12, vec![bad], Provenance::Verified).is_err());
        assert!(Mlde::new(12, vec![], Provenance::Verified).is_err());
    }

    #[test]
    fn apply_examples() {
        let l = Mlde::new(
            12,
            vec![ModularPoly::zero(2, Basis::E)],
            Provenance::Verified,
        )
        .unwrap();
        assert!(mlde_apply(&l, &delta(40)).is_zero());
        assert!(mlde_apply(&serre_mlde(1, 1).unwrap(), &QSeries::zero(20)).is_zero());
        let s = SerreParams::two(1, 1).unwrap();
        let f = &delta(60) * &serre_trace(s, 60).unwrap();
        let r = mlde_apply(&serre_mlde(1, 1).unwrap(), &f);
        assert_eq!(first_nonzero(&r, 60).unwrap(), None);
    }

    #[test]
    fn limit_mlde_small() {
        assert!(verify_limit_mlde(0, 20).unwrap());
        assert!(verify_limit_mlde(1, 40).unwrap());
        for n in 1..=3 {
            assert!(limit_consistency(n));
        }
    }

    #[test]
    fn serre_mlde_one_one() {
        let r = verify_serre_mlde(1, 1, 40).unwrap();
        assert!(r.all(), "{r:?}");
        let l = serre_mlde(1, 1).unwrap();
        assert_eq!(l.coeffs()[1].coeff(&[0, 1, 0]), ratio(-19, 18));
        assert_eq!(l.coeffs()[0].coeff(&[0, 0, 1]), ratio(1, 2));
    }

    #[test]
    fn indicial_examples() {
        let roots = indicial_roots(&serre_mlde(1, 1).unwrap()).roots;
        assert_eq!(roots, vec![rat(2), ratio(7, 2), rat(4)]);
        let d = Mlde::new(
            12,
            vec![ModularPoly::zero(2, Basis::E)],
            Provenance::Verified,
        )
        .unwrap();
        assert_eq!(indicial_roots(&d).roots, vec![rat(1)]);
        for (n, m) in [(1u32, 2u32), (2, 2)] {
            let big = 1i64 << m;
            let ni = n as i64;
            let want = vec![
                rat(2 * ni),
                ratio(3 * big + ni, 2),
                ratio(3 * big + ni + 1, 2),
            ];
            let mut got = indicial_roots(&serre_mlde(n, m).unwrap()).roots;
            got.sort();
            let mut want = want;
            want.sort();
            assert_eq!(got, want, "({n},{m})");
        }
    }

    #[test]
    fn rational_root_finder() {
        // (r - 1/2)^2 (r + 3)
        let p = poly_mul_linear(
            &poly_mul_linear(&poly_mul_linear(&[rat(1)], &ratio(1, 2)), &ratio(1, 2)),
            &rat(-3),
        );
        assert_eq!(rational_roots(&p), vec![rat(-3), ratio(1, 2), ratio(1, 2)]);
        assert!(rational_roots(&[rat(1), rat(0), rat(1)]).is_empty());
    }

    #[test]
    fn search_examples() {
        let k = 40;
        let out = mlde_search(&delta(k), 12, 1, CoeffSpace::MPrime, k).unwrap();
        let l = out.found.unwrap();
        assert!(l.coeffs()[0].is_zero());
        assert_eq!(l.provenance(), Provenance::Searched);

        let out = mlde_search(&e4(k), 4, 1, CoeffSpace::MPrime, k).unwrap();
        assert!(out.found.is_none());

        assert!(matches!(
            mlde_search(&e6(12), 6, 3, CoeffSpace::MPrime, 12),
            Err(Error::InsufficientMargin { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let l = serre_mlde(1, 2).unwrap();
        let j = serde_json::to_string(&l.to_json()).unwrap();
        let back: MldeJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Mlde::from_json(&back).unwrap(), l);
        assert!(j.contains("\"provenance\":\"verified\""));
    }
}

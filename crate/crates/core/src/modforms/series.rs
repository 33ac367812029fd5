use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{bernoulli, prime_power, rat, ratio, Rat};
use crate::qseries::QSeries;

/// Which normalization of the level-one Eisenstein series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EisensteinVariant {
    /// `E_k = 1 - (2k/B_k) Σ σ_{k-1}(n) q^n`
    E,
    /// `G_k = -(B_k/2k) E_k`
    G,
}

/// The genus-zero primes for which `(η(q^p)/η(q))^{24/(p-1)}` is a hauptmodul.
pub const HAUPTMODUL_PRIMES: [u32; 5] = [2, 3, 5, 7, 13];

fn memo() -> &'static RwLock<HashMap<u32, QSeries>> {
    static MEMO: OnceLock<RwLock<HashMap<u32, QSeries>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn divisor_power_sums(k: u32, n: usize) -> Vec<BigInt> {
    let mut sigma = vec![BigInt::zero(); n];
    for d in 1..n {
        let dk = num_traits::pow(BigInt::from(d), (k - 1) as usize);
        for m in (d..n).step_by(d) {
            sigma[m] += &dk;
        }
    }
    sigma
}

fn compute_e(k: u32, prec: i64) -> Result<QSeries> {
    let b = bernoulli(k)?;
    let factor = -rat(2 * k as i64) / b;
    let n = prec.max(0) as usize;
    let sigma = divisor_power_sums(k, n);
    let coeffs = sigma
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            if i == 0 {
                Rat::one()
            } else {
                Rat::from_integer(s) * &factor
            }
        })
        .collect();
    Ok(QSeries::from_coeffs(coeffs, prec))
}

/// `E_k` through `prec`, served from the process-wide memo. The memo only
/// ever holds exact expansions, so callers see identical results no matter
/// how concurrent requests interleave.
fn normalized_eisenstein(k: u32, prec: i64) -> Result<QSeries> {
    if let Some(s) = memo().read().expect("memo poisoned").get(&k) {
        if s.known_through() >= prec {
            return s.truncate(prec);
        }
    }
    let s = compute_e(k, prec)?;
    let mut table = memo().write().expect("memo poisoned");
    let entry = table.entry(k).or_insert_with(|| s.clone());
    if entry.known_through() < s.known_through() {
        *entry = s.clone();
    }
    Ok(s)
}

/// Snapshot of the memoized `E_k` expansions, keyed by weight.
pub fn eisenstein_memo_entries() -> Vec<(u32, QSeries)> {
    let table = memo().read().expect("memo poisoned");
    let mut out: Vec<_> = table.iter().map(|(k, s)| (*k, s.clone())).collect();
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Installs a previously computed `E_k` expansion (for example one loaded
/// from an on-disk cache). The leading coefficients are recomputed and
/// compared so a corrupt entry is rejected rather than trusted.
pub fn seed_eisenstein(k: u32, series: QSeries) -> Result<()> {
    let probe = series.known_through().min(24);
    let fresh = compute_e(k, probe)?;
    if series.lead() != 0 || !series.eq_through(&fresh, probe)? {
        return Err(Error::Disagreement(format!(
            "seeded E_{k} does not match its definition"
        )));
    }
    let mut table = memo().write().expect("memo poisoned");
    let entry = table.entry(k).or_insert_with(|| series.clone());
    if entry.known_through() < series.known_through() {
        *entry = series;
    }
    Ok(())
}

/// Level-one Eisenstein series of even weight `k >= 2`.
pub fn eisenstein(k: u32, variant: EisensteinVariant, prec: i64) -> Result<QSeries> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "Eisenstein weight must be even and >= 2, got {k}"
        )));
    }
    let e = normalized_eisenstein(k, prec)?;
    Ok(match variant {
        EisensteinVariant::E => e,
        EisensteinVariant::G => e.scale(&g_over_e(k)?),
    })
}

/// The scalar `-B_k / 2k` with `G_k = (-B_k/2k) E_k`.
pub fn g_over_e(k: u32) -> Result<Rat> {
    Ok(-bernoulli(k)? / rat(2 * k as i64))
}

pub fn e2(prec: i64) -> QSeries {
    eisenstein(2, EisensteinVariant::E, prec).expect("weight 2")
}

pub fn e4(prec: i64) -> QSeries {
    eisenstein(4, EisensteinVariant::E, prec).expect("weight 4")
}

pub fn e6(prec: i64) -> QSeries {
    eisenstein(6, EisensteinVariant::E, prec).expect("weight 6")
}

/// `Δ = (E_4^3 - E_6^2) / 1728`.
pub fn delta(prec: i64) -> QSeries {
    let a = e4(prec).pow(3).expect("positive power");
    let b = e6(prec).pow(2).expect("positive power");
    (&a - &b).scale(&ratio(1, 1728))
}

/// `Π_{n>=1} (1 - q^n)` by Euler's pentagonal number theorem.
fn euler_product(prec: i64) -> QSeries {
    let n = prec.max(0);
    let mut coeffs = vec![Rat::zero(); n as usize];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for j in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = j * (3 * j - 1) / 2;
            if e < n {
                coeffs[e as usize] = rat(if k % 2 == 0 { 1 } else { -1 });
                any = true;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    QSeries::from_coeffs(coeffs, prec)
}

/// `Π_d η(q^d)^{e_d}`, which must have an integral leading exponent
/// `Σ d·e_d / 24`.
pub fn eta_quotient(spec: &[(u32, i64)], prec: i64) -> Result<QSeries> {
    let weighted: i64 = spec.iter().map(|&(d, e)| d as i64 * e).sum();
    if weighted % 24 != 0 {
        return Err(Error::FractionalEtaExponent(ratio(weighted, 24)));
    }
    if let Some(&(d, _)) = spec.iter().find(|(d, _)| *d == 0) {
        return Err(Error::InvalidParameter(format!(
            "eta level {d} must be positive"
        )));
    }
    let lead = weighted / 24;
    let inner = prec - lead;
    if inner <= 0 {
        return Ok(QSeries::zero(prec));
    }
    let base = euler_product(inner);
    let mut acc = QSeries::one(inner);
    for &(d, e) in spec {
        let factor = base.v_p(d).truncate(inner)?.pow(e)?;
        acc = &acc * &factor;
    }
    Ok(acc.shift(lead))
}

/// `(η(q^p)/η(q))^{24/(p-1)}` for `p ∈ {2, 3, 5, 7, 13}`.
pub fn lambda_hauptmodul(p: u32, prec: i64) -> Result<QSeries> {
    if !HAUPTMODUL_PRIMES.contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "hauptmodul defined only for p in {HAUPTMODUL_PRIMES:?}, got {p}"
        )));
    }
    let e = 24 / (p as i64 - 1);
    eta_quotient(&[(p, e), (1, -e)], prec)
}

/// `E_k^*(q) = E_k(q) - p^{k-1} E_k(q^p)`.
pub fn e_star(k: u32, p: u32, prec: i64) -> Result<QSeries> {
    let e = eisenstein(k, EisensteinVariant::E, prec)?;
    let scaled = e
        .v_p(p)
        .truncate(prec)?
        .scale(&prime_power(p as u64, k as i64 - 1));
    Ok(&e - &scaled)
}

/// The weight-4 form `(E_4(q) - E_4(q^2)) / 240 = η(q^2)^16 / η(q)^8` on Γ₀(2).
pub fn script_e4(prec: i64) -> QSeries {
    let e = e4(prec);
    (&e - &e.v_p(2).truncate(prec).expect("v_p gains precision")).scale(&ratio(1, 240))
}

/// Ramanujan–Serre derivative `θf - (r/12) E_2 f` of a weight-`r` series.
pub fn serre_derivative(f: &QSeries, weight: i64) -> QSeries {
    let prec = f.known_through() - f.lead().min(0);
    let e2f = &e2(prec) * f;
    &f.theta() - &e2f.scale(&ratio(weight, 12))
}

/// `D^n = D_{r+2(n-1)} ∘ ... ∘ D_r`.
pub fn serre_derivative_iter(f: &QSeries, weight: i64, n: u32) -> QSeries {
    (0..n).fold(f.clone(), |acc, i| {
        serre_derivative(&acc, weight + 2 * i as i64)
    })
}

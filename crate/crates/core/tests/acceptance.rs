//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use hauptmodul::heisenberg::*;
use hauptmodul::mlde::*;
use hauptmodul::modforms::*;
use hauptmodul::numkernel::{double_factorial, rat, ratio, Val2};
use hauptmodul::serreseq::*;
use hauptmodul::QSeries;
use num_bigint::BigInt;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

const GRID: [(u32, u32); 6] = [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)];

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn same(lhs: &QSeries, rhs: &QSeries, k: i64, what: &str) -> Outcome {
    match lhs
        .first_difference(rhs, k)
        .map_err(|e| format!("{what}: {e}"))?
    {
        None => Ok(()),
        Some(e) => Err(format!("{what}: first difference at q^{e}")),
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn identities() -> Outcome {
    const K: i64 = 300;
    let (a, b, c) = (e2(K), e4(K), e6(K));
    same(
        &a.theta(),
        &(&(&a * &a) - &b).scale(&ratio(1, 12)),
        K,
        "theta E2",
    )?;
    same(
        &b.theta(),
        &(&(&a * &b) - &c).scale(&ratio(1, 3)),
        K,
        "theta E4",
    )?;
    same(
        &c.theta(),
        &(&(&a * &c) - &(&b * &b)).scale(&ratio(1, 2)),
        K,
        "theta E6",
    )?;
    let s2 = e_star(2, 2, K).map_err(err)?;
    let s4 = e_star(4, 2, K).map_err(err)?;
    let s6 = e_star(6, 2, K).map_err(err)?;
    let s2sq = &s2 * &s2;
    let s2cu = &s2sq * &s2;
    same(&s4, &(&s2sq.scale(&rat(-10)) + &b.scale(&rat(3))), K, "E4*")?;
    same(
        &s6,
        &(&s2cu.scale(&rat(40)) - &(&s2 * &b).scale(&rat(9))),
        K,
        "E6*",
    )?;
    same(
        &serre_derivative(&s2, 2),
        &(&s2sq.scale(&ratio(1, 3)) - &b.scale(&ratio(1, 6))),
        K,
        "D E2*",
    )?;
    same(
        &serre_derivative(&s4, 4),
        &(&s2cu.scale(&ratio(-8, 3)) + &(&s2 * &b).scale(&ratio(1, 3))),
        K,
        "D E4*",
    )?;
    same(
        &c,
        &(&s2cu.scale(&rat(-4)) + &(&s2 * &b).scale(&rat(3))),
        K,
        "E6 via E2*",
    )?;
    let e4q2 = b.v_p(2).truncate(K).map_err(err)?;
    let e6q2 = c.v_p(2).truncate(K).map_err(err)?;
    same(
        &e4q2,
        &(&s2sq.scale(&ratio(5, 4)) - &b.scale(&ratio(1, 4))),
        K,
        "E4(q^2)",
    )?;
    same(
        &e6q2,
        &(&(&s2 * &b).scale(&ratio(3, 8)) - &s2cu.scale(&ratio(11, 8))),
        K,
        "E6(q^2)",
    )
}

fn u_p_laws() -> Outcome {
    const K: i64 = 300;
    let p = 2;
    let big = p as i64 * K;
    let fs = [
        ("E2", e2(big)),
        ("E4 E6", &e4(big) * &e6(big)),
        ("Delta", delta(big)),
        ("lambda", lambda_hauptmodul(2, big).map_err(err)?),
    ];
    let gs = [("E4", e4(K)), ("E6", e6(K)), ("Delta", delta(K))];
    for (fname, f) in &fs {
        for (gname, g) in &gs {
            let lhs = (f * &g.v_p(p)).u_p(p);
            let rhs = g * &f.u_p(p);
            same(&lhs, &rhs, K, &format!("U2({fname} * {gname}(q^2))"))?;
        }
        let lhs = f.theta().u_p(p);
        let rhs = f.u_p(p).theta().scale(&rat(p as i64));
        same(&lhs, &rhs, K, &format!("U2(theta {fname})"))?;
    }
    for k in [2, 4, 6, 8, 10, 12] {
        let s = e_star(k, p, big).map_err(err)?;
        same(&s.u_p(p), &s, K, &format!("U2(E{k}*)"))?;
    }
    Ok(())
}

fn params(n: u32, m: u32) -> Result<SerreParams, String> {
    SerreParams::two(n, m).map_err(err)
}

fn three_way() -> Outcome {
    const K: i64 = 60;
    let ps: Vec<SerreParams> = GRID
        .iter()
        .map(|&(n, m)| params(n, m))
        .collect::<Result<_, _>>()?;
    for (s, cell) in ps.iter().zip(compute_grid(&ps, K)) {
        let cell = cell.map_err(|e| format!("({},{}): {e}", s.n, s.m))?;
        let closed = cell.series_closed.as_ref().ok_or("closed form missing")?;
        let poly = cell.series_poly.as_ref().ok_or("polynomial missing")?;
        let what = format!("lambda_({},{})", s.n, s.m);
        same(
            &cell.series_trace,
            closed,
            K,
            &format!("{what} trace vs closed"),
        )?;
        same(
            &cell.series_trace,
            poly,
            K,
            &format!("{what} trace vs poly"),
        )?;
        let direct = eval_poly(&serre_poly(s.n, s.m).map_err(err)?, K);
        same(&direct, closed, K, &format!("{what} poly vs closed"))?;
    }
    Ok(())
}

fn leading_constant_check() -> Outcome {
    for (n, m) in GRID {
        let trace = serre_trace(params(n, m)?, 40).map_err(err)?;
        let got = trace.coeff(n as i64).map_err(err)?;
        let want = rat(15).pow(3 << m);
        ensure!(
            got == want,
            "({n},{m}): q^{n} coefficient {got}, expected 15^{}",
            3 << m
        );
        ensure!(
            leading_constant(n, m).map_err(err)? == want,
            "({n},{m}): leading_constant"
        );
        ensure!(
            trace.lead() == n as i64,
            "({n},{m}): series starts at q^{}",
            trace.lead()
        );
    }
    Ok(())
}

fn mlde_verification() -> Outcome {
    for n in 0..=3 {
        ensure!(
            verify_limit_mlde(n, 60).map_err(err)?,
            "limit MLDE fails for n = {n}"
        );
    }
    for (n, m) in GRID {
        let r = verify_serre_mlde(n, m, 60).map_err(err)?;
        ensure!(r.all(), "Serre MLDE ({n},{m}): {r:?}");
    }
    Ok(())
}

fn mlde_round_trip() -> Outcome {
    let k = 60;
    let f = &delta(k) * &serre_trace(params(1, 1)?, k).map_err(err)?;
    let out = mlde_search(&f, 36, 3, CoeffSpace::M, k).map_err(err)?;
    let found = out.found.ok_or("no MLDE found at degree 3")?;
    let expected = serre_mlde(1, 1).map_err(err)?;
    ensure!(
        found.coeffs() == expected.coeffs(),
        "coefficients differ: {:?}",
        found.coeffs()
    );
    let c1 = ModularPoly::monomial(
        Basis::E,
        [0, 1, 0],
        -(ratio(3, 4) + ratio(1, 4) + ratio(1, 18)),
    );
    ensure!(
        found.coeffs()[1] == c1,
        "E4 coefficient is not -(3/4 + 1/4 + 1/18) at t = 1"
    );
    let roots = indicial_roots(&found).roots;
    ensure!(
        roots == vec![rat(2), ratio(7, 2), rat(4)],
        "indicial roots {roots:?}"
    );
    Ok(())
}

fn character_isomorphism() -> Outcome {
    let g4 = ModularPoly::generator(Basis::G, 4);
    let g6 = ModularPoly::generator(Basis::G, 6);
    for r in 0..=6 {
        for s in 0..=(6 - r) {
            let chi = character_of(&alpha_square(r).mul(&beta_square(s))).map_err(err)?;
            ensure!(
                chi == g4.pow(r).mul(&g6.pow(s)),
                "F(alpha_{r} beta_{s}) = {chi}"
            );
        }
    }
    for r in 1..=5u32 {
        let count = pair_partitions(&vec![2; 2 * r as usize]).len();
        let want = double_factorial(2 * r as i64 - 1).map_err(err)?;
        ensure!(BigInt::from(count) == want, "r = {r}: {count} matchings");
    }
    Ok(())
}

fn valuation_lemmas() -> Outcome {
    for r in 2..=5i64 {
        for s in 2..=5i64 {
            let v = SigmaPoly::alpha_beta(r as u32, s as u32).state_val2();
            ensure!(
                v == Val2::Finite(-4 * r - 3 * s),
                "val2(alpha_{r} beta_{s}) = {v}"
            );
        }
    }
    for (n, m) in GRID {
        coeff_val_bounds(n, m).map_err(err)?;
    }
    Ok(())
}

fn certificate() -> Outcome {
    let cells = overconvergence_certificate(2, 3).map_err(err)?;
    ensure!(
        cells.len() == 5,
        "expected 5 grid cells, got {}",
        cells.len()
    );
    for c in &cells {
        ensure!(c.character_matches, "({},{}): character mismatch", c.n, c.m);
        ensure!(
            matches!(c.slack, Some(s) if s >= 0),
            "({},{}): slack {:?}",
            c.n,
            c.m,
            c.slack
        );
    }
    Ok(())
}

fn convergence() -> Outcome {
    for n in 1..=2 {
        let rows = convergence_report(n, 3, 40).map_err(err)?;
        ensure!(
            rows.iter().all(|r| r.to_limit.value.finite().is_some()) && strictly_increasing(&rows),
            "series n = {n}: {rows:?}"
        );
        let rows = cauchy_report(n, 3).map_err(err)?;
        ensure!(
            rows.iter().all(|r| r.step_val2.finite().is_some()) && steps_strictly_increasing(&rows),
            "states n = {n}: {rows:?}"
        );
        ensure!(
            rows.iter()
                .all(|r| r.rescaling_ok && r.vacuum_coeff_ok && r.h1_squared_coeff_ok),
            "states n = {n}: coefficient checks {rows:?}"
        );
    }
    Ok(())
}

fn odd_prime() -> Outcome {
    let k = 80;
    let f = serre_trace(SerreParams::new(3, 1, 1).map_err(err)?, k).map_err(err)?;
    for t in 1..=3 {
        let out = mlde_search(&f, 36, t, CoeffSpace::MPrime, k).map_err(err)?;
        ensure!(out.found.is_none(), "degree {t}: found {:?}", out.found);
        ensure!(
            out.nonmonic_nullity == 0,
            "degree {t}: non-monic kernel {}",
            out.nonmonic_nullity
        );
    }
    Ok(())
}

fn hermite() -> Outcome {
    for r in 0..=8 {
        ensure!(alpha_closed_form(r) == alpha_state(r), "r = {r}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("identity suite through K = 300", identities),
        ("U_p laws through K = 300", u_p_laws),
        ("three-way agreement through K = 60", three_way),
        ("leading constant 15^(3*2^m)", leading_constant_check),
        ("limit and Serre MLDE verification", mlde_verification),
        ("MLDE search round trip and indicial roots", mlde_round_trip),
        (
            "character isomorphism and matching counts",
            character_isomorphism,
        ),
        ("valuation lemmas", valuation_lemmas),
        ("overconvergence certificate n <= 2, m <= 3", certificate),
        ("convergence and Cauchy diagnostics", convergence),
        ("odd-prime MLDE search", odd_prime),
        ("Hermite closed form r <= 8", hermite),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or("panic".into()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({ms} ms)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({ms} ms): {e}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

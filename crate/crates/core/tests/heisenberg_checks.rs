use hauptmodul::heisenberg::preimage::rescaling_coefficient;
use hauptmodul::heisenberg::*;
use hauptmodul::modforms::{eval_poly, Basis, ModularPoly};
use hauptmodul::numkernel::{val2, Val2};
use hauptmodul::serreseq::{coeff_val_bounds, serre_poly, serre_trace, SerreParams};

fn g4_g6(r: u32, s: u32) -> ModularPoly {
    ModularPoly::generator(Basis::G, 4)
        .pow(r)
        .mul(&ModularPoly::generator(Basis::G, 6).pow(s))
}

#[test]
fn character_is_multiplicative_on_alpha_beta() {
    for r in 0..=6 {
        for s in 0..=(6 - r) {
            let v = alpha_square(r).mul(&beta_square(s));
            assert_eq!(character_of(&v).unwrap(), g4_g6(r, s), "({r},{s})");
            let separately = character_of(&alpha_square(r))
                .unwrap()
                .mul(&character_of(&beta_square(s)).unwrap());
            assert_eq!(separately, g4_g6(r, s));
        }
    }
}

#[test]
fn alpha_beta_valuations_are_exact() {
    for r in 2..=5i64 {
        for s in 2..=5i64 {
            let v = SigmaPoly::alpha_beta(r as u32, s as u32).state_val2();
            assert_eq!(v, Val2::Finite(-4 * r - 3 * s), "({r},{s})");
        }
    }
    assert_eq!(
        state_mul(&alpha_state(3), &beta_state(2)).val2(),
        Val2::Finite(-18)
    );
}

#[test]
fn hermite_closed_form_matches_iteration() {
    for r in 0..=8 {
        assert_eq!(alpha_closed_form(r), alpha_state(r), "r = {r}");
    }
    assert_eq!(
        val2(&alpha_closed_form(3).coeff(&Monomial::vacuum())),
        Val2::Finite(-12)
    );
}

#[test]
fn odd_cardinality_maps_to_zero() {
    for phi in [vec![2], vec![3], vec![2, 2, 3], vec![1, 2, 3, 4, 5]] {
        assert!(character_mt(&phi).is_zero(), "{phi:?}");
    }
}

#[test]
fn v11_character_is_serre_trace() {
    let k = 40;
    let chi = character_of(&v_square(1, 1).unwrap()).unwrap();
    let trace = serre_trace(SerreParams::two(1, 1).unwrap(), k).unwrap();
    assert!(eval_poly(&chi, k).eq_through(&trace, k).unwrap());
}

#[test]
fn v_state_has_square_bracket_weight() {
    for (n, m) in [(1, 1), (1, 2), (3, 2)] {
        assert_eq!(v_square(n, m).unwrap().weight(), Some(12 << m));
    }
    assert!(state_val2(&v_state(2, 2).unwrap()) >= Val2::Finite(-12));
}

#[test]
fn certificate_on_grid() {
    let cells = overconvergence_certificate(2, 3).unwrap();
    assert_eq!(cells.len(), 5);
    for c in &cells {
        assert!(c.character_matches);
        assert!(c.slack.unwrap() >= 0, "{c:?}");
        assert_eq!(
            character_of(&v_square(c.n, c.m).unwrap()).unwrap(),
            serre_poly(c.n, c.m).unwrap()
        );
        let n = c.n as i64;
        let second = c.per_i.iter().filter(|r| r.i as i64 > n);
        assert_eq!(second.map(|r| r.regime_bound).min(), Some(-6 * n + 2));
    }
    assert!(coeff_val_bounds(1, 1).is_ok());
}

#[test]
fn certificate_rejects_out_of_grid() {
    assert!(certify_cell(2, 1).is_err());
}

#[test]
fn cauchy_diagnostics() {
    let rows = cauchy_report(1, 3).unwrap();
    assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert!(steps_strictly_increasing(&rows), "{rows:?}");
    assert!(rows
        .iter()
        .all(|r| r.rescaling_ok && r.vacuum_coeff_ok && r.h1_squared_coeff_ok));
    let rows = cauchy_report(2, 3).unwrap();
    assert_eq!(rows[0].m, 2);
    assert!(steps_strictly_increasing(&rows), "{rows:?}");
    for m in 1..=3 {
        for i in 0..=(1 << m) {
            assert_eq!(val2(&rescaling_coefficient(m, i)), Val2::Finite(0));
        }
    }
}

#[test]
fn state_json_round_trip() {
    let v = v_state(1, 1).unwrap();
    let text = serde_json::to_string(&v.to_json()).unwrap();
    let back: Vec<StateTermJson> = serde_json::from_str(&text).unwrap();
    assert_eq!(HeisenbergState::from_json(&back).unwrap(), v);
}

use hauptmodul::mlde::*;
use hauptmodul::modforms::{delta, Basis, ModularPoly};
use hauptmodul::numkernel::{rat, ratio};
use hauptmodul::serreseq::{serre_trace, SerreParams};

const GRID: [(u32, u32); 7] = [(1, 1), (1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3)];

#[test]
fn limit_mlde_n_up_to_three() {
    for n in 0..=3 {
        assert!(verify_limit_mlde(n, 60).unwrap(), "n = {n}");
        assert!(limit_consistency(n.max(1)));
    }
}

#[test]
fn serre_mlde_full_grid() {
    for (n, m) in GRID {
        let r = verify_serre_mlde(n, m, 60).unwrap();
        assert!(r.all(), "({n},{m}): {r:?}");
    }
}

#[test]
fn search_recovers_serre_mlde() {
    let k = 60;
    let f = &delta(k) * &serre_trace(SerreParams::two(1, 1).unwrap(), k).unwrap();
    let out = mlde_search(&f, 36, 3, CoeffSpace::M, k).unwrap();
    let l = out.found.clone().expect("MLDE found");
    assert_eq!(
        l,
        Mlde::new(
            36,
            serre_mlde(1, 1).unwrap().coeffs().to_vec(),
            Provenance::Searched
        )
        .unwrap()
    );
    assert_eq!(
        l.coeffs()[1],
        ModularPoly::monomial(Basis::E, [0, 1, 0], ratio(-19, 18))
    );
    assert_eq!(indicial_roots(&l).roots, vec![rat(2), ratio(7, 2), rat(4)]);
    // determinism
    let again = mlde_search(&f, 36, 3, CoeffSpace::M, k).unwrap();
    assert_eq!(again, out);
}

#[test]
fn odd_prime_has_no_low_degree_mlde() {
    let k = 80;
    let f = serre_trace(SerreParams::new(3, 1, 1).unwrap(), k).unwrap();
    for t in 1..=3 {
        let out = mlde_search(&f, 36, t, CoeffSpace::MPrime, k).unwrap();
        assert!(out.found.is_none(), "t = {t}: {:?}", out.found);
        assert_eq!(out.nonmonic_nullity, 0, "t = {t}");
    }
}

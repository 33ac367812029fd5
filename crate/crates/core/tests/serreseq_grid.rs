use hauptmodul::numkernel::Val2;
use hauptmodul::serreseq::*;

fn grid() -> Vec<SerreParams> {
    let mut out = Vec::new();
    for m in 1..=3 {
        for n in 1..=3u32 {
            if (n as i64) < 1 << m {
                out.push(SerreParams::two(n, m).unwrap());
            }
        }
    }
    out
}

#[test]
fn three_way_agreement_on_grid() {
    let params = grid();
    for (s, cell) in params.iter().zip(compute_grid(&params, 60)) {
        let cell = cell.unwrap_or_else(|e| panic!("{s:?}: {e}"));
        assert_eq!(
            cell.diagnostics.leading_matches_closed_constant,
            Some(true),
            "{s:?}"
        );
        assert_eq!(cell.poly_g.as_ref().unwrap().weight(), 12 << s.m);
        assert!(cell
            .coeffs_c
            .as_ref()
            .unwrap()
            .iter()
            .all(|c| c.is_integer()));
    }
}

#[test]
fn general_trace_agrees_with_simplified() {
    for (n, m) in [(1, 1), (1, 2), (2, 2), (3, 2)] {
        let s = SerreParams::two(n, m).unwrap();
        let a = serre_trace_with(s, TraceVariant::General, 25).unwrap();
        let b = serre_trace_with(s, TraceVariant::Simplified, 25).unwrap();
        assert_eq!(a.first_difference(&b, 25).unwrap(), None, "{s:?}");
    }
}

#[test]
fn convergence_n1() {
    let rows = convergence_report(1, 4, 40).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0].to_limit.value, Val2::Finite(5));
    assert!(strictly_increasing(&rows), "{rows:?}");
}

#[test]
fn convergence_n2() {
    let rows = convergence_report(2, 3, 40).unwrap();
    assert_eq!(rows[0].m, 2);
    assert!(matches!(rows[0].to_limit.value, Val2::Finite(v) if v > 0));
    assert!(strictly_increasing(&rows), "{rows:?}");
}

#[test]
fn odd_prime_report_runs() {
    let rows = padic_report(3, 1, 2, 12).unwrap();
    assert!(rows.iter().all(|r| r.lead >= 1));
}

//! Fraction-free (Bareiss) elimination over the integers for exact rational
//! linear systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Rat>),
    Inconsistent,
    /// Positive-dimensional solution set: `particular + span(kernel)`. The
    /// particular solution sets every free variable to zero.
    Family {
        particular: Vec<Rat>,
        kernel: Vec<Vec<Rat>>,
    },
}

impl LinearSolution {
    pub fn particular(&self) -> Option<&[Rat]> {
        match self {
            LinearSolution::Unique(x) => Some(x),
            LinearSolution::Family { particular, .. } => Some(particular),
            LinearSolution::Inconsistent => None,
        }
    }
}

/// Row-echelon form of an integer matrix produced by Bareiss elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn integer_row(row: &[Rat]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Eliminates over the first `ncols` columns; any further columns are carried
/// along (the augmented right-hand side).
fn bareiss(mut m: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let nrows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, below) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in below.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..width {
                let v = pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: m, pivots }
}

/// Rank of a rational matrix.
pub fn rank(a: &[Vec<Rat>]) -> usize {
    let ncols = a.first().map_or(0, Vec::len);
    let m: Vec<_> = a.iter().map(|r| integer_row(r)).collect();
    bareiss(m, ncols).pivots.len()
}

/// Basis of the right kernel `{x : A x = 0}`.
pub fn kernel(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let ncols = a.first().map_or(0, Vec::len);
    let zeros = vec![Rat::zero(); a.len()];
    match solve_exact(a, &zeros) {
        Ok(LinearSolution::Family { kernel, .. }) => kernel,
        Ok(_) => Vec::new(),
        Err(_) => unreachable!("kernel of a {}-column matrix", ncols),
    }
}

fn back_substitute(
    ech: &Echelon,
    ncols: usize,
    rhs: impl Fn(usize) -> Rat,
    free: Option<usize>,
) -> Vec<Rat> {
    let mut x = vec![Rat::zero(); ncols];
    if let Some(f) = free {
        x[f] = Rat::one();
    }
    for (k, &pc) in ech.pivots.iter().enumerate().rev() {
        let row = &ech.rows[k];
        let mut acc = rhs(k);
        for j in pc + 1..ncols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= Rat::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[pc] = acc / Rat::from_integer(row[pc].clone());
    }
    x
}

/// Solves `A x = b` exactly.
pub fn solve_exact(a: &[Vec<Rat>], b: &[Rat]) -> Result<LinearSolution> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows but {} right-hand sides",
            a.len(),
            b.len()
        )));
    }
    let ncols = a.first().map_or(0, Vec::len);
    if let Some(bad) = a.iter().position(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch(format!(
            "row {bad} has {} columns, expected {ncols}",
            a[bad].len()
        )));
    }
    let aug: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut full = row.clone();
            full.push(rhs.clone());
            integer_row(&full)
        })
        .collect();
    let ech = bareiss(aug, ncols);
    let rank = ech.pivots.len();
    if ech.rows[rank..].iter().any(|row| !row[ncols].is_zero()) {
        return Ok(LinearSolution::Inconsistent);
    }
    let rhs = |k: usize| Rat::from_integer(ech.rows[k][ncols].clone());
    let particular = back_substitute(&ech, ncols, rhs, None);
    if rank == ncols {
        return Ok(LinearSolution::Unique(particular));
    }
    let kernel = (0..ncols)
        .filter(|c| !ech.pivots.contains(c))
        .map(|f| back_substitute(&ech, ncols, |_| Rat::zero(), Some(f)))
        .collect();
    Ok(LinearSolution::Family { particular, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{rat, ratio};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    fn apply(a: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
        a.iter()
            .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(
            solve_exact(&m(&[&[1]]), &[rat(3)]).unwrap(),
            LinearSolution::Unique(vec![rat(3)])
        );
        assert_eq!(
            solve_exact(&m(&[&[1, 1], &[1, 1]]), &[rat(1), rat(2)]).unwrap(),
            LinearSolution::Inconsistent
        );
        assert_eq!(
            solve_exact(&m(&[&[2, 0], &[0, 4]]), &[rat(1), rat(1)]).unwrap(),
            LinearSolution::Unique(vec![ratio(1, 2), ratio(1, 4)])
        );
    }

    #[test]
    fn dimension_mismatch() {
        assert!(solve_exact(&m(&[&[1, 2]]), &[rat(1), rat(2)]).is_err());
        assert!(solve_exact(&[vec![rat(1)], vec![rat(1), rat(2)]], &[rat(1), rat(2)]).is_err());
    }

    #[test]
    fn family_has_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let b = [rat(1), rat(2)];
        let LinearSolution::Family { particular, kernel } = solve_exact(&a, &b).unwrap() else {
            panic!("expected a family");
        };
        assert_eq!(apply(&a, &particular), b.to_vec());
        assert_eq!(kernel.len(), 2);
        for k in &kernel {
            assert!(apply(&a, k).iter().all(Zero::is_zero));
        }
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn skipped_column_then_pivot() {
        // column 0 is zero; elimination must continue on column 1
        let a = m(&[&[0, 2, 1], &[0, 4, 3], &[0, 0, 5]]);
        let b = [rat(3), rat(7), rat(5)];
        let sol = solve_exact(&a, &b).unwrap();
        let x = sol.particular().unwrap();
        assert_eq!(apply(&a, x), b.to_vec());
    }

    proptest! {
        #[test]
        fn solutions_satisfy_system(
            entries in proptest::collection::vec(-6i64..6, 12),
            denoms in proptest::collection::vec(1i64..5, 12),
            rhs in proptest::collection::vec(-9i64..9, 4),
        ) {
            let a: Vec<Vec<Rat>> = (0..4)
                .map(|i| (0..3).map(|j| ratio(entries[3 * i + j], denoms[3 * i + j])).collect())
                .collect();
            let b: Vec<Rat> = rhs.iter().map(|&x| rat(x)).collect();
            match solve_exact(&a, &b).unwrap() {
                LinearSolution::Unique(x) => prop_assert_eq!(apply(&a, &x), b),
                LinearSolution::Family { particular, kernel } => {
                    prop_assert_eq!(apply(&a, &particular), b);
                    for k in kernel {
                        prop_assert!(apply(&a, &k).iter().all(Zero::is_zero));
                    }
                }
                LinearSolution::Inconsistent => prop_assert!(rank(&a) < 4),
            }
        }
    }
}

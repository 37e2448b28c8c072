#![allow(dead_code)]

use evenlat::{IntMatrix, Lattice, Matrix};
use num_bigint::BigInt;
use proptest::prelude::*;

/// Unimodular matrix from a list of elementary operations `(i, j, c)`: column `j += c·col i`.
pub fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut m = IntMatrix::identity(n).to_rows();
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for row in m.iter_mut() {
            let t = &row[i] * BigInt::from(c);
            row[j] += t;
        }
    }
    Matrix::from_rows(m)
}

pub fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    proptest::collection::vec((0usize..8, 0usize..8, -2i64..=2), 0..12)
}

/// Symmetric integer matrix with even diagonal; may be degenerate or indefinite.
pub fn even_symmetric(max_rank: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rank).prop_flat_map(move |n| {
        (
            proptest::collection::vec(-bound / 2..=bound / 2, n),
            proptest::collection::vec(-bound..=bound, n * n),
        )
            .prop_map(move |(d, off)| {
                let mut rows = vec![vec![BigInt::from(0); n]; n];
                for i in 0..n {
                    rows[i][i] = BigInt::from(2 * d[i]);
                    for j in 0..i {
                        rows[i][j] = BigInt::from(off[i * n + j]);
                        rows[j][i] = BigInt::from(off[i * n + j]);
                    }
                }
                Matrix::from_rows(rows)
            })
    })
}

/// Nondegenerate even lattice of rank at most `max_rank`.
pub fn even_lattice(max_rank: usize, bound: i64) -> impl Strategy<Value = Lattice> {
    even_symmetric(max_rank, bound).prop_filter_map("degenerate", |g| Lattice::new(g).ok())
}

/// Positive definite even lattice, diagonally dominant so that generation never stalls.
pub fn positive_even_lattice(max_rank: usize) -> impl Strategy<Value = Lattice> {
    (1..=max_rank).prop_flat_map(|n| {
        (proptest::collection::vec(1i64..=10, n), proptest::collection::vec(-3i64..=3, n * n)).prop_filter_map(
            "not positive definite",
            move |(d, off)| {
                let mut rows = vec![vec![0i64; n]; n];
                for i in 0..n {
                    rows[i][i] = 2 * d[i];
                    for j in 0..i {
                        rows[i][j] = off[i * n + j];
                        rows[j][i] = off[i * n + j];
                    }
                }
                Lattice::from_rows(&rows).ok().filter(|l| l.is_positive_definite())
            },
        )
    })
}

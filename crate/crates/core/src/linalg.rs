//! Exact integer and rational linear algebra: Smith normal form, kernels, saturation,
//! determinants and inertia.

use std::ops::Div;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Ring};
use crate::{IntMatrix, RatMatrix};

/// Smith normal form `U·M·V = D` together with the inverses of the transforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfResult {
    /// Diagonal entries `d_1 | d_2 | …`, including zeros, of length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

struct SnfWork {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

fn ident(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

fn axpy(dst: &mut [BigInt], src: &[BigInt], c: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += c * s;
        }
    }
}

fn split_pair<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &T) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &lo[j])
    }
}

impl SnfWork {
    /// row[dst] += c·row[src]
    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        let (d, s) = split_pair(&mut self.a, dst, src);
        axpy(d, s, c);
        let (d, s) = split_pair(&mut self.u, dst, src);
        axpy(d, s, c);
        let neg = -c;
        for row in &mut self.u_inv {
            let t = &row[dst] * &neg;
            row[src] += t;
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    fn row_negate(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -&*x;
        }
        for row in &mut self.u_inv {
            row[i] = -&row[i];
        }
    }

    /// col[dst] += c·col[src]
    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            if !row[src].is_zero() {
                let t = &row[src] * c;
                row[dst] += t;
            }
        }
        let neg = -c;
        let (s, d) = split_pair(&mut self.v_inv, src, dst);
        axpy(s, d, &neg);
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }
}

/// Smith normal form with minimal-absolute-value pivoting. Total on all integer matrices.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (r, c) = (m.rows(), m.cols());
    let mut w = SnfWork { a: m.to_rows(), u: ident(r), u_inv: ident(r), v: ident(c), v_inv: ident(c) };
    for t in 0..r.min(c) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = &w.a[i][j];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.row_swap(t, pi);
        w.col_swap(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    if !q.is_zero() {
                        w.row_add(i, t, &-q);
                    }
                    clean &= w.a[i][t].is_zero();
                }
            }
            for j in t + 1..c {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    if !q.is_zero() {
                        w.col_add(j, t, &-q);
                    }
                    clean &= w.a[t][j].is_zero();
                }
            }
            if !clean {
                let mut best = (t, t);
                for i in t + 1..r {
                    if !w.a[i][t].is_zero() && w.a[i][t].abs() < w.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..c {
                    if !w.a[t][j].is_zero() && w.a[t][j].abs() < w.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                w.row_swap(t, best.0);
                w.col_swap(t, best.1);
                continue;
            }
            let p = w.a[t][t].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => w.row_add(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.row_negate(t);
        }
    }
    SnfResult {
        u: Matrix::from_rows(w.u),
        d: Matrix::from_rows(w.a),
        v: Matrix::from_rows(w.v),
        u_inv: Matrix::from_rows(w.u_inv),
        v_inv: Matrix::from_rows(w.v_inv),
    }
}

/// Basis (as columns) of the integer kernel `{x : M·x = 0}`. The basis is saturated.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    snf.v.col_range(snf.rank(), m.cols())
}

/// Primitive closure of the column span: a basis of `span_Q(X) ∩ Zⁿ`.
pub fn saturate_columns(x: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(x);
    snf.u_inv.col_range(0, snf.rank())
}

/// A basis of the Z-span of the columns of `x`.
pub fn span_basis(x: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(x);
    let d = snf.diagonal();
    let cols: Vec<Vec<BigInt>> =
        (0..snf.rank()).map(|i| snf.u_inv.col(i).into_iter().map(|e| e * &d[i]).collect()).collect();
    Matrix::from_cols(x.rows(), &cols)
}

pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare);
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] })
}

/// Inverse over a field; `None` if singular.
pub fn inverse<T>(m: &Matrix<T>) -> Option<Matrix<T>>
where
    T: Ring + Div<Output = T>,
{
    assert!(m.is_square(), "inverse of a non-square matrix");
    let n = m.rows();
    let mut a = m.hstack(&Matrix::identity(n)).to_rows();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        let piv = a[k][k].clone();
        for x in a[k].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in 0..2 * n {
                    let t = a[k][j].clone() * f.clone();
                    a[i][j] = a[i][j].clone() - t;
                }
            }
        }
    }
    Some(Matrix::from_rows(a.into_iter().map(|row| row[n..].to_vec()).collect()))
}

pub fn rational_inverse(m: &IntMatrix) -> Option<RatMatrix> {
    inverse(&m.to_rational())
}

/// Numbers of positive, negative and zero squares of a symmetric integer matrix,
/// by rational congruence diagonalization.
pub fn inertia(g: &IntMatrix) -> Result<(usize, usize, usize)> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let diag = congruence_diagonal(&g.to_rational());
    let pos = diag.iter().filter(|x| x.is_positive()).count();
    let neg = diag.iter().filter(|x| x.is_negative()).count();
    Ok((pos, neg, diag.len() - pos - neg))
}

/// Diagonal of a congruent diagonal form of a symmetric rational matrix.
pub fn congruence_diagonal(g: &RatMatrix) -> Vec<BigRational> {
    let n = g.rows();
    let mut a = g.to_rows();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(k, i);
                for row in a.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some((i, j)) =
                (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
            {
                // e_i ← e_i + e_j gives a nonzero diagonal entry 2·a_ij.
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[i][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][i] += t;
                }
                a.swap(k, i);
                for row in a.iter_mut() {
                    row.swap(k, i);
                }
            } else {
                out.extend(std::iter::repeat_n(BigRational::zero(), n - k));
                return out;
            }
        }
        let p = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let t = &a[k][j] * &f;
                a[i][j] -= t;
            }
            for r in k..n {
                let t = &a[r][k] * &f;
                a[r][i] -= t;
            }
        }
        out.push(p);
    }
    out
}

/// LLL reduction (δ = 3/4) of a positive definite Gram matrix in exact arithmetic.
///
/// Returns the reduced Gram matrix `UᵀGU` and the unimodular `U` whose columns are the new
/// basis vectors in old coordinates.
pub fn lll_gram(g: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = g.rows();
    let mut gram = g.to_rows();
    let mut basis = IntMatrix::identity(n).to_cols();
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let (mut mu, mut bn) = gram_schmidt(&gram)?;
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = round(&mu[k][j]);
            if r.is_zero() {
                continue;
            }
            for l in 0..n {
                let t = &r * &gram[l][j];
                gram[l][k] -= t;
            }
            for l in 0..n {
                let t = &r * &gram[j][l];
                gram[k][l] -= t;
            }
            for l in 0..n {
                let t = &r * &basis[j][l];
                basis[k][l] -= t;
            }
            let rq = BigRational::from_integer(r);
            for l in 0..j {
                let t = &rq * &mu[j][l];
                mu[k][l] -= t;
            }
            mu[k][j] -= &rq;
        }
        let lhs = &bn[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bn[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            gram.swap(k, k - 1);
            for row in gram.iter_mut() {
                row.swap(k, k - 1);
            }
            (mu, bn) = gram_schmidt(&gram)?;
            k = (k - 1).max(1);
        }
    }
    Ok((Matrix::from_rows(gram), Matrix::from_cols(n, &basis)))
}

/// Gram–Schmidt coefficients and squared lengths from a Gram matrix. Fails unless positive definite.
fn gram_schmidt(g: &[Vec<BigInt>]) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let n = g.len();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut bn: Vec<BigRational> = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..i {
            let mut s = BigRational::from_integer(g[i][j].clone());
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &bn[k];
            }
            mu[i][j] = s / &bn[j];
        }
        let mut s = BigRational::from_integer(g[i][i].clone());
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &bn[k];
        }
        if !s.is_positive() {
            return Err(Error::Indefinite);
        }
        bn.push(s);
    }
    Ok((mu, bn))
}

/// Nearest integer, halves rounded up.
pub(crate) fn round(x: &BigRational) -> BigInt {
    (x + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

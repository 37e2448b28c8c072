//! p-adic Jordan splitting of rational symmetric matrices by valuation pivoting.
//!
//! The same routine handles integral Gram matrices (blocks at scales `p^k`, `k ≥ 0`) and the
//! value matrices of finite quadratic forms, whose entries are only defined modulo `Z_(p)`
//! (off-diagonal) and `2Z_(p)` (diagonal); in the latter mode entries are reduced after every
//! elimination step and blocks come out at negative valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::RatMatrix;

/// How entries are interpreted during elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact rational entries of a lattice Gram matrix.
    Lattice,
    /// Entries of a finite quadratic form: off-diagonal mod `Z_(p)`, diagonal mod `2Z_(p)`.
    FiniteForm,
}

/// One orthogonal block: `p^k · unit`, where `unit` is 1×1 or 2×2 with unit determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub k: i64,
    pub unit: Vec<Vec<BigRational>>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.unit.len()
    }

    pub fn det(&self) -> BigRational {
        match self.size() {
            1 => self.unit[0][0].clone(),
            _ => &self.unit[0][0] * &self.unit[1][1] - &self.unit[0][1] * &self.unit[1][0],
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime divisors in ascending order.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let bd = BigInt::from(d);
        if n.is_multiple_of(&bd) {
            out.push(d);
            while n.is_multiple_of(&bd) {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor exceeds u64"));
    }
    out
}

/// `v_p(n)` for nonzero `n`.
pub fn val_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero");
    let bp = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while n.is_multiple_of(&bp) {
        n /= &bp;
        v += 1;
    }
    v
}

/// `v_p(x)`, or `None` for zero.
pub fn val(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(val_int(x.numer(), p) - val_int(x.denom(), p))
    }
}

/// Residue of a p-adic unit `x` modulo `m` (with `gcd(m, p) = 1` for the denominator).
pub fn unit_residue(x: &BigRational, m: u64) -> u64 {
    let bm = BigInt::from(m);
    let inv = mod_inverse(&x.denom().mod_floor(&bm), &bm).expect("denominator not invertible");
    (x.numer() * inv).mod_floor(&bm).to_u64().unwrap()
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p` and `p ∤ a`.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let bp = BigInt::from(p);
    let a = a.mod_floor(&bp);
    assert!(!a.is_zero(), "legendre symbol of a multiple of p");
    let r = a.modpow(&BigInt::from((p - 1) / 2), &bp);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Legendre symbol of a p-adic unit given as a rational.
pub fn legendre_rat(x: &BigRational, p: u64) -> i8 {
    legendre(x.numer(), p) * legendre(x.denom(), p)
}

/// Reduces `x` modulo `m·Z_(p)` to a canonical `r / p^s` with `0 ≤ r < m·p^s`.
fn reduce_mod(x: &BigRational, p: u64, m: u64) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let s = val_int(x.denom(), p).max(0);
    let ps = BigInt::from(p).pow(s as u32);
    let other = x.denom() / &ps;
    let modulus = &ps * BigInt::from(m);
    let inv = mod_inverse(&other.mod_floor(&modulus), &modulus).expect("unit denominator");
    let r = (x.numer() * inv).mod_floor(&modulus);
    BigRational::new(r, ps)
}

fn reduce_all(a: &mut [Vec<BigRational>], p: u64) {
    let n = a.len();
    for i in 0..n {
        for j in 0..n {
            let m = if i == j && p == 2 { 2 } else { 1 };
            a[i][j] = reduce_mod(&a[i][j], p, m);
        }
    }
}

/// Jordan splitting of a symmetric rational matrix at the prime `p`.
///
/// Blocks are returned in elimination order; callers group them by `k`. In
/// [`Mode::FiniteForm`], elimination stops once every remaining entry vanishes modulo the
/// integers.
pub fn jordan_blocks(m: &RatMatrix, p: u64, mode: Mode) -> Vec<Block> {
    let mut a = m.to_rows();
    let mut out = Vec::new();
    loop {
        if mode == Mode::FiniteForm {
            reduce_all(&mut a, p);
        }
        let n = a.len();
        if n == 0 {
            break;
        }
        let mut min_diag: Option<(i64, usize)> = None;
        let mut min_off: Option<(i64, usize, usize)> = None;
        for i in 0..n {
            if let Some(v) = val(&a[i][i], p) {
                if min_diag.is_none_or(|(w, _)| v < w) {
                    min_diag = Some((v, i));
                }
            }
            for j in i + 1..n {
                if let Some(v) = val(&a[i][j], p) {
                    if min_off.is_none_or(|(w, _, _)| v < w) {
                        min_off = Some((v, i, j));
                    }
                }
            }
        }
        let vd = min_diag.map(|t| t.0);
        let vo = min_off.map(|t| t.0);
        let vmin = match (vd, vo) {
            (None, None) => break,
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (Some(x), Some(y)) => x.min(y),
        };
        if mode == Mode::FiniteForm && vmin >= 0 {
            break;
        }
        let idx: Vec<usize> = if vd == Some(vmin) {
            vec![min_diag.unwrap().1]
        } else {
            let (_, i, j) = min_off.unwrap();
            if p == 2 {
                vec![i, j]
            } else {
                // e_i ← e_i + e_j makes the diagonal entry attain the minimal valuation.
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[i][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][i] += t;
                }
                vec![i]
            }
        };
        let rest: Vec<usize> = (0..n).filter(|x| !idx.contains(x)).collect();
        let block: Vec<Vec<BigRational>> =
            idx.iter().map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect()).collect();
        let binv = invert_small(&block);
        let mut next = vec![vec![BigRational::zero(); rest.len()]; rest.len()];
        for (r, &ri) in rest.iter().enumerate() {
            for (c, &ci) in rest.iter().enumerate() {
                let mut v = a[ri][ci].clone();
                for (s, &si) in idx.iter().enumerate() {
                    for (t, &ti) in idx.iter().enumerate() {
                        v -= &a[ri][si] * &binv[s][t] * &a[ti][ci];
                    }
                }
                next[r][c] = v;
            }
        }
        let scale = pow_rat(p, vmin);
        let unit = block.iter().map(|row| row.iter().map(|x| x / &scale).collect()).collect();
        out.push(Block { k: vmin, unit });
        a = next;
    }
    out
}

fn pow_rat(p: u64, e: i64) -> BigRational {
    let b = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

fn invert_small(b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    match b.len() {
        1 => vec![vec![b[0][0].recip()]],
        2 => {
            let det = &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0];
            vec![
                vec![&b[1][1] / &det, -&b[0][1] / &det],
                vec![-&b[1][0] / &det, &b[0][0] / &det],
            ]
        }
        _ => unreachable!("blocks have size 1 or 2"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn valuations_and_residues() {
        assert_eq!(val(&r(12, 5), 2), Some(2));
        assert_eq!(val(&r(5, 12), 2), Some(-2));
        assert_eq!(val(&r(0, 1), 3), None);
        assert_eq!(unit_residue(&r(1, 3), 8), 3);
        assert_eq!(legendre(&BigInt::from(2), 3), -1);
        assert_eq!(legendre(&BigInt::from(4), 7), 1);
        assert_eq!(prime_divisors(&BigInt::from(-360)), vec![2, 3, 5]);
        assert!(is_prime(97) && !is_prime(91));
    }

    #[test]
    fn a2_at_three() {
        let g = Matrix::from_i64_rows(&[vec![2, -1], vec![-1, 2]]).to_rational();
        let blocks = jordan_blocks(&g, 3, Mode::Lattice);
        let ks: Vec<i64> = blocks.iter().map(|b| b.k).collect();
        assert_eq!(ks, vec![0, 1]);
        assert_eq!(legendre_rat(&blocks[0].det(), 3), -1);
    }

    #[test]
    fn hyperbolic_plane_at_two() {
        let g = Matrix::from_i64_rows(&[vec![0, 2], vec![2, 0]]).to_rational();
        let blocks = jordan_blocks(&g, 2, Mode::Lattice);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].k, 1);
        assert_eq!(blocks[0].size(), 2);
    }

    #[test]
    fn finite_form_reduction() {
        // u(2): values 0, 0 and pairing 1/2; the diagonal 2 must vanish modulo 2.
        let m = Matrix::from_rows(vec![vec![r(2, 1), r(3, 2)], vec![r(3, 2), r(0, 1)]]);
        let blocks = jordan_blocks(&m, 2, Mode::FiniteForm);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].k, -1);
        assert_eq!(unit_residue(&blocks[0].det(), 8), 7);
    }
}

//! Finite quadratic forms `q: A → Q/2Z` on finite abelian groups, with explicit isometry
//! search for small groups.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::frac_mod;
use crate::linalg::smith_normal_form;
use crate::matrix::Matrix;
use crate::padic::{is_prime, val_int};
use crate::{IntMatrix, RatMatrix};

/// A finite quadratic form on `⊕ Z/d_i` given by generator values.
///
/// `q[i] = q(g_i)` in `[0, 2)` and `b[i][j] = b(g_i, g_j)` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    orders: Vec<BigInt>,
    q: Vec<BigRational>,
    b: RatMatrix,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FiniteQuadraticForm {
    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: vec![], q: vec![], b: RatMatrix::zeros(0, 0) }
    }

    pub(crate) fn from_parts_unchecked(orders: Vec<BigInt>, q: Vec<BigRational>, b: RatMatrix) -> Self {
        FiniteQuadraticForm { orders, q, b }
    }

    /// Validates well-definedness and nondegeneracy, then re-presents the group with
    /// invariant factors `d_1 | d_2 | …`.
    pub fn new(orders: Vec<BigInt>, q: Vec<BigRational>, b: RatMatrix) -> Result<Self> {
        let n = orders.len();
        if q.len() != n || b.rows() != n || b.cols() != n {
            return Err(Error::Dimension("orders, q and b must agree in size".into()));
        }
        if orders.iter().any(|d| d <= &BigInt::one()) {
            return Err(Error::Invalid("generator orders must exceed 1".into()));
        }
        let q: Vec<BigRational> = q.iter().map(|x| frac_mod(x, 2)).collect();
        let b = b.map(|x| frac_mod(x, 1));
        for i in 0..n {
            let di = BigRational::from_integer(orders[i].clone());
            if !(&di * &di * &q[i] / rat(2, 1)).is_integer() {
                return Err(Error::Invalid(format!("q(g_{i}) is not well defined")));
            }
            if frac_mod(&q[i], 1) != *b.get(i, i) {
                return Err(Error::Invalid(format!("b(g_{i},g_{i}) differs from q(g_{i}) mod 1")));
            }
            for j in 0..n {
                if b.get(i, j) != b.get(j, i) {
                    return Err(Error::NotSymmetric);
                }
                if !(&di * b.get(i, j)).is_integer() {
                    return Err(Error::Invalid(format!("b(g_{i},g_{j}) is not well defined")));
                }
            }
        }
        let form = FiniteQuadraticForm { orders, q, b };
        if !form.is_nondegenerate() {
            return Err(Error::Degenerate);
        }
        Ok(form.normalized())
    }

    fn is_nondegenerate(&self) -> bool {
        // x ↦ (d_j·b(x, g_j) mod d_j)_j must be injective on ⊕ Z/d_i.
        let n = self.rank();
        let mut cols: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..n {
            cols.push((0..n).map(|j| (self.b.get(i, j) * BigRational::from_integer(self.orders[j].clone())).to_integer()).collect());
        }
        for j in 0..n {
            cols.push((0..n).map(|r| if r == j { self.orders[j].clone() } else { BigInt::zero() }).collect());
        }
        let m = Matrix::from_cols(n, &cols);
        let snf = smith_normal_form(&m);
        snf.rank() == n && snf.diagonal().iter().take(n).all(One::is_one)
    }

    /// Re-presents the group on invariant-factor generators, dropping trivial ones.
    pub fn normalized(&self) -> Self {
        let n = self.rank();
        let chain = self.orders.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if chain && self.orders.iter().all(|d| d > &BigInt::one()) {
            return self.clone();
        }
        let snf = smith_normal_form(&Matrix::diagonal(&self.orders));
        let d = snf.diagonal();
        let keep: Vec<usize> = (0..n).filter(|&i| !d[i].is_one()).collect();
        let gens: Vec<Vec<BigInt>> = keep.iter().map(|&i| snf.u_inv.col(i)).collect();
        let orders = keep.iter().map(|&i| d[i].clone()).collect();
        self.restrict(orders, &gens)
    }

    /// Form on new generators given as coordinate vectors, with their orders.
    fn restrict(&self, orders: Vec<BigInt>, gens: &[Vec<BigInt>]) -> Self {
        let m = gens.len();
        let q = gens.iter().map(|g| self.q_value(g)).collect();
        let mut b = RatMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                b.set(i, j, self.b_value_of(&gens[i], &gens[j]));
            }
        }
        FiniteQuadraticForm { orders, q, b }
    }

    /// Discriminant form `q_θ(p^k)` of the rank-one lattice `⟨θ·p^k⟩`.
    pub fn atom_q(p: u64, k: u32, theta: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || theta.rem_euclid(p as i64) == 0 {
            return Err(Error::Invalid("atom needs k ≥ 1 and θ prime to p".into()));
        }
        let pk = BigInt::from(p).pow(k);
        let mut num = BigInt::from(theta);
        if p != 2 && num.is_odd() {
            // For odd p the value is the unique lift of b(g,g) of order dividing p^k in Q/2Z.
            num += &pk;
        }
        let q = frac_mod(&BigRational::new(num, pk.clone()), 2);
        let b = RatMatrix::from_rows(vec![vec![frac_mod(&q, 1)]]);
        Ok(FiniteQuadraticForm { orders: vec![pk], q: vec![q], b })
    }

    /// `u(2^k)`: the discriminant form of the hyperbolic plane scaled by `2^k`.
    pub fn atom_u(k: u32) -> Self {
        Self::two_by_two(k, BigRational::zero())
    }

    /// `v(2^k)`: the discriminant form of `2^k·[[2,1],[1,2]]`, restricted to its 2-part.
    pub fn atom_v(k: u32) -> Self {
        let pk = BigInt::from(2).pow(k);
        Self::two_by_two(k, frac_mod(&BigRational::new(BigInt::from(2), pk), 2))
    }

    fn two_by_two(k: u32, diag: BigRational) -> Self {
        assert!(k >= 1, "u and v atoms need k ≥ 1");
        let pk = BigInt::from(2).pow(k);
        let off = BigRational::new(BigInt::one(), pk.clone());
        let dmod = frac_mod(&diag, 1);
        FiniteQuadraticForm {
            orders: vec![pk.clone(), pk],
            q: vec![diag.clone(), diag],
            b: RatMatrix::from_rows(vec![vec![dmod.clone(), off.clone()], vec![off, dmod]]),
        }
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn q_values(&self) -> &[BigRational] {
        &self.q
    }

    pub fn b_matrix(&self) -> &RatMatrix {
        &self.b
    }

    pub fn b_value(&self, i: usize, j: usize) -> BigRational {
        self.b.get(i, j).clone()
    }

    /// Number of generators (the length of the group).
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Group order `|A|`.
    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// `q(Σ x_i g_i)` in `[0, 2)`.
    pub fn q_value(&self, x: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.rank() {
            if x[i].is_zero() {
                continue;
            }
            let xi = BigRational::from_integer(x[i].clone());
            acc += &xi * &xi * &self.q[i];
            for j in i + 1..self.rank() {
                if !x[j].is_zero() {
                    acc += rat(2, 1) * &xi * BigRational::from_integer(x[j].clone()) * self.b.get(i, j);
                }
            }
        }
        frac_mod(&acc, 2)
    }

    /// `b(x, y)` in `[0, 1)`.
    pub fn b_value_of(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let xr: Vec<BigRational> = x.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        let yr: Vec<BigRational> = y.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        frac_mod(&self.b.bilinear(&xr, &yr), 1)
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders = self.orders.clone();
        orders.extend(other.orders.iter().cloned());
        let mut q = self.q.clone();
        q.extend(other.q.iter().cloned());
        FiniteQuadraticForm { orders, q, b: self.b.block_diag(&other.b) }.normalized()
    }

    /// `-q`.
    pub fn negate(&self) -> Self {
        FiniteQuadraticForm {
            orders: self.orders.clone(),
            q: self.q.iter().map(|x| frac_mod(&-x, 2)).collect(),
            b: self.b.map(|x| frac_mod(&-x, 1)),
        }
    }

    /// The p-primary part on generators `(d_i / p^{a_i})·g_i`.
    pub fn p_part(&self, p: u64) -> Self {
        let bp = BigInt::from(p);
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        for (i, d) in self.orders.iter().enumerate() {
            if d.is_multiple_of(&bp) {
                let pa = bp.pow(val_int(d, p) as u32);
                let mut g = vec![BigInt::zero(); self.rank()];
                g[i] = d / &pa;
                orders.push(pa);
                gens.push(g);
            }
        }
        self.restrict(orders, &gens)
    }

    /// Primes dividing the group order.
    pub fn primes(&self) -> Vec<u64> {
        crate::padic::prime_divisors(&self.order())
    }

    /// Value matrix: `q(g_i)` on the diagonal and `b(g_i, g_j)` off it.
    pub fn value_matrix(&self) -> RatMatrix {
        let n = self.rank();
        let mut m = self.b.clone();
        for i in 0..n {
            m.set(i, i, self.q[i].clone());
        }
        m
    }

    /// Compact machine-integer representation, if `|A|` is at most `budget`.
    pub fn to_small(&self, budget: u64) -> Result<SmallForm> {
        let size = self.order();
        if size > BigInt::from(budget) {
            return Err(Error::Budget(budget));
        }
        let orders: Vec<u64> = self.orders.iter().map(|d| d.to_u64().unwrap()).collect();
        let n = orders.last().copied().unwrap_or(1);
        let nb = BigRational::from_integer(BigInt::from(n));
        let q = self.q.iter().map(|x| (x * &nb).to_integer().to_u64().unwrap()).collect();
        let r = self.rank();
        let b = (0..r)
            .map(|i| (0..r).map(|j| (self.b.get(i, j) * &nb).to_integer().to_u64().unwrap()).collect())
            .collect();
        Ok(SmallForm::new(orders, n, q, b))
    }
}

/// Finite quadratic form with values scaled to machine integers: `q·N mod 2N`, `b·N mod N`,
/// where `N` is the exponent. Elements are indexed in mixed radix, last coordinate fastest.
#[derive(Clone, Debug)]
pub struct SmallForm {
    orders: Vec<u64>,
    n: u64,
    size: usize,
    elem_q: Vec<u64>,
    // elem_b[x * r + j] = b(x, g_j)·N mod N
    elem_b: Vec<u64>,
    elem_ord: Vec<u64>,
    gen_q: Vec<u64>,
    gen_b: Vec<Vec<u64>>,
}

impl SmallForm {
    fn new(orders: Vec<u64>, n: u64, q: Vec<u64>, b: Vec<Vec<u64>>) -> Self {
        let r = orders.len();
        let size: usize = orders.iter().product::<u64>() as usize;
        let mut f = SmallForm {
            orders,
            n,
            size,
            elem_q: Vec::with_capacity(size),
            elem_b: Vec::with_capacity(size * r),
            elem_ord: Vec::with_capacity(size),
            gen_q: q,
            gen_b: b,
        };
        for idx in 0..size {
            let x = f.coords(idx);
            let mut qv: u128 = 0;
            let two_n = 2 * n as u128;
            for i in 0..r {
                let xi = x[i] as u128;
                qv += xi * xi % two_n * f.gen_q[i] as u128;
                for j in i + 1..r {
                    qv += 2 * (xi * x[j] as u128 % two_n) * f.gen_b[i][j] as u128;
                }
                qv %= two_n;
            }
            f.elem_q.push(qv as u64);
            for j in 0..r {
                let mut bv: u128 = 0;
                for i in 0..r {
                    bv += x[i] as u128 * f.gen_b[i][j] as u128;
                }
                f.elem_b.push((bv % n as u128) as u64);
            }
            let ord = x.iter().zip(&f.orders).fold(1u64, |acc, (&c, &d)| {
                let o = d / gcd(c, d);
                acc / gcd(acc, o) * o
            });
            f.elem_ord.push(ord);
        }
        f
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn exponent(&self) -> u64 {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn coords(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.orders[i] as usize;
            out[i] = (idx % d) as u64;
            idx /= d;
        }
        out
    }

    pub fn index(&self, x: &[u64]) -> usize {
        x.iter().zip(&self.orders).fold(0usize, |acc, (&c, &d)| acc * d as usize + (c % d) as usize)
    }

    pub fn generator(&self, i: usize) -> usize {
        let mut x = vec![0; self.rank()];
        x[i] = 1;
        self.index(&x)
    }

    /// `q(x)·N mod 2N`.
    pub fn q_of(&self, x: usize) -> u64 {
        self.elem_q[x]
    }

    /// `b(x, y)·N mod N`.
    pub fn b_of(&self, x: usize, y: usize) -> u64 {
        let yc = self.coords(y);
        let r = self.rank();
        let s: u128 = (0..r).map(|j| yc[j] as u128 * self.elem_b[x * r + j] as u128).sum();
        (s % self.n as u128) as u64
    }

    pub fn order_of(&self, x: usize) -> u64 {
        self.elem_ord[x]
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.coords(x), self.coords(y));
        let s: Vec<u64> = a.iter().zip(&b).zip(&self.orders).map(|((u, v), d)| (u + v) % d).collect();
        self.index(&s)
    }

    pub fn scalar(&self, c: u64, x: usize) -> usize {
        let a = self.coords(x);
        let s: Vec<u64> = a.iter().zip(&self.orders).map(|(u, d)| (u * (c % d)) % d).collect();
        self.index(&s)
    }

    /// Image of element `x` under the homomorphism sending generator `i` to `images[i]`.
    pub fn apply(&self, images: &[usize], x: usize) -> usize {
        self.apply_into(self, images, x)
    }

    /// As [`SmallForm::apply`] for a map into another form `target`.
    pub fn apply_into(&self, target: &SmallForm, images: &[usize], x: usize) -> usize {
        let c = self.coords(x);
        let mut acc = vec![0u64; target.rank()];
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let y = target.coords(images[i]);
            for (k, a) in acc.iter_mut().enumerate() {
                *a = (*a + ci * y[k]) % target.orders[k];
            }
        }
        target.index(&acc)
    }

    /// Composition `f ∘ g` of automorphisms given by generator images.
    pub fn compose(&self, f: &[usize], g: &[usize]) -> Vec<usize> {
        g.iter().map(|&y| self.apply(f, y)).collect()
    }

    pub fn identity_images(&self) -> Vec<usize> {
        (0..self.rank()).map(|i| self.generator(i)).collect()
    }

    /// Depth-first search for generator images preserving orders, `q` and `b`. Candidates are
    /// tried in index order, so the first solution is the lexicographically least one.
    fn search<F: FnMut(&[usize]) -> bool>(&self, target: &SmallForm, mut visit: F) {
        let r = self.rank();
        if self.size != target.size || self.n != target.n {
            return;
        }
        let cands: Vec<Vec<usize>> = (0..r)
            .map(|i| {
                let g = self.generator(i);
                (0..target.size)
                    .filter(|&y| self.orders[i].is_multiple_of(target.order_of(y)) && target.q_of(y) == self.q_of(g))
                    .collect()
            })
            .collect();
        let gens: Vec<usize> = (0..r).map(|i| self.generator(i)).collect();
        let mut chosen = Vec::with_capacity(r);
        fn rec<F: FnMut(&[usize]) -> bool>(
            src: &SmallForm,
            dst: &SmallForm,
            cands: &[Vec<usize>],
            gens: &[usize],
            chosen: &mut Vec<usize>,
            visit: &mut F,
        ) -> bool {
            let i = chosen.len();
            if i == cands.len() {
                return visit(chosen);
            }
            for &y in &cands[i] {
                if (0..i).all(|j| dst.b_of(y, chosen[j]) == src.b_of(gens[i], gens[j])) {
                    chosen.push(y);
                    let stop = rec(src, dst, cands, gens, chosen, visit);
                    chosen.pop();
                    if stop {
                        return true;
                    }
                }
            }
            false
        }
        rec(self, target, &cands, &gens, &mut chosen, &mut visit);
    }

    /// Lexicographically least isometry onto `target`, as generator images.
    pub fn find_isometry(&self, target: &SmallForm) -> Option<Vec<usize>> {
        let mut found = None;
        self.search(target, |imgs| {
            found = Some(imgs.to_vec());
            true
        });
        found
    }

    /// All automorphisms of the form, or a budget error if more than `max` exist.
    pub fn automorphisms(&self, max: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut over = false;
        self.search(self, |imgs| {
            if out.len() >= max {
                over = true;
                return true;
            }
            out.push(imgs.to_vec());
            false
        });
        if over {
            Err(Error::Budget(max as u64))
        } else {
            Ok(out)
        }
    }

    /// Checks that `images` defines an automorphism preserving `q` on every element.
    pub fn is_automorphism(&self, images: &[usize]) -> bool {
        let mut seen = vec![false; self.size];
        for x in 0..self.size {
            let y = self.apply(images, x);
            if seen[y] || self.q_of(y) != self.q_of(x) {
                return false;
            }
            seen[y] = true;
        }
        true
    }

    /// Order of the subgroup generated by the given automorphisms, by closure.
    pub fn generated_subgroup(&self, gens: &[Vec<usize>], max: usize) -> Result<Vec<Vec<usize>>> {
        let id = self.identity_images();
        let mut elems = vec![id.clone()];
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let h = self.compose(g, &elems[i]);
                if !seen.contains_key(&h) {
                    if elems.len() >= max {
                        return Err(Error::Budget(max as u64));
                    }
                    seen.insert(h.clone(), elems.len());
                    elems.push(h);
                }
            }
            i += 1;
        }
        Ok(elems)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Integer matrix of generator images (rows = generators, columns = coordinates).
pub fn images_to_matrix(form: &SmallForm, images: &[usize]) -> IntMatrix {
    Matrix::from_rows(
        images.iter().map(|&y| form.coords(y).into_iter().map(BigInt::from).collect()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_have_expected_values() {
        let q = FiniteQuadraticForm::atom_q(2, 1, 7).unwrap();
        assert_eq!(q.q_values(), &[rat(7, 2) - rat(2, 1)]);
        let q3 = FiniteQuadraticForm::atom_q(3, 1, 1).unwrap();
        assert_eq!(q3.q_values(), &[rat(4, 3)]);
        let u = FiniteQuadraticForm::atom_u(1);
        assert_eq!(u.order(), BigInt::from(4));
        let v = FiniteQuadraticForm::atom_v(1);
        assert_eq!(v.q_values(), &[rat(1, 1), rat(1, 1)]);
        assert!(FiniteQuadraticForm::atom_q(4, 1, 1).is_err());
    }

    #[test]
    fn validation_rejects_bad_forms() {
        let two = vec![BigInt::from(2)];
        let bad_q = FiniteQuadraticForm::new(two.clone(), vec![rat(1, 4)], RatMatrix::from_rows(vec![vec![rat(1, 4)]]));
        assert!(bad_q.is_err());
        let degenerate = FiniteQuadraticForm::new(two, vec![rat(1, 1)], RatMatrix::from_rows(vec![vec![rat(0, 1)]]));
        assert_eq!(degenerate, Err(Error::Degenerate));
    }

    #[test]
    fn sum_normalizes_orders() {
        let a = FiniteQuadraticForm::atom_q(2, 1, 1).unwrap();
        let b = FiniteQuadraticForm::atom_q(3, 1, 1).unwrap();
        let s = a.direct_sum(&b);
        assert_eq!(s.orders(), &[BigInt::from(6)]);
        assert_eq!(s.p_part(3).orders(), &[BigInt::from(3)]);
        assert_eq!(s.p_part(2).q_values(), a.q_values());
    }

    #[test]
    fn automorphism_counts() {
        let u = FiniteQuadraticForm::atom_u(1).to_small(100).unwrap();
        // O(u(2)) swaps the two isotropic vectors.
        assert_eq!(u.automorphisms(100).unwrap().len(), 2);
        let v = FiniteQuadraticForm::atom_v(1).to_small(100).unwrap();
        assert_eq!(v.automorphisms(100).unwrap().len(), 6);
        let t = FiniteQuadraticForm::trivial().to_small(10).unwrap();
        assert_eq!(t.automorphisms(10).unwrap().len(), 1);
        for g in v.automorphisms(100).unwrap() {
            assert!(v.is_automorphism(&g));
        }
    }

    #[test]
    fn relation_i_has_witness() {
        let a = FiniteQuadraticForm::atom_q(2, 1, 1).unwrap().to_small(100).unwrap();
        let b = FiniteQuadraticForm::atom_q(2, 1, 5).unwrap().to_small(100).unwrap();
        assert!(a.find_isometry(&b).is_some());
        let c = FiniteQuadraticForm::atom_q(2, 1, 3).unwrap().to_small(100).unwrap();
        assert!(a.find_isometry(&c).is_none());
    }
}

//! Short vectors of definite lattices, root systems and their ADE types.
//!
//! Root lattices follow the negative definite convention: roots have square `-2`, and
//! [`RootSystemType::gram`] returns `-C` for the Cartan matrix `C`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::lll_gram;
use crate::IntMatrix;

/// One irreducible simply laced root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    A(u32),
    D(u32),
    E(u32),
}

impl Component {
    pub fn new(kind: char, n: u32) -> Result<Self> {
        match (kind.to_ascii_uppercase(), n) {
            ('A', n) if n >= 1 => Ok(Component::A(n)),
            ('D', n) if n >= 4 => Ok(Component::D(n)),
            ('E', 6..=8) => Ok(Component::E(n)),
            _ => Err(Error::Parse(format!("no root system {kind}_{n}"))),
        }
    }

    pub fn rank(&self) -> u32 {
        match *self {
            Component::A(n) | Component::D(n) | Component::E(n) => n,
        }
    }

    pub fn root_count(&self) -> u64 {
        match *self {
            Component::A(n) => u64::from(n) * u64::from(n + 1),
            Component::D(n) => 2 * u64::from(n) * u64::from(n - 1),
            Component::E(6) => 72,
            Component::E(7) => 126,
            Component::E(_) => 240,
        }
    }

    pub fn coxeter_number(&self) -> u64 {
        self.root_count() / u64::from(self.rank())
    }

    pub fn weyl_order(&self) -> BigInt {
        let fact = |n: u32| (1..=n).map(BigInt::from).product::<BigInt>();
        match *self {
            Component::A(n) => fact(n + 1),
            Component::D(n) => BigInt::from(2).pow(n - 1) * fact(n),
            Component::E(6) => BigInt::from(51_840),
            Component::E(7) => BigInt::from(2_903_040),
            Component::E(_) => BigInt::from(696_729_600),
        }
    }

    /// Cartan matrix with the Bourbaki numbering (the branch node of `D_n` is `n-2`, the
    /// branch node of `E_n` is node 4 in 1-based numbering).
    pub fn cartan(&self) -> IntMatrix {
        let n = self.rank() as usize;
        let mut c = IntMatrix::identity(n).scale(&BigInt::from(2));
        let mut link = |i: usize, j: usize| {
            c.set(i, j, BigInt::from(-1));
            c.set(j, i, BigInt::from(-1));
        };
        match *self {
            Component::A(_) => (1..n).for_each(|i| link(i - 1, i)),
            Component::D(_) => {
                (1..n - 1).for_each(|i| link(i - 1, i));
                link(n - 3, n - 1);
            }
            Component::E(_) => {
                link(0, 2);
                link(1, 3);
                (3..n).for_each(|i| link(i - 1, i));
            }
        }
        c
    }

    /// Sort key giving the conventional order `A_11 D_7 E_6`: by family, larger ranks first.
    fn order_key(&self) -> (u8, Reverse<u32>) {
        let family = match self {
            Component::A(_) => 0,
            Component::D(_) => 1,
            Component::E(_) => 2,
        };
        (family, Reverse(self.rank()))
    }

    /// Order of the discriminant group of the root lattice.
    pub fn det(&self) -> u64 {
        match *self {
            Component::A(n) => u64::from(n) + 1,
            Component::D(_) => 4,
            Component::E(n) => u64::from(9 - n),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, n) = match *self {
            Component::A(n) => ('A', n),
            Component::D(n) => ('D', n),
            Component::E(n) => ('E', n),
        };
        write!(f, "{c}_{n}")
    }
}

/// A simply laced root system as a multiset of components, kept in conventional order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSystemType {
    components: Vec<Component>,
}

impl RootSystemType {
    pub fn new(mut components: Vec<Component>) -> Self {
        components.sort_by_key(Component::order_key);
        RootSystemType { components }
    }

    pub fn empty() -> Self {
        RootSystemType::default()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn rank(&self) -> u32 {
        self.components.iter().map(Component::rank).sum()
    }

    pub fn root_count(&self) -> u64 {
        self.components.iter().map(Component::root_count).sum()
    }

    pub fn weyl_order(&self) -> BigInt {
        self.components.iter().map(Component::weyl_order).product()
    }

    /// Multiplicity of each component.
    pub fn counts(&self) -> BTreeMap<Component, usize> {
        let mut m = BTreeMap::new();
        for c in &self.components {
            *m.entry(*c).or_insert(0) += 1;
        }
        m
    }

    /// Negative definite Gram matrix of the root lattice, components in stored order.
    pub fn gram(&self) -> IntMatrix {
        self.components
            .iter()
            .fold(IntMatrix::zeros(0, 0), |acc, c| acc.block_diag(&-&c.cartan()))
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.gram())
    }
}

impl fmt::Display for RootSystemType {
    /// `D_16+E_8`, `7A_1`, and `0` for the empty system.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut i = 0;
        while i < self.components.len() {
            let c = self.components[i];
            let m = self.components[i..].iter().take_while(|&&d| d == c).count();
            if i > 0 {
                write!(f, "+")?;
            }
            if m > 1 {
                write!(f, "{m}")?;
            }
            write!(f, "{c}")?;
            i += m;
        }
        Ok(())
    }
}

impl FromStr for RootSystemType {
    type Err = Error;

    /// Accepts `7A_1`, `2A1+D4`, `D_{16}⊕E_8`, `A_1^2` and `0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(RootSystemType::empty());
        }
        let mut comps = Vec::new();
        for tok in s.split(['+', '⊕']) {
            let tok: String = tok.chars().filter(|c| !matches!(c, '_' | '{' | '}' | ' ')).collect();
            let err = || Error::Parse(format!("bad root system component {tok:?}"));
            let pos = tok.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(err)?;
            let mult: usize = if pos == 0 { 1 } else { tok[..pos].parse().map_err(|_| err())? };
            let kind = tok[pos..].chars().next().ok_or_else(err)?;
            let rest = &tok[pos + 1..];
            let (n, pow) = match rest.split_once('^') {
                Some((n, e)) => (n, e.parse::<usize>().map_err(|_| err())?),
                None => (rest, 1),
            };
            let c = Component::new(kind, n.parse().map_err(|_| err())?)?;
            comps.extend(std::iter::repeat_n(c, mult * pow));
        }
        Ok(RootSystemType::new(comps))
    }
}

pub fn weyl_order(t: &RootSystemType) -> BigInt {
    t.weyl_order()
}

// ---------------------------------------------------------------------------------------------
// Enumeration.

/// Integer scalars usable by the enumeration kernel; every operation reports overflow.
trait Scalar: Clone + Ord + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + Roots {
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i128 {
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Integral form of `Q(x) = Σ_i e_i·y_i²` with `y_i = m_i·x_i + Σ_{j>i} c_ij·x_j`,
/// so that `B·xᵀGx = Σ e_i y_i²` for a fixed positive integer `B`.
struct Plan {
    m: Vec<BigInt>,
    c: Vec<Vec<BigInt>>,
    e: Vec<BigInt>,
    scale: BigInt,
}

fn plan(g: &IntMatrix) -> Plan {
    let n = g.rows();
    // Upper triangular decomposition Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)².
    let mut q = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let mut d = BigRational::from_integer(g.get(i, i).clone());
        for k in 0..i {
            d -= &q[k][k] * &q[k][i] * &q[k][i];
        }
        q[i][i] = d;
        for j in i + 1..n {
            let mut s = BigRational::from_integer(g.get(i, j).clone());
            for k in 0..i {
                s -= &q[k][k] * &q[k][i] * &q[k][j];
            }
            q[i][j] = s / &q[i][i];
        }
    }
    let mut m = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut coeff = Vec::with_capacity(n);
    for i in 0..n {
        let mi = (i + 1..n).fold(BigInt::one(), |acc, j| acc.lcm(q[i][j].denom()));
        c.push((0..n).map(|j| if j > i { (&q[i][j] * &mi).to_integer() } else { BigInt::zero() }).collect());
        coeff.push(&q[i][i] / BigRational::from_integer(&mi * &mi));
        m.push(mi);
    }
    let scale = coeff.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let e = coeff.iter().map(|x| (x * &scale).to_integer()).collect();
    Plan { m, c, e, scale }
}

struct Kernel<T> {
    m: Vec<T>,
    c: Vec<Vec<T>>,
    e: Vec<T>,
}

impl<T: Scalar> Kernel<T> {
    fn from_plan(p: &Plan) -> Option<Self> {
        let conv = |v: &[BigInt]| v.iter().map(T::from_big).collect::<Option<Vec<T>>>();
        Some(Kernel { m: conv(&p.m)?, c: p.c.iter().map(|r| conv(r)).collect::<Option<_>>()?, e: conv(&p.e)? })
    }

    /// All `x` with `Σ e_i y_i² ≤ bound`. `None` on overflow or when more than `max` are found.
    fn run(&self, bound: T, max: usize) -> std::result::Result<Vec<Vec<T>>, Stop> {
        let n = self.m.len();
        let mut x = vec![T::zero(); n];
        let mut out = Vec::new();
        if n == 0 {
            return Ok(vec![vec![]]);
        }
        self.rec(n - 1, bound, &mut x, &mut out, max)?;
        Ok(out)
    }

    fn rec(&self, i: usize, rem: T, x: &mut Vec<T>, out: &mut Vec<Vec<T>>, max: usize) -> std::result::Result<(), Stop> {
        let n = x.len();
        let mut s = T::zero();
        for j in i + 1..n {
            s = s.checked_add(&self.c[i][j].checked_mul(&x[j]).ok_or(Stop::Overflow)?).ok_or(Stop::Overflow)?;
        }
        let r = rem.div_floor(&self.e[i]).sqrt();
        let mi = &self.m[i];
        let neg_r = -r.clone();
        let lo = neg_r.checked_sub(&s).ok_or(Stop::Overflow)?.div_ceil(mi);
        let hi = r.checked_sub(&s).ok_or(Stop::Overflow)?.div_floor(mi);
        let mut xi = lo;
        while xi <= hi {
            let y = mi.checked_mul(&xi).and_then(|v| v.checked_add(&s)).ok_or(Stop::Overflow)?;
            let used = y.checked_mul(&y).and_then(|v| v.checked_mul(&self.e[i])).ok_or(Stop::Overflow)?;
            let left = rem.checked_sub(&used).ok_or(Stop::Overflow)?;
            if !left.is_negative() {
                x[i] = xi.clone();
                if i == 0 {
                    out.push(x.clone());
                    if out.len() > max {
                        return Err(Stop::Budget);
                    }
                } else {
                    self.rec(i - 1, left, x, out, max)?;
                }
            }
            xi = xi + T::one();
        }
        x[i] = T::zero();
        Ok(())
    }
}

enum Stop {
    Overflow,
    Budget,
}

/// Default cap on the number of enumerated vectors.
pub const ENUMERATION_BUDGET: usize = 5_000_000;

/// All nonzero `x` with `lo ≤ xᵀGx ≤ hi` for a positive definite `G`, sorted lexicographically.
pub fn short_vectors(g: &IntMatrix, lo: &BigInt, hi: &BigInt, max: usize) -> Result<Vec<Vec<BigInt>>> {
    let n = g.rows();
    if hi < lo || !hi.is_positive() {
        return Ok(vec![]);
    }
    let (reduced, u) = lll_gram(g)?;
    let p = plan(&reduced);
    let bound = &p.scale * hi;
    let raw: Vec<Vec<BigInt>> = match Kernel::<i128>::from_plan(&p).zip(i128::from_big(&bound)) {
        Some((k, b)) => match k.run(b, max) {
            Ok(v) => v.into_iter().map(|x| x.iter().map(Scalar::to_big).collect()).collect(),
            Err(Stop::Budget) => return Err(Error::Budget(max as u64)),
            Err(Stop::Overflow) => big_run(&p, &bound, max)?,
        },
        None => big_run(&p, &bound, max)?,
    };
    let mut out: Vec<Vec<BigInt>> = raw
        .into_iter()
        .filter(|y| y.iter().any(|v| !v.is_zero()))
        .filter(|y| {
            let nrm = reduced.bilinear(y, y);
            &nrm >= lo && &nrm <= hi
        })
        .map(|y| u.mul_vec(&y))
        .collect();
    debug_assert!(out.iter().all(|x| x.len() == n));
    out.sort();
    Ok(out)
}

fn big_run(p: &Plan, bound: &BigInt, max: usize) -> Result<Vec<Vec<BigInt>>> {
    let k = Kernel::<BigInt>::from_plan(p).expect("BigInt conversion is total");
    match k.run(bound.clone(), max) {
        Ok(v) => Ok(v),
        Err(Stop::Budget) => Err(Error::Budget(max as u64)),
        Err(Stop::Overflow) => unreachable!("BigInt arithmetic does not overflow"),
    }
}

/// Sign `+1` or `-1` of a definite lattice.
fn definite_sign(l: &Lattice) -> Result<i64> {
    if l.is_positive_definite() {
        Ok(1)
    } else if l.is_negative_definite() {
        Ok(-1)
    } else {
        Err(Error::Indefinite)
    }
}

/// All `x ∈ L` with `x² = n`, both signs included, sorted lexicographically. Empty when `n`
/// is zero or has the wrong sign.
pub fn vectors_of_norm(l: &Lattice, n: i64) -> Result<Vec<Vec<BigInt>>> {
    vectors_of_norm_budget(l, n, ENUMERATION_BUDGET)
}

pub fn vectors_of_norm_budget(l: &Lattice, n: i64, max: usize) -> Result<Vec<Vec<BigInt>>> {
    let s = definite_sign(l)?;
    let target = n * s;
    if target <= 0 {
        return Ok(vec![]);
    }
    let g = if s == 1 { l.gram().clone() } else { -l.gram() };
    let t = BigInt::from(target);
    short_vectors(&g, &t, &t, max)
}

/// Roots, a simple system and the ADE type of a definite even lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystem {
    pub kind: RootSystemType,
    pub roots: Vec<Vec<BigInt>>,
    /// Simple roots grouped by component; within a component in Bourbaki order.
    pub simple: Vec<Vec<BigInt>>,
}

/// Root system of the norm `∓2` vectors of a definite lattice.
///
/// The positive system consists of the roots whose first nonzero coordinate is positive;
/// this is a linear order, so it never degenerates.
pub fn root_system(l: &Lattice) -> Result<RootSystem> {
    let s = definite_sign(l)?;
    let roots = vectors_of_norm(l, 2 * s)?;
    Ok(classify_roots(l, s, roots))
}

fn classify_roots(l: &Lattice, s: i64, roots: Vec<Vec<BigInt>>) -> RootSystem {
    let is_pos = |v: &[BigInt]| v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive());
    let positive: Vec<&Vec<BigInt>> = roots.iter().filter(|r| is_pos(r)).collect();
    let pos_set: HashSet<&Vec<BigInt>> = positive.iter().copied().collect();
    let mut decomposable = HashSet::new();
    for (i, a) in positive.iter().enumerate() {
        for b in &positive[i + 1..] {
            let sum: Vec<BigInt> = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
            if pos_set.contains(&sum) {
                decomposable.insert(sum);
            }
        }
    }
    let simple: Vec<Vec<BigInt>> =
        positive.iter().filter(|r| !decomposable.contains(*r as &Vec<BigInt>)).map(|r| (*r).clone()).collect();
    let n = simple.len();
    let sg = BigInt::from(s);
    // Adjacency: for simple roots of norm 2s, (a,b)·s = -1 when joined.
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && !(l.inner(&simple[i], &simple[j]) * &sg).is_zero()).collect())
        .collect();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    let mut ordered = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut nodes = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < nodes.len() {
            for &j in &adj[nodes[k]] {
                if !seen[j] {
                    seen[j] = true;
                    nodes.push(j);
                }
            }
            k += 1;
        }
        let (comp, order) = classify_component(&nodes, &adj);
        comps.push(comp);
        ordered.push(order.into_iter().map(|i| simple[i].clone()).collect::<Vec<_>>());
    }
    let mut pairs: Vec<(Component, Vec<Vec<BigInt>>)> = comps.into_iter().zip(ordered).collect();
    pairs.sort_by(|a, b| a.0.order_key().cmp(&b.0.order_key()).then_with(|| a.1.cmp(&b.1)));
    let kind = RootSystemType::new(pairs.iter().map(|p| p.0).collect());
    let simple = pairs.into_iter().flat_map(|p| p.1).collect();
    RootSystem { kind, roots, simple }
}

/// Identifies a connected simply laced Dynkin diagram and lists its nodes in Bourbaki order.
fn classify_component(nodes: &[usize], adj: &[Vec<usize>]) -> (Component, Vec<usize>) {
    let n = nodes.len() as u32;
    let branch = nodes.iter().copied().find(|&v| adj[v].len() == 3);
    let walk = |from: usize, first: usize| {
        let mut path = vec![first];
        let (mut prev, mut cur) = (from, first);
        while let Some(&next) = adj[cur].iter().find(|&&x| x != prev) {
            path.push(next);
            prev = cur;
            cur = next;
        }
        path
    };
    match branch {
        None => {
            let end = nodes.iter().copied().find(|&v| adj[v].len() <= 1).expect("a path has an end");
            let mut order = vec![end];
            if let Some(&first) = adj[end].first() {
                order.extend(walk(end, first));
            }
            (Component::A(n), order)
        }
        Some(b) => {
            let mut arms: Vec<Vec<usize>> = adj[b].iter().map(|&a| walk(b, a)).collect();
            arms.sort_by_key(|a| (a.len(), a.clone()));
            let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
            if lens[0] == 1 && lens[1] == 1 {
                // D_n: long arm reversed, branch, then the two short arms.
                let mut order: Vec<usize> = arms[2].iter().rev().copied().collect();
                order.push(b);
                order.push(arms[0][0]);
                order.push(arms[1][0]);
                (Component::D(n), order)
            } else {
                // E_n: nodes 1, 3 on the arm of length 2, node 2 on the arm of length 1, node 4 the
                // branch, then the long arm.
                let mut order = vec![arms[1][1], arms[0][0], arms[1][0], b];
                order.extend(arms[2].iter().copied());
                (Component::E(n), order)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    #[test]
    fn component_data() {
        for c in [Component::A(3), Component::D(5), Component::E(6), Component::E(7), Component::E(8)] {
            let l = Lattice::new(c.cartan()).unwrap();
            assert_eq!(l.det().abs(), BigInt::from(c.det()), "{c}");
            assert_eq!(c.root_count() % u64::from(c.rank()), 0);
        }
        assert_eq!(Component::E(8).coxeter_number(), 30);
        assert_eq!(Component::D(24).coxeter_number(), 46);
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(weyl_order(&RootSystemType::empty()), BigInt::one());
        assert_eq!(weyl_order(&"2A_1".parse().unwrap()), BigInt::from(4));
        assert_eq!(weyl_order(&"A_1".parse().unwrap()), BigInt::from(2));
        assert_eq!(weyl_order(&"D_4".parse().unwrap()), BigInt::from(192));
        assert_eq!(weyl_order(&"E_8".parse().unwrap()), BigInt::from(696_729_600));
    }

    #[test]
    fn type_strings() {
        let t: RootSystemType = "E_8+D_{16}".parse().unwrap();
        assert_eq!(t.to_string(), "D_16+E_8");
        assert_eq!("7A1".parse::<RootSystemType>().unwrap().to_string(), "7A_1");
        assert_eq!("A_1^24".parse::<RootSystemType>().unwrap().to_string(), "24A_1");
        assert_eq!("0".parse::<RootSystemType>().unwrap(), RootSystemType::empty());
        assert!("B_3".parse::<RootSystemType>().is_err());
        assert!("D_3".parse::<RootSystemType>().is_err());
    }

    #[test]
    fn small_enumerations() {
        let l = Lattice::diagonal(&[-2]).unwrap();
        assert_eq!(vectors_of_norm(&l, -2).unwrap().len(), 2);
        assert!(vectors_of_norm(&l, 2).unwrap().is_empty());
        assert!(vectors_of_norm(&l, 0).unwrap().is_empty());
        let h = Lattice::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(vectors_of_norm(&h, 2), Err(Error::Indefinite));
    }

    #[test]
    fn root_systems_of_small_lattices() {
        let rs = root_system(&Lattice::diagonal(&[-2, -2]).unwrap()).unwrap();
        assert_eq!(rs.kind.to_string(), "2A_1");
        let a2 = Lattice::from_rows(&[vec![-2, 1], vec![1, -2]]).unwrap();
        let rs = root_system(&a2).unwrap();
        assert_eq!(rs.kind.to_string(), "A_2");
        assert_eq!(rs.roots.len(), 6);
        let t = Lattice::diagonal(&[2, 4, 16]).unwrap();
        let rs = root_system(&t).unwrap();
        assert_eq!(rs.kind.to_string(), "A_1");
        assert_eq!(rs.kind.weyl_order(), BigInt::from(2));
    }

    #[test]
    fn exceptional_types_recovered_with_cartan_order() {
        for s in ["E_6", "E_7", "E_8", "D_4", "D_7", "A_5"] {
            let t: RootSystemType = s.parse().unwrap();
            let l = t.lattice().unwrap();
            let rs = root_system(&l).unwrap();
            assert_eq!(rs.kind, t);
            assert_eq!(rs.roots.len() as u64, t.root_count());
            let b = Matrix::from_cols(l.rank(), &rs.simple);
            assert_eq!(l.gram().congruence(&b), t.gram(), "{s}");
        }
    }
}

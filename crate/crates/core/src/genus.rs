//! Genus symbols of even lattices and symbols of finite quadratic forms.
//!
//! A symbol is a list of Jordan constituents `(p^k)^{±m}` for odd `p` and
//! `(2^k)_{II}^{±m}` or `(2^k)_t^{±m}` for `p = 2`, printed in the compact form
//! `2_{II}^{-6},4_3^{-1},3^{+6}`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fqf::FiniteQuadraticForm;
use crate::lattice::Lattice;
use crate::padic::{is_prime, jordan_blocks, legendre, legendre_rat, prime_divisors, unit_residue, Block, Mode};

/// One Jordan constituent. For `p = 2`, `oddity` is `None` exactly for type II; for odd `p`
/// it is always `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub p: u64,
    pub k: u32,
    pub rank: u32,
    pub eps: i8,
    pub oddity: Option<u8>,
}

fn eps_of_unit(theta: u64) -> i8 {
    if theta % 8 == 1 || theta % 8 == 7 {
        1
    } else {
        -1
    }
}

impl Constituent {
    pub fn odd(p: u64, k: u32, rank: u32, eps: i8) -> Self {
        Constituent { p, k, rank, eps, oddity: None }
    }

    pub fn even_type2(k: u32, rank: u32, eps: i8) -> Self {
        Constituent { p: 2, k, rank, eps, oddity: None }
    }

    pub fn even_type1(k: u32, rank: u32, eps: i8, oddity: u8) -> Self {
        Constituent { p: 2, k, rank, eps, oddity: Some(oddity % 8) }
    }

    pub fn is_type2(&self) -> bool {
        self.p == 2 && self.oddity.is_none()
    }

    /// Whether some unimodular `p`-adic lattice has these invariants.
    pub fn is_valid(&self) -> bool {
        if self.eps != 1 && self.eps != -1 {
            return false;
        }
        if self.p != 2 {
            return self.oddity.is_none() && (self.rank > 0 || self.eps == 1);
        }
        match self.oddity {
            None => self.rank.is_multiple_of(2) && (self.rank > 0 || self.eps == 1),
            Some(o) => self.rank > 0 && type1_reachable(self.rank).contains(&(o % 8, self.eps)),
        }
    }

    /// Contribution to the signature modulo 8.
    pub fn signature(&self) -> i64 {
        let k = self.k as i64;
        let minus = i64::from(self.eps == -1);
        let s = if self.p == 2 {
            self.oddity.map_or(0, i64::from) + 4 * k * minus
        } else {
            let p = self.p as i64;
            self.rank as i64 * (k * k % 8) * (1 - p).rem_euclid(8) + 4 * k * minus
        };
        s.rem_euclid(8)
    }

    pub fn negate(&self) -> Self {
        let mut c = *self;
        if self.p == 2 {
            c.oddity = self.oddity.map(|o| (8 - o % 8) % 8);
        } else if self.p % 4 == 3 && self.rank % 2 == 1 {
            c.eps = -self.eps;
        }
        c
    }

    /// Orthogonal sum of two constituents at the same prime and scale.
    pub fn merge(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.k), (other.p, other.k), "merging constituents of different scales");
        let oddity = if self.p != 2 || (self.oddity.is_none() && other.oddity.is_none()) {
            None
        } else {
            Some((self.oddity.unwrap_or(0) + other.oddity.unwrap_or(0)) % 8)
        };
        Constituent { p: self.p, k: self.k, rank: self.rank + other.rank, eps: self.eps * other.eps, oddity }
    }

    fn scale_string(&self) -> String {
        BigInt::from(self.p).pow(self.k).to_string()
    }

    fn sup(&self) -> String {
        format!("^{{{}{}}}", if self.eps == 1 { '+' } else { '-' }, self.rank)
    }

    /// Rendering with signed oddities `5 ↦ -3`, `6 ↦ -2`, `7 ↦ -1`.
    pub fn to_signed_string(&self) -> String {
        match (self.p, self.oddity) {
            (2, Some(o)) if o > 4 => format!("{}_{{{}}}{}", self.scale_string(), o as i64 - 8, self.sup()),
            _ => self.to_string(),
        }
    }

    /// Decomposes the constituent into atoms.
    pub fn atoms(&self) -> Vec<Atom> {
        let (p, k, r) = (self.p, self.k, self.rank as usize);
        if p != 2 {
            let theta = if self.eps == 1 { 1 } else { least_nonresidue(p) };
            let mut v = vec![Atom::Q { p, k, theta: 1 }; r.saturating_sub(1)];
            if r > 0 {
                v.push(Atom::Q { p, k, theta });
            }
            return v;
        }
        match self.oddity {
            None => {
                let mut v = vec![Atom::U { k }; (r / 2).saturating_sub(1)];
                if r > 0 {
                    v.push(if self.eps == 1 { Atom::U { k } } else { Atom::V { k } });
                }
                v
            }
            Some(o) => {
                let free = r.min(3);
                let prefix = r - free;
                let target = (o as i64 - prefix as i64).rem_euclid(8) as u64;
                let thetas = find_thetas(free, target, self.eps).expect("valid constituent has a diagonal form");
                let mut v = vec![Atom::Q { p: 2, k, theta: 1 }; prefix];
                v.extend(thetas.into_iter().map(|theta| Atom::Q { p: 2, k, theta }));
                v
            }
        }
    }
}

fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| legendre(&BigInt::from(a), p) == -1).expect("odd prime has a nonresidue")
}

fn find_thetas(n: usize, target: u64, eps: i8) -> Option<Vec<u64>> {
    fn rec(n: usize, acc: &mut Vec<u64>, target: u64, eps: i8) -> bool {
        if acc.len() == n {
            let s: u64 = acc.iter().sum::<u64>() % 8;
            let e: i8 = acc.iter().map(|&t| eps_of_unit(t)).product();
            return s == target && e == eps;
        }
        for t in [1, 3, 5, 7] {
            acc.push(t);
            if rec(n, acc, target, eps) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::new();
    rec(n, &mut acc, target, eps).then_some(acc)
}

fn type1_reachable(rank: u32) -> HashSet<(u8, i8)> {
    let mut cur: HashSet<(u8, i8)> = HashSet::from([(0, 1)]);
    for _ in 0..rank {
        let mut next = HashSet::new();
        for &(o, e) in &cur {
            for t in [1u8, 3, 5, 7] {
                next.insert(((o + t) % 8, e * eps_of_unit(t as u64)));
            }
        }
        cur = next;
    }
    cur
}

impl fmt::Display for Constituent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = self.scale_string();
        match (self.p, self.oddity) {
            (2, None) => write!(f, "{scale}_{{II}}{}", self.sup()),
            (2, Some(o)) => write!(f, "{scale}_{o}{}", self.sup()),
            _ => write!(f, "{scale}{}", self.sup()),
        }
    }
}

/// Building blocks of finite quadratic forms: `q_θ(p^k)`, `u(2^k)`, `v(2^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Q { p: u64, k: u32, theta: u64 },
    U { k: u32 },
    V { k: u32 },
}

impl Atom {
    pub fn constituent(&self) -> Constituent {
        match *self {
            Atom::Q { p: 2, k, theta } => Constituent::even_type1(k, 1, eps_of_unit(theta), (theta % 8) as u8),
            Atom::Q { p, k, theta } => Constituent::odd(p, k, 1, legendre(&BigInt::from(theta), p)),
            Atom::U { k } => Constituent::even_type2(k, 2, 1),
            Atom::V { k } => Constituent::even_type2(k, 2, -1),
        }
    }

    pub fn form(&self) -> FiniteQuadraticForm {
        match *self {
            Atom::Q { p, k, theta } => FiniteQuadraticForm::atom_q(p, k, theta as i64).expect("well-formed atom"),
            Atom::U { k } => FiniteQuadraticForm::atom_u(k),
            Atom::V { k } => FiniteQuadraticForm::atom_v(k),
        }
    }
}

/// Symbol of a finite quadratic form: constituents sorted by prime, then scale, one per scale.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqfSymbol {
    parts: Vec<Constituent>,
}

impl FqfSymbol {
    pub fn trivial() -> Self {
        FqfSymbol::default()
    }

    /// Merges constituents sharing a scale and sorts them. Rank-zero entries are dropped.
    pub fn from_constituents(parts: impl IntoIterator<Item = Constituent>) -> Self {
        let mut v: Vec<Constituent> = parts.into_iter().filter(|c| c.rank > 0).collect();
        v.sort_by_key(|c| (c.p, c.k));
        let mut out: Vec<Constituent> = Vec::with_capacity(v.len());
        for c in v {
            match out.last_mut() {
                Some(last) if (last.p, last.k) == (c.p, c.k) => *last = last.merge(&c),
                _ => out.push(c),
            }
        }
        FqfSymbol { parts: out }
    }

    pub fn from_atoms(atoms: &[Atom]) -> Self {
        FqfSymbol::from_constituents(atoms.iter().map(Atom::constituent))
    }

    pub fn constituents(&self) -> &[Constituent] {
        &self.parts
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn primes(&self) -> Vec<u64> {
        let s: BTreeSet<u64> = self.parts.iter().map(|c| c.p).collect();
        s.into_iter().collect()
    }

    pub fn at_prime(&self, p: u64) -> impl Iterator<Item = &Constituent> {
        self.parts.iter().filter(move |c| c.p == p)
    }

    /// Length `l(A_{q_p})` of the p-part.
    pub fn length(&self, p: u64) -> u32 {
        self.at_prime(p).map(|c| c.rank).sum()
    }

    /// Group order.
    pub fn order(&self) -> BigInt {
        self.parts.iter().map(|c| BigInt::from(c.p).pow(c.k * c.rank)).product()
    }

    pub fn is_valid(&self) -> bool {
        self.parts.iter().all(|c| c.k >= 1 && is_prime(c.p) && c.is_valid())
    }

    pub fn sum(&self, other: &Self) -> Self {
        FqfSymbol::from_constituents(self.parts.iter().chain(&other.parts).copied())
    }

    pub fn negate(&self) -> Self {
        FqfSymbol { parts: self.parts.iter().map(Constituent::negate).collect() }
    }

    pub fn signature_mod8(&self) -> u8 {
        (self.parts.iter().map(Constituent::signature).sum::<i64>().rem_euclid(8)) as u8
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.parts.iter().flat_map(Constituent::atoms).collect()
    }

    /// An explicit form with this symbol.
    pub fn materialize(&self) -> FiniteQuadraticForm {
        self.atoms().iter().fold(FiniteQuadraticForm::trivial(), |acc, a| acc.direct_sum(&a.form()))
    }

    /// Canonical representative: odd parts are already canonical once merged; the 2-part is
    /// replaced by the least element of its orbit under the 2-adic relations.
    pub fn normalize(&self) -> Self {
        let two: Vec<Constituent> = self.at_prime(2).copied().collect();
        let best = two_adic_orbit(&two).into_iter().min_by_key(orbit_key).unwrap_or_default();
        FqfSymbol::from_constituents(self.parts.iter().filter(|c| c.p != 2).copied().chain(best))
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        self.normalize() == other.normalize()
    }

    /// All symbols in the 2-adic orbit, for inspection.
    pub fn two_adic_variants(&self) -> Vec<FqfSymbol> {
        let two: Vec<Constituent> = self.at_prime(2).copied().collect();
        let odd: Vec<Constituent> = self.parts.iter().filter(|c| c.p != 2).copied().collect();
        let mut v: Vec<FqfSymbol> = two_adic_orbit(&two)
            .into_iter()
            .map(|s| FqfSymbol::from_constituents(odd.iter().copied().chain(s)))
            .collect();
        v.sort();
        v
    }

    pub fn to_signed_string(&self) -> String {
        if self.parts.is_empty() {
            return "1".into();
        }
        self.parts.iter().map(Constituent::to_signed_string).collect::<Vec<_>>().join(",")
    }

    /// Parses a symbol, also returning notes about nonstandard spellings that were accepted.
    pub fn parse_with_notes(s: &str) -> Result<(FqfSymbol, Vec<String>)> {
        let s = s.trim();
        let mut notes = Vec::new();
        if s.is_empty() || s == "1" {
            return Ok((FqfSymbol::trivial(), notes));
        }
        let mut parts = Vec::new();
        for tok in s.split(',') {
            parts.push(parse_constituent(tok.trim(), &mut notes)?);
        }
        let sym = FqfSymbol::from_constituents(parts);
        if !sym.is_valid() {
            return Err(Error::Parse(format!("{s}: no lattice has these invariants")));
        }
        Ok((sym, notes))
    }
}

impl fmt::Display for FqfSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "1");
        }
        for (i, c) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for FqfSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FqfSymbol::parse_with_notes(s).map(|(sym, _)| sym)
    }
}

fn strip_braces(s: &str) -> &str {
    s.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(s)
}

fn parse_constituent(tok: &str, notes: &mut Vec<String>) -> Result<Constituent> {
    let err = || Error::Parse(format!("bad constituent {tok:?}"));
    let (head, sup) = tok.split_once('^').ok_or_else(err)?;
    let (base, sub) = match head.split_once('_') {
        Some((b, s)) => (b, Some(strip_braces(s))),
        None => (head, None),
    };
    let q: u64 = base.trim().parse().map_err(|_| err())?;
    let p = *prime_divisors(&BigInt::from(q)).first().ok_or_else(err)?;
    let mut k = 0u32;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    if rest != 1 || k == 0 {
        return Err(Error::Parse(format!("{tok:?}: scale {q} is not a prime power")));
    }
    let sup = strip_braces(sup.trim());
    let (eps, digits) = match sup.chars().next() {
        Some('+') => (1, &sup[1..]),
        Some('-') => (-1, &sup[1..]),
        _ => (1, sup),
    };
    let rank: u32 = digits.parse().map_err(|_| err())?;
    if p != 2 {
        if sub.is_some() {
            return Err(Error::Parse(format!("{tok:?}: subscripts only occur at p = 2")));
        }
        return Ok(Constituent::odd(p, k, rank, eps));
    }
    match sub {
        None => Err(Error::Parse(format!("{tok:?}: p = 2 needs a type subscript"))),
        Some("II") => Ok(Constituent::even_type2(k, rank, eps)),
        Some("I") => {
            notes.push(format!("{tok}: subscript \"I\" read as oddity 1"));
            Ok(Constituent::even_type1(k, rank, eps, 1))
        }
        Some(t) => {
            let o: i64 = t.parse().map_err(|_| err())?;
            Ok(Constituent::even_type1(k, rank, eps, o.rem_euclid(8) as u8))
        }
    }
}

// ---------------------------------------------------------------------------------------------
// 2-adic orbit search.

#[derive(Clone, Copy)]
enum Piece {
    Q(u64),
    U,
    V,
}

fn piece_constituent(k: u32, piece: Piece) -> Constituent {
    match piece {
        Piece::Q(t) => Constituent::even_type1(k, 1, eps_of_unit(t), (t % 8) as u8),
        Piece::U => Constituent::even_type2(k, 2, 1),
        Piece::V => Constituent::even_type2(k, 2, -1),
    }
}

/// Ways to write `c = piece ⊕ rest`; `None` stands for an empty rest.
fn split(c: &Constituent, piece: Piece) -> Vec<Option<Constituent>> {
    let pc = piece_constituent(c.k, piece);
    if c.rank < pc.rank {
        return vec![];
    }
    let rank = c.rank - pc.rank;
    let eps = c.eps * pc.eps;
    if rank == 0 {
        let same = c.is_type2() == pc.is_type2() && c.oddity == pc.oddity && c.eps == pc.eps;
        return if same { vec![None] } else { vec![] };
    }
    let mut out = Vec::new();
    match (c.oddity, pc.oddity) {
        (None, None) => out.push(Constituent::even_type2(c.k, rank, eps)),
        (None, Some(_)) => {}
        (Some(o), None) => out.push(Constituent::even_type1(c.k, rank, eps, o)),
        (Some(o), Some(t)) => {
            let r = (o + 8 - t) % 8;
            out.push(Constituent::even_type1(c.k, rank, eps, r));
            if r == 0 {
                out.push(Constituent::even_type2(c.k, rank, eps));
            }
        }
    }
    out.into_iter().filter(Constituent::is_valid).map(Some).collect()
}

fn join(rest: Option<Constituent>, k: u32, piece: Piece) -> Constituent {
    let pc = piece_constituent(k, piece);
    match rest {
        Some(r) => r.merge(&pc),
        None => pc,
    }
}

type State = Vec<Constituent>;

fn get(state: &State, k: u32) -> Option<usize> {
    state.iter().position(|c| c.k == k)
}

/// Replaces the constituents at scales `k1 < k2` after swapping pieces `a1 → b1` and `a2 → b2`.
fn swap_pair(state: &State, k1: u32, a1: Piece, b1: Piece, k2: u32, a2: Piece, b2: Piece, out: &mut Vec<State>) {
    let (Some(i1), Some(i2)) = (get(state, k1), get(state, k2)) else { return };
    for r1 in split(&state[i1], a1) {
        for r2 in split(&state[i2], a2) {
            let mut s = state.clone();
            s[i1] = join(r1, k1, b1);
            s[i2] = join(r2, k2, b2);
            if s[i1].is_valid() && s[i2].is_valid() {
                out.push(s);
            }
        }
    }
}

const UNITS: [u64; 4] = [1, 3, 5, 7];

fn neighbours(state: &State) -> Vec<State> {
    let mut out = Vec::new();
    for c in state {
        let k = c.k;
        for &t in &UNITS {
            let t5 = (5 * t) % 8;
            // V(2^k) ⊕ q_t(2^{k+1}) ≅ U(2^k) ⊕ q_{5t}(2^{k+1}), in both directions.
            swap_pair(state, k, Piece::V, Piece::U, k + 1, Piece::Q(t), Piece::Q(t5), &mut out);
            swap_pair(state, k, Piece::U, Piece::V, k + 1, Piece::Q(t), Piece::Q(t5), &mut out);
            // q_t(2^k) ⊕ V(2^{k+1}) ≅ q_{5t}(2^k) ⊕ U(2^{k+1}).
            swap_pair(state, k, Piece::Q(t), Piece::Q(t5), k + 1, Piece::V, Piece::U, &mut out);
            swap_pair(state, k, Piece::Q(t), Piece::Q(t5), k + 1, Piece::U, Piece::V, &mut out);
            for &t2 in &UNITS {
                let a = (t + 2 * t2) % 8;
                let b = (5 * (t2 as i64 - 2 * t as i64)).rem_euclid(8) as u64;
                // q_t(2^k) ⊕ q_{t2}(2^{k+1}) ≅ q_{t+2t2}(2^k) ⊕ q_{5(t2-2t)}(2^{k+1}), both ways.
                swap_pair(state, k, Piece::Q(t), Piece::Q(a), k + 1, Piece::Q(t2), Piece::Q(b), &mut out);
                swap_pair(state, k, Piece::Q(a), Piece::Q(t), k + 1, Piece::Q(b), Piece::Q(t2), &mut out);
                // q_t(2^k) ⊕ q_{t2}(2^{k+2}) ≅ q_{5t}(2^k) ⊕ q_{5t2}(2^{k+2}).
                swap_pair(state, k, Piece::Q(t), Piece::Q(t5), k + 2, Piece::Q(t2), Piece::Q((5 * t2) % 8), &mut out);
            }
        }
        if k == 1 {
            // q_t(2) ≅ q_{5t}(2) for discriminant forms.
            for &t in &UNITS {
                if let Some(i) = get(state, 1) {
                    for r in split(&state[i], Piece::Q(t)) {
                        let mut s = state.clone();
                        s[i] = join(r, 1, Piece::Q((5 * t) % 8));
                        if s[i].is_valid() {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out
}

fn two_adic_orbit(start: &[Constituent]) -> Vec<State> {
    let mut start: State = start.to_vec();
    start.sort_by_key(|c| c.k);
    let mut seen: HashSet<State> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for n in neighbours(&s) {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen.into_iter().collect()
}

fn orbit_key(s: &State) -> Vec<(u32, u8, u8)> {
    s.iter().map(|c| (c.k, u8::from(c.eps == -1), c.oddity.map_or(0, |o| o + 1))).collect()
}

// ---------------------------------------------------------------------------------------------
// Symbols from explicit data.

fn constituents_from_blocks(p: u64, blocks: &[Block], negate_scale: bool) -> Vec<Constituent> {
    let mut out = Vec::new();
    for b in blocks {
        let k = if negate_scale { -b.k } else { b.k };
        assert!(k >= 0, "negative scale in Jordan splitting");
        let k = k as u32;
        let det = b.det();
        let c = if p == 2 {
            let eps = eps_of_unit(unit_residue(&det, 8));
            if b.size() == 1 {
                Constituent::even_type1(k, 1, eps, unit_residue(&det, 8) as u8)
            } else {
                Constituent::even_type2(k, 2, eps)
            }
        } else {
            Constituent::odd(p, k, b.size() as u32, legendre_rat(&det, p))
        };
        out.push(c);
    }
    out
}

/// Jordan constituents of `L ⊗ Z_p`, including the unimodular one at scale 1.
pub fn jordan_decompose(l: &Lattice, p: u64) -> Result<Vec<Constituent>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let blocks = jordan_blocks(&l.gram().to_rational(), p, Mode::Lattice);
    let sym = FqfSymbol::from_constituents(constituents_from_blocks(p, &blocks, false));
    Ok(sym.parts)
}

/// Symbol of an explicit finite quadratic form.
pub fn fqf_symbol(q: &FiniteQuadraticForm) -> FqfSymbol {
    let mut parts = Vec::new();
    for p in q.primes() {
        let qp = q.p_part(p);
        let blocks = jordan_blocks(&qp.value_matrix(), p, Mode::FiniteForm);
        let found = constituents_from_blocks(p, &blocks, true);
        assert_eq!(
            found.iter().map(|c| c.rank as usize).sum::<usize>(),
            qp.rank(),
            "Jordan splitting of the {p}-part did not exhaust the group"
        );
        parts.extend(found);
    }
    FqfSymbol::from_constituents(parts)
}

/// Signature modulo 8 of an explicit finite quadratic form.
pub fn signature_mod8(q: &FiniteQuadraticForm) -> u8 {
    fqf_symbol(q).signature_mod8()
}

/// Signature together with the symbol of the discriminant form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenusSymbol {
    pub signature: (usize, usize),
    pub form: FqfSymbol,
}

impl GenusSymbol {
    pub fn rank(&self) -> usize {
        self.signature.0 + self.signature.1
    }

    pub fn normalize(&self) -> Self {
        GenusSymbol { signature: self.signature, form: self.form.normalize() }
    }
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "II_{{{},{}}}({})", self.signature.0, self.signature.1, self.form)
    }
}

/// Genus symbol of an even lattice: signature plus all constituents at scales `p^k`, `k ≥ 1`.
pub fn genus_symbol(l: &Lattice) -> Result<GenusSymbol> {
    if !l.is_even() {
        return Err(Error::OddLattice);
    }
    let mut parts = Vec::new();
    for p in prime_divisors(&(l.det() * BigInt::from(2))) {
        parts.extend(jordan_decompose(l, p)?.into_iter().filter(|c| c.k >= 1));
    }
    Ok(GenusSymbol { signature: l.signature(), form: FqfSymbol::from_constituents(parts) })
}

/// Result of comparing two finite quadratic forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Decision by normalized symbols.
    pub by_symbol: bool,
    /// Decision by explicit search, when the group was small enough.
    pub by_search: Option<bool>,
    /// Images of the generators of the first form, as coordinates in the second.
    pub witness: Option<Vec<Vec<u64>>>,
}

/// Default group-order ceiling for the explicit isometry cross-check.
pub const SEARCH_BUDGET: u64 = 4096;

/// Decides `q1 ≅ q2` by invariant factors and normalized symbols; for groups of order at most
/// `budget` an explicit isometry is searched as well and returned as a witness.
pub fn fqf_equivalent(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm, budget: u64) -> Equivalence {
    let same_group = q1.orders() == q2.orders();
    let by_symbol = same_group && fqf_symbol(q1).equivalent(&fqf_symbol(q2));
    let mut by_search = None;
    let mut witness = None;
    if let (Ok(a), Ok(b)) = (q1.to_small(budget), q2.to_small(budget)) {
        let found = if same_group { a.find_isometry(&b) } else { None };
        by_search = Some(found.is_some());
        witness = found.map(|imgs| imgs.iter().map(|&y| b.coords(y)).collect());
    }
    Equivalence { equivalent: by_search.unwrap_or(by_symbol), by_symbol, by_search, witness }
}

/// Gluing test on symbols: `M` embeds primitively with orthogonal complement in the genus of `K`
/// into an even unimodular lattice of the given signature.
pub fn embedding_compatible_symbols(
    sig_m: (usize, usize),
    q_m: &FqfSymbol,
    sig_k: (usize, usize),
    q_k: &FqfSymbol,
    ambient: (usize, usize),
) -> bool {
    let sig_ok = sig_m.0 + sig_k.0 == ambient.0 && sig_m.1 + sig_k.1 == ambient.1;
    let unimodular_ok = (ambient.0 as i64 - ambient.1 as i64).rem_euclid(8) == 0;
    sig_ok && unimodular_ok && q_k.equivalent(&q_m.negate())
}

/// As [`embedding_compatible_symbols`] for explicit lattices.
pub fn embedding_compatible(m: &Lattice, k: &Lattice, ambient: (usize, usize)) -> Result<bool> {
    let gm = genus_symbol(m)?;
    let gk = genus_symbol(k)?;
    let sig_ok = gm.signature.0 + gk.signature.0 == ambient.0 && gm.signature.1 + gk.signature.1 == ambient.1;
    if !sig_ok || (ambient.0 as i64 - ambient.1 as i64).rem_euclid(8) != 0 {
        return Ok(false);
    }
    let qm = m.discriminant_form()?;
    let qk = k.discriminant_form()?;
    Ok(fqf_equivalent(&qk, &qm.negate(), SEARCH_BUDGET).equivalent)
}

/// Outcome of the uniqueness criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    /// All hypotheses hold, so the genus has one class.
    Unique,
    /// Some hypothesis fails; nothing is concluded.
    Inconclusive,
}

/// Checks the hypotheses of the uniqueness theorem for the genus `(t₊, t₋, q)`.
pub fn uniqueness(signature: (usize, usize), q: &FqfSymbol) -> Uniqueness {
    let (tp, tm) = signature;
    let rank = (tp + tm) as u32;
    if tp < 1 || tm < 1 || rank < 3 {
        return Uniqueness::Inconclusive;
    }
    for p in q.primes() {
        if rank >= q.length(p) + 2 {
            continue;
        }
        let parts: Vec<&Constituent> = q.at_prime(p).collect();
        let split = if p != 2 {
            parts.iter().any(|c| c.rank >= 2)
        } else {
            parts.iter().any(|c| (c.is_type2() && c.rank >= 2) || (!c.is_type2() && c.rank >= 3))
                || parts.iter().any(|c| {
                    !c.is_type2() && parts.iter().any(|d| d.k == c.k + 1 && !d.is_type2())
                })
        };
        if !split {
            return Uniqueness::Inconclusive;
        }
    }
    Uniqueness::Unique
}

pub fn unique_in_genus(signature: (usize, usize), q: &FqfSymbol) -> bool {
    uniqueness(signature, q) == Uniqueness::Unique
}

/// Determinant sign and absolute value implied by a genus symbol.
pub fn determinant_of(g: &GenusSymbol) -> BigInt {
    let mut d = g.form.order();
    if g.signature.1 % 2 == 1 {
        d = -d;
    }
    d
}

/// Checks the oddity formula: the symbol signature agrees with `t₊ − t₋` mod 8.
pub fn oddity_formula_holds(g: &GenusSymbol) -> bool {
    let s = (g.signature.0 as i64 - g.signature.1 as i64).rem_euclid(8);
    s == g.form.signature_mod8() as i64
}

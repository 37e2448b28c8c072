//! Isometry groups of definite lattices, orthogonal groups of discriminant forms, and the
//! counts of connected moduli components built from them.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqf::{images_to_matrix, FiniteQuadraticForm, SmallForm};
use crate::lattice::Lattice;
use crate::rootsys::{root_system, short_vectors, weyl_order};
use crate::{IntMatrix, Matrix};

/// Largest rank accepted by [`isometry_group`].
pub const RANK_BOUND: usize = 8;
/// Default cap on the number of isometries enumerated.
pub const ISOMETRY_BUDGET: usize = 200_000;
/// Default cap on `|O(q)|`.
pub const OQ_BUDGET: usize = 10_000;

/// The full isometry group of a definite lattice, listed element by element.
#[derive(Clone, Debug)]
pub struct IsometryGroup {
    /// All isometries as matrices acting on coordinate columns, sorted.
    pub elements: Vec<IntMatrix>,
    pub generators: Vec<IntMatrix>,
    pub proper_order: usize,
    pub weyl_order: BigInt,
    /// Elements of the Weyl group generated by the reflections in roots.
    pub weyl: Vec<IntMatrix>,
}

impl IsometryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// `|W⁺| = |W ∩ SO|`.
    pub fn weyl_proper_order(&self) -> BigInt {
        if self.weyl_order > BigInt::one() {
            &self.weyl_order / 2
        } else {
            BigInt::one()
        }
    }
}

fn det(m: &IntMatrix) -> BigInt {
    crate::linalg::determinant(m).expect("square matrix")
}

/// Sign `+1`/`-1` of a definite lattice and its positive definite Gram matrix.
fn positive_gram(l: &Lattice) -> Result<(i64, IntMatrix)> {
    if l.is_positive_definite() {
        Ok((1, l.gram().clone()))
    } else if l.is_negative_definite() {
        Ok((-1, -l.gram()))
    } else {
        Err(Error::Indefinite)
    }
}

/// Every isometry of a definite lattice, by backtracking over images of basis vectors.
/// Basis vectors with the fewest candidate images are placed first.
pub fn isometry_group(l: &Lattice, budget: usize) -> Result<IsometryGroup> {
    let n = l.rank();
    if n > RANK_BOUND {
        return Err(Error::Dimension(format!("rank {n} exceeds the isometry search bound {RANK_BOUND}")));
    }
    let (sign, g) = positive_gram(l)?;
    let mut cands = Vec::with_capacity(n);
    for i in 0..n {
        let d = g.get(i, i).clone();
        cands.push(short_vectors(&g, &d, &d, budget)?);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (cands[i].len(), i));

    // Precomputed G·v for each candidate, so inner products are dot products.
    let gv: Vec<Vec<Vec<BigInt>>> = cands.iter().map(|cs| cs.iter().map(|v| g.mul_vec(v)).collect()).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut elements = Vec::new();
    let mut over = false;
    fn rec(
        depth: usize,
        order: &[usize],
        cands: &[Vec<Vec<BigInt>>],
        gv: &[Vec<Vec<BigInt>>],
        g: &IntMatrix,
        chosen: &mut Vec<usize>,
        out: &mut Vec<IntMatrix>,
        budget: usize,
        over: &mut bool,
    ) {
        if *over {
            return;
        }
        let n = order.len();
        if depth == n {
            if out.len() >= budget {
                *over = true;
                return;
            }
            let mut cols = vec![Vec::new(); n];
            for (k, &i) in order.iter().enumerate() {
                cols[i] = cands[i][chosen[k]].clone();
            }
            out.push(Matrix::from_cols(n, &cols));
            return;
        }
        let i = order[depth];
        'cand: for (c, v) in cands[i].iter().enumerate() {
            for (k, &j) in order[..depth].iter().enumerate() {
                let w = &gv[j][chosen[k]];
                let ip: BigInt = v.iter().zip(w).map(|(a, b)| a * b).sum();
                if &ip != g.get(i, j) {
                    continue 'cand;
                }
            }
            chosen.push(c);
            rec(depth + 1, order, cands, gv, g, chosen, out, budget, over);
            chosen.pop();
        }
    }
    rec(0, &order, &cands, &gv, &g, &mut chosen, &mut elements, budget, &mut over);
    if over {
        return Err(Error::Budget(budget as u64));
    }
    elements.sort_by(|a, b| a.entries().cmp(b.entries()));
    let proper_order = elements.iter().filter(|m| det(m).is_positive()).count();

    let rs = root_system(&Lattice::new(g.clone())?.rescale(sign)?)?;
    let weyl_order = weyl_order(&rs.kind);
    let reflections: Vec<IntMatrix> = rs.simple.iter().map(|r| reflection(&g, r)).collect();
    let weyl = closure(&reflections, n, budget)?;
    if BigInt::from(weyl.len()) != weyl_order {
        return Err(Error::Invalid(format!(
            "Weyl group of type {} has {} elements by generation, {} by formula",
            rs.kind,
            weyl.len(),
            weyl_order
        )));
    }
    let generators = minimal_generators(&elements, n);
    Ok(IsometryGroup { elements, generators, proper_order, weyl_order, weyl })
}

/// Reflection `x ↦ x − (x·r) r` in a root of norm 2, as a coordinate matrix.
fn reflection(g: &IntMatrix, r: &[BigInt]) -> IntMatrix {
    let n = r.len();
    let gr = g.mul_vec(r);
    let two = BigInt::from(2);
    let nr: BigInt = r.iter().zip(&gr).map(|(a, b)| a * b).sum();
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j) - &two * &r[i] * &gr[j] / &nr;
            m.set(i, j, v);
        }
    }
    m
}

/// All products of the generators, by breadth-first closure.
fn closure(gens: &[IntMatrix], n: usize, budget: usize) -> Result<Vec<IntMatrix>> {
    let id = IntMatrix::identity(n);
    let mut seen: HashSet<IntMatrix> = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for s in gens {
            let h = &elems[i] * s;
            if seen.insert(h.clone()) {
                if elems.len() >= budget {
                    return Err(Error::Budget(budget as u64));
                }
                elems.push(h);
            }
        }
        i += 1;
    }
    elems.sort_by(|a, b| a.entries().cmp(b.entries()));
    Ok(elems)
}

/// Greedy generating set: scan sorted elements, keep those outside the span so far.
fn minimal_generators(elements: &[IntMatrix], n: usize) -> Vec<IntMatrix> {
    let mut gens: Vec<IntMatrix> = Vec::new();
    let mut span: HashSet<IntMatrix> = HashSet::from([IntMatrix::identity(n)]);
    for e in elements {
        if span.len() == elements.len() {
            break;
        }
        if !span.contains(e) {
            gens.push(e.clone());
            span = closure(&gens, n, elements.len() + 1).expect("subgroup of a finite group").into_iter().collect();
        }
    }
    gens
}

/// The orthogonal group of a finite quadratic form, listed by generator images.
#[derive(Clone, Debug)]
pub struct FqfGroup {
    pub form: SmallForm,
    /// Each element as the images of the group generators, sorted.
    pub elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FqfGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, images: &[usize]) -> bool {
        self.index.contains_key(images)
    }

    /// Elements as integer matrices, one row per generator image, modulo the invariant factors.
    pub fn matrices(&self) -> Vec<IntMatrix> {
        self.elements.iter().map(|e| images_to_matrix(&self.form, e)).collect()
    }

    /// Greedy generating set: scan the sorted elements, keeping those outside the span so far.
    pub fn generators(&self) -> Vec<Vec<usize>> {
        let mut gens: Vec<Vec<usize>> = Vec::new();
        let mut span: HashSet<Vec<usize>> = HashSet::from([self.form.identity_images()]);
        for e in &self.elements {
            if span.len() == self.order() {
                break;
            }
            if !span.contains(e) {
                gens.push(e.clone());
                span = self
                    .form
                    .generated_subgroup(&gens, self.order() + 1)
                    .expect("subgroup of a finite group")
                    .into_iter()
                    .collect();
            }
        }
        gens
    }

    /// Converts matrices of generator-image coordinates back to images.
    pub fn images_from_matrix(&self, m: &IntMatrix) -> Result<Vec<usize>> {
        let r = self.form.rank();
        if m.rows() != r || m.cols() != r {
            return Err(Error::Dimension(format!("expected a {r}×{r} image matrix")));
        }
        Ok((0..r)
            .map(|i| {
                let c: Vec<u64> = m
                    .row(i)
                    .iter()
                    .zip(self.form.orders())
                    .map(|(x, &d)| x.mod_floor(&BigInt::from(d)).to_u64().expect("reduced"))
                    .collect();
                self.form.index(&c)
            })
            .collect())
    }

    fn position(&self, images: &[usize]) -> Option<usize> {
        self.index.get(images).copied()
    }
}

/// All automorphisms of `q`, by backtracking over generator images.
pub fn oq_group(q: &FiniteQuadraticForm, budget: usize) -> Result<FqfGroup> {
    let small = q.to_small(u64::MAX)?;
    let mut elements = small.automorphisms(budget)?;
    elements.sort();
    if small.size() <= 1024 {
        if let Some(bad) = elements.iter().find(|e| !small.is_automorphism(e)) {
            return Err(Error::Invalid(format!("generator images {bad:?} do not preserve q")));
        }
    }
    let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    Ok(FqfGroup { form: small, elements, index })
}

/// Which part of `O(L)` to push into `O(q_L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgroup {
    Full,
    Proper,
}

/// Images of lattice isometries in `O(q_L)`, computed on the discriminant generators.
pub struct DiscriminantAction {
    form: SmallForm,
    coords: crate::lattice::DualCoordinates,
}

impl DiscriminantAction {
    pub fn new(l: &Lattice) -> Result<Self> {
        let (q, coords) = l.disc_generators();
        Ok(DiscriminantAction { form: q.to_small(u64::MAX)?, coords })
    }

    pub fn form(&self) -> &SmallForm {
        &self.form
    }

    /// `π(g)` as generator images.
    pub fn image(&self, g: &IntMatrix) -> Vec<usize> {
        let gq = g.to_rational();
        (0..self.form.rank())
            .map(|i| {
                let v = gq.mul_vec(self.coords.generator(i));
                let c: Vec<u64> = self.coords.coords(&v).iter().map(|x| x.to_u64().expect("reduced coordinate")).collect();
                self.form.index(&c)
            })
            .collect()
    }

    pub fn is_trivial(&self, g: &IntMatrix) -> bool {
        self.image(g) == self.form.identity_images()
    }
}

/// Order of `π(O(L))` or `π(O⁺(L))` in `O(q_L)`.
pub fn image_in_oq(l: &Lattice, which: Subgroup, budget: usize) -> Result<usize> {
    let group = isometry_group(l, budget)?;
    image_of_group(l, &group, which)
}

fn image_of_group(l: &Lattice, group: &IsometryGroup, which: Subgroup) -> Result<usize> {
    let act = DiscriminantAction::new(l)?;
    let images: HashSet<Vec<usize>> = group
        .elements
        .iter()
        .filter(|g| which == Subgroup::Full || det(g).is_positive())
        .map(|g| act.image(g))
        .collect();
    Ok(images.len())
}

/// Checks element-wise that the kernel of `π: O(L) → O(q_L)` is exactly `W(L)`.
pub fn kernel_is_weyl(l: &Lattice, group: &IsometryGroup) -> Result<bool> {
    let act = DiscriminantAction::new(l)?;
    let kernel: HashSet<&IntMatrix> = group.elements.iter().filter(|g| act.is_trivial(g)).collect();
    let weyl: HashSet<&IntMatrix> = group.weyl.iter().collect();
    Ok(kernel == weyl)
}

/// Everything entering the count of strong moduli components for a definite `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongCount {
    pub oq_order: usize,
    pub o_order: usize,
    pub o_plus_order: usize,
    pub weyl_order: String,
    pub weyl_plus_order: String,
    pub kernel_is_weyl: bool,
    pub ms: usize,
}

/// `M_s = |O(q_T)|·|W⁺(T)| / |O⁺(T)|` for a definite `T` of rank below 8.
pub fn strong_component_count(t: &Lattice, budget: usize) -> Result<StrongCount> {
    if t.rank() >= 8 {
        return Err(Error::Dimension(format!("rank {} is not below 8", t.rank())));
    }
    let group = isometry_group(t, budget)?;
    let oq = oq_group(&t.discriminant_form()?, OQ_BUDGET.max(budget))?;
    let wp = group.weyl_proper_order();
    let num = BigInt::from(oq.order()) * &wp;
    let den = BigInt::from(group.proper_order);
    let (ms, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::Invalid(format!("|O(q_T)|·|W⁺| = {num} is not divisible by |O⁺(T)| = {den}")));
    }
    Ok(StrongCount {
        oq_order: oq.order(),
        o_order: group.order(),
        o_plus_order: group.proper_order,
        weyl_order: group.weyl_order.to_string(),
        weyl_plus_order: wp.to_string(),
        kernel_is_weyl: kernel_is_weyl(t, &group)?,
        ms: ms.to_usize().expect("small count"),
    })
}

/// Number of double cosets `A \ O(q) / B` for subgroups given by generator images.
pub fn double_coset_count(q: &FiniteQuadraticForm, gens_a: &[Vec<usize>], gens_b: &[Vec<usize>], budget: usize) -> Result<usize> {
    let group = oq_group(q, budget)?;
    for g in gens_a.iter().chain(gens_b) {
        if !group.contains(g) {
            return Err(Error::Invalid(format!("{g:?} is not an element of O(q)")));
        }
    }
    let f = &group.form;
    let n = group.order();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, g) in group.elements.iter().enumerate() {
        let moves = gens_a.iter().map(|a| f.compose(a, g)).chain(gens_b.iter().map(|b| f.compose(g, b)));
        for h in moves {
            let j = group.position(&h).expect("O(q) is closed");
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    Ok((0..n).filter(|&i| find(&mut parent, i) == i).count())
}

/// Action of a lattice isometry on the discriminant group, for callers holding only matrices.
pub fn discriminant_images(l: &Lattice, gens: &[IntMatrix]) -> Result<Vec<Vec<usize>>> {
    let act = DiscriminantAction::new(l)?;
    for g in gens {
        if g.rows() != l.rank() || l.gram().congruence(g) != *l.gram() {
            return Err(Error::Invalid("matrix is not an isometry of the lattice".into()));
        }
    }
    Ok(gens.iter().map(|g| act.image(g)).collect())
}

//! The 23 Niemeier lattices with roots, built as glue-code overlattices of their root lattices,
//! and the marking pipeline `S = [N_G, α]_pr ⊂ N`.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genus::{fqf_equivalent, genus_symbol, GenusSymbol, SEARCH_BUDGET};
use crate::lattice::{Lattice, Sublattice};
use crate::linalg::{inverse, lll_gram};
use crate::rootsys::{root_system, vectors_of_norm_budget, Component, RootSystemType, ENUMERATION_BUDGET};
use crate::{IntMatrix, Matrix, RatMatrix};

/// Root system and glue generators, with glue classes labelled as in the standard tables:
/// `A_n: i ∈ Z/(n+1)`, `D_n: 0..3` (1 spinor, 2 vector, 3 cospinor), `E_6: 0..2`, `E_7: 0..1`.
fn glue_table(j: usize) -> Option<(&'static str, Vec<Vec<u32>>)> {
    let g = |s: &str| s.chars().map(|c| c.to_digit(10).unwrap()).collect::<Vec<u32>>();
    let one = |s: &str| vec![g(s)];
    let row = match j {
        1 => ("D_24", one("1")),
        2 => ("D_16+E_8", one("10")),
        3 => ("3E_8", vec![]),
        4 => ("A_24", one("5")),
        5 => ("2D_12", vec![g("12"), g("21")]),
        6 => ("A_17+E_7", one("31")),
        7 => ("D_10+2E_7", vec![g("110"), g("301")]),
        8 => ("A_15+D_9", one("21")),
        9 => ("3D_8", cyclic("", "122", "")),
        10 => ("2A_12", one("15")),
        11 => ("A_11+D_7+E_6", one("111")),
        12 => ("4E_6", cyclic("1", "012", "")),
        13 => ("2A_9+D_6", vec![g("240"), g("501"), g("053")]),
        14 => ("4D_6", even_permutations_0123()),
        15 => ("3A_8", cyclic("", "114", "")),
        16 => ("2A_7+2D_5", vec![g("1112"), g("1721")]),
        17 => ("4A_6", cyclic("1", "216", "")),
        18 => {
            let mut v = cyclic("2", "024", "0");
            v.extend([g("33001"), g("30302"), g("30033")]);
            ("4A_5+D_4", v)
        }
        19 => {
            // The hexacode is F_4-linear; the scalar ω contributes the extra word 222222.
            let mut v = vec![g("111111"), g("222222")];
            v.extend(cyclic("0", "02332", ""));
            ("6D_4", v)
        }
        20 => ("6A_4", cyclic("1", "01441", "")),
        21 => ("8A_3", cyclic("3", "2001011", "")),
        22 => ("12A_2", cyclic("2", "11211122212", "")),
        23 => ("24A_1", cyclic("1", "00000101001100110101111", "")),
        _ => return None,
    };
    Some(row)
}

/// All words `prefix · shift(cycle) · suffix` over the cyclic shifts of `cycle`.
fn cyclic(prefix: &str, cycle: &str, suffix: &str) -> Vec<Vec<u32>> {
    let digits = |s: &str| s.chars().map(|c| c.to_digit(10).unwrap()).collect::<Vec<u32>>();
    let c = digits(cycle);
    (0..c.len())
        .map(|s| {
            let mut w = digits(prefix);
            w.extend(c[s..].iter().chain(&c[..s]));
            w.extend(digits(suffix));
            w
        })
        .collect()
}

fn even_permutations_0123() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for a in 0..4u32 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                    if distinct && inversions % 2 == 0 {
                        out.push(p.to_vec());
                    }
                }
            }
        }
    }
    out
}

/// The Bourbaki node carrying the glue class `label` of a component.
fn glue_node(c: Component, label: u32) -> Result<Option<usize>> {
    let bad = || Error::BadGlue(format!("no glue class {label} on {c}"));
    Ok(match (c, label) {
        (_, 0) => None,
        (Component::A(n), i) if i <= n => Some(i as usize),
        (Component::D(n), 1) => Some(n as usize),
        (Component::D(_), 2) => Some(1),
        (Component::D(n), 3) => Some(n as usize - 1),
        (Component::E(6), 1) => Some(1),
        (Component::E(6), 2) => Some(6),
        (Component::E(7), 1) => Some(7),
        _ => return Err(bad()),
    })
}

/// Static data for one Niemeier lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiemeierSpec {
    pub index: usize,
    pub kind: RootSystemType,
    pub glue: Vec<Vec<u32>>,
}

pub fn niemeier_spec(j: usize) -> Result<NiemeierSpec> {
    let (kind, glue) = glue_table(j).ok_or_else(|| {
        Error::Invalid(format!("Niemeier index {j} outside 1..=23 (the Leech lattice, 24, has no roots)"))
    })?;
    Ok(NiemeierSpec { index: j, kind: kind.parse()?, glue })
}

/// A Niemeier lattice together with its fixed basis of simple roots.
#[derive(Clone, Debug)]
pub struct Niemeier {
    pub index: usize,
    pub kind: RootSystemType,
    /// The lattice in an LLL-reduced basis.
    pub lattice: Lattice,
    /// Columns: the lattice basis in root-lattice coordinates.
    pub basis: RatMatrix,
    /// Columns: the simple roots `P(N)` in lattice coordinates, components in the order of
    /// `kind`, nodes in Bourbaki order.
    pub simple_roots: IntMatrix,
}

impl Niemeier {
    /// Simple root `i` (0-based) in lattice coordinates.
    pub fn root(&self, i: usize) -> Vec<BigInt> {
        self.simple_roots.col(i)
    }

    /// Component index and 1-based Bourbaki node of the 0-based simple root `i`.
    pub fn node(&self, i: usize) -> (usize, usize) {
        let mut off = 0;
        for (k, c) in self.kind.components().iter().enumerate() {
            let r = c.rank() as usize;
            if i < off + r {
                return (k, i - off + 1);
            }
            off += r;
        }
        panic!("simple root index {i} out of range")
    }

    /// The isometry of `N` permuting the simple roots by `perm` (0-based images), if it
    /// preserves `N`, as a matrix in lattice coordinates.
    pub fn permutation_isometry(&self, perm: &[usize]) -> Option<IntMatrix> {
        let n = self.simple_roots.rows();
        if perm.len() != n || perm.iter().collect::<BTreeSet<_>>().len() != n || perm.iter().any(|&p| p >= n) {
            return None;
        }
        let mut p = RatMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            p.set(j, i, BigRational::one());
        }
        let binv = inverse(&self.basis)?;
        let m = &(&binv * &p) * &self.basis;
        let m = m.to_integer()?;
        (self.lattice.gram().congruence(&m) == *self.lattice.gram()).then_some(m)
    }
}

/// Builds `N_j` for `1 ≤ j ≤ 23`.
pub fn build_niemeier(j: usize) -> Result<Niemeier> {
    let spec = niemeier_spec(j)?;
    let root = spec.kind.lattice()?;
    let n = root.rank();
    let dual = inverse(&root.gram().to_rational()).expect("root lattices are nondegenerate");
    let comps = spec.kind.components();
    let mut offsets = Vec::with_capacity(comps.len());
    let mut off = 0;
    for c in comps {
        offsets.push(off);
        off += c.rank() as usize;
    }
    let mut glue = Vec::with_capacity(spec.glue.len());
    for word in &spec.glue {
        if word.len() != comps.len() {
            return Err(Error::BadGlue(format!("glue word {word:?} for {} components", comps.len())));
        }
        let mut v = vec![BigRational::zero(); n];
        for (k, (&c, &label)) in comps.iter().zip(word).enumerate() {
            if let Some(node) = glue_node(c, label)? {
                let col = offsets[k] + node - 1;
                for (i, x) in v.iter_mut().enumerate() {
                    *x += dual.get(i, col);
                }
            }
        }
        glue.push(v);
    }
    let (lat, basis) = root.overlattice_with_basis(&glue)?;
    let (reduced, u) = lll_gram(&-lat.gram())?;
    let basis = &basis * &u.to_rational();
    let lattice = Lattice::new(-&reduced)?;
    let simple_roots = inverse(&basis)
        .and_then(|m| m.to_integer())
        .ok_or_else(|| Error::BadGlue("root lattice not contained in the overlattice".into()))?;
    Ok(Niemeier { index: j, kind: spec.kind, lattice, basis, simple_roots })
}

/// Diagnostic checks of a candidate Niemeier lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NiemeierReport {
    pub even: bool,
    pub unimodular: bool,
    pub rank: usize,
    pub negative_definite: bool,
    pub root_count: Option<usize>,
    pub root_type: Option<String>,
}

impl NiemeierReport {
    pub fn passes(&self) -> bool {
        self.even && self.unimodular && self.rank == 24 && self.negative_definite
    }
}

pub fn verify_niemeier(l: &Lattice) -> Result<NiemeierReport> {
    let negative_definite = l.is_negative_definite();
    let (root_count, root_type) = if negative_definite {
        let rs = root_system(l)?;
        (Some(rs.roots.len()), Some(rs.kind.to_string()))
    } else {
        (None, None)
    };
    Ok(NiemeierReport {
        even: l.is_even(),
        unimodular: l.det().abs().is_one(),
        rank: l.rank(),
        negative_definite,
        root_count,
        root_type,
    })
}

// ---------------------------------------------------------------------------------------------
// Markings.

/// `{"j": 23, "orbits": [[1, 2], ...], "alpha": 5}` with 1-based simple-root indices. Indices
/// absent from `orbits` are fixed points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkingInput {
    pub j: usize,
    pub orbits: Vec<Vec<usize>>,
    pub alpha: usize,
}

/// Output of the marking pipeline.
#[derive(Clone, Debug)]
pub struct MarkingResult {
    pub coinvariant: Sublattice,
    pub coinvariant_genus: GenusSymbol,
    pub s: Sublattice,
    pub s_genus: GenusSymbol,
    pub complement: Sublattice,
    pub complement_genus: GenusSymbol,
    pub complement_roots: RootSystemType,
    pub minus4_count: usize,
    /// Named consistency checks with their outcomes.
    pub checks: Vec<(String, bool)>,
}

impl MarkingResult {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

/// Class of a node under the automorphisms of its Dynkin diagram.
fn node_class(c: Component, node: usize) -> usize {
    let n = c.rank() as usize;
    match c {
        Component::A(_) => node.min(n + 1 - node),
        Component::D(4) if node != 2 => 1,
        Component::D(_) if node == n => n - 1,
        Component::E(6) if node == 6 => 1,
        Component::E(6) if node == 5 => 3,
        _ => node,
    }
}

/// Completes a list of orbits (1-based) to a 0-based partition of all simple roots, rejecting
/// overlaps, out-of-range indices and orbits mixing inequivalent nodes.
pub fn complete_partition(n: &Niemeier, orbits: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let size = n.simple_roots.cols();
    let mut seen = vec![false; size];
    let mut out = Vec::new();
    for orbit in orbits {
        if orbit.is_empty() {
            return Err(Error::Invalid("empty orbit".into()));
        }
        let mut o = Vec::with_capacity(orbit.len());
        for &i in orbit {
            if i == 0 || i > size {
                return Err(Error::Invalid(format!("root index {i} outside 1..={size}")));
            }
            if std::mem::replace(&mut seen[i - 1], true) {
                return Err(Error::Invalid(format!("root index {i} occurs in two orbits")));
            }
            o.push(i - 1);
        }
        let context = |i: usize| {
            let (k, node) = n.node(i);
            let c = n.kind.components()[k];
            (c, node_class(c, node))
        };
        let first = context(o[0]);
        if o.iter().any(|&i| context(i) != first) {
            return Err(Error::Invalid(format!("orbit {orbit:?} mixes simple roots no isometry can exchange")));
        }
        out.push(o);
    }
    out.extend((0..size).filter(|&i| !seen[i]).map(|i| vec![i]));
    Ok(out)
}

/// Coinvariant lattice: the orthogonal complement of the span of the orbit sums.
pub fn coinvariant_lattice(n: &Niemeier, orbits: &[Vec<usize>]) -> Result<Sublattice> {
    let parts = complete_partition(n, orbits)?;
    let rank = n.lattice.rank();
    let sums: Vec<Vec<BigInt>> = parts
        .iter()
        .map(|o| {
            o.iter().fold(vec![BigInt::zero(); rank], |acc, &i| acc.iter().zip(n.root(i)).map(|(a, b)| a + b).collect())
        })
        .collect();
    let fixed = Sublattice::spanned_by(n.lattice.clone(), &Matrix::from_cols(rank, &sums))?;
    Ok(fixed.orthogonal_complement())
}

pub fn marking_pipeline(input: &MarkingInput) -> Result<MarkingResult> {
    let n = build_niemeier(input.j)?;
    marking_on(&n, &input.orbits, input.alpha, ENUMERATION_BUDGET)
}

/// The pipeline on an already built lattice; `alpha` is 1-based.
pub fn marking_on(n: &Niemeier, orbits: &[Vec<usize>], alpha: usize, budget: usize) -> Result<MarkingResult> {
    let size = n.simple_roots.cols();
    if alpha == 0 || alpha > size {
        return Err(Error::Invalid(format!("alpha {alpha} outside 1..={size}")));
    }
    let rank = n.lattice.rank();
    let sg = coinvariant_lattice(n, orbits)?;
    let mut cols = sg.basis().to_cols();
    cols.push(n.root(alpha - 1));
    let s = Sublattice::spanned_by(n.lattice.clone(), &Matrix::from_cols(rank, &cols))?.saturate();
    let t = s.orthogonal_complement();

    let sg_lat = sg.lattice()?;
    let s_lat = s.lattice()?;
    let t_lat = t.lattice()?;
    let sg_roots = if sg.rank() == 0 { 0 } else { vectors_of_norm_budget(&sg_lat, -2, budget)?.len() };
    let complement_roots = if t.rank() == 0 { RootSystemType::empty() } else { root_system(&t_lat)?.kind };
    let minus4_count = if t.rank() == 0 { 0 } else { vectors_of_norm_budget(&t_lat, -4, budget)?.len() };
    let sg_perp = if sg.rank() == 0 { None } else { Some(sg.orthogonal_complement().lattice()?) };
    let sg_balanced = sg_perp.is_none_or(|p| p.det().abs() == sg_lat.det().abs());
    let qs = s_lat.discriminant_form()?;
    let qt = t_lat.discriminant_form()?;
    let checks = vec![
        ("coinvariant lattice has no roots".to_string(), sg_roots == 0),
        ("|A_{S_G}| = |A_{S_G^⊥}|".to_string(), sg_balanced),
        ("rank S = rank S_G + 1".to_string(), s.rank() == sg.rank() + 1),
        ("S is primitive".to_string(), s.is_primitive()),
        ("|A_S| = |A_{S^⊥}|".to_string(), s_lat.det().abs() == t_lat.det().abs()),
        ("q_{S^⊥} ≅ −q_S".to_string(), fqf_equivalent(&qt, &qs.negate(), SEARCH_BUDGET).equivalent),
    ];
    Ok(MarkingResult {
        coinvariant_genus: genus_symbol(&sg_lat)?,
        coinvariant: sg,
        s_genus: genus_symbol(&s_lat)?,
        s,
        complement_genus: genus_symbol(&t_lat)?,
        complement: t,
        complement_roots,
        minus4_count,
        checks,
    })
}

// ---------------------------------------------------------------------------------------------
// The binary Golay code carried by N(24A_1).

/// All 4096 words of the glue code of `N_23`, as 24-bit masks (bit `i` is component `i`).
pub fn golay_code() -> Vec<u32> {
    let (_, gens) = glue_table(23).expect("N_23 is tabulated");
    let masks: Vec<u32> = gens.iter().map(|w| w.iter().enumerate().fold(0, |m, (i, &b)| m | (b << i))).collect();
    let mut basis: Vec<u32> = Vec::new();
    for mut m in masks {
        for &b in &basis {
            m = m.min(m ^ b);
        }
        if m != 0 {
            basis.push(m);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut words = vec![0u32];
    for b in basis {
        let more: Vec<u32> = words.iter().map(|w| w ^ b).collect();
        words.extend(more);
    }
    words.sort_unstable();
    words
}

pub fn octads(code: &[u32]) -> Vec<u32> {
    code.iter().copied().filter(|w| w.count_ones() == 8).collect()
}

/// Image of the coordinate set `m` under `perm`.
pub fn permute_mask(perm: &[usize], m: u32) -> u32 {
    (0..24).filter(|&i| m >> i & 1 == 1).fold(0, |acc, i| acc | 1 << perm[i])
}

/// All involutions fixing `octad` pointwise and moving every other point that preserve the
/// code, in lexicographic order of their image lists.
pub fn octad_involutions(code: &[u32], octad: u32) -> Vec<Vec<usize>> {
    let octs: Vec<u32> = octads(code);
    let oct_set: HashSet<u32> = octs.iter().copied().collect();
    let mut perm: Vec<Option<usize>> = (0..24).map(|i| (octad >> i & 1 == 1).then_some(i)).collect();
    let mut out = Vec::new();
    fn rec(perm: &mut Vec<Option<usize>>, octs: &[u32], oct_set: &HashSet<u32>, out: &mut Vec<Vec<usize>>) {
        let assigned: u32 = (0..24).filter(|&i| perm[i].is_some()).fold(0, |m, i| m | 1 << i);
        let full: Vec<usize> = (0..24).map(|i| perm[i].unwrap_or(i)).collect();
        for &o in octs {
            if o & !assigned == 0 && !oct_set.contains(&permute_mask(&full, o)) {
                return;
            }
        }
        let Some(p) = (0..24).find(|&i| perm[i].is_none()) else {
            out.push(full);
            return;
        };
        for q in p + 1..24 {
            if perm[q].is_none() {
                perm[p] = Some(q);
                perm[q] = Some(p);
                rec(perm, octs, oct_set, out);
                perm[p] = None;
                perm[q] = None;
            }
        }
    }
    rec(&mut perm, &octs, &oct_set, &mut out);
    out
}

/// The first code-preserving involution of cycle type `1^8 2^8`, fixing the least octad.
pub fn golay_involution() -> Option<Vec<usize>> {
    octad_subgroup(1).map(|mut g| g.remove(0))
}

/// Generators of an elementary abelian subgroup of order `2^k` (`k ≤ 4`) of the pointwise
/// stabilizer of the least octad, chosen greedily among its involutions. All such subgroups of
/// a given order are conjugate in the full octad stabilizer.
pub fn octad_subgroup(k: usize) -> Option<Vec<Vec<usize>>> {
    let code = golay_code();
    let octad = *octads(&code).iter().min_by_key(|&&o| (0..24).filter(|&i| o >> i & 1 == 1).collect::<Vec<_>>())?;
    let mut gens = Vec::new();
    let mut group: Vec<Vec<usize>> = vec![(0..24).collect()];
    for g in octad_involutions(&code, octad) {
        if gens.len() == k {
            break;
        }
        if group.contains(&g) {
            continue;
        }
        let coset: Vec<Vec<usize>> = group.iter().map(|h| h.iter().map(|&i| g[i]).collect()).collect();
        group.extend(coset);
        gens.push(g);
    }
    (gens.len() == k).then_some(gens)
}

/// Nontrivial orbits of a permutation group on `0..24`, as 1-based marking orbits.
pub fn marking_orbits(gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    orbits_of(gens, 24).into_iter().filter(|o| o.len() > 1).map(|o| o.iter().map(|i| i + 1).collect()).collect()
}

/// Orbits (0-based) of the group generated by the given permutations.
pub fn orbits_of(perms: &[Vec<usize>], size: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; size];
    let mut out = Vec::new();
    for s in 0..size {
        if seen[s] {
            continue;
        }
        let mut orbit = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < orbit.len() {
            for p in perms {
                let t = p[orbit[k]];
                if !seen[t] {
                    seen[t] = true;
                    orbit.push(t);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golay_code_shape() {
        let code = golay_code();
        assert_eq!(code.len(), 4096);
        let mut weights = [0usize; 25];
        for w in &code {
            weights[w.count_ones() as usize] += 1;
        }
        assert_eq!((weights[0], weights[8], weights[12], weights[16], weights[24]), (1, 759, 2576, 759, 1));
    }

    #[test]
    fn even_permutations() {
        assert_eq!(even_permutations_0123().len(), 12);
    }

    #[test]
    fn leech_and_range_rejected() {
        assert!(niemeier_spec(24).is_err());
        assert!(niemeier_spec(0).is_err());
    }

    #[test]
    fn ungated_root_lattice_fails_verification() {
        let r = "24A_1".parse::<RootSystemType>().unwrap().lattice().unwrap();
        let rep = verify_niemeier(&r).unwrap();
        assert!(!rep.unimodular && !rep.passes());
        assert_eq!(r.det().abs(), BigInt::from(2).pow(24));
    }

    #[test]
    fn three_e8_passes() {
        let l = "3E_8".parse::<RootSystemType>().unwrap().lattice().unwrap();
        let rep = verify_niemeier(&l).unwrap();
        assert!(rep.passes());
        assert_eq!(rep.root_count, Some(720));
        assert_eq!(rep.root_type.as_deref(), Some("3E_8"));
    }

    #[test]
    fn partitions_are_validated() {
        let n = build_niemeier(23).unwrap();
        assert!(complete_partition(&n, &[vec![1, 2], vec![2, 3]]).is_err());
        assert!(complete_partition(&n, &[vec![0]]).is_err());
        assert!(complete_partition(&n, &[vec![25]]).is_err());
        assert_eq!(complete_partition(&n, &[vec![1, 2]]).unwrap().len(), 23);
        let n6 = build_niemeier(6).unwrap();
        // A_17 node 1 and E_7 node 1 cannot be exchanged.
        assert!(complete_partition(&n6, &[vec![1, 18]]).is_err());
        assert!(complete_partition(&n6, &[vec![1, 17]]).is_ok());
    }

    #[test]
    fn trivial_group_marking() {
        let n = build_niemeier(23).unwrap();
        assert_eq!(coinvariant_lattice(&n, &[]).unwrap().rank(), 0);
        let r = marking_on(&n, &[], 5, ENUMERATION_BUDGET).unwrap();
        assert_eq!(r.s.rank(), 1);
        assert_eq!(r.s.gram(), IntMatrix::from_i64_rows(&[vec![-2]]));
        assert_eq!(r.complement.rank(), 23);
        assert!(r.all_checks_pass());
    }
}

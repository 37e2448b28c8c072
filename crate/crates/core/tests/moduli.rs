//! Isometry groups, discriminant groups and component counts against brute force.

mod common;

use std::collections::BTreeSet;

use evenlat::linalg::determinant;
use evenlat::moduli::{
    discriminant_images, double_coset_count, image_in_oq, isometry_group, kernel_is_weyl, oq_group, Subgroup,
    ISOMETRY_BUDGET, OQ_BUDGET,
};
use evenlat::rootsys::vectors_of_norm;
use evenlat::tables::transcendental_table;
use evenlat::{IntMatrix, Lattice, Matrix};
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

/// Counts isometries by matching basis images, one norm shell at a time.
fn brute_force_order(l: &Lattice) -> usize {
    let n = l.rank();
    let cands: Vec<Vec<Vec<BigInt>>> = (0..n)
        .map(|i| vectors_of_norm(l, l.gram().get(i, i).try_into().unwrap()).unwrap())
        .collect();
    fn rec(l: &Lattice, cands: &[Vec<Vec<BigInt>>], chosen: &mut Vec<Vec<BigInt>>) -> usize {
        let i = chosen.len();
        if i == cands.len() {
            return 1;
        }
        let mut total = 0;
        for v in &cands[i] {
            if (0..i).all(|j| &l.inner(&chosen[j], v) == l.gram().get(j, i)) {
                chosen.push(v.clone());
                total += rec(l, cands, chosen);
                chosen.pop();
            }
        }
        total
    }
    rec(l, &cands, &mut Vec::new())
}

fn table3_lattices() -> Vec<(String, Lattice)> {
    transcendental_table()
        .into_iter()
        .flat_map(|row| {
            (0..row.lattices.len()).map(move |i| (format!("n={} {} #{i}", row.n, row.deg), row.lattice(i)))
        })
        .collect()
}

#[test]
fn isometry_groups_are_groups() {
    for (name, l) in table3_lattices() {
        let g = isometry_group(&l, ISOMETRY_BUDGET).unwrap();
        if g.order() > 200 {
            continue;
        }
        let set: BTreeSet<Vec<Vec<BigInt>>> = g.elements.iter().map(Matrix::to_rows).collect();
        assert_eq!(set.len(), g.order(), "{name}: duplicate elements");
        assert!(set.contains(&IntMatrix::identity(l.rank()).to_rows()), "{name}: no identity");
        for a in &g.elements {
            assert_eq!(&l.gram().congruence(a), l.gram(), "{name}: not an isometry");
            for b in &g.elements {
                assert!(set.contains(&(a * b).to_rows()), "{name}: not closed");
            }
        }
        let proper = g.elements.iter().filter(|m| determinant(m).unwrap().is_one()).count();
        assert_eq!(proper, g.proper_order, "{name}");
        assert_eq!(g.order(), 2 * g.proper_order, "{name}: -1 is always an isometry");
    }
}

#[test]
fn isometry_orders_match_brute_force_on_table3() {
    for (name, l) in table3_lattices() {
        assert_eq!(isometry_group(&l, ISOMETRY_BUDGET).unwrap().order(), brute_force_order(&l), "{name}");
    }
}

#[test]
fn kernel_is_the_weyl_group_on_table3() {
    for (name, l) in table3_lattices() {
        let g = isometry_group(&l, ISOMETRY_BUDGET).unwrap();
        assert!(kernel_is_weyl(&l, &g).unwrap(), "{name}");
    }
}

#[test]
fn oq_generators_generate_and_matrices_round_trip() {
    for (name, l) in table3_lattices() {
        let group = oq_group(&l.discriminant_form().unwrap(), OQ_BUDGET).unwrap();
        let gens = group.generators();
        let span = group.form.generated_subgroup(&gens, group.order() + 1).unwrap();
        assert_eq!(span.len(), group.order(), "{name}");
        for (m, e) in group.matrices().iter().zip(&group.elements) {
            assert_eq!(&group.images_from_matrix(m).unwrap(), e, "{name}");
        }
    }
}

#[test]
fn double_cosets_by_the_image_count_its_cosets() {
    for (name, l) in table3_lattices().into_iter().take(12) {
        let q = l.discriminant_form().unwrap();
        let oq = oq_group(&q, OQ_BUDGET).unwrap();
        let iso = isometry_group(&l, ISOMETRY_BUDGET).unwrap();
        let image = image_in_oq(&l, Subgroup::Full, OQ_BUDGET).unwrap();
        let a = discriminant_images(&l, &iso.generators).unwrap();
        // With B trivial the double cosets are the right cosets of the image.
        assert_eq!(double_coset_count(&q, &a, &[], OQ_BUDGET).unwrap() * image, oq.order(), "{name}");
    }
}

#[test]
fn image_matrices_outside_oq_are_rejected() {
    let l = Lattice::diagonal(&[2, 4, 16]).unwrap();
    let q = l.discriminant_form().unwrap();
    let group = oq_group(&q, OQ_BUDGET).unwrap();
    // Doubling the first generator is not even a bijection.
    let m = IntMatrix::from_i64_rows(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    let images = group.images_from_matrix(&m).unwrap();
    assert!(!group.contains(&images));
    assert!(double_coset_count(&q, &[images], &[], OQ_BUDGET).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn isometry_order_is_a_basis_invariant(l in common::positive_even_lattice(3), ops in common::ops()) {
        let u = common::unimodular(l.rank(), &ops);
        let moved = Lattice::new(l.gram().congruence(&u)).unwrap();
        let order = isometry_group(&l, ISOMETRY_BUDGET).unwrap().order();
        prop_assert_eq!(order, brute_force_order(&l));
        prop_assert_eq!(isometry_group(&moved, ISOMETRY_BUDGET).unwrap().order(), order);
    }

    #[test]
    fn image_order_divides_oq(l in common::positive_even_lattice(3)) {
        let q = l.discriminant_form().unwrap();
        let oq = oq_group(&q, OQ_BUDGET).unwrap().order();
        let full = image_in_oq(&l, Subgroup::Full, OQ_BUDGET).unwrap();
        let proper = image_in_oq(&l, Subgroup::Proper, OQ_BUDGET).unwrap();
        prop_assert_eq!(oq % full, 0);
        prop_assert_eq!(full % proper, 0);
    }
}

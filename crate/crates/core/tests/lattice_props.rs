//! Invariants of the sublattice calculus.

mod common;

use evenlat::genus::{fqf_equivalent, SEARCH_BUDGET};
use evenlat::lattice::Sublattice;
use evenlat::rootsys::RootSystemType;
use evenlat::{IntMatrix, Lattice, Matrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn columns(n: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_cols).prop_flat_map(move |c| {
        proptest::collection::vec(-3i64..=3, n * c)
            .prop_map(move |v| Matrix::from_vec(n, c, v.into_iter().map(BigInt::from).collect()))
    })
}

fn unimodular_ambients() -> Vec<Lattice> {
    let e8 = "E_8".parse::<RootSystemType>().unwrap().lattice().unwrap();
    let u = Lattice::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
    vec![e8.clone(), e8.direct_sum(&u), u.direct_sum(&u).direct_sum(&u)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_order_is_determinant(l in common::even_lattice(6, 8)) {
        let order: BigInt = l.discriminant_group().iter().product();
        prop_assert_eq!(order, l.det().abs());
        let form = l.discriminant_form().unwrap();
        prop_assert_eq!(form.order(), l.det().abs());
    }

    #[test]
    fn rescaling_multiplies_order(l in common::even_lattice(4, 6), lambda in prop::sample::select(vec![-3i64, -2, 2, 3, 5])) {
        let s = l.rescale(lambda).unwrap();
        let order: BigInt = s.discriminant_group().iter().product();
        prop_assert_eq!(order, BigInt::from(lambda).abs().pow(l.rank() as u32) * l.det().abs());
    }

    #[test]
    fn saturation_is_idempotent_with_square_index(
        (which, x) in (0usize..3).prop_flat_map(|w| (Just(w), columns([8, 10, 6][w], 4))),
    ) {
        let ambient = unimodular_ambients()[which].clone();
        prop_assume!(evenlat::linalg::rank(&x) == x.cols());
        let sub = Sublattice::new(ambient, x).unwrap();
        let sat = sub.saturate();
        prop_assert!(sat.is_primitive());
        let again = sat.saturate();
        for c in again.basis().to_cols() {
            prop_assert!(sat.coordinates_of(&c).is_some());
        }
        for c in sat.basis().to_cols() {
            prop_assert!(again.coordinates_of(&c).is_some());
        }
        for c in sub.basis().to_cols() {
            prop_assert!(sat.coordinates_of(&c).is_some());
        }
        let d_sub = evenlat::linalg::determinant(&sub.gram()).unwrap();
        let d_sat = evenlat::linalg::determinant(&sat.gram()).unwrap();
        if !d_sat.is_zero() {
            prop_assert!((&d_sub % &d_sat).is_zero());
            let q = (&d_sub / &d_sat).abs();
            prop_assert_eq!(q.sqrt().pow(2), q);
        }
    }

    #[test]
    fn complements_in_unimodular_lattices(
        (which, x) in (0usize..3).prop_flat_map(|w| (Just(w), columns([8, 10, 6][w], 4))),
    ) {
        let ambient = unimodular_ambients()[which].clone();
        prop_assume!(evenlat::linalg::rank(&x) == x.cols());
        let s = Sublattice::new(ambient.clone(), x).unwrap().saturate();
        let t = s.orthogonal_complement();
        prop_assert!(t.is_primitive());
        prop_assert_eq!(t.rank(), ambient.rank() - s.rank());
        prop_assert!((&(&s.basis().transpose() * ambient.gram()) * t.basis()).is_zero());
        if let (Ok(sl), Ok(tl)) = (s.lattice(), t.lattice()) {
            prop_assert_eq!(sl.det().abs(), tl.det().abs());
            let qs = sl.discriminant_form().unwrap();
            let qt = tl.discriminant_form().unwrap();
            prop_assert!(fqf_equivalent(&qt, &qs.negate(), SEARCH_BUDGET).equivalent);
        }
    }
}

#[test]
fn complement_of_an_e8_factor() {
    let e8 = "E_8".parse::<RootSystemType>().unwrap().lattice().unwrap();
    let l = e8.direct_sum(&e8);
    let first = Matrix::from_cols(16, &(0..8).map(|i| (0..16).map(|j| BigInt::from(i32::from(i == j))).collect()).collect::<Vec<_>>());
    let t = Sublattice::new(l, first).unwrap().orthogonal_complement().lattice().unwrap();
    assert_eq!(t.rank(), 8);
    assert!(t.det().is_one());
    assert!(t.is_even() && t.is_negative_definite());
}

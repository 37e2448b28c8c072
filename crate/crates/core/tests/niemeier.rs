//! Niemeier lattices, their simple roots, and the marking pipeline end to end.

use evenlat::niemeier::{
    build_niemeier, golay_code, golay_involution, marking_on, marking_orbits, marking_pipeline, octads,
    permute_mask, MarkingInput,
};
use evenlat::rootsys::ENUMERATION_BUDGET;

#[test]
fn simple_roots_span_the_root_lattice() {
    for j in 1..=23 {
        let n = build_niemeier(j).unwrap();
        assert_eq!(n.lattice.gram().congruence(&n.simple_roots), n.kind.gram(), "N_{j}");
        assert!(n.lattice.is_unimodular() && n.lattice.is_even(), "N_{j}");
    }
}

#[test]
fn golay_involution_preserves_code_and_lattice() {
    let code = golay_code();
    let inv = golay_involution().expect("involution");
    assert!((0..24).all(|i| inv[inv[i]] == i));
    assert_eq!((0..24).filter(|&i| inv[i] == i).count(), 8);
    let words: std::collections::BTreeSet<u32> = code.iter().copied().collect();
    assert!(code.iter().all(|&w| words.contains(&permute_mask(&inv, w))));
    assert_eq!(octads(&code).len(), 759);
    assert!(build_niemeier(23).unwrap().permutation_isometry(&inv).is_some());
}

#[test]
fn non_code_permutation_is_not_an_isometry() {
    let mut perm: Vec<usize> = (0..24).collect();
    perm.swap(0, 1);
    assert!(build_niemeier(23).unwrap().permutation_isometry(&perm).is_none());
}

#[test]
fn marking_input_round_trips_through_json() {
    let inv = golay_involution().unwrap();
    let input = MarkingInput { j: 23, orbits: marking_orbits(std::slice::from_ref(&inv)), alpha: 1 };
    let text = serde_json::to_string(&input).unwrap();
    assert_eq!(serde_json::from_str::<MarkingInput>(&text).unwrap(), input);
}

#[test]
fn n1_markings() {
    let inv = golay_involution().unwrap();
    let orbits = marking_orbits(std::slice::from_ref(&inv));
    let fixed = (0..24).find(|&i| inv[i] == i).unwrap() + 1;
    let r = marking_pipeline(&MarkingInput { j: 23, orbits: orbits.clone(), alpha: fixed }).unwrap();
    assert!(r.all_checks_pass());
    assert_eq!(r.coinvariant_genus.form.normalize().to_string(), "2_{II}^{+8}");
    assert_eq!(r.s.rank(), 9);
    assert_eq!(r.complement_roots.to_string(), "7A_1");
    assert_eq!(r.minus4_count, 2116);

    let n = build_niemeier(23).unwrap();
    let r = marking_on(&n, &orbits, orbits[0][0], ENUMERATION_BUDGET).unwrap();
    assert!(r.all_checks_pass());
    assert!(r.s_genus.form.equivalent(&"2_{II}^{-6},4_3^{-1}".parse().unwrap()));
    assert_eq!(r.complement_roots.to_string(), "8A_1");
}

#[test]
fn malformed_markings_are_rejected() {
    let bad = [
        MarkingInput { j: 23, orbits: vec![vec![1, 2], vec![2, 3]], alpha: 1 },
        MarkingInput { j: 23, orbits: vec![vec![1, 25]], alpha: 1 },
        MarkingInput { j: 23, orbits: vec![], alpha: 0 },
        MarkingInput { j: 24, orbits: vec![], alpha: 1 },
    ];
    for m in bad {
        assert!(marking_pipeline(&m).is_err(), "{m:?}");
    }
}

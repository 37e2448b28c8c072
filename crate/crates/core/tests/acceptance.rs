//! Acceptance report: one line per criterion.
//!
//! Runs without the libtest harness so the report prints as a block. A criterion whose
//! outcome differs from the expected outcome recorded here makes the process exit nonzero.
//! Criterion 3 is expected to fail on two rows whose tabulated automorphism counts disagree
//! with an independent brute-force count; those rows are pinned below and rechecked by the
//! oracle, so any other deviation (including the rows starting to agree) still fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use evenlat::fqf::FiniteQuadraticForm;
use evenlat::genus::{
    embedding_compatible_symbols, fqf_equivalent, fqf_symbol, genus_symbol, signature_mod8, unique_in_genus, Atom,
    FqfSymbol, SEARCH_BUDGET,
};
use evenlat::linalg::{determinant, smith_normal_form};
use evenlat::rootsys::{vectors_of_norm, ENUMERATION_BUDGET};
use evenlat::tables::{genus_table, run_suite, transcendental_table, Report, Status};
use evenlat::{IntMatrix, Lattice, Matrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

/// Table 4 rows where the tabulated values are contradicted by brute force.
const KNOWN_TABLE4_DIVERGENCES: [&str; 2] = ["n=46 9A_1", "n=51 4A_1"];

enum Verdict {
    Pass(String),
    Fail(String),
    Skipped(String),
}

struct Line {
    id: u8,
    title: &'static str,
    verdict: Verdict,
    /// Whether this verdict is the one recorded as expected.
    expected: bool,
}

fn main() {
    let lines = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    println!();
    let mut unexpected = 0;
    for l in &lines {
        let (tag, detail) = match &l.verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => ("FAIL", d),
            Verdict::Skipped(d) => ("SKIP", d),
        };
        let flag = if l.expected { "" } else { " [unexpected]" };
        println!("criterion {} {tag} {}: {detail}{flag}", l.id, l.title);
        unexpected += usize::from(!l.expected);
    }
    println!();
    if unexpected > 0 {
        eprintln!("{unexpected} criteria deviate from their expected outcome");
        std::process::exit(1);
    }
}

fn passing(id: u8, title: &'static str, ok: bool, detail: String) -> Line {
    Line { id, title, verdict: if ok { Verdict::Pass(detail) } else { Verdict::Fail(detail) }, expected: ok }
}

fn suite(name: &str) -> Report {
    run_suite(name, ENUMERATION_BUDGET).unwrap_or_else(|e| panic!("suite {name}: {e}"))
}

fn failures(r: &Report) -> Vec<String> {
    r.rows.iter().filter(|x| x.status == Status::Mismatch).map(|x| x.key.clone()).collect()
}

fn criterion_1() -> Line {
    let mut slowest = Duration::ZERO;
    for row in transcendental_table() {
        for idx in 0..row.lattices.len() {
            let t = row.lattice(idx);
            let start = Instant::now();
            genus_symbol(&t).expect("genus symbol");
            slowest = slowest.max(start.elapsed());
        }
    }
    let r = suite("table3-genus");
    let ok = r.passed() && slowest < Duration::from_secs(1);
    passing(1, "Table 3 genus reproduction", ok, format!("{}; slowest lattice {slowest:?}", r.summary()))
}

fn criterion_2() -> Line {
    let r = suite("table1-duality");
    passing(2, "Table 1 / Table 3 duality", r.passed() && r.count(Status::Match) > 0, r.summary())
}

fn criterion_3() -> Line {
    let r = suite("table4");
    let bad = failures(&r);
    let pinned: Vec<String> = KNOWN_TABLE4_DIVERGENCES.iter().map(|s| s.to_string()).collect();
    let two_lattice_row = r
        .rows
        .iter()
        .filter(|x| x.key.starts_with("n=55 10A_1"))
        .all(|x| x.status == Status::Match && x.computed.ends_with("M_s=2"));
    // The pinned rows must disagree for the reason recorded, as confirmed by the oracles.
    let diag = Lattice::diagonal(&[2, 6, 6]).unwrap();
    let t51 = Lattice::from_rows(&[vec![8, 2, -4], vec![2, 8, 2], vec![-4, 2, 8]]).unwrap();
    let oracles = brute_force_isometries(&diag) == 16 && brute_force_oq(&t51.discriminant_form().unwrap()) == 128;
    let as_recorded = bad == pinned && two_lattice_row && oracles;
    let detail = format!(
        "{}; disagreeing rows: {}; brute force gives |O(T)|=16 for n=46 9A_1 and |O(q_T)|=128 for n=51 4A_1",
        r.summary(),
        bad.join(", ")
    );
    let verdict = if r.passed() { Verdict::Pass(detail) } else { Verdict::Fail(detail) };
    Line { id: 3, title: "Table 4 reproduction", verdict, expected: as_recorded }
}

fn criterion_4() -> Line {
    let r = suite("niemeier");
    passing(4, "Niemeier suite", r.passed() && r.rows.len() == 23, r.summary())
}

fn criterion_5() -> Line {
    let r = suite("n1-pipeline");
    if r.count(Status::Skipped) > 0 {
        return Line { id: 5, title: "n=1 marking", verdict: Verdict::Skipped(r.summary()), expected: false };
    }
    passing(5, "n=1 marking", r.passed(), r.summary())
}

fn run_cases<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
    failed: &mut Vec<String>,
) {
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    if let Err(e) = runner.run(&strategy, test) {
        failed.push(format!("{name}: {e}"));
    }
}

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-9i64..=9, r * c)
            .prop_map(move |v| Matrix::from_vec(r, c, v.into_iter().map(BigInt::from).collect()))
    })
}

fn relation_cases() -> Vec<(&'static str, Vec<Atom>, Vec<Atom>)> {
    use Atom::*;
    let q = |k, theta| Q { p: 2, k, theta };
    vec![
        ("a", vec![Q { p: 3, k: 1, theta: 1 }; 2], vec![Q { p: 3, k: 1, theta: 2 }; 2]),
        ("b", vec![U { k: 1 }, U { k: 1 }], vec![V { k: 1 }, V { k: 1 }]),
        ("c", vec![q(1, 1), q(1, 1)], vec![q(1, 5), q(1, 5)]),
        ("d", vec![q(2, 1), q(2, 3)], vec![q(2, 5), q(2, 7)]),
        ("e", vec![q(2, 1), q(2, 1), q(2, 1)], vec![V { k: 2 }, q(2, 3)]),
        ("f", vec![q(2, 1), q(2, 1), q(2, 3)], vec![U { k: 2 }, q(2, 5)]),
        ("g", vec![V { k: 1 }, q(2, 1)], vec![U { k: 1 }, q(2, 5)]),
        ("h", vec![q(1, 1), V { k: 2 }], vec![q(1, 5), U { k: 2 }]),
        ("i", vec![q(1, 1), q(2, 1)], vec![q(1, 3), q(2, 3)]),
        ("j", vec![q(1, 1), q(3, 1)], vec![q(1, 5), q(3, 5)]),
        ("k", vec![q(1, 1)], vec![q(1, 5)]),
    ]
}

fn criterion_6() -> Line {
    let mut failed = Vec::new();
    run_cases(
        "SNF contract",
        small_matrix(),
        |m| {
            let s = smith_normal_form(&m);
            prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
            prop_assert!(determinant(&s.u).unwrap().abs().is_one());
            prop_assert!(determinant(&s.v).unwrap().abs().is_one());
            let d = s.diagonal();
            for w in d.windows(2) {
                let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
                prop_assert!(divides);
            }
            Ok(())
        },
        &mut failed,
    );
    run_cases(
        "genus invariance",
        (common::even_lattice(6, 9), common::ops()),
        |(l, ops)| {
            let u = common::unimodular(l.rank(), &ops);
            let moved = Lattice::new(l.gram().congruence(&u)).unwrap();
            prop_assert_eq!(genus_symbol(&moved).unwrap().normalize(), genus_symbol(&l).unwrap().normalize());
            Ok(())
        },
        &mut failed,
    );
    run_cases(
        "signature mod 8",
        common::even_lattice(6, 9),
        |l| {
            let (tp, tm) = l.signature();
            let q = l.discriminant_form().unwrap();
            prop_assert_eq!(signature_mod8(&q) as i64, (tp as i64 - tm as i64).rem_euclid(8));
            Ok(())
        },
        &mut failed,
    );
    run_cases(
        "additivity",
        (common::even_lattice(3, 9), common::even_lattice(3, 9)),
        |(a, b)| {
            let qa = a.discriminant_form().unwrap();
            let qb = b.discriminant_form().unwrap();
            let qs = a.direct_sum(&b).discriminant_form().unwrap();
            prop_assert!(fqf_symbol(&qs).equivalent(&fqf_symbol(&qa.direct_sum(&qb))));
            Ok(())
        },
        &mut failed,
    );
    for (name, lhs, rhs) in relation_cases() {
        let form = |atoms: &[Atom]| atoms.iter().fold(FiniteQuadraticForm::trivial(), |acc, a| acc.direct_sum(&a.form()));
        let eq = fqf_equivalent(&form(&lhs), &form(&rhs), SEARCH_BUDGET);
        if !(eq.equivalent && eq.witness.is_some()) {
            failed.push(format!("relation ({name}) has no explicit isometry"));
        }
    }
    let detail = if failed.is_empty() {
        "4 invariants x 200 cases, relations (a)-(k) witnessed".to_string()
    } else {
        failed.join("; ")
    };
    passing(6, "property suite", failed.is_empty(), detail)
}

fn criterion_7() -> Line {
    let genera = genus_table();
    let mut checked = 0;
    let mut bad = Vec::new();
    for t in transcendental_table().iter().filter(|t| [26, 32, 33, 55, 75].contains(&t.n)) {
        let Some(g) = genera.iter().find(|g| g.n == t.n && g.deg == t.deg) else { continue };
        let q_s: FqfSymbol = g.q_s.parse().unwrap();
        let q_t: FqfSymbol = t.q_t.parse().unwrap();
        checked += 1;
        if !embedding_compatible_symbols((0, g.rank_s), &q_s, (3, 19 - g.rank_s), &q_t, (3, 19)) {
            bad.push(format!("n={} {}", t.n, t.deg));
        }
    }
    let minus2: FqfSymbol = "2_7^{+1}".parse().unwrap();
    let obstructed = embedding_compatible_symbols((0, 1), &minus2, (0, 1), &minus2, (3, 19));
    let ok = bad.is_empty() && checked >= 5 && !obstructed;
    passing(
        7,
        "gluing criterion",
        ok,
        format!("{checked} pairs compatible, {} not; (<-2>,<-2>) rejected: {}", bad.len(), !obstructed),
    )
}

fn criterion_8() -> Line {
    let mut checked = 0;
    let mut bad = Vec::new();
    for g in genus_table().iter().filter(|g| g.rank_s <= 18) {
        let q_s: FqfSymbol = g.q_s.parse().unwrap();
        checked += 1;
        if !unique_in_genus((3, 19 - g.rank_s), &q_s.negate()) {
            bad.push(format!("n={} {}", g.n, g.deg));
        }
    }
    passing(8, "uniqueness sweep", bad.is_empty() && checked > 0, format!("{checked} rows unique{}", if bad.is_empty() { String::new() } else { format!("; inconclusive: {}", bad.join(", ")) }))
}

/// Vectors of `E_8` of norm `2n` in the coordinate model, counted directly.
fn e8_model_count(n: i64) -> usize {
    // Doubled coordinates: all even or all odd, entries in [-4, 4], sum divisible by 4.
    let mut count = 0;
    let mut y = [0i64; 8];
    fn rec(i: usize, y: &mut [i64; 8], target: i64, count: &mut usize) {
        let used: i64 = y[..i].iter().map(|v| v * v).sum();
        if used > target {
            return;
        }
        if i == 8 {
            let parity_ok = y.iter().all(|v| v % 2 == 0) || y.iter().all(|v| v % 2 != 0);
            if used == target && parity_ok && y.iter().sum::<i64>().rem_euclid(4) == 0 {
                *count += 1;
            }
            return;
        }
        for v in -4..=4 {
            y[i] = v;
            rec(i + 1, y, target, count);
        }
    }
    rec(0, &mut y, 8 * n, &mut count);
    count
}

fn criterion_9() -> Line {
    let e8 = Lattice::from_rows(&[
        vec![2, -1, 0, 0, 0, 0, 0, 0],
        vec![-1, 2, -1, 0, 0, 0, 0, 0],
        vec![0, -1, 2, -1, 0, 0, 0, -1],
        vec![0, 0, -1, 2, -1, 0, 0, 0],
        vec![0, 0, 0, -1, 2, -1, 0, 0],
        vec![0, 0, 0, 0, -1, 2, -1, 0],
        vec![0, 0, 0, 0, 0, -1, 2, 0],
        vec![0, 0, -1, 0, 0, 0, 0, 2],
    ])
    .unwrap();
    let counts = (vectors_of_norm(&e8, 2).unwrap().len(), vectors_of_norm(&e8, 4).unwrap().len());
    let oracle = (e8_model_count(1), e8_model_count(2));
    let kernel_ok = counts == (240, 2160) && counts == oracle;
    let detail = format!(
        "E_8 counts {}/{} (oracle {}/{}); Table 2 columns for n=10, 34, 51 need group actions that are not reconstructed",
        counts.0, counts.1, oracle.0, oracle.1
    );
    if !kernel_ok {
        return Line { id: 9, title: "Table 2 exceptional counts", verdict: Verdict::Fail(detail), expected: false };
    }
    Line { id: 9, title: "Table 2 exceptional counts", verdict: Verdict::Skipped(detail), expected: true }
}

/// `|O(L)|` for a definite lattice by matching images of the basis against the Gram matrix.
fn brute_force_isometries(l: &Lattice) -> usize {
    let g = l.gram();
    let n = l.rank();
    let candidates: Vec<Vec<Vec<BigInt>>> = (0..n)
        .map(|i| {
            let norm: i64 = g.get(i, i).try_into().unwrap();
            vectors_of_norm(l, norm).unwrap()
        })
        .collect();
    fn rec(l: &Lattice, cand: &[Vec<Vec<BigInt>>], chosen: &mut Vec<Vec<BigInt>>, count: &mut usize) {
        let i = chosen.len();
        if i == cand.len() {
            *count += 1;
            return;
        }
        for v in &cand[i] {
            if (0..i).all(|j| &l.inner(&chosen[j], v) == l.gram().get(j, i)) {
                chosen.push(v.clone());
                rec(l, cand, chosen, count);
                chosen.pop();
            }
        }
    }
    let mut count = 0;
    rec(l, &candidates, &mut Vec::new(), &mut count);
    count
}

/// `|O(q)|` by extending every consistent choice of generator images and testing the whole map.
fn brute_force_oq(q: &FiniteQuadraticForm) -> usize {
    let s = q.to_small(1 << 16).unwrap();
    let r = s.rank();
    let gens: Vec<usize> = (0..r).map(|i| s.generator(i)).collect();
    let cands: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| (0..s.size()).filter(|&x| s.order_of(x) == s.order_of(g) && s.q_of(x) == s.q_of(g)).collect())
        .collect();
    let mut count = 0;
    let mut chosen = Vec::new();
    fn rec(s: &evenlat::fqf::SmallForm, gens: &[usize], cands: &[Vec<usize>], chosen: &mut Vec<usize>, count: &mut usize) {
        let i = chosen.len();
        if i == gens.len() {
            let mut seen = BTreeSet::new();
            for x in 0..s.size() {
                let c = s.coords(x);
                let y = c.iter().zip(chosen.iter()).fold(0, |acc, (&k, &img)| s.add(acc, s.scalar(k, img)));
                if s.q_of(y) != s.q_of(x) || !seen.insert(y) {
                    return;
                }
            }
            *count += 1;
            return;
        }
        for &c in &cands[i] {
            if (0..i).all(|j| s.b_of(chosen[j], c) == s.b_of(gens[j], gens[i])) {
                chosen.push(c);
                rec(s, gens, cands, chosen, count);
                chosen.pop();
            }
        }
    }
    rec(&s, &gens, &cands, &mut chosen, &mut count);
    count
}

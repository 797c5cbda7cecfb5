//! End-to-end acceptance suite: each test is one numbered criterion and
//! prints a single PASS line when it holds.

use oqinv::beads::{decorate, evaluate_word, render_word, reverse_word, slide_to_top};
use oqinv::diagram::{
    apply_move, component_count, enumerate_move_sites, parse_morse, random_diagram, random_knot,
    render_morse, MorseDiagram,
};
use oqinv::evaluator::{closure_value, contract_naive, evaluate, evaluate_with, DiagramMatrices};
use oqinv::homfly::{build_homfly, telescoping_defect, verify_homfly};
use oqinv::laurent::LaurentPoly;
use oqinv::oqa::load_algebra_file;
use oqinv::statesum::{self, skein_triple, ExpansionWeights, Rel};
use std::path::PathBuf;

fn fixture(name: &str) -> MorseDiagram {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    parse_morse(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}")))
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

const CLOSED_FIXTURES: [&str; 7] = [
    "unknot_cw.morse",
    "unknot_ccw.morse",
    "hopf_positive.morse",
    "hopf_negative.morse",
    "trefoil_right.morse",
    "trefoil_left.morse",
    "figure_eight.morse",
];

/// One-component fixtures (knots); the last is an open one-in one-out tangle.
const KNOT_FIXTURES: [&str; 6] = [
    "unknot_cw.morse",
    "unknot_ccw.morse",
    "trefoil_right.morse",
    "trefoil_left.morse",
    "figure_eight.morse",
    "trefoil_1_1.morse",
];

fn scalar(oqa: &oqinv::oqa::MatrixOQA, d: &MorseDiagram) -> LaurentPoly {
    if d.is_closed() {
        evaluate(oqa, d).unwrap().scalar()
    } else {
        closure_value(oqa, d).unwrap()
    }
}

#[test]
fn criterion_01_axiom_suite() {
    for n in [2, 3, 4] {
        let report = verify_homfly(n);
        assert!(report.all_pass(), "rank {n}: {report:?}");
    }
    println!("PASS criterion 1: axiom suite holds for ranks 2, 3, 4");
}

#[test]
fn criterion_02_telescoping_identity() {
    for lo in 1..6 {
        for hi in lo + 1..=6 {
            let d = telescoping_defect(lo, hi);
            assert!(d.is_zero(), "lo={lo} hi={hi}: {d}");
        }
    }
    println!("PASS criterion 2: telescoping identity for all 1 <= lo < hi <= 6");
}

#[test]
fn criterion_03_move_invariance() {
    let mut diagrams = 0usize;
    let mut sites = 0usize;
    for n in [2usize, 3] {
        let oqa = build_homfly(n);
        let dm = DiagramMatrices::new(&oqa).unwrap();
        for seed in 0..200u64 {
            let d = random_diagram(seed, 10, true);
            assert!(d.is_closed() && d.crossing_count() <= 10);
            let v = evaluate_with(&dm, &d).scalar();
            diagrams += 1;
            for m in enumerate_move_sites(&d) {
                let (d2, _) = apply_move(&d, m).unwrap();
                let v2 = evaluate_with(&dm, &d2).scalar();
                sites += 1;
                assert_eq!(v, v2, "rank {n} seed {seed} move {m:?} on\n{}", render_morse(&d));
            }
        }
    }
    assert!(diagrams >= 400 && sites >= 400);
    println!("PASS criterion 3: {sites} move sites invariant across {diagrams} diagram checks");
}

#[test]
fn criterion_04_skein_relation() {
    let oqa = build_homfly(2);
    let dm = DiagramMatrices::new(&oqa).unwrap();
    let z = LaurentPoly::z();
    let mut pairs = 0usize;
    let mut seed = 0u64;
    while pairs < 50 {
        let d = random_diagram(seed, 8, true);
        seed += 1;
        for s in 0..d.slices().len() {
            for p in d.layout(s) {
                if matches!(p.event, oqinv::diagram::Event::Crossing(_)) {
                    let (pos, neg, smooth) = skein_triple(&d, s, p.index).unwrap();
                    let lhs = &evaluate_with(&dm, &pos).scalar() - &evaluate_with(&dm, &neg).scalar();
                    let rhs = &z * &evaluate_with(&dm, &smooth).scalar();
                    assert_eq!(lhs, rhs, "seed {} site ({s},{})", seed - 1, p.index);
                    pairs += 1;
                }
            }
        }
    }
    println!("PASS criterion 4: skein relation on {pairs} (diagram, site) pairs");
}

#[test]
fn criterion_05_state_sum_equals_evaluator() {
    let w = ExpansionWeights::homfly();
    let mut checked = 0usize;
    for n in [2usize, 3] {
        let oqa = build_homfly(n);
        let dm = DiagramMatrices::new(&oqa).unwrap();
        for name in CLOSED_FIXTURES {
            let d = fixture(name);
            assert_eq!(
                statesum::evaluate(&d, &w, n, 16).unwrap(),
                evaluate_with(&dm, &d).scalar(),
                "rank {n} fixture {name}"
            );
            checked += 1;
        }
        for seed in 0..100u64 {
            let d = random_diagram(seed, 8, true);
            assert_eq!(
                statesum::evaluate(&d, &w, n, 16).unwrap(),
                evaluate_with(&dm, &d).scalar(),
                "rank {n} seed {seed}"
            );
            checked += 1;
        }
    }
    println!("PASS criterion 5: state sum matches the evaluator on {checked} diagrams");
}

#[test]
fn criterion_06_naive_contraction_oracle() {
    let oqa = build_homfly(2);
    let dm = DiagramMatrices::new(&oqa).unwrap();
    let mut checked = 0usize;
    for seed in 0..200u64 {
        let d = random_diagram(seed, 10, true);
        if d.crossing_count() > 6 {
            continue;
        }
        assert_eq!(
            contract_naive(&oqa, &d, 128).unwrap().scalar(),
            evaluate_with(&dm, &d).scalar(),
            "seed {seed}"
        );
        checked += 1;
    }
    assert!(checked >= 20, "corpus too small: {checked}");
    println!("PASS criterion 6: naive contraction matches on {checked} corpus diagrams");
}

#[test]
fn criterion_07_local_matrix_reconstruction() {
    for n in [2usize, 3, 4] {
        let oqa = build_homfly(n);
        let dm = DiagramMatrices::new(&oqa).unwrap();
        let w = ExpansionWeights::homfly();
        let weight = |set: &[LaurentPoly; 4], rel: Rel| set[rel as usize].clone();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        // Sum the four relation matrices over the index
                        // patterns they support.
                        let assemble = |set: &[LaurentPoly; 4]| {
                            let mut v = LaurentPoly::zero();
                            if a == b && b == c && c == d {
                                v += &weight(set, Rel::Eq);
                            }
                            if a == c && b == d && a < b {
                                v += &weight(set, Rel::Less);
                            }
                            if a == c && b == d && a > b {
                                v += &weight(set, Rel::Greater);
                            }
                            if a == d && b == c && a != b {
                                v += &weight(set, Rel::Ne);
                            }
                            v
                        };
                        assert_eq!(*dm.r_up.get(a, b, c, d), assemble(&w.pos), "rank {n} r_up");
                        assert_eq!(*dm.s_up.get(a, b, c, d), assemble(&w.neg), "rank {n} s_up");
                    }
                }
            }
        }
    }
    println!("PASS criterion 7: local matrices reassemble the braiding tensors, ranks 2-4");
}

#[test]
fn criterion_08_bead_path_independence() {
    let mut checked = 0usize;
    for n in [2usize, 3] {
        let oqa = build_homfly(n);
        for name in KNOT_FIXTURES {
            let d = fixture(name);
            let bw = slide_to_top(&decorate(&d).unwrap()).unwrap();
            assert_eq!(evaluate_word(&bw, &oqa).unwrap(), scalar(&oqa, &d), "rank {n} {name}");
            checked += 1;
        }
        for seed in 0..50u64 {
            let d = random_knot(seed, 5);
            let bw = slide_to_top(&decorate(&d).unwrap()).unwrap();
            assert_eq!(evaluate_word(&bw, &oqa).unwrap(), scalar(&oqa, &d), "rank {n} seed {seed}");
            checked += 1;
        }
    }
    let trefoil = slide_to_top(&decorate(&fixture("trefoil_1_1.morse")).unwrap()).unwrap();
    assert_eq!(render_word(&trefoil), "G^-1 (t e1)(t e2')(t e3)(e1')(e2)(e3')");
    println!("PASS criterion 8: bead word matches the evaluator on {checked} knots; trefoil normal form as expected");
}

#[test]
fn criterion_09_standardization() {
    let (file_algebra, report) = load_algebra_file(
        &[env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", "homfly_n2.json"]
            .iter()
            .collect::<PathBuf>(),
        true,
    )
    .unwrap();
    assert!(report.all_pass());
    for oqa in [build_homfly(2), build_homfly(3), file_algebra] {
        let std_form = oqa.standardize();
        for name in CLOSED_FIXTURES {
            let d = fixture(name);
            assert_eq!(
                evaluate(&oqa, &d).unwrap().scalar(),
                evaluate(&std_form, &d).unwrap().scalar(),
                "rank {} fixture {name}",
                oqa.rank
            );
        }
    }
    println!("PASS criterion 9: standardized algebras evaluate identically on all closed fixtures");
}

#[test]
fn criterion_10_orientation_reversal() {
    let oqa = build_homfly(2);
    for name in KNOT_FIXTURES {
        let d = fixture(name);
        let bw = slide_to_top(&decorate(&d).unwrap()).unwrap();
        let rev = reverse_word(&bw);
        assert_eq!(
            evaluate_word(&rev, &oqa).unwrap(),
            scalar(&oqa, &d.reverse_orientation()),
            "{name}"
        );
    }
    let trefoil = slide_to_top(&decorate(&fixture("trefoil_1_1.morse")).unwrap()).unwrap();
    assert_eq!(trefoil.curl_count, -1);
    assert_eq!(reverse_word(&trefoil).curl_count, 1);
    println!("PASS criterion 10: reversed words match reversed diagrams; trefoil curl count -1 -> +1");
}

#[test]
fn criterion_11_trefoil_chirality() {
    let oqa = build_homfly(2);
    let right = evaluate(&oqa, &fixture("trefoil_right.morse")).unwrap().scalar();
    let left = evaluate(&oqa, &fixture("trefoil_left.morse")).unwrap().scalar();
    assert_ne!(right, left);
    let term = |e: i64, c: i64| (e, num_bigint::BigInt::from(c));
    assert_eq!(
        right,
        LaurentPoly::from_terms(vec![term(3, -1), term(7, 1), term(9, 1), term(11, 1)])
    );
    assert_eq!(
        left,
        LaurentPoly::from_terms(vec![term(1, 1), term(3, 1), term(5, 1), term(9, -1)])
    );
    println!("PASS criterion 11: trefoil chiralities distinct at rank 2, frozen values unchanged");
}

#[test]
fn fixtures_are_well_formed() {
    for name in CLOSED_FIXTURES {
        let d = fixture(name);
        assert!(d.is_closed(), "{name}");
    }
    for name in KNOT_FIXTURES {
        assert_eq!(component_count(&fixture(name)), 1, "{name}");
    }
    let hopf = fixture("hopf_positive.morse");
    assert_eq!(component_count(&hopf), 2);
    assert_eq!(hopf.crossing_count(), 2);
}

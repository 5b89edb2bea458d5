//! Golden tests for the built-in examples: every expected-property tag of
//! every example is verified against the corresponding checker, and the
//! concrete values (image sets, witness loops, structure vectors) are
//! pinned exactly.

use combsub::corpus::{example, surf_squares, ExpectedProperty};
use combsub::decide::{
    check_consistency_domino_complete, check_consistency_restricted, decide_overlap,
    extract_structure, is_domino_complete, is_restricted_domino_complete, OverlapDecision,
    SquareConsistency,
};
use combsub::geom::{cell2, sym, v2, Orientation};
use combsub::substitution::{
    apply, check_consistent_on, check_nonoverlapping_on, enumerate_simple_loops, iterate,
    ApplyError, C0Policy, ConsistencyVerdict, OverlapVerdict,
};

#[test]
fn intro_example_data() {
    let ex = example("intro").unwrap();
    assert_eq!(ex.substitution.alphabet().len(), 3);
    assert_eq!(ex.substitution.rules().len(), 5);
    assert_eq!(ex.substitution.base_image(&sym("1")).len(), 4);
    assert_eq!(ex.substitution.base_image(&sym("2")).len(), 2);
    assert_eq!(ex.substitution.base_image(&sym("3")).len(), 3);
    assert_eq!(
        ex.substitution.rule_vector(&sym("3"), &sym("1"), &v2(1, 0)),
        Some(&v2(2, -2))
    );
}

#[test]
fn jp_image_is_exact() {
    let ex = example("jp").unwrap();
    let p6 = ex.pattern("p6").unwrap();
    let expected = ex.pattern("image").unwrap();
    let image = apply(&ex.substitution, p6, &cell2(0, 0, "2")).unwrap();
    assert_eq!(&image, expected);
    // consistent on p6, and the loop oracle agrees
    assert!(check_consistent_on(&ex.substitution, p6)
        .unwrap()
        .is_consistent());
    let loops = enumerate_simple_loops(&ex.substitution, p6, p6.len() + 1).unwrap();
    assert!(loops.iter().all(|(_, w)| w.is_zero()));
}

#[test]
fn inconsistent_example_witness() {
    let ex = example("inconsistent").unwrap();
    let square = ex.pattern("square").unwrap();
    match check_consistent_on(&ex.substitution, square).unwrap() {
        ConsistencyVerdict::Inconsistent { image_vector, .. } => {
            assert_eq!(image_vector, v2(0, -1));
        }
        other => panic!("expected inconsistency, got {other:?}"),
    }
    let loops = enumerate_simple_loops(&ex.substitution, square, square.len() + 1).unwrap();
    assert!(loops.iter().any(|(_, w)| *w == v2(0, -1)));
    // the square criterion finds the same loop value even though the
    // substitution is not domino-complete
    match check_consistency_domino_complete(&ex.substitution).unwrap() {
        SquareConsistency::Inconsistent {
            witness,
            image_vector,
        } => {
            assert_eq!(image_vector, v2(0, -1));
            assert_eq!(witness.pattern(), square.canonical_translate());
        }
        other => panic!("expected inconsistency, got {other:?}"),
    }
}

#[test]
fn overlapping_example_witness() {
    let ex = example("overlapping").unwrap();
    let tromino = ex.pattern("tromino").unwrap();
    assert!(check_consistent_on(&ex.substitution, tromino)
        .unwrap()
        .is_consistent());
    match check_nonoverlapping_on(&ex.substitution, tromino).unwrap() {
        OverlapVerdict::Overlapping { first, second, .. } => {
            assert_eq!(first, cell2(0, 1, "1"));
            assert_eq!(second, cell2(1, 0, "1"));
        }
        other => panic!("expected overlap, got {other:?}"),
    }
}

#[test]
fn tshape_pipeline_and_growth() {
    let ex = example("tshape").unwrap();
    let s = &ex.substitution;
    let (complete, _) = is_domino_complete(s).unwrap();
    assert!(complete);
    assert!(check_consistency_domino_complete(s).unwrap().is_consistent());
    let structure = extract_structure(s).unwrap();
    assert_eq!(structure.alpha, v2(3, 0));
    assert_eq!(structure.beta, v2(0, 2));
    assert_eq!(structure.v[&sym("1")], v2(0, 0));
    assert!(decide_overlap(s).unwrap().is_non_overlapping());

    let singleton = combsub::Pattern::from_cells(2, [cell2(0, 0, "1")]).unwrap();
    let iterates = iterate(s, &singleton, 4, C0Policy::LexLeast).unwrap();
    assert_eq!(iterates.len(), 5);
    let sizes: Vec<usize> = iterates.iter().map(|p| p.len()).collect();
    assert_eq!(sizes, [1, 4, 16, 64, 256]);
    assert_eq!(iterates[1].canonical_translate(), s.base_image(&sym("1")).canonical_translate());
}

#[test]
fn overlapfar_family() {
    for n in 1..=5i64 {
        let ex = example(&format!("overlapfar({n})")).unwrap();
        let s = &ex.substitution;
        let structure = extract_structure(s).unwrap();
        assert_eq!(structure.v[&sym("2")], v2(n, 0), "v(2) for n = {n}");
        match decide_overlap(s).unwrap() {
            OverlapDecision::Overlapping { t, t_prime, xy, .. } => {
                assert_eq!((t, t_prime), (sym("2"), sym("1")));
                assert_eq!(xy, v2(n, 0));
            }
            other => panic!("expected overlap for n = {n}, got {other:?}"),
        }
        let p_n = ex.pattern(&format!("P{n}")).unwrap();
        assert_eq!(p_n.len(), (n + 4) as usize);
        let c0 = p_n.cells().next().unwrap();
        match apply(s, p_n, &c0) {
            Err(ApplyError::Collision { .. }) => {}
            other => panic!("expected collision on P_{n}, got {other:?}"),
        }
    }
}

#[test]
fn mini_is_restricted_complete_and_consistent() {
    let ex = example("mini").unwrap();
    let s = &ex.substitution;
    let squares = surf_squares();
    let (ok, missing, extra) = is_restricted_domino_complete(s, &squares).unwrap();
    assert!(ok, "missing {missing:?} extra {extra:?}");
    assert!(check_consistency_restricted(s, &squares)
        .unwrap()
        .is_consistent());
    // not domino-complete: exactly the two dominoes excluded by the
    // surface subshift have no rule
    let (complete, missing) = is_domino_complete(s).unwrap();
    assert!(!complete);
    let tags: Vec<(Orientation, String, String)> = missing
        .iter()
        .map(|m| (m.orientation, m.first.to_string(), m.second.to_string()))
        .collect();
    assert_eq!(
        tags,
        [
            (Orientation::Horizontal, "2".into(), "3".into()),
            (Orientation::Vertical, "3".into(), "1".into()),
        ]
    );
    // width-one images: every base image occupies a single column
    for t in s.alphabet() {
        let xs: std::collections::BTreeSet<i64> =
            s.base_image(t).support().into_iter().map(|v| v.x()).collect();
        assert_eq!(xs.len(), 1, "base image of {t} is not width one");
    }
}

/// Every tag on every example is backed by a checker run.
#[test]
fn all_expected_property_tags_hold() {
    let names = [
        "intro",
        "jp",
        "inconsistent",
        "overlapping",
        "tshape",
        "overlapfar(2)",
        "mini",
    ];
    for name in names {
        let ex = example(name).unwrap();
        let s = &ex.substitution;
        for tag in &ex.notes {
            match tag {
                ExpectedProperty::DominoComplete => {
                    assert!(is_domino_complete(s).unwrap().0, "{name}: not complete");
                }
                ExpectedProperty::RestrictedComplete => {
                    let (ok, _, _) = is_restricted_domino_complete(s, &surf_squares()).unwrap();
                    assert!(ok, "{name}: not restricted-complete");
                }
                ExpectedProperty::Consistent => {
                    if is_domino_complete(s).unwrap().0 {
                        assert!(
                            check_consistency_domino_complete(s).unwrap().is_consistent(),
                            "{name}: inconsistent"
                        );
                    } else if ex.notes.contains(&ExpectedProperty::RestrictedComplete) {
                        assert!(
                            check_consistency_restricted(s, &surf_squares())
                                .unwrap()
                                .is_consistent(),
                            "{name}: inconsistent on the surface squares"
                        );
                    } else {
                        for (pname, p) in &ex.patterns {
                            assert!(
                                check_consistent_on(s, p).unwrap().is_consistent(),
                                "{name}: inconsistent on {pname}"
                            );
                        }
                    }
                }
                ExpectedProperty::Inconsistent => {
                    assert!(ex.patterns.iter().any(|(_, p)| {
                        !check_consistent_on(s, p).unwrap().is_consistent()
                    }), "{name}: no pattern witnesses inconsistency");
                }
                ExpectedProperty::Overlapping => {
                    let witnessed = ex.patterns.iter().any(|(_, p)| {
                        matches!(
                            check_nonoverlapping_on(s, p),
                            Ok(OverlapVerdict::Overlapping { .. })
                        )
                    });
                    let decided = is_domino_complete(s).unwrap().0
                        && !decide_overlap(s).unwrap().is_non_overlapping();
                    assert!(witnessed || decided, "{name}: no overlap found");
                }
                ExpectedProperty::NonOverlapping => {
                    assert!(
                        decide_overlap(s).unwrap().is_non_overlapping(),
                        "{name}: overlapping"
                    );
                }
            }
        }
    }
}

//! Acceptance suite: one test per release criterion, each ending in a
//! single pass line. Run with `--nocapture` to see the lines; a failed
//! assertion fails the corresponding criterion.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use combsub::corpus::{
    example, generate_surface_rectangles, sample_covered_subpatterns, surf_squares,
};
use combsub::decide::{
    check_consistency_domino_complete, check_consistency_restricted, decide_overlap,
    extract_structure, is_domino_complete, is_restricted_domino_complete, solve_lattice_equation,
    OverlapDecision, SquareConsistency,
};
use combsub::geom::{cell2, sym, v2, Cell, Coord, LatticeVector, Pattern, Symbol};
use combsub::sampling::{random_domino_complete, random_tile_set, rng};
use combsub::substitution::{
    apply, check_consistent_on, check_nonoverlapping_on, enumerate_simple_loops, image_vector,
    is_covered, iterate, ApplyError, C0Policy, OverlapVerdict, Path,
};
use combsub::wang::{
    build_consistency_reduction, build_overlap_reduction, cycle_exists_exhaustive, decorate_cycle,
    find_cycle, overlap_fresh_symbols, WangTileSet,
};

fn pass(number: u32, name: &str) {
    println!("acceptance {number:02} ({name}): PASS");
}

#[test]
fn acceptance_01_jp_exactness() {
    let ex = example("jp").unwrap();
    let image = apply(&ex.substitution, ex.pattern("p6").unwrap(), &cell2(0, 0, "2")).unwrap();
    let expected = Pattern::from_cells(
        2,
        [
            cell2(0, 0, "3"),
            cell2(-2, 0, "1"),
            cell2(-1, 0, "3"),
            cell2(-2, -1, "2"),
            cell2(-2, 1, "1"),
            cell2(-1, 1, "3"),
            cell2(0, 1, "2"),
            cell2(0, 2, "1"),
            cell2(1, 2, "3"),
        ],
    )
    .unwrap();
    assert_eq!(image, expected);
    pass(1, "JP exactness");
}

#[test]
fn acceptance_02_inconsistency_witness() {
    let ex = example("inconsistent").unwrap();
    let square = ex.pattern("square").unwrap();
    match check_consistent_on(&ex.substitution, square).unwrap() {
        combsub::ConsistencyVerdict::Inconsistent {
            witness,
            image_vector: w,
        } => {
            assert_eq!(w, v2(0, -1));
            assert_eq!(image_vector(&ex.substitution, &witness).unwrap(), v2(0, -1));
        }
        other => panic!("expected an inconsistency witness, got {other:?}"),
    }
    pass(2, "inconsistency witness");
}

#[test]
fn acceptance_03_overlap_witness() {
    let ex = example("overlapping").unwrap();
    match check_nonoverlapping_on(&ex.substitution, ex.pattern("tromino").unwrap()).unwrap() {
        OverlapVerdict::Overlapping { first, second, .. } => {
            assert_eq!((first, second), (cell2(0, 1, "1"), cell2(1, 0, "1")));
        }
        other => panic!("expected an overlap witness, got {other:?}"),
    }
    pass(3, "overlap witness");
}

#[test]
fn acceptance_04_tshape_pipeline() {
    let s = example("tshape").unwrap().substitution;
    assert!(is_domino_complete(&s).unwrap().0);
    assert!(check_consistency_domino_complete(&s).unwrap().is_consistent());
    let structure = extract_structure(&s).unwrap();
    assert_eq!(
        (structure.alpha, structure.beta, structure.v[&sym("1")].clone()),
        (v2(3, 0), v2(0, 2), v2(0, 0))
    );
    assert!(decide_overlap(&s).unwrap().is_non_overlapping());
    let singleton = Pattern::from_cells(2, [cell2(0, 0, "1")]).unwrap();
    let iterates = iterate(&s, &singleton, 4, C0Policy::LexLeast).unwrap();
    assert_eq!(iterates.last().unwrap().len(), 256);
    pass(4, "T-shape pipeline");
}

/// A random connected pattern over `alphabet` whose support stays inside
/// the vertical strip `0 <= x < width` (horizontal diameter < width).
fn random_strip_pattern(
    rng: &mut ChaCha8Rng,
    alphabet: &[Symbol],
    width: Coord,
    size: usize,
) -> Pattern {
    let mut cells: BTreeSet<LatticeVector> = BTreeSet::from([v2(0, 0)]);
    while cells.len() < size {
        let boundary: Vec<LatticeVector> = cells
            .iter()
            .flat_map(|c| {
                [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .into_iter()
                    .map(|(dx, dy)| v2(c.x() + dx, c.y() + dy))
            })
            .filter(|n| n.x() >= 0 && n.x() < width && !cells.contains(n))
            .collect();
        let Some(next) = boundary.choose(rng) else { break };
        cells.insert(next.clone());
    }
    Pattern::from_cells(
        2,
        cells
            .into_iter()
            .map(|v| Cell::new(v, alphabet.choose(rng).unwrap().clone())),
    )
    .unwrap()
}

#[test]
fn acceptance_05_overlapfar_family() {
    let mut rng = rng(505);
    for n in 1..=5i64 {
        let ex = example(&format!("overlapfar({n})")).unwrap();
        let s = &ex.substitution;
        let structure = extract_structure(s).unwrap();
        assert_eq!(structure.v[&sym("2")], v2(n, 0));
        assert!(matches!(
            decide_overlap(s).unwrap(),
            OverlapDecision::Overlapping { .. }
        ));
        let p_n = ex.pattern(&format!("P{n}")).unwrap();
        let c0 = p_n.cells().next().unwrap();
        assert!(matches!(
            apply(s, p_n, &c0),
            Err(ApplyError::Collision { .. })
        ));
        // narrow patterns never collide
        let alphabet: Vec<Symbol> = s.alphabet().iter().cloned().collect();
        for _ in 0..50 {
            let size = rng.gen_range(1..=10);
            let p = random_strip_pattern(&mut rng, &alphabet, n, size);
            let c0 = p.cells().next().unwrap();
            apply(s, &p, &c0).unwrap_or_else(|e| {
                panic!("collision on diameter-<{n} pattern {p}: {e}")
            });
        }
    }
    pass(5, "overlap-far family");
}

#[test]
fn acceptance_06_mini_surface() {
    let squares = surf_squares();
    assert_eq!(squares.len(), 28);
    let distinct: BTreeSet<&Pattern> = squares.iter().collect();
    assert_eq!(distinct.len(), 28);
    assert_eq!(combsub::corpus::all_squares().len(), 81);

    let mini = example("mini").unwrap().substitution;
    assert!(is_restricted_domino_complete(&mini, &squares).unwrap().0);
    assert!(matches!(
        check_consistency_restricted(&mini, &squares).unwrap(),
        SquareConsistency::Consistent
    ));

    let mut sampled = 0;
    for (i, rect) in generate_surface_rectangles(6, 6, 10, 606).iter().enumerate() {
        for p in sample_covered_subpatterns(rect, &mini, 20, 700 + i as u64) {
            assert!(is_covered(&mini, &p));
            let c0 = p.cells().next().unwrap();
            apply(&mini, &p, &c0)
                .unwrap_or_else(|e| panic!("mini collided on admissible sample {p}: {e}"));
            sampled += 1;
        }
    }
    assert_eq!(sampled, 200, "expected 200 locally admissible samples");
    pass(6, "mini on the surface subshift");
}

#[test]
fn acceptance_07_consistency_theorem() {
    let mut rng = rng(707);
    for _ in 0..100 {
        let size = rng.gen_range(1..=3);
        let s = random_domino_complete(&mut rng, size);
        match check_consistency_domino_complete(&s).unwrap() {
            SquareConsistency::Consistent => {
                for _ in 0..20 {
                    let p = combsub::sampling::random_covered_pattern(&mut rng, &s, 16);
                    assert!(check_consistent_on(&s, &p).unwrap().is_consistent());
                }
            }
            SquareConsistency::Inconsistent { witness, .. } => {
                assert!(!check_consistent_on(&s, &witness.pattern())
                    .unwrap()
                    .is_consistent());
            }
        }
    }
    pass(7, "consistency theorem oracle equivalence");
}

#[test]
fn acceptance_08_diophantine_oracle() {
    let mut rng = rng(808);
    for _ in 0..200 {
        let mut v = || v2(rng.gen_range(-5..=5), rng.gen_range(-5..=5));
        let (alpha, beta, w) = (v(), v(), v());
        let classified = solve_lattice_equation(&alpha, &beta, &w);
        let mut any_in_box = false;
        for x in -10..=10 {
            for y in -10..=10 {
                let satisfied = alpha.scale(x).add(&beta.scale(y)) == w;
                any_in_box |= satisfied;
                assert_eq!(
                    classified.contains(x, y),
                    satisfied,
                    "mismatch at ({x},{y}) for {alpha},{beta},{w}"
                );
            }
        }
        if matches!(classified, combsub::DiophantineSolutionSet::Empty) {
            assert!(!any_in_box);
        }
    }
    pass(8, "Diophantine solver oracle");
}

fn induced_loop_is_nonzero(tiles: &WangTileSet, cycle: &combsub::TileCycle) -> bool {
    let reduction = build_consistency_reduction(tiles);
    let (pattern, loop_cells) = decorate_cycle(tiles, cycle);
    let gamma = Path::new(loop_cells).unwrap();
    let omega = image_vector(&reduction, &gamma).unwrap();
    // the decorated loop is a loop of the induced pattern
    assert!(combsub::substitution::is_valid_path(
        &reduction,
        &gamma,
        Some(&pattern)
    ));
    let loops = enumerate_simple_loops(&reduction, &pattern, pattern.len() + 1).unwrap();
    assert!(
        loops.iter().any(|(_, w)| !w.is_zero()),
        "no nonzero loop on the induced pattern"
    );
    !omega.is_zero()
}

#[test]
fn acceptance_09_wang_consistency_reduction() {
    let uniform = example_tiles();
    let cycle = find_cycle(&uniform, 4).expect("uniform tile admits the unit-square cycle");
    assert_eq!(cycle.len(), 5);
    let reduction = build_consistency_reduction(&uniform);
    let (_, loop_cells) = decorate_cycle(&uniform, &cycle);
    let omega = image_vector(&reduction, &Path::new(loop_cells).unwrap()).unwrap();
    assert_eq!(omega, v2(4, 0));

    let mut rng = rng(909);
    for _ in 0..30 {
        let tiles = random_tile_set(&mut rng, 4);
        match find_cycle(&tiles, 12) {
            Some(cycle) => {
                assert!(cycle.verify(&tiles));
                assert!(induced_loop_is_nonzero(&tiles, &cycle));
            }
            None => assert!(
                !cycle_exists_exhaustive(&tiles, 12),
                "search missed a cycle in {tiles:?}"
            ),
        }
    }
    pass(9, "Wang reduction correspondence");
}

fn example_tiles() -> WangTileSet {
    let text = std::fs::read_to_string(fixture("uniform1.tiles")).unwrap();
    combsub::format::parse_tile_set(&text).unwrap()
}

#[test]
fn acceptance_10_wang_overlap_reduction() {
    let tiles = example_tiles();
    let s = build_overlap_reduction(&tiles, 0, 0).unwrap();
    let (a0, b0) = overlap_fresh_symbols(&tiles, 0, 0);
    let u = tiles.tiles()[0].name.clone();

    // unit-square cycle with the bottom horizontal pair replaced by a0-b0
    let replaced = Pattern::from_cells(
        2,
        [
            Cell::new(v2(0, 0), a0),
            Cell::new(v2(1, 0), b0),
            Cell::new(v2(0, 1), u.clone()),
            Cell::new(v2(1, 1), u.clone()),
        ],
    )
    .unwrap();
    assert!(is_covered(&s, &replaced));
    let c0 = replaced.cells().next().unwrap();
    assert!(matches!(
        apply(&s, &replaced, &c0),
        Err(ApplyError::Collision { .. })
    ));

    // tile-only patterns expand horizontally by a factor of two
    let plain = Pattern::from_cells(
        2,
        [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]
            .map(|(x, y)| Cell::new(v2(x, y), u.clone())),
    )
    .unwrap();
    let image = apply(&s, &plain, &cell2(0, 0, u.as_str())).unwrap();
    let expected: BTreeSet<LatticeVector> = plain
        .support()
        .into_iter()
        .map(|v| v2(2 * v.x(), v.y()))
        .collect();
    let support: BTreeSet<LatticeVector> = image.support().into_iter().collect();
    assert_eq!(support, expected);
    pass(10, "Wang overlap reduction");
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combsub"))
        .args(args)
        .output()
        .expect("spawn combsub")
}

#[test]
fn acceptance_11_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let singleton = dir.path().join("singleton.patterns");
    std::fs::write(&singleton, "pattern one\ncell (0,0) 1\n").unwrap();
    let path = |p: &PathBuf| p.to_str().unwrap().to_string();
    let f = |name: &str| path(&fixture(name));

    let out_apply = path(&dir.path().join("applied.patterns"));
    let out_svg = path(&dir.path().join("pattern.svg"));
    let out_reduce = path(&dir.path().join("reduction.subst"));
    let out_corpus = path(&dir.path().join("corpus"));
    let invocations: Vec<(Vec<String>, i32, Vec<String>)> = vec![
        (vec!["validate".into(), f("jp.subst")], 0, vec![]),
        (
            vec!["coverage".into(), f("overlapping.subst"), f("overlapping.patterns")],
            0,
            vec![],
        ),
        (
            vec!["consistency".into(), f("inconsistent.subst"), "--pattern".into(), f("inconsistent.patterns")],
            1,
            vec![],
        ),
        (
            vec!["consistency".into(), f("tshape.subst"), "--domino-complete".into()],
            0,
            vec![],
        ),
        (
            vec![
                "consistency".into(),
                f("mini.subst"),
                "--restricted".into(),
                f("surf_squares.patterns"),
            ],
            0,
            vec![],
        ),
        (
            vec!["overlap".into(), f("overlapping.subst"), "--pattern".into(), f("overlapping.patterns")],
            1,
            vec![],
        ),
        (vec!["overlap".into(), f("tshape.subst"), "--global".into()], 0, vec![]),
        (vec!["structure".into(), f("tshape.subst")], 0, vec![]),
        (
            vec![
                "apply".into(),
                f("tshape.subst"),
                path(&singleton),
                "--origin".into(),
                "0,0".into(),
                "--iterations".into(),
                "2".into(),
                "--out".into(),
                out_apply.clone(),
            ],
            0,
            vec![out_apply.clone()],
        ),
        (
            vec![
                "render".into(),
                f("inconsistent.patterns"),
                "--svg".into(),
                out_svg.clone(),
                "--cell-size".into(),
                "24".into(),
            ],
            0,
            vec![out_svg.clone()],
        ),
        (
            vec![
                "wang".into(),
                "reduce".into(),
                f("uniform1.tiles"),
                "--out".into(),
                out_reduce.clone(),
            ],
            0,
            vec![out_reduce.clone()],
        ),
        (
            vec![
                "wang".into(),
                "reduce".into(),
                f("uniform1.tiles"),
                "--overlap".into(),
                "u".into(),
                "u".into(),
            ],
            0,
            vec![],
        ),
        (
            vec!["wang".into(), "cycle".into(), f("uniform1.tiles"), "--max-cells".into(), "4".into()],
            0,
            vec![],
        ),
        (
            vec!["corpus".into(), "jp".into(), "--out-dir".into(), out_corpus.clone()],
            0,
            vec![
                format!("{out_corpus}/jp.subst"),
                format!("{out_corpus}/jp.patterns"),
            ],
        ),
    ];

    for (args, expected_code, files) in &invocations {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run_cli(&argv);
        let first_files: Vec<Vec<u8>> =
            files.iter().map(|f| std::fs::read(f).unwrap()).collect();
        let second = run_cli(&argv);
        let second_files: Vec<Vec<u8>> =
            files.iter().map(|f| std::fs::read(f).unwrap()).collect();
        assert_eq!(
            first.status.code(),
            Some(*expected_code),
            "exit code for {args:?}: {}",
            String::from_utf8_lossy(&first.stderr)
        );
        assert_eq!(second.status.code(), Some(*expected_code));
        assert_eq!(first.stdout, second.stdout, "stdout differs for {args:?}");
        assert_eq!(first_files, second_files, "output files differ for {args:?}");
        assert!(!first.stdout.is_empty(), "no report for {args:?}");
    }
    pass(11, "CLI determinism");
}

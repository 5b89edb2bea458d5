//! Built-in example substitutions and patterns, the 28-square surface set,
//! and generators of locally admissible surface configurations.
//!
//! All fixed example data lives in text fixtures under `fixtures/` and is
//! loaded through the regular parsers, so the format round-trips are
//! exercised on every load and the data exists in exactly one place.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::format::{parse_patterns, parse_substitution};
use crate::geom::{v2, Cell, Coord, LatticeVector, Pattern, Symbol};
use crate::sampling::rng;
use crate::substitution::{is_covered, Substitution};

const INTRO_SUBST: &str = include_str!("../../../fixtures/intro.subst");
const JP_SUBST: &str = include_str!("../../../fixtures/jp.subst");
const JP_PATTERNS: &str = include_str!("../../../fixtures/jp.patterns");
const INCONSISTENT_SUBST: &str = include_str!("../../../fixtures/inconsistent.subst");
const INCONSISTENT_PATTERNS: &str = include_str!("../../../fixtures/inconsistent.patterns");
const OVERLAPPING_SUBST: &str = include_str!("../../../fixtures/overlapping.subst");
const OVERLAPPING_PATTERNS: &str = include_str!("../../../fixtures/overlapping.patterns");
const TSHAPE_SUBST: &str = include_str!("../../../fixtures/tshape.subst");
const MINI_SUBST: &str = include_str!("../../../fixtures/mini.subst");
const SURF_SQUARES: &str = include_str!("../../../fixtures/surf_squares.patterns");

/// Properties an example is expected to have; each tag is verified by the
/// corresponding checker in the test suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExpectedProperty {
    /// Consistent on each bundled pattern (or, when domino-complete, on
    /// all patterns).
    Consistent,
    /// Some bundled pattern witnesses an inconsistency.
    Inconsistent,
    Overlapping,
    NonOverlapping,
    DominoComplete,
    /// Domino-complete exactly for the surface squares.
    RestrictedComplete,
}

/// A paper example: a substitution together with its companion patterns
/// and the properties it is known to have.
#[derive(Debug, Clone)]
pub struct NamedExample {
    pub name: String,
    pub substitution: Substitution,
    /// Companion patterns keyed by name, in fixture order.
    pub patterns: Vec<(String, Pattern)>,
    pub notes: Vec<ExpectedProperty>,
}

impl NamedExample {
    /// Look up a companion pattern by name.
    pub fn pattern(&self, name: &str) -> Option<&Pattern> {
        self.patterns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown example `{0}` (expected intro, jp, inconsistent, overlapping, tshape, overlapfar(n) or mini)")]
    UnknownExample(String),
}

fn load(
    name: &str,
    subst: &str,
    patterns: Option<&str>,
    notes: &[ExpectedProperty],
) -> NamedExample {
    let substitution = parse_substitution(subst)
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"));
    let patterns = patterns
        .map(|text| {
            parse_patterns(text)
                .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
                .into_iter()
                .enumerate()
                .map(|(i, (n, p))| (n.unwrap_or_else(|| format!("p{i}")), p))
                .collect()
        })
        .unwrap_or_default();
    NamedExample {
        name: name.to_string(),
        substitution,
        patterns,
        notes: notes.to_vec(),
    }
}

/// The substitution text of the overlap-far family member `sigma_n`.
pub fn overlapfar_source(n: u32) -> String {
    let n = Coord::from(n);
    format!(
        "\
# Overlap-far family member: overlapping, but only on patterns of\n\
# horizontal diameter at least {n}.\n\
alphabet 1 2\n\
base 1 : (0,0)->1\n\
base 2 : (0,0)->2\n\
rule 1 1 (1,0) -> (1,0)\n\
rule 1 1 (0,1) -> (0,1)\n\
rule 1 2 (1,0) -> ({},0)\n\
rule 1 2 (0,1) -> ({n},1)\n\
rule 2 1 (1,0) -> ({},0)\n\
rule 2 1 (0,1) -> ({},1)\n\
rule 2 2 (1,0) -> (1,0)\n\
rule 2 2 (0,1) -> (0,1)\n",
        n + 1,
        1 - n,
        -n,
    )
}

fn overlapfar_example(n: u32) -> NamedExample {
    let mut ex = load(
        &format!("overlapfar({n})"),
        &overlapfar_source(n),
        None,
        &[
            ExpectedProperty::DominoComplete,
            ExpectedProperty::Consistent,
            ExpectedProperty::Overlapping,
        ],
    );
    // The witness pattern P_n: a 2 and a 1 at horizontal distance n,
    // joined by a row of 1s above. For n = 0 the two bottom cells
    // coincide, so the pattern only exists for n >= 1.
    if n >= 1 {
        let n = Coord::from(n);
        let mut cells = vec![
            Cell::new(v2(0, 0), Symbol::new("2").unwrap()),
            Cell::new(v2(n, 0), Symbol::new("1").unwrap()),
        ];
        cells.extend(
            (0..=n + 1).map(|i| Cell::new(v2(i, 1), Symbol::new("1").unwrap())),
        );
        let p = Pattern::from_cells(2, cells).expect("distinct vectors for n >= 1");
        ex.patterns.push((format!("P{n}"), p));
    }
    ex
}

/// Look up a built-in example by name. `overlapfar` is a family and takes
/// its parameter in parentheses, e.g. `overlapfar(3)`.
pub fn example(name: &str) -> Result<NamedExample, CorpusError> {
    use ExpectedProperty::*;
    if let Some(arg) = name
        .strip_prefix("overlapfar(")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let n: u32 = arg
            .trim()
            .parse()
            .map_err(|_| CorpusError::UnknownExample(name.to_string()))?;
        return Ok(overlapfar_example(n));
    }
    Ok(match name {
        "intro" => load("intro", INTRO_SUBST, None, &[]),
        "jp" => load("jp", JP_SUBST, Some(JP_PATTERNS), &[Consistent]),
        "inconsistent" => load(
            "inconsistent",
            INCONSISTENT_SUBST,
            Some(INCONSISTENT_PATTERNS),
            &[Inconsistent],
        ),
        "overlapping" => load(
            "overlapping",
            OVERLAPPING_SUBST,
            Some(OVERLAPPING_PATTERNS),
            &[Consistent, Overlapping],
        ),
        "tshape" => load(
            "tshape",
            TSHAPE_SUBST,
            None,
            &[DominoComplete, Consistent, NonOverlapping],
        ),
        "mini" => load("mini", MINI_SUBST, None, &[RestrictedComplete, Consistent]),
        other => return Err(CorpusError::UnknownExample(other.to_string())),
    })
}

/// The 28 allowed 2x2 squares of the surface subshift, anchored at the
/// origin.
pub fn surf_squares() -> Vec<Pattern> {
    parse_patterns(SURF_SQUARES)
        .expect("surface square fixture parses")
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

/// All 81 possible 2x2 squares over the alphabet {1, 2, 3}.
pub fn all_squares() -> Vec<Pattern> {
    let syms: Vec<Symbol> = ["1", "2", "3"]
        .iter()
        .map(|s| Symbol::new(s).unwrap())
        .collect();
    let mut out = Vec::new();
    for bl in &syms {
        for br in &syms {
            for tl in &syms {
                for tr in &syms {
                    out.push(
                        Pattern::from_cells(
                            2,
                            [
                                Cell::new(v2(0, 0), bl.clone()),
                                Cell::new(v2(1, 0), br.clone()),
                                Cell::new(v2(0, 1), tl.clone()),
                                Cell::new(v2(1, 1), tr.clone()),
                            ],
                        )
                        .unwrap(),
                    );
                }
            }
        }
    }
    out
}

/// Enumerate width x height rectangles over {1, 2, 3} whose every 2x2
/// window belongs to `allowed`, by row-major backtracking. The order in
/// which symbol values are tried at each cell is shuffled per cell from
/// the seed, so different seeds explore the (same) solution set in
/// different orders. Returns at most `limit` rectangles as full patterns
/// with support `[0, width) x [0, height)`.
pub fn generate_rectangles(
    width: usize,
    height: usize,
    limit: usize,
    seed: u64,
    allowed: &[Pattern],
) -> Vec<Pattern> {
    assert!(width >= 2 && height >= 2, "rectangles must be at least 2x2");
    let allowed: BTreeSet<Pattern> = allowed.iter().map(Pattern::canonical_translate).collect();
    let syms: Vec<Symbol> = ["1", "2", "3"]
        .iter()
        .map(|s| Symbol::new(s).unwrap())
        .collect();
    let mut rng = rng(seed);
    let orders: Vec<Vec<Symbol>> = (0..width * height)
        .map(|_| {
            let mut o = syms.clone();
            o.shuffle(&mut rng);
            o
        })
        .collect();

    let window_ok = |grid: &[Option<Symbol>], x: usize, y: usize| -> bool {
        let at = |x: usize, y: usize| grid[y * width + x].clone().unwrap();
        let square = Pattern::from_cells(
            2,
            [
                Cell::new(v2(0, 0), at(x, y)),
                Cell::new(v2(1, 0), at(x + 1, y)),
                Cell::new(v2(0, 1), at(x, y + 1)),
                Cell::new(v2(1, 1), at(x + 1, y + 1)),
            ],
        )
        .unwrap();
        allowed.contains(&square)
    };

    let mut results = Vec::new();
    let mut grid: Vec<Option<Symbol>> = vec![None; width * height];
    // Explicit stack of (cell index, next order position) for the
    // backtracking search; recursion depth would otherwise track the grid
    // size.
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some((idx, choice)) = stack.pop() {
        if results.len() >= limit {
            break;
        }
        if choice >= syms.len() {
            grid[idx] = None;
            continue;
        }
        stack.push((idx, choice + 1));
        grid[idx] = Some(orders[idx][choice].clone());
        // placing cell (x, y) completes the window with corner (x-1, y-1)
        let (x, y) = (idx % width, idx / width);
        if x >= 1 && y >= 1 && !window_ok(&grid, x - 1, y - 1) {
            // next iteration pops (idx, choice + 1) and tries the
            // remaining values for this cell
            continue;
        }
        if idx + 1 == grid.len() {
            let cells = grid.iter().enumerate().map(|(i, s)| {
                Cell::new(
                    v2((i % width) as Coord, (i / width) as Coord),
                    s.clone().unwrap(),
                )
            });
            results.push(Pattern::from_cells(2, cells).unwrap());
            grid[idx] = None;
        } else {
            stack.push((idx + 1, 0));
        }
    }
    results
}

/// [`generate_rectangles`] constrained to the 28 surface squares.
pub fn generate_surface_rectangles(
    width: usize,
    height: usize,
    limit: usize,
    seed: u64,
) -> Vec<Pattern> {
    generate_rectangles(width, height, limit, seed, &surf_squares())
}

/// Draw `count` random connected subpatterns of `config` that are covered
/// for `s`. Deterministic for a fixed seed; candidates that fail the
/// coverage check are skipped (bounded retries), so fewer than `count`
/// patterns can be returned in pathological cases.
pub fn sample_covered_subpatterns(
    config: &Pattern,
    s: &Substitution,
    count: usize,
    seed: u64,
) -> Vec<Pattern> {
    let mut rng = rng(seed);
    let support: Vec<LatticeVector> = config.support().into_iter().collect();
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.saturating_mul(20).max(100) {
        attempts += 1;
        if support.is_empty() {
            break;
        }
        let start = support.choose(&mut rng).unwrap().clone();
        let target = rng.gen_range(1..=support.len().min(12));
        let mut chosen: BTreeSet<LatticeVector> = BTreeSet::from([start]);
        while chosen.len() < target {
            let boundary: Vec<LatticeVector> = chosen
                .iter()
                .flat_map(|c| {
                    [(1, 0), (-1, 0), (0, 1), (0, -1)]
                        .into_iter()
                        .map(|(dx, dy)| v2(c.x() + dx, c.y() + dy))
                })
                .filter(|v| config.contains_vector(v) && !chosen.contains(v))
                .collect();
            let Some(next) = boundary.choose(&mut rng) else {
                break;
            };
            chosen.insert(next.clone());
        }
        let cells = chosen
            .into_iter()
            .map(|v| Cell::new(v.clone(), config.symbol_at(&v).unwrap().clone()));
        let p = Pattern::from_cells(2, cells).unwrap();
        if is_covered(s, &p) {
            out.push(p);
        }
    }
    out
}

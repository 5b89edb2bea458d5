//! Wang tiles, the bounded weak-cycle search, and the two reduction
//! constructions that turn a tile set into a combinatorial substitution:
//! one whose consistency encodes the cycle tiling problem, one whose
//! non-overlapping property does.
//!
//! The cycle tiling problem itself is undecidable, so [`find_cycle`] is
//! explicitly bounded: an absent result means "none within the bound", not
//! "none".

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::geom::{v2, Cell, LatticeVector, Pattern, Symbol};
use crate::substitution::{ConcatenationRule, Substitution};

/// A unit square tile with colored edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WangTile {
    pub name: Symbol,
    pub north: Symbol,
    pub east: Symbol,
    pub south: Symbol,
    pub west: Symbol,
}

/// A finite list of Wang tiles with stable indices. Names are unique (the
/// parser and reductions rely on it); edge colorings may repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WangTileSet {
    tiles: Vec<WangTile>,
}

impl WangTileSet {
    pub fn new(tiles: Vec<WangTile>) -> Self {
        assert!(!tiles.is_empty(), "tile sets are nonempty");
        let names: BTreeSet<&Symbol> = tiles.iter().map(|t| &t.name).collect();
        assert_eq!(names.len(), tiles.len(), "tile names must be unique");
        WangTileSet { tiles }
    }

    pub fn tiles(&self) -> &[WangTile] {
        &self.tiles
    }

    pub fn index_of(&self, name: &Symbol) -> Option<usize> {
        self.tiles.iter().position(|t| &t.name == name)
    }
}

/// The four unit directions in the deterministic exploration order
/// East, North, West, South.
pub const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// True iff tile `b` placed at offset `dir` from tile `a` matches `a` on
/// the shared edge. `dir` must be a unit vector.
pub fn matches(a: &WangTile, b: &WangTile, dir: &LatticeVector) -> bool {
    match dir.coords() {
        [1, 0] => a.east == b.west,
        [-1, 0] => a.west == b.east,
        [0, 1] => a.north == b.south,
        [0, -1] => a.south == b.north,
        other => panic!("matches: direction {other:?} is not a unit vector"),
    }
}

/// A cycle placement `(a_1, ..., a_n)` with `a_n = a_1`, `n >= 5`:
/// consecutive placements are edge-adjacent with matching colors, and all
/// placements except the closing repeat have distinct positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileCycle {
    /// `(position, tile index)` including the closing repeat of the first
    /// placement.
    pub placements: Vec<(LatticeVector, usize)>,
}

impl TileCycle {
    /// Sequence length `n` (including the closing repeat).
    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: n >= 5
    }

    /// Re-verify every invariant against the tile set; used by tests and by
    /// report printing.
    pub fn verify(&self, tiles: &WangTileSet) -> bool {
        let n = self.placements.len();
        if n < 5 || self.placements[0] != self.placements[n - 1] {
            return false;
        }
        let positions: HashSet<&LatticeVector> =
            self.placements[..n - 1].iter().map(|(p, _)| p).collect();
        if positions.len() != n - 1 {
            return false;
        }
        self.placements.windows(2).all(|w| {
            let (ref pa, ia) = w[0];
            let (ref pb, ib) = w[1];
            let dir = pb.sub(pa);
            dir.max_norm() == 1
                && dir.coords().iter().map(|c| c.abs()).sum::<i64>() == 1
                && matches(&tiles.tiles[ia], &tiles.tiles[ib], &dir)
        })
    }
}

impl fmt::Display for TileCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (pos, idx)) in self.placements.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{pos}#{idx}")?;
        }
        Ok(())
    }
}

/// Bounded depth-first search for a weak tiling cycle: at most `max_cells`
/// distinct placements, positions within the `max_cells`-radius box around
/// the origin, deterministic ordering (start tile index, then extension
/// tile index, then direction E,N,W,S). Returns the first cycle found.
pub fn find_cycle(tiles: &WangTileSet, max_cells: usize) -> Option<TileCycle> {
    if max_cells < 4 {
        return None;
    }
    for start in 0..tiles.tiles.len() {
        let mut path: Vec<((i64, i64), usize)> = vec![((0, 0), start)];
        let mut used: HashSet<(i64, i64)> = HashSet::from([(0, 0)]);
        if let Some(cycle) = dfs_cycle(tiles, start, max_cells, &mut path, &mut used) {
            return Some(cycle);
        }
    }
    None
}

fn dfs_cycle(
    tiles: &WangTileSet,
    start: usize,
    max_cells: usize,
    path: &mut Vec<((i64, i64), usize)>,
    used: &mut HashSet<(i64, i64)>,
) -> Option<TileCycle> {
    let (last_pos, last_tile) = *path.last().expect("nonempty path");
    let bound = max_cells as i64;
    for tile in 0..tiles.tiles.len() {
        for (dx, dy) in DIRECTIONS {
            let next = (last_pos.0 + dx, last_pos.1 + dy);
            let dir = v2(dx, dy);
            if !matches(&tiles.tiles[last_tile], &tiles.tiles[tile], &dir) {
                continue;
            }
            if next == (0, 0) && tile == start && path.len() >= 4 {
                let mut placements: Vec<(LatticeVector, usize)> = path
                    .iter()
                    .map(|((x, y), t)| (v2(*x, *y), *t))
                    .collect();
                placements.push((v2(0, 0), start));
                return Some(TileCycle { placements });
            }
            if !used.contains(&next)
                && path.len() < max_cells
                && next.0.abs() <= bound
                && next.1.abs() <= bound
            {
                path.push((next, tile));
                used.insert(next);
                if let Some(c) = dfs_cycle(tiles, start, max_cells, path, used) {
                    return Some(c);
                }
                used.remove(&next);
                path.pop();
            }
        }
    }
    None
}

/// Slow reference implementation of the bounded cycle-existence question,
/// written independently of [`find_cycle`] (breadth-first over partial
/// chains). Used as a cross-check oracle in tests.
pub fn cycle_exists_exhaustive(tiles: &WangTileSet, max_cells: usize) -> bool {
    if max_cells < 4 {
        return false;
    }
    // A chain state: positions used, last position, last tile, start tile.
    // Plain breadth-first enumeration of all chains up to max_cells.
    type Chain = (Vec<(i64, i64)>, usize, usize);
    let mut frontier: Vec<Chain> = (0..tiles.tiles.len())
        .map(|t| (vec![(0, 0)], t, t))
        .collect();
    while let Some((positions, last_tile, start)) = frontier.pop() {
        let last_pos = *positions.last().expect("nonempty");
        for (dx, dy) in DIRECTIONS {
            let next = (last_pos.0 + dx, last_pos.1 + dy);
            for tile in 0..tiles.tiles.len() {
                if !matches(&tiles.tiles[last_tile], &tiles.tiles[tile], &v2(dx, dy)) {
                    continue;
                }
                if next == (0, 0) && tile == start && positions.len() >= 4 {
                    return true;
                }
                if positions.len() < max_cells && !positions.contains(&next) {
                    let mut ext = positions.clone();
                    ext.push(next);
                    frontier.push((ext, tile, start));
                }
            }
        }
    }
    false
}

/// The four arrow decorations of the consistency reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arrow {
    East,
    North,
    West,
    South,
}

impl Arrow {
    pub const ALL: [Arrow; 4] = [Arrow::East, Arrow::North, Arrow::West, Arrow::South];

    pub fn vector(self) -> LatticeVector {
        match self {
            Arrow::East => v2(1, 0),
            Arrow::North => v2(0, 1),
            Arrow::West => v2(-1, 0),
            Arrow::South => v2(0, -1),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Arrow::East => "E",
            Arrow::North => "N",
            Arrow::West => "W",
            Arrow::South => "S",
        }
    }
}

/// The alphabet symbol of a decorated tile in the consistency reduction.
pub fn decorated_symbol(tile: &WangTile, arrow: Arrow) -> Symbol {
    Symbol::new(&format!("{}@{}", tile.name, arrow.token()))
        .expect("tile names exclude the separators")
}

/// The consistency reduction: alphabet `T x {E,N,W,S}`, every base image a
/// single origin cell, and one rule per Wang-matching domino in which
/// exactly one cell's arrow points at the other. The rule places the
/// pointing tile's image immediately left of the pointed tile's image:
/// `sigma_rule(pointing, pointed) = (1,0)`.
///
/// A cycle of length `n` in the tile set becomes a loop with image vector
/// `(n-1, 0) != 0`, so the output is consistent iff the tile set admits no
/// cycle.
pub fn build_consistency_reduction(tiles: &WangTileSet) -> Substitution {
    let mut alphabet: BTreeSet<Symbol> = BTreeSet::new();
    let mut base: BTreeMap<Symbol, Pattern> = BTreeMap::new();
    for tile in &tiles.tiles {
        for arrow in Arrow::ALL {
            let s = decorated_symbol(tile, arrow);
            let image =
                Pattern::from_cells(2, [Cell::new(v2(0, 0), s.clone())]).expect("single cell");
            alphabet.insert(s.clone());
            base.insert(s, image);
        }
    }
    let mut rules = Vec::new();
    for u in [v2(1, 0), v2(0, 1)] {
        for a in &tiles.tiles {
            for b in &tiles.tiles {
                if !matches(a, b, &u) {
                    continue;
                }
                for da in Arrow::ALL {
                    for db in Arrow::ALL {
                        let a_points = da.vector() == u;
                        let b_points = db.vector() == u.neg();
                        if a_points == b_points {
                            continue; // both or neither point: no rule
                        }
                        let v = if a_points { v2(1, 0) } else { v2(-1, 0) };
                        rules.push(ConcatenationRule {
                            t: decorated_symbol(a, da),
                            t_prime: decorated_symbol(b, db),
                            u: u.clone(),
                            v,
                        });
                    }
                }
            }
        }
    }
    Substitution::new(alphabet, base, rules).expect("reduction output is valid by construction")
}

/// Decorate a found cycle as a pattern over the consistency-reduction
/// alphabet: each placement carries the arrow pointing at its successor.
/// The resulting pattern contains the cycle as a simple loop with image
/// vector `(n-1, 0)`.
pub fn decorate_cycle(tiles: &WangTileSet, cycle: &TileCycle) -> (Pattern, Vec<Cell>) {
    let n = cycle.placements.len();
    let mut cells = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let (ref pos, idx) = cycle.placements[i];
        let (ref next, _) = cycle.placements[i + 1];
        let dir = next.sub(pos);
        let arrow = Arrow::ALL
            .into_iter()
            .find(|a| a.vector() == dir)
            .expect("consecutive placements are adjacent");
        cells.push(Cell::new(
            pos.clone(),
            decorated_symbol(&tiles.tiles[idx], arrow),
        ));
    }
    let pattern =
        Pattern::from_cells(2, cells.iter().cloned()).expect("cycle positions are distinct");
    let mut loop_cells = cells.clone();
    loop_cells.push(cells[0].clone());
    (pattern, loop_cells)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WangError {
    #[error("tile index {index} out of range ({len} tiles)")]
    BadIndex { index: usize, len: usize },
    #[error("tiles {a} and {b} do not match horizontally (a.east != b.west)")]
    NotHorizontallyMatching { a: Symbol, b: Symbol },
}

/// The overlap reduction `sigma_{a,b}` for a horizontally matching tile
/// pair `(a, b)`: alphabet `T` plus two fresh symbols `a0`, `b0` behaving
/// like `a` and `b` for edge matching; rules realize the structure data
/// `alpha = (2,0)`, `beta = (0,1)`, `v(t) = (0,0)`, `v(a0) = (1,0)`,
/// `v(b0) = (-1,0)`, restricted to Wang-matching dominoes. Horizontal rules
/// admit `a0` only as the right cell and `b0` only as the left cell, and no
/// rule joins two fresh symbols — in particular `a0 b0` is NOT a starting
/// pattern, so computing an image of it requires a surrounding cycle.
///
/// Tile-free patterns are mapped to copies expanded horizontally by a
/// factor of two; the images of an adjacent `a0 b0` pair coincide, so the
/// output is non-overlapping iff no cycle passes through the `a b` edge.
pub fn build_overlap_reduction(
    tiles: &WangTileSet,
    a: usize,
    b: usize,
) -> Result<Substitution, WangError> {
    let len = tiles.tiles.len();
    for index in [a, b] {
        if index >= len {
            return Err(WangError::BadIndex { index, len });
        }
    }
    let (ta, tb) = (&tiles.tiles[a], &tiles.tiles[b]);
    if !matches(ta, tb, &v2(1, 0)) {
        return Err(WangError::NotHorizontallyMatching {
            a: ta.name.clone(),
            b: tb.name.clone(),
        });
    }
    // Fresh symbols; when a == b the second one gets a distinct suffix.
    let a0 = Symbol::new(&format!("{}@0", ta.name)).expect("valid token");
    let b0 = if a == b {
        Symbol::new(&format!("{}@0b", tb.name)).expect("valid token")
    } else {
        Symbol::new(&format!("{}@0", tb.name)).expect("valid token")
    };

    // Per-symbol structure offsets v(.) and the underlying tile of each
    // alphabet symbol (fresh symbols match like their originals).
    let mut v_of: BTreeMap<Symbol, LatticeVector> = BTreeMap::new();
    let mut tile_of: BTreeMap<Symbol, usize> = BTreeMap::new();
    let mut alphabet: BTreeSet<Symbol> = BTreeSet::new();
    for (i, t) in tiles.tiles.iter().enumerate() {
        alphabet.insert(t.name.clone());
        v_of.insert(t.name.clone(), v2(0, 0));
        tile_of.insert(t.name.clone(), i);
    }
    alphabet.insert(a0.clone());
    alphabet.insert(b0.clone());
    v_of.insert(a0.clone(), v2(1, 0));
    v_of.insert(b0.clone(), v2(-1, 0));
    tile_of.insert(a0.clone(), a);
    tile_of.insert(b0.clone(), b);

    let base: BTreeMap<Symbol, Pattern> = alphabet
        .iter()
        .map(|s| {
            let image =
                Pattern::from_cells(2, [Cell::new(v2(0, 0), s.clone())]).expect("single cell");
            (s.clone(), image)
        })
        .collect();

    let alpha = v2(2, 0);
    let beta = v2(0, 1);
    let is_fresh = |s: &Symbol| s == &a0 || s == &b0;
    let mut rules = Vec::new();
    for t in &alphabet {
        for t_prime in &alphabet {
            if is_fresh(t) && is_fresh(t_prime) {
                continue;
            }
            // Horizontal: fresh symbols occur only as pictured — a0 on the
            // right, b0 on the left.
            let horizontal_ok = t != &a0 && t_prime != &b0;
            let wang_h = matches(
                &tiles.tiles[tile_of[t]],
                &tiles.tiles[tile_of[t_prime]],
                &v2(1, 0),
            );
            if horizontal_ok && wang_h {
                let v = alpha.sub(&v_of[t]).add(&v_of[t_prime]);
                rules.push(ConcatenationRule {
                    t: t.clone(),
                    t_prime: t_prime.clone(),
                    u: v2(1, 0),
                    v,
                });
            }
            // Vertical: every mix with at most one fresh symbol.
            let wang_v = matches(
                &tiles.tiles[tile_of[t]],
                &tiles.tiles[tile_of[t_prime]],
                &v2(0, 1),
            );
            if wang_v {
                let v = beta.sub(&v_of[t]).add(&v_of[t_prime]);
                rules.push(ConcatenationRule {
                    t: t.clone(),
                    t_prime: t_prime.clone(),
                    u: v2(0, 1),
                    v,
                });
            }
        }
    }
    Ok(
        Substitution::new(alphabet, base, rules)
            .expect("reduction output is valid by construction"),
    )
}

/// The fresh-symbol names chosen by [`build_overlap_reduction`] for a given
/// tile pair, in the order `(a0, b0)`.
pub fn overlap_fresh_symbols(tiles: &WangTileSet, a: usize, b: usize) -> (Symbol, Symbol) {
    let a0 = Symbol::new(&format!("{}@0", tiles.tiles[a].name)).expect("valid token");
    let b0 = if a == b {
        Symbol::new(&format!("{}@0b", tiles.tiles[b].name)).expect("valid token")
    } else {
        Symbol::new(&format!("{}@0", tiles.tiles[b].name)).expect("valid token")
    };
    (a0, b0)
}

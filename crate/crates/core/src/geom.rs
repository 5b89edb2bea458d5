//! Integer-lattice geometry: cells, patterns, translation, supports and
//! domino classification.
//!
//! Everything here is dimension-generic (`d >= 1`); the decision procedures
//! in [`crate::decide`] and [`crate::wang`] additionally require `d = 2`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Scalar coordinate type used throughout.
pub type Coord = i64;

/// `Debug` = `Display` for the small geometric value types; the display
/// forms are the ones used in reports and file formats.
macro_rules! fmt_debug_via_display {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt::Display::fmt(self, f)
        }
    };
}

/// A point of `Z^d`, with `d` carried at runtime.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector(Vec<Coord>);

impl LatticeVector {
    pub fn new(coords: Vec<Coord>) -> Self {
        assert!(!coords.is_empty(), "lattice vectors have dimension >= 1");
        LatticeVector(coords)
    }

    /// Zero vector of dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// First coordinate (defined for every dimension).
    pub fn x(&self) -> Coord {
        self.0[0]
    }

    /// Second coordinate. Panics on 1-dimensional vectors.
    pub fn y(&self) -> Coord {
        self.0[1]
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GeomError> {
        if self.dim() != other.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(LatticeVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GeomError> {
        self.checked_add(&other.neg())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("dimension mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.checked_sub(other).expect("dimension mismatch")
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: Coord) -> Self {
        LatticeVector(self.0.iter().map(|c| k * c).collect())
    }

    /// Chebyshev norm, used for canonical witness ordering.
    pub fn max_norm(&self) -> Coord {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

/// Shorthand for a 2-dimensional vector.
pub fn v2(x: Coord, y: Coord) -> LatticeVector {
    LatticeVector::new(vec![x, y])
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticeVector {
    fmt_debug_via_display!();
}

/// An alphabet symbol (or Wang color): an opaque nonempty token without
/// whitespace or any of `( ) , : #`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(token: &str) -> Result<Self, GeomError> {
        if token.is_empty()
            || token
                .chars()
                .any(|c| c.is_whitespace() || "(),:#".contains(c))
        {
            return Err(GeomError::BadSymbol {
                token: token.to_owned(),
            });
        }
        Ok(Symbol(token.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fmt_debug_via_display!();
}

/// Convenience constructor for statically known-good tokens.
pub fn sym(token: &str) -> Symbol {
    Symbol::new(token).expect("invalid symbol token")
}

/// A cell `[v, t]`: a lattice position decorated with a symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub vector: LatticeVector,
    pub symbol: Symbol,
}

impl Cell {
    pub fn new(vector: LatticeVector, symbol: Symbol) -> Self {
        Cell { vector, symbol }
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.vector, self.symbol)
    }
}

impl fmt::Debug for Cell {
    fmt_debug_via_display!();
}

/// Shorthand for a 2-dimensional cell.
pub fn cell2(x: Coord, y: Coord, symbol: &str) -> Cell {
    Cell::new(v2(x, y), sym(symbol))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid symbol token {token:?}")]
    BadSymbol { token: String },
    #[error("duplicate cell vector {vector} in pattern")]
    DuplicateVector { vector: LatticeVector },
}

/// A finite set of cells with pairwise distinct vectors, all of one
/// dimension. Cells are kept ordered lexicographically by vector, which is
/// the canonical order for serialization and witness reporting.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    dim: usize,
    cells: BTreeMap<LatticeVector, Symbol>,
}

impl Pattern {
    /// The empty pattern of a given dimension.
    pub fn empty(dim: usize) -> Self {
        assert!(dim >= 1, "patterns have dimension >= 1");
        Pattern {
            dim,
            cells: BTreeMap::new(),
        }
    }

    pub fn from_cells<I>(dim: usize, cells: I) -> Result<Self, GeomError>
    where
        I: IntoIterator<Item = Cell>,
    {
        let mut p = Pattern::empty(dim);
        for c in cells {
            p.insert(c)?;
        }
        Ok(p)
    }

    /// Insert a cell; rejects dimension mismatches and repeated vectors
    /// (even when the symbol agrees).
    pub fn insert(&mut self, cell: Cell) -> Result<(), GeomError> {
        if cell.dim() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                found: cell.dim(),
            });
        }
        match self.cells.entry(cell.vector) {
            std::collections::btree_map::Entry::Occupied(e) => Err(GeomError::DuplicateVector {
                vector: e.key().clone(),
            }),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(cell.symbol);
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in lexicographic vector order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells
            .iter()
            .map(|(v, t)| Cell::new(v.clone(), t.clone()))
    }

    pub fn symbol_at(&self, v: &LatticeVector) -> Option<&Symbol> {
        self.cells.get(v)
    }

    pub fn contains_vector(&self, v: &LatticeVector) -> bool {
        self.cells.contains_key(v)
    }

    pub fn contains_cell(&self, c: &Cell) -> bool {
        self.cells.get(&c.vector) == Some(&c.symbol)
    }

    /// `supp(P)`: the set of occupied vectors, in lexicographic order.
    pub fn support(&self) -> Vec<LatticeVector> {
        self.cells.keys().cloned().collect()
    }

    /// The lexicographically least cell, if any.
    pub fn min_cell(&self) -> Option<Cell> {
        self.cells
            .iter()
            .next()
            .map(|(v, t)| Cell::new(v.clone(), t.clone()))
    }

    /// `P + v`.
    pub fn translate(&self, v: &LatticeVector) -> Result<Pattern, GeomError> {
        if v.dim() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let cells = self
            .cells
            .iter()
            .map(|(w, t)| (w.add(v), t.clone()))
            .collect();
        Ok(Pattern {
            dim: self.dim,
            cells,
        })
    }

    /// Translate so that the lexicographically least vector sits at the
    /// origin; the canonical representative of a pattern up to translation.
    pub fn canonical_translate(&self) -> Pattern {
        match self.cells.keys().next() {
            None => self.clone(),
            Some(min) => self.translate(&min.neg()).expect("same dimension"),
        }
    }

    /// The distinct symbols occurring in the pattern.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut syms: Vec<Symbol> = self.cells.values().cloned().collect();
        syms.sort();
        syms.dedup();
        syms
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.cells().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Pattern {
    fmt_debug_via_display!();
}

/// Orientation of a two-cell domino.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Horizontal => "horizontal",
            Orientation::Vertical => "vertical",
        })
    }
}

/// Classification of a 2-dimensional domino: the orientation together with
/// the types read left-to-right (horizontal) or bottom-to-top (vertical).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DominoClass {
    pub orientation: Orientation,
    pub first: Symbol,
    pub second: Symbol,
}

/// Classify a 2-dimensional pattern as a domino, if it is one: exactly two
/// cells whose vectors differ by a unit vector.
pub fn classify_domino(p: &Pattern) -> Option<DominoClass> {
    if p.dim() != 2 || p.len() != 2 {
        return None;
    }
    let cells: Vec<Cell> = p.cells().collect();
    // Lexicographic order puts the left / bottom cell first for the two
    // positive unit offsets.
    let delta = cells[1].vector.sub(&cells[0].vector);
    let orientation = match delta.coords() {
        [1, 0] => Orientation::Horizontal,
        [0, 1] => Orientation::Vertical,
        _ => return None,
    };
    Some(DominoClass {
        orientation,
        first: cells[0].symbol.clone(),
        second: cells[1].symbol.clone(),
    })
}

/// Collision detected while merging patterns: two parts both populate
/// `vector`.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("collision at {vector} between parts {first_part} and {second_part}")]
pub struct Collision {
    pub first_part: usize,
    pub second_part: usize,
    pub vector: LatticeVector,
}

/// Union of patterns that fails on ANY repeated vector, even when the two
/// cells agree in type: the non-overlap condition is on supports, not on
/// label agreement.
pub fn merge_checked(parts: &[Pattern]) -> Result<Pattern, Collision> {
    let dim = parts.first().map_or(1, Pattern::dim);
    let mut merged = Pattern::empty(dim);
    let mut owner: BTreeMap<LatticeVector, usize> = BTreeMap::new();
    for (i, part) in parts.iter().enumerate() {
        assert_eq!(part.dim(), dim, "merge_checked: mixed dimensions");
        for c in part.cells() {
            if let Some(&j) = owner.get(&c.vector) {
                return Err(Collision {
                    first_part: j,
                    second_part: i,
                    vector: c.vector,
                });
            }
            owner.insert(c.vector.clone(), i);
            merged.insert(c).expect("vectors deduplicated via owner map");
        }
    }
    Ok(merged)
}

//! Decision procedures for domino-complete substitutions: completeness
//! predicates, the 2x2 consistency criterion, its restriction to a given
//! square set, structure extraction, and the integer-linear overlap
//! decision.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::geom::{
    v2, Cell, Coord, LatticeVector, Orientation, Pattern, Symbol,
};
use crate::substitution::{image_vector, Path, Substitution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("decision procedures require dimension 2, found {0}")]
    NotTwoDimensional(usize),
    #[error("substitution is not domino-complete ({} dominoes missing)", missing.len())]
    NotDominoComplete { missing: Vec<MissingDomino> },
    #[error("substitution is not domino-complete for the given squares")]
    NotRestrictedComplete {
        missing: Vec<Pattern>,
        extra: Vec<Pattern>,
    },
    #[error("square list contains a malformed square: {0} (need a full 2x2 pattern)")]
    MalformedSquare(Pattern),
    #[error("substitution is inconsistent; structure extraction needs consistency")]
    Inconsistent,
    #[error("structure verification failed on {rule}: expected {expected}")]
    StructureVerification {
        rule: crate::substitution::ConcatenationRule,
        expected: LatticeVector,
    },
}

/// A domino required by domino-completeness but absent from the rules.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MissingDomino {
    pub orientation: Orientation,
    /// Left (horizontal) or bottom (vertical) type.
    pub first: Symbol,
    /// Right (horizontal) or top (vertical) type.
    pub second: Symbol,
}

impl fmt::Display for MissingDomino {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.orientation, self.first, self.second)
    }
}

fn require_2d(s: &Substitution) -> Result<(), DecideError> {
    if s.dim() != 2 {
        return Err(DecideError::NotTwoDimensional(s.dim()));
    }
    Ok(())
}

fn domino_cells(first: &Symbol, second: &Symbol, orientation: Orientation) -> (Cell, Cell) {
    let u = match orientation {
        Orientation::Horizontal => v2(1, 0),
        Orientation::Vertical => v2(0, 1),
    };
    (
        Cell::new(v2(0, 0), first.clone()),
        Cell::new(u, second.clone()),
    )
}

/// Check whether `sigma_rule` is defined on every horizontal and vertical
/// domino over the alphabet; lists the missing ones.
pub fn is_domino_complete(s: &Substitution) -> Result<(bool, Vec<MissingDomino>), DecideError> {
    require_2d(s)?;
    let mut missing = Vec::new();
    for first in s.alphabet() {
        for second in s.alphabet() {
            for orientation in [Orientation::Horizontal, Orientation::Vertical] {
                let (c, c_prime) = domino_cells(first, second, orientation);
                if s.sigma_rule(&c, &c_prime).is_none() {
                    missing.push(MissingDomino {
                        orientation,
                        first: first.clone(),
                        second: second.clone(),
                    });
                }
            }
        }
    }
    missing.sort();
    Ok((missing.is_empty(), missing))
}

/// The canonical dominoes (as origin-anchored patterns) occurring inside a
/// full 2x2 square pattern.
fn square_dominoes(square: &Pattern) -> Result<BTreeSet<Pattern>, DecideError> {
    let types = square_types(square)?;
    let mk = |first: &Symbol, second: &Symbol, orientation: Orientation| {
        let (c, c_prime) = domino_cells(first, second, orientation);
        Pattern::from_cells(2, [c, c_prime]).expect("distinct vectors")
    };
    Ok([
        mk(&types.bl, &types.br, Orientation::Horizontal),
        mk(&types.tl, &types.tr, Orientation::Horizontal),
        mk(&types.bl, &types.tl, Orientation::Vertical),
        mk(&types.br, &types.tr, Orientation::Vertical),
    ]
    .into_iter()
    .collect())
}

/// The four types of a 2x2 square.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SquareTypes {
    pub bl: Symbol,
    pub br: Symbol,
    pub tl: Symbol,
    pub tr: Symbol,
}

impl SquareTypes {
    /// The square as a pattern anchored at the origin.
    pub fn pattern(&self) -> Pattern {
        Pattern::from_cells(
            2,
            [
                Cell::new(v2(0, 0), self.bl.clone()),
                Cell::new(v2(1, 0), self.br.clone()),
                Cell::new(v2(0, 1), self.tl.clone()),
                Cell::new(v2(1, 1), self.tr.clone()),
            ],
        )
        .expect("distinct vectors")
    }
}

impl fmt::Display for SquareTypes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.bl, self.br, self.tl, self.tr)
    }
}

/// Read the four types off a full 2x2 pattern (any translate).
pub fn square_types(square: &Pattern) -> Result<SquareTypes, DecideError> {
    let canonical = square.canonical_translate();
    if square.dim() != 2 || square.len() != 4 {
        return Err(DecideError::MalformedSquare(square.clone()));
    }
    let at = |x, y| {
        canonical
            .symbol_at(&v2(x, y))
            .cloned()
            .ok_or_else(|| DecideError::MalformedSquare(square.clone()))
    };
    Ok(SquareTypes {
        bl: at(0, 0)?,
        br: at(1, 0)?,
        tl: at(0, 1)?,
        tr: at(1, 1)?,
    })
}

/// Check whether the starting patterns of `s` are EXACTLY the dominoes
/// occurring in the given 2x2 squares (both inclusions). Returns
/// `(verdict, dominoes missing from the rules, starting patterns not
/// occurring in the squares)`.
pub fn is_restricted_domino_complete(
    s: &Substitution,
    squares: &[Pattern],
) -> Result<(bool, Vec<Pattern>, Vec<Pattern>), DecideError> {
    require_2d(s)?;
    let mut square_set: BTreeSet<Pattern> = BTreeSet::new();
    for sq in squares {
        square_set.extend(square_dominoes(sq)?);
    }
    let starting = s.starting_patterns();
    let missing: Vec<Pattern> = square_set.difference(&starting).cloned().collect();
    let extra: Vec<Pattern> = starting.difference(&square_set).cloned().collect();
    Ok((missing.is_empty() && extra.is_empty(), missing, extra))
}

/// Verdict of the square-based consistency checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareConsistency {
    Consistent,
    /// A 2x2 square whose boundary loop has nonzero image vector.
    Inconsistent {
        witness: SquareTypes,
        image_vector: LatticeVector,
    },
}

impl SquareConsistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, SquareConsistency::Consistent)
    }
}

/// Image vector of the counterclockwise boundary loop of a 2x2 square, or
/// `None` when some edge has no rule.
fn square_loop_vector(s: &Substitution, types: &SquareTypes) -> Option<LatticeVector> {
    let p = types.pattern();
    let cell = |x, y| Cell::new(v2(x, y), p.symbol_at(&v2(x, y)).expect("full square").clone());
    let gamma = Path::new(vec![
        cell(0, 0),
        cell(1, 0),
        cell(1, 1),
        cell(0, 1),
        cell(0, 0),
    ])
    .expect("square loop");
    image_vector(s, &gamma).ok()
}

/// Consistency of a domino-complete substitution, decided on the 2x2
/// squares: enumerates all |A|^4 type assignments of the unit square and
/// evaluates the boundary loop. All zero implies global consistency.
///
/// Squares with an undefined edge are skipped, so a nonzero loop is
/// reported even for incomplete substitutions (soundly — the witness is a
/// genuine inconsistency); but a "consistent" verdict is only licensed when
/// the substitution is actually domino-complete, so that case returns
/// [`DecideError::NotDominoComplete`] instead.
pub fn check_consistency_domino_complete(
    s: &Substitution,
) -> Result<SquareConsistency, DecideError> {
    require_2d(s)?;
    let symbols: Vec<Symbol> = s.alphabet().iter().cloned().collect();
    let mut skipped_any = false;
    for bl in &symbols {
        for br in &symbols {
            for tl in &symbols {
                for tr in &symbols {
                    let types = SquareTypes {
                        bl: bl.clone(),
                        br: br.clone(),
                        tl: tl.clone(),
                        tr: tr.clone(),
                    };
                    match square_loop_vector(s, &types) {
                        None => skipped_any = true,
                        Some(w) if !w.is_zero() => {
                            return Ok(SquareConsistency::Inconsistent {
                                witness: types,
                                image_vector: w,
                            })
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    if skipped_any {
        let (_, missing) = is_domino_complete(s)?;
        return Err(DecideError::NotDominoComplete { missing });
    }
    Ok(SquareConsistency::Consistent)
}

/// Consistency restricted to a given 2x2 square set: requires the
/// substitution to be domino-complete FOR those squares, then evaluates the
/// boundary loop of exactly the given squares.
pub fn check_consistency_restricted(
    s: &Substitution,
    squares: &[Pattern],
) -> Result<SquareConsistency, DecideError> {
    let (ok, missing, extra) = is_restricted_domino_complete(s, squares)?;
    if !ok {
        return Err(DecideError::NotRestrictedComplete { missing, extra });
    }
    for sq in squares {
        let types = square_types(sq)?;
        let w = square_loop_vector(s, &types)
            .expect("every square domino is a starting pattern by the completeness check");
        if !w.is_zero() {
            return Ok(SquareConsistency::Inconsistent {
                witness: types,
                image_vector: w,
            });
        }
    }
    Ok(SquareConsistency::Consistent)
}

/// The structure data of a consistent domino-complete substitution: every
/// path between cells of types `t`, `t'` at endpoint offset `(x, y)` has
/// image vector `x*alpha + y*beta - v(t) + v(t')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureData {
    /// Reference symbol with `v(t0) = 0` (the least alphabet symbol).
    pub t0: Symbol,
    pub alpha: LatticeVector,
    pub beta: LatticeVector,
    pub v: BTreeMap<Symbol, LatticeVector>,
}

impl StructureData {
    /// The image vector predicted for endpoint offset `(x, y)` and types
    /// `(t, t')`.
    pub fn predicted(&self, offset: &LatticeVector, t: &Symbol, t_prime: &Symbol) -> LatticeVector {
        self.alpha
            .scale(offset.x())
            .add(&self.beta.scale(offset.y()))
            .sub(&self.v[t])
            .add(&self.v[t_prime])
    }
}

/// Extract `(alpha, beta, v)` from a consistent domino-complete
/// substitution and verify the structure formula against every rule.
///
/// `t0` is the least alphabet symbol; `alpha` and `beta` are the image
/// vectors of the horizontal / vertical `t0 t0` dominoes; `v(t)` is read
/// off the horizontal `t0 t` domino. The verification pass fails loudly if
/// an inconsistent input slipped through.
pub fn extract_structure(s: &Substitution) -> Result<StructureData, DecideError> {
    let (complete, missing) = is_domino_complete(s)?;
    if !complete {
        return Err(DecideError::NotDominoComplete { missing });
    }
    if !check_consistency_domino_complete(s)?.is_consistent() {
        return Err(DecideError::Inconsistent);
    }
    let t0 = s.alphabet().iter().next().expect("nonempty alphabet").clone();
    let rule_of = |first: &Symbol, second: &Symbol, orientation| {
        let (c, c_prime) = domino_cells(first, second, orientation);
        s.sigma_rule(&c, &c_prime)
            .expect("domino-complete: every domino has a rule")
    };
    let alpha = rule_of(&t0, &t0, Orientation::Horizontal);
    let beta = rule_of(&t0, &t0, Orientation::Vertical);
    let v: BTreeMap<Symbol, LatticeVector> = s
        .alphabet()
        .iter()
        .map(|t| {
            let vt = rule_of(&t0, t, Orientation::Horizontal).sub(&alpha);
            (t.clone(), vt)
        })
        .collect();
    let data = StructureData {
        t0,
        alpha,
        beta,
        v,
    };
    for rule in s.rules() {
        let expected = data.predicted(&rule.u, &rule.t, &rule.t_prime);
        if rule.v != expected {
            return Err(DecideError::StructureVerification {
                rule: rule.clone(),
                expected,
            });
        }
    }
    Ok(data)
}

/// Full integer solution set of `x*alpha + y*beta = w` over `Z^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiophantineSolutionSet {
    Empty,
    Unique(Coord, Coord),
    /// `particular + k * direction` for all integer `k`; `direction != 0`.
    Line {
        particular: (Coord, Coord),
        direction: (Coord, Coord),
    },
    Plane,
}

impl DiophantineSolutionSet {
    pub fn contains(&self, x: Coord, y: Coord) -> bool {
        match self {
            DiophantineSolutionSet::Empty => false,
            DiophantineSolutionSet::Unique(a, b) => (x, y) == (*a, *b),
            DiophantineSolutionSet::Line {
                particular: (px, py),
                direction: (dx, dy),
            } => {
                let (rx, ry) = (x - px, y - py);
                if *dx != 0 {
                    rx % dx == 0 && ry == (rx / dx) * dy
                } else {
                    rx == 0 && ry % dy == 0
                }
            }
            DiophantineSolutionSet::Plane => true,
        }
    }

    /// The nonzero solution minimizing (max-norm, lexicographic order), if
    /// any nonzero solution exists.
    pub fn smallest_nonzero(&self) -> Option<(Coord, Coord)> {
        match self {
            DiophantineSolutionSet::Empty => None,
            DiophantineSolutionSet::Unique(x, y) => {
                ((*x, *y) != (0, 0)).then_some((*x, *y))
            }
            DiophantineSolutionSet::Plane => {
                // max-norm 1 candidates in lexicographic order
                Some((-1, -1))
            }
            DiophantineSolutionSet::Line {
                particular: (px, py),
                direction: (dx, dy),
            } => {
                // The max-norm along the line is a convex function of the
                // parameter k; scanning a window around the per-coordinate
                // minimizers covers the global minimum.
                let center_x = if *dx != 0 { -px / dx } else { 0 };
                let center_y = if *dy != 0 { -py / dy } else { 0 };
                let lo = center_x.min(center_y) - 2;
                let hi = center_x.max(center_y) + 2;
                (lo..=hi)
                    .map(|k| (px + k * dx, py + k * dy))
                    .filter(|&(x, y)| (x, y) != (0, 0))
                    .min_by_key(|&(x, y)| (x.abs().max(y.abs()), x, y))
            }
        }
    }
}

fn ext_gcd(a: Coord, b: Coord) -> (Coord, Coord, Coord) {
    // returns (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0
    if b == 0 {
        if a >= 0 {
            (a, 1, 0)
        } else {
            (-a, -1, 0)
        }
    } else {
        let (g, s, t) = ext_gcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

fn gcd(a: Coord, b: Coord) -> Coord {
    ext_gcd(a, b).0
}

/// Solve `x*alpha + y*beta = w` over the integers. All vectors must be
/// 2-dimensional.
pub fn solve_lattice_equation(
    alpha: &LatticeVector,
    beta: &LatticeVector,
    w: &LatticeVector,
) -> DiophantineSolutionSet {
    assert!(
        alpha.dim() == 2 && beta.dim() == 2 && w.dim() == 2,
        "solve_lattice_equation requires dimension 2"
    );
    let (ax, ay) = (alpha.x(), alpha.y());
    let (bx, by) = (beta.x(), beta.y());
    let (wx, wy) = (w.x(), w.y());
    let det = ax * by - ay * bx;
    if det != 0 {
        // Cramer's rule with integrality check.
        let xn = wx * by - wy * bx;
        let yn = ax * wy - ay * wx;
        if xn % det == 0 && yn % det == 0 {
            return DiophantineSolutionSet::Unique(xn / det, yn / det);
        }
        return DiophantineSolutionSet::Empty;
    }
    if alpha.is_zero() && beta.is_zero() {
        return if w.is_zero() {
            DiophantineSolutionSet::Plane
        } else {
            DiophantineSolutionSet::Empty
        };
    }
    // alpha and beta span a line: project onto its primitive direction d.
    let rep = if alpha.is_zero() { beta } else { alpha };
    let g = gcd(rep.x(), rep.y());
    let d = (rep.x() / g, rep.y() / g);
    // scalar multiples: alpha = a*d, beta = b*d, w must be c*d
    let along = |v: &LatticeVector| -> Option<Coord> {
        if d.0 != 0 {
            (v.x() % d.0 == 0 && v.y() == (v.x() / d.0) * d.1).then(|| v.x() / d.0)
        } else {
            (v.x() == 0 && v.y() % d.1 == 0).then(|| v.y() / d.1)
        }
    };
    let a = along(alpha).unwrap_or(0);
    let b = along(beta).unwrap_or(0);
    let Some(c) = along(w) else {
        return DiophantineSolutionSet::Empty;
    };
    // Solve a*x + b*y = c by the extended Euclid algorithm.
    let (g2, s, t) = ext_gcd(a, b);
    if g2 == 0 {
        unreachable!("one of alpha, beta is nonzero on the line");
    }
    if c % g2 != 0 {
        return DiophantineSolutionSet::Empty;
    }
    let k = c / g2;
    let particular = (s * k, t * k);
    let mut direction = (b / g2, -a / g2);
    // canonical direction sign: first nonzero coordinate positive
    if direction.0 < 0 || (direction.0 == 0 && direction.1 < 0) {
        direction = (-direction.0, -direction.1);
    }
    // canonical particular: the representative closest to zero along the
    // line (reduces golden-output churn and keeps reports small)
    let shift = if direction.0 != 0 {
        particular.0.div_euclid(direction.0.abs()) * direction.0.signum()
    } else {
        particular.1.div_euclid(direction.1.abs()) * direction.1.signum()
    };
    let particular = (
        particular.0 - shift * direction.0,
        particular.1 - shift * direction.1,
    );
    DiophantineSolutionSet::Line {
        particular,
        direction,
    }
}

/// Outcome of the global overlap decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OverlapDecision {
    NonOverlapping,
    /// Cells of types `t` at some position and `t'` at endpoint offset
    /// `xy != 0` have images whose supports share `a` (in the image of `t`)
    /// `= b + xy.x*alpha + xy.y*beta - v(t) + v(t')` (in the image of
    /// `t'`).
    Overlapping {
        t: Symbol,
        t_prime: Symbol,
        a: LatticeVector,
        b: LatticeVector,
        xy: LatticeVector,
    },
}

impl OverlapDecision {
    pub fn is_non_overlapping(&self) -> bool {
        matches!(self, OverlapDecision::NonOverlapping)
    }
}

/// Decide the global non-overlapping property of a consistent
/// domino-complete substitution: for every pair of types and every pair of
/// base-support vectors, solve the linear equation
/// `x*alpha + y*beta = a - b + v(t) - v(t')` and look for a nonzero integer
/// solution. Domino-completeness makes every connected filled region
/// covered, so every such solution is realized by an actual pattern.
///
/// Witnesses are canonicalized so that `xy`'s first nonzero coordinate is
/// positive — `(t, t', a, b, xy)` and `(t', t, b, a, -xy)` describe the
/// same overlap — then minimized by (max-norm of `xy`, `xy`, `t`, `t'`,
/// `a`, `b`).
pub fn decide_overlap(s: &Substitution) -> Result<OverlapDecision, DecideError> {
    let structure = extract_structure(s)?;
    type WitnessKey = (Coord, Coord, Coord, Symbol, Symbol, LatticeVector, LatticeVector);
    let mut best: Option<(WitnessKey, OverlapDecision)> = None;
    for t in s.alphabet() {
        for t_prime in s.alphabet() {
            for a in s.base_image(t).support() {
                for b in s.base_image(t_prime).support() {
                    let w = a
                        .sub(&b)
                        .add(&structure.v[t])
                        .sub(&structure.v[t_prime]);
                    let solutions = solve_lattice_equation(&structure.alpha, &structure.beta, &w);
                    let Some((x, y)) = solutions.smallest_nonzero() else {
                        continue;
                    };
                    // canonicalize to a lexicographically positive xy
                    let (x, y, t, t_prime, a, b) = if x < 0 || (x == 0 && y < 0) {
                        (-x, -y, t_prime.clone(), t.clone(), b.clone(), a.clone())
                    } else {
                        (x, y, t.clone(), t_prime.clone(), a.clone(), b.clone())
                    };
                    let candidate = OverlapDecision::Overlapping {
                        t: t.clone(),
                        t_prime: t_prime.clone(),
                        a: a.clone(),
                        b: b.clone(),
                        xy: v2(x, y),
                    };
                    let key = (x.abs().max(y.abs()), x, y, t, t_prime, a, b);
                    match &best {
                        Some((k, _)) if *k <= key => {}
                        _ => best = Some((key, candidate)),
                    }
                }
            }
        }
    }
    Ok(best
        .map(|(_, decision)| decision)
        .unwrap_or(OverlapDecision::NonOverlapping))
}

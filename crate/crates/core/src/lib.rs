//! Multidimensional combinatorial substitutions: lattice geometry, the
//! substitution and path machinery, decision procedures for
//! domino-complete substitutions, Wang-tile reductions, the built-in
//! example corpus, text formats, and SVG rendering.
//!
//! A combinatorial substitution maps cells `[v, t]` (a lattice vector `v`
//! typed by an alphabet symbol `t`) to patterns, placing the images of
//! neighbouring cells relative to each other via concatenation rules. The
//! central questions — is the placement independent of the order in which
//! rules are followed (consistency), and do the placed images stay
//! disjoint (non-overlapping) — are undecidable in general but decidable
//! for domino-complete substitutions, where a rule exists for every
//! horizontal and vertical pair of symbols.
//!
//! Quick tour:
//!
//! ```
//! use combsub::{corpus, decide};
//!
//! let tshape = corpus::example("tshape").unwrap();
//! let s = &tshape.substitution;
//! assert!(decide::check_consistency_domino_complete(s).unwrap().is_consistent());
//! assert!(decide::decide_overlap(s).unwrap().is_non_overlapping());
//!
//! let structure = decide::extract_structure(s).unwrap();
//! assert_eq!(structure.alpha.coords(), [3, 0]);
//! ```

pub mod corpus;
pub mod decide;
pub mod format;
pub mod geom;
pub mod sampling;
pub mod substitution;
pub mod svg;
pub mod wang;

pub use geom::{
    cell2, classify_domino, merge_checked, sym, v2, Cell, Collision, Coord, DominoClass,
    GeomError, LatticeVector, Orientation, Pattern, Symbol,
};
pub use substitution::{
    apply, check_consistent_on, check_nonoverlapping_on, cover_graph, enumerate_simple_loops,
    image_vector, is_covered, is_valid_path, iterate, ApplyError, C0Policy, ConcatenationRule,
    ConsistencyVerdict, IterateError, OverlapVerdict, Path, SubstError, Substitution,
    SubstitutionData, Violation,
};
pub use decide::{
    check_consistency_domino_complete, check_consistency_restricted, decide_overlap,
    extract_structure, is_domino_complete, is_restricted_domino_complete, solve_lattice_equation,
    DecideError, DiophantineSolutionSet, MissingDomino, OverlapDecision, SquareConsistency,
    SquareTypes, StructureData,
};
pub use svg::{render_svg, RenderStyle};
pub use wang::{
    build_consistency_reduction, build_overlap_reduction, decorate_cycle, find_cycle, TileCycle,
    WangTile, WangTileSet,
};

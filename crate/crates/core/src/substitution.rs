//! Combinatorial substitutions and the path-level machinery built on them:
//! rule lookup, starting patterns, paths and image vectors, covering,
//! per-pattern consistency / non-overlapping verdicts, image computation and
//! iteration.
//!
//! A substitution is a base rule sending each symbol to a pattern plus a
//! finite table of concatenation rules `(t, t', u) -> v` fixing the relative
//! placement `v` of the images of two cells of types `t`, `t'` at offset `u`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::geom::{
    merge_checked, Cell, LatticeVector, Pattern, Symbol,
};

/// One concatenation rule `(t, t', u) -> v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConcatenationRule {
    pub t: Symbol,
    pub t_prime: Symbol,
    pub u: LatticeVector,
    pub v: LatticeVector,
}

impl fmt::Display for ConcatenationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {} {} {} -> {}",
            self.t, self.t_prime, self.u, self.v
        )
    }
}

/// A violation of the [`Substitution`] invariants, reported by
/// [`SubstitutionData::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("missing base rule for alphabet symbol {symbol}")]
    MissingBase { symbol: Symbol },
    #[error("base image of {symbol} is empty")]
    EmptyBaseImage { symbol: Symbol },
    #[error("symbol {symbol} not in the alphabet (used in {context})")]
    UnknownSymbol { symbol: Symbol, context: String },
    #[error("duplicate left-hand side: {first} and {second}")]
    DuplicateLhs {
        first: ConcatenationRule,
        second: ConcatenationRule,
    },
    #[error("reverse-form duplicate left-hand side: {first} and {second}")]
    ReversedLhs {
        first: ConcatenationRule,
        second: ConcatenationRule,
    },
    #[error("rule offset u must be nonzero: {rule}")]
    ZeroOffset { rule: ConcatenationRule },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
}

/// Raw substitution parts, prior to invariant checking. The parser builds
/// this; [`SubstitutionData::build`] turns it into a checked
/// [`Substitution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionData {
    pub alphabet: BTreeSet<Symbol>,
    pub base: BTreeMap<Symbol, Pattern>,
    pub rules: Vec<ConcatenationRule>,
}

impl SubstitutionData {
    /// Check every substitution invariant and list the violations.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let dim = self.dim();
        for t in &self.alphabet {
            match self.base.get(t) {
                None => out.push(Violation::MissingBase { symbol: t.clone() }),
                Some(p) if p.is_empty() => {
                    out.push(Violation::EmptyBaseImage { symbol: t.clone() })
                }
                Some(p) => {
                    if p.dim() != dim {
                        out.push(Violation::DimensionMismatch {
                            context: format!("base image of {t}"),
                            expected: dim,
                            found: p.dim(),
                        });
                    }
                    for c in p.cells() {
                        if !self.alphabet.contains(&c.symbol) {
                            out.push(Violation::UnknownSymbol {
                                symbol: c.symbol,
                                context: format!("base image of {t}"),
                            });
                        }
                    }
                }
            }
        }
        for t in self.base.keys() {
            if !self.alphabet.contains(t) {
                out.push(Violation::UnknownSymbol {
                    symbol: t.clone(),
                    context: "base rule left-hand side".into(),
                });
            }
        }
        let mut seen: HashMap<(Symbol, Symbol, LatticeVector), ConcatenationRule> = HashMap::new();
        for r in &self.rules {
            for s in [&r.t, &r.t_prime] {
                if !self.alphabet.contains(s) {
                    out.push(Violation::UnknownSymbol {
                        symbol: s.clone(),
                        context: format!("{r}"),
                    });
                }
            }
            if r.u.is_zero() {
                out.push(Violation::ZeroOffset { rule: r.clone() });
            }
            for v in [&r.u, &r.v] {
                if v.dim() != dim {
                    out.push(Violation::DimensionMismatch {
                        context: format!("{r}"),
                        expected: dim,
                        found: v.dim(),
                    });
                }
            }
            let key = (r.t.clone(), r.t_prime.clone(), r.u.clone());
            let rev = (r.t_prime.clone(), r.t.clone(), r.u.neg());
            if let Some(prev) = seen.get(&key) {
                out.push(Violation::DuplicateLhs {
                    first: prev.clone(),
                    second: r.clone(),
                });
            } else if let Some(prev) = seen.get(&rev) {
                out.push(Violation::ReversedLhs {
                    first: prev.clone(),
                    second: r.clone(),
                });
            }
            seen.entry(key).or_insert_with(|| r.clone());
        }
        out
    }

    /// The working dimension: that of the first base image, defaulting to 2.
    fn dim(&self) -> usize {
        self.base.values().next().map_or(2, Pattern::dim)
    }

    pub fn build(mut self) -> Result<Substitution, Vec<Violation>> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(violations);
        }
        // canonical rule order, so equality ignores listing order
        self.rules.sort();
        Ok(Substitution::from_valid_data(self))
    }
}

/// A validated combinatorial substitution.
#[derive(Clone, PartialEq, Eq)]
pub struct Substitution {
    data: SubstitutionData,
    dim: usize,
    /// Rule lookup: (t, t', u) -> v.
    index: HashMap<(Symbol, Symbol, LatticeVector), LatticeVector>,
    /// Distinct rule offsets u and their negations, used to find cover-graph
    /// neighbors without scanning all cell pairs.
    offsets: Vec<LatticeVector>,
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Substitution")
            .field("alphabet", &self.data.alphabet)
            .field("rules", &self.data.rules.len())
            .finish()
    }
}

impl Substitution {
    pub fn new(
        alphabet: BTreeSet<Symbol>,
        base: BTreeMap<Symbol, Pattern>,
        rules: Vec<ConcatenationRule>,
    ) -> Result<Self, Vec<Violation>> {
        SubstitutionData {
            alphabet,
            base,
            rules,
        }
        .build()
    }

    fn from_valid_data(data: SubstitutionData) -> Self {
        let dim = data.dim();
        let mut index = HashMap::new();
        let mut offsets = BTreeSet::new();
        for r in &data.rules {
            index.insert(
                (r.t.clone(), r.t_prime.clone(), r.u.clone()),
                r.v.clone(),
            );
            offsets.insert(r.u.clone());
            offsets.insert(r.u.neg());
        }
        Substitution {
            data,
            dim,
            index,
            offsets: offsets.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.data.alphabet
    }

    pub fn rules(&self) -> &[ConcatenationRule] {
        &self.data.rules
    }

    /// `sigma_base(t)`. Panics on symbols outside the alphabet.
    pub fn base_image(&self, t: &Symbol) -> &Pattern {
        self.data
            .base
            .get(t)
            .unwrap_or_else(|| panic!("symbol {t} not in the alphabet"))
    }

    pub fn base(&self) -> &BTreeMap<Symbol, Pattern> {
        &self.data.base
    }

    pub fn data(&self) -> &SubstitutionData {
        &self.data
    }

    /// Direct lookup of a rule vector by left-hand side.
    pub fn rule_vector(
        &self,
        t: &Symbol,
        t_prime: &Symbol,
        u: &LatticeVector,
    ) -> Option<&LatticeVector> {
        self.index
            .get(&(t.clone(), t_prime.clone(), u.clone()))
    }

    /// `sigma_rule(c, c')`: the relative placement of the image of `c'` with
    /// respect to the image of `c`. Defined and antisymmetric whenever a
    /// rule matches the ordered pair in either orientation.
    pub fn sigma_rule(&self, c: &Cell, c_prime: &Cell) -> Option<LatticeVector> {
        let u = c_prime.vector.checked_sub(&c.vector).ok()?;
        if let Some(v) = self.rule_vector(&c.symbol, &c_prime.symbol, &u) {
            return Some(v.clone());
        }
        self.rule_vector(&c_prime.symbol, &c.symbol, &u.neg())
            .map(LatticeVector::neg)
    }

    /// True iff every rule has unit `u` AND unit `v` and every base image is
    /// the single cell at the origin.
    pub fn is_domino_to_domino(&self) -> bool {
        if self.dim != 2 {
            return false;
        }
        let unit = |v: &LatticeVector| matches!(v.coords(), [1, 0] | [-1, 0] | [0, 1] | [0, -1]);
        self.data.rules.iter().all(|r| unit(&r.u) && unit(&r.v))
            && self.data.base.values().all(|p| {
                p.len() == 1 && p.support()[0].is_zero()
            })
    }

    /// The starting patterns `C_sigma`: one two-cell pattern `{[0,t],
    /// [u,t']}` per rule, as canonical translates.
    pub fn starting_patterns(&self) -> BTreeSet<Pattern> {
        self.data
            .rules
            .iter()
            .map(|r| {
                let p = Pattern::from_cells(
                    self.dim,
                    [
                        Cell::new(LatticeVector::zero(self.dim), r.t.clone()),
                        Cell::new(r.u.clone(), r.t_prime.clone()),
                    ],
                )
                .expect("u != 0 by validation");
                p.canonical_translate()
            })
            .collect()
    }
}

/// A finite cell sequence; consecutive pairs are intended to be translates
/// of starting patterns (checked by [`is_valid_path`]). A loop is a path
/// whose first and last cells coincide.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path(Vec<Cell>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("paths are nonempty")]
    Empty,
    #[error("cells {first} and {second} share a vector but differ")]
    VectorClash { first: Cell, second: Cell },
}

impl Path {
    /// Build a path, enforcing that cells with equal vectors are identical
    /// cells.
    pub fn new(cells: Vec<Cell>) -> Result<Self, PathError> {
        if cells.is_empty() {
            return Err(PathError::Empty);
        }
        let mut seen: HashMap<&LatticeVector, &Cell> = HashMap::new();
        for c in &cells {
            if let Some(prev) = seen.get(&c.vector) {
                if prev.symbol != c.symbol {
                    return Err(PathError::VectorClash {
                        first: (*prev).clone(),
                        second: c.clone(),
                    });
                }
            } else {
                seen.insert(&c.vector, c);
            }
        }
        Ok(Path(cells))
    }

    pub fn cells(&self) -> &[Cell] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: nonempty
    }

    pub fn first(&self) -> &Cell {
        self.0.first().expect("nonempty")
    }

    pub fn last(&self) -> &Cell {
        self.0.last().expect("nonempty")
    }

    pub fn is_loop(&self) -> bool {
        self.first() == self.last()
    }

    pub fn reversed(&self) -> Path {
        let mut cells = self.0.clone();
        cells.reverse();
        Path(cells)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// True iff every consecutive pair of `gamma` is a translate of a starting
/// pattern (i.e. `sigma_rule` is defined on it) and, when `within` is given,
/// every cell of the path lies in that pattern.
pub fn is_valid_path(s: &Substitution, gamma: &Path, within: Option<&Pattern>) -> bool {
    if let Some(p) = within {
        if !gamma.cells().iter().all(|c| p.contains_cell(c)) {
            return false;
        }
    }
    gamma
        .cells()
        .windows(2)
        .all(|w| s.sigma_rule(&w[0], &w[1]).is_some())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("sigma_rule undefined on consecutive pair {c} , {c_prime} (position {index})")]
    UndefinedPair {
        index: usize,
        c: Cell,
        c_prime: Cell,
    },
    #[error("pattern is not C-covered: cell {cell} is not connected to cell {root}")]
    NotCovered { root: Cell, cell: Cell },
    #[error("pattern is inconsistent for this substitution; overlap checking requires consistency")]
    InconsistentInput,
    #[error("loop guard exceeded: pattern has {cells} cells, guard is {guard}")]
    GuardExceeded { cells: usize, guard: usize },
}

/// `omega_sigma(gamma)`: the sum of `sigma_rule` over consecutive pairs.
pub fn image_vector(s: &Substitution, gamma: &Path) -> Result<LatticeVector, SubstError> {
    let mut acc = LatticeVector::zero(s.dim());
    for (i, w) in gamma.cells().windows(2).enumerate() {
        match s.sigma_rule(&w[0], &w[1]) {
            Some(v) => acc = acc.add(&v),
            None => {
                return Err(SubstError::UndefinedPair {
                    index: i,
                    c: w[0].clone(),
                    c_prime: w[1].clone(),
                })
            }
        }
    }
    Ok(acc)
}

/// The cover graph of a pattern: one vertex per cell, one undirected edge
/// per cell pair forming a translate of a starting pattern. Edge labels are
/// the `sigma_rule` values for the stored orientation.
pub struct CoverGraph {
    /// Cells in lexicographic vector order.
    pub cells: Vec<Cell>,
    /// Adjacency: for vertex `i`, the sorted list of `(j, sigma_rule(cells[i],
    /// cells[j]))`.
    pub adj: Vec<Vec<(usize, LatticeVector)>>,
}

impl CoverGraph {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected components as sorted vertex-index lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.cells.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for (j, _) in &self.adj[i] {
                    if !seen[*j] {
                        seen[*j] = true;
                        comp.push(*j);
                        queue.push_back(*j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Build the cover graph of `p` under `s`.
pub fn cover_graph(s: &Substitution, p: &Pattern) -> CoverGraph {
    let cells: Vec<Cell> = p.cells().collect();
    let pos: HashMap<&LatticeVector, usize> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.vector, i))
        .collect();
    let mut adj: Vec<Vec<(usize, LatticeVector)>> = vec![Vec::new(); cells.len()];
    for (i, c) in cells.iter().enumerate() {
        for u in &s.offsets {
            if u.dim() != c.vector.dim() {
                continue;
            }
            let w = c.vector.add(u);
            if let Some(&j) = pos.get(&w) {
                if let Some(v) = s.sigma_rule(c, &cells[j]) {
                    adj[i].push((j, v));
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_by_key(|a| a.0);
        list.dedup_by(|a, b| a.0 == b.0);
    }
    CoverGraph { cells, adj }
}

/// True iff every pair of cells of `p` is joined by a C-path inside `p`
/// (i.e. the cover graph is connected). The empty pattern is covered.
pub fn is_covered(s: &Substitution, p: &Pattern) -> bool {
    cover_graph(s, p).components().len() <= 1
}

/// Spanning-tree data shared by the consistency checker and `apply`: BFS
/// from a root with lexicographic tie-breaking, plus per-cell potentials
/// (tree-path image vectors).
struct BfsTree {
    root: usize,
    /// parent[i] = predecessor vertex on the tree path, root maps to itself.
    parent: Vec<usize>,
    /// potential[i] = omega of the tree path root -> i.
    potential: Vec<LatticeVector>,
    /// Vertices in BFS pop order.
    order: Vec<usize>,
}

fn bfs_tree(s: &Substitution, g: &CoverGraph, root: usize) -> Result<BfsTree, SubstError> {
    let n = g.cells.len();
    let mut parent = vec![usize::MAX; n];
    let mut potential = vec![LatticeVector::zero(s.dim()); n];
    let mut order = Vec::with_capacity(n);
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        // adjacency lists are sorted by vertex index, which is lexicographic
        // vector order: deterministic tie-breaking.
        for (j, v) in &g.adj[i] {
            if parent[*j] == usize::MAX {
                parent[*j] = i;
                let next = potential[i].add(v);
                potential[*j] = next;
                queue.push_back(*j);
            }
        }
    }
    if let Some(unreached) = (0..n).find(|&i| parent[i] == usize::MAX) {
        return Err(SubstError::NotCovered {
            root: g.cells[root].clone(),
            cell: g.cells[unreached].clone(),
        });
    }
    Ok(BfsTree {
        root,
        parent,
        potential,
        order,
    })
}

/// Tree path from the root to vertex `i`, as vertex indices.
fn tree_path_from_root(tree: &BfsTree, i: usize) -> Vec<usize> {
    let mut up = vec![i];
    let mut cur = i;
    while cur != tree.root {
        cur = tree.parent[cur];
        up.push(cur);
    }
    up.reverse();
    up
}

/// The simple fundamental loop through the non-tree edge `(i, j)`: from `i`
/// over the edge to `j`, then along tree edges up to the lowest common
/// ancestor and back down to `i`.
fn fundamental_loop(g: &CoverGraph, tree: &BfsTree, i: usize, j: usize) -> Path {
    let to_i = tree_path_from_root(tree, i);
    let to_j = tree_path_from_root(tree, j);
    let mut k = 0;
    while k + 1 < to_i.len() && k + 1 < to_j.len() && to_i[k + 1] == to_j[k + 1] {
        k += 1;
    }
    // to_i[k] == to_j[k] is the LCA.
    let mut verts = vec![i, j];
    // j up to the LCA (to_j[k..len-1] reversed ends at the LCA), then down
    // to i, closing the loop. When j or i IS the LCA the respective side is
    // empty and the loop still closes at i.
    verts.extend(to_j[k..to_j.len() - 1].iter().rev().copied());
    verts.extend(to_i[k + 1..].iter().copied());
    let cells = verts.into_iter().map(|v| g.cells[v].clone()).collect();
    Path::new(cells).expect("loop cells repeat only at the closure")
}

/// Result of [`check_consistent_on`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    /// Every loop of the pattern has zero image vector. The potential map
    /// assigns each cell vector the image vector of the tree path from
    /// `root`; by consistency it equals the value of every path. `root` is
    /// the lexicographically least cell (absent only for the empty pattern).
    Consistent {
        root: Option<Cell>,
        potential: BTreeMap<LatticeVector, LatticeVector>,
    },
    /// A loop with nonzero image vector exists; `witness` is a simple
    /// fundamental loop exhibiting `image_vector != 0`.
    Inconsistent {
        witness: Path,
        image_vector: LatticeVector,
    },
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Consistent { .. })
    }
}

/// Check consistency of `s` on the covered pattern `p`: build a BFS
/// spanning tree of the cover graph, assign potentials, and verify every
/// non-tree edge. Closed-walk sums vanish iff all fundamental-cycle sums
/// vanish (sigma_rule is antisymmetric), so this is exact on `p`.
///
/// The empty pattern is consistent with an empty potential map.
pub fn check_consistent_on(
    s: &Substitution,
    p: &Pattern,
) -> Result<ConsistencyVerdict, SubstError> {
    if p.is_empty() {
        return Ok(ConsistencyVerdict::Consistent {
            root: None,
            potential: BTreeMap::new(),
        });
    }
    let g = cover_graph(s, p);
    let tree = bfs_tree(s, &g, 0)?; // vertex 0 = lexicographically least cell
    // Verify non-tree edges in deterministic order: first encounter in BFS
    // pop order wins, scanning each vertex's sorted adjacency.
    let mut checked: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &i in &tree.order {
        for (j, v) in &g.adj[i] {
            let j = *j;
            if tree.parent[j] == i || tree.parent[i] == j {
                continue; // tree edge
            }
            let key = (i.min(j), i.max(j));
            if !checked.insert(key) {
                continue;
            }
            if tree.potential[j].sub(&tree.potential[i]) != *v {
                let witness = fundamental_loop(&g, &tree, i, j);
                let omega = image_vector(s, &witness)?;
                debug_assert!(!omega.is_zero());
                return Ok(ConsistencyVerdict::Inconsistent {
                    witness,
                    image_vector: omega,
                });
            }
        }
    }
    let potential = g
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.vector.clone(), tree.potential[i].clone()))
        .collect();
    Ok(ConsistencyVerdict::Consistent {
        root: Some(g.cells[0].clone()),
        potential,
    })
}

/// Result of [`check_nonoverlapping_on`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OverlapVerdict {
    NonOverlapping,
    /// Two distinct cells whose images share the support vector
    /// `collision_vector` (relative to the image of the potential root);
    /// `path` is a realizing C-path from `first` to `second`.
    Overlapping {
        first: Cell,
        second: Cell,
        path: Path,
        collision_vector: LatticeVector,
    },
}

impl OverlapVerdict {
    pub fn is_non_overlapping(&self) -> bool {
        matches!(self, OverlapVerdict::NonOverlapping)
    }
}

/// Check the non-overlapping condition of `s` on the covered, consistent
/// pattern `p`: for every unordered pair of distinct cells, the supports of
/// their placed images must be disjoint. Placement uses the potential map,
/// which by consistency is path-independent. Inconsistent input is rejected
/// (the set of path image vectors need not be finite in that case).
pub fn check_nonoverlapping_on(
    s: &Substitution,
    p: &Pattern,
) -> Result<OverlapVerdict, SubstError> {
    let verdict = check_consistent_on(s, p)?;
    let potential = match verdict {
        ConsistencyVerdict::Consistent { potential, .. } => potential,
        ConsistencyVerdict::Inconsistent { .. } => return Err(SubstError::InconsistentInput),
    };
    let g = cover_graph(s, p);
    let tree = bfs_tree(s, &g, 0)?;
    let cells: Vec<Cell> = g.cells.clone();
    // Placed supports, indexed like `cells`.
    let placed: Vec<BTreeSet<LatticeVector>> = cells
        .iter()
        .map(|c| {
            let pot = &potential[&c.vector];
            s.base_image(&c.symbol)
                .support()
                .into_iter()
                .map(|w| w.add(pot))
                .collect()
        })
        .collect();
    for i in 0..cells.len() {
        for j in (i + 1)..cells.len() {
            if let Some(hit) = placed[i].intersection(&placed[j]).next() {
                // Realizing path: tree path i -> lca -> j.
                let to_i = tree_path_from_root(&tree, i);
                let to_j = tree_path_from_root(&tree, j);
                let mut k = 0;
                while k + 1 < to_i.len() && k + 1 < to_j.len() && to_i[k + 1] == to_j[k + 1] {
                    k += 1;
                }
                let mut verts: Vec<usize> = to_i[k..].iter().rev().copied().collect();
                verts.extend(to_j[k + 1..].iter().copied());
                let path = Path::new(verts.into_iter().map(|v| cells[v].clone()).collect())
                    .expect("tree paths repeat no vectors");
                return Ok(OverlapVerdict::Overlapping {
                    first: cells[i].clone(),
                    second: cells[j].clone(),
                    path,
                    collision_vector: hit.clone(),
                });
            }
        }
    }
    Ok(OverlapVerdict::NonOverlapping)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApplyError {
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error("start cell {cell} does not belong to the pattern")]
    StartNotInPattern { cell: Cell },
    #[error("overlap collision at {vector}: images of {first} and {second} intersect")]
    Collision {
        first: Cell,
        second: Cell,
        vector: LatticeVector,
    },
}

/// The image of `p` by `s` computed from `c0`: the union of
/// `sigma_base(c) + omega(gamma_c)` over all cells `c`, where `gamma_c` is
/// the BFS-tree path from `c0` (lexicographic tie-breaking). Any repeated
/// vector in the union is a collision.
pub fn apply(s: &Substitution, p: &Pattern, c0: &Cell) -> Result<Pattern, ApplyError> {
    if p.is_empty() {
        return Ok(Pattern::empty(p.dim()));
    }
    if !p.contains_cell(c0) {
        return Err(ApplyError::StartNotInPattern { cell: c0.clone() });
    }
    let g = cover_graph(s, p);
    let root = g
        .cells
        .iter()
        .position(|c| c == c0)
        .expect("checked membership above");
    let tree = bfs_tree(s, &g, root)?;
    let parts: Vec<Pattern> = g
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            s.base_image(&c.symbol)
                .translate(&tree.potential[i])
                .expect("equal dimensions")
        })
        .collect();
    merge_checked(&parts).map_err(|col| ApplyError::Collision {
        first: g.cells[col.first_part].clone(),
        second: g.cells[col.second_part].clone(),
        vector: col.vector,
    })
}

/// Start-cell policy for [`iterate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum C0Policy {
    /// Every application starts from the lexicographically least cell.
    LexLeast,
    /// The first application starts from the given cell; subsequent
    /// applications restart from the lexicographically least cell of the
    /// current image.
    Start(Cell),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("iterate failed at step {index}: {source}")]
pub struct IterateError {
    pub index: usize,
    #[source]
    pub source: ApplyError,
}

/// `p, s(p), ..., s^k(p)`. Stops with a diagnostic naming the failing
/// iterate if coverage or overlap fails.
// The error carries the full colliding cells as a terminal diagnostic;
// its size is irrelevant on the happy path.
#[allow(clippy::result_large_err)]
pub fn iterate(
    s: &Substitution,
    p: &Pattern,
    k: usize,
    policy: C0Policy,
) -> Result<Vec<Pattern>, IterateError> {
    let mut out = vec![p.clone()];
    for step in 0..k {
        let current = out.last().expect("nonempty");
        let c0 = match (&policy, step) {
            (C0Policy::Start(c), 0) => c.clone(),
            _ => match current.min_cell() {
                Some(c) => c,
                None => {
                    out.push(Pattern::empty(current.dim()));
                    continue;
                }
            },
        };
        let next = apply(s, current, &c0).map_err(|source| IterateError {
            index: step + 1,
            source,
        })?;
        out.push(next);
    }
    Ok(out)
}

/// Default cell-count guard for [`enumerate_simple_loops`].
pub const LOOP_GUARD: usize = 16;

/// Brute-force enumeration of all simple C-loops of `p` with sequence
/// length (including the closing repeat) at most `max_len`, together with
/// their image vectors. Trivial single-cell loops are included. Intended as
/// a test oracle; guarded to small patterns.
pub fn enumerate_simple_loops(
    s: &Substitution,
    p: &Pattern,
    max_len: usize,
) -> Result<Vec<(Path, LatticeVector)>, SubstError> {
    enumerate_simple_loops_guarded(s, p, max_len, LOOP_GUARD)
}

pub fn enumerate_simple_loops_guarded(
    s: &Substitution,
    p: &Pattern,
    max_len: usize,
    guard: usize,
) -> Result<Vec<(Path, LatticeVector)>, SubstError> {
    if p.len() > guard {
        return Err(SubstError::GuardExceeded {
            cells: p.len(),
            guard,
        });
    }
    let g = cover_graph(s, p);
    let n = g.cells.len();
    let mut out = Vec::new();
    for (i, c) in g.cells.iter().enumerate() {
        if max_len >= 1 {
            let trivial = Path::new(vec![c.clone()]).expect("single cell");
            out.push((trivial, LatticeVector::zero(s.dim())));
        }
        // Simple cycles with minimal vertex `i`, each undirected cycle
        // emitted once: for length > 2 require second vertex < last vertex.
        let mut stack = vec![i];
        let mut on_stack = vec![false; n];
        on_stack[i] = true;
        enumerate_cycles_from(s, &g, i, max_len, &mut stack, &mut on_stack, &mut out);
    }
    Ok(out)
}

fn enumerate_cycles_from(
    s: &Substitution,
    g: &CoverGraph,
    start: usize,
    max_len: usize,
    stack: &mut Vec<usize>,
    on_stack: &mut [bool],
    out: &mut Vec<(Path, LatticeVector)>,
) {
    let last = *stack.last().expect("nonempty stack");
    for (j, _) in &g.adj[last] {
        let j = *j;
        if j == start && stack.len() >= 2 {
            // closing edge; sequence length = stack.len() + 1
            if stack.len() + 1 > max_len {
                continue;
            }
            if stack.len() > 2 && stack[1] > stack[stack.len() - 1] {
                continue; // visit each undirected cycle once ...
            }
            let mut verts = stack.clone();
            verts.push(start);
            let cells: Vec<Cell> = verts.into_iter().map(|v| g.cells[v].clone()).collect();
            let path = Path::new(cells).expect("simple cycle repeats only the closure");
            let omega = image_vector(s, &path).expect("edges are cover-graph edges");
            if stack.len() > 2 {
                // ... but report both traversal directions
                out.push((path.reversed(), omega.neg()));
            }
            out.push((path, omega));
        } else if j > start && !on_stack[j] && stack.len() + 2 <= max_len {
            stack.push(j);
            on_stack[j] = true;
            enumerate_cycles_from(s, g, start, max_len, stack, on_stack, out);
            on_stack[j] = false;
            stack.pop();
        }
    }
}

//! Line-oriented text formats for patterns, substitutions and Wang tile
//! sets, plus canonical serializers. `#` starts a comment, blank lines are
//! ignored; all parse errors carry 1-based line numbers.
//!
//! Pattern file: one or more blocks of
//! ```text
//! pattern [<name>]
//! cell (<x>,<y>[,<z>...]) <symbol>
//! ```
//!
//! Substitution file:
//! ```text
//! alphabet <sym> <sym> ...
//! base <sym> : (<x>,<y>)-><sym> [ (<x>,<y>)-><sym> ... ]
//! rule <t> <t'> (<ux>,<uy>) -> (<vx>,<vy>)
//! ```
//!
//! Tile set file: one line per tile,
//! ```text
//! tile <name> n=<color> e=<color> s=<color> w=<color>
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::{Cell, Coord, LatticeVector, Pattern, Symbol};
use crate::substitution::{ConcatenationRule, Substitution, SubstitutionData, Violation};
use crate::wang::{WangTile, WangTileSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Strip comments and yield (1-based line number, trimmed nonempty line).
fn logical_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = body.trim();
        if trimmed.is_empty() {
            None
        } else {
            Some((i + 1, trimmed))
        }
    })
}

fn parse_symbol(token: &str, line: usize) -> Result<Symbol, ParseError> {
    Symbol::new(token).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })
}

/// Parse `(<int>,<int>[,...])`.
fn parse_vector(token: &str, line: usize) -> Result<LatticeVector, ParseError> {
    let inner = token
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| ParseError {
            line,
            message: format!("expected a vector like (x,y), found {token:?}"),
        })?;
    let coords: Result<Vec<Coord>, _> = inner.split(',').map(|c| c.trim().parse()).collect();
    match coords {
        Ok(c) if !c.is_empty() => Ok(LatticeVector::new(c)),
        _ => err(line, format!("invalid vector {token:?}")),
    }
}

/// Parse a pattern file into its named blocks.
pub fn parse_patterns(text: &str) -> Result<Vec<(Option<String>, Pattern)>, ParseError> {
    // cells keep their source line for error reporting
    type Block = (Option<String>, Vec<(usize, Cell)>);
    let mut blocks: Vec<Block> = Vec::new();
    for (line, content) in logical_lines(text) {
        let mut words = content.split_whitespace();
        match words.next() {
            Some("pattern") => {
                let name = match words.next() {
                    None => None,
                    Some(token) => Some(parse_symbol(token, line)?.as_str().to_owned()),
                };
                if words.next().is_some() {
                    return err(line, "trailing tokens after pattern header");
                }
                blocks.push((name, Vec::new()));
            }
            Some("cell") => {
                let Some((_, cells)) = blocks.last_mut() else {
                    return err(line, "cell line before any `pattern` header");
                };
                let vec_token = match words.next() {
                    Some(t) => t,
                    None => return err(line, "cell line needs a vector and a symbol"),
                };
                let sym_token = match words.next() {
                    Some(t) => t,
                    None => return err(line, "cell line needs a symbol"),
                };
                if words.next().is_some() {
                    return err(line, "trailing tokens after cell line");
                }
                let vector = parse_vector(vec_token, line)?;
                let symbol = parse_symbol(sym_token, line)?;
                cells.push((line, Cell::new(vector, symbol)));
            }
            Some(other) => return err(line, format!("unknown directive {other:?}")),
            None => unreachable!("logical lines are nonempty"),
        }
    }
    let mut out = Vec::new();
    for (name, cells) in blocks {
        let dim = cells.first().map_or(2, |(_, c)| c.dim());
        let mut p = Pattern::empty(dim);
        for (line, c) in cells {
            p.insert(c).map_err(|e| ParseError {
                line,
                message: e.to_string(),
            })?;
        }
        out.push((name, p));
    }
    Ok(out)
}

/// Parse a pattern file expected to contain exactly one block.
pub fn parse_pattern(text: &str) -> Result<Pattern, ParseError> {
    let blocks = parse_patterns(text)?;
    match blocks.len() {
        1 => Ok(blocks.into_iter().next().expect("length checked").1),
        n => err(1, format!("expected exactly one pattern block, found {n}")),
    }
}

pub fn serialize_pattern(name: Option<&str>, p: &Pattern) -> String {
    let mut out = String::new();
    match name {
        Some(n) => writeln!(out, "pattern {n}").expect("string write"),
        None => writeln!(out, "pattern").expect("string write"),
    }
    for c in p.cells() {
        writeln!(out, "cell {} {}", c.vector, c.symbol).expect("string write");
    }
    out
}

pub fn serialize_patterns<'a>(
    blocks: impl IntoIterator<Item = (Option<&'a str>, &'a Pattern)>,
) -> String {
    let mut out = String::new();
    for (i, (name, p)) in blocks.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&serialize_pattern(name, p));
    }
    out
}

/// Parse-and-validate result carrier: syntax errors are [`ParseError`]s,
/// invariant violations come with the line-resolved context.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstitutionFileError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("substitution invariants violated:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

/// Parse a substitution file without enforcing the substitution invariants;
/// used by `validate`-style callers that want the violation list.
pub fn parse_substitution_data(text: &str) -> Result<SubstitutionData, ParseError> {
    let mut alphabet: BTreeSet<Symbol> = BTreeSet::new();
    let mut saw_alphabet = false;
    let mut base: BTreeMap<Symbol, Pattern> = BTreeMap::new();
    let mut rules: Vec<ConcatenationRule> = Vec::new();
    for (line, content) in logical_lines(text) {
        let mut words = content.split_whitespace().peekable();
        match words.next() {
            Some("alphabet") => {
                if saw_alphabet {
                    return err(line, "duplicate alphabet line");
                }
                saw_alphabet = true;
                for token in words {
                    let s = parse_symbol(token, line)?;
                    if !alphabet.insert(s.clone()) {
                        return err(line, format!("duplicate alphabet symbol {s}"));
                    }
                }
                if alphabet.is_empty() {
                    return err(line, "alphabet line lists no symbols");
                }
            }
            Some("base") => {
                let sym_token = words
                    .next()
                    .ok_or_else(|| ParseError {
                        line,
                        message: "base line needs a symbol".into(),
                    })?;
                let symbol = parse_symbol(sym_token, line)?;
                if words.next() != Some(":") {
                    return err(line, "expected `:` after the base symbol");
                }
                let mut image = Vec::new();
                for token in words {
                    let Some((vec_part, sym_part)) = token.split_once("->") else {
                        return err(line, format!("expected (x,y)->symbol, found {token:?}"));
                    };
                    let v = parse_vector(vec_part, line)?;
                    let t = parse_symbol(sym_part, line)?;
                    image.push(Cell::new(v, t));
                }
                if image.is_empty() {
                    return err(line, format!("base image of {symbol} is empty"));
                }
                let dim = image[0].dim();
                let mut p = Pattern::empty(dim);
                for c in image {
                    p.insert(c).map_err(|e| ParseError {
                        line,
                        message: e.to_string(),
                    })?;
                }
                if base.insert(symbol.clone(), p).is_some() {
                    return err(line, format!("duplicate base line for symbol {symbol}"));
                }
            }
            Some("rule") => {
                let tokens: Vec<&str> = words.collect();
                // rule t t' (ux,uy) -> (vx,vy)
                if tokens.len() != 5 || tokens[3] != "->" {
                    return err(line, "expected: rule <t> <t'> (ux,uy) -> (vx,vy)");
                }
                rules.push(ConcatenationRule {
                    t: parse_symbol(tokens[0], line)?,
                    t_prime: parse_symbol(tokens[1], line)?,
                    u: parse_vector(tokens[2], line)?,
                    v: parse_vector(tokens[4], line)?,
                });
            }
            Some(other) => return err(line, format!("unknown directive {other:?}")),
            None => unreachable!("logical lines are nonempty"),
        }
    }
    if !saw_alphabet {
        return err(1, "missing alphabet line");
    }
    Ok(SubstitutionData {
        alphabet,
        base,
        rules,
    })
}

/// Strict parse: syntax and every substitution invariant.
pub fn parse_substitution(text: &str) -> Result<Substitution, SubstitutionFileError> {
    let data = parse_substitution_data(text)?;
    data.build().map_err(SubstitutionFileError::Invalid)
}

/// Canonical serialization: sorted alphabet, base lines in symbol order
/// with cells in lexicographic order, rules sorted by (t, t', u).
/// `parse(serialize(s)) == s`.
pub fn serialize_substitution(s: &Substitution) -> String {
    let mut out = String::new();
    write!(out, "alphabet").expect("string write");
    for t in s.alphabet() {
        write!(out, " {t}").expect("string write");
    }
    out.push('\n');
    for (t, image) in s.base() {
        write!(out, "base {t} :").expect("string write");
        for c in image.cells() {
            write!(out, " {}->{}", c.vector, c.symbol).expect("string write");
        }
        out.push('\n');
    }
    let mut rules: Vec<&ConcatenationRule> = s.rules().iter().collect();
    rules.sort_by_key(|r| (r.t.clone(), r.t_prime.clone(), r.u.clone()));
    for r in rules {
        writeln!(out, "{r}").expect("string write");
    }
    out
}

/// Parse a Wang tile set file.
pub fn parse_tile_set(text: &str) -> Result<WangTileSet, ParseError> {
    let mut tiles = Vec::new();
    let mut names: BTreeSet<Symbol> = BTreeSet::new();
    for (line, content) in logical_lines(text) {
        let mut words = content.split_whitespace();
        if words.next() != Some("tile") {
            return err(line, "expected a `tile` line");
        }
        let name_token = words.next().ok_or_else(|| ParseError {
            line,
            message: "tile line needs a name".into(),
        })?;
        let name = parse_symbol(name_token, line)?;
        if !names.insert(name.clone()) {
            return err(line, format!("duplicate tile name {name}"));
        }
        let mut colors: BTreeMap<&str, Symbol> = BTreeMap::new();
        for token in words {
            let Some((side, color)) = token.split_once('=') else {
                return err(line, format!("expected side=color, found {token:?}"));
            };
            if !matches!(side, "n" | "e" | "s" | "w") {
                return err(line, format!("unknown side {side:?}"));
            }
            if colors
                .insert(side, parse_symbol(color, line)?)
                .is_some()
            {
                return err(line, format!("duplicate side {side:?}"));
            }
        }
        let get = |side: &str| -> Result<Symbol, ParseError> {
            colors.get(side).cloned().ok_or_else(|| ParseError {
                line,
                message: format!("missing side {side:?}"),
            })
        };
        tiles.push(WangTile {
            name,
            north: get("n")?,
            east: get("e")?,
            south: get("s")?,
            west: get("w")?,
        });
    }
    if tiles.is_empty() {
        return err(1, "tile set is empty");
    }
    Ok(WangTileSet::new(tiles))
}

pub fn serialize_tile_set(t: &WangTileSet) -> String {
    let mut out = String::new();
    for tile in t.tiles() {
        writeln!(
            out,
            "tile {} n={} e={} s={} w={}",
            tile.name, tile.north, tile.east, tile.south, tile.west
        )
        .expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{cell2, v2};

    const JP: &str = "\
alphabet 1 2 3
base 1 : (0,0)->2
base 2 : (0,0)->3
base 3 : (0,0)->1 (1,0)->3
rule 2 3 (1,1) -> (-2,0)
rule 3 2 (0,1) -> (-1,-1)
rule 1 3 (1,0) -> (0,1)
rule 3 3 (1,0) -> (0,1)
rule 3 1 (1,1) -> (-1,0)
rule 3 3 (0,1) -> (-2,-1)
rule 2 1 (1,0) -> (0,1)
";

    #[test]
    fn substitution_round_trip() {
        let s = parse_substitution(JP).unwrap();
        assert_eq!(s.alphabet().len(), 3);
        assert_eq!(s.rules().len(), 7);
        let text = serialize_substitution(&s);
        let s2 = parse_substitution(&text).unwrap();
        assert_eq!(s, s2);
        assert_eq!(serialize_substitution(&s2), text);
    }

    #[test]
    fn duplicate_base_line_is_an_error() {
        let text = "alphabet 1\nbase 1 : (0,0)->1\nbase 1 : (0,0)->1\n";
        let e = parse_substitution_data(text).unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn determinism_violation_surfaces() {
        let text = "\
alphabet 1 2
base 1 : (0,0)->1
base 2 : (0,0)->2
rule 1 2 (0,1) -> (1,2)
rule 2 1 (0,-1) -> (0,0)
";
        match parse_substitution(text) {
            Err(SubstitutionFileError::Invalid(v)) => {
                assert!(v.iter().any(|x| matches!(x, Violation::ReversedLhs { .. })))
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn pattern_round_trip_with_comments() {
        let text = "# a comment\npattern p6\ncell (0,0) 2   # inline comment\ncell (1,0) 1\n\ncell (-2,3) 3\n";
        let blocks = parse_patterns(text).unwrap();
        assert_eq!(blocks.len(), 1);
        let (name, p) = &blocks[0];
        assert_eq!(name.as_deref(), Some("p6"));
        assert_eq!(p.len(), 3);
        assert!(p.contains_cell(&cell2(-2, 3, "3")));
        let text2 = serialize_pattern(name.as_deref(), p);
        let p2 = parse_pattern(&text2).unwrap();
        assert_eq!(*p, p2);
    }

    #[test]
    fn vector_parse_errors_have_lines() {
        let text = "pattern\ncell (0 0) 1\n";
        let e = parse_patterns(text).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn tiles_round_trip() {
        let text = "tile u n=c e=c s=c w=c\ntile v n=a e=b s=c w=d\n";
        let t = parse_tile_set(text).unwrap();
        assert_eq!(t.tiles().len(), 2);
        assert_eq!(serialize_tile_set(&t), text);
    }

    #[test]
    fn base_images_parse_vectors() {
        let s = parse_substitution(JP).unwrap();
        assert_eq!(
            s.base_image(&crate::geom::sym("3")).support(),
            vec![v2(0, 0), v2(1, 0)]
        );
    }
}

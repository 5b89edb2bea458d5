//! Minimal deterministic SVG rendering of patterns.
//!
//! Lattice coordinates follow the mathematical convention (y grows upward);
//! the flip to screen coordinates happens here and nowhere else.

use std::collections::BTreeMap;

use crate::geom::{Coord, Pattern, Symbol};

/// Rendering options. The defaults draw 20px labelled cells with a black
/// outline and a palette assigned to symbols in sorted order.
#[derive(Debug, Clone)]
pub struct RenderStyle {
    /// Side length of one lattice cell in pixels.
    pub cell_size: u32,
    /// Draw the symbol name centered in each cell.
    pub label: bool,
    /// Explicit fill colors per symbol; symbols not listed get a palette
    /// color by their rank in the sorted symbol set.
    pub fill_map: BTreeMap<Symbol, String>,
    /// Stroke color for cell outlines.
    pub stroke: String,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            cell_size: 20,
            label: true,
            fill_map: BTreeMap::new(),
            stroke: "#000000".to_string(),
        }
    }
}

const PALETTE: [&str; 8] = [
    "#a6cee3", "#b2df8a", "#fdbf6f", "#cab2d6", "#fb9a99", "#ffff99", "#1f78b4", "#33a02c",
];

/// Render a 2-dimensional pattern as a standalone SVG document.
///
/// The cell at lattice position `(x, y)` becomes a square with top-left
/// corner `(s*x, -s*y - s)` where `s` is the cell size, so that larger `y`
/// is drawn higher. Elements appear in lexicographic cell order and the
/// output is byte-for-byte deterministic.
///
/// # Panics
///
/// Panics if the pattern is not 2-dimensional.
pub fn render_svg(pattern: &Pattern, style: &RenderStyle) -> String {
    assert_eq!(pattern.dim(), 2, "render_svg requires a 2-dimensional pattern");
    let s = Coord::from(style.cell_size);

    let mut fills: BTreeMap<Symbol, String> = BTreeMap::new();
    for (rank, symbol) in pattern.symbols().into_iter().enumerate() {
        let fill = style
            .fill_map
            .get(&symbol)
            .cloned()
            .unwrap_or_else(|| PALETTE[rank % PALETTE.len()].to_string());
        fills.insert(symbol, fill);
    }

    // Bounding box in screen coordinates, with a one-pixel margin so
    // strokes are not clipped.
    let (mut min_x, mut min_y) = (Coord::MAX, Coord::MAX);
    let (mut max_x, mut max_y) = (Coord::MIN, Coord::MIN);
    for v in pattern.support() {
        let (px, py) = (s * v.x(), -s * v.y() - s);
        min_x = min_x.min(px);
        min_y = min_y.min(py);
        max_x = max_x.max(px + s);
        max_y = max_y.max(py + s);
    }
    if pattern.is_empty() {
        (min_x, min_y, max_x, max_y) = (0, 0, s, s);
    }
    let (vb_x, vb_y) = (min_x - 1, min_y - 1);
    let (vb_w, vb_h) = (max_x - min_x + 2, max_y - min_y + 2);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{vb_w}\" height=\"{vb_h}\" viewBox=\"{vb_x} {vb_y} {vb_w} {vb_h}\">\n"
    ));
    for c in pattern.cells() {
        let (v, symbol) = (&c.vector, &c.symbol);
        let (px, py) = (s * v.x(), -s * v.y() - s);
        let fill = &fills[symbol];
        out.push_str(&format!(
            "  <rect x=\"{px}\" y=\"{py}\" width=\"{s}\" height=\"{s}\" \
             fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"1\"/>\n",
            stroke = style.stroke,
        ));
        if style.label {
            let (cx, cy) = (px + s / 2, py + s / 2);
            let font = (s * 2 / 5).max(1);
            out.push_str(&format!(
                "  <text x=\"{cx}\" y=\"{cy}\" font-size=\"{font}\" \
                 font-family=\"monospace\" text-anchor=\"middle\" \
                 dominant-baseline=\"central\">{}</text>\n",
                escape_xml(symbol.as_str()),
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{cell2, Pattern};

    fn sample() -> Pattern {
        Pattern::from_cells(
            2,
            [cell2(0, 0, "a"), cell2(1, 0, "b"), cell2(0, 1, "a")],
        )
        .unwrap()
    }

    #[test]
    fn y_axis_is_flipped() {
        let svg = render_svg(&sample(), &RenderStyle::default());
        // (0,1) is drawn above (0,0): rect y = -40 precedes y = -20
        assert!(svg.contains("x=\"0\" y=\"-40\""));
        assert!(svg.contains("x=\"0\" y=\"-20\""));
        assert!(svg.contains("x=\"20\" y=\"-20\""));
    }

    #[test]
    fn deterministic_and_well_formed() {
        let style = RenderStyle::default();
        let a = render_svg(&sample(), &style);
        let b = render_svg(&sample(), &style);
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<rect").count(), 3);
        assert_eq!(a.matches("<text").count(), 3);
    }

    #[test]
    fn fill_map_overrides_palette() {
        let mut style = RenderStyle {
            label: false,
            ..RenderStyle::default()
        };
        style
            .fill_map
            .insert(crate::geom::sym("a"), "#123456".to_string());
        let svg = render_svg(&sample(), &style);
        assert_eq!(svg.matches("#123456").count(), 2);
        assert!(!svg.contains("<text"));
    }
}

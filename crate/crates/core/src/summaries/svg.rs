//! Dependency-free SVG heatmaps for co-clustering matrices.

use std::fmt::Write;

/// Renders `matrix` (values in [0,1]) as a grayscale heatmap, rows/columns
/// permuted by `order`; darker cells mean higher probability. Optional block
/// boundaries (cumulative sizes) are drawn as frames, as when patients are
/// grouped by population.
pub fn heatmap_svg(matrix: &[Vec<f64>], order: &[usize], blocks: Option<&[usize]>) -> String {
    let n = matrix.len();
    assert_eq!(order.len(), n);
    let cell = 6.0f64;
    let margin = 2.0f64;
    let side = n as f64 * cell + 2.0 * margin;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side:.0}" height="{side:.0}" viewBox="0 0 {side} {side}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{side}" height="{side}" fill="white"/>"#
    );
    for (row, &i) in order.iter().enumerate() {
        for (col, &j) in order.iter().enumerate() {
            let v = matrix[i][j].clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - v)).round() as u8;
            if shade == 255 {
                continue; // white background already
            }
            let x = margin + col as f64 * cell;
            let y = margin + row as f64 * cell;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{cell}" height="{cell}" fill="rgb({shade},{shade},{shade})"/>"#
            );
        }
    }
    if let Some(cuts) = blocks {
        let mut start = 0usize;
        for &end in cuts {
            let x = margin + start as f64 * cell;
            let w = (end - start) as f64 * cell;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{x:.1}" width="{w:.1}" height="{w:.1}" fill="none" stroke="black" stroke-width="1.2"/>"#
            );
            start = end;
        }
    }
    out.push_str("</svg>\n");
    out
}

//! SVG and ASCII pictures of sampled objects.

use std::fmt::Write;

use fixedrank::lozenge::PlanePartition;
use fixedrank::permutations::{rothe_cells, Permutation};

const CELL: f64 = 20.0;
const MARGIN: f64 = 10.0;

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = fmt_num(width),
        h = fmt_num(height)
    )
}

fn fmt_num(x: f64) -> String {
    let r = (x * 1000.0).round() / 1000.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

/// Rows of `#`, one per part, longest first.
pub fn young_ascii(parts: &[u32]) -> String {
    let mut out = String::new();
    for &p in parts.iter().filter(|&&p| p > 0) {
        out.push_str(&"#".repeat(p as usize));
        out.push('\n');
    }
    out
}

/// Unit squares in English notation with the two axes drawn.
pub fn young_svg(parts: &[u32]) -> String {
    let cols = parts.first().copied().unwrap_or(0).max(1) as f64;
    let rows = parts.len().max(1) as f64;
    let (w, h) = (2.0 * MARGIN + cols * CELL, 2.0 * MARGIN + rows * CELL);
    let mut s = svg_open(w, h);
    writeln!(
        s,
        "<line class=\"axis\" x1=\"{m}\" y1=\"{m}\" x2=\"{x}\" y2=\"{m}\" stroke=\"black\"/>",
        m = fmt_num(MARGIN),
        x = fmt_num(w - MARGIN)
    )
    .unwrap();
    writeln!(
        s,
        "<line class=\"axis\" x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{y}\" stroke=\"black\"/>",
        m = fmt_num(MARGIN),
        y = fmt_num(h - MARGIN)
    )
    .unwrap();
    for (row, &len) in parts.iter().enumerate() {
        for col in 0..len {
            writeln!(
                s,
                "<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{c}\" height=\"{c}\" fill=\"#9ecae1\" stroke=\"black\"/>",
                fmt_num(MARGIN + col as f64 * CELL),
                fmt_num(MARGIN + row as f64 * CELL),
                c = fmt_num(CELL)
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

/// The `n × n` grid with the permutation's points and its Rothe cells.
pub fn rothe_svg(perm: &Permutation) -> String {
    let n = perm.len();
    let side = 2.0 * MARGIN + n.max(1) as f64 * CELL;
    let mut s = svg_open(side, side);
    for i in 0..=n {
        let p = fmt_num(MARGIN + i as f64 * CELL);
        let (lo, hi) = (fmt_num(MARGIN), fmt_num(MARGIN + n as f64 * CELL));
        writeln!(s, "<line class=\"grid\" x1=\"{p}\" y1=\"{lo}\" x2=\"{p}\" y2=\"{hi}\" stroke=\"#bbbbbb\"/>").unwrap();
        writeln!(s, "<line class=\"grid\" x1=\"{lo}\" y1=\"{p}\" x2=\"{hi}\" y2=\"{p}\" stroke=\"#bbbbbb\"/>").unwrap();
    }
    for (i, j) in rothe_cells(perm) {
        writeln!(
            s,
            "<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{c}\" height=\"{c}\" fill=\"#fc9272\"/>",
            fmt_num(MARGIN + (j - 1) as f64 * CELL),
            fmt_num(MARGIN + (i - 1) as f64 * CELL),
            c = fmt_num(CELL)
        )
        .unwrap();
    }
    for (i, &v) in perm.mapping().iter().enumerate() {
        writeln!(
            s,
            "<circle class=\"point\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>",
            fmt_num(MARGIN + (v as f64 - 0.5) * CELL),
            fmt_num(MARGIN + (i as f64 + 0.5) * CELL),
            fmt_num(CELL / 4.0)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Clone, Copy)]
enum Face {
    Top,
    Left,
    Right,
}

impl Face {
    fn fill(self) -> &'static str {
        match self {
            Face::Top => "#f0e442",
            Face::Left => "#0072b2",
            Face::Right => "#d55e00",
        }
    }

    fn class(self) -> &'static str {
        match self {
            Face::Top => "top",
            Face::Left => "left",
            Face::Right => "right",
        }
    }
}

/// The lozenge tiling of the `a × b × c` hexagon seen from `(1, 1, 1)`:
/// floor and back walls first, then cubes from back to front.
pub fn lozenge_svg(pp: &PlanePartition, c: u32) -> String {
    let (a, b, c) = (pp.rows() as f64, pp.cols() as f64, c as f64);
    let half = 3f64.sqrt() / 2.0;
    let scale = CELL;
    let x_off = MARGIN + b * half * scale;
    let y_off = MARGIN + c * scale;
    let project = |x: f64, y: f64, z: f64| (x_off + (x - y) * half * scale, y_off + ((x + y) / 2.0 - z) * scale);
    let width = 2.0 * MARGIN + (a + b) * half * scale;
    let height = 2.0 * MARGIN + ((a + b) / 2.0 + c) * scale;
    let mut s = svg_open(width, height);
    let face = |s: &mut String, kind: Face, corners: [(f64, f64, f64); 4]| {
        let points: Vec<String> = corners
            .iter()
            .map(|&(x, y, z)| {
                let (u, v) = project(x, y, z);
                format!("{},{}", fmt_num(u), fmt_num(v))
            })
            .collect();
        writeln!(
            s,
            "<polygon class=\"{}\" points=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.5\"/>",
            kind.class(),
            points.join(" "),
            kind.fill()
        )
        .unwrap();
    };
    let (ai, bi, ci) = (pp.rows(), pp.cols(), c as usize);
    for x in 0..ai {
        for y in 0..bi {
            let (x, y) = (x as f64, y as f64);
            face(&mut s, Face::Top, [(x, y, 0.0), (x + 1.0, y, 0.0), (x + 1.0, y + 1.0, 0.0), (x, y + 1.0, 0.0)]);
        }
    }
    for z in 0..ci {
        let z = z as f64;
        for y in 0..bi {
            let y = y as f64;
            face(&mut s, Face::Left, [(0.0, y, z), (0.0, y + 1.0, z), (0.0, y + 1.0, z + 1.0), (0.0, y, z + 1.0)]);
        }
        for x in 0..ai {
            let x = x as f64;
            face(&mut s, Face::Right, [(x, 0.0, z), (x + 1.0, 0.0, z), (x + 1.0, 0.0, z + 1.0), (x, 0.0, z + 1.0)]);
        }
    }
    let mut cubes = Vec::new();
    for i in 0..ai {
        for j in 0..bi {
            for k in 0..pp.get(i, j) as usize {
                cubes.push((i + j + k, i, j, k));
            }
        }
    }
    cubes.sort_unstable();
    for (_, i, j, k) in cubes {
        let (x, y, z) = (i as f64, j as f64, k as f64);
        face(&mut s, Face::Top, [(x, y, z + 1.0), (x + 1.0, y, z + 1.0), (x + 1.0, y + 1.0, z + 1.0), (x, y + 1.0, z + 1.0)]);
        face(&mut s, Face::Left, [(x + 1.0, y, z), (x + 1.0, y + 1.0, z), (x + 1.0, y + 1.0, z + 1.0), (x + 1.0, y, z + 1.0)]);
        face(&mut s, Face::Right, [(x, y + 1.0, z), (x + 1.0, y + 1.0, z), (x + 1.0, y + 1.0, z + 1.0), (x, y + 1.0, z + 1.0)]);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_three_two() {
        assert_eq!(young_ascii(&[3, 2]), "###\n##\n");
        assert_eq!(young_ascii(&[]), "");
    }

    #[test]
    fn empty_young_svg_has_axes_only() {
        let s = young_svg(&[]);
        assert_eq!(s.matches("class=\"axis\"").count(), 2);
        assert_eq!(s.matches("class=\"cell\"").count(), 0);
        assert_eq!(young_svg(&[3, 2]).matches("class=\"cell\"").count(), 5);
    }

    #[test]
    fn rothe_cells_match_inversions() {
        assert_eq!(rothe_svg(&Permutation::identity(4)).matches("class=\"cell\"").count(), 0);
        let p = Permutation::new(vec![3, 1, 2]).unwrap();
        assert_eq!(rothe_svg(&p).matches("class=\"cell\"").count(), 2);
        assert_eq!(rothe_svg(&p).matches("class=\"point\"").count(), 3);
    }

    #[test]
    fn lozenge_face_counts() {
        let empty = PlanePartition::empty(2, 3);
        let s = lozenge_svg(&empty, 2);
        // Floor 2·3, walls 2·(3 + 2).
        assert_eq!(s.matches("<polygon").count(), 6 + 10);
        let full = PlanePartition::full(2, 3, 2);
        assert_eq!(lozenge_svg(&full, 2).matches("<polygon").count(), 16 + 3 * 12);
        assert_eq!(lozenge_svg(&full, 2), lozenge_svg(&full, 2));
    }
}

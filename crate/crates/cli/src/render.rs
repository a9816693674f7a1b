//! ASCII and SVG drawings of 1D and 2D blocks. The first coordinate is
//! horizontal, the second grows upward.

use std::fmt::Write as _;

use sftkit::{Alphabet, Block};

const CELL: usize = 24;

fn extent(b: &Block) -> (i32, i32, usize, usize) {
    let r = b.region();
    let w = r.size[0];
    let h = if r.dim() >= 2 { r.size[1] } else { 1 };
    (r.lo[0], if r.dim() >= 2 { r.lo[1] } else { 0 }, w, h)
}

fn at(b: &Block, x: i32, y: i32) -> sftkit::Symbol {
    let mut p = vec![x];
    if b.dim() >= 2 {
        p.push(y);
    }
    p.extend(b.region().lo.iter().skip(2).copied());
    b.get(&p).expect("inside the block")
}

/// One row per second coordinate, top row first; higher dimensions show
/// the slice at the lowest coordinates.
pub fn ascii(b: &Block, a: &Alphabet) -> String {
    let (x0, y0, w, h) = extent(b);
    let width = a.names().iter().map(|n| n.len()).max().unwrap_or(1);
    let mut out = String::new();
    for j in (0..h as i32).rev() {
        let row: Vec<String> = (0..w as i32).map(|i| format!("{:>width$}", a.name(at(b, x0 + i, y0 + j)))).collect();
        out.push_str(row.join(" ").trim_end());
        out.push('\n');
    }
    out
}

/// Fill colour keyed by symbol index only.
pub fn colour(index: usize) -> String {
    let hue = (index as f64 * 137.507_764_050_037_85) % 360.0;
    let light = 45 + (index % 3) * 12;
    format!("hsl({hue:.1},65%,{light}%)")
}

pub fn svg(b: &Block, a: &Alphabet) -> String {
    let (x0, y0, w, h) = extent(b);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        w * CELL,
        h * CELL,
        w * CELL,
        h * CELL
    );
    for j in 0..h {
        for i in 0..w {
            let s = at(b, x0 + i as i32, y0 + j as i32);
            let (px, py) = (i * CELL, (h - 1 - j) * CELL);
            let _ = writeln!(
                out,
                "<rect x=\"{px}\" y=\"{py}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{}\"><title>{}</title></rect>",
                colour(s.index()),
                a.name(s)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sftkit::{BoxRegion, Symbol};

    #[test]
    fn ascii_puts_the_second_axis_up() {
        let a = Alphabet::numbered(2);
        let b = Block::new(BoxRegion::new(vec![0, 0], vec![2, 2]), vec![Symbol(0), Symbol(1), Symbol(0), Symbol(0)]);
        assert_eq!(ascii(&b, &a), "1 0\n0 0\n");
        assert!(svg(&b, &a).starts_with("<svg"));
        assert_eq!(colour(3), colour(3));
        assert_ne!(colour(0), colour(1));
    }
}

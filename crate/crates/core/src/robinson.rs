//! Robinson's aperiodic tileset (1971) as plain Wang tiles.
//!
//! Tiles are read off a large patch of the hierarchical tiling. The patch
//! of level `n + 1` is four patches of level `n` around a central row and
//! column; its center is a cross whose arrows all point out, and the row
//! and column carry arms pointing away from it. Each cross in a patch of
//! level `n` is a corner of the square joining the four crosses around the
//! center of the enclosing patch of level `n + 1`. Square sides run at a
//! quarter-tile offset toward the inside of the square and are oriented
//! from the corners toward the middle of the side.
//!
//! Edge colours:
//! * vertical edges: main arrow (`>` or `<`), marks in the upper and lower
//!   side slots (`.`, `>`, `<`), then the parity of the cell on the left;
//! * horizontal edges: main arrow (`^` or `v`), marks in the right and left
//!   side slots (`.`, `^`, `v`), then the parity of the cell below.
//!
//! The parity digits pin the small crosses to one coset of `(2Z)^2`, which
//! plays the role of Robinson's corner notches.

use std::collections::{BTreeSet, HashMap};

use crate::wang::{WangTile, WangTileset};

/// Level of the patch the tiles are read from.
pub const LEVEL: u32 = 7;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cell {
    Cross,
    West,
    East,
    South,
    North,
}

fn classify(x: i64, y: i64, level: u32) -> Cell {
    let (mut lx, mut ly) = (x, y);
    let mut n = level;
    loop {
        if n == 1 {
            return Cell::Cross;
        }
        let half = 1i64 << (n - 1);
        let c = half - 1;
        match (lx == c, ly == c) {
            (true, true) => return Cell::Cross,
            (false, true) => return if lx < c { Cell::West } else { Cell::East },
            (true, false) => return if ly < c { Cell::South } else { Cell::North },
            _ => {}
        }
        if lx > c {
            lx -= half;
        }
        if ly > c {
            ly -= half;
        }
        n -= 1;
    }
}

/// Main arrows on the west, east, south and north edges of a cell.
fn mains(c: Cell) -> [char; 4] {
    match c {
        Cell::Cross => ['<', '>', 'v', '^'],
        Cell::West => ['<', '<', '^', 'v'],
        Cell::East => ['>', '>', '^', 'v'],
        Cell::South => ['>', '<', 'v', 'v'],
        Cell::North => ['>', '<', '^', '^'],
    }
}

/// Side marks keyed by (cell, slot); a vertical edge belongs to the cell on
/// its left, a horizontal edge to the cell below it. Slots: 0 upper/right,
/// 1 lower/left.
#[derive(Default)]
struct Marks {
    vert: HashMap<(i64, i64, u8), char>,
    horiz: HashMap<(i64, i64, u8), char>,
}

impl Marks {
    fn put(map: &mut HashMap<(i64, i64, u8), char>, key: (i64, i64, u8), c: char) {
        if let Some(old) = map.insert(key, c) {
            panic!("side slot {key:?} used twice ({old} and {c})");
        }
    }

    fn draw(&mut self, level: u32) {
        for n in 1..level {
            let step = 1i64 << (n + 1);
            let count = (1i64 << level) / step;
            let h = (1i64 << (n - 1)) - 1;
            let side = 1i64 << n;
            for i in 0..count {
                for j in 0..count {
                    let (ox, oy) = (i * step, j * step);
                    let (x0, y0) = (ox + h, oy + h);
                    let (x1, y1) = (x0 + side, y0 + side);
                    let (xm, ym) = (ox + side - 1, oy + side - 1);
                    for x in x0..x1 {
                        let c = if x < xm { '>' } else { '<' };
                        Self::put(&mut self.vert, (x, y0, 0), c);
                        Self::put(&mut self.vert, (x, y1, 1), c);
                    }
                    for y in y0..y1 {
                        let c = if y < ym { '^' } else { 'v' };
                        Self::put(&mut self.horiz, (x0, y, 0), c);
                        Self::put(&mut self.horiz, (x1, y, 1), c);
                    }
                }
            }
        }
    }

    fn get(map: &HashMap<(i64, i64, u8), char>, x: i64, y: i64, slot: u8) -> char {
        *map.get(&(x, y, slot)).unwrap_or(&'.')
    }
}

fn parity(x: i64, y: i64) -> String {
    format!("{}{}", x.rem_euclid(2), y.rem_euclid(2))
}

/// The tiles occurring in the patch of the given level, outside its central
/// row and column.
pub fn tiles_of_patch(level: u32) -> Vec<WangTile> {
    let size = (1i64 << level) - 1;
    let mid = (size - 1) / 2;
    let mut marks = Marks::default();
    marks.draw(level);
    let main = |x: i64, y: i64| -> [char; 4] {
        if x < 0 || y < 0 || x >= size || y >= size {
            ['<', '>', 'v', '^']
        } else {
            mains(classify(x, y, level))
        }
    };
    let vert = |x: i64, y: i64| -> String {
        let (l, r) = (main(x, y)[1], main(x + 1, y)[0]);
        let inside = x >= 0 && x + 1 < size;
        assert!(!inside || l == r, "main arrows disagree right of ({x},{y})");
        let m = if x >= 0 { l } else { r };
        format!("{m}{}{}{}", Marks::get(&marks.vert, x, y, 0), Marks::get(&marks.vert, x, y, 1), parity(x, y))
    };
    let horiz = |x: i64, y: i64| -> String {
        let (b, t) = (main(x, y)[3], main(x, y + 1)[2]);
        let inside = y >= 0 && y + 1 < size;
        assert!(!inside || b == t, "main arrows disagree above ({x},{y})");
        let m = if y >= 0 { b } else { t };
        format!("{m}{}{}{}", Marks::get(&marks.horiz, x, y, 0), Marks::get(&marks.horiz, x, y, 1), parity(x, y))
    };
    let mut set = BTreeSet::new();
    for x in 0..size {
        for y in 0..size {
            if x == mid || y == mid {
                continue;
            }
            set.insert((horiz(x, y), vert(x, y), horiz(x, y - 1), vert(x - 1, y)));
        }
    }
    set.into_iter().map(|(n, e, s, w)| WangTile::new(&n, &e, &s, &w)).collect()
}

pub fn robinson_tileset() -> WangTileset {
    WangTileset::new(tiles_of_patch(LEVEL)).expect("generated tiles are distinct")
}

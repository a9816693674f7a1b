//! Boxes, centered blocks and periodic configurations.

use crate::alphabet::Symbol;
use crate::pattern::Pattern;

/// An integer vector in `Z^d`.
pub type Point = Vec<i32>;

/// An axis-aligned box `lo + [0, size)` in `Z^d`. Cells are indexed in
/// lexicographic coordinate order, the first axis varying slowest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxRegion {
    pub lo: Point,
    pub size: Vec<usize>,
}

impl BoxRegion {
    pub fn new(lo: Point, size: Vec<usize>) -> Self {
        assert_eq!(lo.len(), size.len());
        BoxRegion { lo, size }
    }

    /// The centered cube `B_r = [-r, r]^d`.
    pub fn cube(d: usize, r: usize) -> Self {
        BoxRegion { lo: vec![-(r as i32); d], size: vec![2 * r + 1; d] }
    }

    /// The corner box `[0, n)^d`.
    pub fn corner(d: usize, n: usize) -> Self {
        BoxRegion { lo: vec![0; d], size: vec![n; d] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.size.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, p: &[i32]) -> bool {
        p.len() == self.dim()
            && p.iter().zip(&self.lo).zip(&self.size).all(|((&x, &l), &s)| x >= l && ((x - l) as i64) < s as i64)
    }

    pub fn index(&self, p: &[i32]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for i in 0..self.dim() {
            idx = idx * self.size[i] + (p[i] - self.lo[i]) as usize;
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Point {
        let d = self.dim();
        let mut p = vec![0; d];
        for i in (0..d).rev() {
            p[i] = self.lo[i] + (idx % self.size[i]) as i32;
            idx /= self.size[i];
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Highest coordinate along each axis (inclusive).
    pub fn hi(&self) -> Point {
        self.lo.iter().zip(&self.size).map(|(&l, &s)| l + s as i32 - 1).collect()
    }

    /// Shrinks the box by `r` on every side.
    pub fn erode(&self, r: usize) -> Option<BoxRegion> {
        if self.size.iter().any(|&s| s < 2 * r + 1) {
            return None;
        }
        Some(BoxRegion {
            lo: self.lo.iter().map(|&l| l + r as i32).collect(),
            size: self.size.iter().map(|&s| s - 2 * r).collect(),
        })
    }

    /// Radius of a centered cube, if this box is one.
    pub fn cube_radius(&self) -> Option<usize> {
        let r = -self.lo.first().copied().unwrap_or(0);
        if r < 0 {
            return None;
        }
        let r = r as usize;
        (*self == BoxRegion::cube(self.dim(), r)).then_some(r)
    }
}

/// A pattern whose support is a full box, stored densely.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    region: BoxRegion,
    cells: Vec<Symbol>,
}

impl Block {
    pub fn new(region: BoxRegion, cells: Vec<Symbol>) -> Self {
        assert_eq!(region.len(), cells.len(), "cell count must match the region");
        Block { region, cells }
    }

    pub fn cube(d: usize, r: usize, cells: Vec<Symbol>) -> Self {
        Block::new(BoxRegion::cube(d, r), cells)
    }

    pub fn uniform(region: BoxRegion, s: Symbol) -> Self {
        let n = region.len();
        Block { region, cells: vec![s; n] }
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn get(&self, p: &[i32]) -> Option<Symbol> {
        self.region.index(p).map(|i| self.cells[i])
    }

    /// Restriction to a sub-box; `None` if the box is not contained.
    pub fn restrict(&self, sub: &BoxRegion) -> Option<Block> {
        let mut cells = Vec::with_capacity(sub.len());
        for p in sub.points() {
            cells.push(self.get(&p)?);
        }
        Some(Block::new(sub.clone(), cells))
    }

    /// The centered sub-cube of radius `r`.
    pub fn center(&self, r: usize) -> Option<Block> {
        self.restrict(&BoxRegion::cube(self.dim(), r))
    }

    pub fn to_pattern(&self) -> Pattern {
        let mut p = Pattern::new(self.dim());
        for (i, &s) in self.cells.iter().enumerate() {
            p.insert(self.region.point(i), s);
        }
        p
    }
}

/// A configuration periodic along every axis, given by its values on the
/// fundamental domain `[0, periods)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicConfig {
    periods: Vec<usize>,
    cells: Vec<Symbol>,
}

impl PeriodicConfig {
    pub fn new(periods: Vec<usize>, cells: Vec<Symbol>) -> Self {
        assert!(periods.iter().all(|&p| p >= 1), "periods must be positive");
        assert_eq!(periods.iter().product::<usize>(), cells.len());
        PeriodicConfig { periods, cells }
    }

    pub fn uniform(d: usize, s: Symbol) -> Self {
        PeriodicConfig { periods: vec![1; d], cells: vec![s] }
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn domain(&self) -> BoxRegion {
        BoxRegion::new(vec![0; self.dim()], self.periods.clone())
    }

    pub fn get(&self, p: &[i32]) -> Symbol {
        let mut idx = 0usize;
        for i in 0..self.periods.len() {
            let m = p[i].rem_euclid(self.periods[i] as i32) as usize;
            idx = idx * self.periods[i] + m;
        }
        self.cells[idx]
    }

    /// The configuration read on an arbitrary box.
    pub fn block(&self, region: &BoxRegion) -> Block {
        Block::new(region.clone(), region.points().map(|p| self.get(&p)).collect())
    }
}

/// The points of `B_r` in lexicographic order.
pub fn cube_offsets(d: usize, r: usize) -> Vec<Point> {
    BoxRegion::cube(d, r).points().collect()
}

//! Finite patterns: partial colorings of `Z^d` with finite support.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Result, SftError};
use crate::geom::{Block, BoxRegion, Point};

/// A finite map from points of `Z^d` to symbols. Cells outside the support
/// are absent, never defaulted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    dim: usize,
    cells: BTreeMap<Point, Symbol>,
}

impl Pattern {
    pub fn new(dim: usize) -> Self {
        Pattern { dim, cells: BTreeMap::new() }
    }

    pub fn from_cells<I: IntoIterator<Item = (Point, Symbol)>>(dim: usize, cells: I) -> Result<Self> {
        let mut p = Pattern::new(dim);
        for (pt, s) in cells {
            if pt.len() != dim {
                return Err(SftError::DimensionMismatch { expected: dim, found: pt.len() });
            }
            p.cells.insert(pt, s);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn insert(&mut self, p: Point, s: Symbol) -> Option<Symbol> {
        assert_eq!(p.len(), self.dim);
        self.cells.insert(p, s)
    }

    pub fn get(&self, p: &[i32]) -> Option<Symbol> {
        self.cells.get(p).copied()
    }

    /// Cells in lexicographic coordinate order.
    pub fn iter(&self) -> impl Iterator<Item = (&Point, Symbol)> {
        self.cells.iter().map(|(p, &s)| (p, s))
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.cells.keys()
    }

    pub fn translate(&self, v: &[i32]) -> Pattern {
        Pattern {
            dim: self.dim,
            cells: self
                .cells
                .iter()
                .map(|(p, &s)| (p.iter().zip(v).map(|(a, b)| a + b).collect(), s))
                .collect(),
        }
    }

    /// Smallest box containing the support.
    pub fn bounding_box(&self) -> Option<BoxRegion> {
        let first = self.cells.keys().next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in self.cells.keys() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let size = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        Some(BoxRegion::new(lo, size))
    }

    /// Least `r` with support inside `B_r`.
    pub fn radius(&self) -> usize {
        self.cells.keys().flat_map(|p| p.iter().map(|x| x.unsigned_abs() as usize)).max().unwrap_or(0)
    }

    /// Densifies the pattern if its support is exactly `region`.
    pub fn to_block(&self, region: &BoxRegion) -> Option<Block> {
        if self.cells.len() != region.len() {
            return None;
        }
        let cells: Option<Vec<Symbol>> = region.points().map(|p| self.get(&p)).collect();
        cells.map(|c| Block::new(region.clone(), c))
    }

    /// Whether `self` is contained in `other` (same values on the support).
    pub fn is_sub_pattern_of(&self, other: &Pattern) -> bool {
        self.cells.iter().all(|(p, s)| other.cells.get(p) == Some(s))
    }

    pub fn check_alphabet(&self, a: &Alphabet) -> Result<()> {
        self.cells.values().try_for_each(|&s| a.check(s))
    }

    /// Renders as `@(x,y)=sym;@(x,y)=sym`, cells in canonical order.
    pub fn to_syntax(&self, a: &Alphabet) -> String {
        let mut out = String::new();
        for (i, (p, s)) in self.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str("@(");
            for (j, x) in p.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&x.to_string());
            }
            out.push_str(")=");
            out.push_str(a.name(s));
        }
        out
    }

    /// Parses the syntax of [`Pattern::to_syntax`]. An empty string is the empty pattern.
    pub fn parse(text: &str, a: &Alphabet, dim: usize) -> Result<Pattern> {
        let mut p = Pattern::new(dim);
        let text = text.trim();
        if text.is_empty() {
            return Ok(p);
        }
        for cell in text.split(';') {
            let cell = cell.trim();
            let bad = || SftError::InvalidArgument(format!("malformed cell {cell:?}"));
            let rest = cell.strip_prefix("@(").ok_or_else(bad)?;
            let (coords, sym) = rest.split_once(")=").ok_or_else(bad)?;
            let pt: Point = coords
                .split(',')
                .map(|c| c.trim().parse::<i32>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if pt.len() != dim {
                return Err(SftError::DimensionMismatch { expected: dim, found: pt.len() });
            }
            let s = a.symbol(sym.trim())?;
            if p.insert(pt, s).is_some() {
                return Err(SftError::InvalidArgument(format!("cell repeated in {cell:?}")));
            }
        }
        Ok(p)
    }
}

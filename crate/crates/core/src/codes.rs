//! Sliding block codes: local rules on `B_r` windows and their global maps.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Result, SftError};
use crate::geom::{Block, BoxRegion, PeriodicConfig, Point};
use crate::pattern::Pattern;
use crate::sft::SftSpec;

/// Explicit window table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRule {
    pub entries: BTreeMap<Vec<Symbol>, Symbol>,
    /// Value on windows missing from the table; `None` makes them a rule-domain error.
    pub default: Option<Symbol>,
}

/// The error-tracking wrapper: symbol `star_in` of the source and `star_out`
/// of the target are the extra symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct StarRule {
    pub inner: SlidingBlockCode,
    pub guard: SftSpec,
    pub star_in: Symbol,
    pub star_out: Symbol,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    Table(TableRule),
    /// Reads the cell at `offset` and maps it through `map`.
    Projection { offset: Point, map: Vec<Symbol> },
    /// Applied first to last.
    Compose(Vec<SlidingBlockCode>),
    Star(Box<StarRule>),
}

/// A local rule from `B_radius` windows over `source` to `target` symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct SlidingBlockCode {
    source: Alphabet,
    target: Alphabet,
    dim: usize,
    radius: usize,
    rule: Rule,
}

fn window_len(dim: usize, r: usize) -> usize {
    (2 * r + 1).pow(dim as u32)
}

fn show(a: &Alphabet, w: &[Symbol]) -> String {
    w.iter().map(|&s| if a.contains(s) { a.name(s).to_string() } else { format!("#{}", s.0) }).collect::<Vec<_>>().join(" ")
}

impl SlidingBlockCode {
    pub fn table(
        source: Alphabet,
        target: Alphabet,
        dim: usize,
        radius: usize,
        entries: BTreeMap<Vec<Symbol>, Symbol>,
        default: Option<Symbol>,
    ) -> Result<Self> {
        let len = window_len(dim, radius);
        for (w, &v) in &entries {
            if w.len() != len {
                return Err(SftError::InvalidArgument(format!("window of length {} for radius {radius}", w.len())));
            }
            w.iter().try_for_each(|&s| source.check(s))?;
            target.check(v)?;
        }
        if let Some(d) = default {
            target.check(d)?;
        }
        Ok(SlidingBlockCode { source, target, dim, radius, rule: Rule::Table(TableRule { entries, default }) })
    }

    /// A table code that must be defined on every admissible `B_radius` block of `declared`.
    pub fn table_covering(
        declared: &SftSpec,
        target: Alphabet,
        radius: usize,
        entries: BTreeMap<Vec<Symbol>, Symbol>,
    ) -> Result<Self> {
        let code = Self::table(declared.alphabet().clone(), target, declared.dim(), radius, entries, None)?;
        if let Rule::Table(t) = &code.rule {
            for b in crate::blocks::enumerate_admissible_blocks(declared, radius) {
                if !t.entries.contains_key(b.cells()) {
                    return Err(SftError::RuleDomain(show(declared.alphabet(), b.cells())));
                }
            }
        }
        Ok(code)
    }

    pub fn projection(
        source: Alphabet,
        target: Alphabet,
        dim: usize,
        radius: usize,
        offset: Point,
        map: Vec<Symbol>,
    ) -> Result<Self> {
        if offset.len() != dim {
            return Err(SftError::DimensionMismatch { expected: dim, found: offset.len() });
        }
        if offset.iter().any(|x| x.unsigned_abs() as usize > radius) {
            return Err(SftError::InvalidArgument("projection offset outside the window".into()));
        }
        if map.len() != source.len() {
            return Err(SftError::InvalidArgument("projection map must cover the source alphabet".into()));
        }
        map.iter().try_for_each(|&s| target.check(s))?;
        Ok(SlidingBlockCode { source, target, dim, radius, rule: Rule::Projection { offset, map } })
    }

    pub fn identity(a: &Alphabet, dim: usize) -> Self {
        Self::symbol_map(a.clone(), a.clone(), dim, a.symbols().collect()).expect("identity is well formed")
    }

    /// Radius-0 code applying `map` cellwise.
    pub fn symbol_map(source: Alphabet, target: Alphabet, dim: usize, map: Vec<Symbol>) -> Result<Self> {
        Self::projection(source, target, dim, 0, vec![0; dim], map)
    }

    /// Radius-0 code sending every symbol to `s`.
    pub fn constant(source: Alphabet, target: Alphabet, dim: usize, s: Symbol) -> Result<Self> {
        let map = vec![s; source.len()];
        Self::symbol_map(source, target, dim, map)
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn kind(&self) -> &'static str {
        match self.rule {
            Rule::Table(_) => "table",
            Rule::Projection { .. } => "proj",
            Rule::Compose(_) => "compose",
            Rule::Star(_) => "star",
        }
    }

    /// Evaluates the rule on a window given in lexicographic cell order.
    pub fn eval(&self, w: &[Symbol]) -> Result<Symbol> {
        if w.len() != window_len(self.dim, self.radius) {
            return Err(SftError::InvalidArgument(format!(
                "window of length {} for a radius-{} code",
                w.len(),
                self.radius
            )));
        }
        match &self.rule {
            Rule::Table(t) => match t.entries.get(w) {
                Some(&s) => Ok(s),
                None => t.default.ok_or_else(|| SftError::RuleDomain(show(&self.source, w))),
            },
            Rule::Projection { offset, map } => {
                let idx = BoxRegion::cube(self.dim, self.radius).index(offset).expect("offset inside window");
                let s = w[idx];
                self.source.check(s).map_err(|_| SftError::RuleDomain(show(&self.source, w)))?;
                Ok(map[s.index()])
            }
            Rule::Compose(chain) => {
                let mut cur = w.to_vec();
                let mut r = self.radius;
                for c in chain {
                    cur = apply_cube(c, &cur, r)?;
                    r -= c.radius;
                }
                Ok(cur[0])
            }
            Rule::Star(st) => {
                if w.contains(&st.star_in) {
                    return Ok(st.star_out);
                }
                let blk = Block::cube(self.dim, self.radius, w.to_vec());
                if !st.guard.block_is_admissible(&blk) {
                    return Ok(st.star_out);
                }
                let inner = blk.center(st.inner.radius).expect("inner radius fits");
                st.inner.eval(inner.cells())
            }
        }
    }

    /// Output cell `z` is the rule applied to `p` on `z + B_r`; the output
    /// support is every `z` whose whole window lies in the support of `p`.
    pub fn apply_to_pattern(&self, p: &Pattern) -> Result<Pattern> {
        if p.dim() != self.dim {
            return Err(SftError::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        let offs: Vec<Point> = BoxRegion::cube(self.dim, self.radius).points().collect();
        let mut out = Pattern::new(self.dim);
        let mut w = Vec::with_capacity(offs.len());
        'cell: for z in p.support() {
            w.clear();
            for o in &offs {
                let q: Point = z.iter().zip(o).map(|(a, b)| a + b).collect();
                match p.get(&q) {
                    Some(s) => w.push(s),
                    None => continue 'cell,
                }
            }
            out.insert(z.clone(), self.eval(&w)?);
        }
        Ok(out)
    }

    /// Image of a dense block; the output box is the input box eroded by the radius.
    pub fn apply_to_block(&self, b: &Block) -> Result<Block> {
        let out_region = b
            .region()
            .erode(self.radius)
            .ok_or_else(|| SftError::InvalidArgument("block smaller than the code window".into()))?;
        let offs: Vec<Point> = BoxRegion::cube(self.dim, self.radius).points().collect();
        let mut cells = Vec::with_capacity(out_region.len());
        let mut w = Vec::with_capacity(offs.len());
        for z in out_region.points() {
            w.clear();
            for o in &offs {
                let q: Point = z.iter().zip(o).map(|(a, b)| a + b).collect();
                w.push(b.get(&q).expect("window inside block"));
            }
            cells.push(self.eval(&w)?);
        }
        Ok(Block::new(out_region, cells))
    }

    /// Image of a periodic configuration, computed with wraparound windows.
    pub fn apply_to_torus(&self, c: &PeriodicConfig) -> Result<PeriodicConfig> {
        if c.dim() != self.dim {
            return Err(SftError::DimensionMismatch { expected: self.dim, found: c.dim() });
        }
        let offs: Vec<Point> = BoxRegion::cube(self.dim, self.radius).points().collect();
        let mut cells = Vec::with_capacity(c.cells().len());
        let mut w = Vec::with_capacity(offs.len());
        for z in c.domain().points() {
            w.clear();
            for o in &offs {
                let q: Point = z.iter().zip(o).map(|(a, b)| a + b).collect();
                w.push(c.get(&q));
            }
            cells.push(self.eval(&w)?);
        }
        Ok(PeriodicConfig::new(c.periods().to_vec(), cells))
    }

    /// Materializes the rule as a table over the admissible windows of `x`.
    pub fn to_table(&self, x: &SftSpec) -> Result<SlidingBlockCode> {
        let mut entries = BTreeMap::new();
        for b in crate::blocks::enumerate_admissible_blocks(x, self.radius) {
            let v = self.eval(b.cells())?;
            entries.insert(b.cells().to_vec(), v);
        }
        Self::table(self.source.clone(), self.target.clone(), self.dim, self.radius, entries, None)
    }
}

/// Applies a code to a dense `B_n` cube given as cells; returns the `B_{n-r}` image.
pub(crate) fn apply_cube(code: &SlidingBlockCode, cells: &[Symbol], n: usize) -> Result<Vec<Symbol>> {
    let d = code.dim;
    let blk = Block::cube(d, n, cells.to_vec());
    Ok(code.apply_to_block(&blk)?.cells().to_vec())
}

/// `G` after `F`: radius `r_G + r_F`.
pub fn compose(g: &SlidingBlockCode, f: &SlidingBlockCode) -> Result<SlidingBlockCode> {
    if f.target != g.source {
        return Err(SftError::AlphabetMismatch("target of the inner code differs from source of the outer".into()));
    }
    if f.dim != g.dim {
        return Err(SftError::DimensionMismatch { expected: f.dim, found: g.dim });
    }
    let mut chain = Vec::new();
    for c in [f, g] {
        match &c.rule {
            Rule::Compose(inner) => chain.extend(inner.iter().cloned()),
            _ => chain.push(c.clone()),
        }
    }
    Ok(SlidingBlockCode {
        source: f.source.clone(),
        target: g.target.clone(),
        dim: f.dim,
        radius: f.radius + g.radius,
        rule: Rule::Compose(chain),
    })
}

/// The star-augmented code `F'` over `source + {*}` and `target + {*}`: it
/// agrees with `F` on windows containing neither a star nor a forbidden
/// pattern of `x`, and outputs the star otherwise. Radius `max(r_F, r_X)`.
pub fn star_augment(f: &SlidingBlockCode, x: &SftSpec) -> Result<SlidingBlockCode> {
    if f.source != *x.alphabet() {
        return Err(SftError::AlphabetMismatch("code source differs from the SFT alphabet".into()));
    }
    if f.dim != x.dim() {
        return Err(SftError::DimensionMismatch { expected: x.dim(), found: f.dim });
    }
    let source = f.source.with_extra(&f.source.fresh_name("*"))?;
    let target = f.target.with_extra(&f.target.fresh_name("*"))?;
    let star_in = Symbol::from(f.source.len());
    let star_out = Symbol::from(f.target.len());
    Ok(SlidingBlockCode {
        source,
        target,
        dim: f.dim,
        radius: f.radius.max(x.radius()),
        rule: Rule::Star(Box::new(StarRule { inner: f.clone(), guard: x.clone(), star_in, star_out })),
    })
}

impl SlidingBlockCode {
    /// Rebuilds a code from parsed parts; used by the file reader.
    pub(crate) fn from_parts(source: Alphabet, target: Alphabet, dim: usize, radius: usize, rule: Rule) -> Self {
        SlidingBlockCode { source, target, dim, radius, rule }
    }
}

//! SFT specifications: an alphabet, a dimension and a finite forbidden set.
//!
//! Forbidden patterns are grouped by shape. A shape is the sorted list of
//! offsets of a pattern's support translated so that its lexicographically
//! least cell sits at the origin; each group stores the set of forbidden
//! value tuples for its shape.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Result, SftError};
use crate::geom::{Block, Point};
use crate::pattern::Pattern;

const DENSE_LIMIT: u128 = 1 << 26;

#[derive(Clone)]
pub(crate) enum TupleSet {
    /// Bit `i` set iff the tuple with lexicographic rank `i` is forbidden.
    Dense(FixedBitSet),
    Sparse(BTreeSet<Vec<Symbol>>),
    /// Everything except the listed tuples is forbidden.
    Allowed(BTreeSet<Vec<Symbol>>),
}

/// All forbidden tuples sharing one shape.
pub struct ShapeGroup {
    offsets: Vec<Point>,
    k: usize,
    set: TupleSet,
    pair_support: OnceLock<PairSupport>,
}

/// For a two-cell shape: `fwd[a]` holds the `b` with `(a, b)` allowed and
/// `bwd[b]` the `a` with `(a, b)` allowed.
pub(crate) struct PairSupport {
    pub fwd: Vec<FixedBitSet>,
    pub bwd: Vec<FixedBitSet>,
}

impl Clone for ShapeGroup {
    fn clone(&self) -> Self {
        ShapeGroup { offsets: self.offsets.clone(), k: self.k, set: self.set.clone(), pair_support: OnceLock::new() }
    }
}

impl fmt::Debug for ShapeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShapeGroup").field("offsets", &self.offsets).field("count", &self.count()).finish()
    }
}

fn rank(t: &[Symbol], k: usize) -> usize {
    t.iter().fold(0usize, |acc, s| acc * k + s.index())
}

fn unrank(mut i: usize, k: usize, len: usize) -> Vec<Symbol> {
    let mut t = vec![Symbol(0); len];
    for j in (0..len).rev() {
        t[j] = Symbol::from(i % k);
        i /= k;
    }
    t
}

fn space(k: usize, len: usize) -> u128 {
    let mut n: u128 = 1;
    for _ in 0..len {
        n = n.saturating_mul(k as u128);
    }
    n
}

impl ShapeGroup {
    fn from_tuples(offsets: Vec<Point>, k: usize, tuples: impl IntoIterator<Item = Vec<Symbol>>) -> Self {
        let len = offsets.len();
        let n = space(k, len);
        let set = if n <= DENSE_LIMIT {
            let mut bits = FixedBitSet::with_capacity(n as usize);
            for t in tuples {
                bits.insert(rank(&t, k));
            }
            TupleSet::Dense(bits)
        } else {
            TupleSet::Sparse(tuples.into_iter().collect())
        };
        ShapeGroup { offsets, k, set, pair_support: OnceLock::new() }
    }

    /// A group holding every tuple accepted by `bad`; `fallback` lists the same
    /// tuples when the tuple space is too large to scan.
    pub(crate) fn from_predicate(
        offsets: Vec<Point>,
        k: usize,
        bad: impl Fn(&[Symbol]) -> bool,
        fallback: impl FnOnce() -> Vec<Vec<Symbol>>,
    ) -> Self {
        let len = offsets.len();
        let n = space(k, len);
        if n > DENSE_LIMIT {
            return ShapeGroup::from_tuples(offsets, k, fallback());
        }
        let mut bits = FixedBitSet::with_capacity(n as usize);
        let mut t = vec![Symbol(0); len];
        for i in 0..n as usize {
            if bad(&t) {
                bits.insert(i);
            }
            for j in (0..len).rev() {
                t[j].0 += 1;
                if (t[j].0 as usize) < k {
                    break;
                }
                t[j] = Symbol(0);
            }
        }
        ShapeGroup { offsets, k, set: TupleSet::Dense(bits), pair_support: OnceLock::new() }
    }

    /// A group forbidding everything except `allowed`.
    pub(crate) fn complement_of(offsets: Vec<Point>, k: usize, allowed: impl IntoIterator<Item = Vec<Symbol>>) -> Self {
        let len = offsets.len();
        let n = space(k, len);
        let set = if n <= DENSE_LIMIT {
            let mut bits = FixedBitSet::with_capacity(n as usize);
            bits.insert_range(..);
            for t in allowed {
                bits.set(rank(&t, k), false);
            }
            TupleSet::Dense(bits)
        } else {
            TupleSet::Allowed(allowed.into_iter().collect())
        };
        ShapeGroup { offsets, k, set, pair_support: OnceLock::new() }
    }

    /// Offsets of the shape; the first one is the origin.
    pub fn offsets(&self) -> &[Point] {
        &self.offsets
    }

    pub fn arity(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_forbidden(&self, t: &[Symbol]) -> bool {
        match &self.set {
            TupleSet::Dense(b) => b.contains(rank(t, self.k)),
            TupleSet::Sparse(s) => s.contains(t),
            TupleSet::Allowed(s) => !s.contains(t),
        }
    }

    /// Number of forbidden tuples (saturating).
    pub fn count(&self) -> u128 {
        match &self.set {
            TupleSet::Dense(b) => b.count_ones(..) as u128,
            TupleSet::Sparse(s) => s.len() as u128,
            TupleSet::Allowed(s) => space(self.k, self.arity()) - s.len() as u128,
        }
    }

    /// Forbidden tuples in lexicographic order.
    pub fn tuples(&self) -> Box<dyn Iterator<Item = Vec<Symbol>> + '_> {
        let (k, len) = (self.k, self.arity());
        match &self.set {
            TupleSet::Dense(b) => Box::new(b.ones().map(move |i| unrank(i, k, len))),
            TupleSet::Sparse(s) => Box::new(s.iter().cloned()),
            TupleSet::Allowed(s) => {
                let total = space(k, len);
                Box::new((0..total).map(move |i| unrank(i as usize, k, len)).filter(move |t| !s.contains(t)))
            }
        }
    }

    /// Number of tuples on the shape (saturating).
    pub fn space(&self) -> u128 {
        space(self.k, self.arity())
    }

    /// Allowed tuples in lexicographic order.
    pub fn allowed(&self) -> Box<dyn Iterator<Item = Vec<Symbol>> + '_> {
        let (k, len) = (self.k, self.arity());
        match &self.set {
            TupleSet::Allowed(s) => Box::new(s.iter().cloned()),
            _ => Box::new((0..space(k, len)).map(move |i| unrank(i as usize, k, len)).filter(move |t| !self.is_forbidden(t))),
        }
    }

    /// Largest extent of the shape along any axis.
    pub fn extent(&self) -> usize {
        let d = self.offsets[0].len();
        (0..d)
            .map(|i| {
                let lo = self.offsets.iter().map(|p| p[i]).min().unwrap();
                let hi = self.offsets.iter().map(|p| p[i]).max().unwrap();
                (hi - lo) as usize
            })
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn pair_support(&self) -> &PairSupport {
        assert_eq!(self.arity(), 2);
        self.pair_support.get_or_init(|| {
            let k = self.k;
            let mut fwd = vec![FixedBitSet::with_capacity(k); k];
            let mut bwd = vec![FixedBitSet::with_capacity(k); k];
            for a in 0..k {
                for b in 0..k {
                    if !self.is_forbidden(&[Symbol::from(a), Symbol::from(b)]) {
                        fwd[a].insert(b);
                        bwd[b].insert(a);
                    }
                }
            }
            PairSupport { fwd, bwd }
        })
    }

    fn same_set(&self, other: &ShapeGroup) -> bool {
        if self.offsets != other.offsets || self.k != other.k || self.count() != other.count() {
            return false;
        }
        match (&self.set, &other.set) {
            (TupleSet::Dense(a), TupleSet::Dense(b)) => a == b,
            (TupleSet::Sparse(a), TupleSet::Sparse(b)) => a == b,
            (TupleSet::Allowed(a), TupleSet::Allowed(b)) => a == b,
            (TupleSet::Allowed(a), _) => a.iter().all(|t| !other.is_forbidden(t)),
            (_, TupleSet::Allowed(b)) => b.iter().all(|t| !self.is_forbidden(t)),
            (TupleSet::Sparse(a), _) => a.iter().all(|t| other.is_forbidden(t)),
            (_, TupleSet::Sparse(b)) => b.iter().all(|t| self.is_forbidden(t)),
        }
    }
}

/// Splits a pattern into its shape (origin-anchored offsets) and value tuple,
/// returning also the anchor that was subtracted.
pub(crate) fn shape_of(p: &Pattern) -> (Vec<Point>, Vec<Symbol>, Point) {
    let anchor = p.support().next().expect("nonempty pattern").clone();
    let mut offsets = Vec::with_capacity(p.len());
    let mut values = Vec::with_capacity(p.len());
    for (pt, s) in p.iter() {
        offsets.push(pt.iter().zip(&anchor).map(|(a, b)| a - b).collect());
        values.push(s);
    }
    (offsets, values, anchor)
}

/// An SFT: all configurations over `alphabet` avoiding every forbidden pattern.
#[derive(Clone)]
pub struct SftSpec {
    alphabet: Alphabet,
    dim: usize,
    groups: Vec<Arc<ShapeGroup>>,
}

impl fmt::Debug for SftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SftSpec")
            .field("alphabet", &self.alphabet)
            .field("dim", &self.dim)
            .field("groups", &self.groups)
            .finish()
    }
}

impl PartialEq for SftSpec {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.dim == other.dim
            && self.groups.len() == other.groups.len()
            && self.groups.iter().zip(&other.groups).all(|(a, b)| a.same_set(b))
    }
}

/// Incremental construction of an [`SftSpec`].
pub struct SftBuilder {
    alphabet: Alphabet,
    dim: usize,
    shapes: BTreeMap<Vec<Point>, Vec<Vec<Symbol>>>,
    extra: Vec<ShapeGroup>,
}

impl SftBuilder {
    pub fn new(alphabet: Alphabet, dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        SftBuilder { alphabet, dim, shapes: BTreeMap::new(), extra: Vec::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbid(&mut self, p: &Pattern) -> Result<&mut Self> {
        if p.dim() != self.dim {
            return Err(SftError::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        if p.is_empty() {
            return Err(SftError::EmptyForbiddenPattern);
        }
        p.check_alphabet(&self.alphabet)?;
        let (offsets, values, _) = shape_of(p);
        self.shapes.entry(offsets).or_default().push(values);
        Ok(self)
    }

    /// Forbids the tuple `values` placed on `offsets`, which must be sorted
    /// lexicographically with the first entry at the origin.
    pub(crate) fn forbid_tuple(&mut self, offsets: &[Point], values: Vec<Symbol>) {
        debug_assert!(offsets[0].iter().all(|&x| x == 0));
        debug_assert!(offsets.windows(2).all(|w| w[0] < w[1]));
        if let Some(v) = self.shapes.get_mut(offsets) {
            v.push(values);
        } else {
            self.shapes.insert(offsets.to_vec(), vec![values]);
        }
    }

    /// Forbids `(a at 0, b at e)` for every pair with `bad(a, b)`; `e` must be
    /// lexicographically positive.
    pub(crate) fn forbid_pairs(&mut self, e: Point, bad: impl Fn(usize, usize) -> bool) {
        let k = self.alphabet.len();
        let offsets = vec![vec![0; self.dim], e];
        for a in 0..k {
            for b in 0..k {
                if bad(a, b) {
                    self.forbid_tuple(&offsets, vec![Symbol::from(a), Symbol::from(b)]);
                }
            }
        }
    }

    pub(crate) fn push_group(&mut self, g: ShapeGroup) {
        self.extra.push(g);
    }

    pub fn build(self) -> SftSpec {
        let k = self.alphabet.len();
        let mut groups: Vec<ShapeGroup> = self
            .shapes
            .into_iter()
            .map(|(offsets, tuples)| ShapeGroup::from_tuples(offsets, k, tuples))
            .collect();
        groups.extend(self.extra);
        groups.sort_by(|a, b| a.offsets.cmp(&b.offsets));
        groups.retain(|g| g.count() > 0);
        SftSpec { alphabet: self.alphabet, dim: self.dim, groups: groups.into_iter().map(Arc::new).collect() }
    }
}

impl SftSpec {
    pub fn new<I: IntoIterator<Item = Pattern>>(alphabet: Alphabet, dim: usize, forbidden: I) -> Result<Self> {
        if dim == 0 {
            return Err(SftError::InvalidArgument("dimension must be at least 1".into()));
        }
        let mut b = SftBuilder::new(alphabet, dim);
        for p in forbidden {
            b.forbid(&p)?;
        }
        Ok(b.build())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[Arc<ShapeGroup>] {
        &self.groups
    }

    /// Number of forbidden patterns (saturating).
    pub fn forbidden_count(&self) -> u128 {
        self.groups.iter().map(|g| g.count()).fold(0, u128::saturating_add)
    }

    /// Forbidden patterns in canonical order: by shape, then by values.
    pub fn forbidden_patterns(&self) -> impl Iterator<Item = Pattern> + '_ {
        self.groups.iter().flat_map(move |g| {
            g.tuples().map(move |t| {
                let mut p = Pattern::new(self.dim);
                for (o, s) in g.offsets.iter().zip(t) {
                    p.insert(o.clone(), s);
                }
                p
            })
        })
    }

    /// Least `r` such that every forbidden pattern fits in some translate of `B_r`.
    pub fn radius(&self) -> usize {
        self.groups.iter().map(|g| g.extent().div_ceil(2)).max().unwrap_or(0)
    }

    pub fn check_pattern(&self, p: &Pattern) -> Result<()> {
        if p.dim() != self.dim {
            return Err(SftError::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        p.check_alphabet(&self.alphabet)
    }

    /// True iff no translate of a forbidden pattern fits inside `p` and matches it.
    pub fn is_admissible(&self, p: &Pattern) -> Result<bool> {
        self.check_pattern(p)?;
        let mut vals = Vec::new();
        for g in &self.groups {
            'anchor: for anchor in p.support() {
                vals.clear();
                for o in &g.offsets {
                    let q: Point = anchor.iter().zip(o).map(|(a, b)| a + b).collect();
                    match p.get(&q) {
                        Some(s) => vals.push(s),
                        None => continue 'anchor,
                    }
                }
                if g.is_forbidden(&vals) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Admissibility of a dense block; symbols are assumed valid.
    pub fn block_is_admissible(&self, b: &Block) -> bool {
        self.first_violation(b).is_none()
    }

    /// The first forbidden occurrence in a block, as (group index, anchor).
    pub fn first_violation(&self, b: &Block) -> Option<(usize, Point)> {
        let region = b.region();
        let mut vals = Vec::new();
        for (gi, g) in self.groups.iter().enumerate() {
            'anchor: for anchor in region.points() {
                vals.clear();
                for o in &g.offsets {
                    let q: Point = anchor.iter().zip(o).map(|(a, b)| a + b).collect();
                    match b.get(&q) {
                        Some(s) => vals.push(s),
                        None => continue 'anchor,
                    }
                }
                if g.is_forbidden(&vals) {
                    return Some((gi, anchor));
                }
            }
        }
        None
    }

    pub(crate) fn from_parts(alphabet: Alphabet, dim: usize, groups: Vec<ShapeGroup>) -> SftSpec {
        let mut b = SftBuilder::new(alphabet, dim);
        for g in groups {
            b.push_group(g);
        }
        b.build()
    }
}

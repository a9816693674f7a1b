//! Block enumeration, periodic witnesses and bounded extensibility.

use crate::alphabet::Symbol;
use crate::error::{Result, SftError};
use crate::geom::{Block, BoxRegion, PeriodicConfig, Point};
use crate::pattern::Pattern;
use crate::search::{Grid, Search};
use crate::sft::{ShapeGroup, SftSpec};
use crate::verdict::{Budget, Verdict};

/// Admissible blocks on a fixed box, in lexicographic order.
pub struct BlockIter<'a> {
    region: BoxRegion,
    search: Search<'a>,
}

impl Iterator for BlockIter<'_> {
    type Item = Block;

    fn next(&mut self) -> Option<Block> {
        self.search.next().map(|cells| Block::new(self.region.clone(), cells))
    }
}

/// The admissible blocks with support `B_n`, each once, ordered
/// lexicographically by cell values with cells in coordinate order.
pub fn enumerate_admissible_blocks(x: &SftSpec, n: usize) -> BlockIter<'_> {
    admissible_blocks_in(x, BoxRegion::cube(x.dim(), n))
}

/// The admissible blocks on an arbitrary box.
pub fn admissible_blocks_in(x: &SftSpec, region: BoxRegion) -> BlockIter<'_> {
    let grid = Grid::boxed(region.clone());
    let search = grid.problem(x).into_search(None, true);
    BlockIter { region, search }
}

/// The first admissible block on `region` agreeing with `pins`, if any.
pub fn first_block_with(x: &SftSpec, region: &BoxRegion, pins: &Pattern) -> Option<Block> {
    let grid = Grid::boxed(region.clone());
    let mut pr = grid.problem(x);
    for (p, s) in pins.iter() {
        pr.pin(grid.var_at(p)?, s);
    }
    let sol = pr.first_solution(None)?;
    Some(Block::new(region.clone(), grid.cells(&sol)))
}

/// Period vectors in `[1, budget]^d`, by increasing area and then lexicographically.
pub fn period_vectors(d: usize, budget: usize) -> Vec<Vec<usize>> {
    if budget == 0 {
        return Vec::new();
    }
    let region = BoxRegion::new(vec![1; d], vec![budget; d]);
    let mut out: Vec<Vec<usize>> = region.points().map(|p| p.iter().map(|&x| x as usize).collect()).collect();
    out.sort_by_key(|p| (p.iter().product::<usize>(), p.clone()));
    out
}

/// The first valid configuration with the given periods that contains
/// `pins` (read modulo the periods).
pub fn periodic_with(x: &SftSpec, periods: &[usize], pins: &Pattern) -> Option<PeriodicConfig> {
    let grid = Grid::torus(periods.to_vec());
    let mut pr = grid.problem(x);
    let mut fixed: Vec<Option<Symbol>> = vec![None; grid.len()];
    for (p, s) in pins.iter() {
        let v = grid.var_at(p)?;
        match fixed[v] {
            Some(t) if t != s => return None,
            _ => fixed[v] = Some(s),
        }
        pr.pin(v, s);
    }
    let sol = pr.first_solution(None)?;
    Some(PeriodicConfig::new(periods.to_vec(), grid.cells(&sol)))
}

/// Searches tori with every period at most `budget`, smallest area first.
pub fn find_periodic(x: &SftSpec, budget: usize, pins: &Pattern) -> Option<PeriodicConfig> {
    period_vectors(x.dim(), budget).into_iter().find_map(|per| periodic_with(x, &per, pins))
}

/// Direct check that a periodic configuration avoids every forbidden pattern.
pub fn periodic_is_valid(x: &SftSpec, c: &PeriodicConfig) -> bool {
    let mut vals = Vec::new();
    for anchor in c.domain().points() {
        for g in x.groups() {
            vals.clear();
            for o in g.offsets() {
                let q: Point = anchor.iter().zip(o).map(|(a, b)| a + b).collect();
                vals.push(c.get(&q));
            }
            if g.is_forbidden(&vals) {
                return false;
            }
        }
    }
    true
}

/// Why a pattern is not extensible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonExtensible {
    /// The pattern itself contains a forbidden pattern.
    Inadmissible,
    /// No admissible `B_radius` block contains the pattern.
    NoBlock { radius: usize },
}

/// Bounded extensibility: `Refuted` if the pattern is inadmissible or no
/// admissible block of some radius up to `r_max` contains it; `Proven` with a
/// periodic configuration (periods up to `period_budget`) containing it.
pub fn check_extensibility(
    p: &Pattern,
    x: &SftSpec,
    r_max: usize,
    period_budget: usize,
) -> Result<Verdict<PeriodicConfig, NonExtensible>> {
    if !x.is_admissible(p)? {
        return Ok(Verdict::Refuted(NonExtensible::Inadmissible));
    }
    for r in p.radius()..=r_max {
        if first_block_with(x, &BoxRegion::cube(x.dim(), r), p).is_none() {
            return Ok(Verdict::Refuted(NonExtensible::NoBlock { radius: r }));
        }
    }
    if let Some(c) = find_periodic(x, period_budget, p) {
        return Ok(Verdict::Proven(c));
    }
    Ok(Verdict::Unknown(Budget::new().with("radius", r_max).with("period-budget", period_budget)))
}

/// An equivalent spec whose forbidden set is exactly the inadmissible `B_r` blocks.
pub fn normalize_to_radius(x: &SftSpec, r: usize) -> Result<SftSpec> {
    let need = x.radius();
    if r < need {
        return Err(SftError::RadiusTooSmall { requested: r, required: need });
    }
    let d = x.dim();
    let offsets: Vec<Point> = BoxRegion::new(vec![0; d], vec![2 * r + 1; d]).points().collect();
    let allowed: Vec<Vec<Symbol>> = enumerate_admissible_blocks(x, r).map(|b| b.cells().to_vec()).collect();
    let g = ShapeGroup::complement_of(offsets, x.alphabet().len(), allowed);
    Ok(SftSpec::from_parts(x.alphabet().clone(), d, vec![g]))
}

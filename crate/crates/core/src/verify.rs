//! Budgeted semi-decision procedures with sound witnesses.

use std::sync::Mutex;

pub use crate::conj_search::{search_conjugacy, search_conjugacy_with, SearchBudget, DEFAULT_NODE_LIMIT};

use rayon::prelude::*;

use crate::alphabet::Symbol;
use crate::blocks::{self, check_extensibility, enumerate_admissible_blocks, NonExtensible};
use crate::codes::{star_augment, SlidingBlockCode};
use crate::error::{Result, SftError};
use crate::geom::{Block, BoxRegion, PeriodicConfig, Point};
use crate::pattern::Pattern;
use crate::search::{Grid, Probe};
use crate::sft::SftSpec;
use crate::verdict::{Budget, Verdict};

/// A candidate conjugacy: `forward` maps `X` to `Y`, `backward` maps back,
/// and `k` is the radius of the tested blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyCertificate {
    pub forward: SlidingBlockCode,
    pub backward: SlidingBlockCode,
    pub k: usize,
}

/// Which space a tested block came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyProof {
    pub k: usize,
    /// Distinct (center, image) combinations checked on each side.
    pub source_checks: usize,
    pub target_checks: usize,
}

/// An admissible `B_k` block whose round trip does not return its center.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyViolation {
    pub space: Space,
    pub block: Block,
    pub expected: Symbol,
    /// `None` when the round trip produced the star.
    pub got: Option<Symbol>,
}

/// Evaluates a code on probe windows; optionally insists on given outputs.
struct CodeProbe<'c> {
    code: &'c SlidingBlockCode,
    expect: Option<Vec<Symbol>>,
    err: Mutex<Option<SftError>>,
}

impl<'c> CodeProbe<'c> {
    fn new(code: &'c SlidingBlockCode, expect: Option<Vec<Symbol>>) -> Self {
        CodeProbe { code, expect, err: Mutex::new(None) }
    }

    fn take_err(&self) -> Result<()> {
        match self.err.lock().unwrap().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl Probe for CodeProbe<'_> {
    fn eval(&self, id: usize, window: &[Symbol]) -> Option<u32> {
        match self.code.eval(window) {
            Ok(s) => match &self.expect {
                Some(e) if e[id] != s => None,
                _ => Some(s.0),
            },
            Err(e) => {
                self.err.lock().unwrap().get_or_insert(e);
                None
            }
        }
    }
}

fn shifted(z: &[i32], offs: &[Point]) -> Vec<Point> {
    offs.iter().map(|o| z.iter().zip(o).map(|(a, b)| a + b).collect()).collect()
}

/// Registers one probe per output cell `z` in `outputs`, reading `z + B_r`.
fn add_window_probes(grid: &Grid, pr: &mut crate::search::Problem<'_>, outputs: &[Point], r: usize) {
    let offs: Vec<Point> = BoxRegion::cube(grid.region.dim(), r).points().collect();
    for z in outputs {
        let vars = shifted(z, &offs).iter().map(|q| grid.var_at(q).expect("window inside grid")).collect();
        pr.add_probe(vars);
    }
}

fn read_windows(cells: &Block, outputs: &[Point], r: usize, code: &SlidingBlockCode) -> Result<Vec<Symbol>> {
    let offs: Vec<Point> = BoxRegion::cube(cells.dim(), r).points().collect();
    outputs
        .iter()
        .map(|z| {
            let w: Vec<Symbol> = shifted(z, &offs).iter().map(|q| cells.get(q).expect("window inside block")).collect();
            code.eval(&w)
        })
        .collect()
}

/// Checks one side of the certificate: for every admissible `B_k` block `b`
/// of `a`, `second'(first'(b))` at the origin must equal `b(0)`. On admissible
/// blocks `first'` agrees with `first`, so the round trip only depends on `b`
/// restricted to `B_{r_first + r_second'}`.
fn check_side(
    a: &SftSpec,
    first: &SlidingBlockCode,
    second_star: &SlidingBlockCode,
    k: usize,
) -> Result<(usize, Option<(Block, Symbol, Option<Symbol>)>)> {
    let d = a.dim();
    let core = first.radius() + second_star.radius();
    let core_box = BoxRegion::cube(d, core);
    let outputs: Vec<Point> = BoxRegion::cube(d, second_star.radius()).points().collect();
    let star = Symbol::from(second_star.target().len() - 1);
    let grid = Grid::boxed(core_box.clone());
    let mut pr = grid.problem(a);
    add_window_probes(&grid, &mut pr, &outputs, first.radius());
    pr.mark_key(grid.var_at(&vec![0; d]).unwrap());
    let probe = CodeProbe::new(first, None);
    let round_trip = |cells: &Block| -> Result<(Symbol, Symbol, Vec<Symbol>)> {
        let image = read_windows(cells, &outputs, first.radius(), first)?;
        let back = second_star.eval(&image)?;
        Ok((cells.get(&vec![0; d]).unwrap(), back, image))
    };

    let big = BoxRegion::cube(d, k);
    let mut checks = 0usize;
    let mut stuck: Vec<(Block, Vec<Symbol>)> = Vec::new();
    let mut found = None;
    let mut err = None;
    pr.project(Some(&probe), |_, vals| {
        checks += 1;
        let cells = Block::new(core_box.clone(), grid.cells(vals));
        match round_trip(&cells) {
            Err(e) => {
                err = Some(e);
                false
            }
            Ok((center, back, image)) if back != center => {
                match blocks::first_block_with(a, &big, &cells.to_pattern()) {
                    Some(b) => {
                        found = Some((b, center, (back != star).then_some(back)));
                        false
                    }
                    None => {
                        stuck.push((cells, image));
                        true
                    }
                }
            }
            Ok(_) => true,
        }
    });
    probe.take_err()?;
    if let Some(e) = err {
        return Err(e);
    }
    if found.is_some() {
        return Ok((checks, found));
    }
    // A failing core whose witness does not extend may still be realized by
    // another core with the same center and image.
    let order_core = |p: &Point| (p.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) > core as u32, p.clone());
    for (cells, image) in stuck {
        let g = Grid::boxed(big.clone()).ordered_by(order_core);
        let mut pr = g.problem(a);
        add_window_probes(&g, &mut pr, &outputs, first.radius());
        let center = cells.get(&vec![0; d]).unwrap();
        pr.pin(g.var_at(&vec![0; d]).unwrap(), center);
        let probe = CodeProbe::new(first, Some(image.clone()));
        let sol = pr.first_solution(Some(&probe));
        probe.take_err()?;
        if let Some(sol) = sol {
            let b = Block::new(big.clone(), g.cells(&sol));
            let back = second_star.eval(&image)?;
            return Ok((checks, Some((b, center, (back != star).then_some(back)))));
        }
    }
    Ok((checks, None))
}

fn check_codes(x: &SftSpec, y: &SftSpec, f: &SlidingBlockCode, g: &SlidingBlockCode) -> Result<()> {
    let mismatch = |m: &str| Err(SftError::AlphabetMismatch(m.into()));
    if f.source() != x.alphabet() || f.target() != y.alphabet() {
        return mismatch("forward code must map the source alphabet to the target alphabet");
    }
    if g.source() != y.alphabet() || g.target() != x.alphabet() {
        return mismatch("backward code must map the target alphabet to the source alphabet");
    }
    for dim in [y.dim(), f.dim(), g.dim()] {
        if dim != x.dim() {
            return Err(SftError::DimensionMismatch { expected: x.dim(), found: dim });
        }
    }
    Ok(())
}

/// The least `k` the side condition of [`verify_conjugacy_certificate`] allows.
pub fn min_legal_k(x: &SftSpec, y: &SftSpec, forward: &SlidingBlockCode, backward: &SlidingBlockCode) -> Result<usize> {
    check_codes(x, y, forward, backward)?;
    Ok(star_augment(forward, x)?.radius() + star_augment(backward, y)?.radius() + 1)
}

/// The finite block test certifying that `forward` and `backward` are mutually
/// inverse conjugacies between `x` and `y`. Never returns `Unknown`.
pub fn verify_conjugacy_certificate(
    x: &SftSpec,
    y: &SftSpec,
    cert: &ConjugacyCertificate,
) -> Result<Verdict<ConjugacyProof, ConjugacyViolation>> {
    check_codes(x, y, &cert.forward, &cert.backward)?;
    let fs = star_augment(&cert.forward, x)?;
    let gs = star_augment(&cert.backward, y)?;
    let bound = fs.radius() + gs.radius();
    if cert.k <= bound {
        return Err(SftError::SideCondition { k: cert.k, bound });
    }
    let (source_checks, bad) = check_side(x, &cert.forward, &gs, cert.k)?;
    if let Some((block, expected, got)) = bad {
        debug_assert!(recheck(&fs, &gs, &block, expected));
        return Ok(Verdict::Refuted(ConjugacyViolation { space: Space::Source, block, expected, got }));
    }
    let (target_checks, bad) = check_side(y, &cert.backward, &fs, cert.k)?;
    if let Some((block, expected, got)) = bad {
        debug_assert!(recheck(&gs, &fs, &block, expected));
        return Ok(Verdict::Refuted(ConjugacyViolation { space: Space::Target, block, expected, got }));
    }
    Ok(Verdict::Proven(ConjugacyProof { k: cert.k, source_checks, target_checks }))
}

/// Direct recomputation of a round trip on a whole block with the star codes.
pub fn recheck(first_star: &SlidingBlockCode, second_star: &SlidingBlockCode, b: &Block, expected: Symbol) -> bool {
    let go = || -> Result<Symbol> {
        let mid = first_star.apply_to_block(b)?;
        let out = second_star.apply_to_block(&mid)?;
        Ok(out.get(&vec![0; b.dim()]).unwrap())
    };
    matches!(go(), Ok(s) if s != expected)
}

/// Where forbidden patterns of `Y` are looked for in the image of a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Each forbidden shape once, with its bounding box centered on the origin.
    Centered,
    /// Every placement whose bounding-box center lies in `B_{r - r_F - r_Y}`.
    /// Sound and monotone, but a non-extensible border can make it fail at
    /// every radius even when the inclusion holds.
    Margin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionProof {
    pub r: usize,
    pub checks: usize,
}

/// Bounded check that `F(X)` is contained in `Y`: `Proven` when no admissible
/// `B_r` block of `X` maps to a block with a forbidden pattern of `Y` at its
/// center. A violating block may be non-extensible, so a failure yields
/// `Unknown` carrying that block.
pub fn check_factor_inclusion(
    f: &SlidingBlockCode,
    x: &SftSpec,
    y: &SftSpec,
    r: usize,
) -> Result<Verdict<InclusionProof, std::convert::Infallible>> {
    check_factor_inclusion_placed(f, x, y, r, Placement::Centered)
}

pub fn check_factor_inclusion_placed(
    f: &SlidingBlockCode,
    x: &SftSpec,
    y: &SftSpec,
    r: usize,
    placement: Placement,
) -> Result<Verdict<InclusionProof, std::convert::Infallible>> {
    if f.source() != x.alphabet() || f.target() != y.alphabet() {
        return Err(SftError::AlphabetMismatch("code must map the source alphabet to the target alphabet".into()));
    }
    if f.dim() != x.dim() || y.dim() != x.dim() {
        return Err(SftError::DimensionMismatch { expected: x.dim(), found: f.dim().max(y.dim()) });
    }
    let need = f.radius() + y.radius();
    if r < need {
        return Err(SftError::RadiusTooSmall { requested: r, required: need });
    }
    let d = x.dim();
    let image_box = BoxRegion::cube(d, r - f.radius());
    let mut placements: Vec<(usize, Vec<Point>)> = Vec::new();
    for (gi, g) in y.groups().iter().enumerate() {
        let c: Point = (0..d)
            .map(|i| {
                let lo = g.offsets().iter().map(|o| o[i]).min().unwrap();
                let hi = g.offsets().iter().map(|o| o[i]).max().unwrap();
                -(lo + hi).div_euclid(2)
            })
            .collect();
        let margin = margin_of(placement, r, need);
        let anchors: Vec<Point> = BoxRegion::cube(d, margin).points().map(|z| shifted(&c, &[z]).remove(0)).collect();
        for a in anchors {
            let cells = shifted(&a, g.offsets());
            if cells.iter().all(|c| image_box.contains(c)) {
                placements.push((gi, cells));
            }
        }
    }
    let region = BoxRegion::cube(d, r);
    let offs: Vec<Point> = BoxRegion::cube(d, f.radius()).points().collect();
    let mut bad = None;
    for (gi, cells) in &placements {
        let near = BoxRegion::cube(d, need + margin_of(placement, r, need));
        let grid = Grid::boxed(region.clone()).ordered_by(|p| {
            let inside = cells.iter().any(|c| c.iter().zip(p).all(|(a, b)| (a - b).unsigned_abs() as usize <= f.radius()));
            (!inside, !near.contains(p), p.clone())
        });
        let mut pr = grid.problem(x);
        let vars = cells.iter().flat_map(|z| shifted(z, &offs)).map(|q| grid.var_at(&q).unwrap()).collect();
        pr.add_probe(vars);
        let probe = ForbiddenImage { f, group: &y.groups()[*gi], cells: cells.len(), err: Mutex::new(None) };
        let sol = pr.first_solution(Some(&probe));
        if let Some(e) = probe.err.lock().unwrap().take() {
            return Err(e);
        }
        if let Some(sol) = sol {
            bad = Some(Block::new(region.clone(), grid.cells(&sol)));
            break;
        }
    }
    let checks = placements.len();
    match bad {
        None => Ok(Verdict::Proven(InclusionProof { r, checks })),
        Some(m) => Ok(Verdict::Unknown(
            Budget::new()
                .with("radius", r)
                .note("an admissible block maps onto a forbidden pattern; it may be non-extensible: retry at a larger radius or test its extensibility")
                .suspect(m),
        )),
    }
}

fn margin_of(placement: Placement, r: usize, need: usize) -> usize {
    match placement {
        Placement::Centered => 0,
        Placement::Margin => r - need,
    }
}

/// Accepts a concatenation of windows exactly when their images form a
/// forbidden tuple of `group`.
struct ForbiddenImage<'a> {
    f: &'a SlidingBlockCode,
    group: &'a crate::sft::ShapeGroup,
    cells: usize,
    err: Mutex<Option<SftError>>,
}

impl Probe for ForbiddenImage<'_> {
    fn eval(&self, _: usize, window: &[Symbol]) -> Option<u32> {
        let w = window.len() / self.cells;
        let mut t = Vec::with_capacity(self.cells);
        for c in window.chunks(w) {
            match self.f.eval(c) {
                Ok(s) => t.push(s),
                Err(e) => {
                    self.err.lock().unwrap().get_or_insert(e);
                    return None;
                }
            }
        }
        self.group.is_forbidden(&t).then_some(0)
    }
}

/// Classification of one admissible block of the target.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockClass {
    SatisfiedByPreimage(Block),
    SatisfiedByNonExtensibility(usize),
    /// The block is extensible (witness) yet has no admissible preimage.
    RefutedBlock(PeriodicConfig),
    Undetermined,
}

/// All blocks passed at the tested radii; evidence only, not a proof.
#[derive(Clone, Debug, PartialEq)]
pub struct SurjectivityEvidence {
    pub n: usize,
    pub ext_radius: usize,
    pub blocks: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurjectivityRefutation {
    pub block: Block,
    pub witness: PeriodicConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurjectivityReport {
    pub blocks: Vec<(Block, BlockClass)>,
    pub verdict: Verdict<SurjectivityEvidence, SurjectivityRefutation>,
}

/// The first admissible `B_{n + r_F}` block of `x` mapped onto `m` by `f`.
pub fn find_preimage(f: &SlidingBlockCode, x: &SftSpec, m: &Block) -> Result<Option<Block>> {
    let n = m.region().cube_radius().ok_or_else(|| SftError::InvalidArgument("target block must be a cube".into()))?;
    let d = x.dim();
    let region = BoxRegion::cube(d, n + f.radius());
    let grid = Grid::boxed(region.clone());
    let mut pr = grid.problem(x);
    let outputs: Vec<Point> = m.region().points().collect();
    add_window_probes(&grid, &mut pr, &outputs, f.radius());
    let probe = CodeProbe::new(f, Some(m.cells().to_vec()));
    let sol = pr.first_solution(Some(&probe));
    probe.take_err()?;
    Ok(sol.map(|s| Block::new(region, grid.cells(&s))))
}

/// Per-block test of `Y ⊆ F(X)` on the admissible `B_n` blocks of `y`.
pub fn check_surjectivity(
    f: &SlidingBlockCode,
    x: &SftSpec,
    y: &SftSpec,
    n: usize,
    ext_radius: usize,
    period_budget: usize,
) -> Result<SurjectivityReport> {
    if f.source() != x.alphabet() || f.target() != y.alphabet() {
        return Err(SftError::AlphabetMismatch("code must map the source alphabet to the target alphabet".into()));
    }
    if f.dim() != x.dim() || y.dim() != x.dim() {
        return Err(SftError::DimensionMismatch { expected: x.dim(), found: f.dim().max(y.dim()) });
    }
    let targets: Vec<Block> = enumerate_admissible_blocks(y, n).collect();
    let classes: Vec<Result<BlockClass>> = targets
        .par_iter()
        .map(|m| {
            if let Some(p) = find_preimage(f, x, m)? {
                return Ok(BlockClass::SatisfiedByPreimage(p));
            }
            Ok(match check_extensibility(&m.to_pattern(), y, ext_radius, period_budget)? {
                Verdict::Refuted(NonExtensible::NoBlock { radius }) => BlockClass::SatisfiedByNonExtensibility(radius),
                Verdict::Refuted(NonExtensible::Inadmissible) => unreachable!("enumerated blocks are admissible"),
                Verdict::Proven(c) => BlockClass::RefutedBlock(c),
                Verdict::Unknown(_) => BlockClass::Undetermined,
            })
        })
        .collect();
    let mut blocks = Vec::with_capacity(targets.len());
    for (m, c) in targets.into_iter().zip(classes) {
        blocks.push((m, c?));
    }
    let refuted = blocks.iter().find_map(|(m, c)| match c {
        BlockClass::RefutedBlock(w) => Some(SurjectivityRefutation { block: m.clone(), witness: w.clone() }),
        _ => None,
    });
    let verdict = if let Some(r) = refuted {
        Verdict::Refuted(r)
    } else if blocks.iter().all(|(_, c)| !matches!(c, BlockClass::Undetermined)) {
        Verdict::Proven(SurjectivityEvidence { n, ext_radius, blocks: blocks.len() })
    } else {
        Verdict::Unknown(
            Budget::new().with("n", n).with("radius", ext_radius).with("period-budget", period_budget),
        )
    };
    Ok(SurjectivityReport { blocks, verdict })
}

/// `Proven(n)` at the least `n <= n_max` with no admissible `B_n` block.
pub fn prove_empty(x: &SftSpec, n_max: usize) -> Verdict<usize, std::convert::Infallible> {
    for n in 0..=n_max {
        if blocks::first_block_with(x, &BoxRegion::cube(x.dim(), n), &Pattern::new(x.dim())).is_none() {
            return Verdict::Proven(n);
        }
    }
    Verdict::Unknown(Budget::new().with("n-max", n_max))
}

/// `Proven` with the first valid torus (smallest area, then lexicographic
/// periods) whose periods are all at most `period_budget`.
pub fn prove_nonempty(x: &SftSpec, period_budget: usize) -> Verdict<PeriodicConfig, std::convert::Infallible> {
    match blocks::find_periodic(x, period_budget, &Pattern::new(x.dim())) {
        Some(c) => {
            debug_assert!(blocks::periodic_is_valid(x, &c));
            Verdict::Proven(c)
        }
        None => Verdict::Unknown(
            Budget::new().with("period-budget", period_budget).note("no periodic point found; this does not imply emptiness"),
        ),
    }
}

//! Enumeration of table-coded conjugacy candidates.
//!
//! For a radius pair `(r_F, r_G)` the forward table is searched as a
//! constraint problem over the admissible `B_{r_F}` windows of `X`, in
//! lexicographic order of the window values. Only conditions that every
//! certificate accepted at `max_k` must satisfy are imposed, so no accepted
//! table is skipped:
//!
//! * the image of windows realized together in an admissible `B_{max_k}`
//!   block avoids the forbidden patterns of `Y`;
//! * with `r_G = 0`, windows with different centers have different images;
//! * every symbol at the center of an admissible `B_{max_k}` block of `Y`
//!   is an image.
//!
//! The backward table is then read off: each realized core of `X` forces
//! one entry, and entries not forced are completed with the first symbol.
//! Every candidate goes through [`verify_conjugacy_certificate`].

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::alphabet::Symbol;
use crate::blocks::enumerate_admissible_blocks;
use crate::codes::SlidingBlockCode;
use crate::error::Result;
use crate::geom::{Block, BoxRegion, Point};
use crate::search::{Grid, Probe};
use crate::sft::{ShapeGroup, SftSpec};
use crate::verdict::{Budget, Verdict};
use crate::verify::{verify_conjugacy_certificate, ConjugacyCertificate};

/// Budgets for [`search_conjugacy_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_radius: usize,
    pub max_k: usize,
    /// Search nodes over all radius pairs.
    pub node_limit: u64,
}

pub const DEFAULT_NODE_LIMIT: u64 = 200_000;

/// Looks for a verified certificate with both radii at most `max_radius`.
/// Radius pairs are tried by increasing `r_F + r_G`, then `r_F`; the
/// certificate carries the least `k <= max_k` it verifies at.
pub fn search_conjugacy(
    x: &SftSpec,
    y: &SftSpec,
    max_radius: usize,
    max_k: usize,
) -> Result<Verdict<ConjugacyCertificate, std::convert::Infallible>> {
    search_conjugacy_with(x, y, SearchBudget { max_radius, max_k, node_limit: DEFAULT_NODE_LIMIT })
}

pub fn search_conjugacy_with(
    x: &SftSpec,
    y: &SftSpec,
    budget: SearchBudget,
) -> Result<Verdict<ConjugacyCertificate, std::convert::Infallible>> {
    if x.dim() != y.dim() {
        return Err(crate::SftError::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let mut pairs: Vec<(usize, usize)> =
        (0..=budget.max_radius).flat_map(|a| (0..=budget.max_radius).map(move |b| (a, b))).collect();
    pairs.sort_by_key(|&(a, b)| (a + b, a));
    let mut nodes = 0u64;
    let mut cut = false;
    for (rf, rg) in pairs {
        let bound = rf.max(x.radius()) + rg.max(y.radius());
        if bound >= budget.max_k {
            continue;
        }
        let mut run = PairSearch::new(x, y, rf, rg, budget.max_k)?;
        match run.solve(&mut nodes, budget.node_limit)? {
            Outcome::Found(cert) => return Ok(Verdict::Proven(cert)),
            Outcome::Exhausted => {}
            Outcome::Cut => cut = true,
        }
        if nodes >= budget.node_limit {
            break;
        }
    }
    let mut b = Budget::new()
        .with("max-radius", budget.max_radius)
        .with("max-k", budget.max_k)
        .with("node-limit", budget.node_limit)
        .with("nodes", nodes);
    if cut {
        b = b.note("node limit reached before the candidate space was exhausted");
    }
    Ok(Verdict::Unknown(b))
}

enum Outcome {
    Found(ConjugacyCertificate),
    Exhausted,
    Cut,
}

/// Maps an admissible window to its variable index.
struct IndexProbe<'a> {
    index: &'a HashMap<Vec<Symbol>, usize>,
}

impl Probe for IndexProbe<'_> {
    fn eval(&self, _: usize, window: &[Symbol]) -> Option<u32> {
        self.index.get(window).map(|&i| i as u32)
    }
}

fn add(p: &[i32], q: &[i32]) -> Point {
    p.iter().zip(q).map(|(a, b)| a + b).collect()
}

/// Distinct (window indices at `anchors`, center symbol) over admissible
/// `B_k` blocks of `x`, windows having radius `r`.
fn realized(
    x: &SftSpec,
    k: usize,
    anchors: &[Point],
    r: usize,
    index: &HashMap<Vec<Symbol>, usize>,
) -> Vec<(Vec<usize>, Symbol)> {
    let d = x.dim();
    let offs: Vec<Point> = BoxRegion::cube(d, r).points().collect();
    let near = |p: &Point| {
        p.iter().all(|&c| c == 0) || anchors.iter().any(|a| a.iter().zip(p).all(|(u, v)| (u - v).unsigned_abs() as usize <= r))
    };
    let region = BoxRegion::cube(d, k);
    let grid = Grid::boxed(region.clone()).ordered_by(|p| (!near(p), p.clone()));
    let mut pr = grid.problem(x);
    for a in anchors {
        pr.add_probe(offs.iter().map(|o| grid.var_at(&add(a, o)).expect("window inside the block")).collect());
    }
    let origin = vec![0; d];
    pr.mark_key(grid.var_at(&origin).unwrap());
    let probe = IndexProbe { index };
    let mut out = Vec::new();
    pr.project(Some(&probe), |_, vals| {
        let b = Block::new(region.clone(), grid.cells(vals));
        let ids = anchors
            .iter()
            .map(|a| {
                let w: Vec<Symbol> = offs.iter().map(|o| b.get(&add(a, o)).unwrap()).collect();
                index[&w]
            })
            .collect();
        out.push((ids, b.get(&origin).unwrap()));
        true
    });
    out.sort();
    out.dedup();
    out
}

fn windows(x: &SftSpec, r: usize) -> (Vec<Vec<Symbol>>, HashMap<Vec<Symbol>, usize>) {
    let list: Vec<Vec<Symbol>> = enumerate_admissible_blocks(x, r).map(|b| b.cells().to_vec()).collect();
    let index = list.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    (list, index)
}

/// Offsets of a forbidden shape placed with its bounding box centered.
fn centered(g: &ShapeGroup, d: usize) -> Vec<Point> {
    let c: Point = (0..d)
        .map(|i| {
            let lo = g.offsets().iter().map(|o| o[i]).min().unwrap();
            let hi = g.offsets().iter().map(|o| o[i]).max().unwrap();
            -(lo + hi).div_euclid(2)
        })
        .collect();
    g.offsets().iter().map(|o| add(&c, o)).collect()
}

enum Rel {
    Avoid(Arc<ShapeGroup>),
    Differ,
}

struct Con {
    vars: Vec<usize>,
    rel: Rel,
}

impl Con {
    fn holds(&self, vals: &[Symbol]) -> bool {
        match &self.rel {
            Rel::Avoid(g) => !g.is_forbidden(vals),
            Rel::Differ => vals[0] != vals[1],
        }
    }
}

/// Forward-checking search over a finite-domain problem.
struct Csp {
    doms: Vec<FixedBitSet>,
    cons: Vec<Con>,
    by_var: Vec<Vec<usize>>,
    /// Symbols that must each be taken by some variable.
    cover: FixedBitSet,
}

impl Csp {
    fn new(n: usize, k: usize, cover: FixedBitSet) -> Self {
        let mut full = FixedBitSet::with_capacity(k);
        full.insert_range(..);
        Csp { doms: vec![full; n], cons: Vec::new(), by_var: vec![Vec::new(); n], cover }
    }

    fn add(&mut self, vars: Vec<usize>, rel: Rel) {
        let mut distinct = vars.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let con = Con { vars, rel };
        if distinct.len() == 1 {
            let v = distinct[0];
            let keep: Vec<usize> =
                self.doms[v].ones().filter(|&a| con.holds(&vec![Symbol::from(a); con.vars.len()])).collect();
            self.doms[v].clear();
            keep.into_iter().for_each(|a| self.doms[v].insert(a));
            return;
        }
        let id = self.cons.len();
        for v in distinct {
            self.by_var[v].push(id);
        }
        self.cons.push(con);
    }

    /// Calls `visit` on solutions in lexicographic order until it returns
    /// `false`; returns `false` when stopped by `visit` or the node limit.
    fn solve(&self, nodes: &mut u64, limit: u64, visit: &mut dyn FnMut(&[Symbol]) -> Result<bool>) -> Result<Option<bool>> {
        let n = self.doms.len();
        let mut st = State {
            doms: self.doms.clone(),
            assigned: vec![None; n],
            trail: Vec::new(),
        };
        if st.doms.iter().any(|d| d.is_clear()) || !self.coverable(&st, 0) {
            return Ok(Some(true));
        }
        self.rec(0, &mut st, nodes, limit, visit)
    }

    fn rec(
        &self,
        v: usize,
        st: &mut State,
        nodes: &mut u64,
        limit: u64,
        visit: &mut dyn FnMut(&[Symbol]) -> Result<bool>,
    ) -> Result<Option<bool>> {
        if v == self.doms.len() {
            let sol: Vec<Symbol> = st.assigned.iter().map(|a| a.unwrap()).collect();
            return Ok(Some(visit(&sol)?));
        }
        let choices: Vec<usize> = st.doms[v].ones().collect();
        for a in choices {
            if *nodes >= limit {
                return Ok(None);
            }
            *nodes += 1;
            let mark = st.trail.len();
            st.assigned[v] = Some(Symbol::from(a));
            if self.forward(v, st) && self.coverable(st, v + 1) {
                match self.rec(v + 1, st, nodes, limit, visit)? {
                    Some(true) => {}
                    other => {
                        st.undo(mark);
                        st.assigned[v] = None;
                        return Ok(other.map(|_| false));
                    }
                }
            }
            st.undo(mark);
            st.assigned[v] = None;
        }
        Ok(Some(true))
    }

    fn forward(&self, v: usize, st: &mut State) -> bool {
        let mut buf = Vec::new();
        for &c in &self.by_var[v] {
            let con = &self.cons[c];
            let open: Vec<usize> = {
                let mut o: Vec<usize> = con.vars.iter().copied().filter(|&u| st.assigned[u].is_none()).collect();
                o.sort_unstable();
                o.dedup();
                o
            };
            match open.len() {
                0 => {
                    buf.clear();
                    buf.extend(con.vars.iter().map(|&u| st.assigned[u].unwrap()));
                    if !con.holds(&buf) {
                        return false;
                    }
                }
                1 => {
                    let u = open[0];
                    let drop: Vec<usize> = st.doms[u]
                        .ones()
                        .filter(|&b| {
                            buf.clear();
                            buf.extend(con.vars.iter().map(|&w| if w == u { Symbol::from(b) } else { st.assigned[w].unwrap() }));
                            !con.holds(&buf)
                        })
                        .collect();
                    if !drop.is_empty() {
                        st.trail.push((u, st.doms[u].clone()));
                        drop.into_iter().for_each(|b| st.doms[u].set(b, false));
                        if st.doms[u].is_clear() {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn coverable(&self, st: &State, next: usize) -> bool {
        let mut need = 0;
        for s in self.cover.ones() {
            let taken = st.assigned[..next].iter().any(|a| *a == Some(Symbol::from(s)));
            if !taken {
                if !st.doms[next..].iter().any(|d| d.contains(s)) {
                    return false;
                }
                need += 1;
            }
        }
        need <= self.doms.len() - next
    }
}

struct State {
    doms: Vec<FixedBitSet>,
    assigned: Vec<Option<Symbol>>,
    trail: Vec<(usize, FixedBitSet)>,
}

impl State {
    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (u, d) = self.trail.pop().unwrap();
            self.doms[u] = d;
        }
    }
}

struct PairSearch<'a> {
    x: &'a SftSpec,
    y: &'a SftSpec,
    rf: usize,
    rg: usize,
    max_k: usize,
    fwin: Vec<Vec<Symbol>>,
    gwin: Vec<Vec<Symbol>>,
    gindex: HashMap<Vec<Symbol>, usize>,
    /// Realized cores of `X`: forward window indices over `B_{r_G}`, center.
    cores: Vec<(Vec<usize>, Symbol)>,
    csp: Csp,
}

impl<'a> PairSearch<'a> {
    fn new(x: &'a SftSpec, y: &'a SftSpec, rf: usize, rg: usize, max_k: usize) -> Result<Self> {
        let d = x.dim();
        let (fwin, findex) = windows(x, rf);
        let (gwin, gindex) = windows(y, rg);
        let ky = y.alphabet().len();

        let mut cover = FixedBitSet::with_capacity(ky);
        let (_, yunit) = windows(y, 0);
        for (_, c) in realized(y, max_k, &[], 0, &yunit) {
            cover.insert(c.index());
        }
        let mut csp = Csp::new(fwin.len(), ky, cover);
        for g in y.groups() {
            let anchors = centered(g, d);
            for (ids, _) in realized(x, max_k, &anchors, rf, &findex) {
                csp.add(ids, Rel::Avoid(g.clone()));
            }
        }
        let origin = vec![vec![0; d]];
        if rg == 0 {
            let seen = realized(x, max_k, &origin, rf, &findex);
            for (i, (a, ca)) in seen.iter().enumerate() {
                for (b, cb) in &seen[i + 1..] {
                    if ca != cb {
                        csp.add(vec![a[0], b[0]], Rel::Differ);
                    }
                }
            }
        }
        let anchors: Vec<Point> = BoxRegion::cube(d, rg).points().collect();
        let cores = realized(x, max_k, &anchors, rf, &findex);
        Ok(PairSearch { x, y, rf, rg, max_k, fwin, gwin, gindex, cores, csp })
    }

    fn solve(&mut self, nodes: &mut u64, limit: u64) -> Result<Outcome> {
        let mut found = None;
        let csp = std::mem::replace(&mut self.csp, Csp::new(0, 0, FixedBitSet::new()));
        let done = csp.solve(nodes, limit, &mut |f| {
            let Some(g) = self.backward(f) else { return Ok(true) };
            let cert = self.certificate(f, &g)?;
            match self.least_k(cert)? {
                Some(c) => {
                    found = Some(c);
                    Ok(false)
                }
                None => Ok(true),
            }
        })?;
        self.csp = csp;
        Ok(match (found, done) {
            (Some(c), _) => Outcome::Found(c),
            (None, None) => Outcome::Cut,
            (None, Some(_)) => Outcome::Exhausted,
        })
    }

    /// Backward table forced by the realized cores, or `None` on a clash.
    fn backward(&self, f: &[Symbol]) -> Option<Vec<Symbol>> {
        let mut g: Vec<Option<Symbol>> = vec![None; self.gwin.len()];
        for (ids, center) in &self.cores {
            let img: Vec<Symbol> = ids.iter().map(|&i| f[i]).collect();
            let &gi = self.gindex.get(&img)?;
            match g[gi] {
                Some(s) if s != *center => return None,
                _ => g[gi] = Some(*center),
            }
        }
        Some(g.into_iter().map(|s| s.unwrap_or(Symbol(0))).collect())
    }

    fn certificate(&self, f: &[Symbol], g: &[Symbol]) -> Result<ConjugacyCertificate> {
        let d = self.x.dim();
        let ft = self.fwin.iter().cloned().zip(f.iter().copied()).collect();
        let gt = self.gwin.iter().cloned().zip(g.iter().copied()).collect();
        let xa = self.x.alphabet().clone();
        let ya = self.y.alphabet().clone();
        Ok(ConjugacyCertificate {
            forward: SlidingBlockCode::table(xa.clone(), ya.clone(), d, self.rf, ft, Some(Symbol(0)))?,
            backward: SlidingBlockCode::table(ya, xa, d, self.rg, gt, Some(Symbol(0)))?,
            k: self.max_k,
        })
    }

    /// Acceptance at `k` implies acceptance at every larger `k`.
    fn least_k(&self, mut cert: ConjugacyCertificate) -> Result<Option<ConjugacyCertificate>> {
        if !verify_conjugacy_certificate(self.x, self.y, &cert)?.is_proven() {
            return Ok(None);
        }
        let bound = self.rf.max(self.x.radius()) + self.rg.max(self.y.radius());
        for k in bound + 1..self.max_k {
            let trial = ConjugacyCertificate { k, ..cert.clone() };
            if verify_conjugacy_certificate(self.x, self.y, &trial)?.is_proven() {
                cert.k = k;
                break;
            }
        }
        Ok(Some(cert))
    }
}

//! Backtracking search over grids of cells constrained by an SFT.
//!
//! Cells become variables in a chosen fill order. Forbidden patterns become
//! constraints that are checked as soon as their last variable is assigned;
//! two-cell constraints additionally feed arc-consistency propagation.
//! Probes are caller-supplied functions of a window of cells whose outputs
//! either reject a branch or extend a projection key.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::alphabet::Symbol;
use crate::geom::{BoxRegion, Point};
use crate::sft::{ShapeGroup, SftSpec};

/// A window function: `None` rejects the branch, `Some(v)` appends `v` to the key.
pub(crate) trait Probe: Sync {
    fn eval(&self, id: usize, window: &[Symbol]) -> Option<u32>;
}

#[derive(Clone)]
struct Con<'a> {
    vars: Vec<usize>,
    group: &'a ShapeGroup,
}

#[derive(Clone)]
pub(crate) struct Problem<'a> {
    n: usize,
    k: usize,
    domains: Vec<FixedBitSet>,
    cons: Vec<Con<'a>>,
    trig: Vec<Vec<usize>>,
    nbrs: Vec<Vec<(usize, usize, bool)>>,
    probes: Vec<Vec<usize>>,
    probe_trig: Vec<Vec<usize>>,
    key_var: Vec<bool>,
}

impl<'a> Problem<'a> {
    fn new(n: usize, k: usize) -> Self {
        let mut full = FixedBitSet::with_capacity(k);
        full.insert_range(..);
        Problem {
            n,
            k,
            domains: vec![full; n],
            cons: Vec::new(),
            trig: vec![Vec::new(); n],
            nbrs: vec![Vec::new(); n],
            probes: Vec::new(),
            probe_trig: vec![Vec::new(); n],
            key_var: vec![false; n],
        }
    }

    fn add_constraint(&mut self, vars: Vec<usize>, group: &'a ShapeGroup) {
        match vars.len() {
            1 => {
                let v = vars[0];
                let d = &mut self.domains[v];
                for a in 0..self.k {
                    if group.is_forbidden(&[Symbol::from(a)]) {
                        d.set(a, false);
                    }
                }
            }
            2 if vars[0] == vars[1] => {
                let v = vars[0];
                for a in 0..self.k {
                    let s = Symbol::from(a);
                    if group.is_forbidden(&[s, s]) {
                        self.domains[v].set(a, false);
                    }
                }
            }
            _ => {
                let id = self.cons.len();
                let t = *vars.iter().max().unwrap();
                if vars.len() == 2 {
                    self.nbrs[vars[0]].push((vars[1], id, true));
                    self.nbrs[vars[1]].push((vars[0], id, false));
                }
                self.trig[t].push(id);
                self.cons.push(Con { vars, group });
            }
        }
    }

    /// Restricts a variable to one value.
    pub fn pin(&mut self, var: usize, s: Symbol) {
        let keep = self.domains[var].contains(s.index());
        self.domains[var].clear();
        if keep {
            self.domains[var].insert(s.index());
        }
    }

    /// Registers a probe on the given variables; returns its id.
    pub fn add_probe(&mut self, vars: Vec<usize>) -> usize {
        let id = self.probes.len();
        let t = vars.iter().copied().max().expect("probe windows are nonempty");
        self.probe_trig[t].push(id);
        self.probes.push(vars);
        id
    }

    pub fn mark_key(&mut self, var: usize) {
        self.key_var[var] = true;
    }

    fn infeasible(&self) -> bool {
        self.domains.iter().any(|d| d.is_clear())
    }

    /// `frontier[i]`: variables below `i` still read by something triggered at or after `i`.
    fn frontiers(&self) -> Vec<Vec<usize>> {
        let mut last = (0..self.n).collect::<Vec<_>>();
        for c in &self.cons {
            let t = *c.vars.iter().max().unwrap();
            for &v in &c.vars {
                last[v] = last[v].max(t);
            }
        }
        for w in &self.probes {
            let t = *w.iter().max().unwrap();
            for &v in w {
                last[v] = last[v].max(t);
            }
        }
        let mut out = vec![Vec::new(); self.n + 1];
        for v in 0..self.n {
            for f in out.iter_mut().take(last[v] + 1).skip(v + 1) {
                f.push(v);
            }
        }
        out
    }

    fn check_at(&self, depth: usize, vals: &[Symbol], buf: &mut Vec<Symbol>) -> bool {
        for &c in &self.trig[depth] {
            let con = &self.cons[c];
            buf.clear();
            buf.extend(con.vars.iter().map(|&v| vals[v]));
            if con.group.is_forbidden(buf) {
                return false;
            }
        }
        true
    }

    fn probe_at(
        &self,
        depth: usize,
        vals: &[Symbol],
        probe: Option<&dyn Probe>,
        key: &mut Vec<u32>,
        buf: &mut Vec<Symbol>,
    ) -> bool {
        if self.key_var[depth] {
            key.push(vals[depth].0);
        }
        for &id in &self.probe_trig[depth] {
            buf.clear();
            buf.extend(self.probes[id].iter().map(|&v| vals[v]));
            let p = probe.expect("probes registered without an evaluator");
            match p.eval(id, buf) {
                Some(x) => key.push(x),
                None => return false,
            }
        }
        true
    }

    /// Exact number of solutions, memoized on the frontier.
    pub fn count(&self) -> BigUint {
        if self.infeasible() {
            return BigUint::zero();
        }
        let fr = self.frontiers();
        let mut memo: Vec<HashMap<Vec<Symbol>, BigUint>> = vec![HashMap::new(); self.n + 1];
        let mut vals = vec![Symbol(0); self.n];
        let mut buf = Vec::new();
        self.count_rec(0, &fr, &mut memo, &mut vals, &mut buf)
    }

    fn count_rec(
        &self,
        depth: usize,
        fr: &[Vec<usize>],
        memo: &mut [HashMap<Vec<Symbol>, BigUint>],
        vals: &mut Vec<Symbol>,
        buf: &mut Vec<Symbol>,
    ) -> BigUint {
        if depth == self.n {
            return BigUint::one();
        }
        let state: Vec<Symbol> = fr[depth].iter().map(|&v| vals[v]).collect();
        if let Some(c) = memo[depth].get(&state) {
            return c.clone();
        }
        let mut total = BigUint::zero();
        for a in self.domains[depth].ones() {
            vals[depth] = Symbol::from(a);
            if self.check_at(depth, vals, buf) {
                total += self.count_rec(depth + 1, fr, memo, vals, buf);
            }
        }
        memo[depth].insert(state, total.clone());
        total
    }

    /// Visits every distinct key (key-variable values and probe outputs, in
    /// trigger order) once, with the first solution producing it. The
    /// visitor returns `false` to stop.
    pub fn project(&self, probe: Option<&dyn Probe>, mut visit: impl FnMut(&[u32], &[Symbol]) -> bool) {
        if self.infeasible() {
            return;
        }
        let fr = self.frontiers();
        let settled = (0..self.n)
            .filter(|&v| self.key_var[v] || !self.probe_trig[v].is_empty())
            .max()
            .map_or(0, |v| v + 1);
        let mut ctx = ProjectCtx {
            fr,
            settled,
            probe,
            seen: HashSet::new(),
            vals: vec![Symbol(0); self.n],
            key: Vec::new(),
            buf: Vec::new(),
        };
        let _ = self.project_rec(0, &mut ctx, &mut visit);
    }

    /// `Err(())` stops everything; `Ok(true)` reports that a solution was
    /// found below a depth where the key is already complete.
    fn project_rec(
        &self,
        depth: usize,
        ctx: &mut ProjectCtx<'_>,
        visit: &mut impl FnMut(&[u32], &[Symbol]) -> bool,
    ) -> std::result::Result<bool, ()> {
        let mut state = Vec::with_capacity(1 + ctx.fr[depth].len() + ctx.key.len());
        state.push(depth as u32);
        state.extend(ctx.fr[depth].iter().map(|&v| ctx.vals[v].0));
        state.push(u32::MAX);
        state.extend_from_slice(&ctx.key);
        if !ctx.seen.insert(state) {
            return Ok(false);
        }
        if depth == self.n {
            return if visit(&ctx.key, &ctx.vals) { Ok(true) } else { Err(()) };
        }
        for a in self.domains[depth].ones() {
            ctx.vals[depth] = Symbol::from(a);
            let mark = ctx.key.len();
            let ok = self.check_at(depth, &ctx.vals, &mut ctx.buf) && {
                let ProjectCtx { vals, probe, key, buf, .. } = &mut *ctx;
                self.probe_at(depth, vals, *probe, key, buf)
            };
            let found = ok && self.project_rec(depth + 1, ctx, visit)?;
            ctx.key.truncate(mark);
            if found && depth >= ctx.settled {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn into_search(self, probe: Option<&'a dyn Probe>, mac: bool) -> Search<'a> {
        Search::new(self, probe, mac)
    }

    pub fn first_solution(self, probe: Option<&'a dyn Probe>) -> Option<Vec<Symbol>> {
        self.into_search(probe, true).next()
    }
}

struct ProjectCtx<'p> {
    fr: Vec<Vec<usize>>,
    settled: usize,
    probe: Option<&'p dyn Probe>,
    seen: HashSet<Vec<u32>>,
    vals: Vec<Symbol>,
    key: Vec<u32>,
    buf: Vec<Symbol>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Running,
    Done,
}

/// Depth-first enumeration of solutions in lexicographic order of the
/// variable values.
pub(crate) struct Search<'a> {
    p: Problem<'a>,
    probe: Option<&'a dyn Probe>,
    mac: bool,
    doms: Vec<FixedBitSet>,
    trail: Vec<(usize, FixedBitSet)>,
    marks: Vec<usize>,
    key_marks: Vec<usize>,
    next_val: Vec<usize>,
    vals: Vec<Symbol>,
    key: Vec<u32>,
    depth: usize,
    phase: Phase,
    buf: Vec<Symbol>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    pub nodes: u64,
    pub node_limit: Option<u64>,
    pub exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(p: Problem<'a>, probe: Option<&'a dyn Probe>, mac: bool) -> Self {
        let n = p.n;
        Search {
            doms: p.domains.clone(),
            p,
            probe,
            mac,
            trail: Vec::new(),
            marks: vec![0; n],
            key_marks: vec![0; n],
            next_val: vec![0; n + 1],
            vals: vec![Symbol(0); n],
            key: Vec::new(),
            depth: 0,
            phase: Phase::Fresh,
            buf: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; n],
            nodes: 0,
            node_limit: None,
            exhausted: false,
        }
    }

    fn undo(&mut self, depth: usize) {
        let m = self.marks[depth];
        while self.trail.len() > m {
            let (v, d) = self.trail.pop().unwrap();
            self.doms[v] = d;
        }
        self.key.truncate(self.key_marks[depth]);
    }

    fn set_dom(&mut self, v: usize, d: FixedBitSet) {
        let old = std::mem::replace(&mut self.doms[v], d);
        self.trail.push((v, old));
    }

    /// Arc consistency over binary constraints, restricted to variables after `depth`
    /// (all variables when `depth` is `None`).
    fn propagate(&mut self, seeds: impl IntoIterator<Item = usize>, depth: Option<usize>) -> bool {
        let future = |v: usize| depth.is_none_or(|d| v > d);
        for s in seeds {
            if !self.queued[s] {
                self.queued[s] = true;
                self.queue.push(s);
            }
        }
        let mut ok = true;
        while let Some(x) = self.queue.pop() {
            self.queued[x] = false;
            if !ok {
                continue;
            }
            for i in 0..self.p.nbrs[x].len() {
                let (y, c, first) = self.p.nbrs[x][i];
                if !future(y) {
                    continue;
                }
                let sup = self.p.cons[c].group.pair_support();
                let table = if first { &sup.fwd } else { &sup.bwd };
                let mut reach = FixedBitSet::with_capacity(self.p.k);
                for a in self.doms[x].ones() {
                    reach.union_with(&table[a]);
                }
                reach.intersect_with(&self.doms[y]);
                if reach.count_ones(..) != self.doms[y].count_ones(..) {
                    let empty = reach.is_clear();
                    self.set_dom(y, reach);
                    if empty {
                        ok = false;
                        break;
                    }
                    if !self.queued[y] {
                        self.queued[y] = true;
                        self.queue.push(y);
                    }
                }
            }
        }
        ok
    }

    fn assign(&mut self, depth: usize, v: usize) -> bool {
        self.vals[depth] = Symbol::from(v);
        if self.mac {
            let mut single = FixedBitSet::with_capacity(self.p.k);
            single.insert(v);
            self.set_dom(depth, single);
        }
        if !self.p.check_at(depth, &self.vals, &mut self.buf) {
            return false;
        }
        if !self.p.probe_at(depth, &self.vals, self.probe, &mut self.key, &mut self.buf) {
            return false;
        }
        if self.mac && !self.propagate([depth], Some(depth)) {
            return false;
        }
        true
    }

    fn next_value(&self, depth: usize) -> Option<usize> {
        let d = &self.doms[depth];
        (self.next_val[depth]..self.p.k).find(|&a| d.contains(a))
    }
}

impl Iterator for Search<'_> {
    type Item = Vec<Symbol>;

    fn next(&mut self) -> Option<Vec<Symbol>> {
        let n = self.p.n;
        match self.phase {
            Phase::Done => return None,
            Phase::Fresh => {
                self.phase = Phase::Running;
                if self.p.infeasible() || (self.mac && !self.propagate(0..n, None)) {
                    self.phase = Phase::Done;
                    return None;
                }
                if n == 0 {
                    self.phase = Phase::Done;
                    return Some(Vec::new());
                }
                self.depth = 0;
                self.next_val[0] = 0;
            }
            Phase::Running => {
                self.depth = n - 1;
                self.undo(n - 1);
            }
        }
        loop {
            let depth = self.depth;
            match self.next_value(depth) {
                None => {
                    if depth == 0 {
                        self.phase = Phase::Done;
                        return None;
                    }
                    self.depth -= 1;
                    self.undo(self.depth);
                }
                Some(v) => {
                    self.next_val[depth] = v + 1;
                    self.nodes += 1;
                    if self.node_limit.is_some_and(|l| self.nodes > l) {
                        self.exhausted = true;
                        self.phase = Phase::Done;
                        return None;
                    }
                    self.marks[depth] = self.trail.len();
                    self.key_marks[depth] = self.key.len();
                    if self.assign(depth, v) {
                        if depth + 1 == n {
                            return Some(self.vals.clone());
                        }
                        self.depth += 1;
                        self.next_val[self.depth] = 0;
                    } else {
                        self.undo(depth);
                    }
                }
            }
        }
    }
}

/// Cells of a box or torus laid out as search variables.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    pub region: BoxRegion,
    pub periods: Option<Vec<usize>>,
    /// Variable index to flat cell index.
    pub order: Vec<usize>,
    /// Flat cell index to variable index.
    pub var_of: Vec<usize>,
}

impl Grid {
    pub fn boxed(region: BoxRegion) -> Self {
        let n = region.len();
        Grid { region, periods: None, order: (0..n).collect(), var_of: (0..n).collect() }
    }

    pub fn torus(periods: Vec<usize>) -> Self {
        let region = BoxRegion::new(vec![0; periods.len()], periods.clone());
        let mut g = Grid::boxed(region);
        g.periods = Some(periods);
        g
    }

    /// Reorders variables: cells listed in `first` (flat indices) come first
    /// in the given order, the rest follow lexicographically.
    pub fn with_order(mut self, first: &[usize]) -> Self {
        let n = self.region.len();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for &f in first {
            if !seen[f] {
                seen[f] = true;
                order.push(f);
            }
        }
        order.extend((0..n).filter(|&i| !seen[i]));
        let mut var_of = vec![0; n];
        for (v, &f) in order.iter().enumerate() {
            var_of[f] = v;
        }
        self.order = order;
        self.var_of = var_of;
        self
    }

    /// Orders cells by the given key on their coordinates.
    pub fn ordered_by<K: Ord>(self, key: impl Fn(&Point) -> K) -> Self {
        let mut idx: Vec<usize> = (0..self.region.len()).collect();
        idx.sort_by_key(|&i| key(&self.region.point(i)));
        self.with_order(&idx)
    }

    pub fn len(&self) -> usize {
        self.region.len()
    }

    pub fn var_at(&self, p: &[i32]) -> Option<usize> {
        match &self.periods {
            None => self.region.index(p).map(|i| self.var_of[i]),
            Some(per) => {
                let q: Point = p.iter().zip(per).map(|(&x, &m)| x.rem_euclid(m as i32)).collect();
                self.region.index(&q).map(|i| self.var_of[i])
            }
        }
    }

    /// Builds the constraint problem for an SFT on this grid.
    pub fn problem<'a>(&self, sft: &'a SftSpec) -> Problem<'a> {
        let mut pr = Problem::new(self.len(), sft.alphabet().len());
        let mut seen = HashSet::new();
        for (gi, g) in sft.groups().iter().enumerate() {
            'anchor: for anchor in self.region.points() {
                let mut vars = Vec::with_capacity(g.arity());
                for o in g.offsets() {
                    let q: Point = anchor.iter().zip(o).map(|(a, b)| a + b).collect();
                    match self.var_at(&q) {
                        Some(v) => vars.push(v),
                        None => continue 'anchor,
                    }
                }
                if self.periods.is_some() && !seen.insert((gi, vars.clone())) {
                    continue;
                }
                pr.add_constraint(vars, g);
            }
        }
        pr
    }

    /// Converts a solution (values by variable) to values by flat cell index.
    pub fn cells(&self, sol: &[Symbol]) -> Vec<Symbol> {
        let mut out = vec![Symbol(0); sol.len()];
        for (v, &s) in sol.iter().enumerate() {
            out[self.order[v]] = s;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::pattern::Pattern;

    fn golden() -> SftSpec {
        let a = Alphabet::numbered(2);
        let one = Symbol(1);
        let h = Pattern::from_cells(2, [(vec![0, 0], one), (vec![1, 0], one)]).unwrap();
        let v = Pattern::from_cells(2, [(vec![0, 0], one), (vec![0, 1], one)]).unwrap();
        SftSpec::new(a, 2, [h, v]).unwrap()
    }

    fn brute_count(x: &SftSpec, region: &BoxRegion) -> usize {
        let n = region.len();
        let k = x.alphabet().len();
        let mut count = 0;
        for code in 0..k.pow(n as u32) {
            let mut c = code;
            let cells: Vec<Symbol> = (0..n)
                .map(|_| {
                    let s = Symbol::from(c % k);
                    c /= k;
                    s
                })
                .collect();
            if x.block_is_admissible(&crate::geom::Block::new(region.clone(), cells)) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn count_matches_brute_force() {
        let x = golden();
        for (w, h) in [(1, 1), (2, 2), (3, 3), (2, 4), (4, 3)] {
            let r = BoxRegion::new(vec![0, 0], vec![w, h]);
            let g = Grid::boxed(r.clone());
            let pr = g.problem(&x);
            assert_eq!(pr.count(), BigUint::from(brute_count(&x, &r)), "{w}x{h}");
            let with_mac = pr.clone().into_search(None, true).count();
            let without = pr.into_search(None, false).count();
            assert_eq!(with_mac, brute_count(&x, &r));
            assert_eq!(without, with_mac);
        }
    }

    #[test]
    fn enumeration_is_lexicographic_with_and_without_propagation() {
        let x = golden();
        let g = Grid::boxed(BoxRegion::cube(2, 1));
        let pr = g.problem(&x);
        let a: Vec<_> = pr.clone().into_search(None, true).collect();
        let b: Vec<_> = pr.into_search(None, false).collect();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn torus_with_period_one_forbids_self_adjacency() {
        let x = golden();
        let g = Grid::torus(vec![1, 1]);
        let pr = g.problem(&x);
        let sols: Vec<_> = pr.into_search(None, true).collect();
        assert_eq!(sols, vec![vec![Symbol(0)]]);
    }

    struct Center;
    impl Probe for Center {
        fn eval(&self, _id: usize, w: &[Symbol]) -> Option<u32> {
            Some(w[0].0)
        }
    }

    #[test]
    fn projection_visits_distinct_keys() {
        let x = golden();
        let g = Grid::boxed(BoxRegion::cube(2, 1));
        let mut pr = g.problem(&x);
        let c = g.var_at(&[0, 0]).unwrap();
        pr.add_probe(vec![c]);
        let mut keys = Vec::new();
        pr.project(Some(&Center), |k, _| {
            keys.push(k.to_vec());
            true
        });
        assert_eq!(keys, vec![vec![0], vec![1]]);
    }
}

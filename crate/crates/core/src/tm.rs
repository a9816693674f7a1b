//! Deterministic single-tape Turing machines, a simulator, and the
//! computation-strip Wang tileset.
//!
//! A missing transition on a non-halting state is an immediate halt.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::alphabet::{validate_name, Symbol};
use crate::error::{Result, SftError};
use crate::geom::{BoxRegion, Point};
use crate::search::Grid;
use crate::wang::{wang_to_sft, WangTile, WangTileset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    L,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub next: usize,
    pub write: usize,
    pub mv: Move,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    states: Vec<String>,
    symbols: Vec<String>,
    blank: usize,
    init: usize,
    halting: BTreeSet<usize>,
    delta: BTreeMap<(usize, usize), Transition>,
}

fn check_name(n: &str) -> Result<()> {
    validate_name(n).map_err(|_| SftError::MalformedMachine(format!("bad name {n:?}")))?;
    if n.contains(',') {
        return Err(SftError::MalformedMachine(format!("bad name {n:?}")));
    }
    Ok(())
}

fn index_of(names: &[String], n: &str, what: &str) -> Result<usize> {
    names.iter().position(|s| s == n).ok_or_else(|| SftError::MalformedMachine(format!("unknown {what} {n:?}")))
}

impl TuringMachine {
    /// Builds a machine from names; `delta` entries are
    /// `(state, read, next, write, move)`.
    pub fn new(
        states: Vec<String>,
        symbols: Vec<String>,
        blank: &str,
        init: &str,
        halting: &[String],
        delta: &[(String, String, String, String, Move)],
    ) -> Result<Self> {
        for list in [&states, &symbols] {
            let mut seen = BTreeSet::new();
            for n in list.iter() {
                check_name(n)?;
                if !seen.insert(n) {
                    return Err(SftError::MalformedMachine(format!("duplicate name {n:?}")));
                }
            }
        }
        if states.is_empty() {
            return Err(SftError::MalformedMachine("no states".into()));
        }
        let blank = index_of(&symbols, blank, "symbol")?;
        let init = index_of(&states, init, "state")?;
        let halting = halting.iter().map(|h| index_of(&states, h, "state")).collect::<Result<BTreeSet<_>>>()?;
        let mut map = BTreeMap::new();
        for (q, a, q2, a2, mv) in delta {
            let key = (index_of(&states, q, "state")?, index_of(&symbols, a, "symbol")?);
            if halting.contains(&key.0) {
                return Err(SftError::MalformedMachine(format!("halting state {q} has a transition")));
            }
            let t = Transition { next: index_of(&states, q2, "state")?, write: index_of(&symbols, a2, "symbol")?, mv: *mv };
            if map.insert(key, t).is_some() {
                return Err(SftError::MalformedMachine(format!("two transitions for ({q},{a})")));
            }
        }
        Ok(TuringMachine { states, symbols, blank, init, halting, delta: map })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn halting(&self) -> &BTreeSet<usize> {
        &self.halting
    }

    pub fn delta(&self) -> &BTreeMap<(usize, usize), Transition> {
        &self.delta
    }

    pub fn step(&self, q: usize, a: usize) -> Option<Transition> {
        if self.halting.contains(&q) {
            return None;
        }
        self.delta.get(&(q, a)).copied()
    }

    /// Runs on `input` written from cell 0 rightwards, head on cell 0.
    pub fn run(&self, input: &[&str], step_budget: u64) -> Result<RunResult> {
        let mut tape: HashMap<i64, usize> = HashMap::new();
        for (i, s) in input.iter().enumerate() {
            let a = self
                .symbols
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| SftError::UnknownSymbol(s.to_string()))?;
            tape.insert(i as i64, a);
        }
        let (mut q, mut pos, mut steps) = (self.init, 0i64, 0u64);
        loop {
            let a = *tape.get(&pos).unwrap_or(&self.blank);
            let Some(t) = self.step(q, a) else {
                return Ok(RunResult::Halted { steps, tape: Tape::from_map(&tape, self.blank), state: q, head: pos });
            };
            if steps == step_budget {
                return Ok(RunResult::Running);
            }
            tape.insert(pos, t.write);
            q = t.next;
            pos += if t.mv == Move::R { 1 } else { -1 };
            steps += 1;
        }
    }
}

/// Non-blank part of a tape: `cells[i]` sits at `offset + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tape {
    pub offset: i64,
    pub cells: Vec<usize>,
}

impl Tape {
    fn from_map(m: &HashMap<i64, usize>, blank: usize) -> Self {
        let used: Vec<i64> = m.iter().filter(|(_, &v)| v != blank).map(|(&k, _)| k).collect();
        match (used.iter().min(), used.iter().max()) {
            (Some(&lo), Some(&hi)) => Tape {
                offset: lo,
                cells: (lo..=hi).map(|i| *m.get(&i).unwrap_or(&blank)).collect(),
            },
            _ => Tape { offset: 0, cells: Vec::new() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunResult {
    Halted { steps: u64, tape: Tape, state: usize, head: i64 },
    Running,
}

/// Colour under the seed row.
pub const GROUND: &str = "void";

/// Tiles whose rows are successive configurations, time going up. Row 0 is
/// the seed (head in the initial state on a blank tape) flanked by start
/// tiles; every row above applies one transition. Returns the tileset and
/// the index of the seed tile.
pub fn tm_strip_tileset(m: &TuringMachine) -> Result<(WangTileset, usize)> {
    let sym = |a: usize| format!("s:{}", m.symbols[a]);
    let head = |q: usize, a: usize| format!("h:{}:{}", m.states[q], m.symbols[a]);
    let msg = |q: usize| format!("m:{}", m.states[q]);
    let b = m.blank;
    let mut tiles = vec![
        WangTile::new(&head(m.init, b), ">", GROUND, "<"),
        WangTile::new(&sym(b), ">", GROUND, ">"),
        WangTile::new(&sym(b), "<", GROUND, "<"),
    ];
    for a in 0..m.symbols.len() {
        tiles.push(WangTile::new(&sym(a), "-", &sym(a), "-"));
    }
    let mut entered = BTreeSet::new();
    for (&(q, a), t) in &m.delta {
        let (e, w) = match t.mv {
            Move::R => (msg(t.next), "-".to_string()),
            Move::L => ("-".to_string(), msg(t.next)),
        };
        tiles.push(WangTile::new(&sym(t.write), &e, &head(q, a), &w));
        entered.insert((t.next, t.mv));
    }
    for (q, mv) in entered {
        for a in 0..m.symbols.len() {
            let t = match mv {
                Move::R => WangTile::new(&head(q, a), "-", &sym(a), &msg(q)),
                Move::L => WangTile::new(&head(q, a), &msg(q), &sym(a), "-"),
            };
            tiles.push(t);
        }
    }
    Ok((WangTileset::new(tiles)?, 0))
}

/// Whether a tiling of `[-h,h] x [0,h]` with the seed at the origin exists.
pub fn strip_exists(t: &WangTileset, seed: usize, h: usize) -> bool {
    let x = wang_to_sft(t);
    let region = BoxRegion::new(vec![-(h as i32), 0], vec![2 * h + 1, h + 1]);
    let grid = Grid::boxed(region).ordered_by(|p: &Point| (p[1], p[0]));
    let mut pr = grid.problem(&x);
    pr.pin(grid.var_at(&[0, 0]).unwrap(), Symbol::from(seed));
    pr.first_solution(None).is_some()
}

/// Largest `h <= limit` with a seed-anchored strip; strips of height `h`
/// exist exactly while the machine is still running after `h` steps.
pub fn max_strip_height(m: &TuringMachine, limit: usize) -> Result<usize> {
    let (t, seed) = tm_strip_tileset(m)?;
    let mut best = 0;
    for h in 1..=limit {
        if !strip_exists(&t, seed, h) {
            break;
        }
        best = h;
    }
    Ok(best)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn rule(q: &str, a: &str, q2: &str, a2: &str, mv: Move) -> (String, String, String, String, Move) {
        (q.into(), a.into(), q2.into(), a2.into(), mv)
    }

    pub(crate) fn stuck() -> TuringMachine {
        TuringMachine::new(s(&["a"]), s(&["_", "1"]), "_", "a", &[], &[]).unwrap()
    }

    pub(crate) fn three_steps() -> TuringMachine {
        let d = [
            rule("a", "_", "b", "1", Move::R),
            rule("b", "_", "c", "1", Move::L),
            rule("c", "1", "h", "_", Move::L),
        ];
        TuringMachine::new(s(&["a", "b", "c", "h"]), s(&["_", "1"]), "_", "a", &s(&["h"]), &d).unwrap()
    }

    pub(crate) fn walker() -> TuringMachine {
        TuringMachine::new(s(&["a"]), s(&["_"]), "_", "a", &[], &[rule("a", "_", "a", "_", Move::R)]).unwrap()
    }

    #[test]
    fn runs() {
        assert!(matches!(stuck().run(&[], 10).unwrap(), RunResult::Halted { steps: 0, .. }));
        assert_eq!(walker().run(&[], 1000).unwrap(), RunResult::Running);
        let RunResult::Halted { steps, tape, head, .. } = three_steps().run(&[], 3).unwrap() else { panic!() };
        assert_eq!((steps, head), (3, -1));
        assert_eq!(tape, Tape { offset: 1, cells: vec![1] });
        assert_eq!(three_steps().run(&[], 2).unwrap(), RunResult::Running);
        assert!(stuck().run(&["x"], 1).is_err());
    }

    #[test]
    fn malformed_machines() {
        let bad = [rule("h", "_", "h", "_", Move::R)];
        assert!(TuringMachine::new(s(&["h"]), s(&["_"]), "_", "h", &s(&["h"]), &bad).is_err());
        assert!(TuringMachine::new(s(&["a"]), s(&["_"]), "x", "a", &[], &[]).is_err());
        assert!(TuringMachine::new(s(&["a", "a"]), s(&["_"]), "_", "a", &[], &[]).is_err());
    }

    #[test]
    fn strip_heights_follow_the_simulator() {
        assert_eq!(max_strip_height(&stuck(), 4).unwrap(), 0);
        assert_eq!(max_strip_height(&three_steps(), 6).unwrap(), 3);
        assert_eq!(max_strip_height(&walker(), 6).unwrap(), 6);
        let (t, seed) = tm_strip_tileset(&three_steps()).unwrap();
        assert!(strip_exists(&t, seed, 3) && !strip_exists(&t, seed, 5));
    }
}

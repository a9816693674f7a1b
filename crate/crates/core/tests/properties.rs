//! Property tests over small random SFTs, codes and machines.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use sftkit::blocks::{check_extensibility, enumerate_admissible_blocks, normalize_to_radius, periodic_is_valid, NonExtensible};
use sftkit::codes::{compose, star_augment, SlidingBlockCode};
use sftkit::constructions::{disjoint_union, product};
use sftkit::entropy::count_admissible_blocks_sided;
use sftkit::format::{parse_sft, write_sft};
use sftkit::geom::cube_offsets;
use sftkit::tm::{max_strip_height, Move, RunResult, TuringMachine};
use sftkit::verify::{
    check_factor_inclusion, check_surjectivity, min_legal_k, prove_empty, verify_conjugacy_certificate, BlockClass,
    ConjugacyCertificate,
};
use sftkit::{Alphabet, Block, BoxRegion, Pattern, SftBuilder, SftSpec, Symbol, Verdict};

/// A forbidden pattern: cells at offsets in `{0,1}^d`, the first at the origin.
fn raw_pattern(d: usize, k: usize) -> impl Strategy<Value = Vec<(Vec<i32>, u32)>> {
    let corner = 1usize << d;
    prop::collection::vec((0..corner, 0..k as u32), 1..=2).prop_map(move |cells| {
        let mut out: BTreeMap<Vec<i32>, u32> = BTreeMap::new();
        for (i, (c, s)) in cells.into_iter().enumerate() {
            let p: Vec<i32> = if i == 0 { vec![0; d] } else { (0..d).map(|a| ((c >> a) & 1) as i32).collect() };
            out.entry(p).or_insert(s);
        }
        out.into_iter().collect()
    })
}

fn build(d: usize, k: usize, pats: &[Vec<(Vec<i32>, u32)>]) -> SftSpec {
    let mut b = SftBuilder::new(Alphabet::numbered(k), d);
    for p in pats {
        let p = Pattern::from_cells(d, p.iter().map(|(q, s)| (q.clone(), Symbol(*s)))).unwrap();
        b.forbid(&p).unwrap();
    }
    b.build()
}

fn sft_in(d: usize, k: usize) -> impl Strategy<Value = SftSpec> {
    prop::collection::vec(raw_pattern(d, k), 0..4).prop_map(move |pats| build(d, k, &pats))
}

fn small_sft() -> impl Strategy<Value = SftSpec> {
    (1usize..=2, 1usize..=3).prop_flat_map(|(d, k)| sft_in(d, k))
}

/// The same SFT with symbol `s` renamed to `perm[s]`.
fn relabel(x: &SftSpec, perm: &[Symbol]) -> SftSpec {
    let mut b = SftBuilder::new(x.alphabet().clone(), x.dim());
    for g in x.groups() {
        for t in g.tuples() {
            let cells = g.offsets().iter().cloned().zip(t.iter().map(|s| perm[s.index()]));
            b.forbid(&Pattern::from_cells(x.dim(), cells).unwrap()).unwrap();
        }
    }
    b.build()
}

fn perm_of(k: usize) -> impl Strategy<Value = Vec<Symbol>> {
    Just((0..k as u32).map(Symbol).collect::<Vec<_>>()).prop_shuffle()
}

fn inverse(p: &[Symbol]) -> Vec<Symbol> {
    let mut inv = vec![Symbol(0); p.len()];
    for (i, s) in p.iter().enumerate() {
        inv[s.index()] = Symbol::from(i);
    }
    inv
}

fn symbol_map(x: &SftSpec, y: &SftSpec, map: Vec<Symbol>) -> SlidingBlockCode {
    SlidingBlockCode::symbol_map(x.alphabet().clone(), y.alphabet().clone(), x.dim(), map).unwrap()
}

fn blocks_of(x: &SftSpec, r: usize) -> BTreeSet<Vec<Symbol>> {
    enumerate_admissible_blocks(x, r).map(|b| b.cells().to_vec()).collect()
}

/// Radius-1 table code on `{0..k}` in dimension 1, total on all windows.
fn table_code(k: usize) -> impl Strategy<Value = SlidingBlockCode> {
    prop::collection::vec(0..k as u32, k * k * k).prop_map(move |vals| {
        let a = Alphabet::numbered(k);
        let mut entries = BTreeMap::new();
        for (i, v) in vals.into_iter().enumerate() {
            let w = vec![Symbol::from(i / (k * k)), Symbol::from(i / k % k), Symbol::from(i % k)];
            entries.insert(w, Symbol(v));
        }
        SlidingBlockCode::table(a.clone(), a, 1, 1, entries, None).unwrap()
    })
}

type Rule5 = (String, String, String, String, Move);

fn machine() -> impl Strategy<Value = TuringMachine> {
    let entry = prop::option::of((0..3usize, 0..2usize, any::<bool>()));
    prop::collection::vec(entry, 4).prop_map(|slots| {
        let states = ["a", "b", "h"];
        let symbols = ["_", "1"];
        let mut delta: Vec<Rule5> = Vec::new();
        for (i, slot) in slots.into_iter().enumerate() {
            if let Some((q, a, right)) = slot {
                let mv = if right { Move::R } else { Move::L };
                delta.push((states[i / 2].into(), symbols[i % 2].into(), states[q].into(), symbols[a].into(), mv));
            }
        }
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        TuringMachine::new(s(&states), s(&symbols), "_", "a", &s(&["h"]), &delta).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn admissibility_is_antitone(x in small_sft(), cells in prop::collection::vec(0u32..3, 9), keep in prop::collection::vec(any::<bool>(), 9)) {
        let d = x.dim();
        let k = x.alphabet().len() as u32;
        let region = BoxRegion::cube(d, 1);
        let q = Block::new(region.clone(), region.points().enumerate().map(|(i, _)| Symbol(cells[i] % k)).collect()).to_pattern();
        let p = Pattern::from_cells(d, q.iter().enumerate().filter(|(i, _)| keep[*i]).map(|(_, (pt, s))| (pt.clone(), s))).unwrap();
        if x.is_admissible(&q).unwrap() {
            prop_assert!(x.is_admissible(&p).unwrap());
        }
    }

    #[test]
    fn block_centers_are_admissible_blocks(x in small_sft()) {
        let n = if x.dim() == 1 { 2 } else { 1 };
        let small = blocks_of(&x, n - 1);
        for b in enumerate_admissible_blocks(&x, n) {
            prop_assert!(small.contains(b.center(n - 1).unwrap().cells()));
        }
    }

    #[test]
    fn normalization_keeps_blocks(x in small_sft()) {
        let r = x.radius().max(1);
        let y = normalize_to_radius(&x, r).unwrap();
        let top = if x.dim() == 1 { r + 1 } else { r };
        for big in r..=top {
            prop_assert_eq!(blocks_of(&x, big), blocks_of(&y, big));
        }
    }

    #[test]
    fn extensibility_witnesses_recheck(x in small_sft(), s in 0u32..3) {
        let d = x.dim();
        let s = Symbol(s % x.alphabet().len() as u32);
        let p = Pattern::from_cells(d, [(vec![0; d], s)]).unwrap();
        match check_extensibility(&p, &x, 2, 2).unwrap() {
            Verdict::Proven(c) => {
                prop_assert!(periodic_is_valid(&x, &c));
                prop_assert_eq!(c.get(&vec![0; d]), s);
            }
            Verdict::Refuted(NonExtensible::NoBlock { radius }) => {
                prop_assert!(enumerate_admissible_blocks(&x, radius).all(|b| b.get(&vec![0; d]) != Some(s)));
            }
            Verdict::Refuted(NonExtensible::Inadmissible) => prop_assert!(!x.is_admissible(&p).unwrap()),
            Verdict::Unknown(_) => {}
        }
    }

    #[test]
    fn star_code_agrees_and_absorbs(x in sft_in(1, 2), f in table_code(2), w in prop::collection::vec(0u32..3, 3)) {
        let fs = star_augment(&f, &x).unwrap();
        let rs = fs.radius();
        for b in enumerate_admissible_blocks(&x, rs + 1) {
            let plain = f.apply_to_block(&b).unwrap();
            let starred = fs.apply_to_block(&b).unwrap();
            prop_assert_eq!(plain.center(1).unwrap().cells().to_vec(), starred.cells().to_vec());
        }
        let mut window: Vec<Symbol> = w.into_iter().map(Symbol).collect();
        window.resize(cube_offsets(1, rs).len(), Symbol(0));
        window[0] = Symbol(2);
        prop_assert_eq!(fs.eval(&window).unwrap(), Symbol(2));
    }

    #[test]
    fn composition_is_sequential(x in sft_in(1, 2), f in table_code(2), g in table_code(2)) {
        let h = compose(&g, &f).unwrap();
        for b in enumerate_admissible_blocks(&x, 2) {
            let p = b.to_pattern();
            prop_assert_eq!(h.apply_to_pattern(&p).unwrap(), g.apply_to_pattern(&f.apply_to_pattern(&p).unwrap()).unwrap());
        }
    }

    #[test]
    fn emptiness_is_monotone(x in small_sft()) {
        let mut seen = None;
        for n in 0..=2 {
            match (prove_empty(&x, n), seen) {
                (Verdict::Proven(m), None) => seen = Some(m),
                (Verdict::Proven(m), Some(s)) => prop_assert_eq!(m, s),
                (_, Some(_)) => prop_assert!(false, "lost a proof at n={}", n),
                _ => {}
            }
        }
    }

    #[test]
    fn inclusion_is_monotone(x in sft_in(2, 2), y in sft_in(2, 2), map in prop::collection::vec(0u32..2, 2)) {
        let f = symbol_map(&x, &y, map.into_iter().map(Symbol).collect());
        let r0 = y.radius();
        let mut proven = false;
        for r in r0..=r0 + 1 {
            let v = check_factor_inclusion(&f, &x, &y, r).unwrap();
            prop_assert!(!proven || v.is_proven());
            proven = v.is_proven();
        }
    }

    #[test]
    fn certificates_survive_relabeling(
        x in sft_in(2, 2), y in sft_in(2, 2),
        fm in prop::collection::vec(0u32..2, 2), gm in prop::collection::vec(0u32..2, 2),
        pi in perm_of(2), sigma in perm_of(2),
    ) {
        let fm: Vec<Symbol> = fm.into_iter().map(Symbol).collect();
        let gm: Vec<Symbol> = gm.into_iter().map(Symbol).collect();
        let verdict = |x: &SftSpec, y: &SftSpec, fm: Vec<Symbol>, gm: Vec<Symbol>| {
            let (f, g) = (symbol_map(x, y, fm), symbol_map(y, x, gm));
            let k = min_legal_k(x, y, &f, &g).unwrap();
            verify_conjugacy_certificate(x, y, &ConjugacyCertificate { forward: f, backward: g, k }).unwrap().status()
        };
        let (pinv, sinv) = (inverse(&pi), inverse(&sigma));
        let fm2: Vec<Symbol> = (0..2).map(|a| sigma[fm[pinv[a].index()].index()]).collect();
        let gm2: Vec<Symbol> = (0..2).map(|b| pi[gm[sinv[b].index()].index()]).collect();
        prop_assert_eq!(verdict(&x, &y, fm.clone(), gm.clone()), verdict(&relabel(&x, &pi), &relabel(&y, &sigma), fm2, gm2));
    }

    #[test]
    fn verifiers_agree(x in sft_in(2, 2), pi in perm_of(2)) {
        let y = relabel(&x, &pi);
        let f = symbol_map(&x, &y, inverse(&pi));
        let g = symbol_map(&y, &x, pi.clone());
        let k = min_legal_k(&x, &y, &f, &g).unwrap();
        let v = verify_conjugacy_certificate(&x, &y, &ConjugacyCertificate { forward: f.clone(), backward: g, k }).unwrap();
        prop_assert!(v.is_proven());
        prop_assert!(check_factor_inclusion(&f, &x, &y, y.radius().max(k)).unwrap().is_proven());
        for n in 0..=1 {
            let rep = check_surjectivity(&f, &x, &y, n, 1, 1).unwrap();
            prop_assert!(rep.blocks.iter().all(|(_, c)| !matches!(c, BlockClass::RefutedBlock(_))));
        }
    }

    #[test]
    fn counts_multiply_and_add(x in small_sft(), k2 in 1usize..=2, pats in prop::collection::vec(raw_pattern(2, 2), 0..3)) {
        let d = x.dim();
        let pats: Vec<_> = pats.into_iter().map(|p| p.into_iter().map(|(q, s)| (q[..d].to_vec(), s % k2 as u32)).collect()).collect();
        let y = build(d, k2, &pats);
        let cx = count_admissible_blocks_sided(&x, 2).unwrap();
        let cy = count_admissible_blocks_sided(&y, 2).unwrap();
        prop_assert_eq!(count_admissible_blocks_sided(&product(&x, &y).unwrap(), 2).unwrap(), &cx * &cy);
        prop_assert_eq!(count_admissible_blocks_sided(&disjoint_union(&x, &y).unwrap(), 2).unwrap(), cx + cy);
    }

    #[test]
    fn sft_text_round_trips(x in small_sft()) {
        let text = write_sft(&x);
        let back = parse_sft(&text).unwrap().into_sft();
        prop_assert_eq!(write_sft(&back), text);
        prop_assert_eq!(back, x);
    }

    #[test]
    fn runs_are_budget_monotone(m in machine()) {
        let mut halted = None;
        for b in 0..12u64 {
            match (m.run(&[], b).unwrap(), &halted) {
                (RunResult::Halted { steps, .. }, None) => halted = Some(steps),
                (RunResult::Halted { steps, .. }, Some(s)) => prop_assert_eq!(steps, *s),
                (RunResult::Running, Some(_)) => prop_assert!(false, "halting forgotten at budget {}", b),
                (RunResult::Running, None) => {}
            }
        }
    }

    #[test]
    fn strips_follow_the_simulator(m in machine()) {
        let limit = 5;
        let h = max_strip_height(&m, limit).unwrap();
        match m.run(&[], limit as u64 + 1).unwrap() {
            RunResult::Halted { steps, .. } => prop_assert_eq!(h, (steps as usize).min(limit)),
            RunResult::Running => prop_assert_eq!(h, limit),
        }
    }
}

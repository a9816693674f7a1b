//! Acceptance suite: one PASS/FAIL line per criterion on standard output,
//! timings on standard error. Exits nonzero if any criterion fails.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use sftkit::blocks::enumerate_admissible_blocks;
use sftkit::codes::{Rule, SlidingBlockCode};
use sftkit::constructions::{
    disjoint_union, empty_sft, full_shift_k, golden_mean, product, product_components, robinson_tileset,
    union_components, Side,
};
use sftkit::entropy::{count_admissible_blocks_sided, entropy_upper_bound};
use sftkit::format::parse_tm;
use sftkit::tm::{max_strip_height, RunResult};
use sftkit::verify::{
    check_factor_inclusion, check_surjectivity, min_legal_k, prove_empty, prove_nonempty, search_conjugacy,
    verify_conjugacy_certificate, BlockClass, ConjugacyCertificate,
};
use sftkit::wang::{sft_to_wang, wang_to_sft, WangTile, WangTileset};
use sftkit::{Alphabet, SftSpec, Symbol, Verdict};

const ENTROPY_TOL: f64 = 1e-12;
const STRIP_LIMIT: usize = 12;
const STRIP_OFFSET: usize = 0;
const ROBINSON_BUDGET: usize = 4;

/// Outcome of one criterion: pass flag and a transcript of everything it
/// computed, in canonical order.
struct Outcome {
    pass: bool,
    log: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, log: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl std::fmt::Display) {
        let _ = writeln!(self.log, "{} {what}", if ok { "ok" } else { "FAILED" });
        self.pass &= ok;
    }
}

fn c1_entropy() -> Outcome {
    let mut o = Outcome::new();
    for k in [2usize, 3] {
        let x = full_shift_k(k, 2);
        for n in 1..=3usize {
            let e = entropy_upper_bound(&x, n).unwrap();
            let want = BigUint::from(k).pow((n * n) as u32);
            let v = e.value.unwrap_or(f64::NAN);
            let ok = e.count == want && (v - (k as f64).log2()).abs() <= ENTROPY_TOL;
            o.check(ok, format!("k={k} n={n} count={} value={v}", e.count));
        }
    }
    o
}

fn mutate(f: &SlidingBlockCode, key: &[Symbol]) -> SlidingBlockCode {
    let Rule::Table(t) = f.rule() else { panic!("sft_to_wang yields a table code") };
    let mut entries = t.entries.clone();
    let old = entries[key];
    entries.insert(key.to_vec(), Symbol::from((old.index() + 1) % f.target().len()));
    SlidingBlockCode::table(f.source().clone(), f.target().clone(), f.dim(), f.radius(), entries, t.default).unwrap()
}

fn c2_certificate() -> Outcome {
    let mut o = Outcome::new();
    let x = golden_mean(2);
    let (t, f, g) = sft_to_wang(&x).unwrap();
    let y = wang_to_sft(&t);
    let k = min_legal_k(&x, &y, &f, &g).unwrap();
    let cert = ConjugacyCertificate { forward: f.clone(), backward: g.clone(), k };
    let v = verify_conjugacy_certificate(&x, &y, &cert).unwrap();
    o.check(v.is_proven(), format!("tiles={} k={k} verdict={}", t.len(), v.status()));
    let Rule::Table(table) = f.rule() else { panic!("sft_to_wang yields a table code") };
    let mut refuted = 0;
    for key in table.entries.keys() {
        let bad = ConjugacyCertificate { forward: mutate(&f, key), backward: g.clone(), k };
        match verify_conjugacy_certificate(&x, &y, &bad).unwrap() {
            Verdict::Refuted(c) => {
                let concrete = c.block.region().cube_radius() == Some(k);
                o.check(concrete, format!("entry {key:?}: refuted on a B_{k} block, expected {:?}", c.expected));
                refuted += 1;
            }
            other => o.check(false, format!("entry {key:?}: {}", other.status())),
        }
    }
    o.check(refuted == table.entries.len(), format!("mutations refuted: {refuted}/{}", table.entries.len()));
    o
}

fn all_maps(from: usize, to: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..from {
        out = out.into_iter().flat_map(|m| (0..to).map(move |s| [m.clone(), vec![Symbol::from(s)]].concat())).collect();
    }
    out
}

fn c3_non_conjugacy() -> Outcome {
    let mut o = Outcome::new();
    let (x, y) = (full_shift_k(2, 2), full_shift_k(3, 2));
    let mut accepted = 0;
    let mut pairs = 0;
    for fm in all_maps(2, 3) {
        for gm in all_maps(3, 2) {
            let f = SlidingBlockCode::symbol_map(x.alphabet().clone(), y.alphabet().clone(), 2, fm.clone()).unwrap();
            let g = SlidingBlockCode::symbol_map(y.alphabet().clone(), x.alphabet().clone(), 2, gm.clone()).unwrap();
            let k = min_legal_k(&x, &y, &f, &g).unwrap();
            let v = verify_conjugacy_certificate(&x, &y, &ConjugacyCertificate { forward: f, backward: g, k }).unwrap();
            accepted += usize::from(!v.is_refuted());
            pairs += 1;
        }
    }
    o.check(pairs == 72 && accepted == 0, format!("radius-0 pairs={pairs} accepted={accepted}"));
    let v = search_conjugacy(&x, &y, 0, 1).unwrap();
    o.check(v.is_unknown(), format!("search radius 0: {}", v.status()));
    o
}

fn pi1(x: &SftSpec, other: usize) -> SlidingBlockCode {
    let p = product(x, &full_shift_k(other, x.dim())).unwrap();
    let map = p.alphabet().symbols().map(|s| product_components(s, other).0).collect();
    SlidingBlockCode::symbol_map(p.alphabet().clone(), x.alphabet().clone(), x.dim(), map).unwrap()
}

fn c4_inclusion() -> Outcome {
    let mut o = Outcome::new();
    for (name, x) in [("full2", full_shift_k(2, 2)), ("golden", golden_mean(2))] {
        let f = pi1(&x, 2);
        let p = product(&x, &full_shift_k(2, 2)).unwrap();
        let r = f.radius() + x.radius();
        let v = check_factor_inclusion(&f, &p, &x, r).unwrap();
        o.check(v.is_proven(), format!("pi1 onto {name} at r={r}: {}", v.status()));
    }
    let g = golden_mean(2);
    let flip = SlidingBlockCode::symbol_map(g.alphabet().clone(), g.alphabet().clone(), 2, vec![Symbol(1), Symbol(0)]).unwrap();
    let r = flip.radius() + g.radius();
    let v = check_factor_inclusion(&flip, &g, &g, r).unwrap();
    let adjacent_ones = match &v {
        Verdict::Unknown(b) => b.suspect.as_ref().is_some_and(|s| {
            let img = flip.apply_to_block(s).unwrap();
            !g.is_admissible(&img.to_pattern()).unwrap()
        }),
        _ => false,
    };
    o.check(v.is_unknown() && adjacent_ones, format!("flip at r={r}: {} with adjacent 1s in the image", v.status()));
    o
}

fn c5_surjectivity() -> Outcome {
    let mut o = Outcome::new();
    let (one, two) = (full_shift_k(1, 2), full_shift_k(2, 2));
    let c = SlidingBlockCode::constant(one.alphabet().clone(), two.alphabet().clone(), 2, Symbol(0)).unwrap();
    let rep = check_surjectivity(&c, &one, &two, 0, 1, 1).unwrap();
    let ok = match &rep.verdict {
        Verdict::Refuted(r) => r.block.region().cube_radius() == Some(0) && r.witness.periods().iter().all(|&p| p == 1),
        _ => false,
    };
    o.check(ok, format!("constant: {} at n=0", rep.verdict.status()));
    let cases = [("full2 d=1", full_shift_k(2, 1), 2), ("golden d=1", golden_mean(1), 2), ("golden d=2", golden_mean(2), 1)];
    for (name, x, n_max) in cases {
        let id = SlidingBlockCode::identity(x.alphabet(), x.dim());
        for n in 0..=n_max {
            let rep = check_surjectivity(&id, &x, &x, n, 1, 1).unwrap();
            let all = rep.blocks.iter().all(|(_, c)| matches!(c, BlockClass::SatisfiedByPreimage(_)));
            o.check(all && rep.verdict.is_proven(), format!("identity on {name} n={n}: {} blocks", rep.blocks.len()));
        }
    }
    o
}

fn c6_emptiness() -> Outcome {
    let mut o = Outcome::new();
    let t = WangTileset::new(vec![WangTile::new("a", "b", "a", "c")]).unwrap();
    let v = prove_empty(&wang_to_sft(&t), 3);
    o.check(v == Verdict::Proven(1), format!("mismatched tile: {v:?}"));
    let v = prove_empty(&empty_sft(&Alphabet::numbered(2), 2), 3);
    o.check(v == Verdict::Proven(0), format!("empty spec: {v:?}"));
    let v = prove_nonempty(&golden_mean(2), 2);
    let ok = matches!(&v, Verdict::Proven(c) if c.periods() == [1, 1] && c.cells() == [Symbol(0)]);
    o.check(ok, format!("golden mean: {v:?}"));
    o
}

fn c7_robinson() -> Outcome {
    let mut o = Outcome::new();
    let x = wang_to_sft(&robinson_tileset());
    let v = prove_nonempty(&x, ROBINSON_BUDGET);
    o.check(v.is_unknown(), format!("tiles={} nonempty budget {ROBINSON_BUDGET}: {}", x.alphabet().len(), v.status()));
    let v = prove_empty(&x, ROBINSON_BUDGET);
    o.check(v.is_unknown(), format!("empty n_max {ROBINSON_BUDGET}: {}", v.status()));
    let first = enumerate_admissible_blocks(&x, ROBINSON_BUDGET).next();
    o.check(first.is_some(), format!("admissible block at radius {ROBINSON_BUDGET}: {}", first.is_some()));
    o
}

fn c8_strips() -> Outcome {
    let mut o = Outcome::new();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    for name in ["stuck", "three_steps", "walker"] {
        let m = parse_tm(&std::fs::read_to_string(format!("{dir}/{name}.tm")).unwrap()).unwrap();
        let h = max_strip_height(&m, STRIP_LIMIT).unwrap();
        let ok = match m.run(&[], STRIP_LIMIT as u64 + 1).unwrap() {
            RunResult::Halted { steps, .. } => h == steps as usize + STRIP_OFFSET,
            RunResult::Running => h == STRIP_LIMIT,
        };
        o.check(ok, format!("{name}: strip height {h} (limit {STRIP_LIMIT})"));
    }
    o
}

/// Independent oracle: colourings of the 2x2 corner box accepted by `ok`.
fn brute(k: usize, ok: impl Fn(&[usize; 4]) -> bool) -> BigUint {
    let mut n = 0u64;
    for code in 0..k.pow(4) {
        let c = [code % k, code / k % k, code / (k * k) % k, code / (k * k * k)];
        n += u64::from(ok(&c));
    }
    BigUint::from(n)
}

/// Cells in the order (0,0) (0,1) (1,0) (1,1); axis pairs are (0,1), (2,3),
/// (0,2), (1,3).
const PAIRS: [(usize, usize); 4] = [(0, 1), (2, 3), (0, 2), (1, 3)];

fn golden_ok(c: &[usize]) -> bool {
    PAIRS.iter().all(|&(a, b)| !(c[a] == 1 && c[b] == 1))
}

fn c9_algebra() -> Outcome {
    let mut o = Outcome::new();
    let base: [(&str, SftSpec, fn(&[usize]) -> bool); 2] =
        [("golden", golden_mean(2), golden_ok), ("full2", full_shift_k(2, 2), |_| true)];
    for (na, a, oka) in &base {
        for (nb, b, okb) in &base {
            let (ka, kb) = (a.alphabet().len(), b.alphabet().len());
            let p = product(a, b).unwrap();
            let want = brute(ka * kb, |c| {
                let l: Vec<usize> = c.iter().map(|&s| product_components(Symbol::from(s), kb).0.index()).collect();
                let r: Vec<usize> = c.iter().map(|&s| product_components(Symbol::from(s), kb).1.index()).collect();
                oka(&l) && okb(&r)
            });
            let got = count_admissible_blocks_sided(&p, 2).unwrap();
            let split = count_admissible_blocks_sided(a, 2).unwrap() * count_admissible_blocks_sided(b, 2).unwrap();
            o.check(got == want && got == split, format!("product {na} x {nb}: {got}"));
            let u = disjoint_union(a, b).unwrap();
            let want = brute(ka + kb, |c| {
                let t: Vec<(Side, usize)> = c.iter().map(|&s| {
                    let (side, v) = union_components(Symbol::from(s), ka);
                    (side, v.index())
                }).collect();
                let raw: Vec<usize> = t.iter().map(|x| x.1).collect();
                if t.iter().all(|x| x.0 == Side::Left) {
                    oka(&raw)
                } else if t.iter().all(|x| x.0 == Side::Right) {
                    okb(&raw)
                } else {
                    false
                }
            });
            let got = count_admissible_blocks_sided(&u, 2).unwrap();
            let split = count_admissible_blocks_sided(a, 2).unwrap() + count_admissible_blocks_sided(b, 2).unwrap();
            o.check(got == want && got == split, format!("union {na} + {nb}: {got}"));
        }
    }
    o
}

type Criterion = (usize, &'static str, Duration, fn() -> Outcome);

const CRITERIA: [Criterion; 9] = [
    (1, "full-shift entropy exactness", Duration::from_secs(1), c1_entropy),
    (2, "conjugacy certificate round-trip", Duration::from_secs(30), c2_certificate),
    (3, "non-conjugacy evidence", Duration::from_secs(5), c3_non_conjugacy),
    (4, "factor-inclusion soundness", Duration::from_secs(10), c4_inclusion),
    (5, "surjectivity refutation", Duration::from_secs(5), c5_surjectivity),
    (6, "emptiness both ways", Duration::from_secs(1), c6_emptiness),
    (7, "Robinson aperiodicity evidence", Duration::from_secs(600), c7_robinson),
    (8, "TM-strip/simulator agreement", Duration::from_secs(60), c8_strips),
    (9, "operator algebra", Duration::from_secs(10), c9_algebra),
];

fn transcript(threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| CRITERIA.iter().map(|(i, _, _, f)| format!("[{i}]\n{}", f().log)).collect())
}

fn main() {
    let mut failed = 0;
    let mut first = String::new();
    for (i, name, limit, f) in CRITERIA {
        let t = Instant::now();
        let out = f();
        let took = t.elapsed();
        eprintln!("criterion {i}: {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs());
        eprint!("{}", out.log);
        let in_time = took < limit;
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        let why = if out.pass && !in_time { " (over time limit)" } else { "" };
        println!("{} {i} {name}{why}", if pass { "PASS" } else { "FAIL" });
        let _ = write!(first, "[{i}]\n{}", out.log);
    }
    let t = Instant::now();
    let same = [1, 4].iter().all(|&n| transcript(n) == first);
    eprintln!("criterion 10: {:.2}s", t.elapsed().as_secs_f64());
    failed += usize::from(!same);
    println!("{} 10 determinism across runs and worker counts", if same { "PASS" } else { "FAIL" });
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::fs;

use sftkit::codes::SlidingBlockCode;
use sftkit::constructions::*;
use sftkit::entropy::{count_admissible_blocks_sided, entropy_upper_bound};
use sftkit::format::{parse_code, parse_sft, parse_tm, write_sft, write_wang, SftFile};
use sftkit::tm::RunResult;
use sftkit::verify::{check_factor_inclusion, min_legal_k, prove_empty, verify_conjugacy_certificate, ConjugacyCertificate};
use sftkit::{Alphabet, Block, BoxRegion, SftSpec, Symbol};

fn fixture(name: &str) -> String {
    fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn certify(x: &SftSpec, y: &SftSpec, f: Vec<Symbol>, g: Vec<Symbol>) -> bool {
    let f = SlidingBlockCode::symbol_map(x.alphabet().clone(), y.alphabet().clone(), x.dim(), f).unwrap();
    let g = SlidingBlockCode::symbol_map(y.alphabet().clone(), x.alphabet().clone(), x.dim(), g).unwrap();
    let k = min_legal_k(x, y, &f, &g).unwrap();
    verify_conjugacy_certificate(x, y, &ConjugacyCertificate { forward: f, backward: g, k }).unwrap().is_proven()
}

fn counts(x: &SftSpec, ns: std::ops::RangeInclusive<usize>) -> Vec<String> {
    ns.map(|n| count_admissible_blocks_sided(x, n).unwrap().to_string()).collect()
}

#[test]
fn robinson_matches_the_golden_file() {
    let t = robinson_tileset();
    assert_eq!(t.len(), 56);
    assert_eq!(write_wang(&t), fixture("robinson.wang"));
    assert_eq!(parse_sft(&fixture("robinson.wang")).unwrap(), SftFile::Wang(t));
}

#[test]
fn machine_fixtures_run_as_documented() {
    let steps = |name: &str| match parse_tm(&fixture(name)).unwrap().run(&[], 100).unwrap() {
        RunResult::Halted { steps, .. } => Some(steps),
        RunResult::Running => None,
    };
    assert_eq!(steps("stuck.tm"), Some(0));
    assert_eq!(steps("three_steps.tm"), Some(3));
    assert_eq!(steps("walker.tm"), None);
}

#[test]
fn certificate_fixture_verifies() {
    let x = parse_sft(&fixture("golden_mean.sft")).unwrap().into_sft();
    assert_eq!(x, golden_mean(2));
    let y = parse_sft(&fixture("golden_cert/golden_mean.wang")).unwrap().into_sft();
    let f = parse_code(&fixture("golden_cert/forward.sbc")).unwrap();
    let g = parse_code(&fixture("golden_cert/backward.sbc")).unwrap();
    let k = min_legal_k(&x, &y, &f, &g).unwrap();
    assert_eq!(k, 3);
    assert!(verify_conjugacy_certificate(&x, &y, &ConjugacyCertificate { forward: f, backward: g, k }).unwrap().is_proven());
}

#[test]
fn small_sfts_behave() {
    assert_eq!(counts(&full_shift_k(1, 2), 1..=3), ["1", "1", "1"]);
    assert_eq!(counts(&full_shift_k(3, 2), 1..=1), ["3"]);
    assert_eq!(counts(&lift_dimension(&full_shift_k(2, 2), 3).unwrap(), 1..=2), ["2", "16"]);
    let e = empty_sft(&Alphabet::numbered(2), 2);
    assert_eq!(prove_empty(&e, 2), sftkit::Verdict::Proven(0));
    assert_eq!(counts(&e, 1..=3), ["0", "0", "0"]);
    let g = golden_mean(2);
    let u = disjoint_union(&g, &e).unwrap();
    assert_eq!(counts(&u, 1..=3), counts(&g, 1..=3));
    let s = singleton_sft("a", 2).unwrap();
    assert_eq!(counts(&s, 1..=3), ["1", "1", "1"]);
    assert_eq!(entropy_upper_bound(&s, 3).unwrap().value, Some(0.0));
    let to_s = SlidingBlockCode::constant(g.alphabet().clone(), s.alphabet().clone(), 2, Symbol(0)).unwrap();
    assert!(check_factor_inclusion(&to_s, &g, &s, 0).unwrap().is_proven());
}

#[test]
fn lift_keeps_side_counts() {
    for base in [full_shift_k(2, 1), golden_mean(1)] {
        let l = lift_dimension(&base, 2).unwrap();
        assert_eq!(counts(&l, 1..=3), counts(&base, 1..=3));
        let z = lift_dimension(&empty_sft(&Alphabet::numbered(2), 1), 2).unwrap();
        assert_eq!(prove_empty(&z, 1), sftkit::Verdict::Proven(0));
    }
}

#[test]
fn operator_identities_hold_up_to_certificates() {
    let (g, f2, f1) = (golden_mean(2), full_shift_k(2, 2), full_shift_k(1, 2));
    // X x F1 ~ X
    let p = product(&g, &f1).unwrap();
    assert!(certify(&p, &g, vec![Symbol(0), Symbol(1)], vec![Symbol(0), Symbol(1)]));
    // X + empty ~ X
    let u = disjoint_union(&g, &empty_sft(&Alphabet::numbered(2), 2)).unwrap();
    assert!(certify(&g, &u, vec![Symbol(0), Symbol(1)], vec![Symbol(0), Symbol(1), Symbol(0), Symbol(0)]));
    // (A x B) x C ~ A x (B x C), in one dimension
    let (g1, f21) = (golden_mean(1), full_shift_k(2, 1));
    let (ka, kb, kc) = (2usize, 2usize, 2usize);
    let left = product(&product(&g1, &f21).unwrap(), &g1).unwrap();
    let right = product(&g1, &product(&f21, &g1).unwrap()).unwrap();
    let assoc: Vec<Symbol> = (0..ka * kb * kc)
        .map(|s| {
            let (ab, c) = product_components(Symbol::from(s), kc);
            let (a, b) = product_components(ab, kb);
            product_symbol(a, product_symbol(b, c, kc), kb * kc)
        })
        .collect();
    let back: Vec<Symbol> = (0..ka * kb * kc)
        .map(|s| {
            let (a, bc) = product_components(Symbol::from(s), kb * kc);
            let (b, c) = product_components(bc, kc);
            product_symbol(product_symbol(a, b, kb), c, kc)
        })
        .collect();
    assert!(certify(&left, &right, assoc, back));
    // A + B ~ B + A
    let ab = disjoint_union(&g, &f2).unwrap();
    let ba = disjoint_union(&f2, &g).unwrap();
    let swap: Vec<Symbol> = (0..4).map(|s| Symbol::from((s + 2) % 4)).collect();
    assert!(certify(&ab, &ba, swap.clone(), swap));
}

#[test]
fn entropy_bounds_of_conjugate_pairs_converge() {
    let x = golden_mean(2);
    let t = parse_sft(&fixture("golden_cert/golden_mean.wang")).unwrap().into_sft();
    let gaps: Vec<f64> = (1..=4)
        .map(|n| (entropy_upper_bound(&t, n).unwrap().value.unwrap() - entropy_upper_bound(&x, n).unwrap().value.unwrap()).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn hardness_instance_shape() {
    let x = golden_mean(2);
    let m = parse_tm(&fixture("stuck.tm")).unwrap();
    let rm = anchored_sft(&m).unwrap();
    let y = conj_hardness_instance(&x, &m).unwrap();
    let kx = x.alphabet().len();
    assert_eq!(y.alphabet().len(), kx + rm.alphabet().len() * (kx + 1));
    assert_eq!(write_sft(&y), write_sft(&conj_hardness_instance(&x, &m).unwrap()));
    // X-tagged blocks are admissible exactly when they are in X.
    let region = BoxRegion::cube(2, 1);
    for code in 0..1u32 << 9 {
        let cells: Vec<Symbol> = (0..9).map(|i| Symbol((code >> i) & 1)).collect();
        let b = Block::new(region.clone(), cells);
        assert_eq!(y.is_admissible(&b.to_pattern()).unwrap(), x.is_admissible(&b.to_pattern()).unwrap());
    }
    // The right component carries at least log2(|X| + 1) bits per cell.
    let right = product(&rm, &full_shift_k(kx + 1, 2)).unwrap();
    let e = entropy_upper_bound(&right, 1).unwrap();
    assert!(e.value.unwrap() >= ((kx + 1) as f64).log2());
}

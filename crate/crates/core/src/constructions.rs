//! Basic SFTs and operators on them: full shifts, the empty and singleton
//! SFTs, products, disjoint unions and dimension lifts, plus the layered
//! Robinson/Turing machine tileset and the instance built from it.

use std::collections::BTreeSet;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Result, SftError};
use crate::geom::Point;
use crate::pattern::Pattern;
use crate::sft::{ShapeGroup, SftBuilder, SftSpec};
use crate::tm::{TuringMachine, GROUND};
use crate::wang::{wang_to_sft, WangTile, WangTileset};

pub use crate::robinson::robinson_tileset;
pub use crate::tm::tm_strip_tileset;

pub fn full_shift(a: &Alphabet, dim: usize) -> SftSpec {
    SftBuilder::new(a.clone(), dim).build()
}

/// Full shift on the symbols `0..k`.
pub fn full_shift_k(k: usize, dim: usize) -> SftSpec {
    full_shift(&Alphabet::numbered(k), dim)
}

/// Every single-cell pattern is forbidden, so no configuration exists.
pub fn empty_sft(a: &Alphabet, dim: usize) -> SftSpec {
    let mut b = SftBuilder::new(a.clone(), dim);
    for s in a.symbols() {
        b.forbid_tuple(&[vec![0; dim]], vec![s]);
    }
    b.build()
}

/// The one-symbol full shift: a single uniform configuration.
pub fn singleton_sft(name: &str, dim: usize) -> Result<SftSpec> {
    Ok(full_shift(&Alphabet::new([name])?, dim))
}

/// Binary configurations with no two adjacent 1s along any axis.
pub fn golden_mean(dim: usize) -> SftSpec {
    let mut b = SftBuilder::new(Alphabet::numbered(2), dim);
    for i in 0..dim {
        let mut e = vec![0; dim];
        e[i] = 1;
        b.forbid_pairs(e, |a, c| a == 1 && c == 1);
    }
    b.build()
}

/// Name of the product symbol `(a,b)`.
pub fn product_name(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Product symbol index for components `i` and `j`.
pub fn product_symbol(i: Symbol, j: Symbol, right_len: usize) -> Symbol {
    Symbol::from(i.index() * right_len + j.index())
}

/// Components of a product symbol.
pub fn product_components(s: Symbol, right_len: usize) -> (Symbol, Symbol) {
    (Symbol::from(s.index() / right_len), Symbol::from(s.index() % right_len))
}

fn all_tuples(k: usize, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..k).map(move |s| {
                    let mut u = t.clone();
                    u.push(Symbol::from(s));
                    u
                })
            })
            .collect();
    }
    out
}

fn group_with<'a>(x: &'a SftSpec, shape: &[Point]) -> Option<&'a ShapeGroup> {
    x.groups().iter().find(|g| g.offsets() == shape).map(|g| g.as_ref())
}

/// Configurations pairing a configuration of `x` with one of `y` cell by cell.
pub fn product(x: &SftSpec, y: &SftSpec) -> Result<SftSpec> {
    if x.dim() != y.dim() {
        return Err(SftError::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let (kx, ky) = (x.alphabet().len(), y.alphabet().len());
    let mut names = Vec::with_capacity(kx * ky);
    for a in x.alphabet().names() {
        for b in y.alphabet().names() {
            names.push(product_name(a, b));
        }
    }
    let alphabet = Alphabet::new(names)?;
    let shapes: BTreeSet<Vec<Point>> =
        x.groups().iter().chain(y.groups()).map(|g| g.offsets().to_vec()).collect();
    let mut groups = Vec::new();
    for shape in shapes {
        let gx = group_with(x, &shape);
        let gy = group_with(y, &shape);
        let len = shape.len();
        let bad = |t: &[Symbol]| {
            let (l, r): (Vec<Symbol>, Vec<Symbol>) = t.iter().map(|&s| product_components(s, ky)).unzip();
            gx.is_some_and(|g| g.is_forbidden(&l)) || gy.is_some_and(|g| g.is_forbidden(&r))
        };
        let fallback = || {
            let mut out = BTreeSet::new();
            if let Some(g) = gx {
                for t in g.tuples() {
                    for u in all_tuples(ky, len) {
                        out.insert(t.iter().zip(&u).map(|(&a, &b)| product_symbol(a, b, ky)).collect());
                    }
                }
            }
            if let Some(g) = gy {
                for u in g.tuples() {
                    for t in all_tuples(kx, len) {
                        out.insert(t.iter().zip(&u).map(|(&a, &b)| product_symbol(a, b, ky)).collect());
                    }
                }
            }
            out.into_iter().collect()
        };
        groups.push(ShapeGroup::from_predicate(shape, kx * ky, bad, fallback));
    }
    Ok(SftSpec::from_parts(alphabet, x.dim(), groups))
}

/// Which side of a disjoint union a symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Tag and original symbol of a union symbol.
pub fn union_components(s: Symbol, left_len: usize) -> (Side, Symbol) {
    if s.index() < left_len {
        (Side::Left, s)
    } else {
        (Side::Right, Symbol::from(s.index() - left_len))
    }
}

/// Tagged copies of both alphabets, with every axis-adjacent pair of
/// differently tagged symbols forbidden: each configuration lies entirely
/// on one side.
pub fn disjoint_union(x: &SftSpec, y: &SftSpec) -> Result<SftSpec> {
    if x.dim() != y.dim() {
        return Err(SftError::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let d = x.dim();
    let kx = x.alphabet().len();
    let k = kx + y.alphabet().len();
    let names = x
        .alphabet()
        .names()
        .iter()
        .map(|n| format!("L:{n}"))
        .chain(y.alphabet().names().iter().map(|n| format!("R:{n}")));
    let alphabet = Alphabet::new(names)?;
    let mut shapes: BTreeSet<Vec<Point>> =
        x.groups().iter().chain(y.groups()).map(|g| g.offsets().to_vec()).collect();
    let axes: Vec<Vec<Point>> = (0..d)
        .map(|i| {
            let mut e = vec![0; d];
            e[i] = 1;
            vec![vec![0; d], e]
        })
        .collect();
    shapes.extend(axes.iter().cloned());
    let mut groups = Vec::new();
    for shape in shapes {
        let gx = group_with(x, &shape);
        let gy = group_with(y, &shape);
        let mixing = axes.contains(&shape);
        let bad = |t: &[Symbol]| {
            let tagged: Vec<(Side, Symbol)> = t.iter().map(|&s| union_components(s, kx)).collect();
            let side = tagged[0].0;
            if tagged.iter().any(|(s, _)| *s != side) {
                return mixing;
            }
            let raw: Vec<Symbol> = tagged.iter().map(|(_, s)| *s).collect();
            match side {
                Side::Left => gx.is_some_and(|g| g.is_forbidden(&raw)),
                Side::Right => gy.is_some_and(|g| g.is_forbidden(&raw)),
            }
        };
        let fallback = || {
            let mut out: BTreeSet<Vec<Symbol>> = BTreeSet::new();
            if let Some(g) = gx {
                out.extend(g.tuples());
            }
            if let Some(g) = gy {
                out.extend(g.tuples().map(|t| t.iter().map(|s| Symbol::from(s.index() + kx)).collect()));
            }
            if mixing {
                for a in 0..k {
                    for b in 0..k {
                        if (a < kx) != (b < kx) {
                            out.insert(vec![Symbol::from(a), Symbol::from(b)]);
                        }
                    }
                }
            }
            out.into_iter().collect()
        };
        groups.push(ShapeGroup::from_predicate(shape, k, bad, fallback));
    }
    Ok(SftSpec::from_parts(alphabet, d, groups))
}

/// Embeds `x` in dimension `target` by forcing every new axis to be constant.
pub fn lift_dimension(x: &SftSpec, target: usize) -> Result<SftSpec> {
    let d = x.dim();
    if target <= d {
        return Err(SftError::InvalidArgument(format!("target dimension {target} must exceed {d}")));
    }
    let mut b = SftBuilder::new(x.alphabet().clone(), target);
    for p in x.forbidden_patterns() {
        let lifted = Pattern::from_cells(
            target,
            p.iter().map(|(pt, s)| (pt.iter().copied().chain(std::iter::repeat_n(0, target - d)).collect(), s)),
        )?;
        b.forbid(&lifted)?;
    }
    for i in d..target {
        let mut e = vec![0; target];
        e[i] = 1;
        b.forbid_pairs(e, |a, c| a != c);
    }
    Ok(b.build())
}

/// Whether a Robinson tile is a small cross facing north-east: every main
/// arrow points out, the cell has even coordinates and both its east and
/// north edges carry a side mark.
pub fn is_anchor(t: &WangTile) -> bool {
    let b = |c: &str, i: usize| c.as_bytes()[i];
    b(&t.west, 0) == b'<'
        && b(&t.east, 0) == b'>'
        && b(&t.south, 0) == b'v'
        && b(&t.north, 0) == b'^'
        && t.east.ends_with("00")
        && b(&t.east, 1) != b'.'
        && b(&t.north, 1) != b'.'
}

fn pair_colour(a: &str, b: &str) -> String {
    format!("{a}|{b}")
}

/// Robinson tiles layered with the computation tiles of `m` (plus an all
/// `void` tile), the seed allowed only on anchor crosses. Returns the
/// tileset and the indices of its seed tiles.
pub fn anchored_tileset(m: &TuringMachine) -> Result<(WangTileset, Vec<usize>)> {
    let rob = robinson_tileset();
    let (strip, seed) = tm_strip_tileset(m)?;
    let mut layer = strip.tiles().to_vec();
    layer.push(WangTile::new(GROUND, GROUND, GROUND, GROUND));
    let mut tiles = Vec::new();
    let mut seeds = Vec::new();
    for r in rob.tiles() {
        for (j, c) in layer.iter().enumerate() {
            if j == seed && !is_anchor(r) {
                continue;
            }
            if j == seed {
                seeds.push(tiles.len());
            }
            tiles.push(WangTile::new(
                &pair_colour(&r.north, &c.north),
                &pair_colour(&r.east, &c.east),
                &pair_colour(&r.south, &c.south),
                &pair_colour(&r.west, &c.west),
            ));
        }
    }
    Ok((WangTileset::new(tiles)?, seeds))
}

/// The SFT of [`anchored_tileset`].
pub fn anchored_sft(m: &TuringMachine) -> Result<SftSpec> {
    Ok(wang_to_sft(&anchored_tileset(m)?.0))
}

/// `x` next to the anchored SFT of `m` times a full shift on one more
/// symbol than `x` has.
pub fn conj_hardness_instance(x: &SftSpec, m: &TuringMachine) -> Result<SftSpec> {
    if x.dim() != 2 {
        return Err(SftError::DimensionMismatch { expected: 2, found: x.dim() });
    }
    let f = full_shift_k(x.alphabet().len() + 1, 2);
    disjoint_union(x, &product(&anchored_sft(m)?, &f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::admissible_blocks_in;
    use crate::geom::BoxRegion;

    fn count(x: &SftSpec, n: usize) -> usize {
        admissible_blocks_in(x, BoxRegion::corner(x.dim(), n)).count()
    }

    #[test]
    fn empty_and_singleton() {
        let e = empty_sft(&Alphabet::numbered(3), 2);
        assert_eq!(count(&e, 1), 0);
        let s = singleton_sft("a", 2).unwrap();
        for n in 1..4 {
            assert_eq!(count(&s, n), 1);
        }
    }

    #[test]
    fn product_and_union_names() {
        let g = golden_mean(2);
        let f = full_shift_k(2, 2);
        let p = product(&g, &f).unwrap();
        assert_eq!(p.alphabet().name(Symbol(3)), "(1,1)");
        let u = disjoint_union(&g, &f).unwrap();
        assert_eq!(u.alphabet().name(Symbol(2)), "R:0");
        let mixed = Pattern::from_cells(2, [(vec![0, 0], Symbol(0)), (vec![0, 1], Symbol(2))]).unwrap();
        assert!(!u.is_admissible(&mixed).unwrap());
    }

    #[test]
    fn lift_forces_constant_new_axes() {
        let base = full_shift_k(2, 1);
        let l = lift_dimension(&base, 2).unwrap();
        for n in 1..4 {
            assert_eq!(count(&l, n), count(&base, n));
        }
        assert!(lift_dimension(&base, 1).is_err());
    }

    #[test]
    fn anchors_and_seeds() {
        let rob = robinson_tileset();
        let anchors = rob.tiles().iter().filter(|t| is_anchor(t)).count();
        assert!(anchors >= 1);
        let m = crate::tm::tests::walker();
        let (t, seeds) = anchored_tileset(&m).unwrap();
        let layer = tm_strip_tileset(&m).unwrap().0.len() + 1;
        assert_eq!(t.len(), rob.len() * (layer - 1) + anchors);
        assert_eq!(seeds.len(), anchors);
    }

    #[test]
    fn seeds_extend_only_while_the_machine_runs() {
        use crate::blocks::check_extensibility;
        use crate::verdict::Verdict;
        let seed_at_origin = |m: &TuringMachine| {
            let (t, seeds) = anchored_tileset(m).unwrap();
            let p = Pattern::from_cells(2, [(vec![0, 0], Symbol::from(seeds[0]))]).unwrap();
            (wang_to_sft(&t), p)
        };
        let (x, p) = seed_at_origin(&crate::tm::tests::three_steps());
        let v = check_extensibility(&p, &x, 5, 0).unwrap();
        assert!(matches!(v, Verdict::Refuted(crate::blocks::NonExtensible::NoBlock { radius: 4 })), "{v:?}");
        let (x, p) = seed_at_origin(&crate::tm::tests::walker());
        assert!(matches!(check_extensibility(&p, &x, 5, 0).unwrap(), Verdict::Unknown(_)));
    }

    #[test]
    fn hardness_instance_alphabet() {
        let g = golden_mean(2);
        let m = crate::tm::tests::stuck();
        let rm = anchored_sft(&m).unwrap();
        let y = conj_hardness_instance(&g, &m).unwrap();
        assert_eq!(y.alphabet().len(), 2 + rm.alphabet().len() * 3);
    }
}

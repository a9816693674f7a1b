//! Wang tilesets and their conversions to and from two-dimensional SFTs.

use std::collections::{BTreeMap, HashSet};

use crate::alphabet::{validate_name, Alphabet, Symbol};
use crate::blocks::enumerate_admissible_blocks;
use crate::codes::SlidingBlockCode;
use crate::error::{Result, SftError};
use crate::geom::BoxRegion;
use crate::sft::{SftBuilder, SftSpec};

/// Edge colors of one tile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WangTile {
    pub north: String,
    pub east: String,
    pub south: String,
    pub west: String,
}

impl WangTile {
    pub fn new(n: &str, e: &str, s: &str, w: &str) -> Self {
        WangTile { north: n.into(), east: e.into(), south: s.into(), west: w.into() }
    }
}

/// An ordered list of distinct tiles. The plane is `Z^2` with the first
/// coordinate pointing east and the second pointing north.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WangTileset {
    tiles: Vec<WangTile>,
}

impl WangTileset {
    pub fn new(tiles: Vec<WangTile>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &tiles {
            for c in [&t.north, &t.east, &t.south, &t.west] {
                validate_name(c)?;
            }
            if !seen.insert(t) {
                return Err(SftError::InvalidArgument(format!("duplicate tile {t:?}")));
            }
        }
        Ok(WangTileset { tiles })
    }

    pub fn tiles(&self) -> &[WangTile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Symbol names used for the tiles by [`wang_to_sft`].
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new((0..self.tiles.len()).map(|i| format!("t{i}"))).expect("tile names are valid")
    }
}

/// The SFT of valid tilings: horizontal neighbors must agree on the shared
/// vertical edge and vertical neighbors on the shared horizontal edge.
pub fn wang_to_sft(t: &WangTileset) -> SftSpec {
    let tiles = &t.tiles;
    let mut b = SftBuilder::new(t.alphabet(), 2);
    b.forbid_pairs(vec![0, 1], |a, c| tiles[a].north != tiles[c].south);
    b.forbid_pairs(vec![1, 0], |a, c| tiles[a].east != tiles[c].west);
    b.build()
}

/// The tileset of admissible `B_r` blocks of `x` (with `r = max(radius, 1)`),
/// glued along their overlaps, together with a conjugacy certificate: `F`
/// reads the window around each cell as a tile, `G` reads a tile's center.
pub fn sft_to_wang(x: &SftSpec) -> Result<(WangTileset, SlidingBlockCode, SlidingBlockCode)> {
    if x.dim() != 2 {
        return Err(SftError::DimensionMismatch { expected: 2, found: x.dim() });
    }
    let r = x.radius().max(1) as i32;
    let blocks: Vec<_> = enumerate_admissible_blocks(x, r as usize).collect();
    let edge = |b: &crate::geom::Block, lo: [i32; 2], size: [usize; 2], tag: char| {
        let sub = b.restrict(&BoxRegion::new(lo.to_vec(), size.to_vec())).expect("sub-box inside tile");
        let mut s = String::new();
        s.push(tag);
        for (i, c) in sub.cells().iter().enumerate() {
            if i > 0 {
                s.push('.');
            }
            s.push_str(&c.0.to_string());
        }
        s
    };
    let side = (2 * r + 1) as usize;
    let thin = (2 * r) as usize;
    let mut tiles = Vec::with_capacity(blocks.len());
    for b in &blocks {
        tiles.push(WangTile {
            north: edge(b, [-r, -r + 1], [side, thin], 'v'),
            east: edge(b, [-r + 1, -r], [thin, side], 'h'),
            south: edge(b, [-r, -r], [side, thin], 'v'),
            west: edge(b, [-r, -r], [thin, side], 'h'),
        });
    }
    let ts = WangTileset::new(tiles)?;
    let y_alpha = ts.alphabet();
    let entries: BTreeMap<_, _> =
        blocks.iter().enumerate().map(|(i, b)| (b.cells().to_vec(), Symbol::from(i))).collect();
    let f = SlidingBlockCode::table(x.alphabet().clone(), y_alpha.clone(), 2, r as usize, entries, None)?;
    let center = BoxRegion::cube(2, r as usize).index(&[0, 0]).expect("origin in cube");
    let g = SlidingBlockCode::symbol_map(y_alpha, x.alphabet().clone(), 2, blocks.iter().map(|b| b.cells()[center]).collect())?;
    Ok((ts, f, g))
}

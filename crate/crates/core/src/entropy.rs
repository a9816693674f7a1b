//! Block counts on corner boxes `[0,n)^d` and the resulting entropy bounds (base 2).

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Result, SftError};
use crate::geom::{Block, BoxRegion};
use crate::search::Grid;
use crate::sft::SftSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub n: usize,
    pub count: BigUint,
    /// `log2(count) / n^d`; `None` when the count is zero ("empty at n").
    pub value: Option<f64>,
}

/// Exact number of admissible patterns on `[0,n)^d`.
pub fn count_admissible_blocks_sided(x: &SftSpec, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(SftError::InvalidArgument("side length must be at least 1".into()));
    }
    Ok(Grid::boxed(BoxRegion::corner(x.dim(), n)).problem(x).count())
}

/// Upper bound `log2(E_n) / n^d` with `E_n` the admissible count, which
/// dominates the extensible count.
pub fn entropy_upper_bound(x: &SftSpec, n: usize) -> Result<EntropyEstimate> {
    let count = count_admissible_blocks_sided(x, n)?;
    let value = (!count.is_zero()).then(|| log2(&count) / (n as f64).powi(x.dim() as i32));
    Ok(EntropyEstimate { n, count, value })
}

pub fn log2(c: &BigUint) -> f64 {
    let bits = c.bits();
    if bits <= 1000 {
        return c.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    let top = (c >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

/// The same cells re-anchored at the origin corner.
pub fn to_corner(b: &Block) -> Block {
    let r = b.region();
    Block::new(BoxRegion::new(vec![0; r.dim()], r.size.clone()), b.cells().to_vec())
}

/// The same cells re-anchored around the origin; the sides must be odd.
pub fn to_centered(b: &Block) -> Option<Block> {
    let r = b.region().clone();
    let side = r.size[0];
    if side % 2 == 0 || r.size.iter().any(|&s| s != side) {
        return None;
    }
    Some(Block::new(BoxRegion::cube(r.dim(), side / 2), b.cells().to_vec()))
}

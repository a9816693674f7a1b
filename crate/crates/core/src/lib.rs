//! Subshifts of finite type, Wang tilesets and sliding block codes, with
//! budgeted semi-decision procedures for emptiness, extensibility,
//! conjugacy and factor maps.

pub mod alphabet;
pub mod blocks;
pub mod codes;
pub mod constructions;
pub mod entropy;
pub mod error;
pub mod format;
pub mod geom;
pub mod pattern;
pub(crate) mod search;
pub mod robinson;
pub mod sft;
pub mod tm;
pub mod verdict;
pub mod verify;
mod conj_search;
pub mod wang;

pub use alphabet::{Alphabet, Symbol};
pub use error::{Result, SftError};
pub use geom::{Block, BoxRegion, PeriodicConfig, Point};
pub use pattern::Pattern;
pub use sft::{SftBuilder, SftSpec};
pub use verdict::{Budget, Verdict};

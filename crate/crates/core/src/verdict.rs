//! Three-valued results of the budgeted semi-decision procedures.

use std::fmt;

use crate::geom::Block;

/// The budgets a procedure ran under, echoed back when it gives up.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub items: Vec<(String, String)>,
    pub note: Option<String>,
    /// A block that blocked a proof without refuting anything.
    pub suspect: Option<Block>,
}

impl Budget {
    pub fn new() -> Self {
        Budget::default()
    }

    pub fn with(mut self, name: &str, value: impl fmt::Display) -> Self {
        self.items.push((name.to_string(), value.to_string()));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn suspect(mut self, b: Block) -> Self {
        self.suspect = Some(b);
        self
    }
}

/// `Proven` and `Refuted` carry finitely checkable witnesses; `Unknown`
/// carries the budgets that were exhausted.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<P, R> {
    Proven(P),
    Refuted(R),
    Unknown(Budget),
}

impl<P, R> Verdict<P, R> {
    pub fn is_proven(&self) -> bool {
        matches!(self, Verdict::Proven(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Proven(_) => "proven",
            Verdict::Refuted(_) => "refuted",
            Verdict::Unknown(_) => "unknown",
        }
    }

    /// 0 proven, 1 refuted, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Proven(_) => 0,
            Verdict::Refuted(_) => 1,
            Verdict::Unknown(_) => 2,
        }
    }

    pub fn proven(self) -> Option<P> {
        match self {
            Verdict::Proven(p) => Some(p),
            _ => None,
        }
    }

    pub fn refuted(self) -> Option<R> {
        match self {
            Verdict::Refuted(r) => Some(r),
            _ => None,
        }
    }
}

/// Exit code for malformed input.
pub const EXIT_INPUT_ERROR: i32 = 64;

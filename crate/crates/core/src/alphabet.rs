//! Finite alphabets with a canonical symbol order.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Result, SftError};

/// A symbol, stored as its index in the owning alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Symbol {
    fn from(i: usize) -> Self {
        Symbol(i as u32)
    }
}

/// An ordered list of distinct symbol names. Construction order is the
/// canonical order used for every enumeration and tie-break.
#[derive(Clone)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

/// Symbol names are opaque, but must survive the line-oriented file formats.
pub fn validate_name(name: &str) -> Result<()> {
    let bad = name.is_empty()
        || name == "->"
        || name.ends_with(':')
        || name.starts_with('#')
        || name.chars().any(|c| c.is_whitespace() || c == ';' || c == '=' || c == '@');
    if bad {
        Err(SftError::InvalidSymbol(name.to_string()))
    } else {
        Ok(())
    }
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet { names: Vec::new(), index: HashMap::new() };
        for n in names {
            let n = n.into();
            validate_name(&n)?;
            if out.index.contains_key(&n) {
                return Err(SftError::DuplicateSymbol(n));
            }
            out.index.insert(n.clone(), Symbol(out.names.len() as u32));
            out.names.push(n);
        }
        Ok(out)
    }

    /// The alphabet `0, 1, ..., k-1`.
    pub fn numbered(k: usize) -> Self {
        Alphabet::new((0..k).map(|i| i.to_string())).expect("numeric names are valid")
    }

    pub fn empty() -> Self {
        Alphabet { names: Vec::new(), index: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        self.lookup(name).ok_or_else(|| SftError::UnknownSymbol(name.to_string()))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(Symbol::from)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.index() < self.names.len()
    }

    pub fn check(&self, s: Symbol) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(SftError::SymbolOutOfRange { index: s.index(), size: self.len() })
        }
    }

    /// A name not yet used, derived from `base` by repetition.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push_str(base);
        }
        name
    }

    /// This alphabet followed by one extra symbol.
    pub fn with_extra(&self, name: &str) -> Result<Alphabet> {
        Alphabet::new(self.names.iter().cloned().chain(std::iter::once(name.to_string())))
    }
}

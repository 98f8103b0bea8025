use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::SyntaxError;

/// Words the lexer treats as keywords; a name must never render as one.
pub(crate) const KEYWORDS: &[&str] = &[
    "let", "letrec", "in", "cons", "car", "cdr", "add1", "sub1",
];

/// A variable name: an identifier base plus a numeric index.
///
/// The index is how fresh names are made (`x`, `x1`, `x2`, ...). Index 0 is
/// not printed. Bases never end in a digit, so `x1` always reads back as
/// base `x`, index 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    base: Arc<str>,
    index: u32,
}

pub type NameSet = BTreeSet<Name>;

impl Name {
    pub fn new(base: &str, index: u32) -> Result<Self, SyntaxError> {
        if !is_valid_base(base) {
            return Err(SyntaxError::InvalidName(base.to_string()));
        }
        Ok(Name { base: Arc::from(base), index })
    }

    /// Builds a name from an identifier as written, splitting a trailing
    /// run of digits off as the index.
    pub fn from_ident(ident: &str) -> Result<Self, SyntaxError> {
        if KEYWORDS.contains(&ident) {
            return Err(SyntaxError::InvalidName(ident.to_string()));
        }
        let split = ident.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (base, digits) = ident.split_at(split);
        if digits.is_empty() {
            return Name::new(base, 0);
        }
        let index = digits
            .parse::<u32>()
            .map_err(|_| SyntaxError::InvalidName(ident.to_string()))?;
        Name::new(base, index)
    }

    /// Names outside the surface grammar (leading `%`). Used for the
    /// translator's reserved identifiers and the oracle's hole marker.
    pub(crate) fn reserved(base: &str) -> Self {
        Name { base: Arc::from(format!("%{base}")), index: 0 }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn with_index(&self, index: u32) -> Self {
        Name { base: Arc::clone(&self.base), index }
    }

    pub fn is_reserved(&self) -> bool {
        self.base.starts_with('%')
    }
}

fn is_valid_base(base: &str) -> bool {
    let mut chars = base.chars();
    let Some(first) = chars.next() else { return false };
    if !(first.is_ascii_alphabetic() || first == '_') {
        return false;
    }
    if !base.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    !base.ends_with(|c: char| c.is_ascii_digit()) && !KEYWORDS.contains(&base)
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}{}", self.base, self.index)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Returns `base` itself if it is not in `avoid`, otherwise the same base
/// with the smallest larger index that is. Indices whose rendering would
/// collide with a keyword (`add1`, `sub1`) are skipped.
pub fn fresh(base: &Name, avoid: &NameSet) -> Name {
    let mut index = base.index;
    loop {
        let candidate = base.with_index(index);
        let rendered = candidate.to_string();
        if !avoid.contains(&candidate) && !KEYWORDS.contains(&rendered.as_str()) {
            return candidate;
        }
        index += 1;
    }
}

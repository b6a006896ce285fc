//! PROSITE-style patterns compiled to minimal complete DFAs over the
//! amino-acid alphabet.
//!
//! Supported: elements separated by `-`, single residues, `x`, `[..]`,
//! `{..}`, a `(n)` or `(n,m)` repetition suffix, `<` before the first
//! element, `>` after the last one and an optional terminating `.`.
//! Without anchors a pattern matches any string that contains an
//! occurrence.

mod minimize;
mod nfa;

pub use minimize::minimize;
pub use nfa::{subset_construction, thompson, Nfa};

use crate::automaton::{Alphabet, Dfa, AMINO_ACIDS};

/// Default cap on NFA (and DFA) states created while compiling.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Literal(u8),
    /// Sorted, deduplicated.
    AnyOf(Vec<u8>),
    /// Sorted, deduplicated.
    NoneOf(Vec<u8>),
    Wildcard,
    Repeat(Box<Element>, u32, u32),
    AnchorStart,
    AnchorEnd,
}

impl Element {
    /// Whether this single-position element accepts `glyph`. Repeats and
    /// anchors do not consume exactly one glyph and return `false`.
    pub fn accepts(&self, glyph: u8) -> bool {
        match self {
            Element::Literal(g) => *g == glyph,
            Element::AnyOf(set) => set.contains(&glyph),
            Element::NoneOf(set) => !set.contains(&glyph),
            Element::Wildcard => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternAst {
    pub elements: Vec<Element>,
}

impl PatternAst {
    pub fn anchored_start(&self) -> bool {
        self.elements.first() == Some(&Element::AnchorStart)
    }

    pub fn anchored_end(&self) -> bool {
        self.elements.last() == Some(&Element::AnchorEnd)
    }

    /// The elements without anchors.
    pub fn body(&self) -> &[Element] {
        let lo = usize::from(self.anchored_start());
        let hi = self.elements.len() - usize::from(self.anchored_end());
        &self.elements[lo..hi.max(lo)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("empty pattern")]
    Empty,
    #[error("empty element at position {0}")]
    EmptyElement(usize),
    #[error("unsupported construct `{text}` in element {index}")]
    Unsupported { index: usize, text: String },
    #[error("malformed bracket in element {index}: `{text}`")]
    MalformedBracket { index: usize, text: String },
    #[error("empty residue class in element {0}")]
    EmptyClass(usize),
    #[error("'{}' in element {index} is not an amino-acid code", *.glyph as char)]
    UnknownResidue { index: usize, glyph: u8 },
    #[error("bad repetition `{text}` in element {index}")]
    BadRepeat { index: usize, text: String },
    #[error("anchor in element {0} is not at an end of the pattern")]
    MisplacedAnchor(usize),
    #[error("pattern needs more than {budget} automaton states")]
    StateBudgetExceeded { budget: usize },
}

pub fn parse_prosite(pattern: &str) -> Result<PatternAst, PatternError> {
    let text = pattern.trim();
    let text = text.strip_suffix('.').unwrap_or(text);
    if text.is_empty() {
        return Err(PatternError::Empty);
    }
    let pieces: Vec<&str> = text.split('-').collect();
    let last = pieces.len() - 1;
    let mut elements = Vec::new();
    for (index, raw) in pieces.iter().enumerate() {
        let mut piece = raw.trim();
        let start = piece.starts_with('<');
        if start {
            if index != 0 {
                return Err(PatternError::MisplacedAnchor(index));
            }
            piece = &piece[1..];
            elements.push(Element::AnchorStart);
        }
        let end = piece.ends_with('>');
        if end {
            if index != last {
                return Err(PatternError::MisplacedAnchor(index));
            }
            piece = &piece[..piece.len() - 1];
        }
        if piece.is_empty() {
            return Err(PatternError::EmptyElement(index));
        }
        elements.push(parse_element(index, piece)?);
        if end {
            elements.push(Element::AnchorEnd);
        }
    }
    Ok(PatternAst { elements })
}

fn parse_element(index: usize, piece: &str) -> Result<Element, PatternError> {
    let bytes = piece.as_bytes();
    let unsupported = || PatternError::Unsupported { index, text: piece.to_string() };
    let malformed = || PatternError::MalformedBracket { index, text: piece.to_string() };

    let (core, rest) = match bytes[0] {
        b'[' | b'{' => {
            let close = if bytes[0] == b'[' { b']' } else { b'}' };
            let end = bytes.iter().position(|&b| b == close).ok_or_else(malformed)?;
            let inner = &bytes[1..end];
            if inner.iter().any(|b| b"[]{}()<>".contains(b)) {
                return Err(malformed());
            }
            if inner.is_empty() {
                return Err(PatternError::EmptyClass(index));
            }
            let mut set = Vec::with_capacity(inner.len());
            for &g in inner {
                set.push(residue(index, g)?);
            }
            set.sort_unstable();
            set.dedup();
            let el = if bytes[0] == b'[' { Element::AnyOf(set) } else { Element::NoneOf(set) };
            (el, &bytes[end + 1..])
        }
        b'x' => (Element::Wildcard, &bytes[1..]),
        b']' | b'}' => return Err(malformed()),
        g if g.is_ascii_uppercase() => (Element::Literal(residue(index, g)?), &bytes[1..]),
        _ => return Err(unsupported()),
    };

    if rest.is_empty() {
        return Ok(core);
    }
    let bad_repeat = || PatternError::BadRepeat { index, text: piece.to_string() };
    let inner = rest
        .strip_prefix(b"(")
        .and_then(|r| r.strip_suffix(b")"))
        .ok_or_else(|| if rest[0] == b'(' { bad_repeat() } else { unsupported() })?;
    let inner = std::str::from_utf8(inner).map_err(|_| bad_repeat())?;
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|_| bad_repeat());
    let (min, max) = match inner.split_once(',') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(inner)?;
            (n, n)
        }
    };
    if min > max {
        return Err(bad_repeat());
    }
    Ok(Element::Repeat(Box::new(core), min, max))
}

fn residue(index: usize, glyph: u8) -> Result<u8, PatternError> {
    if AMINO_ACIDS.contains(&glyph) {
        Ok(glyph)
    } else {
        Err(PatternError::UnknownResidue { index, glyph })
    }
}

/// Compiles over the amino-acid alphabet with the default state budget.
pub fn compile_to_dfa(ast: &PatternAst) -> Result<Dfa, PatternError> {
    compile_with(ast, &Alphabet::amino_acids(), DEFAULT_STATE_BUDGET)
}

pub fn compile_with(ast: &PatternAst, alphabet: &Alphabet, budget: usize) -> Result<Dfa, PatternError> {
    let nfa = thompson(ast, alphabet, budget)?;
    let dfa = subset_construction(&nfa, alphabet, budget)?;
    Ok(minimize(&dfa))
}

/// Parses and compiles in one step.
pub fn compile_pattern(pattern: &str) -> Result<Dfa, PatternError> {
    compile_to_dfa(&parse_prosite(pattern)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Element::*;

    #[test]
    fn grammar() {
        assert_eq!(parse_prosite("R-G").unwrap().elements, [Literal(b'R'), Literal(b'G')]);
        assert_eq!(
            parse_prosite("[RK]-x(2)-G").unwrap().elements,
            [AnyOf(vec![b'K', b'R']), Repeat(Box::new(Wildcard), 2, 2), Literal(b'G')]
        );
        assert_eq!(
            parse_prosite("<{C}-x(1,3)-A>.").unwrap().elements,
            [AnchorStart, NoneOf(vec![b'C']), Repeat(Box::new(Wildcard), 1, 3), Literal(b'A'), AnchorEnd]
        );
    }

    #[test]
    fn syntax_errors() {
        assert!(parse_prosite("R-(G").is_err());
        assert!(parse_prosite("").is_err());
        assert!(matches!(parse_prosite("R--G"), Err(PatternError::EmptyElement(1))));
        assert!(matches!(parse_prosite("[]-G"), Err(PatternError::EmptyClass(0))));
        assert!(matches!(parse_prosite("[RG-A"), Err(PatternError::MalformedBracket { .. })));
        assert!(matches!(parse_prosite("R-<G"), Err(PatternError::MisplacedAnchor(1))));
        assert!(matches!(parse_prosite("R>-G"), Err(PatternError::MisplacedAnchor(0))));
        assert!(matches!(parse_prosite("B"), Err(PatternError::UnknownResidue { .. })));
        assert!(matches!(parse_prosite("x(3,2)"), Err(PatternError::BadRepeat { .. })));
        assert!(matches!(parse_prosite("x(2"), Err(PatternError::BadRepeat { .. })));
    }

    #[test]
    fn rg_compiles_to_the_reference_automaton() {
        assert_eq!(compile_pattern("R-G").unwrap(), Dfa::contains_rg());
    }

    #[test]
    fn wildcard_accepts_nonempty() {
        let d = compile_pattern("x").unwrap();
        assert_eq!(d.n_states(), 2);
        assert!(!d.dfa_match(b"").unwrap().accepted);
        assert!(d.dfa_match(b"W").unwrap().accepted);
        assert!(d.dfa_match(b"WAC").unwrap().accepted);
    }

    #[test]
    fn anchors() {
        let d = compile_pattern("<R-G>").unwrap();
        assert!(d.dfa_match(b"RG").unwrap().accepted);
        assert!(!d.dfa_match(b"ARG").unwrap().accepted);
        assert!(!d.dfa_match(b"RGA").unwrap().accepted);
        let d = compile_pattern("<R").unwrap();
        assert!(d.dfa_match(b"RAA").unwrap().accepted);
        assert!(!d.dfa_match(b"AR").unwrap().accepted);
    }

    #[test]
    fn budget_is_enforced() {
        let ast = parse_prosite("x(1000)").unwrap();
        assert!(matches!(
            compile_with(&ast, &Alphabet::amino_acids(), 500),
            Err(PatternError::StateBudgetExceeded { budget: 500 })
        ));
    }
}

//! Deterministic finite automata: the dense transition-table model, its
//! validation rules, and the sequential matcher every other matcher in the
//! crate is checked against.

mod grail;

pub use grail::{parse_grail, serialize_grail, GrailError};

use std::fmt;

/// Dense, 0-based DFA state index.
pub type StateId = u32;

/// Alphabet code of a glyph within one [`Alphabet`].
pub type Symbol = u8;

const NO_CODE: u16 = u16::MAX;

/// The 20 one-letter amino-acid codes, in alphabetical order.
pub const AMINO_ACIDS: &[u8; 20] = b"ACDEFGHIKLMNPQRSTVWY";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlphabetError {
    #[error("glyph {0:#04x} is not a printable non-space ASCII character")]
    Unprintable(u8),
    #[error("glyph '{}' appears more than once", *.0 as char)]
    Duplicate(u8),
    #[error("alphabet has {0} glyphs; at most 256 are supported")]
    TooLarge(usize),
}

/// Ordered set of single-byte glyphs with a glyph to code lookup table.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    glyphs: Vec<u8>,
    codes: Box<[u16; 256]>,
}

impl Alphabet {
    /// Builds an alphabet that keeps the glyphs in the given order.
    pub fn new(glyphs: impl IntoIterator<Item = u8>) -> Result<Self, AlphabetError> {
        let glyphs: Vec<u8> = glyphs.into_iter().collect();
        if glyphs.len() > 256 {
            return Err(AlphabetError::TooLarge(glyphs.len()));
        }
        let mut codes = Box::new([NO_CODE; 256]);
        for (code, &g) in glyphs.iter().enumerate() {
            if !g.is_ascii_graphic() {
                return Err(AlphabetError::Unprintable(g));
            }
            if codes[g as usize] != NO_CODE {
                return Err(AlphabetError::Duplicate(g));
            }
            codes[g as usize] = code as u16;
        }
        Ok(Alphabet { glyphs, codes })
    }

    /// Builds an alphabet from the sorted, deduplicated set of `glyphs`.
    pub fn sorted(glyphs: impl IntoIterator<Item = u8>) -> Result<Self, AlphabetError> {
        let mut glyphs: Vec<u8> = glyphs.into_iter().collect();
        glyphs.sort_unstable();
        glyphs.dedup();
        Self::new(glyphs)
    }

    pub fn amino_acids() -> Self {
        Self::new(AMINO_ACIDS.iter().copied()).expect("amino-acid alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.glyphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glyphs.is_empty()
    }

    pub fn glyphs(&self) -> &[u8] {
        &self.glyphs
    }

    pub fn glyph(&self, code: Symbol) -> Option<u8> {
        self.glyphs.get(code as usize).copied()
    }

    pub fn code(&self, glyph: u8) -> Option<Symbol> {
        match self.codes[glyph as usize] {
            NO_CODE => None,
            c => Some(c as Symbol),
        }
    }

    /// Translates a glyph stream into alphabet codes in one pass.
    pub fn encode(&self, input: &[u8]) -> Result<Vec<Symbol>, DfaError> {
        // Branch-free pass; locate the offending glyph only on failure.
        let mut unknown = false;
        let out = input
            .iter()
            .map(|&g| {
                let c = self.codes[g as usize];
                unknown |= c == NO_CODE;
                c as Symbol
            })
            .collect();
        if unknown {
            let position = input.iter().position(|&g| self.code(g).is_none()).expect("flagged above");
            return Err(DfaError::UnknownGlyph { position, glyph: input[position] });
        }
        Ok(out)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?})", String::from_utf8_lossy(&self.glyphs))
    }
}

/// A single broken invariant found by [`Dfa::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    EmptyAlphabet,
    DeltaShape { expected: usize, actual: usize },
    TargetOutOfRange { state: StateId, symbol: Symbol, target: StateId },
    StartOutOfRange(StateId),
    FinalOutOfRange(StateId),
    DuplicateFinal(StateId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "automaton has no states"),
            Violation::EmptyAlphabet => write!(f, "alphabet is empty"),
            Violation::DeltaShape { expected, actual } => {
                write!(f, "transition table has {actual} cells, expected {expected}")
            }
            Violation::TargetOutOfRange { state, symbol, target } => {
                write!(f, "delta[{state}][{symbol}] = {target} is not a state")
            }
            Violation::StartOutOfRange(q) => write!(f, "start state {q} is not a state"),
            Violation::FinalOutOfRange(q) => write!(f, "final state {q} is not a state"),
            Violation::DuplicateFinal(q) => write!(f, "final state {q} listed twice"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DfaError {
    #[error("invalid automaton: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("state {state} out of range (automaton has {n_states} states)")]
    StateOutOfRange { state: StateId, n_states: usize },
    #[error("symbol code {symbol} out of range (alphabet has {alphabet_size} symbols)")]
    SymbolOutOfRange { symbol: Symbol, alphabet_size: usize },
    #[error("input character {glyph:#04x} at position {position} is not in the alphabet")]
    UnknownGlyph { position: usize, glyph: u8 },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Verdict of running an automaton over a complete input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOutcome {
    pub accepted: bool,
    pub end_state: StateId,
}

/// Complete DFA with a row-major transition table (one row per state).
#[derive(Clone, PartialEq, Eq)]
pub struct Dfa {
    n_states: usize,
    alphabet: Alphabet,
    delta: Vec<StateId>,
    start: StateId,
    finals: Vec<StateId>,
}

impl Dfa {
    /// Builds a DFA and rejects it unless [`Dfa::validate`] finds nothing.
    /// `finals` may be given in any order.
    pub fn new(
        n_states: usize,
        alphabet: Alphabet,
        delta: Vec<StateId>,
        start: StateId,
        mut finals: Vec<StateId>,
    ) -> Result<Self, DfaError> {
        finals.sort_unstable();
        let dfa = Self::from_raw_parts(n_states, alphabet, delta, start, finals);
        let violations = dfa.validate();
        if violations.is_empty() {
            Ok(dfa)
        } else {
            Err(DfaError::Invalid(violations))
        }
    }

    /// Assembles a DFA without checking any invariant.
    pub fn from_raw_parts(
        n_states: usize,
        alphabet: Alphabet,
        delta: Vec<StateId>,
        start: StateId,
        finals: Vec<StateId>,
    ) -> Self {
        Dfa { n_states, alphabet, delta, start, finals }
    }

    /// Lists every broken invariant; an empty list means the DFA is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n_states;
        let k = self.alphabet.len();
        if n == 0 {
            out.push(Violation::NoStates);
        }
        if k == 0 {
            out.push(Violation::EmptyAlphabet);
        }
        if self.delta.len() != n * k {
            out.push(Violation::DeltaShape { expected: n * k, actual: self.delta.len() });
        } else {
            for (i, &target) in self.delta.iter().enumerate() {
                // Nonempty delta of the right shape implies k > 0.
                if target as usize >= n {
                    out.push(Violation::TargetOutOfRange {
                        state: (i / k) as StateId,
                        symbol: (i % k) as Symbol,
                        target,
                    });
                }
            }
        }
        if self.start as usize >= n {
            out.push(Violation::StartOutOfRange(self.start));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &q in &self.finals {
            if q as usize >= n {
                out.push(Violation::FinalOutOfRange(q));
            }
            if !seen.insert(q) {
                out.push(Violation::DuplicateFinal(q));
            }
        }
        out
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    /// Final states, ascending.
    pub fn finals(&self) -> &[StateId] {
        &self.finals
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.binary_search(&q).is_ok()
    }

    /// The whole transition table, row-major.
    pub fn table(&self) -> &[StateId] {
        &self.delta
    }

    /// Row `q` of the transition table, indexed by symbol code.
    #[inline]
    pub fn row(&self, q: StateId) -> &[StateId] {
        let k = self.alphabet.len();
        &self.delta[q as usize * k..(q as usize + 1) * k]
    }

    /// Unchecked-by-contract transition; panics on out-of-range arguments.
    #[inline]
    pub fn next(&self, q: StateId, a: Symbol) -> StateId {
        self.delta[q as usize * self.alphabet.len() + a as usize]
    }

    /// Checked single transition.
    pub fn step(&self, q: StateId, a: Symbol) -> Result<StateId, DfaError> {
        if q as usize >= self.n_states {
            return Err(DfaError::StateOutOfRange { state: q, n_states: self.n_states });
        }
        if a as usize >= self.alphabet.len() {
            return Err(DfaError::SymbolOutOfRange { symbol: a, alphabet_size: self.alphabet.len() });
        }
        Ok(self.next(q, a))
    }

    /// Extended transition function over already-encoded symbols.
    pub fn run_from(&self, mut q: StateId, input: &[Symbol]) -> StateId {
        let k = self.alphabet.len();
        for &a in input {
            q = self.delta[q as usize * k + a as usize];
        }
        q
    }

    /// Sequential membership test over raw glyphs.
    pub fn dfa_match(&self, input: &[u8]) -> Result<MatchOutcome, DfaError> {
        let k = self.alphabet.len();
        let mut q = self.start;
        for (position, &glyph) in input.iter().enumerate() {
            let a = self
                .alphabet
                .code(glyph)
                .ok_or(DfaError::UnknownGlyph { position, glyph })?;
            q = self.delta[q as usize * k + a as usize];
        }
        Ok(self.outcome(q))
    }

    pub fn outcome(&self, end_state: StateId) -> MatchOutcome {
        MatchOutcome { accepted: self.is_final(end_state), end_state }
    }

    /// The three-state automaton recognising strings that contain `RG`
    /// over the amino-acid alphabet.
    pub fn contains_rg() -> Self {
        let alphabet = Alphabet::amino_acids();
        let r = alphabet.code(b'R').unwrap() as usize;
        let g = alphabet.code(b'G').unwrap() as usize;
        let k = alphabet.len();
        let mut delta = vec![0; 3 * k];
        delta[r] = 1;
        delta[k + r] = 1;
        delta[k + g] = 2;
        delta[2 * k..].fill(2);
        Dfa::new(3, alphabet, delta, 0, vec![2]).expect("valid")
    }
}

impl fmt::Debug for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dfa")
            .field("n_states", &self.n_states)
            .field("alphabet", &self.alphabet)
            .field("start", &self.start)
            .field("finals", &self.finals)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(d: &Dfa, g: u8) -> Symbol {
        d.alphabet().code(g).unwrap()
    }

    #[test]
    fn steps_follow_the_rg_table() {
        let d = Dfa::contains_rg();
        assert_eq!(d.step(0, code(&d, b'R')).unwrap(), 1);
        assert_eq!(d.step(1, code(&d, b'G')).unwrap(), 2);
        assert_eq!(d.step(2, code(&d, b'R')).unwrap(), 2);
        assert_eq!(d.step(0, code(&d, b'G')).unwrap(), 0);
        assert_eq!(d.step(1, code(&d, b'A')).unwrap(), 0);
    }

    #[test]
    fn step_rejects_out_of_range() {
        let d = Dfa::contains_rg();
        assert!(matches!(d.step(3, 0), Err(DfaError::StateOutOfRange { .. })));
        assert!(matches!(d.step(0, 20), Err(DfaError::SymbolOutOfRange { .. })));
    }

    #[test]
    fn matching_examples() {
        let d = Dfa::contains_rg();
        assert_eq!(d.dfa_match(b"RG").unwrap(), MatchOutcome { accepted: true, end_state: 2 });
        assert_eq!(d.dfa_match(b"").unwrap(), MatchOutcome { accepted: false, end_state: 0 });
        assert_eq!(d.dfa_match(b"ARA").unwrap(), MatchOutcome { accepted: false, end_state: 0 });
        assert_eq!(
            d.dfa_match(b"RRGR").unwrap(),
            MatchOutcome { accepted: true, end_state: 2 }
        );
        assert_eq!(
            d.dfa_match(b"RZ"),
            Err(DfaError::UnknownGlyph { position: 1, glyph: b'Z' })
        );
    }

    #[test]
    fn validation_reports_each_violation() {
        let d = Dfa::contains_rg();
        assert!(d.validate().is_empty());

        let a = Alphabet::new(*b"ab").unwrap();
        let bad_final = Dfa::from_raw_parts(2, a.clone(), vec![0, 1, 1, 0], 0, vec![2]);
        assert_eq!(bad_final.validate(), vec![Violation::FinalOutOfRange(2)]);

        let bad_target = Dfa::from_raw_parts(2, a.clone(), vec![0, 5, 1, 0], 0, vec![]);
        assert_eq!(
            bad_target.validate(),
            vec![Violation::TargetOutOfRange { state: 0, symbol: 1, target: 5 }]
        );

        let bad_shape = Dfa::from_raw_parts(2, a.clone(), vec![0, 1, 1], 7, vec![]);
        assert_eq!(
            bad_shape.validate(),
            vec![Violation::DeltaShape { expected: 4, actual: 3 }, Violation::StartOutOfRange(7)]
        );
        assert!(Dfa::new(2, a, vec![0, 1, 1, 0], 0, vec![1, 1]).is_err());
    }

    #[test]
    fn alphabet_rejects_bad_glyphs() {
        assert_eq!(Alphabet::new(*b"aa"), Err(AlphabetError::Duplicate(b'a')));
        assert_eq!(Alphabet::new(*b"a "), Err(AlphabetError::Unprintable(b' ')));
        let a = Alphabet::sorted(*b"cab").unwrap();
        assert_eq!(a.glyphs(), b"abc");
        assert_eq!(a.code(b'c'), Some(2));
        assert_eq!(a.code(b'z'), None);
    }
}

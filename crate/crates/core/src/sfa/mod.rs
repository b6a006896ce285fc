//! Simultaneous automata: states are total mappings `Q -> Q`, one per set
//! of concurrent runs of the underlying DFA.

mod builder;
mod format;
pub(crate) mod store;

pub use builder::{build_sfa, predict_worst_case, BuildConfig, BuildError, BuildStats};
pub use format::{parse_sfa, serialize_sfa, SfaFormatError};
pub use store::{StateStore, StoreStrategy};

use std::fmt;

use crate::automaton::{Alphabet, Dfa, StateId, Symbol};
use crate::gf2::{Fingerprint, FingerprintContext};

/// Id of a state within one [`Sfa`].
pub type SfaStateId = u32;

/// State ids of an [`SfaState`] are encoded as 16-bit integers.
pub const MAX_ENCODABLE_STATES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("DFA with {n_states} states cannot be encoded with 16-bit state ids")]
pub struct EncodingError {
    pub n_states: usize,
}

/// One SFA state: entry `q` is the DFA state reached from `q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SfaState {
    map: Vec<StateId>,
    fp: Option<Fingerprint>,
}

impl SfaState {
    pub fn identity(n: usize) -> Self {
        SfaState { map: (0..n as StateId).collect(), fp: None }
    }

    pub fn from_map(map: Vec<StateId>) -> Self {
        SfaState { map, fp: None }
    }

    pub fn map(&self) -> &[StateId] {
        &self.map
    }

    pub fn into_map(self) -> Vec<StateId> {
        self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn fingerprint(&self) -> Option<Fingerprint> {
        self.fp
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &q)| i == q as usize)
    }

    /// The successor on symbol `a`: every tracked run takes one DFA step.
    pub fn successor(&self, a: Symbol, dfa: &Dfa) -> SfaState {
        let mut out = Vec::with_capacity(self.map.len());
        successor_into(&self.map, a, dfa, &mut out);
        SfaState::from_map(out)
    }

    /// `n` little-endian 16-bit entries in index order.
    pub fn canonical_bytes(&self) -> Result<Vec<u8>, EncodingError> {
        let mut out = Vec::with_capacity(2 * self.map.len());
        encode_map(&self.map, &mut out)?;
        Ok(out)
    }

    /// Computes and caches the fingerprint of the canonical encoding.
    pub fn with_fingerprint(mut self, ctx: &FingerprintContext) -> Result<Self, EncodingError> {
        self.fp = Some(ctx.fingerprint(&self.canonical_bytes()?));
        Ok(self)
    }
}

impl fmt::Debug for SfaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.map)?;
        if let Some(fp) = self.fp {
            write!(f, "@{:016x}", fp.0)?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn successor_into(map: &[StateId], a: Symbol, dfa: &Dfa, out: &mut Vec<StateId>) {
    out.clear();
    out.extend(map.iter().map(|&q| dfa.next(q, a)));
}

pub(crate) fn encode_map(map: &[StateId], out: &mut Vec<u8>) -> Result<(), EncodingError> {
    out.clear();
    for &q in map {
        let q = u16::try_from(q).map_err(|_| EncodingError { n_states: map.len().max(q as usize + 1) })?;
        out.extend_from_slice(&q.to_le_bytes());
    }
    Ok(())
}

/// A constructed SFA with a dense `|states| x |alphabet|` transition table.
#[derive(Clone, PartialEq, Eq)]
pub struct Sfa {
    n_dfa_states: usize,
    alphabet: Alphabet,
    maps: Vec<StateId>,
    delta: Vec<SfaStateId>,
    start: SfaStateId,
    finals: Vec<bool>,
}

impl Sfa {
    /// Assembles an SFA from flat tables; `finals` is derived from `dfa_finals`
    /// and `dfa_start`, the start is the identity mapping.
    pub(crate) fn assemble(
        n_dfa_states: usize,
        alphabet: Alphabet,
        maps: Vec<StateId>,
        delta: Vec<SfaStateId>,
        start: SfaStateId,
        finals: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(maps.len(), finals.len() * n_dfa_states);
        debug_assert_eq!(delta.len(), finals.len() * alphabet.len());
        Sfa { n_dfa_states, alphabet, maps, delta, start, finals }
    }

    pub(crate) fn from_tables(dfa: &Dfa, maps: Vec<StateId>, delta: Vec<SfaStateId>) -> Self {
        let n = dfa.n_states();
        let start_q = dfa.start() as usize;
        let finals = maps.chunks_exact(n).map(|m| dfa.is_final(m[start_q])).collect();
        Sfa::assemble(n, dfa.alphabet().clone(), maps, delta, 0, finals)
    }

    pub fn n_states(&self) -> usize {
        self.finals.len()
    }

    pub fn n_dfa_states(&self) -> usize {
        self.n_dfa_states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn start(&self) -> SfaStateId {
        self.start
    }

    pub fn map(&self, id: SfaStateId) -> &[StateId] {
        let n = self.n_dfa_states;
        &self.maps[id as usize * n..(id as usize + 1) * n]
    }

    pub fn state(&self, id: SfaStateId) -> SfaState {
        SfaState::from_map(self.map(id).to_vec())
    }

    pub fn maps(&self) -> impl Iterator<Item = &[StateId]> {
        self.maps.chunks_exact(self.n_dfa_states)
    }

    #[inline]
    pub fn next(&self, id: SfaStateId, a: Symbol) -> SfaStateId {
        self.delta[id as usize * self.alphabet.len() + a as usize]
    }

    pub fn table(&self) -> &[SfaStateId] {
        &self.delta
    }

    pub fn is_final(&self, id: SfaStateId) -> bool {
        self.finals[id as usize]
    }

    pub fn finals(&self) -> impl Iterator<Item = SfaStateId> + '_ {
        self.finals.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i as SfaStateId)
    }

    pub fn find(&self, map: &[StateId]) -> Option<SfaStateId> {
        self.maps().position(|m| m == map).map(|i| i as SfaStateId)
    }

    /// Renumbers states in ascending lexicographic order of their mappings,
    /// which makes SFAs built in different orders directly comparable.
    pub fn canonicalize(&self) -> Sfa {
        let n_sfa = self.n_states();
        let mut order: Vec<usize> = (0..n_sfa).collect();
        order.sort_unstable_by(|&a, &b| self.map(a as u32).cmp(self.map(b as u32)));
        let mut rank = vec![0 as SfaStateId; n_sfa];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new as SfaStateId;
        }
        let k = self.alphabet.len();
        let mut maps = Vec::with_capacity(self.maps.len());
        let mut delta = Vec::with_capacity(self.delta.len());
        let mut finals = Vec::with_capacity(n_sfa);
        for &old in &order {
            maps.extend_from_slice(self.map(old as u32));
            delta.extend(self.delta[old * k..(old + 1) * k].iter().map(|&t| rank[t as usize]));
            finals.push(self.finals[old]);
        }
        Sfa::assemble(
            self.n_dfa_states,
            self.alphabet.clone(),
            maps,
            delta,
            rank[self.start as usize],
            finals,
        )
    }

    /// Checks closure and consistency against `dfa`: every transition lands
    /// on the stored successor mapping, mappings are distinct, the start is
    /// the identity and finals agree with the DFA. Returns the first problem.
    pub fn check_against(&self, dfa: &Dfa) -> Result<(), String> {
        if dfa.n_states() != self.n_dfa_states || dfa.alphabet() != &self.alphabet {
            return Err("dimension or alphabet differs from the DFA".into());
        }
        if !SfaState::from_map(self.map(self.start).to_vec()).is_identity() {
            return Err(format!("start state {} is not the identity", self.start));
        }
        let mut seen = std::collections::HashMap::new();
        let mut buf = Vec::new();
        for id in 0..self.n_states() as SfaStateId {
            if let Some(other) = seen.insert(self.map(id), id) {
                return Err(format!("states {other} and {id} have the same mapping"));
            }
            let expect_final = dfa.is_final(self.map(id)[dfa.start() as usize]);
            if expect_final != self.is_final(id) {
                return Err(format!("state {id} final flag is wrong"));
            }
            for a in 0..self.alphabet.len() as Symbol {
                successor_into(self.map(id), a, dfa, &mut buf);
                let t = self.next(id, a);
                if t as usize >= self.n_states() || self.map(t) != buf.as_slice() {
                    return Err(format!(
                        "transition {id} --{}--> {t} does not lead to {:?}",
                        self.alphabet.glyphs()[a as usize] as char,
                        buf
                    ));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Sfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sfa")
            .field("n_states", &self.n_states())
            .field("n_dfa_states", &self.n_dfa_states)
            .field("start", &self.start)
            .finish_non_exhaustive()
    }
}

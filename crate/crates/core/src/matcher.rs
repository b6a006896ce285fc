//! Chunked matching: every chunk runs through the SFA independently and
//! the resulting mappings are folded left to right.

use std::ops::Range;

use rayon::prelude::*;

use crate::automaton::{Dfa, DfaError, MatchOutcome, StateId, Symbol};
use crate::sfa::{Sfa, SfaState, SfaStateId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatchError {
    #[error(transparent)]
    Input(#[from] DfaError),
    #[error("mapping dimensions differ ({first} vs {second})")]
    DimensionMismatch { first: usize, second: usize },
    #[error("SFA tracks {sfa} DFA states but the DFA has {dfa}")]
    SfaDfaMismatch { sfa: usize, dfa: usize },
    #[error("SFA alphabet differs from the DFA alphabet")]
    AlphabetMismatch,
    #[error("at least one chunk is required")]
    NoChunks,
}

/// Contiguous, non-overlapping chunk boundaries covering an input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkPlan {
    chunks: Vec<Range<usize>>,
}

impl ChunkPlan {
    pub fn chunks(&self) -> &[Range<usize>] {
        &self.chunks
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.chunks.iter().map(|r| r.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }
}

/// Splits `input_len` into `n_chunks` near-equal chunks, longer ones first.
/// The count is clamped to `input_len` (one empty chunk for empty input).
pub fn plan_chunks(input_len: usize, n_chunks: usize) -> ChunkPlan {
    assert!(n_chunks >= 1, "n_chunks must be at least 1");
    let n = n_chunks.min(input_len).max(1);
    let base = input_len / n;
    let extra = input_len % n;
    let mut start = 0;
    let chunks = (0..n)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect();
    ChunkPlan { chunks }
}

/// The SFA state reached from the start on `chunk` (already encoded).
pub fn sfa_run(sfa: &Sfa, chunk: &[Symbol]) -> SfaStateId {
    let table = sfa.table();
    let k = sfa.alphabet().len();
    chunk.iter().fold(sfa.start(), |s, &a| table[s as usize * k + a as usize])
}

/// Like [`sfa_run`] but on raw glyphs.
pub fn sfa_run_text(sfa: &Sfa, chunk: &[u8]) -> Result<SfaStateId, DfaError> {
    Ok(sfa_run(sfa, &sfa.alphabet().encode(chunk)?))
}

/// Applies `first`, then `second`: `result[q] = second[first[q]]`.
pub fn compose(first: &SfaState, second: &SfaState) -> Result<SfaState, MatchError> {
    compose_maps(first.map(), second.map()).map(SfaState::from_map)
}

pub fn compose_maps(first: &[StateId], second: &[StateId]) -> Result<Vec<StateId>, MatchError> {
    if first.len() != second.len() {
        return Err(MatchError::DimensionMismatch { first: first.len(), second: second.len() });
    }
    Ok(first.iter().map(|&q| second[q as usize]).collect())
}

/// Matches `input` by running `n_chunks` chunks concurrently and
/// composing their mappings. The result always equals
/// [`Dfa::dfa_match`].
pub fn match_parallel(sfa: &Sfa, dfa: &Dfa, input: &[u8], n_chunks: usize) -> Result<MatchOutcome, MatchError> {
    check_pair(sfa, dfa, n_chunks)?;
    let symbols = dfa.alphabet().encode(input)?;
    Ok(run_chunks(sfa, dfa, &symbols, n_chunks))
}

/// [`match_parallel`] on input that is already encoded.
pub fn match_symbols(sfa: &Sfa, dfa: &Dfa, symbols: &[Symbol], n_chunks: usize) -> Result<MatchOutcome, MatchError> {
    check_pair(sfa, dfa, n_chunks)?;
    let k = dfa.alphabet_size();
    if let Some(&bad) = symbols.iter().find(|&&a| a as usize >= k) {
        return Err(DfaError::SymbolOutOfRange { symbol: bad, alphabet_size: k }.into());
    }
    Ok(run_chunks(sfa, dfa, symbols, n_chunks))
}

fn check_pair(sfa: &Sfa, dfa: &Dfa, n_chunks: usize) -> Result<(), MatchError> {
    if n_chunks == 0 {
        return Err(MatchError::NoChunks);
    }
    if sfa.n_dfa_states() != dfa.n_states() {
        return Err(MatchError::SfaDfaMismatch { sfa: sfa.n_dfa_states(), dfa: dfa.n_states() });
    }
    if sfa.alphabet() != dfa.alphabet() {
        return Err(MatchError::AlphabetMismatch);
    }
    Ok(())
}

/// Runs the chunks concurrently; every symbol must be in range.
fn run_chunks(sfa: &Sfa, dfa: &Dfa, symbols: &[Symbol], n_chunks: usize) -> MatchOutcome {
    let plan = plan_chunks(symbols.len(), n_chunks);
    let ends: Vec<SfaStateId> = plan
        .chunks()
        .par_iter()
        .with_max_len(1)
        .map(|r| sfa_run(sfa, &symbols[r.clone()]))
        .collect();

    // Only the image of the start state matters, so the fold just follows
    // it through each chunk's mapping.
    let end_state = ends.iter().fold(dfa.start(), |q, &id| sfa.map(id)[q as usize]);
    dfa.outcome(end_state)
}

/// The full folded mapping of a chunking, for split-invariance checks.
pub fn folded_mapping(sfa: &Sfa, symbols: &[Symbol], n_chunks: usize) -> SfaState {
    let plan = plan_chunks(symbols.len(), n_chunks);
    plan.chunks()
        .iter()
        .map(|r| sfa.state(sfa_run(sfa, &symbols[r.clone()])))
        .fold(SfaState::identity(sfa.n_dfa_states()), |acc, s| {
            compose(&acc, &s).expect("same dimension")
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfa::{build_sfa, BuildConfig, StoreStrategy};

    fn golden() -> (Dfa, Sfa) {
        let dfa = Dfa::contains_rg();
        let (sfa, _) = build_sfa(&dfa, StoreStrategy::Exhaustive, None, &BuildConfig::default()).unwrap();
        (dfa, sfa)
    }

    #[test]
    fn chunk_plans() {
        assert_eq!(plan_chunks(10, 3).lengths(), [4, 3, 3]);
        assert_eq!(plan_chunks(5, 5).lengths(), [1; 5]);
        assert_eq!(plan_chunks(3, 8).lengths(), [1; 3]);
        assert_eq!(plan_chunks(0, 4).lengths(), [0]);
        let p = plan_chunks(17, 4);
        assert_eq!(p.chunks().first().unwrap().start, 0);
        assert_eq!(p.chunks().last().unwrap().end, 17);
        assert!(p.chunks().windows(2).all(|w| w[0].end == w[1].start));
    }

    #[test]
    fn runs_on_the_reference_sfa() {
        let (_, sfa) = golden();
        assert_eq!(sfa.map(sfa_run_text(&sfa, b"RG").unwrap()), [2, 2, 2]);
        assert_eq!(sfa_run_text(&sfa, b"").unwrap(), sfa.start());
        assert_eq!(sfa.map(sfa_run_text(&sfa, b"GR").unwrap()), [1, 2, 2]);
        assert!(sfa_run_text(&sfa, b"RB").is_err());
    }

    #[test]
    fn compose_laws() {
        let f1 = SfaState::from_map(vec![1, 1, 2]);
        let f3 = SfaState::from_map(vec![0, 2, 2]);
        let id = SfaState::identity(3);
        assert_eq!(compose(&f1, &f3).unwrap().map(), [2, 2, 2]);
        assert_eq!(compose(&id, &f1).unwrap(), f1);
        assert_eq!(compose(&f1, &id).unwrap(), f1);
        assert!(matches!(
            compose(&f1, &SfaState::identity(2)),
            Err(MatchError::DimensionMismatch { first: 3, second: 2 })
        ));
    }

    #[test]
    fn parallel_verdicts() {
        let (dfa, sfa) = golden();
        let arg = match_parallel(&sfa, &dfa, b"ARG", 2).unwrap();
        assert_eq!((arg.accepted, arg.end_state), (true, 2));
        let rrr = match_parallel(&sfa, &dfa, b"RRR", 3).unwrap();
        assert_eq!((rrr.accepted, rrr.end_state), (false, 1));
        let empty = match_parallel(&sfa, &dfa, b"", 5).unwrap();
        assert_eq!((empty.accepted, empty.end_state), (false, 0));
        assert!(matches!(match_parallel(&sfa, &dfa, b"ARZ", 2), Err(MatchError::Input(_))));
        assert!(matches!(match_parallel(&sfa, &dfa, b"AR", 0), Err(MatchError::NoChunks)));
    }

    #[test]
    fn single_chunk_is_projection() {
        let (dfa, sfa) = golden();
        let text = b"ARRGAWRG";
        let sym = dfa.alphabet().encode(text).unwrap();
        let end = sfa.map(sfa_run(&sfa, &sym))[dfa.start() as usize];
        assert_eq!(match_parallel(&sfa, &dfa, text, 1).unwrap().end_state, end);
    }

    #[test]
    fn mismatched_dfa_is_rejected() {
        let (_, sfa) = golden();
        let other = crate::corpus::full_transformation_dfa(3);
        assert!(match_parallel(&sfa, &other, b"", 1).is_err());
    }
}

use std::time::Instant;

use crate::automaton::{Dfa, StateId, Symbol};
use crate::gf2::FingerprintContext;

use super::store::{StateStore, StoreStrategy};
use super::{successor_into, EncodingError, Sfa, SfaStateId};

#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    /// Abort once this many SFA states exist.
    pub state_budget: usize,
    /// Sizes the initial hash table: the smallest power of two at least
    /// twice this value.
    pub expected_states: usize,
    /// The sequential hash table doubles above this load factor.
    pub max_load_factor: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { state_budget: 1 << 26, expected_states: 1024, max_load_factor: 0.75 }
    }
}

/// Counters gathered during one construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub n_sfa_states: u64,
    pub lookups: u64,
    pub full_vector_comparisons: u64,
    pub fingerprint_comparisons: u64,
    pub fingerprints_computed: u64,
    pub max_chain_length: u64,
    pub wall_time_ns: u64,
    /// `(state, symbol)` expansions done by each worker; one entry for the
    /// sequential builders.
    pub per_worker_expansions: Vec<u64>,
    /// Ids reserved by parallel inserts that lost a race and were discarded.
    pub discarded_ids: u64,
    /// Bucket count of the hash table when construction stopped; zero for
    /// strategies without one.
    pub hash_buckets: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("state budget of {budget} SFA states exceeded")]
    StateBudgetExceeded { budget: usize, stats: Box<BuildStats> },
    #[error("fingerprint-based strategy needs a fingerprint context")]
    MissingContext,
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("invalid worker layout: {0}")]
    Precondition(String),
}

impl BuildError {
    pub(crate) fn over_budget(budget: usize) -> Self {
        BuildError::StateBudgetExceeded { budget, stats: Box::default() }
    }

    pub(crate) fn with_stats(self, stats: BuildStats) -> Self {
        match self {
            BuildError::StateBudgetExceeded { budget, .. } => {
                BuildError::StateBudgetExceeded { budget, stats: Box::new(stats) }
            }
            other => other,
        }
    }

    /// The exceeded budget, for budget failures.
    pub fn budget(&self) -> Option<usize> {
        match self {
            BuildError::StateBudgetExceeded { budget, .. } => Some(*budget),
            _ => None,
        }
    }

    /// Counters collected up to the point of failure, if any.
    pub fn partial_stats(&self) -> Option<&BuildStats> {
        match self {
            BuildError::StateBudgetExceeded { stats, .. } => Some(stats),
            _ => None,
        }
    }
}

/// Sequential construction with a FIFO worklist.
///
/// Seeds the store with the identity mapping, then expands states in id
/// order on every symbol, inserting successors that are not stored yet.
/// An SFA state is final when its image of the DFA start state is final.
pub fn build_sfa(
    dfa: &Dfa,
    strategy: StoreStrategy,
    ctx: Option<&FingerprintContext>,
    config: &BuildConfig,
) -> Result<(Sfa, BuildStats), BuildError> {
    let started = Instant::now();
    let n = dfa.n_states();
    let k = dfa.alphabet_size();
    let mut store = StateStore::new(strategy, n, ctx, config)?;
    let identity: Vec<StateId> = (0..n as StateId).collect();
    store.lookup_or_insert_map(&identity, None)?;

    let mut delta: Vec<SfaStateId> = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    let mut cursor = 0usize;
    let mut expansions = 0u64;
    let result = (|| {
        while cursor < store.len() {
            current.clear();
            current.extend_from_slice(store.map(cursor as SfaStateId));
            for a in 0..k {
                successor_into(&current, a as Symbol, dfa, &mut next);
                let (id, _) = store.lookup_or_insert_map(&next, None)?;
                delta.push(id);
                expansions += 1;
            }
            cursor += 1;
        }
        Ok(())
    })();

    let c = store.counters;
    let stats = BuildStats {
        n_sfa_states: store.len() as u64,
        lookups: c.lookups,
        full_vector_comparisons: c.full_vector_comparisons,
        fingerprint_comparisons: c.fingerprint_comparisons,
        fingerprints_computed: c.fingerprints_computed,
        max_chain_length: c.max_chain_length,
        wall_time_ns: started.elapsed().as_nanos() as u64,
        per_worker_expansions: vec![expansions],
        discarded_ids: 0,
        hash_buckets: store.bucket_count() as u64,
    };
    if let Err(e) = result {
        return Err(BuildError::with_stats(e, stats));
    }
    Ok((Sfa::from_tables(dfa, store.into_maps(), delta), stats))
}

/// Worst-case number of DFA-state comparisons made by exhaustive
/// construction: `|Σ| * |Q| * |D_s| * (|D_s| + 3) / 2`.
pub fn predict_worst_case(alphabet_size: u64, dfa_states: u64, sfa_states: u64) -> u128 {
    // D(D + 3) is always even.
    let pairs = sfa_states as u128 * (sfa_states as u128 + 3) / 2;
    alphabet_size as u128 * dfa_states as u128 * pairs
}

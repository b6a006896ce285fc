//! Membership structure for SFA states during sequential construction.
//!
//! States live in one flat, insertion-ordered list; the suffix that has not
//! been expanded yet doubles as the worklist.

use crate::automaton::StateId;
use crate::gf2::FingerprintContext;

use super::builder::{BuildConfig, BuildError};
use super::{encode_map, SfaState, SfaStateId};

const NONE: u32 = u32::MAX;

/// How a lookup decides whether a mapping is already stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StoreStrategy {
    /// Compare the full mapping against every stored state.
    Exhaustive,
    /// Compare fingerprints against every stored state; compare full
    /// mappings only when fingerprints are equal.
    Fingerprint,
    /// Probe only the chain of the fingerprint's bucket.
    Hash,
}

impl StoreStrategy {
    pub fn needs_fingerprints(self) -> bool {
        !matches!(self, StoreStrategy::Exhaustive)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct StoreCounters {
    pub lookups: u64,
    pub full_vector_comparisons: u64,
    pub fingerprint_comparisons: u64,
    pub fingerprints_computed: u64,
    pub max_chain_length: u64,
}

pub struct StateStore {
    strategy: StoreStrategy,
    dim: usize,
    ctx: Option<FingerprintContext>,
    budget: usize,
    max_load: f64,
    maps: Vec<StateId>,
    fps: Vec<u64>,
    buckets: Vec<u32>,
    chain_next: Vec<u32>,
    scratch: Vec<u8>,
    pub(crate) counters: StoreCounters,
}

impl StateStore {
    /// A store for mappings of dimension `dim`. Fingerprint-based strategies
    /// need `ctx`.
    pub fn new(
        strategy: StoreStrategy,
        dim: usize,
        ctx: Option<&FingerprintContext>,
        config: &BuildConfig,
    ) -> Result<Self, BuildError> {
        if strategy.needs_fingerprints() {
            if ctx.is_none() {
                return Err(BuildError::MissingContext);
            }
            if dim > super::MAX_ENCODABLE_STATES {
                return Err(BuildError::Encoding(super::EncodingError { n_states: dim }));
            }
        }
        let buckets = if strategy == StoreStrategy::Hash {
            vec![NONE; (2 * config.expected_states.max(1)).next_power_of_two()]
        } else {
            Vec::new()
        };
        Ok(StateStore {
            strategy,
            dim,
            ctx: ctx.cloned(),
            budget: config.state_budget,
            max_load: config.max_load_factor,
            maps: Vec::new(),
            fps: Vec::new(),
            buckets,
            chain_next: Vec::new(),
            scratch: Vec::new(),
            counters: StoreCounters::default(),
        })
    }

    pub fn strategy(&self) -> StoreStrategy {
        self.strategy
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            return 0;
        }
        self.maps.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn map(&self, id: SfaStateId) -> &[StateId] {
        &self.maps[id as usize * self.dim..(id as usize + 1) * self.dim]
    }

    pub(crate) fn into_maps(self) -> Vec<StateId> {
        self.maps
    }

    /// Returns the id of `f`, inserting it first if it is new.
    pub fn lookup_or_insert(&mut self, f: &SfaState) -> Result<(SfaStateId, bool), BuildError> {
        assert_eq!(f.len(), self.dim, "mapping dimension");
        self.lookup_or_insert_map(f.map(), f.fingerprint().map(|fp| fp.0))
    }

    pub(crate) fn lookup_or_insert_map(
        &mut self,
        map: &[StateId],
        known_fp: Option<u64>,
    ) -> Result<(SfaStateId, bool), BuildError> {
        self.counters.lookups += 1;
        let fp = match (self.strategy, known_fp) {
            (StoreStrategy::Exhaustive, _) => 0,
            (_, Some(fp)) => fp,
            (_, None) => {
                let ctx = self.ctx.as_ref().expect("checked in new");
                encode_map(map, &mut self.scratch)?;
                self.counters.fingerprints_computed += 1;
                ctx.fingerprint(&self.scratch).0
            }
        };
        let found = match self.strategy {
            StoreStrategy::Exhaustive => self.scan_exhaustive(map),
            StoreStrategy::Fingerprint => self.scan_fingerprints(map, fp),
            StoreStrategy::Hash => self.probe_chain(map, fp),
        };
        match found {
            Ok(id) => Ok((id, false)),
            Err(tail) => self.insert(map, fp, tail).map(|id| (id, true)),
        }
    }

    fn scan_exhaustive(&mut self, map: &[StateId]) -> Result<SfaStateId, u32> {
        for (id, stored) in self.maps.chunks_exact(self.dim).enumerate() {
            self.counters.full_vector_comparisons += 1;
            if stored == map {
                return Ok(id as SfaStateId);
            }
        }
        Err(NONE)
    }

    fn scan_fingerprints(&mut self, map: &[StateId], fp: u64) -> Result<SfaStateId, u32> {
        for (id, &stored) in self.fps.iter().enumerate() {
            self.counters.fingerprint_comparisons += 1;
            if stored == fp {
                self.counters.full_vector_comparisons += 1;
                if self.map(id as SfaStateId) == map {
                    return Ok(id as SfaStateId);
                }
            }
        }
        Err(NONE)
    }

    /// On a miss, returns the chain's last node (or `NONE` for an empty bucket).
    fn probe_chain(&mut self, map: &[StateId], fp: u64) -> Result<SfaStateId, u32> {
        let mut cur = self.buckets[self.bucket_of(fp)];
        let mut last = NONE;
        let mut visited = 0u64;
        while cur != NONE {
            visited += 1;
            self.counters.fingerprint_comparisons += 1;
            if self.fps[cur as usize] == fp {
                self.counters.full_vector_comparisons += 1;
                if self.map(cur) == map {
                    self.counters.max_chain_length = self.counters.max_chain_length.max(visited);
                    return Ok(cur);
                }
            }
            last = cur;
            cur = self.chain_next[cur as usize];
        }
        self.counters.max_chain_length = self.counters.max_chain_length.max(visited + 1);
        Err(last)
    }

    fn bucket_of(&self, fp: u64) -> usize {
        bucket_index(fp, self.buckets.len())
    }

    fn insert(&mut self, map: &[StateId], fp: u64, tail: u32) -> Result<SfaStateId, BuildError> {
        let id = self.len();
        if id >= self.budget {
            return Err(BuildError::over_budget(self.budget));
        }
        let id = id as SfaStateId;
        self.maps.extend_from_slice(map);
        if self.strategy.needs_fingerprints() {
            self.fps.push(fp);
        }
        if self.strategy == StoreStrategy::Hash {
            self.chain_next.push(NONE);
            if tail == NONE {
                let b = self.bucket_of(fp);
                self.buckets[b] = id;
            } else {
                self.chain_next[tail as usize] = id;
            }
            if self.len() as f64 > self.max_load * self.buckets.len() as f64 {
                self.grow();
            }
        }
        Ok(id)
    }

    /// Doubles the bucket array; chains keep insertion order.
    fn grow(&mut self) {
        let size = self.buckets.len() * 2;
        self.buckets = vec![NONE; size];
        let mut tails = vec![NONE; size];
        for id in 0..self.len() {
            let b = self.bucket_of(self.fps[id]);
            self.chain_next[id] = NONE;
            if tails[b] == NONE {
                self.buckets[b] = id as u32;
            } else {
                self.chain_next[tails[b] as usize] = id as u32;
            }
            tails[b] = id as u32;
        }
    }

    pub fn load_factor(&self) -> f64 {
        if self.buckets.is_empty() {
            return 0.0;
        }
        self.len() as f64 / self.buckets.len() as f64
    }
}

/// Bucket of a fingerprint in a table of `len` buckets (a power of two).
///
/// A mapping encoded in fewer than eight bytes is its own fingerprint, so
/// the raw low bits barely vary between states. A Fibonacci multiply
/// spreads every fingerprint bit into the top bits, which are used instead.
pub(crate) fn bucket_index(fp: u64, len: usize) -> usize {
    debug_assert!(len.is_power_of_two());
    if len == 1 {
        return 0;
    }
    (fp.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> (64 - len.trailing_zeros())) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [StoreStrategy; 3] =
        [StoreStrategy::Exhaustive, StoreStrategy::Fingerprint, StoreStrategy::Hash];

    fn store(s: StoreStrategy, ctx: &FingerprintContext, config: &BuildConfig) -> StateStore {
        StateStore::new(s, 3, Some(ctx), config).unwrap()
    }

    #[test]
    fn insert_then_find() {
        let ctx = FingerprintContext::default();
        let config = BuildConfig::default();
        for s in ALL {
            let mut st = store(s, &ctx, &config);
            assert_eq!(st.lookup_or_insert(&SfaState::identity(3)).unwrap(), (0, true));
            let f1 = SfaState::from_map(vec![1, 1, 2]);
            assert_eq!(st.lookup_or_insert(&f1).unwrap(), (1, true));
            assert_eq!(st.lookup_or_insert(&f1).unwrap(), (1, false), "{s:?}");
            let f1 = f1.with_fingerprint(&ctx).unwrap();
            assert_eq!(st.lookup_or_insert(&f1).unwrap(), (1, false), "{s:?}");
            assert_eq!(st.len(), 2);
        }
    }

    #[test]
    fn fingerprint_strategies_need_a_context() {
        let config = BuildConfig::default();
        assert!(matches!(
            StateStore::new(StoreStrategy::Hash, 3, None, &config),
            Err(BuildError::MissingContext)
        ));
        assert!(StateStore::new(StoreStrategy::Exhaustive, 3, None, &config).is_ok());
    }

    #[test]
    fn hash_table_grows_and_keeps_every_state() {
        let ctx = FingerprintContext::default();
        let config = BuildConfig { expected_states: 1, ..BuildConfig::default() };
        let mut st = store(StoreStrategy::Hash, &ctx, &config);
        assert_eq!(st.bucket_count(), 2);
        let maps: Vec<Vec<u32>> =
            (0..27u32).map(|i| vec![i % 3, (i / 3) % 3, i / 9]).collect();
        for (i, m) in maps.iter().enumerate() {
            assert_eq!(st.lookup_or_insert_map(m, None).unwrap(), (i as u32, true));
            assert!(st.load_factor() <= 0.75);
        }
        assert_eq!(st.bucket_count(), 64);
        for (i, m) in maps.iter().enumerate() {
            assert_eq!(st.lookup_or_insert_map(m, None).unwrap(), (i as u32, false));
        }
    }

    #[test]
    fn colliding_fingerprints_fall_back_to_full_comparison() {
        let ctx = FingerprintContext::default().narrowed(1);
        let config = BuildConfig::default();
        for s in [StoreStrategy::Fingerprint, StoreStrategy::Hash] {
            let mut st = store(s, &ctx, &config);
            for i in 0..27u32 {
                let m = vec![i % 3, (i / 3) % 3, i / 9];
                assert_eq!(st.lookup_or_insert_map(&m, None).unwrap(), (i, true));
            }
            assert!(st.counters.full_vector_comparisons > 0);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let config = BuildConfig { state_budget: 2, ..BuildConfig::default() };
        let mut st = StateStore::new(StoreStrategy::Exhaustive, 3, None, &config).unwrap();
        st.lookup_or_insert_map(&[0, 1, 2], None).unwrap();
        st.lookup_or_insert_map(&[0, 0, 0], None).unwrap();
        assert!(matches!(
            st.lookup_or_insert_map(&[1, 1, 1], None),
            Err(BuildError::StateBudgetExceeded { budget: 2, .. })
        ));
        assert_eq!(st.lookup_or_insert_map(&[0, 0, 0], None).unwrap(), (1, false));
    }
}

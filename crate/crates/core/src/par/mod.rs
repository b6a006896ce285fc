//! Parallel SFA construction with static work distribution.
//!
//! All schemes share one [`ConcurrentStateStore`]. Each worker scans the
//! published id list with a private cursor and expands only the
//! `(state, symbol)` pairs it owns:
//!
//! * symbol partition: worker `j` owns every state on the symbols of block `B_j`;
//! * symbol groups: worker `(k, j)` owns states with `id mod g == k` on symbol `j`;
//! * mixed: full groups as above, the remainder group splits its symbols
//!   into blocks over the last state partition;
//! * transposed: worker `w` owns states with `id mod P == w` on all symbols
//!   and derives every successor at once from a transposed table.

mod plan;
mod store;

pub use plan::{distribute_symbols, plan_groups, GroupPlan, SymbolDistribution};
pub use store::ConcurrentStateStore;

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use crate::automaton::{Dfa, StateId, Symbol};
use crate::gf2::FingerprintContext;
use crate::sfa::{encode_map, BuildConfig, BuildError, BuildStats, EncodingError, Sfa, SfaStateId};

use plan::WorkerPlan;
use store::{LocalCounters, Slot, UNSET};

/// Partition layout: `workers <= |Σ|`, each worker owns a block of symbols.
pub fn build_par_symbols(
    dfa: &Dfa,
    workers: usize,
    ctx: &FingerprintContext,
    config: &BuildConfig,
) -> Result<(Sfa, BuildStats), BuildError> {
    let dist = distribute_symbols(dfa.alphabet_size(), workers)?;
    run(dfa, ctx, config, plan::symbol_workers(&dist), false)
}

/// Group layout: `workers` a positive multiple of `|Σ|`; each group of
/// `|Σ|` workers owns one residue class of state ids, one symbol per worker.
pub fn build_par_groups(
    dfa: &Dfa,
    workers: usize,
    ctx: &FingerprintContext,
    config: &BuildConfig,
) -> Result<(Sfa, BuildStats), BuildError> {
    let k = dfa.alphabet_size();
    if workers < k || !workers.is_multiple_of(k) {
        return Err(BuildError::Precondition(format!(
            "grouping needs a positive multiple of {k} workers, got {workers}"
        )));
    }
    let plan = GroupPlan::new(k, workers);
    run(dfa, ctx, config, plan.workers(), false)
}

/// Mixed layout: `workers > |Σ|` and not a multiple of it.
pub fn build_par_mixed(
    dfa: &Dfa,
    workers: usize,
    ctx: &FingerprintContext,
    config: &BuildConfig,
) -> Result<(Sfa, BuildStats), BuildError> {
    let k = dfa.alphabet_size();
    if workers <= k || workers.is_multiple_of(k) {
        return Err(BuildError::Precondition(format!(
            "mixed layout needs more than {k} workers and not a multiple of {k}, got {workers}"
        )));
    }
    let plan = plan_groups(k, workers)?;
    run(dfa, ctx, config, plan.workers(), false)
}

/// Coarse-grained layout: worker `w` expands whole states with
/// `id mod workers == w`, computing all successors from a transposed table.
pub fn build_par_transposed(
    dfa: &Dfa,
    workers: usize,
    ctx: &FingerprintContext,
    config: &BuildConfig,
) -> Result<(Sfa, BuildStats), BuildError> {
    if workers == 0 {
        return Err(BuildError::Precondition("at least one worker is required".into()));
    }
    let all: Vec<Symbol> = (0..dfa.alphabet_size()).map(|a| a as Symbol).collect();
    let plans = (0..workers)
        .map(|w| WorkerPlan { modulus: workers, residue: w, symbols: all.clone() })
        .collect();
    run(dfa, ctx, config, plans, true)
}

/// Successors of `map` on every symbol: row `a` of the result (length
/// `|Q|`) is the successor on symbol `a`. Reads one DFA row per entry of
/// `map` and scatters it into a column.
pub fn transposed_successors(map: &[StateId], dfa: &Dfa, out: &mut Vec<StateId>) {
    let n = map.len();
    let k = dfa.alphabet_size();
    out.clear();
    out.resize(n * k, 0);
    for (q, &src) in map.iter().enumerate() {
        for (a, &t) in dfa.row(src).iter().enumerate() {
            out[a * n + q] = t;
        }
    }
}

struct Shared<'a> {
    dfa: &'a Dfa,
    store: ConcurrentStateStore,
    processed: Vec<AtomicUsize>,
    abort: AtomicBool,
}

fn run(
    dfa: &Dfa,
    ctx: &FingerprintContext,
    config: &BuildConfig,
    plans: Vec<WorkerPlan>,
    transposed: bool,
) -> Result<(Sfa, BuildStats), BuildError> {
    let started = Instant::now();
    let n = dfa.n_states();
    if n > crate::sfa::MAX_ENCODABLE_STATES {
        return Err(EncodingError { n_states: n }.into());
    }
    let buckets = 2 * config.expected_states.max(1);
    let shared = Shared {
        dfa,
        store: ConcurrentStateStore::new(n, dfa.alphabet_size(), buckets, config.state_budget, ctx.clone()),
        processed: plans.iter().map(|_| AtomicUsize::new(0)).collect(),
        abort: AtomicBool::new(false),
    };

    let identity: Vec<StateId> = (0..n as StateId).collect();
    let mut seed = LocalCounters::default();
    let mut scratch = Vec::new();
    encode_map(&identity, &mut scratch)?;
    seed.fingerprints_computed += 1;
    shared
        .store
        .lookup_or_insert(&identity, ctx.fingerprint(&scratch).0, &mut seed)?;

    let results: Vec<(LocalCounters, u64, Option<BuildError>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = plans
            .iter()
            .enumerate()
            .map(|(w, plan)| {
                let shared = &shared;
                scope.spawn(move || worker(shared, w, plan, transposed))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut stats = BuildStats::default();
    let mut failure = None;
    let mut merge = |c: LocalCounters| {
        stats.lookups += c.lookups;
        stats.full_vector_comparisons += c.full_vector_comparisons;
        stats.fingerprint_comparisons += c.fingerprint_comparisons;
        stats.fingerprints_computed += c.fingerprints_computed;
        stats.max_chain_length = stats.max_chain_length.max(c.max_chain_length);
        stats.discarded_ids += c.discarded_ids;
    };
    merge(seed);
    let mut per_worker = Vec::with_capacity(results.len());
    for (c, expansions, err) in results {
        merge(c);
        per_worker.push(expansions);
        failure = failure.or(err);
    }
    stats.per_worker_expansions = per_worker;
    stats.hash_buckets = shared.store.bucket_count() as u64;

    let store = &shared.store;
    let reserved = store.reserved();
    let live: Vec<usize> =
        (0..reserved).filter(|&i| matches!(store.slot(i), Slot::Live(_))).collect();
    stats.n_sfa_states = live.len() as u64;
    stats.wall_time_ns = started.elapsed().as_nanos() as u64;
    if let Some(e) = failure {
        return Err(e.with_stats(stats));
    }

    let mut dense = vec![UNSET; reserved];
    for (new, &old) in live.iter().enumerate() {
        dense[old] = new as SfaStateId;
    }
    let k = dfa.alphabet_size();
    let mut maps = Vec::with_capacity(live.len() * n);
    let mut delta = Vec::with_capacity(live.len() * k);
    for &old in &live {
        let node = store.live(old);
        maps.extend_from_slice(&node.map);
        for cell in node.row.iter() {
            let t = cell.load(Ordering::Acquire);
            assert!(t != UNSET, "state {old} left with an unexpanded transition");
            let t = dense[t as usize];
            assert!(t != UNSET, "transition into a discarded id");
            delta.push(t);
        }
    }
    stats.wall_time_ns = started.elapsed().as_nanos() as u64;
    Ok((Sfa::from_tables(dfa, maps, delta), stats))
}

fn worker(
    shared: &Shared<'_>,
    me: usize,
    plan: &WorkerPlan,
    transposed: bool,
) -> (LocalCounters, u64, Option<BuildError>) {
    let store = &shared.store;
    let dfa = shared.dfa;
    let n = dfa.n_states();
    let mut counters = LocalCounters::default();
    let mut expansions = 0u64;
    let mut cursor = 0usize;
    let mut succ = Vec::with_capacity(n);
    let mut table = Vec::new();
    let mut bytes = Vec::with_capacity(2 * n);

    let mut insert = |map: &[StateId], counters: &mut LocalCounters| -> Result<SfaStateId, BuildError> {
        encode_map(map, &mut bytes)?;
        counters.fingerprints_computed += 1;
        let fp = store.ctx().fingerprint(&bytes).0;
        store.lookup_or_insert(map, fp, counters).map(|(id, _)| id)
    };

    loop {
        if shared.abort.load(Ordering::Relaxed) {
            return (counters, expansions, None);
        }
        let reserved = store.reserved();
        let mut progressed = false;
        while cursor < reserved {
            let node = match store.slot(cursor) {
                Slot::Pending => break,
                Slot::Discarded => {
                    cursor += 1;
                    progressed = true;
                    continue;
                }
                Slot::Live(node) => node,
            };
            if cursor % plan.modulus == plan.residue {
                let outcome = if transposed {
                    transposed_successors(&node.map, dfa, &mut table);
                    table.chunks_exact(n).enumerate().try_for_each(|(a, row)| {
                        let id = insert(row, &mut counters)?;
                        ConcurrentStateStore::set_transition(node, a as Symbol, id);
                        expansions += 1;
                        Ok(())
                    })
                } else {
                    plan.symbols.iter().try_for_each(|&a| {
                        crate::sfa::successor_into(&node.map, a, dfa, &mut succ);
                        let id = insert(&succ, &mut counters)?;
                        ConcurrentStateStore::set_transition(node, a, id);
                        expansions += 1;
                        Ok(())
                    })
                };
                if let Err(e) = outcome {
                    shared.abort.store(true, Ordering::Relaxed);
                    return (counters, expansions, Some(e));
                }
            }
            cursor += 1;
            progressed = true;
        }
        shared.processed[me].store(cursor, Ordering::SeqCst);
        if cursor == reserved && finished(shared, cursor) {
            return (counters, expansions, None);
        }
        if !progressed {
            std::thread::yield_now();
        }
    }
}

/// Every worker has scanned every reserved id and nobody reserved more.
///
/// An id is only reserved by a worker expanding a smaller id, and that
/// worker's published cursor stays at or below the id it is expanding
/// until the insert has completed. So if all cursors equal the reserved
/// count, and the count is unchanged afterwards, no insert is in flight.
fn finished(shared: &Shared<'_>, seen: usize) -> bool {
    let store = &shared.store;
    store.reserved() == seen
        && shared.processed.iter().all(|p| p.load(Ordering::SeqCst) == seen)
        && store.reserved() == seen
}

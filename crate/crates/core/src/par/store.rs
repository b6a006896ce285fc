//! Insert-only concurrent state store.
//!
//! Every new mapping reserves an id from a global counter, then tries to
//! link a node onto the tail of its fingerprint bucket's chain with a
//! compare-and-swap. A worker that loses the race keeps walking the chain
//! from the winner's node; if the winner holds the same mapping it adopts
//! that id and marks its own reserved slot as discarded. No insert ever
//! waits for another thread.
//!
//! Slot `i` of the append-only id list is empty until the inserter that
//! reserved id `i` decides it, and is immutable afterwards.

use std::ptr;
use std::sync::atomic::{AtomicPtr, AtomicU32, AtomicUsize, Ordering};

use crate::automaton::{StateId, Symbol};
use crate::gf2::FingerprintContext;
use crate::sfa::{BuildError, SfaStateId};

pub(crate) const UNSET: u32 = u32::MAX;
const FIRST_SEGMENT: usize = 1024;
const SEGMENTS: usize = 40;

pub(crate) struct Node {
    pub id: SfaStateId,
    pub fp: u64,
    pub map: Box<[StateId]>,
    /// Outgoing transitions, written once each by the owning worker.
    pub row: Box<[AtomicU32]>,
    next: AtomicPtr<Node>,
}

pub(crate) enum Slot<'a> {
    Pending,
    Discarded,
    Live(&'a Node),
}

fn tombstone() -> *mut Node {
    ptr::dangling_mut()
}

/// Per-worker counters, merged after the build.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct LocalCounters {
    pub lookups: u64,
    pub full_vector_comparisons: u64,
    pub fingerprint_comparisons: u64,
    pub fingerprints_computed: u64,
    pub max_chain_length: u64,
    pub discarded_ids: u64,
}

pub struct ConcurrentStateStore {
    dim: usize,
    alphabet_size: usize,
    budget: usize,
    buckets: Box<[AtomicPtr<Node>]>,
    segments: [AtomicPtr<AtomicPtr<Node>>; SEGMENTS],
    reserved: AtomicUsize,
    ctx: FingerprintContext,
}

fn locate(index: usize) -> (usize, usize) {
    let block = index / FIRST_SEGMENT + 1;
    let seg = (usize::BITS - 1 - block.leading_zeros()) as usize;
    (seg, index - FIRST_SEGMENT * ((1 << seg) - 1))
}

fn segment_len(seg: usize) -> usize {
    FIRST_SEGMENT << seg
}

impl ConcurrentStateStore {
    pub fn new(
        dim: usize,
        alphabet_size: usize,
        buckets: usize,
        budget: usize,
        ctx: FingerprintContext,
    ) -> Self {
        let n_buckets = buckets.max(1).next_power_of_two();
        ConcurrentStateStore {
            dim,
            alphabet_size,
            budget,
            buckets: (0..n_buckets).map(|_| AtomicPtr::new(ptr::null_mut())).collect(),
            segments: std::array::from_fn(|_| AtomicPtr::new(ptr::null_mut())),
            reserved: AtomicUsize::new(0),
            ctx,
        }
    }

    pub fn ctx(&self) -> &FingerprintContext {
        &self.ctx
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of ids handed out so far, including pending and discarded ones.
    pub fn reserved(&self) -> usize {
        self.reserved.load(Ordering::SeqCst)
    }

    fn slot_cell(&self, index: usize) -> &AtomicPtr<Node> {
        let (seg, off) = locate(index);
        let mut base = self.segments[seg].load(Ordering::Acquire);
        if base.is_null() {
            let fresh: Box<[AtomicPtr<Node>]> =
                (0..segment_len(seg)).map(|_| AtomicPtr::new(ptr::null_mut())).collect();
            let fresh = Box::into_raw(fresh) as *mut AtomicPtr<Node>;
            match self.segments[seg].compare_exchange(
                ptr::null_mut(),
                fresh,
                Ordering::AcqRel,
                Ordering::Acquire,
            ) {
                Ok(_) => base = fresh,
                Err(winner) => {
                    // SAFETY: `fresh` was never shared.
                    unsafe { drop(Box::from_raw(ptr::slice_from_raw_parts_mut(fresh, segment_len(seg)))) };
                    base = winner;
                }
            }
        }
        // SAFETY: segments are never freed before the store, and `off` is
        // within the segment length by construction of `locate`.
        unsafe { &*base.add(off) }
    }

    pub(crate) fn slot(&self, index: usize) -> Slot<'_> {
        let p = self.slot_cell(index).load(Ordering::Acquire);
        if p.is_null() {
            Slot::Pending
        } else if p == tombstone() {
            Slot::Discarded
        } else {
            // SAFETY: live nodes are owned by the store until it drops.
            Slot::Live(unsafe { &*p })
        }
    }

    fn new_node(&self, map: &[StateId], fp: u64) -> Result<Box<Node>, BuildError> {
        let id = self.reserved.fetch_add(1, Ordering::SeqCst);
        if id >= self.budget || id >= UNSET as usize {
            self.slot_cell(id).store(tombstone(), Ordering::Release);
            return Err(BuildError::over_budget(self.budget));
        }
        Ok(Box::new(Node {
            id: id as SfaStateId,
            fp,
            map: map.into(),
            row: (0..self.alphabet_size).map(|_| AtomicU32::new(UNSET)).collect(),
            next: AtomicPtr::new(ptr::null_mut()),
        }))
    }

    /// Returns the id of `map`, inserting it if no equal mapping is linked.
    pub(crate) fn lookup_or_insert(
        &self,
        map: &[StateId],
        fp: u64,
        counters: &mut LocalCounters,
    ) -> Result<(SfaStateId, bool), BuildError> {
        self.lookup_or_insert_inner(map, fp, counters, false)
    }

    fn lookup_or_insert_inner(
        &self,
        map: &[StateId],
        fp: u64,
        counters: &mut LocalCounters,
        stall_after_link: bool,
    ) -> Result<(SfaStateId, bool), BuildError> {
        counters.lookups += 1;
        let mut link = &self.buckets[crate::sfa::store::bucket_index(fp, self.buckets.len())];
        let mut pending: Option<Box<Node>> = None;
        let mut visited = 0u64;
        loop {
            let cur = link.load(Ordering::Acquire);
            if cur.is_null() {
                let node = match pending.take() {
                    Some(n) => n,
                    None => self.new_node(map, fp)?,
                };
                let id = node.id;
                let raw = Box::into_raw(node);
                match link.compare_exchange(ptr::null_mut(), raw, Ordering::AcqRel, Ordering::Acquire) {
                    Ok(_) => {
                        counters.max_chain_length = counters.max_chain_length.max(visited + 1);
                        if !stall_after_link {
                            self.slot_cell(id as usize).store(raw, Ordering::Release);
                        }
                        return Ok((id, true));
                    }
                    Err(_) => {
                        // SAFETY: the CAS failed, so `raw` is still exclusively ours.
                        pending = Some(unsafe { Box::from_raw(raw) });
                        continue;
                    }
                }
            }
            // SAFETY: linked nodes stay alive for the lifetime of the store.
            let node = unsafe { &*cur };
            visited += 1;
            counters.fingerprint_comparisons += 1;
            if node.fp == fp {
                counters.full_vector_comparisons += 1;
                if *node.map == *map {
                    if let Some(mine) = pending {
                        self.slot_cell(mine.id as usize).store(tombstone(), Ordering::Release);
                        counters.discarded_ids += 1;
                    }
                    counters.max_chain_length = counters.max_chain_length.max(visited);
                    return Ok((node.id, false));
                }
            }
            link = &node.next;
        }
    }

    /// Links a new node but never publishes its slot, as if the inserting
    /// thread were suspended right after its compare-and-swap.
    #[cfg(test)]
    pub(crate) fn insert_and_stall(&self, map: &[StateId], fp: u64) -> SfaStateId {
        let mut c = LocalCounters::default();
        self.lookup_or_insert_inner(map, fp, &mut c, true).unwrap().0
    }

    /// Writes `delta[state][a]`.
    pub(crate) fn set_transition(node: &Node, a: Symbol, target: SfaStateId) {
        let prev = node.row[a as usize].swap(target, Ordering::Release);
        debug_assert_eq!(prev, UNSET, "transition written twice");
    }

    /// Live node of `id`; panics unless the slot is live.
    pub(crate) fn live(&self, id: usize) -> &Node {
        match self.slot(id) {
            Slot::Live(n) => n,
            _ => panic!("slot {id} is not live"),
        }
    }
}

impl Drop for ConcurrentStateStore {
    fn drop(&mut self) {
        let reserved = *self.reserved.get_mut();
        for i in 0..reserved {
            let (seg, off) = locate(i);
            let base = *self.segments[seg].get_mut();
            if base.is_null() {
                continue;
            }
            // SAFETY: exclusive access in drop; live pointers came from Box::into_raw.
            let p = unsafe { (*base.add(off)).load(Ordering::Relaxed) };
            if !p.is_null() && p != tombstone() {
                unsafe { drop(Box::from_raw(p)) };
            }
        }
        for (seg, cell) in self.segments.iter_mut().enumerate() {
            let base = *cell.get_mut();
            if !base.is_null() {
                // SAFETY: allocated in `slot_cell` with exactly this length.
                unsafe { drop(Box::from_raw(ptr::slice_from_raw_parts_mut(base, segment_len(seg)))) };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(buckets: usize) -> ConcurrentStateStore {
        ConcurrentStateStore::new(3, 2, buckets, 1 << 20, FingerprintContext::default())
    }

    #[test]
    fn locate_covers_indices_contiguously() {
        assert_eq!(locate(0), (0, 0));
        assert_eq!(locate(1023), (0, 1023));
        assert_eq!(locate(1024), (1, 0));
        assert_eq!(locate(3071), (1, 2047));
        assert_eq!(locate(3072), (2, 0));
        let mut expected = (0, 0);
        for i in 0..20_000 {
            let got = locate(i);
            assert_eq!(got, expected, "{i}");
            expected = if got.1 + 1 == segment_len(got.0) { (got.0 + 1, 0) } else { (got.0, got.1 + 1) };
        }
    }

    #[test]
    fn same_mapping_gets_one_id() {
        let s = store(1);
        let mut c = LocalCounters::default();
        assert_eq!(s.lookup_or_insert(&[0, 1, 2], 5, &mut c).unwrap(), (0, true));
        assert_eq!(s.lookup_or_insert(&[1, 1, 2], 5, &mut c).unwrap(), (1, true));
        assert_eq!(s.lookup_or_insert(&[0, 1, 2], 5, &mut c).unwrap(), (0, false));
        assert_eq!(s.lookup_or_insert(&[1, 1, 2], 5, &mut c).unwrap(), (1, false));
        assert_eq!(s.reserved(), 2);
        assert!(matches!(s.slot(1), Slot::Live(n) if *n.map == [1, 1, 2]));
    }

    #[test]
    fn inserts_progress_past_a_stalled_inserter() {
        // One bucket, so every insert walks past the stalled node.
        let s = store(1);
        let stalled = s.insert_and_stall(&[2, 2, 2], 9);
        assert!(matches!(s.slot(stalled as usize), Slot::Pending));
        let mut c = LocalCounters::default();
        assert_eq!(s.lookup_or_insert(&[0, 0, 0], 9, &mut c).unwrap(), (1, true));
        assert_eq!(s.lookup_or_insert(&[2, 2, 2], 9, &mut c).unwrap(), (stalled, false));
        assert!(matches!(s.slot(1), Slot::Live(_)));
        // Publish the stalled node so the store frees it.
        let mut p = s.buckets[0].load(Ordering::Acquire);
        while unsafe { (*p).id } != stalled {
            p = unsafe { (*p).next.load(Ordering::Acquire) };
        }
        s.slot_cell(stalled as usize).store(p, Ordering::Release);
    }

    #[test]
    fn concurrent_inserts_assign_unique_ids() {
        let s = store(4);
        let maps: Vec<[StateId; 3]> = (0..27u32).map(|i| [i % 3, (i / 3) % 3, i / 9]).collect();
        let ids: Vec<Vec<SfaStateId>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..4)
                .map(|t| {
                    let (s, maps) = (&s, &maps);
                    scope.spawn(move || {
                        let mut c = LocalCounters::default();
                        let mut out = vec![0; maps.len()];
                        for round in 0..maps.len() {
                            let i = (round * 7 + t * 5) % maps.len();
                            out[i] = s.lookup_or_insert(&maps[i], (i % 6) as u64, &mut c).unwrap().0;
                        }
                        out
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for w in &ids[1..] {
            assert_eq!(w, &ids[0]);
        }
        let mut distinct = ids[0].clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 27);
        let live = (0..s.reserved()).filter(|&i| matches!(s.slot(i), Slot::Live(_))).count();
        assert_eq!(live, 27);
    }

    #[test]
    fn budget_marks_slot_discarded() {
        let s = ConcurrentStateStore::new(1, 1, 4, 1, FingerprintContext::default());
        let mut c = LocalCounters::default();
        s.lookup_or_insert(&[0], 0, &mut c).unwrap();
        assert!(matches!(s.lookup_or_insert(&[1], 1, &mut c), Err(BuildError::StateBudgetExceeded { .. })));
        assert!(matches!(s.slot(1), Slot::Discarded));
    }
}

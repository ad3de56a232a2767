//! Three-phase parallel batch updates: recursive batch-merge into
//! destination leaves, work-efficient bottom-up counting of violated density
//! bounds, and disjoint redistribution of the resulting target regions.
//!
//! Small batches fall back to point updates; batches at least half the
//! current size rebuild the whole structure by merging. All internal
//! parallelism is deterministic: the final slot array depends only on the
//! set state and the batch, never on the thread count.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use dashmap::{DashMap, DashSet};
use rayon::prelude::*;

use crate::kernel::{Layout, NodeId};
use crate::leaf::LeafStore;
use crate::oracle::WorkCounters;
use crate::set::{leaf_for_in, spread_into, Escalate, PmaSet};
use crate::Error;

/// A sorted, deduplicated sequence of keys ready for a batch update.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Batch {
    keys: Vec<u64>,
}

impl Batch {
    /// Wraps keys that are already strictly increasing and nonzero.
    pub fn from_sorted(keys: Vec<u64>) -> Result<Self, Error> {
        if keys.first() == Some(&0) {
            return Err(Error::ZeroKey);
        }
        if !keys.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Input("batch keys must be strictly increasing".into()));
        }
        Ok(Batch { keys })
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Sorts and deduplicates a raw key sequence into a [`Batch`].
pub fn sort_dedupe(mut raw: Vec<u64>) -> Result<Batch, Error> {
    if raw.contains(&0) {
        return Err(Error::ZeroKey);
    }
    raw.par_sort_unstable();
    raw.dedup();
    Ok(Batch { keys: raw })
}

/// Whether a batch adds or removes its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BatchDirection {
    Insert,
    Delete,
}

/// Result of the merge phase: which leaves changed, which of them hold their
/// elements out-of-place because the merged run outgrew the leaf, and the net
/// element-count change.
#[derive(Debug)]
pub struct MergeOutcome {
    /// Sorted indices of every leaf the merge touched.
    pub modified_leaves: Vec<usize>,
    /// Full merged element list per overflowed leaf; the leaf's own slots
    /// are stale until the redistribution phase drains the buffer.
    pub overflow: DashMap<usize, Vec<u64>>,
    /// Elements added (positive) or removed (negative).
    pub net_change: isize,
}

/// Output of the counting phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Targets {
    /// Pairwise-disjoint regions to redistribute, sorted by region start.
    Nodes(Vec<NodeId>),
    /// The root itself violates its bound; resize the whole array.
    RootResize,
}

/// Whether `used` slots violate the bound of `level` for the direction.
pub(crate) fn bound_violated(
    layout: &Layout,
    level: u32,
    used: usize,
    dir: BatchDirection,
) -> bool {
    let region = (layout.leaf_size << level) as f64;
    match dir {
        BatchDirection::Insert => used as f64 > layout.upper_bound(level) * region,
        BatchDirection::Delete => (used as f64) < layout.lower_bound(level) * region,
    }
}

impl<L: LeafStore> PmaSet<L> {
    /// Adds every key of `batch`; equivalent to point-inserting each key.
    pub fn batch_insert(&mut self, batch: &Batch) {
        if batch.is_empty() {
            return;
        }
        if batch.len() < self.config().point_insert_cutoff {
            for &k in batch.keys() {
                self.insert(k).expect("batch keys are nonzero");
            }
            return;
        }
        if batch.len() as f64 >= self.config().rebuild_fraction * self.len() as f64 {
            let existing = self.collect_all();
            let merged = union(
                &existing,
                batch.keys(),
                self.config().parallel_merge_threshold,
            );
            self.rebuild_into_fit(&merged);
            return;
        }
        let outcome = self.merge_phase(batch, BatchDirection::Insert);
        let n = (self.len() as isize + outcome.net_change) as usize;
        self.set_element_count(n);
        let targets = self.counting_phase(&outcome, BatchDirection::Insert);
        self.redistribute_phase(&targets, &outcome, BatchDirection::Insert);
        debug_assert!(outcome.overflow.is_empty());
    }

    /// Removes every key of `batch`; absent keys are ignored.
    pub fn batch_delete(&mut self, batch: &Batch) {
        if batch.is_empty() {
            return;
        }
        if batch.len() < self.config().point_insert_cutoff {
            for &k in batch.keys() {
                self.delete(k);
            }
            return;
        }
        if batch.len() as f64 >= self.config().rebuild_fraction * self.len() as f64 {
            let existing = self.collect_all();
            let remaining = difference(&existing, batch.keys());
            self.rebuild_into_fit(&remaining);
            return;
        }
        let outcome = self.merge_phase(batch, BatchDirection::Delete);
        let n = (self.len() as isize + outcome.net_change) as usize;
        self.set_element_count(n);
        let targets = self.counting_phase(&outcome, BatchDirection::Delete);
        self.redistribute_phase(&targets, &outcome, BatchDirection::Delete);
        debug_assert!(outcome.overflow.is_empty());
    }

    /// Phase 1: recursively splits the leaf range at the batch median's
    /// destination leaf and merges each sub-run into its leaf, in parallel
    /// over independent sections. Runs that outgrow their leaf move to an
    /// overflow buffer.
    pub fn merge_phase(&mut self, batch: &Batch, dir: BatchDirection) -> MergeOutcome {
        let ctx = MergeCtx {
            leaf_size: self.layout().leaf_size,
            parallel_threshold: self.config().parallel_merge_threshold,
            modified: DashSet::new(),
            overflow: DashMap::new(),
            dir,
        };
        let net_change = merge_rec::<L>(self.slots_mut(), 0, batch.keys(), &ctx);
        let mut modified_leaves: Vec<usize> = ctx.modified.into_iter().collect();
        modified_leaves.sort_unstable();
        MergeOutcome {
            modified_leaves,
            overflow: ctx.overflow,
            net_change,
        }
    }

    /// Phase 2: processes levels bottom-up, serially across levels and in
    /// parallel within one. A counted node that violates its bound enqueues
    /// its parent; sibling counts not already cached are computed by a
    /// top-down recursion that caches every node it touches, so each slot is
    /// counted at most once per phase.
    pub fn counting_phase(&self, outcome: &MergeOutcome, dir: BatchDirection) -> Targets {
        let layout = self.layout().clone();
        let counters = self.counters().cloned();
        let cache: DashMap<NodeId, usize> = DashMap::new();
        let candidates: DashSet<NodeId> = DashSet::new();
        let root_violated = AtomicBool::new(false);

        let first_pending: DashSet<NodeId> = DashSet::new();
        outcome.modified_leaves.par_iter().for_each(|&leaf| {
            let node = NodeId::leaf(leaf);
            if let Some(c) = &counters {
                c.cells_counted
                    .fetch_add(layout.leaf_size as u64, Ordering::Relaxed);
            }
            let used = self.leaf_used(outcome, leaf);
            note_count(&cache, node, used, &counters);
            if bound_violated(&layout, 0, used, dir) {
                if layout.is_root(node) {
                    root_violated.store(true, Ordering::Relaxed);
                } else {
                    first_pending.insert(layout.parent(node));
                }
            }
        });

        let mut pending: Vec<NodeId> = first_pending.into_iter().collect();
        while !pending.is_empty() {
            let next: DashSet<NodeId> = DashSet::new();
            pending.par_iter().for_each(|&node| {
                let used = self.count_cached(outcome, node, &cache, &counters);
                if bound_violated(&layout, node.level, used, dir) {
                    if layout.is_root(node) {
                        root_violated.store(true, Ordering::Relaxed);
                    } else {
                        next.insert(layout.parent(node));
                    }
                } else {
                    candidates.insert(node);
                }
            });
            pending = next.into_iter().collect();
        }

        if root_violated.load(Ordering::Relaxed) {
            return Targets::RootResize;
        }
        // Keep only maximal candidates: an ancestor's redistribution already
        // covers every descendant candidate.
        let mut cands: Vec<NodeId> = candidates.into_iter().collect();
        cands.sort_by(|a, b| b.level.cmp(&a.level).then(a.index.cmp(&b.index)));
        let mut kept_set: HashSet<NodeId> = HashSet::new();
        let mut kept = Vec::new();
        'next_candidate: for c in cands {
            let mut anc = c;
            while !layout.is_root(anc) {
                anc = layout.parent(anc);
                if kept_set.contains(&anc) {
                    continue 'next_candidate;
                }
            }
            kept_set.insert(c);
            kept.push(c);
        }
        kept.sort_by_key(|n| layout.region(*n).start);
        Targets::Nodes(kept)
    }

    /// Phase 3: redistributes every target region in parallel (the regions
    /// are disjoint), draining the overflow buffers it covers. A region that
    /// cannot fit its own elements per-leaf escalates to successively larger
    /// regions, and at the root to a resize.
    pub fn redistribute_phase(
        &mut self,
        targets: &Targets,
        outcome: &MergeOutcome,
        dir: BatchDirection,
    ) {
        let nodes = match targets {
            Targets::RootResize => {
                let root = self.layout().root();
                let elements = self.gather_with_overflow(outcome, root);
                outcome.overflow.clear();
                match dir {
                    BatchDirection::Insert => self.grow_and_spread(&elements),
                    BatchDirection::Delete => self.shrink_and_spread(&elements),
                }
                return;
            }
            Targets::Nodes(nodes) => nodes,
        };
        if nodes.is_empty() {
            debug_assert!(outcome.overflow.is_empty());
            return;
        }
        let gathered: Vec<Vec<u64>> = nodes
            .par_iter()
            .map(|&n| self.gather_with_overflow(outcome, n))
            .collect();
        if let Some(c) = self.counters() {
            let moved: usize = gathered.iter().map(Vec::len).sum();
            c.elements_moved.fetch_add(moved as u64, Ordering::Relaxed);
        }
        let layout = self.layout().clone();
        let leaf_size = layout.leaf_size;
        // Carve the slot array into the disjoint target windows.
        let mut jobs = Vec::with_capacity(nodes.len());
        let mut rest: &mut [L::Slot] = self.slots_mut();
        let mut consumed = 0usize;
        for &n in nodes {
            let region = layout.region(n);
            let (_, tail) = rest.split_at_mut(region.start - consumed);
            let (window, tail) = tail.split_at_mut(region.end - region.start);
            jobs.push((n, window));
            rest = tail;
            consumed = region.end;
        }
        let mut escalations: Vec<NodeId> = jobs
            .into_par_iter()
            .zip(gathered.par_iter())
            .filter_map(|((node, window), elements)| {
                match spread_into::<L>(window, leaf_size, elements) {
                    Ok(()) => {
                        for leaf in layout.leaves_of(node) {
                            outcome.overflow.remove(&leaf);
                        }
                        None
                    }
                    Err(Escalate) => Some(node),
                }
            })
            .collect();
        escalations.sort();
        for node in escalations {
            self.escalate(node, outcome, dir);
        }
        debug_assert!(outcome.overflow.is_empty() || !matches!(targets, Targets::Nodes(_)));
    }

    /// Occupied slots of a leaf as the counting phase sees it: the logical
    /// encoded size of an overflow buffer, else the in-place fill.
    fn leaf_used(&self, outcome: &MergeOutcome, leaf: usize) -> usize {
        match outcome.overflow.get(&leaf) {
            Some(buf) => L::encoded_slots(&buf),
            None => L::used_slots(self.leaf_slots(leaf)),
        }
    }

    /// Cached occupancy of `node`; uncached descendants are counted top-down
    /// and memoized on the way.
    fn count_cached(
        &self,
        outcome: &MergeOutcome,
        node: NodeId,
        cache: &DashMap<NodeId, usize>,
        counters: &Option<Arc<WorkCounters>>,
    ) -> usize {
        if let Some(used) = cache.get(&node) {
            if let Some(c) = counters {
                c.cache_hits.fetch_add(1, Ordering::Relaxed);
            }
            return *used;
        }
        let used = if node.level == 0 {
            if let Some(c) = counters {
                c.cells_counted
                    .fetch_add(self.layout().leaf_size as u64, Ordering::Relaxed);
            }
            self.leaf_used(outcome, node.index)
        } else {
            let (a, b) = self.layout().children(node);
            self.count_cached(outcome, a, cache, counters)
                + self.count_cached(outcome, b, cache, counters)
        };
        note_count(cache, node, used, counters);
        used
    }

    /// Region elements in order, reading overflow buffers in place of stale
    /// leaf slots. Non-destructive: buffers stay until their region is
    /// successfully respread.
    fn gather_with_overflow(&self, outcome: &MergeOutcome, node: NodeId) -> Vec<u64> {
        let mut out = Vec::new();
        for leaf in self.layout().leaves_of(node) {
            match outcome.overflow.get(&leaf) {
                Some(buf) => out.extend_from_slice(&buf),
                None => L::decode_into(self.leaf_slots(leaf), &mut out),
            }
        }
        out
    }

    /// Retries a failed redistribution on successively larger regions,
    /// resizing at the root. Runs serially after the parallel pass, so every
    /// other region is quiescent.
    fn escalate(&mut self, mut node: NodeId, outcome: &MergeOutcome, dir: BatchDirection) {
        loop {
            if self.layout().is_root(node) {
                let root = self.layout().root();
                let elements = self.gather_with_overflow(outcome, root);
                outcome.overflow.clear();
                match dir {
                    BatchDirection::Insert => self.grow_and_spread(&elements),
                    BatchDirection::Delete => self.shrink_and_spread(&elements),
                }
                return;
            }
            node = self.layout().parent(node);
            let elements = self.gather_with_overflow(outcome, node);
            if self.spread_region(node, &elements).is_ok() {
                for leaf in self.layout().leaves_of(node) {
                    outcome.overflow.remove(&leaf);
                }
                return;
            }
        }
    }
}

fn note_count(
    cache: &DashMap<NodeId, usize>,
    node: NodeId,
    used: usize,
    counters: &Option<Arc<WorkCounters>>,
) {
    if let Some(c) = counters {
        c.nodes_counted.fetch_add(1, Ordering::Relaxed);
        if cache.insert(node, used).is_some() {
            c.recounts.fetch_add(1, Ordering::Relaxed);
        }
    } else {
        cache.insert(node, used);
    }
}

struct MergeCtx {
    leaf_size: usize,
    parallel_threshold: usize,
    modified: DashSet<usize>,
    overflow: DashMap<usize, Vec<u64>>,
    dir: BatchDirection,
}

/// Batch recursions with at least this many keys fork left/right work.
const FORK_GRAIN: usize = 512;

/// Places every key of `batch` into its destination leaf within `window`
/// (leaves `first_leaf..`), or that leaf's overflow buffer. Returns the net
/// element-count change.
///
/// All head reads of one invocation happen before it forks; forked calls
/// write only within their disjoint sub-windows, so reads never race writes.
fn merge_rec<L: LeafStore>(
    window: &mut [L::Slot],
    first_leaf: usize,
    batch: &[u64],
    ctx: &MergeCtx,
) -> isize {
    if batch.is_empty() {
        return 0;
    }
    let ls = ctx.leaf_size;
    let num_leaves = window.len() / ls;
    if num_leaves == 1 {
        return merge_leaf::<L>(window, first_leaf, batch, ctx);
    }
    let median = batch[batch.len() / 2];
    // Destination leaf of the median within this window; keys below every
    // head in the window fall to the window's first leaf.
    let (rel, rel_head) = match leaf_for_in::<L>(window, ls, median) {
        Some((idx, head)) => (idx, Some(head)),
        None => (0, None),
    };
    // Maximal batch run destined for that leaf, found by its head bounds.
    // Keys below every head in the window also land in the first leaf.
    let lo = if rel == 0 {
        0
    } else {
        rel_head.map_or(0, |h| batch.partition_point(|&k| k < h))
    };
    let hi_head = (rel + 1..num_leaves).find_map(|i| L::head(&window[i * ls..(i + 1) * ls]));
    let hi = hi_head.map_or(batch.len(), |h| batch.partition_point(|&k| k < h));
    let (left_batch, rest) = batch.split_at(lo);
    let (mid_batch, right_batch) = rest.split_at(hi - lo);
    let (left_win, rest_win) = window.split_at_mut(rel * ls);
    let (mid_win, right_win) = rest_win.split_at_mut(ls);
    if batch.len() >= FORK_GRAIN {
        let ((a, b), c) = rayon::join(
            || {
                rayon::join(
                    || merge_rec::<L>(left_win, first_leaf, left_batch, ctx),
                    || merge_rec::<L>(right_win, first_leaf + rel + 1, right_batch, ctx),
                )
            },
            || merge_leaf::<L>(mid_win, first_leaf + rel, mid_batch, ctx),
        );
        a + b + c
    } else {
        merge_leaf::<L>(mid_win, first_leaf + rel, mid_batch, ctx)
            + merge_rec::<L>(left_win, first_leaf, left_batch, ctx)
            + merge_rec::<L>(right_win, first_leaf + rel + 1, right_batch, ctx)
    }
}

fn merge_leaf<L: LeafStore>(
    leaf: &mut [L::Slot],
    leaf_idx: usize,
    batch: &[u64],
    ctx: &MergeCtx,
) -> isize {
    if batch.is_empty() {
        return 0;
    }
    ctx.modified.insert(leaf_idx);
    let mut existing = Vec::new();
    L::decode_into(leaf, &mut existing);
    match ctx.dir {
        BatchDirection::Insert => {
            let merged = union(&existing, batch, ctx.parallel_threshold);
            let added = (merged.len() - existing.len()) as isize;
            if L::encoded_slots(&merged) <= leaf.len() {
                L::write_leaf(leaf, &merged);
            } else {
                ctx.overflow.insert(leaf_idx, merged);
            }
            added
        }
        BatchDirection::Delete => {
            // Removing keys never enlarges a leaf encoding, so this always
            // fits in place.
            let remaining = difference(&existing, batch);
            let removed = (existing.len() - remaining.len()) as isize;
            L::write_leaf(leaf, &remaining);
            -removed
        }
    }
}

/// Sorted-unique union of two sorted-unique runs; splits at the larger run's
/// midpoint key and recurses in parallel above `parallel_threshold`.
pub(crate) fn union(a: &[u64], b: &[u64], parallel_threshold: usize) -> Vec<u64> {
    if a.len() + b.len() < parallel_threshold.max(2) {
        return union_serial(a, b);
    }
    let (big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mid = big.len() / 2;
    let pivot = big[mid];
    let split = small.partition_point(|&k| k < pivot);
    let (mut left, right) = rayon::join(
        || union(&big[..mid], &small[..split], parallel_threshold),
        || union(&big[mid..], &small[split..], parallel_threshold),
    );
    left.extend_from_slice(&right);
    left
}

fn union_serial(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Elements of sorted-unique `a` not present in sorted-unique `b`.
pub(crate) fn difference(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j < b.len() && b[j] == x {
            continue;
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaf::{CompressedLeaf, UncompressedLeaf};
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn sort_dedupe_examples() {
        assert_eq!(sort_dedupe(vec![5, 3, 5, 1]).unwrap().keys(), &[1, 3, 5]);
        assert_eq!(sort_dedupe(vec![1, 3, 5]).unwrap().keys(), &[1, 3, 5]);
        assert!(sort_dedupe(vec![1, 0, 3]).is_err());
        assert!(Batch::from_sorted(vec![1, 1]).is_err());
    }

    fn random_batch(rng: &mut impl Rng, k: usize) -> Batch {
        sort_dedupe((0..k).map(|_| rng.gen_range(1..1u64 << 40)).collect()).unwrap()
    }

    #[test]
    fn batch_insert_equals_point_inserts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..8 {
            let base = random_batch(&mut rng, 5_000 << (trial % 3));
            let batch = random_batch(&mut rng, 3_000);
            let mut batched = PmaSet::<CompressedLeaf>::new();
            batched.batch_insert(&base);
            batched.batch_insert(&batch);
            let mut pointwise = PmaSet::<CompressedLeaf>::new();
            pointwise.batch_insert(&base);
            for &k in batch.keys() {
                pointwise.insert(k).unwrap();
            }
            assert_eq!(batched.to_vec(), pointwise.to_vec());
            oracle::validate(&batched).unwrap();
            assert_eq!(batched.len(), batched.to_vec().len());
        }
    }

    #[test]
    fn batch_delete_inverts_batch_insert() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        let base = random_batch(&mut rng, 30_000);
        let extra = random_batch(&mut rng, 8_000);
        let mut set = PmaSet::<UncompressedLeaf>::new();
        set.batch_insert(&base);
        let before = set.to_vec();
        set.batch_insert(&extra);
        oracle::validate(&set).unwrap();
        set.batch_delete(&extra);
        oracle::validate(&set).unwrap();
        // Inverse up to keys the two batches share: deleting the batch also
        // removes any of its keys that were present beforehand.
        assert_eq!(set.to_vec(), difference(&before, extra.keys()));
    }

    #[test]
    fn counting_phase_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(44);
        let mut set = PmaSet::<CompressedLeaf>::new();
        set.enable_instrumentation();
        set.batch_insert(&random_batch(&mut rng, 50_000));
        for _ in 0..20 {
            let batch = random_batch(&mut rng, 2_000);
            let counters = set.enable_instrumentation();
            counters.reset();
            let outcome = set.merge_phase(&batch, BatchDirection::Insert);
            let n = (set.len() as isize + outcome.net_change) as usize;
            set.set_element_count(n);
            let targets = set.counting_phase(&outcome, BatchDirection::Insert);
            let expected = oracle::brute_force_targets(&set, &outcome, BatchDirection::Insert);
            assert_eq!(targets, expected);
            assert_eq!(counters.snapshot().recounts, 0);
            set.redistribute_phase(&targets, &outcome, BatchDirection::Insert);
            oracle::validate(&set).unwrap();
        }
    }

    #[test]
    fn determinism_across_thread_counts() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(45);
                let mut set = PmaSet::<CompressedLeaf>::new();
                for _ in 0..10 {
                    set.batch_insert(&random_batch(&mut rng, 20_000));
                }
                set.checksum()
            })
        };
        let c1 = run(1);
        assert_eq!(c1, run(2));
        assert_eq!(c1, run(4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn batches_match_reference(
            seqs in proptest::collection::vec(
                (any::<bool>(), proptest::collection::vec(1u64..100_000, 0..800)),
                1..6
            )
        ) {
            let mut set = PmaSet::<CompressedLeaf>::new();
            let mut reference = oracle::RefSet::new();
            for (is_insert, raw) in seqs {
                let batch = sort_dedupe(raw).unwrap();
                if is_insert {
                    set.batch_insert(&batch);
                    reference.batch_insert(batch.keys());
                } else {
                    set.batch_delete(&batch);
                    reference.batch_delete(batch.keys());
                }
                oracle::validate(&set).unwrap();
                prop_assert_eq!(set.to_vec(), reference.to_vec());
                prop_assert_eq!(set.len(), reference.len());
            }
        }
    }
}

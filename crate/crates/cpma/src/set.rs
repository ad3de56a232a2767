//! The ordered-set structure: point operations, density maintenance, and
//! resizing, generic over the leaf codec.
//!
//! One contiguous slot array holds all leaves. A point update lands in the
//! leaf selected by binary search over leaf heads; when the leaf's density
//! leaves its bounds, the leaf-to-root path is walked counting exponentially
//! growing regions until a node satisfies its level's bound, and that region
//! is redistributed evenly. A root violation resizes the whole array by the
//! growing factor.

use std::io::{Read, Write};
use std::marker::PhantomData;
use std::sync::atomic::Ordering;
use std::sync::Arc;

use rayon::prelude::*;

use crate::kernel::{Layout, LayoutConfig, NodeId};
use crate::leaf::{LeafDelete, LeafInsert, LeafStore};
use crate::oracle::WorkCounters;
use crate::Error;

/// Signal that a region cannot hold its own elements within per-leaf budgets;
/// the caller must act on a larger region or resize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Escalate;

/// What a logged resize did to the backing array.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResizeKind {
    /// Capacity stepped up by one growing-factor multiple.
    Grow,
    /// Capacity stepped down by one growing-factor divide.
    Shrink,
    /// Capacity re-derived from scratch for a bulk rebuild.
    Rebuild,
}

/// One entry of the resize log, recording a capacity change in slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResizeEvent {
    pub kind: ResizeKind,
    pub old_capacity: usize,
    pub new_capacity: usize,
}

/// Tunables of a [`PmaSet`].
#[derive(Clone, Debug)]
pub struct SetConfig {
    pub layout: LayoutConfig,
    /// Batches smaller than this are applied as point updates.
    pub point_insert_cutoff: usize,
    /// Batches of at least this fraction of the current size rebuild the
    /// whole structure by merging.
    pub rebuild_fraction: f64,
    /// Merge runs of at least this many elements use the parallel merge.
    pub parallel_merge_threshold: usize,
}

impl SetConfig {
    /// Default configuration for codec `L` (the codecs differ only in their
    /// minimum leaf size).
    pub fn for_codec<L: LeafStore>() -> Self {
        SetConfig {
            layout: LayoutConfig::with_min_leaf(L::DEFAULT_MIN_LEAF),
            point_insert_cutoff: 100,
            rebuild_fraction: 0.5,
            parallel_merge_threshold: 1024,
        }
    }

    pub fn with_growing_factor(mut self, factor: f64) -> Self {
        self.layout.growing_factor = factor;
        self
    }

    fn validate(&self) -> Result<(), Error> {
        self.layout.validate()?;
        if !(0.0..=1.0).contains(&self.rebuild_fraction) {
            return Err(Error::Config("rebuild_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Point-in-time size report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizeStats {
    pub element_count: usize,
    pub capacity_slots: usize,
    pub total_bytes: usize,
    pub bytes_per_element: f64,
}

/// An ordered set of `u64` keys in `[1, u64::MAX]`, stored as a packed
/// memory array over leaf codec `L`.
pub struct PmaSet<L: LeafStore> {
    slots: Vec<L::Slot>,
    layout: Layout,
    element_count: usize,
    config: SetConfig,
    resize_log: Vec<ResizeEvent>,
    counters: Option<Arc<WorkCounters>>,
    _codec: PhantomData<fn() -> L>,
}

impl<L: LeafStore> Clone for PmaSet<L> {
    fn clone(&self) -> Self {
        PmaSet {
            slots: self.slots.clone(),
            layout: self.layout.clone(),
            element_count: self.element_count,
            config: self.config.clone(),
            resize_log: self.resize_log.clone(),
            counters: self.counters.clone(),
            _codec: PhantomData,
        }
    }
}

impl<L: LeafStore> Default for PmaSet<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: LeafStore> PmaSet<L> {
    /// Empty set with default configuration.
    pub fn new() -> Self {
        Self::with_config(SetConfig::for_codec::<L>()).expect("default config is valid")
    }

    /// Empty set with the given configuration.
    pub fn with_config(config: SetConfig) -> Result<Self, Error> {
        config.validate()?;
        let layout = Layout::minimal(&config.layout);
        Ok(PmaSet {
            slots: vec![L::Slot::default(); layout.capacity],
            layout,
            element_count: 0,
            config,
            resize_log: Vec::new(),
            counters: None,
            _codec: PhantomData,
        })
    }

    pub fn len(&self) -> usize {
        self.element_count
    }

    pub fn is_empty(&self) -> bool {
        self.element_count == 0
    }

    /// Capacity in slots (cells or bytes).
    pub fn capacity(&self) -> usize {
        self.layout.capacity
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn config(&self) -> &SetConfig {
        &self.config
    }

    /// Resizes performed so far, oldest first.
    pub fn resize_log(&self) -> &[ResizeEvent] {
        &self.resize_log
    }

    pub fn clear_resize_log(&mut self) {
        self.resize_log.clear();
    }

    /// Turns on work counters (shared handle returned); they stay attached
    /// for the lifetime of the set.
    pub fn enable_instrumentation(&mut self) -> Arc<WorkCounters> {
        let counters = self
            .counters
            .get_or_insert_with(|| Arc::new(WorkCounters::default()));
        Arc::clone(counters)
    }

    pub(crate) fn counters(&self) -> Option<&Arc<WorkCounters>> {
        self.counters.as_ref()
    }

    /// Slot window of leaf `index`.
    pub fn leaf_slots(&self, index: usize) -> &[L::Slot] {
        let ls = self.layout.leaf_size;
        &self.slots[index * ls..(index + 1) * ls]
    }

    pub(crate) fn leaf_slots_mut(&mut self, index: usize) -> &mut [L::Slot] {
        let ls = self.layout.leaf_size;
        &mut self.slots[index * ls..(index + 1) * ls]
    }

    pub(crate) fn slots_mut(&mut self) -> &mut [L::Slot] {
        &mut self.slots
    }

    pub(crate) fn set_element_count(&mut self, n: usize) {
        self.element_count = n;
    }

    /// Index of the leaf whose head range covers `x`: the last non-empty
    /// leaf whose head is at most `x`, or leaf 0 when `x` precedes every
    /// head. Binary search over heads with a left-scan across empty leaves.
    pub(crate) fn leaf_for(&self, x: u64) -> usize {
        if let Some(c) = &self.counters {
            c.searches_performed.fetch_add(1, Ordering::Relaxed);
        }
        leaf_for_in::<L>(&self.slots, self.layout.leaf_size, x).map_or(0, |(idx, _)| idx)
    }

    /// Inserts `x`, returning whether it was newly added.
    pub fn insert(&mut self, x: u64) -> Result<bool, Error> {
        if x == 0 {
            return Err(Error::ZeroKey);
        }
        let leaf_idx = self.leaf_for(x);
        match L::insert(self.leaf_slots_mut(leaf_idx), x) {
            LeafInsert::Duplicate => Ok(false),
            LeafInsert::Inserted => {
                self.element_count += 1;
                let used = L::used_slots(self.leaf_slots(leaf_idx));
                if used as f64 > self.layout.upper_bound(0) * self.layout.leaf_size as f64 {
                    self.rebalance_after_insert(leaf_idx, None);
                }
                Ok(true)
            }
            LeafInsert::Overflow => {
                self.rebalance_after_insert(leaf_idx, Some(x));
                self.element_count += 1;
                Ok(true)
            }
        }
    }

    /// Removes `x`, returning whether it was present.
    pub fn delete(&mut self, x: u64) -> bool {
        if x == 0 {
            return false;
        }
        let leaf_idx = self.leaf_for(x);
        match L::delete(self.leaf_slots_mut(leaf_idx), x) {
            LeafDelete::Absent => false,
            LeafDelete::Removed => {
                self.element_count -= 1;
                let used = L::used_slots(self.leaf_slots(leaf_idx));
                if (used as f64) < self.layout.lower_bound(0) * self.layout.leaf_size as f64 {
                    self.rebalance_after_delete(leaf_idx);
                }
                true
            }
        }
    }

    /// Smallest element that is at least `x`.
    pub fn search(&self, x: u64) -> Option<u64> {
        let start = self.leaf_for(x);
        let mut decoded = Vec::new();
        for idx in start..self.layout.num_leaves {
            let leaf = self.leaf_slots(idx);
            match L::head(leaf) {
                None => continue,
                Some(h) if h >= x => return Some(h),
                Some(_) => {
                    decoded.clear();
                    L::decode_into(leaf, &mut decoded);
                    if let Some(&k) = decoded.iter().find(|&&k| k >= x) {
                        return Some(k);
                    }
                }
            }
        }
        None
    }

    /// Applies `f` to every element in `[start, end)` in ascending order.
    pub fn range_map(&self, start: u64, end: u64, mut f: impl FnMut(u64)) {
        if start >= end {
            return;
        }
        let first = self.leaf_for(start.max(1));
        let mut decoded = Vec::new();
        for idx in first..self.layout.num_leaves {
            let leaf = self.leaf_slots(idx);
            match L::head(leaf) {
                None => continue,
                Some(h) if h >= end => return,
                Some(_) => {
                    decoded.clear();
                    L::decode_into(leaf, &mut decoded);
                    for &k in &decoded {
                        if k >= end {
                            return;
                        }
                        if k >= start {
                            f(k);
                        }
                    }
                }
            }
        }
    }

    /// Wrapping sum over `[start, end)`, with the element count visited.
    pub fn range_sum(&self, start: u64, end: u64) -> (u64, usize) {
        let mut sum = 0u64;
        let mut count = 0usize;
        self.range_map(start, end, |k| {
            sum = sum.wrapping_add(k);
            count += 1;
        });
        (sum, count)
    }

    /// All elements in ascending order.
    pub fn to_vec(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.element_count);
        for idx in 0..self.layout.num_leaves {
            L::decode_into(self.leaf_slots(idx), &mut out);
        }
        out
    }

    pub fn size_stats(&self) -> SizeStats {
        let total_bytes = self.layout.capacity * std::mem::size_of::<L::Slot>();
        SizeStats {
            element_count: self.element_count,
            capacity_slots: self.layout.capacity,
            total_bytes,
            bytes_per_element: if self.element_count == 0 {
                f64::NAN
            } else {
                total_bytes as f64 / self.element_count as f64
            },
        }
    }

    /// FNV-1a hash of the raw slot array; equal slot arrays hash equally.
    pub fn checksum(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for b in L::slots_to_bytes(&self.slots) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }

    /// Evenly re-spreads the elements of `node`'s region across its leaves,
    /// balancing occupied slots. Fails with [`Escalate`] when some balanced
    /// chunk cannot fit a leaf (possible for the compressed codec, whose
    /// chunk sizes change on re-heading).
    pub fn redistribute(&mut self, node: NodeId) -> Result<(), Escalate> {
        let mut elements = Vec::new();
        self.gather_region(node, &mut elements);
        self.spread_region(node, &elements)
    }

    pub(crate) fn gather_region(&self, node: NodeId, out: &mut Vec<u64>) {
        for leaf in self.layout.leaves_of(node) {
            L::decode_into(self.leaf_slots(leaf), out);
        }
    }

    /// Writes `elements` evenly into `node`'s region (see [`spread_into`]).
    pub(crate) fn spread_region(&mut self, node: NodeId, elements: &[u64]) -> Result<(), Escalate> {
        let region = self.layout.region(node);
        let leaf_size = self.layout.leaf_size;
        if let Some(c) = &self.counters {
            c.elements_moved
                .fetch_add(elements.len() as u64, Ordering::Relaxed);
        }
        spread_into::<L>(&mut self.slots[region], leaf_size, elements)
    }

    /// Occupied slots in `node`'s region.
    pub(crate) fn used_in_region(&self, node: NodeId) -> usize {
        self.layout
            .leaves_of(node)
            .map(|leaf| L::used_slots(self.leaf_slots(leaf)))
            .sum()
    }

    pub(crate) fn collect_all(&self) -> Vec<u64> {
        self.to_vec()
    }

    /// Walks up from an over-full leaf to the first node that can absorb the
    /// region (plus `extra`, a key the leaf could not physically fit) within
    /// its level's upper bound; grows at the root.
    fn rebalance_after_insert(&mut self, leaf_idx: usize, extra: Option<u64>) {
        let slack = if extra.is_some() { L::MAX_ELEMENT_SLOTS } else { 0 };
        let mut node = NodeId::leaf(leaf_idx);
        while !self.layout.is_root(node) {
            node = self.layout.parent(node);
            let used = self.used_in_region(node) + slack;
            if used as f64 <= self.layout.upper_bound(node.level) * self.layout.region_slots(node) as f64 {
                let mut elements = Vec::new();
                self.gather_region(node, &mut elements);
                if let Some(x) = extra {
                    let pos = elements.partition_point(|&k| k < x);
                    elements.insert(pos, x);
                }
                if self.spread_region(node, &elements).is_ok() {
                    return;
                }
                // Region cannot fit its own elements per-leaf; act higher up.
            }
        }
        let mut elements = self.collect_all();
        if let Some(x) = extra {
            let pos = elements.partition_point(|&k| k < x);
            elements.insert(pos, x);
        }
        self.grow_and_spread(&elements);
    }

    /// Walks up from an under-full leaf to the first node satisfying its
    /// level's lower bound; shrinks at the root.
    fn rebalance_after_delete(&mut self, leaf_idx: usize) {
        let mut node = NodeId::leaf(leaf_idx);
        while !self.layout.is_root(node) {
            node = self.layout.parent(node);
            let used = self.used_in_region(node);
            if used as f64 >= self.layout.lower_bound(node.level) * self.layout.region_slots(node) as f64
                && self.redistribute(node).is_ok()
            {
                return;
            }
        }
        let elements = self.collect_all();
        self.shrink_and_spread(&elements);
    }

    /// Steps capacity up by the growing factor (logging each step) until
    /// `elements` spread successfully at root density at most `tau_root`.
    pub(crate) fn grow_and_spread(&mut self, elements: &[u64]) {
        let cfg = self.layout.config();
        let mut layout = self.layout.clone();
        loop {
            let target = ((layout.capacity as f64) * cfg.growing_factor).ceil() as usize;
            let next = Layout::with_capacity_target(target.max(layout.capacity + 1), &cfg);
            self.resize_log.push(ResizeEvent {
                kind: ResizeKind::Grow,
                old_capacity: layout.capacity,
                new_capacity: next.capacity,
            });
            layout = next;
            if self.try_adopt(&layout, elements) {
                return;
            }
        }
    }

    /// Steps capacity down by the growing factor while the result still
    /// holds `elements` at root density at most `tau_root`, flooring at the
    /// minimal layout; re-spreads in place when no step is possible.
    pub(crate) fn shrink_and_spread(&mut self, elements: &[u64]) {
        let cfg = self.layout.config();
        loop {
            let target = ((self.layout.capacity as f64) / cfg.growing_factor).ceil() as usize;
            let next = Layout::with_capacity_target(target, &cfg);
            if next.capacity >= self.layout.capacity {
                break;
            }
            let estimate = L::spread_slots_upper_bound(elements, next.num_leaves);
            if estimate as f64 > cfg.bounds.tau_root * next.capacity as f64 {
                break;
            }
            let old = self.layout.capacity;
            if self.try_adopt(&next, elements) {
                self.resize_log.push(ResizeEvent {
                    kind: ResizeKind::Shrink,
                    old_capacity: old,
                    new_capacity: next.capacity,
                });
            } else {
                break;
            }
        }
        // Ensure the (possibly unchanged) array is evenly spread.
        let root = self.layout.root();
        self.spread_region(root, elements)
            .expect("content previously fit this capacity");
    }

    /// Rebuilds into the smallest layout that holds `elements` at root
    /// density at most `tau_root`, logging one Rebuild event if capacity
    /// changes. Used by bulk loads and batch rebuilds.
    pub(crate) fn rebuild_into_fit(&mut self, elements: &[u64]) {
        let cfg = self.layout.config();
        let old_capacity = self.layout.capacity;
        // num_leaves feeds back into the compressed-size estimate, so settle
        // the estimate iteratively, then enlarge until the spread commits.
        let mut layout = Layout::minimal(&cfg);
        loop {
            let estimate = L::spread_slots_upper_bound(elements, layout.num_leaves);
            let target = ((estimate as f64) / cfg.bounds.tau_root).ceil() as usize;
            if target <= layout.capacity {
                break;
            }
            layout = Layout::with_capacity_target(target, &cfg);
        }
        loop {
            if self.try_adopt(&layout, elements) {
                break;
            }
            let target = ((layout.capacity as f64) * cfg.growing_factor).ceil() as usize;
            layout = Layout::with_capacity_target(target.max(layout.capacity + 1), &cfg);
        }
        self.element_count = elements.len();
        if self.layout.capacity != old_capacity {
            self.resize_log.push(ResizeEvent {
                kind: ResizeKind::Rebuild,
                old_capacity,
                new_capacity: self.layout.capacity,
            });
        }
    }

    /// Attempts to move to `layout`, spreading `elements` into a fresh slot
    /// array; on success commits and returns true, otherwise leaves the set
    /// untouched.
    fn try_adopt(&mut self, layout: &Layout, elements: &[u64]) -> bool {
        let estimate = L::spread_slots_upper_bound(elements, layout.num_leaves);
        if estimate as f64 > layout.bounds.tau_root * layout.capacity as f64 {
            return false;
        }
        let mut slots = vec![L::Slot::default(); layout.capacity];
        if spread_into::<L>(&mut slots, layout.leaf_size, elements).is_err() {
            return false;
        }
        if let Some(c) = &self.counters {
            c.elements_moved
                .fetch_add(elements.len() as u64, Ordering::Relaxed);
        }
        self.slots = slots;
        self.layout = layout.clone();
        true
    }

    /// Writes a binary snapshot: layout header followed by the raw slot
    /// array, bit-exact with the in-memory leaf layout.
    pub fn write_snapshot(&self, w: &mut impl Write) -> Result<(), Error> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&[L::KIND])?;
        for v in [
            self.layout.growing_factor,
            self.layout.bounds.tau_leaf,
            self.layout.bounds.tau_root,
            self.layout.bounds.rho_leaf,
            self.layout.bounds.rho_root,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in [
            self.layout.min_leaf as u64,
            self.layout.leaf_size as u64,
            self.layout.num_leaves as u64,
            self.element_count as u64,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        let bytes = L::slots_to_bytes(&self.slots);
        w.write_all(&(bytes.len() as u64).to_le_bytes())?;
        w.write_all(&bytes)?;
        Ok(())
    }

    /// Reads a snapshot produced by [`write_snapshot`](Self::write_snapshot).
    pub fn read_snapshot(r: &mut impl Read) -> Result<Self, Error> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::Input("bad snapshot magic".into()));
        }
        let mut kind = [0u8; 1];
        r.read_exact(&mut kind)?;
        if kind[0] != L::KIND {
            return Err(Error::Input("snapshot was written by the other codec".into()));
        }
        let mut f = [0f64; 5];
        for v in &mut f {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        let mut u = [0u64; 5];
        for v in &mut u {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            *v = u64::from_le_bytes(buf);
        }
        let mut config = SetConfig::for_codec::<L>();
        config.layout.growing_factor = f[0];
        config.layout.bounds.tau_leaf = f[1];
        config.layout.bounds.tau_root = f[2];
        config.layout.bounds.rho_leaf = f[3];
        config.layout.bounds.rho_root = f[4];
        config.layout.min_leaf = u[0] as usize;
        config.validate()?;
        let (leaf_size, num_leaves) = (u[1] as usize, u[2] as usize);
        if !num_leaves.is_power_of_two() || leaf_size == 0 {
            return Err(Error::Input("bad snapshot geometry".into()));
        }
        let layout = Layout {
            capacity: leaf_size * num_leaves,
            leaf_size,
            num_leaves,
            height: num_leaves.trailing_zeros(),
            growing_factor: f[0],
            bounds: config.layout.bounds,
            min_leaf: u[0] as usize,
        };
        let mut bytes = vec![0u8; u[4] as usize];
        r.read_exact(&mut bytes)?;
        let slots = L::slots_from_bytes(&bytes)?;
        if slots.len() != layout.capacity {
            return Err(Error::Input("snapshot slot array length mismatch".into()));
        }
        Ok(PmaSet {
            slots,
            layout,
            element_count: u[3] as usize,
            config,
            resize_log: Vec::new(),
            counters: None,
            _codec: PhantomData,
        })
    }
}

const SNAPSHOT_MAGIC: &[u8; 8] = b"PMASET01";

/// [`PmaSet::leaf_for`] over a raw slot window: index and head of the last
/// non-empty leaf whose head is at most `x`, or `None` when `x` precedes
/// every head (destination is then the window's first leaf).
pub(crate) fn leaf_for_in<L: LeafStore>(
    slots: &[L::Slot],
    leaf_size: usize,
    x: u64,
) -> Option<(usize, u64)> {
    let num_leaves = slots.len() / leaf_size;
    let mut lo = 0usize;
    let mut hi = num_leaves;
    let mut best = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        // Nearest non-empty leaf at or below mid, not below lo.
        let mut probe = mid + 1;
        let mut found = None;
        while probe > lo {
            let leaf = &slots[(probe - 1) * leaf_size..probe * leaf_size];
            if let Some(h) = L::head(leaf) {
                found = Some((probe - 1, h));
                break;
            }
            probe -= 1;
        }
        match found {
            None => lo = mid + 1,
            Some((idx, h)) => {
                if h <= x {
                    best = Some((idx, h));
                    lo = mid + 1;
                } else {
                    hi = idx;
                }
            }
        }
    }
    best
}

/// Evenly spreads sorted `elements` across the leaves of `slots`, balancing
/// occupied slots: element slot costs are prefix-summed and leaf `j` takes
/// the run from the first prefix at or past `j * total / num_leaves`.
/// Nothing is written unless every chunk fits its leaf.
pub(crate) fn spread_into<L: LeafStore>(
    slots: &mut [L::Slot],
    leaf_size: usize,
    elements: &[u64],
) -> Result<(), Escalate> {
    let num_leaves = slots.len() / leaf_size;
    debug_assert_eq!(slots.len() % leaf_size, 0);
    if elements.is_empty() {
        slots.fill(L::Slot::default());
        return Ok(());
    }
    // prefix[i] = slots occupied by elements[..i] in a single run.
    let mut prefix = Vec::with_capacity(elements.len() + 1);
    prefix.push(0u64);
    let mut acc = 0u64;
    let mut prev = None;
    for &x in elements {
        acc += L::element_slots(prev, x) as u64;
        prefix.push(acc);
        prev = Some(x);
    }
    let total = acc as u128;
    let mut cuts = Vec::with_capacity(num_leaves + 1);
    for j in 0..num_leaves {
        let threshold = (j as u128) * total;
        cuts.push(prefix.partition_point(|&c| (c as u128) * (num_leaves as u128) < threshold));
    }
    cuts.push(elements.len());
    // Check every chunk before writing anything, so failure is side-effect
    // free and the caller can retry on a larger region.
    let fits = |j: usize| L::encoded_slots(&elements[cuts[j]..cuts[j + 1]]) <= leaf_size;
    let all_fit = if num_leaves >= 64 {
        (0..num_leaves).into_par_iter().all(fits)
    } else {
        (0..num_leaves).all(fits)
    };
    if !all_fit {
        return Err(Escalate);
    }
    let write = |(j, leaf): (usize, &mut [L::Slot])| L::write_leaf(leaf, &elements[cuts[j]..cuts[j + 1]]);
    if num_leaves >= 64 {
        slots.par_chunks_mut(leaf_size).enumerate().for_each(write);
    } else {
        slots.chunks_mut(leaf_size).enumerate().for_each(write);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaf::{CompressedLeaf, UncompressedLeaf};
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn singleton_and_duplicates() {
        let mut set = PmaSet::<UncompressedLeaf>::new();
        assert!(set.insert(5).unwrap());
        assert_eq!(set.search(1), Some(5));
        assert!(!set.insert(5).unwrap());
        assert_eq!(set.len(), 1);
        assert!(set.insert(0).is_err());
        assert!(set.delete(5));
        assert!(!set.delete(5));
        assert!(set.is_empty());
    }

    #[test]
    fn successor_examples() {
        let mut set = PmaSet::<CompressedLeaf>::new();
        set.insert(10).unwrap();
        set.insert(20).unwrap();
        assert_eq!(set.search(15), Some(20));
        assert_eq!(set.search(10), Some(10));
        assert_eq!(set.search(21), None);
        assert_eq!(PmaSet::<CompressedLeaf>::new().search(7), None);
    }

    #[test]
    fn range_sum_examples() {
        let mut set = PmaSet::<CompressedLeaf>::new();
        for k in [10, 13, 20] {
            set.insert(k).unwrap();
        }
        assert_eq!(set.range_sum(1, u64::MAX), (43, 3));
        assert_eq!(set.range_sum(11, 20), (13, 1));
        assert_eq!(set.range_sum(13, 13), (0, 0));
    }

    fn random_build<Lc: LeafStore>(n: usize, seed: u64) -> (PmaSet<Lc>, Vec<u64>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut set = PmaSet::<Lc>::new();
        let mut keys = Vec::with_capacity(n);
        for _ in 0..n {
            let k = rng.gen_range(1..1u64 << 40);
            if set.insert(k).unwrap() {
                keys.push(k);
            }
        }
        keys.sort_unstable();
        (set, keys)
    }

    #[test]
    fn point_inserts_match_oracle_and_validate() {
        let (pma, keys) = random_build::<UncompressedLeaf>(20_000, 7);
        assert_eq!(pma.to_vec(), keys);
        oracle::validate(&pma).unwrap();
        let (cpma, keys) = random_build::<CompressedLeaf>(20_000, 7);
        assert_eq!(cpma.to_vec(), keys);
        oracle::validate(&cpma).unwrap();
        assert_eq!(pma.to_vec(), cpma.to_vec());
    }

    #[test]
    fn growth_is_logged_with_factor_ratio() {
        let (set, _) = random_build::<CompressedLeaf>(50_000, 3);
        let grows: Vec<_> = set
            .resize_log()
            .iter()
            .filter(|e| e.kind == ResizeKind::Grow)
            .collect();
        assert!(!grows.is_empty());
        for e in grows {
            let ratio = e.new_capacity as f64 / e.old_capacity as f64;
            let factor = set.layout().growing_factor;
            assert!(
                ratio >= factor * 0.999 && ratio <= factor * 1.05,
                "grow ratio {ratio} vs factor {factor}"
            );
        }
    }

    #[test]
    fn deletes_shrink_back_down() {
        let (mut set, keys) = random_build::<UncompressedLeaf>(30_000, 11);
        let grown = set.capacity();
        for &k in &keys {
            assert!(set.delete(k));
        }
        assert!(set.is_empty());
        assert!(set.capacity() < grown);
        oracle::validate(&set).unwrap();
    }

    #[test]
    fn redistribute_is_idempotent_and_balancing() {
        let (mut set, _) = random_build::<CompressedLeaf>(5_000, 5);
        let root = set.layout().root();
        set.redistribute(root).unwrap();
        let once = set.checksum();
        set.redistribute(root).unwrap();
        assert_eq!(set.checksum(), once);
        // Byte balance: leaf fills differ by at most one max-width element.
        let fills: Vec<usize> = (0..set.layout().num_leaves)
            .map(|i| CompressedLeaf::used_slots(set.leaf_slots(i)))
            .collect();
        let (min, max) = (fills.iter().min().unwrap(), fills.iter().max().unwrap());
        assert!(max - min <= CompressedLeaf::MAX_ELEMENT_SLOTS, "{min}..{max}");
    }

    #[test]
    fn snapshot_round_trip() {
        let (set, keys) = random_build::<CompressedLeaf>(3_000, 9);
        let mut buf = Vec::new();
        set.write_snapshot(&mut buf).unwrap();
        let back = PmaSet::<CompressedLeaf>::read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(back.to_vec(), keys);
        assert_eq!(back.checksum(), set.checksum());
        assert!(PmaSet::<UncompressedLeaf>::read_snapshot(&mut buf.as_slice()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn mixed_ops_match_reference(
            ops in proptest::collection::vec((any::<u8>(), 1u64..500), 1..400)
        ) {
            let mut pma = PmaSet::<UncompressedLeaf>::new();
            let mut cpma = PmaSet::<CompressedLeaf>::new();
            let mut reference = oracle::RefSet::new();
            for (kind, key) in ops {
                match kind % 4 {
                    0 | 1 => {
                        let expect = reference.insert(key);
                        prop_assert_eq!(pma.insert(key).unwrap(), expect);
                        prop_assert_eq!(cpma.insert(key).unwrap(), expect);
                    }
                    2 => {
                        let expect = reference.delete(key);
                        prop_assert_eq!(pma.delete(key), expect);
                        prop_assert_eq!(cpma.delete(key), expect);
                    }
                    _ => {
                        let expect = reference.search(key);
                        prop_assert_eq!(pma.search(key), expect);
                        prop_assert_eq!(cpma.search(key), expect);
                    }
                }
            }
            oracle::validate(&pma).unwrap();
            oracle::validate(&cpma).unwrap();
            prop_assert_eq!(pma.to_vec(), reference.to_vec());
            prop_assert_eq!(cpma.to_vec(), reference.to_vec());
        }
    }
}

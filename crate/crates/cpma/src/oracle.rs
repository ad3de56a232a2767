//! Reference implementations and instrumentation for differential testing:
//! a plain sorted-sequence set, a full-recount structural validator, and a
//! brute-force recomputation of redistribution targets.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::batch::{bound_violated, BatchDirection, MergeOutcome, Targets};
use crate::kernel::{Layout, NodeId};
use crate::leaf::LeafStore;
use crate::set::PmaSet;

/// Work counters updated by instrumented operations. Attached at runtime via
/// [`PmaSet::enable_instrumentation`]; uninstrumented sets pay nothing.
#[derive(Debug, Default)]
pub struct WorkCounters {
    /// Node occupancies computed (cache misses) during counting phases.
    pub nodes_counted: AtomicU64,
    /// Slots scanned while counting leaves.
    pub cells_counted: AtomicU64,
    /// Counting-phase lookups answered from the per-phase cache.
    pub cache_hits: AtomicU64,
    /// Nodes whose occupancy was computed more than once in one phase
    /// (work-efficiency requires this to stay zero).
    pub recounts: AtomicU64,
    /// Elements copied by redistributions and resizes.
    pub elements_moved: AtomicU64,
    /// Head binary searches performed.
    pub searches_performed: AtomicU64,
}

/// Plain-integer copy of the counters at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub nodes_counted: u64,
    pub cells_counted: u64,
    pub cache_hits: u64,
    pub recounts: u64,
    pub elements_moved: u64,
    pub searches_performed: u64,
}

impl WorkCounters {
    pub fn reset(&self) {
        for c in [
            &self.nodes_counted,
            &self.cells_counted,
            &self.cache_hits,
            &self.recounts,
            &self.elements_moved,
            &self.searches_performed,
        ] {
            c.store(0, Ordering::Relaxed);
        }
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            nodes_counted: self.nodes_counted.load(Ordering::Relaxed),
            cells_counted: self.cells_counted.load(Ordering::Relaxed),
            cache_hits: self.cache_hits.load(Ordering::Relaxed),
            recounts: self.recounts.load(Ordering::Relaxed),
            elements_moved: self.elements_moved.load(Ordering::Relaxed),
            searches_performed: self.searches_performed.load(Ordering::Relaxed),
        }
    }
}

/// Reference sorted-unique-sequence set; every operation is implemented by
/// direct sequence manipulation, independent of the structures under test.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefSet {
    elements: Vec<u64>,
}

impl RefSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.elements.clone()
    }

    pub fn insert(&mut self, x: u64) -> bool {
        match self.elements.binary_search(&x) {
            Ok(_) => false,
            Err(pos) => {
                self.elements.insert(pos, x);
                true
            }
        }
    }

    pub fn delete(&mut self, x: u64) -> bool {
        match self.elements.binary_search(&x) {
            Ok(pos) => {
                self.elements.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// Smallest element at least `x`.
    pub fn search(&self, x: u64) -> Option<u64> {
        let pos = self.elements.partition_point(|&k| k < x);
        self.elements.get(pos).copied()
    }

    /// Wrapping sum and count over `[start, end)`.
    pub fn range_sum(&self, start: u64, end: u64) -> (u64, usize) {
        if start >= end {
            return (0, 0);
        }
        let lo = self.elements.partition_point(|&k| k < start);
        let hi = self.elements.partition_point(|&k| k < end);
        let sum = self.elements[lo..hi]
            .iter()
            .fold(0u64, |acc, &k| acc.wrapping_add(k));
        (sum, hi - lo)
    }

    /// Set union with sorted-unique `keys`.
    pub fn batch_insert(&mut self, keys: &[u64]) {
        self.elements = crate::batch::union(&self.elements, keys, usize::MAX);
    }

    /// Set difference with sorted-unique `keys`.
    pub fn batch_delete(&mut self, keys: &[u64]) {
        self.elements = crate::batch::difference(&self.elements, keys);
    }
}

/// One scripted operation for differential testing.
#[derive(Clone, Debug)]
pub enum Op {
    Insert(u64),
    Delete(u64),
    Search(u64),
    RangeSum(u64, u64),
    BatchInsert(Vec<u64>),
    BatchDelete(Vec<u64>),
}

/// Ground-truth answer to one [`Op`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Changed(bool),
    Found(Option<u64>),
    Sum(u64, usize),
    Done,
}

/// Runs a script against a fresh [`RefSet`], returning its final state and
/// the per-operation ground-truth answers. Batch keys must be sorted-unique.
pub fn ref_apply(ops: &[Op]) -> (RefSet, Vec<Answer>) {
    let mut set = RefSet::new();
    let answers = ops
        .iter()
        .map(|op| match op {
            Op::Insert(x) => Answer::Changed(set.insert(*x)),
            Op::Delete(x) => Answer::Changed(set.delete(*x)),
            Op::Search(x) => Answer::Found(set.search(*x)),
            Op::RangeSum(a, b) => {
                let (s, n) = set.range_sum(*a, *b);
                Answer::Sum(s, n)
            }
            Op::BatchInsert(keys) => {
                set.batch_insert(keys);
                Answer::Done
            }
            Op::BatchDelete(keys) => {
                set.batch_delete(keys);
                Answer::Done
            }
        })
        .collect();
    (set, answers)
}

/// Applies one scripted operation to a structure under test, producing an
/// answer comparable against [`ref_apply`]'s.
pub fn apply_op<L: LeafStore>(set: &mut PmaSet<L>, op: &Op) -> Answer {
    match op {
        Op::Insert(x) => Answer::Changed(set.insert(*x).expect("script keys are nonzero")),
        Op::Delete(x) => Answer::Changed(set.delete(*x)),
        Op::Search(x) => Answer::Found(set.search(*x)),
        Op::RangeSum(a, b) => {
            let (s, n) = set.range_sum(*a, *b);
            Answer::Sum(s, n)
        }
        Op::BatchInsert(keys) => {
            let batch = crate::batch::Batch::from_sorted(keys.clone()).expect("sorted script batch");
            set.batch_insert(&batch);
            Answer::Done
        }
        Op::BatchDelete(keys) => {
            let batch = crate::batch::Batch::from_sorted(keys.clone()).expect("sorted script batch");
            set.batch_delete(&batch);
            Answer::Done
        }
    }
}

/// A structural or density violation found by [`validate`].
#[derive(Clone, Debug)]
pub struct ValidationFailure {
    pub node: Option<NodeId>,
    pub detail: String,
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(n) => write!(f, "node (level {}, index {}): {}", n.level, n.index, self.detail),
            None => write!(f, "{}", self.detail),
        }
    }
}

impl std::error::Error for ValidationFailure {}

fn fail(node: Option<NodeId>, detail: impl Into<String>) -> Result<(), ValidationFailure> {
    Err(ValidationFailure {
        node,
        detail: detail.into(),
    })
}

/// Full structural recount of a quiescent set: every leaf must decode, the
/// concatenated leaves must be strictly increasing, padding must be zero,
/// the element count must match, and leaf fills must respect the leaf-level
/// density bounds up to one-element rounding slack.
///
/// Interior-node bounds are deliberately not asserted: the maintenance
/// algorithm restores a violated node's bound only when an update touches
/// its region, so ancestors may drift while every leaf stays legal.
pub fn validate<L: LeafStore>(set: &PmaSet<L>) -> Result<(), ValidationFailure> {
    let layout = set.layout();
    let leaf_size = layout.leaf_size;
    let minimal = Layout::minimal(&layout.config()).capacity == layout.capacity;
    // Slack per leaf: balanced cuts land within one element of even, and the
    // compressed codec re-heads each chunk (at most 8 extra slots).
    let upper_slack = (2 * L::MAX_ELEMENT_SLOTS + 8) as f64;
    let lower_slack = (2 * L::MAX_ELEMENT_SLOTS + 8) as f64;
    let tau0 = layout.upper_bound(0) * leaf_size as f64;
    let rho0 = layout.lower_bound(0) * leaf_size as f64;

    let mut decoded = Vec::new();
    let mut total = 0usize;
    let mut prev: Option<u64> = None;
    for index in 0..layout.num_leaves {
        let node = NodeId::leaf(index);
        let leaf = set.leaf_slots(index);
        decoded.clear();
        if let Err(e) = L::try_decode(leaf, &mut decoded) {
            return fail(Some(node), format!("decode failed: {e}"));
        }
        if let (Some(p), Some(&first)) = (prev, decoded.first()) {
            if first <= p {
                return fail(
                    Some(node),
                    format!("head {first} not above previous leaf's last element {p}"),
                );
            }
        }
        if let Some(&last) = decoded.last() {
            prev = Some(last);
        }
        total += decoded.len();

        let used = L::used_slots(leaf);
        if used > leaf_size {
            return fail(Some(node), format!("used {used} exceeds leaf size {leaf_size}"));
        }
        if used as f64 > tau0 + upper_slack {
            return fail(
                Some(node),
                format!("density {used}/{leaf_size} above leaf upper bound {tau0:.1}"),
            );
        }
        if !minimal && (used as f64) < rho0 - lower_slack {
            return fail(
                Some(node),
                format!("density {used}/{leaf_size} below leaf lower bound {rho0:.1}"),
            );
        }
    }
    if total != set.len() {
        return fail(
            None,
            format!("element_count {} but leaves decode to {total} elements", set.len()),
        );
    }
    Ok(())
}

/// Recomputes redistribution targets from scratch: recount every modified
/// leaf (honoring overflow buffers), walk each violating leaf up to its
/// lowest bound-satisfying ancestor by fully recounting regions, and keep
/// only maximal pairwise-disjoint nodes. Compared for exact equality with
/// the counting phase's output.
pub fn brute_force_targets<L: LeafStore>(
    set: &PmaSet<L>,
    outcome: &MergeOutcome,
    dir: BatchDirection,
) -> Targets {
    let layout = set.layout();
    let leaf_used = |leaf: usize| -> usize {
        match outcome.overflow.get(&leaf) {
            Some(buf) => L::encoded_slots(&buf),
            None => L::used_slots(set.leaf_slots(leaf)),
        }
    };
    let region_used =
        |node: NodeId| -> usize { layout.leaves_of(node).map(leaf_used).sum() };

    let mut candidates: Vec<NodeId> = Vec::new();
    for &leaf in &outcome.modified_leaves {
        let mut node = NodeId::leaf(leaf);
        if !bound_violated(layout, 0, leaf_used(leaf), dir) {
            continue;
        }
        loop {
            if layout.is_root(node) {
                return Targets::RootResize;
            }
            node = layout.parent(node);
            if !bound_violated(layout, node.level, region_used(node), dir) {
                if !candidates.contains(&node) {
                    candidates.push(node);
                }
                break;
            }
        }
    }
    // Maximal disjoint: drop candidates covered by another candidate.
    let maximal: Vec<NodeId> = candidates
        .iter()
        .copied()
        .filter(|&c| {
            !candidates
                .iter()
                .any(|&other| other != c && layout.covers(other, c))
        })
        .collect();
    let mut maximal = maximal;
    maximal.sort_by_key(|n| layout.region(*n).start);
    Targets::Nodes(maximal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaf::{CompressedLeaf, UncompressedLeaf};

    #[test]
    fn ref_set_basics() {
        let mut s = RefSet::new();
        assert!(s.insert(10));
        assert!(!s.insert(10));
        assert!(s.insert(20));
        assert_eq!(s.search(15), Some(20));
        assert_eq!(s.search(21), None);
        assert_eq!(s.range_sum(1, 100), (30, 2));
        s.batch_insert(&[5, 10, 30]);
        assert_eq!(s.to_vec(), vec![5, 10, 20, 30]);
        s.batch_delete(&[10, 40]);
        assert_eq!(s.to_vec(), vec![5, 20, 30]);
        assert!(s.delete(20));
        assert!(!s.delete(20));
    }

    #[test]
    fn ref_apply_answers() {
        let (set, answers) = ref_apply(&[
            Op::Insert(5),
            Op::Insert(5),
            Op::Search(1),
            Op::BatchInsert(vec![2, 9]),
            Op::RangeSum(2, 9),
            Op::Delete(9),
        ]);
        assert_eq!(
            answers,
            vec![
                Answer::Changed(true),
                Answer::Changed(false),
                Answer::Found(Some(5)),
                Answer::Done,
                Answer::Sum(7, 2),
                Answer::Changed(true),
            ]
        );
        assert_eq!(set.to_vec(), vec![2, 5]);
    }

    #[test]
    fn validator_accepts_fresh_build_and_flags_corruption() {
        let mut set = PmaSet::<UncompressedLeaf>::new();
        for k in (1..5_000).map(|i| i * 3) {
            set.insert(k).unwrap();
        }
        validate(&set).unwrap();

        // Injected fault: a nonzero cell past the packed prefix.
        let mut broken = set.clone();
        let leaf_size = broken.layout().leaf_size;
        let target = broken
            .slots_mut()
            .chunks_mut(leaf_size)
            .find(|leaf| leaf.last() == Some(&0))
            .expect("some leaf has free space");
        *target.last_mut().unwrap() = u64::MAX;
        let err = validate(&broken).unwrap_err();
        assert!(err.detail.contains("decode failed"), "{err}");

        // Injected fault: sorted order broken across leaves.
        let mut swapped = set.clone();
        swapped.slots_mut()[0] = u64::MAX;
        assert!(validate(&swapped).is_err());
    }

    #[test]
    fn validator_checks_compressed_padding() {
        let mut set = PmaSet::<CompressedLeaf>::new();
        for k in 1..2_000u64 {
            set.insert(k * 7).unwrap();
        }
        validate(&set).unwrap();
        let leaf_size = set.layout().leaf_size;
        let leaf = set
            .slots_mut()
            .chunks_mut(leaf_size)
            .find(|leaf| leaf.last() == Some(&0))
            .expect("some leaf has padding");
        *leaf.last_mut().unwrap() = 0x80;
        assert!(validate(&set).is_err());
    }
}

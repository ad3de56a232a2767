//! Implicit-tree geometry and density-bound arithmetic shared by the
//! uncompressed and compressed structures.
//!
//! The slot array is divided into `num_leaves` leaves of `leaf_size` slots
//! each (cells for the uncompressed array, bytes for the compressed one). A
//! perfect binary tree is defined over the leaves by index arithmetic alone;
//! every node owns a contiguous region of slots and carries an upper and a
//! lower density bound interpolated between the leaf and root constants.

use std::ops::Range;

use crate::Error;

/// Default minimum leaf size for the uncompressed array, in 8-byte cells.
pub const MIN_LEAF_CELLS: usize = 32;
/// Default minimum leaf size for the compressed array, in bytes.
pub const MIN_LEAF_BYTES: usize = 64;
/// Default multiplicative capacity change on resize.
pub const DEFAULT_GROWING_FACTOR: f64 = 1.2;

/// Density bounds at the two ends of the tree. Upper bounds loosen toward the
/// leaves, lower bounds loosen toward the leaves; intermediate levels are
/// linearly interpolated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensitySchedule {
    pub tau_leaf: f64,
    pub tau_root: f64,
    pub rho_leaf: f64,
    pub rho_root: f64,
}

impl Default for DensitySchedule {
    fn default() -> Self {
        Self {
            tau_leaf: 0.9,
            tau_root: 0.7,
            rho_leaf: 0.1,
            rho_root: 0.25,
        }
    }
}

impl DensitySchedule {
    pub fn validate(&self, growing_factor: f64) -> Result<(), Error> {
        if !(growing_factor.is_finite() && growing_factor > 1.0) {
            return Err(Error::Config(
                "growing factor must be a finite value greater than 1".into(),
            ));
        }
        let ordered = 0.0 <= self.rho_leaf
            && self.rho_leaf <= self.rho_root
            && self.rho_root < self.tau_root
            && self.tau_root <= self.tau_leaf
            && self.tau_leaf <= 1.0;
        if !ordered {
            return Err(Error::Config(
                "density bounds must satisfy 0 <= rho_leaf <= rho_root < tau_root <= tau_leaf <= 1"
                    .into(),
            ));
        }
        // A growth must never immediately trigger a shrink.
        if self.tau_root / growing_factor <= self.rho_root {
            return Err(Error::Config(
                "tau_root / growing_factor must exceed rho_root".into(),
            ));
        }
        Ok(())
    }
}

/// Address of a node in the implicit tree: `level` 0 is a leaf, `level ==
/// height` is the root. `index` counts nodes of that level left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub level: u32,
    pub index: usize,
}

impl NodeId {
    pub fn leaf(index: usize) -> Self {
        NodeId { level: 0, index }
    }
}

/// Geometry of the slot array plus the configuration it was derived from.
#[derive(Clone, Debug)]
pub struct Layout {
    /// Total slots (cells or bytes). Always `leaf_size * num_leaves`.
    pub capacity: usize,
    /// Slots per leaf.
    pub leaf_size: usize,
    /// Number of leaves; a power of two.
    pub num_leaves: usize,
    /// Levels above the leaves; the root sits at `height`.
    pub height: u32,
    pub growing_factor: f64,
    pub bounds: DensitySchedule,
    pub min_leaf: usize,
}

/// Configuration from which layouts are derived.
#[derive(Clone, Copy, Debug)]
pub struct LayoutConfig {
    pub bounds: DensitySchedule,
    pub growing_factor: f64,
    pub min_leaf: usize,
}

impl LayoutConfig {
    pub fn with_min_leaf(min_leaf: usize) -> Self {
        LayoutConfig {
            bounds: DensitySchedule::default(),
            growing_factor: DEFAULT_GROWING_FACTOR,
            min_leaf,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be positive".into()));
        }
        self.bounds.validate(self.growing_factor)
    }
}

fn prev_pow2(x: usize) -> usize {
    debug_assert!(x >= 1);
    1 << (usize::BITS - 1 - x.leading_zeros())
}

impl Layout {
    /// Smallest legal layout whose capacity is at least `target` slots.
    ///
    /// Leaves are kept at Theta(log capacity) slots (floored at `min_leaf`)
    /// and the leaf count is a power of two; the leaf size itself is not
    /// rounded, so the realized capacity overshoots `target` by at most one
    /// slot per leaf. That keeps resize ratios within a few percent of the
    /// configured growing factor.
    pub fn with_capacity_target(target: usize, config: &LayoutConfig) -> Layout {
        let target = target.max(config.min_leaf);
        let log2 = (usize::BITS - target.leading_zeros()) as usize;
        let desired_leaf = config.min_leaf.max(log2);
        let num_leaves = prev_pow2((target / desired_leaf).max(1));
        let leaf_size = target.div_ceil(num_leaves);
        Layout {
            capacity: leaf_size * num_leaves,
            leaf_size,
            num_leaves,
            height: num_leaves.trailing_zeros(),
            growing_factor: config.growing_factor,
            bounds: config.bounds,
            min_leaf: config.min_leaf,
        }
    }

    /// Smallest legal layout that holds `occupied` slots' worth of elements
    /// at root density at most `tau_root`.
    pub fn for_occupancy(occupied: usize, config: &LayoutConfig) -> Result<Layout, Error> {
        config.validate()?;
        let target = ((occupied as f64) / config.bounds.tau_root).ceil() as usize;
        Ok(Layout::with_capacity_target(target, config))
    }

    /// The minimal layout for this configuration (the shrink floor).
    pub fn minimal(config: &LayoutConfig) -> Layout {
        Layout::with_capacity_target(config.min_leaf, config)
    }

    pub fn config(&self) -> LayoutConfig {
        LayoutConfig {
            bounds: self.bounds,
            growing_factor: self.growing_factor,
            min_leaf: self.min_leaf,
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId {
            level: self.height,
            index: 0,
        }
    }

    pub fn is_root(&self, node: NodeId) -> bool {
        node.level == self.height
    }

    /// Upper density bound at `level`, interpolated linearly from `tau_leaf`
    /// at the leaves to `tau_root` at the root.
    pub fn upper_bound(&self, level: u32) -> f64 {
        assert!(level <= self.height, "level {level} out of range");
        if self.height == 0 {
            return self.bounds.tau_root;
        }
        let t = level as f64 / self.height as f64;
        self.bounds.tau_leaf - (self.bounds.tau_leaf - self.bounds.tau_root) * t
    }

    /// Lower density bound at `level`; the symmetric interpolation.
    pub fn lower_bound(&self, level: u32) -> f64 {
        assert!(level <= self.height, "level {level} out of range");
        if self.height == 0 {
            return self.bounds.rho_root;
        }
        let t = level as f64 / self.height as f64;
        self.bounds.rho_leaf + (self.bounds.rho_root - self.bounds.rho_leaf) * t
    }

    pub fn parent(&self, node: NodeId) -> NodeId {
        assert!(node.level < self.height, "root has no parent");
        NodeId {
            level: node.level + 1,
            index: node.index / 2,
        }
    }

    pub fn sibling(&self, node: NodeId) -> NodeId {
        assert!(node.level < self.height, "root has no sibling");
        NodeId {
            level: node.level,
            index: node.index ^ 1,
        }
    }

    pub fn children(&self, node: NodeId) -> (NodeId, NodeId) {
        assert!(node.level > 0, "leaves have no children");
        let level = node.level - 1;
        (
            NodeId {
                level,
                index: node.index * 2,
            },
            NodeId {
                level,
                index: node.index * 2 + 1,
            },
        )
    }

    pub fn leaf_of(&self, slot: usize) -> usize {
        debug_assert!(slot < self.capacity);
        slot / self.leaf_size
    }

    /// Leaves covered by `node`, as a half-open range of leaf indices.
    pub fn leaves_of(&self, node: NodeId) -> Range<usize> {
        let width = 1usize << node.level;
        node.index * width..(node.index + 1) * width
    }

    /// Slot range owned by `node`.
    pub fn region(&self, node: NodeId) -> Range<usize> {
        let leaves = self.leaves_of(node);
        leaves.start * self.leaf_size..leaves.end * self.leaf_size
    }

    /// Number of slots in `node`'s region.
    pub fn region_slots(&self, node: NodeId) -> usize {
        self.leaf_size << node.level
    }

    /// Whether `anc` is `node` or an ancestor of `node`.
    pub fn covers(&self, anc: NodeId, node: NodeId) -> bool {
        anc.level >= node.level && (node.index >> (anc.level - node.level)) == anc.index
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> LayoutConfig {
        LayoutConfig::with_min_leaf(MIN_LEAF_CELLS)
    }

    #[test]
    fn empty_estimate_gives_minimal_layout() {
        let layout = Layout::for_occupancy(0, &cfg()).unwrap();
        assert_eq!(layout.num_leaves, 1);
        assert_eq!(layout.leaf_size, MIN_LEAF_CELLS);
        assert_eq!(layout.capacity, MIN_LEAF_CELLS);
        assert_eq!(layout.height, 0);
    }

    #[test]
    fn occupancy_respects_root_bound() {
        let config = LayoutConfig {
            bounds: DensitySchedule {
                tau_root: 0.5,
                ..DensitySchedule::default()
            },
            ..cfg()
        };
        let layout = Layout::for_occupancy(1000, &config).unwrap();
        assert!(1000.0 / layout.capacity as f64 <= 0.5);
        assert_eq!(layout.capacity, layout.leaf_size * layout.num_leaves);
        assert!(layout.num_leaves.is_power_of_two());
        assert!(layout.leaf_size >= config.min_leaf);
    }

    #[test]
    fn bound_interpolation_endpoints_and_midpoint() {
        let config = LayoutConfig {
            bounds: DensitySchedule {
                tau_leaf: 0.9,
                tau_root: 0.5,
                rho_leaf: 0.1,
                rho_root: 0.25,
            },
            ..cfg()
        };
        let mut layout = Layout::with_capacity_target(32 * 16, &config);
        assert_eq!(layout.height, 4);
        assert_eq!(layout.upper_bound(0), 0.9);
        assert_eq!(layout.upper_bound(4), 0.5);
        assert!((layout.upper_bound(2) - 0.7).abs() < 1e-12);
        assert_eq!(layout.lower_bound(0), 0.1);
        assert_eq!(layout.lower_bound(4), 0.25);
        // Lower bound stays strictly below upper bound on every level.
        for level in 0..=layout.height {
            assert!(layout.lower_bound(level) < layout.upper_bound(level));
        }
        layout.height = 0;
        layout.num_leaves = 1;
        assert_eq!(layout.upper_bound(0), 0.5);
        assert_eq!(layout.lower_bound(0), 0.25);
    }

    #[test]
    fn tree_arithmetic_examples() {
        let layout = Layout::with_capacity_target(32 * 8, &cfg());
        assert_eq!(
            layout.parent(NodeId { level: 0, index: 2 }),
            NodeId { level: 1, index: 1 }
        );
        assert_eq!(
            layout.sibling(NodeId { level: 1, index: 1 }),
            NodeId { level: 1, index: 0 }
        );
        assert_eq!(layout.leaf_of(layout.leaf_size * 3 + 1), 3);
    }

    #[test]
    fn schedule_rejects_bad_configs() {
        let mut bad = DensitySchedule::default();
        bad.rho_root = 0.8;
        assert!(bad.validate(1.2).is_err());
        assert!(DensitySchedule::default().validate(1.0).is_err());
        assert!(DensitySchedule::default().validate(2.0).is_ok());
    }

    #[test]
    fn regions_partition_capacity() {
        let layout = Layout::with_capacity_target(4096, &cfg());
        for level in 0..=layout.height {
            let nodes = layout.num_leaves >> level;
            let mut next = 0usize;
            for index in 0..nodes {
                let r = layout.region(NodeId { level, index });
                assert_eq!(r.start, next);
                next = r.end;
            }
            assert_eq!(next, layout.capacity);
        }
        for index in 0..layout.num_leaves / 2 {
            let node = NodeId { level: 1, index };
            let (a, b) = layout.children(node);
            assert_eq!(layout.region(a).end, layout.region(b).start);
            assert_eq!(layout.region(node).start, layout.region(a).start);
            assert_eq!(layout.region(node).end, layout.region(b).end);
        }
    }

    proptest! {
        #[test]
        fn layout_for_is_monotone(a in 0usize..5_000_000, b in 0usize..5_000_000) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let la = Layout::for_occupancy(lo, &cfg()).unwrap();
            let lb = Layout::for_occupancy(hi, &cfg()).unwrap();
            prop_assert!(la.capacity <= lb.capacity);
        }

        #[test]
        fn bounds_are_monotone(target in 32usize..1_000_000) {
            let layout = Layout::with_capacity_target(target, &cfg());
            for level in 1..=layout.height {
                prop_assert!(layout.upper_bound(level) <= layout.upper_bound(level - 1));
                prop_assert!(layout.lower_bound(level) >= layout.lower_bound(level - 1));
                prop_assert!(layout.lower_bound(level) < layout.upper_bound(level));
            }
        }
    }
}

//! Flat dynamic-graph adapter: an unweighted graph stored as one compressed
//! set of 64-bit packed edges (source in the upper 32 bits, destination in
//! the lower 32, plus one so the all-zero edge stays off the empty-slot
//! sentinel). Vertex offsets are rebuilt on demand after updates; traversal
//! is frontier-based over per-vertex key ranges.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::batch::sort_dedupe;
use crate::{Cpma, Error};

/// Packs edge `(u, v)` into its ordered 64-bit key.
pub fn encode_edge(u: u32, v: u32) -> u64 {
    ((u64::from(u) << 32) | u64::from(v)) + 1
}

/// Inverse of [`encode_edge`].
pub fn decode_edge(key: u64) -> (u32, u32) {
    let raw = key - 1;
    ((raw >> 32) as u32, raw as u32)
}

/// First possible edge key with source at least `u` (saturating past the
/// final vertex).
fn source_lower_bound(u: usize) -> u64 {
    if u > u32::MAX as usize {
        return u64::MAX;
    }
    ((u as u64) << 32) + 1
}

/// Per-vertex positions into the sorted edge sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOffsets {
    /// `offsets[v]..offsets[v + 1]` is vertex `v`'s neighbor run;
    /// length `num_vertices + 1`.
    pub offsets: Vec<usize>,
    pub num_vertices: usize,
    pub num_edges: usize,
}

impl VertexOffsets {
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// A frontier: all vertices, a sparse id list, or a dense membership bitmap.
#[derive(Clone, Debug)]
pub enum VertexSubset {
    All { num_vertices: usize },
    Sparse { num_vertices: usize, ids: Vec<u32> },
    Dense { members: Vec<bool>, cardinality: usize },
}

impl VertexSubset {
    pub fn all(num_vertices: usize) -> Self {
        VertexSubset::All { num_vertices }
    }

    pub fn from_ids(num_vertices: usize, mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSubset::Sparse { num_vertices, ids }
    }

    pub fn num_vertices(&self) -> usize {
        match self {
            VertexSubset::All { num_vertices } | VertexSubset::Sparse { num_vertices, .. } => {
                *num_vertices
            }
            VertexSubset::Dense { members, .. } => members.len(),
        }
    }

    /// Member count.
    pub fn cardinality(&self) -> usize {
        match self {
            VertexSubset::All { num_vertices } => *num_vertices,
            VertexSubset::Sparse { ids, .. } => ids.len(),
            VertexSubset::Dense { cardinality, .. } => *cardinality,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == 0
    }

    pub fn contains(&self, v: u32) -> bool {
        match self {
            VertexSubset::All { .. } => true,
            VertexSubset::Sparse { ids, .. } => ids.binary_search(&v).is_ok(),
            VertexSubset::Dense { members, .. } => members[v as usize],
        }
    }

    /// Member ids in ascending order.
    pub fn to_ids(&self) -> Vec<u32> {
        match self {
            VertexSubset::All { num_vertices } => (0..*num_vertices as u32).collect(),
            VertexSubset::Sparse { ids, .. } => ids.clone(),
            VertexSubset::Dense { members, .. } => members
                .iter()
                .enumerate()
                .filter_map(|(v, &m)| m.then_some(v as u32))
                .collect(),
        }
    }
}

/// Unweighted dynamic graph over a fixed vertex set, stored as one
/// compressed ordered set of packed edge keys.
pub struct GraphStore {
    edges: Cpma,
    num_vertices: usize,
    offsets: Option<VertexOffsets>,
}

impl GraphStore {
    /// Empty graph over `num_vertices` vertices (ids `0..num_vertices`).
    /// At most `2^32 - 1` vertices: the +1 key offset leaves no room for the
    /// final self-loop of a full 32-bit id space.
    pub fn new(num_vertices: usize) -> Result<Self, Error> {
        if num_vertices > u32::MAX as usize {
            return Err(Error::VertexRange(num_vertices as u64));
        }
        Ok(GraphStore {
            edges: Cpma::new(),
            num_vertices,
            offsets: None,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Number of stored (directed) edge keys.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_set(&self) -> &Cpma {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edges.search(encode_edge(u, v)) == Some(encode_edge(u, v))
    }

    /// Batch-inserts edges (plus their reverses when `symmetrize`),
    /// deduplicating by set semantics and invalidating cached offsets.
    pub fn insert_edges(&mut self, pairs: &[(u32, u32)], symmetrize: bool) -> Result<(), Error> {
        for &(u, v) in pairs {
            if u as usize >= self.num_vertices || v as usize >= self.num_vertices {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) outside the {}-vertex graph",
                    self.num_vertices
                )));
            }
        }
        let mut keys = Vec::with_capacity(pairs.len() * if symmetrize { 2 } else { 1 });
        for &(u, v) in pairs {
            keys.push(encode_edge(u, v));
            if symmetrize {
                keys.push(encode_edge(v, u));
            }
        }
        let batch = sort_dedupe(keys).expect("edge keys are nonzero by construction");
        self.edges.batch_insert(&batch);
        self.offsets = None;
        Ok(())
    }

    /// Rebuilds the per-vertex offset array by decoding the edge sequence
    /// and binary-searching each vertex's first edge in parallel.
    pub fn build_offsets(&mut self) -> &VertexOffsets {
        if self.offsets.is_none() {
            let keys = self.edges.to_vec();
            let offsets: Vec<usize> = (0..=self.num_vertices)
                .into_par_iter()
                .map(|v| keys.partition_point(|&k| k < source_lower_bound(v)))
                .collect();
            self.offsets = Some(VertexOffsets {
                offsets,
                num_vertices: self.num_vertices,
                num_edges: keys.len(),
            });
        }
        self.offsets.as_ref().unwrap()
    }

    /// Cached offsets, if current.
    pub fn offsets(&self) -> Option<&VertexOffsets> {
        self.offsets.as_ref()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.offsets
            .as_ref()
            .expect("offsets stale: call build_offsets after updates")
            .degree(v as usize)
    }

    /// Applies `update(src, dst)` to every out-edge of every frontier vertex
    /// whose destination passes `cond`, in parallel over the frontier;
    /// returns the subset of destinations for which `update` returned true.
    pub fn edge_map(
        &self,
        frontier: &VertexSubset,
        update: impl Fn(u32, u32) -> bool + Sync,
        cond: impl Fn(u32) -> bool + Sync,
    ) -> VertexSubset {
        assert!(
            self.offsets.is_some(),
            "offsets stale: call build_offsets after updates"
        );
        let flags: Vec<AtomicBool> = (0..self.num_vertices).map(|_| AtomicBool::new(false)).collect();
        let visit = |u: u32| {
            self.edges
                .range_map(source_lower_bound(u as usize), source_lower_bound(u as usize + 1), |key| {
                    let (_, v) = decode_edge(key);
                    if cond(v) && update(u, v) {
                        flags[v as usize].store(true, Ordering::Relaxed);
                    }
                });
        };
        match frontier {
            VertexSubset::All { num_vertices } => {
                (0..*num_vertices as u32).into_par_iter().for_each(visit)
            }
            VertexSubset::Sparse { ids, .. } => ids.par_iter().copied().for_each(visit),
            VertexSubset::Dense { members, .. } => members
                .par_iter()
                .enumerate()
                .filter(|(_, m)| **m)
                .for_each(|(v, _)| visit(v as u32)),
        }
        let members: Vec<bool> = flags.into_iter().map(AtomicBool::into_inner).collect();
        let cardinality = members.iter().filter(|&&m| m).count();
        VertexSubset::Dense {
            members,
            cardinality,
        }
    }

    /// Damped PageRank over all edges for a fixed number of iterations:
    /// `rank'(v) = (1 - d)/|V| + d * sum over in-neighbors u of
    /// rank(u)/degree(u)`; degree-0 vertices leak their mass.
    pub fn pagerank(&self, iterations: usize, damping: f64) -> Vec<f64> {
        let offsets = self
            .offsets
            .as_ref()
            .expect("offsets stale: call build_offsets after updates");
        let n = self.num_vertices;
        if n == 0 {
            return Vec::new();
        }
        let base = (1.0 - damping) / n as f64;
        let mut ranks = vec![1.0 / n as f64; n];
        let mut contrib = vec![0.0f64; n];
        for _ in 0..iterations {
            contrib
                .par_iter_mut()
                .enumerate()
                .for_each(|(v, c)| {
                    let deg = offsets.degree(v);
                    *c = if deg == 0 { 0.0 } else { ranks[v] / deg as f64 };
                });
            let next: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|v| {
                    let mut sum = 0.0;
                    self.edges.range_map(
                        source_lower_bound(v),
                        source_lower_bound(v + 1),
                        |key| {
                            let (_, u) = decode_edge(key);
                            sum += contrib[u as usize];
                        },
                    );
                    base + damping * sum
                })
                .collect();
            ranks = next;
        }
        ranks
    }

    /// Connected components by minimum-label propagation (no shortcutting):
    /// every vertex starts with its own id and repeatedly takes the minimum
    /// of its neighbors' labels until no label changes. Labels are equal
    /// within a component and distinct across components.
    pub fn connected_components(&self) -> Vec<u32> {
        let labels: Vec<AtomicU32> = (0..self.num_vertices as u32).map(AtomicU32::new).collect();
        let mut frontier = VertexSubset::all(self.num_vertices);
        while !frontier.is_empty() {
            frontier = self.edge_map(
                &frontier,
                |u, v| {
                    let label = labels[u as usize].load(Ordering::Relaxed);
                    labels[v as usize].fetch_min(label, Ordering::Relaxed) > label
                },
                |_| true,
            );
        }
        labels.into_iter().map(AtomicU32::into_inner).collect()
    }
}

/// Recursive-quadrant random graph generator. Each edge picks one of the
/// four quadrants per bit with probabilities `(a, b, c, d)`; deterministic
/// per seed.
pub fn rmat_generate(
    num_vertices: usize,
    num_edges: usize,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    seed: u64,
) -> Result<Vec<(u32, u32)>, Error> {
    if ((a + b + c + d) - 1.0).abs() > 1e-9 {
        return Err(Error::Input("RMAT probabilities must sum to 1".into()));
    }
    if !num_vertices.is_power_of_two() || num_vertices > u32::MAX as usize + 1 {
        return Err(Error::Input(
            "RMAT vertex count must be a power of two fitting 32 bits".into(),
        ));
    }
    let bits = num_vertices.trailing_zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(num_edges);
    for _ in 0..num_edges {
        let (mut u, mut v) = (0u32, 0u32);
        for bit in (0..bits).rev() {
            let r: f64 = rng.gen();
            let (row, col) = if r < a {
                (0, 0)
            } else if r < a + b {
                (0, 1)
            } else if r < a + b + c {
                (1, 0)
            } else {
                (1, 1)
            };
            u |= row << bit;
            v |= col << bit;
        }
        edges.push((u, v));
    }
    Ok(edges)
}

/// Loads a whitespace-separated text edge list ("u v" per line; blank lines
/// and lines starting with '#' or '%' are skipped).
pub fn load_edge_list_text(path: impl AsRef<Path>) -> Result<Vec<(u32, u32)>, Error> {
    let reader = BufReader::new(File::open(path)?);
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u32, Error> {
            tok.ok_or_else(|| Error::Input(format!("line {}: missing vertex id", lineno + 1)))?
                .parse::<u32>()
                .map_err(|e| Error::Input(format!("line {}: {e}", lineno + 1)))
        };
        edges.push((parse(it.next())?, parse(it.next())?));
    }
    Ok(edges)
}

/// Loads a binary edge list of little-endian u32 pairs.
pub fn load_edge_list_binary(path: impl AsRef<Path>) -> Result<Vec<(u32, u32)>, Error> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Input(
            "binary edge list length is not a multiple of 8 bytes".into(),
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|chunk| {
            (
                u32::from_le_bytes(chunk[0..4].try_into().unwrap()),
                u32::from_le_bytes(chunk[4..8].try_into().unwrap()),
            )
        })
        .collect())
}

/// Smallest vertex count covering every id in `pairs`.
pub fn required_vertices(pairs: &[(u32, u32)]) -> usize {
    pairs
        .iter()
        .map(|&(u, v)| u.max(v) as usize + 1)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn edge_key_examples() {
        assert_eq!(encode_edge(1, 2), 4_294_967_299);
        assert_eq!(decode_edge(encode_edge(1, 2)), (1, 2));
        assert_eq!(encode_edge(0, 0), 1);
        assert_eq!(decode_edge(encode_edge(u32::MAX - 1, u32::MAX)), (u32::MAX - 1, u32::MAX));
        // Key order is lexicographic (source, destination) order.
        assert!(encode_edge(1, u32::MAX) < encode_edge(2, 0));
    }

    #[test]
    fn symmetrized_insert_and_offsets() {
        let mut g = GraphStore::new(8).unwrap();
        g.insert_edges(&[(1, 2)], true).unwrap();
        assert!(g.has_edge(1, 2));
        assert!(g.has_edge(2, 1));
        assert_eq!(g.num_edges(), 2);
        // Star graph: center 0, leaves 1..=4 (duplicates vanish).
        let mut star = GraphStore::new(5).unwrap();
        star.insert_edges(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 2)], true)
            .unwrap();
        star.build_offsets();
        assert_eq!(star.degree(0), 4);
        for v in 1..5 {
            assert_eq!(star.degree(v), 1);
        }
        assert!(star.insert_edges(&[(0, 9)], true).is_err());

        let empty = GraphStore::new(4).unwrap().build_offsets().offsets.clone();
        assert_eq!(empty, vec![0; 5]);
    }

    #[test]
    fn edge_map_visits_neighbors() {
        let mut g = GraphStore::new(2).unwrap();
        g.insert_edges(&[(0, 1)], true).unwrap();
        g.build_offsets();
        let result = g.edge_map(&VertexSubset::all(2), |_, _| true, |_| true);
        assert_eq!(result.to_ids(), vec![0, 1]);
        let empty = g.edge_map(&VertexSubset::from_ids(2, vec![]), |_, _| true, |_| true);
        assert!(empty.is_empty());
    }

    #[test]
    fn pagerank_on_a_single_edge_is_symmetric() {
        let mut g = GraphStore::new(2).unwrap();
        g.insert_edges(&[(0, 1)], true).unwrap();
        g.build_offsets();
        let ranks = g.pagerank(10, 0.85);
        assert!((ranks[0] - 0.5).abs() < 1e-12);
        assert!((ranks[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn components_on_paths_and_disjoint_edges() {
        let mut path = GraphStore::new(5).unwrap();
        path.insert_edges(&[(0, 1), (1, 2), (2, 3), (3, 4)], true).unwrap();
        path.build_offsets();
        assert_eq!(path.connected_components(), vec![0; 5]);

        let mut two = GraphStore::new(4).unwrap();
        two.insert_edges(&[(0, 1), (2, 3)], true).unwrap();
        two.build_offsets();
        assert_eq!(two.connected_components(), vec![0, 0, 2, 2]);
    }

    #[test]
    fn rmat_is_seeded_and_respects_degenerate_quadrants() {
        let a = rmat_generate(16, 100, 0.5, 0.1, 0.1, 0.3, 7).unwrap();
        let b = rmat_generate(16, 100, 0.5, 0.1, 0.1, 0.3, 7).unwrap();
        assert_eq!(a, b);
        let zeros = rmat_generate(16, 50, 1.0, 0.0, 0.0, 0.0, 7).unwrap();
        assert!(zeros.iter().all(|&e| e == (0, 0)));
        assert!(rmat_generate(16, 1, 0.5, 0.5, 0.5, 0.5, 7).is_err());
        assert!(rmat_generate(12, 1, 0.5, 0.1, 0.1, 0.3, 7).is_err());
    }

    #[test]
    fn degree_sums_match_unique_edge_keys() {
        let pairs = rmat_generate(64, 2_000, 0.5, 0.1, 0.1, 0.3, 11).unwrap();
        let mut g = GraphStore::new(64).unwrap();
        g.insert_edges(&pairs, true).unwrap();
        let offsets = g.build_offsets().clone();
        let expected: HashSet<u64> = pairs
            .iter()
            .flat_map(|&(u, v)| [encode_edge(u, v), encode_edge(v, u)])
            .collect();
        assert_eq!(g.num_edges(), expected.len());
        let degree_sum: usize = (0..64).map(|v| offsets.degree(v)).sum();
        assert_eq!(degree_sum, expected.len());
    }
}

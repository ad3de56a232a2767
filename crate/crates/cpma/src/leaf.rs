//! Per-leaf storage codecs.
//!
//! A leaf is a fixed window of the structure's slot array. The uncompressed
//! codec stores 8-byte keys packed to the left with 0 marking free cells. The
//! compressed codec stores the first key raw in an 8-byte head slot (0 = empty
//! leaf) followed by the remaining keys as strictly positive deltas in
//! little-endian base-128 varints; because every delta is at least 1 no valid
//! tail byte is 0x00, so trailing zero bytes unambiguously mark free space.

use crate::Error;

/// Maximum bytes a single varint can occupy (ceil(64 / 7)).
pub const MAX_VARINT_BYTES: usize = 10;

/// Outcome of inserting one key into one leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafInsert {
    Inserted,
    /// Key already present; leaf unchanged.
    Duplicate,
    /// Result would not fit the leaf; leaf unchanged.
    Overflow,
}

/// Outcome of deleting one key from one leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafDelete {
    Removed,
    /// Key not present; leaf unchanged.
    Absent,
}

/// Storage strategy for a single leaf, generic over the slot unit (8-byte
/// cells or bytes). All functions operate on one leaf-sized slot window.
pub trait LeafStore: Send + Sync + 'static {
    /// The slot unit: `u64` cells or `u8` bytes.
    type Slot: Copy + Default + Eq + std::fmt::Debug + Send + Sync + 'static;

    /// Tag identifying the codec in binary snapshots.
    const KIND: u8;
    /// Worst-case slots one element can occupy; used as rounding slack when
    /// checking density bounds against fractional budgets.
    const MAX_ELEMENT_SLOTS: usize;
    /// Default minimum leaf size in slots.
    const DEFAULT_MIN_LEAF: usize;

    /// First key of the leaf, or `None` if the leaf is empty.
    fn head(leaf: &[Self::Slot]) -> Option<u64>;
    /// Occupied slots, counting the head slot of a non-empty leaf.
    fn used_slots(leaf: &[Self::Slot]) -> usize;
    /// Number of keys stored.
    fn element_count(leaf: &[Self::Slot]) -> usize;
    /// Appends the leaf's keys to `out` in increasing order.
    fn decode_into(leaf: &[Self::Slot], out: &mut Vec<u64>);
    /// Like [`decode_into`](Self::decode_into) but reports corruption instead
    /// of assuming a valid leaf.
    fn try_decode(leaf: &[Self::Slot], out: &mut Vec<u64>) -> Result<(), Error>;
    /// Slots `keys` would occupy when encoded as one leaf.
    fn encoded_slots(keys: &[u64]) -> usize;
    /// Overwrites the leaf with `keys` (strictly increasing, must fit),
    /// zeroing the free suffix.
    fn write_leaf(leaf: &mut [Self::Slot], keys: &[u64]);
    /// Slots `x` contributes to a leaf encoding when it follows `prev`
    /// (`None` = `x` is the leaf head).
    fn element_slots(prev: Option<u64>, x: u64) -> usize;
    /// Upper bound on the total slots `elements` occupy when balanced across
    /// `num_leaves` leaves; used to size resizes before committing them.
    fn spread_slots_upper_bound(elements: &[u64], num_leaves: usize) -> usize;
    /// Inserts `x` (>= 1) preserving sorted order.
    fn insert(leaf: &mut [Self::Slot], x: u64) -> LeafInsert;
    /// Removes `x` if present.
    fn delete(leaf: &mut [Self::Slot], x: u64) -> LeafDelete;

    /// Raw little-endian byte image of a slot run, for snapshots.
    fn slots_to_bytes(slots: &[Self::Slot]) -> Vec<u8>;
    /// Inverse of [`slots_to_bytes`](Self::slots_to_bytes).
    fn slots_from_bytes(bytes: &[u8]) -> Result<Vec<Self::Slot>, Error>;
}

/// Appends the little-endian base-128 encoding of `v` to `out`: low 7 bits
/// per byte, high bit set on every byte except the last.
pub fn encode_varint(mut v: u64, out: &mut Vec<u8>) {
    while v >= 0x80 {
        out.push((v as u8 & 0x7f) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

/// Encoded length of `v` in bytes.
pub fn varint_len(v: u64) -> usize {
    if v == 0 {
        return 1;
    }
    (70 - v.leading_zeros() as usize) / 7
}

/// Decodes one varint from the front of `bytes`, returning the value and the
/// number of bytes consumed.
pub fn decode_varint(bytes: &[u8]) -> Result<(u64, usize), Error> {
    let mut value = 0u64;
    let mut shift = 0u32;
    for (i, &b) in bytes.iter().enumerate() {
        if shift >= 64 || (shift == 63 && b & 0x7f > 1) {
            return Err(Error::Corrupt("varint exceeds 64 bits".into()));
        }
        value |= u64::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            return Ok((value, i + 1));
        }
        shift += 7;
    }
    Err(Error::Corrupt("varint truncated (dangling continue bit)".into()))
}

/// Uncompressed leaf: 8-byte keys packed to the left, 0 = free cell.
pub struct UncompressedLeaf;

impl UncompressedLeaf {
    fn occupied(leaf: &[u64]) -> usize {
        leaf.partition_point(|&c| c != 0)
    }
}

impl LeafStore for UncompressedLeaf {
    type Slot = u64;

    const KIND: u8 = 0;
    const MAX_ELEMENT_SLOTS: usize = 1;
    const DEFAULT_MIN_LEAF: usize = crate::kernel::MIN_LEAF_CELLS;

    fn head(leaf: &[u64]) -> Option<u64> {
        match leaf.first() {
            Some(&0) | None => None,
            Some(&h) => Some(h),
        }
    }

    fn used_slots(leaf: &[u64]) -> usize {
        Self::occupied(leaf)
    }

    fn element_count(leaf: &[u64]) -> usize {
        Self::occupied(leaf)
    }

    fn decode_into(leaf: &[u64], out: &mut Vec<u64>) {
        out.extend_from_slice(&leaf[..Self::occupied(leaf)]);
    }

    fn try_decode(leaf: &[u64], out: &mut Vec<u64>) -> Result<(), Error> {
        let used = Self::occupied(leaf);
        if leaf[used..].iter().any(|&c| c != 0) {
            return Err(Error::Corrupt("nonzero cell after free space".into()));
        }
        if !leaf[..used].windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Corrupt("cells not strictly increasing".into()));
        }
        out.extend_from_slice(&leaf[..used]);
        Ok(())
    }

    fn encoded_slots(keys: &[u64]) -> usize {
        keys.len()
    }

    fn element_slots(_prev: Option<u64>, _x: u64) -> usize {
        1
    }

    fn spread_slots_upper_bound(elements: &[u64], _num_leaves: usize) -> usize {
        elements.len()
    }

    fn write_leaf(leaf: &mut [u64], keys: &[u64]) {
        debug_assert!(keys.len() <= leaf.len());
        leaf[..keys.len()].copy_from_slice(keys);
        leaf[keys.len()..].fill(0);
    }

    fn insert(leaf: &mut [u64], x: u64) -> LeafInsert {
        debug_assert!(x >= 1);
        let used = Self::occupied(leaf);
        let pos = leaf[..used].partition_point(|&c| c < x);
        if pos < used && leaf[pos] == x {
            return LeafInsert::Duplicate;
        }
        if used == leaf.len() {
            return LeafInsert::Overflow;
        }
        leaf.copy_within(pos..used, pos + 1);
        leaf[pos] = x;
        LeafInsert::Inserted
    }

    fn delete(leaf: &mut [u64], x: u64) -> LeafDelete {
        let used = Self::occupied(leaf);
        let pos = leaf[..used].partition_point(|&c| c < x);
        if pos == used || leaf[pos] != x {
            return LeafDelete::Absent;
        }
        leaf.copy_within(pos + 1..used, pos);
        leaf[used - 1] = 0;
        LeafDelete::Removed
    }

    fn slots_to_bytes(slots: &[u64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(slots.len() * 8);
        for &s in slots {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out
    }

    fn slots_from_bytes(bytes: &[u8]) -> Result<Vec<u64>, Error> {
        if bytes.len() % 8 != 0 {
            return Err(Error::Input("cell snapshot length not a multiple of 8".into()));
        }
        Ok(bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Compressed leaf: 8-byte raw head, then varint-coded positive deltas,
/// then zero padding.
pub struct CompressedLeaf;

const HEAD_BYTES: usize = 8;

impl CompressedLeaf {
    fn read_head(leaf: &[u8]) -> u64 {
        u64::from_le_bytes(leaf[..HEAD_BYTES].try_into().unwrap())
    }

    /// Decodes the leaf, replaying each key through `sink`; errors on any
    /// structural defect. Shared by decode, count, and validation paths.
    fn scan(leaf: &[u8], mut sink: impl FnMut(u64)) -> Result<(), Error> {
        if leaf.len() < HEAD_BYTES {
            // A standalone empty image (e.g. the 0-byte encoding of no keys)
            // is valid; anything else is too short to hold a head.
            return if leaf.iter().all(|&b| b == 0) {
                Ok(())
            } else {
                Err(Error::Corrupt("leaf shorter than head slot".into()))
            };
        }
        let head = Self::read_head(leaf);
        let tail_used = leaf[HEAD_BYTES..]
            .iter()
            .position(|&b| b == 0)
            .unwrap_or(leaf.len() - HEAD_BYTES);
        if head == 0 {
            if leaf.iter().any(|&b| b != 0) {
                return Err(Error::Corrupt("nonzero bytes in empty leaf".into()));
            }
            return Ok(());
        }
        if leaf[HEAD_BYTES + tail_used..].iter().any(|&b| b != 0) {
            return Err(Error::Corrupt("nonzero byte after free space".into()));
        }
        sink(head);
        let mut prev = head;
        let mut tail = &leaf[HEAD_BYTES..HEAD_BYTES + tail_used];
        while !tail.is_empty() {
            let (delta, len) = decode_varint(tail)?;
            prev = prev
                .checked_add(delta)
                .ok_or_else(|| Error::Corrupt("delta overflows the key domain".into()))?;
            sink(prev);
            tail = &tail[len..];
        }
        Ok(())
    }
}

impl LeafStore for CompressedLeaf {
    type Slot = u8;

    const KIND: u8 = 1;
    // Head slot plus one maximal varint.
    const MAX_ELEMENT_SLOTS: usize = HEAD_BYTES + MAX_VARINT_BYTES;
    const DEFAULT_MIN_LEAF: usize = crate::kernel::MIN_LEAF_BYTES;

    fn head(leaf: &[u8]) -> Option<u64> {
        if leaf.len() < HEAD_BYTES {
            return None;
        }
        match Self::read_head(leaf) {
            0 => None,
            h => Some(h),
        }
    }

    fn used_slots(leaf: &[u8]) -> usize {
        if leaf.len() < HEAD_BYTES || Self::read_head(leaf) == 0 {
            return 0;
        }
        let tail = &leaf[HEAD_BYTES..];
        HEAD_BYTES + tail.iter().position(|&b| b == 0).unwrap_or(tail.len())
    }

    fn element_count(leaf: &[u8]) -> usize {
        let used = Self::used_slots(leaf);
        if used == 0 {
            return 0;
        }
        // Every varint ends with a byte whose continue bit is clear.
        1 + leaf[HEAD_BYTES..used].iter().filter(|&&b| b & 0x80 == 0).count()
    }

    fn decode_into(leaf: &[u8], out: &mut Vec<u64>) {
        Self::try_decode(leaf, out).expect("corrupt leaf in trusted decode path");
    }

    fn try_decode(leaf: &[u8], out: &mut Vec<u64>) -> Result<(), Error> {
        let start = out.len();
        let result = Self::scan(leaf, |k| out.push(k));
        if result.is_err() {
            out.truncate(start);
        }
        result
    }

    fn encoded_slots(keys: &[u64]) -> usize {
        if keys.is_empty() {
            return 0;
        }
        HEAD_BYTES + keys.windows(2).map(|w| varint_len(w[1] - w[0])).sum::<usize>()
    }

    fn element_slots(prev: Option<u64>, x: u64) -> usize {
        match prev {
            None => HEAD_BYTES,
            Some(p) => varint_len(x - p),
        }
    }

    fn spread_slots_upper_bound(elements: &[u64], num_leaves: usize) -> usize {
        // Every leaf head costs a full 8 bytes; the deltas dropped at chunk
        // boundaries make this an overestimate, never an underestimate.
        let deltas: usize = elements.windows(2).map(|w| varint_len(w[1] - w[0])).sum();
        HEAD_BYTES * num_leaves.min(elements.len()) + deltas
    }

    fn write_leaf(leaf: &mut [u8], keys: &[u64]) {
        if keys.is_empty() {
            leaf.fill(0);
            return;
        }
        debug_assert!(keys.windows(2).all(|w| w[0] < w[1]) && keys[0] >= 1);
        leaf[..HEAD_BYTES].copy_from_slice(&keys[0].to_le_bytes());
        let mut tail = Vec::with_capacity(leaf.len() - HEAD_BYTES);
        for w in keys.windows(2) {
            encode_varint(w[1] - w[0], &mut tail);
        }
        debug_assert!(HEAD_BYTES + tail.len() <= leaf.len(), "leaf budget exceeded");
        leaf[HEAD_BYTES..HEAD_BYTES + tail.len()].copy_from_slice(&tail);
        leaf[HEAD_BYTES + tail.len()..].fill(0);
    }

    fn insert(leaf: &mut [u8], x: u64) -> LeafInsert {
        debug_assert!(x >= 1);
        let mut keys = Vec::with_capacity(Self::element_count(leaf) + 1);
        Self::decode_into(leaf, &mut keys);
        let pos = keys.partition_point(|&k| k < x);
        if pos < keys.len() && keys[pos] == x {
            return LeafInsert::Duplicate;
        }
        keys.insert(pos, x);
        if Self::encoded_slots(&keys) > leaf.len() {
            return LeafInsert::Overflow;
        }
        Self::write_leaf(leaf, &keys);
        LeafInsert::Inserted
    }

    fn delete(leaf: &mut [u8], x: u64) -> LeafDelete {
        let mut keys = Vec::with_capacity(Self::element_count(leaf));
        Self::decode_into(leaf, &mut keys);
        let pos = keys.partition_point(|&k| k < x);
        if pos == keys.len() || keys[pos] != x {
            return LeafDelete::Absent;
        }
        keys.remove(pos);
        Self::write_leaf(leaf, &keys);
        LeafDelete::Removed
    }

    fn slots_to_bytes(slots: &[u8]) -> Vec<u8> {
        slots.to_vec()
    }

    fn slots_from_bytes(bytes: &[u8]) -> Result<Vec<u8>, Error> {
        Ok(bytes.to_vec())
    }
}

/// Encodes strictly increasing `keys` as one compressed-leaf byte image of
/// exactly the needed length.
pub fn leaf_encode(keys: &[u64]) -> Vec<u8> {
    let mut leaf = vec![0u8; CompressedLeaf::encoded_slots(keys)];
    CompressedLeaf::write_leaf(&mut leaf, keys);
    leaf
}

/// Decodes a compressed-leaf byte image back into its keys.
pub fn leaf_decode(leaf: &[u8]) -> Result<Vec<u64>, Error> {
    let mut out = Vec::new();
    CompressedLeaf::try_decode(leaf, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn varint_examples() {
        let mut buf = Vec::new();
        encode_varint(5, &mut buf);
        assert_eq!(buf, [0x05]);
        buf.clear();
        encode_varint(128, &mut buf);
        assert_eq!(buf, [0x80, 0x01]);
        buf.clear();
        encode_varint(300, &mut buf);
        assert_eq!(buf, [0xAC, 0x02]);

        assert_eq!(decode_varint(&[0x05, 0xFF]).unwrap(), (5, 1));
        assert_eq!(decode_varint(&[0xAC, 0x02]).unwrap(), (300, 2));
        assert!(decode_varint(&[0x80]).is_err());
        assert!(decode_varint(&[]).is_err());
    }

    #[test]
    fn varint_len_matches_encoding() {
        for v in [0, 1, 127, 128, 300, 1 << 14, (1 << 14) - 1, u64::MAX, 1 << 40] {
            let mut buf = Vec::new();
            encode_varint(v, &mut buf);
            assert_eq!(varint_len(v), buf.len(), "v = {v}");
        }
    }

    #[test]
    fn leaf_encode_examples() {
        let leaf = leaf_encode(&[10, 13, 20]);
        assert_eq!(leaf.len(), 10); // 8-byte head + two 1-byte deltas
        assert_eq!(&leaf[..8], &10u64.to_le_bytes());
        assert_eq!(&leaf[8..], &[3, 7]);
        assert_eq!(leaf_decode(&leaf).unwrap(), vec![10, 13, 20]);

        assert_eq!(CompressedLeaf::encoded_slots(&[]), 0);
        assert_eq!(CompressedLeaf::encoded_slots(&[1, 1 + (1 << 40)]), 8 + 6);
        let empty = vec![0u8; 16];
        assert_eq!(CompressedLeaf::used_slots(&empty), 0);
        assert_eq!(CompressedLeaf::element_count(&empty), 0);
    }

    #[test]
    fn compressed_insert_delete_examples() {
        let mut leaf = vec![0u8; 16];
        CompressedLeaf::write_leaf(&mut leaf, &[10, 20]);
        assert_eq!(CompressedLeaf::insert(&mut leaf, 13), LeafInsert::Inserted);
        assert_eq!(leaf_decode(&leaf).unwrap(), vec![10, 13, 20]);
        assert_eq!(CompressedLeaf::insert(&mut leaf, 10), LeafInsert::Duplicate);
        assert_eq!(leaf_decode(&leaf).unwrap(), vec![10, 13, 20]);
        assert_eq!(CompressedLeaf::delete(&mut leaf, 13), LeafDelete::Removed);
        assert_eq!(CompressedLeaf::delete(&mut leaf, 13), LeafDelete::Absent);
        assert_eq!(leaf_decode(&leaf).unwrap(), vec![10, 20]);

        // New head smaller than the current one.
        assert_eq!(CompressedLeaf::insert(&mut leaf, 3), LeafInsert::Inserted);
        assert_eq!(leaf_decode(&leaf).unwrap(), vec![3, 10, 20]);

        // A tiny leaf overflows and is left unchanged.
        let mut tiny = leaf_encode(&[10, 20]);
        let before = tiny.clone();
        assert_eq!(CompressedLeaf::insert(&mut tiny, 1 << 40), LeafInsert::Overflow);
        assert_eq!(tiny, before);
    }

    #[test]
    fn uncompressed_insert_delete_examples() {
        let mut leaf = vec![0u64; 4];
        assert_eq!(UncompressedLeaf::insert(&mut leaf, 20), LeafInsert::Inserted);
        assert_eq!(UncompressedLeaf::insert(&mut leaf, 10), LeafInsert::Inserted);
        assert_eq!(UncompressedLeaf::insert(&mut leaf, 13), LeafInsert::Inserted);
        assert_eq!(leaf, [10, 13, 20, 0]);
        assert_eq!(UncompressedLeaf::insert(&mut leaf, 10), LeafInsert::Duplicate);
        assert_eq!(UncompressedLeaf::insert(&mut leaf, 30), LeafInsert::Inserted);
        assert_eq!(UncompressedLeaf::insert(&mut leaf, 40), LeafInsert::Overflow);
        assert_eq!(UncompressedLeaf::delete(&mut leaf, 13), LeafDelete::Removed);
        assert_eq!(leaf, [10, 20, 30, 0]);
        assert_eq!(UncompressedLeaf::delete(&mut leaf, 13), LeafDelete::Absent);
        assert_eq!(UncompressedLeaf::head(&leaf), Some(10));
        assert_eq!(UncompressedLeaf::element_count(&leaf), 3);
    }

    #[test]
    fn corrupt_leaves_are_reported() {
        // Dangling continue bit at end of used region.
        let mut leaf = leaf_encode(&[10, 13]);
        leaf[8] = 0x80;
        leaf.push(0); // padding after the dangling byte
        assert!(leaf_decode(&leaf).is_err());

        // Nonzero byte after the free-space boundary.
        let mut leaf = leaf_encode(&[10, 13]);
        leaf.extend_from_slice(&[0x00, 0x07]);
        assert!(leaf_decode(&leaf).is_err());

        // Nonzero tail in a head-empty leaf.
        let mut leaf = vec![0u8; 12];
        leaf[9] = 1;
        assert!(leaf_decode(&leaf).is_err());

        // Delta sum overflowing the key domain.
        let mut leaf = vec![0u8; 32];
        leaf[..8].copy_from_slice(&u64::MAX.to_le_bytes());
        leaf[8] = 0x01;
        assert!(leaf_decode(&leaf).is_err());
    }

    fn sorted_unique_keys() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::btree_set(1u64..(1 << 40), 0..60)
            .prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn compressed_round_trip(keys in sorted_unique_keys()) {
            // Cross-check against an independent delta+varint construction.
            let leaf = leaf_encode(&keys);
            prop_assert_eq!(leaf.len(), CompressedLeaf::encoded_slots(&keys));
            let mut expected = Vec::new();
            if let Some((&first, rest)) = keys.split_first() {
                expected.extend_from_slice(&first.to_le_bytes());
                let mut prev = first;
                for &k in rest {
                    let mut d = k - prev;
                    while d >= 128 {
                        expected.push((d % 128) as u8 + 128);
                        d /= 128;
                    }
                    expected.push(d as u8);
                    prev = k;
                }
            }
            prop_assert_eq!(&leaf, &expected);
            prop_assert_eq!(leaf_decode(&leaf).unwrap(), keys.clone());
            prop_assert_eq!(CompressedLeaf::element_count(&leaf), keys.len());
            prop_assert!(leaf.iter().skip(8).all(|&b| b != 0));
        }

        #[test]
        fn codecs_match_sorted_list_oracle(
            ops in proptest::collection::vec((any::<bool>(), 1u64..200), 1..100)
        ) {
            let mut cleaf = vec![0u8; 4096];
            let mut uleaf = vec![0u64; 512];
            let mut oracle: Vec<u64> = Vec::new();
            for (is_insert, key) in ops {
                if is_insert {
                    let c = CompressedLeaf::insert(&mut cleaf, key);
                    let u = UncompressedLeaf::insert(&mut uleaf, key);
                    prop_assert_eq!(c, u);
                    if c == LeafInsert::Inserted {
                        let pos = oracle.partition_point(|&k| k < key);
                        oracle.insert(pos, key);
                    }
                } else {
                    let c = CompressedLeaf::delete(&mut cleaf, key);
                    let u = UncompressedLeaf::delete(&mut uleaf, key);
                    prop_assert_eq!(c, u);
                    if c == LeafDelete::Removed {
                        oracle.retain(|&k| k != key);
                    }
                }
                prop_assert_eq!(&leaf_decode(&cleaf).unwrap(), &oracle);
                let mut udec = Vec::new();
                UncompressedLeaf::decode_into(&uleaf, &mut udec);
                prop_assert_eq!(&udec, &oracle);
            }
        }

        #[test]
        fn insert_never_shrinks_used_bytes(keys in sorted_unique_keys(), x in 1u64..(1 << 40)) {
            let mut leaf = vec![0u8; 2048];
            CompressedLeaf::write_leaf(&mut leaf, &keys);
            let before = CompressedLeaf::used_slots(&leaf);
            CompressedLeaf::insert(&mut leaf, x);
            let after = CompressedLeaf::used_slots(&leaf);
            prop_assert!(after >= before);
            CompressedLeaf::delete(&mut leaf, x);
            prop_assert!(CompressedLeaf::used_slots(&leaf) <= after);
        }

        #[test]
        fn fuzzed_streams_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
            // Arbitrary byte images must decode cleanly or report corruption,
            // never read out of bounds or panic.
            let _ = decode_varint(&bytes);
            let mut out = Vec::new();
            let _ = CompressedLeaf::try_decode(&bytes, &mut out);
            if bytes.len() >= 8 {
                let _ = CompressedLeaf::used_slots(&bytes);
                let _ = CompressedLeaf::element_count(&bytes);
            }
        }
    }
}

//! Deterministic pseudo-random number generation for the redaction pipeline.
//!
//! Every randomized decision in the tool flows through [`StreamRng`], a
//! SplitMix64 generator seeded from the 32-bit user seed and a fixed stage
//! tag. Each pipeline stage owns its own stream, so the number of draws
//! consumed by one stage never shifts the draws seen by another.
//!
//! The draw primitives are pinned so that outputs are reproducible across
//! platforms and releases:
//!
//! * `next_u64`: one SplitMix64 step (additive constant `0x9E3779B97F4A7C15`,
//!   finalizer from the reference implementation).
//! * `next_u32`: high 32 bits of `next_u64`.
//! * `range(n)`: `next_u64() % n` (plain modulo; bias is irrelevant here).
//! * `shuffle`: backward Fisher-Yates using `range`.

/// Pipeline stage tags. The tag is mixed into the stream seed, one stream
/// per stage, in the order the stages run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Random primary-input vectors for signal-entropy estimation.
    Entropy = 1,
    /// Fisher-Yates shuffle of the selected critical vertices.
    Shuffle = 2,
    /// Element size draws and padding-dummy sources during cone mapping.
    Sizes = 3,
    /// Dummy sequential/Boolean block placement.
    DummyCsb = 4,
    /// Per-element dummy-input, input-reorder and output-inversion draws.
    Randomize = 5,
    /// Programmable-interconnect placement.
    Cpi = 6,
    /// Random vectors for equivalence checking and similarity signatures.
    Verify = 7,
}

/// Deterministic SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    state: u64,
}

impl StreamRng {
    /// Creates the stream for `(seed, stage)`.
    pub fn new(seed: u32, stage: Stage) -> Self {
        Self::from_raw(((seed as u64) << 32) ^ stage as u64)
    }

    /// Creates a stream from a raw 64-bit state (used for derived streams
    /// such as name-keyed stimulus bits).
    pub fn from_raw(state: u64) -> Self {
        StreamRng { state }
    }

    /// Next 64-bit draw (SplitMix64).
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Next 32-bit draw (high half of `next_u64`).
    pub fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    /// Draw in `[0, n)`. `n` must be nonzero.
    pub fn range(&mut self, n: usize) -> usize {
        assert!(n > 0, "range bound must be nonzero");
        (self.next_u64() % n as u64) as usize
    }

    /// One random bit.
    pub fn bit(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// In-place backward Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.range(i + 1);
            items.swap(i, j);
        }
    }
}

/// 64-bit FNV-1a, used to key stimulus streams by port name.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = StreamRng::new(7, Stage::Sizes);
        let mut b = StreamRng::new(7, Stage::Sizes);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn stages_are_independent() {
        let mut a = StreamRng::new(7, Stage::Sizes);
        let mut b = StreamRng::new(7, Stage::Cpi);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    // Frozen first draws for seed 1; a change here is a compatibility break
    // for every previously generated netlist/bitstream pair.
    #[test]
    fn draw_sequence_is_frozen() {
        let mut r = StreamRng::new(1, Stage::Entropy);
        assert_eq!(r.next_u64(), 0x204391a6fd59956f);
        assert_eq!(r.next_u64(), 0x31eacba8e9fc3811);
        assert_eq!(r.next_u64(), 0xdd1573f64cbd37a8);
    }

    #[test]
    fn shuffle_is_deterministic_and_permutes() {
        let mut r = StreamRng::new(42, Stage::Shuffle);
        let mut v: Vec<u32> = (0..16).collect();
        r.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..16).collect::<Vec<_>>());
        let mut r2 = StreamRng::new(42, Stage::Shuffle);
        let mut v2: Vec<u32> = (0..16).collect();
        r2.shuffle(&mut v2);
        assert_eq!(v, v2);
    }

    #[test]
    fn range_respects_bound() {
        let mut r = StreamRng::new(3, Stage::DummyCsb);
        for _ in 0..1000 {
            assert!(r.range(7) < 7);
        }
    }
}

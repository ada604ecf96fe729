//! Deterministic, splittable random streams.
//!
//! Every random quantity in the crate is drawn from a [`RngStream`]: a ChaCha12
//! generator keyed by a master seed and positioned on a 64-bit stream id.
//! Distinct stream ids yield statistically independent sequences under the
//! same seed, so replications, losses, and purposes can each own a stream
//! without coordinating draw counts. Identical `(seed, stream_id)` pairs
//! reproduce byte-identical sequences on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// A reproducible random stream: master seed plus stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Derive a stream by hashing structured labels and indices, e.g.
    /// `(experiment, loss, purpose)` plus `(n, replication)`. The id is a
    /// stable FNV-1a digest, so runs are reproducible across processes.
    pub fn derived(seed: u64, labels: &[&str], indices: &[u64]) -> Self {
        let mut h = Fnv1a::new();
        for label in labels {
            h.write(label.as_bytes());
            h.write(&[0xff]); // separator so ("ab","c") != ("a","bc")
        }
        for ix in indices {
            h.write(&ix.to_le_bytes());
        }
        RngStream { seed, stream_id: h.finish() }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::from_seed(expand_seed(self.seed));
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Expand a 64-bit seed into a 256-bit ChaCha key with SplitMix64, the
/// standard seed-expansion recurrence.
fn expand_seed(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    key
}

/// Minimal 64-bit FNV-1a, kept local so stream ids never depend on `std`
/// hasher internals.
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

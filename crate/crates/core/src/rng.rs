//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit `seed` and
//! positioned on a 64-bit ChaCha `stream_id`. ChaCha is counter based, so two
//! streams with the same seed and different ids never overlap, and replications
//! can run on any thread in any order without changing their output.
//!
//! Child streams are derived with [`RngStream::substream`]:
//!
//! ```text
//! child_id = splitmix64(parent_id ^ splitmix64(index + 0x9E37_79B9_7F4A_7C15))
//! ```
//!
//! The derivation depends only on the parent's id and the index, never on how
//! many values the parent has already produced. The generator algorithm
//! (`rand_chacha::ChaCha8Rng`, seeded with `seed_from_u64`) is part of the
//! fixture contract: changing it changes every frozen simulation output.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream for child `index`, independent of this stream's position.
    pub fn substream(&self, index: u64) -> RngStream {
        let id = splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(GOLDEN_GAMMA)));
        RngStream::new(self.seed, id)
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            let bits = self.inner.next_u64() >> 11;
            if bits != 0 {
                return bits as f64 * (1.0 / (1u64 << 53) as f64);
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

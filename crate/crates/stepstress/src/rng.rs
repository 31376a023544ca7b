//! Reproducible random-number streams.
//!
//! An [`RngStream`] is a value describing a ChaCha12 stream: a 64-bit seed
//! plus a 64-bit stream id. Identical descriptors always materialize
//! identical generators; distinct stream ids (or [`child`](RngStream::child)
//! derivations) give streams that are independent for practical purposes.
//! Drivers hand each parallel unit of work its own child, so results do not
//! depend on scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream: u64,
}

/// One round of the splitmix64 output function.
#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Materialize the generator for this descriptor.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Derive an independent child stream. Children of distinct tags, and
    /// children of distinct parents, do not collide.
    pub fn child(&self, tag: u64) -> RngStream {
        let mixed = splitmix64(self.seed ^ splitmix64(self.stream ^ splitmix64(tag)));
        RngStream {
            seed: mixed,
            stream: 0,
        }
    }
}

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A counter-addressed random stream.
///
/// Draw `i` of stream `(seed, stream_id)` is a pure function of the triple,
/// so a batch starting at any index can be evaluated on any worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A cursor whose next draw is 64-bit draw number `index`.
    pub fn cursor(&self, index: u64) -> StreamCursor {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        // two 32-bit words per u64 draw
        rng.set_word_pos(u128::from(index) * 2);
        StreamCursor(rng)
    }
}

pub struct StreamCursor(ChaCha8Rng);

impl StreamCursor {
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

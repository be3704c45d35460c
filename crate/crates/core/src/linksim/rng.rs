//! Counter-addressed random draws.
//!
//! Draw `n` of stream `s` always reads the same ChaCha8 words regardless of
//! how the work is chunked: every draw consumes exactly `WORDS_PER_DRAW`
//! 32-bit words starting at word `n * WORDS_PER_DRAW`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One u64 for the symbol and four for two Box-Muller pairs.
const U64_PER_DRAW: usize = 5;
const WORDS_PER_DRAW: u128 = 2 * U64_PER_DRAW as u128;

/// Up to three bands of noise per draw.
pub(crate) const MAX_DIMS: usize = 3;

pub(crate) struct Draw {
    pub symbol: usize,
    pub noise: [f64; MAX_DIMS],
}

pub(crate) struct DrawStream {
    rng: ChaCha8Rng,
}

impl DrawStream {
    /// Positions the stream at draw `first`.
    pub fn new(seed: u64, stream: u64, first: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng.set_word_pos(first as u128 * WORDS_PER_DRAW);
        DrawStream { rng }
    }

    /// Symbol uniform on `0..m` and standard normal noise.
    pub fn next(&mut self, m: usize) -> Draw {
        let mut w = [0u64; U64_PER_DRAW];
        for x in w.iter_mut() {
            *x = self.rng.next_u64();
        }
        let symbol = ((w[0] as u128 * m as u128) >> 64) as usize;
        let (a, b) = box_muller(w[1], w[2]);
        let (c, _) = box_muller(w[3], w[4]);
        Draw {
            symbol,
            noise: [a, b, c],
        }
    }
}

fn unit_open(x: u64) -> f64 {
    // (0, 1]
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(u: u64, v: u64) -> (f64, f64) {
    let r = (-2.0 * unit_open(u).ln()).sqrt();
    let t = std::f64::consts::TAU * unit_open(v);
    (r * t.cos(), r * t.sin())
}

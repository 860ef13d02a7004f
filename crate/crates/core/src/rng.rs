//! Seeded, splittable random streams.
//!
//! The stream algorithm is fixed so that outputs are reproducible across
//! platforms and crate upgrades:
//!
//! * the generator is ChaCha20 (`rand_chacha` 0.3), keyed with
//!   `ChaCha20Rng::seed_from_u64(seed)`;
//! * the root stream uses ChaCha stream id 0, and the partition stream with
//!   index `k` uses stream id `k + 1`;
//! * bounded integers come from rejection sampling on raw `u64` words
//!   (reject the top `2^64 mod bound` values, then reduce modulo `bound`);
//! * shuffles are Fisher–Yates, swapping position `i` (from `n−1` down to 1)
//!   with a uniform position in `0..=i`.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::Permutation;

#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha20Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for partition `index` of a computation seeded with `seed`.
    pub fn partition(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(index + 1);
        Stream { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `0..bound`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let reject = (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.rng.next_u64();
            if x <= u64::MAX - reject {
                return x % bound;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Uniformly random element of `S_n`.
    pub fn permutation(&mut self, n: usize) -> Permutation {
        let mut image: Vec<usize> = (0..n).collect();
        self.shuffle(&mut image);
        Permutation::from_zero_based(image)
    }

    pub(crate) fn shuffle_identity_into(&mut self, buf: &mut [usize]) {
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = k;
        }
        self.shuffle(buf);
    }
}

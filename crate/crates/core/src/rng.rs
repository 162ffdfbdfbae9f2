//! Counter-based randomness.
//!
//! Every random quantity is addressed by `(seed, position)` in a ChaCha8
//! keystream, so results do not depend on the order or thread in which they
//! are drawn.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for a master seed, positioned at the start of its keystream.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child seed number `index` of `master` (trial seeds, restart seeds, ...).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(1);
    rng.set_word_pos(2 * u128::from(index));
    rng.next_u64()
}

/// `len` independent fair bits, bit `i` taken from keystream word `i / 32`.
pub fn random_bits(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = stream(seed);
    let mut bits = Vec::with_capacity(len);
    while bits.len() < len {
        let word = rng.next_u32();
        let take = (len - bits.len()).min(32);
        bits.extend((0..take).map(|k| ((word >> k) & 1) as u8));
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_are_position_addressed() {
        let long = random_bits(9, 100);
        let short = random_bits(9, 40);
        assert_eq!(&long[..40], &short[..]);
        assert!(long.iter().all(|&b| b <= 1));
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: Vec<u64> = (0..64).map(|i| derive_seed(1, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
        assert_eq!(derive_seed(1, 5), seeds[5]);
        assert_ne!(derive_seed(2, 5), seeds[5]);
    }
}

use rand::RngCore;
use rand_chacha::ChaCha8Rng;

use crate::rng::{stream, DOMAIN_CHAIN};

/// Source of the symmetric signs `ξ_k ∈ {−1, +1}` driving each path.
pub trait BitSource: Sync {
    type Signs: Iterator<Item = f64>;

    /// The sign sequence `ξ_1, ξ_2, …` of path `path_index`.
    fn signs(&self, path_index: u64) -> Self::Signs;
}

/// Counter-based random bits: sign `k` of path `j` is the top bit of the
/// `k`-th 64-bit word of ChaCha8 stream `j` keyed by the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitStream {
    pub master_seed: u64,
}

impl BitStream {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Random access to sign `k` (0-based) of path `j`.
    pub fn sign(&self, path_index: u64, k: u64) -> f64 {
        let mut rng = stream(self.master_seed, DOMAIN_CHAIN, path_index);
        rng.set_word_pos(2 * u128::from(k));
        top_bit_sign(rng.next_u64())
    }
}

#[inline]
fn top_bit_sign(word: u64) -> f64 {
    if word >> 63 == 1 {
        1.0
    } else {
        -1.0
    }
}

pub struct RandomSigns(ChaCha8Rng);

impl Iterator for RandomSigns {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(top_bit_sign(self.0.next_u64()))
    }
}

impl BitSource for BitStream {
    type Signs = RandomSigns;

    fn signs(&self, path_index: u64) -> RandomSigns {
        RandomSigns(stream(self.master_seed, DOMAIN_CHAIN, path_index))
    }
}

/// A fixed sign pattern, repeated cyclically, identical for every path.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedBits(pub Vec<f64>);

impl BitSource for ScriptedBits {
    type Signs = std::iter::Cycle<std::vec::IntoIter<f64>>;

    fn signs(&self, _path_index: u64) -> Self::Signs {
        assert!(!self.0.is_empty(), "scripted sign pattern is empty");
        self.0.clone().into_iter().cycle()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let b = BitStream::new(99);
        let seq: Vec<f64> = b.signs(5).take(50).collect();
        for (k, s) in seq.iter().enumerate() {
            assert_eq!(*s, b.sign(5, k as u64));
        }
    }

    #[test]
    fn signs_are_balanced() {
        let n = 200_000;
        let sum: f64 = BitStream::new(1).signs(0).take(n).sum();
        assert!(sum.abs() < 4.0 * (n as f64).sqrt());
    }

    #[test]
    fn scripted_repeats() {
        let s: Vec<f64> = ScriptedBits(vec![1.0, -1.0]).signs(0).take(5).collect();
        assert_eq!(s, vec![1.0, -1.0, 1.0, -1.0, 1.0]);
    }
}

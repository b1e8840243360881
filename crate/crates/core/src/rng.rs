//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 keystream keyed by the master seed (with a
//! domain tag) and selected by the path index, so the `k`-th draw of path
//! `j` is a pure function of `(seed, j, k)` no matter how paths are
//! scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_CHAIN: u64 = 0x6269_7473_0000_0001;
pub(crate) const DOMAIN_EXIT: u64 = 0x6578_6974_0000_0002;
pub(crate) const DOMAIN_REFERENCE: u64 = 0x7265_6665_0000_0003;
pub(crate) const DOMAIN_BOOTSTRAP: u64 = 0x626f_6f74_0000_0004;
pub(crate) const DOMAIN_DIAGNOSTIC: u64 = 0x6469_6167_0000_0005;

/// Keystream `path` of the generator keyed by `(master_seed, domain)`.
pub fn stream(master_seed: u64, domain: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ domain);
    rng.set_stream(path);
    rng
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
#[inline]
pub fn open_uniform(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Mixes a sub-seed out of a master seed and an index (SplitMix64 finaliser).
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Order-independent seed derivation.
//!
//! Every random stream in a run is keyed by the values that identify it
//! (run seed, round, image id, view scale, view index), never by how many
//! draws happened before it. Rounds and images can therefore be processed in
//! any order, or concurrently, without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// One component of a seed key.
#[derive(Debug, Clone, Copy)]
pub enum SeedPart<'a> {
    Tag(&'a str),
    U64(u64),
    Str(&'a str),
}

/// Hashes the key parts into a 64-bit seed. Parts are length-prefixed and
/// type-tagged, so `["ab", "c"]` and `["a", "bc"]` derive different seeds.
pub fn derive_seed(parts: &[SeedPart<'_>]) -> u64 {
    let mut hasher = Sha256::new();
    for part in parts {
        match part {
            SeedPart::Tag(s) => {
                hasher.update([0u8]);
                hasher.update((s.len() as u64).to_le_bytes());
                hasher.update(s.as_bytes());
            }
            SeedPart::U64(v) => {
                hasher.update([1u8]);
                hasher.update(v.to_le_bytes());
            }
            SeedPart::Str(s) => {
                hasher.update([2u8]);
                hasher.update((s.len() as u64).to_le_bytes());
                hasher.update(s.as_bytes());
            }
        }
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest is 32 bytes"))
}

pub fn rng_for(parts: &[SeedPart<'_>]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(parts))
}

/// `hash(run_seed, round)`.
pub fn round_seed(run_seed: u64, round: usize) -> u64 {
    derive_seed(&[
        SeedPart::Tag("round"),
        SeedPart::U64(run_seed),
        SeedPart::U64(round as u64),
    ])
}

/// Fast 64-bit digest of an `f32` buffer (bit patterns, not values), used to
/// key per-view randomness in the synthetic encoder.
pub fn pixel_digest(data: &[f32]) -> u64 {
    const K: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut h = (data.len() as u64).wrapping_mul(K);
    for chunk in data.chunks(2) {
        let lo = chunk[0].to_bits() as u64;
        let hi = chunk.get(1).map_or(0, |v| v.to_bits() as u64);
        h = (h ^ (lo | (hi << 32))).wrapping_mul(K);
        h ^= h >> 29;
    }
    splitmix_finalize(h)
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

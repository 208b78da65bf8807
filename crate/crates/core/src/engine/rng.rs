//! Seed derivation for deterministic, isolated random streams.
//!
//! One engine-level seed drives a whole campaign. Every trial and every
//! relation application receives its own stream derived from that seed, so
//! adding or removing a relation never perturbs the draws of the others.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over raw bytes. Stable across platforms and releases.
fn fnv1a(init: u64, bytes: &[u8]) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = init ^ 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Derives the sub-seed for trial `trial` of a campaign.
pub fn trial_seed(campaign_seed: u64, trial: u64) -> u64 {
    let mut bytes = Vec::with_capacity(22);
    bytes.extend_from_slice(b"trial:");
    bytes.extend_from_slice(&campaign_seed.to_le_bytes());
    bytes.extend_from_slice(&trial.to_le_bytes());
    fnv1a(0, &bytes)
}

/// Stream for generating the trial's source input.
pub fn source_stream(trial_seed: u64) -> ChaCha8Rng {
    let mut bytes = Vec::with_capacity(15);
    bytes.extend_from_slice(b"source:");
    bytes.extend_from_slice(&trial_seed.to_le_bytes());
    ChaCha8Rng::seed_from_u64(fnv1a(0, &bytes))
}

/// Stream for one relation application, keyed by the relation id.
pub fn relation_stream(seed: u64, relation_id: &str) -> ChaCha8Rng {
    let mut bytes = Vec::with_capacity(9 + relation_id.len() + 8);
    bytes.extend_from_slice(b"relation:");
    bytes.extend_from_slice(relation_id.as_bytes());
    bytes.extend_from_slice(&seed.to_le_bytes());
    ChaCha8Rng::seed_from_u64(fnv1a(0, &bytes))
}

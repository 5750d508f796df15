//! Per-trial seed derivation.
//!
//! `trial_seed(seed, n, p, trial) = seed ^ fnv1a64(le(n) || le(p.to_bits()) || le(trial))`
//! where every field is encoded as 8 little-endian bytes. Adding trials or
//! sizes to a run never changes the seeds of the existing ones.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a. Spelled out because `std`'s hasher is not guaranteed to be
/// stable across releases.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

pub fn trial_seed(seed: u64, n: usize, p: f64, trial: usize) -> u64 {
    let mut buf = [0u8; 24];
    buf[..8].copy_from_slice(&(n as u64).to_le_bytes());
    buf[8..16].copy_from_slice(&p.to_bits().to_le_bytes());
    buf[16..].copy_from_slice(&(trial as u64).to_le_bytes());
    seed ^ fnv1a64(&buf)
}

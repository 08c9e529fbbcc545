//! Trial counts and per-trial random streams shared by the color-coding solvers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Smallest trial count that drives the miss probability below `delta` when
/// one trial succeeds with probability at least `e^-exponent`.
pub fn trial_count(exponent: u64, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParams(format!("delta must lie in (0, 1), got {delta}")));
    }
    let n = ((exponent as f64).exp() * (1.0 / delta).ln()).ceil();
    Ok(n.max(1.0) as u64)
}

/// Independent stream for trial `t` under `seed`.
pub fn trial_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

/// `len` values drawn uniformly from `1..=colors`.
pub fn random_hash(rng: &mut ChaCha8Rng, len: usize, colors: u32, out: &mut Vec<u32>) {
    out.clear();
    out.extend((0..len).map(|_| rng.random_range(1..=colors)));
}

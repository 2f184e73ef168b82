//! Freivalds' randomized verification of matrix products: `A * B = C` is
//! probed with random 0-1 vectors `u` by checking `A * (B * u) = C * u`,
//! which costs `O(n^2)` per probe and catches a wrong product with
//! probability at least 1/2 per probe.
//!
//! Probe vectors come from a fixed splittable generator keyed by
//! `(seed, product index, repetition index)`, so accept/reject transcripts
//! are reproducible and the per-product checks are independent.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::NatMatrix;

/// The deterministic substream for one probe.
fn probe_rng(seed: u64, product_index: u64, rep: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&product_index.to_le_bytes());
    key[16..24].copy_from_slice(&rep.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn probe_vector(seed: u64, product_index: u64, rep: u64, n: usize) -> Vec<u64> {
    let mut rng = probe_rng(seed, product_index, rep);
    (0..n).map(|_| u64::from(rng.gen::<bool>())).collect()
}

/// Probes `a * b = c` with `reps` fresh 0-1 vectors. All `reps` probes are
/// always drawn (the draw count is part of the checker contract); the result
/// is the row index of the first discrepancy found, if any. `probes` is
/// incremented once per drawn vector.
pub fn check_product(
    a: &NatMatrix,
    b: &NatMatrix,
    c: &NatMatrix,
    seed: u64,
    product_index: u64,
    reps: u32,
    probes: &mut u64,
) -> Option<usize> {
    let n = c.dim();
    let mut failure = None;
    for rep in 0..reps {
        *probes += 1;
        let u = probe_vector(seed, product_index, rep as u64, n);
        let bu = b.mul_vec(&u);
        let abu = a.mul_vec(&bu);
        let cu = c.mul_vec(&u);
        if failure.is_none() {
            if let Some(row) = abu.iter().zip(&cu).position(|(x, y)| x != y) {
                failure = Some(row);
            }
        }
    }
    failure
}

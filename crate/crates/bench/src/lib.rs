//! Shared inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dctapprox::codec::synthetic_ar1_image;
use dctapprox::params::{known_optima, ParamVector};
use dctapprox::pgm::GrayImage;

/// Deterministic 8-sample integer vectors in the 8-bit pixel range.
pub fn pixel_vectors(count: usize, seed: u64) -> Vec<[i64; 8]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.random_range(0..=255)))
        .collect()
}

/// Same vectors as reals.
pub fn pixel_vectors_f64(count: usize, seed: u64) -> Vec<[f64; 8]> {
    pixel_vectors(count, seed)
        .into_iter()
        .map(|v| v.map(|x| x as f64))
        .collect()
}

pub fn seed(j: usize) -> ParamVector {
    known_optima()[j - 1]
}

/// 512x512 AR(1) test image.
pub fn test_image() -> GrayImage {
    synthetic_ar1_image(512, 512, 0.95, 7).expect("valid model")
}

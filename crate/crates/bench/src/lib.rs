//! Shared seeded inputs for the benchmark suites: every benchmark draws its
//! matrices and configurations from a fixed-seed generator so runs are
//! comparable across machines and commits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dualgame_core::sample::{random_density, random_detector_gram, random_hermitian, random_psd};
use dualgame_core::{ComplexMatrix, DensityMatrix, DetectorGram, Ensemble};

/// Deterministic generator for benchmark inputs.
pub fn bench_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded random Hermitian matrix.
pub fn hermitian_input(dim: usize, seed: u64) -> ComplexMatrix {
    random_hermitian(dim, &mut bench_rng(seed))
}

/// Seeded random positive-semidefinite matrix.
pub fn psd_input(dim: usize, seed: u64) -> ComplexMatrix {
    random_psd(dim, &mut bench_rng(seed))
}

/// Seeded random interferometer configuration (input state + detector Gram).
pub fn config_input(n: usize, seed: u64) -> (DensityMatrix, DetectorGram) {
    let mut rng = bench_rng(seed);
    (random_density(n, &mut rng), random_detector_gram(n, &mut rng))
}

/// The ways-game ensemble of a seeded random configuration.
pub fn detector_ensemble_input(n: usize, seed: u64) -> Ensemble {
    let (rho, s) = config_input(n, seed);
    Ensemble::detector_ensemble(&rho, &s).expect("matching dimensions by construction")
}

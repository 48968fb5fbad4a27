//! Reproducible random physical configurations.
//!
//! The duality bounds quantify over *all* physical setups; these samplers are
//! the artifact's documented proxy. Inputs ρ come from a normalized
//! Wishart-style construction G†G/tr(G†G); detector Grams from the same
//! construction rescaled to a unit diagonal; phases uniform in [0, 2π).
//! Every sampler takes the RNG explicitly, so sweeps can derive one
//! counter-based stream per configuration index and stay reproducible under
//! any parallel schedule.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::interferometer::{DensityMatrix, DetectorGram, PhaseSet};
use crate::numerics::{polar_unitary, ComplexMatrix};

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Square matrix with iid standard complex Gaussian entries.
pub fn random_gaussian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| gaussian_complex(rng))
}

/// Random Hermitian matrix (Hermitian part of a Gaussian draw).
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_gaussian(n, rng).hermitize()
}

/// Random PSD matrix G†G.
pub fn random_psd(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian(n, rng);
    g.adjoint().mul(&g).hermitize()
}

/// Random input state: G†G normalized to unit trace.
pub fn random_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    loop {
        let a = random_psd(n, rng);
        let tr = a.trace().re;
        if tr <= 1e-12 {
            continue; // vanishing draw; essentially impossible, retry
        }
        if let Ok(d) = DensityMatrix::new(a.scale(1.0 / tr)) {
            return d;
        }
    }
}

/// Random detector Gram: G†G rescaled to a unit diagonal
/// (S_jk = A_jk/√(A_jj A_kk), a congruence so positivity is preserved).
pub fn random_detector_gram(n: usize, rng: &mut impl Rng) -> DetectorGram {
    loop {
        let a = random_psd(n, rng);
        let diag: Vec<f64> = (0..n).map(|j| a[(j, j)].re).collect();
        if diag.iter().any(|&d| d <= 1e-12) {
            continue;
        }
        let s = ComplexMatrix::from_fn(n, |j, k| {
            if j == k {
                Complex64::ONE
            } else {
                a[(j, k)] / (diag[j] * diag[k]).sqrt()
            }
        });
        if let Ok(g) = DetectorGram::new(s) {
            return g;
        }
    }
}

/// Random phase table, entries uniform in [0, 2π).
pub fn random_phase_set(n: usize, rng: &mut impl Rng) -> PhaseSet {
    let phases: Vec<f64> = (0..n * n)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    PhaseSet::new(n, phases).expect("finite uniform phases are always valid")
}

/// Haar-style random unitary: polar factor of a Gaussian draw.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        if let Ok(u) = polar_unitary(&random_gaussian(n, rng), 1e-12) {
            return u;
        }
    }
}

/// Random normalized pure-state vectors in dimension `dim`.
pub fn random_pure_states(dim: usize, count: usize, rng: &mut impl Rng) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| loop {
            let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-9 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        })
        .collect()
}

/// Random prior vector (normalized exponentials — flat Dirichlet).
pub fn random_priors(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..count)
            .map(|_| -rng.gen_range(f64::MIN_POSITIVE..1.0_f64).ln())
            .collect();
        let sum: f64 = raw.iter().sum();
        if sum > 1e-12 {
            return raw.into_iter().map(|p| p / sum).collect();
        }
    }
}

/// Pure-state density matrix |v⟩⟨v| from a normalized vector.
pub fn pure_density(v: &[Complex64]) -> Result<DensityMatrix> {
    DensityMatrix::new(ComplexMatrix::outer(v, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samplers_are_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(
            random_density(4, &mut a).matrix().entries(),
            random_density(4, &mut b).matrix().entries()
        );
        assert_eq!(
            random_detector_gram(3, &mut a).matrix().entries(),
            random_detector_gram(3, &mut b).matrix().entries()
        );
    }

    #[test]
    fn priors_normalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_priors(5, &mut rng);
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(p.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn pure_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for v in random_pure_states(4, 8, &mut rng) {
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() <= 1e-12);
        }
    }
}

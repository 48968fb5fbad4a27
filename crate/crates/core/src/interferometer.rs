//! States of the n-port interferometer with path detectors.
//!
//! The particle enters in a state ρ = Σ ρ_jk |j⟩⟨k| over the path basis; each
//! arm j couples to a detector state |η_j⟩, represented throughout only by
//! the Gram matrix S_jk = ⟨η_j|η_k⟩; the House applies one of n diagonal
//! phase unitaries U_r = Σ_j e^{iφ_r^j}|j⟩⟨j|. This module builds the
//! post-interaction joint state
//!
//! > ρ_r^{AB} = Σ_jk e^{i(φ_r^j−φ_r^k)} ρ_jk |j⟩⟨k| ⊗ |η_j⟩⟨η_k|,
//!
//! its particle-side reduction ρ_r (entry (j,k) carries the factor S_kj —
//! the convention is pinned by the partial-trace consistency test), the
//! normalized coherence X = (1/n)Σ_{j≠k}|ρ_jk S_kj|, and the phase-guessing
//! bound P_ph ≤ X + 1/n.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, psd_sqrt, tol, ComplexMatrix};

/// Off-diagonal magnitude slack for the positivity consequence
/// `|ρ_jk| ≤ √(ρ_jj ρ_kk)`.
const DENSITY_OFFDIAG_SLACK: f64 = 1e-10;

/// Hermitian, PSD, trace-one complex matrix.
///
/// Houses the input state ρ, the reduced states ρ_r, and the joint states
/// ρ_r^{AB} (whose dimension is then n²).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix: Hermitian and trace-one within 1e−10,
    /// PSD (min eigenvalue ≥ −1e−10, hybrid-scaled), finite entries, and
    /// `|ρ_jk| ≤ √(ρ_jj ρ_kk)` up to slack.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.check_finite("density matrix")?;
        let scale = tol::hybrid(mat.frob_norm());
        let herm = mat.herm_residual();
        if herm > tol::DENSITY_HERM * scale {
            return Err(Error::NotHermitian {
                residual: herm,
                tol: tol::DENSITY_HERM * scale,
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::DENSITY_TRACE || tr.im.abs() > tol::DENSITY_TRACE {
            return Err(Error::OutOfRange {
                name: "trace",
                value: tr.re,
                lo: 1.0 - tol::DENSITY_TRACE,
                hi: 1.0 + tol::DENSITY_TRACE,
            });
        }
        let eig = herm_eig(&mat)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tol::PSD_FLOOR * scale {
            return Err(Error::NotPsd { min_eig: min });
        }
        let n = mat.dim();
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let bound = (mat[(j, j)].re.max(0.0) * mat[(k, k)].re.max(0.0)).sqrt();
                if mat[(j, k)].norm() > bound + DENSITY_OFFDIAG_SLACK {
                    return Err(Error::OutOfRange {
                        name: "off-diagonal magnitude",
                        value: mat[(j, k)].norm(),
                        lo: 0.0,
                        hi: bound,
                    });
                }
            }
        }
        Ok(Self { mat })
    }

    /// Project an approximately-Hermitian matrix to the closest valid
    /// density matrix: hermitize, clamp negative eigenvalues to zero,
    /// renormalize the trace.
    pub fn project(mat: &ComplexMatrix) -> Result<Self> {
        let eig = herm_eig(&mat.hermitize())?;
        let clamped = eig.apply_spectral(|x| x.max(0.0)).hermitize();
        let tr = clamped.trace().re;
        if tr <= f64::MIN_POSITIVE {
            return Err(Error::DegenerateEnsemble {
                detail: "projection target has zero trace".into(),
            });
        }
        Self::new(clamped.scale(1.0 / tr))
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Entry (j, k).
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.mat[(j, k)]
    }

    /// Diagonal (populations) as real numbers.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.mat[(j, j)].re).collect()
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// PSD unit-diagonal matrix of detector overlaps S_jk = ⟨η_j|η_k⟩.
///
/// The detector states enter every formula only through these overlaps, so
/// the Gram matrix is their only representation; explicit vectors, when a
/// formula needs them, are synthesized deterministically by
/// [`detector_vectors`].
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorGram {
    mat: ComplexMatrix,
}

impl DetectorGram {
    /// Validate and wrap: Hermitian, PSD, diagonal exactly 1 (inputs within
    /// 1e−10 are snapped), off-diagonal magnitudes ≤ 1.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.check_finite("detector gram")?;
        let scale = tol::hybrid(mat.frob_norm());
        let herm = mat.herm_residual();
        if herm > tol::DENSITY_HERM * scale {
            return Err(Error::NotHermitian {
                residual: herm,
                tol: tol::DENSITY_HERM * scale,
            });
        }
        let n = mat.dim();
        let mut snapped = mat;
        for j in 0..n {
            let d = snapped[(j, j)];
            if (d.re - 1.0).abs() > tol::GRAM_UNIT_DIAG || d.im.abs() > tol::GRAM_UNIT_DIAG {
                return Err(Error::OutOfRange {
                    name: "gram diagonal",
                    value: d.re,
                    lo: 1.0 - tol::GRAM_UNIT_DIAG,
                    hi: 1.0 + tol::GRAM_UNIT_DIAG,
                });
            }
            snapped[(j, j)] = Complex64::ONE;
        }
        for j in 0..n {
            for k in 0..n {
                if j != k && snapped[(j, k)].norm() > 1.0 + 1e-12 {
                    return Err(Error::OutOfRange {
                        name: "gram overlap magnitude",
                        value: snapped[(j, k)].norm(),
                        lo: 0.0,
                        hi: 1.0,
                    });
                }
            }
        }
        let eig = herm_eig(&snapped)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tol::PSD_FLOOR * scale {
            return Err(Error::NotPsd { min_eig: min });
        }
        Ok(Self { mat: snapped })
    }

    /// Orthogonal detectors: S = I.
    pub fn identity(n: usize) -> Result<Self> {
        check_dim(n)?;
        Self::new(ComplexMatrix::identity(n))
    }

    /// Identical detectors: S_jk = 1 everywhere.
    pub fn all_ones(n: usize) -> Result<Self> {
        check_dim(n)?;
        Self::new(ComplexMatrix::from_fn(n, |_, _| Complex64::ONE))
    }

    /// Constant real overlap s off the diagonal (PSD for s ∈ [0, 1]).
    pub fn constant_overlap(n: usize, s: f64) -> Result<Self> {
        check_dim(n)?;
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange {
                name: "overlap",
                value: s,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Self::new(ComplexMatrix::from_fn(n, |j, k| {
            if j == k {
                Complex64::ONE
            } else {
                Complex64::new(s, 0.0)
            }
        }))
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Entry (j, k) = ⟨η_j|η_k⟩.
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.mat[(j, k)]
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// The n House phase sets: `phases[r][j] = φ_r^j` in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSet {
    n: usize,
    phases: Vec<f64>, // row-major, index r*n + j
}

impl PhaseSet {
    /// Validate a full n×n phase table (row-major), finite entries.
    pub fn new(n: usize, phases: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if phases.len() != n * n {
            return Err(Error::DimMismatch {
                left: n * n,
                right: phases.len(),
            });
        }
        if !phases.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite {
                context: "phase set",
            });
        }
        Ok(Self { n, phases })
    }

    /// Number of paths (and of phase sets).
    pub fn n(&self) -> usize {
        self.n
    }

    /// φ_r^j.
    pub fn get(&self, r: usize, j: usize) -> f64 {
        self.phases[r * self.n + j]
    }

    /// Row r as a slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.phases[r * self.n..(r + 1) * self.n]
    }

    /// Row-major phase table.
    pub fn entries(&self) -> &[f64] {
        &self.phases
    }

    /// Whether this is the canonical set φ_r^j = 2πrj/n within 1e−12.
    pub fn is_canonical(&self) -> bool {
        let n = self.n;
        (0..n).all(|r| {
            (0..n).all(|j| {
                (self.get(r, j) - TAU * (r * j) as f64 / n as f64).abs() <= 1e-12
            })
        })
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDim { got: n, min: 2 })
    } else {
        Ok(())
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::DimMismatch { left: a, right: b })
    } else {
        Ok(())
    }
}

fn check_index(r: usize, n: usize) -> Result<()> {
    if r >= n {
        Err(Error::IndexOutOfRange { index: r, dim: n })
    } else {
        Ok(())
    }
}

/// The maximally coherent input (1/√n)Σ_j|j⟩: all entries 1/n.
pub fn maximally_coherent(n: usize) -> Result<DensityMatrix> {
    check_dim(n)?;
    let v = Complex64::new(1.0 / n as f64, 0.0);
    DensityMatrix::new(ComplexMatrix::from_fn(n, |_, _| v))
}

/// The canonical phase sets φ_r^j = 2πrj/n (row 0 is all zeros).
pub fn canonical_phases(n: usize) -> Result<PhaseSet> {
    check_dim(n)?;
    let mut phases = vec![0.0; n * n];
    for r in 0..n {
        for j in 0..n {
            phases[r * n + j] = TAU * (r * j) as f64 / n as f64;
        }
    }
    PhaseSet::new(n, phases)
}

/// The diagonal phase unitary U_r = Σ_j e^{iφ_r^j}|j⟩⟨j|.
pub fn phase_unitary(p: &PhaseSet, r: usize) -> Result<ComplexMatrix> {
    check_index(r, p.n())?;
    let diag: Vec<Complex64> = p
        .row(r)
        .iter()
        .map(|&phi| Complex64::from_polar(1.0, phi))
        .collect();
    Ok(ComplexMatrix::from_diag(&diag))
}

/// Deterministic detector-state vectors: columns of the Hermitian square
/// root F = √S, so that ⟨f_j|f_k⟩ = (F†F)_jk = S_jk. Any factor S = F†F
/// would do; the Hermitian root is chosen for determinism.
pub fn detector_vectors(s: &DetectorGram) -> Result<Vec<Vec<Complex64>>> {
    let f = psd_sqrt(s.matrix())?;
    Ok((0..s.dim()).map(|j| f.column(j)).collect())
}

/// The joint particle–detector state after phases and the controlled
/// interaction: ρ_r^{AB} = Σ_jk e^{i(φ_r^j−φ_r^k)} ρ_jk |j⟩⟨k|⊗|η_j⟩⟨η_k|.
/// Output dimension n²; the composite index is (j, b) = j·n + b.
pub fn joint_state(
    rho: &DensityMatrix,
    s: &DetectorGram,
    p: &PhaseSet,
    r: usize,
) -> Result<DensityMatrix> {
    let n = rho.dim();
    check_same_dim(n, s.dim())?;
    check_same_dim(n, p.n())?;
    check_index(r, n)?;
    let vectors = detector_vectors(s)?;
    let mut out = ComplexMatrix::zeros(n * n);
    for j in 0..n {
        for k in 0..n {
            let coeff = Complex64::from_polar(1.0, p.get(r, j) - p.get(r, k)) * rho.entry(j, k);
            if coeff == Complex64::ZERO {
                continue;
            }
            for b in 0..n {
                let left = coeff * vectors[j][b];
                for c in 0..n {
                    out[(j * n + b, k * n + c)] = left * vectors[k][c].conj();
                }
            }
        }
    }
    DensityMatrix::new(out)
}

/// The particle-side reduced state ρ_r: entry (j, k) =
/// e^{i(φ_r^j−φ_r^k)} ρ_jk S_kj (equal to the partial trace of
/// [`joint_state`] over the detector factor).
pub fn reduced_state(
    rho: &DensityMatrix,
    s: &DetectorGram,
    p: &PhaseSet,
    r: usize,
) -> Result<DensityMatrix> {
    let n = rho.dim();
    check_same_dim(n, s.dim())?;
    check_same_dim(n, p.n())?;
    check_index(r, n)?;
    let out = ComplexMatrix::from_fn(n, |j, k| {
        Complex64::from_polar(1.0, p.get(r, j) - p.get(r, k)) * rho.entry(j, k) * s.entry(k, j)
    });
    DensityMatrix::new(out)
}

/// The normalized coherence of the reduced states:
/// X = (1/n) Σ_{j≠k} |ρ_jk S_kj| ∈ [0, (n−1)/n]. Phases cancel in the
/// absolute values, so X is independent of the phase set.
pub fn coherence_x(rho: &DensityMatrix, s: &DetectorGram) -> Result<f64> {
    let n = rho.dim();
    check_same_dim(n, s.dim())?;
    let mut sum = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                sum += (rho.entry(j, k) * s.entry(k, j)).norm();
            }
        }
    }
    Ok(sum / n as f64)
}

/// Upper bound on the phases-game success probability: P_ph ≤ X + 1/n.
pub fn pph_upper(rho: &DensityMatrix, s: &DetectorGram) -> Result<f64> {
    let n = rho.dim();
    Ok(coherence_x(rho, s)? + 1.0 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn maximally_coherent_entries_and_trace() {
        let rho = maximally_coherent(2).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                assert!((rho.entry(j, k) - c(0.5, 0.0)).norm() <= 1e-15);
            }
        }
        let rho4 = maximally_coherent(4).unwrap();
        assert!((rho4.entry(3, 1) - c(0.25, 0.0)).norm() <= 1e-15);
        for n in 2..=8 {
            let tr = maximally_coherent(n).unwrap().matrix().trace();
            assert!((tr.re - 1.0).abs() <= 1e-12 && tr.im.abs() <= 1e-15);
        }
        assert!(matches!(
            maximally_coherent(1),
            Err(Error::InvalidDim { .. })
        ));
    }

    #[test]
    fn canonical_phase_rows() {
        let p2 = canonical_phases(2).unwrap();
        assert_eq!(p2.row(0), &[0.0, 0.0]);
        assert!((p2.get(1, 0)).abs() <= 1e-15);
        assert!((p2.get(1, 1) - PI).abs() <= 1e-15);
        let p4 = canonical_phases(4).unwrap();
        let want = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (j, w) in want.iter().enumerate() {
            assert!((p4.get(1, j) - w).abs() <= 1e-15);
        }
        for n in 2..=7 {
            let p = canonical_phases(n).unwrap();
            assert!(p.row(0).iter().all(|&x| x == 0.0));
            assert!(p.is_canonical());
        }
    }

    #[test]
    fn phase_unitary_values() {
        let p = canonical_phases(2).unwrap();
        let u0 = phase_unitary(&p, 0).unwrap();
        assert!(u0.sub(&ComplexMatrix::identity(2)).frob_norm() <= 1e-15);
        let u1 = phase_unitary(&p, 1).unwrap();
        assert!((u1[(0, 0)] - c(1.0, 0.0)).norm() <= 1e-15);
        assert!((u1[(1, 1)] - c(-1.0, 0.0)).norm() <= 1e-12);
        // Unitarity for a random set.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ps = sample::random_phase_set(5, &mut rng);
        let u = phase_unitary(&ps, 3).unwrap();
        let resid = u.adjoint().mul(&u).sub(&ComplexMatrix::identity(5)).frob_norm();
        assert!(resid <= 1e-12);
        assert!(matches!(
            phase_unitary(&p, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn reduced_state_frozen_example() {
        // n=2, maximally coherent, S₀₁ = 0.5, r=0 → [[.5, .25], [.25, .5]].
        let rho = maximally_coherent(2).unwrap();
        let s = DetectorGram::constant_overlap(2, 0.5).unwrap();
        let p = canonical_phases(2).unwrap();
        let red = reduced_state(&rho, &s, &p, 0).unwrap();
        assert!((red.entry(0, 0) - c(0.5, 0.0)).norm() <= 1e-12);
        assert!((red.entry(0, 1) - c(0.25, 0.0)).norm() <= 1e-12);
        assert!((red.entry(1, 0) - c(0.25, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn reduced_state_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 4;
        let p = canonical_phases(n).unwrap();
        // Diagonal input: no coherences to dephase, any r and S.
        let diag = DensityMatrix::new(ComplexMatrix::from_diag(&[
            c(0.4, 0.0),
            c(0.3, 0.0),
            c(0.2, 0.0),
            c(0.1, 0.0),
        ]))
        .unwrap();
        let s = sample::random_detector_gram(n, &mut rng);
        for r in 0..n {
            let red = reduced_state(&diag, &s, &p, r).unwrap();
            assert!(red.matrix().sub(diag.matrix()).frob_norm() <= 1e-12);
        }
        // r=0 with identical detectors returns ρ itself.
        let rho = sample::random_density(n, &mut rng);
        let ones = DetectorGram::all_ones(n).unwrap();
        let red = reduced_state(&rho, &ones, &p, 0).unwrap();
        assert!(red.matrix().sub(rho.matrix()).frob_norm() <= 1e-12);
        // Orthogonal detectors decohere fully.
        let id = DetectorGram::identity(n).unwrap();
        let red = reduced_state(&rho, &id, &p, 2).unwrap();
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    assert!(red.entry(j, k).norm() <= 1e-14);
                } else {
                    assert!((red.entry(j, j) - rho.entry(j, j)).norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn joint_reduces_to_conjugated_input_for_identical_detectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 3;
        let rho = sample::random_density(n, &mut rng);
        let ones = DetectorGram::all_ones(n).unwrap();
        let p = canonical_phases(n).unwrap();
        for r in 0..n {
            let joint = joint_state(&rho, &ones, &p, r).unwrap();
            let back = joint.matrix().partial_trace_second(n).unwrap();
            let u = phase_unitary(&p, r).unwrap();
            let expect = u.mul(rho.matrix()).mul(&u.adjoint());
            assert!(back.sub(&expect).frob_norm() <= 1e-10);
        }
    }

    #[test]
    fn partial_trace_consistency_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..1000 {
            let n = 2 + trial % 5;
            let rho = sample::random_density(n, &mut rng);
            let s = sample::random_detector_gram(n, &mut rng);
            let p = sample::random_phase_set(n, &mut rng);
            let r = trial % n;
            let joint = joint_state(&rho, &s, &p, r).unwrap();
            let red = reduced_state(&rho, &s, &p, r).unwrap();
            let back = joint.matrix().partial_trace_second(n).unwrap();
            assert!(
                back.sub(red.matrix()).frob_norm() <= 1e-10,
                "partial-trace consistency failed at trial {trial}"
            );
        }
    }

    #[test]
    fn coherence_values() {
        let rho = maximally_coherent(4).unwrap();
        let ones = DetectorGram::all_ones(4).unwrap();
        assert!((coherence_x(&rho, &ones).unwrap() - 0.75).abs() <= 1e-12);
        let s = DetectorGram::constant_overlap(4, 0.6).unwrap();
        assert!((coherence_x(&rho, &s).unwrap() - 3.0 * 0.6 / 4.0).abs() <= 1e-12);
        let diag = DensityMatrix::new(ComplexMatrix::from_diag(&[
            c(0.5, 0.0),
            c(0.5, 0.0),
        ]))
        .unwrap();
        let s2 = DetectorGram::all_ones(2).unwrap();
        assert!(coherence_x(&diag, &s2).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn coherence_is_phase_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for trial in 0..50 {
            let n = 2 + trial % 5;
            let rho = sample::random_density(n, &mut rng);
            let s = sample::random_detector_gram(n, &mut rng);
            let p = sample::random_phase_set(n, &mut rng);
            let x = coherence_x(&rho, &s).unwrap();
            for r in 0..n {
                let red = reduced_state(&rho, &s, &p, r).unwrap();
                let mut sum = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        if j != k {
                            sum += red.entry(j, k).norm();
                        }
                    }
                }
                assert!((sum / n as f64 - x).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn pph_upper_values() {
        let diag = DensityMatrix::new(ComplexMatrix::from_diag(&[
            c(0.7, 0.0),
            c(0.3, 0.0),
        ]))
        .unwrap();
        let id = DetectorGram::identity(2).unwrap();
        assert!((pph_upper(&diag, &id).unwrap() - 0.5).abs() <= 1e-12);
        for n in 2..=8 {
            let rho = maximally_coherent(n).unwrap();
            let ones = DetectorGram::all_ones(n).unwrap();
            assert!((pph_upper(&rho, &ones).unwrap() - 1.0).abs() <= 1e-12);
        }
        // Constant overlap 2/3 at n=4: X = 3·(2/3)/4 = 0.5, bound 0.75.
        let rho = maximally_coherent(4).unwrap();
        let s = DetectorGram::constant_overlap(4, 2.0 / 3.0).unwrap();
        assert!((pph_upper(&rho, &s).unwrap() - 0.75).abs() <= 1e-12);
    }

    #[test]
    fn reduced_states_are_valid_densities() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..200 {
            let n = 2 + trial % 5;
            let rho = sample::random_density(n, &mut rng);
            let s = sample::random_detector_gram(n, &mut rng);
            let p = sample::random_phase_set(n, &mut rng);
            // Construction already validates (Hermitian, PSD, trace 1).
            let red = reduced_state(&rho, &s, &p, trial % n).unwrap();
            assert_eq!(red.dim(), n);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = maximally_coherent(2).unwrap();
        let s = DetectorGram::identity(3).unwrap();
        assert!(matches!(
            coherence_x(&rho, &s),
            Err(Error::DimMismatch { .. })
        ));
    }
}

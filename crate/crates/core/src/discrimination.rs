//! Minimum-error discrimination machinery.
//!
//! The *ways* game reduces to discriminating the pure detector states
//! {|η_j⟩} with priors ρ_jj; all discrimination-relevant data then sits in
//! the Gram matrix W_ij = √(ρ_ii ρ_jj)⟨η_i|η_j⟩, and the optimal success
//! probability is the nonconvex maximization
//!
//! > P_d = max_{B†B = W} Σ_i |B_ii|²,
//!
//! solved here by gradient ascent over the unitary fiber B = U√W
//! ([`maximize_gram_value`]). The *phases* game needs a general solver for
//! mixed-state ensembles ([`povm_fixed_point`]) together with the
//! pretty-good measurement as a constructive starting point ([`pgm`]).
//! Every reported optimum is backed by the Holevo optimality conditions via
//! [`certificate_residual`]: with Γ = Σ p_iρ_iΠ_i, optimality holds iff Γ is
//! Hermitian and Γ − p_jρ_j ⪰ 0 for all j; the residual measures failure of
//! both, and a residual r bounds the distance from the true optimum by
//! dim·r. The symmetric constant-overlap family has the closed form
//! [`symmetric_pd`], and [`continuity_probe`] measures the Lipschitz-type
//! sensitivity of P_d to ensemble perturbations.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::interferometer::{detector_vectors, reduced_state, DensityMatrix, DetectorGram, PhaseSet};
use crate::numerics::{herm_eig, polar_unitary, psd_pinv_sqrt, tol, ComplexMatrix};
use crate::sample;

/// Default number of ascent restarts for [`maximize_gram_value`].
pub const GRAM_RESTARTS: usize = 32;
/// Default iteration cap for [`povm_fixed_point`].
pub const FIXED_POINT_MAX_ITER: usize = 10_000;
/// Certificate recomputation stride inside iterative solvers.
const CERT_EVERY: usize = 5;
/// Iteration cap for a single ascent restart and for the polish pass.
const ASCENT_MAX_ITER: usize = 2_000;

/// Prior-weighted list of states to be discriminated.
#[derive(Clone, Debug)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    /// Validate: equal non-empty lengths, equal state dimensions,
    /// nonnegative priors summing to 1 (inputs within 1e−9 are
    /// renormalized to an exact unit sum).
    pub fn new(priors: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if priors.is_empty() {
            return Err(Error::InvalidDim { got: 0, min: 1 });
        }
        if priors.len() != states.len() {
            return Err(Error::DimMismatch {
                left: priors.len(),
                right: states.len(),
            });
        }
        let dim = states[0].dim();
        for st in &states {
            if st.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: st.dim(),
                });
            }
        }
        let mut priors = priors;
        for p in priors.iter_mut() {
            if *p < -1e-15 || !p.is_finite() {
                return Err(Error::OutOfRange {
                    name: "prior",
                    value: *p,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            *p = p.max(0.0);
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(Error::OutOfRange {
                name: "prior sum",
                value: sum,
                lo: 1.0 - tol::PROB_SUM,
                hi: 1.0 + tol::PROB_SUM,
            });
        }
        for p in priors.iter_mut() {
            *p /= sum;
        }
        Ok(Self { priors, states })
    }

    /// The ways-game ensemble of a configuration: detector states |η_j⟩
    /// (synthesized from the Gram matrix) with priors ρ_jj.
    pub fn detector_ensemble(rho: &DensityMatrix, s: &DetectorGram) -> Result<Self> {
        if rho.dim() != s.dim() {
            return Err(Error::DimMismatch {
                left: rho.dim(),
                right: s.dim(),
            });
        }
        let vectors = detector_vectors(s)?;
        let states = vectors
            .iter()
            .map(|v| sample::pure_density(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rho.diagonal(), states)
    }

    /// The phases-game ensemble: reduced states ρ_r, each with prior 1/n.
    pub fn phases_ensemble(
        rho: &DensityMatrix,
        s: &DetectorGram,
        p: &PhaseSet,
    ) -> Result<Self> {
        let n = rho.dim();
        let states = (0..n)
            .map(|r| reduced_state(rho, s, p, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vec![1.0 / n as f64; n], states)
    }

    /// Number of ensemble members.
    pub fn len(&self) -> usize {
        self.priors.len()
    }

    /// True when the ensemble has no members (constructor forbids it).
    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Prior of member i.
    pub fn prior(&self, i: usize) -> f64 {
        self.priors[i]
    }

    /// All priors.
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// State of member i.
    pub fn state(&self, i: usize) -> &DensityMatrix {
        &self.states[i]
    }

    /// Prior-weighted states p_iρ_i.
    fn weighted(&self) -> Vec<ComplexMatrix> {
        self.priors
            .iter()
            .zip(&self.states)
            .map(|(&p, st)| st.matrix().scale(p))
            .collect()
    }
}

/// A measurement: positive operators summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    /// Validate: non-empty, equal dimensions, each element PSD within
    /// 1e−10, completeness ‖ΣΠ − I‖_F ≤ 1e−9.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidDim { got: 0, min: 1 });
        }
        let dim = elements[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for el in &elements {
            if el.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: el.dim(),
                });
            }
            let scale = tol::hybrid(el.frob_norm());
            let eig = herm_eig(el)?;
            let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
            if min < -tol::POVM_PSD * scale {
                return Err(Error::NotPsd { min_eig: min });
            }
            sum = sum.add(el);
        }
        let completeness = sum.sub(&ComplexMatrix::identity(dim)).frob_norm();
        if completeness > tol::POVM_COMPLETENESS {
            return Err(Error::OutOfRange {
                name: "povm completeness",
                value: completeness,
                lo: 0.0,
                hi: tol::POVM_COMPLETENESS,
            });
        }
        Ok(Self { elements })
    }

    /// Wrap solver iterates without re-validation: their completeness is
    /// exact by construction and their optimality is certified separately,
    /// while near-singular renormalizers can leave eigenvalue fuzz a strict
    /// positivity gate would spuriously reject.
    pub(crate) fn from_iterates(elements: Vec<ComplexMatrix>) -> Self {
        debug_assert!(!elements.is_empty());
        Self { elements }
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn projective(u: &ComplexMatrix) -> Result<Self> {
        let elements = (0..u.dim())
            .map(|k| {
                let col = u.column(k);
                ComplexMatrix::outer(&col, &col)
            })
            .collect();
        Self::new(elements)
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// True when there are no outcomes (constructor forbids it).
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Element i.
    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    /// All elements.
    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// Result of the Gram-fiber maximization: the Gram matrix, the maximizing
/// factor B = U√W with B†B = W (whose Σ|B_ii|² attains `value` within the
/// certificate tolerance), the certified success value, and the
/// optimality-certificate residual of the polished measurement.
#[derive(Clone, Debug)]
pub struct GramFactor {
    pub w: ComplexMatrix,
    pub b: ComplexMatrix,
    pub value: f64,
    pub certificate: f64,
}

/// Converged output of [`povm_fixed_point`].
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub povm: Povm,
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// `tr(A·B)` without forming the product.
pub(crate) fn trace_dot(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.dim();
    let mut s = Complex64::ZERO;
    for j in 0..n {
        for k in 0..n {
            s += a[(j, k)] * b[(k, j)];
        }
    }
    s
}

/// The (generalized) Gram matrix of the ways game:
/// W_ij = √(ρ_ii ρ_jj) S_ij. Hermitian PSD with tr W = 1 and W_ii = ρ_ii.
pub fn ways_gram(rho: &DensityMatrix, s: &DetectorGram) -> Result<ComplexMatrix> {
    let n = rho.dim();
    if n != s.dim() {
        return Err(Error::DimMismatch {
            left: n,
            right: s.dim(),
        });
    }
    let diag: Vec<f64> = rho.diagonal().iter().map(|&d| d.max(0.0)).collect();
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        (diag[i] * diag[j]).sqrt() * s.entry(i, j)
    }))
}

/// Closed-form optimal discrimination probability for n equiprobable pure
/// states with constant real overlap s:
/// P_d = [(√(1+(n−1)s) + (n−1)√(1−s)) / n]².
pub fn symmetric_pd(n: usize, s: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "overlap",
            value: s,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let nf = n as f64;
    let root = (1.0 + (nf - 1.0) * s).sqrt() + (nf - 1.0) * (1.0 - s).sqrt();
    Ok((root / nf).powi(2))
}

fn pgm_elements(weighted: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let dim = weighted[0].dim();
    let mut avg = ComplexMatrix::zeros(dim);
    for a in weighted {
        avg = avg.add(a);
    }
    let avg = avg.hermitize();
    if avg.frob_norm() <= 1e-15 {
        return Err(Error::DegenerateEnsemble {
            detail: "average state is zero".into(),
        });
    }
    let (inv_sqrt, support) = psd_pinv_sqrt(&avg)?;
    let remainder = ComplexMatrix::identity(dim)
        .sub(&support)
        .scale(1.0 / weighted.len() as f64);
    Ok(weighted
        .iter()
        .map(|a| inv_sqrt.mul(a).mul(&inv_sqrt).add(&remainder).hermitize())
        .collect())
}

/// Pretty-good measurement Π_i = ρ̄^{−1/2} p_iρ_i ρ̄^{−1/2} (pseudo-inverse
/// on the support of the average state ρ̄, remainder projector split equally
/// across outcomes) and its success probability — a constructive lower bound
/// on the optimum, and exactly optimal for equiprobable symmetric
/// pure-state ensembles.
pub fn pgm(e: &Ensemble) -> Result<(Povm, f64)> {
    let weighted = e.weighted();
    let elements = pgm_elements(&weighted)?;
    let value = success_of(&weighted, &elements);
    Ok((Povm::from_iterates(elements), value))
}

fn success_of(weighted: &[ComplexMatrix], elements: &[ComplexMatrix]) -> f64 {
    weighted
        .iter()
        .zip(elements)
        .map(|(a, el)| trace_dot(a, el).re)
        .sum()
}

/// Success probability of measuring ensemble `e` with POVM `m`:
/// Σ_i p_i tr(ρ_i Π_i).
pub fn povm_success(e: &Ensemble, m: &Povm) -> Result<f64> {
    if e.len() != m.len() {
        return Err(Error::DimMismatch {
            left: e.len(),
            right: m.len(),
        });
    }
    if e.dim() != m.dim() {
        return Err(Error::DimMismatch {
            left: e.dim(),
            right: m.dim(),
        });
    }
    Ok(success_of(&e.weighted(), m.elements()))
}

fn certificate_of(weighted: &[ComplexMatrix], elements: &[ComplexMatrix]) -> f64 {
    let dim = weighted[0].dim();
    let mut gamma = ComplexMatrix::zeros(dim);
    for (a, el) in weighted.iter().zip(elements) {
        gamma = gamma.add(&a.mul(el));
    }
    let herm = gamma.herm_residual();
    let gamma_h = gamma.hermitize();
    let mut max_neg = 0.0_f64;
    for a in weighted {
        let diff = gamma_h.sub(a);
        if let Ok(eig) = herm_eig(&diff) {
            let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
            max_neg = max_neg.max((-min).max(0.0));
        }
    }
    herm.max(max_neg)
}

/// Residual of the Holevo optimality conditions for measurement `m` on
/// ensemble `e`: max of ‖Γ − Γ†‖_F and the largest negative-part magnitude
/// of (Γ+Γ†)/2 − p_jρ_j, where Γ = Σ p_iρ_iΠ_i. A residual ≤ 1e−8
/// certifies global optimality at working precision.
pub fn certificate_residual(e: &Ensemble, m: &Povm) -> Result<f64> {
    if e.dim() != m.dim() {
        return Err(Error::DimMismatch {
            left: e.dim(),
            right: m.dim(),
        });
    }
    if e.len() != m.len() {
        return Err(Error::DimMismatch {
            left: e.len(),
            right: m.len(),
        });
    }
    Ok(certificate_of(&e.weighted(), m.elements()))
}

/// General minimum-error solver: the standard fixed-point iteration
/// Π_i ← R^{−1/2} (p_iρ_i) Π_i (p_iρ_i) R^{−1/2} with
/// R = Σ_j (p_jρ_jΠ_jp_jρ_j) and a support pseudo-inverse, started from the
/// pretty-good measurement and completed with the equal split of the
/// unsupported remainder. Iterates until [`certificate_residual`] ≤ `tol`
/// or `max_iter`; the success value is monotonically non-decreasing across
/// iterations (asserted in debug builds, within roundoff). On cap
/// exhaustion the best iterate travels inside [`Error::SolverNoConvergence`].
pub fn povm_fixed_point(e: &Ensemble, max_iter: usize, tol_cert: f64) -> Result<FixedPoint> {
    if !(tol_cert > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol_cert,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let weighted = e.weighted();
    let start = pgm_elements(&weighted)?;
    let (elements, value, residual, iterations) =
        fixed_point_core(&weighted, e.dim(), start, max_iter, tol_cert)?;
    if residual <= tol_cert {
        Ok(FixedPoint {
            povm: Povm::from_iterates(elements),
            value,
            residual,
            iterations,
        })
    } else {
        Err(Error::SolverNoConvergence {
            iterations,
            residual,
            value,
            povm: Box::new(Povm::from_iterates(elements)),
        })
    }
}

/// The fixed-point iteration itself, from a caller-supplied starting
/// measurement: returns `(elements, value, residual, iterations)` with the
/// certificate evaluated on the final iterate. Success never decreases
/// along the iteration (up to roundoff).
fn fixed_point_core(
    weighted: &[ComplexMatrix],
    dim: usize,
    start: Vec<ComplexMatrix>,
    max_iter: usize,
    tol_cert: f64,
) -> Result<(Vec<ComplexMatrix>, f64, f64, usize)> {
    let identity = ComplexMatrix::identity(dim);
    let mut elements = start;
    let mut value = success_of(weighted, &elements);
    let mut it = 0;
    loop {
        if it % CERT_EVERY == 0 {
            let residual = certificate_of(weighted, &elements);
            if residual <= tol_cert {
                return Ok((elements, value, residual, it));
            }
        }
        if it >= max_iter {
            break;
        }
        let mut r = ComplexMatrix::zeros(dim);
        let half: Vec<ComplexMatrix> = weighted
            .iter()
            .zip(&elements)
            .map(|(a, el)| {
                let ap = a.mul(el).mul(a);
                r = r.add(&ap);
                ap
            })
            .collect();
        let r = r.hermitize();
        if r.frob_norm() <= 1e-300 {
            break; // measurement orthogonal to every state; nothing to renormalize
        }
        let (inv_sqrt, _) = psd_pinv_sqrt(&r)?;
        let mut sum = ComplexMatrix::zeros(dim);
        let mut next: Vec<ComplexMatrix> = half
            .iter()
            .map(|ap| {
                let el = inv_sqrt.mul(ap).mul(&inv_sqrt).hermitize();
                sum = sum.add(&el);
                el
            })
            .collect();
        let remainder = identity.sub(&sum).scale(1.0 / elements.len() as f64);
        for el in next.iter_mut() {
            *el = el.add(&remainder).hermitize();
        }
        let next_value = success_of(weighted, &next);
        // Monotone in exact arithmetic. Near convergence on ill-conditioned
        // ensembles the pseudo-inverse's support decisions let the value
        // oscillate at the ~1e−9 scale (the certificate still bounds the
        // distance to optimum); genuine monotonicity bugs overshoot this
        // slack by orders of magnitude.
        debug_assert!(
            next_value >= value - 1e-6,
            "fixed-point success decreased: {value} -> {next_value}"
        );
        elements = next;
        value = next_value;
        it += 1;
    }
    let residual = certificate_of(weighted, &elements);
    Ok((elements, value, residual, it))
}

/// Certified-or-best discrimination value: like [`povm_fixed_point`] but a
/// cap exhaustion degrades to the best achieved (value, residual) pair
/// instead of an error. The value is always an achievable lower bound on
/// the optimum, and the residual bounds its distance from it by dim·residual.
pub fn min_error_value(e: &Ensemble, max_iter: usize, tol_cert: f64) -> Result<(f64, f64)> {
    match povm_fixed_point(e, max_iter, tol_cert) {
        Ok(fp) => Ok((fp.value, fp.residual)),
        Err(Error::SolverNoConvergence {
            value, residual, ..
        }) => Ok((value, residual)),
        Err(e) => Err(e),
    }
}

fn gram_objective(u: &ComplexMatrix, m: &ComplexMatrix) -> f64 {
    let b = u.mul(m);
    (0..b.dim()).map(|i| b[(i, i)].norm_sqr()).sum()
}

/// One ascent run over the unitary fiber from a given start.
///
/// Step candidates, in order: the closed-form alternating-maximization
/// update U ← polar(diag(d)·M†) with d = diag(UM) (the α→∞ member of the
/// retraction family, monotone by construction), then backtracking
/// retractions polar(U + αG) with α halved from 1. Stops after 5
/// consecutive improvements below 1e−12 or when no candidate improves.
fn gram_ascend(m: &ComplexMatrix, mut u: ComplexMatrix, max_iter: usize) -> (ComplexMatrix, f64) {
    let n = m.dim();
    let mut f = gram_objective(&u, m);
    let mut stall = 0;
    for _ in 0..max_iter {
        let b = u.mul(m);
        // G = diag(d)·M†, the Euclidean gradient direction of Σ|B_ii|².
        let g = ComplexMatrix::from_fn(n, |i, j| b[(i, i)] * m[(j, i)].conj());
        let mut improved = None;
        if let Ok(cand) = polar_unitary(&g, 1e-12) {
            let fc = gram_objective(&cand, m);
            if fc > f {
                improved = Some((cand, fc));
            }
        }
        if improved.is_none() {
            let mut alpha = 1.0;
            for _ in 0..24 {
                if let Ok(cand) = polar_unitary(&u.add(&g.scale(alpha)), 1e-12) {
                    let fc = gram_objective(&cand, m);
                    if fc > f {
                        improved = Some((cand, fc));
                        break;
                    }
                }
                alpha *= 0.5;
            }
        }
        match improved {
            None => break,
            Some((cand, fc)) => {
                let delta = fc - f;
                u = cand;
                f = fc;
                if delta < 1e-12 {
                    stall += 1;
                    if stall >= 5 {
                        break;
                    }
                } else {
                    stall = 0;
                }
            }
        }
    }
    (u, f)
}

/// Maximize Σ_i |B_ii|² over B = U√W with U unitary — the Gram-matrix form
/// of minimum-error discrimination for linearly independent pure states.
///
/// Restart 0 starts at the identity (whose value is exactly the PGM value);
/// restarts 1.. start at seeded random unitaries with per-restart streams
/// `seed ⊕ restart-index`, merged by maximum value with ties to the lowest
/// restart index. The best run is then polished until the optimality
/// certificate of the induced projective measurement reaches `tol_cert` (or
/// progress stops at machine precision). The returned value is an
/// achievable lower bound regardless; `certificate` tells how close to
/// optimal it provably is.
pub fn maximize_gram_value(
    w: &ComplexMatrix,
    restarts: usize,
    seed: u64,
    tol_cert: f64,
) -> Result<GramFactor> {
    let n = w.dim();
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    let tr = w.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::OutOfRange {
            name: "gram trace",
            value: tr.re,
            lo: 1.0 - 1e-9,
            hi: 1.0 + 1e-9,
        });
    }
    let eig = herm_eig(w)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol::PSD_FLOOR * tol::hybrid(w.frob_norm()) {
        return Err(Error::NotPsd { min_eig: min });
    }
    if min < 1e-10 {
        return Err(Error::Singular {
            detail: format!(
                "gram matrix smallest eigenvalue {min:.3e} below 1e-10; \
                 states linearly dependent — use the fixed-point solver"
            ),
        });
    }
    let m = eig.apply_spectral(|x| x.max(0.0).sqrt()).hermitize();

    let runs = restarts.max(1);
    let best = (0..runs)
        .into_par_iter()
        .map(|rs| {
            let start = if rs == 0 {
                ComplexMatrix::identity(n)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ rs as u64);
                sample::random_unitary(n, &mut rng)
            };
            let (u, f) = gram_ascend(&m, start, ASCENT_MAX_ITER);
            (rs, u, f)
        })
        .reduce_with(|a, b| {
            // Highest value wins; exact ties go to the lowest restart index.
            if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart runs");

    // The canonical ensemble of W: priors W_ii, states from the columns of
    // √W (in this basis the induced POVM is projective onto the rows of U†).
    let priors: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let states = (0..n)
        .map(|i| {
            let col = m.column(i);
            let norm = priors[i].sqrt();
            let normalized: Vec<Complex64> = col.iter().map(|z| z / norm).collect();
            sample::pure_density(&normalized)
        })
        .collect::<Result<Vec<_>>>()?;
    let ensemble = Ensemble::new(priors, states)?;
    let weighted = ensemble.weighted();

    // Ascent locates the maximizing fiber point to ~√ε; the fixed-point
    // iteration then polishes the induced projective measurement, whose
    // certificate contracts linearly where the ascent's only shrinks like
    // the square root of the remaining value gap.
    let u = best.1;
    let start = Povm::projective(&u.adjoint())?.elements().to_vec();
    let (_, value, certificate, _) =
        fixed_point_core(&weighted, n, start, FIXED_POINT_MAX_ITER, tol_cert)?;

    let b = u.mul(&m);
    let fiber_value: f64 = (0..n).map(|i| b[(i, i)].norm_sqr()).sum();
    debug_assert!(
        value >= fiber_value - 1e-10,
        "polish lost value: {fiber_value} -> {value}"
    );
    Ok(GramFactor {
        w: w.clone(),
        b,
        value,
        certificate,
    })
}

/// The Fourier-basis projective measurement χ_g[j] = e^{i2πgj/n}/√n.
///
/// When the House phases are canonical and every product ρ_jk S_kj is real
/// nonnegative, this measurement discriminates the reduced states ρ_r with
/// success probability exactly X + 1/n — the phases-game upper bound — and
/// is therefore optimal there.
pub fn fourier_phases_povm(n: usize) -> Result<Povm> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    let norm = 1.0 / (n as f64).sqrt();
    let u = ComplexMatrix::from_fn(n, |j, g| {
        Complex64::from_polar(norm, TAU * (g * j) as f64 / n as f64)
    });
    // Columns of u are the χ_g.
    Povm::projective(&u)
}

/// Empirical Lipschitz probe for P_d: maximum over seeded random
/// perturbations (magnitude ≤ eps, re-projected to valid densities) of
/// |ΔP_d| / ‖Δensemble‖, where ‖Δensemble‖ = Σ_i p_i‖σ_i − ρ_i‖_F.
/// Reports the ratio only; no universal constant is asserted.
pub fn continuity_probe(e: &Ensemble, eps: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let (base, _) = min_error_value(e, FIXED_POINT_MAX_ITER, tol::FIXED_POINT)?;
    let mut max_ratio = 0.0_f64;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let mut delta = 0.0;
        let mut states = Vec::with_capacity(e.len());
        for i in 0..e.len() {
            let h = sample::random_hermitian(e.dim(), &mut rng);
            let norm = h.frob_norm();
            if norm <= 1e-300 {
                states.push(e.state(i).clone());
                continue;
            }
            let scaled = h.scale(eps / norm);
            let sigma = DensityMatrix::project(&e.state(i).matrix().add(&scaled))?;
            delta += e.prior(i) * sigma.matrix().sub(e.state(i).matrix()).frob_norm();
            states.push(sigma);
        }
        if delta <= 1e-13 {
            continue;
        }
        let perturbed = Ensemble::new(e.priors().to_vec(), states)?;
        let (value, _) = min_error_value(&perturbed, FIXED_POINT_MAX_ITER, tol::FIXED_POINT)?;
        max_ratio = max_ratio.max((value - base).abs() / delta);
    }
    Ok(max_ratio)
}

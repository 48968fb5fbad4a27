//! Dense complex matrix kernel.
//!
//! Everything upstream modules need from linear algebra lives here: a small
//! row-major complex matrix type, Hermitian eigendecomposition via cyclic
//! Jacobi rotations, the PSD square root (and its support pseudo-inverse),
//! and the unitary polar factor. Dimensions in this crate stay at desk scale
//! (n ≤ 32 paths, so composite dimensions ≤ n²), where O(d³)-per-sweep
//! Jacobi is both simple and robustly accurate.
//!
//! All tolerance constants are collected in [`tol`]; checks are
//! absolute–relative hybrids scaled by `max(1, ‖·‖_F)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance constants used across the crate, in one place.
///
/// Unless stated otherwise a tolerance `t` is applied in hybrid form:
/// a quantity `q` measured against a matrix `A` passes when
/// `q ≤ t · max(1, ‖A‖_F)` (see [`tol::hybrid`]).
pub mod tol {
    /// Hermicity precondition for the eigensolver: `‖A − A†‖_F` bound.
    pub const HERM_INPUT: f64 = 1e-9;
    /// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
    pub const EIG_OFFDIAG: f64 = 1e-12;
    /// Cap on cyclic Jacobi sweeps.
    pub const EIG_MAX_SWEEPS: usize = 100;
    /// Eigendecomposition reconstruction residual bound.
    pub const RECONSTRUCT: f64 = 1e-10;
    /// Eigenvalues above `−PSD_FLOOR` (scaled) are clamped to 0; below it,
    /// the matrix is rejected as indefinite.
    pub const PSD_FLOOR: f64 = 1e-10;
    /// `‖psd_sqrt(A)² − A‖_F` bound.
    pub const SQRT_RESIDUAL: f64 = 1e-8;
    /// Smallest singular value below which the polar factor is refused.
    pub const POLAR_SINGULAR: f64 = 1e-12;
    /// Unitarity residual `‖U†U − I‖_F` guaranteed by `polar_unitary`.
    pub const POLAR_UNITARITY: f64 = 1e-10;
    /// Relative eigenvalue cutoff defining the numerical support of a PSD
    /// matrix (pseudo-inverse and support projector).
    pub const SUPPORT_CUTOFF: f64 = 1e-12;
    /// Hermiticity bound for density matrices.
    pub const DENSITY_HERM: f64 = 1e-10;
    /// Trace-one bound for density matrices.
    pub const DENSITY_TRACE: f64 = 1e-10;
    /// Unit-diagonal bound for detector Gram matrices.
    pub const GRAM_UNIT_DIAG: f64 = 1e-10;
    /// PSD bound for POVM elements.
    pub const POVM_PSD: f64 = 1e-10;
    /// Completeness bound `‖ΣΠ − I‖_F` for POVMs.
    pub const POVM_COMPLETENESS: f64 = 1e-9;
    /// Acceptable deviation of ensemble prior sums (and of sampled
    /// probability vectors) from 1 before renormalization.
    pub const PROB_SUM: f64 = 1e-9;
    /// Prior sum deviation after renormalization.
    pub const PRIOR_SUM: f64 = 1e-12;
    /// Certificate residual at which a discrimination value is optimal.
    pub const CERTIFICATE: f64 = 1e-8;
    /// Default fixed-point solver certificate target.
    pub const FIXED_POINT: f64 = 1e-9;
    /// One-sided tolerance of the duality-region membership test.
    pub const REGION: f64 = 1e-9;
    /// Bound-violation threshold for soundness sweeps.
    pub const BOUND_CHECK: f64 = 1e-8;

    /// Hybrid scale: `max(1, s)`.
    #[inline]
    pub fn hybrid(s: f64) -> f64 {
        s.max(1.0)
    }
}

/// Dense square complex matrix, row-major.
///
/// Entry `(r, c)` lives at `data[r*dim + c]`. Arithmetic helpers panic on
/// dimension mismatch (they sit below the validated public operations, which
/// report [`Error::DimMismatch`] instead).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension (≥ 1).
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m[(j, j)] = Complex64::ONE;
        }
        m
    }

    /// Build entry-by-entry from a closure over `(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Diagonal matrix from complex entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (j, &d) in diag.iter().enumerate() {
            m[(j, j)] = d;
        }
        m
    }

    /// Validated constructor from nested rows (square, finite entries).
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidDim { got: 0, min: 1 });
        }
        let mut m = Self::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m.check_finite("matrix entries")?;
        Ok(m)
    }

    /// Validated constructor from separate real/imaginary row-major arrays.
    pub fn from_re_im(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDim { got: 0, min: 1 });
        }
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: dim * dim,
                right: re.len().max(im.len()),
            });
        }
        let data: Vec<Complex64> = re
            .iter()
            .zip(im)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        let m = Self { dim, data };
        m.check_finite("matrix entries")?;
        Ok(m)
    }

    /// Rank-one matrix `|u⟩⟨v|`, entry `(r, c) = u[r]·conj(v[c])`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product needs equal lengths");
        Self::from_fn(u.len(), |r, c| u[r] * v[c].conj())
    }

    /// Matrix dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entry slice.
    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Real and imaginary parts as separate row-major arrays.
    pub fn to_re_im(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.data.iter().map(|z| z.re).collect(),
            self.data.iter().map(|z| z.im).collect(),
        )
    }

    /// Error unless every entry is finite.
    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { context })
        }
    }

    /// Sum of two matrices.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Self { dim: self.dim, data }
    }

    /// Difference of two matrices.
    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self { dim: self.dim, data }
    }

    /// Real scalar multiple.
    pub fn scale(&self, k: f64) -> Self {
        let data = self.data.iter().map(|a| a * k).collect();
        Self { dim: self.dim, data }
    }

    /// Complex scalar multiple.
    pub fn scale_c(&self, k: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * k).collect();
        Self { dim: self.dim, data }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.data[c * self.dim + r].conj())
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitize(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |r, c| {
            0.5 * (self.data[r * n + c] + self.data[c * n + r].conj())
        })
    }

    /// Trace.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|j| self.data[j * self.dim + j]).sum()
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A − A†‖_F`, the Hermiticity residual.
    pub fn herm_residual(&self) -> f64 {
        self.sub(&self.adjoint()).frob_norm()
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in mul_vec");
        let n = self.dim;
        (0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Column `k` as a vector.
    pub fn column(&self, k: usize) -> Vec<Complex64> {
        assert!(k < self.dim, "column index out of range");
        (0..self.dim).map(|r| self.data[r * self.dim + k]).collect()
    }

    /// Kronecker product; composite index `(j, b) = j·rhs.dim + b`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Self::zeros(n * m);
        for j in 0..n {
            for k in 0..n {
                let a = self.data[j * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for b in 0..m {
                    for c in 0..m {
                        out[(j * m + b, k * m + c)] = a * rhs.data[b * m + c];
                    }
                }
            }
        }
        out
    }

    /// Partial trace over the second tensor factor of dimension
    /// `second_dim`; requires `dim = d₁ · second_dim`.
    pub fn partial_trace_second(&self, second_dim: usize) -> Result<Self> {
        if second_dim == 0 || self.dim % second_dim != 0 {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: second_dim,
            });
        }
        let d1 = self.dim / second_dim;
        let mut out = Self::zeros(d1);
        for j in 0..d1 {
            for k in 0..d1 {
                let mut s = Complex64::ZERO;
                for b in 0..second_dim {
                    s += self.data[(j * second_dim + b) * self.dim + (k * second_dim + b)];
                }
                out[(j, k)] = s;
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Hermitian eigendecomposition `A = V diag(λ) V†`.
///
/// Eigenvalues are sorted descending; `eigenvectors` holds the matching
/// eigenvectors as columns and is unitary within [`tol::RECONSTRUCT`].
#[derive(Clone, Debug)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    /// `V diag(f(λ)) V†` — spectral function application.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = v[(r, k)] * w;
                for c in 0..n {
                    out[(r, c)] += vr * v[(c, k)].conj();
                }
            }
        }
        out
    }

    /// Reassemble `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_spectral(|x| x)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The precondition `‖A − A†‖_F ≤ 1e−9·max(1,‖A‖_F)` is checked; the
/// iteration then runs on the Hermitian part. Each rotation first aligns the
/// phase of the pivot entry and then applies a real Jacobi rotation chosen by
/// the stable tangent formula, annihilating the pivot exactly. Sweeps stop
/// when the off-diagonal Frobenius norm falls below
/// `tol::EIG_OFFDIAG · max(1,‖A‖_F)`, capped at [`tol::EIG_MAX_SWEEPS`].
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEig> {
    let scale = tol::hybrid(a.frob_norm());
    let herm_res = a.herm_residual();
    if herm_res > tol::HERM_INPUT * scale {
        return Err(Error::NotHermitian {
            residual: herm_res,
            tol: tol::HERM_INPUT * scale,
        });
    }
    let n = a.dim();
    let mut b = a.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let target = tol::EIG_OFFDIAG * scale;
    // Entries this small are left untouched within a sweep: even n² of them
    // contribute at most a tenth of the stopping target.
    let skip = target / (10.0 * n as f64);

    let mut off = off_diagonal_norm(&b);
    let mut sweeps = 0;
    while off > target {
        if sweeps >= tol::EIG_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = b[(p, q)];
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                // Phase alignment: apq = r·e^{iφ}.
                let phase = apq / r;
                let app = b[(p, p)].re;
                let aqq = b[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Combined rotation G: G[p][p] = c·e^{iφ}, G[p][q] = s·e^{iφ},
                // G[q][p] = −s, G[q][q] = c. Apply B ← G†BG, V ← VG.
                let gpp = phase * c;
                let gpq = phase * s;
                for i in 0..n {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    b[(i, p)] = bp * gpp - bq * s;
                    b[(i, q)] = bp * gpq + bq * c;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * gpp - vq * s;
                    v[(i, q)] = vp * gpq + vq * c;
                }
                let gpp_c = gpp.conj();
                let gpq_c = gpq.conj();
                for j in 0..n {
                    let bp = b[(p, j)];
                    let bq = b[(q, j)];
                    b[(p, j)] = gpp_c * bp - s * bq;
                    b[(q, j)] = gpq_c * bp + c * bq;
                }
                // The pivot is annihilated by construction; pin it (and the
                // diagonal's imaginary round-off) to keep B exactly Hermitian.
                b[(p, q)] = Complex64::ZERO;
                b[(q, p)] = Complex64::ZERO;
                b[(p, p)] = Complex64::new(b[(p, p)].re, 0.0);
                b[(q, q)] = Complex64::new(b[(q, q)].re, 0.0);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&b);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let lambda: Vec<f64> = (0..n).map(|j| b[(j, j)].re).collect();
    order.sort_by(|&i, &j| lambda[j].partial_cmp(&lambda[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&j| lambda[j]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(b: &ComplexMatrix) -> f64 {
    let n = b.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += b[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian PSD square root.
///
/// Eigenvalues in `[−PSD_FLOOR·max(1,‖A‖_F), 0)` are treated as round-off
/// and clamped to zero; anything below the floor rejects the input as
/// genuinely indefinite.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    let floor = tol::PSD_FLOOR * tol::hybrid(a.frob_norm());
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .min_by(|x, y| x.partial_cmp(y).unwrap())
    {
        if min < -floor {
            return Err(Error::NotPsd { min_eig: min });
        }
    }
    Ok(eig.apply_spectral(|x| x.max(0.0).sqrt()).hermitize())
}

/// Support pseudo-inverse square root of a Hermitian PSD matrix.
///
/// Returns `(A^{−1/2} on support, support projector)`; eigenvalues at or
/// below `tol::SUPPORT_CUTOFF · λ_max` count as zero. A zero matrix yields a
/// pair of zero matrices.
pub fn psd_pinv_sqrt(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = herm_eig(a)?;
    let floor = tol::PSD_FLOOR * tol::hybrid(a.frob_norm());
    let max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -floor {
            return Err(Error::NotPsd { min_eig: min });
        }
    }
    let cutoff = tol::SUPPORT_CUTOFF * max.max(0.0);
    let inv_sqrt = eig
        .apply_spectral(|x| if x > cutoff && x > 0.0 { 1.0 / x.sqrt() } else { 0.0 })
        .hermitize();
    let support = eig
        .apply_spectral(|x| if x > cutoff && x > 0.0 { 1.0 } else { 0.0 })
        .hermitize();
    Ok((inv_sqrt, support))
}

/// Unitary polar factor of a nonsingular matrix.
///
/// Computes `U = A (A†A)^{−1/2}` spectrally, then polishes with
/// Newton–Schulz steps `U ← U(3I − U†U)/2` until `‖U†U − I‖_F ≤ tol`.
/// Among unitaries, `U` maximizes `Re tr(U† A)`.
pub fn polar_unitary(a: &ComplexMatrix, tol_unitary: f64) -> Result<ComplexMatrix> {
    if !(tol_unitary > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol_unitary,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let n = a.dim();
    let scale = tol::hybrid(a.frob_norm());
    let h = a.adjoint().mul(a).hermitize();
    let eig = herm_eig(&h)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let sigma_min = min.max(0.0).sqrt();
    if sigma_min <= tol::POLAR_SINGULAR * scale {
        return Err(Error::Singular {
            detail: format!(
                "smallest singular value {sigma_min:.3e} at or below {:.3e}",
                tol::POLAR_SINGULAR * scale
            ),
        });
    }
    let inv_sqrt = eig.apply_spectral(|x| 1.0 / x.max(f64::MIN_POSITIVE).sqrt());
    let mut u = a.mul(&inv_sqrt);
    let id = ComplexMatrix::identity(n);
    let target = tol_unitary.min(1e-12).max(1e-15);
    for _ in 0..30 {
        let gram = u.adjoint().mul(&u);
        let residual = gram.sub(&id).frob_norm();
        if residual <= target {
            return Ok(u);
        }
        // U(3I − U†U)/2
        u = u.mul(&id.scale(3.0).sub(&gram)).scale(0.5);
    }
    let residual = u.adjoint().mul(&u).sub(&id).frob_norm();
    if residual <= tol_unitary {
        Ok(u)
    } else {
        Err(Error::NoConvergence {
            iterations: 30,
            residual,
        })
    }
}

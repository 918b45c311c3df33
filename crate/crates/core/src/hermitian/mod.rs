//! Dense complex Hermitian linear algebra for dimensions up to 64.
//!
//! Everything downstream (states, measurements, SDP variables) is built on
//! [`HermitianOperator`]. Spectral functions go through the cyclic Jacobi
//! solver in [`jacobi`]; matrix storage and products use `nalgebra`.

mod jacobi;
pub(crate) mod random;

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use jacobi::{CONVERGENCE_TOL, MAX_SWEEPS};
pub use random::{random_density, random_unitary};

/// Dense complex matrix used for unitaries, Kraus operators and raw data.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Largest supported Hilbert-space dimension (six qubits).
pub const MAX_DIM: usize = 64;
/// Absolute tolerance for conjugate symmetry on ingestion.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative tolerance on negative eigenvalues for PSD checks.
pub const PSD_TOL: f64 = 1e-10;
/// Absolute tolerance on the trace of a density operator.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues at or below `SUPPORT_TOL * lambda_max` are treated as zero.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Eigenvalues at or below this floor are dropped from entropies.
pub const ENTROPY_FLOOR: f64 = 1e-14;

/// A complex square matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

/// Eigen-decomposition `H = V diag(lambda) V^dagger` with ascending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// A positive semi-definite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl HermitianOperator {
    /// Validates conjugate symmetry within [`HERMITIAN_TOL`] and stores the
    /// exactly symmetrized matrix `(M + M^dagger) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        let n = m.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if !worst.is_finite() || worst > HERMITIAN_TOL {
            return Err(Error::NotHermitian(worst));
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without checking. For internal results that are Hermitian
    /// up to rounding.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self { m: sym }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self {
            m: CMatrix::from_diagonal(&d),
        }
    }

    /// Builds the Hermitian matrix from a row-major list of real entries.
    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: rows.len(),
            });
        }
        Self::new(CMatrix::from_iterator(
            dim,
            dim,
            (0..dim * dim).map(|k| Complex64::new(rows[(k % dim) * dim + k / dim], 0.0)),
        ))
    }

    /// Rank-one operator `|v><v|` (no normalization).
    pub fn outer(v: &CVector) -> Self {
        Self::symmetrized(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr(self * other)`, real for two Hermitian operators.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self.m[(i, k)] * other.m[(k, i)]).re;
            }
        }
        acc
    }

    /// `v^dagger H v`.
    pub fn expectation(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.m * v)[(0, 0)].re
    }

    /// `K H K^dagger` for any (possibly rectangular) `K` with `dim` columns.
    pub fn conjugate_by(&self, k: &CMatrix) -> Result<Self> {
        Error::check_dim(self.dim(), k.ncols())?;
        Ok(Self::symmetrized(k * &self.m * k.adjoint()))
    }

    /// `A H A` for Hermitian `A`.
    pub fn sandwich(&self, outer: &HermitianOperator) -> Result<Self> {
        Error::check_dim(self.dim(), outer.dim())?;
        Ok(Self::symmetrized(&outer.m * &self.m * &outer.m))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            m: &self.m * Complex64::new(factor, 0.0),
        }
    }

    /// Largest absolute entry difference to `other`.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigen-decomposition via cyclic Jacobi.
    pub fn eig(&self) -> Result<Spectrum> {
        let (eigenvalues, eigenvectors) = jacobi::eigh(&self.m)?;
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eig()?.eigenvalues.last().unwrap())
    }

    /// PSD within `tol` relative to the largest eigenvalue magnitude.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        let spec = self.eig()?;
        Ok(spec.is_psd(tol))
    }

    /// `H^t` on the support of `H`; kernel directions stay zero. Requires PSD.
    pub fn power(&self, t: f64) -> Result<Self> {
        let spec = self.eig()?;
        spec.require_psd()?;
        let cutoff = spec.support_cutoff();
        Ok(spec.map(|l| if l > cutoff { l.powf(t) } else { 0.0 }))
    }

    /// Projector onto the support (eigenvalues above the shared support cutoff).
    pub fn support_projector(&self) -> Result<Self> {
        let spec = self.eig()?;
        let cutoff = spec.support_cutoff();
        Ok(spec.map(|l| if l > cutoff { 1.0 } else { 0.0 }))
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    /// Traces out subsystem `traced` of a tensor product with local dimensions `dims`.
    pub fn partial_trace(&self, dims: &[usize], traced: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        Error::check_dim(total, self.dim())?;
        if traced >= dims.len() {
            return Err(Error::invalid(
                "which",
                format!(
                    "subsystem {traced} out of range for {} subsystems",
                    dims.len()
                ),
            ));
        }
        let left: usize = dims[..traced].iter().product();
        let mid = dims[traced];
        let right: usize = dims[traced + 1..].iter().product();
        let out_dim = left * right;
        let mut out = CMatrix::zeros(out_dim, out_dim);
        for l1 in 0..left {
            for r1 in 0..right {
                for l2 in 0..left {
                    for r2 in 0..right {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..mid {
                            let i = (l1 * mid + k) * right + r1;
                            let j = (l2 * mid + k) * right + r2;
                            acc += self.m[(i, j)];
                        }
                        out[(l1 * right + r1, l2 * right + r2)] = acc;
                    }
                }
            }
        }
        Ok(Self::symmetrized(out))
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            m: &self.m - &rhs.m,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min() >= -tol * self.spectral_radius()
    }

    fn require_psd(&self) -> Result<()> {
        if self.is_psd(PSD_TOL) {
            Ok(())
        } else {
            Err(Error::NotPsd {
                min_eigenvalue: self.min(),
            })
        }
    }

    /// Eigenvalues at or below this value are kernel directions.
    pub fn support_cutoff(&self) -> f64 {
        SUPPORT_TOL * self.max().max(0.0)
    }

    /// Applies `f` to every eigenvalue: `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            if fl == 0.0 {
                continue;
            }
            let col = v.column(k);
            for j in 0..n {
                let cj = col[j].conj() * fl;
                for i in 0..n {
                    out[(i, j)] += col[i] * cj;
                }
            }
        }
        HermitianOperator::symmetrized(out)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|l| l)
    }
}

impl DensityOperator {
    /// Validates PSD within [`PSD_TOL`] and unit trace within [`TRACE_TOL`].
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if tr.is_nan() || (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        op.eig()?.require_psd()?;
        Ok(Self { op })
    }

    /// Accepts trace within `trace_tol` and rescales to unit trace.
    pub fn normalized(op: HermitianOperator, trace_tol: f64) -> Result<Self> {
        let tr = op.trace();
        if tr.is_nan() || (tr - 1.0).abs() > trace_tol {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(op.scale(1.0 / tr))
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(probs))
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n2 = psi.norm_squared();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::invalid("state", "state vector has zero norm"));
        }
        Self::new(HermitianOperator::outer(
            &(psi / Complex64::new(n2.sqrt(), 0.0)),
        ))
    }

    /// Computational basis state `|index><index|`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::invalid(
                "index",
                format!("{index} >= dimension {dim}"),
            ));
        }
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self::from_diagonal(&diag)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    /// `U rho U^dagger` for a unitary `U`.
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        Self::normalized(self.op.conjugate_by(u)?, 1e-9)
    }

    pub fn kron(&self, other: &DensityOperator) -> Self {
        Self {
            op: self.op.kron(&other.op),
        }
    }
}

impl AsRef<HermitianOperator> for DensityOperator {
    fn as_ref(&self) -> &HermitianOperator {
        &self.op
    }
}

impl AsRef<HermitianOperator> for HermitianOperator {
    fn as_ref(&self) -> &HermitianOperator {
        self
    }
}

/// Eigen-decomposition of `h`; see [`HermitianOperator::eig`].
pub fn eig_hermitian(h: &HermitianOperator) -> Result<Spectrum> {
    h.eig()
}

/// Pseudo-power of a PSD operator; see [`HermitianOperator::power`].
pub fn operator_power(h: &HermitianOperator, t: f64) -> Result<HermitianOperator> {
    h.power(t)
}

/// `rho << sigma`: every kernel eigenvector `v` of `sigma` (eigenvalue
/// `<= tol * lambda_max(sigma)`) has `v^dagger rho v <= tol`.
pub fn support_contained(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    tol: f64,
) -> Result<bool> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    let spec = sigma.eig()?;
    Ok(kernel_leak(rho, &spec, tol) <= tol)
}

/// Largest `v^dagger rho v` over kernel eigenvectors of `sigma` (zero when the
/// kernel is empty).
pub(crate) fn kernel_leak(rho: &HermitianOperator, sigma: &Spectrum, tol: f64) -> f64 {
    let cutoff = tol * sigma.max().max(0.0);
    sigma
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= cutoff)
        .map(|(k, _)| rho.expectation(&sigma.vector(k)))
        .fold(0.0, f64::max)
}

/// `||rho - sigma||_1`, the sum of absolute eigenvalues of the difference.
pub fn trace_distance(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    Ok((rho - sigma)
        .eig()?
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum())
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let spec = rho.operator().eig()?;
    Ok(spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > ENTROPY_FLOOR)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0))
}

pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    a.kron(b)
}

pub fn partial_trace(
    h: &HermitianOperator,
    dims: &[usize],
    traced: usize,
) -> Result<HermitianOperator> {
    h.partial_trace(dims, traced)
}

/// `||U^dagger U - I||_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

//! Dense complex operator algebra.
//!
//! Operators are column-major `DMatrix<Complex64>`. Vectorization is
//! column stacking, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square matrix of complex amplitudes.
pub type ComplexOperator = DMatrix<Complex64>;

/// `dim² × dim²` matrix acting on column-stacked operators.
pub type SuperOperatorMatrix = DMatrix<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const PSD_FLOOR: f64 = -1e-10;
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros in `x ln x`.
pub const LOG_CUTOFF: f64 = 1e-14;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> ComplexOperator {
    DMatrix::identity(dim, dim)
}

pub fn from_real_diagonal(values: &[f64]) -> ComplexOperator {
    let mut m = DMatrix::zeros(values.len(), values.len());
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = real(v);
    }
    m
}

/// `|i⟩⟨j|` in dimension `dim`.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> ComplexOperator {
    let mut m = DMatrix::zeros(dim, dim);
    m[(i, j)] = real(1.0);
    m
}

pub fn trace(m: &ComplexOperator) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Max-entry distance between two equally shaped matrices.
pub fn max_abs_diff(a: &ComplexOperator, b: &ComplexOperator) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexOperator) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `Tr(A† B)`, the Hilbert-Schmidt inner product.
pub fn hs_inner(a: &ComplexOperator, b: &ComplexOperator) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn check_square(m: &ComplexOperator) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

pub fn hermiticity_deviation(m: &ComplexOperator) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Checks Hermiticity against an absolute tolerance scaled by `max(1, ‖M‖_max)`.
pub fn check_hermitian(m: &ComplexOperator) -> Result<usize> {
    let n = check_square(m)?;
    let dev = hermiticity_deviation(m);
    if dev > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NonHermitianInput { deviation: dev });
    }
    Ok(n)
}

pub fn unitarity_deviation(u: &ComplexOperator) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenOrder {
    #[default]
    Descending,
    Ascending,
}

/// Real eigenvalues and unitary eigenbasis of a Hermitian operator.
///
/// Column `l` of `basis` is the eigenvector of `values[l]`.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    values: Vec<f64>,
    basis: ComplexOperator,
    order: EigenOrder,
    degenerate: bool,
}

impl HermitianSpectrum {
    /// Builds a spectrum from explicit parts, validating unitarity and ordering.
    pub fn from_parts(values: Vec<f64>, basis: ComplexOperator, order: EigenOrder) -> Result<Self> {
        let n = check_square(&basis)?;
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = unitarity_deviation(&basis);
        if dev > UNITARY_TOL {
            return Err(Error::NonUnitaryBasis { deviation: dev });
        }
        let sorted = values.windows(2).all(|w| match order {
            EigenOrder::Descending => w[0] >= w[1],
            EigenOrder::Ascending => w[0] <= w[1],
        });
        if !sorted {
            return Err(Error::InvalidModel(format!(
                "eigenvalues are not sorted {order:?}"
            )));
        }
        let degenerate = min_adjacent_gap(&values) <= DEGENERACY_TOL * scale_of(&values);
        Ok(Self {
            values,
            basis,
            order,
            degenerate,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> &ComplexOperator {
        &self.basis
    }

    pub fn order(&self) -> EigenOrder {
        self.order
    }

    /// True when two adjacent eigenvalues lie within the degeneracy tolerance.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn min_gap(&self) -> f64 {
        min_adjacent_gap(&self.values)
    }

    pub fn reconstruct(&self) -> ComplexOperator {
        let d: Vec<Complex64> = self.values.iter().map(|&v| real(v)).collect();
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.basis[(i, j)] * d[j]);
        scaled * self.basis.adjoint()
    }

    /// Applies `f` to the eigenvalues: `Σ f(μ_k) v_k v_k†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexOperator {
        let n = self.dim();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let scaled = DMatrix::from_fn(n, n, |i, j| self.basis[(i, j)] * fv[j]);
        scaled * self.basis.adjoint()
    }
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

fn min_adjacent_gap(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Eigendecomposition of a Hermitian operator with eigenvalues sorted per `order`.
///
/// Each eigenvector is phase-fixed so that its largest-magnitude component is
/// real and positive, which makes the output deterministic.
pub fn hermitian_eigendecompose(m: &ComplexOperator, order: EigenOrder) -> Result<HermitianSpectrum> {
    let n = check_hermitian(m)?;
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        match order {
            EigenOrder::Descending => y.total_cmp(&x),
            EigenOrder::Ascending => x.total_cmp(&y),
        }
    });

    let values: Vec<f64> = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut basis = DMatrix::zeros(n, n);
    for (col, &k) in idx.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in v.iter().enumerate() {
            // strict comparison keeps the first of equally large components
            if z.norm() > best + 1e-12 {
                best = z.norm();
                pivot = i;
            }
        }
        let phase = v[pivot] / v[pivot].norm();
        for i in 0..n {
            basis[(i, col)] = v[i] * phase.conj();
        }
    }
    let degenerate = min_adjacent_gap(&values) <= DEGENERACY_TOL * scale_of(&values);
    Ok(HermitianSpectrum {
        values,
        basis,
        order,
        degenerate,
    })
}

/// Eigenvalues only, sorted per `order`.
pub fn hermitian_eigenvalues(m: &ComplexOperator, order: EigenOrder) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    Ok(hermitian_eigenvalues_unchecked(m, order))
}

pub(crate) fn hermitian_eigenvalues_unchecked(m: &ComplexOperator, order: EigenOrder) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    match order {
        EigenOrder::Descending => values.sort_by(|a, b| b.total_cmp(a)),
        EigenOrder::Ascending => values.sort_by(|a, b| a.total_cmp(b)),
    }
    values
}

/// Column-stacking vectorization.
pub fn vectorize(x: &ComplexOperator) -> DVector<Complex64> {
    DVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &DVector<Complex64>, dim: usize) -> Result<ComplexOperator> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: v.len(),
        });
    }
    Ok(DMatrix::from_column_slice(dim, dim, v.as_slice()))
}

pub fn kron(a: &ComplexOperator, b: &ComplexOperator) -> ComplexOperator {
    a.kronecker(b)
}

/// Superoperator of `X ↦ A X B`, i.e. `Bᵀ ⊗ A`.
pub fn sandwich(a: &ComplexOperator, b: &ComplexOperator) -> SuperOperatorMatrix {
    kron(&b.transpose(), a)
}

/// `|M| = Σ |μ_k| v_k v_k†` for Hermitian `M`.
pub fn matrix_abs(m: &ComplexOperator) -> Result<ComplexOperator> {
    let spec = hermitian_eigendecompose(m, EigenOrder::Descending)?;
    Ok(spec.map_values(f64::abs))
}

/// Spectral logarithm of a positive semidefinite operator.
///
/// Eigenvalues below [`LOG_CUTOFF`] are excluded from `log` (set to zero there)
/// and collected into `kernel`, the projector onto the numerical null space.
#[derive(Debug, Clone)]
pub struct PsdLog {
    pub log: ComplexOperator,
    pub kernel: ComplexOperator,
}

pub fn matrix_log_psd(m: &ComplexOperator) -> Result<PsdLog> {
    let spec = hermitian_eigendecompose(m, EigenOrder::Descending)?;
    if let Some(&min) = spec.values().last() {
        if min < PSD_FLOOR {
            return Err(Error::NegativeEigenvalue { value: min });
        }
    }
    let log = spec.map_values(|v| if v > LOG_CUTOFF { v.ln() } else { 0.0 });
    let kernel = spec.map_values(|v| if v > LOG_CUTOFF { 0.0 } else { 1.0 });
    Ok(PsdLog { log, kernel })
}

/// Conjugation `U X U†`.
pub fn conjugate(u: &ComplexOperator, x: &ComplexOperator) -> ComplexOperator {
    u * x * u.adjoint()
}

/// Inverse conjugation `U† X U`.
pub fn conjugate_inv(u: &ComplexOperator, x: &ComplexOperator) -> ComplexOperator {
    u.adjoint() * x * u
}

//! Dense complex matrices and the Hermitian operations the simulator needs.
//!
//! Eigendecompositions are delegated to `nalgebra`'s symmetric/Hermitian
//! solver; this module adds input checks, descending eigenvalue order and
//! the PSD square-root conventions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative tolerance for the Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues down to `-PSD_CLAMP · max(1, λ_max)` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-12;

/// Eigenvalues in descending order with matching unit eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn top_vector(&self) -> CVector {
        self.vectors.column(0).into_owned()
    }

    /// `U diag(f(λ)) U^H`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = Complex64::from(f(lambda));
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Largest entry of `|A - A^H|` relative to the largest entry of `|A|`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev / scale
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    if a.nrows() == 0 {
        return Err(Error::Empty);
    }
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

pub fn is_hermitian(a: &CMatrix) -> bool {
    check_hermitian(a).is_ok()
}

/// Eigendecomposition `A = U Λ U^H` of a Hermitian matrix.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    check_hermitian(a)?;
    // Symmetrise exactly so round-off in the input cannot leak into the solver.
    let sym = (a + a.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEig { values, vectors })
}

fn psd_eig(r: &CMatrix) -> Result<HermitianEig> {
    let mut eig = hermitian_eig(r)?;
    let floor = -PSD_CLAMP * eig.max_value().max(1.0);
    for v in &mut eig.values {
        if *v < floor {
            return Err(Error::Indefinite(*v));
        }
        *v = v.max(0.0);
    }
    Ok(eig)
}

/// Hermitian PSD square root `S` with `S S = R`.
pub fn hermitian_sqrt(r: &CMatrix) -> Result<CMatrix> {
    Ok(psd_eig(r)?.reconstruct_with(f64::sqrt))
}

/// `R^{-1/2}` for Hermitian positive definite `R`.
pub fn hermitian_inv_sqrt(r: &CMatrix) -> Result<CMatrix> {
    let eig = psd_eig(r)?;
    check_nonsingular(&eig)?;
    Ok(eig.reconstruct_with(|l| 1.0 / l.sqrt()))
}

/// `R^{-1}` for Hermitian positive definite `R`.
pub fn hermitian_inverse(r: &CMatrix) -> Result<CMatrix> {
    let eig = psd_eig(r)?;
    check_nonsingular(&eig)?;
    Ok(eig.reconstruct_with(|l| 1.0 / l))
}

fn check_nonsingular(eig: &HermitianEig) -> Result<()> {
    let max = eig.max_value();
    let min = *eig.values.last().expect("nonempty");
    if !(min > 1e-12 * max) {
        return Err(Error::Singular(format!(
            "smallest eigenvalue {min:e} vs largest {max:e}; the matrix must be invertible"
        )));
    }
    Ok(())
}

pub fn trace_re(a: &CMatrix) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// `‖A − B‖_F / ‖B‖_F`.
pub fn relative_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm()
}

/// Exponential correlation `[R]_{ij} = η^{|i−j|}`.
pub fn exponential_correlation(n: usize, eta: f64) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::Domain {
            name: "eta",
            value: eta,
        });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::from(eta.powi(i.abs_diff(j) as i32))
    }))
}

/// `diag(d) A diag(d)^H`.
pub fn conjugate_by_diagonal(a: &CMatrix, d: &CVector) -> Result<CMatrix> {
    if a.nrows() != d.len() || a.ncols() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: d.len(),
        });
    }
    Ok(CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        d[i] * a[(i, j)] * d[j].conj()
    }))
}

/// `x^H A x`, real part (the imaginary part vanishes for Hermitian `A`).
pub fn quadratic_form(a: &CMatrix, x: &CVector) -> f64 {
    (x.adjoint() * a * x)[(0, 0)].re
}

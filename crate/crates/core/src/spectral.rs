//! Dense Hermitian spectral calculus on small complex matrices.
//!
//! [`ComplexMatrix`] doubles as an algebra element and as a vector of the
//! Hilbert–Schmidt space with `⟨ξ, η⟩ = Tr ξ*η`. Powers of positive
//! semidefinite matrices are taken on their support: eigenvalues at or below
//! [`SUPPORT_CUTOFF`] times the largest one are treated as zero.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which a spectral value counts as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Relative tolerance for Hermiticity, `‖M − M*‖ ≤ TOL_HERM·‖M‖`.
pub const TOL_HERM: f64 = 1e-10;
/// Relative tolerance for positive semidefiniteness.
pub const TOL_PSD: f64 = 1e-10;
/// Per-dimension reconstruction / unitarity tolerance of eigendecompositions.
pub const TOL_RECON_PER_DIM: f64 = 1e-11;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, &mut f))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let d = diag.len();
        Self::from_fn(d, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self::from_fn(d, |i, j| Complex64::new(if i == j { diag[i] } else { 0.0 }, 0.0))
    }

    /// Builds a matrix from row-major entries, rejecting empty or non-finite data.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let flat: Vec<Complex64> = rows.iter().flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        Self::from_row_major(d, &flat)
    }

    /// Wraps a square nalgebra matrix.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidMatrix(format!("not square: {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| self.0[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(&self.0 * Complex64::new(c, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `Tr(self* · other)`, linear in the second argument.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.0.clone().singular_values().iter().cloned().fold(0.0, f64::max)
    }

    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Relative distance from Hermiticity, `‖M − M*‖_HS / ‖M‖_HS` (0 for the zero matrix).
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.hs_norm();
        if n == 0.0 {
            return 0.0;
        }
        Self(&self.0 - self.0.adjoint()).hs_norm() / n
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Conjugation `U · self · U*`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }

    /// Conjugation `U* · self · U`.
    pub fn conjugate_by_adjoint(&self, u: &Self) -> Self {
        Self(u.0.adjoint() * &self.0 * &u.0)
    }

    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, Complex64) -> Complex64) -> Self {
        let d = self.dim();
        Self::from_fn(d, |i, j| f(i, j, self.0[(i, j)]))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimMismatch { expected, got: self.dim() })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        writeln!(f, "ComplexMatrix({d}x{d}) [")?;
        for i in 0..d {
            write!(f, "  ")?;
            for j in 0..d {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// On-disk matrix format: `{"dim": d, "entries": [[re, im], ...]}` in row-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixFile { dim: m.dim(), entries: m.row_major().iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;
    fn try_from(f: MatrixFile) -> Result<Self> {
        let entries: Vec<Complex64> = f.entries.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        ComplexMatrix::from_row_major(f.dim, &entries)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = MatrixFile::deserialize(d)?;
        ComplexMatrix::try_from(f).map_err(serde::de::Error::custom)
    }
}

/// Eigen-decomposition `M = V · diag(values) · V*` of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub basis: ComplexMatrix,
    /// Relative threshold under which eigenvalues count as zero. Spectra
    /// obtained by diagonalizing dense data use [`SUPPORT_CUTOFF`]; spectra
    /// known in factored form may use 0.
    pub cutoff: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V · diag(f(λ)) · V*`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> Complex64) -> ComplexMatrix {
        let diag: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_diagonal(&diag).conjugate_by(&self.basis)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| Complex64::new(l, 0.0))
    }

    /// `‖V*V − 1‖_HS`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        (&(&self.basis.adjoint() * &self.basis) - &ComplexMatrix::identity(d)).hs_norm()
    }

    /// Absolute threshold under which eigenvalues are treated as zero.
    pub fn support_threshold(&self) -> f64 {
        self.cutoff * self.values.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }

    pub fn rank(&self) -> usize {
        let thr = self.support_threshold();
        self.values.iter().filter(|&&l| l > thr).count()
    }

    /// Complex power on the support; see [`fractional_power_with`].
    pub fn power(&self, z: Complex64, policy: SupportPolicy) -> Result<ComplexMatrix> {
        let thr = self.support_threshold();
        let singular = self.values.iter().any(|&l| l <= thr);
        if z.re < 0.0 && singular && policy == SupportPolicy::Strict {
            return Err(Error::SingularNegativePower);
        }
        Ok(self.apply(|l| if l > thr { (z * l.ln()).exp() } else { Complex64::new(0.0, 0.0) }))
    }
}

/// How negative powers treat a singular positive matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportPolicy {
    /// Negative real parts require full support.
    Strict,
    /// Invert on the support, i.e. a generalized inverse power.
    OnSupport,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = m.hermiticity_defect();
    if defect > TOL_HERM {
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::new(m.hermitian_part().into_dmatrix());
    let d = m.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let basis = ComplexMatrix::from_fn(d, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition { values, basis, cutoff: SUPPORT_CUTOFF })
}

/// `P^z` for positive semidefinite `P`, strict support policy.
pub fn fractional_power(p: &ComplexMatrix, z: Complex64) -> Result<ComplexMatrix> {
    fractional_power_with(p, z, SupportPolicy::Strict)
}

/// `Σ_{λ > cutoff} exp(z ln λ) · E_λ`; eigenvalues at or below the cutoff are dropped.
pub fn fractional_power_with(p: &ComplexMatrix, z: Complex64, policy: SupportPolicy) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(p)?;
    check_psd_spectrum(&spec, TOL_PSD)?;
    spec.power(z, policy)
}

pub(crate) fn check_psd_spectrum(spec: &SpectralDecomposition, tol: f64) -> Result<()> {
    let scale = spec.values.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let min = spec.min_value();
    if min < -tol * scale {
        Err(Error::NotPsd(min))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdStatus {
    pub is_psd: bool,
    pub min_eig: f64,
}

/// PSD test with an absolute tolerance: `is_psd` iff the minimum eigenvalue is `≥ −tol`.
pub fn psd_check(m: &ComplexMatrix, tol: f64) -> Result<PsdStatus> {
    let spec = eig_hermitian(m)?;
    let min_eig = spec.min_value();
    Ok(PsdStatus { is_psd: min_eig >= -tol, min_eig })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixNorms {
    pub operator_norm: f64,
    pub hs_norm: f64,
    pub trace: Complex64,
}

pub fn norms_and_trace(m: &ComplexMatrix) -> MatrixNorms {
    MatrixNorms { operator_norm: m.operator_norm(), hs_norm: m.hs_norm(), trace: m.trace() }
}

/// Schatten p-norm `(Σ σ_i^p)^{1/p}`; `p = ∞` gives the operator norm.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> f64 {
    let sv = m.as_dmatrix().clone().singular_values();
    if p.is_infinite() {
        return sv.iter().cloned().fold(0.0, f64::max);
    }
    // factor out the largest singular value so large p cannot overflow
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    top * sv.iter().map(|s| (s / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let s = eig_hermitian(&x).unwrap();
        assert_abs_diff_eq!(s.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values[1], 1.0, epsilon = 1e-14);
        assert!(s.unitarity_residual() < 1e-13);
    }

    #[test]
    fn identity_spectrum() {
        let s = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn square_root_of_diagonal() {
        let p = ComplexMatrix::from_real_diagonal(&[4.0, 1.0]);
        let r = fractional_power(&p, c(0.5, 0.0)).unwrap();
        assert!((&r - &ComplexMatrix::from_real_diagonal(&[2.0, 1.0])).hs_norm() < 1e-14);
    }

    #[test]
    fn imaginary_power_phase() {
        let p = ComplexMatrix::from_real_diagonal(&[std::f64::consts::E, 1.0]);
        let r = fractional_power(&p, c(0.0, std::f64::consts::PI)).unwrap();
        assert!((&r - &ComplexMatrix::from_real_diagonal(&[-1.0, 1.0])).hs_norm() < 1e-14);
    }

    #[test]
    fn identity_power_is_identity() {
        let r = fractional_power(&ComplexMatrix::identity(3), c(-0.7, 2.3)).unwrap();
        assert!((&r - &ComplexMatrix::identity(3)).hs_norm() < 1e-14);
    }

    #[test]
    fn singular_negative_power() {
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert_eq!(fractional_power(&p, c(-0.5, 0.0)), Err(Error::SingularNegativePower));
        let r = fractional_power_with(&p, c(-0.5, 0.0), SupportPolicy::OnSupport).unwrap();
        assert!((&r - &p).hs_norm() < 1e-14);
        // zero power is the support projection
        let r0 = fractional_power(&p, c(0.0, 0.0)).unwrap();
        assert!((&r0 - &p).hs_norm() < 1e-14);
    }

    #[test]
    fn not_psd_power() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(fractional_power(&m, c(0.5, 0.0)), Err(Error::NotPsd(_))));
    }

    #[test]
    fn psd_check_examples() {
        let s = psd_check(&ComplexMatrix::identity(2), 0.0).unwrap();
        assert!(s.is_psd);
        assert_abs_diff_eq!(s.min_eig, 1.0, epsilon = 1e-14);
        let s = psd_check(&(-&ComplexMatrix::identity(2)), 0.0).unwrap();
        assert!(!s.is_psd);
        assert_abs_diff_eq!(s.min_eig, -1.0, epsilon = 1e-14);
        // eigenvalues 1 ± 2
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        let s = psd_check(&m, 1e-10).unwrap();
        assert!(!s.is_psd);
        assert_abs_diff_eq!(s.min_eig, -1.0, epsilon = 1e-13);
    }

    #[test]
    fn norms_examples() {
        let n = norms_and_trace(&ComplexMatrix::identity(3));
        assert_abs_diff_eq!(n.operator_norm, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(n.hs_norm, 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(n.trace, c(3.0, 0.0));

        let e12 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let n = norms_and_trace(&e12);
        assert_abs_diff_eq!(n.operator_norm, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(n.hs_norm, 1.0, epsilon = 1e-14);
        assert_eq!(n.trace, c(0.0, 0.0));

        let n = norms_and_trace(&ComplexMatrix::from_real_diagonal(&[3.0, -4.0]));
        assert_abs_diff_eq!(n.operator_norm, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(n.hs_norm, 5.0, epsilon = 1e-14);
        assert_eq!(n.trace, c(-1.0, 0.0));
    }

    #[test]
    fn matrix_file_rejects_bad_shapes() {
        let f = MatrixFile { dim: 2, entries: vec![[1.0, 0.0]; 3] };
        assert!(ComplexMatrix::try_from(f).is_err());
        let f = MatrixFile { dim: 1, entries: vec![[f64::NAN, 0.0]] };
        assert_eq!(ComplexMatrix::try_from(f), Err(Error::NonFinite));
    }

    #[test]
    fn schatten_limits() {
        let m = ComplexMatrix::from_real_diagonal(&[3.0, -4.0]);
        assert_abs_diff_eq!(schatten_norm(&m, 2.0), 5.0, epsilon = 1e-13);
        assert_abs_diff_eq!(schatten_norm(&m, 1.0), 7.0, epsilon = 1e-13);
        assert_abs_diff_eq!(schatten_norm(&m, f64::INFINITY), 4.0, epsilon = 1e-13);
    }
}

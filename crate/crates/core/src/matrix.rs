//! Dense complex matrices and the handful of linear-algebra routines the rest
//! of the crate is written against.
//!
//! Storage and the heavy lifting (SVD, Hermitian eigenvalues) are delegated to
//! `nalgebra`; this module fixes the conventions: row-major serialization,
//! realification of complex unknowns, and deterministic nullspace bases.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Residual tolerance used when the caller does not supply one.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(nrows, ncols, rows.concat())
    }

    /// Real-valued convenience constructor, mostly for tests and fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let converted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self {
            inner: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    /// Matrix unit `E_{row,col}` of the given shape.
    pub fn unit(rows: usize, cols: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.inner[(row, col)] = ONE;
        m
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.inner[(row, col)] = value;
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.inner[(r, c)]);
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.inner[(r, c)]).collect())
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            inner: self.inner.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    fn require_same_square(&self, rhs: &Self) -> Result<()> {
        if !self.is_square() || self.shape() != rhs.shape() {
            return Err(Error::Dimension(format!(
                "expected square matrices of equal size, got {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(())
    }

    /// `AB - BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.require_same_square(rhs)?;
        Ok(Self {
            inner: &self.inner * &rhs.inner - &rhs.inner * &self.inner,
        })
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, rhs: &Self) -> Result<Self> {
        self.require_same_square(rhs)?;
        Ok(Self {
            inner: &self.inner * &rhs.inner + &rhs.inner * &self.inner,
        })
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self {
            inner: self.inner.kronecker(&rhs.inner),
        }
    }

    pub fn block(&self, row: usize, col: usize, nrows: usize, ncols: usize) -> Self {
        Self {
            inner: self.inner.view((row, col), (nrows, ncols)).into_owned(),
        }
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &Self) {
        self.inner
            .view_mut((row, col), block.shape())
            .copy_from(&block.inner);
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.inner.is_empty() {
            return 0.0;
        }
        self.inner.singular_values().max()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (self - &self.adjoint()).max_abs() <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending, with multiplicity.
    pub fn hermitian_spectrum(&self, tol: f64) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::Dimension("spectrum of a non-square matrix".into()));
        }
        let defect = (self - &self.adjoint()).max_abs();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        // Symmetrize so rounding in the input cannot leak into the solver.
        let h = (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0);
        let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    /// Realified row-major entries: `(re, im)` pairs.
    pub fn realify(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                let z = self.inner[(r, c)];
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            write!(f, "  ")?;
            for c in 0..self.cols() {
                let z = self.inner[(r, c)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { inner: &self.inner $op &rhs.inner }
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { inner: self.inner $op rhs.inner }
            }
        }
    };
}

// Panics on shape mismatch, like nalgebra. Use `try_mul`/`commutator` for checked variants.
forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            inner: -&self.inner,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

/// Serde adapter for a single complex scalar as `{"re": .., "im": ..}`.
pub mod complex_serde {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexRepr { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let r = ComplexRepr::deserialize(d)?;
        Ok(Complex64::new(r.re, r.im))
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<ComplexRepr>> = (0..self.rows())
            .map(|r| {
                (0..self.cols())
                    .map(|c| {
                        let z = self.inner[(r, c)];
                        ComplexRepr { re: z.re, im: z.im }
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<ComplexRepr>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|z| Complex64::new(z.re, z.im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Block decomposition `m = n_1 + ... + n_k` of the ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockStructure {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Dimension("block dimensions must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &n in &dims {
            offsets.push(acc);
            acc += n;
        }
        Ok(Self { dims, offsets })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, block: usize) -> usize {
        self.dims[block]
    }

    pub fn offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    /// Ambient dimension `m`.
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Extracts block `(i, j)` of an `m x m` matrix.
    pub fn get_block(&self, m: &ComplexMatrix, i: usize, j: usize) -> ComplexMatrix {
        m.block(self.offsets[i], self.offsets[j], self.dims[i], self.dims[j])
    }

    pub fn set_block(&self, m: &mut ComplexMatrix, i: usize, j: usize, block: &ComplexMatrix) {
        m.set_block(self.offsets[i], self.offsets[j], block);
    }

    /// Block index owning the ambient coordinate `idx`.
    pub fn block_of(&self, idx: usize) -> usize {
        match self.offsets.binary_search(&idx) {
            Ok(b) => b,
            Err(b) => b - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

/// Identifies one real column of a realified system: the real or imaginary part
/// of entry `(row, col)` inside block `(block_row, block_col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnknownLabel {
    pub block: (usize, usize),
    pub row: usize,
    pub col: usize,
    pub part: Part,
}

/// Homogeneous real linear system `A x = 0` with labelled columns.
#[derive(Debug, Clone)]
pub struct RealLinearSystem {
    coefficients: DMatrix<f64>,
    labels: Vec<UnknownLabel>,
}

impl RealLinearSystem {
    pub fn new(coefficients: DMatrix<f64>, labels: Vec<UnknownLabel>) -> Result<Self> {
        if coefficients.ncols() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} columns but {} unknown labels",
                coefficients.ncols(),
                labels.len()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::Invalid("duplicate unknown label".into()));
        }
        Ok(Self {
            coefficients,
            labels,
        })
    }

    /// Builds a system from its rows; `ncols` is needed when there are no rows.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<UnknownLabel>) -> Result<Self> {
        let ncols = labels.len();
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("row length differs from unknown count".into()));
        }
        let flat: Vec<f64> = rows.concat();
        Self::new(DMatrix::from_row_slice(rows.len(), ncols, &flat), labels)
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn labels(&self) -> &[UnknownLabel] {
        &self.labels
    }

    pub fn unknowns(&self) -> usize {
        self.labels.len()
    }

    pub fn equations(&self) -> usize {
        self.coefficients.nrows()
    }
}

/// Singular values of `a`, computed through a square triangular factor so that
/// very tall systems stay cheap and the full right-singular basis is available.
fn square_factor(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.ncols();
    if a.nrows() <= n {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), a.shape()).copy_from(a);
        padded
    } else {
        a.clone().qr().r()
    }
}

/// Orthonormal basis of `{x : A x = 0}`.
///
/// Rank is decided by singular values below `tol` times the largest one. The
/// returned basis depends only on the kernel: the orthogonal projector onto it
/// is applied to the standard basis vectors in column order and the survivors
/// are Gram-Schmidt orthonormalized, so ordering follows the first column each
/// vector pivots on.
pub fn real_nullspace(system: &RealLinearSystem, tol: f64) -> Vec<DVector<f64>> {
    let n = system.unknowns();
    if n == 0 {
        return Vec::new();
    }
    let r = square_factor(&system.coefficients);
    let svd = r.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.max();
    let threshold = tol * sigma_max;

    let kernel: Vec<DVector<f64>> = (0..n)
        .filter(|&k| svd.singular_values[k] <= threshold || sigma_max == 0.0)
        .map(|k| v_t.row(k).transpose())
        .collect();
    let dim = kernel.len();
    if dim == 0 {
        return kernel;
    }

    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for c in 0..n {
        if basis.len() == dim {
            break;
        }
        // Projection of e_c onto the kernel.
        let mut v = DVector::zeros(n);
        for k in &kernel {
            v.axpy(k[c], k, 1.0);
        }
        for b in &basis {
            let d = b.dot(&v);
            v.axpy(-d, b, 1.0);
        }
        // Re-orthogonalize once; cheap and keeps the basis orthonormal to rounding.
        for b in &basis {
            let d = b.dot(&v);
            v.axpy(-d, b, 1.0);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    basis
}

/// Numerical rank of a complex matrix, relative tolerance on singular values.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    if m.as_nalgebra().is_empty() {
        return 0;
    }
    let sv = m.as_nalgebra().singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Shape data for a Kronecker factorization test: the block is
/// `(n_i * n_i') x (n_j * n_j')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KronDims {
    pub n_i: usize,
    pub n_j: usize,
    pub n_i_opp: usize,
    pub n_j_opp: usize,
}

/// Whether `block = e ⊗ f` for some `e` (`n_i x n_j`) and `f` (`n_i' x n_j'`).
///
/// The block is reshaped so that the `e` indices run along rows and the `f`
/// indices along columns; a Kronecker product is exactly a rank-one reshape.
pub fn tensor_rank_one(block: &ComplexMatrix, dims: KronDims, tol: f64) -> Result<bool> {
    let KronDims {
        n_i,
        n_j,
        n_i_opp,
        n_j_opp,
    } = dims;
    if block.shape() != (n_i * n_i_opp, n_j * n_j_opp) {
        return Err(Error::Dimension(format!(
            "block is {}x{}, factor dims give {}x{}",
            block.rows(),
            block.cols(),
            n_i * n_i_opp,
            n_j * n_j_opp
        )));
    }
    let mut reshaped = ComplexMatrix::zeros(n_i * n_j, n_i_opp * n_j_opp);
    for a in 0..n_i {
        for ap in 0..n_i_opp {
            for b in 0..n_j {
                for bp in 0..n_j_opp {
                    let z = block.get(a * n_i_opp + ap, b * n_j_opp + bp);
                    reshaped.set(a * n_j + b, ap * n_j_opp + bp, z);
                }
            }
        }
    }
    Ok(numerical_rank(&reshaped, tol) <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_point_d(m: Complex64) -> ComplexMatrix {
        let z = ZERO;
        ComplexMatrix::from_rows(&[
            vec![z, m.conj(), z, z],
            vec![m, z, z, z],
            vec![z, z, z, m],
            vec![z, z, m.conj(), z],
        ])
        .unwrap()
    }

    #[test]
    fn adjoint_examples() {
        let d = two_point_d(c(0.3, -1.7));
        assert_eq!(d.adjoint(), d);
        assert_eq!(ComplexMatrix::identity(3).adjoint(), ComplexMatrix::identity(3));
        let i = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)]]).unwrap();
        assert_eq!(i.adjoint().get(0, 0), c(0.0, -1.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn commutator_examples() {
        let chi = ComplexMatrix::from_diagonal(&[ONE, -ONE, ONE, -ONE]);
        let a = ComplexMatrix::from_diagonal(&[c(1.0, 2.0), c(3.0, 0.0), c(-1.0, 0.5), c(0.0, 0.0)]);
        assert!(chi.commutator(&a).unwrap().is_zero(0.0));
        assert!(a.commutator(&ComplexMatrix::identity(4)).unwrap().is_zero(0.0));

        // [D, a] with a = e_L: entry (r, c) = D_rc (a_c - a_r).
        let m = c(0.6, 0.8);
        let d = two_point_d(m);
        let e_l = ComplexMatrix::from_diagonal(&[ONE, ZERO, ZERO, ZERO]);
        let k = d.commutator(&e_l).unwrap();
        assert_eq!(k.get(1, 0), m);
        assert_eq!(k.get(0, 1), -m.conj());
        assert_eq!(k.get(2, 3), ZERO);

        assert!(chi.commutator(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn anticommutator_examples() {
        let chi = ComplexMatrix::from_diagonal(&[ONE, -ONE, ONE, -ONE]);
        let d = two_point_d(c(2.0, -1.0));
        assert!(d.anticommutator(&chi).unwrap().is_zero(0.0));

        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(ComplexMatrix::identity(2).anticommutator(&a).unwrap(), a.scale_real(2.0));

        // g/h family: blocks connect equal chiralities, so the grading does not flip them.
        let g = c(1.0, 1.0);
        let mut x = ComplexMatrix::zeros(4, 4);
        x.set(0, 2, g);
        x.set(2, 0, g.conj());
        let ac = x.anticommutator(&chi).unwrap();
        assert_eq!(ac.get(0, 2), g.scale(2.0));
    }

    #[test]
    fn spectrum_examples() {
        let d = two_point_d(c(1.2, 1.6));
        let s = d.hermitian_spectrum(1e-12).unwrap();
        for (got, want) in s.iter().zip([-2.0, -2.0, 2.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(ComplexMatrix::zeros(3, 3).hermitian_spectrum(0.0).unwrap(), vec![0.0; 3]);
        let diag = ComplexMatrix::from_real_rows(&[
            &[3.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
            &[0.0, 0.0, 3.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
        ])
        .unwrap();
        assert_eq!(diag.hermitian_spectrum(0.0).unwrap(), vec![-1.0, -1.0, 3.0, 3.0]);
        let not_h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(not_h.hermitian_spectrum(1e-9), Err(Error::NotHermitian(_))));
    }

    fn labels(n: usize) -> Vec<UnknownLabel> {
        (0..n)
            .map(|k| UnknownLabel {
                block: (0, 0),
                row: 0,
                col: k / 2,
                part: if k % 2 == 0 { Part::Re } else { Part::Im },
            })
            .collect()
    }

    #[test]
    fn nullspace_examples() {
        let sys = RealLinearSystem::from_rows(&[vec![1.0, -1.0]], labels(2)).unwrap();
        let basis = real_nullspace(&sys, 1e-9);
        assert_eq!(basis.len(), 1);
        let s = 1.0 / 2f64.sqrt();
        assert!((basis[0][0] - s).abs() < 1e-12 && (basis[0][1] - s).abs() < 1e-12);

        let full = RealLinearSystem::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], labels(2)).unwrap();
        assert!(real_nullspace(&full, 1e-9).is_empty());

        let empty = RealLinearSystem::from_rows(&[], labels(4)).unwrap();
        let basis = real_nullspace(&empty, 1e-9);
        assert_eq!(basis.len(), 4);
        for (k, v) in basis.iter().enumerate() {
            assert!((v[k] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut l = labels(2);
        l[1] = l[0];
        assert!(RealLinearSystem::from_rows(&[vec![1.0, 1.0]], l).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(ComplexMatrix::zeros(3, 3).operator_norm(), 0.0);
        assert!((ComplexMatrix::identity(4).operator_norm() - 1.0).abs() < 1e-12);
        let d = two_point_d(c(0.0, 1.0));
        let e_l = ComplexMatrix::from_diagonal(&[ONE, ZERO, ZERO, ZERO]);
        let k = d.commutator(&e_l).unwrap();
        assert!((k.operator_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_rank_one_examples() {
        let one = ComplexMatrix::from_rows(&[vec![c(0.3, 4.0)]]).unwrap();
        let d1 = KronDims { n_i: 1, n_j: 1, n_i_opp: 1, n_j_opp: 1 };
        assert!(tensor_rank_one(&one, d1, 1e-9).unwrap());

        let e = ComplexMatrix::from_rows(&[vec![c(1.0, 0.5), c(-2.0, 0.0)], vec![c(0.0, 1.0), c(3.0, -1.0)]]).unwrap();
        let f = ComplexMatrix::from_rows(&[vec![c(0.2, 0.0), c(1.0, 1.0)], vec![c(-1.0, 0.0), c(0.0, 2.0)]]).unwrap();
        let d2 = KronDims { n_i: 2, n_j: 2, n_i_opp: 2, n_j_opp: 2 };
        assert!(tensor_rank_one(&e.kron(&f), d2, 1e-9).unwrap());

        let g = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
        let sum = &e.kron(&f) + &g.kron(&h);
        assert!(!tensor_rank_one(&sum, d2, 1e-9).unwrap());

        assert!(tensor_rank_one(&sum, d1, 1e-9).is_err());
    }

    #[test]
    fn serde_shape() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, -2.0), c(0.5, 0.0)]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"[[{"re":1.0,"im":-2.0},{"re":0.5,"im":0.0}]]"#);
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn block_structure_offsets() {
        let b = BlockStructure::new(vec![1, 2, 3]).unwrap();
        assert_eq!(b.total(), 6);
        assert_eq!(b.offset(2), 3);
        assert_eq!(b.block_of(0), 0);
        assert_eq!(b.block_of(2), 1);
        assert_eq!(b.block_of(5), 2);
        assert!(BlockStructure::new(vec![1, 0]).is_err());
    }
}

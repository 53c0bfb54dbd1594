//! Dense square complex matrices.
//!
//! Sizes of interest are small (d ≤ 8), and the hot loops of the product
//! enumerators multiply and measure millions of them. Storage is a flat
//! row-major `Vec`, multiplication is hand-written, and 1×1 / 2×2 matrices
//! get closed-form eigenvalues and singular values. Larger spectra and
//! decompositions go through `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JsrError, Result};

pub type C64 = Complex64;

/// Which matrix norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Largest singular value (operator norm induced by the Euclidean norm).
    Spectral,
    /// Square root of the sum of squared moduli.
    Frobenius,
}

/// A d×d complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    d: usize,
    data: Vec<C64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries.
    pub fn new(d: usize, data: Vec<C64>) -> Result<Self> {
        if d == 0 {
            return Err(JsrError::invalid("matrix dimension must be positive"));
        }
        if data.len() != d * d {
            return Err(JsrError::invalid(format!(
                "expected {} entries for a {d}x{d} matrix, got {}",
                d * d,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(JsrError::invalid("matrix has non-finite entries"));
        }
        Ok(Matrix { d, data })
    }

    /// Builds a matrix from rows of complex numbers.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(JsrError::invalid("matrix rows must all have length d"));
        }
        Matrix::new(d, rows.iter().flatten().copied().collect())
    }

    /// Builds a real matrix from rows. Panics on ragged or non-finite input;
    /// meant for literals in code and tests.
    pub fn real(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        assert!(rows.iter().all(|r| r.len() == d), "ragged matrix literal");
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Matrix::new(d, data).expect("invalid matrix literal")
    }

    pub(crate) fn from_raw(d: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), d * d);
        Matrix { d, data }
    }

    pub fn zeros(d: usize) -> Self {
        Matrix::from_raw(d, vec![C64::new(0.0, 0.0); d * d])
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Matrix::zeros(d);
        for i in 0..d {
            m.data[i * d + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diag(entries: &[C64]) -> Self {
        let d = entries.len();
        let mut m = Matrix::zeros(d);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * d + i] = z;
        }
        m
    }

    /// Rank-one matrix e_i e_jᵀ.
    pub fn unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(d);
        m.data[i * d + j] = C64::new(1.0, 0.0);
        m
    }

    /// Outer product x yᴴ.
    pub fn outer(x: &[C64], y: &[C64]) -> Self {
        let d = x.len();
        assert_eq!(d, y.len());
        let mut data = Vec::with_capacity(d * d);
        for xi in x {
            for yj in y {
                data.push(xi * yj.conj());
            }
        }
        Matrix::from_raw(d, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.d + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.d + j] = z;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.d).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Bitwise equality of every entry (distinguishes 0.0 from -0.0).
    pub fn bitwise_eq(&self, other: &Matrix) -> bool {
        self.d == other.d
            && self.data.iter().zip(&other.data).all(|(a, b)| {
                a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
            })
    }

    pub fn trace(&self) -> C64 {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Matrix {
        let d = self.d;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.d);
        self.mul_into(rhs, &mut out);
        out
    }

    /// Writes `self · rhs` into `out` without allocating.
    pub fn mul_into(&self, rhs: &Matrix, out: &mut Matrix) {
        let d = self.d;
        assert_eq!(d, rhs.d, "dimension mismatch in product");
        out.d = d;
        out.data.resize(d * d, C64::new(0.0, 0.0));
        match d {
            1 => out.data[0] = self.data[0] * rhs.data[0],
            2 => {
                let (a, b) = (&self.data, &rhs.data);
                out.data[0] = a[0] * b[0] + a[1] * b[2];
                out.data[1] = a[0] * b[1] + a[1] * b[3];
                out.data[2] = a[2] * b[0] + a[3] * b[2];
                out.data[3] = a[2] * b[1] + a[3] * b[3];
            }
            _ => {
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = C64::new(0.0, 0.0);
                        for k in 0..d {
                            acc += self.data[i * d + k] * rhs.data[k * d + j];
                        }
                        out.data[i * d + j] = acc;
                    }
                }
            }
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let d = self.d;
        (0..d)
            .map(|i| (0..d).map(|k| self.data[i * d + k] * x[k]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.d, rhs.d);
        Matrix::from_raw(
            self.d,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.d, rhs.d);
        Matrix::from_raw(
            self.d,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix::from_raw(self.d, self.data.iter().map(|z| z * c).collect())
    }

    pub fn scale_c(&self, c: C64) -> Matrix {
        Matrix::from_raw(self.d, self.data.iter().map(|z| z * c).collect())
    }

    /// `self + c·rhs`
    pub fn add_scaled(&self, c: f64, rhs: &Matrix) -> Matrix {
        assert_eq!(self.d, rhs.d);
        Matrix::from_raw(
            self.d,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b * c)
                .collect(),
        )
    }

    /// Frobenius inner product ⟨self, rhs⟩ = tr(selfᴴ rhs).
    pub fn inner(&self, rhs: &Matrix) -> C64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Square submatrix on rows/columns `range`.
    pub fn principal(&self, start: usize, len: usize) -> Matrix {
        self.block(start, len, start, len)
    }

    /// Square `rows × cols` block starting at (r0, c0).
    pub fn block(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Matrix {
        assert_eq!(rows, cols, "use block_rect for rectangular blocks");
        let mut out = Matrix::zeros(rows);
        for i in 0..rows {
            for j in 0..cols {
                out.data[i * rows + j] = self.get(r0 + i, c0 + j);
            }
        }
        out
    }

    pub fn block_rect(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> RectMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(self.get(r0 + i, c0 + j));
            }
        }
        RectMatrix { rows, cols, data }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum (operator norm induced by the ∞-norm).
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.d)
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum (operator norm induced by the 1-norm).
    pub fn one_norm(&self) -> f64 {
        (0..self.d)
            .map(|j| (0..self.d).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm(&self, which: NormKind) -> f64 {
        match which {
            NormKind::Spectral => self.spectral_norm(),
            NormKind::Frobenius => self.frobenius_norm(),
        }
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        match self.d {
            1 => self.data[0].norm(),
            2 => {
                let s = self.max_abs();
                if s == 0.0 || !s.is_finite() {
                    return s;
                }
                let [a, b, c, d] = [0, 1, 2, 3].map(|i| self.data[i] / s);
                let f = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
                let det = (a * d - b * c).norm();
                // σ₁² + σ₂² = f, σ₁σ₂ = |det|
                let disc = ((f - 2.0 * det) * (f + 2.0 * det)).max(0.0);
                s * ((f + disc.sqrt()) / 2.0).sqrt()
            }
            _ => self.singular_values().into_iter().fold(0.0, f64::max),
        }
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn min_singular_value(&self) -> f64 {
        match self.d {
            1 => self.data[0].norm(),
            _ => self.singular_values().last().copied().unwrap_or(0.0),
        }
    }

    /// Eigenvalues (with multiplicity, unordered).
    pub fn eigenvalues(&self) -> Vec<C64> {
        match self.d {
            1 => vec![self.data[0]],
            2 => {
                let scale = self.max_abs();
                if scale == 0.0 || !scale.is_finite() {
                    return vec![self.data[0], self.data[3]];
                }
                let [a, b, c, d] = [0, 1, 2, 3].map(|i| self.data[i] / scale);
                let half_tr = (a + d) * 0.5;
                let half_diff = (a - d) * 0.5;
                let s = (half_diff * half_diff + b * c).sqrt();
                let (l1, l2) = (half_tr + s, half_tr - s);
                // l1 and l2 differ by 2s; the larger-modulus root carries no
                // cancellation. Recover the smaller one from the determinant.
                let (big, small) = if l1.norm() >= l2.norm() { (l1, l2) } else { (l2, l1) };
                let small = if big.norm() > 0.0 && s.norm() > 1e-8 * big.norm() {
                    (a * d - b * c) / big
                } else {
                    small
                };
                vec![big * scale, small * scale]
            }
            _ => {
                let schur = self.to_nalgebra().schur();
                let (_, t) = schur.unpack();
                (0..self.d).map(|i| t[(i, i)]).collect()
            }
        }
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        match self.d {
            1 => self.data[0].norm(),
            2 => self.eigenvalues()[0].norm(),
            _ => self.eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// Unit vector spanning the numerically smallest right singular direction.
    pub fn null_vector(&self) -> Vec<C64> {
        let svd = self.to_nalgebra().svd(false, true);
        let vt = svd.v_t.expect("v_t requested");
        let k = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (0..self.d).map(|j| vt[(k, j)].conj()).collect()
    }

    /// Solves `self · X = rhs`; `None` if singular.
    pub fn solve(&self, rhs: &Matrix) -> Option<Matrix> {
        let lu = self.to_nalgebra().lu();
        let x = lu.solve(&rhs.to_nalgebra())?;
        let out = Matrix::from_nalgebra(&x);
        out.is_finite().then_some(out)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        self.solve(&Matrix::identity(self.d))
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.d, self.d, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Matrix {
        assert_eq!(m.nrows(), m.ncols());
        let d = m.nrows();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(m[(i, j)]);
            }
        }
        Matrix::from_raw(d, data)
    }

    /// Similarity `Uᴴ · self · U` for a square unitary `U` given by columns.
    pub fn conjugate_by(&self, u: &Matrix) -> Matrix {
        u.adjoint().mul(self).mul(u)
    }
}

/// A rectangular complex matrix, used for off-diagonal flag blocks and
/// subspace bases.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<C64>,
}

impl RectMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RectMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * x[k]).sum())
            .collect()
    }

    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        if self.rows == 1 || self.cols == 1 {
            return self.frobenius_norm();
        }
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        m.singular_values().iter().copied().fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise scaling `D_left · self · D_right` by positive diagonals.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> RectMatrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * self.cols + j] *= left[i] * right[j];
            }
        }
        out
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨x, y⟩ = xᴴ y
pub fn vec_dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Largest eigenvalue modulus; fails on non-finite entries (which can arise
/// from overflowing products).
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(JsrError::invalid("spectral_radius: non-finite entries"));
    }
    Ok(a.spectral_radius())
}

/// Spectral or Frobenius norm; fails on non-finite entries.
pub fn operator_norm(a: &Matrix, which: NormKind) -> Result<f64> {
    if !a.is_finite() {
        return Err(JsrError::invalid("operator_norm: non-finite entries"));
    }
    Ok(a.norm(which))
}

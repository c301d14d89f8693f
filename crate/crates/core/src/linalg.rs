//! Dense complex and real matrices with the handful of factorizations the rest
//! of the crate needs: Kronecker products, Hermitian eigendecomposition, PSD
//! square roots and the SVD-based Moore–Penrose pseudoinverse.
//!
//! Storage is row-major. The eigen and singular value solvers are delegated to
//! `faer`; everything else is implemented directly on the flat buffers.

use std::fmt;
use std::ops::{Index, IndexMut};

use faer::{Mat, Side};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest tolerated elementwise deviation `|a - a†|` for Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Eigenvalues down to `-PSD_TOL` are clamped to zero; below that the input is rejected.
pub const PSD_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
}

pub type LinalgResult<T> = std::result::Result<T, LinalgError>;

/// Default relative singular-value cutoff: `max(rows, cols) * eps`.
pub fn default_rcond(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> LinalgResult<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                op: "new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> LinalgResult<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    op: "from_rows",
                    left: (rows.len(), cols),
                    right: (1, r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    /// `|a⟩⟨b|` for two amplitude vectors.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> LinalgResult<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> LinalgResult<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> LinalgResult<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> LinalgResult<Vec<C64>> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "apply",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> LinalgResult<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "trace_product",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut acc = ZERO;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self[(i, j)] * other[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(a + a†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn real_part(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.re).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> LinalgResult<()> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense row-major real matrix. Used for Gram matrices, distance matrices and
/// the learned coefficient maps.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> LinalgResult<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                op: "new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> LinalgResult<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch {
                op: "from_rows",
                left: (rows.len(), cols),
                right: (rows.len(), 0),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> LinalgResult<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · v`.
    pub fn apply(&self, v: &[f64]) -> LinalgResult<Vec<f64>> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "apply",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Row-vector product `v · self`.
    pub fn left_apply(&self, v: &[f64]) -> LinalgResult<Vec<f64>> {
        if self.rows != v.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "left_apply",
                left: (1, v.len()),
                right: self.shape(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += vi * a;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product with the standard block layout:
/// entry `(i·b.rows + k, j·b.cols + l)` is `a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let cols = ac * bc;
    let mut out = ComplexMatrix::zeros(ar * br, cols);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                let base = (i * br + k) * cols + j * bc;
                for (o, &bkl) in out.data[base..base + bc].iter_mut().zip(b.row(k)) {
                    *o = aij * bkl;
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V · diag(f(λ)) · V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, &wk) in w.iter().enumerate() {
                    if wk != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * wk;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

fn checked_hermitian(a: &ComplexMatrix) -> LinalgResult<Mat<C64>> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() == 0 {
        return Err(LinalgError::Empty);
    }
    if a.data
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(LinalgError::NonFinite);
    }
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }
    Ok(a.hermitian_part().to_faer())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// decomposition.
pub fn hermitian_eig(a: &ComplexMatrix) -> LinalgResult<HermitianEigen> {
    let m = checked_hermitian(a)?;
    let n = m.nrows();
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence("Hermitian eigendecomposition"))?;
    let (s, u) = (eig.S().column_vector(), eig.U());
    let eigenvalues: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NoConvergence("Hermitian eigendecomposition"));
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)]),
    })
}

/// Eigenvalues only (ascending). Cheaper than [`hermitian_eig`].
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> LinalgResult<Vec<f64>> {
    let m = checked_hermitian(a)?;
    let mut values = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence("Hermitian eigenvalues"))?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NoConvergence("Hermitian eigenvalues"));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-PSD_TOL, 0)` are clamped to zero.
pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> LinalgResult<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()))
}

/// Projection of a Hermitian matrix onto the PSD cone (negative eigenvalues set to zero).
pub fn psd_projection(a: &ComplexMatrix) -> LinalgResult<ComplexMatrix> {
    Ok(hermitian_eig(a)?.map_spectrum(|l| l.max(0.0)))
}

/// Moore–Penrose pseudoinverse via SVD. Singular values `σ ≤ rcond·σ_max` are
/// treated as zero; `None` selects [`default_rcond`].
pub fn pinv(a: &ComplexMatrix, rcond: Option<f64>) -> LinalgResult<ComplexMatrix> {
    if rcond.is_some_and(|r| r.is_nan() || r < 0.0) {
        return Err(LinalgError::NonFinite);
    }
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Err(LinalgError::Empty);
    }
    let rcond = rcond.unwrap_or_else(|| default_rcond(rows, cols));
    let svd = a
        .to_faer()
        .thin_svd()
        .map_err(|_| LinalgError::NoConvergence("SVD"))?;
    let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
    let k = rows.min(cols);
    let sigma: Vec<f64> = (0..k).map(|p| s[p].re).collect();
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NoConvergence("SVD"));
    }
    let cutoff = rcond * sigma.iter().copied().fold(0.0, f64::max);

    // A⁺ = V Σ⁺ U†
    let mut v_scaled = v.to_owned();
    for (p, &sp) in sigma.iter().enumerate() {
        let inv = if sp > cutoff { 1.0 / sp } else { 0.0 };
        for i in 0..cols {
            v_scaled[(i, p)] *= inv;
        }
    }
    let p = &v_scaled * u.adjoint();
    Ok(ComplexMatrix::from_fn(cols, rows, |i, j| p[(i, j)]))
}

/// Real-valued counterpart of [`pinv`].
pub fn pinv_real(a: &RealMatrix, rcond: Option<f64>) -> LinalgResult<RealMatrix> {
    Ok(pinv(&ComplexMatrix::from_real(a), rcond)?.real_part())
}

/// Least-squares solution `B` of `dx · B ≈ dy`, computed as `pinv(dx) · dy`.
pub fn solve_linear_map(
    dx: &ComplexMatrix,
    dy: &ComplexMatrix,
    rcond: Option<f64>,
) -> LinalgResult<ComplexMatrix> {
    if dx.rows() != dy.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "solve_linear_map",
            left: dx.shape(),
            right: dy.shape(),
        });
    }
    pinv(dx, rcond)?.matmul(dy)
}

/// Real-valued counterpart of [`solve_linear_map`].
pub fn solve_linear_map_real(
    dx: &RealMatrix,
    dy: &RealMatrix,
    rcond: Option<f64>,
) -> LinalgResult<RealMatrix> {
    if dx.rows() != dy.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "solve_linear_map",
            left: dx.shape(),
            right: dy.shape(),
        });
    }
    pinv_real(dx, rcond)?.matmul(dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn random_real(rng: &mut impl Rng, rows: usize, cols: usize) -> RealMatrix {
        RealMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        random_matrix(rng, n, n).hermitian_part()
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(k, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_x_identity_flips_leading_qubit() {
        let xi = kron(&pauli_x(), &ComplexMatrix::identity(2));
        let mut e0 = vec![ZERO; 4];
        e0[0] = ONE;
        let out = xi.apply(&e0).unwrap();
        let mut e2 = vec![ZERO; 4];
        e2[2] = ONE;
        assert_eq!(out, e2);
    }

    #[test]
    fn kron_matches_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 2, 2);
        let b = random_matrix(&mut rng, 2, 2);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
        // non-square factors
        let a = random_matrix(&mut rng, 2, 3);
        let b = random_matrix(&mut rng, 3, 1);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (6, 3));
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..3 {
                    assert_eq!(k[(i * 3 + p, j)], a[(i, j)] * b[(p, 0)]);
                }
            }
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 2, 3);
        let b = random_matrix(&mut rng, 3, 2);
        let cm = random_matrix(&mut rng, 2, 2);
        let left = kron(&kron(&a, &b), &cm);
        let right = kron(&a, &kron(&b, &cm));
        assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn eig_of_diagonal_sorts_ascending() {
        let eig = hermitian_eig(&ComplexMatrix::from_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 3.0]);
        let v = &eig.eigenvectors;
        assert!((v[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((v[(0, 1)].norm() - 1.0).abs() < 1e-14);
        assert!(v[(0, 0)].norm() < 1e-14 && v[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn eig_of_pauli_x() {
        let eig = hermitian_eig(&pauli_x()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 8, 16] {
            let a = random_hermitian(&mut rng, n);
            let eig = hermitian_eig(&a).unwrap();
            let recon = eig.map_spectrum(|l| l);
            let rel = recon.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
            assert!(rel <= 1e-10, "n={n} rel={rel}");
            let v = &eig.eigenvectors;
            let vtv = v.adjoint().matmul(v).unwrap();
            assert!(vtv.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let values = hermitian_eigenvalues(&a).unwrap();
            for (x, y) in values.iter().zip(&eig.eigenvalues) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap();
        assert!(matches!(
            hermitian_eig(&a),
            Err(LinalgError::NotHermitian { .. })
        ));
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&b),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        let s = matrix_sqrt_psd(&half).unwrap();
        let expected = ComplexMatrix::identity(2).scale(c(0.5f64.sqrt(), 0.0));
        assert!(s.max_abs_diff(&expected) < 1e-14);

        let s = matrix_sqrt_psd(&ComplexMatrix::from_diag(&[4.0, 0.0])).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::from_diag(&[2.0, 0.0])) < 1e-14);
    }

    #[test]
    fn sqrt_squares_back_to_density_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 4, 8, 16, 32] {
            let g = random_matrix(&mut rng, n, n);
            let rho = g.adjoint().matmul(&g).unwrap();
            let rho = rho.scale(c(1.0 / rho.trace().re, 0.0));
            let s = matrix_sqrt_psd(&rho).unwrap();
            let back = s.matmul(&s).unwrap();
            let rel = back.sub(&rho).unwrap().frobenius_norm() / rho.frobenius_norm();
            assert!(rel <= 1e-8, "n={n} rel={rel}");
        }
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large_negative() {
        let s = matrix_sqrt_psd(&ComplexMatrix::from_diag(&[1.0, -5e-10])).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::from_diag(&[1.0, 0.0])) < 1e-14);
        assert!(matches!(
            matrix_sqrt_psd(&ComplexMatrix::from_diag(&[1.0, -1e-6])),
            Err(LinalgError::NotPsd { .. })
        ));
    }

    #[test]
    fn pinv_of_identity_and_rank_deficient_diagonal() {
        let id = ComplexMatrix::identity(5);
        assert!(pinv(&id, None).unwrap().max_abs_diff(&id) < 1e-14);
        let p = pinv(&ComplexMatrix::from_diag(&[2.0, 0.0]), None).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.0])) < 1e-14);
        let p = pinv_real(
            &RealMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap(),
            None,
        )
        .unwrap();
        assert!(
            p.max_abs_diff(&RealMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.0]]).unwrap())
                < 1e-14
        );
    }

    #[test]
    fn pinv_of_tall_matrix_is_left_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_real(&mut rng, 12, 8);
        let p = pinv_real(&a, None).unwrap();
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        assert!(apa.max_abs_diff(&a) <= 1e-8);
        let pa = p.matmul(&a).unwrap();
        assert!(pa.max_abs_diff(&RealMatrix::identity(8)) <= 1e-8);
    }

    #[test]
    fn pinv_of_all_ones_is_scaled_all_ones() {
        // J = n·(1/√n)(1/√n)ᵀ, so J⁺ = J / n²
        for n in 1..=40 {
            let j = RealMatrix::from_fn(n, n, |_, _| 1.0);
            let expected = RealMatrix::from_fn(n, n, |_, _| 1.0 / (n * n) as f64);
            assert!(
                pinv_real(&j, None).unwrap().max_abs_diff(&expected) <= 1e-12,
                "n = {n}"
            );
        }
    }

    #[test]
    fn pinv_rejects_empty() {
        assert_eq!(
            pinv(&ComplexMatrix::zeros(0, 3), None),
            Err(LinalgError::Empty)
        );
    }

    #[test]
    fn solve_linear_map_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let dy = random_real(&mut rng, 6, 6);
        let b = solve_linear_map_real(&RealMatrix::identity(6), &dy, None).unwrap();
        assert!(b.max_abs_diff(&dy) < 1e-12);

        let dx = random_real(&mut rng, 10, 10);
        let b = solve_linear_map_real(&dx, &dx, None).unwrap();
        assert!(b.max_abs_diff(&RealMatrix::identity(10)) <= 1e-9);

        let dy = random_real(&mut rng, 10, 10);
        let b = solve_linear_map_real(&dx, &dy, None).unwrap();
        let residual =
            RealMatrix::from_fn(10, 10, |i, j| dx.matmul(&b).unwrap()[(i, j)] - dy[(i, j)]);
        assert!(residual.frobenius_norm() <= 1e-8);

        let dxc = random_matrix(&mut rng, 7, 7);
        let dyc = random_matrix(&mut rng, 7, 3);
        let b = solve_linear_map(&dxc, &dyc, None).unwrap();
        assert!(dxc.matmul(&b).unwrap().max_abs_diff(&dyc) < 1e-9);
    }

    #[test]
    fn solve_linear_map_rejects_row_mismatch() {
        let err = solve_linear_map_real(&RealMatrix::identity(3), &RealMatrix::identity(2), None);
        assert!(matches!(err, Err(LinalgError::DimensionMismatch { .. })));
    }

    #[test]
    fn new_rejects_non_finite_and_bad_length() {
        assert_eq!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite)
        );
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
    }

    #[test]
    fn trace_product_matches_full_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 4, 4);
        let b = random_matrix(&mut rng, 4, 4);
        let direct = a.matmul(&b).unwrap().trace();
        assert!((a.trace_product(&b).unwrap() - direct).norm() < 1e-13);
    }
}

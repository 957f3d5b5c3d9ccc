//! Dense complex linear algebra shared by every other module.
//!
//! Operators, projections, density operators and state vectors are all
//! [`ComplexMatrix`] values; a vector is an `n x 1` matrix. Bipartite spaces
//! use the composite index `i * dB + j` for `|i>_A (x) |j>_B`, which is the
//! ordering produced by [`tensor_product`].

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative tolerance for rank and degeneracy decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Absolute tolerance for "equals" checks.
pub const EQ_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One tensor factor of a bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    A,
    B,
}

impl Factor {
    pub fn other(self) -> Factor {
        match self {
            Factor::A => Factor::B,
            Factor::B => Factor::A,
        }
    }
}

/// Local dimensions `(dA, dB)` of a bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub const fn new(a: usize, b: usize) -> Self {
        Dims { a, b }
    }

    pub fn total(self) -> usize {
        self.a * self.b
    }

    pub fn of(self, factor: Factor) -> usize {
        match factor {
            Factor::A => self.a,
            Factor::B => self.b,
        }
    }

    pub(crate) fn check_square(self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::dims(
                format!("{n}x{n} for {self}"),
                format!("{}x{}", m.nrows(), m.ncols()),
            ));
        }
        Ok(())
    }

    pub(crate) fn check_vector(self, x: &ComplexMatrix) -> Result<()> {
        if x.ncols() != 1 || x.nrows() != self.total() {
            return Err(Error::dims(
                format!("{}x1 for {self}", self.total()),
                format!("{}x{}", x.nrows(), x.ncols()),
            ));
        }
        Ok(())
    }
}

impl From<[usize; 2]> for Dims {
    fn from(d: [usize; 2]) -> Self {
        Dims::new(d[0], d[1])
    }
}

impl From<Dims> for [usize; 2] {
    fn from(d: Dims) -> Self {
        [d.a, d.b]
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.a, self.b)
    }
}

impl std::str::FromStr for Dims {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected <dA>x<dB>, got {s:?}"))?;
        let a: usize = a.trim().parse().map_err(|e| format!("bad dA in {s:?}: {e}"))?;
        let b: usize = b.trim().parse().map_err(|e| format!("bad dB in {s:?}: {e}"))?;
        if a == 0 || b == 0 {
            return Err(format!("dimensions must be positive, got {s:?}"));
        }
        Ok(Dims::new(a, b))
    }
}

// ---------------------------------------------------------------------------
// Constructors

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Spin observable `n . sigma` along a (not necessarily unit) axis.
pub fn spin_along(axis: [f64; 3]) -> ComplexMatrix {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    pauli_x() * c64(axis[0] / norm, 0.0)
        + pauli_y() * c64(axis[1] / norm, 0.0)
        + pauli_z() * c64(axis[2] / norm, 0.0)
}

pub fn diag(entries: &[f64]) -> ComplexMatrix {
    let d = DVector::from_iterator(entries.len(), entries.iter().map(|&x| c64(x, 0.0)));
    ComplexMatrix::from_diagonal(&d)
}

/// Computational basis vector `|i>` in dimension `n`.
pub fn ket(n: usize, i: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(n, 1);
    v[(i, 0)] = ONE;
    v
}

pub fn column(entries: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(entries.len(), 1, entries)
}

/// Matrix unit `|i><j|`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Normalized rank-1 projection `x x* / |x|^2`.
pub fn projector(x: &ComplexMatrix) -> ComplexMatrix {
    let nrm2 = x.norm_squared();
    x * x.adjoint() / c64(nrm2, 0.0)
}

/// Singlet `(|01> - |10>)/sqrt(2)`.
pub fn singlet() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    column(&[ZERO, c64(s, 0.0), c64(-s, 0.0), ZERO])
}

/// Triplet `(|01> + |10>)/sqrt(2)`.
pub fn triplet() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    column(&[ZERO, c64(s, 0.0), c64(s, 0.0), ZERO])
}

/// Eigenprojections `(P+, P-)` of a 2x2 Hermitian involution such as `sigma_a`.
pub fn spin_projections(sigma: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let half = c64(0.5, 0.0);
    let id = identity(sigma.nrows());
    ((&id + sigma) * half, (&id - sigma) * half)
}

// ---------------------------------------------------------------------------
// Elementary operations

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Trace inner product `<A, B> = Tr(A* B)`.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Frobenius norm of `M - M*`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Kronecker product; `(A (x) B)(C (x) D) = AC (x) BD`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Lift an operator on one factor to the composite space.
pub fn lift(op: &ComplexMatrix, factor: Factor, dims: Dims) -> Result<ComplexMatrix> {
    let d = dims.of(factor);
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::dims(
            format!("{d}x{d} on factor {factor:?}"),
            format!("{}x{}", op.nrows(), op.ncols()),
        ));
    }
    Ok(match factor {
        Factor::A => tensor_product(op, &identity(dims.b)),
        Factor::B => tensor_product(&identity(dims.a), op),
    })
}

/// Partial trace keeping `keep`: `Tr(Tr_B(M) X) = Tr(M (X (x) I))`.
pub fn partial_trace(m: &ComplexMatrix, dims: Dims, keep: Factor) -> Result<ComplexMatrix> {
    dims.check_square(m)?;
    let (da, db) = (dims.a, dims.b);
    Ok(match keep {
        Factor::A => ComplexMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()
        }),
        Factor::B => ComplexMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()
        }),
    })
}

/// Transpose on one tensor factor.
pub fn partial_transpose(m: &ComplexMatrix, dims: Dims, on: Factor) -> Result<ComplexMatrix> {
    dims.check_square(m)?;
    let db = dims.b;
    let n = dims.total();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        match on {
            Factor::B => m[(i * db + l, k * db + j)],
            Factor::A => m[(k * db + j, i * db + l)],
        }
    }))
}

// ---------------------------------------------------------------------------
// Spectral machinery

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> ComplexMatrix {
        self.eigenvectors.columns(k, 1).into_owned()
    }

    /// `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| c64(x, 0.0)),
        );
        &self.eigenvectors * ComplexMatrix::from_diagonal(&d) * self.eigenvectors.adjoint()
    }

    /// Apply a real function through the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| c64(f(x), 0.0)),
        );
        &self.eigenvectors * ComplexMatrix::from_diagonal(&d) * self.eigenvectors.adjoint()
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    if !m.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", m.nrows(), m.ncols())));
    }
    let residual = hermiticity_residual(m);
    if residual > 1e-10 * m.norm().max(1e-300) && residual > 1e-300 {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigenSystem { eigenvalues: vec![], eigenvectors: m.clone() });
    }
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigenSystem { eigenvalues, eigenvectors })
}

/// Thin SVD with singular values sorted nonincreasing.
///
/// When `full_right` is set and the matrix is wide, it is padded with zero
/// rows so that `v` spans the whole domain (needed for nullspaces).
pub(crate) struct SortedSvd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

pub(crate) fn sorted_svd(m: &ComplexMatrix, full_right: bool) -> SortedSvd {
    let (rows, cols) = m.shape();
    let padded;
    let work = if full_right && rows < cols {
        padded = m.clone().resize_vertically(cols, ZERO);
        &padded
    } else {
        m
    };
    let svd = SVD::new(work.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v requested").adjoint();
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = ComplexMatrix::from_fn(rows, k, |r, c| u[(r, order[c])]);
    let v = ComplexMatrix::from_fn(cols, k, |r, c| v[(r, order[c])]);
    SortedSvd { u, s, v }
}

/// Singular values, nonincreasing.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub operator: f64,
    pub trace: f64,
    pub frobenius: f64,
}

pub fn norms(m: &ComplexMatrix) -> Norms {
    let s = singular_values(m);
    Norms {
        operator: s.first().copied().unwrap_or(0.0),
        trace: s.iter().sum(),
        frobenius: m.norm(),
    }
}

pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Numerical rank with threshold `rel_tol * sigma_max`.
pub fn rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top <= f64::MIN_POSITIVE {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis (as columns) of the nullspace of `m`.
///
/// A singular value counts as zero when it is at most `rel_tol` times
/// `max(sigma_max, scale)`; `scale` keeps an identically vanishing map from
/// promoting rounding noise to rank.
pub fn nullspace(m: &ComplexMatrix, rel_tol: f64, scale: f64) -> ComplexMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(cols);
    }
    let svd = sorted_svd(m, true);
    let top = svd.s.first().copied().unwrap_or(0.0).max(scale);
    let threshold = rel_tol * top;
    let null: Vec<usize> = (0..svd.s.len()).filter(|&k| svd.s[k] <= threshold).collect();
    ComplexMatrix::from_fn(cols, null.len(), |r, c| svd.v[(r, null[c])])
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return ComplexMatrix::zeros(rows, 0);
    }
    let svd = sorted_svd(m, false);
    let top = svd.s.first().copied().unwrap_or(0.0);
    if top <= f64::MIN_POSITIVE {
        return ComplexMatrix::zeros(rows, 0);
    }
    let keep = svd.s.iter().filter(|&&x| x > rel_tol * top).count();
    svd.u.columns(0, keep).into_owned()
}

/// Orthogonal projection onto the column space of `m`.
pub fn range_projection(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let q = column_space(m, rel_tol);
    &q * q.adjoint()
}

/// Extend orthonormal columns to a unitary of size `dim`.
pub fn complete_basis(columns: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    let mut basis: Vec<ComplexMatrix> =
        (0..columns.ncols()).map(|k| columns.columns(k, 1).into_owned()).collect();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = ket(dim, i);
        for _ in 0..2 {
            for b in &basis {
                let overlap = (b.adjoint() * &v)[(0, 0)];
                v -= b * overlap;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-6 {
            basis.push(v / c64(nrm, 0.0));
        }
    }
    ComplexMatrix::from_fn(dim, dim, |r, c| basis[c][(r, 0)])
}

// ---------------------------------------------------------------------------
// Schmidt decomposition

/// `x = sum_i c_i a_i (x) b_i` with nonincreasing `c_i >= 0`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub dims: Dims,
    /// All `min(dA, dB)` coefficients, including vanishing ones.
    pub coefficients: Vec<f64>,
    /// Left vectors as columns (`dA x min(dA,dB)`).
    pub left: ComplexMatrix,
    /// Right vectors as columns (`dB x min(dA,dB)`).
    pub right: ComplexMatrix,
    /// Number of coefficients above `RANK_TOL * c_max`.
    pub rank: usize,
}

impl SchmidtDecomposition {
    pub fn left_vector(&self, i: usize) -> ComplexMatrix {
        self.left.columns(i, 1).into_owned()
    }

    pub fn right_vector(&self, i: usize) -> ComplexMatrix {
        self.right.columns(i, 1).into_owned()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut x = ComplexMatrix::zeros(self.dims.total(), 1);
        for (i, &c) in self.coefficients.iter().enumerate() {
            x += tensor_product(&self.left_vector(i), &self.right_vector(i)) * c64(c, 0.0);
        }
        x
    }
}

/// Coefficient matrix `C[i][j] = x[i*dB + j]`.
pub(crate) fn coefficient_matrix(x: &ComplexMatrix, dims: Dims) -> ComplexMatrix {
    ComplexMatrix::from_fn(dims.a, dims.b, |i, j| x[(i * dims.b + j, 0)])
}

pub fn schmidt_decompose(x: &ComplexMatrix, dims: Dims) -> Result<SchmidtDecomposition> {
    dims.check_vector(x)?;
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let svd = sorted_svd(&coefficient_matrix(x, dims), false);
    let k = dims.a.min(dims.b);
    let top = svd.s[0];
    let rank = svd.s.iter().filter(|&&c| c > RANK_TOL * top).count();
    // C = U S V*, so x = sum_k s_k u_k (x) conj(v_k).
    let right = svd.v.columns(0, k).map(|z| z.conj());
    Ok(SchmidtDecomposition {
        dims,
        coefficients: svd.s[..k].to_vec(),
        left: svd.u.columns(0, k).into_owned(),
        right,
        rank,
    })
}

pub fn schmidt_rank(x: &ComplexMatrix, dims: Dims) -> Result<usize> {
    Ok(schmidt_decompose(x, dims)?.rank)
}

// ---------------------------------------------------------------------------
// Matrix spans under the trace inner product

/// Orthonormal basis of a linear span of square matrices, grown incrementally.
#[derive(Clone, Debug)]
pub(crate) struct MatrixSpan {
    dim: usize,
    basis: Vec<ComplexMatrix>,
}

impl MatrixSpan {
    pub fn new(dim: usize) -> Self {
        MatrixSpan { dim, basis: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() >= self.dim * self.dim
    }

    pub fn into_basis(self) -> Vec<ComplexMatrix> {
        self.basis
    }

    /// Component of `m` orthogonal to the span (two Gram-Schmidt passes).
    pub fn orthogonal_part(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = trace_inner(b, &r);
                r -= b * c;
            }
        }
        r
    }

    /// Add `m` when it leaves the span by more than `rel_tol * |m|`.
    pub fn try_add(&mut self, m: &ComplexMatrix, rel_tol: f64) -> Option<&ComplexMatrix> {
        let scale = m.norm();
        if scale == 0.0 || self.is_full() {
            return None;
        }
        let r = self.orthogonal_part(m);
        let nrm = r.norm();
        if nrm <= rel_tol * scale {
            return None;
        }
        self.basis.push(r / c64(nrm, 0.0));
        self.basis.last()
    }
}

/// Distance from `m` to the span of an orthonormal matrix basis.
pub fn distance_to_span(basis: &[ComplexMatrix], m: &ComplexMatrix) -> f64 {
    let mut r = m.clone();
    for _ in 0..2 {
        for b in basis {
            let c = trace_inner(b, &r);
            r -= b * c;
        }
    }
    r.norm()
}

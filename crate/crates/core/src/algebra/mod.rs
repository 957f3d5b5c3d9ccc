//! Finitely generated von Neumann algebras acting on `C^n`.
//!
//! In finite dimensions a von Neumann algebra is a `*`-closed linear span of
//! matrices that contains the identity and is closed under products. An
//! [`OperatorAlgebra`] stores its generators together with a basis that is
//! orthonormal for `<A, B> = Tr(A* B)`; every query is linear algebra over
//! that basis.

mod net;
mod support;

pub use net::LatticeNet;
pub use support::{
    is_abelian_projection, left_ideal_basis, support_from_left_ideal, support_projection,
    AbelianCheck,
};

use crate::error::{Error, Result};
use crate::numerics::{
    c64, commutator, distance_to_span, hermiticity_residual, identity, lift, matrix_unit, nullspace,
    partial_trace, rank, trace_inner, ComplexMatrix, Dims, Factor, MatrixSpan, I, RANK_TOL,
};

/// Relative tolerance for span membership.
pub const SPAN_TOL: f64 = 1e-9;

/// Known shapes that allow exact closed-form answers downstream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    /// Multiples of the identity.
    Scalars,
    /// All of `B(H)`.
    Full,
    /// `B(H_A) (x) I` or `I (x) B(H_B)`.
    TensorFactor { factor: Factor, dims: Dims },
    General,
}

#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    ambient_dim: usize,
    generators: Vec<ComplexMatrix>,
    basis: Vec<ComplexMatrix>,
    structure: Structure,
}

/// Residuals of the defining closure properties.
#[derive(Clone, Copy, Debug)]
pub struct ClosureResiduals {
    pub adjoint: f64,
    pub product: f64,
    pub identity: f64,
}

impl OperatorAlgebra {
    pub(crate) fn from_parts(
        ambient_dim: usize,
        generators: Vec<ComplexMatrix>,
        basis: Vec<ComplexMatrix>,
        structure: Structure,
    ) -> Self {
        let structure = match structure {
            Structure::General if basis.len() == 1 => Structure::Scalars,
            Structure::General if basis.len() == ambient_dim * ambient_dim => Structure::Full,
            s => s,
        };
        OperatorAlgebra { ambient_dim, generators, basis, structure }
    }

    /// `span{I}`.
    pub fn scalars(n: usize) -> Self {
        let basis = vec![identity(n) / c64((n as f64).sqrt(), 0.0)];
        Self::from_parts(n, vec![], basis, Structure::Scalars)
    }

    /// `B(C^n)`, generated by the nearest-neighbour matrix units.
    pub fn full(n: usize) -> Self {
        let generators = (1..n).map(|i| matrix_unit(n, i - 1, i)).collect();
        let basis = (0..n)
            .flat_map(|i| (0..n).map(move |j| matrix_unit(n, i, j)))
            .collect();
        Self::from_parts(n, generators, basis, Structure::Full)
    }

    /// The full matrix algebra of one tensor factor, lifted to the composite space.
    pub fn tensor_factor(dims: Dims, factor: Factor) -> Self {
        let local = Self::full(dims.of(factor));
        let scale = c64((dims.of(factor.other()) as f64).sqrt(), 0.0);
        let lifted = |m: &ComplexMatrix| lift(m, factor, dims).expect("local dimension");
        let generators = local.generators.iter().map(lifted).collect();
        let basis = local.basis.iter().map(|b| lifted(b) / scale).collect();
        Self::from_parts(dims.total(), generators, basis, Structure::TensorFactor { factor, dims })
    }

    /// Diagonal (maximal abelian) algebra on `C^n`.
    pub fn diagonal(n: usize) -> Self {
        let basis: Vec<_> = (0..n).map(|i| matrix_unit(n, i, i)).collect();
        Self::from_parts(n, basis.clone(), basis, Structure::General)
    }

    /// Algebra generated by local operators on one factor, lifted.
    pub fn local(generators: &[ComplexMatrix], dims: Dims, factor: Factor) -> Result<Self> {
        let lifted = generators
            .iter()
            .map(|g| lift(g, factor, dims))
            .collect::<Result<Vec<_>>>()?;
        let alg = generate_algebra(&lifted, dims.total())?;
        if alg.basis.len() == dims.of(factor).pow(2) {
            return Ok(Self::tensor_factor(dims, factor));
        }
        Ok(alg)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Linear dimension of the algebra.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// Orthonormal basis under the trace inner product.
    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn contains_identity(&self) -> bool {
        self.distance_to(&identity(self.ambient_dim)) <= 1e-10
    }

    /// Frobenius distance from `m` to the algebra.
    pub fn distance_to(&self, m: &ComplexMatrix) -> f64 {
        distance_to_span(&self.basis, m)
    }

    pub fn contains(&self, m: &ComplexMatrix) -> bool {
        self.distance_to(m) <= SPAN_TOL * m.norm().max(1.0)
    }

    /// Orthogonal projection of `m` onto the algebra.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for b in &self.basis {
            p += b * trace_inner(b, m);
        }
        p
    }

    /// Orthonormal basis of Hermitian elements spanning the algebra.
    pub fn hermitian_basis(&self) -> Vec<ComplexMatrix> {
        let mut span = MatrixSpan::new(self.ambient_dim);
        let half = c64(0.5, 0.0);
        for b in &self.basis {
            let bd = b.adjoint();
            let re = (b + &bd) * half;
            let im = (b - &bd) * (-I * half);
            for cand in [re, im] {
                span.try_add(&cand, SPAN_TOL);
            }
        }
        span.into_basis()
            .into_iter()
            .map(|h| (&h + h.adjoint()) * half)
            .collect()
    }

    /// Generators plus the adjoints of the non-Hermitian ones.
    pub(crate) fn letters(&self) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(2 * self.generators.len());
        for g in &self.generators {
            out.push(g.clone());
            if hermiticity_residual(g) > 1e-12 * g.norm() {
                out.push(g.adjoint());
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        max_commutator(&self.basis, &self.basis) <= 1e-9
    }

    /// Largest Frobenius commutator between the two bases.
    pub fn commutation_residual(&self, other: &OperatorAlgebra) -> f64 {
        max_commutator(&self.basis, &other.basis)
    }

    /// Error unless every element commutes with every element of `other`.
    pub fn ensure_commutes(&self, other: &OperatorAlgebra) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::dims(self.ambient_dim, other.ambient_dim));
        }
        let residual = self.commutation_residual(other);
        if residual > 1e-10 {
            return Err(Error::NonCommuting { residual });
        }
        Ok(())
    }

    /// Maximum distance of either basis from the other span.
    pub fn span_distance(&self, other: &OperatorAlgebra) -> f64 {
        let a = self.basis.iter().map(|b| other.distance_to(b)).fold(0.0, f64::max);
        let b = other.basis.iter().map(|b| self.distance_to(b)).fold(0.0, f64::max);
        a.max(b)
    }

    pub fn same_span(&self, other: &OperatorAlgebra) -> bool {
        self.dimension() == other.dimension() && self.span_distance(other) <= SPAN_TOL
    }

    pub fn closure_residuals(&self) -> ClosureResiduals {
        let adjoint = self.basis.iter().map(|b| self.distance_to(&b.adjoint())).fold(0.0, f64::max);
        let mut product: f64 = 0.0;
        for x in &self.basis {
            for y in &self.basis {
                product = product.max(self.distance_to(&(x * y)));
            }
        }
        ClosureResiduals { adjoint, product, identity: self.distance_to(&identity(self.ambient_dim)) }
    }

    /// The local operators `a_k` with `basis_k = lift(a_k)`, when the whole
    /// algebra sits inside one tensor factor.
    pub fn local_basis(&self, dims: Dims, factor: Factor) -> Option<Vec<ComplexMatrix>> {
        if dims.total() != self.ambient_dim {
            return None;
        }
        let scale = c64(dims.of(factor.other()) as f64, 0.0);
        let mut out = Vec::with_capacity(self.basis.len());
        for b in &self.basis {
            let local = partial_trace(b, dims, factor).ok()? / scale;
            let back = lift(&local, factor, dims).ok()?;
            if (&back - b).norm() > SPAN_TOL {
                return None;
            }
            out.push(local);
        }
        Some(out)
    }
}

fn max_commutator(xs: &[ComplexMatrix], ys: &[ComplexMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in xs {
        for y in ys {
            worst = worst.max(commutator(x, y).norm());
        }
    }
    worst
}

/// Smallest `*`-closed unital algebra containing `generators`.
///
/// Grows the span by right-multiplying every new basis element with each
/// generator and adjoint until nothing leaves the span. Words in the
/// generators are reached this way, so the result is product-closed.
pub fn generate_algebra(generators: &[ComplexMatrix], ambient_dim: usize) -> Result<OperatorAlgebra> {
    let n = ambient_dim;
    for g in generators {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", g.nrows(), g.ncols())));
        }
    }
    let tmp = OperatorAlgebra {
        ambient_dim: n,
        generators: generators.to_vec(),
        basis: vec![],
        structure: Structure::General,
    };
    let letters = tmp.letters();

    let mut span = MatrixSpan::new(n);
    span.try_add(&identity(n), SPAN_TOL);
    let mut queue = std::collections::VecDeque::new();
    for l in &letters {
        if let Some(b) = span.try_add(l, SPAN_TOL) {
            queue.push_back(b.clone());
        }
    }
    // Each basis element is dequeued once, so the loop is bounded by n^2 pops.
    let mut pops = 0usize;
    while let Some(w) = queue.pop_front() {
        pops += 1;
        if span.is_full() || pops > n * n {
            break;
        }
        for l in &letters {
            if let Some(b) = span.try_add(&(&w * l), SPAN_TOL) {
                queue.push_back(b.clone());
            }
        }
    }
    Ok(OperatorAlgebra::from_parts(n, generators.to_vec(), span.into_basis(), Structure::General))
}

/// Restrict an orthonormal family of matrices to the common kernel of the
/// maps `X -> op(c, X)` for each constraint `c`.
fn common_kernel(
    mut space: Vec<ComplexMatrix>,
    constraints: &[ComplexMatrix],
    op: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
) -> Vec<ComplexMatrix> {
    for c in constraints {
        if space.is_empty() {
            break;
        }
        let n2 = c.len();
        let images: Vec<ComplexMatrix> = space.iter().map(|x| op(c, x)).collect();
        let stacked = ComplexMatrix::from_fn(n2, images.len(), |r, k| images[k].as_slice()[r]);
        let null = nullspace(&stacked, RANK_TOL, c.norm());
        space = (0..null.ncols())
            .map(|col| {
                let mut m = ComplexMatrix::zeros(c.nrows(), c.ncols());
                for (j, x) in space.iter().enumerate() {
                    m += x * null[(j, col)];
                }
                m
            })
            .collect();
    }
    space
}

/// `R' = {X : XG = GX for every generator G}`.
///
/// Commuting with the generators and their adjoints is enough to commute
/// with the whole generated algebra.
pub fn commutant(r: &OperatorAlgebra) -> OperatorAlgebra {
    let n = r.ambient_dim;
    match r.structure {
        Structure::Scalars => return OperatorAlgebra::full(n),
        Structure::Full => return OperatorAlgebra::scalars(n),
        Structure::TensorFactor { factor, dims } => {
            return OperatorAlgebra::tensor_factor(dims, factor.other())
        }
        Structure::General => {}
    }
    let all = OperatorAlgebra::full(n).basis;
    let basis = common_kernel(all, &r.letters(), |g, x| g * x - x * g);
    OperatorAlgebra::from_parts(n, basis.clone(), basis, Structure::General)
}

/// Same as [`commutant`] but always solved numerically, ignoring any known
/// structure. Used to cross-check the closed forms.
pub fn commutant_numeric(r: &OperatorAlgebra) -> OperatorAlgebra {
    let n = r.ambient_dim;
    let all = OperatorAlgebra::full(n).basis;
    let basis = common_kernel(all, &r.letters(), |g, x| g * x - x * g);
    OperatorAlgebra::from_parts(n, basis.clone(), basis, Structure::General)
}

/// Center `R ∩ R'` and whether `R` is a factor.
pub fn center_and_factor(r: &OperatorAlgebra) -> (OperatorAlgebra, bool) {
    let n = r.ambient_dim;
    let basis = common_kernel(r.basis.clone(), &r.letters(), |g, x| g * x - x * g);
    let is_factor = basis.len() == 1;
    (OperatorAlgebra::from_parts(n, basis.clone(), basis, Structure::General), is_factor)
}

fn orbit_matrix(x: &ComplexMatrix, r: &OperatorAlgebra) -> Result<ComplexMatrix> {
    let n = r.ambient_dim;
    if x.nrows() != n || x.ncols() != 1 {
        return Err(Error::dims(format!("{n}x1"), format!("{}x{}", x.nrows(), x.ncols())));
    }
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let cols: Vec<ComplexMatrix> = r.basis.iter().map(|b| b * x).collect();
    Ok(ComplexMatrix::from_fn(n, cols.len(), |i, k| cols[k][(i, 0)]))
}

/// `x` is cyclic for `R` when `{Ax : A in R}` spans the whole space.
pub fn is_cyclic_vector(x: &ComplexMatrix, r: &OperatorAlgebra) -> Result<bool> {
    let orbit = orbit_matrix(x, r)?;
    Ok(rank(&orbit, RANK_TOL) == r.ambient_dim)
}

/// `x` is separating for `R` when `Ax = 0` forces `A = 0` for `A` in `R`.
pub fn is_separating_vector(x: &ComplexMatrix, r: &OperatorAlgebra) -> Result<bool> {
    let orbit = orbit_matrix(x, r)?;
    Ok(rank(&orbit, RANK_TOL) == r.dimension())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ket, pauli_x, pauli_z, singlet, tensor_product};

    fn dims22() -> Dims {
        Dims::new(2, 2)
    }

    #[test]
    fn generate_examples() {
        let a = generate_algebra(&[pauli_z()], 2).unwrap();
        assert_eq!(a.dimension(), 2);
        assert!(a.contains(&identity(2)) && a.contains(&pauli_z()));
        assert!(a.is_abelian());

        let b = generate_algebra(&[pauli_x(), pauli_z()], 2).unwrap();
        assert_eq!(b.dimension(), 4);
        assert_eq!(b.structure(), Structure::Full);

        let c = generate_algebra(&[], 3).unwrap();
        assert_eq!(c.dimension(), 1);
        assert_eq!(c.structure(), Structure::Scalars);
    }

    #[test]
    fn generate_rejects_bad_dimension() {
        assert!(generate_algebra(&[identity(3)], 2).is_err());
    }

    #[test]
    fn generated_algebra_is_closed() {
        let g = matrix_unit(3, 0, 1);
        let a = generate_algebra(&[g], 3).unwrap();
        // E01 and E10 generate M_2 (+) C
        assert_eq!(a.dimension(), 5);
        let r = a.closure_residuals();
        assert!(r.adjoint < 1e-9 && r.product < 1e-9 && r.identity < 1e-10);
    }

    #[test]
    fn commutant_of_tensor_factor_numerically() {
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        let c = commutant_numeric(&ra);
        assert_eq!(c.dimension(), 4);
        let rb = OperatorAlgebra::tensor_factor(dims22(), Factor::B);
        assert!(c.same_span(&rb));
    }

    #[test]
    fn commutant_extremes() {
        assert_eq!(commutant_numeric(&OperatorAlgebra::scalars(3)).dimension(), 9);
        assert_eq!(commutant_numeric(&OperatorAlgebra::full(3)).dimension(), 1);
    }

    #[test]
    fn center_examples() {
        let (c, f) = center_and_factor(&OperatorAlgebra::tensor_factor(dims22(), Factor::A));
        assert_eq!(c.dimension(), 1);
        assert!(f);
        let d = OperatorAlgebra::diagonal(2);
        let (c, f) = center_and_factor(&d);
        assert!(!f);
        assert!(c.same_span(&d));
        assert!(center_and_factor(&OperatorAlgebra::full(3)).1);
    }

    #[test]
    fn cyclic_and_separating_examples() {
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        let s = singlet();
        let p = ket(4, 0);
        assert!(is_cyclic_vector(&s, &ra).unwrap());
        assert!(!is_cyclic_vector(&p, &ra).unwrap());
        assert!(is_cyclic_vector(&p, &OperatorAlgebra::full(4)).unwrap());
        assert!(is_separating_vector(&s, &ra).unwrap());
        assert!(!is_separating_vector(&p, &ra).unwrap());
        assert!(is_separating_vector(&p, &OperatorAlgebra::scalars(4)).unwrap());
        // (I - |0><0|) (x) I annihilates |00>
        let k = tensor_product(&matrix_unit(2, 1, 1), &identity(2));
        assert!((k * &p).norm() < 1e-15);
    }

    #[test]
    fn cyclic_rejects_zero() {
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        let z = ComplexMatrix::zeros(4, 1);
        assert!(matches!(is_cyclic_vector(&z, &ra), Err(Error::ZeroVector)));
        assert!(matches!(is_separating_vector(&z, &ra), Err(Error::ZeroVector)));
    }

    #[test]
    fn hermitian_basis_spans_algebra() {
        let a = OperatorAlgebra::tensor_factor(Dims::new(2, 3), Factor::B);
        let h = a.hermitian_basis();
        assert_eq!(h.len(), a.dimension());
        for m in &h {
            assert!(hermiticity_residual(m) < 1e-14);
            assert!(a.contains(m));
        }
    }

    #[test]
    fn local_basis_recovers_factor() {
        let dims = Dims::new(2, 3);
        let rb = OperatorAlgebra::tensor_factor(dims, Factor::B);
        assert_eq!(rb.local_basis(dims, Factor::B).unwrap().len(), 9);
        assert!(rb.local_basis(dims, Factor::A).is_none());
    }
}

//! States as density operators, their distances and product structure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{OperatorAlgebra, Structure};
use crate::error::{Error, Result};
use crate::numerics::{
    c64, hermitian_eig, hermiticity_residual, identity, operator_norm, partial_trace, projector,
    tensor_product, trace_norm, ComplexMatrix, Dims, Factor,
};

/// Tolerance used when validating densities.
pub const DENSITY_TOL: f64 = 1e-10;

/// Default tolerance for [`is_product_state`].
pub const PRODUCT_TOL: f64 = 1e-8;

/// A normalized positive functional `rho(Z) = Tr(D Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFunctional {
    density: ComplexMatrix,
    dims: Option<Dims>,
    label: Option<String>,
}

/// Check that `d` is Hermitian, positive semidefinite and of unit trace.
pub fn validate_density(d: &ComplexMatrix) -> Result<()> {
    if !d.is_square() || d.nrows() == 0 {
        return Err(Error::InvalidDensity(format!("shape {}x{}", d.nrows(), d.ncols())));
    }
    let herm = hermiticity_residual(d);
    if herm > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("not Hermitian (residual {herm:.3e})")));
    }
    let tr = d.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
    }
    let min = hermitian_eig(d)?.min();
    if min < -DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

impl StateFunctional {
    pub fn new(density: ComplexMatrix) -> Result<Self> {
        validate_density(&density)?;
        let density = (&density + density.adjoint()) * c64(0.5, 0.0);
        Ok(StateFunctional { density, dims: None, label: None })
    }

    /// A state on a bipartite space.
    pub fn bipartite(density: ComplexMatrix, dims: Dims) -> Result<Self> {
        Self::new(density)?.with_dims(dims)
    }

    pub fn with_dims(mut self, dims: Dims) -> Result<Self> {
        dims.check_square(&self.density)?;
        self.dims = Some(dims);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// `rho_x` with density `x x* / |x|^2`.
    pub fn vector_state(x: &ComplexMatrix) -> Result<Self> {
        if x.ncols() != 1 {
            return Err(Error::dims("column vector", format!("{}x{}", x.nrows(), x.ncols())));
        }
        if x.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(projector(x))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let density = identity(n) / c64(n as f64, 0.0);
        StateFunctional { density, dims: None, label: None }
    }

    pub fn product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        validate_density(a)?;
        validate_density(b)?;
        Self::bipartite(tensor_product(a, b), Dims::new(a.nrows(), b.nrows()))
    }

    pub fn ambient_dim(&self) -> usize {
        self.density.nrows()
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    pub fn into_density(self) -> ComplexMatrix {
        self.density
    }

    pub fn dims(&self) -> Option<Dims> {
        self.dims
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// `Tr(D Z)`.
    pub fn expectation(&self, z: &ComplexMatrix) -> Result<Complex64> {
        expectation(self, z)
    }

    /// Reduced density on one factor.
    pub fn reduced(&self, dims: Dims, keep: Factor) -> Result<ComplexMatrix> {
        partial_trace(&self.density, dims, keep)
    }

    pub fn purity(&self) -> f64 {
        (&self.density * &self.density).trace().re
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= 1e-9
    }
}

/// `rho(Z) = Tr(D Z)`.
pub fn expectation(rho: &StateFunctional, z: &ComplexMatrix) -> Result<Complex64> {
    let n = rho.ambient_dim();
    if z.nrows() != n || z.ncols() != n {
        return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", z.nrows(), z.ncols())));
    }
    Ok((&rho.density * z).trace())
}

pub fn vector_state(x: &ComplexMatrix) -> Result<StateFunctional> {
    StateFunctional::vector_state(x)
}

/// Norm distance between two states restricted to an algebra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormDistance {
    pub value: f64,
    /// Set when `value` is only a certified lower bound.
    pub lower_bound: bool,
}

/// `sup{|rho1(Z) - rho2(Z)| : Z = Z* in R, |Z| <= 1}`.
///
/// Exact for `B(H)`, for either tensor factor and for the scalars. For other
/// algebras the supremum is bounded from below by the Hermitian basis
/// elements scaled to unit operator norm.
pub fn norm_distance(
    rho1: &StateFunctional,
    rho2: &StateFunctional,
    r: &OperatorAlgebra,
) -> Result<NormDistance> {
    let n = r.ambient_dim();
    if rho1.ambient_dim() != n || rho2.ambient_dim() != n {
        return Err(Error::dims(n, format!("{} and {}", rho1.ambient_dim(), rho2.ambient_dim())));
    }
    let diff = &rho1.density - &rho2.density;
    let exact = |value| Ok(NormDistance { value, lower_bound: false });
    match r.structure() {
        Structure::Full => exact(trace_norm(&diff)),
        Structure::Scalars => exact(0.0),
        Structure::TensorFactor { factor, dims } => {
            exact(trace_norm(&partial_trace(&diff, dims, factor)?))
        }
        Structure::General => {
            let value = r
                .hermitian_basis()
                .iter()
                .map(|h| (&diff * h).trace().norm() / operator_norm(h))
                .fold(0.0, f64::max);
            Ok(NormDistance { value, lower_bound: true })
        }
    }
}

/// Whether `rho(XY) = rho(X) rho(Y)` on all basis pairs of the two algebras.
pub fn is_product_state(
    rho: &StateFunctional,
    ra: &OperatorAlgebra,
    rb: &OperatorAlgebra,
    tol: f64,
) -> Result<bool> {
    Ok(product_residual(rho, ra, rb)? <= tol)
}

/// `max |rho(X_j Y_k) - rho(X_j) rho(Y_k)|` over basis pairs.
pub fn product_residual(
    rho: &StateFunctional,
    ra: &OperatorAlgebra,
    rb: &OperatorAlgebra,
) -> Result<f64> {
    ra.ensure_commutes(rb)?;
    if rho.ambient_dim() != ra.ambient_dim() {
        return Err(Error::dims(ra.ambient_dim(), rho.ambient_dim()));
    }
    let d = &rho.density;
    let ea: Vec<Complex64> = ra.basis().iter().map(|x| (d * x).trace()).collect();
    let eb: Vec<Complex64> = rb.basis().iter().map(|y| (d * y).trace()).collect();
    let mut worst: f64 = 0.0;
    for (x, ex) in ra.basis().iter().zip(&ea) {
        let dx = d * x;
        for (y, ey) in rb.basis().iter().zip(&eb) {
            let joint = (&dx * y).trace();
            worst = worst.max((joint - ex * ey).norm());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Product certificates

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: f64,
    #[serde(with = "crate::formats::matrix_serde")]
    pub a: ComplexMatrix,
    #[serde(with = "crate::formats::matrix_serde")]
    pub b: ComplexMatrix,
}

/// An explicit convex decomposition `sum_k w_k rho_A^k (x) rho_B^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCertificate {
    pub dims: Dims,
    pub terms: Vec<ProductTerm>,
}

impl ProductCertificate {
    pub fn new(dims: Dims, terms: Vec<ProductTerm>) -> Self {
        ProductCertificate { dims, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dims.total();
        let mut out = ComplexMatrix::zeros(n, n);
        for t in &self.terms {
            out += tensor_product(&t.a, &t.b) * c64(t.weight, 0.0);
        }
        out
    }

    /// Frobenius distance between the reconstruction and `target`.
    pub fn residual(&self, target: &ComplexMatrix) -> f64 {
        (self.reconstruct() - target).norm()
    }

    /// Largest disagreement with `rho` on products `X Y`, `X` in `ra`, `Y`
    /// in `rb`. Both algebras must lie in their respective tensor factors.
    pub fn residual_on(
        &self,
        rho: &StateFunctional,
        ra: &OperatorAlgebra,
        rb: &OperatorAlgebra,
    ) -> f64 {
        let rec = self.reconstruct();
        let diff = &rec - rho.density();
        let mut worst: f64 = 0.0;
        for x in ra.basis() {
            let dx = &diff * x;
            for y in rb.basis() {
                worst = worst.max((&dx * y).trace().norm());
            }
        }
        worst
    }

    /// Weights nonnegative and summing to one; every factor a valid density.
    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.terms.iter().map(|t| t.weight).sum();
        if self.terms.iter().any(|t| t.weight < -1e-12) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDensity(format!("certificate weights sum to {total}")));
        }
        for t in &self.terms {
            if t.a.nrows() != self.dims.a || t.b.nrows() != self.dims.b {
                return Err(Error::dims(self.dims, format!("{}x{}", t.a.nrows(), t.b.nrows())));
            }
            validate_density(&t.a)?;
            validate_density(&t.b)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diag, ket, pauli_z, singlet};

    fn dims22() -> Dims {
        Dims::new(2, 2)
    }

    fn singlet_state() -> StateFunctional {
        StateFunctional::vector_state(&singlet()).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let rho = singlet_state();
        assert!((rho.expectation(&identity(4)).unwrap() - c64(1.0, 0.0)).norm() < 1e-15);
        let zz = tensor_product(&pauli_z(), &pauli_z());
        assert!((rho.expectation(&zz).unwrap() - c64(-1.0, 0.0)).norm() < 1e-15);
        let zi = tensor_product(&pauli_z(), &identity(2));
        assert!(rho.expectation(&zi).unwrap().norm() < 1e-15);
        assert!(rho.expectation(&identity(3)).is_err());
    }

    #[test]
    fn vector_state_examples() {
        let r = StateFunctional::vector_state(&ket(2, 0)).unwrap();
        assert_eq!(r.density(), &projector(&ket(2, 0)));
        let r2 = StateFunctional::vector_state(&(ket(2, 0) * c64(2.0, 0.0))).unwrap();
        assert!((r2.density() - r.density()).norm() < 1e-15);
        let e = hermitian_eig(singlet_state().density()).unwrap();
        assert!((e.max() - 1.0).abs() < 1e-14 && e.eigenvalues[..3].iter().all(|x| x.abs() < 1e-14));
        assert!(matches!(
            StateFunctional::vector_state(&ComplexMatrix::zeros(2, 1)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn invalid_densities_rejected() {
        assert!(StateFunctional::new(diag(&[0.5, 0.6])).is_err());
        assert!(StateFunctional::new(diag(&[1.5, -0.5])).is_err());
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(StateFunctional::new(m).is_err());
    }

    #[test]
    fn norm_distance_examples() {
        let full = OperatorAlgebra::full(4);
        let s = singlet_state();
        assert_eq!(norm_distance(&s, &s, &full).unwrap().value, 0.0);

        let p00 = StateFunctional::vector_state(&ket(4, 0)).unwrap();
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        let d = norm_distance(&s, &p00, &ra).unwrap();
        assert!((d.value - 1.0).abs() < 1e-14 && !d.lower_bound);

        let z0 = StateFunctional::vector_state(&ket(2, 0)).unwrap();
        let z1 = StateFunctional::vector_state(&ket(2, 1)).unwrap();
        let d = norm_distance(&z0, &z1, &OperatorAlgebra::full(2)).unwrap();
        assert!((d.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn general_algebra_distance_is_flagged_lower_bound() {
        let z0 = StateFunctional::vector_state(&ket(2, 0)).unwrap();
        let z1 = StateFunctional::vector_state(&ket(2, 1)).unwrap();
        let d = norm_distance(&z0, &z1, &OperatorAlgebra::diagonal(2)).unwrap();
        assert!(d.lower_bound);
        // sigma_z is in the diagonal algebra and separates the states fully,
        // but the basis-element bound only sees the diagonal units.
        assert!(d.value >= 1.0 - 1e-12 && d.value <= 2.0 + 1e-12);
    }

    #[test]
    fn product_state_examples() {
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        let rb = OperatorAlgebra::tensor_factor(dims22(), Factor::B);
        let prod = StateFunctional::product(&diag(&[0.3, 0.7]), &diag(&[0.9, 0.1])).unwrap();
        assert!(is_product_state(&prod, &ra, &rb, PRODUCT_TOL).unwrap());
        assert!(!is_product_state(&singlet_state(), &ra, &rb, PRODUCT_TOL).unwrap());
        let corr = StateFunctional::new(diag(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert!(!is_product_state(&corr, &ra, &rb, PRODUCT_TOL).unwrap());
        assert!(matches!(
            is_product_state(&prod, &ra, &ra, PRODUCT_TOL),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn certificate_reconstruction() {
        let cert = ProductCertificate::new(
            dims22(),
            vec![
                ProductTerm { weight: 0.5, a: projector(&ket(2, 0)), b: projector(&ket(2, 1)) },
                ProductTerm { weight: 0.5, a: projector(&ket(2, 1)), b: projector(&ket(2, 0)) },
            ],
        );
        cert.validate().unwrap();
        assert!(cert.residual(&diag(&[0.0, 0.5, 0.5, 0.0])) < 1e-15);
    }
}

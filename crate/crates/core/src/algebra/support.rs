//! Support projections, left ideals of states and abelian projections.

use super::{center_and_factor, commutant, OperatorAlgebra, SPAN_TOL};
use crate::error::{Error, Result};
use crate::numerics::{
    c64, commutator, hermitian_eig, hermiticity_residual, identity, range_projection, trace_inner,
    ComplexMatrix, MatrixSpan, RANK_TOL,
};
use crate::states::StateFunctional;

/// Threshold on `rho(A* A)` for membership in the left ideal.
pub const IDEAL_TOL: f64 = 1e-10;

/// Smallest projection `S` in `R` with `rho(S) = 1`.
///
/// Computed as the projection onto the `R'`-orbit of the range of the
/// density operator; that subspace is `R'`-invariant, so its projection lies
/// in `R'' = R`.
pub fn support_projection(rho: &StateFunctional, r: &OperatorAlgebra) -> Result<ComplexMatrix> {
    let n = r.ambient_dim();
    if rho.ambient_dim() != n {
        return Err(Error::dims(n, rho.ambient_dim()));
    }
    let eig = hermitian_eig(rho.density())?;
    let top = eig.max();
    let range: Vec<ComplexMatrix> = (0..n)
        .filter(|&k| eig.eigenvalues[k] > RANK_TOL * top)
        .map(|k| eig.vector(k))
        .collect();
    let rc = commutant(r);
    let cols: Vec<ComplexMatrix> = rc
        .basis()
        .iter()
        .flat_map(|b| range.iter().map(move |v| b * v))
        .collect();
    let orbit = ComplexMatrix::from_fn(n, cols.len(), |i, k| cols[k][(i, 0)]);
    Ok(range_projection(&orbit, RANK_TOL))
}

/// Basis of the left ideal `{A in R : rho(A* A) = 0}`.
///
/// The ideal is the nullspace of the Gram form `G_jk = rho(B_j* B_k)` over
/// the algebra basis. Returned elements have unit Frobenius norm.
pub fn left_ideal_basis(rho: &StateFunctional, r: &OperatorAlgebra) -> Result<Vec<ComplexMatrix>> {
    let n = r.ambient_dim();
    if rho.ambient_dim() != n {
        return Err(Error::dims(n, rho.ambient_dim()));
    }
    let d = rho.density();
    let basis = r.basis();
    let k = basis.len();
    // G_jk = Tr(D B_j* B_k) = <B_j, B_k D>
    let gram = ComplexMatrix::from_fn(k, k, |j, l| trace_inner(&basis[j], &(&basis[l] * d)));
    let gram = (&gram + gram.adjoint()) * c64(0.5, 0.0);
    let eig = hermitian_eig(&gram)?;
    let out = (0..k)
        .filter(|&i| eig.eigenvalues[i] <= IDEAL_TOL)
        .map(|i| {
            let mut a = ComplexMatrix::zeros(n, n);
            for (j, b) in basis.iter().enumerate() {
                a += b * eig.eigenvectors[(j, i)];
            }
            a
        })
        .collect();
    Ok(out)
}

/// `I` minus the projection onto the joint range of the adjoints of the
/// left-ideal elements. Agrees with [`support_projection`].
pub fn support_from_left_ideal(rho: &StateFunctional, r: &OperatorAlgebra) -> Result<ComplexMatrix> {
    let n = r.ambient_dim();
    let ideal = left_ideal_basis(rho, r)?;
    if ideal.is_empty() {
        return Ok(identity(n));
    }
    let cols: Vec<ComplexMatrix> = ideal
        .iter()
        .flat_map(|a| {
            let ad = a.adjoint();
            (0..n).map(move |c| ad.columns(c, 1).into_owned())
        })
        .collect();
    let m = ComplexMatrix::from_fn(n, cols.len(), |i, k| cols[k][(i, 0)]);
    Ok(identity(n) - range_projection(&m, RANK_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbelianCheck {
    /// `P R P` is commutative.
    pub abelian: bool,
    /// Reported for factors only: `P R P` is one-dimensional.
    pub atom: Option<bool>,
}

/// Whether `P` is an abelian projection of `R`.
pub fn is_abelian_projection(p: &ComplexMatrix, r: &OperatorAlgebra) -> Result<AbelianCheck> {
    let n = r.ambient_dim();
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", p.nrows(), p.ncols())));
    }
    if p.norm() <= SPAN_TOL {
        return Err(Error::NotProjection("zero operator".into()));
    }
    if hermiticity_residual(p) > SPAN_TOL {
        return Err(Error::NotProjection("not self-adjoint".into()));
    }
    if (p * p - p).norm() > SPAN_TOL {
        return Err(Error::NotProjection("not idempotent".into()));
    }
    if !r.contains(p) {
        return Err(Error::NotProjection("not an element of the algebra".into()));
    }
    let compressed: Vec<ComplexMatrix> = r.basis().iter().map(|b| p * b * p).collect();
    let mut abelian = true;
    'outer: for (j, x) in compressed.iter().enumerate() {
        for y in &compressed[j + 1..] {
            if commutator(x, y).norm() > SPAN_TOL {
                abelian = false;
                break 'outer;
            }
        }
    }
    let (_, is_factor) = center_and_factor(r);
    let atom = is_factor.then(|| {
        let mut span = MatrixSpan::new(n);
        for c in &compressed {
            span.try_add(c, SPAN_TOL);
        }
        span.len() == 1
    });
    Ok(AbelianCheck { abelian, atom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ket, projector, singlet, tensor_product, Dims, Factor};

    #[test]
    fn support_examples() {
        let full = OperatorAlgebra::full(4);
        let mixed = StateFunctional::maximally_mixed(4);
        assert!((support_projection(&mixed, &full).unwrap() - identity(4)).norm() < 1e-12);

        let pure = StateFunctional::vector_state(&ket(2, 0)).unwrap();
        let s = support_projection(&pure, &OperatorAlgebra::full(2)).unwrap();
        assert!((s - projector(&ket(2, 0))).norm() < 1e-12);

        let ra = OperatorAlgebra::tensor_factor(Dims::new(2, 2), Factor::A);
        let sing = StateFunctional::vector_state(&singlet()).unwrap();
        let s = support_projection(&sing, &ra).unwrap();
        assert!((s - identity(4)).norm() < 1e-12);
    }

    #[test]
    fn left_ideal_examples() {
        let full = OperatorAlgebra::full(3);
        assert!(left_ideal_basis(&StateFunctional::maximally_mixed(3), &full).unwrap().is_empty());

        let pure = StateFunctional::vector_state(&ket(2, 0)).unwrap();
        let ideal = left_ideal_basis(&pure, &OperatorAlgebra::full(2)).unwrap();
        assert_eq!(ideal.len(), 2);
        for a in &ideal {
            assert!((a * ket(2, 0)).norm() < 1e-12);
        }
    }

    #[test]
    fn abelian_projection_examples() {
        let full = OperatorAlgebra::full(3);
        let p = projector(&ket(3, 1));
        let c = is_abelian_projection(&p, &full).unwrap();
        assert_eq!(c, AbelianCheck { abelian: true, atom: Some(true) });

        let p2 = projector(&ket(4, 0)) + projector(&ket(4, 1));
        let c = is_abelian_projection(&p2, &OperatorAlgebra::full(4)).unwrap();
        assert!(!c.abelian);
        assert_eq!(c.atom, Some(false));

        let dims = Dims::new(2, 2);
        let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
        let pa = tensor_product(&projector(&ket(2, 0)), &identity(2));
        let c = is_abelian_projection(&pa, &ra).unwrap();
        assert!(c.abelian);
        assert_eq!(c.atom, Some(true));
    }

    #[test]
    fn abelian_projection_rejects_non_projections() {
        let full = OperatorAlgebra::full(2);
        let z = ComplexMatrix::zeros(2, 2);
        assert!(matches!(is_abelian_projection(&z, &full), Err(Error::NotProjection(_))));
        let m = identity(2) * c64(2.0, 0.0);
        assert!(matches!(is_abelian_projection(&m, &full), Err(Error::NotProjection(_))));
        let ra = OperatorAlgebra::tensor_factor(Dims::new(2, 2), Factor::A);
        let p = projector(&ket(4, 0));
        assert!(matches!(is_abelian_projection(&p, &ra), Err(Error::NotProjection(_))));
    }
}

use crate::error::{Error, Result};
use crate::numerics::{
    c64, complete_basis, schmidt_decompose, sorted_svd, tensor_product, ComplexMatrix, Dims,
    Factor,
};

/// A local operator `A` on `factor` minimizing `|(A (x) I) x - y|` (or
/// `|(I (x) A) x - y|` for factor B), with the attained residual.
#[derive(Clone, Debug)]
pub struct Intertwiner {
    pub operator: ComplexMatrix,
    pub residual: f64,
}

fn swap_vector(x: &ComplexMatrix, dims: Dims) -> ComplexMatrix {
    ComplexMatrix::from_fn(dims.total(), 1, |r, _| {
        let (j, i) = (r / dims.a, r % dims.a);
        x[(i * dims.b + j, 0)]
    })
}

/// Solve `(A (x) I) x = y` on the Schmidt support of `x`.
///
/// With `x = sum_i c_i a_i (x) b_i`, write `y = sum_{k,i} Y_ki a_k (x) b_i`
/// in the completed Schmidt bases. Column `i` of the solution is
/// `A a_i = sum_k (Y_ki / c_i) a_k` for every nonzero `c_i`; `A` vanishes on
/// the complement. Components of `y` along `b_i` with `c_i = 0` cannot be
/// reached and make up the residual.
pub fn solve_local_intertwiner(x: &ComplexMatrix, y: &ComplexMatrix, dims: Dims) -> Result<Intertwiner> {
    dims.check_vector(x)?;
    dims.check_vector(y)?;
    let s = schmidt_decompose(x, dims)?;
    let r = s.rank;
    let left = complete_basis(&s.left.columns(0, r).into_owned(), dims.a);
    let right = complete_basis(&s.right.columns(0, r).into_owned(), dims.b);
    let mut a = ComplexMatrix::zeros(dims.a, dims.a);
    for i in 0..r {
        let bi = right.columns(i, 1).into_owned();
        let mut image = ComplexMatrix::zeros(dims.a, 1);
        for k in 0..dims.a {
            let ak = left.columns(k, 1).into_owned();
            let yki = (tensor_product(&ak, &bi).adjoint() * y)[(0, 0)];
            image += ak * (yki / c64(s.coefficients[i], 0.0));
        }
        a += image * s.left_vector(i).adjoint();
    }
    let reached = tensor_product(&a, &ComplexMatrix::identity(dims.b, dims.b)) * x;
    let residual = (reached - y).norm();
    Ok(Intertwiner { operator: a, residual })
}

/// [`solve_local_intertwiner`] for an operator acting on either factor.
pub fn solve_intertwiner_on(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    dims: Dims,
    factor: Factor,
) -> Result<Intertwiner> {
    match factor {
        Factor::A => solve_local_intertwiner(x, y, dims),
        Factor::B => {
            dims.check_vector(x)?;
            dims.check_vector(y)?;
            let swapped = Dims::new(dims.b, dims.a);
            solve_local_intertwiner(&swap_vector(x, dims), &swap_vector(y, dims), swapped)
        }
    }
}

/// Replace every singular value below `eps` by `eps`, keeping the singular
/// vectors. The result is invertible and within `eps` of `a` in operator norm.
pub fn floor_singular_values(a: &ComplexMatrix, eps: f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", a.nrows(), a.ncols())));
    }
    if eps <= 0.0 {
        return Err(Error::Precondition("floor must be positive".into()));
    }
    let svd = sorted_svd(a, true);
    let n = a.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let s = svd.s[k].max(eps);
        out += svd.u.columns(k, 1) * svd.v.columns(k, 1).adjoint() * c64(s, 0.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{identity, ket, pauli_z, singlet, singular_values, spin_projections};

    const D22: Dims = Dims::new(2, 2);

    #[test]
    fn singlet_reaches_any_vector() {
        let r = solve_local_intertwiner(&singlet(), &ket(4, 0), D22).unwrap();
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn product_vector_misses_orthogonal_slice() {
        let r = solve_local_intertwiner(&ket(4, 0), &ket(4, 1), D22).unwrap();
        assert!(r.residual > 0.5);
    }

    #[test]
    fn identity_on_schmidt_support() {
        let r = solve_local_intertwiner(&singlet(), &singlet(), D22).unwrap();
        assert!(r.residual <= 1e-12);
        assert!((r.operator - identity(2)).norm() <= 1e-12);
        let p = ket(4, 0);
        let r = solve_local_intertwiner(&p, &p, D22).unwrap();
        assert!((r.operator - crate::numerics::projector(&ket(2, 0))).norm() <= 1e-12);
    }

    #[test]
    fn factor_b_solution_acts_on_b() {
        let y = ket(4, 3);
        let r = solve_intertwiner_on(&singlet(), &y, D22, Factor::B).unwrap();
        let reached = tensor_product(&identity(2), &r.operator) * singlet();
        assert!((reached - y).norm() <= 1e-12);
    }

    #[test]
    fn flooring_examples() {
        let (pp, _) = spin_projections(&pauli_z());
        let f = floor_singular_values(&pp, 1e-3).unwrap();
        let s = singular_values(&f);
        assert!((s[s.len() - 1] - 1e-3).abs() < 1e-15);
        assert!((&f - &pp).norm() - 1e-3 < 1e-15);
        let u = pauli_z();
        assert!((floor_singular_values(&u, 1e-3).unwrap() - &u).norm() < 1e-14);
    }
}

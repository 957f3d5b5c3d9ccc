//! Kraus operations in the Heisenberg convention `T(Z) = sum_i K_i* Z K_i`.
//!
//! States transform with the conjugate map `D -> sum_i K_i D K_i*` and are
//! renormalized by the acceptance probability `rho(T(I))`.
//!
//! Composition order: `compose(outer, inner)` first applies `inner` to the
//! state and then `outer`. In the Heisenberg picture this reads
//! `compose(outer, inner)(Z) = inner(outer(Z))`, with Kraus operators
//! `K_outer * K_inner`. Measuring with `T` and then selecting with `T'` is
//! `compose(T', T)`.

use rayon::prelude::*;

use crate::algebra::{commutant, OperatorAlgebra};
use crate::error::{Error, Result};
use crate::numerics::{
    c64, commutator, hermitian_eig, identity, lift, ComplexMatrix, Dims, Factor,
};
use crate::states::StateFunctional;

/// Acceptance probabilities at or below this count as a null outcome.
pub const NULL_OUTCOME_TOL: f64 = 1e-12;

/// Tolerance for locality and factorization residuals.
pub const LOCALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selectivity {
    /// `T(I) = I`.
    Nonselective,
    /// `T(I) < I`.
    Selective,
}

#[derive(Clone, Debug)]
pub struct KrausOperation {
    ambient_dim: usize,
    kraus: Vec<ComplexMatrix>,
    selectivity: Selectivity,
    label: Option<String>,
}

/// Result of updating a state with an operation.
#[derive(Clone, Debug)]
pub struct UpdateOutcome {
    /// `None` is the null outcome (the operation annihilates the state).
    pub state: Option<StateFunctional>,
    pub acceptance_probability: f64,
}

impl UpdateOutcome {
    pub fn is_null(&self) -> bool {
        self.state.is_none()
    }
}

/// Diagnostics of [`KrausOperation::is_local_to`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalityReport {
    /// Every Kraus operator lies in the algebra.
    pub local: bool,
    /// Largest distance of a Kraus operator from the algebra.
    pub membership_residual: f64,
    /// `max_Y |sum_i [Y,K_i]* [Y,K_i]|` over a Hermitian basis of `R'`.
    pub commutator_residual: f64,
    /// `max_Y |T(Y) - T(I) Y|` over the same basis.
    pub factorization_residual: f64,
}

impl KrausOperation {
    /// Validates `0 <= sum K*K <= I`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidOperation("empty Kraus list".into()))?;
        let n = first.nrows();
        for k in &kraus {
            if k.nrows() != n || k.ncols() != n {
                return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", k.nrows(), k.ncols())));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("Kraus operator".into()));
            }
        }
        let effect = effect_of(&kraus, n);
        let eig = hermitian_eig(&effect)?;
        if eig.min() < -1e-10 || eig.max() > 1.0 + 1e-10 {
            return Err(Error::InvalidOperation(format!(
                "sum K*K has spectrum [{:.6e}, {:.6e}], outside [0, 1]",
                eig.min(),
                eig.max()
            )));
        }
        let selectivity = if (&effect - identity(n)).norm() <= 1e-9 {
            Selectivity::Nonselective
        } else {
            Selectivity::Selective
        };
        Ok(KrausOperation { ambient_dim: n, kraus, selectivity, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![identity(n)]).expect("identity is a valid operation")
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn selectivity(&self) -> Selectivity {
        self.selectivity
    }

    pub fn is_selective(&self) -> bool {
        self.selectivity == Selectivity::Selective
    }

    /// A single Kraus operator.
    pub fn is_pure(&self) -> bool {
        self.kraus.len() == 1
    }

    /// `T(I) = sum K*K`.
    pub fn effect(&self) -> ComplexMatrix {
        effect_of(&self.kraus, self.ambient_dim)
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.ambient_dim;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", m.nrows(), m.ncols())));
        }
        Ok(())
    }

    /// `T(Z) = sum K* Z K`.
    pub fn apply_heisenberg(&self, z: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(z)?;
        Ok(self.heisenberg_unchecked(z))
    }

    fn heisenberg_unchecked(&self, z: &ComplexMatrix) -> ComplexMatrix {
        let n = self.ambient_dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            out += k.adjoint() * z * k;
        }
        out
    }

    fn schrodinger_matrix(&self, d: &ComplexMatrix) -> ComplexMatrix {
        let n = self.ambient_dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            out += k * d * k.adjoint();
        }
        out
    }

    /// `sum K D K*` for any square `D` of matching size.
    pub fn push_forward(&self, d: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(d)?;
        Ok(self.schrodinger_matrix(d))
    }

    /// Unnormalized output density `sum K D K*` and its trace `rho(T(I))`.
    pub fn apply_schrodinger(&self, rho: &StateFunctional) -> Result<(ComplexMatrix, f64)> {
        self.check_dim(rho.density())?;
        let out = self.schrodinger_matrix(rho.density());
        let weight = out.trace().re;
        Ok((out, weight))
    }

    /// `rho^T(Z) = rho(T(Z)) / rho(T(I))`, or the null outcome.
    pub fn update_state(&self, rho: &StateFunctional) -> Result<UpdateOutcome> {
        let (out, weight) = self.apply_schrodinger(rho)?;
        if weight <= NULL_OUTCOME_TOL {
            return Ok(UpdateOutcome { state: None, acceptance_probability: weight.max(0.0) });
        }
        let mut state = StateFunctional::new(out / c64(weight, 0.0))?;
        if let Some(dims) = rho.dims() {
            state = state.with_dims(dims)?;
        }
        Ok(UpdateOutcome { state: Some(state), acceptance_probability: weight.min(1.0) })
    }

    /// Update every state; items are independent and processed in parallel.
    pub fn update_states(&self, states: &[StateFunctional]) -> Result<Vec<UpdateOutcome>> {
        states.par_iter().map(|s| self.update_state(s)).collect()
    }

    /// Decompose `rho^T = sum_i lambda_i rho^{K_i}` with
    /// `lambda_i = rho(K_i* K_i) / rho(T(I))`. Kraus operators that annihilate
    /// the state carry zero weight and are omitted.
    pub fn mixture_decomposition(&self, rho: &StateFunctional) -> Result<Vec<(f64, StateFunctional)>> {
        let (_, total) = self.apply_schrodinger(rho)?;
        if total <= NULL_OUTCOME_TOL {
            return Err(Error::NullOutcome { probability: total });
        }
        let mut out = Vec::new();
        for k in &self.kraus {
            let branch = k * rho.density() * k.adjoint();
            let w = branch.trace().re;
            if w <= NULL_OUTCOME_TOL {
                continue;
            }
            let mut state = StateFunctional::new(branch / c64(w, 0.0))?;
            if let Some(dims) = rho.dims() {
                state = state.with_dims(dims)?;
            }
            out.push((w / total, state));
        }
        Ok(out)
    }

    /// Locality to `R`: Kraus membership in `R`, plus the two commutant
    /// criteria evaluated on a Hermitian basis of `R'`.
    pub fn is_local_to(&self, r: &OperatorAlgebra) -> Result<LocalityReport> {
        if r.ambient_dim() != self.ambient_dim {
            return Err(Error::dims(self.ambient_dim, r.ambient_dim()));
        }
        let membership_residual =
            self.kraus.iter().map(|k| r.distance_to(k)).fold(0.0, f64::max);
        let effect = self.effect();
        let mut commutator_residual: f64 = 0.0;
        let mut factorization_residual: f64 = 0.0;
        for y in commutant(r).hermitian_basis() {
            let n = self.ambient_dim;
            let mut lhs = ComplexMatrix::zeros(n, n);
            for k in &self.kraus {
                let c = commutator(&y, k);
                lhs += c.adjoint() * c;
            }
            commutator_residual = commutator_residual.max(lhs.norm());
            let ty = self.heisenberg_unchecked(&y);
            factorization_residual = factorization_residual.max((ty - &effect * &y).norm());
        }
        Ok(LocalityReport {
            local: membership_residual <= LOCALITY_TOL,
            membership_residual,
            commutator_residual,
            factorization_residual,
        })
    }

    /// `max |T(X_j Y_k) - T(X_j) Y_k|` over basis pairs of `ra` and `rb`.
    pub fn factorization_residual(&self, ra: &OperatorAlgebra, rb: &OperatorAlgebra) -> Result<f64> {
        ra.ensure_commutes(rb)?;
        if ra.ambient_dim() != self.ambient_dim {
            return Err(Error::dims(self.ambient_dim, ra.ambient_dim()));
        }
        let mut worst: f64 = 0.0;
        for x in ra.basis() {
            let tx = self.heisenberg_unchecked(x);
            for y in rb.basis() {
                let txy = self.heisenberg_unchecked(&(x * y));
                worst = worst.max((txy - &tx * y).norm());
            }
        }
        Ok(worst)
    }

    /// `T(XY) = T(X) Y` for `X` in `ra`, `Y` in `rb`.
    pub fn factorization_check(&self, ra: &OperatorAlgebra, rb: &OperatorAlgebra) -> Result<bool> {
        Ok(self.factorization_residual(ra, rb)? <= LOCALITY_TOL)
    }
}

fn effect_of(kraus: &[ComplexMatrix], n: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(n, n);
    for k in kraus {
        e += k.adjoint() * k;
    }
    e
}

pub fn apply_heisenberg(t: &KrausOperation, z: &ComplexMatrix) -> Result<ComplexMatrix> {
    t.apply_heisenberg(z)
}

pub fn apply_schrodinger(t: &KrausOperation, rho: &StateFunctional) -> Result<(ComplexMatrix, f64)> {
    t.apply_schrodinger(rho)
}

pub fn update_state(t: &KrausOperation, rho: &StateFunctional) -> Result<UpdateOutcome> {
    t.update_state(rho)
}

/// `inner` acts on the state first, then `outer`.
pub fn compose(outer: &KrausOperation, inner: &KrausOperation) -> Result<KrausOperation> {
    if outer.ambient_dim != inner.ambient_dim {
        return Err(Error::dims(outer.ambient_dim, inner.ambient_dim));
    }
    let kraus = outer
        .kraus
        .iter()
        .flat_map(|ko| inner.kraus.iter().map(move |ki| ko * ki))
        .collect();
    KrausOperation::new(kraus)
}

/// `{K_i (x) I}` for operators on factor A.
pub fn lift_local(kraus: &[ComplexMatrix], dims: Dims) -> Result<KrausOperation> {
    lift_local_to(kraus, dims, Factor::A)
}

/// Lift local Kraus operators on either factor.
pub fn lift_local_to(kraus: &[ComplexMatrix], dims: Dims, factor: Factor) -> Result<KrausOperation> {
    let lifted = kraus
        .iter()
        .map(|k| lift(k, factor, dims))
        .collect::<Result<Vec<_>>>()?;
    KrausOperation::new(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{
        ket, matrix_unit, pauli_x, pauli_z, projector, singlet, spin_projections, tensor_product,
    };

    fn dims22() -> Dims {
        Dims::new(2, 2)
    }

    fn singlet_state() -> StateFunctional {
        StateFunctional::vector_state(&singlet()).unwrap().with_dims(dims22()).unwrap()
    }

    fn measurement_z() -> KrausOperation {
        let (pp, pm) = spin_projections(&pauli_z());
        lift_local(&[pp, pm], dims22()).unwrap()
    }

    fn cnot() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = c64(1.0, 0.0);
        m[(1, 1)] = c64(1.0, 0.0);
        m[(2, 3)] = c64(1.0, 0.0);
        m[(3, 2)] = c64(1.0, 0.0);
        m
    }

    #[test]
    fn rejects_invalid_kraus_lists() {
        assert!(KrausOperation::new(vec![]).is_err());
        assert!(KrausOperation::new(vec![identity(2) * c64(1.1, 0.0)]).is_err());
        assert!(KrausOperation::new(vec![identity(2), identity(3)]).is_err());
    }

    #[test]
    fn selectivity_classification() {
        assert_eq!(measurement_z().selectivity(), Selectivity::Nonselective);
        let (pp, _) = spin_projections(&pauli_z());
        assert!(lift_local(&[pp], dims22()).unwrap().is_selective());
    }

    #[test]
    fn heisenberg_examples() {
        let u = pauli_x();
        let t = KrausOperation::unitary(u.clone()).unwrap();
        let z = pauli_z();
        assert!((t.apply_heisenberg(&z).unwrap() - u.adjoint() * &z * &u).norm() < 1e-15);
        assert!((measurement_z().apply_heisenberg(&identity(4)).unwrap() - identity(4)).norm() < 1e-15);
        assert!(t.apply_heisenberg(&identity(3)).is_err());
    }

    #[test]
    fn schrodinger_weights() {
        let rho = singlet_state();
        assert!((measurement_z().apply_schrodinger(&rho).unwrap().1 - 1.0).abs() < 1e-14);
        let (pp, _) = spin_projections(&pauli_z());
        let sel = lift_local(&[pp], dims22()).unwrap();
        assert!((sel.apply_schrodinger(&rho).unwrap().1 - 0.5).abs() < 1e-14);

        let kill = KrausOperation::new(vec![matrix_unit(4, 3, 3)]).unwrap();
        let out = kill.update_state(&singlet_state()).unwrap();
        assert!(out.is_null());
        assert_eq!(out.acceptance_probability, 0.0);
    }

    #[test]
    fn update_reproduces_projective_measurement() {
        let out = measurement_z().update_state(&singlet_state()).unwrap();
        let expected = (projector(&ket(4, 1)) + projector(&ket(4, 2))) * c64(0.5, 0.0);
        assert!((out.state.unwrap().density() - expected).norm() < 1e-15);
    }

    #[test]
    fn compose_examples() {
        let t = measurement_z();
        let c = compose(&t, &KrausOperation::identity(4)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let z = matrix_unit(4, i, j);
                let diff = c.apply_heisenberg(&z).unwrap() - t.apply_heisenberg(&z).unwrap();
                assert!(diff.norm() < 1e-15);
            }
        }
        let u = KrausOperation::unitary(pauli_x()).unwrap();
        let v = KrausOperation::unitary(pauli_z()).unwrap();
        let vu = compose(&v, &u).unwrap();
        assert_eq!(vu.kraus().len(), 1);
        assert!((&vu.kraus()[0] - pauli_z() * pauli_x()).norm() < 1e-15);

        // measure, then select the + outcome
        let (pp, _) = spin_projections(&pauli_z());
        let select = lift_local(&[pp.clone()], dims22()).unwrap();
        let both = compose(&select, &t).unwrap();
        let out = both.update_state(&singlet_state()).unwrap().state.unwrap();
        let expected = tensor_product(&pp, &projector(&ket(2, 1)));
        assert!((out.density() - expected).norm() < 1e-14);
    }

    #[test]
    fn mixture_decomposition_of_measurement() {
        let parts = measurement_z().mixture_decomposition(&singlet_state()).unwrap();
        assert_eq!(parts.len(), 2);
        assert!((parts[0].0 - 0.5).abs() < 1e-14 && (parts[1].0 - 0.5).abs() < 1e-14);
        assert!((parts[0].1.density() - projector(&ket(4, 1))).norm() < 1e-14);
        assert!((parts[1].1.density() - projector(&ket(4, 2))).norm() < 1e-14);

        let pure = KrausOperation::unitary(tensor_product(&pauli_x(), &identity(2))).unwrap();
        let parts = pure.mixture_decomposition(&singlet_state()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, 1.0);
    }

    #[test]
    fn mixture_decomposition_rejects_null() {
        let kill = KrausOperation::new(vec![matrix_unit(4, 3, 3)]).unwrap();
        assert!(matches!(
            kill.mixture_decomposition(&singlet_state()),
            Err(Error::NullOutcome { .. })
        ));
    }

    #[test]
    fn locality_examples() {
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        let r = measurement_z().is_local_to(&ra).unwrap();
        assert!(r.local && r.commutator_residual < 1e-12 && r.factorization_residual < 1e-12);

        let c = KrausOperation::unitary(cnot()).unwrap();
        let r = c.is_local_to(&ra).unwrap();
        assert!(!r.local);
        assert!(r.commutator_residual > 0.1);
        // Control on A commutes with I (x) sigma_x but not with I (x) sigma_z.
        let eq10 = |y: &ComplexMatrix, k: &ComplexMatrix| {
            let c = commutator(y, k);
            (c.adjoint() * c).norm()
        };
        let ix = tensor_product(&identity(2), &pauli_x());
        let iz = tensor_product(&identity(2), &pauli_z());
        assert!(eq10(&ix, &cnot()) < 1e-15);
        assert!(eq10(&iz, &cnot()) > 0.1);
        let swap = tensor_product(&identity(2), &identity(2)).select_rows(&[0, 2, 1, 3]);
        let reversed = &swap * cnot() * &swap;
        assert!(eq10(&ix, &reversed) > 0.1);

        let id = KrausOperation::identity(4);
        assert!(id.is_local_to(&ra).unwrap().local);
        assert!(id.is_local_to(&OperatorAlgebra::scalars(4)).unwrap().local);
    }

    #[test]
    fn factorization_examples() {
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        let rb = OperatorAlgebra::tensor_factor(dims22(), Factor::B);
        assert!(measurement_z().factorization_check(&ra, &rb).unwrap());
        assert!(!KrausOperation::unitary(cnot()).unwrap().factorization_check(&ra, &rb).unwrap());
        let (pp, _) = spin_projections(&pauli_z());
        assert!(lift_local(&[pp], dims22()).unwrap().factorization_check(&ra, &rb).unwrap());
        assert!(measurement_z().factorization_check(&ra, &ra).is_err());
    }

    #[test]
    fn lift_examples() {
        let t = lift_local(&[pauli_z()], dims22()).unwrap();
        assert_eq!(t.kraus()[0], tensor_product(&pauli_z(), &identity(2)));
        assert!(lift_local(&[identity(3)], dims22()).is_err());
        let ra = OperatorAlgebra::tensor_factor(dims22(), Factor::A);
        assert!(t.is_local_to(&ra).unwrap().local);
    }
}

//! Entanglement across a pair of commuting algebras: entropy, verdicts with
//! certificates, disentangling operations and local state preparation.

mod separable;

pub use separable::{
    separable_approximation, separable_approximation_with, FwConfig, SeparableApproximation,
    SEPARABLE_TOL,
};

use serde::{Deserialize, Serialize};

use crate::algebra::{OperatorAlgebra, Structure};
use crate::error::{Error, Result};
use crate::numerics::{
    c64, hermitian_eig, hermiticity_residual, identity, lift, matrix_unit, partial_trace,
    partial_transpose, projector, schmidt_decompose, ComplexMatrix, Dims, Factor,
};
use crate::operations::{lift_local_to, KrausOperation, NULL_OUTCOME_TOL};
use crate::states::{ProductCertificate, ProductTerm, StateFunctional};

/// A witness must certify at least this much negativity.
pub const WITNESS_TOL: f64 = 1e-9;

/// Minimum eigenvalue gap for a nondegenerate observable.
pub const SPECTRAL_GAP_TOL: f64 = 1e-8;

/// Negative partial-transpose eigenvalue with its eigenvector `v`; the
/// operator `(|v><v|)^{T_B}` has negative expectation in the state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub min_eigenvalue: f64,
    #[serde(with = "crate::formats::matrix_serde")]
    pub eigenvector: ComplexMatrix,
}

impl Witness {
    /// The observable `(|v><v|)^{T_B}`.
    pub fn observable(&self, dims: Dims) -> Result<ComplexMatrix> {
        partial_transpose(&projector(&self.eigenvector), dims, Factor::B)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeparabilityVerdict {
    Separable { certificate: ProductCertificate },
    Entangled { witness: Witness },
    /// No certificate either way; `distance` is the best Frobenius distance
    /// to a separable decomposition that was found.
    Inconclusive { distance: f64 },
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, SeparabilityVerdict::Separable { .. })
    }

    pub fn is_entangled(&self) -> bool {
        matches!(self, SeparabilityVerdict::Entangled { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SeparabilityVerdict::Separable { .. } => "separable",
            SeparabilityVerdict::Entangled { .. } => "entangled",
            SeparabilityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn certificate(&self) -> Option<&ProductCertificate> {
        match self {
            SeparabilityVerdict::Separable { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SeparabilityVerdict::Entangled { witness } => Some(witness),
            _ => None,
        }
    }
}

fn shannon(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = probabilities.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum();
    h.max(0.0)
}

/// Entropy (nats) of either reduced density of the normalized vector `x`.
pub fn entanglement_entropy(x: &ComplexMatrix, dims: Dims) -> Result<f64> {
    let s = schmidt_decompose(x, dims)?;
    let norm2: f64 = s.coefficients.iter().map(|c| c * c).sum();
    Ok(shannon(s.coefficients.iter().map(|c| c * c / norm2)))
}

/// `-Tr(D ln D)` in nats.
pub fn von_neumann_entropy(d: &ComplexMatrix) -> Result<f64> {
    Ok(shannon(hermitian_eig(d)?.eigenvalues.iter().copied()))
}

/// Smallest eigenvalue of the partial transpose on B, with its eigenvector.
pub fn min_pt_eigen(rho: &StateFunctional, dims: Dims) -> Result<(f64, ComplexMatrix)> {
    dims.check_square(rho.density())?;
    let pt = partial_transpose(rho.density(), dims, Factor::B)?;
    let e = hermitian_eig(&pt)?;
    Ok((e.eigenvalues[0], e.vector(0)))
}

/// Partial-transpose test. A nonnegative partial transpose is turned into a
/// separable verdict only when a product decomposition is found.
pub fn ppt_verdict(rho: &StateFunctional, dims: Dims) -> Result<SeparabilityVerdict> {
    ppt_verdict_with(rho, dims, &FwConfig::default())
}

pub fn ppt_verdict_with(rho: &StateFunctional, dims: Dims, cfg: &FwConfig) -> Result<SeparabilityVerdict> {
    let (min_eigenvalue, eigenvector) = min_pt_eigen(rho, dims)?;
    if min_eigenvalue < -WITNESS_TOL {
        return Ok(SeparabilityVerdict::Entangled { witness: Witness { min_eigenvalue, eigenvector } });
    }
    let approx = separable_approximation_with(rho, dims, cfg)?;
    if approx.distance <= cfg.tolerance {
        Ok(SeparabilityVerdict::Separable { certificate: approx.certificate })
    } else {
        Ok(SeparabilityVerdict::Inconclusive { distance: approx.distance })
    }
}

/// Whether PPT is both necessary and sufficient for separability.
pub fn ppt_is_exact(dims: Dims) -> bool {
    dims.a * dims.b <= 6
}

fn resolve_dims(rho: &StateFunctional, ra: &OperatorAlgebra, rb: &OperatorAlgebra) -> Result<Dims> {
    if let Some(d) = rho.dims() {
        return Ok(d);
    }
    for r in [ra, rb] {
        if let Structure::TensorFactor { dims, .. } = r.structure() {
            return Ok(dims);
        }
    }
    Err(Error::Precondition(
        "bipartite dimensions unknown: attach dims to the state".into(),
    ))
}

fn is_full_factor(r: &OperatorAlgebra, dims: Dims, factor: Factor) -> bool {
    let d = dims.of(factor);
    r.dimension() == d * d && r.local_basis(dims, factor).is_some()
}

/// Minimal projections of an abelian algebra of `d x d` matrices: the
/// spectral projections of a generic Hermitian element.
fn minimal_projections(local: &[ComplexMatrix], d: usize) -> Result<Vec<ComplexMatrix>> {
    let mut h = ComplexMatrix::zeros(d, d);
    for (k, x) in local.iter().enumerate() {
        // Irrational weights keep distinct joint eigenvalues apart.
        let w = ((k as f64 + 1.0) * std::f64::consts::SQRT_2).fract() + 0.5;
        let v = ((k as f64 + 1.0) * std::f64::consts::E).fract() + 0.5;
        h += (x + x.adjoint()) * c64(w, 0.0) + (x - x.adjoint()) * c64(0.0, v);
    }
    let e = hermitian_eig(&h)?;
    let scale = e.eigenvalues.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let mut out: Vec<ComplexMatrix> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for k in 0..d {
        let p = projector(&e.vector(k));
        if e.eigenvalues[k] - last > 1e-8 * scale {
            out.push(p);
        } else {
            *out.last_mut().expect("first eigenvalue opens a group") += p;
        }
        last = e.eigenvalues[k];
    }
    Ok(out)
}

/// Point-mass decomposition over the minimal projections `P_i` of an abelian
/// algebra on `side`: `sum_i p_i (P_i / tr P_i) (x) rho_i`.
fn abelian_certificate(
    rho: &StateFunctional,
    dims: Dims,
    side: Factor,
    local: &[ComplexMatrix],
) -> Result<ProductCertificate> {
    let projections = minimal_projections(local, dims.of(side))?;
    let mut terms = Vec::new();
    for p in projections {
        let lifted = lift(&p, side, dims)?;
        let branch = &lifted * rho.density() * &lifted;
        let weight = branch.trace().re;
        if weight <= NULL_OUTCOME_TOL {
            continue;
        }
        let rest = partial_trace(&branch, dims, side.other())? / c64(weight, 0.0);
        let own = &p / c64(p.trace().re, 0.0);
        let (a, b) = match side {
            Factor::A => (own, rest),
            Factor::B => (rest, own),
        };
        terms.push(ProductTerm { weight, a, b });
    }
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    terms.iter_mut().for_each(|t| t.weight /= total);
    Ok(ProductCertificate::new(dims, terms))
}

/// Decide whether `rho` is entangled across the commuting pair `(ra, rb)`.
///
/// Both algebras must sit in their tensor factors of the state's bipartite
/// structure (`ra` on A, `rb` on B). Separable verdicts carry a certificate
/// that agrees with `rho` on all products `XY`, `X` in `ra`, `Y` in `rb`.
pub fn decide_entanglement(
    rho: &StateFunctional,
    ra: &OperatorAlgebra,
    rb: &OperatorAlgebra,
) -> Result<SeparabilityVerdict> {
    decide_entanglement_with(rho, ra, rb, &FwConfig::default())
}

pub fn decide_entanglement_with(
    rho: &StateFunctional,
    ra: &OperatorAlgebra,
    rb: &OperatorAlgebra,
    cfg: &FwConfig,
) -> Result<SeparabilityVerdict> {
    ra.ensure_commutes(rb)?;
    let dims = resolve_dims(rho, ra, rb)?;
    dims.check_square(rho.density())?;
    let local_a = ra.local_basis(dims, Factor::A).ok_or_else(|| {
        Error::Precondition("first algebra is not contained in the A tensor factor".into())
    })?;
    let local_b = rb.local_basis(dims, Factor::B).ok_or_else(|| {
        Error::Precondition("second algebra is not contained in the B tensor factor".into())
    })?;

    if ra.is_abelian() {
        let certificate = abelian_certificate(rho, dims, Factor::A, &local_a)?;
        return Ok(SeparabilityVerdict::Separable { certificate });
    }
    if rb.is_abelian() {
        let certificate = abelian_certificate(rho, dims, Factor::B, &local_b)?;
        return Ok(SeparabilityVerdict::Separable { certificate });
    }

    let full = is_full_factor(ra, dims, Factor::A) && is_full_factor(rb, dims, Factor::B);
    if full && rho.is_pure() {
        let e = hermitian_eig(rho.density())?;
        let x = e.vector(e.eigenvalues.len() - 1);
        let s = schmidt_decompose(&x, dims)?;
        if s.rank == 1 {
            let term = ProductTerm {
                weight: 1.0,
                a: projector(&s.left_vector(0)),
                b: projector(&s.right_vector(0)),
            };
            return Ok(SeparabilityVerdict::Separable {
                certificate: ProductCertificate::new(dims, vec![term]),
            });
        }
        let (min_eigenvalue, eigenvector) = min_pt_eigen(rho, dims)?;
        if min_eigenvalue < -WITNESS_TOL {
            return Ok(SeparabilityVerdict::Entangled {
                witness: Witness { min_eigenvalue, eigenvector },
            });
        }
    }

    match ppt_verdict_with(rho, dims, cfg)? {
        SeparabilityVerdict::Entangled { .. } if !full => {
            let approx = separable_approximation_with(rho, dims, cfg)?;
            Ok(SeparabilityVerdict::Inconclusive { distance: approx.distance })
        }
        verdict => Ok(verdict),
    }
}

fn require_dims(rho: &StateFunctional) -> Result<Dims> {
    rho.dims().ok_or_else(|| Error::Precondition("state has no bipartite dimensions".into()))
}

/// Validate a complete family of mutually orthogonal rank-1 projections.
fn check_rank_one_resolution(projections: &[ComplexMatrix], d: usize) -> Result<()> {
    if projections.is_empty() {
        return Err(Error::NotProjection("empty projection list".into()));
    }
    let mut sum = ComplexMatrix::zeros(d, d);
    for (i, p) in projections.iter().enumerate() {
        if p.nrows() != d || p.ncols() != d {
            return Err(Error::dims(format!("{d}x{d}"), format!("{}x{}", p.nrows(), p.ncols())));
        }
        if hermiticity_residual(p) > 1e-9 || (p * p - p).norm() > 1e-9 {
            return Err(Error::NotProjection(format!("entry {i} is not an orthogonal projection")));
        }
        if (p.trace().re - 1.0).abs() > 1e-9 {
            return Err(Error::NotProjection(format!("entry {i} does not have rank 1")));
        }
        for (j, q) in projections[..i].iter().enumerate() {
            if (p * q).norm() > 1e-9 {
                return Err(Error::NotProjection(format!("entries {j} and {i} are not orthogonal")));
            }
        }
        sum += p;
    }
    if (sum - identity(d)).norm() > 1e-9 {
        return Err(Error::NotProjection("projections do not sum to the identity".into()));
    }
    Ok(())
}

/// Nonselective measurement of the rank-1 projections `P_i` on A. The output
/// `sum_i (P_i (x) I) rho (P_i (x) I)` is returned with the certificate
/// `sum_i p_i P_i (x) rho_B^i` read off directly.
pub fn projective_disentangler(
    rho: &StateFunctional,
    projections: &[ComplexMatrix],
) -> Result<(StateFunctional, SeparabilityVerdict)> {
    let dims = require_dims(rho)?;
    check_rank_one_resolution(projections, dims.a)?;
    let op = lift_local_to(projections, dims, Factor::A)?;
    let out = op
        .update_state(rho)?
        .state
        .ok_or(Error::NullOutcome { probability: 0.0 })?;
    let mut terms = Vec::with_capacity(projections.len());
    for p in projections {
        let lifted = lift(p, Factor::A, dims)?;
        let branch = &lifted * rho.density() * &lifted;
        let weight = branch.trace().re;
        if weight <= NULL_OUTCOME_TOL {
            continue;
        }
        let b = partial_trace(&branch, dims, Factor::B)? / c64(weight, 0.0);
        terms.push(ProductTerm { weight, a: p.clone(), b });
    }
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    terms.iter_mut().for_each(|t| t.weight /= total);
    let certificate = ProductCertificate::new(dims, terms);
    let verdict = if certificate.residual(out.density()) <= SEPARABLE_TOL {
        SeparabilityVerdict::Separable { certificate }
    } else {
        SeparabilityVerdict::Inconclusive { distance: certificate.residual(out.density()) }
    };
    Ok((out, verdict))
}

/// Measure a nondegenerate observable on A and forget the outcome.
pub fn nondegenerate_disentangler(
    rho: &StateFunctional,
    observable: &ComplexMatrix,
) -> Result<(StateFunctional, SeparabilityVerdict)> {
    let dims = require_dims(rho)?;
    if observable.nrows() != dims.a || observable.ncols() != dims.a {
        return Err(Error::dims(
            format!("{0}x{0}", dims.a),
            format!("{}x{}", observable.nrows(), observable.ncols()),
        ));
    }
    let e = hermitian_eig(observable)?;
    let gap = e
        .eigenvalues
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if gap <= SPECTRAL_GAP_TOL {
        return Err(Error::DegenerateSpectrum { gap });
    }
    if let Some(z) = e.eigenvalues.iter().find(|l| l.abs() <= SPECTRAL_GAP_TOL) {
        return Err(Error::Precondition(format!("observable has eigenvalue {z:.3e}, expected nonzero spectrum")));
    }
    let projections: Vec<ComplexMatrix> =
        (0..dims.a).map(|k| projector(&e.vector(k))).collect();
    projective_disentangler(rho, &projections)
}

/// `{(sigma (x) I)/sqrt 2, I/sqrt 2}`: apply a Hermitian unitary on A with
/// probability one half.
pub fn mixing_operation(sigma: &ComplexMatrix, dims: Dims) -> Result<KrausOperation> {
    if (sigma * sigma - identity(dims.a)).norm() > 1e-10 || hermiticity_residual(sigma) > 1e-10 {
        return Err(Error::InvalidOperation("expected a Hermitian unitary".into()));
    }
    let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(lift_local_to(&[sigma * h, identity(dims.a) * h], dims, Factor::A)?
        .with_label("equal mixture of the identity and a local Hermitian unitary"))
}

/// Label attached to the operation built by [`local_preparation_channel`].
pub const PREPARATION_NOTE: &str = "replace channel on A: Kraus sqrt(l_i)|psi_i><e_j| (x) I; \
     the partial-isometry construction needs an infinite factor, this reproduces T(X (x) I) = tr(rho X) I";

/// Nonselective channel on A whose output is `target (x) omega_B` for every
/// input `omega`.
pub fn local_preparation_channel(target: &StateFunctional, dims: Dims) -> Result<KrausOperation> {
    let da = dims.a;
    if target.ambient_dim() != da {
        return Err(Error::dims(da, target.ambient_dim()));
    }
    let e = hermitian_eig(target.density())?;
    let weights: Vec<f64> = e.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut kraus = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let psi = e.vector(i) * c64((w / total).sqrt(), 0.0);
        for j in 0..da {
            let ej = matrix_unit(da, j, 0).column(0).into_owned();
            kraus.push(&psi * ej.adjoint());
        }
    }
    Ok(lift_local_to(&kraus, dims, Factor::A)?.with_label(PREPARATION_NOTE))
}

/// Push a product certificate through a local operation given by its Kraus
/// operators on one factor: each term `(w, a, b)` maps to
/// `(w tr T(a), T(a)/tr T(a), b)` for `side = A`. Returns `None` for a null
/// outcome.
pub fn transport_certificate(
    certificate: &ProductCertificate,
    local_kraus: &[ComplexMatrix],
    side: Factor,
) -> Result<Option<ProductCertificate>> {
    let d = certificate.dims.of(side);
    if let Some(k) = local_kraus.iter().find(|k| k.nrows() != d || k.ncols() != d) {
        return Err(Error::dims(format!("{d}x{d}"), format!("{}x{}", k.nrows(), k.ncols())));
    }
    let mut terms = Vec::with_capacity(certificate.terms.len());
    for t in &certificate.terms {
        let own = match side {
            Factor::A => &t.a,
            Factor::B => &t.b,
        };
        let mut image = ComplexMatrix::zeros(d, d);
        for k in local_kraus {
            image += k * own * k.adjoint();
        }
        let acceptance = image.trace().re;
        if acceptance * t.weight <= 0.0 {
            continue;
        }
        let image = image / c64(acceptance, 0.0);
        let (a, b) = match side {
            Factor::A => (image, t.b.clone()),
            Factor::B => (t.a.clone(), image),
        };
        terms.push(ProductTerm { weight: t.weight * acceptance, a, b });
    }
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    if total <= NULL_OUTCOME_TOL {
        return Ok(None);
    }
    terms.iter_mut().for_each(|t| t.weight /= total);
    Ok(Some(ProductCertificate::new(certificate.dims, terms)))
}

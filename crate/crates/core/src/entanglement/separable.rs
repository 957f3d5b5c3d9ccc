//! Distance to the convex hull of pure product states.
//!
//! Wolfe's minimum-norm-point method: a conditional-gradient scheme that
//! re-solves for the best weights on the whole active set after every new
//! atom. The linear step picks the product vector `a (x) b` maximizing
//! `<a b| rho - sigma |a b>` by alternating top-eigenvector updates.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{c64, hermitian_eig, projector, tensor_product, ComplexMatrix, Dims};
use crate::random::{haar_vector, LabRng};
use crate::states::{ProductCertificate, ProductTerm, StateFunctional};

/// Frobenius distance at or below which a decomposition counts as exact.
pub const SEPARABLE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FwConfig {
    /// Outer iterations.
    pub budget: usize,
    /// Alternating eigenvector updates per restart.
    pub inner_iterations: usize,
    /// Random restarts of the product-vector search, on top of one
    /// deterministic start from the top eigenvector.
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for FwConfig {
    fn default() -> Self {
        FwConfig { budget: 500, inner_iterations: 20, restarts: 8, seed: 0x5eed, tolerance: SEPARABLE_TOL }
    }
}

#[derive(Clone, Debug)]
pub struct SeparableApproximation {
    /// Frobenius distance from the density to the certificate.
    pub distance: f64,
    pub certificate: ProductCertificate,
    pub iterations: usize,
}

impl SeparableApproximation {
    pub fn is_certified(&self, tol: f64) -> bool {
        self.distance <= tol
    }
}

struct Atom {
    a: ComplexMatrix,
    b: ComplexMatrix,
    /// `|a b><a b| - rho`.
    point: ComplexMatrix,
}

/// Real inner product `Re Tr(X* Y)`, which is `Tr(XY)` for Hermitian inputs.
fn inner(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * q).re).sum()
}

/// `<a b| M |a b>` as a quadratic form in `a` with `b` fixed, i.e. the
/// `dA x dA` matrix `(I (x) b)* M (I (x) b)`. `swap` fixes `a` instead.
fn partial_contraction(m: &ComplexMatrix, dims: Dims, v: &ComplexMatrix, swap: bool) -> ComplexMatrix {
    let (da, db) = (dims.a, dims.b);
    if !swap {
        ComplexMatrix::from_fn(da, da, |i, k| {
            let mut s = c64(0.0, 0.0);
            for j in 0..db {
                for l in 0..db {
                    s += v[(j, 0)].conj() * m[(i * db + j, k * db + l)] * v[(l, 0)];
                }
            }
            s
        })
    } else {
        ComplexMatrix::from_fn(db, db, |j, l| {
            let mut s = c64(0.0, 0.0);
            for i in 0..da {
                for k in 0..da {
                    s += v[(i, 0)].conj() * m[(i * db + j, k * db + l)] * v[(k, 0)];
                }
            }
            s
        })
    }
}

fn top_vector(m: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    let e = hermitian_eig(&h).expect("symmetrized input is Hermitian");
    let k = e.eigenvalues.len() - 1;
    (e.eigenvalues[k], e.vector(k))
}

/// Approximate `max <a b| M |a b>` over unit product vectors.
fn best_product(m: &ComplexMatrix, dims: Dims, cfg: &FwConfig, rng: &mut LabRng) -> (f64, ComplexMatrix, ComplexMatrix) {
    let mut starts = Vec::with_capacity(cfg.restarts + 1);
    let (_, v) = top_vector(m);
    let coeff = ComplexMatrix::from_fn(dims.a, dims.b, |i, j| v[(i * dims.b + j, 0)]);
    let svd = coeff.svd(false, true);
    let vt = svd.v_t.expect("requested right vectors");
    let best_row = (0..svd.singular_values.len())
        .max_by(|&p, &q| svd.singular_values[p].total_cmp(&svd.singular_values[q]))
        .unwrap_or(0);
    starts.push(vt.rows(best_row, 1).transpose());
    for _ in 0..cfg.restarts {
        starts.push(haar_vector(rng, dims.b));
    }

    let mut best = (f64::NEG_INFINITY, ComplexMatrix::zeros(dims.a, 1), ComplexMatrix::zeros(dims.b, 1));
    for start in starts {
        let mut b = start;
        let mut a = top_vector(&partial_contraction(m, dims, &b, false)).1;
        let mut value = f64::NEG_INFINITY;
        for _ in 0..cfg.inner_iterations {
            let (_, nb) = top_vector(&partial_contraction(m, dims, &a, true));
            b = nb;
            let (val, na) = top_vector(&partial_contraction(m, dims, &b, false));
            a = na;
            if (val - value).abs() <= 1e-15 * val.abs().max(1.0) {
                value = val;
                break;
            }
            value = val;
        }
        // Strict comparison keeps the earliest start on ties.
        if value > best.0 {
            best = (value, a, b);
        }
    }
    best
}

/// Minimum-norm point of the affine hull of `points`, as affine weights.
fn affine_minimizer(points: &[&ComplexMatrix]) -> DVector<f64> {
    let k = points.len();
    let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in i..k {
            let g = inner(points[i], points[j]);
            kkt[(i, j)] = g;
            kkt[(j, i)] = g;
        }
        kkt[(i, k)] = 1.0;
        kkt[(k, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let svd = kkt.svd(true, true);
    let sol = svd.solve(&rhs, 1e-14 * svd.singular_values.max()).expect("both factors computed");
    let alpha = sol.rows(0, k).into_owned();
    let total: f64 = alpha.sum();
    alpha / total
}

fn combination(atoms: &[Atom], weights: &[f64], n: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(n, n);
    for (atom, &w) in atoms.iter().zip(weights) {
        x += &atom.point * c64(w, 0.0);
    }
    x
}

fn certificate(atoms: &[Atom], weights: &[f64], dims: Dims) -> ProductCertificate {
    let total: f64 = weights.iter().sum();
    let terms = atoms
        .iter()
        .zip(weights)
        .map(|(atom, &w)| ProductTerm { weight: w / total, a: projector(&atom.a), b: projector(&atom.b) })
        .collect();
    ProductCertificate::new(dims, terms)
}

/// Best convex combination of pure product states found within the budget.
///
/// The distance is nonincreasing in `cfg.budget` for a fixed seed.
pub fn separable_approximation_with(
    rho: &StateFunctional,
    dims: Dims,
    cfg: &FwConfig,
) -> Result<SeparableApproximation> {
    dims.check_square(rho.density())?;
    let n = dims.total();
    let d = rho.density();
    let mut rng = LabRng::seed_from_u64(cfg.seed);
    let make_atom = |a: ComplexMatrix, b: ComplexMatrix| {
        let point = projector(&tensor_product(&a, &b)) - d;
        Atom { a, b, point }
    };

    let (_, a, b) = best_product(d, dims, cfg, &mut rng);
    let mut atoms = vec![make_atom(a, b)];
    let mut weights = vec![1.0];
    let mut x = atoms[0].point.clone();
    let mut best = (x.norm(), certificate(&atoms, &weights, dims));
    let mut iterations = 0;

    while iterations < cfg.budget && best.0 > cfg.tolerance {
        iterations += 1;
        // Linear step: argmin <x, q> over atoms q, i.e. max <ab|-x|ab>.
        let (value, a, b) = best_product(&(-&x), dims, cfg, &mut rng);
        let norm2 = inner(&x, &x);
        // <x, q> = -value - <x, rho>; stop when no atom improves on x.
        let gap = norm2 + value + inner(&x, d);
        if gap <= 1e-12 * norm2 {
            break;
        }
        atoms.push(make_atom(a, b));
        weights.push(0.0);

        loop {
            let points: Vec<&ComplexMatrix> = atoms.iter().map(|t| &t.point).collect();
            let alpha = affine_minimizer(&points);
            if alpha.iter().all(|&v| v > 1e-14) {
                weights = alpha.iter().copied().collect();
                break;
            }
            let mut theta: f64 = 1.0;
            for (w, &al) in weights.iter().zip(alpha.iter()) {
                if al <= 1e-14 {
                    let denom = w - al;
                    if denom > 0.0 {
                        theta = theta.min(w / denom);
                    }
                }
            }
            for (w, &al) in weights.iter_mut().zip(alpha.iter()) {
                *w = (1.0 - theta) * *w + theta * al;
            }
            let mut k = 0;
            atoms.retain(|_| {
                let keep = weights[k] > 1e-14;
                k += 1;
                keep
            });
            weights.retain(|&w| w > 1e-14);
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            if atoms.len() <= 1 {
                break;
            }
        }

        x = combination(&atoms, &weights, n);
        let dist = x.norm();
        if dist < best.0 {
            best = (dist, certificate(&atoms, &weights, dims));
        }
    }

    let (distance, certificate) = best;
    Ok(SeparableApproximation { distance, certificate, iterations })
}

/// [`separable_approximation_with`] using the default configuration and the
/// given iteration budget.
pub fn separable_approximation(
    rho: &StateFunctional,
    dims: Dims,
    budget: usize,
) -> Result<SeparableApproximation> {
    separable_approximation_with(rho, dims, &FwConfig { budget, ..FwConfig::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diag, ket, singlet};

    #[test]
    fn maximally_mixed_is_certified() {
        let rho = StateFunctional::maximally_mixed(4);
        let r = separable_approximation(&rho, Dims::new(2, 2), 500).unwrap();
        assert!(r.distance <= SEPARABLE_TOL, "{}", r.distance);
        r.certificate.validate().unwrap();
        assert!(r.certificate.residual(rho.density()) <= SEPARABLE_TOL);
    }

    #[test]
    fn classical_mixture_uses_two_terms() {
        let rho = StateFunctional::new(diag(&[0.0, 0.5, 0.5, 0.0])).unwrap();
        let r = separable_approximation(&rho, Dims::new(2, 2), 500).unwrap();
        assert!(r.distance <= 1e-12);
        assert_eq!(r.certificate.len(), 2);
    }

    #[test]
    fn singlet_stays_away_from_hull() {
        let rho = StateFunctional::vector_state(&singlet()).unwrap();
        let r = separable_approximation(&rho, Dims::new(2, 2), 200).unwrap();
        // nearest separable state is the Werner state at p = 1/3
        assert!((r.distance - (1.0f64 / 3.0).sqrt()).abs() < 1e-3, "{}", r.distance);
    }

    #[test]
    fn product_state_needs_one_term() {
        let rho = StateFunctional::vector_state(&ket(6, 4)).unwrap();
        let r = separable_approximation(&rho, Dims::new(2, 3), 10).unwrap();
        assert!(r.distance <= 1e-12);
        assert_eq!(r.certificate.len(), 1);
    }

    #[test]
    fn distance_monotone_in_budget() {
        let rho = StateFunctional::vector_state(&singlet()).unwrap();
        let mut last = f64::INFINITY;
        for budget in [0, 1, 2, 5, 20] {
            let d = separable_approximation(&rho, Dims::new(2, 2), budget).unwrap().distance;
            assert!(d <= last + 1e-15);
            last = d;
        }
    }
}

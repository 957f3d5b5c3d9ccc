//! Seeded samplers for states, unitaries and operations.
//!
//! Haar-random vectors are normalized standard complex Gaussians; unitaries
//! come from the QR decomposition of a Ginibre matrix with the phase of the
//! `R` diagonal absorbed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{c64, identity, ComplexMatrix, Dims, Factor};

pub type LabRng = ChaCha8Rng;

/// Independent stream `stream` of the master `seed`.
///
/// Streams are counter-based, so trial `k` sees the same numbers regardless
/// of how trials are scheduled across threads.
pub fn stream_rng(seed: u64, stream: u64) -> LabRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(s * re, s * im)
    })
}

/// Haar-random unit vector as an `n x 1` matrix.
pub fn haar_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let v = gaussian_matrix(rng, n, 1);
    let nrm = v.norm();
    v / c64(nrm, 0.0)
}

/// Haar-random product vector `a (x) b`.
pub fn product_vector<R: Rng + ?Sized>(rng: &mut R, dims: Dims) -> ComplexMatrix {
    let a = haar_vector(rng, dims.a);
    let b = haar_vector(rng, dims.b);
    a.kronecker(&b)
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random density operator of the given rank (Ginibre ensemble).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, rank.max(1));
    let m = &g * g.adjoint();
    let t = m.trace();
    m / t
}

/// Random full-rank density operator.
pub fn random_mixed_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_density(rng, n, n)
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

/// Kraus operators of a random nonselective operation on dimension `n`,
/// sliced from a Haar isometry `C^n -> C^(n*count)`.
pub fn random_channel_kraus<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Vec<ComplexMatrix> {
    let u = haar_unitary(rng, n * count);
    let v = u.columns(0, n).into_owned();
    (0..count).map(|i| v.rows(i * n, n).into_owned()).collect()
}

/// Kraus operators of a random operation scaled so that `sum K*K <= scale * I`.
pub fn random_subchannel_kraus<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    count: usize,
    scale: f64,
) -> Vec<ComplexMatrix> {
    random_channel_kraus(rng, n, count)
        .into_iter()
        .map(|k| k * c64(scale.sqrt(), 0.0))
        .collect()
}

/// A random contraction (`|K| <= 1`), i.e. a pure selective Kraus operator.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let top = crate::numerics::operator_norm(&g);
    let shrink: f64 = rng.random_range(0.3..1.0);
    g * c64(shrink / top, 0.0)
}

/// Random rank-1 complete projection set on dimension `n` (a random basis).
pub fn random_basis_projections<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<ComplexMatrix> {
    let u = haar_unitary(rng, n);
    (0..n)
        .map(|k| {
            let v = u.columns(k, 1).into_owned();
            &v * v.adjoint()
        })
        .collect()
}

/// Random local unitary `U_A (x) I` or `I (x) U_B`.
pub fn local_unitary<R: Rng + ?Sized>(rng: &mut R, dims: Dims, factor: Factor) -> ComplexMatrix {
    let u = haar_unitary(rng, dims.of(factor));
    match factor {
        Factor::A => u.kronecker(&identity(dims.b)),
        Factor::B => identity(dims.a).kronecker(&u),
    }
}

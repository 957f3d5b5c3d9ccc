use rand::Rng;

use super::intertwiner::{floor_singular_values, solve_intertwiner_on, solve_local_intertwiner};
use super::{finish, run_trials, Experiment, ExperimentReport, Tally};
use crate::algebra::{is_abelian_projection, is_cyclic_vector, is_separating_vector, OperatorAlgebra};
use crate::entanglement::{
    decide_entanglement, entanglement_entropy, local_preparation_channel, min_pt_eigen,
    projective_disentangler, transport_certificate,
};
use crate::numerics::{
    c64, hermitian_eig, identity, ket, lift, matrix_unit, operator_norm, partial_trace, pauli_z,
    projector, schmidt_rank, singlet, singular_values, spin_projections, tensor_product,
    trace_norm, ComplexMatrix, Dims, Factor,
};
use crate::operations::{lift_local_to, KrausOperation};
use crate::random::{
    gaussian_matrix, haar_unitary, haar_vector, product_vector, random_basis_projections,
    random_channel_kraus, random_contraction, random_density, random_mixed_density,
    random_subchannel_kraus, LabRng,
};
use crate::states::{
    is_product_state, norm_distance, ProductCertificate, ProductTerm, StateFunctional,
    PRODUCT_TOL,
};

/// Documented limitation attached to the preparation report.
pub const INFINITE_FACTOR_NOTE: &str = "Not tested here: the statement that no pure (single-Kraus) \
local operation can disentangle relies on factors without abelian projections, which have no \
finite-dimensional realization. Every factor built by this crate has rank-1 abelian projections, \
and the projective disentangler above uses exactly those.";

const INTERTWINER_TOL: f64 = 1e-8;

fn state(d: ComplexMatrix, dims: Dims) -> StateFunctional {
    StateFunctional::new(d)
        .and_then(|s| s.with_dims(dims))
        .expect("sampled densities are valid")
}

fn vector_state(x: &ComplexMatrix, dims: Dims) -> StateFunctional {
    StateFunctional::vector_state(x)
        .and_then(|s| s.with_dims(dims))
        .expect("sampled vectors are nonzero")
}

fn cnot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, c)] = c64(1.0, 0.0);
    }
    m
}

// ---------------------------------------------------------------------------

/// Steer a cyclic vector to random targets with a single local Kraus
/// operator `K = A/|A|`.
pub fn run_cyclic_approximation(seed: u64, dims: Dims, trials: usize) -> ExperimentReport {
    let exp = Experiment::CyclicApproximation;
    if dims.a < dims.b {
        return ExperimentReport::refused(
            exp,
            seed,
            dims,
            format!("B(H_A) (x) I has cyclic vectors only if dim H_A >= dim H_B (got {dims})"),
        );
    }
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let full = OperatorAlgebra::full(dims.total());
    let checks = run_trials(seed, trials, |_, rng, t| {
        let x = haar_vector(rng, dims.total());
        let y = haar_vector(rng, dims.total());
        t.flag("x_cyclic", is_cyclic_vector(&x, &ra).unwrap_or(false));
        let sol = solve_local_intertwiner(&x, &y, dims).expect("nonzero sample");
        t.at_most("intertwiner_residual", sol.residual, INTERTWINER_TOL);
        let k = &sol.operator / c64(operator_norm(&sol.operator), 0.0);
        let op = lift_local_to(&[k], dims, Factor::A).expect("contraction is a valid Kraus operator");
        t.flag("operation_local", op.is_local_to(&ra).map(|r| r.local).unwrap_or(false));
        let rho = vector_state(&x, dims);
        let outcome = op.update_state(&rho).expect("dimensions match");
        let target = vector_state(&y, dims);
        match outcome.state {
            Some(out) => {
                let d = norm_distance(&out, &target, &full).expect("same ambient space").value;
                t.at_most("state_distance", d, INTERTWINER_TOL);
            }
            None => t.flag("state_distance", false),
        }
    });

    let mut controls = Tally::default();
    let mut rng = crate::random::stream_rng(seed, u64::MAX);
    let p = product_vector(&mut rng, dims);
    let y = haar_vector(&mut rng, dims.total());
    controls.flag("product_vector_not_cyclic", !is_cyclic_vector(&p, &ra).unwrap_or(true));
    let miss = solve_local_intertwiner(&p, &y, dims).expect("nonzero").residual;
    controls.at_least("product_vector_misses_target", miss, 1e-3);

    finish(exp, seed, dims, trials, checks, controls, vec![])
}

// ---------------------------------------------------------------------------

/// Largest usable `lambda`; any smaller value keeps the remainder positive.
const LAMBDA_CAP: f64 = 1.0 - 1e-3;

struct ComponentOutcome {
    lambda: f64,
    tau_min_eig: f64,
    distance: f64,
}

/// Exhibit `omega` (given by the vector `y`) as a component of `rho_x` on
/// `B(H_A) (x) I`, via `(I (x) B) x = y`.
fn component_of(x: &ComplexMatrix, y: &ComplexMatrix, dims: Dims) -> ComponentOutcome {
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let b = solve_intertwiner_on(x, y, dims, Factor::B).expect("nonzero vectors").operator;
    let bx = lift(&b, Factor::B, dims).expect("local operator") * x;
    let norm_b = operator_norm(&b);
    let xx = x.norm_squared();
    let lambda = (bx.norm_squared() / (norm_b * norm_b * xx)).min(LAMBDA_CAP);
    let rho_x = partial_trace(&projector(x), dims, Factor::A).expect("dims checked");
    let omega_bx = partial_trace(&projector(&bx), dims, Factor::A).expect("dims checked");
    let tau = (&rho_x - &omega_bx * c64(lambda, 0.0)) / c64(1.0 - lambda, 0.0);
    let tau_min_eig = hermitian_eig(&((&tau + tau.adjoint()) * c64(0.5, 0.0)))
        .expect("symmetrized")
        .min();
    let distance = norm_distance(&vector_state(&bx, dims), &vector_state(y, dims), &ra)
        .expect("same space")
        .value;
    ComponentOutcome { lambda, tau_min_eig, distance }
}

/// States of `B(H_A) (x) I` close to a random target are components of
/// `rho_x` for separating `x`.
pub fn run_component_density(seed: u64, dims: Dims, trials: usize) -> ExperimentReport {
    let exp = Experiment::ComponentDensity;
    if dims.a != dims.b {
        return ExperimentReport::refused(
            exp,
            seed,
            dims,
            format!("needs dA = dB for B(H_A) (x) I to have separating vectors that are also cyclic (got {dims})"),
        );
    }
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let checks = run_trials(seed, trials, |_, rng, t| {
        let x = haar_vector(rng, dims.total());
        let y = haar_vector(rng, dims.total());
        let separating = is_separating_vector(&x, &ra).unwrap_or(false);
        t.flag("x_separating", separating);
        if !separating {
            return;
        }
        let c = component_of(&x, &y, dims);
        t.flag("lambda_in_open_unit_interval", c.lambda > 0.0 && c.lambda < 1.0);
        t.at_least("remainder_min_eigenvalue", c.tau_min_eig, -1e-9);
        t.at_most("component_distance", c.distance, 1e-6);
    });

    let mut controls = Tally::default();
    let mut rng = crate::random::stream_rng(seed, u64::MAX);
    let p = product_vector(&mut rng, dims);
    controls.flag("product_vector_rejected", !is_separating_vector(&p, &ra).unwrap_or(true));
    let x = haar_vector(&mut rng, dims.total());
    let own = component_of(&x, &x, dims);
    controls.flag("self_component_lambda_capped", own.lambda == LAMBDA_CAP);
    controls.at_least("self_component_remainder_min_eigenvalue", own.tau_min_eig, -1e-9);

    finish(exp, seed, dims, trials, checks, controls, vec![])
}

// ---------------------------------------------------------------------------

const FLOOR: f64 = 1e-3;

fn random_possibly_singular(rng: &mut LabRng, n: usize) -> ComplexMatrix {
    let rank = rng.random_range(0..=n);
    let g = gaussian_matrix(rng, n, rank.max(1));
    let h = gaussian_matrix(rng, rank.max(1), n);
    if rank == 0 {
        ComplexMatrix::zeros(n, n)
    } else {
        g * h
    }
}

/// Singular local operators are strong limits of invertible ones, which
/// keep cyclic vectors cyclic.
pub fn run_invertible_cyclicity(seed: u64, dims: Dims, trials: usize) -> ExperimentReport {
    let exp = Experiment::InvertibleCyclicity;
    if dims.a != dims.b {
        return ExperimentReport::refused(exp, seed, dims, format!("needs dA = dB (got {dims})"));
    }
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let checks = run_trials(seed, trials, |_, rng, t| {
        let x = haar_vector(rng, dims.total());
        let a = random_possibly_singular(rng, dims.a);
        let floored = floor_singular_values(&a, FLOOR).expect("square, positive floor");
        let diff = lift(&(&floored - &a), Factor::A, dims).expect("local") * &x;
        t.at_most("approximation_error_over_floor", diff.norm() / x.norm(), FLOOR * (1.0 + 1e-9));
        let smallest = singular_values(&floored).last().copied().unwrap_or(0.0);
        t.at_least("floored_min_singular_value", smallest, FLOOR * (1.0 - 1e-9));
        let moved = lift(&floored, Factor::A, dims).expect("local") * &x;
        t.flag("image_cyclic", is_cyclic_vector(&moved, &ra).unwrap_or(false));
        if singular_values(&a).last().copied().unwrap_or(0.0) >= FLOOR {
            t.at_most("invertible_input_unchanged", (&floored - &a).norm(), 1e-12);
        }
    });

    let mut controls = Tally::default();
    let (pp, _) = spin_projections(&pauli_z());
    if dims == Dims::new(2, 2) {
        let x = singlet();
        let floored = floor_singular_values(&pp, FLOOR).expect("valid floor");
        let exact = lift(&pp, Factor::A, dims).expect("local") * &x;
        let approx = lift(&floored, Factor::A, dims).expect("local") * &x;
        controls.flag("projection_image_not_cyclic", !is_cyclic_vector(&exact, &ra).unwrap_or(true));
        controls.flag("floored_image_cyclic", is_cyclic_vector(&approx, &ra).unwrap_or(false));
        controls.at_most("floored_error", (&approx - &exact).norm(), FLOOR);
    }
    // The error of flooring a rank-deficient projection is linear in the floor.
    let p = lift(&projector(&ket(dims.a, 0)), Factor::A, dims).expect("local");
    let x = {
        let mut rng = crate::random::stream_rng(seed, u64::MAX);
        haar_vector(&mut rng, dims.total())
    };
    let errors: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
        .iter()
        .map(|&eps| {
            let f = floor_singular_values(&projector(&ket(dims.a, 0)), eps).expect("valid floor");
            let d = (lift(&f, Factor::A, dims).expect("local") - &p) * &x;
            d.norm() / eps
        })
        .collect();
    let spread = errors.iter().fold(0.0f64, |m, e| m.max((e - errors[0]).abs() / errors[0]));
    controls.at_most("floor_sweep_linear_spread", spread, 1e-6);

    finish(exp, seed, dims, trials, checks, controls, vec![])
}

// ---------------------------------------------------------------------------

fn random_certificate(rng: &mut LabRng, dims: Dims) -> ProductCertificate {
    let k = rng.random_range(2..=6);
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let terms = raw
        .into_iter()
        .map(|w| {
            let ra = rng.random_range(1..=dims.a);
            let rb = rng.random_range(1..=dims.b);
            ProductTerm {
                weight: w / total,
                a: random_density(rng, dims.a, ra),
                b: random_density(rng, dims.b, rb),
            }
        })
        .collect();
    ProductCertificate::new(dims, terms)
}

/// Pure or multi-Kraus, selective or not.
fn random_local_kraus(rng: &mut LabRng, d: usize) -> Vec<ComplexMatrix> {
    match rng.random_range(0..4) {
        0 => vec![haar_unitary(rng, d)],
        1 => vec![random_contraction(rng, d)],
        2 => {
            let count = rng.random_range(2..=3);
            random_channel_kraus(rng, d, count)
        }
        _ => {
            let count = rng.random_range(2..=3);
            let scale = rng.random_range(0.3..1.0);
            random_subchannel_kraus(rng, d, count, scale)
        }
    }
}

/// Local operations map certified separable states to certified separable
/// states.
pub fn run_no_creation(seed: u64, dims: Dims, trials: usize) -> ExperimentReport {
    let exp = Experiment::NoCreation;
    let checks = run_trials(seed, trials, |_, rng, t| {
        let cert = random_certificate(rng, dims);
        let rho = state(cert.reconstruct(), dims);
        let side = if rng.random_bool(0.5) { Factor::A } else { Factor::B };
        let kraus = random_local_kraus(rng, dims.of(side));
        let op = lift_local_to(&kraus, dims, side).expect("valid local operation");
        let outcome = op.update_state(&rho).expect("dimensions match");
        let Some(out) = outcome.state else {
            t.flag("null_outcomes_excluded", true);
            return;
        };
        match transport_certificate(&cert, &kraus, side).expect("dimensions match") {
            Some(moved) => {
                t.flag("transported_certificate_valid", moved.validate().is_ok());
                let err = trace_norm(&(moved.reconstruct() - out.density()));
                t.at_most("transported_certificate_error", err, 1e-8);
            }
            None => t.flag("transported_certificate_valid", false),
        }
        let (min_eig, _) = min_pt_eigen(&out, dims).expect("dims attached");
        t.at_least("output_min_pt_eigenvalue", min_eig, -1e-9);

        // Operations on opposite sides commute.
        let other = random_local_kraus(rng, dims.of(side.other()));
        let op2 = lift_local_to(&other, dims, side.other()).expect("valid local operation");
        let ab = op2.push_forward(&op.push_forward(rho.density()).expect("dims")).expect("dims");
        let ba = op.push_forward(&op2.push_forward(rho.density()).expect("dims")).expect("dims");
        t.at_most("opposite_sides_commute", trace_norm(&(ab - ba)), 1e-10);
    });

    let mut controls = Tally::default();
    if dims == Dims::new(2, 2) {
        let plus = (ket(2, 0) + ket(2, 1)) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let input = vector_state(&tensor_product(&plus, &ket(2, 0)), dims);
        let op = KrausOperation::unitary(cnot()).expect("unitary");
        let out = op.update_state(&input).expect("dims").state.expect("unitary never nulls");
        let (min_eig, _) = min_pt_eigen(&out, dims).expect("dims");
        controls.at_most("nonlocal_cnot_min_pt_eigenvalue", min_eig, -0.4);
    } else {
        // Controlled flip: |0><0| (x) I + |1><1| (x) X_01 on a general pair.
        let mut flip = identity(dims.b);
        flip[(0, 0)] = c64(0.0, 0.0);
        flip[(1, 1)] = c64(0.0, 0.0);
        flip[(0, 1)] = c64(1.0, 0.0);
        flip[(1, 0)] = c64(1.0, 0.0);
        let p0 = projector(&ket(dims.a, 0));
        let u = tensor_product(&p0, &identity(dims.b)) + tensor_product(&(identity(dims.a) - &p0), &flip);
        let plus = (ket(dims.a, 0) + ket(dims.a, 1)) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let input = vector_state(&tensor_product(&plus, &ket(dims.b, 0)), dims);
        let out = KrausOperation::unitary(u)
            .expect("unitary")
            .update_state(&input)
            .expect("dims")
            .state
            .expect("unitary never nulls");
        let (min_eig, _) = min_pt_eigen(&out, dims).expect("dims");
        controls.at_most("nonlocal_cnot_min_pt_eigenvalue", min_eig, -0.4);
    }

    finish(exp, seed, dims, trials, checks, controls, vec![])
}

// ---------------------------------------------------------------------------

/// Haar-random pure states are entangled and cyclic for both factors.
pub fn run_generic_entanglement(seed: u64, dims: Dims, trials: usize) -> ExperimentReport {
    let exp = Experiment::GenericEntanglement;
    if dims.a != dims.b {
        return ExperimentReport::refused(
            exp,
            seed,
            dims,
            format!("needs dA = dB so that both factors have cyclic vectors (got {dims})"),
        );
    }
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let rb = OperatorAlgebra::tensor_factor(dims, Factor::B);
    let full_rank = dims.a.min(dims.b);
    let checks = run_trials(seed, trials, |_, rng, t| {
        let x = haar_vector(rng, dims.total());
        t.flag("full_schmidt_rank", schmidt_rank(&x, dims).map(|r| r == full_rank).unwrap_or(false));
        t.flag("cyclic_for_a", is_cyclic_vector(&x, &ra).unwrap_or(false));
        t.flag("cyclic_for_b", is_cyclic_vector(&x, &rb).unwrap_or(false));
        t.flag("entangled", entanglement_entropy(&x, dims).map(|e| e > 1e-9).unwrap_or(false));
    });

    let mut controls = Tally::default();
    for k in 0..20u64 {
        let mut rng = crate::random::stream_rng(seed, u64::MAX - k);
        let p = product_vector(&mut rng, dims);
        controls.flag("product_samples_not_cyclic", !is_cyclic_vector(&p, &ra).unwrap_or(true));
        controls.flag("product_samples_zero_entropy", entanglement_entropy(&p, dims).map(|e| e < 1e-9).unwrap_or(false));
    }

    finish(exp, seed, dims, trials, checks, controls, vec![])
}

// ---------------------------------------------------------------------------

/// With an abelian side every state is separable; with two full factors an
/// entangled state exists.
pub fn run_abelian_classical(seed: u64, dims: Dims, trials: usize) -> ExperimentReport {
    let exp = Experiment::AbelianClassical;
    let diag_a = OperatorAlgebra::local(&[diag_generator(dims.a)], dims, Factor::A).expect("local");
    let diag_b = OperatorAlgebra::local(&[diag_generator(dims.b)], dims, Factor::B).expect("local");
    let full_a = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let full_b = OperatorAlgebra::tensor_factor(dims, Factor::B);

    let checks = run_trials(seed, trials, |k, rng, t| {
        let d = if k % 2 == 0 {
            random_mixed_density(rng, dims.total())
        } else {
            projector(&haar_vector(rng, dims.total()))
        };
        let rho = state(d, dims);
        for (name, ra, rb, max_terms) in [
            ("diagonal_full", &diag_a, &full_b, dims.a),
            ("diagonal_diagonal", &diag_a, &diag_b, dims.a * dims.b),
        ] {
            match decide_entanglement(&rho, ra, rb) {
                Ok(v) => match v.certificate() {
                    Some(c) => {
                        t.flag(&format!("{name}_separable"), true);
                        t.flag(&format!("{name}_certificate_valid"), c.validate().is_ok());
                        t.flag(&format!("{name}_certificate_size"), c.len() <= max_terms);
                        t.at_most(&format!("{name}_certificate_residual"), c.residual_on(&rho, ra, rb), 1e-9);
                    }
                    None => t.flag(&format!("{name}_separable"), false),
                },
                Err(_) => t.flag(&format!("{name}_separable"), false),
            }
        }
    });

    let mut controls = Tally::default();
    let mut x = ComplexMatrix::zeros(dims.total(), 1);
    for i in 0..dims.a.min(dims.b) {
        x += tensor_product(&ket(dims.a, i), &ket(dims.b, i));
    }
    let maximal = vector_state(&x, dims);
    let v = decide_entanglement(&maximal, &full_a, &full_b);
    controls.flag("full_full_entangled", v.map(|v| v.is_entangled()).unwrap_or(false));
    if dims == Dims::new(2, 2) {
        let s = vector_state(&singlet(), dims);
        let v = decide_entanglement(&s, &full_a, &full_b);
        controls.flag("singlet_entangled", v.map(|v| v.is_entangled()).unwrap_or(false));
    }
    // The abelian certificate only represents the state on the algebra pair.
    if let Ok(v) = decide_entanglement(&maximal, &diag_a, &full_b) {
        let c = v.certificate().expect("abelian side is always separable");
        controls.at_least("abelian_certificate_differs_on_full_algebra", c.residual(maximal.density()), 1e-3);
    }

    finish(exp, seed, dims, trials, checks, controls, vec![])
}

fn diag_generator(n: usize) -> ComplexMatrix {
    let entries: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    crate::numerics::diag(&entries)
}

// ---------------------------------------------------------------------------

/// Local preparation yields `target (x) omega_B` without selection; rank-1
/// projective measurements disentangle every input.
pub fn run_preparation_contrast(seed: u64, dims: Dims, trials: usize) -> ExperimentReport {
    let exp = Experiment::PreparationContrast;
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let rb = OperatorAlgebra::tensor_factor(dims, Factor::B);
    let units: Vec<ComplexMatrix> = (0..dims.a)
        .flat_map(|i| (0..dims.a).map(move |j| matrix_unit(dims.a, i, j)))
        .collect();

    let checks = run_trials(seed, trials, |k, rng, t| {
        let target = StateFunctional::new(random_mixed_density(rng, dims.a)).expect("valid density");
        let input = if k % 2 == 0 {
            vector_state(&haar_vector(rng, dims.total()), dims)
        } else {
            state(random_mixed_density(rng, dims.total()), dims)
        };
        let channel = local_preparation_channel(&target, dims).expect("valid target");
        t.flag("nonselective", !channel.is_selective());
        t.at_most("completeness_residual", (channel.effect() - identity(dims.total())).norm(), 1e-12);
        let mut heis: f64 = 0.0;
        for x in &units {
            let lifted = lift(x, Factor::A, dims).expect("local");
            let expect = (target.density() * x).trace();
            let img = channel.apply_heisenberg(&lifted).expect("dims");
            heis = heis.max((img - identity(dims.total()) * expect).norm());
        }
        t.at_most("heisenberg_replace_residual", heis, 1e-10);
        let out = channel.update_state(&input).expect("dims").state.expect("nonselective");
        let reduced_b = partial_trace(input.density(), dims, Factor::B).expect("dims");
        let expected = tensor_product(target.density(), &reduced_b);
        t.at_most("output_product_error", trace_norm(&(out.density() - expected)), 1e-9);
        t.flag("output_is_product", is_product_state(&out, &ra, &rb, PRODUCT_TOL).unwrap_or(false));

        let projections = random_basis_projections(rng, dims.a);
        match projective_disentangler(&input, &projections) {
            Ok((out, v)) => {
                t.flag("disentangler_certified", v.is_separable());
                let (min_eig, _) = min_pt_eigen(&out, dims).expect("dims");
                t.at_least("disentangler_min_pt_eigenvalue", min_eig, -1e-9);
            }
            Err(_) => t.flag("disentangler_certified", false),
        }
    });

    let mut controls = Tally::default();
    if dims.a == 2 {
        let plus = (ket(2, 0) + ket(2, 1)) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let target = StateFunctional::vector_state(&plus).expect("nonzero");
        let channel = local_preparation_channel(&target, dims).expect("valid");
        let mut x = ComplexMatrix::zeros(dims.total(), 1);
        x += tensor_product(&ket(2, 0), &ket(dims.b, 1));
        x -= tensor_product(&ket(2, 1), &ket(dims.b, 0));
        let input = vector_state(&x, dims);
        let out = channel.update_state(&input).expect("dims").state.expect("nonselective");
        let reduced_b = partial_trace(input.density(), dims, Factor::B).expect("dims");
        let expected = tensor_product(&projector(&plus), &reduced_b);
        controls.at_most("plus_target_on_singlet", trace_norm(&(out.density() - expected)), 1e-12);
    }
    // The identity channel leaves an entangled input entangled; the product
    // test must notice.
    let mut x = ComplexMatrix::zeros(dims.total(), 1);
    for i in 0..dims.a.min(dims.b) {
        x += tensor_product(&ket(dims.a, i), &ket(dims.b, i));
    }
    let maximal = vector_state(&x, dims);
    controls.flag(
        "identity_channel_output_not_product",
        !is_product_state(&maximal, &ra, &rb, PRODUCT_TOL).unwrap_or(true),
    );
    let atom = lift(&projector(&ket(dims.a, 0)), Factor::A, dims).expect("local");
    let check = is_abelian_projection(&atom, &ra);
    controls.flag(
        "rank_one_abelian_projection_exists",
        check.map(|c| c.abelian && c.atom == Some(true)).unwrap_or(false),
    );
    // A rank-2 projection of a factor is not abelian when dA >= 2.
    if dims.a >= 2 {
        let p2 = projector(&ket(dims.a, 0)) + projector(&ket(dims.a, 1));
        let big = lift(&p2, Factor::A, dims).expect("local");
        controls.flag(
            "rank_two_projection_not_abelian",
            is_abelian_projection(&big, &ra).map(|c| !c.abelian).unwrap_or(false),
        );
    }

    finish(exp, seed, dims, trials, checks, controls, vec![INFINITE_FACTOR_NOTE.to_owned()])
}

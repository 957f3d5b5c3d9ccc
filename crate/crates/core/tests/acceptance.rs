//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DMatrix;
use operon::algebra::{is_cyclic_vector, OperatorAlgebra};
use operon::entanglement::{
    entanglement_entropy, min_pt_eigen, mixing_operation, ppt_verdict, projective_disentangler,
};
use operon::lab::{
    floor_singular_values, run_component_density, run_cyclic_approximation,
    run_generic_entanglement, run_no_creation, run_preparation_contrast, ExperimentReport,
};
use operon::numerics::{
    c64, hermitian_eig, identity, ket, lift, pauli_x, pauli_z, projector, singlet, spin_along,
    spin_projections, tensor_product, trace_norm,
};
use operon::random::{
    haar_unitary, product_vector, random_channel_kraus, random_hermitian, random_subchannel_kraus,
    stream_rng,
};
use operon::{ComplexMatrix, Dims, Factor, KrausOperation, StateFunctional};
use rand::Rng;

const D22: Dims = Dims::new(2, 2);
const D23: Dims = Dims::new(2, 3);
const D33: Dims = Dims::new(3, 3);
const SEED: u64 = 42;

const ENTROPY_TOL: f64 = 1e-12;
const EXACT_OUTPUT_TOL: f64 = 1e-12;
const LOCALITY_RESIDUAL_TOL: f64 = 1e-9;
const LOCALITY_TRIALS: u64 = 240;
const CNOT_CONTROL_MAX: f64 = -0.4;
const NO_CREATION_BUDGET_S: f64 = 10.0;
const FLOOR: f64 = 1e-3;
const WERNER_BUDGET_S: f64 = 30.0;
const SEPARABLE_DISTANCE_TOL: f64 = 1e-7;

/// Smallest eigenvalue of the partial transpose of `|+0><+0|` after CNOT,
/// i.e. of the Bell state `(|00> + |11>)/sqrt 2`. Computed by hand before the
/// build: the partial transpose is half the swap operator, whose spectrum is
/// `{1/2, 1/2, 1/2, -1/2}`.
const CNOT_PLUS_ZERO_PT_MIN: f64 = -0.5;

type Outcome = (bool, String);

fn report_ok(r: &ExperimentReport) -> Result<(), String> {
    if r.passed() {
        return Ok(());
    }
    let bad: Vec<_> = r
        .checks
        .iter()
        .chain(&r.controls)
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({}/{})", c.name, c.failures, c.samples))
        .collect();
    Err(format!("{} {} failed: {}", r.experiment, r.dims, bad.join(", ")))
}

fn worst(r: &ExperimentReport, name: &str) -> f64 {
    r.check(name).and_then(|c| c.worst).unwrap_or(f64::NAN)
}

fn c1_singlet_entropy() -> Outcome {
    let s = entanglement_entropy(&singlet(), D22).unwrap();
    let err = (s - std::f64::consts::LN_2).abs();
    let mut rng = stream_rng(SEED, 1);
    let mut prod_worst: f64 = 0.0;
    for dims in [D22, D23, D33] {
        for _ in 0..50 {
            let p = product_vector(&mut rng, dims);
            prod_worst = prod_worst.max(entanglement_entropy(&p, dims).unwrap().abs());
        }
    }
    (
        err <= ENTROPY_TOL && prod_worst <= ENTROPY_TOL,
        format!("|E(singlet) - ln 2| = {err:.1e}, max E(product) = {prod_worst:.1e}"),
    )
}

fn c2_projective_disentangler() -> Outcome {
    let rho = StateFunctional::vector_state(&singlet()).unwrap().with_dims(D22).unwrap();
    let (p_up, p_down) = spin_projections(&pauli_z());
    let (out, verdict) = projective_disentangler(&rho, &[p_up, p_down]).unwrap();
    let expected = (projector(&ket(4, 1)) + projector(&ket(4, 2))) * c64(0.5, 0.0);
    let err = trace_norm(&(out.density() - expected));
    let terms = verdict.certificate().map(|c| c.len()).unwrap_or(0);
    (
        err <= EXACT_OUTPUT_TOL && verdict.is_separable() && terms == 2,
        format!("trace-norm error {err:.1e}, verdict {}, {terms} certificate terms", verdict.name()),
    )
}

fn c3_mixing_operation() -> Outcome {
    let rho = StateFunctional::vector_state(&singlet()).unwrap().with_dims(D22).unwrap();
    let mut rng = stream_rng(SEED, 3);
    let mut worst_err: f64 = 0.0;
    let mut all_separable = true;
    let axes: Vec<[f64; 3]> = std::iter::once([0.0, 0.0, 1.0])
        .chain((0..4).map(|_| {
            let v: [f64; 3] = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        }))
        .collect();
    for axis in axes {
        let sigma = spin_along(axis);
        let op = mixing_operation(&sigma, D22).unwrap();
        let out = op.update_state(&rho).unwrap().state.unwrap();
        let (plus, minus) = spin_projections(&sigma);
        let expected = (tensor_product(&plus, &minus) + tensor_product(&minus, &plus)) * c64(0.5, 0.0);
        let flipped = lift(&sigma, Factor::A, D22).unwrap() * singlet();
        let mixture = (projector(&singlet()) + projector(&flipped)) * c64(0.5, 0.0);
        worst_err = worst_err
            .max(trace_norm(&(out.density() - &expected)))
            .max(trace_norm(&(out.density() - &mixture)));
        let verdict = ppt_verdict(&out, D22).unwrap();
        all_separable &= verdict.is_separable();
    }
    (
        worst_err <= EXACT_OUTPUT_TOL && all_separable,
        format!("5 axes, worst trace-norm error {worst_err:.1e}, all certified separable: {all_separable}"),
    )
}

fn cnot() -> ComplexMatrix {
    let mut m = DMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, c)] = c64(1.0, 0.0);
    }
    m
}

/// `exp(i eps H)` for a random Hermitian `H` of unit operator norm.
fn small_unitary(rng: &mut impl Rng, eps: f64) -> ComplexMatrix {
    let e = hermitian_eig(&random_hermitian(rng, 4)).unwrap();
    let scale = e.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut u = ComplexMatrix::zeros(4, 4);
    for (k, &l) in e.eigenvalues.iter().enumerate() {
        let v = e.vector(k);
        u += &v * v.adjoint() * c64(0.0, eps * l / scale).exp();
    }
    u
}

fn random_operation(rng: &mut impl Rng) -> (KrausOperation, bool) {
    let kind = rng.random_range(0..6);
    let count = rng.random_range(1..=3);
    match kind {
        0 => (operon::operations::lift_local(&random_channel_kraus(rng, 2, count), D22).unwrap(), true),
        1 => (operon::operations::lift_local(&random_subchannel_kraus(rng, 2, count, 0.8), D22).unwrap(), true),
        2 => (KrausOperation::new(random_channel_kraus(rng, 4, count)).unwrap(), false),
        3 => (KrausOperation::new(random_subchannel_kraus(rng, 4, count, 0.8)).unwrap(), false),
        4 => {
            let u = haar_unitary(rng, 2);
            (KrausOperation::unitary(lift(&u, Factor::B, D22).unwrap()).unwrap(), false)
        }
        _ => {
            // Local channel followed by a weak global unitary kick.
            let local = operon::operations::lift_local(&random_channel_kraus(rng, 2, count), D22).unwrap();
            let u = small_unitary(rng, 0.05);
            let op = operon::compose(&KrausOperation::unitary(u).unwrap(), &local).unwrap();
            (op, false)
        }
    }
}

fn c4_locality() -> Outcome {
    let ra = OperatorAlgebra::tensor_factor(D22, Factor::A);
    let mut disagreements = 0;
    let mut local_count = 0;
    let mut rng = stream_rng(SEED, 4);
    for _ in 0..LOCALITY_TRIALS {
        let (op, built_local) = random_operation(&mut rng);
        let r = op.is_local_to(&ra).unwrap();
        let by_commutator = r.commutator_residual <= LOCALITY_RESIDUAL_TOL;
        let by_factorization = r.factorization_residual <= LOCALITY_RESIDUAL_TOL;
        if r.local != by_commutator || r.local != by_factorization || r.local != built_local {
            disagreements += 1;
        }
        local_count += usize::from(r.local);
    }
    let c = KrausOperation::unitary(cnot()).unwrap().is_local_to(&ra).unwrap();
    let control_fails_all = !c.local
        && c.commutator_residual > LOCALITY_RESIDUAL_TOL
        && c.factorization_residual > LOCALITY_RESIDUAL_TOL;
    (
        disagreements == 0 && control_fails_all && local_count > 0 && local_count < LOCALITY_TRIALS as usize,
        format!(
            "{LOCALITY_TRIALS} operations ({local_count} local), {disagreements} disagreements, CNOT fails all three: {control_fails_all}"
        ),
    )
}

fn brute_force_pt_min(d: &ComplexMatrix, da: usize, db: usize) -> f64 {
    // Transpose B by swapping the B indices entry by entry, then take the
    // smallest eigenvalue of the real-embedded Hermitian matrix.
    let n = da * db;
    let pt = DMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        d[(i * db + l, k * db + j)]
    });
    let real = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = pt[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    real.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn c5_no_creation() -> Outcome {
    let start = Instant::now();
    let mut errors = Vec::new();
    let mut cnot_value = f64::NEG_INFINITY;
    for dims in [D22, D23] {
        let r = run_no_creation(SEED, dims, 500);
        if let Err(e) = report_ok(&r) {
            errors.push(e);
        }
        if r.check("transported_certificate_error").map(|c| c.samples).unwrap_or(0) < 500 {
            errors.push(format!("{dims}: fewer than 500 trials"));
        }
        match r.controls.iter().find(|c| c.name == "nonlocal_cnot_min_pt_eigenvalue") {
            Some(c) => cnot_value = cnot_value.max(c.worst.unwrap_or(f64::INFINITY)),
            None => errors.push(format!("{dims}: CNOT control missing")),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let plus_zero = tensor_product(
        &((ket(2, 0) + ket(2, 1)) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0)),
        &ket(2, 0),
    );
    let out = cnot() * plus_zero;
    let library = min_pt_eigen(&StateFunctional::vector_state(&out).unwrap(), D22).unwrap().0;
    let oracle = brute_force_pt_min(&projector(&out), 2, 2);
    let oracle_ok = (oracle - CNOT_PLUS_ZERO_PT_MIN).abs() <= 1e-12 && (library - oracle).abs() <= 1e-12;
    (
        errors.is_empty() && oracle_ok && cnot_value <= CNOT_CONTROL_MAX && elapsed <= NO_CREATION_BUDGET_S,
        format!(
            "2x2 and 2x3, 500 trials each, CNOT|+0> PT min {library:.3} (oracle {CNOT_PLUS_ZERO_PT_MIN}), {elapsed:.2} s{}",
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }
        ),
    )
}

fn c6_cyclicity() -> Outcome {
    let mut errors = Vec::new();
    let mut resid: f64 = 0.0;
    for dims in [D22, D33] {
        let g = run_generic_entanglement(SEED, dims, 1000);
        let c = run_cyclic_approximation(SEED, dims, 200);
        for r in [&g, &c] {
            if let Err(e) = report_ok(r) {
                errors.push(e);
            }
        }
        resid = resid.max(worst(&c, "intertwiner_residual"));
    }
    (
        errors.is_empty() && resid <= 1e-8,
        format!("2x2 and 3x3: full rank, bicyclic and steerable, worst intertwiner residual {resid:.1e}{}",
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }),
    )
}

fn c7_component_density() -> Outcome {
    let r = run_component_density(SEED, D22, 200);
    let ok = report_ok(&r);
    (
        ok.is_ok(),
        format!(
            "200 trials, worst component distance {:.1e}, worst remainder min eigenvalue {:.1e}{}",
            worst(&r, "component_distance"),
            worst(&r, "remainder_min_eigenvalue"),
            ok.err().map(|e| format!("; {e}")).unwrap_or_default()
        ),
    )
}

fn c8_invertible_trap() -> Outcome {
    let ra = OperatorAlgebra::tensor_factor(D22, Factor::A);
    let x = singlet();
    let (p_plus, _) = spin_projections(&pauli_x());
    let floored = floor_singular_values(&p_plus, FLOOR).unwrap();
    let exact = lift(&p_plus, Factor::A, D22).unwrap() * &x;
    let approx = lift(&floored, Factor::A, D22).unwrap() * &x;
    let err = (&approx - &exact).norm();
    let exact_cyclic = is_cyclic_vector(&exact, &ra).unwrap();
    let approx_cyclic = is_cyclic_vector(&approx, &ra).unwrap();
    (
        err <= FLOOR && approx_cyclic && !exact_cyclic,
        format!("error {err:.3e}, floored image cyclic: {approx_cyclic}, exact image cyclic: {exact_cyclic}"),
    )
}

fn c9_preparation() -> Outcome {
    let r = run_preparation_contrast(SEED, D22, 200);
    let ok = report_ok(&r);
    (
        ok.is_ok(),
        format!(
            "200 trials, product error {:.1e}, completeness {:.1e}, Heisenberg replace {:.1e}{}",
            worst(&r, "output_product_error"),
            worst(&r, "completeness_residual"),
            worst(&r, "heisenberg_replace_residual"),
            ok.err().map(|e| format!("; {e}")).unwrap_or_default()
        ),
    )
}

fn werner(p: f64) -> ComplexMatrix {
    projector(&singlet()) * c64(p, 0.0) + identity(4) * c64((1.0 - p) / 4.0, 0.0)
}

fn c10_werner() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, entangled) in [(0.0, false), (0.2, false), (0.3, false), (0.4, true), (0.7, true), (1.0, true)] {
        let d = werner(p);
        let oracle = brute_force_pt_min(&d, 2, 2);
        let closed_form = (1.0 - 3.0 * p) / 4.0;
        let rho = StateFunctional::bipartite(d, D22).unwrap();
        let verdict = ppt_verdict(&rho, D22).unwrap();
        let (lib_min, _) = min_pt_eigen(&rho, D22).unwrap();
        let good = if entangled {
            verdict.is_entangled() && oracle < 0.0
        } else {
            verdict
                .certificate()
                .map(|c| c.residual(rho.density()) <= SEPARABLE_DISTANCE_TOL)
                .unwrap_or(false)
                && oracle >= -1e-12
        };
        let good = good && (oracle - closed_form).abs() <= 1e-12 && (lib_min - oracle).abs() <= 1e-12;
        ok &= good;
        parts.push(format!("p={p}: {}", verdict.name()));
    }
    let elapsed = start.elapsed().as_secs_f64();
    (ok && elapsed <= WERNER_BUDGET_S, format!("{} ({elapsed:.2} s)", parts.join(", ")))
}

fn run_binary(threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_operon"))
        .args(["run", "--stable-output", "--seed", "7"])
        .env("OPERON_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?} with {threads} threads", out.status.code()));
    }
    Ok(out.stdout)
}

fn c11_determinism() -> Outcome {
    let n = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4).max(2).to_string();
    let runs: Result<Vec<_>, _> = ["1", "1", &n].iter().map(|t| run_binary(t)).collect();
    match runs {
        Ok(r) => (
            r[0] == r[1] && r[0] == r[2] && !r[0].is_empty(),
            format!("{} bytes, identical across two runs and 1 vs {n} threads: {}", r[0].len(), r[0] == r[1] && r[0] == r[2]),
        ),
        Err(e) => (false, e),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("singlet entropy", c1_singlet_entropy),
        ("projective disentangler", c2_projective_disentangler),
        ("mixing operation", c3_mixing_operation),
        ("locality criteria agree", c4_locality),
        ("no creation of entanglement", c5_no_creation),
        ("cyclicity suite", c6_cyclicity),
        ("component density", c7_component_density),
        ("invertible approximation", c8_invertible_trap),
        ("preparation channel", c9_preparation),
        ("Werner verdicts", c10_werner),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = f();
        failed += usize::from(!pass);
        println!("{} {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

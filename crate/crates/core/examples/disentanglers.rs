//! Three local operations that remove the entanglement of a singlet, each
//! returning a product certificate for its output.

use operon::entanglement::{mixing_operation, nondegenerate_disentangler, projective_disentangler};
use operon::numerics::{diag, pauli_z, singlet, spin_along, spin_projections};
use operon::{Dims, SeparabilityVerdict, StateFunctional};

fn show(name: &str, out: &StateFunctional, verdict: &SeparabilityVerdict) {
    match verdict.certificate() {
        Some(c) => println!(
            "{name:<26} {} with {} terms, residual {:.1e}",
            verdict.name(),
            c.len(),
            c.residual(out.density())
        ),
        None => println!("{name:<26} {}", verdict.name()),
    }
}

fn main() -> operon::Result<()> {
    let dims = Dims::new(2, 2);
    let rho = StateFunctional::vector_state(&singlet())?.with_dims(dims)?;

    let (up, down) = spin_projections(&pauli_z());
    let (out, verdict) = projective_disentangler(&rho, &[up, down])?;
    show("measure sigma_z on A", &out, &verdict);

    let (out, verdict) = nondegenerate_disentangler(&rho, &diag(&[1.0, -2.0]))?;
    show("measure diag(1, -2) on A", &out, &verdict);

    let sigma = spin_along([0.6, 0.0, 0.8]);
    let mix = mixing_operation(&sigma, dims)?;
    let out = mix.update_state(&rho)?.state.expect("nonselective");
    let verdict = operon::entanglement::ppt_verdict(&out, dims)?;
    show("mix with sigma_a on A", &out, &verdict);

    match nondegenerate_disentangler(&rho, &diag(&[1.0, 1.0])) {
        Err(e) => println!("degenerate observable rejected: {e}"),
        Ok(_) => println!("degenerate observable unexpectedly accepted"),
    }
    Ok(())
}

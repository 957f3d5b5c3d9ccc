//! Build Kraus operations, compose them, apply them in both pictures and
//! test locality.

use operon::algebra::OperatorAlgebra;
use operon::numerics::{c64, identity, ket, pauli_x, pauli_z, spin_projections, tensor_product, trace};
use operon::operations::{compose, lift_local};
use operon::{Dims, Factor, KrausOperation, StateFunctional};

fn cnot() -> operon::ComplexMatrix {
    let (up, down) = spin_projections(&pauli_z());
    tensor_product(&up, &identity(2)) + tensor_product(&down, &pauli_x())
}

fn main() -> operon::Result<()> {
    let dims = Dims::new(2, 2);
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);

    // Amplitude damping on qubit A.
    let g: f64 = 0.3;
    let k0 = operon::numerics::diag(&[1.0, (1.0 - g).sqrt()]);
    let mut k1 = operon::ComplexMatrix::zeros(2, 2);
    k1[(0, 1)] = c64(g.sqrt(), 0.0);
    let damping = lift_local(&[k0, k1], dims)?;

    let rho = StateFunctional::vector_state(&ket(4, 2))?.with_dims(dims)?;
    let out = damping.update_state(&rho)?.state.expect("nonselective");
    println!("damping |10>: P(|00>) = {:.2}", out.density()[(0, 0)].re);

    // Heisenberg and Schrodinger pictures give the same expectation.
    let z = tensor_product(&pauli_z(), &identity(2));
    let (pushed, _) = damping.apply_schrodinger(&rho)?;
    println!(
        "<Z_A> after damping: {:.3} (Schrodinger) vs {:.3} (Heisenberg)",
        trace(&(&pushed * &z)).re,
        rho.expectation(&damping.apply_heisenberg(&z)?)?.re
    );

    // A selective operation: keep only the |0> outcome on A.
    let (up, _) = spin_projections(&pauli_z());
    let filter = lift_local(&[up], dims)?;
    let plus = (ket(4, 0) + ket(4, 2)) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let outcome = filter.update_state(&StateFunctional::vector_state(&plus)?)?;
    println!("filter on |+0>: selective {}, acceptance {:.2}", filter.is_selective(), outcome.acceptance_probability);

    // Composition: the inner operation acts on the state first.
    let both = compose(&KrausOperation::unitary(cnot())?, &damping)?;
    println!("CNOT after damping has {} Kraus operators", both.kraus().len());

    for (name, t) in [("damping", &damping), ("CNOT", &KrausOperation::unitary(cnot())?)] {
        let r = t.is_local_to(&ra)?;
        println!(
            "{name:<8} local to A: {:<5}  membership {:.1e}  commutator {:.1e}  factorization {:.1e}",
            r.local, r.membership_residual, r.commutator_residual, r.factorization_residual
        );
    }
    Ok(())
}

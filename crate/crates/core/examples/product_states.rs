//! Expectation values, algebra-relative distances and product tests for a
//! few two-qubit states.

use operon::algebra::{support_projection, OperatorAlgebra};
use operon::numerics::{c64, ket, pauli_z, projector, singlet, tensor_product};
use operon::states::{is_product_state, norm_distance, PRODUCT_TOL};
use operon::{Dims, Factor, StateFunctional};

fn main() -> operon::Result<()> {
    let dims = Dims::new(2, 2);
    let full = OperatorAlgebra::full(4);
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let rb = OperatorAlgebra::tensor_factor(dims, Factor::B);

    let up_down = StateFunctional::vector_state(&ket(4, 1))?.with_dims(dims)?;
    let bell = StateFunctional::vector_state(&singlet())?.with_dims(dims)?;
    let classical = StateFunctional::bipartite(
        (projector(&ket(4, 1)) + projector(&ket(4, 2))) * c64(0.5, 0.0),
        dims,
    )?;

    let zz = tensor_product(&pauli_z(), &pauli_z());
    for (name, s) in [("|01>", &up_down), ("singlet", &bell), ("classical mix", &classical)] {
        println!(
            "{name:<14} <Z(x)Z> = {:>5.2}  purity {:.2}  product: {}",
            s.expectation(&zz)?.re,
            s.purity(),
            is_product_state(s, &ra, &rb, PRODUCT_TOL)?,
        );
    }

    // The singlet and the classical mixture agree on each factor but not globally.
    for (label, alg) in [("B(H)", &full), ("A factor", &ra), ("B factor", &rb)] {
        let d = norm_distance(&bell, &classical, alg)?;
        println!("distance(singlet, mix) on {label:<8} = {:.3}", d.value);
    }

    let support = support_projection(&classical, &ra)?;
    // Both reduced states are maximally mixed, so the support is the identity.
    println!("support of the mix in the A factor: trace {:.0} of 4", support.trace().re);
    Ok(())
}

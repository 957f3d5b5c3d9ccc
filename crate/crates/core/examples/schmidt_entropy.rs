//! Schmidt data and entanglement entropy for a few vectors, then verdicts
//! for the singlet relative to several algebra pairs.

use operon::algebra::OperatorAlgebra;
use operon::entanglement::{decide_entanglement, entanglement_entropy};
use operon::numerics::{c64, ket, pauli_z, schmidt_decompose, singlet};
use operon::random::{haar_vector, stream_rng};
use operon::{Dims, Factor, StateFunctional};

fn main() -> operon::Result<()> {
    let d22 = Dims::new(2, 2);
    let partial = (ket(4, 0) * c64(0.8, 0.0)) + (ket(4, 3) * c64(0.6, 0.0));
    let mut rng = stream_rng(1, 0);
    let d33 = Dims::new(3, 3);
    let vectors = [
        ("|00>", ket(4, 0), d22),
        ("0.8|00> + 0.6|11>", partial, d22),
        ("singlet", singlet(), d22),
        ("Haar 3x3", haar_vector(&mut rng, 9), d33),
    ];
    for (name, x, dims) in vectors {
        let s = schmidt_decompose(&x, dims)?;
        let coeffs: Vec<String> = s.coefficients.iter().map(|c| format!("{c:.3}")).collect();
        println!(
            "{name:<18} rank {}  coefficients [{}]  entropy {:.4} nats",
            s.rank,
            coeffs.join(", "),
            entanglement_entropy(&x, dims)?
        );
    }

    let rho = StateFunctional::vector_state(&singlet())?.with_dims(d22)?;
    let full_a = OperatorAlgebra::tensor_factor(d22, Factor::A);
    let full_b = OperatorAlgebra::tensor_factor(d22, Factor::B);
    let diag_a = OperatorAlgebra::local(&[pauli_z()], d22, Factor::A)?;
    let diag_b = OperatorAlgebra::local(&[pauli_z()], d22, Factor::B)?;
    for (label, ra, rb) in [
        ("full, full", &full_a, &full_b),
        ("diagonal, full", &diag_a, &full_b),
        ("diagonal, diagonal", &diag_a, &diag_b),
    ] {
        let v = decide_entanglement(&rho, ra, rb)?;
        println!("singlet relative to ({label}): {}", v.name());
    }
    Ok(())
}

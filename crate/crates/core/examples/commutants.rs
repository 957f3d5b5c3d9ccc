//! Generate operator algebras, compare them with their commutants and check
//! the double commutant. Ends with a three-site lattice net.

use operon::algebra::{center_and_factor, commutant, generate_algebra, LatticeNet, OperatorAlgebra};
use operon::numerics::{diag, pauli_x, tensor_product};
use operon::{Dims, Factor};

fn describe(name: &str, alg: &OperatorAlgebra) {
    let (center, factor) = center_and_factor(alg);
    let comm = commutant(alg);
    println!(
        "{name:<24} dim {:>2}  commutant dim {:>2}  center dim {}  factor {factor:<5}  R'' = R: {}",
        alg.dimension(),
        comm.dimension(),
        center.dimension(),
        alg.same_span(&commutant(&comm)),
    );
}

fn main() -> operon::Result<()> {
    let dims = Dims::new(2, 3);
    describe("B(C^2) (x) I", &OperatorAlgebra::tensor_factor(dims, Factor::A));
    describe("I (x) B(C^3)", &OperatorAlgebra::tensor_factor(dims, Factor::B));
    describe("diagonal on C^4", &OperatorAlgebra::diagonal(4));

    // One Hermitian with a doubly degenerate eigenvalue: block algebra C (+) C (+) C.
    let h = diag(&[1.0, 1.0, 2.0, 3.0]);
    describe("generated by diag(1,1,2,3)", &generate_algebra(&[h], 4)?);

    let flip = tensor_product(&pauli_x(), &pauli_x());
    describe("generated by X (x) X", &generate_algebra(&[flip], 4)?);

    let net = LatticeNet::new(vec![2, 2, 2])?;
    let regions = vec![vec![0], vec![1], vec![0, 1], vec![2], vec![1, 2]];
    let r = net.verify_axioms(&regions)?;
    println!("lattice net: isotony residual {:.1e}, microcausality residual {:.1e}", r.isotony, r.microcausality);
    Ok(())
}

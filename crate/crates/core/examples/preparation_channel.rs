//! Replace the A half of an entangled state by a chosen state, and push a
//! separable decomposition through a local channel.

use operon::entanglement::{decide_entanglement, local_preparation_channel, min_pt_eigen, transport_certificate};
use operon::algebra::OperatorAlgebra;
use operon::numerics::{partial_trace, tensor_product, trace_norm};
use operon::random::{random_channel_kraus, random_density, stream_rng};
use operon::states::{ProductCertificate, ProductTerm};
use operon::{Dims, Factor, StateFunctional};

fn main() -> operon::Result<()> {
    let dims = Dims::new(2, 3);
    let mut rng = stream_rng(7, 0);

    let input = StateFunctional::bipartite(random_density(&mut rng, 6, 1), dims)?;
    let target = StateFunctional::new(random_density(&mut rng, 2, 2))?;
    let channel = local_preparation_channel(&target, dims)?;
    let out = channel.update_state(&input)?.state.expect("nonselective");
    let expected = tensor_product(target.density(), &partial_trace(input.density(), dims, Factor::B)?);
    println!("preparation: {} Kraus operators, output error {:.1e}", channel.kraus().len(), trace_norm(&(out.density() - expected)));
    let ra = OperatorAlgebra::tensor_factor(dims, Factor::A);
    let rb = OperatorAlgebra::tensor_factor(dims, Factor::B);
    println!("input {}, output {}", decide_entanglement(&input, &ra, &rb)?.name(), decide_entanglement(&out, &ra, &rb)?.name());

    let terms = (0..3)
        .map(|_| ProductTerm { weight: 1.0 / 3.0, a: random_density(&mut rng, 2, 2), b: random_density(&mut rng, 3, 3) })
        .collect();
    let cert = ProductCertificate::new(dims, terms);
    let kraus = random_channel_kraus(&mut rng, 3, 2);
    let local = operon::operations::lift_local_to(&kraus, dims, Factor::B)?;
    let rho = StateFunctional::bipartite(cert.reconstruct(), dims)?;
    let after = local.update_state(&rho)?.state.expect("nonselective");
    let moved = transport_certificate(&cert, &kraus, Factor::B)?.expect("nonnull");
    println!(
        "transported certificate: residual {:.1e}, min PT eigenvalue {:.3e}",
        trace_norm(&(moved.reconstruct() - after.density())),
        min_pt_eigen(&after, dims)?.0
    );
    Ok(())
}

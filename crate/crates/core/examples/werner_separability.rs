//! Sweep the Werner family `p |singlet><singlet| + (1-p) I/4` and report the
//! partial-transpose eigenvalue next to the separability verdict.

use std::time::Instant;

use operon::entanglement::{min_pt_eigen, ppt_verdict, SeparabilityVerdict};
use operon::numerics::{c64, identity, projector, singlet};
use operon::{Dims, StateFunctional};

fn main() -> operon::Result<()> {
    let dims = Dims::new(2, 2);
    println!("{:>5} {:>12} {:>13} {:>9}", "p", "min PT eig", "verdict", "detail");
    for p in [0.0, 0.2, 0.3, 1.0 / 3.0, 0.4, 0.7, 1.0] {
        let d = projector(&singlet()) * c64(p, 0.0) + identity(4) * c64((1.0 - p) / 4.0, 0.0);
        let rho = StateFunctional::new(d)?.with_dims(dims)?;
        let start = Instant::now();
        let (min_eig, _) = min_pt_eigen(&rho, dims)?;
        let verdict = ppt_verdict(&rho, dims)?;
        let detail = match &verdict {
            SeparabilityVerdict::Separable { certificate } => {
                format!("{} terms, residual {:.1e}", certificate.len(), certificate.residual(rho.density()))
            }
            SeparabilityVerdict::Entangled { witness } => format!("witness {:.4}", witness.min_eigenvalue),
            SeparabilityVerdict::Inconclusive { distance } => format!("distance {distance:.2e}"),
        };
        println!(
            "{p:>5.3} {min_eig:>12.6} {:>13} {detail} ({:.0?})",
            verdict.name(),
            start.elapsed()
        );
    }
    Ok(())
}

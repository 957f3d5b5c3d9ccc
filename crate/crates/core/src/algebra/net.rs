use super::{OperatorAlgebra, Structure};
use crate::error::{Error, Result};
use crate::numerics::{c64, identity, matrix_unit, ComplexMatrix, Dims, Factor};

/// A chain of finite-dimensional sites; each region gets the full matrix
/// algebra of its sites tensored with the identity on the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeNet {
    site_dims: Vec<usize>,
}

/// Worst-case residuals of the net axioms over a family of regions.
#[derive(Clone, Copy, Debug, Default)]
pub struct NetAxiomResiduals {
    /// Max distance of a sub-region basis element from the super-region algebra.
    pub isotony: f64,
    /// Max commutator norm between algebras of disjoint regions.
    pub microcausality: f64,
}

impl LatticeNet {
    pub fn new(site_dims: Vec<usize>) -> Result<Self> {
        if site_dims.iter().any(|&d| d == 0) {
            return Err(Error::Precondition("site dimensions must be positive".into()));
        }
        Ok(LatticeNet { site_dims })
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn ambient_dim(&self) -> usize {
        self.site_dims.iter().product()
    }

    fn embed(&self, site: usize, op: &ComplexMatrix) -> ComplexMatrix {
        let mut out = identity(1);
        for (s, &d) in self.site_dims.iter().enumerate() {
            let factor = if s == site { op.clone() } else { identity(d) };
            out = out.kronecker(&factor);
        }
        out
    }

    fn normalize_region(&self, region: &[usize]) -> Result<Vec<usize>> {
        let mut sites = region.to_vec();
        sites.sort_unstable();
        sites.dedup();
        if let Some(&bad) = sites.iter().find(|&&s| s >= self.site_dims.len()) {
            return Err(Error::UnknownSite { site: bad, sites: self.site_dims.len() });
        }
        Ok(sites)
    }

    /// Algebra of a region: `B(H_region) (x) I_rest`.
    pub fn net_algebra(&self, region: &[usize]) -> Result<OperatorAlgebra> {
        let sites = self.normalize_region(region)?;
        let n = self.ambient_dim();
        if sites.is_empty() {
            return Ok(OperatorAlgebra::scalars(n));
        }
        let generators: Vec<ComplexMatrix> = sites
            .iter()
            .flat_map(|&s| {
                let d = self.site_dims[s];
                (1..d).map(move |i| (s, matrix_unit(d, i - 1, i)))
            })
            .map(|(s, m)| self.embed(s, &m))
            .collect();

        // Basis: products of matrix units on region sites, normalized identity elsewhere.
        let mut basis = vec![identity(1)];
        for (s, &d) in self.site_dims.iter().enumerate() {
            let locals: Vec<ComplexMatrix> = if sites.contains(&s) {
                (0..d).flat_map(|i| (0..d).map(move |j| matrix_unit(d, i, j))).collect()
            } else {
                vec![identity(d) / c64((d as f64).sqrt(), 0.0)]
            };
            basis = basis
                .iter()
                .flat_map(|b| locals.iter().map(move |l| b.kronecker(l)))
                .collect();
        }

        let structure = self.structure_of(&sites);
        Ok(OperatorAlgebra::from_parts(n, generators, basis, structure))
    }

    fn structure_of(&self, sites: &[usize]) -> Structure {
        let count = self.site_dims.len();
        if sites.len() == count {
            return Structure::Full;
        }
        let split = |k: usize| {
            Dims::new(
                self.site_dims[..k].iter().product(),
                self.site_dims[k..].iter().product(),
            )
        };
        let prefix = sites.iter().enumerate().all(|(i, &s)| i == s);
        if prefix {
            return Structure::TensorFactor { factor: Factor::A, dims: split(sites.len()) };
        }
        let start = count - sites.len();
        let suffix = sites.iter().enumerate().all(|(i, &s)| s == start + i);
        if suffix {
            return Structure::TensorFactor { factor: Factor::B, dims: split(start) };
        }
        Structure::General
    }

    /// Check isotony on every nested pair and microcausality on every
    /// disjoint pair among `regions`.
    pub fn verify_axioms(&self, regions: &[Vec<usize>]) -> Result<NetAxiomResiduals> {
        let algebras = regions
            .iter()
            .map(|r| self.net_algebra(r))
            .collect::<Result<Vec<_>>>()?;
        let mut out = NetAxiomResiduals::default();
        for (i, ri) in regions.iter().enumerate() {
            for (j, rj) in regions.iter().enumerate() {
                if i == j {
                    continue;
                }
                if ri.iter().all(|s| rj.contains(s)) {
                    let worst = algebras[i]
                        .basis()
                        .iter()
                        .map(|b| algebras[j].distance_to(b))
                        .fold(0.0, f64::max);
                    out.isotony = out.isotony.max(worst);
                }
                if ri.iter().all(|s| !rj.contains(s)) {
                    out.microcausality =
                        out.microcausality.max(algebras[i].commutation_residual(&algebras[j]));
                }
            }
        }
        Ok(out)
    }
}
